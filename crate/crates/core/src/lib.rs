//! Single-qubit thermometry: exact outcome statistics and Fisher information of
//! measure-and-reprepare (IID) and sequential measurement (SMS) protocols for a
//! probe thermalizing with a bosonic bath.

pub mod bloch;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod fisher;
pub mod numeric;
pub mod povm;
pub mod trajectory;

pub use bloch::{
    evolve, evolve_tangent, thermal_state, BathParams, QubitState, StateTangent, ThermalMap,
    WeightedState,
};
pub use error::{Result, ThermoError};
pub use fisher::{fi_iid, fi_single, fi_sms, fisher_information, FiResult, ProtocolSpec, Scheme};
pub use povm::{apply, apply_tangent, probability, Branch, MeasurementFamily, Outcome};

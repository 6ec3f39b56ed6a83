//! Two-outcome noisy population measurement.
//!
//! Kraus operators `M_+ = cos(phi) Pi_+ + sin(phi) Pi_-` and
//! `M_- = sin(phi) Pi_+ + cos(phi) Pi_-`. `phi = 0` is a projective energy
//! measurement, `phi = pi/4` returns a fair coin and leaves the state untouched.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bloch::{QubitState, StateTangent, WeightedState};
use crate::error::{Result, ThermoError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Plus => "+",
            Outcome::Minus => "-",
        })
    }
}

/// Result of applying one Kraus branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    Possible(WeightedState),
    /// The outcome has probability zero; there is no post-measurement state.
    Impossible,
}

impl Branch {
    pub fn weight(&self) -> f64 {
        match self {
            Branch::Possible(w) => w.weight,
            Branch::Impossible => 0.0,
        }
    }

    pub fn is_impossible(&self) -> bool {
        matches!(self, Branch::Impossible)
    }

    pub fn state(&self) -> Option<&QubitState> {
        match self {
            Branch::Possible(w) => Some(&w.state),
            Branch::Impossible => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementFamily {
    phi: f64,
    cos_2phi: f64,
    sin_2phi: f64,
}

impl MeasurementFamily {
    pub fn new(phi: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_4).contains(&phi) {
            return Err(ThermoError::PhiOutOfRange(phi));
        }
        // sin(pi/2 - 2 phi) is exactly zero at phi = pi/4, unlike cos(2 phi).
        let shifted = FRAC_PI_2 - 2.0 * phi;
        Ok(Self {
            phi,
            cos_2phi: shifted.sin(),
            sin_2phi: shifted.cos(),
        })
    }

    pub fn projective() -> Self {
        Self::new(0.0).unwrap()
    }

    pub fn uninformative() -> Self {
        Self::new(FRAC_PI_4).unwrap()
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Contrast `cos(2 phi)` of the population readout.
    pub fn contrast(&self) -> f64 {
        self.cos_2phi
    }

    /// Diagonal of `M_s^dagger M_s` in the (excited, ground) basis.
    pub fn effect(&self, s: Outcome) -> [f64; 2] {
        let big = 0.5 * (1.0 + self.cos_2phi);
        let small = 0.5 * (1.0 - self.cos_2phi);
        match s {
            Outcome::Plus => [big, small],
            Outcome::Minus => [small, big],
        }
    }

    /// Kraus operator `M_s` as a real diagonal in the (excited, ground) basis.
    pub fn kraus(&self, s: Outcome) -> [f64; 2] {
        let (sin, cos) = self.phi.sin_cos();
        match s {
            Outcome::Plus => [cos, sin],
            Outcome::Minus => [sin, cos],
        }
    }

    fn branch_prob(&self, z: f64, s: Outcome) -> f64 {
        0.5 * (1.0 + s.sign() * self.cos_2phi * z)
    }
}

/// `(P(+), P(-))` with `P(s) = (1 + s r_z cos 2phi) / 2`.
pub fn probability(family: &MeasurementFamily, state: &QubitState) -> (f64, f64) {
    let plus = family.branch_prob(state.z(), Outcome::Plus);
    (plus, 1.0 - plus)
}

pub fn outcome_probability(family: &MeasurementFamily, state: &QubitState, s: Outcome) -> f64 {
    let (plus, minus) = probability(family, state);
    match s {
        Outcome::Plus => plus,
        Outcome::Minus => minus,
    }
}

/// Applies `M_s rho M_s^dagger` and renormalizes.
pub fn apply(family: &MeasurementFamily, state: &QubitState, s: Outcome) -> Branch {
    let weight = outcome_probability(family, state, s);
    if weight <= 0.0 {
        return Branch::Impossible;
    }
    let sc = s.sign() * family.cos_2phi;
    let denom = 1.0 + sc * state.z();
    let coh = family.sin_2phi / denom;
    Branch::Possible(WeightedState {
        state: QubitState::from_components(
            coh * state.x(),
            coh * state.y(),
            (state.z() + sc) / denom,
        ),
        weight,
    })
}

/// Applies branch `s` to an accumulated branch and its temperature derivative.
///
/// The output weight is `input.weight * P(s | input.state)`, so a fresh
/// `WeightedState::from(state)` yields the outcome probability itself.
pub fn apply_tangent(
    family: &MeasurementFamily,
    input: &WeightedState,
    tangent: &StateTangent,
    s: Outcome,
) -> (Branch, StateTangent) {
    let state = &input.state;
    let sc = s.sign() * family.cos_2phi;
    let step = outcome_probability(family, state, s);
    if step <= 0.0 {
        return (Branch::Impossible, StateTangent::ZERO);
    }
    let step_dt = 0.5 * sc * tangent.dz;
    let denom = 1.0 + sc * state.z();
    let coh = family.sin_2phi / denom;
    let coh_dt = -family.sin_2phi * sc * tangent.dz / (denom * denom);

    let out_state =
        QubitState::from_components(coh * state.x(), coh * state.y(), (state.z() + sc) / denom);
    let out_tangent = StateTangent {
        dx: coh * tangent.dx + coh_dt * state.x(),
        dy: coh * tangent.dy + coh_dt * state.y(),
        dz: tangent.dz * (1.0 - sc * sc) / (denom * denom),
        dweight: tangent.dweight * step + input.weight * step_dt,
    };
    (
        Branch::Possible(WeightedState {
            state: out_state,
            weight: input.weight * step,
        }),
        out_tangent,
    )
}

//! Thermalization of a qubit probe in contact with a bosonic bath, in Bloch form.
//!
//! The probe obeys a Markovian master equation with decay rate
//! `gamma_plus = (1 + N_th) * gamma` and excitation rate `gamma_minus = N_th * gamma`.
//! Populations relax at the total rate `Gamma = gamma * coth(beta / 2)` towards
//! `r_z = -tanh(beta / 2)`; coherences decay at `Gamma / 2` while precessing at `Omega`.
//!
//! Temperatures are measured in units of `hbar * Omega / k_B`, so `beta = 1 / T`,
//! and every derivative in this crate is taken with respect to `T`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ThermoError};

/// Slack allowed on `|r|` before a Bloch vector is rejected.
pub const BLOCH_NORM_SLACK: f64 = 1e-12;

/// Density matrix of the probe, `rho = (1 + r . sigma) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    x: f64,
    y: f64,
    z: f64,
}

impl QubitState {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm_sq = x * x + y * y + z * z;
        if !norm_sq.is_finite() || norm_sq > 1.0 + BLOCH_NORM_SLACK {
            return Err(ThermoError::InvalidBlochVector {
                x,
                y,
                z,
                norm: norm_sq.sqrt(),
            });
        }
        Ok(Self { x, y, z })
    }

    /// Skips validation; only for values produced by CPTP maps on valid states.
    pub(crate) const fn from_components(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Ground state `Pi_-`, `r = (0, 0, -1)`.
    pub const fn ground() -> Self {
        Self::from_components(0.0, 0.0, -1.0)
    }

    /// Excited state `Pi_+`, `r = (0, 0, 1)`.
    pub const fn excited() -> Self {
        Self::from_components(0.0, 0.0, 1.0)
    }

    pub const fn maximally_mixed() -> Self {
        Self::from_components(0.0, 0.0, 0.0)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// Population imbalance `<sigma_z>`.
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn bloch(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// `Tr rho^2 = (1 + |r|^2) / 2`.
    pub fn purity(&self) -> f64 {
        0.5 * (1.0 + self.x * self.x + self.y * self.y + self.z * self.z)
    }

    /// Populations `(p_excited, p_ground) = ((1 + r_z) / 2, (1 - r_z) / 2)`.
    pub fn populations(&self) -> (f64, f64) {
        (0.5 * (1.0 + self.z), 0.5 * (1.0 - self.z))
    }
}

/// A normalized state together with the trace of the unnormalized branch it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedState {
    pub state: QubitState,
    pub weight: f64,
}

impl From<QubitState> for WeightedState {
    fn from(state: QubitState) -> Self {
        Self { state, weight: 1.0 }
    }
}

/// Temperature derivatives of a [`WeightedState`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StateTangent {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    pub dweight: f64,
}

impl StateTangent {
    pub const ZERO: Self = Self {
        dx: 0.0,
        dy: 0.0,
        dz: 0.0,
        dweight: 0.0,
    };

    pub fn is_finite(&self) -> bool {
        self.dx.is_finite()
            && self.dy.is_finite()
            && self.dz.is_finite()
            && self.dweight.is_finite()
    }
}

/// Bath temperature, coupling and probe frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    temperature: f64,
    gamma: f64,
    omega_ratio: f64,
}

impl BathParams {
    pub fn new(temperature: f64, gamma: f64) -> Result<Self> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(ThermoError::InvalidTemperature(temperature));
        }
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(ThermoError::InvalidCoupling(gamma));
        }
        Ok(Self {
            temperature,
            gamma,
            omega_ratio: 0.0,
        })
    }

    /// Sets `Omega / gamma`. Zero (the default) is the rotating frame.
    pub fn with_omega_ratio(mut self, omega_ratio: f64) -> Self {
        self.omega_ratio = omega_ratio;
        self
    }

    /// Same coupling and frequency at another temperature.
    pub fn at_temperature(&self, temperature: f64) -> Result<Self> {
        Ok(Self::new(temperature, self.gamma)?.with_omega_ratio(self.omega_ratio))
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega_ratio(&self) -> f64 {
        self.omega_ratio
    }

    /// Probe frequency in inverse-time units.
    pub fn omega(&self) -> f64 {
        self.omega_ratio * self.gamma
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }

    /// Mean thermal occupation `1 / (e^beta - 1)`.
    pub fn n_th(&self) -> f64 {
        1.0 / self.beta().exp_m1()
    }

    pub fn gamma_plus(&self) -> f64 {
        (1.0 + self.n_th()) * self.gamma
    }

    pub fn gamma_minus(&self) -> f64 {
        self.n_th() * self.gamma
    }

    /// Total relaxation rate `Gamma = gamma * coth(beta / 2)`.
    pub fn total_rate(&self) -> f64 {
        self.gamma / self.tanh_half_beta()
    }

    pub fn tanh_half_beta(&self) -> f64 {
        (0.5 * self.beta()).tanh()
    }

    /// `d tanh(beta/2) / dT = -sech^2(beta/2) / (2 T^2)`.
    pub fn d_tanh_half_beta_dt(&self) -> f64 {
        let c = (0.5 * self.beta()).cosh();
        let t = self.temperature;
        -1.0 / (2.0 * t * t * c * c)
    }

    /// `dGamma / dT = gamma / (2 T^2 sinh^2(beta/2))`.
    pub fn d_total_rate_dt(&self) -> f64 {
        let s = (0.5 * self.beta()).sinh();
        let t = self.temperature;
        self.gamma / (2.0 * t * t * s * s)
    }
}

/// Fixed point of the thermalization map, `r = (0, 0, -tanh(beta/2))`.
pub fn thermal_state(bath: &BathParams) -> QubitState {
    QubitState::from_components(0.0, 0.0, -bath.tanh_half_beta())
}

/// `d r_th / dT`.
pub fn thermal_tangent(bath: &BathParams) -> StateTangent {
    StateTangent {
        dz: -bath.d_tanh_half_beta_dt(),
        ..StateTangent::ZERO
    }
}

/// The thermalization channel `exp(t L)` for one bath and duration.
///
/// Holds the decay and rotation factors, so repeated steps with the same
/// `(bath, t)` skip the transcendental evaluations.
#[derive(Debug, Clone, Copy)]
pub struct ThermalMap {
    t: f64,
    /// `e^{-Gamma t}`
    pop: f64,
    /// `1 - e^{-Gamma t}`
    relax: f64,
    /// `e^{-Gamma t / 2}`
    coh: f64,
    cos_rot: f64,
    sin_rot: f64,
    target: f64,
    rate_dt: f64,
    target_dt: f64,
}

impl ThermalMap {
    pub fn new(bath: &BathParams, t: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(ThermoError::NegativeDuration(t));
        }
        let rate = bath.total_rate();
        let (sin_rot, cos_rot) = (bath.omega() * t).sin_cos();
        Ok(Self {
            t,
            pop: (-rate * t).exp(),
            relax: -(-rate * t).exp_m1(),
            coh: (-0.5 * rate * t).exp(),
            cos_rot,
            sin_rot,
            target: bath.tanh_half_beta(),
            rate_dt: bath.d_total_rate_dt(),
            target_dt: bath.d_tanh_half_beta_dt(),
        })
    }

    fn rotate(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.cos_rot * x - self.sin_rot * y,
            self.sin_rot * x + self.cos_rot * y,
        )
    }

    pub fn apply(&self, s: &QubitState) -> QubitState {
        let (x, y) = self.rotate(s.x, s.y);
        QubitState::from_components(
            self.coh * x,
            self.coh * y,
            self.pop * s.z - self.relax * self.target,
        )
    }

    /// Both the relaxation rate and the fixed point depend on `T`; the branch
    /// weight is untouched because the map is trace preserving.
    pub fn apply_tangent(
        &self,
        s: &QubitState,
        tangent: &StateTangent,
    ) -> (QubitState, StateTangent) {
        // d/dT e^{-Gamma t} = -t Gamma' e^{-Gamma t}; the relax term carries the opposite sign.
        let dz = self.pop * (tangent.dz - self.t * self.rate_dt * (s.z + self.target))
            - self.relax * self.target_dt;

        let (rx, ry) = self.rotate(s.x, s.y);
        let (dx_rot, dy_rot) = self.rotate(tangent.dx, tangent.dy);
        let shrink = 0.5 * self.t * self.rate_dt;
        (
            QubitState::from_components(
                self.coh * rx,
                self.coh * ry,
                self.pop * s.z - self.relax * self.target,
            ),
            StateTangent {
                dx: self.coh * (dx_rot - shrink * rx),
                dy: self.coh * (dy_rot - shrink * ry),
                dz,
                dweight: tangent.dweight,
            },
        )
    }
}

/// Evolves `state` for a time `t` under the thermalization map.
pub fn evolve(state: &QubitState, bath: &BathParams, t: f64) -> Result<QubitState> {
    Ok(ThermalMap::new(bath, t)?.apply(state))
}

/// Evolves a state together with its temperature derivative.
pub fn evolve_tangent(
    state: &QubitState,
    tangent: &StateTangent,
    bath: &BathParams,
    t: f64,
) -> Result<(QubitState, StateTangent)> {
    Ok(ThermalMap::new(bath, t)?.apply_tangent(state, tangent))
}

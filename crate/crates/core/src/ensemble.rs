//! Input-state ensembles and the spread of Fisher information across them.
//!
//! Mixed input states are drawn from the Hilbert-Schmidt measure: the reduced
//! state of a Haar-random pure state on `C^2 (x) C^2`. Equivalently
//! `rho = G G^dagger / Tr(G G^dagger)` with `G` a 2x2 complex Ginibre matrix.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{BathParams, QubitState};
use crate::error::{Result, ThermoError};
use crate::fisher::{fisher_information, ProtocolSpec, Scheme};
use crate::numeric::{linspace, mean};
use crate::povm::MeasurementFamily;

/// Largest `n` accepted by [`bandwidth_ratio`].
pub const MAX_BANDWIDTH_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub samples: usize,
    pub seed: u64,
    /// Append the ground and excited states after the random samples.
    pub include_poles: bool,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self {
            samples: 1000,
            seed: 0,
            include_poles: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub steps: usize,
}

impl Default for TemperatureGrid {
    fn default() -> Self {
        Self {
            t_min: 0.05,
            t_max: 3.0,
            steps: 200,
        }
    }
}

impl TemperatureGrid {
    pub fn new(t_min: f64, t_max: f64, steps: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_min < t_max && t_max.is_finite() && steps >= 2) {
            return Err(ThermoError::InvalidGrid {
                t_min,
                t_max,
                steps,
            });
        }
        Ok(Self {
            t_min,
            t_max,
            steps,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.t_min, self.t_max, self.steps)
    }
}

/// Draws one Hilbert-Schmidt distributed state from `rng`.
pub fn sample_state<R: rand::Rng + ?Sized>(rng: &mut R) -> QubitState {
    let mut g = [0.0f64; 8];
    for v in &mut g {
        *v = StandardNormal.sample(rng);
    }
    // rows (a, b) and (c, d) of G, each entry re + i im
    let [ar, ai, br, bi, cr, ci, dr, di] = g;
    let top = ar * ar + ai * ai + br * br + bi * bi;
    let bottom = cr * cr + ci * ci + dr * dr + di * di;
    // (G G^dagger)_{01} = a conj(c) + b conj(d)
    let off_re = ar * cr + ai * ci + br * dr + bi * di;
    let off_im = ai * cr - ar * ci + bi * dr - br * di;
    let trace = top + bottom;
    QubitState::from_components(
        2.0 * off_re / trace,
        -2.0 * off_im / trace,
        (top - bottom) / trace,
    )
}

/// Sample `i` uses its own ChaCha stream of `seed`, so the list does not
/// depend on how it is computed.
pub fn sample_states(spec: &EnsembleSpec) -> Vec<QubitState> {
    let mut states: Vec<QubitState> = (0..spec.samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i);
            sample_state(&mut rng)
        })
        .collect();
    if spec.include_poles {
        states.push(QubitState::ground());
        states.push(QubitState::excited());
    }
    states
}

/// Fisher information of every ensemble member at every grid temperature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleFi {
    pub scheme: Scheme,
    pub n: usize,
    pub tau: f64,
    pub phi: f64,
    pub temperatures: Vec<f64>,
    pub states: Vec<QubitState>,
    /// `values[t][k]` for temperature `t` and state `k`.
    pub values: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandCurve {
    pub scheme: Scheme,
    pub n: usize,
    pub tau: f64,
    pub phi: f64,
    pub temperatures: Vec<f64>,
    pub fi_min: Vec<f64>,
    pub fi_mean: Vec<f64>,
    pub fi_max: Vec<f64>,
    pub argmin_state: Vec<QubitState>,
    pub argmax_state: Vec<QubitState>,
}

impl BandCurve {
    /// `(max - min) / max` per grid point, zero where the band vanishes.
    pub fn relative_width(&self) -> Vec<f64> {
        self.fi_min
            .iter()
            .zip(&self.fi_max)
            .map(|(&lo, &hi)| if hi > 0.0 { (hi - lo) / hi } else { 0.0 })
            .collect()
    }
}

fn extremes(values: &[f64]) -> (usize, usize) {
    let mut lo = 0;
    let mut hi = 0;
    for (k, &v) in values.iter().enumerate() {
        if v < values[lo] {
            lo = k;
        }
        if v > values[hi] {
            hi = k;
        }
    }
    (lo, hi)
}

impl EnsembleFi {
    pub fn band(&self) -> BandCurve {
        let mut band = BandCurve {
            scheme: self.scheme,
            n: self.n,
            tau: self.tau,
            phi: self.phi,
            temperatures: self.temperatures.clone(),
            fi_min: Vec::with_capacity(self.values.len()),
            fi_mean: Vec::with_capacity(self.values.len()),
            fi_max: Vec::with_capacity(self.values.len()),
            argmin_state: Vec::with_capacity(self.values.len()),
            argmax_state: Vec::with_capacity(self.values.len()),
        };
        for row in &self.values {
            let (lo, hi) = extremes(row);
            band.fi_min.push(row[lo]);
            band.fi_max.push(row[hi]);
            // rounding can push the mean a hair outside [min, max]
            band.fi_mean.push(mean(row).clamp(row[lo], row[hi]));
            band.argmin_state.push(self.states[lo]);
            band.argmax_state.push(self.states[hi]);
        }
        band
    }

    /// Curve of one ensemble member.
    pub fn curve(&self, state: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[state]).collect()
    }
}

/// Evaluates the protocol for every state at every temperature.
pub fn ensemble_fi_for_states(
    protocol: &ProtocolSpec,
    bath: &BathParams,
    temperatures: &[f64],
    states: &[QubitState],
) -> Result<EnsembleFi> {
    if states.is_empty() {
        return Err(ThermoError::EmptyEnsemble);
    }
    let width = states.len();
    let flat: Vec<f64> = (0..temperatures.len() * width)
        .into_par_iter()
        .map(|idx| {
            let b = bath.at_temperature(temperatures[idx / width])?;
            let spec = protocol.with_rho0(states[idx % width]);
            Ok(fisher_information(&spec, &b)?.value)
        })
        .collect::<Result<_>>()?;
    Ok(EnsembleFi {
        scheme: protocol.scheme,
        n: protocol.n,
        tau: protocol.tau,
        phi: protocol.family.phi(),
        temperatures: temperatures.to_vec(),
        states: states.to_vec(),
        values: flat.chunks(width).map(<[f64]>::to_vec).collect(),
    })
}

pub fn ensemble_fi(
    scheme: Scheme,
    n: usize,
    tau: f64,
    family: &MeasurementFamily,
    bath: &BathParams,
    grid: &TemperatureGrid,
    ensemble: &EnsembleSpec,
) -> Result<EnsembleFi> {
    let protocol = ProtocolSpec::new(scheme, n, tau, QubitState::ground(), *family)?;
    ensemble_fi_for_states(&protocol, bath, &grid.points(), &sample_states(ensemble))
}

/// Pointwise min / mean / max of the Fisher information over the ensemble.
pub fn band_curve(
    scheme: Scheme,
    n: usize,
    tau: f64,
    family: &MeasurementFamily,
    bath: &BathParams,
    grid: &TemperatureGrid,
    ensemble: &EnsembleSpec,
) -> Result<BandCurve> {
    Ok(ensemble_fi(scheme, n, tau, family, bath, grid, ensemble)?.band())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandWidthRatio {
    pub n_values: Vec<usize>,
    pub ratio: Vec<f64>,
    pub delta_iid: Vec<f64>,
    pub delta_sms: Vec<f64>,
    /// Temperature at which the IID ensemble mean peaks; all widths are taken there.
    pub peak_temperature: f64,
    pub tau: f64,
    pub phi: f64,
}

/// `Delta F_SMS / Delta F_IID` for `n = 1..=n_max`, widths taken at the peak of
/// the IID ensemble-mean curve.
pub fn bandwidth_ratio(
    n_max: usize,
    tau: f64,
    family: &MeasurementFamily,
    bath: &BathParams,
    grid: &TemperatureGrid,
    ensemble: &EnsembleSpec,
) -> Result<BandWidthRatio> {
    if n_max == 0 {
        return Err(ThermoError::ZeroMeasurements);
    }
    if n_max > MAX_BANDWIDTH_N {
        return Err(ThermoError::EnumerationBudget {
            n: n_max,
            max: MAX_BANDWIDTH_N,
        });
    }
    let states = sample_states(ensemble);
    let base = ProtocolSpec::new(Scheme::Iid, 1, tau, QubitState::ground(), *family)?;
    // F_IID^(n) = n F^(1), so the peak location is the same for every n
    let iid_mean = ensemble_fi_for_states(&base, bath, &grid.points(), &states)?
        .band()
        .fi_mean;
    let peak = grid.points()[extremes(&iid_mean).1];

    let width = |scheme: Scheme, n: usize| -> Result<f64> {
        let spec = base.with_scheme(scheme).with_n(n)?;
        let row = &ensemble_fi_for_states(&spec, bath, &[peak], &states)?.values[0];
        let (lo, hi) = extremes(row);
        Ok(row[hi] - row[lo])
    };

    let mut out = BandWidthRatio {
        n_values: Vec::with_capacity(n_max),
        ratio: Vec::with_capacity(n_max),
        delta_iid: Vec::with_capacity(n_max),
        delta_sms: Vec::with_capacity(n_max),
        peak_temperature: peak,
        tau,
        phi: family.phi(),
    };
    for n in 1..=n_max {
        let d_iid = width(Scheme::Iid, n)?;
        let d_sms = width(Scheme::Sms, n)?;
        if d_iid == 0.0 {
            return Err(ThermoError::ZeroBandWidth { temperature: peak });
        }
        out.n_values.push(n);
        out.ratio.push(d_sms / d_iid);
        out.delta_iid.push(d_iid);
        out.delta_sms.push(d_sms);
    }
    Ok(out)
}

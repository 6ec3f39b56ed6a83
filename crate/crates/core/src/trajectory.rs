//! Simulated measurement records, maximum-likelihood temperature estimates and
//! their spread compared with the Cramer-Rao bound.
//!
//! Trial `i` of a report draws from ChaCha stream `i` of the report seed, so the
//! report is the same for any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{BathParams, ThermalMap};
use crate::error::{Result, ThermoError};
use crate::fisher::{fi_sms_projective, fisher_information, ProtocolSpec, Scheme, MAX_ENUMERATION};
use crate::numeric::{linspace, mean, median, pairwise_sum};
use crate::povm::{apply, outcome_probability, probability, Branch, Outcome};

/// Coarse grid size of the likelihood scan.
pub const COARSE_POINTS: usize = 128;
/// Golden-section stopping width.
pub const MLE_TOLERANCE: f64 = 1e-6;
pub const MIN_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub outcomes: Vec<Outcome>,
    pub scheme: Scheme,
    pub true_temperature: f64,
    pub seed: u64,
    pub stream: u64,
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws one outcome string of the protocol.
pub fn sample_outcomes<R: Rng + ?Sized>(
    spec: &ProtocolSpec,
    bath: &BathParams,
    rng: &mut R,
) -> Result<Vec<Outcome>> {
    let map = ThermalMap::new(bath, spec.tau)?;
    let draw = |p_plus: f64, rng: &mut R| {
        if rng.random::<f64>() < p_plus {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    };
    let mut outcomes = Vec::with_capacity(spec.n);
    match spec.scheme {
        Scheme::Iid => {
            let (p_plus, _) = probability(&spec.family, &map.apply(&spec.rho0));
            outcomes.extend((0..spec.n).map(|_| draw(p_plus, rng)));
        }
        Scheme::Sms => {
            let mut state = spec.rho0;
            for _ in 0..spec.n {
                let evolved = map.apply(&state);
                let s = draw(probability(&spec.family, &evolved).0, rng);
                // a drawn outcome always has positive probability
                if let Branch::Possible(w) = apply(&spec.family, &evolved, s) {
                    state = w.state;
                }
                outcomes.push(s);
            }
        }
    }
    Ok(outcomes)
}

/// Simulates one record from stream 0 of `seed`.
pub fn simulate(spec: &ProtocolSpec, bath: &BathParams, seed: u64) -> Result<TrajectoryRecord> {
    simulate_stream(spec, bath, seed, 0)
}

pub fn simulate_stream(
    spec: &ProtocolSpec,
    bath: &BathParams,
    seed: u64,
    stream: u64,
) -> Result<TrajectoryRecord> {
    let outcomes = sample_outcomes(spec, bath, &mut trial_rng(seed, stream))?;
    Ok(TrajectoryRecord {
        outcomes,
        scheme: spec.scheme,
        true_temperature: bath.temperature(),
        seed,
        stream,
    })
}

/// `log P(outcomes | T)`; `-inf` for impossible strings.
pub fn log_likelihood(spec: &ProtocolSpec, bath: &BathParams, outcomes: &[Outcome]) -> Result<f64> {
    if outcomes.len() != spec.n {
        return Err(ThermoError::OutcomeLengthMismatch {
            expected: spec.n,
            got: outcomes.len(),
        });
    }
    let map = ThermalMap::new(bath, spec.tau)?;
    match spec.scheme {
        Scheme::Iid => {
            let evolved = map.apply(&spec.rho0);
            let plus = outcomes.iter().filter(|&&s| s == Outcome::Plus).count() as f64;
            let minus = outcomes.len() as f64 - plus;
            let term = |count: f64, s: Outcome| {
                if count == 0.0 {
                    0.0
                } else {
                    count * outcome_probability(&spec.family, &evolved, s).ln()
                }
            };
            Ok(term(plus, Outcome::Plus) + term(minus, Outcome::Minus))
        }
        Scheme::Sms => {
            let mut state = spec.rho0;
            let mut total = 0.0;
            for &s in outcomes {
                match apply(&spec.family, &map.apply(&state), s) {
                    Branch::Possible(w) => {
                        total += w.weight.ln();
                        state = w.state;
                    }
                    Branch::Impossible => return Ok(f64::NEG_INFINITY),
                }
            }
            Ok(total)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriorRange {
    pub lo: f64,
    pub hi: f64,
}

impl Default for PriorRange {
    fn default() -> Self {
        Self { lo: 0.1, hi: 5.0 }
    }
}

impl PriorRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo < hi && hi.is_finite()) {
            return Err(ThermoError::InvalidPrior { lo, hi });
        }
        Ok(Self { lo, hi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleEstimate {
    pub temperature: f64,
    pub log_likelihood: f64,
    /// The maximum sits on an edge of the prior range.
    pub boundary_hit: bool,
}

/// Maximizes a unimodal `f` on `[a, b]` by golden-section search.
pub fn golden_section_max<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Maximum-likelihood temperature: coarse scan of the prior range, then
/// golden-section refinement around the best grid point.
///
/// `bath` supplies the coupling and frequency; its temperature is ignored.
pub fn mle_estimate(
    record: &TrajectoryRecord,
    spec: &ProtocolSpec,
    bath: &BathParams,
    prior: &PriorRange,
) -> Result<MleEstimate> {
    let spec = spec.with_scheme(record.scheme);
    let ll = |t: f64| -> f64 {
        bath.at_temperature(t)
            .and_then(|b| log_likelihood(&spec, &b, &record.outcomes))
            .map(|v| if v.is_nan() { f64::NEG_INFINITY } else { v })
            .unwrap_or(f64::NEG_INFINITY)
    };
    // surface length errors before scanning
    log_likelihood(&spec, bath, &record.outcomes)?;

    let grid = linspace(prior.lo, prior.hi, COARSE_POINTS);
    let values: Vec<f64> = grid.iter().map(|&t| ll(t)).collect();
    let (mut best, mut worst) = (0, 0);
    for (k, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = k;
        }
        if v < values[worst] {
            worst = k;
        }
    }
    let top = values[best];
    if !top.is_finite() || top - values[worst] <= 1e-12 * top.abs().max(1.0) {
        return Err(ThermoError::FlatLikelihood);
    }

    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(COARSE_POINTS - 1)];
    let (refined, value) = golden_section_max(ll, lo, hi, MLE_TOLERANCE);
    let (temperature, log_likelihood) = if value >= top {
        (refined, value)
    } else {
        (grid[best], top)
    };
    let boundary_hit = temperature - prior.lo <= 2.0 * MLE_TOLERANCE
        || prior.hi - temperature <= 2.0 * MLE_TOLERANCE;
    Ok(MleEstimate {
        temperature,
        log_likelihood,
        boundary_hit,
    })
}

/// Fisher information at the true temperature, using the Markov-chain recursion
/// for projective SMS beyond the enumeration budget.
pub fn protocol_fisher_information(spec: &ProtocolSpec, bath: &BathParams) -> Result<f64> {
    if spec.scheme == Scheme::Sms && spec.n > MAX_ENUMERATION && spec.family.contrast() == 1.0 {
        return Ok(fi_sms_projective(spec, bath)?.value);
    }
    Ok(fisher_information(spec, bath)?.value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimationReport {
    pub scheme: Scheme,
    pub n: usize,
    pub tau: f64,
    pub phi: f64,
    pub true_temperature: f64,
    pub seed: u64,
    pub trials: usize,
    /// Estimates of the informative trials, in trial order.
    pub estimates: Vec<f64>,
    pub boundary_hits: usize,
    pub flat_trials: usize,
    pub mean: f64,
    pub median: f64,
    pub bias: f64,
    pub rmse: f64,
    pub fisher_information: f64,
    /// `1 / sqrt(F)`.
    pub crb: f64,
    /// `rmse * sqrt(F)`.
    pub ratio: f64,
}

/// Runs `trials` simulate-and-estimate rounds and compares the spread of the
/// estimates with the Cramer-Rao bound.
pub fn crb_report(
    spec: &ProtocolSpec,
    bath: &BathParams,
    trials: usize,
    seed: u64,
    prior: &PriorRange,
) -> Result<EstimationReport> {
    if trials < MIN_TRIALS {
        return Err(ThermoError::TooFewTrials {
            min: MIN_TRIALS,
            got: trials,
        });
    }
    let fisher = protocol_fisher_information(spec, bath)?;
    if fisher.is_nan() || fisher <= 0.0 {
        return Err(ThermoError::ZeroFisherInformation);
    }

    let results: Vec<Option<MleEstimate>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let record = simulate_stream(spec, bath, seed, i)?;
            match mle_estimate(&record, spec, bath, prior) {
                Ok(est) => Ok(Some(est)),
                Err(ThermoError::FlatLikelihood) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let estimates: Vec<f64> = results.iter().flatten().map(|e| e.temperature).collect();
    if estimates.is_empty() {
        return Err(ThermoError::FlatLikelihood);
    }
    let boundary_hits = results.iter().flatten().filter(|e| e.boundary_hit).count();
    let truth = bath.temperature();
    let sq: Vec<f64> = estimates
        .iter()
        .map(|t| (t - truth) * (t - truth))
        .collect();
    let rmse = (pairwise_sum(&sq) / estimates.len() as f64).sqrt();
    let mean_est = mean(&estimates);

    Ok(EstimationReport {
        scheme: spec.scheme,
        n: spec.n,
        tau: spec.tau,
        phi: spec.family.phi(),
        true_temperature: truth,
        seed,
        trials,
        boundary_hits,
        flat_trials: trials - estimates.len(),
        mean: mean_est,
        median: median(&estimates),
        bias: mean_est - truth,
        rmse,
        fisher_information: fisher,
        crb: 1.0 / fisher.sqrt(),
        ratio: rmse * fisher.sqrt(),
        estimates,
    })
}

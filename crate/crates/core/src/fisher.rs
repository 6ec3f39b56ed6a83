//! Exact Fisher information of the measure-and-reprepare (IID) and sequential
//! measurement (SMS) protocols.
//!
//! IID is closed form: `F_IID^(n) = n * F(rho(tau))`. SMS walks the full binary
//! tree of outcome strings, carrying each branch's state, accumulated probability
//! and their temperature derivatives, and sums `(dP/dT)^2 / P` over the leaves.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bloch::{
    evolve_tangent, BathParams, QubitState, StateTangent, ThermalMap, WeightedState,
};
use crate::error::{Result, ThermoError};
use crate::povm::{apply, apply_tangent, outcome_probability, Branch, MeasurementFamily, Outcome};

/// Largest `n` for which SMS strings are enumerated.
pub const MAX_ENUMERATION: usize = 24;

/// Branches lighter than this contribute nothing to the Fisher sum.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// Subtrees at least this deep are split across the thread pool.
const PARALLEL_DEPTH: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Iid,
    Sms,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Iid => "iid",
            Scheme::Sms => "sms",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = ThermoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iid" => Ok(Scheme::Iid),
            "sms" => Ok(Scheme::Sms),
            other => Err(ThermoError::Config(format!(
                "unknown scheme '{other}' (expected iid or sms)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolSpec {
    pub scheme: Scheme,
    pub n: usize,
    pub tau: f64,
    pub rho0: QubitState,
    pub family: MeasurementFamily,
}

impl ProtocolSpec {
    pub fn new(
        scheme: Scheme,
        n: usize,
        tau: f64,
        rho0: QubitState,
        family: MeasurementFamily,
    ) -> Result<Self> {
        if n == 0 {
            return Err(ThermoError::ZeroMeasurements);
        }
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(ThermoError::NegativeDuration(tau));
        }
        Ok(Self {
            scheme,
            n,
            tau,
            rho0,
            family,
        })
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_n(mut self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(ThermoError::ZeroMeasurements);
        }
        self.n = n;
        Ok(self)
    }

    pub fn with_rho0(mut self, rho0: QubitState) -> Self {
        self.rho0 = rho0;
        self
    }

    fn check_budget(&self) -> Result<()> {
        if self.n > MAX_ENUMERATION {
            return Err(ThermoError::EnumerationBudget {
                n: self.n,
                max: MAX_ENUMERATION,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiResult {
    pub value: f64,
    pub scheme: Scheme,
    pub n: usize,
    pub tau: f64,
    pub phi: f64,
    pub temperature: f64,
    pub strings_enumerated: u64,
    /// Set when the readout is certain but the distribution still moves with `T`.
    pub divergent: bool,
}

/// Fisher information of one measurement on `rho(tau)`.
pub fn fi_single(
    rho0: &QubitState,
    bath: &BathParams,
    tau: f64,
    family: &MeasurementFamily,
) -> Result<FiResult> {
    let (evolved, tangent) = evolve_tangent(rho0, &StateTangent::ZERO, bath, tau)?;
    let c = family.contrast();
    let mut divergent = false;
    let value = if c == 0.0 {
        0.0
    } else {
        let zc = evolved.z() * c;
        let denom = (1.0 - zc) * (1.0 + zc);
        let num = c * c * tangent.dz * tangent.dz;
        if denom > 0.0 {
            num / denom
        } else if num == 0.0 {
            0.0
        } else {
            divergent = true;
            f64::INFINITY
        }
    };
    Ok(FiResult {
        value,
        scheme: Scheme::Iid,
        n: 1,
        tau,
        phi: family.phi(),
        temperature: bath.temperature(),
        strings_enumerated: 0,
        divergent,
    })
}

pub fn fi_iid(spec: &ProtocolSpec, bath: &BathParams) -> Result<FiResult> {
    expect_scheme(spec, Scheme::Iid)?;
    let single = fi_single(&spec.rho0, bath, spec.tau, &spec.family)?;
    Ok(FiResult {
        value: spec.n as f64 * single.value,
        n: spec.n,
        ..single
    })
}

pub fn fi_sms(spec: &ProtocolSpec, bath: &BathParams) -> Result<FiResult> {
    expect_scheme(spec, Scheme::Sms)?;
    spec.check_budget()?;
    let walker = SmsWalker {
        spec,
        map: ThermalMap::new(bath, spec.tau)?,
    };
    let (value, leaves) = walker.subtree(&spec.rho0.into(), &StateTangent::ZERO, spec.n);
    Ok(FiResult {
        value,
        scheme: Scheme::Sms,
        n: spec.n,
        tau: spec.tau,
        phi: spec.family.phi(),
        temperature: bath.temperature(),
        strings_enumerated: leaves,
        divergent: !value.is_finite(),
    })
}

/// SMS Fisher information for projective readout, for any `n`.
///
/// After each projective outcome the probe sits in an energy eigenstate with no
/// temperature dependence, so outcome strings form a two-state Markov chain. The
/// first two moments of the score per chain state then obey an `O(n)` recursion.
pub fn fi_sms_projective(spec: &ProtocolSpec, bath: &BathParams) -> Result<FiResult> {
    expect_scheme(spec, Scheme::Sms)?;
    if spec.family.contrast() != 1.0 {
        return Err(ThermoError::NotProjective(spec.family.phi()));
    }
    let map = ThermalMap::new(bath, spec.tau)?;
    // (q, dq/dT) of landing in [excited, ground] from `state`
    let steps = |state: &QubitState| -> [(f64, f64); 2] {
        let (ev, tan) = map.apply_tangent(state, &StateTangent::ZERO);
        [
            (0.5 * (1.0 + ev.z()), 0.5 * tan.dz),
            (0.5 * (1.0 - ev.z()), -0.5 * tan.dz),
        ]
    };
    let poles = [steps(&QubitState::excited()), steps(&QubitState::ground())];

    // per chain state: [sum P, sum P * score, sum P * score^2]
    let mut moments = [[0.0f64; 3]; 2];
    for (to, &(q, dq)) in steps(&spec.rho0).iter().enumerate() {
        if q > 0.0 {
            let u = dq / q;
            moments[to] = [q, q * u, q * u * u];
        }
    }
    for _ in 1..spec.n {
        let mut next = [[0.0f64; 3]; 2];
        for (from, row) in poles.iter().enumerate() {
            let [a, b, c] = moments[from];
            for (to, &(q, dq)) in row.iter().enumerate() {
                if q > 0.0 {
                    let u = dq / q;
                    next[to][0] += q * a;
                    next[to][1] += q * (b + u * a);
                    next[to][2] += q * (c + 2.0 * u * b + u * u * a);
                }
            }
        }
        moments = next;
    }
    Ok(FiResult {
        value: moments[0][2] + moments[1][2],
        scheme: Scheme::Sms,
        n: spec.n,
        tau: spec.tau,
        phi: 0.0,
        temperature: bath.temperature(),
        strings_enumerated: 0,
        divergent: false,
    })
}

/// Dispatches on `spec.scheme`.
pub fn fisher_information(spec: &ProtocolSpec, bath: &BathParams) -> Result<FiResult> {
    match spec.scheme {
        Scheme::Iid => fi_iid(spec, bath),
        Scheme::Sms => fi_sms(spec, bath),
    }
}

fn expect_scheme(spec: &ProtocolSpec, expected: Scheme) -> Result<()> {
    if spec.scheme != expected {
        return Err(ThermoError::SchemeMismatch {
            expected: expected.as_str(),
            got: spec.scheme.as_str(),
        });
    }
    Ok(())
}

struct SmsWalker<'a> {
    spec: &'a ProtocolSpec,
    map: ThermalMap,
}

impl SmsWalker<'_> {
    /// Fisher contribution and leaf count of all strings below `node`.
    /// The sum is always `plus + minus`, so the result does not depend on scheduling.
    fn subtree(
        &self,
        node: &WeightedState,
        tangent: &StateTangent,
        remaining: usize,
    ) -> (f64, u64) {
        if remaining == 0 {
            if node.weight > WEIGHT_FLOOR {
                return (tangent.dweight * tangent.dweight / node.weight, 1);
            }
            return (0.0, 0);
        }
        let (state, tan) = self.map.apply_tangent(&node.state, tangent);
        let evolved = WeightedState {
            state,
            weight: node.weight,
        };
        let child = |s: Outcome| -> (f64, u64) {
            match apply_tangent(&self.spec.family, &evolved, &tan, s) {
                (Branch::Possible(next), next_tan) if next.weight > WEIGHT_FLOOR => {
                    self.subtree(&next, &next_tan, remaining - 1)
                }
                _ => (0.0, 0),
            }
        };
        let (plus, minus) = if remaining >= PARALLEL_DEPTH {
            rayon::join(|| child(Outcome::Plus), || child(Outcome::Minus))
        } else {
            (child(Outcome::Plus), child(Outcome::Minus))
        };
        (plus.0 + minus.0, plus.1 + minus.1)
    }
}

fn check_length(spec: &ProtocolSpec, outcomes: &[Outcome]) -> Result<()> {
    if outcomes.len() != spec.n {
        return Err(ThermoError::OutcomeLengthMismatch {
            expected: spec.n,
            got: outcomes.len(),
        });
    }
    Ok(())
}

/// Probability of an SMS outcome string as the product of the sequential
/// normalization factors.
pub fn sms_string_probability(
    spec: &ProtocolSpec,
    bath: &BathParams,
    outcomes: &[Outcome],
) -> Result<f64> {
    check_length(spec, outcomes)?;
    let map = ThermalMap::new(bath, spec.tau)?;
    let mut state = spec.rho0;
    let mut prob = 1.0;
    for &s in outcomes {
        let evolved = map.apply(&state);
        match apply(&spec.family, &evolved, s) {
            Branch::Possible(w) => {
                prob *= w.weight;
                state = w.state;
            }
            Branch::Impossible => return Ok(0.0),
        }
    }
    Ok(prob)
}

pub fn iid_string_probability(
    spec: &ProtocolSpec,
    bath: &BathParams,
    outcomes: &[Outcome],
) -> Result<f64> {
    check_length(spec, outcomes)?;
    let evolved = ThermalMap::new(bath, spec.tau)?.apply(&spec.rho0);
    Ok(outcomes
        .iter()
        .map(|&s| outcome_probability(&spec.family, &evolved, s))
        .product())
}

/// Dispatches on `spec.scheme`.
pub fn string_probability(
    spec: &ProtocolSpec,
    bath: &BathParams,
    outcomes: &[Outcome],
) -> Result<f64> {
    match spec.scheme {
        Scheme::Iid => iid_string_probability(spec, bath, outcomes),
        Scheme::Sms => sms_string_probability(spec, bath, outcomes),
    }
}

/// `(P, dP/dT)` for one outcome string of either scheme.
pub fn string_probability_tangent(
    spec: &ProtocolSpec,
    bath: &BathParams,
    outcomes: &[Outcome],
) -> Result<(f64, f64)> {
    check_length(spec, outcomes)?;
    let map = ThermalMap::new(bath, spec.tau)?;
    let mut node = WeightedState::from(spec.rho0);
    let mut tangent = StateTangent::ZERO;
    let (start, start_tan) = map.apply_tangent(&spec.rho0, &StateTangent::ZERO);
    for &s in outcomes {
        let (state, tan) = match spec.scheme {
            Scheme::Sms => map.apply_tangent(&node.state, &tangent),
            Scheme::Iid => (
                start,
                StateTangent {
                    dweight: tangent.dweight,
                    ..start_tan
                },
            ),
        };
        let evolved = WeightedState {
            state,
            weight: node.weight,
        };
        match apply_tangent(&spec.family, &evolved, &tan, s) {
            (Branch::Possible(next), next_tan) => {
                node = next;
                tangent = next_tan;
            }
            (Branch::Impossible, _) => return Ok((0.0, 0.0)),
        }
    }
    Ok((node.weight, tangent.dweight))
}

/// Outcome string with index `k` in lexicographic order, `+` before `-`.
pub fn outcomes_from_index(k: u64, n: usize) -> Vec<Outcome> {
    (0..n)
        .map(|j| {
            if (k >> (n - 1 - j)) & 1 == 1 {
                Outcome::Minus
            } else {
                Outcome::Plus
            }
        })
        .collect()
}

/// Inverse of [`outcomes_from_index`].
pub fn string_index(outcomes: &[Outcome]) -> u64 {
    outcomes
        .iter()
        .fold(0, |acc, &s| (acc << 1) | u64::from(s == Outcome::Minus))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StringProbability {
    pub index: u64,
    pub probability: f64,
    pub derivative: f64,
}

/// Full outcome distribution and its `T`-derivative, indexed as in [`outcomes_from_index`].
pub fn outcome_distribution(
    spec: &ProtocolSpec,
    bath: &BathParams,
) -> Result<Vec<StringProbability>> {
    spec.check_budget()?;
    (0..1u64 << spec.n)
        .map(|index| {
            let (probability, derivative) =
                string_probability_tangent(spec, bath, &outcomes_from_index(index, spec.n))?;
            Ok(StringProbability {
                index,
                probability,
                derivative,
            })
        })
        .collect()
}

/// Quantum Fisher information of `rho(tau)` when it is diagonal in the energy basis.
pub fn qfi_diagonal(rho0: &QubitState, bath: &BathParams, tau: f64) -> Result<FiResult> {
    const COHERENCE_TOL: f64 = 1e-12;
    let (evolved, tangent) = evolve_tangent(rho0, &StateTangent::ZERO, bath, tau)?;
    if evolved.x().abs() > COHERENCE_TOL || evolved.y().abs() > COHERENCE_TOL {
        return Err(ThermoError::CoherentState {
            rx: evolved.x().abs(),
            ry: evolved.y().abs(),
        });
    }
    let (p_exc, p_gnd) = evolved.populations();
    let dp = 0.5 * tangent.dz;
    let mut value = 0.0;
    let mut divergent = false;
    for p in [p_exc, p_gnd] {
        if p > 0.0 {
            value += dp * dp / p;
        } else if dp != 0.0 {
            divergent = true;
            value = f64::INFINITY;
        }
    }
    Ok(FiResult {
        value,
        scheme: Scheme::Iid,
        n: 1,
        tau,
        phi: 0.0,
        temperature: bath.temperature(),
        strings_enumerated: 0,
        divergent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::thermal_state;
    use std::f64::consts::FRAC_PI_4;

    fn bath(t: f64) -> BathParams {
        BathParams::new(t, 1.0).unwrap()
    }

    fn spec(scheme: Scheme, n: usize, tau: f64, rho0: QubitState, phi: f64) -> ProtocolSpec {
        ProtocolSpec::new(scheme, n, tau, rho0, MeasurementFamily::new(phi).unwrap()).unwrap()
    }

    #[test]
    fn single_shot_reference_value() {
        let fi = fi_single(
            &QubitState::ground(),
            &bath(1.0),
            1.0,
            &MeasurementFamily::projective(),
        )
        .unwrap();
        assert!((fi.value - 0.29389).abs() < 1e-3);
        assert!((fi.value - 0.293_969_6).abs() < 1e-6);
        assert!(!fi.divergent);
    }

    #[test]
    fn uninformative_measurement_gives_zero() {
        let f = MeasurementFamily::uninformative();
        for &t in &[0.1, 1.0, 3.0] {
            assert_eq!(
                fi_single(&QubitState::ground(), &bath(t), 2.0, &f)
                    .unwrap()
                    .value,
                0.0
            );
            let s = spec(Scheme::Sms, 5, 2.0, QubitState::ground(), FRAC_PI_4);
            assert!(fi_sms(&s, &bath(t)).unwrap().value <= 1e-12);
        }
    }

    #[test]
    fn iid_scales_linearly() {
        let s1 = spec(
            Scheme::Iid,
            1,
            1.3,
            QubitState::new(0.2, 0.0, 0.4).unwrap(),
            0.2,
        );
        let one = fi_iid(&s1, &bath(0.7)).unwrap();
        let single = fi_single(&s1.rho0, &bath(0.7), 1.3, &s1.family).unwrap();
        assert_eq!(one.value, single.value);
        let seven = fi_iid(&s1.with_n(7).unwrap(), &bath(0.7)).unwrap();
        assert!((seven.value - 7.0 * one.value).abs() <= 1e-15 * seven.value);
    }

    #[test]
    fn schemes_agree_for_one_measurement() {
        let s = spec(
            Scheme::Sms,
            1,
            0.8,
            QubitState::new(0.1, 0.3, -0.2).unwrap(),
            0.3,
        );
        let sms = fi_sms(&s, &bath(0.6)).unwrap();
        let iid = fi_iid(&s.with_scheme(Scheme::Iid), &bath(0.6)).unwrap();
        assert!((sms.value - iid.value).abs() <= 1e-12 * iid.value.max(1.0));
        assert_eq!(sms.strings_enumerated, 2);
    }

    #[test]
    fn sms_budget_enforced() {
        let s = spec(Scheme::Sms, 25, 1.0, QubitState::ground(), 0.0);
        assert!(matches!(
            fi_sms(&s, &bath(1.0)),
            Err(ThermoError::EnumerationBudget { n: 25, .. })
        ));
    }

    #[test]
    fn projective_recursion_matches_enumeration() {
        for (n, tau, t, z) in [
            (1, 1.0, 1.0, -1.0),
            (4, 0.5, 0.3, 0.2),
            (9, 2.0, 0.8, 0.9),
            (12, 4.0, 0.25, -0.6),
        ] {
            let s = spec(
                Scheme::Sms,
                n,
                tau,
                QubitState::new(0.1, 0.0, z * 0.99).unwrap(),
                0.0,
            );
            let exact = fi_sms(&s, &bath(t)).unwrap().value;
            let fast = fi_sms_projective(&s, &bath(t)).unwrap().value;
            assert!(
                (exact - fast).abs() <= 1e-12 * exact,
                "n={n}: {exact} vs {fast}"
            );
        }
        let weak = spec(Scheme::Sms, 3, 1.0, QubitState::ground(), 0.1);
        assert!(matches!(
            fi_sms_projective(&weak, &bath(1.0)),
            Err(ThermoError::NotProjective(_))
        ));
    }

    #[test]
    fn scheme_mismatch_is_an_error() {
        let s = spec(Scheme::Sms, 2, 1.0, QubitState::ground(), 0.0);
        assert!(fi_iid(&s, &bath(1.0)).is_err());
        assert!(fi_sms(&s.with_scheme(Scheme::Iid), &bath(1.0)).is_err());
    }

    #[test]
    fn string_length_is_checked() {
        let s = spec(Scheme::Sms, 3, 1.0, QubitState::ground(), 0.0);
        assert!(matches!(
            sms_string_probability(&s, &bath(1.0), &[Outcome::Plus]),
            Err(ThermoError::OutcomeLengthMismatch {
                expected: 3,
                got: 1
            })
        ));
    }

    #[test]
    fn uninformative_strings_are_uniform() {
        let s = spec(
            Scheme::Sms,
            6,
            1.0,
            QubitState::new(0.3, 0.1, 0.5).unwrap(),
            FRAC_PI_4,
        );
        for k in 0..64 {
            let p = sms_string_probability(&s, &bath(0.4), &outcomes_from_index(k, 6)).unwrap();
            assert_eq!(p, 1.0 / 64.0);
        }
    }

    #[test]
    fn index_round_trip() {
        for k in 0..32 {
            assert_eq!(string_index(&outcomes_from_index(k, 5)), k);
        }
        assert_eq!(
            outcomes_from_index(0b01, 2),
            vec![Outcome::Plus, Outcome::Minus]
        );
    }

    #[test]
    fn long_tau_forgets_input_state() {
        let f = MeasurementFamily::new(0.1).unwrap();
        let reference = fi_single(&QubitState::ground(), &bath(0.8), 50.0, &f)
            .unwrap()
            .value;
        for z in [-0.9, -0.3, 0.0, 0.4, 1.0] {
            let rho = QubitState::new(0.0, 0.1, z * 0.99).unwrap();
            let v = fi_single(&rho, &bath(0.8), 50.0, &f).unwrap().value;
            assert!((v - reference).abs() < 1e-10);
        }
    }

    #[test]
    fn qfi_rejects_coherent_states() {
        let rho = QubitState::new(0.5, 0.0, 0.0).unwrap();
        assert!(matches!(
            qfi_diagonal(&rho, &bath(1.0), 0.0),
            Err(ThermoError::CoherentState { .. })
        ));
    }

    #[test]
    fn qfi_of_long_time_state_matches_thermal_populations() {
        for &t in &[0.2, 0.5, 1.0, 2.5] {
            let q = qfi_diagonal(&QubitState::ground(), &bath(t), 50.0).unwrap();
            let pops = |tt: f64| thermal_state(&bath(tt)).populations();
            let h = 1e-4 * t;
            let (p1, m1) = (pops(t + h), pops(t - h));
            let (p2, m2) = (pops(t + h / 2.0), pops(t - h / 2.0));
            let (pe, pg) = pops(t);
            let rich =
                |a: f64, b: f64, c: f64, d: f64| (4.0 * (c - d) / h - (a - b) / (2.0 * h)) / 3.0;
            let de = rich(p1.0, m1.0, p2.0, m2.0);
            let dg = rich(p1.1, m1.1, p2.1, m2.1);
            let fd = de * de / pe + dg * dg / pg;
            assert!(
                (q.value - fd).abs() <= 1e-8 * fd.max(1.0),
                "{} vs {}",
                q.value,
                fd
            );
        }
    }

    #[test]
    fn divergent_projective_edge() {
        // excited state, tau = 0: readout certain and insensitive to T
        let fi = fi_single(
            &QubitState::excited(),
            &bath(1.0),
            0.0,
            &MeasurementFamily::projective(),
        )
        .unwrap();
        assert_eq!(fi.value, 0.0);
        assert!(!fi.divergent);
    }
}

#![allow(dead_code)]

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thermo_core::fisher::outcomes_from_index;
use thermo_core::{BathParams, MeasurementFamily, Outcome, ProtocolSpec, QubitState, Scheme};

pub type C = Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_state<R: Rng>(rng: &mut R) -> QubitState {
    loop {
        let v: [f64; 3] = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        if let Ok(s) = QubitState::new(v[0], v[1], v[2]) {
            return s;
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Case {
    pub temperature: f64,
    pub gamma: f64,
    pub omega_ratio: f64,
    pub tau: f64,
    pub phi: f64,
    pub rho0: QubitState,
}

impl Case {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        Case {
            temperature: rng.random_range(0.2..3.0),
            gamma: rng.random_range(0.2..2.0),
            omega_ratio: rng.random_range(0.0..3.0),
            tau: rng.random_range(0.1..5.0),
            phi: rng.random_range(0.0..std::f64::consts::FRAC_PI_4),
            rho0: random_state(rng),
        }
    }

    pub fn bath(&self) -> BathParams {
        BathParams::new(self.temperature, self.gamma)
            .unwrap()
            .with_omega_ratio(self.omega_ratio)
    }

    pub fn family(&self) -> MeasurementFamily {
        MeasurementFamily::new(self.phi).unwrap()
    }

    pub fn spec(&self, scheme: Scheme, n: usize) -> ProtocolSpec {
        ProtocolSpec::new(scheme, n, self.tau, self.rho0, self.family()).unwrap()
    }
}

// Density-matrix oracle. Basis order is (excited, ground); vec() stacks columns.

pub fn density(s: &QubitState) -> Matrix2<C> {
    let [x, y, z] = s.bloch();
    Matrix2::new(
        C::new((1.0 + z) / 2.0, 0.0),
        C::new(x / 2.0, -y / 2.0),
        C::new(x / 2.0, y / 2.0),
        C::new((1.0 - z) / 2.0, 0.0),
    )
}

pub fn bloch_of(rho: &Matrix2<C>) -> [f64; 3] {
    let tr = (rho[(0, 0)] + rho[(1, 1)]).re;
    [
        2.0 * rho[(0, 1)].re / tr,
        -2.0 * rho[(0, 1)].im / tr,
        (rho[(0, 0)] - rho[(1, 1)]).re / tr,
    ]
}

fn vec(rho: &Matrix2<C>) -> Vector4<C> {
    Vector4::new(rho[(0, 0)], rho[(1, 0)], rho[(0, 1)], rho[(1, 1)])
}

fn unvec(v: &Vector4<C>) -> Matrix2<C> {
    Matrix2::new(v[0], v[2], v[1], v[3])
}

fn kron(a: &Matrix2<C>, b: &Matrix2<C>) -> Matrix4<C> {
    Matrix4::from_fn(|i, j| a[(i / 2, j / 2)] * b[(i % 2, j % 2)])
}

/// `exp(L t)` for the thermal Lindbladian with `H = Omega sigma_z / 2`.
pub fn channel(bath: &BathParams, t: f64) -> Matrix4<C> {
    let one = Matrix2::<C>::identity();
    let beta = 1.0 / bath.temperature();
    let n_th = 1.0 / (beta.exp() - 1.0);
    let h = Matrix2::new(
        C::new(bath.omega() / 2.0, 0.0),
        C::new(0.0, 0.0),
        C::new(0.0, 0.0),
        C::new(-bath.omega() / 2.0, 0.0),
    );
    let lower = Matrix2::new(
        C::new(0.0, 0.0),
        C::new(0.0, 0.0),
        C::new(1.0, 0.0),
        C::new(0.0, 0.0),
    );
    let raise = lower.adjoint();
    let i = C::new(0.0, 1.0);
    let mut gen = (kron(&one, &h) - kron(&h.transpose(), &one)) * (-i);
    for (op, rate) in [
        (lower, bath.gamma() * (n_th + 1.0)),
        (raise, bath.gamma() * n_th),
    ] {
        let ldl = op.adjoint() * op;
        let d = kron(&op.conjugate(), &op)
            - kron(&one, &ldl) * C::new(0.5, 0.0)
            - kron(&ldl.transpose(), &one) * C::new(0.5, 0.0);
        gen += d * C::new(rate, 0.0);
    }
    (gen * C::new(t, 0.0)).exp()
}

pub fn kraus(phi: f64, s: Outcome) -> Matrix2<C> {
    let (big, small) = (phi.cos(), phi.sin());
    let (e, g) = match s {
        Outcome::Plus => (big, small),
        Outcome::Minus => (small, big),
    };
    Matrix2::new(
        C::new(e, 0.0),
        C::new(0.0, 0.0),
        C::new(0.0, 0.0),
        C::new(g, 0.0),
    )
}

fn measurement(phi: f64, s: Outcome) -> Matrix4<C> {
    let k = kraus(phi, s);
    kron(&k.conjugate(), &k)
}

fn trace(v: &Vector4<C>) -> f64 {
    (v[0] + v[3]).re
}

/// Unnormalized state after the composed map `K_sn E ... K_s1 E rho0`.
pub fn composed_sms(case: &Case, outcomes: &[Outcome]) -> Matrix2<C> {
    let e = channel(&case.bath(), case.tau);
    let mut v = vec(&density(&case.rho0));
    for &s in outcomes {
        v = measurement(case.phi, s) * (e * v);
    }
    unvec(&v)
}

pub fn composed_sms_probability(case: &Case, outcomes: &[Outcome]) -> f64 {
    let rho = composed_sms(case, outcomes);
    (rho[(0, 0)] + rho[(1, 1)]).re
}

pub fn composed_iid_probability(case: &Case, outcomes: &[Outcome]) -> f64 {
    let evolved = channel(&case.bath(), case.tau) * vec(&density(&case.rho0));
    outcomes
        .iter()
        .map(|&s| trace(&(measurement(case.phi, s) * evolved)))
        .product()
}

// Complex-step oracle: every quantity is a holomorphic function of T, so
// Im f(T + i h) / h is the derivative to machine precision.

pub const COMPLEX_STEP: f64 = 1e-20;

fn relaxed_z(z0: C, temperature: C, gamma: f64, t: f64) -> C {
    let half_beta = temperature.inv() * 0.5;
    let th = half_beta.tanh();
    let rate = th.inv() * gamma;
    let pop = (-rate * t).exp();
    pop * z0 - (C::new(1.0, 0.0) - pop) * th
}

fn string_probability_c(
    scheme: Scheme,
    z0: f64,
    temperature: C,
    gamma: f64,
    tau: f64,
    phi: f64,
    outcomes: &[Outcome],
) -> C {
    let c = (2.0 * phi).cos();
    let p = |z: C, s: Outcome| (C::new(1.0, 0.0) + z * (s.sign() * c)) * 0.5;
    match scheme {
        Scheme::Iid => {
            let z = relaxed_z(C::new(z0, 0.0), temperature, gamma, tau);
            outcomes.iter().map(|&s| p(z, s)).product()
        }
        Scheme::Sms => {
            let mut z = C::new(z0, 0.0);
            let mut total = C::new(1.0, 0.0);
            for &s in outcomes {
                let evolved = relaxed_z(z, temperature, gamma, tau);
                let step = p(evolved, s);
                total *= step;
                z = (evolved + s.sign() * c) / (C::new(1.0, 0.0) + evolved * (s.sign() * c));
            }
            total
        }
    }
}

/// `(P, dP/dT)` from the population recursion, evaluated by complex step.
pub fn oracle_probability(scheme: Scheme, case: &Case, outcomes: &[Outcome]) -> (f64, f64) {
    let v = string_probability_c(
        scheme,
        case.rho0.z(),
        C::new(case.temperature, COMPLEX_STEP),
        case.gamma,
        case.tau,
        case.phi,
        outcomes,
    );
    (v.re, v.im / COMPLEX_STEP)
}

/// Two-state chain for projective readout: after each click the probe sits at a pole.
pub fn markov_chain_probability(case: &Case, outcomes: &[Outcome]) -> (f64, f64) {
    let t = C::new(case.temperature, COMPLEX_STEP);
    let up =
        |z0: f64| (C::new(1.0, 0.0) + relaxed_z(C::new(z0, 0.0), t, case.gamma, case.tau)) * 0.5;
    let mut z0 = case.rho0.z();
    let mut total = C::new(1.0, 0.0);
    for &s in outcomes {
        let p_plus = up(z0);
        total *= match s {
            Outcome::Plus => p_plus,
            Outcome::Minus => C::new(1.0, 0.0) - p_plus,
        };
        z0 = s.sign();
    }
    (total.re, total.im / COMPLEX_STEP)
}

/// Fisher information by enumerating every string against an oracle for `(P, dP/dT)`.
pub fn brute_force_fi<F>(n: usize, oracle: F) -> f64
where
    F: Fn(&[Outcome]) -> (f64, f64),
{
    (0..1u64 << n)
        .map(|k| {
            let (p, dp) = oracle(&outcomes_from_index(k, n));
            if p > 0.0 {
                dp * dp / p
            } else {
                0.0
            }
        })
        .sum()
}

/// Richardson-extrapolated central difference with base step `h`.
pub fn richardson<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

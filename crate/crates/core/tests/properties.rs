use std::f64::consts::FRAC_PI_4;

use proptest::prelude::*;

use thermo_core::ensemble::{ensemble_fi_for_states, sample_states, EnsembleSpec};
use thermo_core::fisher::outcome_distribution;
use thermo_core::{
    fi_iid, fi_sms, fisher_information, BathParams, MeasurementFamily, ProtocolSpec, QubitState,
    Scheme,
};

fn arb_state() -> impl Strategy<Value = QubitState> {
    (
        0.0..=1.0f64,
        0.0..std::f64::consts::PI,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(r, theta, phi)| {
            let r = r.cbrt();
            QubitState::new(
                r * theta.sin() * phi.cos(),
                r * theta.sin() * phi.sin(),
                r * theta.cos(),
            )
            .unwrap_or(QubitState::maximally_mixed())
        })
}

fn arb_scheme() -> impl Strategy<Value = Scheme> {
    prop_oneof![Just(Scheme::Iid), Just(Scheme::Sms)]
}

prop_compose! {
    fn arb_setup()(
        rho0 in arb_state(),
        temp in 0.05..5.0f64,
        gamma in 0.1..3.0f64,
        tau in 0.0..12.0f64,
        phi in 0.0..=FRAC_PI_4,
        omega in 0.0..4.0f64,
    ) -> (QubitState, BathParams, f64, MeasurementFamily) {
        (
            rho0,
            BathParams::new(temp, gamma).unwrap().with_omega_ratio(omega),
            tau,
            MeasurementFamily::new(phi).unwrap(),
        )
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fisher_information_is_nonnegative(
        (rho0, bath, tau, fam) in arb_setup(),
        scheme in arb_scheme(),
        n in 1usize..=10,
    ) {
        let spec = ProtocolSpec::new(scheme, n, tau, rho0, fam).unwrap();
        let fi = fisher_information(&spec, &bath).unwrap();
        prop_assert!(fi.value >= 0.0);
        prop_assert!(fi.value.is_finite() || fi.divergent);
    }

    #[test]
    fn outcome_law_is_normalized(
        (rho0, bath, tau, fam) in arb_setup(),
        scheme in arb_scheme(),
        n in 1usize..=9,
    ) {
        let spec = ProtocolSpec::new(scheme, n, tau, rho0, fam).unwrap();
        let dist = outcome_distribution(&spec, &bath).unwrap();
        let total: f64 = dist.iter().map(|d| d.probability).sum();
        let slope: f64 = dist.iter().map(|d| d.derivative).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        prop_assert!(slope.abs() <= 1e-10 * (1.0 + dist.iter().map(|d| d.derivative.abs()).sum::<f64>()));
    }

    #[test]
    fn iid_is_additive((rho0, bath, tau, fam) in arb_setup(), n in 1usize..=40) {
        let one = fi_iid(&ProtocolSpec::new(Scheme::Iid, 1, tau, rho0, fam).unwrap(), &bath).unwrap().value;
        let many = fi_iid(&ProtocolSpec::new(Scheme::Iid, n, tau, rho0, fam).unwrap(), &bath).unwrap().value;
        prop_assert!((many - n as f64 * one).abs() <= 1e-12 * many.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn schemes_agree_on_one_shot((rho0, bath, tau, fam) in arb_setup()) {
        let spec = ProtocolSpec::new(Scheme::Sms, 1, tau, rho0, fam).unwrap();
        let sms = fi_sms(&spec, &bath).unwrap().value;
        let iid = fi_iid(&spec.with_scheme(Scheme::Iid), &bath).unwrap().value;
        prop_assert!((sms - iid).abs() <= 1e-12 * iid.max(1e-300));
    }

    #[test]
    fn uninformative_readout_carries_nothing(
        (rho0, bath, tau, _fam) in arb_setup(),
        scheme in arb_scheme(),
        n in 1usize..=8,
    ) {
        let spec = ProtocolSpec::new(scheme, n, tau, rho0, MeasurementFamily::uninformative()).unwrap();
        prop_assert!(fisher_information(&spec, &bath).unwrap().value <= 1e-12);
    }

    #[test]
    fn iid_fi_does_not_increase_with_phi(
        (rho0, bath, tau, _fam) in arb_setup(),
        a in 0.0..=FRAC_PI_4,
        b in 0.0..=FRAC_PI_4,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let fi = |phi: f64| {
            let spec = ProtocolSpec::new(Scheme::Iid, 1, tau, rho0, MeasurementFamily::new(phi).unwrap()).unwrap();
            fi_iid(&spec, &bath).unwrap().value
        };
        prop_assert!(fi(lo) >= fi(hi) * (1.0 - 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn band_brackets_its_mean(
        seed in any::<u64>(),
        samples in 1usize..40,
        scheme in arb_scheme(),
        tau in 0.0..6.0f64,
        phi in 0.0..=FRAC_PI_4,
    ) {
        let states = sample_states(&EnsembleSpec { samples, seed, include_poles: seed % 2 == 0 });
        let spec = ProtocolSpec::new(scheme, 3, tau, QubitState::ground(), MeasurementFamily::new(phi).unwrap()).unwrap();
        let temps = [0.1, 0.4, 1.3];
        let fi = ensemble_fi_for_states(&spec, &BathParams::new(1.0, 1.0).unwrap(), &temps, &states).unwrap();
        let band = fi.band();
        for t in 0..temps.len() {
            prop_assert!(band.fi_min[t] <= band.fi_mean[t] && band.fi_mean[t] <= band.fi_max[t]);
            prop_assert!(fi.values[t].iter().all(|&v| v >= band.fi_min[t] && v <= band.fi_max[t]));
        }
        let again = ensemble_fi_for_states(&spec, &BathParams::new(1.0, 1.0).unwrap(), &temps, &states).unwrap();
        prop_assert_eq!(fi, again);
    }
}

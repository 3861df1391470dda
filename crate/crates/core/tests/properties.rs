//! Invariants of the protocol, dephasing and leviton layers.

use eteleport::leviton::{
    bloch_from_tables, closed_form_correlators, fidelity_curve, thermal_factors, zero_t_correlators, Detector,
    LevitonParams,
};
use eteleport::protocol::{outcome_table, tomography_bloch, TeleportParams, TomographySetting};
use eteleport::saw::{
    average_fidelity, dephased_state_analytic, dephased_state_montecarlo, jozsa_fidelity, state_fidelity,
    DephasingParams,
};
use eteleport::Execution;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = TeleportParams> {
    (0.0f64..=1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, phi)| TeleportParams::new(r, phi).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn outcome_probabilities_are_a_distribution(p in params()) {
        let table = outcome_table(&p).unwrap();
        prop_assert!(table.iter().all(|(_, q)| *q >= -1e-15));
        prop_assert!((table.iter().map(|(_, q)| q).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dephasing_keeps_populations(p in params(), s2 in 0.0f64..20.0) {
        let q = dephased_state_analytic(&p, s2).unwrap();
        prop_assert!((q.rho[0][0].re - p.reflection()).abs() < 1e-15);
        prop_assert!((q.rho[1][1].re - p.transmission()).abs() < 1e-15);
        prop_assert!(q.min_eigenvalue() >= -1e-12);
    }

    #[test]
    fn per_state_fidelity_two_ways(p in params(), s2 in 0.0f64..10.0) {
        let direct = state_fidelity(&p, s2);
        let via_bloch = jozsa_fidelity(&p.input_bloch(), &dephased_state_analytic(&p, s2).unwrap().bloch()).unwrap();
        prop_assert!((direct - via_bloch).abs() < 1e-12);
    }

    #[test]
    fn average_fidelity_decreases(a in 0.0f64..50.0, b in 0.0f64..50.0) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (fl, fh) = (average_fidelity(lo).unwrap(), average_fidelity(hi).unwrap());
        prop_assert!(fl > fh);
        prop_assert!(fh >= 2.0 / 3.0 && fl <= 1.0);
    }

    #[test]
    fn jozsa_is_a_fidelity(x in prop::array::uniform3(-0.57f64..0.57), y in prop::array::uniform3(-0.57f64..0.57)) {
        let r = eteleport::protocol::BlochVector::new(x[0], x[1], x[2]);
        let s = eteleport::protocol::BlochVector::new(y[0], y[1], y[2]);
        let f = jozsa_fidelity(&r, &s).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - jozsa_fidelity(&s, &r).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn correlators_match_closed_forms(p in params()) {
        let mut tables = Vec::new();
        for s in TomographySetting::ALL {
            let t = zero_t_correlators(&p, s).unwrap();
            prop_assert!(t.max_deviation_from(&closed_form_correlators(&p, s)).unwrap() < 1e-10);
            let charge: f64 = Detector::ALL.iter().map(|d| t.get(&[*d]).unwrap()).sum();
            prop_assert!((charge - 3.0).abs() < 1e-12);
            tables.push(t);
        }
        let tables: [_; 3] = tables.try_into().unwrap();
        let from_correlators = bloch_from_tables(&tables).unwrap();
        prop_assert!(from_correlators.max_abs_diff(&tomography_bloch(&p).unwrap()) < 1e-10);
    }

    #[test]
    fn thermal_ratio_is_monotone(gamma in 0.01f64..0.3, t1 in 0.0f64..5.0, t2 in 0.0f64..5.0) {
        let (lo, hi) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        let a = thermal_factors(&LevitonParams::new(gamma, lo).unwrap()).unwrap();
        let b = thermal_factors(&LevitonParams::new(gamma, hi).unwrap()).unwrap();
        prop_assert!(b.q <= a.q + 1e-12);
        for t in [a, b] {
            prop_assert!(t.f > 0.0 && t.f <= 1.0 + 1e-10);
            prop_assert!(t.a > 0.0 && t.a <= 1.0 + 1e-10);
        }
    }
}

#[test]
fn only_the_total_variance_matters() {
    let p = TeleportParams::new(0.4, 2.2).unwrap();
    let n = 20_000;
    let even = DephasingParams::uniform(1.0).unwrap();
    let skewed = DephasingParams::new([0.5, 0.0, 0.3, 0.0, 0.0, 0.2]).unwrap();
    let a = dephased_state_montecarlo(&p, &even, n, 1, Execution::Parallel).unwrap();
    let b = dephased_state_montecarlo(&p, &skewed, n, 2, Execution::Parallel).unwrap();
    let d = a.state.rho[0][1] - b.state.rho[0][1];
    let se_re = a.stderr_re01.hypot(b.stderr_re01);
    let se_im = a.stderr_im01.hypot(b.stderr_im01);
    assert!(d.re.abs() <= 3.0 * se_re && d.im.abs() <= 3.0 * se_im, "{d} vs ({se_re}, {se_im})");
}

#[test]
fn serial_and_parallel_curves_are_identical() {
    let taus: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
    let a = fidelity_curve(&[0.02, 0.1], &taus, Execution::Serial).unwrap();
    let b = fidelity_curve(&[0.02, 0.1], &taus, Execution::Parallel).unwrap();
    assert_eq!(a, b);
}

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use ris_sr::channel::{sample_realization, ChannelRealization, CVector};
use ris_sr::experiment::{run_sweep, Scheme, SweepConfig};
use ris_sr::oracle::{brute_force_with, grid_step_slack, ris_only_gain, sinr_sr_no_ris, OracleConfig};
use ris_sr::pso::{run_pso_with, PsoParams};
use ris_sr::rng::rng_from_seed;
use ris_sr::scenario::{Fading, Powers, Scenario};
use ris_sr::sdp::{relaxation_bound, SdpParams};
use ris_sr::sinr::{
    build_quadratics, effective_rate, sinr_d, sinr_r1, sinr_trace_form, PhaseVector, Receiver, SinrEvaluator,
};

fn draw(m: usize, snr_db: f64, seed: u64) -> (ChannelRealization, Powers) {
    let sc = Scenario::default().with_elements(m).with_snr_db(snr_db);
    let real = sample_realization(&sc, &mut rng_from_seed(seed)).unwrap();
    (real, sc.powers())
}

fn phases(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-PI..PI, dim)
}

fn instance_and_phases(max_m: usize) -> impl Strategy<Value = (usize, f64, u64, Vec<f64>)> {
    (1..=max_m, 0.0..60.0f64, any::<u64>()).prop_flat_map(|(m, snr, seed)| (Just(m), Just(snr), Just(seed), phases(2 * m)))
}

fn cascade(a: &CVector, theta: &[f64], b: &CVector) -> Complex64 {
    (0..theta.len()).map(|k| a[k] * Complex64::cis(theta[k]) * b[k]).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realizations_are_pure_functions_of_the_seed(m in 1usize..8, snr in 0.0..60.0f64, seed in any::<u64>()) {
        let a = draw(m, snr, seed).0;
        let b = draw(m, snr, seed).0;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn stacked_vectors_concatenate_both_surfaces(m in 1usize..8, seed in any::<u64>()) {
        let (r, _) = draw(m, 30.0, seed);
        let pairs = [
            (&r.h_si, &r.h_si1, &r.h_si2),
            (&r.h_ir1, &r.h_i1r1, &r.h_i2r1),
            (&r.h_r2i, &r.h_r2i1, &r.h_r2i2),
            (&r.h_id, &r.h_i1d, &r.h_i2d),
        ];
        for (stacked, first, second) in pairs {
            prop_assert_eq!(stacked.len(), 2 * m);
            for k in 0..m {
                prop_assert_eq!(stacked[k], first[k]);
                prop_assert_eq!(stacked[m + k], second[k]);
            }
        }
    }

    #[test]
    fn direct_and_trace_forms_agree((m, snr, seed, th) in instance_and_phases(8)) {
        let (real, pw) = draw(m, snr, seed);
        let qf = build_quadratics(&real);
        let theta = PhaseVector::new(th).unwrap();
        let v = theta.lifted_matrix();
        let pairs = [
            (sinr_r1(&real, &theta, pw).unwrap(), sinr_trace_form(&qf, &v, Receiver::R1, pw).unwrap()),
            (sinr_d(&real, &theta, pw).unwrap(), sinr_trace_form(&qf, &v, Receiver::D, pw).unwrap()),
        ];
        for (direct, trace) in pairs {
            prop_assert!(direct.is_finite() && direct >= 0.0);
            prop_assert!((direct - trace).abs() <= 1e-9 * direct.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn effective_rate_is_monotone(a in 0.0..1e6f64, b in 0.0..1e6f64, da in 0.0..1e3f64, db in 0.0..1e3f64) {
        let r = effective_rate(a, b);
        prop_assert!(effective_rate(a + da, b) >= r);
        prop_assert!(effective_rate(a, b + db) >= r);
        prop_assert!(r >= 0.0);
    }

    #[test]
    fn swarm_respects_bounds_and_is_reproducible(m in 1usize..6, seed in any::<u64>(), mu in 0.01..PI, n in 3usize..12) {
        let (real, pw) = draw(m, 40.0, seed);
        let ev = SinrEvaluator::new(&real, pw);
        let params = PsoParams { population: n, iterations: 20, mu, ..PsoParams::default() };
        let a = run_pso_with(&ev, &params, &mut rng_from_seed(seed ^ 1));
        let b = run_pso_with(&ev, &params, &mut rng_from_seed(seed ^ 1));
        prop_assert_eq!(a.bound_violations, 0);
        prop_assert!(a.theta.as_slice().iter().all(|p| (-PI..=PI).contains(p)));
        prop_assert_eq!(&a.trace, &b.trace);
        prop_assert_eq!(a.theta.as_slice(), b.theta.as_slice());
        prop_assert!(a.trace.windows(2).all(|w| w[1] >= w[0]));
        prop_assert_eq!(a.rate, ev.rate(a.theta.as_slice()));
    }

    #[test]
    fn aligned_cascade_is_never_beaten((m, snr, seed, th) in instance_and_phases(16)) {
        let (real, _) = draw(m, snr, seed);
        let g = cascade(&real.h_id, &th, &real.h_si).norm_sqr();
        prop_assert!(g <= ris_only_gain(&real) * (1.0 + 1e-12));
    }

    #[test]
    fn no_surface_baseline_matches_full_model((m, snr, seed, th) in instance_and_phases(4)) {
        let sc = Scenario::default().with_elements(m).with_snr_db(snr).with_iri_fading(Fading::Rayleigh);
        let real = sample_realization(&sc, &mut rng_from_seed(seed)).unwrap().without_surfaces();
        let pw = sc.powers();
        let theta = PhaseVector::new(th).unwrap();
        let (g1, g2) = sinr_sr_no_ris(&real, pw);
        prop_assert!((sinr_r1(&real, &theta, pw).unwrap() - g1).abs() <= 1e-12 * g1.max(1.0));
        prop_assert!((sinr_d(&real, &theta, pw).unwrap() - g2).abs() <= 1e-12 * g2.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bound_dominates_grid_and_swarm(snr in 0.0..60.0f64, seed in any::<u64>()) {
        let (real, pw) = draw(1, snr, seed);
        let qf = build_quadratics(&real);
        let ev = SinrEvaluator::from_quadratics(&qf, pw);
        let cfg = OracleConfig::default();
        let grid = brute_force_with(&ev, &cfg).unwrap();
        let ub = relaxation_bound(&qf, pw, &SdpParams::default(), &mut rng_from_seed(seed)).unwrap();
        let params = PsoParams { population: 20, iterations: 60, ..PsoParams::default() };
        let swarm = run_pso_with(&ev, &params, &mut rng_from_seed(seed ^ 7));
        prop_assert!(ub.upper_bound_rate >= grid.rate - 1e-6, "bound {} grid {}", ub.upper_bound_rate, grid.rate);
        prop_assert!(ub.upper_bound_rate >= swarm.rate - 1e-6, "bound {} swarm {}", ub.upper_bound_rate, swarm.rate);
        // The grid optimum dominates every grid point, including the snapped swarm design.
        let snapped = cfg.snap(swarm.theta.as_slice());
        prop_assert!(grid.rate >= ev.rate(&snapped));
        prop_assert!(grid_step_slack(&ev, &cfg, &grid) >= 0.0);
    }
}

#[test]
fn sweep_rows_do_not_depend_on_scheme_selection() {
    let base = SweepConfig {
        snr_grid_db: vec![20.0],
        m_list: vec![2],
        trials: 3,
        pso: PsoParams { population: 6, iterations: 5, ..PsoParams::default() },
        seed: 5,
        ..SweepConfig::default()
    };
    let all = run_sweep(&SweepConfig { schemes: vec![Scheme::Pso, Scheme::RisOnly, Scheme::SrNoRis], ..base.clone() }, Some(1)).unwrap();
    let only = run_sweep(&SweepConfig { schemes: vec![Scheme::RisOnly], ..base }, Some(1)).unwrap();
    let from_all: Vec<_> = all.into_iter().filter(|r| r.scheme == Scheme::RisOnly).collect();
    assert_eq!(from_all, only);
}

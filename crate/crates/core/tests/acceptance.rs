//! End-to-end acceptance checks, run without the libtest harness so the
//! PASS/FAIL line of every criterion is always printed. Exits nonzero if any
//! criterion fails.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use ris_sr::experiment::{
    algorithm_seed, convergence_seed, emit_plotdata, instance, run_sweep, write_sweep_csv,
};
use ris_sr::oracle::{brute_force_with, grid_step_slack, rate_ris_only, rate_sr_no_ris, OracleConfig};
use ris_sr::pso::run_pso_with;
use ris_sr::rng::{rng_from_seed, sub_rng};
use ris_sr::sdp::{relaxation_bound, solve_sdp};
use ris_sr::sinr::{build_quadratics, sinr_d, sinr_r1, sinr_trace_form, Receiver};
use ris_sr::{PhaseVector, PsoParams, Scenario, Scheme, SinrEvaluator, SweepConfig};

const FORM_REL_TOL: f64 = 1e-9;
const FORM_PAIRS_PER_M: usize = 400;
const FORM_BUDGET: Duration = Duration::from_secs(10);

const ORACLE_INSTANCES: usize = 100;
const ORACLE_PSO_REQUIRED: usize = 95;
const ORACLE_SNR_DB: f64 = 40.0;
const ORACLE_BUDGET: Duration = Duration::from_secs(120);

const DOMINANCE_TOL: f64 = 1e-6;
const DOMINANCE_M: usize = 8;
const DOMINANCE_INSTANCES: usize = 100;

const GAP_SNR_DB: f64 = 40.0;
const GAP_TRIALS: usize = 200;
const GAP_MIN_RATIO: f64 = 0.93;

const CURVE_M: usize = 32;
const CURVE_TRIALS: usize = 200;
const CURVE_ORDER_FROM_DB: f64 = 20.0;
const CURVE_TARGET_BITS: f64 = 4.0;
const CURVE_GAIN_DB: f64 = 15.0;
const CURVE_GAIN_TOL_DB: f64 = 3.0;

const MU_M: usize = 32;
const MU_POPULATION: usize = 50;
const MU_SNR_DB: f64 = 50.0;
const MU_ITERATIONS: usize = 200;
const MU_TRIALS: usize = 50;

const OUTER_INSTANCES: usize = 100;
const OUTER_M: [usize; 3] = [4, 8, 16];
const OUTER_SNR_DB: f64 = 40.0;
const OUTER_ERR: f64 = 1e-3;
const OUTER_MAX_ITER: usize = 30;
const OUTER_REQUIRED: usize = 95;
const OUTER_DROP_TOL: f64 = 1e-6;

struct Report {
    lines: Vec<(usize, bool, String)>,
}

impl Report {
    fn record(&mut self, id: usize, pass: bool, detail: String) {
        println!("criterion {id}: {} {detail}", if pass { "PASS" } else { "FAIL" });
        self.lines.push((id, pass, detail));
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn random_theta(dim: usize, rng: &mut impl rand::Rng) -> PhaseVector {
    PhaseVector::new((0..dim).map(|_| rng.random_range(-PI..PI)).collect()).unwrap()
}

/// First SNR at which a piecewise-linear curve reaches `level`.
fn crossing(snr: &[f64], rate: &[f64], level: f64) -> Option<f64> {
    (1..snr.len()).find_map(|k| {
        let (r0, r1) = (rate[k - 1], rate[k]);
        (r0 < level && r1 >= level).then(|| snr[k - 1] + (level - r0) / (r1 - r0) * (snr[k] - snr[k - 1]))
    })
}

fn criterion_1(rep: &mut Report) {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut pairs = 0;
    for m in [1, 4, 16] {
        let sc = Scenario::default().with_elements(m);
        let pw = sc.powers();
        let mut rng = sub_rng(11, &[m as u64]);
        for _ in 0..FORM_PAIRS_PER_M {
            let real = ris_sr::sample_realization(&sc, &mut rng).unwrap();
            let theta = random_theta(2 * m, &mut rng);
            let qf = build_quadratics(&real);
            let v = theta.lifted_matrix();
            let direct = [sinr_r1(&real, &theta, pw).unwrap(), sinr_d(&real, &theta, pw).unwrap()];
            let trace = [
                sinr_trace_form(&qf, &v, Receiver::R1, pw).unwrap(),
                sinr_trace_form(&qf, &v, Receiver::D, pw).unwrap(),
            ];
            worst = worst.max(rel_diff(direct[0], trace[0])).max(rel_diff(direct[1], trace[1]));
            pairs += 1;
        }
    }
    let elapsed = start.elapsed();
    rep.record(
        1,
        pairs >= 1000 && worst <= FORM_REL_TOL && elapsed < FORM_BUDGET,
        format!("{pairs} pairs, worst relative difference {worst:.2e} (tol {FORM_REL_TOL:e}), {elapsed:.2?}"),
    );
}

fn criterion_2(rep: &mut Report, violations: &mut usize) {
    let start = Instant::now();
    let cfg = SweepConfig::default();
    let oracle = OracleConfig {
        levels: 64,
        ..OracleConfig::default()
    };
    let pso = PsoParams {
        population: 50,
        iterations: 200,
        mu: PI / 8.0,
        ..PsoParams::default()
    };
    let (mut pso_ok, mut sdp_ok, mut worst_sdp) = (0, 0, f64::INFINITY);
    for trial in 0..ORACLE_INSTANCES {
        let (sc, real) = instance(&cfg, 1, ORACLE_SNR_DB, trial).unwrap();
        let pw = sc.powers();
        let ev = SinrEvaluator::new(&real, pw);
        let best = brute_force_with(&ev, &oracle).unwrap();
        let slack = grid_step_slack(&ev, &oracle, &best);

        let mut rng = rng_from_seed(algorithm_seed(cfg.seed, Scheme::Pso, 1, ORACLE_SNR_DB, trial));
        let out = run_pso_with(&ev, &pso, &mut rng);
        *violations += out.bound_violations;
        pso_ok += (out.rate >= best.rate - slack) as usize;

        let mut rng = rng_from_seed(algorithm_seed(cfg.seed, Scheme::SdpUpper, 1, ORACLE_SNR_DB, trial));
        let sdp = solve_sdp(&build_quadratics(&real), pw, &cfg.sdp, &mut rng).unwrap();
        worst_sdp = worst_sdp.min(sdp.upper_bound_rate - best.rate);
        sdp_ok += (sdp.upper_bound_rate >= best.rate) as usize;
    }
    let elapsed = start.elapsed();
    rep.record(
        2,
        pso_ok >= ORACLE_PSO_REQUIRED && sdp_ok == ORACLE_INSTANCES && elapsed < ORACLE_BUDGET,
        format!(
            "swarm within one grid step on {pso_ok}/{ORACLE_INSTANCES} (need {ORACLE_PSO_REQUIRED}), \
             bound >= grid optimum on {sdp_ok}/{ORACLE_INSTANCES} (min margin {worst_sdp:.2e}), {elapsed:.2?}"
        ),
    );
}

fn criterion_3(rep: &mut Report, violations: &mut usize) {
    let cfg = SweepConfig::default();
    let (mut bad, mut min_pso, mut min_feas) = (0, f64::INFINITY, f64::INFINITY);
    for trial in 0..DOMINANCE_INSTANCES {
        let (sc, real) = instance(&cfg, DOMINANCE_M, GAP_SNR_DB, trial).unwrap();
        let pw = sc.powers();
        let ev = SinrEvaluator::new(&real, pw);
        let mut rng = rng_from_seed(algorithm_seed(cfg.seed, Scheme::Pso, DOMINANCE_M, GAP_SNR_DB, trial));
        let pso = run_pso_with(&ev, &cfg.pso, &mut rng);
        *violations += pso.bound_violations;
        let mut rng = rng_from_seed(algorithm_seed(cfg.seed, Scheme::SdpUpper, DOMINANCE_M, GAP_SNR_DB, trial));
        let sdp = solve_sdp(&build_quadratics(&real), pw, &cfg.sdp, &mut rng).unwrap();
        let (d_pso, d_feas) = (sdp.upper_bound_rate - pso.rate, sdp.upper_bound_rate - sdp.feasible_rate);
        min_pso = min_pso.min(d_pso);
        min_feas = min_feas.min(d_feas);
        bad += (d_pso < -DOMINANCE_TOL || d_feas < -DOMINANCE_TOL) as usize;
    }
    rep.record(
        3,
        bad == 0,
        format!(
            "M={DOMINANCE_M}, {DOMINANCE_INSTANCES} instances: {bad} violations, \
             min bound-swarm {min_pso:.2e}, min bound-extracted {min_feas:.2e} (tol {DOMINANCE_TOL:e})"
        ),
    );
}

/// Swarm rates for the default sweep configuration, keyed by (M, SNR bits, trial).
type SwarmRates = HashMap<(usize, u64, usize), f64>;

fn swarm_rate(cfg: &SweepConfig, cache: &mut SwarmRates, violations: &mut usize, m: usize, snr_db: f64, trial: usize) -> f64 {
    *cache.entry((m, snr_db.to_bits(), trial)).or_insert_with(|| {
        let (sc, real) = instance(cfg, m, snr_db, trial).unwrap();
        let ev = SinrEvaluator::new(&real, sc.powers());
        let mut rng = rng_from_seed(algorithm_seed(cfg.seed, Scheme::Pso, m, snr_db, trial));
        let out = run_pso_with(&ev, &cfg.pso, &mut rng);
        *violations += out.bound_violations;
        out.rate
    })
}

fn criterion_4(rep: &mut Report, cache: &mut SwarmRates, violations: &mut usize) {
    let cfg = SweepConfig::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [16, 32] {
        let (mut sum_pso, mut sum_ub) = (0.0, 0.0);
        for trial in 0..GAP_TRIALS {
            sum_pso += swarm_rate(&cfg, cache, violations, m, GAP_SNR_DB, trial);
            let (sc, real) = instance(&cfg, m, GAP_SNR_DB, trial).unwrap();
            let mut rng = rng_from_seed(algorithm_seed(cfg.seed, Scheme::SdpUpper, m, GAP_SNR_DB, trial));
            let ub = relaxation_bound(&build_quadratics(&real), sc.powers(), &cfg.sdp, &mut rng).unwrap();
            sum_ub += ub.upper_bound_rate;
        }
        let ratio = sum_pso / sum_ub;
        pass &= ratio >= GAP_MIN_RATIO;
        parts.push(format!(
            "M={m}: swarm {:.4} / bound {:.4} = {ratio:.4}",
            sum_pso / GAP_TRIALS as f64,
            sum_ub / GAP_TRIALS as f64
        ));
    }
    rep.record(4, pass, format!("{} (need >= {GAP_MIN_RATIO})", parts.join(", ")));
}

fn criterion_5(rep: &mut Report, cache: &mut SwarmRates, violations: &mut usize) {
    let cfg = SweepConfig::default();
    let snr = cfg.snr_grid_db.clone();
    let mut swarm = Vec::new();
    let mut ris_only = Vec::new();
    let mut no_ris = Vec::new();
    for &s in &snr {
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for trial in 0..CURVE_TRIALS {
            a += swarm_rate(&cfg, cache, violations, CURVE_M, s, trial);
            let (sc, real) = instance(&cfg, CURVE_M, s, trial).unwrap();
            let pw = sc.powers();
            b += rate_ris_only(&real, sc.p, sc.sigma2);
            let sc_iri = sc.with_iri_fading(ris_sr::Fading::Rayleigh);
            let mut rng = rng_from_seed(ris_sr::experiment::no_ris_channel_seed(cfg.seed, CURVE_M, s, trial));
            let real_iri = ris_sr::sample_realization(&sc_iri, &mut rng).unwrap();
            c += rate_sr_no_ris(&real_iri, pw);
        }
        let n = CURVE_TRIALS as f64;
        swarm.push(a / n);
        ris_only.push(b / n);
        no_ris.push(c / n);
    }
    let order_breaks: Vec<f64> = snr
        .iter()
        .enumerate()
        .filter(|&(k, &s)| s >= CURVE_ORDER_FROM_DB && !(swarm[k] > ris_only[k] && ris_only[k] > no_ris[k]))
        .map(|(_, &s)| s)
        .collect();
    let gain = match (
        crossing(&snr, &swarm, CURVE_TARGET_BITS),
        crossing(&snr, &ris_only, CURVE_TARGET_BITS),
    ) {
        (Some(x), Some(y)) => Some(y - x),
        _ => None,
    };
    let gain_ok = gain.is_some_and(|g| (g - CURVE_GAIN_DB).abs() <= CURVE_GAIN_TOL_DB);
    rep.record(
        5,
        order_breaks.is_empty() && gain_ok,
        format!(
            "M={CURVE_M}, {CURVE_TRIALS} trials: ordering broken at {order_breaks:?} dB, \
             gain at {CURVE_TARGET_BITS} bits/s/Hz = {} dB (need {CURVE_GAIN_DB} +/- {CURVE_GAIN_TOL_DB})",
            gain.map_or("n/a".into(), |g| format!("{g:.2}"))
        ),
    );
}

fn criterion_6(rep: &mut Report, violations: &mut usize) {
    let mut cfg = SweepConfig::default();
    cfg.pso.iterations = MU_ITERATIONS;
    cfg.convergence.population = MU_POPULATION;
    let finals: Vec<f64> = [PI / 8.0, PI]
        .iter()
        .map(|&mu| {
            let params = cfg.convergence_pso(mu);
            let total: f64 = (0..MU_TRIALS)
                .map(|trial| {
                    let (sc, real) = instance(&cfg, MU_M, MU_SNR_DB, trial).unwrap();
                    let ev = SinrEvaluator::new(&real, sc.powers());
                    let mut rng = rng_from_seed(convergence_seed(cfg.seed, MU_M, trial));
                    let out = run_pso_with(&ev, &params, &mut rng);
                    *violations += out.bound_violations;
                    *out.rate_trace().last().unwrap()
                })
                .sum();
            total / MU_TRIALS as f64
        })
        .collect();
    rep.record(
        6,
        finals[0] > finals[1],
        format!("final mean best rate mu=pi/8 {:.4} vs mu=pi {:.4}", finals[0], finals[1]),
    );
}

fn criterion_8(rep: &mut Report) {
    let cfg = SweepConfig::default();
    let (mut fast, mut worst_drop, mut damping, mut unconverged) = (0, 0.0f64, 0, 0);
    for trial in 0..OUTER_INSTANCES {
        let m = OUTER_M[trial % OUTER_M.len()];
        let (sc, real) = instance(&cfg, m, OUTER_SNR_DB, trial).unwrap();
        let mut rng = rng_from_seed(algorithm_seed(cfg.seed, Scheme::SdpUpper, m, OUTER_SNR_DB, trial));
        let ub = relaxation_bound(&build_quadratics(&real), sc.powers(), &cfg.sdp, &mut rng).unwrap();
        fast += ub.history.iter().any(|s| s.err < OUTER_ERR && s.k <= OUTER_MAX_ITER) as usize;
        for w in ub.history.windows(2) {
            worst_drop = worst_drop.max(w[0].objective - w[1].objective);
        }
        damping += ub.damping_events;
        unconverged += !ub.converged as usize;
    }
    rep.record(
        8,
        fast >= OUTER_REQUIRED && worst_drop <= OUTER_DROP_TOL,
        format!(
            "M in {OUTER_M:?}: err < {OUTER_ERR:e} within {OUTER_MAX_ITER} iterations on {fast}/{OUTER_INSTANCES} \
             (need {OUTER_REQUIRED}), largest objective drop {worst_drop:.2e} (tol {OUTER_DROP_TOL:e}), \
             damping events {damping}, not converged {unconverged}"
        ),
    );
}

fn criterion_9(rep: &mut Report) {
    let cfg = SweepConfig {
        snr_grid_db: vec![0.0, 20.0, 40.0],
        m_list: vec![1, 2],
        trials: 4,
        schemes: Scheme::ALL.to_vec(),
        seed: 5,
        ..SweepConfig::default()
    };
    let csv = |threads| {
        let rows = run_sweep(&cfg, threads).unwrap();
        emit_plotdata(&rows).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        buf
    };
    let (a, b, c) = (csv(Some(1)), csv(Some(1)), csv(None));
    rep.record(
        9,
        a == b && a == c,
        format!("{} bytes, repeat identical {}, thread count independent {}", a.len(), a == b, a == c),
    );
}

fn main() {
    let mut rep = Report { lines: Vec::new() };
    let mut cache = SwarmRates::new();
    let mut violations = 0;

    criterion_1(&mut rep);
    criterion_2(&mut rep, &mut violations);
    criterion_3(&mut rep, &mut violations);
    criterion_4(&mut rep, &mut cache, &mut violations);
    criterion_5(&mut rep, &mut cache, &mut violations);
    criterion_6(&mut rep, &mut violations);
    rep.record(
        7,
        violations == 0,
        format!("{violations} phase or velocity bound violations across the swarm runs of criteria 2-6"),
    );
    criterion_8(&mut rep);
    criterion_9(&mut rep);

    let failed: Vec<usize> = rep.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", rep.lines.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}

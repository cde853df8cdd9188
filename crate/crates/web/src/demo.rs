//! Plain-Rust implementations behind the browser bindings.

use ris_sr::experiment::{emit_plotdata, instance, run_sweep, Scheme, SweepConfig};
use ris_sr::oracle::{brute_force_with, OracleConfig};
use ris_sr::pso::{run_pso_with, PsoParams};
use ris_sr::rng::rng_from_seed;
use ris_sr::sinr::SinrEvaluator;
use ris_sr::Result;

fn config(seed: u64) -> SweepConfig {
    SweepConfig {
        seed,
        ..SweepConfig::default()
    }
}

/// Best-so-far rate after each swarm update on one channel draw.
pub fn pso_trace(m: usize, snr_db: f64, population: usize, iterations: usize, mu: f64, seed: u64) -> Result<Vec<f64>> {
    let cfg = config(seed);
    let params = PsoParams {
        population,
        iterations,
        mu,
        seed,
        ..PsoParams::default()
    };
    params.validate("pso")?;
    let (sc, real) = instance(&cfg, m, snr_db, 0)?;
    let ev = SinrEvaluator::new(&real, sc.powers());
    Ok(run_pso_with(&ev, &params, &mut rng_from_seed(seed)).rate_trace())
}

/// Mean rate against SNR for the swarm design and both baselines.
///
/// Returns rows `[snr_db, pso, ris_only, sr_no_ris]` flattened.
pub fn rate_curves(m: usize, snr_db: &[f64], trials: usize, population: usize, iterations: usize, seed: u64) -> Result<Vec<f64>> {
    let cfg = SweepConfig {
        snr_grid_db: snr_db.to_vec(),
        m_list: vec![m],
        trials,
        schemes: vec![Scheme::Pso, Scheme::RisOnly, Scheme::SrNoRis],
        pso: PsoParams {
            population,
            iterations,
            ..PsoParams::default()
        },
        ..config(seed)
    };
    let rows = run_sweep(&cfg, None)?;
    let points = emit_plotdata(&rows)?;
    let mean = |scheme: Scheme, snr: f64| {
        points
            .iter()
            .find(|p| p.scheme == scheme && p.snr_db == snr)
            .map_or(f64::NAN, |p| p.mean_rate)
    };
    Ok(snr_db
        .iter()
        .flat_map(|&s| [s, mean(Scheme::Pso, s), mean(Scheme::RisOnly, s), mean(Scheme::SrNoRis, s)])
        .collect())
}

/// Rate over the two phases of a one-element-per-surface draw.
///
/// Returns `resolution²` rates in row-major order (first phase along rows,
/// both spanning `[-π, π)`), followed by the grid-search optimum
/// `[rate, θ1, θ2]`.
pub fn rate_landscape(snr_db: f64, resolution: usize, seed: u64) -> Result<Vec<f64>> {
    let cfg = config(seed);
    let (sc, real) = instance(&cfg, 1, snr_db, 0)?;
    let ev = SinrEvaluator::new(&real, sc.powers());
    let grid = OracleConfig {
        levels: resolution.max(2),
        ..OracleConfig::default()
    };
    let n = grid.levels;
    let mut out = Vec::with_capacity(n * n + 3);
    for a in 0..n {
        for b in 0..n {
            out.push(ev.rate(&[grid.grid_phase(a), grid.grid_phase(b)]));
        }
    }
    let best = brute_force_with(&ev, &grid)?;
    out.push(best.rate);
    out.extend_from_slice(best.theta.as_slice());
    Ok(out)
}

use std::io::Write;

use crate::channel::{sample_realization, ChannelRealization};
use crate::error::Result;
use crate::oracle::{brute_force_with, ris_only_gain, sinr_sr_no_ris};
use crate::pso::run_pso_with;
use crate::rng::rng_from_seed;
use crate::scenario::{Fading, Scenario};
use crate::sdp::relaxation_bound;
use crate::sinr::{build_quadratics, effective_rate, rate_from_sinr, SinrEvaluator};

use super::{algorithm_seed, channel_seed, fmt_sig6, no_ris_channel_seed, Scheme, SweepConfig};

/// One rate sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: Scheme,
    pub m: usize,
    pub snr_db: f64,
    pub trial: usize,
    pub rate_bits: f64,
    /// Scheme-specific diagnostic: outer iterations (`sdp_upper`), best linear
    /// min-SINR (`pso`), linear SINR/SNR (baselines), grid levels (`oracle`).
    pub aux: f64,
    /// Seed of the stream that determined this row.
    pub seed_used: u64,
}

/// Scenario and channel draw of one sweep point, exactly as the sweep sees it.
pub fn instance(
    cfg: &SweepConfig,
    m: usize,
    snr_db: f64,
    trial: usize,
) -> Result<(Scenario, ChannelRealization)> {
    let sc = cfg.scenario.with_elements(m).with_snr_db(snr_db);
    let mut rng = rng_from_seed(channel_seed(cfg.seed, m, snr_db, trial));
    let real = sample_realization(&sc, &mut rng)?;
    Ok((sc, real))
}

fn run_point(cfg: &SweepConfig, schemes: &[Scheme], m: usize, snr_db: f64, trial: usize) -> Result<Vec<SweepRow>> {
    let (sc, real) = instance(cfg, m, snr_db, trial)?;
    let pw = sc.powers();
    let qf = build_quadratics(&real);
    let ev = SinrEvaluator::from_quadratics(&qf, pw);
    let ch_seed = channel_seed(cfg.seed, m, snr_db, trial);
    let row = |scheme, rate_bits, aux, seed_used| SweepRow {
        scheme,
        m,
        snr_db,
        trial,
        rate_bits,
        aux,
        seed_used,
    };

    let mut rows = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let seed = algorithm_seed(cfg.seed, scheme, m, snr_db, trial);
        rows.push(match scheme {
            Scheme::SdpUpper => {
                let ub = relaxation_bound(&qf, pw, &cfg.sdp, &mut rng_from_seed(seed))?;
                row(scheme, ub.upper_bound_rate, ub.iterations as f64, seed)
            }
            Scheme::Pso => {
                let out = run_pso_with(&ev, &cfg.pso, &mut rng_from_seed(seed));
                row(scheme, out.rate, out.best_fitness, seed)
            }
            Scheme::SrNoRis => {
                let seed = no_ris_channel_seed(cfg.seed, m, snr_db, trial);
                let sc_nr = sc.with_iri_fading(Fading::Rayleigh);
                let real_nr = sample_realization(&sc_nr, &mut rng_from_seed(seed))?;
                let (g1, g2) = sinr_sr_no_ris(&real_nr, pw);
                row(scheme, effective_rate(g1, g2), g1.min(g2), seed)
            }
            Scheme::RisOnly => {
                let snr = sc.p * ris_only_gain(&real) / sc.sigma2;
                row(scheme, rate_from_sinr(snr), snr, ch_seed)
            }
            Scheme::Oracle => {
                let res = brute_force_with(&ev, &cfg.oracle)?;
                row(scheme, res.rate, cfg.oracle.levels as f64, ch_seed)
            }
        });
    }
    Ok(rows)
}

/// Runs every (M, SNR, trial) point of the configuration.
///
/// Rows come back ordered by `m_list`, then `snr_grid_db`, then trial, then
/// scheme, whatever the thread count. `threads = None` uses all cores.
pub fn run_sweep(cfg: &SweepConfig, threads: Option<usize>) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let schemes = cfg.scheme_order();
    let points: Vec<(usize, f64, usize)> = cfg
        .m_list
        .iter()
        .flat_map(|&m| {
            cfg.snr_grid_db
                .iter()
                .flat_map(move |&snr| (0..cfg.trials).map(move |t| (m, snr, t)))
        })
        .collect();
    let per_point = map_points(&points, threads, |&(m, snr, t)| run_point(cfg, &schemes, m, snr, t))?;
    Ok(per_point.into_iter().flatten().collect())
}

#[cfg(feature = "parallel")]
pub(crate) fn map_points<P, T, F>(points: &[P], threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    P: Sync,
    T: Send,
    F: Fn(&P) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| crate::error::Error::Domain(format!("thread pool: {e}")))?;
    pool.install(|| points.par_iter().map(&f).collect())
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_points<P, T, F>(points: &[P], _threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    F: Fn(&P) -> Result<T>,
{
    points.iter().map(f).collect()
}

const SWEEP_HEADER: [&str; 7] = ["scheme", "M", "snr_db", "trial", "rate_bits", "aux", "seed_used"];

/// Writes rows as CSV; floats carry six significant digits.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.scheme.as_str().to_string(),
            r.m.to_string(),
            fmt_sig6(r.snr_db),
            r.trial.to_string(),
            fmt_sig6(r.rate_bits),
            fmt_sig6(r.aux),
            r.seed_used.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

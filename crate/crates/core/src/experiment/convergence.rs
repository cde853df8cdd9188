use std::io::Write;

use crate::error::Result;
use crate::pso::run_pso_with;
use crate::rng::rng_from_seed;
use crate::sinr::SinrEvaluator;

use super::sweep::{instance, map_points};
use super::{convergence_seed, fmt_sig6, SweepConfig};

/// Mean best-so-far rate after `t` swarm updates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergencePoint {
    pub m: usize,
    pub mu: f64,
    pub t: usize,
    pub mean_best_rate: f64,
}

/// PSO best-so-far rate traces averaged over channel draws, for every
/// (M, mu) pair of the `convergence` section.
///
/// Channel draws coincide with the sweep's at the same (M, SNR, trial), and
/// every `mu` starts from the same swarm.
pub fn run_convergence(cfg: &SweepConfig, threads: Option<usize>) -> Result<Vec<ConvergencePoint>> {
    cfg.validate()?;
    let conv = &cfg.convergence;
    let jobs: Vec<(usize, f64, usize)> = conv
        .m_list
        .iter()
        .flat_map(|&m| {
            conv.mu_list
                .iter()
                .flat_map(move |&mu| (0..conv.trials).map(move |t| (m, mu, t)))
        })
        .collect();
    let traces = map_points(&jobs, threads, |&(m, mu, trial)| {
        let (sc, real) = instance(cfg, m, conv.snr_db, trial)?;
        let ev = SinrEvaluator::new(&real, sc.powers());
        let mut rng = rng_from_seed(convergence_seed(cfg.seed, m, trial));
        Ok(run_pso_with(&ev, &cfg.convergence_pso(mu), &mut rng).rate_trace())
    })?;

    let mut out = Vec::new();
    for (group, chunk) in traces.chunks(conv.trials).enumerate() {
        let (m, mu, _) = jobs[group * conv.trials];
        let len = chunk[0].len();
        for t in 0..len {
            let mean = chunk.iter().map(|tr| tr[t]).sum::<f64>() / chunk.len() as f64;
            out.push(ConvergencePoint {
                m,
                mu,
                t,
                mean_best_rate: mean,
            });
        }
    }
    Ok(out)
}

pub fn write_convergence_csv<W: Write>(points: &[ConvergencePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["M", "mu", "t", "mean_best_rate"])?;
    for p in points {
        w.write_record([
            p.m.to_string(),
            fmt_sig6(p.mu),
            p.t.to_string(),
            fmt_sig6(p.mean_best_rate),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::ConvergenceSettings;
    use crate::pso::PsoParams;
    use std::f64::consts::PI;

    #[test]
    fn traces_are_monotone_and_complete() {
        let cfg = SweepConfig {
            pso: PsoParams {
                iterations: 15,
                ..PsoParams::default()
            },
            convergence: ConvergenceSettings {
                snr_db: 30.0,
                m_list: vec![2, 4],
                mu_list: vec![PI / 8.0, PI],
                trials: 3,
                population: 6,
            },
            ..SweepConfig::default()
        };
        let pts = run_convergence(&cfg, Some(2)).unwrap();
        assert_eq!(pts.len(), 2 * 2 * 16);
        for w in pts.windows(2) {
            if w[0].m == w[1].m && w[0].mu == w[1].mu {
                assert_eq!(w[1].t, w[0].t + 1);
                assert!(w[1].mean_best_rate >= w[0].mean_best_rate);
            }
        }
        assert_eq!(pts, run_convergence(&cfg, Some(1)).unwrap());
    }
}

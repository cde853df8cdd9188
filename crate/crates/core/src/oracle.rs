//! Exhaustive grid search for tiny instances, plus the two comparison schemes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::scenario::Powers;
use crate::sinr::{effective_rate, rate_from_sinr, PhaseVector, SinrEvaluator};

/// Largest number of grid points the exhaustive search will visit.
pub const MAX_GRID_POINTS: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    /// Phase levels per element.
    pub levels: usize,
    /// Largest number of phases (`2M`) accepted.
    pub max_elements: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            levels: 64,
            max_elements: 4,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        if self.levels < 2 {
            return Err(Error::config(format!("{prefix}.levels"), "must be at least 2"));
        }
        Ok(())
    }

    /// Grid value `-π + 2πk/levels`; `+π` is excluded since it duplicates `-π`.
    pub fn grid_phase(&self, k: usize) -> f64 {
        -PI + 2.0 * PI * k as f64 / self.levels as f64
    }

    pub fn grid_step(&self) -> f64 {
        2.0 * PI / self.levels as f64
    }

    /// Index of the nearest grid point to `phase`, with wraparound.
    pub fn snap_index(&self, phase: f64) -> usize {
        let k = ((phase + PI) / self.grid_step()).round() as i64;
        k.rem_euclid(self.levels as i64) as usize
    }

    /// Rounds every phase to its nearest grid point.
    pub fn snap(&self, theta: &[f64]) -> Vec<f64> {
        theta.iter().map(|&p| self.grid_phase(self.snap_index(p))).collect()
    }

    /// Fails with [`Error::OracleTooLarge`] when `elements` phases exceed the guards.
    pub fn check_size(&self, elements: usize) -> Result<()> {
        self.validate("oracle")?;
        let points = (self.levels as f64).powi(elements as i32);
        if elements > self.max_elements || points > MAX_GRID_POINTS {
            return Err(Error::OracleTooLarge {
                levels: self.levels,
                elements,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub theta: PhaseVector,
    pub rate: f64,
    /// Grid index of every phase in `theta`.
    pub indices: Vec<usize>,
}

/// Exact maximum of the effective rate over the uniform phase grid.
///
/// Ties keep the lexicographically smallest index vector.
pub fn brute_force_search(real: &ChannelRealization, pw: Powers, cfg: &OracleConfig) -> Result<OracleResult> {
    let ev = SinrEvaluator::new(real, pw);
    brute_force_with(&ev, cfg)
}

pub fn brute_force_with(ev: &SinrEvaluator, cfg: &OracleConfig) -> Result<OracleResult> {
    let dim = ev.dim();
    cfg.check_size(dim)?;
    let best = if dim == 0 {
        (ev.min_sinr(&[]), Vec::new())
    } else {
        search_chunks(ev, cfg, dim)
    };
    let theta: Vec<f64> = best.1.iter().map(|&k| cfg.grid_phase(k)).collect();
    Ok(OracleResult {
        theta: PhaseVector::new(theta)?,
        rate: rate_from_sinr(best.0),
        indices: best.1,
    })
}

/// Rate lost by moving the grid optimum one step in any combination of
/// coordinates: `rate − min` over the `3^dim − 1` neighbouring grid points.
///
/// Serves as the tolerance for "within one grid step of the optimum".
pub fn grid_step_slack(ev: &SinrEvaluator, cfg: &OracleConfig, best: &OracleResult) -> f64 {
    let dim = best.indices.len();
    let levels = cfg.levels as i64;
    let mut worst = best.rate;
    let mut offsets = vec![-1i64; dim];
    loop {
        if offsets.iter().any(|&o| o != 0) {
            let theta: Vec<f64> = best
                .indices
                .iter()
                .zip(&offsets)
                .map(|(&k, &o)| cfg.grid_phase((k as i64 + o).rem_euclid(levels) as usize))
                .collect();
            worst = worst.min(ev.rate(&theta));
        }
        let Some(pos) = offsets.iter().rposition(|&o| o < 1) else {
            break;
        };
        offsets[pos] += 1;
        for o in &mut offsets[pos + 1..] {
            *o = -1;
        }
    }
    best.rate - worst
}

/// Best point with the leading index fixed to `first`.
fn search_prefix(ev: &SinrEvaluator, cfg: &OracleConfig, dim: usize, first: usize) -> (f64, Vec<usize>) {
    let phases: Vec<f64> = (0..cfg.levels).map(|k| cfg.grid_phase(k)).collect();
    let mut idx = vec![0usize; dim];
    idx[0] = first;
    let mut theta: Vec<f64> = idx.iter().map(|&k| phases[k]).collect();
    let mut best = (f64::NEG_INFINITY, idx.clone());
    loop {
        let g = ev.min_sinr(&theta);
        if g > best.0 {
            best = (g, idx.clone());
        }
        // Odometer over positions 1..dim, last position fastest.
        let mut pos = dim;
        loop {
            if pos == 1 {
                return best;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < cfg.levels {
                theta[pos] = phases[idx[pos]];
                break;
            }
            idx[pos] = 0;
            theta[pos] = phases[0];
        }
    }
}

fn pick(a: (f64, Vec<usize>), b: (f64, Vec<usize>)) -> (f64, Vec<usize>) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

#[cfg(feature = "parallel")]
fn search_chunks(ev: &SinrEvaluator, cfg: &OracleConfig, dim: usize) -> (f64, Vec<usize>) {
    use rayon::prelude::*;
    (0..cfg.levels)
        .into_par_iter()
        .map(|k| search_prefix(ev, cfg, dim, k))
        .reduce(|| (f64::NEG_INFINITY, vec![usize::MAX; dim]), pick)
}

#[cfg(not(feature = "parallel"))]
fn search_chunks(ev: &SinrEvaluator, cfg: &OracleConfig, dim: usize) -> (f64, Vec<usize>) {
    (0..cfg.levels)
        .map(|k| search_prefix(ev, cfg, dim, k))
        .fold((f64::NEG_INFINITY, vec![usize::MAX; dim]), pick)
}

/// Two-relay successive relaying with no surfaces.
///
/// Without surfaces there is no source leakage at the destination, so the
/// second hop is interference free. The realization should be drawn with
/// Rayleigh IRI; surface links are ignored.
pub fn rate_sr_no_ris(real: &ChannelRealization, pw: Powers) -> f64 {
    let (g1, g2) = sinr_sr_no_ris(real, pw);
    effective_rate(g1, g2)
}

/// `(γ_r1, γ_d)` of the no-surface baseline.
pub fn sinr_sr_no_ris(real: &ChannelRealization, pw: Powers) -> (f64, f64) {
    let g1 = pw.source * real.h_sr1.norm_sqr() / (pw.relay * real.h_r2r1.norm_sqr() + pw.noise);
    let g2 = pw.relay * real.h_r2d.norm_sqr() / pw.noise;
    (g1, g2)
}

/// Composite gain `(Σ_m |h_id,m| |h_si,m|)²` of the coherently aligned cascade.
pub fn ris_only_gain(real: &ChannelRealization) -> f64 {
    let amp: f64 = real
        .h_id
        .iter()
        .zip(real.h_si.iter())
        .map(|(a, b)| a.norm() * b.norm())
        .sum();
    amp * amp
}

/// Phases `-(arg h_id,m + arg h_si,m)` that achieve [`ris_only_gain`].
pub fn ris_only_phases(real: &ChannelRealization) -> PhaseVector {
    PhaseVector::wrapped(real.h_id.iter().zip(real.h_si.iter()).map(|(a, b)| -(a.arg() + b.arg())))
}

/// Single-hop source-to-destination link through both surfaces at full power
/// `p`, with the phases aligned. Full-time transmission, no half-duplex factor.
pub fn rate_ris_only(real: &ChannelRealization, p: f64, sigma2: f64) -> f64 {
    rate_from_sinr(p * ris_only_gain(real) / sigma2)
}

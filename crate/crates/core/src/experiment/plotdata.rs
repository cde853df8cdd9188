use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use crate::error::{Error, Result};

use super::{fmt_fixed6, Scheme, SweepRow};

/// Mean rate of one (scheme, M, SNR) curve point.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotPoint {
    pub scheme: Scheme,
    pub m: usize,
    pub snr_db: f64,
    pub mean_rate: f64,
    /// Standard error of the mean; zero for a single trial.
    pub stderr: f64,
    pub count: usize,
}

/// `f64` key with a total order, for grouping SNR values.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
struct Snr(f64);

impl Eq for Snr {}

impl Ord for Snr {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Aggregates sweep rows into curve points ordered by scheme, M, SNR.
///
/// The row set must cover the full cartesian product of the schemes, M
/// values, SNR values and trials it mentions; anything missing or
/// duplicated is reported.
pub fn emit_plotdata(rows: &[SweepRow]) -> Result<Vec<PlotPoint>> {
    let schemes: BTreeSet<Scheme> = rows.iter().map(|r| r.scheme).collect();
    let ms: BTreeSet<usize> = rows.iter().map(|r| r.m).collect();
    let snrs: BTreeSet<Snr> = rows.iter().map(|r| Snr(r.snr_db)).collect();
    let trials: BTreeSet<usize> = rows.iter().map(|r| r.trial).collect();

    let mut cells: BTreeMap<(Scheme, usize, Snr), BTreeMap<usize, f64>> = BTreeMap::new();
    let mut problems = Vec::new();
    for r in rows {
        let cell = cells.entry((r.scheme, r.m, Snr(r.snr_db))).or_default();
        if cell.insert(r.trial, r.rate_bits).is_some() {
            problems.push(format!(
                "duplicate scheme={} M={} snr_db={} trial={}",
                r.scheme, r.m, r.snr_db, r.trial
            ));
        }
    }

    let mut out = Vec::new();
    for &scheme in &schemes {
        for &m in &ms {
            for &snr in &snrs {
                let empty = BTreeMap::new();
                let cell = cells.get(&(scheme, m, snr)).unwrap_or(&empty);
                for t in &trials {
                    if !cell.contains_key(t) {
                        problems.push(format!("scheme={scheme} M={m} snr_db={} trial={t}", snr.0));
                    }
                }
                if cell.len() == trials.len() {
                    let (mean_rate, stderr) = mean_stderr(cell.values().copied());
                    out.push(PlotPoint {
                        scheme,
                        m,
                        snr_db: snr.0,
                        mean_rate,
                        stderr,
                        count: cell.len(),
                    });
                }
            }
        }
    }
    if problems.is_empty() {
        Ok(out)
    } else {
        Err(Error::IncompleteRows(problems))
    }
}

fn mean_stderr(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count();
    let mean = xs.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Writes curve points with six fixed decimals.
pub fn write_plotdata_csv<W: Write>(points: &[PlotPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scheme", "M", "snr_db", "mean_rate", "stderr", "count"])?;
    for p in points {
        w.write_record([
            p.scheme.as_str().to_string(),
            p.m.to_string(),
            fmt_fixed6(p.snr_db),
            fmt_fixed6(p.mean_rate),
            fmt_fixed6(p.stderr),
            p.count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

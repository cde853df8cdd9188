//! Seeded Monte-Carlo experiments and their CSV output.
//!
//! A single JSON document ([`SweepConfig`]) drives every experiment. Each
//! unit of work draws from its own random stream, derived from the master
//! seed and the unit's coordinates, so results are independent of thread
//! count and execution order.

mod config;
mod convergence;
mod plotdata;
mod sweep;

pub use config::{ConvergenceSettings, Scheme, SweepConfig};
pub use convergence::{run_convergence, write_convergence_csv, ConvergencePoint};
pub use plotdata::{emit_plotdata, write_plotdata_csv, PlotPoint};
pub use sweep::{instance, run_sweep, write_sweep_csv, SweepRow};

use crate::rng::derive_seed;

const TAG_CHANNEL: u64 = 1;
const TAG_CHANNEL_NO_RIS: u64 = 2;
const TAG_ALGORITHM: u64 = 3;
const TAG_CONVERGENCE: u64 = 4;

/// Seed of the realization shared by every surface-assisted scheme at one point.
pub fn channel_seed(master: u64, m: usize, snr_db: f64, trial: usize) -> u64 {
    derive_seed(master, &[TAG_CHANNEL, m as u64, snr_db.to_bits(), trial as u64])
}

/// Seed of the Rayleigh-IRI realization used by the no-surface baseline.
pub fn no_ris_channel_seed(master: u64, m: usize, snr_db: f64, trial: usize) -> u64 {
    derive_seed(master, &[TAG_CHANNEL_NO_RIS, m as u64, snr_db.to_bits(), trial as u64])
}

/// Seed of a randomized scheme's own stream (initial point, swarm, randomization).
pub fn algorithm_seed(master: u64, scheme: Scheme, m: usize, snr_db: f64, trial: usize) -> u64 {
    derive_seed(
        master,
        &[TAG_ALGORITHM, scheme.key(), m as u64, snr_db.to_bits(), trial as u64],
    )
}

/// Swarm seed for convergence traces; shared across `mu` values so the
/// step-size comparison starts from identical populations.
pub fn convergence_seed(master: u64, m: usize, trial: usize) -> u64 {
    derive_seed(master, &[TAG_CONVERGENCE, m as u64, trial as u64])
}

/// Six significant digits, printed in the shortest form that round-trips.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    rounded.to_string()
}

/// Fixed six decimal places.
pub fn fmt_fixed6(x: f64) -> String {
    format!("{x:.6}")
}

//! Simulation of a two-relay successive decode-and-forward link assisted by
//! two reconfigurable intelligent surfaces.
//!
//! The crate draws Rician/Rayleigh channel realizations for a fixed planar
//! geometry, evaluates the relay and destination SINRs for a phase
//! configuration, and designs the phases in two ways: a semidefinite
//! relaxation solved by successive linearization (an upper bound with a
//! randomized feasible extraction) and a ring-topology particle swarm.
//! Exhaustive grid search and two comparison schemes serve as references, and
//! [`experiment`] runs seeded Monte-Carlo sweeps that emit CSV.

pub mod channel;
pub mod error;
pub mod experiment;
pub mod hermitian;
pub mod oracle;
pub mod pso;
pub mod rng;
pub mod scenario;
pub mod sdp;
pub mod sinr;

pub use channel::{sample_realization, ChannelRealization};
pub use error::{Error, Result};
pub use experiment::{Scheme, SweepConfig, SweepRow};
pub use pso::{run_pso, PsoOutcome, PsoParams};
pub use scenario::{Fading, Node, Powers, Scenario};
pub use sdp::{relaxation_bound, solve_sdp, SdpParams, SdpResult, UpperBound};
pub use sinr::{effective_rate, PhaseVector, SinrEvaluator};

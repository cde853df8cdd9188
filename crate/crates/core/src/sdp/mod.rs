//! Successive-linearization SDP relaxation of the max-min rate problem.
//!
//! The lifted variable `V = v* vᵀ` is relaxed to any unit-diagonal PSD
//! matrix, the two SINRs are rewritten with exponential slack variables, and
//! the two non-convex slack constraints are replaced by first-order Taylor
//! bounds around `ū`. Solving the resulting convex problem and moving `ū` to
//! the new `u` until `Σ|u − ū| < ε` yields the relaxation value, an upper
//! bound on the achievable rate. Each inner solve costs `O((2M+1)^3.5)`.
//!
//! A feasible phase vector is recovered afterwards by eigen-decomposition
//! and Gaussian randomization ([`extract_rank_one`]).

mod barrier;
mod extract;

use std::f64::consts::{LN_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use barrier::{solve_inner, BarrierSettings, InnerSolution};
pub use extract::{extract_rank_one, Extraction};

use crate::error::{Error, Result};
use crate::hermitian::{trace_product, CMatrix};
use crate::scenario::Powers;
use crate::sinr::{effective_rate, sinr_trace_form, PhaseVector, QuadraticForms, Receiver};

/// Tunables of the outer successive-linearization loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SdpParams {
    /// Stop once `Σ_i |u_i − ū_i| < epsilon`.
    pub epsilon: f64,
    pub max_outer: usize,
    pub newton_tol: f64,
    pub gap_tol: f64,
    pub num_randomizations: usize,
    /// Cap on the per-coordinate secant extrapolation of the `ū` update;
    /// `1` gives the plain `ū := u` step.
    pub max_extrapolation: f64,
}

impl Default for SdpParams {
    fn default() -> Self {
        SdpParams {
            epsilon: 1e-6,
            max_outer: 100,
            newton_tol: 1e-8,
            gap_tol: 1e-7,
            num_randomizations: 500,
            max_extrapolation: 10.0,
        }
    }
}

impl SdpParams {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        let path = |f: &str| format!("{prefix}.{f}");
        if !(self.epsilon > 0.0) {
            return Err(Error::config(path("epsilon"), "must be positive"));
        }
        if self.max_outer == 0 {
            return Err(Error::config(path("max_outer"), "must be at least 1"));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::config(path("newton_tol"), "must be positive"));
        }
        if !(self.gap_tol > 0.0) {
            return Err(Error::config(path("gap_tol"), "must be positive"));
        }
        if !(self.max_extrapolation >= 1.0 && self.max_extrapolation.is_finite()) {
            return Err(Error::config(path("max_extrapolation"), "must be at least 1"));
        }
        Ok(())
    }

    pub fn barrier(&self) -> BarrierSettings {
        BarrierSettings {
            newton_tol: self.newton_tol,
            gap_tol: self.gap_tol,
            ..BarrierSettings::default()
        }
    }
}

/// Iterate of the outer loop.
#[derive(Debug, Clone)]
pub struct SdpState {
    pub v: CMatrix,
    pub s: [f64; 2],
    pub u: [f64; 2],
    /// Linearization point used to produce this iterate.
    pub u_bar: [f64; 2],
    pub k: usize,
    /// `Σ_i |u_i − ū_i|`.
    pub err: f64,
    /// Subproblem objective `min_i (s_i − u_i)` in nats.
    pub objective: f64,
    /// Optimality gap of the subproblem solve, in nats.
    pub inner_gap: f64,
    /// Relaxed max-min value `min_i ln(1 + γ_i(V))` in nats; never below `objective`.
    pub value: f64,
}

/// Output of the outer loop, before any rank-one extraction.
#[derive(Debug, Clone)]
pub struct UpperBound {
    pub v: CMatrix,
    /// `log2(1 + min_i γ_i(V*))` with the trace-form SINRs.
    pub upper_bound_rate: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Number of times the damping guard rejected an update.
    pub damping_events: usize,
    /// Accepted iterates in order.
    pub history: Vec<SdpState>,
}

impl UpperBound {
    /// Accepted subproblem objectives converted to bits.
    pub fn objective_bits(&self) -> Vec<f64> {
        self.history.iter().map(|s| s.objective / LN_2).collect()
    }
}

/// Initial linearization point from a feasible `Ṽ`:
/// `ū = (ln(p_r2 tr(Ṽ Q_r2r1) + σ²), ln(p_s tr(Ṽ Q_sd) + σ²))`.
pub fn init_linearization(qf: &QuadraticForms, v_tilde: &CMatrix, pw: Powers) -> [f64; 2] {
    let d1 = pw.relay * trace_product(v_tilde, &qf.big_q_r2r1).re.max(0.0) + pw.noise;
    let d2 = pw.source * trace_product(v_tilde, &qf.big_q_sd).re.max(0.0) + pw.noise;
    assert!(d1 > 0.0 && d2 > 0.0, "noise variance must be positive");
    [d1.ln(), d2.ln()]
}

/// Relaxed min-SINR of a matrix iterate.
pub fn relaxed_min_sinr(qf: &QuadraticForms, v: &CMatrix, pw: Powers) -> Result<f64> {
    let a = sinr_trace_form(qf, v, Receiver::R1, pw)?;
    let b = sinr_trace_form(qf, v, Receiver::D, pw)?;
    Ok(a.min(b))
}

/// An update that lowers the subproblem objective is first retried as a plain step,
/// then with half the step; this caps the halvings.
const MAX_DAMPING_HALVINGS: usize = 8;
const DECREASE_SLACK: f64 = 1e-6;

/// Runs the outer loop from a random feasible starting point.
///
/// Returns the last accepted iterate, or the best one with `converged`
/// false when `max_outer` subproblems were solved without meeting `epsilon`.
///
/// Along flat ridges the plain update `ū := u` creeps in tiny steps, so when
/// two accepted iterates are available each coordinate of the step is
/// stretched by the secant estimate `1 / (1 − slope)` of the distance to the
/// fixed point, capped at `max_extrapolation`.
pub fn relaxation_bound<R: Rng + ?Sized>(
    qf: &QuadraticForms,
    pw: Powers,
    params: &SdpParams,
    rng: &mut R,
) -> Result<UpperBound> {
    let dim = qf.dim() - 1;
    let theta0 = PhaseVector::new((0..dim).map(|_| rng.random_range(-PI..PI)).collect())?;
    let v_tilde = theta0.lifted_matrix();
    let u_bar0 = init_linearization(qf, &v_tilde, pw);
    run_from(qf, pw, params, u_bar0)
}

/// Outer loop from a given initial linearization point.
pub fn run_from(
    qf: &QuadraticForms,
    pw: Powers,
    params: &SdpParams,
    u_bar0: [f64; 2],
) -> Result<UpperBound> {
    let settings = params.barrier();
    let mut history: Vec<SdpState> = Vec::new();
    let mut damping_events = 0;
    let mut u_bar = u_bar0;
    // Linearization point of the last accepted iterate.
    let mut anchor = u_bar0;
    let mut plain_step = u_bar0;
    let mut extrapolated = false;
    let mut halvings = 0;
    let mut converged = false;
    let mut solves = 0;

    while solves < params.max_outer {
        let attempt = solve_inner(qf, u_bar, pw, &settings, None);
        solves += 1;
        let sol = match attempt {
            Ok(sol) => sol,
            Err(_) if extrapolated => {
                extrapolated = false;
                u_bar = plain_step;
                continue;
            }
            Err(e) => return Err(e),
        };
        let err = (sol.u[0] - u_bar[0]).abs() + (sol.u[1] - u_bar[1]).abs();

        let value = (0..2)
            .map(|i| sol.s[i] - (sol.u[i] - u_bar[i] + 1.0).ln() - u_bar[i])
            .fold(f64::INFINITY, f64::min);
        if let Some(prev) = history.last() {
            if sol.objective < prev.objective - DECREASE_SLACK {
                if extrapolated {
                    extrapolated = false;
                    u_bar = plain_step;
                    continue;
                }
                if halvings < MAX_DAMPING_HALVINGS {
                    damping_events += 1;
                    halvings += 1;
                    u_bar = [0, 1].map(|i| anchor[i] + 0.5 * (u_bar[i] - anchor[i]));
                    continue;
                }
            }
        }
        halvings = 0;
        let prev = history.last().map(|p| (p.u_bar, p.u));
        history.push(SdpState {
            v: sol.v,
            s: sol.s,
            u: sol.u,
            u_bar,
            k: history.len() + 1,
            err,
            objective: sol.objective,
            inner_gap: sol.gap,
            value,
        });
        if err < params.epsilon {
            converged = true;
            break;
        }
        anchor = u_bar;
        plain_step = sol.u;
        let omega = match prev {
            Some((pb, pu)) if params.max_extrapolation > 1.0 => [0, 1].map(|i| {
                let d = u_bar[i] - pb[i];
                let slope = if d.abs() > 1e-12 { (sol.u[i] - pu[i]) / d } else { 0.0 };
                if (0.0..1.0).contains(&slope) {
                    (1.0 / (1.0 - slope)).min(params.max_extrapolation)
                } else {
                    1.0
                }
            }),
            _ => [1.0, 1.0],
        };
        extrapolated = omega.iter().any(|&w| w > 1.0);
        // Every fixed point ln(B_i + σ²) lies above the noise floor.
        let floor = pw.noise.ln();
        u_bar = [0, 1].map(|i| {
            let x = u_bar[i] + omega[i] * (sol.u[i] - u_bar[i]);
            if omega[i] > 1.0 {
                x.max(floor)
            } else {
                x
            }
        });
    }

    // Without convergence, report the best accepted iterate.
    let chosen = if converged {
        history.last()
    } else {
        history.iter().max_by(|a, b| a.objective.total_cmp(&b.objective))
    }
    .expect("at least one subproblem is solved when max_outer >= 1");
    let upper_bound_rate = {
        let g = relaxed_min_sinr(qf, &chosen.v, pw)?;
        effective_rate(g, g)
    };
    Ok(UpperBound {
        v: chosen.v.clone(),
        upper_bound_rate,
        iterations: history.len(),
        converged,
        damping_events,
        history,
    })
}

/// Upper bound plus a feasible phase design.
#[derive(Debug, Clone)]
pub struct SdpResult {
    pub upper_bound_rate: f64,
    pub theta_feasible: PhaseVector,
    pub feasible_rate: f64,
    pub iterations: usize,
    /// `feasible_rate / upper_bound_rate`.
    pub rank_gap: f64,
    pub converged: bool,
    pub damping_events: usize,
}

/// Upper bound followed by rank-one extraction.
pub fn solve_sdp<R: Rng + ?Sized>(
    qf: &QuadraticForms,
    pw: Powers,
    params: &SdpParams,
    rng: &mut R,
) -> Result<SdpResult> {
    let ub = relaxation_bound(qf, pw, params, rng)?;
    let ex = extract_rank_one(&ub.v, qf, pw, params.num_randomizations, rng);
    let rank_gap = if ub.upper_bound_rate > 0.0 {
        ex.rate / ub.upper_bound_rate
    } else {
        1.0
    };
    Ok(SdpResult {
        upper_bound_rate: ub.upper_bound_rate,
        theta_feasible: ex.theta,
        feasible_rate: ex.rate,
        iterations: ub.iterations,
        rank_gap,
        converged: ub.converged,
        damping_events: ub.damping_events,
    })
}

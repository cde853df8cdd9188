//! Particle swarm phase design.
//!
//! Particles are rows of an `N x 2M` phase matrix. Each iteration evaluates
//! the min-SINR fitness, takes local bests over a ring (the two neighbours
//! only, not the particle itself) and the global best of the current
//! population, updates velocities, rescales every velocity column so its
//! largest magnitude is `mu`, moves the particles and folds phases back into
//! `[-π, π]`. The best particle seen over all iterations is returned.
//!
//! Per-iteration cost is `O(2MN)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::scenario::Powers;
use crate::sinr::{rate_from_sinr, PhaseVector, SinrEvaluator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoParams {
    /// Number of particles `N`.
    #[serde(alias = "n")]
    pub population: usize,
    /// Number of update iterations `T`.
    #[serde(alias = "t")]
    pub iterations: usize,
    /// Largest per-element phase change per iteration.
    pub mu: f64,
    pub w1: f64,
    pub w2: f64,
    pub seed: u64,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams {
            population: 100,
            iterations: 200,
            mu: PI / 8.0,
            w1: 2.0,
            w2: 2.0,
            seed: 0,
        }
    }
}

impl PsoParams {
    pub fn validate(&self, prefix: &str) -> Result<()> {
        let path = |f: &str| format!("{prefix}.{f}");
        if self.population < 3 {
            return Err(Error::config(path("population"), "ring topology needs at least 3 particles"));
        }
        if self.iterations < 1 {
            return Err(Error::config(path("iterations"), "must be at least 1"));
        }
        if !(self.mu > 0.0 && self.mu <= PI) {
            return Err(Error::config(path("mu"), "must lie in (0, π]"));
        }
        if !(self.w1 >= 0.0 && self.w1.is_finite()) {
            return Err(Error::config(path("w1"), "must be non-negative"));
        }
        if !(self.w2 >= 0.0 && self.w2.is_finite()) {
            return Err(Error::config(path("w2"), "must be non-negative"));
        }
        Ok(())
    }
}

/// Swarm state; rows of `positions` and `velocities` are particles.
#[derive(Debug, Clone)]
pub struct PsoState {
    pub positions: DMatrix<f64>,
    pub velocities: DMatrix<f64>,
    /// Linear min-SINR of every particle; empty until evaluated.
    pub fitness: Vec<f64>,
    pub best_particle: Vec<f64>,
    pub best_fitness: f64,
    pub t: usize,
}

pub fn init_population<R: Rng + ?Sized>(params: &PsoParams, dim: usize, rng: &mut R) -> PsoState {
    let n = params.population;
    let positions = DMatrix::from_fn(n, dim, |_, _| rng.random_range(-PI..=PI));
    PsoState {
        positions,
        velocities: DMatrix::zeros(n, dim),
        fitness: Vec::new(),
        best_particle: vec![0.0; dim],
        best_fitness: f64::NEG_INFINITY,
        t: 0,
    }
}

/// Fitness `min(γ_r1, γ_d)` of every particle. Also refreshes the best-so-far.
pub fn evaluate_fitness(state: &mut PsoState, ev: &SinrEvaluator) -> Vec<f64> {
    let (n, dim) = state.positions.shape();
    let mut row = vec![0.0; dim];
    let mut fitness = Vec::with_capacity(n);
    for p in 0..n {
        for (m, r) in row.iter_mut().enumerate() {
            *r = state.positions[(p, m)];
        }
        let f = ev.min_sinr(&row);
        if f > state.best_fitness {
            state.best_fitness = f;
            state.best_particle.copy_from_slice(&row);
        }
        fitness.push(f);
    }
    state.fitness = fitness.clone();
    fitness
}

/// First index of the largest value.
fn argmax(values: impl IntoIterator<Item = (usize, f64)>) -> usize {
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for (i, v) in values {
        if v > best.1 || (v == best.1 && i < best.0) || best.0 == usize::MAX {
            best = (i, v);
        }
    }
    best.0
}

/// Local-best matrix `L` (ring neighbours `n-1`, `n+1`) and the global best particle.
pub fn find_bests(state: &PsoState) -> (DMatrix<f64>, Vec<f64>) {
    let (n, dim) = state.positions.shape();
    assert_eq!(state.fitness.len(), n, "fitness must be evaluated first");
    let fit = &state.fitness;
    let global = argmax(fit.iter().copied().enumerate());
    let mut local = DMatrix::zeros(n, dim);
    for p in 0..n {
        let prev = (p + n - 1) % n;
        let next = (p + 1) % n;
        let pick = argmax([(prev, fit[prev]), (next, fit[next])]);
        local.set_row(p, &state.positions.row(pick));
    }
    let f_max = state.positions.row(global).iter().copied().collect();
    (local, f_max)
}

/// Raw velocity update; `r1`, `r2` are drawn independently for every entry.
pub fn update_velocities<R: Rng + ?Sized>(
    state: &PsoState,
    local: &DMatrix<f64>,
    f_max: &[f64],
    w1: f64,
    w2: f64,
    rng: &mut R,
) -> DMatrix<f64> {
    let (n, dim) = state.positions.shape();
    let f = &state.positions;
    let mut x = state.velocities.clone();
    for p in 0..n {
        for m in 0..dim {
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            x[(p, m)] += w1 * r1 * (local[(p, m)] - f[(p, m)]) + w2 * r2 * (f_max[m] - f[(p, m)]);
        }
    }
    x
}

/// Scales each column so its largest magnitude is `mu`. All-zero columns stay zero.
pub fn normalize_velocities(mut x: DMatrix<f64>, mu: f64) -> DMatrix<f64> {
    for mut col in x.column_iter_mut() {
        let peak = col.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if peak > 0.0 {
            for v in col.iter_mut() {
                *v = mu * (*v / peak);
            }
        }
    }
    x
}

/// `F + X`, folded back into `[-π, π]` by a single `±2π` correction.
pub fn step_positions(f: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    f.zip_map(x, |a, b| {
        let mut y = a + b;
        if y < -PI {
            y += 2.0 * PI;
        } else if y > PI {
            y -= 2.0 * PI;
        }
        // Rounding in the correction can land one ulp outside.
        y.clamp(-PI, PI)
    })
}

#[derive(Debug, Clone)]
pub struct PsoOutcome {
    pub theta: PhaseVector,
    pub rate: f64,
    pub best_fitness: f64,
    /// Best-so-far fitness after evaluating iteration `t`, for `t = 0..=T`.
    pub trace: Vec<f64>,
    /// Phases outside `[-π, π]` or velocities above `mu`, summed over all iterations.
    pub bound_violations: usize,
}

impl PsoOutcome {
    /// The best-so-far trace as rates.
    pub fn rate_trace(&self) -> Vec<f64> {
        self.trace.iter().map(|&g| rate_from_sinr(g)).collect()
    }
}

/// Runs the swarm on a prepared evaluator with an explicit random stream.
pub fn run_pso_with<R: Rng + ?Sized>(ev: &SinrEvaluator, params: &PsoParams, rng: &mut R) -> PsoOutcome {
    let mut state = init_population(params, ev.dim(), rng);
    let mut trace = Vec::with_capacity(params.iterations + 1);
    let mut violations = 0usize;
    for t in 0..=params.iterations {
        state.t = t;
        evaluate_fitness(&mut state, ev);
        trace.push(state.best_fitness);
        if t == params.iterations {
            break;
        }
        let (local, f_max) = find_bests(&state);
        let raw = update_velocities(&state, &local, &f_max, params.w1, params.w2, rng);
        let x = normalize_velocities(raw, params.mu);
        violations += x.iter().filter(|v| v.abs() > params.mu).count();
        let f = step_positions(&state.positions, &x);
        violations += f.iter().filter(|p| !(-PI..=PI).contains(*p)).count();
        state.positions = f;
        state.velocities = x;
    }
    PsoOutcome {
        theta: PhaseVector::wrapped(state.best_particle.iter().copied()),
        rate: rate_from_sinr(state.best_fitness),
        best_fitness: state.best_fitness,
        trace,
        bound_violations: violations,
    }
}

/// Runs the swarm for one realization, seeded from `params.seed`.
pub fn run_pso(real: &ChannelRealization, pw: Powers, params: &PsoParams) -> PsoOutcome {
    let ev = SinrEvaluator::new(real, pw);
    run_pso_with(&ev, params, &mut rng_from_seed(params.seed))
}

//! Path-following log-det barrier solver for one linearized subproblem.
//!
//! With the slack variables eliminated the subproblem reads
//!
//! ```text
//! maximize  min_i g_i(V)
//! s.t.      V ⪰ 0,  diag(V) = 1,
//! g_i(V) = ln(A_i(V) + σ²) − ū_i + 1 − (B_i(V) + σ²) e^{−ū_i}
//! ```
//!
//! where `A_i`, `B_i` are the useful-plus-interference and interference-only
//! trace terms of receiver `i`. We add an epigraph variable `t` and minimize
//! `−τ t − Σ ln(g_i − t) − ln det V` for increasing `τ`.
//!
//! Every `A_i`, `B_i` is a combination of the four rank-one `Q_k = q_k q_kᴴ`,
//! so gradients and Hessian corrections live in `span{Q_k}` and
//! `V Q_k V = w_k w_kᴴ` with `w_k = V q_k`. Eliminating the matrix step
//! leaves a dense real system of size `n + 5` (four low-rank coordinates, the
//! epigraph step and one multiplier per diagonal constraint), and no inverse
//! of `V` is ever formed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::CVector;
use crate::error::{Error, Result};
use crate::hermitian::{cholesky_lower, eigh, log_det_from_cholesky, outer, symmetrize, CMatrix};
use crate::scenario::Powers;
use crate::sinr::QuadraticForms;

/// Coefficients over the basis `[Q_sr1, Q_r2r1, Q_r2d, Q_sd]`.
type Coef = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSettings {
    /// Centering stops once `λ²/2` falls below this.
    pub newton_tol: f64,
    /// Barrier loop stops once the duality-gap proxy `(n + 2)/τ` falls below this.
    pub gap_tol: f64,
    pub tau0: f64,
    pub growth: f64,
    pub max_newton_per_centering: usize,
    /// Largest certified gap at which a stalled centering is accepted.
    pub stall_gap: f64,
}

impl Default for BarrierSettings {
    fn default() -> Self {
        BarrierSettings {
            newton_tol: 1e-8,
            gap_tol: 1e-7,
            tau0: 1.0,
            growth: 10.0,
            max_newton_per_centering: 200,
            stall_gap: 1e-4,
        }
    }
}

/// Solution of one linearized subproblem.
#[derive(Debug, Clone)]
pub struct InnerSolution {
    pub v: CMatrix,
    /// `s_i = ln(A_i(V) + σ²)`.
    pub s: [f64; 2],
    /// `u_i = ū_i − 1 + (B_i(V) + σ²) e^{−ū_i}`, the tightest value allowed by the linearization.
    pub u: [f64; 2],
    /// `min_i (s_i − u_i)` in nats.
    pub objective: f64,
    pub newton_steps: usize,
    /// Optimality gap certified by the last completed centering, in nats.
    pub gap: f64,
}

struct Problem<'a> {
    q: [&'a CVector; 4],
    a_bar: [Coef; 2],
    b_bar: [Coef; 2],
    c: [f64; 2],
    u_bar: [f64; 2],
    noise: f64,
    n: usize,
}

fn dot(a: &Coef, b: &Coef) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(acc: &mut Coef, alpha: f64, x: &Coef) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += alpha * b;
    }
}

/// Cached evaluation at one iterate.
struct Point {
    /// `w_k = V q_k`.
    w: [CVector; 4],
    /// `ℓ_k = q_kᴴ V q_k`.
    ell: Coef,
    /// `S_jl = |q_jᴴ V q_l|²`.
    s_mat: [[f64; 4]; 4],
}

impl<'a> Problem<'a> {
    fn new(qf: &'a QuadraticForms, u_bar: [f64; 2], pw: Powers) -> Self {
        let (ps, pr) = (pw.source, pw.relay);
        Problem {
            q: qf.vectors(),
            a_bar: [[ps, pr, 0.0, 0.0], [0.0, 0.0, pr, ps]],
            b_bar: [[0.0, pr, 0.0, 0.0], [0.0, 0.0, 0.0, ps]],
            c: [(-u_bar[0]).exp(), (-u_bar[1]).exp()],
            u_bar,
            noise: pw.noise,
            n: qf.dim(),
        }
    }

    fn ell(&self, v: &CMatrix) -> Coef {
        let mut out = [0.0; 4];
        for (k, q) in self.q.iter().enumerate() {
            out[k] = q.dotc(&(v * *q)).re;
        }
        out
    }

    fn point(&self, v: &CMatrix) -> Point {
        let w: [CVector; 4] = std::array::from_fn(|k| v * self.q[k]);
        let mut s_mat = [[0.0; 4]; 4];
        let mut ell = [0.0; 4];
        for j in 0..4 {
            for l in 0..4 {
                let kjl = self.q[j].dotc(&w[l]);
                s_mat[j][l] = kjl.norm_sqr();
                if j == l {
                    ell[j] = kjl.re;
                }
            }
        }
        Point { w, ell, s_mat }
    }

    /// `(a_i, b_i) = (A_i + σ², B_i + σ²)`.
    fn ab(&self, ell: &Coef) -> ([f64; 2], [f64; 2]) {
        let a = [0, 1].map(|i| dot(&self.a_bar[i], ell).max(0.0) + self.noise);
        let b = [0, 1].map(|i| dot(&self.b_bar[i], ell).max(0.0) + self.noise);
        (a, b)
    }

    fn g(&self, ell: &Coef) -> [f64; 2] {
        let (a, b) = self.ab(ell);
        [0, 1].map(|i| a[i].ln() - self.u_bar[i] + 1.0 - b[i] * self.c[i])
    }

    fn solution(&self, v: CMatrix, newton_steps: usize, gap: f64) -> InnerSolution {
        let ell = self.ell(&v);
        let (a, b) = self.ab(&ell);
        let s = [a[0].ln(), a[1].ln()];
        let u = [0, 1].map(|i| self.u_bar[i] - 1.0 + b[i] * self.c[i]);
        InnerSolution {
            v,
            s,
            u,
            objective: (s[0] - u[0]).min(s[1] - u[1]),
            newton_steps,
            gap,
        }
    }
}

struct NewtonStep {
    delta: CMatrix,
    dt: f64,
    /// Squared Newton decrement.
    lambda2: f64,
}

fn newton_step(pb: &Problem, v: &CMatrix, chol: &CMatrix, t: f64, tau: f64) -> Option<NewtonStep> {
    let n = pb.n;
    let pt = pb.point(v);
    let (a, _) = pb.ab(&pt.ell);
    let g = pb.g(&pt.ell);
    let s = [g[0] - t, g[1] - t];
    if !(s[0] > 0.0 && s[1] > 0.0) {
        return None;
    }

    // Gradient directions of g_i and of the useful-plus-interference terms.
    let grad: [Coef; 2] = std::array::from_fn(|i| {
        let mut c = [0.0; 4];
        axpy(&mut c, 1.0 / a[i], &pb.a_bar[i]);
        axpy(&mut c, -pb.c[i], &pb.b_bar[i]);
        c
    });
    let abar = pb.a_bar;

    // Δ = V + V X V − V diag(y) V, with X = Σ_l β_l Q_l affine in the unknowns
    //   β = Σ_i grad_i (1/s_i − η_i/s_i²) − Σ_i abar_i κ_i / (s_i a_i²).
    // Unknowns z = [η_0, η_1, κ_0, κ_1, δt, y_0 .. y_{n-1}].
    let dim = n + 5;
    let mut lhs = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = DVector::<f64>::zeros(dim);

    // β = beta0 + Σ_u z_u beta_col[u] for the first four unknowns.
    let mut beta0 = [0.0; 4];
    for i in 0..2 {
        axpy(&mut beta0, 1.0 / s[i], &grad[i]);
    }
    let mut beta_col = [[0.0; 4]; 4];
    for i in 0..2 {
        axpy(&mut beta_col[i], -1.0 / (s[i] * s[i]), &grad[i]);
        axpy(&mut beta_col[2 + i], -1.0 / (s[i] * a[i] * a[i]), &abar[i]);
    }

    // ⟨P, V X V⟩ = pᵀ S x,  ⟨P, V⟩ = pᵀ ℓ,  ⟨P, V E_kk V⟩ = Σ_j p_j |w_j[k]|².
    let quad = |p: &Coef, x: &Coef| -> f64 {
        let mut acc = 0.0;
        for j in 0..4 {
            for l in 0..4 {
                acc += p[j] * pt.s_mat[j][l] * x[l];
            }
        }
        acc
    };
    let wabs: Vec<[f64; 4]> = (0..n)
        .map(|k| std::array::from_fn(|l| pt.w[l][k].norm_sqr()))
        .collect();

    // Rows 0..4: ⟨P_r, Δ⟩ − (δt if r < 2) − z_r = 0, with P = grad_0, grad_1, abar_0, abar_1.
    let rows: [&Coef; 4] = [&grad[0], &grad[1], &abar[0], &abar[1]];
    for (r, p) in rows.iter().enumerate() {
        rhs[r] = -(dot(p, &pt.ell) + quad(p, &beta0));
        for u in 0..4 {
            lhs[(r, u)] = quad(p, &beta_col[u]);
        }
        lhs[(r, r)] -= 1.0;
        if r < 2 {
            lhs[(r, 4)] = -1.0;
        }
        for k in 0..n {
            lhs[(r, 5 + k)] = -(0..4).map(|j| p[j] * wabs[k][j]).sum::<f64>();
        }
    }
    // Row 4: −Σ η_i / s_i² = τ − Σ 1/s_i.
    lhs[(4, 0)] = -1.0 / (s[0] * s[0]);
    lhs[(4, 1)] = -1.0 / (s[1] * s[1]);
    rhs[4] = tau - 1.0 / s[0] - 1.0 / s[1];
    // Rows 5..: diag(Δ) = 0.
    for k in 0..n {
        let wk = &wabs[k];
        let row = 5 + k;
        rhs[row] = -(1.0 + (0..4).map(|l| beta0[l] * wk[l]).sum::<f64>());
        for u in 0..4 {
            lhs[(row, u)] = (0..4).map(|l| beta_col[u][l] * wk[l]).sum();
        }
        for m in 0..n {
            lhs[(row, 5 + m)] = -v[(k, m)].norm_sqr();
        }
    }

    let z = solve_equilibrated(lhs, rhs)?;
    if z.iter().any(|x| !x.is_finite()) {
        return None;
    }

    let mut beta = beta0;
    for u in 0..4 {
        axpy(&mut beta, z[u], &beta_col[u]);
    }
    let y: Vec<f64> = (0..n).map(|k| z[5 + k]).collect();
    let dt = z[4];

    // Assemble in the frame where V = L Lᴴ is the identity,
    //   Δ = L M Lᴴ,  M = I + Σ_l β_l q̃_l q̃_lᴴ − Lᴴ diag(y) L,  q̃_l = Lᴴ q_l.
    // Forming V diag(y) V directly loses the small eigen-directions of V to
    // cancellation once the barrier weight is large.
    let lh = chol.adjoint();
    let mut dl = chol.clone();
    for (k, &yk) in y.iter().enumerate() {
        dl.row_mut(k).scale_mut(yk);
    }
    let mut mw = CMatrix::identity(n, n) - &lh * dl;
    for l in 0..4 {
        if beta[l] != 0.0 {
            let qt = &lh * pb.q[l];
            mw.ger(Complex64::new(beta[l], 0.0), &qt, &qt.conjugate(), Complex64::new(1.0, 0.0));
        }
    }
    symmetrize(&mut mw);
    let mut delta = chol * &mw * &lh;
    symmetrize(&mut delta);
    for k in 0..n {
        delta[(k, k)] = Complex64::new(0.0, 0.0);
    }

    // λ² = dᵀ∇²φ d as a sum of non-negative terms:
    //   Σ η_i²/s_i² + Σ κ_i²/(s_i a_i²) + tr((V⁻¹Δ)²),  tr((V⁻¹Δ)²) = ‖M‖_F².
    let lambda2 = (0..2)
        .map(|i| z[i] * z[i] / (s[i] * s[i]) + z[2 + i] * z[2 + i] / (s[i] * a[i] * a[i]))
        .sum::<f64>()
        + mw.norm_squared();

    Some(NewtonStep {
        delta,
        dt,
        lambda2: lambda2.abs(),
    })
}

/// LU solve after row and column max-norm scaling; the unknowns mix slack
/// changes of order `1/τ` with multipliers of order `τ`.
fn solve_equilibrated(mut lhs: DMatrix<f64>, mut rhs: DVector<f64>) -> Option<DVector<f64>> {
    let dim = rhs.len();
    for i in 0..dim {
        let m = lhs.row(i).amax();
        if m > 0.0 {
            lhs.row_mut(i).scale_mut(1.0 / m);
            rhs[i] /= m;
        }
    }
    let mut col_scale = vec![1.0; dim];
    for (j, c) in col_scale.iter_mut().enumerate() {
        let m = lhs.column(j).amax();
        if m > 0.0 {
            *c = 1.0 / m;
            lhs.column_mut(j).scale_mut(*c);
        }
    }
    let mut z = lhs.lu().solve(&rhs)?;
    for (zj, c) in z.iter_mut().zip(&col_scale) {
        *zj *= c;
    }
    Some(z)
}

const ARMIJO: f64 = 0.25;
const MIN_STEP: f64 = 1e-10;
const ROUNDOFF_NEWTON_TOL: f64 = 1e-3;
/// Repeated accepted steps this short mean the direction is dominated by roundoff.
const TINY_STEP: f64 = 1e-3;
/// A stalled centering is retried from the previous center with `τ` grown by
/// the square root of the failed factor, down to this factor.
const MIN_RETRY_GROWTH: f64 = 1.2;

/// Solves the linearized subproblem around `u_bar`, starting from `start`
/// (a strictly feasible unit-diagonal matrix; the identity when `None`).
///
/// Near a rank-one optimum the barrier Hessian becomes too ill-conditioned
/// for double precision well before `gap_tol` is reached on some instances.
/// Once the completed centerings, or the Newton decrement at the stalled
/// iterate, certify a gap below [`BarrierSettings::stall_gap`], a stalled
/// centering ends the solve with the best iterate found instead of an error.
pub fn solve_inner(
    qf: &QuadraticForms,
    u_bar: [f64; 2],
    pw: Powers,
    settings: &BarrierSettings,
    start: Option<&CMatrix>,
) -> Result<InnerSolution> {
    if !(u_bar[0].is_finite() && u_bar[1].is_finite()) {
        return Err(Error::Domain(format!("linearization point {u_bar:?} not finite")));
    }
    let pb = Problem::new(qf, u_bar, pw);
    let n = pb.n;
    let mut v = start.cloned().unwrap_or_else(|| CMatrix::identity(n, n));
    let mut chol = cholesky_lower(&v)
        .ok_or_else(|| Error::Domain("starting point is not positive definite".into()))?;
    let mut log_det = log_det_from_cholesky(&chol);
    let min_g = |ell: &Coef| {
        let g = pb.g(ell);
        g[0].min(g[1])
    };
    let mut t = min_g(&pb.ell(&v)) - 1.0;
    let mut best = (min_g(&pb.ell(&v)), v.clone());

    let barrier_terms = n as f64 + 2.0;
    let mut tau = settings.tau0;
    let mut steps = 0usize;
    // Gap certified by the last completed centering.
    let mut gap = f64::INFINITY;
    // Last centered point, restored when a centering after a large τ increase stalls.
    let mut center: Option<(f64, CMatrix, CMatrix, f64, f64)> = None;
    loop {
        let mut centered = false;
        let mut stalled = false;
        let mut tiny_steps = 0;
        // Newton decrement at the current iterate.
        let mut lambda = f64::INFINITY;
        for _ in 0..settings.max_newton_per_centering {
            let Some(step) = newton_step(&pb, &v, &chol, t, tau) else {
                stalled = true;
                break;
            };
            steps += 1;
            lambda = step.lambda2.sqrt();
            if step.lambda2 / 2.0 <= settings.newton_tol {
                centered = true;
                break;
            }

            let ell0 = pb.ell(&v);
            let ell_d = pb.ell(&step.delta);
            let g_now = pb.g(&ell0);
            let s_now = [g_now[0] - t, g_now[1] - t];
            let mut alpha = 1.0;
            let mut accepted = false;
            while alpha >= MIN_STEP {
                let ell_a: Coef = std::array::from_fn(|k| ell0[k] + alpha * ell_d[k]);
                let g_a = pb.g(&ell_a);
                let t_a = t + alpha * step.dt;
                let s_a = [g_a[0] - t_a, g_a[1] - t_a];
                if s_a[0] > 0.0 && s_a[1] > 0.0 {
                    let mut v_a = &v + &step.delta * Complex64::new(alpha, 0.0);
                    symmetrize(&mut v_a);
                    for k in 0..n {
                        v_a[(k, k)] = Complex64::new(1.0, 0.0);
                    }
                    if let Some(chol_a) = cholesky_lower(&v_a) {
                        let ld_a = log_det_from_cholesky(&chol_a);
                        let change = -tau * (t_a - t)
                            - (s_a[0] / s_now[0]).ln()
                            - (s_a[1] / s_now[1]).ln()
                            - (ld_a - log_det);
                        if change <= -ARMIJO * alpha * step.lambda2 {
                            v = v_a;
                            t = t_a;
                            log_det = ld_a;
                            chol = chol_a;
                            accepted = true;
                            break;
                        }
                    }
                }
                alpha *= 0.5;
            }
            // Near the center a damped step only happens when roundoff in φ
            // dominates the predicted decrease; the point is as centered as
            // double precision allows.
            if (!accepted || alpha < 1.0) && step.lambda2 / 2.0 <= ROUNDOFF_NEWTON_TOL {
                centered = true;
                break;
            }
            if alpha < TINY_STEP {
                tiny_steps += 1;
            } else {
                tiny_steps = 0;
            }
            if !accepted || tiny_steps >= 2 {
                stalled = true;
                break;
            }
            let obj = min_g(&pb.ell(&v));
            if obj > best.0 {
                best = (obj, v.clone());
            }
        }
        if centered {
            gap = barrier_terms / tau;
            let obj = min_g(&pb.ell(&v));
            if obj > best.0 {
                best = (obj, v.clone());
            }
            if gap < settings.gap_tol {
                break;
            }
            center = Some((tau, v.clone(), chol.clone(), log_det, t));
            tau *= settings.growth;
            continue;
        }
        // Off the central path with decrement λ < 1, the epigraph value is
        // within (ν + (λ + √ν)λ/(1 − λ))/τ of optimal.
        if lambda < 1.0 {
            let nu = barrier_terms;
            gap = gap.min((nu + (lambda + nu.sqrt()) * lambda / (1.0 - lambda)) / tau);
        }
        if gap <= settings.stall_gap {
            break;
        }
        if let Some((tau_c, v_c, chol_c, ld_c, t_c)) = &center {
            let ratio = tau / tau_c;
            if ratio > MIN_RETRY_GROWTH {
                tau = tau_c * ratio.sqrt();
                v = v_c.clone();
                chol = chol_c.clone();
                log_det = *ld_c;
                t = *t_c;
                continue;
            }
        }
        let msg = if stalled {
            format!("centering stalled at tau = {tau:e}")
        } else {
            format!("centering at tau = {tau:e} exceeded the Newton step cap")
        };
        return Err(Error::Solver {
            msg,
            last: Box::new(pb.solution(best.1, steps, gap)),
        });
    }
    let v = rounded_if_better(&pb, best.0, best.1);
    Ok(pb.solution(v, steps, gap))
}

/// The unit-modulus projection of the principal eigenvector is also feasible;
/// when the relaxation is tight it beats the barrier iterate, which stops a
/// small certified gap short of the optimum.
fn rounded_if_better(pb: &Problem, objective: f64, v: CMatrix) -> CMatrix {
    let eig = eigh(&v);
    let x = eig.vectors.column(0);
    if x.iter().any(|c| c.norm() == 0.0) {
        return v;
    }
    let unit = CVector::from_iterator(x.len(), x.iter().map(|c| c / c.norm()));
    let rounded = outer(&unit);
    let g = pb.g(&pb.ell(&rounded));
    if g[0].min(g[1]) > objective {
        rounded
    } else {
        v
    }
}

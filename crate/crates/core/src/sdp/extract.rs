//! Rank-one recovery from a relaxed solution.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::CVector;
use crate::hermitian::{eigh, CMatrix};
use crate::scenario::Powers;
use crate::sinr::{wrap_phase, PhaseVector, QuadraticForms, SinrEvaluator};

/// Second eigenvalue below this fraction of the first counts as rank one.
const RANK_ONE_RATIO: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Extraction {
    pub theta: PhaseVector,
    pub rate: f64,
    /// True when `V*` was numerically rank one and no randomization was needed.
    pub rank_one: bool,
}

/// Phases from a sample `ξ` of `CN(0, V)`. Since `V = v* vᵀ`, `ξ ∝ v*`, and the
/// last coordinate of `v` is pinned to phase zero.
fn phases_from(xi: &CVector) -> PhaseVector {
    let n = xi.len() - 1;
    let ref_arg = xi[n].arg();
    PhaseVector::wrapped((0..n).map(|m| ref_arg - xi[m].arg()))
}

/// Picks the best unit-modulus candidate derived from `v_star`.
///
/// The principal eigenvector is always a candidate; unless `v_star` is
/// rank one, `num_randomizations` draws `U Σ^{1/2} r` with `r ~ CN(0, I)`
/// are added. Draws come from `rng` in order, so a larger count evaluates a
/// superset of the candidates of a smaller one.
pub fn extract_rank_one<R: Rng + ?Sized>(
    v_star: &CMatrix,
    qf: &QuadraticForms,
    pw: Powers,
    num_randomizations: usize,
    rng: &mut R,
) -> Extraction {
    let n = v_star.nrows();
    let ev = SinrEvaluator::from_quadratics(qf, pw);
    let eig = eigh(v_star);

    let principal = phases_from(&eig.vectors.column(0).into_owned());
    let mut best_rate = ev.rate(principal.as_slice());
    let mut best = principal;

    let lead = eig.values[0].max(0.0);
    let rank_one = n < 2 || eig.values[1] <= RANK_ONE_RATIO * lead;
    if !rank_one {
        // Columns scaled by sqrt of the (clamped) eigenvalues.
        let mut factor = eig.vectors.clone();
        for (k, &lam) in eig.values.iter().enumerate() {
            factor.column_mut(k).scale_mut(lam.max(0.0).sqrt());
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for _ in 0..num_randomizations {
            let r = CVector::from_fn(n, |_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * s, im * s)
            });
            let cand = phases_from(&(&factor * r));
            let rate = ev.rate(cand.as_slice());
            if rate > best_rate {
                best_rate = rate;
                best = cand;
            }
        }
    }
    debug_assert!(best.as_slice().iter().all(|p| p.abs() <= std::f64::consts::PI));
    let theta = PhaseVector::wrapped(best.into_inner().into_iter().map(wrap_phase));
    Extraction {
        theta,
        rate: best_rate,
        rank_one,
    }
}

//! SINR at the receiving relay and at the destination, and the end-to-end rate.
//!
//! Two routes compute the same numbers:
//!
//! * the direct form, `p_s |h_sr1 + h_ir1ᵀ Θ h_si|² / (p_r2 |h_r2r1 + h_ir1ᵀ Θ h_r2i|² + σ²)`
//!   and its destination counterpart, with `Θ = diag(e^{jθ})` applied elementwise;
//! * the lifted trace form, where `v = [e^{jθ}; 1]`, `V = v* vᵀ` and every
//!   squared magnitude becomes `tr(V Q)` with a rank-one `Q = q qᴴ`.
//!
//! The SDP relaxation works on the second form, everything else on the first.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::channel::{CVector, ChannelRealization};
use crate::error::{Error, Result};
use crate::hermitian::{hermitian_defect, outer, trace_product, CMatrix};
use crate::scenario::Powers;

/// Phase shifts of both surfaces stacked, radians in `[-π, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector(Vec<f64>);

/// Maps any angle into `[-π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    if (-PI..=PI).contains(&x) {
        return x;
    }
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    y.clamp(-PI, PI)
}

impl PhaseVector {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if let Some(bad) = phases.iter().find(|p| !(-PI..=PI).contains(*p)) {
            return Err(Error::Domain(format!("phase {bad} outside [-π, π]")));
        }
        Ok(PhaseVector(phases))
    }

    /// Wraps every entry into range first.
    pub fn wrapped(phases: impl IntoIterator<Item = f64>) -> Self {
        PhaseVector(phases.into_iter().map(wrap_phase).collect())
    }

    pub fn zeros(len: usize) -> Self {
        PhaseVector(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Diagonal of `Θ`.
    pub fn unit_modulus(&self) -> CVector {
        CVector::from_iterator(self.len(), self.0.iter().map(|&t| Complex64::cis(t)))
    }

    /// `v = [e^{jθ}; 1]`.
    pub fn lifted(&self) -> CVector {
        let n = self.len();
        CVector::from_fn(n + 1, |i, _| {
            if i < n {
                Complex64::cis(self.0[i])
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
    }

    /// `V = v* vᵀ`, Hermitian, rank one, unit diagonal.
    pub fn lifted_matrix(&self) -> CMatrix {
        let v = self.lifted();
        v.conjugate() * v.transpose()
    }
}

/// The four lifted vectors and their rank-one outer products.
///
/// `q_sd` has a structural zero in its last entry: there is no direct
/// source-destination link.
#[derive(Debug, Clone)]
pub struct QuadraticForms {
    pub q_sr1: CVector,
    pub q_r2r1: CVector,
    pub q_r2d: CVector,
    pub q_sd: CVector,
    pub big_q_sr1: CMatrix,
    pub big_q_r2r1: CMatrix,
    pub big_q_r2d: CMatrix,
    pub big_q_sd: CMatrix,
}

fn lift(diag: &CVector, x: &CVector, tail: Complex64) -> CVector {
    let n = diag.len();
    CVector::from_fn(n + 1, |i, _| if i < n { diag[i] * x[i] } else { tail })
}

impl QuadraticForms {
    /// Size of the lifted variable, `2M + 1`.
    pub fn dim(&self) -> usize {
        self.q_sr1.len()
    }

    /// Lifted vectors in the fixed order `[sr1, r2r1, r2d, sd]`.
    pub fn vectors(&self) -> [&CVector; 4] {
        [&self.q_sr1, &self.q_r2r1, &self.q_r2d, &self.q_sd]
    }
}

pub fn build_quadratics(real: &ChannelRealization) -> QuadraticForms {
    let zero = Complex64::new(0.0, 0.0);
    let q_sr1 = lift(&real.h_ir1, &real.h_si, real.h_sr1);
    let q_r2r1 = lift(&real.h_ir1, &real.h_r2i, real.h_r2r1);
    let q_r2d = lift(&real.h_id, &real.h_r2i, real.h_r2d);
    let q_sd = lift(&real.h_id, &real.h_si, zero);
    QuadraticForms {
        big_q_sr1: outer(&q_sr1),
        big_q_r2r1: outer(&q_r2r1),
        big_q_r2d: outer(&q_r2d),
        big_q_sd: outer(&q_sd),
        q_sr1,
        q_r2r1,
        q_r2d,
        q_sd,
    }
}

fn check_dims(real: &ChannelRealization, theta: &PhaseVector) -> Result<()> {
    if theta.len() != real.dim() {
        return Err(Error::Dimension {
            expected: real.dim(),
            got: theta.len(),
        });
    }
    Ok(())
}

/// `aᵀ Θ b` with `Θ = diag(e^{jθ})`.
fn cascade(a: &CVector, theta: &[f64], b: &CVector) -> Complex64 {
    a.iter()
        .zip(theta)
        .zip(b.iter())
        .map(|((x, &t), y)| x * Complex64::cis(t) * y)
        .sum()
}

/// SINR at the receiving relay R1.
pub fn sinr_r1(real: &ChannelRealization, theta: &PhaseVector, pw: Powers) -> Result<f64> {
    check_dims(real, theta)?;
    let th = theta.as_slice();
    let signal = real.h_sr1 + cascade(&real.h_ir1, th, &real.h_si);
    let iri = real.h_r2r1 + cascade(&real.h_ir1, th, &real.h_r2i);
    Ok(pw.source * signal.norm_sqr() / (pw.relay * iri.norm_sqr() + pw.noise))
}

/// SINR at the destination; the source leaks in only through the surfaces.
pub fn sinr_d(real: &ChannelRealization, theta: &PhaseVector, pw: Powers) -> Result<f64> {
    check_dims(real, theta)?;
    let th = theta.as_slice();
    let signal = real.h_r2d + cascade(&real.h_id, th, &real.h_r2i);
    let leak = cascade(&real.h_id, th, &real.h_si);
    Ok(pw.relay * signal.norm_sqr() / (pw.source * leak.norm_sqr() + pw.noise))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    R1,
    D,
}

const IMAG_RESIDUE_TOL: f64 = 1e-9;

/// `Re tr(V Q)`; the imaginary residue is checked against the magnitude of the summed terms.
fn real_trace(v: &CMatrix, q: &CMatrix) -> f64 {
    let t = trace_product(v, q);
    debug_assert!(
        {
            let scale: f64 = v.iter().zip(q.transpose().iter()).map(|(x, y)| x.norm() * y.norm()).sum();
            t.im.abs() <= IMAG_RESIDUE_TOL * scale.max(f64::MIN_POSITIVE)
        },
        "complex residue {t} in trace form"
    );
    t.re
}

/// SINR written as a ratio of traces `tr(V Q)`.
///
/// For `V = v* vᵀ` this equals [`sinr_r1`] / [`sinr_d`]; for any other
/// feasible relaxed `V` it is the relaxed SINR.
pub fn sinr_trace_form(
    qf: &QuadraticForms,
    v: &CMatrix,
    which: Receiver,
    pw: Powers,
) -> Result<f64> {
    let n = qf.dim();
    if v.nrows() != n || v.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: v.nrows(),
        });
    }
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    let defect = hermitian_defect(v);
    if defect > 1e-9 * scale {
        return Err(Error::Domain(format!("V is not Hermitian (defect {defect:e})")));
    }
    let (num, den) = match which {
        Receiver::R1 => (
            pw.source * real_trace(v, &qf.big_q_sr1),
            pw.relay * real_trace(v, &qf.big_q_r2r1),
        ),
        Receiver::D => (
            pw.relay * real_trace(v, &qf.big_q_r2d),
            pw.source * real_trace(v, &qf.big_q_sd),
        ),
    };
    // Relaxed iterates may sit a hair outside the PSD cone.
    Ok(num.max(0.0) / (den.max(0.0) + pw.noise))
}

/// Decode-and-forward effective rate in bits/s/Hz: the weaker of the two hops.
///
/// Panics on a negative or NaN SINR.
pub fn effective_rate(gamma_r1: f64, gamma_d: f64) -> f64 {
    assert!(
        gamma_r1 >= 0.0 && gamma_d >= 0.0,
        "SINR must be non-negative, got ({gamma_r1}, {gamma_d})"
    );
    (1.0 + gamma_r1).log2().min((1.0 + gamma_d).log2())
}

/// Converts a min-SINR into a rate.
pub fn rate_from_sinr(gamma: f64) -> f64 {
    effective_rate(gamma, gamma)
}

/// Precomputed cascade products for repeated evaluation at many phase vectors.
///
/// The PSO and the exhaustive oracle evaluate millions of candidates; this
/// keeps each evaluation to one pass over `2M` elements.
#[derive(Debug, Clone)]
pub struct SinrEvaluator {
    sr1: Vec<Complex64>,
    r2r1: Vec<Complex64>,
    r2d: Vec<Complex64>,
    sd: Vec<Complex64>,
    h_sr1: Complex64,
    h_r2r1: Complex64,
    h_r2d: Complex64,
    pw: Powers,
}

impl SinrEvaluator {
    pub fn new(real: &ChannelRealization, pw: Powers) -> Self {
        let prod = |a: &CVector, b: &CVector| a.iter().zip(b.iter()).map(|(x, y)| x * y).collect();
        SinrEvaluator {
            sr1: prod(&real.h_ir1, &real.h_si),
            r2r1: prod(&real.h_ir1, &real.h_r2i),
            r2d: prod(&real.h_id, &real.h_r2i),
            sd: prod(&real.h_id, &real.h_si),
            h_sr1: real.h_sr1,
            h_r2r1: real.h_r2r1,
            h_r2d: real.h_r2d,
            pw,
        }
    }

    /// Same evaluator from the lifted vectors: the first `2M` entries of each
    /// `q` are the cascade products and the last entry is the direct link.
    pub fn from_quadratics(qf: &QuadraticForms, pw: Powers) -> Self {
        let n = qf.dim() - 1;
        let head = |q: &CVector| q.iter().take(n).copied().collect();
        SinrEvaluator {
            sr1: head(&qf.q_sr1),
            r2r1: head(&qf.q_r2r1),
            r2d: head(&qf.q_r2d),
            sd: head(&qf.q_sd),
            h_sr1: qf.q_sr1[n],
            h_r2r1: qf.q_r2r1[n],
            h_r2d: qf.q_r2d[n],
            pw,
        }
    }

    pub fn dim(&self) -> usize {
        self.sr1.len()
    }

    pub fn powers(&self) -> Powers {
        self.pw
    }

    /// `(γ_r1, γ_d)` at `theta`.
    pub fn sinrs(&self, theta: &[f64]) -> (f64, f64) {
        debug_assert_eq!(theta.len(), self.dim());
        let mut acc = [self.h_sr1, self.h_r2r1, self.h_r2d, Complex64::new(0.0, 0.0)];
        for (m, &t) in theta.iter().enumerate() {
            let (s, c) = t.sin_cos();
            let e = Complex64::new(c, s);
            acc[0] += self.sr1[m] * e;
            acc[1] += self.r2r1[m] * e;
            acc[2] += self.r2d[m] * e;
            acc[3] += self.sd[m] * e;
        }
        let pw = self.pw;
        let g_r1 = pw.source * acc[0].norm_sqr() / (pw.relay * acc[1].norm_sqr() + pw.noise);
        let g_d = pw.relay * acc[2].norm_sqr() / (pw.source * acc[3].norm_sqr() + pw.noise);
        (g_r1, g_d)
    }

    /// `min(γ_r1, γ_d)`, the quantity the phase design maximizes.
    pub fn min_sinr(&self, theta: &[f64]) -> f64 {
        let (a, b) = self.sinrs(theta);
        a.min(b)
    }

    pub fn rate(&self, theta: &[f64]) -> f64 {
        let (a, b) = self.sinrs(theta);
        effective_rate(a, b)
    }
}

//! Stochastic channel generation for all ten links.
//!
//! Surface links are Rician with a per-element LoS term of magnitude
//! `d^(-alpha_los/2)` and uniform random phase, plus a circularly-symmetric
//! Gaussian NLoS term of variance `d^(-alpha_nlos)`. The direct relay links
//! `S -> R1` and `R2 -> D` are Rayleigh; the inter-relay link follows
//! [`Scenario::iri_fading`].

use std::f64::consts::TAU;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scenario::{Fading, Node, Scenario};

pub type CVector = DVector<Complex64>;

fn check_distance(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("link distance must be positive, got {d}")))
    }
}

/// One draw from CN(0, var).
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Rician M-vector for a link of length `d`.
///
/// `k_r` is linear; `f64::INFINITY` gives the pure LoS limit.
pub fn sample_rician_vector<R: Rng + ?Sized>(
    d: f64,
    m: usize,
    k_r: f64,
    (alpha_los, alpha_nlos): (f64, f64),
    rng: &mut R,
) -> Result<CVector> {
    check_distance(d)?;
    if k_r.is_nan() || k_r < 0.0 {
        return Err(Error::Domain(format!("K-factor must be non-negative, got {k_r}")));
    }
    let (w_los, w_nlos) = if k_r.is_infinite() {
        (1.0, 0.0)
    } else {
        ((k_r / (k_r + 1.0)).sqrt(), (1.0 / (1.0 + k_r)).sqrt())
    };
    let los_mag = d.powf(-alpha_los / 2.0);
    let nlos_var = d.powf(-alpha_nlos);
    Ok(CVector::from_fn(m, |_, _| {
        let phase = rng.random_range(0.0..TAU);
        let los = Complex64::from_polar(los_mag, phase);
        let nlos = complex_gaussian(rng, nlos_var);
        los * w_los + nlos * w_nlos
    }))
}

pub fn sample_rayleigh_scalar<R: Rng + ?Sized>(
    d: f64,
    alpha_nlos: f64,
    rng: &mut R,
) -> Result<Complex64> {
    check_distance(d)?;
    Ok(complex_gaussian(rng, d.powf(-alpha_nlos)))
}

/// One draw of every link in the network.
///
/// The four stacked vectors hold the `I1` sub-vector in their first `m`
/// entries and the `I2` sub-vector in the last `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h_sr1: Complex64,
    pub h_r2r1: Complex64,
    pub h_r2d: Complex64,
    pub h_si1: CVector,
    pub h_si2: CVector,
    pub h_i1r1: CVector,
    pub h_i2r1: CVector,
    pub h_r2i1: CVector,
    pub h_r2i2: CVector,
    pub h_i1d: CVector,
    pub h_i2d: CVector,
    pub h_si: CVector,
    pub h_ir1: CVector,
    pub h_r2i: CVector,
    pub h_id: CVector,
}

fn stack(a: &CVector, b: &CVector) -> CVector {
    CVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

impl ChannelRealization {
    /// Builds a realization from per-surface vectors, assembling the stacked ones.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        h_sr1: Complex64,
        h_r2r1: Complex64,
        h_r2d: Complex64,
        h_si1: CVector,
        h_si2: CVector,
        h_i1r1: CVector,
        h_i2r1: CVector,
        h_r2i1: CVector,
        h_r2i2: CVector,
        h_i1d: CVector,
        h_i2d: CVector,
    ) -> Result<Self> {
        let m = h_si1.len();
        for v in [&h_si2, &h_i1r1, &h_i2r1, &h_r2i1, &h_r2i2, &h_i1d, &h_i2d] {
            if v.len() != m {
                return Err(Error::Dimension {
                    expected: m,
                    got: v.len(),
                });
            }
        }
        Ok(ChannelRealization {
            h_si: stack(&h_si1, &h_si2),
            h_ir1: stack(&h_i1r1, &h_i2r1),
            h_r2i: stack(&h_r2i1, &h_r2i2),
            h_id: stack(&h_i1d, &h_i2d),
            h_sr1,
            h_r2r1,
            h_r2d,
            h_si1,
            h_si2,
            h_i1r1,
            h_i2r1,
            h_r2i1,
            h_r2i2,
            h_i1d,
            h_i2d,
        })
    }

    /// Elements per surface.
    pub fn m(&self) -> usize {
        self.h_si1.len()
    }

    /// Length of the stacked phase vector, `2m`.
    pub fn dim(&self) -> usize {
        2 * self.m()
    }

    /// Realization with every surface link set to zero (direct links kept).
    pub fn without_surfaces(&self) -> Self {
        let z = CVector::zeros(self.m());
        Self::from_parts(
            self.h_sr1,
            self.h_r2r1,
            self.h_r2d,
            z.clone(),
            z.clone(),
            z.clone(),
            z.clone(),
            z.clone(),
            z.clone(),
            z.clone(),
            z,
        )
        .expect("equal lengths")
    }

    pub fn is_finite(&self) -> bool {
        let scalars = [self.h_sr1, self.h_r2r1, self.h_r2d];
        scalars.iter().all(|z| z.is_finite())
            && [&self.h_si, &self.h_ir1, &self.h_r2i, &self.h_id]
                .iter()
                .all(|v| v.iter().all(|z| z.is_finite()))
    }
}

/// Draws all links for `scenario`. Deterministic given the state of `rng`.
pub fn sample_realization<R: Rng + ?Sized>(
    scenario: &Scenario,
    rng: &mut R,
) -> Result<ChannelRealization> {
    let m = scenario.m;
    let k = scenario.k_r();
    let alphas = (scenario.alpha_los, scenario.alpha_nlos);
    let d = |a, b| scenario.link_distance(a, b);
    let rician = |a, b, rng: &mut R| sample_rician_vector(d(a, b), m, k, alphas, rng);

    let h_si1 = rician(Node::S, Node::I1, rng)?;
    let h_si2 = rician(Node::S, Node::I2, rng)?;
    let h_i1r1 = rician(Node::I1, Node::R1, rng)?;
    let h_i2r1 = rician(Node::I2, Node::R1, rng)?;
    let h_r2i1 = rician(Node::R2, Node::I1, rng)?;
    let h_r2i2 = rician(Node::R2, Node::I2, rng)?;
    let h_i1d = rician(Node::I1, Node::D, rng)?;
    let h_i2d = rician(Node::I2, Node::D, rng)?;

    let h_sr1 = sample_rayleigh_scalar(d(Node::S, Node::R1), scenario.alpha_nlos, rng)?;
    let h_r2d = sample_rayleigh_scalar(d(Node::R2, Node::D), scenario.alpha_nlos, rng)?;
    let h_r2r1 = match scenario.iri_fading {
        Fading::Rician => {
            sample_rician_vector(d(Node::R2, Node::R1), 1, k, alphas, rng)?[0]
        }
        Fading::Rayleigh => {
            sample_rayleigh_scalar(d(Node::R2, Node::R1), scenario.alpha_nlos, rng)?
        }
    };

    ChannelRealization::from_parts(
        h_sr1, h_r2r1, h_r2d, h_si1, h_si2, h_i1r1, h_i2r1, h_r2i1, h_r2i2, h_i1d, h_i2d,
    )
}

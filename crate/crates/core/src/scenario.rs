//! Network geometry and link-budget parameters.
//!
//! Six nodes live in the plane: the source `S`, destination `D`, the two
//! half-duplex relays `R1`/`R2` and the two surfaces `I1`/`I2` (one next to
//! each relay). All quantities are linear except `k_r_db`, which is kept in
//! dB at the configuration boundary and converted by [`Scenario::k_r`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Node {
    S,
    D,
    R1,
    R2,
    I1,
    I2,
}

impl Node {
    pub const ALL: [Node; 6] = [Node::S, Node::D, Node::R1, Node::R2, Node::I1, Node::I2];
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Node::S => "S",
            Node::D => "D",
            Node::R1 => "R1",
            Node::R2 => "R2",
            Node::I1 => "I1",
            Node::I2 => "I2",
        };
        f.write_str(s)
    }
}

impl FromStr for Node {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "S" => Ok(Node::S),
            "D" => Ok(Node::D),
            "R1" => Ok(Node::R1),
            "R2" => Ok(Node::R2),
            "I1" => Ok(Node::I1),
            "I2" => Ok(Node::I2),
            _ => Err(Error::UnknownNode(s.to_string())),
        }
    }
}

/// Node positions in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coords {
    #[serde(rename = "S")]
    pub s: [f64; 2],
    #[serde(rename = "D")]
    pub d: [f64; 2],
    #[serde(rename = "R1")]
    pub r1: [f64; 2],
    #[serde(rename = "R2")]
    pub r2: [f64; 2],
    #[serde(rename = "I1")]
    pub i1: [f64; 2],
    #[serde(rename = "I2")]
    pub i2: [f64; 2],
}

impl Default for Coords {
    fn default() -> Self {
        Coords {
            s: [0.0, 0.0],
            d: [100.0, 0.0],
            r1: [50.0, 25.0],
            r2: [50.0, -25.0],
            i1: [50.0, 30.0],
            i2: [50.0, -30.0],
        }
    }
}

impl Coords {
    pub fn get(&self, node: Node) -> [f64; 2] {
        match node {
            Node::S => self.s,
            Node::D => self.d,
            Node::R1 => self.r1,
            Node::R2 => self.r2,
            Node::I1 => self.i1,
            Node::I2 => self.i2,
        }
    }
}

/// Small-scale fading law of the inter-relay (R2 -> R1) link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fading {
    #[default]
    Rician,
    Rayleigh,
}

/// Every link the signal model uses, as (transmitter, receiver).
pub const MODELED_LINKS: [(Node, Node); 11] = [
    (Node::S, Node::R1),
    (Node::R2, Node::R1),
    (Node::R2, Node::D),
    (Node::S, Node::I1),
    (Node::S, Node::I2),
    (Node::I1, Node::R1),
    (Node::I2, Node::R1),
    (Node::R2, Node::I1),
    (Node::R2, Node::I2),
    (Node::I1, Node::D),
    (Node::I2, Node::D),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub coords: Coords,
    /// Reflecting elements per surface.
    pub m: usize,
    /// Total transmit power budget (linear).
    pub p: f64,
    /// Fraction of `p` given to the source; the transmitting relay gets the rest.
    pub power_split: f64,
    pub sigma2: f64,
    pub k_r_db: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    pub iri_fading: Fading,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            coords: Coords::default(),
            m: 32,
            p: 1e4,
            power_split: 0.5,
            sigma2: 1.0,
            k_r_db: 5.0,
            alpha_los: 2.3,
            alpha_nlos: 3.5,
            iri_fading: Fading::Rician,
        }
    }
}

/// Transmit powers and noise variance entering both SINR expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Powers {
    pub source: f64,
    pub relay: f64,
    pub noise: f64,
}

impl Powers {
    pub fn new(source: f64, relay: f64, noise: f64) -> Self {
        Powers {
            source,
            relay,
            noise,
        }
    }

    /// Same powers and noise scaled by `c`; both SINRs are invariant under this.
    pub fn scaled(&self, c: f64) -> Self {
        Powers::new(self.source * c, self.relay * c, self.noise * c)
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let path = |f: &str| format!("scenario.{f}");
        if self.m < 1 {
            return Err(Error::config(path("m"), "must be at least 1"));
        }
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::config(path("p"), "must be positive and finite"));
        }
        if !(self.power_split > 0.0 && self.power_split < 1.0) {
            return Err(Error::config(path("power_split"), "must lie in (0, 1)"));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::config(path("sigma2"), "must be positive and finite"));
        }
        if self.k_r_db.is_nan() {
            return Err(Error::config(path("k_r_db"), "must be a number"));
        }
        if !(self.alpha_los > 0.0 && self.alpha_los.is_finite()) {
            return Err(Error::config(path("alpha_los"), "must be positive"));
        }
        if !(self.alpha_nlos > 0.0 && self.alpha_nlos.is_finite()) {
            return Err(Error::config(path("alpha_nlos"), "must be positive"));
        }
        for node in Node::ALL {
            let [x, y] = self.coords.get(node);
            if !(x.is_finite() && y.is_finite()) {
                return Err(Error::config(
                    format!("scenario.coords.{node}"),
                    "coordinates must be finite",
                ));
            }
        }
        for (a, b) in MODELED_LINKS {
            if self.link_distance(a, b) <= 0.0 {
                return Err(Error::config(
                    "scenario.coords",
                    format!("nodes {a} and {b} coincide"),
                ));
            }
        }
        Ok(())
    }

    /// Euclidean distance in meters.
    pub fn link_distance(&self, a: Node, b: Node) -> f64 {
        let [xa, ya] = self.coords.get(a);
        let [xb, yb] = self.coords.get(b);
        (xa - xb).hypot(ya - yb)
    }

    /// Distance between two nodes given by textual id.
    pub fn link_distance_by_id(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.link_distance(a.parse()?, b.parse()?))
    }

    /// Linear Rician K-factor.
    pub fn k_r(&self) -> f64 {
        10f64.powf(self.k_r_db / 10.0)
    }

    pub fn powers(&self) -> Powers {
        Powers::new(
            self.power_split * self.p,
            (1.0 - self.power_split) * self.p,
            self.sigma2,
        )
    }

    /// Transmit SNR `p / sigma2` in dB.
    pub fn snr_db(&self) -> f64 {
        10.0 * (self.p / self.sigma2).log10()
    }

    /// Copy with the power budget set so that `p / sigma2` equals `snr_db`.
    pub fn with_snr_db(&self, snr_db: f64) -> Self {
        Scenario {
            p: self.sigma2 * 10f64.powf(snr_db / 10.0),
            ..self.clone()
        }
    }

    pub fn with_elements(&self, m: usize) -> Self {
        Scenario { m, ..self.clone() }
    }

    pub fn with_iri_fading(&self, iri_fading: Fading) -> Self {
        Scenario {
            iri_fading,
            ..self.clone()
        }
    }
}

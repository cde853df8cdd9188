use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::OracleConfig;
use crate::pso::PsoParams;
use crate::scenario::Scenario;
use crate::sdp::SdpParams;

/// Rate schemes a sweep can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Value of the successive-linearization relaxation.
    SdpUpper,
    Pso,
    /// Two-relay successive relaying without surfaces (Rayleigh inter-relay link).
    SrNoRis,
    /// Direct source-surface-destination link at full power.
    RisOnly,
    /// Exhaustive grid search; only for tiny surfaces.
    Oracle,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::SdpUpper,
        Scheme::Pso,
        Scheme::SrNoRis,
        Scheme::RisOnly,
        Scheme::Oracle,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::SdpUpper => "sdp_upper",
            Scheme::Pso => "pso",
            Scheme::SrNoRis => "sr_no_ris",
            Scheme::RisOnly => "ris_only",
            Scheme::Oracle => "oracle",
        }
    }

    pub(crate) fn key(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Domain(format!("unknown scheme `{s}`")))
    }
}

/// PSO step-size study settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceSettings {
    pub snr_db: f64,
    pub m_list: Vec<usize>,
    pub mu_list: Vec<f64>,
    pub trials: usize,
    /// Swarm size; the other swarm settings come from the `pso` section.
    pub population: usize,
}

impl Default for ConvergenceSettings {
    fn default() -> Self {
        ConvergenceSettings {
            snr_db: 50.0,
            m_list: vec![16, 32],
            mu_list: vec![PI / 8.0, PI / 4.0, PI / 2.0, PI],
            trials: 50,
            population: 50,
        }
    }
}

/// Top-level experiment configuration, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub scenario: Scenario,
    pub snr_grid_db: Vec<f64>,
    pub m_list: Vec<usize>,
    pub trials: usize,
    pub schemes: Vec<Scheme>,
    pub pso: PsoParams,
    pub sdp: SdpParams,
    pub oracle: OracleConfig,
    pub convergence: ConvergenceSettings,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            scenario: Scenario::default(),
            snr_grid_db: (0..=12).map(|k| 5.0 * k as f64).collect(),
            m_list: vec![16, 32],
            trials: 200,
            schemes: vec![Scheme::SdpUpper, Scheme::Pso, Scheme::SrNoRis, Scheme::RisOnly],
            pso: PsoParams::default(),
            sdp: SdpParams::default(),
            oracle: OracleConfig::default(),
            convergence: ConvergenceSettings::default(),
            seed: 0,
        }
    }
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.snr_grid_db.is_empty() {
            return Err(Error::config("snr_grid_db", "must not be empty"));
        }
        for (i, x) in self.snr_grid_db.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::config(format!("snr_grid_db[{i}]"), "must be finite"));
            }
        }
        if self.m_list.is_empty() {
            return Err(Error::config("m_list", "must not be empty"));
        }
        for (i, &m) in self.m_list.iter().enumerate() {
            if m == 0 {
                return Err(Error::config(format!("m_list[{i}]"), "must be at least 1"));
            }
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(Error::config("schemes", "must not be empty"));
        }
        self.pso.validate("pso")?;
        self.sdp.validate("sdp")?;
        self.oracle.validate("oracle")?;
        if self.schemes.contains(&Scheme::Oracle) {
            for (i, &m) in self.m_list.iter().enumerate() {
                if let Err(e) = self.oracle.check_size(2 * m) {
                    return Err(Error::config(
                        format!("m_list[{i}]"),
                        format!("too large for the oracle scheme ({e})"),
                    ));
                }
            }
        }
        self.validate_convergence()
    }

    fn validate_convergence(&self) -> Result<()> {
        let c = &self.convergence;
        if !c.snr_db.is_finite() {
            return Err(Error::config("convergence.snr_db", "must be finite"));
        }
        if c.m_list.is_empty() {
            return Err(Error::config("convergence.m_list", "must not be empty"));
        }
        for (i, &m) in c.m_list.iter().enumerate() {
            if m == 0 {
                return Err(Error::config(format!("convergence.m_list[{i}]"), "must be at least 1"));
            }
        }
        if c.mu_list.is_empty() {
            return Err(Error::config("convergence.mu_list", "must not be empty"));
        }
        for (i, &mu) in c.mu_list.iter().enumerate() {
            if !(mu > 0.0 && mu <= PI) {
                return Err(Error::config(format!("convergence.mu_list[{i}]"), "must lie in (0, π]"));
            }
        }
        if c.trials == 0 {
            return Err(Error::config("convergence.trials", "must be at least 1"));
        }
        if c.population < 3 {
            return Err(Error::config(
                "convergence.population",
                "ring topology needs at least 3 particles",
            ));
        }
        Ok(())
    }

    /// Swarm settings for one step size of the convergence study.
    pub fn convergence_pso(&self, mu: f64) -> PsoParams {
        PsoParams {
            population: self.convergence.population,
            mu,
            ..self.pso
        }
    }

    /// Requested schemes, deduplicated, in canonical order.
    pub fn scheme_order(&self) -> Vec<Scheme> {
        Scheme::ALL
            .into_iter()
            .filter(|s| self.schemes.contains(s))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_json() {
        let cfg = SweepConfig::default();
        cfg.validate().unwrap();
        let back = SweepConfig::from_json(&cfg.to_json_pretty()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(cfg.snr_grid_db.len(), 13);
        assert_eq!(cfg.snr_grid_db[12], 60.0);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg = SweepConfig::from_json(r#"{"trials": 3, "pso": {"t": 10}}"#).unwrap();
        assert_eq!(cfg.trials, 3);
        assert_eq!(cfg.pso.iterations, 10);
        assert_eq!(cfg.pso.population, 100);
        assert_eq!(cfg.m_list, vec![16, 32]);
    }

    fn config_path(json: &str) -> String {
        match SweepConfig::from_json(json) {
            Err(Error::Config { path, .. }) => path,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_name_the_field() {
        assert_eq!(config_path(r#"{"pso": {"mu": 4.0}}"#), "pso.mu");
        assert_eq!(config_path(r#"{"pso": {"n": 2}}"#), "pso.population");
        assert_eq!(config_path(r#"{"m_list": [4, 0]}"#), "m_list[1]");
        assert_eq!(config_path(r#"{"trials": 0}"#), "trials");
        assert_eq!(config_path(r#"{"scenario": {"power_split": 1.5}}"#), "scenario.power_split");
        assert_eq!(config_path(r#"{"sdp": {"epsilon": 0}}"#), "sdp.epsilon");
        assert_eq!(
            config_path(r#"{"convergence": {"mu_list": [1.0, 0.0]}}"#),
            "convergence.mu_list[1]"
        );
        assert_eq!(
            config_path(r#"{"m_list": [1, 8], "schemes": ["oracle"]}"#),
            "m_list[1]"
        );
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(matches!(
            SweepConfig::from_json(r#"{"trails": 3}"#),
            Err(Error::Json(_))
        ));
        assert!(matches!(
            SweepConfig::from_json(r#"{"schemes": ["magic"]}"#),
            Err(Error::Json(_))
        ));
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        }
        let cfg = SweepConfig {
            schemes: vec![Scheme::RisOnly, Scheme::Pso, Scheme::RisOnly],
            ..SweepConfig::default()
        };
        assert_eq!(cfg.scheme_order(), vec![Scheme::Pso, Scheme::RisOnly]);
    }
}

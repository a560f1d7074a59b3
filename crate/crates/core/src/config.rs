//! Run configuration, read from and written to TOML.
//!
//! Every key is optional; missing keys take the baseline scenario values
//! (16 BS antennas, 200 IRS elements, 20 W over 20 MHz at 1.9 GHz, Rician
//! factor 5, 8 dB shadowing, 9 dB noise figure at 290 K). Unknown keys are
//! rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::beamforming::AoOptions;
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::geometry::{noise_variance_watts, PathlossParams, Scenario};
use crate::multiaccess::{LinkBudget, NomaConfig, PowerAllocation, SchemeId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    /// BS antennas `N_b`.
    pub n_antennas: usize,
    /// IRS elements `N`.
    pub n_elements: usize,
    /// Users `K`.
    pub n_users: usize,
    pub pd_watts: f64,
    pub bw_hz: f64,
    pub nf_db: f64,
    pub t0_kelvin: f64,
    pub rician_gamma: f64,
    pub n_drops: usize,
    pub seed: u64,
    pub schemes: Vec<SchemeId>,
    pub scenario: Scenario,
    pub pathloss: PathlossParams,
    pub ao: AoOptions,
    pub noma: NomaConfig,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            n_antennas: 16,
            n_elements: 200,
            n_users: 2,
            pd_watts: 20.0,
            bw_hz: 20e6,
            nf_db: 9.0,
            t0_kelvin: 290.0,
            rician_gamma: 5.0,
            n_drops: 1000,
            seed: 1,
            schemes: SchemeId::ALL.to_vec(),
            scenario: Scenario::default(),
            pathloss: PathlossParams::default(),
            ao: AoOptions::default(),
            noma: NomaConfig::default(),
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.n_antennas == 0 || self.n_elements == 0 || self.n_users == 0 || self.n_drops == 0 {
            return cfg("n_antennas, n_elements, n_users and n_drops must be >= 1".into());
        }
        for (name, v) in [
            ("pd_watts", self.pd_watts),
            ("bw_hz", self.bw_hz),
            ("t0_kelvin", self.t0_kelvin),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return cfg(format!("{name} must be positive, got {v}"));
            }
        }
        if !self.nf_db.is_finite() {
            return cfg("nf_db must be finite".into());
        }
        if !(self.rician_gamma >= 0.0) || !self.rician_gamma.is_finite() {
            return cfg(format!(
                "rician_gamma must be >= 0, got {}",
                self.rician_gamma
            ));
        }
        if self.schemes.is_empty() {
            return cfg("schemes must not be empty".into());
        }
        self.pathloss
            .validate()
            .map_err(|e| Error::Config(format!("pathloss: {e}")))?;
        self.ao
            .validate()
            .map_err(|e| Error::Config(format!("ao: {e}")))?;
        self.noma.validate()?;
        if let PowerAllocation::Fixed(a) = &self.noma.power_coefficients {
            if a.len() != self.n_users {
                return cfg(format!(
                    "noma.power_coefficients has {} entries for {} users",
                    a.len(),
                    self.n_users
                ));
            }
        }
        Ok(())
    }

    pub fn noise_variance_watts(&self) -> f64 {
        noise_variance_watts(self.bw_hz, self.t0_kelvin, self.nf_db)
    }

    pub fn link_budget(&self) -> Result<LinkBudget> {
        LinkBudget::new(self.pd_watts, self.noise_variance_watts())
    }

    pub fn channel_params(&self) -> ChannelParams {
        ChannelParams {
            n_elements: self.n_elements,
            n_antennas: self.n_antennas,
            rician_gamma: self.rician_gamma,
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    /// Short hex digest of the canonical TOML form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Parses and validates a configuration. Syntax errors and unknown keys are
/// reported with their line number.
pub fn parse_config(text: &str) -> Result<SystemConfig> {
    let cfg: SystemConfig = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0);
        Error::Parse {
            line,
            message: e.message().trim().to_string(),
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

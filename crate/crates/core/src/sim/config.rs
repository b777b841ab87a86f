use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{noise_var_from_ebn0, SystemConfig};
use crate::decoder::DecoderSettings;
use crate::error::ConfigError;
use crate::tree::ParityProfile;

/// Everything needed to reproduce a Monte-Carlo run. Parsed from TOML with
/// unknown keys rejected; the default is the 32-slot reference setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    #[serde(default)]
    pub users: UsersSection,
    #[serde(default)]
    pub decoder: DecoderSettings,
    #[serde(default)]
    pub support: SupportRule,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub slot_len: usize,
    pub bits_per_slot: u32,
    /// Parity bits per slot; its length is the number of slots.
    pub parity_bits: Vec<u32>,
    /// Optional consistency checks against `parity_bits`.
    #[serde(default)]
    pub num_slots: Option<usize>,
    #[serde(default)]
    pub payload_bits: Option<u32>,
    pub num_antennas: usize,
    pub ebn0_db: f64,
    /// Per-slot transmit power; uniform 1 when absent.
    #[serde(default)]
    pub slot_powers: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UsersSection {
    pub active: usize,
    #[serde(default)]
    pub gains: GainModel,
}

impl Default for UsersSection {
    fn default() -> Self {
        Self {
            active: 150,
            gains: GainModel::default(),
        }
    }
}

/// Large-scale fading coefficients of the active users. The decoder never
/// sees them; they only shape `γ` and the default threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GainModel {
    Fixed { value: f64 },
    /// Log-uniform between the two bounds, in dB.
    UniformDb { min_db: f64, max_db: f64 },
}

impl Default for GainModel {
    fn default() -> Self {
        GainModel::Fixed { value: 1.0 }
    }
}

/// Hard support decision applied to every slot estimate.
///
/// The default thresholds at `0.2 · power_s`. The ML estimates are biased low
/// at moderate SNR, so a threshold at half the gain drops true messages, and
/// every drop is fatal to that user's tree path; a few extra candidates, by
/// contrast, are cheaply pruned by the parity checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum SupportRule {
    /// Threshold at half the smallest active gain, scaled by slot power.
    Auto,
    /// `γ̂_r ≥ ν_s · power_s`; one value for all slots or one per slot.
    Threshold { nu: Vec<f64> },
    /// The `K_a + Δ` largest entries.
    #[serde(rename = "topk")]
    TopK { delta: usize },
}

impl Default for SupportRule {
    fn default() -> Self {
        SupportRule::Threshold { nu: vec![0.2] }
    }
}

impl FromStr for SupportRule {
    type Err = ConfigError;

    /// Parses `threshold:<ν>`, `topk:<Δ>` or `auto`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::Invalid(format!("bad support rule {s:?}, expected threshold:<nu>, topk:<delta> or auto"));
        if s == "auto" {
            return Ok(SupportRule::Auto);
        }
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "threshold" => {
                let nu = value
                    .split(',')
                    .map(|v| v.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                Ok(SupportRule::Threshold { nu })
            }
            "topk" => Ok(SupportRule::TopK {
                delta: value.trim().parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    /// Seed of the shared inner codebook; defaults to `seed`.
    pub codebook_seed: Option<u64>,
    /// Seed of the outer parity masks; defaults to `seed`.
    pub parity_seed: Option<u64>,
    pub output: Option<PathBuf>,
    /// Write measured wall time. Off by default so identical configs produce
    /// identical files.
    pub record_timing: bool,
    pub max_path_extensions: u64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 1,
            workers: 0,
            codebook_seed: None,
            parity_seed: None,
            output: None,
            record_timing: false,
            max_path_extensions: crate::tree::DEFAULT_MAX_EXTENSIONS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Ebn0Db,
    Ka,
    Antennas,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Ebn0Db => "ebn0_db",
            SweepAxis::Ka => "Ka",
            SweepAxis::Antennas => "M",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

impl Default for RunConfig {
    /// `L = 100`, `J = 12`, `S = 32`, `B = 96`, parity `[0, 9×28, 12, 12, 12]`,
    /// `M = 300`, `K_a = 150`, `E_b/N_0 = 0 dB`, unit gains.
    fn default() -> Self {
        let mut parity_bits = vec![0];
        parity_bits.extend(std::iter::repeat_n(9, 28));
        parity_bits.extend([12, 12, 12]);
        Self {
            system: SystemSection {
                slot_len: 100,
                bits_per_slot: 12,
                parity_bits,
                num_slots: Some(32),
                payload_bits: Some(96),
                num_antennas: 300,
                ebn0_db: 0.0,
                slot_powers: None,
            },
            users: UsersSection::default(),
            decoder: DecoderSettings::default(),
            support: SupportRule::default(),
            run: RunSection::default(),
            sweep: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn profile(&self) -> Result<ParityProfile, ConfigError> {
        ParityProfile::from_parity(self.system.bits_per_slot, &self.system.parity_bits)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn num_slots(&self) -> usize {
        self.system.parity_bits.len()
    }

    pub fn noise_var(&self) -> Result<f64, ConfigError> {
        let b = self.profile()?.payload_bits();
        Ok(noise_var_from_ebn0(self.system.ebn0_db, b, self.num_slots(), self.system.slot_len))
    }

    pub fn slot_powers(&self) -> Vec<f64> {
        self.system
            .slot_powers
            .clone()
            .unwrap_or_else(|| vec![1.0; self.num_slots()])
    }

    pub fn system_config(&self) -> Result<SystemConfig, ConfigError> {
        let profile = self.profile()?;
        let cfg = SystemConfig {
            slot_len: self.system.slot_len,
            bits_per_slot: self.system.bits_per_slot,
            num_slots: self.num_slots(),
            payload_bits: profile.payload_bits(),
            num_antennas: self.system.num_antennas,
            noise_var: self.noise_var()?,
            slot_powers: self.slot_powers(),
        };
        cfg.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(cfg)
    }

    pub fn codebook_seed(&self) -> u64 {
        self.run.codebook_seed.unwrap_or(self.run.seed)
    }

    pub fn parity_seed(&self) -> u64 {
        self.run.parity_seed.unwrap_or(self.run.seed)
    }

    /// Copy with one sweep coordinate replaced.
    pub fn at(&self, axis: SweepAxis, value: f64) -> Result<Self, ConfigError> {
        let mut cfg = self.clone();
        let as_count = |v: f64| {
            if v >= 0.0 && v.fract() == 0.0 && v < 1e9 {
                Ok(v as usize)
            } else {
                Err(ConfigError::Invalid(format!("{} must be a nonnegative integer, got {v}", axis.name())))
            }
        };
        match axis {
            SweepAxis::Ebn0Db => cfg.system.ebn0_db = value,
            SweepAxis::Ka => cfg.users.active = as_count(value)?,
            SweepAxis::Antennas => cfg.system.num_antennas = as_count(value)?,
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        let profile = self.profile()?;
        if let Some(s) = self.system.num_slots {
            if s != self.num_slots() {
                return invalid(format!("num_slots = {s} but parity profile has {} blocks", self.num_slots()));
            }
        }
        if let Some(b) = self.system.payload_bits {
            if b != profile.payload_bits() {
                return invalid(format!(
                    "payload_bits = {b} but parity profile carries {} information bits",
                    profile.payload_bits()
                ));
            }
        }
        if !self.system.ebn0_db.is_finite() {
            return invalid("ebn0_db must be finite".into());
        }
        self.system_config()?;
        self.decoder
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        match &self.users.gains {
            GainModel::Fixed { value } if !(*value > 0.0 && value.is_finite()) => {
                return invalid("fixed gain must be positive".into())
            }
            GainModel::UniformDb { min_db, max_db } if !(min_db <= max_db && min_db.is_finite() && max_db.is_finite()) => {
                return invalid("gain range needs min_db <= max_db".into())
            }
            _ => {}
        }
        match &self.support {
            SupportRule::Threshold { nu } => {
                if nu.is_empty() || (nu.len() != 1 && nu.len() != self.num_slots()) {
                    return invalid("threshold needs one value or one per slot".into());
                }
                if nu.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                    return invalid("thresholds must be positive".into());
                }
            }
            SupportRule::Auto | SupportRule::TopK { .. } => {}
        }
        if self.run.trials == 0 {
            return invalid("trials must be at least 1".into());
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return invalid("sweep values must be nonempty".into());
            }
        }
        Ok(())
    }
}

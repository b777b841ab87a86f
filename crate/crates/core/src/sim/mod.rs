//! Monte-Carlo harness: payloads → tree code → per-slot channel → activity
//! detection → support decision → tree decoding → error counts.
//!
//! Every random draw of trial `t` comes from seeds derived from
//! `(master seed, t)` alone, so results do not depend on how trials are
//! spread over workers.
//!
//! Unsourced semantics: the decoder returns messages, not users. Active users
//! that happen to send the same payload form a single target, so misdetections
//! are counted against the set of distinct transmitted payloads.

mod config;
mod metrics;
mod sweep;

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, RngCore};

pub use config::{GainModel, RunConfig, RunSection, SupportRule, SweepAxis, SweepSection, SystemSection, UsersSection};
pub use metrics::{compute_metrics, half_width, Metrics};
pub use sweep::{run_point, run_sweep, write_csv_header, SweepRow, CSV_COLUMNS};

use crate::channel::{build_gamma, sample_coding_matrix, synthesize_slot, ActiveSet, CodingMatrix, SystemConfig};
use crate::decoder::{coordinate_descent, sample_covariance, threshold_support, topk_support, DecoderSettings};
use crate::error::SimError;
use crate::rng::substream;
use crate::tree::{outer_encode, tree_decode, ParityProfile, Payload, SlotLists, TreeCodebook};

const TAG_TRIAL: u64 = 1;
const TAG_SLOT: u64 = 2;
const TAG_SCHEDULE: u64 = 3;

/// Child seed `index` of `base` under a domain tag.
pub fn derive_seed(base: u64, tag: u64, index: u64) -> u64 {
    substream(base, (tag << 48) ^ index).next_u64()
}

/// Outcome of one simulated frame.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    /// Payloads of the active users, one per user, collisions included.
    pub transmitted: Vec<Payload>,
    pub decoded: BTreeSet<Payload>,
    /// Distinct transmitted payloads.
    pub targets: usize,
    pub misdetections: usize,
    pub false_alarms: usize,
    /// Candidate list size per slot.
    pub slot_list_sizes: Vec<usize>,
}

impl TrialRecord {
    pub fn new(transmitted: Vec<Payload>, decoded: BTreeSet<Payload>) -> Self {
        let distinct: BTreeSet<Payload> = transmitted.iter().copied().collect();
        let misdetections = distinct.difference(&decoded).count();
        let false_alarms = decoded.difference(&distinct).count();
        Self {
            targets: distinct.len(),
            transmitted,
            decoded,
            misdetections,
            false_alarms,
            slot_list_sizes: Vec::new(),
        }
    }

    pub fn active(&self) -> usize {
        self.transmitted.len()
    }
}

/// A validated configuration together with the shared inner and outer codebooks.
#[derive(Debug, Clone)]
pub struct Simulator {
    config: RunConfig,
    system: SystemConfig,
    codebook: Arc<CodingMatrix>,
    tree: Arc<TreeCodebook>,
}

impl Simulator {
    pub fn new(config: &RunConfig) -> Result<Self, SimError> {
        config.validate()?;
        let system = config.system_config()?;
        let codebook = sample_coding_matrix(system.slot_len, system.bits_per_slot, config.codebook_seed())?;
        let tree = TreeCodebook::new(config.profile()?, config.parity_seed())
            .with_max_extensions(config.run.max_path_extensions);
        Ok(Self {
            config: config.clone(),
            system,
            codebook: Arc::new(codebook),
            tree: Arc::new(tree),
        })
    }

    /// Same codebooks, different operating point.
    pub fn with_config(&self, config: &RunConfig) -> Result<Self, SimError> {
        config.validate()?;
        let same_codes = config.system.slot_len == self.config.system.slot_len
            && config.system.bits_per_slot == self.config.system.bits_per_slot
            && config.system.parity_bits == self.config.system.parity_bits
            && config.codebook_seed() == self.config.codebook_seed()
            && config.parity_seed() == self.config.parity_seed()
            && config.run.max_path_extensions == self.config.run.max_path_extensions;
        if !same_codes {
            return Self::new(config);
        }
        Ok(Self {
            config: config.clone(),
            system: config.system_config()?,
            codebook: Arc::clone(&self.codebook),
            tree: Arc::clone(&self.tree),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn system(&self) -> &SystemConfig {
        &self.system
    }

    pub fn codebook(&self) -> &CodingMatrix {
        &self.codebook
    }

    pub fn tree(&self) -> &TreeCodebook {
        &self.tree
    }

    pub fn profile(&self) -> &ParityProfile {
        self.tree.profile()
    }

    /// Simulates trial `index`; deterministic in `(master seed, index)`.
    pub fn run_trial(&self, index: u64) -> Result<TrialRecord, SimError> {
        let trial_seed = derive_seed(self.config.run.seed, TAG_TRIAL, index);
        let mut rng = substream(trial_seed, 0);
        let active = self.config.users.active;
        let b = self.profile().payload_bits();
        let payload_mask = if b >= Payload::BITS { Payload::MAX } else { (1 << b) - 1 };
        let payloads: Vec<Payload> = (0..active).map(|_| rng.random::<Payload>() & payload_mask).collect();
        let gains: Vec<f64> = (0..active)
            .map(|_| match self.config.users.gains {
                GainModel::Fixed { value } => value,
                GainModel::UniformDb { min_db, max_db } => {
                    10f64.powf((min_db + (max_db - min_db) * rng.random::<f64>()) / 10.0)
                }
            })
            .collect();
        let blocks = payloads
            .iter()
            .map(|&p| outer_encode(p, &self.tree))
            .collect::<Result<Vec<_>, _>>()?;

        let min_gain = gains.iter().copied().fold(f64::INFINITY, f64::min);
        let slots = self.system.num_slots;
        let mut lists = Vec::with_capacity(slots);
        for s in 0..slots {
            let set = ActiveSet {
                messages: blocks.iter().map(|blk| blk[s] as usize).collect(),
                gains: gains.clone(),
            };
            let gamma = build_gamma(&set, self.system.bits_per_slot)?;
            let power = self.system.slot_powers[s];
            let obs = synthesize_slot(
                &self.codebook,
                &gamma,
                self.system.num_antennas,
                self.system.noise_var,
                power,
                derive_seed(trial_seed, TAG_SLOT, s as u64),
            )?;
            let sc = sample_covariance(&obs);
            let settings = DecoderSettings {
                seed: derive_seed(trial_seed, TAG_SCHEDULE, s as u64),
                ..self.config.decoder.clone()
            };
            let estimate = coordinate_descent(&sc, &self.codebook, self.system.noise_var, &settings)?.gamma;
            let support = match &self.config.support {
                SupportRule::Auto => threshold_support(&estimate, 0.5 * min_gain * power),
                SupportRule::Threshold { nu } => {
                    let nu_s = if nu.len() == 1 { nu[0] } else { nu[s] };
                    threshold_support(&estimate, nu_s * power)
                }
                SupportRule::TopK { delta } => topk_support(&estimate, active + delta),
            };
            lists.push(support.indices.iter().map(|&i| i as u32).collect::<BTreeSet<u32>>());
        }
        let slot_list_sizes = lists.iter().map(BTreeSet::len).collect();
        let decoded = tree_decode(&SlotLists(lists), &self.tree)?;
        let mut record = TrialRecord::new(payloads, decoded);
        record.slot_list_sizes = slot_list_sizes;
        Ok(record)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.system.slot_len = 32;
        cfg.system.bits_per_slot = 8;
        cfg.system.parity_bits = vec![0, 4, 4, 8];
        cfg.system.num_slots = None;
        cfg.system.payload_bits = None;
        cfg.system.num_antennas = 1024;
        cfg.system.ebn0_db = 60.0;
        cfg.users.active = 5;
        cfg.run.trials = 2;
        cfg
    }

    #[test]
    fn near_noiseless_trial_is_error_free() {
        let sim = Simulator::new(&small_config()).unwrap();
        for t in 0..2 {
            let r = sim.run_trial(t).unwrap();
            assert_eq!(r.active(), 5);
            assert_eq!((r.misdetections, r.false_alarms), (0, 0), "trial {t}: {r:?}");
        }
    }

    #[test]
    fn no_active_users() {
        let mut cfg = small_config();
        cfg.users.active = 0;
        let r = Simulator::new(&cfg).unwrap().run_trial(0).unwrap();
        assert!(r.decoded.is_empty());
        let m = compute_metrics(&[r]);
        assert_eq!((m.p_md, m.p_fa), (0.0, 0.0));
    }

    #[test]
    fn trials_are_reproducible() {
        let mut cfg = small_config();
        cfg.system.ebn0_db = 5.0;
        cfg.system.num_antennas = 16;
        let sim = Simulator::new(&cfg).unwrap();
        assert_eq!(sim.run_trial(3).unwrap(), sim.run_trial(3).unwrap());
        assert_ne!(sim.run_trial(3).unwrap().transmitted, sim.run_trial(4).unwrap().transmitted);
    }

    #[test]
    fn duplicate_payloads_count_once() {
        let r = TrialRecord::new(vec![7, 7, 8], [7].into_iter().collect());
        assert_eq!((r.targets, r.misdetections, r.false_alarms), (2, 1, 0));
    }

    #[test]
    fn derived_seeds_differ_by_tag_and_index() {
        let a = derive_seed(1, TAG_TRIAL, 0);
        assert_eq!(a, derive_seed(1, TAG_TRIAL, 0));
        assert_ne!(a, derive_seed(1, TAG_TRIAL, 1));
        assert_ne!(a, derive_seed(1, TAG_SLOT, 0));
        assert_ne!(a, derive_seed(2, TAG_TRIAL, 0));
    }
}

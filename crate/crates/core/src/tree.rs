//! Outer tree code.
//!
//! A `B`-bit payload is cut into `S` blocks with `b_1 = J` and `b_s < J`
//! information bits. Block `s > 1` is padded to `J` bits with `p_s = J − b_s`
//! parity bits, each the GF(2) inner product of all information bits sent in
//! blocks `1..s` with a pseudo-random mask shared by every user.
//!
//! Bit layout: payloads are big-endian (block 1 takes the most significant
//! `b_1` bits). Inside a `J`-bit block the information bits occupy the high
//! positions and the parity bits the low positions, and the block index is the
//! big-endian integer value of those `J` bits.
//!
//! Payloads are held in a `u128`, which bounds `B` at 128 bits.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::TreeError;
use crate::rng::substream;

/// Default cap on path extensions examined per decoding stage.
pub const DEFAULT_MAX_EXTENSIONS: u64 = 10_000_000;

pub type Payload = u128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityProfile {
    bits_per_slot: u32,
    info_bits: Vec<u32>,
    parity_bits: Vec<u32>,
}

impl ParityProfile {
    /// Profile from the parity bit count of every block.
    pub fn from_parity(bits_per_slot: u32, parity_bits: &[u32]) -> Result<Self, TreeError> {
        let bad = |m: String| Err(TreeError::Profile(m));
        if bits_per_slot == 0 || bits_per_slot > 32 {
            return bad(format!("J = {bits_per_slot} must be in 1..=32"));
        }
        match parity_bits.first() {
            None => return bad("profile needs at least one block".into()),
            Some(&p) if p != 0 => return bad(format!("first block must carry no parity, got {p}")),
            _ => {}
        }
        for (s, &p) in parity_bits.iter().enumerate().skip(1) {
            if p == 0 || p > bits_per_slot {
                return bad(format!("block {} has {p} parity bits, need 1..={bits_per_slot}", s + 1));
            }
        }
        let info_bits: Vec<u32> = parity_bits.iter().map(|p| bits_per_slot - p).collect();
        let total: u32 = info_bits.iter().sum();
        if total > Payload::BITS {
            return bad(format!("{total} payload bits exceed {}", Payload::BITS));
        }
        Ok(Self {
            bits_per_slot,
            info_bits,
            parity_bits: parity_bits.to_vec(),
        })
    }

    /// Profile from the information bit count of every block.
    pub fn from_info(bits_per_slot: u32, info_bits: &[u32]) -> Result<Self, TreeError> {
        if info_bits.iter().any(|&b| b > bits_per_slot) {
            return Err(TreeError::Profile("info bits exceed J".into()));
        }
        let parity: Vec<u32> = info_bits.iter().map(|b| bits_per_slot - b).collect();
        Self::from_parity(bits_per_slot, &parity)
    }

    pub fn bits_per_slot(&self) -> u32 {
        self.bits_per_slot
    }

    pub fn num_slots(&self) -> usize {
        self.info_bits.len()
    }

    pub fn info_bits(&self) -> &[u32] {
        &self.info_bits
    }

    pub fn parity_bits(&self) -> &[u32] {
        &self.parity_bits
    }

    /// `B = Σ b_s`.
    pub fn payload_bits(&self) -> u32 {
        self.info_bits.iter().sum()
    }

    /// `P = Σ p_s`.
    pub fn total_parity(&self) -> u32 {
        self.parity_bits.iter().sum()
    }

    /// `R_out = B / (B + P)`.
    pub fn outer_rate(&self) -> f64 {
        f64::from(self.payload_bits()) / f64::from(self.payload_bits() + self.total_parity())
    }
}

/// Outer code shared by all users: a profile and the seed of its parity masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCodebook {
    profile: ParityProfile,
    parity_seed: u64,
    /// `masks[s][j]` selects the prefix bits feeding parity bit `j` of block
    /// `s`; bit `t` of a mask addresses bit `t` of the right-aligned prefix.
    masks: Vec<Vec<Payload>>,
    max_extensions: u64,
}

impl TreeCodebook {
    pub fn new(profile: ParityProfile, parity_seed: u64) -> Self {
        let mut prefix_len = Vec::with_capacity(profile.num_slots());
        let mut acc = 0;
        for &b in profile.info_bits() {
            prefix_len.push(acc);
            acc += b;
        }
        let masks = profile
            .parity_bits()
            .iter()
            .enumerate()
            .map(|(s, &p)| {
                (0..p)
                    .map(|j| parity_mask(parity_seed, s, j, prefix_len[s]))
                    .collect()
            })
            .collect();
        Self {
            profile,
            parity_seed,
            masks,
            max_extensions: DEFAULT_MAX_EXTENSIONS,
        }
    }

    pub fn with_max_extensions(mut self, cap: u64) -> Self {
        self.max_extensions = cap;
        self
    }

    pub fn profile(&self) -> &ParityProfile {
        &self.profile
    }

    pub fn parity_seed(&self) -> u64 {
        self.parity_seed
    }

    /// Parity section of block `s` for the information prefix sent before it.
    pub fn parity(&self, s: usize, prefix: Payload) -> u32 {
        self.masks[s]
            .iter()
            .fold(0u32, |acc, &mask| (acc << 1) | ((prefix & mask).count_ones() & 1))
    }

    fn block_width(&self) -> u32 {
        self.profile.bits_per_slot
    }
}

/// One mask per (block, parity bit), drawn from an independent counter-addressed
/// stream, covering the `prefix_len` information bits of the earlier blocks.
fn parity_mask(seed: u64, block: usize, bit: u32, prefix_len: u32) -> Payload {
    if prefix_len == 0 {
        return 0;
    }
    let mut rng = substream(seed, ((block as u64) << 32) | u64::from(bit));
    let raw: Payload = rng.random();
    if prefix_len >= Payload::BITS {
        raw
    } else {
        raw & ((1 << prefix_len) - 1)
    }
}

#[inline]
fn low_mask(bits: u32) -> Payload {
    if bits >= Payload::BITS {
        Payload::MAX
    } else {
        (1 << bits) - 1
    }
}

/// Encodes a payload into its `S` block indices.
pub fn outer_encode(payload: Payload, codebook: &TreeCodebook) -> Result<Vec<u32>, TreeError> {
    let total = codebook.profile.payload_bits();
    if payload & !low_mask(total) != 0 {
        return Err(TreeError::PayloadWidth { payload, bits: total });
    }
    let mut blocks = Vec::with_capacity(codebook.profile.num_slots());
    let mut prefix: Payload = 0;
    let mut consumed = 0;
    for (s, (&b, &p)) in codebook
        .profile
        .info_bits()
        .iter()
        .zip(codebook.profile.parity_bits())
        .enumerate()
    {
        let parity = codebook.parity(s, prefix);
        let info = if b == 0 {
            0
        } else {
            ((payload >> (total - consumed - b)) & low_mask(b)) as u32
        };
        blocks.push(((info as u64) << p | u64::from(parity)) as u32);
        prefix = if b == 0 { prefix } else { (prefix << b) | Payload::from(info) };
        consumed += b;
    }
    Ok(blocks)
}

/// Per-slot candidate lists `S_1, …, S_S`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SlotLists(pub Vec<BTreeSet<u32>>);

impl SlotLists {
    pub fn num_slots(&self) -> usize {
        self.0.len()
    }
}

/// Ideal inner decoder: slot `s` lists the union of every user's block `s`.
pub fn or_mac_combine(per_user_blocks: &[Vec<u32>], num_slots: usize) -> SlotLists {
    let mut lists = vec![BTreeSet::new(); num_slots];
    for blocks in per_user_blocks {
        for (list, &b) in lists.iter_mut().zip(blocks) {
            list.insert(b);
        }
    }
    SlotLists(lists)
}

/// Stage-by-stage list decoding: a partial path is extended by every entry
/// of the next list whose parity section agrees with the path's information
/// prefix. Returns the payloads of all complete paths, deduplicated.
pub fn tree_decode(lists: &SlotLists, codebook: &TreeCodebook) -> Result<BTreeSet<Payload>, TreeError> {
    let profile = &codebook.profile;
    let slots = profile.num_slots();
    if lists.num_slots() != slots {
        return Err(TreeError::SlotCount {
            expected: slots,
            got: lists.num_slots(),
        });
    }
    let width = codebook.block_width();
    let range = 1u64 << width;
    let mut paths: Vec<Payload> = vec![0];
    for (s, list) in lists.0.iter().enumerate() {
        let extensions = paths.len() as u64 * list.len() as u64;
        if extensions > codebook.max_extensions {
            return Err(TreeError::PathOverflow {
                stage: s + 1,
                extensions,
                cap: codebook.max_extensions,
            });
        }
        let b = profile.info_bits()[s];
        let p = profile.parity_bits()[s];
        // split each candidate once into (info, parity)
        let candidates: Vec<(u32, u32)> = list
            .iter()
            .filter(|&&c| u64::from(c) < range)
            .map(|&c| (c >> p, c & (low_mask(p) as u32)))
            .collect();
        let mut next = Vec::new();
        for &prefix in &paths {
            let expected = codebook.parity(s, prefix);
            for &(info, parity) in &candidates {
                if parity == expected {
                    next.push(if b == 0 { prefix } else { (prefix << b) | Payload::from(info) });
                }
            }
        }
        // paths with equal prefixes are indistinguishable from here on
        next.sort_unstable();
        next.dedup();
        paths = next;
        if paths.is_empty() {
            break;
        }
    }
    Ok(paths.into_iter().collect())
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 || x >= 1.0 { 0.0 } else { -x * x.log2() };
    h(p) + h(1.0 - p)
}

/// Upper bound `2^J · H₂((1 − 2^{−J})^{K_a})` on the OR-MAC output entropy of
/// one slot, in bits.
pub fn entropy_bound(bits_per_slot: u32, active: u64) -> f64 {
    let columns = 2f64.powi(bits_per_slot as i32);
    let p_idle = (active as f64 * (-1.0 / columns).ln_1p()).exp();
    columns * binary_entropy(p_idle)
}

/// Necessary condition `K_a · J · R_out ≤ entropy_bound(J, K_a)`.
pub fn sumrate_feasible(bits_per_slot: u32, active: u64, outer_rate: f64) -> bool {
    active as f64 * f64::from(bits_per_slot) * outer_rate <= entropy_bound(bits_per_slot, active)
}

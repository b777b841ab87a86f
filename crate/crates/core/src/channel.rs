//! Block-fading massive-MIMO channel model.
//!
//! All users share one codebook `A ∈ ℂ^{L×2^J}` whose columns have squared
//! norm `L`. In one slot the base station with `M` antennas observes
//!
//! ```text
//! Y = A · diag(p·γ)^{1/2} · H̃ + Z
//! ```
//!
//! where `γ_r` is the summed large-scale fading coefficient of every active
//! user that picked codeword `r`, `p` the slot power, `H̃` i.i.d. `CN(0, 1)`
//! and `Z` i.i.d. `CN(0, σ²)`. Only `γ` enters the model, so the number of
//! inactive users never appears.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::ChannelError;
use crate::rng::substream;

/// Default cap on codebook storage (1 GiB).
pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 30;

/// Static parameters of the link.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Signal dimensions per slot, `L`.
    pub slot_len: usize,
    /// Coded bits per slot, `J`; the codebook has `2^J` columns.
    pub bits_per_slot: u32,
    /// Number of slots `S` in a frame.
    pub num_slots: usize,
    /// Payload bits per user, `B`.
    pub payload_bits: u32,
    /// Receive antennas `M`.
    pub num_antennas: usize,
    /// Noise variance `σ²` per complex entry.
    pub noise_var: f64,
    /// Transmit power per slot, multiplies `γ`.
    pub slot_powers: Vec<f64>,
}

impl SystemConfig {
    /// Configuration with the noise level set from `E_b/N_0` and uniform slot power.
    pub fn from_ebn0(
        slot_len: usize,
        bits_per_slot: u32,
        num_slots: usize,
        payload_bits: u32,
        num_antennas: usize,
        ebn0_db: f64,
    ) -> Result<Self, ChannelError> {
        let cfg = Self {
            slot_len,
            bits_per_slot,
            num_slots,
            payload_bits,
            num_antennas,
            noise_var: noise_var_from_ebn0(ebn0_db, payload_bits, num_slots, slot_len),
            slot_powers: vec![1.0; num_slots],
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn num_codewords(&self) -> usize {
        1usize << self.bits_per_slot
    }

    /// Total block length `n = S·L`.
    pub fn block_len(&self) -> usize {
        self.num_slots * self.slot_len
    }

    /// Rate in bits per complex symbol, `R = B/n`.
    pub fn rate(&self) -> f64 {
        f64::from(self.payload_bits) / self.block_len() as f64
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let bad = |m: &str| Err(ChannelError::InvalidDimensions(m.to_string()));
        if self.slot_len == 0 {
            return bad("slot_len must be positive");
        }
        if self.bits_per_slot == 0 || self.bits_per_slot >= usize::BITS - 1 {
            return bad("bits_per_slot out of range");
        }
        if self.num_slots == 0 || self.payload_bits == 0 || self.num_antennas == 0 {
            return bad("num_slots, payload_bits and num_antennas must be positive");
        }
        if !(self.noise_var > 0.0 && self.noise_var.is_finite()) {
            return Err(ChannelError::InvalidParameter(format!(
                "noise_var must be positive and finite, got {}",
                self.noise_var
            )));
        }
        if self.slot_powers.len() != self.num_slots {
            return bad("slot_powers must have one entry per slot");
        }
        if self.slot_powers.iter().any(|&p| !(p > 0.0 && p.is_finite())) {
            return Err(ChannelError::InvalidParameter(
                "slot powers must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Noise variance `N_0` for a given `E_b/N_0` in dB, with `E_s = 1` and
/// `R = B/(S·L)` bits per symbol.
pub fn noise_var_from_ebn0(ebn0_db: f64, payload_bits: u32, num_slots: usize, slot_len: usize) -> f64 {
    let rate = f64::from(payload_bits) / (num_slots * slot_len) as f64;
    1.0 / (rate * 10f64.powf(ebn0_db / 10.0))
}

/// Shared inner codebook. Columns are stored contiguously, split into real and
/// imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct CodingMatrix {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl CodingMatrix {
    /// Builds a codebook from explicit columns, rescaling each to squared norm `L`.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self, ChannelError> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 || columns.iter().any(|c| c.len() != rows) {
            return Err(ChannelError::InvalidDimensions(
                "columns must be nonempty and of equal length".into(),
            ));
        }
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        for c in columns {
            let norm_sq: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            if norm_sq <= 0.0 {
                return Err(ChannelError::InvalidParameter("zero column".into()));
            }
            let scale = (rows as f64 / norm_sq).sqrt();
            re.extend(c.iter().map(|z| z.re * scale));
            im.extend(c.iter().map(|z| z.im * scale));
        }
        Ok(Self { rows, cols, re, im })
    }

    /// Signal dimension `L`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of codewords `2^J`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Nominal squared column norm (`L`).
    pub fn column_norm_sq(&self) -> f64 {
        self.rows as f64
    }

    /// Real and imaginary parts of column `k`.
    #[inline]
    pub fn column_parts(&self, k: usize) -> (&[f64], &[f64]) {
        let s = k * self.rows;
        (&self.re[s..s + self.rows], &self.im[s..s + self.rows])
    }

    pub fn column(&self, k: usize) -> Vec<Complex64> {
        let (r, i) = self.column_parts(k);
        r.iter().zip(i).map(|(&a, &b)| Complex64::new(a, b)).collect()
    }

    /// Dense `L × 2^J` copy.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, k| {
            let s = k * self.rows + i;
            Complex64::new(self.re[s], self.im[s])
        })
    }
}

/// Draws `2^J` columns uniformly from the complex sphere of radius `√L`.
pub fn sample_coding_matrix(slot_len: usize, bits_per_slot: u32, seed: u64) -> Result<CodingMatrix, ChannelError> {
    sample_coding_matrix_with_budget(slot_len, bits_per_slot, seed, DEFAULT_MEMORY_BUDGET)
}

pub fn sample_coding_matrix_with_budget(
    slot_len: usize,
    bits_per_slot: u32,
    seed: u64,
    budget_bytes: usize,
) -> Result<CodingMatrix, ChannelError> {
    if slot_len == 0 || bits_per_slot == 0 {
        return Err(ChannelError::InvalidDimensions(
            "slot_len and bits_per_slot must be positive".into(),
        ));
    }
    let cols = 1usize
        .checked_shl(bits_per_slot)
        .filter(|_| bits_per_slot < usize::BITS - 1)
        .ok_or_else(|| ChannelError::InvalidDimensions("2^J overflows".into()))?;
    let bytes = cols
        .checked_mul(slot_len)
        .and_then(|e| e.checked_mul(2 * std::mem::size_of::<f64>()))
        .unwrap_or(usize::MAX);
    if bytes > budget_bytes {
        return Err(ChannelError::MemoryBudget {
            rows: slot_len,
            columns: cols,
            bytes,
            budget: budget_bytes,
        });
    }

    let mut rng = substream(seed, 0);
    let mut re = vec![0.0; cols * slot_len];
    let mut im = vec![0.0; cols * slot_len];
    let target = (slot_len as f64).sqrt();
    for k in 0..cols {
        let s = k * slot_len;
        loop {
            let mut norm_sq = 0.0;
            for i in s..s + slot_len {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                re[i] = a;
                im[i] = b;
                norm_sq += a * a + b * b;
            }
            if norm_sq > 0.0 {
                let scale = target / norm_sq.sqrt();
                for i in s..s + slot_len {
                    re[i] *= scale;
                    im[i] *= scale;
                }
                break;
            }
        }
    }
    Ok(CodingMatrix {
        rows: slot_len,
        cols,
        re,
        im,
    })
}

/// Messages chosen by the active users of one slot, with their large-scale
/// fading coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActiveSet {
    pub messages: Vec<usize>,
    pub gains: Vec<f64>,
}

impl ActiveSet {
    /// All users at unit gain.
    pub fn unit_gain(messages: Vec<usize>) -> Self {
        let gains = vec![1.0; messages.len()];
        Self { messages, gains }
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }
}

/// Nonnegative activity vector `γ`, one entry per codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaVector(pub Vec<f64>);

impl GammaVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices with a strictly positive entry.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &g)| g > 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn l1_distance(&self, other: &GammaVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|g| g.abs()).sum()
    }
}

/// `γ_r = Σ_k g_k [i_k = r]`. Users that share a codeword add their powers.
pub fn build_gamma(active: &ActiveSet, bits_per_slot: u32) -> Result<GammaVector, ChannelError> {
    let columns = 1usize << bits_per_slot;
    if active.gains.len() != active.messages.len() {
        return Err(ChannelError::GainCount {
            messages: active.messages.len(),
            gains: active.gains.len(),
        });
    }
    let mut gamma = vec![0.0; columns];
    for (&m, &g) in active.messages.iter().zip(&active.gains) {
        if m >= columns {
            return Err(ChannelError::MessageOutOfRange { index: m, columns });
        }
        if !(g > 0.0 && g.is_finite()) {
            return Err(ChannelError::InvalidParameter(format!("gain {g} must be positive")));
        }
        gamma[m] += g;
    }
    Ok(GammaVector(gamma))
}

/// Received `L × M` block of one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotObservation {
    pub y: DMatrix<Complex64>,
}

impl SlotObservation {
    pub fn rows(&self) -> usize {
        self.y.nrows()
    }

    pub fn antennas(&self) -> usize {
        self.y.ncols()
    }
}

/// Synthesizes one slot. The noise block is drawn first, then one channel row
/// per active codeword in increasing index order, all from the stream `seed`.
pub fn synthesize_slot(
    codebook: &CodingMatrix,
    gamma: &GammaVector,
    num_antennas: usize,
    noise_var: f64,
    power: f64,
    seed: u64,
) -> Result<SlotObservation, ChannelError> {
    if gamma.len() != codebook.cols() {
        return Err(ChannelError::GammaLength {
            expected: codebook.cols(),
            got: gamma.len(),
        });
    }
    if num_antennas == 0 {
        return Err(ChannelError::InvalidDimensions("num_antennas must be positive".into()));
    }
    if !(noise_var >= 0.0 && noise_var.is_finite()) || !(power > 0.0 && power.is_finite()) {
        return Err(ChannelError::InvalidParameter(
            "noise_var must be nonnegative and power positive".into(),
        ));
    }
    if gamma.values().iter().any(|&g| g < 0.0 || !g.is_finite()) {
        return Err(ChannelError::InvalidParameter("gamma must be nonnegative".into()));
    }

    let l = codebook.rows();
    let m = num_antennas;
    let mut rng = substream(seed, 0);
    // row-major L × M accumulators
    let mut yr = vec![0.0; l * m];
    let mut yi = vec![0.0; l * m];
    let noise_sd = (noise_var / 2.0).sqrt();
    for (r, i) in yr.iter_mut().zip(yi.iter_mut()) {
        *r = noise_sd * rng.sample::<f64, _>(StandardNormal);
        *i = noise_sd * rng.sample::<f64, _>(StandardNormal);
    }

    let unit_sd = std::f64::consts::FRAC_1_SQRT_2;
    let mut hr = vec![0.0; m];
    let mut hi = vec![0.0; m];
    for (k, &g) in gamma.values().iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        let amp = (power * g).sqrt();
        for (a, b) in hr.iter_mut().zip(hi.iter_mut()) {
            *a = unit_sd * rng.sample::<f64, _>(StandardNormal);
            *b = unit_sd * rng.sample::<f64, _>(StandardNormal);
        }
        let (ar, ai) = codebook.column_parts(k);
        for i in 0..l {
            let (cr, ci) = (amp * ar[i], amp * ai[i]);
            let row_r = &mut yr[i * m..(i + 1) * m];
            let row_i = &mut yi[i * m..(i + 1) * m];
            for (((yr, yi), &h_r), &h_i) in row_r.iter_mut().zip(row_i.iter_mut()).zip(&hr).zip(&hi) {
                *yr += cr * h_r - ci * h_i;
                *yi += cr * h_i + ci * h_r;
            }
        }
    }
    let y = DMatrix::from_fn(l, m, |i, j| Complex64::new(yr[i * m + j], yi[i * m + j]));
    Ok(SlotObservation { y })
}

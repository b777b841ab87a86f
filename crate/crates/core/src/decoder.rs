//! Covariance-based activity detection.
//!
//! The columns of `Y` are i.i.d. `CN(0, Σ(γ))` with
//! `Σ(γ) = A diag(γ) Aᴴ + σ² I`, so `γ` can be fitted to the sample covariance
//! `Σ̂ = YYᴴ/M` alone. Two objectives are supported:
//!
//! - maximum likelihood, `log det Σ(γ) + tr(Σ(γ)⁻¹ Σ̂)`;
//! - nonnegative least squares, `‖Σ(γ) − Σ̂‖²_F`.
//!
//! Both are minimized one coordinate at a time with a closed-form step that
//! is clamped at `−γ_k`, starting from `γ = 0`. The ML solver keeps `Σ⁻¹`
//! current by Sherman–Morrison updates and re-derives it from scratch every
//! `resync_period` sweeps.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::channel::{CodingMatrix, GammaVector, SlotObservation};
use crate::error::DecoderError;
use crate::herm::Herm;
use crate::rng::substream;

/// Sample covariance `YYᴴ/M`, stored Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCovariance {
    inner: Herm,
}

impl SampleCovariance {
    /// Takes the Hermitian part of `m`.
    pub fn from_matrix(m: &DMatrix<Complex64>) -> Self {
        Self {
            inner: Herm::from_matrix(m),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        self.inner.to_matrix()
    }

    pub(crate) fn herm(&self) -> &Herm {
        &self.inner
    }
}

pub fn sample_covariance(obs: &SlotObservation) -> SampleCovariance {
    let l = obs.rows();
    let m = obs.antennas();
    // rows of Y as contiguous split vectors
    let mut yr = vec![0.0; l * m];
    let mut yi = vec![0.0; l * m];
    for j in 0..m {
        for i in 0..l {
            let z = obs.y[(i, j)];
            yr[i * m + j] = z.re;
            yi[i * m + j] = z.im;
        }
    }
    let scale = 1.0 / m as f64;
    let inner = Herm::from_upper(l, |i, j| {
        let (ar, ai) = (&yr[i * m..(i + 1) * m], &yi[i * m..(i + 1) * m]);
        let (br, bi) = (&yr[j * m..(j + 1) * m], &yi[j * m..(j + 1) * m]);
        let mut re = 0.0;
        let mut im = 0.0;
        for t in 0..m {
            // y_i conj(y_j)
            re += ar[t] * br[t] + ai[t] * bi[t];
            im += ai[t] * br[t] - ar[t] * bi[t];
        }
        Complex64::new(re * scale, im * scale)
    });
    SampleCovariance { inner }
}

/// Current activity estimate together with the inverse of `Σ(γ)`.
#[derive(Debug, Clone)]
pub struct DecoderState {
    gamma: GammaVector,
    sigma_inv: Herm,
    sigma2: f64,
}

impl DecoderState {
    /// `γ = 0`, `Σ⁻¹ = σ⁻² I`.
    pub fn initial(codebook: &CodingMatrix, sigma2: f64) -> Result<Self, DecoderError> {
        check_sigma2(sigma2)?;
        Ok(Self {
            gamma: GammaVector::zeros(codebook.cols()),
            sigma_inv: Herm::scaled_identity(codebook.rows(), 1.0 / sigma2),
            sigma2,
        })
    }

    /// State at an arbitrary `γ ≥ 0`, with `Σ(γ)⁻¹` computed by factorization.
    pub fn from_gamma(codebook: &CodingMatrix, gamma: GammaVector, sigma2: f64) -> Result<Self, DecoderError> {
        check_sigma2(sigma2)?;
        if gamma.len() != codebook.cols() {
            return Err(DecoderError::Dimension(format!(
                "gamma has {} entries, codebook {} columns",
                gamma.len(),
                codebook.cols()
            )));
        }
        if gamma.values().iter().any(|&g| !(g >= 0.0 && g.is_finite())) {
            return Err(DecoderError::Dimension("gamma must be nonnegative".into()));
        }
        let (sigma_inv, _) = invert_hpd(&covariance_herm(codebook, gamma.values(), sigma2))?;
        Ok(Self {
            gamma,
            sigma_inv,
            sigma2,
        })
    }

    pub fn gamma(&self) -> &GammaVector {
        &self.gamma
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sigma_inv(&self) -> DMatrix<Complex64> {
        self.sigma_inv.to_matrix()
    }

    /// Recomputes `Σ⁻¹` from `γ`; returns the relative Frobenius distance
    /// between the maintained and the fresh inverse.
    pub fn resync(&mut self, codebook: &CodingMatrix) -> Result<f64, DecoderError> {
        let (fresh, _) = invert_hpd(&covariance_herm(codebook, self.gamma.values(), self.sigma2))?;
        let drift = relative_distance(&self.sigma_inv, &fresh);
        self.sigma_inv = fresh;
        Ok(drift)
    }
}

fn check_sigma2(sigma2: f64) -> Result<(), DecoderError> {
    if sigma2 > 0.0 && sigma2.is_finite() {
        Ok(())
    } else {
        Err(DecoderError::Settings(format!("noise variance must be positive, got {sigma2}")))
    }
}

fn relative_distance(a: &Herm, b: &Herm) -> f64 {
    let mut d = a.clone();
    d.sub_assign(b);
    (d.frob_sq() / b.frob_sq()).sqrt()
}

/// `Σ(γ) = A diag(γ) Aᴴ + σ² I`.
fn covariance_herm(codebook: &CodingMatrix, gamma: &[f64], sigma2: f64) -> Herm {
    let mut s = Herm::scaled_identity(codebook.rows(), sigma2);
    for (k, &g) in gamma.iter().enumerate() {
        if g != 0.0 {
            let (ar, ai) = codebook.column_parts(k);
            s.rank1(g, ar, ai);
        }
    }
    s
}

/// Dense `Σ(γ)`.
pub fn covariance_matrix(codebook: &CodingMatrix, gamma: &GammaVector, sigma2: f64) -> DMatrix<Complex64> {
    covariance_herm(codebook, gamma.values(), sigma2).to_matrix()
}

/// Inverse and log-determinant of a Hermitian positive definite matrix.
fn invert_hpd(h: &Herm) -> Result<(Herm, f64), DecoderError> {
    let chol = h
        .to_matrix()
        .cholesky()
        .ok_or(DecoderError::NotPositiveDefinite)?;
    let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.re.ln()).sum::<f64>();
    Ok((Herm::from_matrix(&chol.inverse()), log_det))
}

/// ML objective `log det Σ(γ) + tr(Σ(γ)⁻¹ Σ̂)` evaluated from the maintained inverse.
pub fn ml_cost(state: &DecoderState, sc: &SampleCovariance) -> Result<f64, DecoderError> {
    let inv = state.sigma_inv.to_matrix();
    let chol = inv.clone().cholesky().ok_or(DecoderError::NotPositiveDefinite)?;
    let log_det_inv = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.re.ln()).sum::<f64>();
    let tr = (inv * sc.to_matrix()).trace().re;
    Ok(-log_det_inv + tr)
}

/// Clamped ML coordinate step for codeword `k`; does not modify the state.
pub fn ml_coordinate_step(state: &DecoderState, codebook: &CodingMatrix, sc: &SampleCovariance, k: usize) -> f64 {
    let l = codebook.rows();
    let (ar, ai) = codebook.column_parts(k);
    let mut vr = vec![0.0; l];
    let mut vi = vec![0.0; l];
    state.sigma_inv.matvec(ar, ai, &mut vr, &mut vi);
    let q = dot_re(ar, ai, &vr, &vi);
    let p = sc.herm().quad(&vr, &vi);
    ((p - q) / (q * q)).max(-state.gamma.0[k])
}

/// Clamped NNLS coordinate step for codeword `k`; does not modify the state.
pub fn nnls_coordinate_step(state: &DecoderState, codebook: &CodingMatrix, sc: &SampleCovariance, k: usize) -> f64 {
    let (ar, ai) = codebook.column_parts(k);
    let norm_sq = dot_re(ar, ai, ar, ai);
    // aᴴ Σ(γ) a = σ²‖a‖² + Σ_j γ_j |a_jᴴ a|²
    let mut model = state.sigma2 * norm_sq;
    for (j, &g) in state.gamma.0.iter().enumerate() {
        if g != 0.0 {
            let (br, bi) = codebook.column_parts(j);
            let (cr, ci) = inner(br, bi, ar, ai);
            model += g * (cr * cr + ci * ci);
        }
    }
    let observed = sc.herm().quad(ar, ai);
    ((observed - model) / (norm_sq * norm_sq)).max(-state.gamma.0[k])
}

/// Applies `γ_k += d` and the matching Sherman–Morrison update of `Σ⁻¹`.
pub fn rank_one_inverse_update(
    state: &mut DecoderState,
    codebook: &CodingMatrix,
    k: usize,
    step: f64,
) -> Result<(), DecoderError> {
    if step == 0.0 {
        return Ok(());
    }
    let updated = state.gamma.0[k] + step;
    if updated < 0.0 || !updated.is_finite() {
        return Err(DecoderError::NegativeStep { index: k, step });
    }
    let l = codebook.rows();
    let (ar, ai) = codebook.column_parts(k);
    let mut vr = vec![0.0; l];
    let mut vi = vec![0.0; l];
    state.sigma_inv.matvec(ar, ai, &mut vr, &mut vi);
    let q = dot_re(ar, ai, &vr, &vi);
    let denom = 1.0 + step * q;
    if denom <= 0.0 {
        return Err(DecoderError::InverseDrift(denom));
    }
    state.sigma_inv.rank1(-step / denom, &vr, &vi);
    state.gamma.0[k] = updated;
    Ok(())
}

/// `Re(xᴴ y)`.
#[inline]
fn dot_re(xr: &[f64], xi: &[f64], yr: &[f64], yi: &[f64]) -> f64 {
    xr.iter().zip(yr).map(|(a, b)| a * b).sum::<f64>() + xi.iter().zip(yi).map(|(a, b)| a * b).sum::<f64>()
}

/// `xᴴ y`.
fn inner(xr: &[f64], xi: &[f64], yr: &[f64], yi: &[f64]) -> (f64, f64) {
    let mut re = 0.0;
    let mut im = 0.0;
    for t in 0..xr.len() {
        re += xr[t] * yr[t] + xi[t] * yi[t];
        im += xr[t] * yi[t] - xi[t] * yr[t];
    }
    (re, im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Ml,
    Nnls,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Ml => "ml",
            Method::Nnls => "nnls",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ml" => Ok(Method::Ml),
            "nnls" => Ok(Method::Nnls),
            other => Err(format!("unknown decoder {other:?}, expected ml or nnls")),
        }
    }
}

/// Coordinate visiting order within a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// Fresh uniform permutation every sweep.
    #[default]
    Random,
    /// `0, 1, …, 2^J − 1` every sweep.
    Cyclic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoderSettings {
    pub method: Method,
    pub max_sweeps: usize,
    /// Stop once a sweep lowers the objective by less than this fraction.
    pub rel_tol: f64,
    pub schedule: Schedule,
    /// Sweeps between recomputations of the maintained matrices.
    pub resync_period: usize,
    /// Seed of the random schedule.
    pub seed: u64,
}

impl Default for DecoderSettings {
    fn default() -> Self {
        Self {
            method: Method::Ml,
            max_sweeps: 15,
            rel_tol: 1e-6,
            schedule: Schedule::Random,
            resync_period: 10,
            seed: 0,
        }
    }
}

impl DecoderSettings {
    pub fn validate(&self) -> Result<(), DecoderError> {
        if self.max_sweeps == 0 {
            return Err(DecoderError::Settings("max_sweeps must be at least 1".into()));
        }
        if !(self.rel_tol >= 0.0 && self.rel_tol.is_finite()) {
            return Err(DecoderError::Settings("rel_tol must be nonnegative".into()));
        }
        if self.resync_period == 0 {
            return Err(DecoderError::Settings("resync_period must be at least 1".into()));
        }
        Ok(())
    }
}

/// Result of [`coordinate_descent`].
#[derive(Debug, Clone)]
pub struct Decoded {
    pub gamma: GammaVector,
    /// Sweeps actually run.
    pub sweeps: usize,
    /// Objective before the first sweep and after each sweep.
    pub objective: Vec<f64>,
    /// Steps whose objective change exceeded `1e-9` relative.
    pub monotonicity_violations: usize,
    /// Largest relative drift of a maintained matrix seen at a resync.
    pub max_resync_drift: f64,
}

/// Minimizes the selected objective by coordinate descent from `γ = 0`.
pub fn coordinate_descent(
    sc: &SampleCovariance,
    codebook: &CodingMatrix,
    sigma2: f64,
    settings: &DecoderSettings,
) -> Result<Decoded, DecoderError> {
    settings.validate()?;
    check_sigma2(sigma2)?;
    if sc.dim() != codebook.rows() {
        return Err(DecoderError::Dimension(format!(
            "covariance is {}x{}, codebook has {} rows",
            sc.dim(),
            sc.dim(),
            codebook.rows()
        )));
    }
    match settings.method {
        Method::Ml => run(MlSolver::new(codebook, sc, sigma2), codebook.cols(), settings),
        Method::Nnls => run(NnlsSolver::new(codebook, sc, sigma2), codebook.cols(), settings),
    }
}

trait Solver {
    fn objective(&self) -> f64;
    /// One coordinate update; returns the objective change.
    fn step(&mut self, k: usize) -> Result<f64, DecoderError>;
    /// Recomputes maintained matrices and the objective; returns drift.
    fn resync(&mut self) -> Result<f64, DecoderError>;
    fn into_gamma(self) -> Vec<f64>;
}

fn run<S: Solver>(mut solver: S, n: usize, settings: &DecoderSettings) -> Result<Decoded, DecoderError> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = substream(settings.seed, 0);
    let mut objective = vec![solver.objective()];
    let mut violations = 0;
    let mut max_drift = 0.0f64;
    let mut sweeps = 0;
    while sweeps < settings.max_sweeps {
        if settings.schedule == Schedule::Random {
            order.shuffle(&mut rng);
        }
        let before = solver.objective();
        for &k in &order {
            let delta = match solver.step(k) {
                Ok(d) => d,
                Err(DecoderError::InverseDrift(_)) => {
                    max_drift = max_drift.max(solver.resync()?);
                    solver.step(k)?
                }
                Err(e) => return Err(e),
            };
            if delta > 1e-9 * solver.objective().abs().max(1.0) {
                violations += 1;
            }
        }
        sweeps += 1;
        if sweeps % settings.resync_period == 0 {
            max_drift = max_drift.max(solver.resync()?);
        }
        let after = solver.objective();
        objective.push(after);
        let decrease = (before - after) / before.abs().max(f64::MIN_POSITIVE);
        if decrease < settings.rel_tol {
            break;
        }
    }
    Ok(Decoded {
        gamma: GammaVector(solver.into_gamma()),
        sweeps,
        objective,
        monotonicity_violations: violations,
        max_resync_drift: max_drift,
    })
}

struct MlSolver<'a> {
    codebook: &'a CodingMatrix,
    sc: &'a SampleCovariance,
    sigma2: f64,
    gamma: Vec<f64>,
    sigma_inv: Herm,
    /// `Σ⁻¹ Σ̂ Σ⁻¹ − Σ⁻¹`; its quadratic form at `a_k` is the step numerator.
    excess: Herm,
    cost: f64,
    vr: Vec<f64>,
    vi: Vec<f64>,
    wr: Vec<f64>,
    wi: Vec<f64>,
}

impl<'a> MlSolver<'a> {
    fn new(codebook: &'a CodingMatrix, sc: &'a SampleCovariance, sigma2: f64) -> Self {
        let l = codebook.rows();
        let sigma_inv = Herm::scaled_identity(l, 1.0 / sigma2);
        // (Σ̂ − σ²I)/σ⁴, exactly zero when Σ̂ = σ²I
        let mut centered = sc.herm().clone();
        centered.add_identity(-sigma2);
        let excess = Herm::from_matrix(&(centered.to_matrix() / Complex64::from(sigma2 * sigma2)));
        let cost = l as f64 * sigma2.ln() + sc.herm().trace() / sigma2;
        Self {
            codebook,
            sc,
            sigma2,
            gamma: vec![0.0; codebook.cols()],
            sigma_inv,
            excess,
            cost,
            vr: vec![0.0; l],
            vi: vec![0.0; l],
            wr: vec![0.0; l],
            wi: vec![0.0; l],
        }
    }
}

impl Solver for MlSolver<'_> {
    fn objective(&self) -> f64 {
        self.cost
    }

    fn step(&mut self, k: usize) -> Result<f64, DecoderError> {
        let (ar, ai) = self.codebook.column_parts(k);
        let g = self.gamma[k];
        let num = self.excess.quad(ar, ai);
        if g == 0.0 && num <= 0.0 {
            return Ok(0.0);
        }
        self.sigma_inv.matvec(ar, ai, &mut self.vr, &mut self.vi);
        let q = dot_re(ar, ai, &self.vr, &self.vi);
        let step = (num / (q * q)).max(-g);
        if step == 0.0 {
            return Ok(0.0);
        }
        let denom = 1.0 + step * q;
        if denom <= 0.0 || q <= 0.0 {
            return Err(DecoderError::InverseDrift(denom));
        }
        let p = num + q;
        // w = Σ⁻¹Σ̂Σ⁻¹ a = excess·a + v
        self.excess.matvec(ar, ai, &mut self.wr, &mut self.wi);
        for t in 0..self.wr.len() {
            self.wr[t] += self.vr[t];
            self.wi[t] += self.vi[t];
        }
        let c = step / denom;
        self.sigma_inv.rank1(-c, &self.vr, &self.vi);
        self.excess.rank2(c * c * p + c, -c, &self.vr, &self.vi, &self.wr, &self.wi);
        self.gamma[k] = if step == -g { 0.0 } else { g + step };
        let delta = denom.ln() - step * p / denom;
        self.cost += delta;
        Ok(delta)
    }

    fn resync(&mut self) -> Result<f64, DecoderError> {
        let sigma = covariance_herm(self.codebook, &self.gamma, self.sigma2);
        let (inv, log_det) = invert_hpd(&sigma)?;
        let drift = relative_distance(&self.sigma_inv, &inv);
        let inv_m = inv.to_matrix();
        let sc_m = self.sc.to_matrix();
        let left = &inv_m * &sc_m;
        self.cost = log_det + left.trace().re;
        self.excess = Herm::from_matrix(&(&left * &inv_m - &inv_m));
        self.sigma_inv = inv;
        Ok(drift)
    }

    fn into_gamma(self) -> Vec<f64> {
        self.gamma
    }
}

struct NnlsSolver<'a> {
    codebook: &'a CodingMatrix,
    sc: &'a SampleCovariance,
    sigma2: f64,
    gamma: Vec<f64>,
    /// `Σ̂ − Σ(γ)`.
    residual: Herm,
    objective: f64,
    norms: Vec<f64>,
}

impl<'a> NnlsSolver<'a> {
    fn new(codebook: &'a CodingMatrix, sc: &'a SampleCovariance, sigma2: f64) -> Self {
        let mut residual = sc.herm().clone();
        residual.add_identity(-sigma2);
        let objective = residual.frob_sq();
        let norms = (0..codebook.cols())
            .map(|k| {
                let (ar, ai) = codebook.column_parts(k);
                dot_re(ar, ai, ar, ai)
            })
            .collect();
        Self {
            codebook,
            sc,
            sigma2,
            gamma: vec![0.0; codebook.cols()],
            residual,
            objective,
            norms,
        }
    }
}

impl Solver for NnlsSolver<'_> {
    fn objective(&self) -> f64 {
        self.objective
    }

    fn step(&mut self, k: usize) -> Result<f64, DecoderError> {
        let (ar, ai) = self.codebook.column_parts(k);
        let g = self.gamma[k];
        let num = self.residual.quad(ar, ai);
        let n4 = self.norms[k] * self.norms[k];
        let step = (num / n4).max(-g);
        if step == 0.0 {
            return Ok(0.0);
        }
        self.residual.rank1(-step, ar, ai);
        self.gamma[k] = if step == -g { 0.0 } else { g + step };
        let delta = step * (step * n4 - 2.0 * num);
        self.objective += delta;
        Ok(delta)
    }

    fn resync(&mut self) -> Result<f64, DecoderError> {
        let mut fresh = self.sc.herm().clone();
        fresh.sub_assign(&covariance_herm(self.codebook, &self.gamma, self.sigma2));
        let drift = relative_distance(&self.residual, &fresh);
        self.objective = fresh.frob_sq();
        self.residual = fresh;
        Ok(drift)
    }

    fn into_gamma(self) -> Vec<f64> {
        self.gamma
    }
}

/// How a support set was selected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupportMode {
    /// Every index with `γ_r ≥ ν`.
    Threshold(f64),
    /// The `K` largest entries, ties to the lower index.
    TopK(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportDecision {
    /// Sorted, unique.
    pub indices: Vec<usize>,
    pub mode: SupportMode,
}

pub fn threshold_support(gamma: &GammaVector, nu: f64) -> SupportDecision {
    let indices = gamma
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &g)| g >= nu)
        .map(|(i, _)| i)
        .collect();
    SupportDecision {
        indices,
        mode: SupportMode::Threshold(nu),
    }
}

/// `k` is clamped to the length of `gamma`.
pub fn topk_support(gamma: &GammaVector, k: usize) -> SupportDecision {
    let g = gamma.values();
    let k = k.min(g.len());
    let mut idx: Vec<usize> = (0..g.len()).collect();
    let by_rank = |a: &usize, b: &usize| g[*b].total_cmp(&g[*a]).then(a.cmp(b));
    if k > 0 && k < idx.len() {
        idx.select_nth_unstable_by(k - 1, by_rank);
    }
    idx.truncate(k);
    idx.sort_unstable();
    SupportDecision {
        indices: idx,
        mode: SupportMode::TopK(k),
    }
}

/// `‖𝔸γ − w‖²` with `𝔸_{:,k} = vec(a_k a_kᴴ)` and `w = vec(Σ̂ − σ² I)`.
///
/// `𝔸γ` is accumulated column by column into one `L²` vector; the `L² × 2^J`
/// matrix is never formed.
pub fn khatri_rao_objective(gamma: &GammaVector, codebook: &CodingMatrix, sc: &SampleCovariance, sigma2: f64) -> f64 {
    let l = codebook.rows();
    let mut stacked = vec![Complex64::new(0.0, 0.0); l * l];
    for (k, &g) in gamma.values().iter().enumerate() {
        if g == 0.0 {
            continue;
        }
        let a = codebook.column(k);
        for (j, aj) in a.iter().enumerate() {
            let caj = aj.conj() * g;
            for (i, ai) in a.iter().enumerate() {
                stacked[j * l + i] += ai * caj;
            }
        }
    }
    let s = sc.to_matrix();
    let mut total = 0.0;
    for j in 0..l {
        for i in 0..l {
            let mut w = s[(i, j)];
            if i == j {
                w -= sigma2;
            }
            total += (stacked[j * l + i] - w).norm_sqr();
        }
    }
    total
}

/// `‖Σ(γ) − Σ̂‖²_F` by dense evaluation.
pub fn frobenius_objective(gamma: &GammaVector, codebook: &CodingMatrix, sc: &SampleCovariance, sigma2: f64) -> f64 {
    let a = codebook.to_matrix();
    let scaled = DMatrix::from_fn(a.nrows(), a.ncols(), |i, k| a[(i, k)] * gamma.values()[k]);
    let mut sigma = scaled * a.adjoint();
    for i in 0..a.nrows() {
        sigma[(i, i)] += sigma2;
    }
    (sigma - sc.to_matrix()).norm_squared()
}

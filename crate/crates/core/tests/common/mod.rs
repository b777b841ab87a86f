//! Independent oracles shared by the integration tests. Everything here works
//! on dense nalgebra matrices and never touches the crate's maintained
//! inverses or incremental updates.
#![allow(dead_code)]

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use ura_core::channel::{sample_coding_matrix, CodingMatrix, GammaVector};
use ura_core::decoder::SampleCovariance;
use ura_core::tree::{outer_encode, Payload, SlotLists, TreeCodebook};
use ura_core::Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `A diag(γ) Aᴴ + σ² I`.
pub fn dense_sigma(a: &DMatrix<Complex64>, gamma: &[f64], sigma2: f64) -> DMatrix<Complex64> {
    let l = a.nrows();
    let mut s = DMatrix::<Complex64>::identity(l, l) * Complex64::from(sigma2);
    for (k, &g) in gamma.iter().enumerate() {
        if g != 0.0 {
            let col = a.column(k);
            s += (col * col.adjoint()) * Complex64::from(g);
        }
    }
    s
}

/// `log det Σ + tr(Σ⁻¹ Σ̂)` by Cholesky.
pub fn dense_ml_cost(sigma: &DMatrix<Complex64>, sc: &DMatrix<Complex64>) -> f64 {
    let chol = sigma.clone().cholesky().expect("positive definite");
    let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.re.ln()).sum::<f64>();
    log_det + chol.solve(sc).trace().re
}

pub fn dense_frobenius(sigma: &DMatrix<Complex64>, sc: &DMatrix<Complex64>) -> f64 {
    (sigma - sc).norm_squared()
}

/// Minimizer of `f` over `[0, hi]`: a 1e-2 scan followed by a 1e-4 scan
/// around the best coarse point. Both objectives are unimodal along one
/// coordinate, so the refinement cannot miss the global minimum.
pub fn grid_argmin(hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let scan = |lo: f64, hi: f64, step: f64, f: &mut dyn FnMut(f64) -> f64| {
        let n = ((hi - lo) / step).round() as usize;
        let mut best = (lo, f(lo));
        for i in 1..=n {
            let t = lo + i as f64 * step;
            let v = f(t);
            if v < best.1 {
                best = (t, v);
            }
        }
        best.0
    };
    let coarse = scan(0.0, hi, 1e-2, &mut f);
    let lo = (coarse - 2e-2).max(0.0);
    scan(lo, (coarse + 2e-2).min(hi), 1e-4, &mut f)
}

/// A small random decoding problem: codebook, sampled covariance from a
/// `k`-sparse unit-ish γ₀, noise variance and γ₀ itself.
pub struct Instance {
    pub codebook: CodingMatrix,
    pub a: DMatrix<Complex64>,
    pub sc: SampleCovariance,
    pub sigma2: f64,
    pub gamma0: Vec<f64>,
}

pub fn random_instance(l: usize, j: u32, k: usize, m: usize, seed: u64) -> Instance {
    let codebook = sample_coding_matrix(l, j, seed).unwrap();
    let a = codebook.to_matrix();
    let n = codebook.cols();
    let mut r = rng(seed ^ 0x5eed);
    let sigma2 = r.random_range(0.2..1.0);
    let mut gamma0 = vec![0.0; n];
    while gamma0.iter().filter(|&&g| g > 0.0).count() < k {
        gamma0[r.random_range(0..n)] = r.random_range(0.5..2.0);
    }
    // Y = Σ^{1/2}-free construction: columns a_k sqrt(γ_k) h + z
    let cn = |r: &mut ChaCha8Rng, var: f64| {
        let s = (var / 2.0).sqrt();
        let re: f64 = StandardNormal.sample(r);
        let im: f64 = StandardNormal.sample(r);
        Complex64::new(s * re, s * im)
    };
    let mut y = DMatrix::from_fn(l, m, |_, _| cn(&mut r, sigma2));
    for (idx, &g) in gamma0.iter().enumerate() {
        if g > 0.0 {
            let h = DVector::from_fn(m, |_, _| cn(&mut r, g));
            y += a.column(idx) * h.transpose();
        }
    }
    let sc = SampleCovariance::from_matrix(&((&y * y.adjoint()) / Complex64::from(m as f64)));
    Instance { codebook, a, sc, sigma2, gamma0 }
}

/// A random nonnegative γ with `k` nonzero entries, used as a decoder state.
pub fn random_gamma(n: usize, k: usize, r: &mut ChaCha8Rng) -> GammaVector {
    let mut g = vec![0.0; n];
    for _ in 0..k {
        g[r.random_range(0..n)] = r.random_range(0.1..1.5);
    }
    GammaVector(g)
}

pub fn rel_frob(x: &DMatrix<Complex64>, reference: &DMatrix<Complex64>) -> f64 {
    (x - reference).norm() / reference.norm()
}

/// Every sequence in `S_1 × … × S_S` whose concatenated info bits re-encode to
/// exactly that sequence.
pub fn brute_force_paths(lists: &SlotLists, codebook: &TreeCodebook) -> BTreeSet<Payload> {
    let profile = codebook.profile();
    let sets: Vec<Vec<u32>> = lists.0.iter().map(|s| s.iter().copied().collect()).collect();
    let mut out = BTreeSet::new();
    if sets.iter().any(|s| s.is_empty()) {
        return out;
    }
    let mut idx = vec![0usize; sets.len()];
    loop {
        let words: Vec<u32> = idx.iter().zip(&sets).map(|(&i, s)| s[i]).collect();
        let mut payload: Payload = 0;
        for (w, (&b, &p)) in words.iter().zip(profile.info_bits().iter().zip(profile.parity_bits())) {
            payload = (payload << b) | Payload::from(w >> p);
        }
        if outer_encode(payload, codebook).unwrap() == words {
            out.insert(payload);
        }
        // odometer
        let mut s = 0;
        loop {
            if s == sets.len() {
                return out;
            }
            idx[s] += 1;
            if idx[s] < sets[s].len() {
                break;
            }
            idx[s] = 0;
            s += 1;
        }
    }
}

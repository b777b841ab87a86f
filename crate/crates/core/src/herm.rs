//! Dense Hermitian matrices in split real/imaginary row-major storage.
//!
//! Only the upper triangle (`j >= i`) is authoritative; the strict lower
//! triangle is never read. All kernels walk contiguous row tails so the inner
//! loops vectorize.

use nalgebra::DMatrix;
use num_complex::Complex64;

const LANES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Herm {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Herm {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            re: vec![0.0; n * n],
            im: vec![0.0; n * n],
        }
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut h = Self::zeros(n);
        for i in 0..n {
            h.re[i * n + i] = s;
        }
        h
    }

    /// Builds from a function of the upper-triangle position. Diagonal
    /// imaginary parts are dropped.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut h = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                h.re[i * n + j] = v.re;
                h.im[i * n + j] = if i == j { 0.0 } else { v.im };
            }
        }
        h
    }

    /// Hermitian part `(X + Xᴴ)/2` of a square matrix.
    pub fn from_matrix(x: &DMatrix<Complex64>) -> Self {
        let n = x.nrows();
        assert_eq!(n, x.ncols(), "square matrix required");
        let mut h = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = (x[(i, j)] + x[(j, i)].conj()) * 0.5;
                h.re[i * n + j] = v.re;
                h.im[i * n + j] = if i == j { 0.0 } else { v.im };
            }
        }
        h
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let n = self.n;
        if i <= j {
            Complex64::new(self.re[i * n + j], self.im[i * n + j])
        } else {
            Complex64::new(self.re[j * n + i], -self.im[j * n + i])
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.re[i * self.n + i]).sum()
    }

    pub fn add_identity(&mut self, s: f64) {
        for i in 0..self.n {
            self.re[i * self.n + i] += s;
        }
    }

    /// Squared Frobenius norm.
    pub fn frob_sq(&self) -> f64 {
        let n = self.n;
        let mut diag = 0.0;
        let mut off = 0.0;
        for i in 0..n {
            let d = self.re[i * n + i];
            diag += d * d;
            let r = &self.re[i * n + i + 1..(i + 1) * n];
            let m = &self.im[i * n + i + 1..(i + 1) * n];
            off += r.iter().zip(m).map(|(a, b)| a * a + b * b).sum::<f64>();
        }
        diag + 2.0 * off
    }

    /// Quadratic form `xᴴ H x` (real for Hermitian `H`).
    pub fn quad(&self, xr: &[f64], xi: &[f64]) -> f64 {
        let n = self.n;
        debug_assert!(xr.len() == n && xi.len() == n);
        let mut total = 0.0;
        for i in 0..n {
            let row = i * n;
            total += self.re[row + i] * (xr[i] * xr[i] + xi[i] * xi[i]);
            let (tr, ti) = cdot(
                &self.re[row + i + 1..row + n],
                &self.im[row + i + 1..row + n],
                &xr[i + 1..],
                &xi[i + 1..],
            );
            total += 2.0 * (xr[i] * tr + xi[i] * ti);
        }
        total
    }

    /// `y = H x`.
    pub fn matvec(&self, xr: &[f64], xi: &[f64], yr: &mut [f64], yi: &mut [f64]) {
        let n = self.n;
        yr.iter_mut().for_each(|v| *v = 0.0);
        yi.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            let row = i * n;
            let d = self.re[row + i];
            let (xri, xii) = (xr[i], xi[i]);
            let hr = &self.re[row + i + 1..row + n];
            let hi = &self.im[row + i + 1..row + n];
            let (tr, ti) = cdot(hr, hi, &xr[i + 1..], &xi[i + 1..]);
            yr[i] += d * xri + tr;
            yi[i] += d * xii + ti;
            // lower triangle: y_j += conj(H_ij) x_i
            for (((yrj, yij), &a), &b) in yr[i + 1..]
                .iter_mut()
                .zip(yi[i + 1..].iter_mut())
                .zip(hr)
                .zip(hi)
            {
                *yrj += a * xri + b * xii;
                *yij += a * xii - b * xri;
            }
        }
    }

    /// `H += c · v vᴴ`.
    pub fn rank1(&mut self, c: f64, vr: &[f64], vi: &[f64]) {
        let n = self.n;
        for i in 0..n {
            let row = i * n;
            let (ar, ai) = (c * vr[i], c * vi[i]);
            let hr = &mut self.re[row + i..row + n];
            let hi = &mut self.im[row + i..row + n];
            for (((r, m), &br), &bi) in hr.iter_mut().zip(hi.iter_mut()).zip(&vr[i..]).zip(&vi[i..]) {
                // c v_i conj(v_j)
                *r += ar * br + ai * bi;
                *m += ai * br - ar * bi;
            }
            self.im[row + i] = 0.0;
        }
    }

    /// `H += alpha · v vᴴ + beta · (v wᴴ + w vᴴ)`.
    pub fn rank2(&mut self, alpha: f64, beta: f64, vr: &[f64], vi: &[f64], wr: &[f64], wi: &[f64]) {
        let n = self.n;
        for i in 0..n {
            let row = i * n;
            // coefficients of conj(v_j) and conj(w_j) in row i
            let pr = alpha * vr[i] + beta * wr[i];
            let pi = alpha * vi[i] + beta * wi[i];
            let qr = beta * vr[i];
            let qi = beta * vi[i];
            let hr = &mut self.re[row + i..row + n];
            let hi = &mut self.im[row + i..row + n];
            for (((((r, m), &vrj), &vij), &wrj), &wij) in hr
                .iter_mut()
                .zip(hi.iter_mut())
                .zip(&vr[i..])
                .zip(&vi[i..])
                .zip(&wr[i..])
                .zip(&wi[i..])
            {
                *r += pr * vrj + pi * vij + qr * wrj + qi * wij;
                *m += pi * vrj - pr * vij + qi * wrj - qr * wij;
            }
            self.im[row + i] = 0.0;
        }
    }

    pub fn sub_assign(&mut self, other: &Herm) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.re.iter_mut().zip(&other.re) {
            *a -= b;
        }
        for (a, b) in self.im.iter_mut().zip(&other.im) {
            *a -= b;
        }
    }
}

/// `Σ_j h_j x_j` over complex split slices, with independent partial sums so
/// the loop maps onto SIMD lanes.
#[inline]
fn cdot(hr: &[f64], hi: &[f64], xr: &[f64], xi: &[f64]) -> (f64, f64) {
    let len = hr.len();
    let split = len - len % LANES;
    let mut accr = [0.0f64; LANES];
    let mut acci = [0.0f64; LANES];
    for (((a, b), c), d) in hr[..split]
        .chunks_exact(LANES)
        .zip(hi[..split].chunks_exact(LANES))
        .zip(xr[..split].chunks_exact(LANES))
        .zip(xi[..split].chunks_exact(LANES))
    {
        for l in 0..LANES {
            accr[l] += a[l] * c[l] - b[l] * d[l];
            acci[l] += a[l] * d[l] + b[l] * c[l];
        }
    }
    let mut tr = (accr[0] + accr[2]) + (accr[1] + accr[3]);
    let mut ti = (acci[0] + acci[2]) + (acci[1] + acci[3]);
    for j in split..len {
        tr += hr[j] * xr[j] - hi[j] * xi[j];
        ti += hr[j] * xi[j] + hi[j] * xr[j];
    }
    (tr, ti)
}

#[cfg(test)]
fn split(v: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    (v.iter().map(|c| c.re).collect(), v.iter().map(|c| c.im).collect())
}

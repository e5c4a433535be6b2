use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{MhdError, Result};

/// Integer wavevector `(k1, k2, k3)`.
pub type Wavevector = [i64; 3];

/// Signed wavenumber stored at array slot `j` of an axis of length `n`.
#[inline]
pub fn wavenumber(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Array slot holding wavenumber `k` on an axis of length `n`.
#[inline]
pub fn slot(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Wavevector stored at flat index `idx` of an `n^3` array.
#[inline]
pub fn wavevector_at(idx: usize, n: usize) -> Wavevector {
    [
        wavenumber(idx / (n * n), n),
        wavenumber((idx / n) % n, n),
        wavenumber(idx % n, n),
    ]
}

/// Flat index of `-k` given the flat index of `k` (the Nyquist slot wraps onto itself).
#[inline]
pub fn conjugate_slot(idx: usize, n: usize) -> usize {
    let neg = |j: usize| (n - j) % n;
    (neg(idx / (n * n)) * n + neg((idx / n) % n)) * n + neg(idx % n)
}

/// `max(|k1|, |k2|, |k3|)`, the norm used by every truncation in this crate.
#[inline]
pub fn cube_norm(k: Wavevector) -> i64 {
    k[0].abs().max(k[1].abs()).max(k[2].abs())
}

/// Complex Fourier coefficients of one real scalar on the unit torus.
///
/// Coefficients are stored row-major over `(k1, k2, k3)`; along each axis the
/// slots follow the usual DFT order `0, 1, .., N/2-1, -N/2, .., -1`. The field
/// represents `f(x) = sum_k fhat(k) exp(2 pi i k.x)`, so `fhat(0)` is the mean.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(n: usize) -> Self {
        SpectralField {
            n,
            coeffs: vec![Complex64::new(0.0, 0.0); n * n * n],
        }
    }

    pub fn from_coeffs(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != n * n * n {
            return Err(MhdError::Precondition(format!(
                "expected {} coefficients for N = {n}, got {}",
                n * n * n,
                coeffs.len()
            )));
        }
        Ok(SpectralField { n, coeffs })
    }

    /// Build a field by evaluating `f` at every representable wavevector.
    pub fn from_fn(n: usize, mut f: impl FnMut(Wavevector) -> Complex64) -> Self {
        let mut field = SpectralField::zeros(n);
        for idx in 0..field.coeffs.len() {
            field.coeffs[idx] = f(field.wavevector(idx));
        }
        field
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Whether `k` lies in `{-N/2, .., N/2-1}^3`.
    pub fn represents(&self, k: Wavevector) -> bool {
        let half = (self.n / 2) as i64;
        k.iter().all(|&ki| -half <= ki && ki < half)
    }

    /// Flat index of wavevector `k`. Panics if `k` is not representable.
    pub fn index_of(&self, k: Wavevector) -> usize {
        assert!(self.represents(k), "wavevector {k:?} outside N = {}", self.n);
        let n = self.n;
        (slot(k[0], n) * n + slot(k[1], n)) * n + slot(k[2], n)
    }

    /// Wavevector stored at flat index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> Wavevector {
        wavevector_at(idx, self.n)
    }

    /// Flat index of `-k` for the wavevector at `idx` (wrapping the Nyquist slot onto itself).
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        conjugate_slot(idx, self.n)
    }

    pub fn get(&self, k: Wavevector) -> Complex64 {
        self.coeffs[self.index_of(k)]
    }

    pub fn set(&mut self, k: Wavevector, value: Complex64) {
        let idx = self.index_of(k);
        self.coeffs[idx] = value;
    }

    /// Set `fhat(k) = value` and `fhat(-k) = conj(value)`.
    pub fn set_hermitian(&mut self, k: Wavevector, value: Complex64) {
        let idx = self.index_of(k);
        let cidx = self.conjugate_index(idx);
        self.coeffs[idx] = value;
        self.coeffs[cidx] = value.conj();
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// `max_k |fhat(-k) - conj(fhat(k))| / max_k |fhat(k)|`, zero for the zero field.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let worst = (0..self.coeffs.len()).fold(0.0f64, |m, idx| {
            let c = self.coeffs[self.conjugate_index(idx)];
            m.max((c - self.coeffs[idx].conj()).norm())
        });
        worst / scale
    }

    /// Replace the field with its Hermitian part `(fhat(k) + conj(fhat(-k))) / 2`.
    pub fn symmetrize(&mut self) {
        let src = self.coeffs.clone();
        for idx in 0..src.len() {
            let cidx = self.conjugate_index(idx);
            self.coeffs[idx] = (src[idx] + src[cidx].conj()) * 0.5;
        }
    }

    /// Real part of the coefficient inner product, i.e. the L2 inner product of
    /// the represented real fields on the unit torus.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        assert_eq!(self.n, other.n, "resolution mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    /// `sum_k |fhat(k)|^2`, the squared L2 norm by Parseval.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Sum of `|fhat(k)|^2 * weight(k)`.
    pub fn weighted_norm_sq(&self, weight: impl Fn(Wavevector) -> f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| {
                let m = c.norm_sqr();
                if m == 0.0 {
                    0.0
                } else {
                    m * weight(self.wavevector(idx))
                }
            })
            .sum()
    }

    pub fn scale(&mut self, a: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= a);
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: f64, x: &SpectralField) {
        assert_eq!(self.n, x.n, "resolution mismatch");
        self.coeffs
            .iter_mut()
            .zip(&x.coeffs)
            .for_each(|(s, xi)| *s += xi * a);
    }

    pub fn sub(&self, other: &SpectralField) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest `max|k_i|` carrying a nonzero coefficient, `None` for the zero field.
    pub fn support_radius(&self) -> Option<i64> {
        let n = self.n;
        let radius: Vec<i64> = (0..n).map(|j| wavenumber(j, n).abs()).collect();
        let mut best: Option<i64> = None;
        for (r, row) in self.coeffs.chunks(n).enumerate() {
            let outer = radius[r / n].max(radius[r % n]);
            for (i3, c) in row.iter().enumerate() {
                if c.norm_sqr() != 0.0 {
                    let k = outer.max(radius[i3]);
                    best = Some(best.map_or(k, |b| b.max(k)));
                }
            }
        }
        best
    }

    /// Copy onto a grid of `n_new` modes per axis: coefficients whose wavevector is
    /// representable on both grids (excluding either Nyquist plane) are kept, the rest
    /// dropped or zero-filled.
    pub fn resampled(&self, n_new: usize) -> Self {
        let mut out = SpectralField::zeros(n_new);
        let limit = (self.n.min(n_new) / 2) as i64 - 1;
        for idx in 0..self.coeffs.len() {
            let k = self.wavevector(idx);
            if cube_norm(k) <= limit {
                let j = out.index_of(k);
                out.coeffs[j] = self.coeffs[idx];
            }
        }
        out
    }
}

/// Three spectral components of a real vector field on the same lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub components: [SpectralField; 3],
}

impl VectorField {
    pub fn zeros(n: usize) -> Self {
        VectorField {
            components: [
                SpectralField::zeros(n),
                SpectralField::zeros(n),
                SpectralField::zeros(n),
            ],
        }
    }

    pub fn new(c1: SpectralField, c2: SpectralField, c3: SpectralField) -> Result<Self> {
        if c1.n() != c2.n() || c1.n() != c3.n() {
            return Err(MhdError::Precondition(
                "vector components have different resolutions".into(),
            ));
        }
        Ok(VectorField {
            components: [c1, c2, c3],
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.components[0].n()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SpectralField> {
        self.components.iter()
    }

    pub fn inner(&self, other: &VectorField) -> f64 {
        self.iter().zip(other.iter()).map(|(a, b)| a.inner(b)).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.iter().map(SpectralField::norm_sq).sum()
    }

    pub fn weighted_norm_sq(&self, weight: impl Fn(Wavevector) -> f64 + Copy) -> f64 {
        self.iter().map(|c| c.weighted_norm_sq(weight)).sum()
    }

    pub fn scale(&mut self, a: f64) {
        self.components.iter_mut().for_each(|c| c.scale(a));
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    pub fn axpy(&mut self, a: f64, x: &VectorField) {
        for (s, xi) in self.components.iter_mut().zip(x.iter()) {
            s.axpy(a, xi);
        }
    }

    pub fn sub(&self, other: &VectorField) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(SpectralField::is_finite)
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.iter().map(SpectralField::hermitian_defect).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(&SpectralField) -> SpectralField) -> Self {
        VectorField {
            components: [
                f(&self.components[0]),
                f(&self.components[1]),
                f(&self.components[2]),
            ],
        }
    }

    pub fn resampled(&self, n_new: usize) -> Self {
        self.map(|c| c.resampled(n_new))
    }
}

impl Index<usize> for VectorField {
    type Output = SpectralField;

    fn index(&self, i: usize) -> &SpectralField {
        &self.components[i]
    }
}

impl IndexMut<usize> for VectorField {
    fn index_mut(&mut self, i: usize) -> &mut SpectralField {
        &mut self.components[i]
    }
}

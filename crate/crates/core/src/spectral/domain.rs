use num_complex::Complex64;

use super::calculus::dealias_cutoff;
use super::fft::{Direction, Fft3};
use super::field::{conjugate_slot, SpectralField, VectorField};
use crate::error::{MhdError, Result};
use crate::par;

/// Inverse transforms reject inputs whose Hermitian defect exceeds this.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// An `N^3` periodic grid on `[0,1)^3` with its transforms and Galerkin cutoff `M`.
///
/// The forward transform divides by `N^3`, so a constant grid `c` maps to
/// `fhat(0) = c`.
#[derive(Clone, Debug)]
pub struct Domain {
    n: usize,
    cutoff: usize,
    fft: Fft3,
}

impl Domain {
    /// Grid of `n` points per axis with the largest alias-free cutoff.
    pub fn new(n: usize) -> Result<Self> {
        Self::check_n(n)?;
        Self::with_cutoff(n, dealias_cutoff(n))
    }

    pub fn with_cutoff(n: usize, cutoff: usize) -> Result<Self> {
        Self::check_n(n)?;
        let max = dealias_cutoff(n);
        if cutoff > max {
            return Err(MhdError::config(
                "cutoff",
                format!("cutoff {cutoff} exceeds the dealiased limit {max} for N = {n}"),
            ));
        }
        Ok(Domain {
            n,
            cutoff,
            fft: Fft3::new(n),
        })
    }

    fn check_n(n: usize) -> Result<()> {
        if n < 2 || n % 2 != 0 {
            return Err(MhdError::config(
                "n",
                format!("grid size must be an even positive integer, got {n}"),
            ));
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Galerkin cutoff `M` applied to every nonlinear product.
    #[inline]
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    #[inline]
    pub fn grid_len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Sample `f` at `x_j = j / N`, row-major over `(j1, j2, j3)`.
    pub fn sample(&self, f: impl Fn([f64; 3]) -> f64 + Sync) -> Vec<f64> {
        let n = self.n;
        let h = self.spacing();
        let mut grid = vec![0.0; self.grid_len()];
        par::fill(&mut grid, |idx| {
            f([
                (idx / (n * n)) as f64 * h,
                ((idx / n) % n) as f64 * h,
                (idx % n) as f64 * h,
            ])
        });
        grid
    }

    pub fn check_field(&self, f: &SpectralField) -> Result<()> {
        if f.n() != self.n {
            return Err(MhdError::config(
                "n",
                format!("field resolution {} does not match grid {}", f.n(), self.n),
            ));
        }
        Ok(())
    }

    pub fn check_vector(&self, v: &VectorField) -> Result<()> {
        v.iter().try_for_each(|c| self.check_field(c))
    }

    pub fn forward_transform(&self, grid: &[f64]) -> Result<SpectralField> {
        if grid.len() != self.grid_len() {
            return Err(MhdError::config(
                "n",
                format!("grid has {} samples, expected {}", grid.len(), self.grid_len()),
            ));
        }
        Ok(self.from_grid(grid))
    }

    pub fn inverse_transform(&self, f: &SpectralField) -> Result<Vec<f64>> {
        self.check_field(f)?;
        let defect = f.hermitian_defect();
        if defect > HERMITIAN_TOLERANCE {
            return Err(MhdError::DataCorruption(format!(
                "Hermitian symmetry violated by {defect:e} (relative)"
            )));
        }
        Ok(self.to_grid(f))
    }

    /// Inverse FFT of coefficients supported in `|k_j| <= radius`.
    fn inverse_complex(&self, mut z: Vec<Complex64>, radius: Option<i64>) -> Vec<Complex64> {
        let band = radius.unwrap_or(0) as usize;
        self.fft.process(&mut z, Direction::Inverse, Some(band));
        z
    }

    /// Forward FFT normalized by `1/N^3`.
    pub(crate) fn forward_complex(&self, z: Vec<Complex64>) -> Vec<Complex64> {
        self.forward_band(z, None)
    }

    /// Forward FFT normalized by `1/N^3`, computing only modes inside `band`
    /// and zeroing the rest.
    pub(crate) fn forward_band(&self, mut z: Vec<Complex64>, band: Option<usize>) -> Vec<Complex64> {
        self.fft.process(&mut z, Direction::Forward, band);
        let scale = 1.0 / self.grid_len() as f64;
        z.iter_mut().for_each(|c| *c *= scale);
        z
    }

    /// Real grid of a Hermitian field, without the symmetry check.
    pub(crate) fn to_grid(&self, f: &SpectralField) -> Vec<f64> {
        self.inverse_complex(f.coeffs().to_vec(), f.support_radius())
            .into_iter()
            .map(|c| c.re)
            .collect()
    }

    /// Grids of two Hermitian fields from one complex transform of `a + i b`.
    pub(crate) fn to_grid_pair(&self, a: &SpectralField, b: &SpectralField) -> (Vec<f64>, Vec<f64>) {
        let (ca, cb) = (a.coeffs(), b.coeffs());
        let mut z = vec![Complex64::new(0.0, 0.0); self.grid_len()];
        par::fill(&mut z, |i| Complex64::new(ca[i].re - cb[i].im, ca[i].im + cb[i].re));
        let z = self.inverse_complex(z, a.support_radius().max(b.support_radius()));
        (z.iter().map(|c| c.re).collect(), z.iter().map(|c| c.im).collect())
    }

    pub(crate) fn vector_to_grid(&self, v: &VectorField) -> [Vec<f64>; 3] {
        let (g0, g1) = self.to_grid_pair(&v[0], &v[1]);
        [g0, g1, self.to_grid(&v[2])]
    }

    /// Spectrum of a real grid. The result is exactly Hermitian.
    pub(crate) fn from_grid(&self, grid: &[f64]) -> SpectralField {
        let z = self.forward_complex(grid.iter().map(|&x| Complex64::new(x, 0.0)).collect());
        let n = self.n;
        let mut out = SpectralField::zeros(n);
        par::fill(out.coeffs_mut(), |i| {
            let zc = z[conjugate_slot(i, n)].conj();
            (z[i] + zc) * 0.5
        });
        out
    }

    /// Spectra of two real grids `f`, `g` from one complex transform of `f + i g`.
    pub(crate) fn from_grid_pair(&self, f: &[f64], g: &[f64]) -> (SpectralField, SpectralField) {
        let z = f.iter().zip(g).map(|(&a, &b)| Complex64::new(a, b)).collect();
        self.split_pair(self.forward_complex(z))
    }

    fn split_pair(&self, z: Vec<Complex64>) -> (SpectralField, SpectralField) {
        let n = self.n;
        let mut both = vec![[Complex64::new(0.0, 0.0); 2]; self.grid_len()];
        par::fill(&mut both, |i| split_at(&z, i, conjugate_slot(i, n)));
        let mut a = SpectralField::zeros(self.n);
        let mut b = SpectralField::zeros(self.n);
        for (i, [x, y]) in both.into_iter().enumerate() {
            a.coeffs_mut()[i] = x;
            b.coeffs_mut()[i] = y;
        }
        (a, b)
    }

    /// Mask to the Galerkin cutoff.
    pub(crate) fn truncate(&self, f: &SpectralField) -> SpectralField {
        super::calculus::cube_mask(f, self.cutoff as i64)
    }
}

/// Separate `Z = F + i G` at slot `i` (with `-k` at slot `ci`) into `[F(k), G(k)]`.
#[inline]
pub(crate) fn split_at(z: &[Complex64], i: usize, ci: usize) -> [Complex64; 2] {
    let zk = z[i];
    let zc = z[ci].conj();
    let f = (zk + zc) * 0.5;
    let d = (zk - zc) * 0.5;
    // (zk - zc) / (2i)
    [f, Complex64::new(d.im, -d.re)]
}

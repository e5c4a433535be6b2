//! Fourier multipliers on the unit torus: derivatives, Leray projection and the
//! two truncation masks. None of these need a transform.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::field::{cube_norm, SpectralField, VectorField};
use crate::error::{MhdError, Result};
use crate::par;

const TWO_PI: f64 = 2.0 * PI;
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Largest cutoff `M` for which quadratic products of fields supported in
/// `max|k_i| <= M` are alias-free on an `N`-point grid (`3M < N`).
pub fn dealias_cutoff(n: usize) -> usize {
    n.saturating_sub(1) / 3
}

fn map_coeffs(f: &SpectralField, g: impl Fn(usize, Complex64) -> Complex64 + Sync) -> SpectralField {
    let mut out = SpectralField::zeros(f.n());
    let src = f.coeffs();
    par::fill(out.coeffs_mut(), |idx| g(idx, src[idx]));
    out
}

/// Odd-derivative wavenumber: the Nyquist slot gets zero so real fields stay real.
#[inline]
fn odd_wavenumber(f: &SpectralField, idx: usize, axis: usize) -> f64 {
    let n = f.n();
    let j = match axis {
        0 => idx / (n * n),
        1 => (idx / n) % n,
        _ => idx % n,
    };
    if 2 * j == n {
        0.0
    } else {
        f.wavevector(idx)[axis] as f64
    }
}

/// `d f / d x_axis`, multiplier `2 pi i k_axis`.
pub fn derivative(f: &SpectralField, axis: usize) -> SpectralField {
    assert!(axis < 3, "axis must be 0, 1 or 2");
    map_coeffs(f, |idx, c| {
        let k = odd_wavenumber(f, idx, axis);
        Complex64::new(0.0, TWO_PI * k) * c
    })
}

pub fn gradient(f: &SpectralField) -> VectorField {
    VectorField {
        components: [derivative(f, 0), derivative(f, 1), derivative(f, 2)],
    }
}

/// `sum_j 2 pi i k_j vhat_j(k)`.
pub fn divergence(v: &VectorField) -> SpectralField {
    let mut out = SpectralField::zeros(v.n());
    let (a, b, c) = (v[0].coeffs(), v[1].coeffs(), v[2].coeffs());
    let f = &v[0];
    par::fill(out.coeffs_mut(), |idx| {
        let s = a[idx] * odd_wavenumber(f, idx, 0)
            + b[idx] * odd_wavenumber(f, idx, 1)
            + c[idx] * odd_wavenumber(f, idx, 2);
        Complex64::new(0.0, TWO_PI) * s
    });
    out
}

/// Multiplier `-4 pi^2 |k|^2`.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    map_coeffs(f, |idx, c| {
        let k = f.wavevector(idx);
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        c * (-4.0 * PI * PI * k2)
    })
}

/// `d11 + d22`, multiplier `-4 pi^2 (k1^2 + k2^2)`.
pub fn horizontal_laplacian(f: &SpectralField) -> SpectralField {
    map_coeffs(f, |idx, c| {
        let k = f.wavevector(idx);
        let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
        c * (-4.0 * PI * PI * k2)
    })
}

/// Leray-Helmholtz projection: removes the component of `vhat(k)` parallel to `k`.
/// The `k = 0` mode is left untouched.
pub fn leray_project(v: &VectorField) -> VectorField {
    let n = v.n();
    let mut buf = vec![[ZERO; 3]; n * n * n];
    let (a, b, c) = (v[0].coeffs(), v[1].coeffs(), v[2].coeffs());
    let f = &v[0];
    par::fill(&mut buf, |idx| project_mode(f.wavevector(idx), [a[idx], b[idx], c[idx]]));
    scatter(n, buf)
}

#[inline]
pub(crate) fn project_mode(k: [i64; 3], w: [Complex64; 3]) -> [Complex64; 3] {
    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
    if k2 == 0 {
        return w;
    }
    let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
    let kdot = w[0] * kf[0] + w[1] * kf[1] + w[2] * kf[2];
    let s = kdot / k2 as f64;
    [w[0] - s * kf[0], w[1] - s * kf[1], w[2] - s * kf[2]]
}

pub(crate) fn scatter(n: usize, buf: Vec<[Complex64; 3]>) -> VectorField {
    let mut out = VectorField::zeros(n);
    for (idx, w) in buf.into_iter().enumerate() {
        for (i, wi) in w.into_iter().enumerate() {
            out[i].coeffs_mut()[idx] = wi;
        }
    }
    out
}

/// Zero every coefficient with `max|k_i| > m`.
pub fn galerkin_truncate(f: &SpectralField, m: usize) -> Result<SpectralField> {
    let n = f.n();
    if m + 1 > n / 2 {
        return Err(MhdError::config(
            "cutoff",
            format!("cutoff {m} exceeds the representable range N/2-1 = {}", (n / 2).saturating_sub(1)),
        ));
    }
    Ok(cube_mask(f, m as i64))
}

pub fn galerkin_truncate_vector(v: &VectorField, m: usize) -> Result<VectorField> {
    Ok(VectorField {
        components: [
            galerkin_truncate(&v[0], m)?,
            galerkin_truncate(&v[1], m)?,
            galerkin_truncate(&v[2], m)?,
        ],
    })
}

/// Two-thirds rule: zero every coefficient with `max|k_i| > dealias_cutoff(N)`.
pub fn dealias_mask(f: &SpectralField) -> SpectralField {
    cube_mask(f, dealias_cutoff(f.n()) as i64)
}

pub(crate) fn cube_mask(f: &SpectralField, m: i64) -> SpectralField {
    map_coeffs(f, |idx, c| if cube_norm(f.wavevector(idx)) > m { ZERO } else { c })
}

/// `|grad f|_2^2 = sum 4 pi^2 |k|^2 |fhat(k)|^2`.
pub fn gradient_norm_sq(f: &SpectralField) -> f64 {
    4.0 * PI * PI * f.weighted_norm_sq(|k| (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64)
}

/// `|div v|_2 / |grad v|_2` computed spectrally; zero when `v` is constant.
pub fn divergence_residual(v: &VectorField) -> f64 {
    let f = &v[0];
    let mut div = 0.0;
    let mut grad = 0.0;
    for idx in 0..f.coeffs().len() {
        let k = f.wavevector(idx);
        let w = [v[0].coeffs()[idx], v[1].coeffs()[idx], v[2].coeffs()[idx]];
        let kd = w[0] * k[0] as f64 + w[1] * k[1] as f64 + w[2] * k[2] as f64;
        div += kd.norm_sqr();
        let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
        grad += k2 * (w[0].norm_sqr() + w[1].norm_sqr() + w[2].norm_sqr());
    }
    if grad == 0.0 {
        0.0
    } else {
        (div / grad).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(n: usize, k: [i64; 3], c: Complex64) -> SpectralField {
        let mut f = SpectralField::zeros(n);
        f.set_hermitian(k, c);
        f
    }

    fn half() -> Complex64 {
        Complex64::new(0.5, 0.0)
    }

    #[test]
    fn gradient_of_cosine() {
        // cos(2 pi x1) -> (-2 pi sin(2 pi x1), 0, 0); sin has coefficient -i/2 at +e1.
        let g = gradient(&single(8, [1, 0, 0], half()));
        let expect = Complex64::new(0.0, PI);
        assert!((g[0].get([1, 0, 0]) - expect).norm() < 1e-15);
        assert!((g[0].get([-1, 0, 0]) - expect.conj()).norm() < 1e-15);
        assert_eq!(g[1].norm_sq() + g[2].norm_sq(), 0.0);
    }

    #[test]
    fn constant_has_no_derivatives() {
        let f = single(8, [0, 0, 0], Complex64::new(3.0, 0.0));
        assert_eq!(gradient(&f).norm_sq(), 0.0);
        assert_eq!(laplacian(&f).norm_sq(), 0.0);
    }

    #[test]
    fn laplacian_eigenfunction_and_horizontal_variant() {
        let f = single(8, [1, 0, 0], half());
        let l = laplacian(&f);
        assert!((l.get([1, 0, 0]).re + 4.0 * PI * PI * 0.5).abs() < 1e-13);
        let g = single(8, [0, 0, 1], half());
        assert_eq!(horizontal_laplacian(&g).norm_sq(), 0.0);
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let mut f = SpectralField::zeros(8);
        f.set_hermitian([1, 2, -1], Complex64::new(0.3, 0.4));
        f.set_hermitian([0, 3, 2], Complex64::new(-0.1, 0.2));
        let d = divergence(&gradient(&f));
        assert!(d.sub(&laplacian(&f)).norm_sq().sqrt() < 1e-12 * laplacian(&f).norm_sq().sqrt());
    }

    #[test]
    fn shear_is_solenoidal() {
        let v = VectorField::new(single(8, [0, 1, 0], half()), SpectralField::zeros(8), SpectralField::zeros(8)).unwrap();
        assert_eq!(divergence(&v).norm_sq(), 0.0);
    }

    #[test]
    fn leray_on_single_modes() {
        let one = Complex64::new(1.0, 0.0);
        // pure gradient annihilated
        let mut v = VectorField::zeros(8);
        v[0].set([1, 0, 0], one);
        assert_eq!(leray_project(&v).norm_sq(), 0.0);
        // transverse mode unchanged
        let mut v = VectorField::zeros(8);
        v[1].set([1, 0, 0], one);
        assert_eq!(leray_project(&v), v);
        // oblique wavevector: (1,0,0) at k=(1,1,0) -> (1/2, -1/2, 0)
        let mut v = VectorField::zeros(8);
        v[0].set([1, 1, 0], one);
        let p = leray_project(&v);
        assert!((p[0].get([1, 1, 0]) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((p[1].get([1, 1, 0]) - Complex64::new(-0.5, 0.0)).norm() < 1e-15);
        assert_eq!(p[2].norm_sq(), 0.0);
    }

    #[test]
    fn truncation_edges() {
        let f = single(8, [3, 0, 0], half());
        assert_eq!(galerkin_truncate(&f, 3).unwrap(), f);
        assert_eq!(galerkin_truncate(&f, 2).unwrap().norm_sq(), 0.0);
        assert!(matches!(galerkin_truncate(&f, 4), Err(MhdError::Config { .. })));
    }

    #[test]
    fn dealias_mask_edges() {
        assert_eq!(dealias_cutoff(8), 2);
        assert_eq!(dealias_cutoff(16), 5);
        assert_eq!(dealias_cutoff(12), 3);
        assert_eq!(dealias_mask(&SpectralField::zeros(8)).norm_sq(), 0.0);
        let inside = single(8, [2, -2, 1], half());
        assert_eq!(dealias_mask(&inside), inside);
        let outside = single(8, [3, 0, 0], half());
        assert_eq!(dealias_mask(&outside).norm_sq(), 0.0);
    }
}

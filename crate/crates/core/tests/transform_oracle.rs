//! Transforms and derivatives against direct sums and finite differences.

mod common;

use std::f64::consts::PI;

use mhdb::spectral::{derivative, gradient, laplacian, wavevector_at, Domain, SpectralField};
use num_complex::Complex64;
use rand::Rng;

fn direct_forward(grid: &[f64], n: usize) -> Vec<Complex64> {
    let len = n * n * n;
    (0..len)
        .map(|idx| {
            let k = wavevector_at(idx, n);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &g) in grid.iter().enumerate() {
                let x = [j / (n * n), (j / n) % n, j % n];
                let phase = -2.0 * PI * (0..3).map(|a| (k[a] * x[a] as i64) as f64).sum::<f64>() / n as f64;
                acc += Complex64::from_polar(g, phase);
            }
            acc / len as f64
        })
        .collect()
}

fn direct_inverse(f: &SpectralField, n: usize) -> Vec<f64> {
    let len = n * n * n;
    (0..len)
        .map(|j| {
            let x = [j / (n * n), (j / n) % n, j % n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (idx, c) in f.coeffs().iter().enumerate() {
                let k = wavevector_at(idx, n);
                let phase = 2.0 * PI * (0..3).map(|a| (k[a] * x[a] as i64) as f64).sum::<f64>() / n as f64;
                acc += c * Complex64::from_polar(1.0, phase);
            }
            acc.re
        })
        .collect()
}

#[test]
fn forward_transform_matches_direct_dft() {
    let n = 8;
    let d = Domain::new(n).unwrap();
    let mut rng = common::rng(1);
    let grid: Vec<f64> = (0..n * n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let fast = d.forward_transform(&grid).unwrap();
    let slow = direct_forward(&grid, n);
    for (a, b) in fast.coeffs().iter().zip(&slow) {
        assert!((a - b).norm() < 1e-14, "{a} vs {b}");
    }
}

#[test]
fn inverse_transform_matches_direct_synthesis() {
    for n in [6usize, 8] {
        let d = Domain::new(n).unwrap();
        let mut rng = common::rng(2);
        // all representable modes except the Nyquist planes, Hermitian
        let f = common::random_scalar(n, n as i64 / 2 - 1, &mut rng);
        let fast = d.inverse_transform(&f).unwrap();
        let slow = direct_inverse(&f, n);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() < 1e-13);
        }
        let back = d.forward_transform(&fast).unwrap();
        assert!(back.sub(&f).norm_sq().sqrt() < 1e-14);
    }
}

fn smooth(x: [f64; 3]) -> f64 {
    ((2.0 * PI * x[0]).sin() + 0.5 * (2.0 * PI * x[1]).cos() * (4.0 * PI * x[2]).sin()).exp()
}

fn smooth_grad(x: [f64; 3]) -> [f64; 3] {
    let s = smooth(x);
    let (a, b, c) = (2.0 * PI * x[0], 2.0 * PI * x[1], 4.0 * PI * x[2]);
    [
        s * 2.0 * PI * a.cos(),
        s * 0.5 * -(2.0 * PI) * b.sin() * c.sin(),
        s * 0.5 * b.cos() * 4.0 * PI * c.cos(),
    ]
}

#[test]
fn spectral_gradient_matches_analytic_gradient() {
    // the x3 factor oscillates at twice the base frequency; its spectrum falls
    // below 1e-13 inside the N = 64 cutoff
    let n = 64;
    let d = Domain::new(n).unwrap();
    let f = d.forward_transform(&d.sample(smooth)).unwrap();
    let g = gradient(&f);
    for a in 0..3 {
        let grid = d.inverse_transform(&g[a]).unwrap();
        let exact = d.sample(|x| smooth_grad(x)[a]);
        let err = grid.iter().zip(&exact).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "axis {a}: {err:e}");
    }
}

/// Sixth-order central difference along `axis` on the periodic grid.
fn fd6(grid: &[f64], n: usize, axis: usize) -> Vec<f64> {
    let h = 1.0 / n as f64;
    let stride = [n * n, n, 1][axis];
    let w = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
    (0..grid.len())
        .map(|j| {
            let i = (j / stride) % n;
            let at = |s: isize| {
                let ii = (i as isize + s).rem_euclid(n as isize) as usize;
                grid[j - i * stride + ii * stride]
            };
            (1..=3).map(|s| w[s - 1] * (at(s as isize) - at(-(s as isize)))).sum::<f64>() / h
        })
        .collect()
}

#[test]
fn spectral_derivative_agrees_with_finite_differences() {
    // the finite-difference error shrinks at sixth order toward the spectral value
    let mut errs = Vec::new();
    for n in [64usize, 128] {
        let d = Domain::new(n).unwrap();
        let grid = d.sample(smooth);
        let f = d.forward_transform(&grid).unwrap();
        let mut worst = 0.0f64;
        for a in 0..3 {
            let spectral = d.inverse_transform(&derivative(&f, a)).unwrap();
            let fd = fd6(&grid, n, a);
            worst = worst.max(spectral.iter().zip(&fd).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max));
        }
        errs.push(worst);
    }
    let order = (errs[0] / errs[1]).log2();
    assert!(errs[1] < 2e-5, "{errs:?}");
    assert!(order > 5.0, "observed order {order}");
}

#[test]
fn laplacian_of_a_mode() {
    let d = Domain::new(8).unwrap();
    let f = d.forward_transform(&d.sample(|x| (2.0 * PI * (x[0] + 2.0 * x[1])).cos())).unwrap();
    let l = laplacian(&f);
    let expected = f.scaled(-4.0 * PI * PI * 5.0);
    assert!(l.sub(&expected).norm_sq().sqrt() < 1e-12);
}

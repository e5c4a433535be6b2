//! Triple-product integration-by-parts identities for solenoidal fields,
//! evaluated by grid quadrature. With inputs restricted to the alias-free
//! cutoff (`3M < N`), every integrand is a trigonometric polynomial the grid
//! integrates exactly, so both sides agree to round-off.

use crate::error::{MhdError, Result};
use crate::spectral::{derivative, divergence_residual, Domain, VectorField};

/// Both sides of an identity and the magnitude they are compared against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityResidual {
    pub lhs: f64,
    pub rhs: f64,
    /// Sum over every term of the integral of `|integrand|`.
    pub scale: f64,
}

impl IdentityResidual {
    pub fn absolute(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.absolute() / self.scale
        }
    }
}

/// Running sum of `integral(sign * a * b * c)`, tracking `integral |a b c|` too.
struct Quadrature {
    value: f64,
    scale: f64,
    inv_len: f64,
}

impl Quadrature {
    fn new(len: usize) -> Self {
        Quadrature {
            value: 0.0,
            scale: 0.0,
            inv_len: 1.0 / len as f64,
        }
    }

    fn add(&mut self, sign: f64, a: &[f64], b: &[f64], c: &[f64]) {
        let mut v = 0.0;
        let mut s = 0.0;
        for i in 0..a.len() {
            let p = a[i] * b[i] * c[i];
            v += p;
            s += p.abs();
        }
        self.value += sign * v * self.inv_len;
        self.scale += s * self.inv_len;
    }
}

/// Grids of a restricted vector field and its first derivatives `d[j][k] = d_j v_k`.
struct Jet {
    v: [Vec<f64>; 3],
    d: [[Vec<f64>; 3]; 3],
}

fn jet(domain: &Domain, v: &VectorField) -> Jet {
    let v = v.map(|c| domain.truncate(c));
    let d = [0, 1, 2].map(|j| domain.vector_to_grid(&v.map(|c| derivative(c, j))));
    Jet {
        v: domain.vector_to_grid(&v),
        d,
    }
}

fn require_solenoidal(name: &str, v: &VectorField) -> Result<()> {
    let r = divergence_residual(v);
    if r > 1e-10 {
        return Err(MhdError::Precondition(format!(
            "{name} must be divergence-free (relative residual {r:e})"
        )));
    }
    Ok(())
}

/// Residual of
///
/// ```text
/// sum_{j,k=1,2} int u_j d_j u_k Lap_h u_k
///   = 1/2 sum_{j,k=1,2} int d_j u_k d_j u_k d3 u3
///     - int d1 u1 d2 u2 d3 u3 + int d1 u2 d2 u1 d3 u3
/// ```
///
/// for divergence-free `u` (restricted to the domain cutoff).
pub fn lemma_identity_residual_h(domain: &Domain, u: &VectorField) -> Result<IdentityResidual> {
    domain.check_vector(u)?;
    require_solenoidal("u", u)?;
    let ut = u.map(|c| domain.truncate(c));
    let jt = jet(domain, &ut);
    let lap_h: Vec<Vec<f64>> = (0..2)
        .map(|k| {
            let c = &ut[k];
            let d11 = derivative(&derivative(c, 0), 0);
            let mut d22 = derivative(&derivative(c, 1), 1);
            d22.axpy(1.0, &d11);
            domain.to_grid(&d22)
        })
        .collect();

    let len = domain.grid_len();
    let mut lhs = Quadrature::new(len);
    for j in 0..2 {
        for k in 0..2 {
            lhs.add(1.0, &jt.v[j], &jt.d[j][k], &lap_h[k]);
        }
    }
    let mut rhs = Quadrature::new(len);
    let d33 = &jt.d[2][2];
    for j in 0..2 {
        for k in 0..2 {
            rhs.add(0.5, &jt.d[j][k], &jt.d[j][k], d33);
        }
    }
    rhs.add(-1.0, &jt.d[0][0], &jt.d[1][1], d33);
    rhs.add(1.0, &jt.d[0][1], &jt.d[1][0], d33);
    Ok(IdentityResidual {
        lhs: lhs.value,
        rhs: rhs.value,
        scale: lhs.scale + rhs.scale,
    })
}

/// Residual, for direction `axis`, of (summed over `j, k = 1..3`)
///
/// ```text
///   int u_j d_j u_k d_ii u_k - int b_j d_j b_k d_ii u_k
/// + int u_j d_j b_k d_ii b_k - int b_j d_j u_k d_ii b_k
/// = - int d_i u_j d_j u_k d_i u_k + int d_i b_j d_j b_k d_i u_k
///   - int d_i u_j d_j b_k d_i b_k + int d_i b_j d_j u_k d_i b_k
/// ```
///
/// for divergence-free `u` and `b`.
pub fn lemma_identity_residual_pair(
    domain: &Domain,
    u: &VectorField,
    b: &VectorField,
    axis: usize,
) -> Result<IdentityResidual> {
    if axis > 2 {
        return Err(MhdError::OutOfRange(format!("axis must be 0, 1 or 2, got {axis}")));
    }
    domain.check_vector(u)?;
    domain.check_vector(b)?;
    require_solenoidal("u", u)?;
    require_solenoidal("b", b)?;
    let i = axis;
    let ju = jet(domain, u);
    let jb = jet(domain, b);
    let second = |v: &VectorField| {
        let v = v.map(|c| domain.truncate(c));
        domain.vector_to_grid(&v.map(|c| derivative(&derivative(c, i), i)))
    };
    let uii = second(u);
    let bii = second(b);

    let len = domain.grid_len();
    let mut lhs = Quadrature::new(len);
    let mut rhs = Quadrature::new(len);
    for j in 0..3 {
        for k in 0..3 {
            lhs.add(1.0, &ju.v[j], &ju.d[j][k], &uii[k]);
            lhs.add(-1.0, &jb.v[j], &jb.d[j][k], &uii[k]);
            lhs.add(1.0, &ju.v[j], &jb.d[j][k], &bii[k]);
            lhs.add(-1.0, &jb.v[j], &ju.d[j][k], &bii[k]);

            rhs.add(-1.0, &ju.d[i][j], &ju.d[j][k], &ju.d[i][k]);
            rhs.add(1.0, &jb.d[i][j], &jb.d[j][k], &ju.d[i][k]);
            rhs.add(-1.0, &ju.d[i][j], &jb.d[j][k], &jb.d[i][k]);
            rhs.add(1.0, &jb.d[i][j], &ju.d[j][k], &jb.d[i][k]);
        }
    }
    Ok(IdentityResidual {
        lhs: lhs.value,
        rhs: rhs.value,
        scale: lhs.scale + rhs.scale,
    })
}

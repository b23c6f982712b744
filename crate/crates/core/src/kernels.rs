//! Generalized Dirichlet-type kernels
//!
//! ```text
//! D°_{k,r}(t)  = sin((2k+r)t/2) / (2 sin(rt/2))
//! D̃°_{k,r}(t) = cos((2k+r)t/2) / (2 sin(rt/2))
//! D̃_{k,r}(t)  = (cos(t/2) − cos((2k+r)t/2)) / (2 sin(rt/2))
//! ```
//!
//! and the two summation-by-parts identities expressing `Σ a_k sin kt` and
//! `Σ a_k cos kt` through r-differences of the coefficients.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Minimum distance from the singular set `{2lπ/r : l ∈ Z}`.
pub const GUARD: f64 = 1e-8;

/// A kernel evaluation point `(k, r, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub k: u64,
    pub r: i64,
    pub t: f64,
}

impl KernelPoint {
    pub fn new(k: u64, r: i64, t: f64) -> Result<Self> {
        let p = Self { k, r, t };
        p.denominator()?;
        Ok(p)
    }

    /// Nearest point of the singular set `{2lπ/r}`.
    pub fn nearest_singularity(&self) -> f64 {
        let r = self.r as f64;
        let l = (self.t * r / (2.0 * PI)).round();
        2.0 * l * PI / r
    }

    /// `2 sin(rt/2)`, after checking the guard.
    fn denominator(&self) -> Result<f64> {
        if self.r == 0 {
            return Err(Error::ZeroOrder);
        }
        let nearest = self.nearest_singularity();
        if (self.t - nearest).abs() < GUARD {
            return Err(Error::Singular {
                k: self.k,
                r: self.r,
                t: self.t,
                nearest,
            });
        }
        Ok(2.0 * (0.5 * self.r as f64 * self.t).sin())
    }

    fn half_angle(&self) -> f64 {
        0.5 * (2.0 * self.k as f64 + self.r as f64) * self.t
    }
}

/// `D°_{k,r}(t)`.
pub fn dirichlet_gen(k: u64, r: i64, t: f64) -> Result<f64> {
    let p = KernelPoint { k, r, t };
    let den = p.denominator()?;
    Ok(p.half_angle().sin() / den)
}

/// `D̃°_{k,r}(t)`.
pub fn conj_dirichlet_gen(k: u64, r: i64, t: f64) -> Result<f64> {
    let p = KernelPoint { k, r, t };
    let den = p.denominator()?;
    Ok(p.half_angle().cos() / den)
}

/// `D̃_{k,r}(t)`.
///
/// The numerator is evaluated in product form,
/// `cos(t/2) − cos(B) = 2 sin((B + t/2)/2) sin((B − t/2)/2)`, which avoids the
/// cancellation of the difference for small `t`.
pub fn conj_dirichlet(k: u64, r: i64, t: f64) -> Result<f64> {
    let p = KernelPoint { k, r, t };
    let den = p.denominator()?;
    let b = p.half_angle();
    let a = 0.5 * t;
    let num = 2.0 * (0.5 * (b + a)).sin() * (0.5 * (b - a)).sin();
    Ok(num / den)
}

/// Both sides of a summation-by-parts identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentitySides {
    pub lhs: f64,
    pub rhs: f64,
}

impl IdentitySides {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

fn coeff(a: &[f64], k: usize) -> f64 {
    a.get(k).copied().unwrap_or(0.0)
}

fn check_range(n: usize, m: usize, r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::ZeroOrder);
    }
    if m < n {
        return Err(crate::error::domain("m", m as f64, "m >= n"));
    }
    Ok(())
}

/// `Σ_{k=n}^m a_k sin kt` directly (lhs) and through
/// `−Σ (a_k − a_{k+r}) D̃°_{k,r} + Σ_{k=m+1}^{m+r} a_k D̃°_{k,−r} − Σ_{k=n}^{n+r−1} a_k D̃°_{k,−r}` (rhs).
///
/// Entries of `a` past its end are taken as 0.
pub fn abel_sin_identity(a: &[f64], n: usize, m: usize, r: usize, t: f64) -> Result<IdentitySides> {
    check_range(n, m, r)?;
    let ri = r as i64;
    let lhs: f64 = (n..=m).map(|k| coeff(a, k) * (k as f64 * t).sin()).sum();
    let mut rhs = 0.0;
    for k in n..=m {
        rhs -= (coeff(a, k) - coeff(a, k + r)) * conj_dirichlet_gen(k as u64, ri, t)?;
    }
    for k in m + 1..=m + r {
        rhs += coeff(a, k) * conj_dirichlet_gen(k as u64, -ri, t)?;
    }
    for k in n..n + r {
        rhs -= coeff(a, k) * conj_dirichlet_gen(k as u64, -ri, t)?;
    }
    Ok(IdentitySides { lhs, rhs })
}

/// Cosine counterpart of [`abel_sin_identity`] with `D°_{k,±r}`.
pub fn abel_cos_identity(a: &[f64], n: usize, m: usize, r: usize, t: f64) -> Result<IdentitySides> {
    check_range(n, m, r)?;
    let ri = r as i64;
    let lhs: f64 = (n..=m).map(|k| coeff(a, k) * (k as f64 * t).cos()).sum();
    let mut rhs = 0.0;
    for k in n..=m {
        rhs += (coeff(a, k) - coeff(a, k + r)) * dirichlet_gen(k as u64, ri, t)?;
    }
    for k in m + 1..=m + r {
        rhs -= coeff(a, k) * dirichlet_gen(k as u64, -ri, t)?;
    }
    for k in n..n + r {
        rhs += coeff(a, k) * dirichlet_gen(k as u64, -ri, t)?;
    }
    Ok(IdentitySides { lhs, rhs })
}

//! Fourier coefficients, partial sums `S_k f` and `S̃_k f`, and the conjugate
//! function `f̃` both through the conjugate series and through the truncated
//! singular integral `f̃(x, ε)`.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::function_space::{psi, PeriodicFunction, DEFAULT_GRID_SIZE};
use crate::kernels;
use crate::quadrature::{integrate, QuadOptions};

/// Cosine and sine coefficients `a_ν(f)`, `b_ν(f)` for `ν = 0..=max_freq`.
///
/// `a[0]` is `a₀(f)` (the series starts with `a₀/2`); `b[0]` is always 0.
/// Coefficients past `max_freq` are treated as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierData {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl FourierData {
    pub fn from_parts(mut a: Vec<f64>, mut b: Vec<f64>) -> Self {
        let len = a.len().max(b.len()).max(1);
        a.resize(len, 0.0);
        b.resize(len, 0.0);
        b[0] = 0.0;
        Self { a, b }
    }

    pub fn zeros(max_freq: usize) -> Self {
        Self::from_parts(vec![0.0; max_freq + 1], vec![0.0; max_freq + 1])
    }

    pub fn a0(&self) -> f64 {
        self.a[0]
    }

    pub fn a(&self, nu: usize) -> f64 {
        self.a.get(nu).copied().unwrap_or(0.0)
    }

    pub fn b(&self, nu: usize) -> f64 {
        self.b.get(nu).copied().unwrap_or(0.0)
    }

    pub fn max_freq(&self) -> usize {
        self.a.len() - 1
    }

    /// Highest frequency with a nonzero coefficient (0 for constants).
    pub fn degree(&self) -> usize {
        (1..self.a.len())
            .rev()
            .find(|&nu| self.a[nu] != 0.0 || self.b[nu] != 0.0)
            .unwrap_or(0)
    }

    /// Nonzero harmonics `(ν, a_ν, b_ν)` with `ν >= 1`.
    pub fn harmonics(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        (1..self.a.len())
            .filter(|&nu| self.a[nu] != 0.0 || self.b[nu] != 0.0)
            .map(|nu| (nu, self.a[nu], self.b[nu]))
    }

    /// The truncated (or zero-padded) copy with the given `max_freq`.
    pub fn resized(&self, max_freq: usize) -> Self {
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        a.resize(max_freq + 1, 0.0);
        b.resize(max_freq + 1, 0.0);
        Self { a, b }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            a: self.a.iter().map(|v| c * v).collect(),
            b: self.b.iter().map(|v| c * v).collect(),
        }
    }

    /// Coefficient-wise `self + c · other`.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Self {
        let len = self.a.len().max(other.a.len());
        let a = (0..len).map(|nu| self.a(nu) + c * other.a(nu)).collect();
        let b = (0..len).map(|nu| self.b(nu) + c * other.b(nu)).collect();
        Self::from_parts(a, b)
    }

    /// Coefficients of the conjugate series `Σ (a_ν sin νx − b_ν cos νx)`.
    pub fn conjugate(&self) -> Self {
        let a = std::iter::once(0.0).chain(self.b.iter().skip(1).map(|v| -v)).collect();
        let b = std::iter::once(0.0).chain(self.a.iter().skip(1).copied()).collect();
        Self { a, b }
    }

    /// The full series value `S_{max_freq} f(x)`.
    pub fn value(&self, x: f64) -> f64 {
        partial_sum(self, self.max_freq(), x)
    }

    /// The full conjugate series value `S̃_{max_freq} f(x)`.
    pub fn conjugate_value(&self, x: f64) -> f64 {
        conj_partial_sum(self, self.max_freq(), x)
    }
}

/// Fourier coefficients up to `max_freq`.
///
/// Functions carrying exact coefficients pass them through; otherwise the
/// trapezoidal rule on the default grid is used.
pub fn fourier_coeffs(f: &PeriodicFunction, max_freq: usize) -> Result<FourierData> {
    match f.coefficients() {
        Some(data) => Ok(data.resized(max_freq)),
        None => fourier_coeffs_on_grid(f, max_freq, DEFAULT_GRID_SIZE),
    }
}

/// Coefficients by the periodic trapezoidal rule on `grid_size` points,
/// ignoring any exact coefficients `f` carries.
pub fn fourier_coeffs_on_grid(f: &PeriodicFunction, max_freq: usize, grid_size: usize) -> Result<FourierData> {
    if grid_size < 4 || max_freq >= grid_size / 2 {
        return Err(domain("max_freq", max_freq as f64, "max_freq < grid_size / 2"));
    }
    let h = 2.0 * PI / grid_size as f64;
    let samples: Vec<(f64, f64)> = (0..grid_size)
        .map(|i| {
            let x = -PI + h * i as f64;
            (x, f.eval(x))
        })
        .collect();
    if let Some(&(x, value)) = samples.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFinite { x, value });
    }
    let mut a = vec![0.0; max_freq + 1];
    let mut b = vec![0.0; max_freq + 1];
    for nu in 0..=max_freq {
        let nuf = nu as f64;
        let (mut sa, mut sb) = (0.0, 0.0);
        for &(x, v) in &samples {
            let (s, c) = (nuf * x).sin_cos();
            sa += v * c;
            sb += v * s;
        }
        a[nu] = sa * h / PI;
        b[nu] = sb * h / PI;
    }
    Ok(FourierData::from_parts(a, b))
}

/// `S_k f(x) = a₀/2 + Σ_{ν=1}^k (a_ν cos νx + b_ν sin νx)`.
pub fn partial_sum(fd: &FourierData, k: usize, x: f64) -> f64 {
    let top = k.min(fd.max_freq());
    let mut sum = 0.5 * fd.a0();
    for nu in 1..=top {
        let (s, c) = (nu as f64 * x).sin_cos();
        sum += fd.a[nu] * c + fd.b[nu] * s;
    }
    sum
}

/// `S̃_k f(x) = Σ_{ν=1}^k (a_ν sin νx − b_ν cos νx)`.
pub fn conj_partial_sum(fd: &FourierData, k: usize, x: f64) -> f64 {
    let top = k.min(fd.max_freq());
    let mut sum = 0.0;
    for nu in 1..=top {
        let (s, c) = (nu as f64 * x).sin_cos();
        sum += fd.a[nu] * s - fd.b[nu] * c;
    }
    sum
}

/// `S̃_k f(x) = −(1/π) ∫_{−π}^{π} f(x+t) D̃_{k,1}(t) dt` by the midpoint rule on
/// `points` nodes (exact for trigonometric polynomials of degree `< points − k`).
pub fn conj_partial_sum_via_kernel(f: &PeriodicFunction, k: usize, x: f64, points: usize) -> Result<f64> {
    if points < 2 || points % 2 != 0 {
        return Err(domain("points", points as f64, "even and >= 2"));
    }
    let h = 2.0 * PI / points as f64;
    let mut sum = 0.0;
    for i in 0..points {
        let t = -PI + (i as f64 + 0.5) * h;
        sum += f.eval(x + t) * kernels::conj_dirichlet(k as u64, 1, t)?;
    }
    Ok(-sum * h / PI)
}

/// A value of `f̃(x, ε)` (or of its ε → 0 limit) with a quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateEvaluation {
    pub x: f64,
    pub epsilon: f64,
    pub value: f64,
    pub quadrature_error_estimate: f64,
}

fn singular_integrand(f: &PeriodicFunction, x: f64) -> impl Fn(f64) -> f64 + '_ {
    move |t: f64| psi(f, x, t) * 0.5 / (0.5 * t).tan()
}

fn conjugate_quad_options() -> QuadOptions {
    QuadOptions::with_tol(1e-13, 1e-12)
}

/// `f̃(x, ε) = −(1/π) ∫_ε^π ψ_x(t) ½cot(t/2) dt`.
pub fn conjugate_truncated(f: &PeriodicFunction, x: f64, epsilon: f64) -> Result<ConjugateEvaluation> {
    if !(epsilon > 0.0 && epsilon <= PI) {
        return Err(domain("epsilon", epsilon, "0 < epsilon <= π"));
    }
    let r = integrate(singular_integrand(f, x), epsilon, PI, conjugate_quad_options())?;
    Ok(ConjugateEvaluation {
        x,
        epsilon,
        value: -r.value / PI,
        quadrature_error_estimate: r.error_estimate / PI,
    })
}

/// Controls for [`conjugate_limit`].
#[derive(Debug, Clone, Copy)]
pub struct LimitOptions {
    /// Number of halvings: `ε_j = π 2^{-j}`, `j = 1..=levels`.
    pub levels: u32,
    /// Convergence threshold on consecutive extrapolated values.
    pub tolerance: f64,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            levels: 14,
            tolerance: 1e-6,
        }
    }
}

/// `f̃(x) = lim_{ε→0} f̃(x, ε)` from the sequence `ε_j = π 2^{-j}`.
///
/// For differentiable f the gap `f̃(x) − f̃(x, ε)` is linear in ε to leading
/// order, so the sequence is Richardson-extrapolated (`2 v_j − v_{j−1}`).
/// Convergence is declared once two consecutive extrapolated differences fall
/// below the tolerance; when the levels run out, the last extrapolated value is
/// accepted as long as the raw differences are still shrinking.
pub fn conjugate_limit(f: &PeriodicFunction, x: f64, opts: LimitOptions) -> Result<ConjugateEvaluation> {
    let integrand = singular_integrand(f, x);
    let qopts = conjugate_quad_options();
    let mut eps_prev = PI;
    let mut v_prev = 0.0;
    let mut quad_err = 0.0;
    let mut raw_diffs: Vec<f64> = Vec::new();
    let mut extrapolated: Vec<f64> = Vec::new();
    let mut hits = 0;
    for _ in 1..=opts.levels {
        let eps = 0.5 * eps_prev;
        let piece = integrate(&integrand, eps, eps_prev, qopts)?;
        let v = v_prev - piece.value / PI;
        quad_err += piece.error_estimate / PI;
        raw_diffs.push((v - v_prev).abs());
        if raw_diffs.len() >= 2 {
            extrapolated.push(2.0 * v - v_prev);
        }
        if let [.., prev, last] = extrapolated[..] {
            if (last - prev).abs() < opts.tolerance {
                hits += 1;
                if hits >= 2 {
                    return Ok(ConjugateEvaluation {
                        x,
                        epsilon: eps,
                        value: last,
                        quadrature_error_estimate: quad_err + (last - prev).abs(),
                    });
                }
            } else {
                hits = 0;
            }
        }
        eps_prev = eps;
        v_prev = v;
    }

    let shrinking = raw_diffs
        .windows(2)
        .rev()
        .take(3)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15);
    match extrapolated[..] {
        [.., prev, last] if shrinking => Ok(ConjugateEvaluation {
            x,
            epsilon: eps_prev,
            value: last,
            quadrature_error_estimate: quad_err + (last - prev).abs(),
        }),
        _ => Err(Error::Convergence(format!(
            "x = {x}: differences {:?} are not decreasing",
            raw_diffs.iter().rev().take(4).collect::<Vec<_>>()
        ))),
    }
}

/// `f̃(x)`: the exact conjugate series when coefficients are known, otherwise
/// the extrapolated ε → 0 limit of [`conjugate_truncated`].
pub fn conjugate_function(f: &PeriodicFunction, x: f64) -> Result<f64> {
    match f.coefficients() {
        Some(data) => Ok(data.conjugate_value(x)),
        None => conjugate_limit(f, x, LimitOptions::default()).map(|e| e.value),
    }
}

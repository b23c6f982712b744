//! Modulus-of-continuity-type functions ω with a majorant H of
//! `∫_u^π t^{-2} ω(t) dt`, and checkers for the integral conditions the
//! deviation bounds rely on.

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::fit::{ratio, FitReport};
use crate::quadrature::{integrate, integrate_from_zero, QuadOptions};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A modulus-type function ω on `[0, 2π]` together with its majorant H on `(0, π]`.
#[derive(Clone)]
pub struct ModulusModel {
    omega: ScalarFn,
    h: ScalarFn,
    label: String,
}

impl fmt::Debug for ModulusModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModulusModel").field("label", &self.label).finish()
    }
}

impl ModulusModel {
    pub fn new<W, H>(label: impl Into<String>, omega: W, h: H) -> Self
    where
        W: Fn(f64) -> f64 + Send + Sync + 'static,
        H: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            omega: Arc::new(omega),
            h: Arc::new(h),
            label: label.into(),
        }
    }

    /// `ω(δ) = δ^α` with `H(u) = ∫_u^π t^{α−2} dt` in closed form.
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(domain("alpha", alpha, "0 < alpha <= 1"));
        }
        let h: ScalarFn = if alpha == 1.0 {
            Arc::new(|u: f64| (PI / u).ln())
        } else {
            Arc::new(move |u: f64| (u.powf(alpha - 1.0) - PI.powf(alpha - 1.0)) / (1.0 - alpha))
        };
        Ok(Self {
            omega: Arc::new(move |d: f64| d.powf(alpha)),
            h,
            label: format!("power alpha={alpha}"),
        })
    }

    /// `ω(δ) = δ log(2πe/δ)` with `H(u) = ½(log²(2πe/u) − log²(2e))`.
    pub fn lipschitz_log() -> Self {
        let l = |t: f64| (2.0 * PI * E / t).ln();
        Self::new(
            "lipschitz-log",
            move |d: f64| if d == 0.0 { 0.0 } else { d * l(d) },
            move |u: f64| 0.5 * (l(u).powi(2) - l(PI).powi(2)),
        )
    }

    /// `ω(δ) = 1 / log(2πe²/δ)`: a modulus too weak for `∫_0^u t^{-1} ω(t) dt` to converge.
    ///
    /// `H(u) = 1/(u L(u)) − 1/(π L(π))`, `L(u) = log(2πe²/u)`, majorizes
    /// `∫_u^π t^{-2} ω(t) dt` within a factor 2 since `L >= 2` on `(0, 2π]`.
    pub fn log_inverse() -> Self {
        let l = |t: f64| (2.0 * PI * E * E / t).ln();
        Self::new(
            "log-inverse",
            move |d: f64| if d == 0.0 { 0.0 } else { 1.0 / l(d) },
            move |u: f64| 1.0 / (u * l(u)) - 1.0 / (PI * l(PI)),
        )
    }

    /// `ω ≡ 0`, `H ≡ 1`.
    pub fn zero() -> Self {
        Self::new("zero", |_| 0.0, |_| 1.0)
    }

    pub fn omega(&self, delta: f64) -> f64 {
        (self.omega)(delta)
    }

    #[allow(non_snake_case)]
    pub fn H(&self, u: f64) -> f64 {
        (self.h)(u)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Checks the defining properties on fixed deterministic samples.
    pub fn invariants(&self) -> ModelInvariants {
        let top = 2.0 * PI;
        let grid: Vec<f64> = (0..256).map(|i| top * i as f64 / 255.0).collect();
        let values: Vec<f64> = grid.iter().map(|&d| self.omega(d)).collect();
        let nondecreasing = values.windows(2).all(|w| w[1] >= w[0]);

        let pairs: Vec<(f64, f64)> = weyl_pairs(100)
            .map(|(x, y)| (x * PI, y * PI))
            .collect();
        let subadditive = pairs
            .iter()
            .all(|&(d1, d2)| self.omega(d1 + d2) <= self.omega(d1) + self.omega(d2) + 1e-12);
        let quasi_decreasing = check_quasi_decreasing(self, &quasi_decreasing_pairs(&pairs, top)).ok;
        ModelInvariants {
            zero_at_origin: self.omega(0.0) == 0.0,
            nondecreasing,
            subadditive,
            quasi_decreasing,
        }
    }
}

/// Results of [`ModulusModel::invariants`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelInvariants {
    pub zero_at_origin: bool,
    pub nondecreasing: bool,
    pub subadditive: bool,
    pub quasi_decreasing: bool,
}

impl ModelInvariants {
    pub fn all(&self) -> bool {
        self.zero_at_origin && self.nondecreasing && self.subadditive && self.quasi_decreasing
    }
}

// Additive-recurrence (golden ratio) samples in (0, 1)².
fn weyl_pairs(count: usize) -> impl Iterator<Item = (f64, f64)> {
    const G1: f64 = 0.754_877_666_246_692_7;
    const G2: f64 = 0.569_840_290_998_053_3;
    (1..=count).map(|i| {
        let x = (0.5 + G1 * i as f64).fract();
        let y = (0.5 + G2 * i as f64).fract();
        (x.max(1e-6), y.max(1e-6))
    })
}

fn quasi_decreasing_pairs(pairs: &[(f64, f64)], top: f64) -> Vec<(f64, f64)> {
    pairs
        .iter()
        .map(|&(a, b)| {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            (lo, (2.0 * hi).min(top))
        })
        .collect()
}

/// Geometric grid `top · 2^{-j}`, `j = 1..=count`, ordered coarse → fine.
pub fn geometric_grid(top: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|j| top * 0.5f64.powi(j as i32)).collect()
}

/// The default grid for the conditions on `(0, π]`: `π 2^{-j}`, `j = 1..=24`.
pub fn default_u_grid() -> Vec<f64> {
    geometric_grid(PI, 24)
}

fn quad_opts() -> QuadOptions {
    QuadOptions::with_tol(1e-14, 1e-10)
}

fn check_grid(grid: &[f64], top: f64, expected: &'static str) -> Result<()> {
    match grid.iter().find(|&&u| !(u > 0.0 && u <= top)) {
        Some(&u) => Err(domain("u", u, expected)),
        None => Ok(()),
    }
}

/// `∫_u^π t^{-2} ω(t) dt`.
pub fn tail_integral(m: &ModulusModel, u: f64) -> Result<f64> {
    if u >= PI {
        return Ok(0.0);
    }
    Ok(integrate(|t: f64| m.omega(t) / (t * t), u, PI, quad_opts())?.value)
}

/// Condition `∫_u^π t^{-2} ω(t) dt = O(H(u))`.
pub fn check_tail_integral(m: &ModulusModel, grid: &[f64]) -> Result<FitReport> {
    check_grid(grid, PI, "0 < u <= π")?;
    let mut samples = Vec::with_capacity(grid.len());
    for &u in grid {
        let integral = tail_integral(m, u)?;
        let h = m.H(u);
        if h == 0.0 && integral > 0.0 {
            return Ok(FitReport::violated(samples, u, format!("H({u}) = 0 with positive integral")));
        }
        samples.push((u, ratio(integral, h)));
    }
    Ok(FitReport::from_samples(samples))
}

/// Condition `∫_0^u H(t) dt = O(u H(u))`.
pub fn check_majorant_integral(m: &ModulusModel, grid: &[f64]) -> Result<FitReport> {
    check_grid(grid, PI, "0 < u <= π")?;
    let mut samples = Vec::with_capacity(grid.len());
    for &u in grid {
        let integral = match integrate_from_zero(|t| m.H(t), u, quad_opts()) {
            Ok(r) => r.value,
            Err(Error::Divergent { .. }) => {
                return Ok(FitReport::violated(samples, u, format!("∫_0^{u} H diverges")));
            }
            Err(e) => return Err(e),
        };
        samples.push((u, ratio(integral, u * m.H(u))));
    }
    Ok(FitReport::from_samples(samples))
}

/// Condition `∫_0^u t^{-1} ω(t) dt = O(ω(u))`, `u ∈ (0, 2π]`.
pub fn check_log_integral(m: &ModulusModel, grid: &[f64]) -> Result<FitReport> {
    check_grid(grid, 2.0 * PI, "0 < u <= 2π")?;
    let mut samples = Vec::with_capacity(grid.len());
    for &u in grid {
        let w = m.omega(u);
        if w == 0.0 {
            return Ok(FitReport::violated(samples, u, format!("ω({u}) = 0")));
        }
        let integral = match integrate_from_zero(|t| m.omega(t) / t, u, quad_opts()) {
            Ok(r) => r.value,
            Err(Error::Divergent { .. }) => {
                return Ok(FitReport::violated(samples, u, format!("∫_0^{u} ω(t)/t diverges")));
            }
            Err(e) => return Err(e),
        };
        samples.push((u, ratio(integral, w)));
    }
    Ok(FitReport::from_samples(samples))
}

/// `∫_α^β t^{-1} ω(t) dt = O((β − α) H(c(β − α)))` over the given `(α, β)` pairs.
pub fn check_interval_integral(m: &ModulusModel, c: f64, pairs: &[(f64, f64)]) -> Result<FitReport> {
    if !(c >= 1.0) {
        return Err(domain("c", c, "c >= 1"));
    }
    let mut samples = Vec::with_capacity(pairs.len());
    for &(alpha, beta) in pairs {
        if !(beta > alpha && alpha > 0.0) {
            return Err(domain("alpha", alpha, "beta > alpha > 0"));
        }
        let gap = beta - alpha;
        let integral = integrate(|t: f64| m.omega(t) / t, alpha, beta, quad_opts())?.value;
        let den = gap * m.H(c * gap);
        samples.push((gap, ratio(integral, den)));
    }
    Ok(FitReport::from_samples(samples))
}

/// `∫_u^π t^{-2} ω(t) dt = O(H(bu))`.
pub fn check_dilated_tail(m: &ModulusModel, b: f64, grid: &[f64]) -> Result<FitReport> {
    if !(b >= 1.0) {
        return Err(domain("b", b, "b >= 1"));
    }
    check_grid(grid, PI, "0 < u <= π")?;
    let mut samples = Vec::with_capacity(grid.len());
    for &u in grid {
        let integral = tail_integral(m, u)?;
        samples.push((u, ratio(integral, m.H(b * u))));
    }
    Ok(FitReport::from_samples(samples))
}

/// `δ₂^{-1} ω(δ₂) <= 2 δ₁^{-1} ω(δ₁)` for `δ₂ >= δ₁ > 0`.
///
/// The reported constant is the largest `(δ₂^{-1}ω(δ₂)) / (2 δ₁^{-1}ω(δ₁))`;
/// `ok` iff it does not exceed 1.
pub fn check_quasi_decreasing(m: &ModulusModel, pairs: &[(f64, f64)]) -> FitReport {
    let samples: Vec<(f64, f64)> = pairs
        .iter()
        .map(|&(d1, d2)| {
            let lhs = m.omega(d2) / d2;
            let rhs = 2.0 * m.omega(d1) / d1;
            (d2 / d1, ratio(lhs, rhs))
        })
        .collect();
    let mut report = FitReport::from_samples(samples);
    report.ok = report.violation.is_none() && report.constant <= 1.0 + 1e-12;
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(alpha: f64) -> ModulusModel {
        ModulusModel::power(alpha).unwrap()
    }

    #[test]
    fn power_model_values() {
        let m = power(0.5);
        assert!((m.H(PI / 4.0) - 2.0 / PI.sqrt()).abs() < 1e-14);
        assert!((m.omega(PI) - PI.sqrt()).abs() < 1e-15);
        let m = power(1.0);
        assert_eq!(m.H(PI), 0.0);
        assert!((m.H(0.1) - (PI / 0.1).ln()).abs() < 1e-15);
        assert!(ModulusModel::power(0.0).is_err());
        assert!(ModulusModel::power(1.5).is_err());
    }

    #[test]
    fn shipped_models_satisfy_invariants() {
        for m in [
            power(0.25),
            power(0.5),
            power(0.75),
            power(1.0),
            ModulusModel::lipschitz_log(),
            ModulusModel::log_inverse(),
        ] {
            let inv = m.invariants();
            assert!(inv.all(), "{}: {inv:?}", m.label());
        }
    }

    #[test]
    fn tail_integral_for_power_and_linear() {
        let r = check_tail_integral(&power(0.5), &default_u_grid()).unwrap();
        assert!(r.ok && (r.constant - 1.0).abs() < 0.05, "{r}");
        let r = check_tail_integral(&power(1.0), &default_u_grid()).unwrap();
        assert!(r.ok && (r.constant - 1.0).abs() < 0.05, "{r}");
        let r = check_tail_integral(&ModulusModel::zero(), &default_u_grid()).unwrap();
        assert!(r.ok && r.constant == 0.0);
    }

    #[test]
    fn tail_integral_includes_endpoint() {
        let r = check_tail_integral(&power(0.5), &[PI, PI / 2.0, PI / 4.0]).unwrap();
        assert!(r.ok);
        assert_eq!(r.samples[0].1, 0.0);
        assert!(check_tail_integral(&power(0.5), &[0.0]).is_err());
    }

    #[test]
    fn majorant_integral_closed_forms() {
        let grid = default_u_grid();
        let r = check_majorant_integral(&power(0.5), &grid).unwrap();
        assert!(r.ok, "{r}");
        for &(u, v) in &r.samples {
            let want = (4.0 * u.sqrt() - 2.0 * u / PI.sqrt()) / (u * 2.0 * (u.powf(-0.5) - PI.powf(-0.5)));
            assert!((v - want).abs() < 1e-7 * want, "u = {u}");
        }
        // fine end tends to 2
        assert!((r.samples.last().unwrap().1 - 2.0).abs() < 1e-3);

        let r = check_majorant_integral(&ModulusModel::new("h=1", |d| d, |_| 1.0), &grid).unwrap();
        assert!(r.samples.iter().all(|&(_, v)| (v - 1.0).abs() < 1e-9));

        let r = check_majorant_integral(&power(1.0), &grid).unwrap();
        let (u, v) = *r.samples.last().unwrap();
        let l = (PI / u).ln();
        assert!((v - (l + 1.0) / l).abs() < 1e-8);
    }

    #[test]
    fn log_integral_power_ratio_is_inverse_alpha() {
        for alpha in [0.25, 0.5, 0.75, 1.0] {
            let r = check_log_integral(&power(alpha), &default_u_grid()).unwrap();
            assert!(r.ok);
            for &(_, v) in &r.samples {
                assert!((v - 1.0 / alpha).abs() < 1e-7, "alpha = {alpha}: {v}");
            }
        }
    }

    #[test]
    fn log_integral_fails_for_log_inverse() {
        let r = check_log_integral(&ModulusModel::log_inverse(), &default_u_grid()).unwrap();
        assert!(!r.ok);
        assert!(r.violation.is_some());
        // and ω ≡ 0 is reported, not divided
        assert!(!check_log_integral(&ModulusModel::zero(), &[1.0]).unwrap().ok);
    }

    #[test]
    fn lipschitz_log_passes_log_integral() {
        // ∫_0^u log(2πe/t) dt = ω(u) + u, ratio 1 + 1/log(2πe/u)
        let r = check_log_integral(&ModulusModel::lipschitz_log(), &default_u_grid()).unwrap();
        assert!(r.ok);
        for &(u, v) in &r.samples {
            let want = 1.0 + 1.0 / (2.0 * PI * E / u).ln();
            assert!((v - want).abs() < 1e-8);
        }
    }

    #[test]
    fn interval_integral_examples() {
        let m = power(0.5);
        let r = check_interval_integral(&m, 1.0, &[(PI / 8.0, PI / 4.0)]).unwrap();
        let integral = 2.0 * ((PI / 4.0).sqrt() - (PI / 8.0).sqrt());
        let want = integral / (PI / 8.0 * m.H(PI / 8.0));
        assert!((r.constant - want).abs() < 1e-10);

        let sweep: Vec<(f64, f64)> = (1..20).map(|j| (PI / 8.0, PI / 8.0 + PI * 0.5f64.powi(j + 2))).collect();
        let r = check_interval_integral(&m, 1.0, &sweep).unwrap();
        assert!(r.ok && r.constant.is_finite());

        let r = check_interval_integral(&ModulusModel::zero(), 2.0, &sweep).unwrap();
        assert_eq!(r.constant, 0.0);
        assert!(check_interval_integral(&m, 0.5, &sweep).is_err());
        assert!(check_interval_integral(&m, 1.0, &[(0.5, 0.2)]).is_err());
    }

    #[test]
    fn dilated_tail_examples() {
        let m = power(0.5);
        let grid = geometric_grid(PI / 2.0, 20);
        let a = check_dilated_tail(&m, 1.0, &grid).unwrap();
        let b = check_tail_integral(&m, &grid).unwrap();
        assert_eq!(a.samples, b.samples);

        let u = PI / 8.0;
        let r = check_dilated_tail(&m, 2.0, &[u]).unwrap();
        let want = (u.powf(-0.5) - PI.powf(-0.5)) / ((2.0 * u).powf(-0.5) - PI.powf(-0.5));
        assert!((r.constant - want).abs() < 1e-8);

        let r = check_dilated_tail(&m, 3.0, &[PI]).unwrap();
        assert_eq!(r.constant, 0.0);
    }

    #[test]
    fn quasi_decreasing_holds_exactly_for_power_models() {
        let pairs: Vec<(f64, f64)> = weyl_pairs(100).map(|(x, y)| (x.min(y), x.max(y) * 2.0)).collect();
        for alpha in [0.25, 0.5, 0.75, 1.0] {
            let m = power(alpha);
            for &(d1, d2) in &pairs {
                assert!(m.omega(d2) / d2 <= m.omega(d1) / d1);
            }
            assert!(check_quasi_decreasing(&m, &pairs).ok);
        }
    }
}

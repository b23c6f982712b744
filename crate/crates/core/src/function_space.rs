//! 2π-periodic functions, the norms of `C` and `L^p`, and the two moduli of
//! continuity built from the symmetric differences ψ and φ.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::fourier_engine::FourierData;

/// Default number of uniform grid points on `[-π, π)`.
pub const DEFAULT_GRID_SIZE: usize = 2048;

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A 2π-periodic real function with an explicit evaluator.
///
/// Functions built from a coefficient table carry it along, which lets the
/// Fourier and conjugate machinery bypass quadrature entirely.
#[derive(Clone)]
pub struct PeriodicFunction {
    evaluator: Evaluator,
    degree_hint: Option<usize>,
    coeffs: Option<Arc<FourierData>>,
}

impl fmt::Debug for PeriodicFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicFunction")
            .field("degree_hint", &self.degree_hint)
            .field("has_coefficients", &self.coeffs.is_some())
            .finish()
    }
}

impl PeriodicFunction {
    /// Wraps an arbitrary evaluator. The caller guarantees periodicity.
    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            evaluator: Arc::new(f),
            degree_hint: None,
            coeffs: None,
        }
    }

    /// The trigonometric polynomial with the given coefficients.
    pub fn trig_poly(data: FourierData) -> Self {
        let data = Arc::new(data);
        let eval_data = Arc::clone(&data);
        Self {
            evaluator: Arc::new(move |x| eval_data.value(x)),
            degree_hint: Some(data.degree()),
            coeffs: Some(data),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::trig_poly(FourierData::from_parts(vec![2.0 * c], vec![0.0]))
    }

    /// `cos(ν x)`.
    pub fn cosine(nu: usize) -> Self {
        let mut a = vec![0.0; nu + 1];
        let b = vec![0.0; nu + 1];
        a[nu] = if nu == 0 { 2.0 } else { 1.0 };
        Self::trig_poly(FourierData::from_parts(a, b))
    }

    /// `sin(ν x)`.
    pub fn sine(nu: usize) -> Self {
        let a = vec![0.0; nu + 1];
        let mut b = vec![0.0; nu + 1];
        if nu > 0 {
            b[nu] = 1.0;
        }
        Self::trig_poly(FourierData::from_parts(a, b))
    }

    /// Weierstrass-type lacunary sum `Σ_{j<terms} 2^{-jα} cos(2^j x)`.
    pub fn weierstrass(alpha: f64, terms: u32) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(domain("alpha", alpha, "0 < alpha <= 1"));
        }
        if terms == 0 || terms > 12 {
            return Err(domain("terms", terms as f64, "1 <= terms <= 12"));
        }
        let top = 1usize << (terms - 1);
        let mut a = vec![0.0; top + 1];
        for j in 0..terms {
            a[1usize << j] = 2f64.powf(-(j as f64) * alpha);
        }
        let b = vec![0.0; top + 1];
        Ok(Self::trig_poly(FourierData::from_parts(a, b)))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.evaluator)(x)
    }

    pub fn degree_hint(&self) -> Option<usize> {
        self.degree_hint
    }

    /// Exact coefficients, when the function was built from them.
    pub fn coefficients(&self) -> Option<&FourierData> {
        self.coeffs.as_deref()
    }

    /// `c · f`, keeping exact coefficients when present.
    pub fn scaled(&self, c: f64) -> Self {
        match &self.coeffs {
            Some(data) => Self::trig_poly(data.scaled(c)),
            None => {
                let inner = Arc::clone(&self.evaluator);
                Self::from_fn(move |x| c * inner(x))
            }
        }
    }

    /// Checks `f(x + 2π) = f(x)` to `rel_tol` on a uniform grid of `points` points.
    pub fn is_periodic_on_grid(&self, points: usize, rel_tol: f64) -> bool {
        (0..points).all(|i| {
            let x = -PI + 2.0 * PI * i as f64 / points as f64;
            let (v, w) = (self.eval(x), self.eval(x + 2.0 * PI));
            (v - w).abs() <= rel_tol * v.abs().max(w.abs()).max(1.0)
        })
    }
}

/// `ψ_x(t) = f(x + t) − f(x − t)`.
pub fn psi(f: &PeriodicFunction, x: f64, t: f64) -> f64 {
    f.eval(x + t) - f.eval(x - t)
}

/// `φ_x(t) = f(x + t) + f(x − t) − 2 f(x)`.
pub fn phi(f: &PeriodicFunction, x: f64, t: f64) -> f64 {
    f.eval(x + t) + f.eval(x - t) - 2.0 * f.eval(x)
}

/// Which norm a [`NormSpace`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    /// Sup norm of `C`, taken as a grid maximum.
    Sup,
    /// `L^p` with `1 <= p < ∞`, by composite Simpson quadrature.
    Lp(f64),
}

/// The space `X` with a grid-based norm evaluator over `Q = [-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpace {
    kind: NormKind,
    grid_size: usize,
}

impl NormSpace {
    pub fn new(kind: NormKind, grid_size: usize) -> Result<Self> {
        if grid_size < 64 || grid_size % 2 != 0 {
            return Err(domain("grid_size", grid_size as f64, "even and >= 64"));
        }
        if let NormKind::Lp(p) = kind {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(domain("p", p, "1 <= p < inf"));
            }
        }
        Ok(Self { kind, grid_size })
    }

    pub fn sup(grid_size: usize) -> Result<Self> {
        Self::new(NormKind::Sup, grid_size)
    }

    pub fn lp(p: f64, grid_size: usize) -> Result<Self> {
        Self::new(NormKind::Lp(p), grid_size)
    }

    pub fn kind(&self) -> NormKind {
        self.kind
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// The uniform grid `x_i = -π + 2π i / N`, `i = 0..N`.
    pub fn grid_points(&self) -> Vec<f64> {
        let n = self.grid_size as f64;
        (0..self.grid_size)
            .map(|i| -PI + 2.0 * PI * i as f64 / n)
            .collect()
    }

    /// Norm of a function given by its values on [`grid_points`](Self::grid_points).
    pub fn norm_samples(&self, values: &[f64]) -> Result<f64> {
        assert_eq!(values.len(), self.grid_size, "sample count must equal grid size");
        let h = 2.0 * PI / self.grid_size as f64;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                x: -PI + h * i as f64,
                value: values[i],
            });
        }
        match self.kind {
            NormKind::Sup => Ok(values.iter().fold(0.0f64, |m, v| m.max(v.abs()))),
            NormKind::Lp(p) => {
                // Periodic composite Simpson: the two endpoint weights merge at x_0.
                let mut even = 0.0;
                let mut odd = 0.0;
                for (i, v) in values.iter().enumerate() {
                    let w = if p == 1.0 { v.abs() } else { v.abs().powf(p) };
                    if i % 2 == 0 {
                        even += w;
                    } else {
                        odd += w;
                    }
                }
                let integral = h / 3.0 * (2.0 * even + 4.0 * odd);
                Ok(if p == 1.0 { integral } else { integral.powf(1.0 / p) })
            }
        }
    }

    pub fn norm_fn<F: Fn(f64) -> f64>(&self, g: F) -> Result<f64> {
        let values: Vec<f64> = self.grid_points().into_iter().map(g).collect();
        self.norm_samples(&values)
    }

    pub fn norm(&self, g: &PeriodicFunction) -> Result<f64> {
        self.norm_fn(|x| g.eval(x))
    }
}

/// Selects the difference the modulus is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulusKind {
    /// `ω̃₂`: sup over `0 < t <= δ` of `‖ψ_·(t)‖`.
    Conjugate,
    /// `ω₂`: sup over `|t| <= δ` of `‖φ_·(t)‖` (φ is even in t).
    Classical,
}

const LOG_LAGS: usize = 512;
const LINEAR_LAGS: usize = 1024;
const GOLDEN_STEPS: usize = 24;

/// The fixed lag grid: 512 log-spaced points on `[2π·1e-6, 2π]` merged with
/// 1024 uniform points on `(0, 2π]`. Sorted, strictly increasing.
fn lag_grid(max_delta: f64) -> Vec<f64> {
    let top = 2.0 * PI;
    let mut lags: Vec<f64> = (0..LOG_LAGS)
        .map(|j| top * 10f64.powf(-6.0 + 6.0 * j as f64 / (LOG_LAGS - 1) as f64))
        .chain((1..=LINEAR_LAGS).map(|i| top * i as f64 / LINEAR_LAGS as f64))
        .filter(|&t| t <= max_delta)
        .collect();
    lags.sort_by(f64::total_cmp);
    lags.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * top);
    lags
}

enum LagSource {
    Function(PeriodicFunction),
    Harmonics {
        freqs: Vec<f64>,
        // base[h][i]: the harmonic's grid profile, see `Harmonics` in `lag_samples`.
        base: Vec<Vec<f64>>,
    },
}

/// Sampled modulus of continuity `δ ↦ ω(f, δ)_X` for one function and space.
///
/// The sup over lags is a running maximum over a fixed lag grid, topped up by a
/// golden-section search on the last partial cell `[t_prev, δ]`. The lag sets
/// are nested, so the result is nondecreasing in δ up to the golden-section
/// resolution.
pub struct ModulusCurve {
    space: NormSpace,
    kind: ModulusKind,
    source: LagSource,
    max_delta: f64,
    lags: Vec<f64>,
    prefix_max: Vec<f64>,
}

impl fmt::Debug for ModulusCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModulusCurve")
            .field("space", &self.space)
            .field("kind", &self.kind)
            .field("lags", &self.lags.len())
            .finish()
    }
}

impl ModulusCurve {
    /// Samples the modulus on every grid lag `<= max_delta`.
    pub fn new(space: NormSpace, f: &PeriodicFunction, kind: ModulusKind, max_delta: f64) -> Result<Self> {
        check_delta(max_delta)?;
        let source = match f.coefficients() {
            Some(data) => {
                let grid = space.grid_points();
                let mut freqs = Vec::new();
                let mut base = Vec::new();
                for (nu, a, b) in data.harmonics() {
                    let nuf = nu as f64;
                    let profile = grid
                        .iter()
                        .map(|&x| {
                            let (s, c) = (nuf * x).sin_cos();
                            match kind {
                                ModulusKind::Conjugate => a * s - b * c,
                                ModulusKind::Classical => a * c + b * s,
                            }
                        })
                        .collect();
                    freqs.push(nuf);
                    base.push(profile);
                }
                LagSource::Harmonics { freqs, base }
            }
            None => LagSource::Function(f.clone()),
        };
        let mut curve = Self {
            space,
            kind,
            source,
            max_delta,
            lags: lag_grid(max_delta),
            prefix_max: Vec::new(),
        };
        let mut running = 0.0f64;
        let mut prefix = Vec::with_capacity(curve.lags.len());
        for &t in &curve.lags {
            running = running.max(curve.lag_norm(t)?);
            prefix.push(running);
        }
        curve.prefix_max = prefix;
        Ok(curve)
    }

    pub fn kind(&self) -> ModulusKind {
        self.kind
    }

    pub fn space(&self) -> NormSpace {
        self.space
    }

    /// Lags and running maxima the curve was sampled on.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.lags.iter().copied().zip(self.prefix_max.iter().copied())
    }

    /// The difference function at lag `t`, sampled on the space grid.
    pub fn lag_samples(&self, t: f64) -> Vec<f64> {
        match &self.source {
            LagSource::Function(f) => self
                .space
                .grid_points()
                .into_iter()
                .map(|x| match self.kind {
                    ModulusKind::Conjugate => psi(f, x, t),
                    ModulusKind::Classical => phi(f, x, t),
                })
                .collect(),
            LagSource::Harmonics { freqs, base } => {
                // ψ_x(t) = −2 Σ sin(νt) (a_ν sin νx − b_ν cos νx)
                // φ_x(t) = −4 Σ sin²(νt/2) (a_ν cos νx + b_ν sin νx)
                let mut out = vec![0.0; self.space.grid_size()];
                for (nu, profile) in freqs.iter().zip(base) {
                    let weight = match self.kind {
                        ModulusKind::Conjugate => -2.0 * (nu * t).sin(),
                        ModulusKind::Classical => -4.0 * (0.5 * nu * t).sin().powi(2),
                    };
                    for (o, p) in out.iter_mut().zip(profile) {
                        *o += weight * p;
                    }
                }
                out
            }
        }
    }

    /// `‖ψ_·(t)‖_X` or `‖φ_·(t)‖_X`.
    pub fn lag_norm(&self, t: f64) -> Result<f64> {
        self.space.norm_samples(&self.lag_samples(t))
    }

    /// The modulus at δ. Requires `δ` not beyond the `max_delta` used to build the curve.
    pub fn value(&self, delta: f64) -> Result<f64> {
        check_delta(delta)?;
        if delta == 0.0 {
            return Ok(0.0);
        }
        let idx = self.lags.partition_point(|&t| t <= delta);
        let (t_prev, prefix) = if idx == 0 {
            (0.0, 0.0)
        } else {
            (self.lags[idx - 1], self.prefix_max[idx - 1])
        };
        if delta > self.max_delta {
            return Err(domain("delta", delta, "within the range the modulus curve was sampled on"));
        }
        Ok(prefix.max(self.cell_max(t_prev, delta)?))
    }

    /// Golden-section estimate of `max_{t ∈ [lo, hi]} lag_norm(t)`, always including `hi`.
    fn cell_max(&self, lo: f64, hi: f64) -> Result<f64> {
        let mut best = self.lag_norm(hi)?;
        if hi - lo <= 1e-15 {
            return Ok(best);
        }
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let mut fc = self.lag_norm(c)?;
        let mut fd = self.lag_norm(d)?;
        best = best.max(fc).max(fd);
        for _ in 0..GOLDEN_STEPS {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = self.lag_norm(c)?;
                best = best.max(fc);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = self.lag_norm(d)?;
                best = best.max(fd);
            }
        }
        Ok(best)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if (0.0..=2.0 * PI).contains(&delta) {
        Ok(())
    } else {
        Err(domain("delta", delta, "0 <= delta <= 2π"))
    }
}

/// `ω̃₂(f, δ)_X = sup_{0 < t <= δ} ‖ψ_·(t)‖_X`.
pub fn conj_modulus2(space: &NormSpace, f: &PeriodicFunction, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if delta == 0.0 {
        return Ok(0.0);
    }
    ModulusCurve::new(*space, f, ModulusKind::Conjugate, delta)?.value(delta)
}

/// `ω₂(f, δ)_X = sup_{|t| <= δ} ‖φ_·(t)‖_X`.
pub fn classical_modulus2(space: &NormSpace, f: &PeriodicFunction, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if delta == 0.0 {
        return Ok(0.0);
    }
    ModulusCurve::new(*space, f, ModulusKind::Classical, delta)?.value(delta)
}

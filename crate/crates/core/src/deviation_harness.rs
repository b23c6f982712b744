//! Deviation experiments: matrix means `T_{n,A}f`, `T̃_{n,A}f`, their distance
//! to `f`, `f̃` or `f̃(·, ε)` in a norm space, the matching upper-bound
//! envelopes, and log–log rate fits.
//!
//! Test functions are band-limited, so every quantity is a finite
//! combination of harmonic profiles on the norm grid. With
//! `w_ν = Σ_{k>=ν} a_{n,k}` the means are
//!
//! ```text
//! T̃_{n,A}f(x) = Σ_ν w_ν (a_ν sin νx − b_ν cos νx)
//! ```
//!
//! and `f̃(x, ε) = Σ_ν γ_ν(ε) (a_ν sin νx − b_ν cos νx)` with
//! `γ_ν(ε) = 1 − (1/π) ∫_0^ε sin(νt) cot(t/2) dt`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fit::{ratio, FitReport};
use crate::fourier_engine::FourierData;
use crate::function_space::{ModulusCurve, ModulusKind, NormSpace, PeriodicFunction};
use crate::matrix_lab::{self, a_nr, r_difference_suffix, SummabilityMatrix, TAIL_TOLERANCE};
use crate::modulus_models::{self, geometric_grid, ModulusModel};
use crate::quadrature::{integrate, QuadOptions};

/// Allowed growth of `constant_ratio_max` when the n grid is extended fourfold.
pub const REFINEMENT_GROWTH_LIMIT: f64 = 1.25;

/// Minimum number of usable rows for a slope fit.
pub const MIN_FIT_ROWS: usize = 4;

/// The default n grid.
pub const DEFAULT_N_VALUES: [usize; 6] = [8, 16, 32, 64, 128, 256];

/// Which deviation bound an experiment is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// `H(π/(n+1)) (π/(n+1) + A_{n,r})`.
    T1,
    /// `H(A_{n,r}) A_{n,r}`.
    T2,
    /// `ω(π/(n+1)) + H(π/(n+1)) A_{n,r}`.
    T3,
    /// The three-term envelope in the measured conjugate modulus `ω̃₂`.
    T4,
    /// `H(π/(n+1))/(n+1) + Σ_{k=1}^n a_{n,k} H(π/(k+1))/(k+1)`.
    C1,
    /// Non-conjugate `‖T_{n,A}f − f‖` against the T1 envelope.
    TA,
    /// Non-conjugate `‖T_{n,A}f − f‖` against the T4 envelope in `ω₂`.
    TB,
}

impl Theorem {
    pub const ALL: [Theorem; 7] = [
        Theorem::T1,
        Theorem::T2,
        Theorem::T3,
        Theorem::T4,
        Theorem::C1,
        Theorem::TA,
        Theorem::TB,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Theorem::T1 => "T1",
            Theorem::T2 => "T2",
            Theorem::T3 => "T3",
            Theorem::T4 => "T4",
            Theorem::C1 => "C1",
            Theorem::TA => "TA",
            Theorem::TB => "TB",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.id().eq_ignore_ascii_case(s))
    }

    /// Whether the deviation concerns `T̃_{n,A}f` (as opposed to `T_{n,A}f`).
    pub fn is_conjugate(self) -> bool {
        !matches!(self, Theorem::TA | Theorem::TB)
    }

    /// Whether the bound needs a [`ModulusModel`].
    pub fn needs_model(self) -> bool {
        !matches!(self, Theorem::T4 | Theorem::TB)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// The reference the conjugate mean is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `f̃`.
    FullConjugate,
    /// `f̃(·, π/(r(n+1)))`.
    TruncatedPiOverRn,
    /// `f̃(·, A_{n,r}/r)`.
    TruncatedAnrOverR,
}

impl Variant {
    pub fn id(self) -> &'static str {
        match self {
            Variant::FullConjugate => "full_conjugate",
            Variant::TruncatedPiOverRn => "truncated_pi_over_rn",
            Variant::TruncatedAnrOverR => "truncated_Anr_over_r",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Variant::FullConjugate, Variant::TruncatedPiOverRn, Variant::TruncatedAnrOverR]
            .into_iter()
            .find(|v| v.id().eq_ignore_ascii_case(s))
    }
}

/// Band-limited test functions with exact coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Cosine(usize),
    Sine(usize),
    Constant(f64),
    /// Coefficient lists as in [`FourierData::from_parts`].
    Trig { a: Vec<f64>, b: Vec<f64> },
    /// `Σ_{j<terms} 2^{-jα} cos(2^j x)`.
    Weierstrass { alpha: f64, terms: u32 },
}

impl FunctionSpec {
    pub fn build(&self) -> Result<PeriodicFunction> {
        Ok(match self {
            FunctionSpec::Cosine(nu) => PeriodicFunction::cosine(*nu),
            FunctionSpec::Sine(nu) => PeriodicFunction::sine(*nu),
            FunctionSpec::Constant(c) => PeriodicFunction::constant(*c),
            FunctionSpec::Trig { a, b } => {
                if let Some(v) = a.iter().chain(b).find(|v| !v.is_finite()) {
                    return Err(domain("coefficient", *v, "finite"));
                }
                PeriodicFunction::trig_poly(FourierData::from_parts(a.clone(), b.clone()))
            }
            FunctionSpec::Weierstrass { alpha, terms } => PeriodicFunction::weierstrass(*alpha, *terms)?,
        })
    }
}

/// One deviation experiment.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub id: String,
    pub function: FunctionSpec,
    pub matrix: Arc<SummabilityMatrix>,
    pub space: NormSpace,
    pub r: usize,
    pub n_values: Vec<usize>,
    pub theorem: Theorem,
    pub variant: Variant,
    pub model: Option<ModulusModel>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::Config(format!("{}: r must be >= 1", self.id)));
        }
        if self.n_values.is_empty() {
            return Err(Error::Config(format!("{}: n_values is empty", self.id)));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!("{}: n_values must be strictly increasing", self.id)));
        }
        if self.theorem.needs_model() && self.model.is_none() {
            return Err(Error::Config(format!(
                "{}: theorem {} needs a modulus model",
                self.id, self.theorem
            )));
        }
        Ok(())
    }

    /// The same experiment on a different n grid.
    pub fn with_n_values(&self, n_values: Vec<usize>) -> Self {
        Self {
            n_values,
            ..self.clone()
        }
    }
}

/// `T_{n,A}f(x)` or `T̃_{n,A}f(x)` from the multipliers `w_ν = Σ_{k>=ν} a_{n,k}`.
///
/// Rows are truncated at `K(n)`, so the value is off by at most
/// `TAIL_TOLERANCE · max_k |S_k f(x)|`; see [`DeviationRow::tail_bound`].
pub fn matrix_mean(a: &SummabilityMatrix, fd: &FourierData, n: usize, x: f64, conjugate: bool) -> f64 {
    let w = multipliers(a, n, fd.max_freq());
    let mut sum = if conjugate { 0.0 } else { 0.5 * fd.a0() * w[0] };
    for (nu, an, bn) in fd.harmonics() {
        let (s, c) = (nu as f64 * x).sin_cos();
        let profile = if conjugate { an * s - bn * c } else { an * c + bn * s };
        sum += w[nu] * profile;
    }
    sum
}

/// `w_ν = Σ_{k>=ν} a_{n,k}` for `ν = 0..=max_freq`.
fn multipliers(a: &SummabilityMatrix, n: usize, max_freq: usize) -> Vec<f64> {
    let row = a.row(n);
    let end = row.support_end().max(max_freq);
    let mut suffix = vec![0.0; end + 2];
    for k in (0..=end).rev() {
        suffix[k] = suffix[k + 1] + row.get(k);
    }
    suffix.truncate(max_freq + 1);
    suffix
}

/// `γ_ν(ε) = 1 − (1/π) ∫_0^ε sin(νt) cot(t/2) dt`, the factor of the ν-th
/// harmonic in `f̃(·, ε)`. The integrand is smooth (it tends to 2ν at 0).
pub fn truncation_factor(nu: usize, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= PI) {
        return Err(domain("epsilon", epsilon, "0 < epsilon <= π"));
    }
    let nuf = nu as f64;
    let g = |t: f64| (nuf * t).sin() / (0.5 * t).tan();
    let r = integrate(g, 0.0, epsilon, QuadOptions::with_tol(1e-13, 1e-12))?;
    Ok(1.0 - r.value / PI)
}

/// One row of a deviation report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationRow {
    pub n: usize,
    pub deviation: f64,
    pub bound_value: f64,
    /// `deviation / bound_value` with the conventions of [`ratio`].
    pub ratio: f64,
    pub epsilon_used: Option<f64>,
    /// Bound on the error from truncating the row at `K(n)`.
    pub tail_bound: f64,
}

/// Log–log fit of a deviation sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub fitted_slope: f64,
    /// Slope of the bound sequence, when it has enough positive rows.
    pub bound_slope: Option<f64>,
    pub constant_ratio_max: f64,
}

/// The rows of one experiment and their fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub id: String,
    pub rows: Vec<DeviationRow>,
    pub fitted_slope: Option<f64>,
    pub bound_slope: Option<f64>,
    pub constant_ratio_max: f64,
    /// Why the slope fit was skipped, if it was.
    pub fit_error: Option<String>,
}

/// Least-squares slope of `ln y` against `ln(n + 1)` over the rows with `y > 0`.
///
/// The bounds are all functions of `π/(n+1)`, so `n + 1` is the natural
/// abscissa; for `y = 1/(n+1)` it gives exactly −1.
pub fn log_log_slope(points: &[(usize, f64)]) -> Result<f64> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, y)| y > 0.0 && y.is_finite())
        .map(|&(n, y)| (((n + 1) as f64).ln(), y.ln()))
        .collect();
    if used.len() < MIN_FIT_ROWS {
        return Err(Error::InsufficientData {
            have: used.len(),
            need: MIN_FIT_ROWS,
        });
    }
    let m = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / m;
    let my = used.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Slope of the deviations, slope of the bounds and `max_n deviation/bound`.
pub fn fit_rate(rows: &[DeviationRow]) -> Result<RateFit> {
    let dev: Vec<(usize, f64)> = rows.iter().map(|r| (r.n, r.deviation)).collect();
    let fitted_slope = log_log_slope(&dev)?;
    let bound: Vec<(usize, f64)> = rows.iter().map(|r| (r.n, r.bound_value)).collect();
    Ok(RateFit {
        fitted_slope,
        bound_slope: log_log_slope(&bound).ok(),
        constant_ratio_max: constant_ratio_max(rows),
    })
}

fn constant_ratio_max(rows: &[DeviationRow]) -> f64 {
    rows.iter().fold(0.0f64, |m, r| m.max(r.ratio))
}

/// A measured modulus `δ ↦ Ω(δ)` as the piecewise-linear interpolant of a
/// [`ModulusCurve`]'s samples, anchored at `Ω(0) = 0` and flat past the last lag.
#[derive(Debug, Clone)]
pub struct SampledModulus {
    lags: Vec<f64>,
    values: Vec<f64>,
    /// `∫_0^{lags[i]} Ω(t)/t dt`, exact for the interpolant.
    log_integral: Vec<f64>,
}

impl SampledModulus {
    pub fn from_curve(curve: &ModulusCurve) -> Self {
        let (lags, values): (Vec<f64>, Vec<f64>) = curve.samples().unzip();
        let mut log_integral = Vec::with_capacity(lags.len());
        let mut acc = 0.0;
        for i in 0..lags.len() {
            acc += if i == 0 {
                values[0]
            } else {
                segment_log_integral(lags[i - 1], values[i - 1], lags[i], values[i], lags[i])
            };
            log_integral.push(acc);
        }
        Self {
            lags,
            values,
            log_integral,
        }
    }

    pub fn value(&self, delta: f64) -> f64 {
        if delta <= 0.0 || self.lags.is_empty() {
            return 0.0;
        }
        let i = self.lags.partition_point(|&t| t < delta);
        if i == 0 {
            self.values[0] * delta / self.lags[0]
        } else if i == self.lags.len() {
            self.values[i - 1]
        } else {
            let (t0, t1) = (self.lags[i - 1], self.lags[i]);
            let (v0, v1) = (self.values[i - 1], self.values[i]);
            v0 + (v1 - v0) * (delta - t0) / (t1 - t0)
        }
    }

    /// `∫_0^u Ω(t)/t dt`.
    pub fn integral_over_t(&self, u: f64) -> f64 {
        if u <= 0.0 || self.lags.is_empty() {
            return 0.0;
        }
        let i = self.lags.partition_point(|&t| t < u);
        if i == 0 {
            return self.value(u);
        }
        let last = self.lags.len() - 1;
        let (t0, v0) = (self.lags[i - 1], self.values[i - 1]);
        let base = self.log_integral[i - 1];
        if i > last {
            return base + v0 * (u / t0).ln();
        }
        base + segment_log_integral(t0, v0, self.lags[i], self.values[i], u)
    }

    /// Condition `∫_0^u Ω(t)/t dt = O(Ω(u))` on the grid (coarse → fine).
    /// An identically vanishing Ω passes trivially.
    pub fn check_log_integral(&self, grid: &[f64]) -> FitReport {
        let samples = grid
            .iter()
            .map(|&u| (u, ratio(self.integral_over_t(u), self.value(u))))
            .collect();
        FitReport::from_samples(samples)
    }
}

/// `∫_{t0}^{u} (v0 + s (t − t0))/t dt` for the segment through `(t0, v0)`, `(t1, v1)`.
fn segment_log_integral(t0: f64, v0: f64, t1: f64, v1: f64, u: f64) -> f64 {
    let slope = (v1 - v0) / (t1 - t0);
    let intercept = v0 - slope * t0;
    intercept * (u / t0).ln() + slope * (u - t0)
}

/// One named hypothesis check.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub name: String,
    pub report: FitReport,
}

/// Outcome of extending the n grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementCheck {
    pub base: f64,
    pub extended: f64,
    pub growth: f64,
    pub ok: bool,
}

/// A prepared experiment: harmonic profiles on the norm grid and lazily
/// measured moduli.
pub struct Experiment {
    spec: ExperimentSpec,
    data: FourierData,
    function: PeriodicFunction,
    /// `(ν, profile on the grid)` for `ν >= 1`.
    profiles: Vec<(usize, Vec<f64>)>,
    coefficient_mass: f64,
    curve: OnceLock<Result<Arc<ModulusCurve>>>,
    sampled: OnceLock<Result<Arc<SampledModulus>>>,
    /// `Ω(π/μ)` for `μ = 1..=max(n)+1`, index μ.
    modulus_table: OnceLock<Result<Vec<f64>>>,
}

impl fmt::Debug for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Experiment").field("spec", &self.spec).finish()
    }
}

impl Experiment {
    pub fn new(spec: ExperimentSpec) -> Result<Self> {
        spec.validate()?;
        let function = spec.function.build()?;
        let data = function
            .coefficients()
            .cloned()
            .ok_or_else(|| Error::Config(format!("{}: function has no exact coefficients", spec.id)))?;
        if data.max_freq() >= spec.space.grid_size() / 2 {
            return Err(Error::Config(format!(
                "{}: frequency {} not resolved by grid of {} points",
                spec.id,
                data.max_freq(),
                spec.space.grid_size()
            )));
        }
        let grid = spec.space.grid_points();
        let conjugate = spec.theorem.is_conjugate();
        let profiles = data
            .harmonics()
            .map(|(nu, a, b)| {
                let nuf = nu as f64;
                let p = grid
                    .iter()
                    .map(|&x| {
                        let (s, c) = (nuf * x).sin_cos();
                        if conjugate {
                            a * s - b * c
                        } else {
                            a * c + b * s
                        }
                    })
                    .collect();
                (nu, p)
            })
            .collect();
        let coefficient_mass = 0.5 * data.a0().abs() + data.harmonics().map(|(_, a, b)| a.abs() + b.abs()).sum::<f64>();
        Ok(Self {
            spec,
            data,
            function,
            profiles,
            coefficient_mass,
            curve: OnceLock::new(),
            sampled: OnceLock::new(),
            modulus_table: OnceLock::new(),
        })
    }

    pub fn spec(&self) -> &ExperimentSpec {
        &self.spec
    }

    pub fn data(&self) -> &FourierData {
        &self.data
    }

    fn modulus_kind(&self) -> ModulusKind {
        if self.spec.theorem.is_conjugate() {
            ModulusKind::Conjugate
        } else {
            ModulusKind::Classical
        }
    }

    /// The measured modulus of f (`ω̃₂` for conjugate theorems, `ω₂` otherwise).
    pub fn modulus_curve(&self) -> Result<Arc<ModulusCurve>> {
        self.curve
            .get_or_init(|| {
                ModulusCurve::new(self.spec.space, &self.function, self.modulus_kind(), 2.0 * PI).map(Arc::new)
            })
            .clone()
    }

    pub fn sampled_modulus(&self) -> Result<Arc<SampledModulus>> {
        self.sampled
            .get_or_init(|| self.modulus_curve().map(|c| Arc::new(SampledModulus::from_curve(&c))))
            .clone()
    }

    fn modulus_at_pi_over(&self, mu: usize) -> Result<f64> {
        let table = self
            .modulus_table
            .get_or_init(|| {
                let curve = self.modulus_curve()?;
                let top = self.spec.n_values.last().copied().unwrap_or(0) + 1;
                let mut values: Vec<f64> = (1..=top)
                    .into_par_iter()
                    .map(|mu| curve.value(PI / mu as f64))
                    .collect::<Result<_>>()?;
                values.insert(0, f64::NAN);
                Ok(values)
            })
            .as_ref()
            .map_err(Clone::clone)?;
        match table.get(mu) {
            Some(&v) => Ok(v),
            None => self.modulus_curve()?.value(PI / mu as f64),
        }
    }

    fn epsilon(&self, n: usize) -> Option<f64> {
        if !self.spec.theorem.is_conjugate() {
            return None;
        }
        let r = self.spec.r as f64;
        match self.spec.variant {
            Variant::FullConjugate => None,
            Variant::TruncatedPiOverRn => Some(PI / (r * (n + 1) as f64)),
            Variant::TruncatedAnrOverR => Some(a_nr(&self.spec.matrix, n, self.spec.r) / r),
        }
    }

    /// The deviation at n and the ε of the truncated reference, if any.
    pub fn deviation(&self, n: usize) -> Result<(f64, Option<f64>)> {
        let w = multipliers(&self.spec.matrix, n, self.data.max_freq());
        let epsilon = self.epsilon(n);
        let mut diff = vec![0.0; self.spec.space.grid_size()];
        if !self.spec.theorem.is_conjugate() {
            let constant = 0.5 * self.data.a0() * (w[0] - 1.0);
            diff.iter_mut().for_each(|d| *d = constant);
        }
        for (nu, profile) in &self.profiles {
            let reference = match epsilon {
                Some(eps) => truncation_factor(*nu, eps)?,
                None => 1.0,
            };
            let c = w[*nu] - reference;
            for (d, p) in diff.iter_mut().zip(profile) {
                *d += c * p;
            }
        }
        Ok((self.spec.space.norm_samples(&diff)?, epsilon))
    }

    fn model(&self) -> Result<&ModulusModel> {
        self.spec
            .model
            .as_ref()
            .ok_or_else(|| Error::Config(format!("{}: theorem {} needs a modulus model", self.spec.id, self.spec.theorem)))
    }

    /// The bound envelope at n, without its O-constant.
    pub fn bound_value(&self, n: usize) -> Result<f64> {
        let a = &self.spec.matrix;
        let r = self.spec.r;
        let x_n = PI / (n + 1) as f64;
        let value = match self.spec.theorem {
            Theorem::T1 | Theorem::TA => {
                let m = self.model()?;
                m.H(x_n) * (x_n + a_nr(a, n, r))
            }
            Theorem::T2 => {
                let m = self.model()?;
                let anr = a_nr(a, n, r);
                if anr <= 0.0 {
                    return Err(domain("A_{n,r}", anr, "A_{n,r} > 0"));
                }
                m.H(anr) * anr
            }
            Theorem::T3 => {
                let m = self.model()?;
                m.omega(x_n) + m.H(x_n) * a_nr(a, n, r)
            }
            Theorem::C1 => {
                let m = self.model()?;
                let row = a.row(n);
                m.H(x_n) / (n + 1) as f64
                    + (1..=n)
                        .map(|k| {
                            let x_k = PI / (k + 1) as f64;
                            row.get(k) * m.H(x_k) / (k + 1) as f64
                        })
                        .sum::<f64>()
            }
            Theorem::T4 | Theorem::TB => {
                let row = a.row(n);
                let tail = r_difference_suffix(a, n, r);
                let mut head = 0.0; // Σ_{k=0}^{μ+1} a_{n,k}
                head += row.get(0) + row.get(1);
                let mut total = self.modulus_at_pi_over(n + 1)?;
                for mu in 1..=n {
                    head += row.get(mu + 1);
                    let w = self.modulus_at_pi_over(mu)?;
                    let t = tail.get(mu).copied().unwrap_or(0.0);
                    total += w / mu as f64 * head + w * t;
                }
                total
            }
        };
        Ok(value)
    }

    pub fn row(&self, n: usize) -> Result<DeviationRow> {
        let (deviation, epsilon_used) = self.deviation(n)?;
        let bound_value = self.bound_value(n)?;
        Ok(DeviationRow {
            n,
            deviation,
            bound_value,
            ratio: ratio(deviation, bound_value),
            epsilon_used,
            tail_bound: TAIL_TOLERANCE * self.coefficient_mass,
        })
    }

    /// All rows (computed concurrently, returned in n order) and the fit.
    pub fn run(&self) -> Result<DeviationReport> {
        let rows: Vec<DeviationRow> = self
            .spec
            .n_values
            .par_iter()
            .map(|&n| self.row(n))
            .collect::<Result<_>>()?;
        let (fitted_slope, bound_slope, fit_error) = match fit_rate(&rows) {
            Ok(fit) => (Some(fit.fitted_slope), fit.bound_slope, None),
            Err(e) => (None, None, Some(e.to_string())),
        };
        Ok(DeviationReport {
            id: self.spec.id.clone(),
            constant_ratio_max: constant_ratio_max(&rows),
            rows,
            fitted_slope,
            bound_slope,
            fit_error,
        })
    }

    /// `Ω(δ) = O(ω(δ))` on `δ = 2π 2^{-j}`, `j = 0..=20`, from the sampled modulus.
    pub fn membership_check(&self) -> Result<FitReport> {
        let model = self.model()?;
        let sampled = self.sampled_modulus()?;
        let grid: Vec<f64> = (0..=20).map(|j| 2.0 * PI * 0.5f64.powi(j)).collect();
        let mut samples = Vec::with_capacity(grid.len());
        for &d in &grid {
            samples.push((d, ratio(sampled.value(d), model.omega(d))));
        }
        Ok(FitReport::from_samples(samples))
    }

    /// The condition checks each theorem's hypotheses call for.
    pub fn hypothesis_checks(&self) -> Result<Vec<HypothesisCheck>> {
        let spec = &self.spec;
        let a = &spec.matrix;
        let ns = &spec.n_values;
        let full = spec.variant == Variant::FullConjugate;
        let mut checks = Vec::new();
        let mut push = |name: &str, report: FitReport| {
            checks.push(HypothesisCheck {
                name: name.to_string(),
                report,
            })
        };

        let model_checks = matches!(
            spec.theorem,
            Theorem::T1 | Theorem::T2 | Theorem::T3 | Theorem::C1 | Theorem::TA
        );
        if model_checks {
            let m = self.model()?;
            let grid = modulus_models::default_u_grid();
            push("tail-integral", modulus_models::check_tail_integral(m, &grid)?);
            push("majorant-integral", modulus_models::check_majorant_integral(m, &grid)?);
            push("membership", self.membership_check()?);
        }
        match spec.theorem {
            Theorem::T2 => push("window-mass", matrix_lab::check_window_mass(a, ns, spec.r)?),
            Theorem::T3 if full => push("log-integral", modulus_models::check_log_integral(self.model()?, &geometric_grid(2.0 * PI, 24))?),
            Theorem::T4 | Theorem::C1 if full => {
                push("log-integral measured", self.sampled_modulus()?.check_log_integral(&geometric_grid(2.0 * PI, 20)));
            }
            _ => {}
        }
        if matches!(spec.theorem, Theorem::T3 | Theorem::T4 | Theorem::C1) && !full || spec.theorem == Theorem::TB {
            push("first-moment", matrix_lab::check_first_moment(a, ns));
        }
        if spec.theorem == Theorem::C1 {
            push("difference-tail", matrix_lab::check_difference_tail(a, ns, spec.r, 2.0)?);
        }
        Ok(checks)
    }
}

/// The deviation of `spec` at n.
pub fn deviation(spec: &ExperimentSpec, n: usize) -> Result<(f64, Option<f64>)> {
    Experiment::new(spec.clone())?.deviation(n)
}

/// The bound envelope of `spec` at n.
pub fn bound_value(spec: &ExperimentSpec, n: usize) -> Result<f64> {
    Experiment::new(spec.clone())?.bound_value(n)
}

/// The n grid extended fourfold past its last entry by doubling.
pub fn extended_n_values(n_values: &[usize]) -> Vec<usize> {
    let mut out = n_values.to_vec();
    if let Some(&last) = n_values.last() {
        let mut n = last;
        while n < 4 * last {
            n = (2 * n).min(4 * last).max(n + 1);
            out.push(n);
        }
    }
    out
}

/// Compares `constant_ratio_max` on `spec.n_values` and on the fourfold
/// extension of the grid.
pub fn refinement_check(spec: &ExperimentSpec) -> Result<RefinementCheck> {
    let extended = Experiment::new(spec.with_n_values(extended_n_values(&spec.n_values)))?;
    let all: Vec<DeviationRow> = extended
        .spec
        .n_values
        .par_iter()
        .map(|&n| extended.row(n))
        .collect::<Result<_>>()?;
    let base = constant_ratio_max(&all[..spec.n_values.len()]);
    let ext = constant_ratio_max(&all);
    let growth = if base > 0.0 {
        ext / base
    } else if ext == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    Ok(RefinementCheck {
        base,
        extended: ext,
        growth,
        ok: growth <= REFINEMENT_GROWTH_LIMIT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier_engine::conj_partial_sum;
    use crate::function_space::NormSpace;
    use crate::matrix_lab::MatrixFamily;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(function: FunctionSpec, matrix: SummabilityMatrix, theorem: Theorem, variant: Variant) -> ExperimentSpec {
        ExperimentSpec {
            id: "test".into(),
            function,
            matrix: Arc::new(matrix),
            space: NormSpace::sup(256).unwrap(),
            r: 1,
            n_values: vec![8, 16, 32, 64, 128],
            theorem,
            variant,
            model: Some(ModulusModel::power(0.5).unwrap()),
        }
    }

    fn direct_mean(a: &SummabilityMatrix, fd: &FourierData, n: usize, x: f64) -> f64 {
        a.row(n).entries().map(|(k, v)| v * conj_partial_sum(fd, k, x)).sum()
    }

    /// `∫_0^ε sin(νt) cot(t/2) dt = ε + 2 Σ_{j<ν} sin(jε)/j + sin(νε)/ν`,
    /// from `sin(νt) cot(t/2) = 1 + 2 Σ_{j<ν} cos(jt) + cos(νt)`.
    fn truncation_factor_closed_form(nu: usize, eps: f64) -> f64 {
        let mut s = eps + (nu as f64 * eps).sin() / nu as f64;
        for j in 1..nu {
            s += 2.0 * (j as f64 * eps).sin() / j as f64;
        }
        1.0 - s / PI
    }

    #[test]
    fn identity_row_reproduces_partial_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fd = FourierData::from_parts(
            (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            (0..10).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        );
        let id = SummabilityMatrix::identity();
        for n in [0, 3, 9, 20] {
            let x = rng.gen_range(-PI..PI);
            assert!((matrix_mean(&id, &fd, n, x, true) - conj_partial_sum(&fd, n, x)).abs() < 1e-13);
        }
    }

    #[test]
    fn cesaro_mean_of_cosine() {
        let fd = PeriodicFunction::cosine(1).coefficients().unwrap().clone();
        let c = SummabilityMatrix::cesaro();
        for n in [1usize, 5, 40] {
            for x in [0.3, -1.2, 2.9] {
                let want = n as f64 / (n + 1) as f64 * f64::sin(x);
                assert!((matrix_mean(&c, &fd, n, x, true) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mean_matches_direct_sum_and_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let families = [
            SummabilityMatrix::euler(1.0).unwrap(),
            SummabilityMatrix::riesz(crate::WeightLaw::Power(1.0)).unwrap(),
            SummabilityMatrix::new(MatrixFamily::Borel).unwrap(),
        ];
        for a in &families {
            let f = FourierData::from_parts(
                (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                (0..12).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            );
            let g = FourierData::from_parts(
                (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            );
            let (s, t) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let combo = f.scaled(s).add_scaled(t, &g);
            for n in [4usize, 17] {
                let x = rng.gen_range(-PI..PI);
                let m = matrix_mean(a, &f, n, x, true);
                assert!((m - direct_mean(a, &f, n, x)).abs() < 1e-12);
                let lin = s * m + t * matrix_mean(a, &g, n, x, true);
                assert!((matrix_mean(a, &combo, n, x, true) - lin).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn truncation_factor_matches_closed_form() {
        for nu in [1usize, 2, 7, 64, 128] {
            for eps in [1e-3, 0.05, 0.5, 2.0, PI] {
                let got = truncation_factor(nu, eps).unwrap();
                assert!((got - truncation_factor_closed_form(nu, eps)).abs() < 1e-12, "nu={nu} eps={eps}");
            }
        }
        assert!(truncation_factor(3, PI).unwrap().abs() < 1e-13);
        assert!(truncation_factor(3, 0.0).is_err());
    }

    #[test]
    fn truncated_reference_matches_singular_integral() {
        let f = PeriodicFunction::weierstrass(0.5, 4).unwrap();
        let fd = f.coefficients().unwrap().clone();
        let eps = 0.1;
        for x in [0.2, -1.0, 2.5] {
            let series: f64 = fd
                .harmonics()
                .map(|(nu, a, b)| truncation_factor(nu, eps).unwrap() * (a * (nu as f64 * x).sin() - b * (nu as f64 * x).cos()))
                .sum();
            let quad = crate::fourier_engine::conjugate_truncated(&f, x, eps).unwrap().value;
            assert!((series - quad).abs() < 1e-10);
        }
    }

    #[test]
    fn cesaro_cosine_deviation_closed_form() {
        let e = Experiment::new(spec(FunctionSpec::Cosine(1), SummabilityMatrix::cesaro(), Theorem::T1, Variant::FullConjugate)).unwrap();
        for n in [8usize, 100] {
            let (d, eps) = e.deviation(n).unwrap();
            assert!((d - 1.0 / (n + 1) as f64).abs() < 1e-14);
            assert_eq!(eps, None);
        }
        let report = e.run().unwrap();
        assert!((report.fitted_slope.unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_reproduces_trig_poly() {
        let f = FunctionSpec::Trig {
            a: vec![0.4, 1.0, -0.3, 0.2],
            b: vec![0.0, 0.5, 0.1, -0.7],
        };
        for theorem in [Theorem::T1, Theorem::TA, Theorem::TB] {
            let e = Experiment::new(spec(f.clone(), SummabilityMatrix::identity(), theorem, Variant::FullConjugate)).unwrap();
            for n in [3usize, 8, 20] {
                assert!(e.deviation(n).unwrap().0 < 1e-9);
            }
            let report = e.run().unwrap();
            assert!(report.fitted_slope.is_none() && report.fit_error.is_some());
        }
    }

    #[test]
    fn truncation_at_pi_compares_with_zero() {
        // r(n+1) = 1 only for n = 0
        let mut s = spec(FunctionSpec::Sine(2), SummabilityMatrix::euler(1.0).unwrap(), Theorem::T1, Variant::TruncatedPiOverRn);
        s.n_values = vec![0];
        let e = Experiment::new(s.clone()).unwrap();
        let (d, eps) = e.deviation(0).unwrap();
        assert_eq!(eps, Some(PI));
        let fd = e.data().clone();
        let mean = s.space.norm_fn(|x| matrix_mean(&s.matrix, &fd, 0, x, true)).unwrap();
        assert!((d - mean).abs() < 1e-13);
    }

    #[test]
    fn bound_examples() {
        let e = Experiment::new(spec(FunctionSpec::Cosine(1), SummabilityMatrix::cesaro(), Theorem::T1, Variant::FullConjugate)).unwrap();
        let h = |u: f64| 2.0 * (u.powf(-0.5) - PI.powf(-0.5));
        let x = PI / 16.0;
        assert!((e.bound_value(15).unwrap() - h(x) * (x + 1.0 / 16.0)).abs() < 1e-13);

        let e = Experiment::new(spec(FunctionSpec::Cosine(1), SummabilityMatrix::identity(), Theorem::T2, Variant::FullConjugate)).unwrap();
        for n in [8usize, 64, 512] {
            assert!((e.bound_value(n).unwrap() - 2.0 * h(2.0)).abs() < 1e-14);
        }

        let mut s = spec(FunctionSpec::Constant(3.0), SummabilityMatrix::cesaro(), Theorem::T4, Variant::FullConjugate);
        s.model = None;
        let e = Experiment::new(s).unwrap();
        assert_eq!(e.bound_value(16).unwrap(), 0.0);
    }

    #[test]
    fn corollary_bound_closed_form_for_identity() {
        // a_{n,k} = δ_{k,n}: H(x_n)/(n+1) + H(π/(n+1))/(n+1)
        let e = Experiment::new(spec(FunctionSpec::Cosine(1), SummabilityMatrix::identity(), Theorem::C1, Variant::FullConjugate)).unwrap();
        let m = ModulusModel::power(0.5).unwrap();
        let n = 20usize;
        let want = 2.0 * m.H(PI / 21.0) / 21.0;
        assert!((e.bound_value(n).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn t4_bound_against_direct_sum() {
        let mut s = spec(FunctionSpec::Cosine(2), SummabilityMatrix::cesaro(), Theorem::T4, Variant::FullConjugate);
        s.model = None;
        s.r = 2;
        let e = Experiment::new(s.clone()).unwrap();
        let curve = e.modulus_curve().unwrap();
        let n = 9usize;
        let om = |d: f64| curve.value(d).unwrap();
        let a = |k: usize| s.matrix.entry(n, k);
        let mut want = om(PI / (n + 1) as f64);
        for mu in 1..=n {
            let head: f64 = (0..=mu + 1).map(a).sum();
            let tail: f64 = (mu..=n + 2).map(|k| (a(k) - a(k + 2)).abs()).sum();
            want += om(PI / mu as f64) * (head / mu as f64 + tail);
        }
        assert!((e.bound_value(n).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn missing_model_is_config_error() {
        let mut s = spec(FunctionSpec::Cosine(1), SummabilityMatrix::cesaro(), Theorem::T3, Variant::FullConjugate);
        s.model = None;
        assert!(matches!(Experiment::new(s), Err(Error::Config(_))));
    }

    #[test]
    fn spec_validation() {
        let mut s = spec(FunctionSpec::Cosine(1), SummabilityMatrix::cesaro(), Theorem::T1, Variant::FullConjugate);
        s.n_values = vec![8, 8, 16];
        assert!(Experiment::new(s.clone()).is_err());
        s.n_values = vec![8];
        s.r = 0;
        assert!(Experiment::new(s.clone()).is_err());
        s.r = 1;
        s.function = FunctionSpec::Cosine(200);
        assert!(Experiment::new(s).is_err());
    }

    #[test]
    fn slope_fit() {
        let ns = [8usize, 16, 32, 64, 128, 256, 512];
        let inv: Vec<(usize, f64)> = ns.iter().map(|&n| (n, 1.0 / (n + 1) as f64)).collect();
        assert!((log_log_slope(&inv).unwrap() + 1.0).abs() < 1e-12);
        let flat: Vec<(usize, f64)> = ns.iter().map(|&n| (n, 0.3)).collect();
        assert!(log_log_slope(&flat).unwrap().abs() < 1e-12);
        let half: Vec<(usize, f64)> = ns.iter().map(|&n| (n, 2.0 * ((n + 1) as f64).powf(-0.5))).collect();
        assert!((log_log_slope(&half).unwrap() + 0.5).abs() < 1e-12);
        let few = [(8usize, 1.0), (16, 0.0), (32, 0.5), (64, 0.0), (128, 0.2)];
        assert!(matches!(log_log_slope(&few), Err(Error::InsufficientData { have: 3, need: 4 })));
    }

    #[test]
    fn sampled_modulus_integral_is_exact_for_linear_curves() {
        let lags: Vec<f64> = (1..=50).map(|i| i as f64 * 0.1).collect();
        let values: Vec<f64> = lags.iter().map(|t| 3.0 * t).collect();
        let mut log_integral = Vec::new();
        let mut acc = values[0];
        log_integral.push(acc);
        for i in 1..lags.len() {
            acc += segment_log_integral(lags[i - 1], values[i - 1], lags[i], values[i], lags[i]);
            log_integral.push(acc);
        }
        let s = SampledModulus { lags, values, log_integral };
        for u in [0.05, 0.1, 1.234, 4.9, 5.0] {
            assert!((s.integral_over_t(u) - 3.0 * u).abs() < 1e-12);
        }
        // flat beyond the last lag
        assert!((s.integral_over_t(6.0) - (15.0 + 15.0 * (6.0f64 / 5.0).ln())).abs() < 1e-12);
        let r = s.check_log_integral(&geometric_grid(5.0, 10));
        assert!(r.ok && (r.constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extension_grid() {
        assert_eq!(extended_n_values(&[8, 16, 32]), vec![8, 16, 32, 64, 128]);
        assert_eq!(extended_n_values(&[3]), vec![3, 6, 12]);
    }

    #[test]
    fn hypothesis_sets() {
        let names = |t: Theorem, v: Variant| {
            let mut s = spec(FunctionSpec::Cosine(1), SummabilityMatrix::cesaro(), t, v);
            if !t.needs_model() {
                s.model = None;
            }
            Experiment::new(s)
                .unwrap()
                .hypothesis_checks()
                .unwrap()
                .into_iter()
                .map(|c| {
                    assert!(c.report.ok, "{t} {}: {}", c.name, c.report);
                    c.name
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(names(Theorem::T1, Variant::FullConjugate), ["tail-integral", "majorant-integral", "membership"]);
        assert_eq!(names(Theorem::T2, Variant::TruncatedAnrOverR), ["tail-integral", "majorant-integral", "membership", "window-mass"]);
        assert_eq!(names(Theorem::T3, Variant::FullConjugate), ["tail-integral", "majorant-integral", "membership", "log-integral"]);
        assert_eq!(names(Theorem::T3, Variant::TruncatedPiOverRn), ["tail-integral", "majorant-integral", "membership", "first-moment"]);
        assert_eq!(names(Theorem::T4, Variant::FullConjugate), ["log-integral measured"]);
        assert_eq!(names(Theorem::TB, Variant::FullConjugate), ["first-moment"]);
        assert_eq!(
            names(Theorem::C1, Variant::TruncatedPiOverRn),
            ["tail-integral", "majorant-integral", "membership", "first-moment", "difference-tail"]
        );
    }
}

//! Summability matrices `A = (a_{n,k})`, the r-difference functional
//! `A_{n,r} = Σ_k |a_{n,k} − a_{n,k+r}|`, and checkers for the matrix
//! conditions used by the deviation bounds.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{domain, Result};
use crate::fit::{ratio, FitReport};

/// Rows are truncated once the remaining mass drops below this.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Positive weight sequences for Riesz and Nörlund means.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightLaw {
    /// `w_k = (k + 1)^β`.
    Power(f64),
    /// `w_k = ρ^k`, `ρ > 0`.
    Geometric(f64),
    /// Listed weights, the last one repeated beyond the end.
    Explicit(Vec<f64>),
}

impl WeightLaw {
    fn validate(&self) -> Result<()> {
        match self {
            WeightLaw::Power(beta) if !beta.is_finite() => Err(domain("weight exponent", *beta, "finite")),
            WeightLaw::Geometric(rho) if !(*rho > 0.0 && rho.is_finite()) => {
                Err(domain("weight ratio", *rho, "rho > 0"))
            }
            WeightLaw::Explicit(w) if w.is_empty() => Err(domain("weights", 0.0, "at least one weight")),
            WeightLaw::Explicit(w) => match w.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                Some(v) => Err(domain("weight", *v, "positive weights")),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    fn weight(&self, k: usize) -> f64 {
        match self {
            WeightLaw::Power(beta) => ((k + 1) as f64).powf(*beta),
            WeightLaw::Geometric(rho) => rho.powi(k as i32),
            WeightLaw::Explicit(w) => w[k.min(w.len() - 1)],
        }
    }
}

/// The matrix families shipped with the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixFamily {
    /// `(C, 1)`: `a_{n,k} = 1/(n+1)` for `k <= n`.
    Cesaro,
    /// `(N̄, q)`: `a_{n,k} = q_k / Q_n` for `k <= n`.
    Riesz(WeightLaw),
    /// `(N, p)`: `a_{n,k} = p_{n−k} / P_n` for `k <= n`.
    Norlund(WeightLaw),
    /// `(E, q)`: `a_{n,k} = C(n,k) q^{n−k} / (1+q)^n`.
    Euler(f64),
    /// Borel-type rows `e^{−n} n^k / k!` with unbounded support.
    Borel,
    /// `a_{n,k} = δ_{k,n}`: the means reduce to `S_n`.
    Identity,
    /// `a_{n,k} = δ_{k,n²}`: a non-triangular stress case.
    SquareShift,
    /// Nonincreasing rows with `a_{n,0} = height/(n+1)`, so `A_{n,1} = height/(n+1)`
    /// once `n + 1 >= height`.
    Plateau(f64),
}

impl MatrixFamily {
    fn validate(&self) -> Result<()> {
        match self {
            MatrixFamily::Riesz(w) | MatrixFamily::Norlund(w) => w.validate(),
            MatrixFamily::Euler(q) if !(*q > 0.0 && q.is_finite()) => Err(domain("euler q", *q, "q > 0")),
            MatrixFamily::Plateau(h) if !(*h > 0.0 && h.is_finite()) => Err(domain("plateau height", *h, "height > 0")),
            _ => Ok(()),
        }
    }

    pub fn is_lower_triangular(&self) -> bool {
        match self {
            MatrixFamily::Borel | MatrixFamily::SquareShift => false,
            // rows have at most (n+1)/height + 1 entries
            MatrixFamily::Plateau(h) => *h >= 1.0,
            _ => true,
        }
    }

    fn label(&self) -> String {
        match self {
            MatrixFamily::Cesaro => "cesaro".into(),
            MatrixFamily::Riesz(w) => format!("riesz {w:?}"),
            MatrixFamily::Norlund(w) => format!("norlund {w:?}"),
            MatrixFamily::Euler(q) => format!("euler q={q}"),
            MatrixFamily::Borel => "borel".into(),
            MatrixFamily::Identity => "identity".into(),
            MatrixFamily::SquareShift => "square-shift".into(),
            MatrixFamily::Plateau(h) => format!("plateau height={h}"),
        }
    }

    fn compute_row(&self, n: usize) -> Row {
        match self {
            MatrixFamily::Cesaro => Row::dense(0, vec![1.0 / (n + 1) as f64; n + 1]),
            MatrixFamily::Riesz(w) => {
                let weights: Vec<f64> = (0..=n).map(|k| w.weight(k)).collect();
                Row::normalized(0, weights)
            }
            MatrixFamily::Norlund(w) => {
                let weights: Vec<f64> = (0..=n).map(|k| w.weight(n - k)).collect();
                Row::normalized(0, weights)
            }
            MatrixFamily::Euler(q) => euler_row(n, *q),
            MatrixFamily::Borel => borel_row(n),
            MatrixFamily::Identity => Row::dense(n, vec![1.0]),
            MatrixFamily::SquareShift => Row::dense(n * n, vec![1.0]),
            MatrixFamily::Plateau(height) => {
                let c = (height / (n + 1) as f64).min(1.0);
                let full = (1.0 / c).floor() as usize;
                let mut values = vec![c; full];
                let rest = 1.0 - c * full as f64;
                if rest > TAIL_TOLERANCE {
                    values.push(rest);
                }
                Row::dense(0, values)
            }
        }
    }
}

/// The families exercised by the test suites and the demo config.
pub fn shipped_families() -> Vec<MatrixFamily> {
    vec![
        MatrixFamily::Cesaro,
        MatrixFamily::Riesz(WeightLaw::Power(0.5)),
        MatrixFamily::Riesz(WeightLaw::Power(1.0)),
        MatrixFamily::Riesz(WeightLaw::Geometric(1.01)),
        MatrixFamily::Riesz(WeightLaw::Explicit(vec![1.0, 3.0, 2.0])),
        MatrixFamily::Norlund(WeightLaw::Power(-0.5)),
        MatrixFamily::Norlund(WeightLaw::Power(1.0)),
        MatrixFamily::Euler(0.5),
        MatrixFamily::Euler(1.0),
        MatrixFamily::Euler(2.0),
        MatrixFamily::Borel,
        MatrixFamily::Identity,
        MatrixFamily::SquareShift,
        MatrixFamily::Plateau(std::f64::consts::PI),
    ]
}

fn euler_row(n: usize, q: f64) -> Row {
    // log a_{n,k} = log C(n,k) + (n−k) log q − n log(1+q)
    let nf = n as f64;
    let log_base = -nf * (1.0 + q).ln();
    let mut log_binom = 0.0;
    let mut values = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k > 0 {
            log_binom += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        let v = (log_binom + (n - k) as f64 * q.ln() + log_base).exp();
        values.push(v);
    }
    Row::trimmed(values)
}

fn borel_row(n: usize) -> Row {
    let nf = n as f64;
    let mut values = Vec::new();
    let mut log_term = -nf; // k = 0
    let mut k = 0usize;
    loop {
        let v = log_term.exp();
        values.push(v);
        // Beyond the mode the terms shrink by n/(k+1); bound the tail geometrically.
        let next_ratio = nf / (k + 1) as f64;
        if k >= n && next_ratio < 1.0 && v * next_ratio / (1.0 - next_ratio) < 0.1 * TAIL_TOLERANCE {
            break;
        }
        k += 1;
        log_term += if n == 0 { f64::NEG_INFINITY } else { nf.ln() - (k as f64).ln() };
    }
    Row::trimmed(values)
}

/// Nonzero window `a_{n, start..start+values.len()}` of one row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    start: usize,
    values: Vec<f64>,
}

impl Row {
    fn dense(start: usize, values: Vec<f64>) -> Self {
        Self { start, values }
    }

    fn normalized(start: usize, weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        Self::dense(start, weights.into_iter().map(|w| w / total).collect())
    }

    /// Drops leading/trailing entries with negligible mass (at most `TAIL_TOLERANCE / 2` per side).
    fn trimmed(values: Vec<f64>) -> Self {
        let budget = 0.5 * TAIL_TOLERANCE;
        let mut lo = 0;
        let mut acc = 0.0;
        while lo + 1 < values.len() && acc + values[lo] < budget {
            acc += values[lo];
            lo += 1;
        }
        let mut hi = values.len();
        acc = 0.0;
        while hi > lo + 1 && acc + values[hi - 1] < budget {
            acc += values[hi - 1];
            hi -= 1;
        }
        Self::dense(lo, values[lo..hi].to_vec())
    }

    pub fn get(&self, k: usize) -> f64 {
        if k < self.start {
            0.0
        } else {
            self.values.get(k - self.start).copied().unwrap_or(0.0)
        }
    }

    /// First index of the stored window.
    pub fn start(&self) -> usize {
        self.start
    }

    /// The effective truncation index `K(n)`.
    pub fn support_end(&self) -> usize {
        self.start + self.values.len() - 1
    }

    /// `(k, a_{n,k})` over the stored window.
    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.start + i, v))
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// A summability matrix with lazily computed, cached rows.
#[derive(Debug)]
pub struct SummabilityMatrix {
    family: MatrixFamily,
    label: String,
    rows: RwLock<HashMap<usize, Arc<Row>>>,
}

impl Clone for SummabilityMatrix {
    fn clone(&self) -> Self {
        Self {
            family: self.family.clone(),
            label: self.label.clone(),
            rows: RwLock::new(HashMap::new()),
        }
    }
}

impl SummabilityMatrix {
    pub fn new(family: MatrixFamily) -> Result<Self> {
        family.validate()?;
        Ok(Self {
            label: family.label(),
            family,
            rows: RwLock::new(HashMap::new()),
        })
    }

    pub fn cesaro() -> Self {
        Self::new(MatrixFamily::Cesaro).expect("valid family")
    }

    pub fn riesz(q: WeightLaw) -> Result<Self> {
        Self::new(MatrixFamily::Riesz(q))
    }

    pub fn norlund(p: WeightLaw) -> Result<Self> {
        Self::new(MatrixFamily::Norlund(p))
    }

    pub fn euler(q: f64) -> Result<Self> {
        Self::new(MatrixFamily::Euler(q))
    }

    pub fn identity() -> Self {
        Self::new(MatrixFamily::Identity).expect("valid family")
    }

    pub fn family(&self) -> &MatrixFamily {
        &self.family
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.family.is_lower_triangular()
    }

    /// Row `n`, computed on first use. Concurrent first uses may both compute;
    /// the results are identical and the first stored one wins.
    pub fn row(&self, n: usize) -> Arc<Row> {
        if let Some(row) = self.rows.read().expect("row cache poisoned").get(&n) {
            return Arc::clone(row);
        }
        let row = Arc::new(self.family.compute_row(n));
        let mut cache = self.rows.write().expect("row cache poisoned");
        Arc::clone(cache.entry(n).or_insert(row))
    }

    pub fn entry(&self, n: usize, k: usize) -> f64 {
        self.row(n).get(k)
    }

    /// `K(n)`.
    pub fn row_support(&self, n: usize) -> usize {
        self.row(n).support_end()
    }
}

/// `A_{n,r} = Σ_{k=0}^{K(n)+r} |a_{n,k} − a_{n,k+r}|`.
pub fn a_nr(a: &SummabilityMatrix, n: usize, r: usize) -> f64 {
    let row = a.row(n);
    r_difference_tail(&row, 0, r)
}

/// `Σ_{k>=m} |a_{n,k} − a_{n,k+r}|` for one row.
fn r_difference_tail(row: &Row, m: usize, r: usize) -> f64 {
    // Only k with k or k + r inside the window contribute.
    let lo = row.start().saturating_sub(r).max(m);
    let hi = row.support_end();
    if lo > hi {
        return 0.0;
    }
    (lo..=hi).map(|k| (row.get(k) - row.get(k + r)).abs()).sum()
}

/// Suffix sums `s[m] = Σ_{k>=m} |a_{n,k} − a_{n,k+r}|` for `m = 0..=K(n)+r+1`;
/// the last entry is 0.
pub fn r_difference_suffix(a: &SummabilityMatrix, n: usize, r: usize) -> Vec<f64> {
    let row = a.row(n);
    let end = row.support_end() + r;
    let mut suffix = vec![0.0; end + 2];
    for k in (0..=end).rev() {
        suffix[k] = suffix[k + 1] + (row.get(k) - row.get(k + r)).abs();
    }
    suffix
}

fn check_r(r: usize) -> Result<()> {
    if r == 0 {
        Err(domain("r", 0.0, "r >= 1"))
    } else {
        Ok(())
    }
}

/// `Σ_{l=0}^{n} Σ_{k=l}^{l+r−1} a_{n,k}`.
pub fn window_mass(a: &SummabilityMatrix, n: usize, r: usize) -> f64 {
    let row = a.row(n);
    // a_{n,k} is counted once for every l in [max(0, k−r+1), min(n, k)].
    row.entries()
        .map(|(k, v)| {
            let lo = (k + 1).saturating_sub(r);
            let hi = k.min(n);
            if hi >= lo {
                v * (hi - lo + 1) as f64
            } else {
                0.0
            }
        })
        .sum()
}

/// Condition `[Σ_{l=0}^n Σ_{k=l}^{r+l−1} a_{n,k}]^{-1} = O(1)`.
pub fn check_window_mass(a: &SummabilityMatrix, n_values: &[usize], r: usize) -> Result<FitReport> {
    check_r(r)?;
    let mut samples = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let mass = window_mass(a, n, r);
        if mass == 0.0 {
            return Ok(FitReport::violated(samples, n as f64, format!("window mass vanishes at n = {n}")));
        }
        samples.push((n as f64, 1.0 / mass));
    }
    Ok(FitReport::from_samples(samples))
}

/// Condition `Σ_k (k+1) a_{n,k} = O(n+1)`, reporting the ratio to `n + 1`.
pub fn check_first_moment(a: &SummabilityMatrix, n_values: &[usize]) -> FitReport {
    let samples = n_values
        .iter()
        .map(|&n| {
            let first_moment: f64 = a.row(n).entries().map(|(k, v)| (k + 1) as f64 * v).sum();
            (n as f64, first_moment / (n + 1) as f64)
        })
        .collect();
    FitReport::from_samples(samples)
}

/// The per-row constant of the difference-tail condition: the smallest `K` with
/// `Σ_{k>=m} |a_{n,k} − a_{n,k+r}| <= K Σ_{k>=m/c} a_{n,k}/k` for every
/// `m = 1..=K(n)+r`. Infinite when some right side vanishes under a positive left side.
pub fn difference_tail_constant(a: &SummabilityMatrix, n: usize, r: usize, c: f64) -> (f64, Option<usize>) {
    let row = a.row(n);
    let end = row.support_end() + r;
    let lhs_suffix = r_difference_suffix(a, n, r);
    let mut rhs_suffix = vec![0.0; end + 2];
    for k in (1..=end).rev() {
        rhs_suffix[k] = rhs_suffix[k + 1] + row.get(k) / k as f64;
    }
    let mut worst = 0.0f64;
    for m in 1..=end {
        let lhs = lhs_suffix[m];
        let start = ((m as f64 / c).ceil() as usize).max(1);
        let rhs = if start <= end { rhs_suffix[start] } else { 0.0 };
        let q = ratio(lhs, rhs);
        if q.is_infinite() {
            return (f64::INFINITY, Some(m));
        }
        worst = worst.max(q);
    }
    (worst, None)
}

/// Condition difference-tail over the rows `n_values` (and all `m`), with `c > 1`.
///
/// The report's `constant` is the fitted `K`; `ok` requires it to be finite and
/// stable as `n` grows.
pub fn check_difference_tail(a: &SummabilityMatrix, n_values: &[usize], r: usize, c: f64) -> Result<FitReport> {
    check_r(r)?;
    if !(c > 1.0) {
        return Err(domain("c", c, "c > 1"));
    }
    let mut samples = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let (k, failing_m) = difference_tail_constant(a, n, r, c);
        if let Some(m) = failing_m {
            return Ok(FitReport::violated(
                samples,
                n as f64,
                format!("right side vanishes at n = {n}, m = {m}"),
            ));
        }
        samples.push((n as f64, k));
    }
    Ok(FitReport::from_samples(samples))
}

/// Results of [`check_axioms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixAxioms {
    pub nonnegative: bool,
    pub rows_sum_to_one: bool,
    pub columns_vanish: bool,
}

impl MatrixAxioms {
    pub fn all(&self) -> bool {
        self.nonnegative && self.rows_sum_to_one && self.columns_vanish
    }
}

/// Nonnegativity, unit row sums (to the tail tolerance, plus rounding) and
/// vanishing columns: the head mass `Σ_{k<4} a_{m,k}` at `m = 4·max(n)` must be
/// at most half of that at `max(n)`, or below `1e-6`.
pub fn check_axioms(a: &SummabilityMatrix, n_values: &[usize]) -> MatrixAxioms {
    let mut axioms = MatrixAxioms {
        nonnegative: true,
        rows_sum_to_one: true,
        columns_vanish: true,
    };
    for &n in n_values {
        let row = a.row(n);
        let len = row.support_end() - row.start() + 1;
        axioms.nonnegative &= row.entries().all(|(_, v)| v >= 0.0);
        axioms.rows_sum_to_one &= (row.sum() - 1.0).abs() <= TAIL_TOLERANCE + 4.0 * f64::EPSILON * len as f64;
    }
    if let Some(&top) = n_values.iter().max() {
        let head = |n: usize| (0..4).map(|k| a.entry(n, k)).sum::<f64>();
        let later = head(4 * top);
        axioms.columns_vanish = later <= 0.5 * head(top) || later < 1e-6;
    }
    axioms
}

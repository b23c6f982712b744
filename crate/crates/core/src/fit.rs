//! Empirical surrogate for `O(·)` conditions.
//!
//! A condition `F(u) = O(G(u))` is checked by sampling the ratio `F/G` along a
//! grid ordered from the coarse end (far from the limit point) to the fine
//! end. The condition is accepted when every ratio is finite and the sup over
//! the whole grid exceeds the sup over its leading half by at most
//! [`STABILITY_FACTOR`].

use std::fmt;

/// Allowed growth of the sup ratio when the grid is refined.
pub const STABILITY_FACTOR: f64 = 2.0;

/// Outcome of an `O(·)` check.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    /// Sup of the sampled ratios (the empirical O-constant).
    pub constant: f64,
    /// Sup over the leading half of the grid.
    pub coarse_constant: f64,
    pub ok: bool,
    /// `(grid point, ratio)` in grid order.
    pub samples: Vec<(f64, f64)>,
    /// Set when a ratio could not be formed (zero denominator, divergence).
    pub violation: Option<String>,
}

impl FitReport {
    /// Builds a report from ratios ordered coarse → fine.
    pub fn from_samples(samples: Vec<(f64, f64)>) -> Self {
        Self::with_factor(samples, STABILITY_FACTOR)
    }

    pub fn with_factor(samples: Vec<(f64, f64)>, factor: f64) -> Self {
        let sup = |s: &[(f64, f64)]| s.iter().fold(0.0f64, |m, &(_, v)| if v.is_nan() { f64::INFINITY } else { m.max(v) });
        let constant = sup(&samples);
        let half = samples.len().div_ceil(2);
        let coarse_constant = sup(&samples[..half]);
        let violation = samples
            .iter()
            .find(|(_, v)| !v.is_finite())
            .map(|(p, v)| format!("ratio {v} at {p}"));
        let stable = if coarse_constant > 0.0 {
            constant <= factor * coarse_constant
        } else {
            constant == 0.0
        };
        let ok = violation.is_none() && stable;
        Self {
            constant,
            coarse_constant,
            ok,
            samples,
            violation,
        }
    }

    /// A report recording that the condition failed outright at `point`.
    pub fn violated(mut samples: Vec<(f64, f64)>, point: f64, reason: impl Into<String>) -> Self {
        samples.push((point, f64::INFINITY));
        let mut report = Self::from_samples(samples);
        report.violation = Some(reason.into());
        report.ok = false;
        report
    }

    /// Worst growth of the sup ratio relative to the coarse half.
    pub fn growth(&self) -> f64 {
        if self.coarse_constant > 0.0 {
            self.constant / self.coarse_constant
        } else if self.constant == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    }
}

impl fmt::Display for FitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} constant={:.6e} coarse={:.6e} growth={:.4}",
            if self.ok { "ok" } else { "VIOLATED" },
            self.constant,
            self.coarse_constant,
            self.growth()
        )?;
        if let Some(v) = &self.violation {
            write!(f, " ({v})")?;
        }
        Ok(())
    }
}

/// Ratio `num / den` with the conventions used by the condition checkers:
/// `0 / anything = 0`, positive over nonpositive is a violation (`+∞`).
pub fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den <= 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_ratios_are_stable() {
        let r = FitReport::from_samples((0..8).map(|i| (i as f64, 1.0)).collect());
        assert!(r.ok);
        assert_eq!(r.constant, 1.0);
        assert_eq!(r.growth(), 1.0);
    }

    #[test]
    fn growing_ratios_fail() {
        let r = FitReport::from_samples((0..8).map(|i| (i as f64, 2f64.powi(i))).collect());
        assert!(!r.ok);
    }

    #[test]
    fn zero_ratios_are_ok() {
        let r = FitReport::from_samples(vec![(1.0, 0.0), (0.5, 0.0)]);
        assert!(r.ok);
        assert_eq!(r.constant, 0.0);
    }

    #[test]
    fn infinite_ratio_is_a_violation() {
        let r = FitReport::from_samples(vec![(1.0, 1.0), (0.5, f64::INFINITY)]);
        assert!(!r.ok);
        assert!(r.violation.is_some());
        assert_eq!(ratio(1.0, 0.0), f64::INFINITY);
        assert_eq!(ratio(0.0, 0.0), 0.0);
    }
}

//! Buyer value priors and the one-round pricing primitives every solver
//! consumes: CDF/PDF evaluation, restriction to a subinterval, the revenue
//! curve `p(1 - F(p))`, monopoly pricing and virtual values.
//!
//! Three families are supported: uniform on `[low, high]`, power laws with
//! density `(k+1)x^k`, and continuous piecewise-linear CDFs. Restriction is
//! closed within these families (a truncated power law keeps the same `k`
//! with new endpoints, since the normalization cancels), so repeated
//! conditioning never accumulates wrapper layers. All distributions are
//! atomless by construction; atoms are rejected when the knots of a
//! piecewise-linear CDF fail to increase strictly in both coordinates.
//!
//! Values are immutable after construction and every operation is a pure
//! function, so distributions can be shared freely across threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::search;

/// Errors from distribution construction and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("invalid distribution parameters: {0}")]
    InvalidParameters(String),
    #[error("degenerate restriction: [{low}, {high}] carries no probability mass")]
    DegenerateRestriction { low: f64, high: f64 },
    #[error("density vanishes at {x}")]
    DensityVanishes { x: f64 },
}

/// JSON wire form of a distribution.
///
/// ```json
/// {"type":"uniform","low":0.0,"high":1.0}
/// {"type":"power_law","k":2}
/// {"type":"piecewise_linear_cdf","knots":[[0.0,0.0],[1.0,1.0]]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DistributionConfig {
    Uniform { low: f64, high: f64 },
    PowerLaw { k: u32 },
    PiecewiseLinearCdf { knots: Vec<(f64, f64)> },
}

/// An atomless value prior on a bounded support `[low, high]`.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueDistribution {
    Uniform {
        low: f64,
        high: f64,
    },
    /// Density proportional to `x^k` on `[low, high]`. `power_law(k)` itself
    /// lives on `[0, 1]`; restrictions keep `k` and move the endpoints.
    PowerLaw {
        k: u32,
        low: f64,
        high: f64,
    },
    /// Continuous piecewise-linear CDF through strictly increasing knots
    /// `(value, F(value))`, with `F = 0` at the first knot and `1` at the last.
    PiecewiseLinearCdf {
        knots: Vec<(f64, f64)>,
    },
}

impl ValueDistribution {
    pub fn uniform(low: f64, high: f64) -> Result<Self, DistError> {
        if !low.is_finite() || !high.is_finite() || low < 0.0 || low >= high {
            return Err(DistError::InvalidParameters(format!(
                "uniform requires 0 <= low < high, got low={low}, high={high}"
            )));
        }
        Ok(ValueDistribution::Uniform { low, high })
    }

    /// Power law with density `(k+1) x^k` on `[0, 1]`. `power_law(0)` is
    /// `uniform(0, 1)`.
    pub fn power_law(k: u32) -> Result<Self, DistError> {
        Self::power_law_on(k, 0.0, 1.0)
    }

    /// Power law truncated to `[low, high]`.
    pub fn power_law_on(k: u32, low: f64, high: f64) -> Result<Self, DistError> {
        if !low.is_finite() || !high.is_finite() || low < 0.0 || low >= high {
            return Err(DistError::InvalidParameters(format!(
                "power law requires 0 <= low < high, got low={low}, high={high}"
            )));
        }
        Ok(ValueDistribution::PowerLaw { k, low, high })
    }

    pub fn piecewise_linear_cdf(mut knots: Vec<(f64, f64)>) -> Result<Self, DistError> {
        if knots.len() < 2 {
            return Err(DistError::InvalidParameters(
                "piecewise linear CDF needs at least two knots".into(),
            ));
        }
        for w in knots.windows(2) {
            let ((v0, c0), (v1, c1)) = (w[0], w[1]);
            if !(v1.is_finite() && c1.is_finite() && v0.is_finite() && c0.is_finite()) {
                return Err(DistError::InvalidParameters("non-finite knot".into()));
            }
            if v1 <= v0 || c1 <= c0 {
                return Err(DistError::InvalidParameters(format!(
                    "knots must increase strictly in value and CDF (atomless); \
                     got ({v0}, {c0}) then ({v1}, {c1})"
                )));
            }
        }
        if knots[0].0 < 0.0 {
            return Err(DistError::InvalidParameters(
                "support must be nonnegative".into(),
            ));
        }
        let first = knots[0].1;
        let last = knots[knots.len() - 1].1;
        if first.abs() > 1e-9 || (last - 1.0).abs() > 1e-9 {
            return Err(DistError::InvalidParameters(format!(
                "CDF must run from 0 to 1, got {first} to {last}"
            )));
        }
        knots[0].1 = 0.0;
        let n = knots.len();
        knots[n - 1].1 = 1.0;
        Ok(ValueDistribution::PiecewiseLinearCdf { knots })
    }

    pub fn from_config(cfg: &DistributionConfig) -> Result<Self, DistError> {
        match cfg {
            DistributionConfig::Uniform { low, high } => Self::uniform(*low, *high),
            DistributionConfig::PowerLaw { k } => Self::power_law(*k),
            DistributionConfig::PiecewiseLinearCdf { knots } => {
                Self::piecewise_linear_cdf(knots.clone())
            }
        }
    }

    pub fn from_json(json: &str) -> Result<Self, DistError> {
        let cfg: DistributionConfig =
            serde_json::from_str(json).map_err(|e| DistError::InvalidParameters(e.to_string()))?;
        Self::from_config(&cfg)
    }

    /// Lower end of the support.
    pub fn low(&self) -> f64 {
        match self {
            ValueDistribution::Uniform { low, .. } => *low,
            ValueDistribution::PowerLaw { low, .. } => *low,
            ValueDistribution::PiecewiseLinearCdf { knots } => knots[0].0,
        }
    }

    /// Upper end of the support.
    pub fn high(&self) -> f64 {
        match self {
            ValueDistribution::Uniform { high, .. } => *high,
            ValueDistribution::PowerLaw { high, .. } => *high,
            ValueDistribution::PiecewiseLinearCdf { knots } => knots[knots.len() - 1].0,
        }
    }

    /// `F(x)`, clamped to 0 below the support and 1 above it.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.low() {
            return 0.0;
        }
        if x >= self.high() {
            return 1.0;
        }
        match self {
            ValueDistribution::Uniform { low, high } => (x - low) / (high - low),
            ValueDistribution::PowerLaw { k, low, high } => {
                let e = (*k + 1) as i32;
                (x.powi(e) - low.powi(e)) / (high.powi(e) - low.powi(e))
            }
            ValueDistribution::PiecewiseLinearCdf { knots } => {
                let i = knots.partition_point(|&(v, _)| v <= x);
                let (v0, c0) = knots[i - 1];
                let (v1, c1) = knots[i];
                c0 + (c1 - c0) * (x - v0) / (v1 - v0)
            }
        }
    }

    /// Density `f(x)`; zero outside the support. Piecewise-linear CDFs use the
    /// right derivative at knots (the left one at the top of the support).
    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.low() || x > self.high() {
            return 0.0;
        }
        match self {
            ValueDistribution::Uniform { low, high } => 1.0 / (high - low),
            ValueDistribution::PowerLaw { k, low, high } => {
                let e = (*k + 1) as i32;
                (*k as f64 + 1.0) * x.powi(*k as i32) / (high.powi(e) - low.powi(e))
            }
            ValueDistribution::PiecewiseLinearCdf { knots } => {
                let i = if x >= self.high() {
                    knots.len() - 1
                } else {
                    knots.partition_point(|&(v, _)| v <= x).max(1)
                };
                let (v0, c0) = knots[i - 1];
                let (v1, c1) = knots[i];
                (c1 - c0) / (v1 - v0)
            }
        }
    }

    /// Inverse CDF; `p` is clamped to `[0, 1]`. This is the only sampling
    /// primitive the simulator uses.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match self {
            ValueDistribution::Uniform { low, high } => low + p * (high - low),
            ValueDistribution::PowerLaw { k, low, high } => {
                if *k == 0 {
                    return low + p * (high - low);
                }
                let e = (*k + 1) as i32;
                let mass = low.powi(e) + p * (high.powi(e) - low.powi(e));
                mass.powf(1.0 / (*k as f64 + 1.0))
            }
            ValueDistribution::PiecewiseLinearCdf { knots } => {
                if p <= 0.0 {
                    return knots[0].0;
                }
                if p >= 1.0 {
                    return knots[knots.len() - 1].0;
                }
                let i = knots.partition_point(|&(_, c)| c <= p).max(1);
                let (v0, c0) = knots[i - 1];
                let (v1, c1) = knots[i];
                v0 + (v1 - v0) * (p - c0) / (c1 - c0)
            }
        }
    }

    /// The prior conditioned on `[a, b]`: CDF `(F(x) - F(a)) / (F(b) - F(a))`.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self, DistError> {
        let a = a.max(self.low());
        let b = b.min(self.high());
        if !a.is_finite() || !b.is_finite() || a >= b {
            return Err(DistError::DegenerateRestriction { low: a, high: b });
        }
        let mass = self.cdf(b) - self.cdf(a);
        if mass <= 0.0 {
            return Err(DistError::DegenerateRestriction { low: a, high: b });
        }
        match self {
            ValueDistribution::Uniform { .. } => Ok(ValueDistribution::Uniform { low: a, high: b }),
            ValueDistribution::PowerLaw { k, .. } => Ok(ValueDistribution::PowerLaw {
                k: *k,
                low: a,
                high: b,
            }),
            ValueDistribution::PiecewiseLinearCdf { knots } => {
                let fa = self.cdf(a);
                let mut new_knots = vec![(a, 0.0)];
                for &(v, c) in knots {
                    if v > a && v < b {
                        let scaled = (c - fa) / mass;
                        if scaled > 0.0 && scaled < 1.0 {
                            new_knots.push((v, scaled));
                        }
                    }
                }
                new_knots.push((b, 1.0));
                Self::piecewise_linear_cdf(new_knots)
            }
        }
    }

    /// Expected one-round revenue `p (1 - F(p))` at posted price `p`.
    ///
    /// Equals `p` below the support and `0` at or above its top.
    pub fn revenue_curve(&self, p: f64) -> f64 {
        debug_assert!(p >= 0.0, "prices are nonnegative");
        p * (1.0 - self.cdf(p))
    }

    /// An argmax of the revenue curve over the support and its value. When the
    /// argmax set is an interval the infimum is returned.
    pub fn monopoly_price(&self) -> (f64, f64) {
        self.monopoly_price_with_grid(search::DEFAULT_GRID)
    }

    /// Monopoly price with an explicit scan grid size. Refinement runs to a
    /// price tolerance of 1e-10.
    pub fn monopoly_price_with_grid(&self, grid: usize) -> (f64, f64) {
        let m = search::maximize(
            |p| self.revenue_curve(p),
            self.low(),
            self.high(),
            grid,
            1e-10,
        );
        if m.at_boundary {
            return (m.x, m.value);
        }
        // A value-only argmax carries O(sqrt(eps)) jitter. Interior maxima
        // are pinned to machine precision by a sign bisection of
        // R'(p) = 1 - F(p) - p f(p) inside the scan bracket; corner maxima
        // keep the exact grid point.
        let step = (self.high() - self.low()) / (grid.max(3) - 1) as f64;
        let lo = (m.x - step).max(self.low());
        let hi = (m.x + step).min(self.high());
        let slope = |p: f64| 1.0 - self.cdf(p) - p * self.pdf(p);
        if slope(lo) > 0.0 && slope(hi) < 0.0 {
            let (mut a, mut b) = (lo, hi);
            while b - a > 1e-15 * (1.0 + b.abs()) {
                let mid = 0.5 * (a + b);
                if slope(mid) > 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let candidate = 0.5 * (a + b);
            let value = self.revenue_curve(candidate);
            if value >= m.value - 1e-12 * (1.0 + m.value.abs()) {
                return (candidate, value);
            }
        }
        (m.x, m.value)
    }

    /// Virtual value `φ(x) = x - (1 - F(x)) / f(x)`.
    pub fn virtual_value(&self, x: f64) -> Result<f64, DistError> {
        let f = self.pdf(x);
        if !f.is_finite() || f <= 0.0 {
            return Err(DistError::DensityVanishes { x });
        }
        Ok(x - (1.0 - self.cdf(x)) / f)
    }
}

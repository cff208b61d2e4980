//! Univariate marginal distributions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::UnitPoint;
use crate::special::{normal_cdf, normal_pdf, normal_quantile, normal_sf};

/// Ascending, finite, nonempty list of observations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalColumn {
    values: Vec<f64>,
}

impl EmpiricalColumn {
    /// Builds the column from unsorted observations.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empirical column is empty".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("empirical column holds non-finite value {v}")));
        }
        values.sort_by(f64::total_cmp);
        Ok(EmpiricalColumn { values })
    }

    /// Builds the column from values that must already be ascending.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        if values.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::InvalidParameter("empirical column values are not ascending".into()));
        }
        Self::from_unsorted(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn n(&self) -> f64 {
        self.values.len() as f64
    }
}

/// Parametric or empirical marginal law.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MarginalKind {
    Uniform {
        lo: f64,
        hi: f64,
    },
    Exponential {
        rate: f64,
    },
    /// Lomax-type law with survival `(1 + (x - location)/scale)^(-shape)`.
    ParetoII {
        location: f64,
        scale: f64,
        shape: f64,
    },
    Normal {
        mean: f64,
        sd: f64,
    },
    Empirical(EmpiricalColumn),
}

/// A validated marginal distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Marginal {
    kind: MarginalKind,
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

impl Marginal {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        finite("lo", lo)?;
        finite("hi", hi)?;
        if hi <= lo {
            return Err(Error::InvalidParameter(format!("uniform needs hi > lo, got [{lo}, {hi}]")));
        }
        Ok(Marginal { kind: MarginalKind::Uniform { lo, hi } })
    }

    pub fn standard_uniform() -> Self {
        Marginal { kind: MarginalKind::Uniform { lo: 0.0, hi: 1.0 } }
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        Ok(Marginal { kind: MarginalKind::Exponential { rate } })
    }

    pub fn pareto2(location: f64, scale: f64, shape: f64) -> Result<Self> {
        finite("location", location)?;
        positive("scale", scale)?;
        positive("shape", shape)?;
        Ok(Marginal { kind: MarginalKind::ParetoII { location, scale, shape } })
    }

    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        finite("mean", mean)?;
        positive("sd", sd)?;
        Ok(Marginal { kind: MarginalKind::Normal { mean, sd } })
    }

    pub fn empirical(column: EmpiricalColumn) -> Self {
        Marginal { kind: MarginalKind::Empirical(column) }
    }

    pub fn kind(&self) -> &MarginalKind {
        &self.kind
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.kind {
            MarginalKind::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            MarginalKind::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            MarginalKind::ParetoII { .. } => 1.0 - self.tail(x),
            MarginalKind::Normal { mean, sd } => normal_cdf((x - mean) / sd),
            MarginalKind::Empirical(col) => col.values.partition_point(|&v| v <= x) as f64 / col.n(),
        }
    }

    /// `P(X > x)`.
    pub fn tail(&self, x: f64) -> f64 {
        match &self.kind {
            MarginalKind::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            MarginalKind::ParetoII { location, scale, shape } => {
                if x <= *location {
                    1.0
                } else {
                    (1.0 + (x - location) / scale).powf(-shape)
                }
            }
            MarginalKind::Normal { mean, sd } => normal_sf((x - mean) / sd),
            MarginalKind::Empirical(col) => {
                let above = col.values.len() - col.values.partition_point(|&v| v <= x);
                above as f64 / col.n()
            }
            MarginalKind::Uniform { .. } => 1.0 - self.cdf(x),
        }
    }

    /// Generalized inverse `inf { x : F(x) >= p }` for `p` in (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        Ok(self.quantile_at(UnitPoint::new(p)))
    }

    /// Quantile at a point whose complement is known to full precision.
    pub fn quantile_at(&self, u: UnitPoint) -> f64 {
        match &self.kind {
            MarginalKind::Uniform { lo, hi } => {
                if u.p <= u.q {
                    lo + (hi - lo) * u.p
                } else {
                    hi - (hi - lo) * u.q
                }
            }
            MarginalKind::Exponential { rate } => {
                if u.p < 0.5 {
                    -(-u.p).ln_1p() / rate
                } else {
                    -u.q.ln() / rate
                }
            }
            MarginalKind::ParetoII { location, scale, shape } => {
                let excess =
                    if u.p < 0.5 { ((-u.p).ln_1p() * (-1.0 / shape)).exp_m1() } else { u.q.powf(-1.0 / shape) - 1.0 };
                location + scale * excess
            }
            MarginalKind::Normal { mean, sd } => mean + sd * normal_quantile(u.p, u.q),
            MarginalKind::Empirical(col) => {
                // smallest k with k/n >= p, comparing exactly as `cdf` does
                let (mut lo, mut hi) = (1usize, col.values.len());
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if (mid as f64 / col.n()) < u.p {
                        lo = mid + 1;
                    } else {
                        hi = mid;
                    }
                }
                col.values[lo - 1]
            }
        }
    }

    /// Derivative of the quantile function, `1 / f(F^{-1}(p))`; `None` for
    /// empirical marginals.
    pub fn quantile_density(&self, u: UnitPoint) -> Option<f64> {
        match &self.kind {
            MarginalKind::Uniform { lo, hi } => Some(hi - lo),
            MarginalKind::Exponential { rate } => Some(1.0 / (rate * u.q)),
            MarginalKind::ParetoII { scale, shape, .. } => Some(scale / shape * u.q.powf(-1.0 / shape - 1.0)),
            MarginalKind::Normal { sd, .. } => Some(sd / normal_pdf(normal_quantile(u.p, u.q))),
            MarginalKind::Empirical(_) => None,
        }
    }

    /// Whether `E|X|^order` is finite.
    pub fn moment_exists(&self, order: f64) -> bool {
        match &self.kind {
            MarginalKind::ParetoII { shape, .. } => *shape > order,
            _ => true,
        }
    }

    pub fn mean(&self) -> Result<f64> {
        match &self.kind {
            MarginalKind::Uniform { lo, hi } => Ok(0.5 * (lo + hi)),
            MarginalKind::Exponential { rate } => Ok(1.0 / rate),
            MarginalKind::ParetoII { location, scale, shape } => {
                if *shape <= 1.0 {
                    Err(Error::MomentUndefined(format!("Pareto II mean needs shape > 1, got {shape}")))
                } else {
                    Ok(location + scale / (shape - 1.0))
                }
            }
            MarginalKind::Normal { mean, .. } => Ok(*mean),
            MarginalKind::Empirical(col) => Ok(crate::special::fsum(col.values.iter().copied()) / col.n()),
        }
    }

    /// Closed support `[lower, upper]`; bounds may be infinite.
    pub fn support(&self) -> (f64, f64) {
        match &self.kind {
            MarginalKind::Uniform { lo, hi } => (*lo, *hi),
            MarginalKind::Exponential { .. } => (0.0, f64::INFINITY),
            MarginalKind::ParetoII { location, .. } => (*location, f64::INFINITY),
            MarginalKind::Normal { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            MarginalKind::Empirical(col) => (col.values[0], *col.values.last().unwrap()),
        }
    }

    /// Whether the quantile function is unbounded near 0 or 1.
    pub fn is_unbounded(&self) -> bool {
        let (lo, hi) = self.support();
        !(lo.is_finite() && hi.is_finite())
    }
}

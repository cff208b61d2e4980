use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Rho,
    RhoC,
    Kappa,
    Pearson,
    Kendall,
    Spearman,
    Gini,
    Blomqvist,
}

impl Measure {
    pub const ALL: [Measure; 8] = [
        Measure::Rho,
        Measure::RhoC,
        Measure::Kappa,
        Measure::Pearson,
        Measure::Kendall,
        Measure::Spearman,
        Measure::Gini,
        Measure::Blomqvist,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Rho => "rho",
            Measure::RhoC => "rho_c",
            Measure::Kappa => "kappa",
            Measure::Pearson => "pearson",
            Measure::Kendall => "kendall",
            Measure::Spearman => "spearman",
            Measure::Gini => "gini",
            Measure::Blomqvist => "blomqvist",
        }
    }

    /// Bivariate-only measures.
    pub fn is_bivariate(&self) -> bool {
        !matches!(self, Measure::Rho | Measure::RhoC | Measure::Kappa)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown measure {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    ClosedForm,
    Quadrature,
    MonteCarlo,
    EstimatorGeneral,
    EstimatorNonneg,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::ClosedForm => "closed_form",
            Variant::Quadrature => "quadrature",
            Variant::MonteCarlo => "monte_carlo",
            Variant::EstimatorGeneral => "estimator_general",
            Variant::EstimatorNonneg => "estimator_nonneg",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, Variant::MonteCarlo)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub nodes: Option<usize>,
    pub error_estimate: Option<f64>,
}

/// One evaluated measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    measure: Measure,
    variant: Variant,
    value: f64,
    diagnostics: Diagnostics,
}

impl MeasureReport {
    pub fn new(measure: Measure, variant: Variant, value: f64, diagnostics: Diagnostics) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::InvalidParameter(format!("{measure} value {value} is not finite")));
        }
        if variant.is_stochastic() && diagnostics.seed.is_none() {
            return Err(Error::InvalidParameter(format!("{variant} report for {measure} needs a seed")));
        }
        Ok(MeasureReport { measure, variant, value, diagnostics })
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }
    pub fn variant(&self) -> Variant {
        self.variant
    }
    pub fn value(&self) -> f64 {
        self.value
    }
    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_invariants() {
        assert!(MeasureReport::new(Measure::Rho, Variant::ClosedForm, f64::NAN, Diagnostics::default()).is_err());
        assert!(MeasureReport::new(Measure::Rho, Variant::MonteCarlo, 0.3, Diagnostics::default()).is_err());
        let d = Diagnostics { seed: Some(7), n: Some(100), ..Default::default() };
        let r = MeasureReport::new(Measure::Rho, Variant::MonteCarlo, 0.3, d).unwrap();
        assert_eq!(r.diagnostics().seed, Some(7));
    }

    #[test]
    fn measure_names_parse() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
        }
        assert!("tau".parse::<Measure>().is_err());
    }
}

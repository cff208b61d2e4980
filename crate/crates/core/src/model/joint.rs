//! Joint models: copula plus marginals, and the two parametric families
//! with closed-form moments.

use nalgebra::{DMatrix, DVector};

use super::copula::{psd_factor, Copula};
use super::marginal::Marginal;
use crate::error::{Error, Result};

/// A copula together with one marginal per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct CopulaModel {
    copula: Copula,
    marginals: Vec<Marginal>,
}

impl CopulaModel {
    pub fn new(copula: Copula, marginals: Vec<Marginal>) -> Result<Self> {
        if marginals.len() != copula.dim() {
            return Err(Error::InvalidParameter(format!(
                "copula has dimension {} but {} marginals were given",
                copula.dim(),
                marginals.len()
            )));
        }
        Ok(CopulaModel { copula, marginals })
    }

    /// Same marginal on every coordinate.
    pub fn with_identical_marginals(copula: Copula, marginal: Marginal) -> Self {
        let marginals = vec![marginal; copula.dim()];
        CopulaModel { copula, marginals }
    }

    pub fn copula(&self) -> &Copula {
        &self.copula
    }

    pub fn marginals(&self) -> &[Marginal] {
        &self.marginals
    }
}

/// Trivariate Pareto distribution of the second kind with a common shape
/// `alpha` and the shared max-term exponent `alpha0`:
/// `P(X > x) = (1 + max_j z_j)^(-alpha0) ∏_j (1 + z_j)^(-alpha)`,
/// `z_j = (x_j - location_j) / scale_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoII3 {
    location: [f64; 3],
    scale: [f64; 3],
    alpha: f64,
    alpha0: f64,
}

impl ParetoII3 {
    pub fn new(location: [f64; 3], scale: [f64; 3], alpha: f64, alpha0: f64) -> Result<Self> {
        if location.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("Pareto locations must be finite".into()));
        }
        if scale.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidParameter("Pareto scales must be positive".into()));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("Pareto alpha must be positive, got {alpha}")));
        }
        if !(alpha0 >= 0.0 && alpha0.is_finite()) {
            return Err(Error::InvalidParameter(format!("Pareto alpha0 must be nonnegative, got {alpha0}")));
        }
        Ok(ParetoII3 { location, scale, alpha, alpha0 })
    }

    /// Zero locations, unit scales.
    pub fn standard(alpha: f64, alpha0: f64) -> Result<Self> {
        Self::new([0.0; 3], [1.0; 3], alpha, alpha0)
    }

    pub fn location(&self) -> [f64; 3] {
        self.location
    }
    pub fn scale(&self) -> [f64; 3] {
        self.scale
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    /// Marginal tail exponent, `alpha0 + alpha`.
    pub fn marginal_shape(&self) -> f64 {
        self.alpha0 + self.alpha
    }

    pub fn marginal(&self, j: usize) -> Marginal {
        Marginal::pareto2(self.location[j], self.scale[j], self.marginal_shape()).expect("validated Pareto parameters")
    }

    /// Joint survival function `P(X_1 > x_1, X_2 > x_2, X_3 > x_3)`.
    pub fn joint_tail(&self, x: [f64; 3]) -> f64 {
        let mut z = [0.0; 3];
        for j in 0..3 {
            z[j] = ((x[j] - self.location[j]) / self.scale[j]).max(0.0);
        }
        let zmax = z.iter().copied().fold(0.0, f64::max);
        (1.0 + zmax).powf(-self.alpha0) * z.iter().map(|zj| (1.0 + zj).powf(-self.alpha)).product::<f64>()
    }
}

/// Multivariate normal law.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianJoint {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    factor: DMatrix<f64>,
}

impl GaussianJoint {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        if mean.len() != cov.nrows() {
            return Err(Error::InvalidParameter(format!(
                "mean has length {} but covariance is {}x{}",
                mean.len(),
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("mean entries must be finite".into()));
        }
        let factor = psd_factor(&cov, "covariance matrix")?;
        if let Some(i) = (0..cov.nrows()).find(|&i| !(cov[(i, i)] > 0.0)) {
            return Err(Error::InvalidParameter(format!("variance of coordinate {i} must be positive")));
        }
        Ok(GaussianJoint { mean, cov, factor })
    }

    /// Equal means, unit variances and a common correlation `r`.
    pub fn exchangeable(dim: usize, mean: f64, r: f64) -> Result<Self> {
        let cov = DMatrix::from_fn(dim, dim, |i, j| if i == j { 1.0 } else { r });
        Self::new(DVector::from_element(dim, mean), cov)
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }
    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }
    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn std_devs(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.cov[(i, i)].sqrt()).collect()
    }

    /// Covariance of the comonotone vector with the same marginals,
    /// `σ_i σ_j`.
    pub fn comonotone_cov(&self) -> DMatrix<f64> {
        let sd = self.std_devs();
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| sd[i] * sd[j])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum JointModel {
    Copula(CopulaModel),
    ParetoII3(ParetoII3),
    Gaussian(GaussianJoint),
}

impl JointModel {
    pub fn dim(&self) -> usize {
        match self {
            JointModel::Copula(c) => c.marginals.len(),
            JointModel::ParetoII3(_) => 3,
            JointModel::Gaussian(g) => g.dim(),
        }
    }

    pub fn marginals(&self) -> Vec<Marginal> {
        match self {
            JointModel::Copula(c) => c.marginals.clone(),
            JointModel::ParetoII3(p) => (0..3).map(|j| p.marginal(j)).collect(),
            JointModel::Gaussian(g) => g
                .std_devs()
                .iter()
                .zip(g.mean.iter())
                .map(|(&sd, &mu)| Marginal::normal(mu, sd).expect("validated covariance"))
                .collect(),
        }
    }
}

impl From<CopulaModel> for JointModel {
    fn from(m: CopulaModel) -> Self {
        JointModel::Copula(m)
    }
}

impl From<ParetoII3> for JointModel {
    fn from(m: ParetoII3) -> Self {
        JointModel::ParetoII3(m)
    }
}

impl From<GaussianJoint> for JointModel {
    fn from(m: GaussianJoint) -> Self {
        JointModel::Gaussian(m)
    }
}

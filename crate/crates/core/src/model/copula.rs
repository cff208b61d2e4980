//! Copulas: dependence structures on the unit cube.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quadrature::UnitPoint;
use crate::special::{bivariate_normal_cdf, normal_cdf, normal_quantile};

const PSD_TOLERANCE: f64 = 1e-10;

/// Whether the three-dimensional Eyraud–Gumbel–Morgenstern coefficients give
/// a nonnegative density: the density is multilinear in `1 - 2u_i`, so it is
/// enough to check the corners of `{-1, +1}^3`.
pub fn egm3_admissible(a12: f64, a13: f64, a23: f64, a123: f64) -> bool {
    if ![a12, a13, a23, a123].iter().all(|a| a.is_finite()) {
        return false;
    }
    let signs = [-1.0, 1.0];
    signs.iter().all(|&e1| {
        signs.iter().all(|&e2| {
            signs.iter().all(|&e3| 1.0 + a12 * e1 * e2 + a13 * e1 * e3 + a23 * e2 * e3 + a123 * e1 * e2 * e3 >= 0.0)
        })
    })
}

/// Gaussian copula with its precomputed factorizations.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianCopula {
    corr: DMatrix<f64>,
    /// `R^{-1} - I` and `ln det R`; absent when `R` is singular.
    precision_excess: Option<(DMatrix<f64>, f64)>,
    factor: DMatrix<f64>,
}

impl GaussianCopula {
    pub fn correlation(&self) -> &DMatrix<f64> {
        &self.corr
    }

    /// Matrix `L` with `L Lᵀ = R`.
    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }
}

/// Validates a symmetric PSD matrix and returns a factor `L` with `L Lᵀ = A`.
pub(crate) fn psd_factor(a: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    let m = a.nrows();
    if m != a.ncols() || m == 0 {
        return Err(Error::InvalidParameter(format!("{what} must be a nonempty square matrix")));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("{what} has non-finite entries")));
    }
    for i in 0..m {
        for j in 0..i {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * (1.0 + a[(i, j)].abs()) {
                return Err(Error::InvalidParameter(format!("{what} is not symmetric at ({i}, {j})")));
            }
        }
    }
    let eig = a.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOLERANCE {
        return Err(Error::InvalidParameter(format!("{what} is not positive semidefinite (eigenvalue {min:e})")));
    }
    if let Some(ch) = a.clone().cholesky() {
        return Ok(ch.l());
    }
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals))
}

#[derive(Debug, Clone, PartialEq)]
pub enum CopulaKind {
    Independent {
        dim: usize,
    },
    Comonotone {
        dim: usize,
    },
    /// Farlie–Gumbel–Morgenstern, `uv[1 + α(1-u)(1-v)]`.
    Fgm2 {
        alpha: f64,
    },
    /// Three-dimensional Eyraud–Gumbel–Morgenstern.
    Egm3 {
        a12: f64,
        a13: f64,
        a23: f64,
        a123: f64,
    },
    Gaussian(GaussianCopula),
}

/// A validated copula.
#[derive(Debug, Clone, PartialEq)]
pub struct Copula {
    kind: CopulaKind,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("copula dimension must be at least 2, got {dim}")));
    }
    Ok(())
}

impl Copula {
    pub fn independent(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Copula { kind: CopulaKind::Independent { dim } })
    }

    pub fn comonotone(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Copula { kind: CopulaKind::Comonotone { dim } })
    }

    pub fn fgm2(alpha: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&alpha) {
            return Err(Error::InadmissibleCopula(format!("FGM parameter {alpha} outside [-1, 1]")));
        }
        Ok(Copula { kind: CopulaKind::Fgm2 { alpha } })
    }

    pub fn egm3(a12: f64, a13: f64, a23: f64, a123: f64) -> Result<Self> {
        if !egm3_admissible(a12, a13, a23, a123) {
            return Err(Error::InadmissibleCopula(format!(
                "EGM coefficients ({a12}, {a13}, {a23}, {a123}) give a negative density"
            )));
        }
        Ok(Copula { kind: CopulaKind::Egm3 { a12, a13, a23, a123 } })
    }

    pub fn gaussian(corr: DMatrix<f64>) -> Result<Self> {
        check_dim(corr.nrows())?;
        let factor = psd_factor(&corr, "correlation matrix")?;
        for i in 0..corr.nrows() {
            if (corr[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("correlation diagonal entry {i} is {}", corr[(i, i)])));
            }
        }
        let precision_excess = corr.clone().try_inverse().and_then(|inv| {
            let det = corr.determinant();
            (det > 1e-14).then(|| (inv - DMatrix::identity(corr.nrows(), corr.nrows()), det.ln()))
        });
        Ok(Copula { kind: CopulaKind::Gaussian(GaussianCopula { corr, precision_excess, factor }) })
    }

    /// Bivariate Gaussian copula with correlation `r`.
    pub fn gaussian2(r: f64) -> Result<Self> {
        Self::gaussian(DMatrix::from_row_slice(2, 2, &[1.0, r, r, 1.0]))
    }

    pub fn kind(&self) -> &CopulaKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            CopulaKind::Independent { dim } | CopulaKind::Comonotone { dim } => *dim,
            CopulaKind::Fgm2 { .. } => 2,
            CopulaKind::Egm3 { .. } => 3,
            CopulaKind::Gaussian(g) => g.corr.nrows(),
        }
    }

    /// `C(u)`; `None` where no closed form is implemented (Gaussian, m > 2).
    pub fn cdf(&self, u: &[UnitPoint]) -> Option<f64> {
        debug_assert_eq!(u.len(), self.dim());
        match &self.kind {
            CopulaKind::Independent { .. } => Some(u.iter().map(|x| x.p).product()),
            CopulaKind::Comonotone { .. } => Some(u.iter().map(|x| x.p).fold(1.0, f64::min)),
            CopulaKind::Fgm2 { alpha } => Some(u[0].p * u[1].p * (1.0 + alpha * u[0].q * u[1].q)),
            CopulaKind::Egm3 { a12, a13, a23, a123 } => {
                let (p, q) = ([u[0].p, u[1].p, u[2].p], [u[0].q, u[1].q, u[2].q]);
                Some(
                    p[0] * p[1]
                        * p[2]
                        * (1.0 + a12 * q[0] * q[1] + a13 * q[0] * q[2] + a23 * q[1] * q[2] + a123 * q[0] * q[1] * q[2]),
                )
            }
            CopulaKind::Gaussian(g) if g.corr.nrows() == 2 => {
                let r = g.corr[(0, 1)];
                Some(bivariate_normal_cdf(normal_quantile(u[0].p, u[0].q), normal_quantile(u[1].p, u[1].q), r))
            }
            CopulaKind::Gaussian(_) => None,
        }
    }

    /// Joint survival `P(U_1 > u_1, ..., U_m > u_m)`, evaluated from the
    /// complements so it stays accurate near the upper corner.
    pub fn survival(&self, u: &[UnitPoint]) -> Option<f64> {
        match &self.kind {
            CopulaKind::Independent { .. } => Some(u.iter().map(|x| x.q).product()),
            CopulaKind::Comonotone { .. } => Some(u.iter().map(|x| x.q).fold(1.0, f64::min)),
            CopulaKind::Fgm2 { alpha } => Some(u[0].q * u[1].q * (1.0 + alpha * u[0].p * u[1].p)),
            CopulaKind::Egm3 { a12, a13, a23, a123 } => {
                let (p, q) = ([u[0].p, u[1].p, u[2].p], [u[0].q, u[1].q, u[2].q]);
                Some(
                    q[0] * q[1]
                        * q[2]
                        * (1.0 + a12 * p[0] * p[1] + a13 * p[0] * p[2] + a23 * p[1] * p[2] - a123 * p[0] * p[1] * p[2]),
                )
            }
            // radially symmetric: the survival copula is C itself
            CopulaKind::Gaussian(_) => {
                let flipped: Vec<UnitPoint> = u.iter().map(|x| UnitPoint { p: x.q, q: x.p }).collect();
                self.cdf(&flipped)
            }
        }
    }

    /// Copula density; `None` for the comonotone copula and singular
    /// Gaussian correlation matrices.
    pub fn density(&self, u: &[UnitPoint]) -> Option<f64> {
        match &self.kind {
            CopulaKind::Independent { .. } => Some(1.0),
            CopulaKind::Comonotone { .. } => None,
            CopulaKind::Fgm2 { alpha } => Some(1.0 + alpha * u[0].centered() * u[1].centered()),
            CopulaKind::Egm3 { a12, a13, a23, a123 } => {
                let d = [u[0].centered(), u[1].centered(), u[2].centered()];
                Some(1.0 + a12 * d[0] * d[1] + a13 * d[0] * d[2] + a23 * d[1] * d[2] + a123 * d[0] * d[1] * d[2])
            }
            CopulaKind::Gaussian(g) => {
                let (excess, log_det) = g.precision_excess.as_ref()?;
                let z: Vec<f64> = u.iter().map(|x| normal_quantile(x.p, x.q)).collect();
                let m = z.len();
                let mut quad = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        quad += z[i] * excess[(i, j)] * z[j];
                    }
                }
                Some((-0.5 * log_det - 0.5 * quad).exp())
            }
        }
    }

    /// For bivariate copulas, `∂C/∂u_1` at `(u_1, u_2)`: the conditional
    /// CDF of `U_2` given `U_1 = u_1`.
    pub fn conditional_cdf(&self, u1: UnitPoint, u2: UnitPoint) -> Option<f64> {
        match &self.kind {
            CopulaKind::Independent { dim: 2 } => Some(u2.p),
            CopulaKind::Fgm2 { alpha } => Some(u2.p * (1.0 + alpha * u1.centered() * u2.q)),
            CopulaKind::Gaussian(g) if g.corr.nrows() == 2 => {
                let r = g.corr[(0, 1)];
                let (z1, z2) = (normal_quantile(u1.p, u1.q), normal_quantile(u2.p, u2.q));
                if (1.0 - r * r) <= 0.0 {
                    return None;
                }
                Some(normal_cdf((z2 - r * z1) / (1.0 - r * r).sqrt()))
            }
            _ => None,
        }
    }
}

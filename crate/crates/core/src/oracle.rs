//! Independent ground truth: exact sums over finite laws, quadrature of the
//! tail-integral and CDF-integral forms, and Monte Carlo estimates.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::analytic::{check_product_moment, estimate_ratio, staircase_product_moment};
use crate::empirical::{rho_hat_general, RatioParts};
use crate::error::{Error, Result};
use crate::model::{CopulaKind, CopulaModel, DiscreteJoint, GaussianJoint, JointModel, Marginal, UnitPoint};
use crate::quadrature::{integrate_sorted, integrate_sorted_plain, Estimate, QuadratureSpec};
use crate::simulate::sample;
use crate::special::{canonical_product, fsum, two_product};

/// ρ of a finitely supported law, with the comonotone product moment
/// summed exactly over the merged marginal staircases.
pub fn discrete_rho(joint: &DiscreteJoint) -> Result<f64> {
    let m = joint.dim();
    let total = joint.total_mass();
    let mut buf = vec![0.0; m];
    let product_moment = fsum(
        joint
            .weighted_support()
            .flat_map(|(x, w)| {
                buf.copy_from_slice(x);
                two_product(w, canonical_product(&mut buf))
            })
            .collect::<Vec<_>>(),
    ) / total;
    let atoms: Vec<Vec<(f64, f64)>> = (0..m).map(|j| joint.marginal_atoms(j)).collect();
    let mut means: Vec<f64> =
        atoms.iter().map(|a| fsum(a.iter().flat_map(|&(v, w)| two_product(v, w))) / total).collect();
    let independent = canonical_product(&mut means);
    let comonotone = staircase_product_moment(&atoms, total);
    let mut ranges: Vec<f64> = atoms.iter().map(|a| a[a.len() - 1].0 - a[0].0).collect();
    let scale = canonical_product(&mut ranges);
    RatioParts { numerator: product_moment - independent, denominator: comonotone - independent }.ratio(scale)
}

fn check_tail_marginals(marginals: &[Marginal]) -> Result<()> {
    for (j, mg) in marginals.iter().enumerate() {
        if mg.support().0 != 0.0 || mg.quantile_density(UnitPoint::new(0.5)).is_none() {
            return Err(Error::UnsupportedModel(format!(
                "tail integration needs parametric marginals supported on [0, ∞); marginal {} is not",
                j + 1
            )));
        }
    }
    Ok(())
}

/// ρ of a non-negative random vector from the tail-integral form:
/// `∫ (F̄ − ∏ F̄_i) / ∫ (min F̄_i − ∏ F̄_i)` over the positive orthant.
///
/// Supported: copula models with parametric marginals on `[0, ∞)` whose
/// survival copula is available, and the Pareto II law with zero
/// locations. Integration runs in marginal-probability coordinates.
pub fn tail_integral_rho(model: &JointModel, q: &QuadratureSpec) -> Result<Estimate> {
    let m = model.dim();
    if !(2..=3).contains(&m) {
        return Err(Error::DimensionUnsupported { dim: m, supported: "2 or 3" });
    }
    match model {
        JointModel::Copula(cm) => {
            let marginals = cm.marginals();
            check_tail_marginals(marginals)?;
            check_product_moment(marginals)?;
            let copula = cm.copula();
            if copula.survival(&vec![UnitPoint::new(0.5); m]).is_none() {
                return Err(Error::UnsupportedModel("no closed-form survival copula".into()));
            }
            // v_i = F_i(x_i); the survival copula takes the tail levels
            let jac = |v: &[UnitPoint]| -> f64 {
                marginals.iter().zip(v).map(|(mg, &vi)| mg.quantile_density(vi).unwrap()).product()
            };
            let indep = |v: &[UnitPoint]| -> f64 { v.iter().map(|x| x.q).product() };
            let num = integrate_sorted_plain(q, m, |v| {
                let joint = copula.survival(v).unwrap();
                (joint - indep(v)) * jac(v)
            })?;
            let den = integrate_sorted_plain(q, m, |v| {
                let lowest = v.iter().map(|x| x.q).fold(1.0, f64::min);
                (lowest - indep(v)) * jac(v)
            })?;
            estimate_ratio(num, den)
        }
        JointModel::ParetoII3(p) => {
            if p.location() != [0.0; 3] {
                return Err(Error::UnsupportedModel("tail integration needs zero Pareto locations".into()));
            }
            check_product_moment(&[p.marginal(0), p.marginal(1), p.marginal(2)])?;
            let theta = p.marginal_shape();
            let (a0, a) = (p.alpha0() / theta, p.alpha() / theta);
            let scale = p.scale();
            // w_j = F̄_j(x_j): F̄ = (min w)^(α0/θ) ∏ w^(α/θ), dx/dw = (σ/θ) w^(-1/θ-1);
            // each term is formed in log space since the factors over- and
            // underflow separately near the origin
            let log_jac = |w: &[UnitPoint]| -> f64 {
                w.iter().zip(scale).map(|(x, s)| (s / theta).ln() - (1.0 / theta + 1.0) * x.p.ln()).sum()
            };
            let log_lowest = |w: &[UnitPoint]| w.iter().map(|x| x.p.ln()).fold(0.0, f64::min);
            let log_indep = |w: &[UnitPoint]| -> f64 { w.iter().map(|x| x.p.ln()).sum() };
            let num = integrate_sorted(q, 3, |w, duffy| {
                let lj = log_jac(w) + duffy;
                let log_joint = a0 * log_lowest(w) + a * log_indep(w);
                (log_joint + lj).exp() - (log_indep(w) + lj).exp()
            })?;
            let den = integrate_sorted(q, 3, |w, duffy| {
                let lj = log_jac(w) + duffy;
                (log_lowest(w) + lj).exp() - (log_indep(w) + lj).exp()
            })?;
            estimate_ratio(num, den)
        }
        JointModel::Gaussian(_) => Err(Error::UnsupportedModel("tail integration needs a non-negative support".into())),
    }
}

/// `E[X_1 ⋯ X_m]` for the first `m` coordinates of the standardized
/// trivariate Pareto II law, as `∫ F̄(x) dx` over the positive orthant.
pub fn pareto_tail_moment(alpha0: f64, alpha: f64, m: usize, q: &QuadratureSpec) -> Result<Estimate> {
    if !(1..=3).contains(&m) {
        return Err(Error::DimensionUnsupported { dim: m, supported: "1 to 3" });
    }
    let p = crate::model::ParetoII3::standard(alpha, alpha0)?;
    let theta = p.marginal_shape();
    if theta <= m as f64 {
        return Err(Error::MomentUndefined(format!("order-{m} moments need alpha0 + alpha > {m}, got {theta}")));
    }
    let (a0, a) = (alpha0 / theta, alpha / theta);
    integrate_sorted(q, m, |w, duffy| {
        let log_lowest = w.iter().map(|x| x.p.ln()).fold(0.0, f64::min);
        let log_w: f64 = w.iter().map(|x| x.p.ln()).sum();
        let log_jac = -(1.0 / theta + 1.0) * log_w - m as f64 * theta.ln();
        (a0 * log_lowest + a * log_w + log_jac + duffy).exp()
    })
}

/// κ of a copula model: `∫ (F − ∏ F_i) / ∫ (min F_i − ∏ F_i)` over the
/// support, integrated in marginal-probability coordinates.
pub fn kappa_from_copula(model: &CopulaModel, q: &QuadratureSpec) -> Result<Estimate> {
    let marginals = model.marginals();
    let m = marginals.len();
    if !(2..=3).contains(&m) {
        return Err(Error::DimensionUnsupported { dim: m, supported: "2 or 3" });
    }
    if marginals.iter().any(|mg| mg.quantile_density(UnitPoint::new(0.5)).is_none()) {
        return Err(Error::UnsupportedModel("κ quadrature needs parametric marginals".into()));
    }
    check_product_moment(marginals)?;
    let copula = model.copula();
    if copula.cdf(&vec![UnitPoint::new(0.5); m]).is_none() {
        return Err(Error::UnsupportedModel("no closed-form copula CDF".into()));
    }
    let jac = |v: &[UnitPoint]| -> f64 {
        marginals.iter().zip(v).map(|(mg, &vi)| mg.quantile_density(vi).unwrap()).product()
    };
    let indep = |v: &[UnitPoint]| -> f64 { v.iter().map(|x| x.p).product() };
    let den = integrate_sorted_plain(q, m, |v| {
        let lowest = v.iter().map(|x| x.p).fold(1.0, f64::min);
        (lowest - indep(v)) * jac(v)
    })?;
    let num = match copula.kind() {
        CopulaKind::Independent { .. } => Estimate { value: 0.0, error: 0.0, nodes: 0 },
        CopulaKind::Comonotone { .. } => den,
        _ => integrate_sorted_plain(q, m, |v| (copula.cdf(v).unwrap() - indep(v)) * jac(v))?,
    };
    estimate_ratio(num, den)
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n: usize,
    pub seed: u64,
}

/// Number of contiguous batches behind the batch-means standard error.
pub const MC_BATCHES: usize = 16;

/// Monte Carlo ρ: the sample estimator on `n` simulated rows, with a
/// batch-means standard error over [`MC_BATCHES`] contiguous batches.
pub fn mc_rho(model: &JointModel, n: usize, seed: u64) -> Result<McEstimate> {
    if n < 2 * MC_BATCHES {
        return Err(Error::InvalidParameter(format!("Monte Carlo needs at least {} rows, got {n}", 2 * MC_BATCHES)));
    }
    let s = sample(model, n, seed)?;
    let value = rho_hat_general(&s)?;
    let batch = n / MC_BATCHES;
    let batch_values = (0..MC_BATCHES)
        .map(|b| rho_hat_general(&s.row_block(b * batch, (b + 1) * batch)?))
        .collect::<Result<Vec<f64>>>()?;
    let k = MC_BATCHES as f64;
    let mean = fsum(batch_values.iter().copied()) / k;
    let var = fsum(batch_values.iter().map(|v| (v - mean).powi(2))) / (k - 1.0);
    Ok(McEstimate { value, std_error: (var / k).sqrt(), n, seed })
}

/// Monte Carlo estimate of the raw product moment `E[∏ X_i]` of
/// `N(mean, cov)`, with the usual standard error.
pub fn isserlis_bruteforce(mean: &[f64], cov: &DMatrix<f64>, n: usize, seed: u64) -> Result<McEstimate> {
    let g = GaussianJoint::new(DVector::from_column_slice(mean), cov.clone())?;
    let s = sample(&JointModel::Gaussian(g), n, seed)?;
    let mut buf = vec![0.0; mean.len()];
    let products: Vec<f64> = s
        .rows()
        .map(|r| {
            buf.copy_from_slice(r);
            canonical_product(&mut buf)
        })
        .collect();
    let nf = n as f64;
    let value = fsum(products.iter().copied()) / nf;
    let var = fsum(products.iter().map(|x| (x - value).powi(2))) / (nf - 1.0);
    Ok(McEstimate { value, std_error: (var / nf).sqrt(), n, seed })
}

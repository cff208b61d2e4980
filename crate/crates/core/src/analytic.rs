//! Closed forms and quadrature evaluations of the dependence measures for
//! parametric models.

use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Copula, CopulaKind, CopulaModel, GaussianJoint, Marginal, MarginalKind, UnitPoint};
use crate::quadrature::{integrate, AxisRange, Estimate, QuadratureSpec};
use crate::special::{canonical_product, fsum, two_product};

/// Absolute threshold for a vanishing denominator in closed forms.
pub const DENOMINATOR_ATOL: f64 = 1e-12;

fn ratio(numerator: f64, denominator: f64) -> Result<f64> {
    if !(denominator.abs() >= DENOMINATOR_ATOL) {
        return Err(Error::DegenerateDenominator { numerator, denominator });
    }
    Ok(numerator / denominator)
}

/// Ratio of two quadrature estimates with first-order error propagation.
pub(crate) fn estimate_ratio(num: Estimate, den: Estimate) -> Result<Estimate> {
    let value = ratio(num.value, den.value)?;
    let error = (num.error + value.abs() * den.error) / den.value.abs();
    Ok(Estimate { value, error, nodes: num.nodes.max(den.nodes) })
}

/// Checks that `E[∏ |X_i|]` is finite for every coupling of `marginals`
/// (Hölder: the reciprocal Pareto shapes must sum to less than 1).
pub(crate) fn check_product_moment(marginals: &[Marginal]) -> Result<()> {
    let load: f64 = marginals
        .iter()
        .map(|m| match m.kind() {
            MarginalKind::ParetoII { shape, .. } => 1.0 / shape,
            _ => 0.0,
        })
        .sum();
    if load >= 1.0 {
        return Err(Error::MomentUndefined(format!(
            "product moment of {} marginals needs the reciprocal Pareto shapes to sum below 1, got {load}",
            marginals.len()
        )));
    }
    Ok(())
}

/// `∫₀¹ ∏ q_i(u) du` for step quantile functions given as ascending
/// `(value, probability)` atoms, summed exactly over the merged staircase.
pub(crate) fn staircase_product_moment(atoms: &[Vec<(f64, f64)>], total: f64) -> f64 {
    let ends: Vec<Vec<f64>> = atoms
        .iter()
        .map(|a| {
            let mut acc = 0.0;
            let mut e: Vec<f64> = a
                .iter()
                .map(|(_, w)| {
                    acc += w;
                    acc
                })
                .collect();
            if let Some(last) = e.last_mut() {
                *last = total;
            }
            e
        })
        .collect();
    let mut idx = vec![0usize; atoms.len()];
    let mut prev = 0.0;
    let mut terms = Vec::new();
    loop {
        let next = idx.iter().zip(&ends).map(|(&i, e)| e[i]).fold(f64::INFINITY, f64::min);
        let mut factors: Vec<f64> = idx.iter().zip(atoms).map(|(&i, a)| a[i].0).collect();
        terms.extend(two_product(next - prev, canonical_product(&mut factors)));
        prev = next;
        if next >= total {
            break;
        }
        for (i, e) in idx.iter_mut().zip(&ends) {
            if e[*i] <= next {
                *i += 1;
            }
        }
    }
    fsum(terms) / total
}

/// Atoms of an empirical marginal as `(value, multiplicity)`.
fn empirical_atoms(m: &Marginal) -> Option<Vec<(f64, f64)>> {
    match m.kind() {
        MarginalKind::Empirical(col) => {
            let mut atoms: Vec<(f64, f64)> = Vec::new();
            for &v in col.values() {
                match atoms.last_mut() {
                    Some((x, c)) if *x == v => *c += 1.0,
                    _ => atoms.push((v, 1.0)),
                }
            }
            Some(atoms)
        }
        _ => None,
    }
}

/// `E[∏ F_i^{-1}(U)]`, the product moment of the comonotone vector.
///
/// Parametric marginals use 1-D quadrature; if every marginal is empirical
/// the staircase is summed exactly (reported error 0).
pub fn comonotone_product_moment(marginals: &[Marginal], q: &QuadratureSpec) -> Result<Estimate> {
    if marginals.is_empty() {
        return Err(Error::InvalidParameter("at least one marginal is required".into()));
    }
    let atoms: Vec<Option<Vec<(f64, f64)>>> = marginals.iter().map(empirical_atoms).collect();
    if atoms.iter().all(Option::is_some) {
        let mut atoms: Vec<Vec<(f64, f64)>> = atoms.into_iter().map(Option::unwrap).collect();
        let lengths: Vec<f64> = atoms.iter().map(|a| a.iter().map(|(_, c)| c).sum()).collect();
        // counts stay exact on a shared scale; otherwise switch to probabilities
        let total = if lengths.iter().all(|&l| l == lengths[0]) {
            lengths[0]
        } else {
            for (a, l) in atoms.iter_mut().zip(&lengths) {
                a.iter_mut().for_each(|(_, c)| *c /= l);
            }
            1.0
        };
        let nodes = atoms.iter().map(Vec::len).sum();
        return Ok(Estimate { value: staircase_product_moment(&atoms, total), error: 0.0, nodes });
    }
    if atoms.iter().any(Option::is_some) {
        return Err(Error::UnsupportedModel("empirical marginals cannot be mixed with parametric ones".into()));
    }
    check_product_moment(marginals)?;
    integrate(q, &[AxisRange::Unbounded], |u| marginals.iter().map(|m| m.quantile_at(u[0])).product())
}

fn product_of_means(marginals: &[Marginal]) -> Result<f64> {
    let mut means = marginals.iter().map(Marginal::mean).collect::<Result<Vec<f64>>>()?;
    Ok(crate::special::canonical_product(&mut means))
}

fn axis_ranges(marginals: &[Marginal]) -> Vec<AxisRange> {
    marginals.iter().map(|m| if m.is_unbounded() { AxisRange::Unbounded } else { AxisRange::Full }).collect()
}

/// ρ of a copula model by quadrature: the numerator is
/// `∫ (c(u) − 1) ∏ F_i^{-1}(u_i) du` over the unit cube and the denominator
/// is the comonotone product moment minus the product of the means.
pub fn rho_from_copula(model: &CopulaModel, q: &QuadratureSpec) -> Result<Estimate> {
    let marginals = model.marginals();
    let m = marginals.len();
    if !(2..=3).contains(&m) {
        return Err(Error::DimensionUnsupported { dim: m, supported: "2 or 3" });
    }
    if marginals.iter().any(|mg| matches!(mg.kind(), MarginalKind::Empirical(_))) {
        return Err(Error::UnsupportedModel("copula quadrature needs parametric marginals".into()));
    }
    check_product_moment(marginals)?;
    let independent = product_of_means(marginals)?;
    let comonotone = comonotone_product_moment(marginals, q)?;
    let den = Estimate { value: comonotone.value - independent, ..comonotone };
    let copula = model.copula();
    let num = match copula.kind() {
        CopulaKind::Independent { .. } => Estimate { value: 0.0, error: 0.0, nodes: 0 },
        CopulaKind::Comonotone { .. } => den,
        CopulaKind::Gaussian(_) if copula.density(&vec![UnitPoint::new(0.5); m]).is_none() => {
            return Err(Error::UnsupportedModel("singular Gaussian copula has no density".into()));
        }
        _ => integrate(q, &axis_ranges(marginals), |u| {
            let c = copula.density(u).expect("copula density checked above");
            let x: f64 = marginals.iter().zip(u).map(|(mg, &ui)| mg.quantile_at(ui)).product();
            (c - 1.0) * x
        })?,
    };
    estimate_ratio(num, den)
}

/// Marginal families with a closed-form FGM ρ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FgmMargins {
    Uniform01,
    Exp1,
}

impl FromStr for FgmMargins {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform01" | "uniform" => Ok(FgmMargins::Uniform01),
            "exp1" | "exp" => Ok(FgmMargins::Exp1),
            _ => Err(Error::InvalidParameter(format!("unknown FGM margin family {s:?}"))),
        }
    }
}

/// ρ of the bivariate FGM copula: `α/3` with U(0,1) margins, `α/4` with
/// Exp(1) margins.
pub fn fgm_rho_closed(alpha: f64, margins: FgmMargins) -> Result<f64> {
    Copula::fgm2(alpha)?;
    Ok(match margins {
        FgmMargins::Uniform01 => alpha / 3.0,
        FgmMargins::Exp1 => alpha / 4.0,
    })
}

fn check_egm3(a12: f64, a13: f64, a23: f64, a123: f64) -> Result<()> {
    Copula::egm3(a12, a13, a23, a123).map(|_| ())
}

/// ρ of the trivariate EGM copula with uniform margins.
pub fn egm3_rho(a12: f64, a13: f64, a23: f64, a123: f64) -> Result<f64> {
    check_egm3(a12, a13, a23, a123)?;
    Ok((a12 + a13 + a23) / 9.0 - a123 / 27.0)
}

/// κ of the trivariate EGM copula with uniform margins.
pub fn egm3_kappa(a12: f64, a13: f64, a23: f64, a123: f64) -> Result<f64> {
    check_egm3(a12, a13, a23, a123)?;
    Ok((a12 + a13 + a23) / 9.0 + a123 / 27.0)
}

/// Raw moments of the standardized trivariate Pareto II law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParetoMoments {
    pub mean: f64,
    pub pair_moment: f64,
    pub triple_moment: f64,
    /// `1/((α−1)(α−2)(α−3))`, which uses `α` in place of `θ` and drops the
    /// factor 6; `None` when `α <= 3`.
    pub comonotone_triple_uncorrected: Option<f64>,
    /// `6/((θ−1)(θ−2)(θ−3))`, `θ = α0 + α`.
    pub comonotone_triple_corrected: f64,
}

fn check_pareto(alpha0: f64, alpha: f64, order: u32) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite() && alpha0 >= 0.0 && alpha0.is_finite()) {
        return Err(Error::InvalidParameter(format!("need alpha > 0 and alpha0 >= 0, got ({alpha0}, {alpha})")));
    }
    let theta = alpha0 + alpha;
    if theta <= f64::from(order) {
        return Err(Error::MomentUndefined(format!(
            "moments of order {order} need alpha0 + alpha > {order}, got {theta}"
        )));
    }
    Ok(theta)
}

pub fn pareto3_moments(alpha0: f64, alpha: f64) -> Result<ParetoMoments> {
    let theta = check_pareto(alpha0, alpha, 3)?;
    let (t1, t2, t3) = (theta - 1.0, theta - 2.0, theta - 3.0);
    let (b2, b3) = (alpha0 + 2.0 * alpha - 2.0, alpha0 + 3.0 * alpha - 3.0);
    Ok(ParetoMoments {
        mean: 1.0 / t1,
        pair_moment: 2.0 / (t1 * b2),
        triple_moment: 6.0 / (t1 * b2 * b3),
        comonotone_triple_uncorrected: (alpha > 3.0).then(|| 1.0 / ((alpha - 1.0) * (alpha - 2.0) * (alpha - 3.0))),
        comonotone_triple_corrected: 6.0 / (t1 * t2 * t3),
    })
}

/// Which comonotone triple moment to use for the Pareto ρ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParetoVariant {
    /// `1/((α−1)(α−2)(α−3))`; inconsistent with the marginal shape
    /// `α0 + α`. Selected on the command line as `paper`.
    Uncorrected,
    #[default]
    Corrected,
}

impl FromStr for ParetoVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "uncorrected" => Ok(ParetoVariant::Uncorrected),
            "corrected" => Ok(ParetoVariant::Corrected),
            _ => Err(Error::InvalidParameter(format!("unknown Pareto variant {s:?}"))),
        }
    }
}

/// ρ of the standardized trivariate Pareto II law.
pub fn pareto3_rho(alpha0: f64, alpha: f64, variant: ParetoVariant) -> Result<f64> {
    let mom = pareto3_moments(alpha0, alpha)?;
    match variant {
        ParetoVariant::Corrected => {
            // both differences in factored form, free of cancellation
            let theta = alpha0 + alpha;
            let a = alpha - 1.0;
            let num = alpha0 * (5.0 * alpha0 + 7.0 * a) * (theta - 2.0) * (theta - 3.0);
            let den = theta * (5.0 * theta - 7.0) * (alpha0 + 2.0 * a) * (alpha0 + 3.0 * a);
            ratio(num, den)
        }
        ParetoVariant::Uncorrected => {
            let com = mom.comonotone_triple_uncorrected.ok_or_else(|| {
                Error::MomentUndefined(format!("the uncorrected comonotone moment needs alpha > 3, got {alpha}"))
            })?;
            let mean3 = mom.mean.powi(3);
            ratio(mom.triple_moment - mean3, com - mean3)
        }
    }
}

/// ρ_C of the standardized trivariate Pareto II law,
/// `α0(θ−2) / (θ(α0 + 2α − 2))`.
pub fn pareto3_rho_c(alpha0: f64, alpha: f64) -> Result<f64> {
    let theta = check_pareto(alpha0, alpha, 2)?;
    Ok(alpha0 * (theta - 2.0) / (theta * (alpha0 + 2.0 * alpha - 2.0)))
}

/// One term of the Gaussian product-moment expansion: a set of disjoint
/// index pairs (each contributing a covariance) and the unpaired indices
/// (each contributing a mean).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianMomentTerm {
    pub pairs: Vec<(usize, usize)>,
    pub unpaired: Vec<usize>,
}

/// Largest dimension accepted by the pairing expansion.
pub const MAX_PAIRING_DIM: usize = 10;

/// Every partial pairing of `{0, ..., m−1}`.
pub fn gaussian_pairings(m: usize) -> Result<Vec<GaussianMomentTerm>> {
    if m > MAX_PAIRING_DIM {
        return Err(Error::DimensionUnsupported { dim: m, supported: "at most 10" });
    }
    fn rec(
        rest: &[usize],
        pairs: &mut Vec<(usize, usize)>,
        unpaired: &mut Vec<usize>,
        out: &mut Vec<GaussianMomentTerm>,
    ) {
        let Some((&first, tail)) = rest.split_first() else {
            out.push(GaussianMomentTerm { pairs: pairs.clone(), unpaired: unpaired.clone() });
            return;
        };
        unpaired.push(first);
        rec(tail, pairs, unpaired, out);
        unpaired.pop();
        for (k, &partner) in tail.iter().enumerate() {
            let mut remaining = tail.to_vec();
            remaining.remove(k);
            pairs.push((first, partner));
            rec(&remaining, pairs, unpaired, out);
            pairs.pop();
        }
    }
    let idx: Vec<usize> = (0..m).collect();
    let mut out = Vec::new();
    rec(&idx, &mut Vec::new(), &mut Vec::new(), &mut out);
    Ok(out)
}

/// Number of ways to choose `k` disjoint pairs from `m` indices,
/// `m! / (2^k k! (m−2k)!)`.
pub fn pairing_count(m: usize, k: usize) -> u64 {
    if 2 * k > m {
        return 0;
    }
    let fact = |n: usize| (1..=n as u64).product::<u64>();
    fact(m) / (fact(k) << k) / fact(m - 2 * k)
}

/// `E[∏ X_i]` for `X ~ N(μ, Σ)`: the sum over all partial pairings of
/// `∏ Σ_pairs ∏ μ_unpaired`.
pub fn gaussian_product_moment(mean: &[f64], cov: &DMatrix<f64>) -> Result<f64> {
    let m = mean.len();
    if cov.nrows() != m || cov.ncols() != m {
        return Err(Error::InvalidParameter(format!(
            "mean has length {m} but covariance is {}x{}",
            cov.nrows(),
            cov.ncols()
        )));
    }
    let terms = gaussian_pairings(m)?;
    Ok(fsum(terms.iter().map(|t| {
        let pairs: f64 = t.pairs.iter().map(|&(i, j)| cov[(i, j)]).product();
        let singles: f64 = t.unpaired.iter().map(|&i| mean[i]).product();
        pairs * singles
    })))
}

/// ρ of a Gaussian vector; the comonotone vector has covariance
/// `σ_i σ_j`.
pub fn gaussian_rho(g: &GaussianJoint) -> Result<f64> {
    let mean: Vec<f64> = g.mean().iter().copied().collect();
    let independent: f64 = mean.iter().product();
    let i = gaussian_product_moment(&mean, g.cov())? - independent;
    let j = gaussian_product_moment(&mean, &g.comonotone_cov())? - independent;
    ratio(i, j)
}

/// ρ_C of a Gaussian vector: summed pairwise covariances over their
/// comonotone counterparts.
pub fn gaussian_rho_c(g: &GaussianJoint) -> Result<f64> {
    let sd = g.std_devs();
    let (mut num, mut den) = (Vec::new(), Vec::new());
    for i in 0..g.dim() {
        for j in 0..i {
            num.push(g.cov()[(i, j)]);
            den.push(sd[i] * sd[j]);
        }
    }
    if num.is_empty() {
        return Err(Error::DimensionUnsupported { dim: g.dim(), supported: "at least 2" });
    }
    ratio(fsum(num), fsum(den))
}

/// Population versions of the classical bivariate rank measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PopulationMeasures {
    pub kendall: f64,
    pub spearman: f64,
    pub gini: f64,
    pub blomqvist: f64,
}

/// Kendall, Spearman, Gini and Blomqvist of a bivariate copula:
/// `τ = 1 − 4∫∫ ∂₁C ∂₂C`, `ρ_S = 12∫∫ C − 3`,
/// `γ = 4[∫ C(u, 1−u) − ∫ (u − C(u, u))]`, `β = 4C(½, ½) − 1`.
///
/// Only exchangeable copulas are supported, so `∂₂C(u, v) = ∂₁C(v, u)`.
pub fn population_measures_2d(copula: &Copula, q: &QuadratureSpec) -> Result<PopulationMeasures> {
    if copula.dim() != 2 {
        return Err(Error::DimensionUnsupported { dim: copula.dim(), supported: "2" });
    }
    match copula.kind() {
        CopulaKind::Independent { .. } => {
            return Ok(PopulationMeasures { kendall: 0.0, spearman: 0.0, gini: 0.0, blomqvist: 0.0 })
        }
        CopulaKind::Comonotone { .. } => {
            return Ok(PopulationMeasures { kendall: 1.0, spearman: 1.0, gini: 1.0, blomqvist: 1.0 })
        }
        _ => {}
    }
    let half = UnitPoint::new(0.5);
    if copula.conditional_cdf(half, half).is_none() {
        return Err(Error::UnsupportedModel("copula has no conditional distribution".into()));
    }
    let cdf = |u: &[UnitPoint]| copula.cdf(u).expect("bivariate copula CDF");
    let kendall_int = integrate(q, &[AxisRange::Full; 2], |u| {
        let a = copula.conditional_cdf(u[0], u[1]).expect("checked above");
        let b = copula.conditional_cdf(u[1], u[0]).expect("checked above");
        a * b
    })?;
    let spearman_int = integrate(q, &[AxisRange::Full; 2], cdf)?;
    let gini_int = integrate(q, &[AxisRange::Full], |u| {
        let anti = cdf(&[u[0], UnitPoint { p: u[0].q, q: u[0].p }]);
        let diag = u[0].p - cdf(&[u[0], u[0]]);
        anti - diag
    })?;
    let clamp = |x: f64| x.clamp(-1.0, 1.0);
    Ok(PopulationMeasures {
        kendall: clamp(1.0 - 4.0 * kendall_int.value),
        spearman: clamp(12.0 * spearman_int.value - 3.0),
        gini: clamp(4.0 * gini_int.value),
        blomqvist: clamp(4.0 * cdf(&[half, half]) - 1.0),
    })
}

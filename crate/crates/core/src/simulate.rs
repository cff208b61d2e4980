//! Seeded samplers for the parametric joint models.
//!
//! Rows are generated in blocks of [`ROWS_PER_STREAM`]; block `b` draws from
//! stream `b` of the seed, so output does not depend on the thread count.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Copula, CopulaKind, CopulaModel, GaussianJoint, JointModel, SampleMatrix, UnitPoint};
use crate::rng::{stream_blocks, StreamRng, ROWS_PER_STREAM};
use crate::special::{normal_cdf, normal_sf};

/// Samples `n` rows of `model` with the given seed.
pub fn sample(model: &JointModel, n: usize, seed: u64) -> Result<SampleMatrix> {
    sample_with_proposals(model, n, seed).map(|(s, _)| s)
}

/// Like [`sample`], also returning the number of candidate rows drawn
/// (larger than `n` only for rejection samplers).
pub fn sample_with_proposals(model: &JointModel, n: usize, seed: u64) -> Result<(SampleMatrix, u64)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("sample size must be at least 2, got {n}")));
    }
    let m = model.dim();
    let blocks = stream_blocks(n);
    let generated: Vec<(Vec<f64>, u64)> = match model {
        JointModel::ParetoII3(_) => {
            return Err(Error::ModelNotSamplable("no sampler for the trivariate Pareto II law".into()))
        }
        JointModel::Copula(cm) => blocks
            .par_iter()
            .map(|&(stream, start, end)| copula_block(cm, end - start, &mut StreamRng::new(seed, stream)))
            .collect(),
        JointModel::Gaussian(g) => blocks
            .par_iter()
            .map(|&(stream, start, end)| {
                (gaussian_block(g, end - start, &mut StreamRng::new(seed, stream)), (end - start) as u64)
            })
            .collect(),
    };
    let mut data = Vec::with_capacity(n * m);
    let mut proposals = 0;
    for (block, count) in generated {
        data.extend(block);
        proposals += count;
    }
    debug_assert!(blocks.iter().all(|&(_, s, e)| e - s <= ROWS_PER_STREAM));
    Ok((SampleMatrix::from_row_major(n, m, data)?, proposals))
}

fn copula_block(cm: &CopulaModel, rows: usize, rng: &mut StreamRng) -> (Vec<f64>, u64) {
    let m = cm.marginals().len();
    let mut out = Vec::with_capacity(rows * m);
    let mut u = vec![UnitPoint::new(0.5); m];
    let mut proposals = 0u64;
    for _ in 0..rows {
        proposals += copula_uniforms(cm.copula(), rng, &mut u);
        out.extend(cm.marginals().iter().zip(&u).map(|(mg, &ui)| mg.quantile_at(ui)));
    }
    (out, proposals)
}

/// Fills `u` with one draw from the copula; returns the number of proposals.
fn copula_uniforms(copula: &Copula, rng: &mut StreamRng, u: &mut [UnitPoint]) -> u64 {
    match copula.kind() {
        CopulaKind::Independent { .. } => {
            for ui in u.iter_mut() {
                *ui = rng.open01();
            }
            1
        }
        CopulaKind::Comonotone { .. } => {
            let v = rng.open01();
            u.fill(v);
            1
        }
        CopulaKind::Fgm2 { alpha } => {
            let u1 = rng.open01();
            let w = rng.open01();
            u[0] = u1;
            u[1] = fgm_conditional_inverse(*alpha, u1, w.p);
            1
        }
        CopulaKind::Egm3 { a12, a13, a23, a123 } => {
            let envelope = 1.0 + a12.abs() + a13.abs() + a23.abs() + a123.abs();
            let mut proposals = 0;
            loop {
                proposals += 1;
                for ui in u.iter_mut() {
                    *ui = rng.open01();
                }
                let t = rng.open01().p;
                let density = copula.density(u).expect("EGM density");
                if envelope * t < density {
                    return proposals;
                }
            }
        }
        CopulaKind::Gaussian(g) => {
            let z = correlated_normals(g.factor(), rng);
            for (ui, zi) in u.iter_mut().zip(z) {
                *ui = UnitPoint { p: normal_cdf(zi), q: normal_sf(zi) };
            }
            1
        }
    }
}

/// Solves `∂C/∂u₁ (u₁, v) = w` for the FGM copula:
/// `a v² − (1 + a) v + w = 0` with `a = α(1 − 2u₁)`.
pub fn fgm_conditional_inverse(alpha: f64, u1: UnitPoint, w: f64) -> UnitPoint {
    let a = alpha * u1.centered();
    let b = 1.0 + a;
    let root_disc = (b * b - 4.0 * a * w).max(0.0).sqrt();
    // the root in [0, 1], written to avoid cancellation; equals w when a = 0
    let v = 2.0 * w / (b + root_disc);
    if a != 0.0 {
        let other = (b + root_disc) / (2.0 * a);
        assert!(!(0.0..1.0).contains(&other) || other == v, "FGM inversion found two roots in [0, 1)");
    }
    let v = v.clamp(0.0, 1.0);
    UnitPoint { p: v, q: 1.0 - v }
}

fn correlated_normals(factor: &nalgebra::DMatrix<f64>, rng: &mut StreamRng) -> Vec<f64> {
    let m = factor.nrows();
    let eps: Vec<f64> = (0..factor.ncols()).map(|_| StandardNormal.sample(rng)).collect();
    (0..m).map(|i| (0..eps.len()).map(|k| factor[(i, k)] * eps[k]).sum()).collect()
}

fn gaussian_block(g: &GaussianJoint, rows: usize, rng: &mut StreamRng) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows * g.dim());
    for _ in 0..rows {
        let z = correlated_normals(g.factor(), rng);
        out.extend(z.iter().zip(g.mean().iter()).map(|(zi, mu)| mu + zi));
    }
    out
}

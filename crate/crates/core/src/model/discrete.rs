//! Finitely supported joint laws.

use crate::error::{Error, Result};
use crate::special::fsum;

use super::sample::SampleMatrix;

/// A joint law on finitely many distinct points.
///
/// Point `i` has probability `masses[i] / total`. Laws built from a sample
/// keep integer multiplicities as masses so that sums over them are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteJoint {
    dim: usize,
    points: Vec<Vec<f64>>,
    masses: Vec<f64>,
    total: f64,
}

impl DiscreteJoint {
    pub fn new(support: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let dim = support.first().map(|(x, _)| x.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::InvalidParameter("discrete law needs a nonempty support of nonempty points".into()));
        }
        for (x, p) in &support {
            if x.len() != dim {
                return Err(Error::InvalidParameter("support points differ in dimension".into()));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!("support point {x:?} is not finite")));
            }
            if !(*p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidParameter(format!("probability {p} must be positive")));
            }
        }
        let total = fsum(support.iter().map(|(_, p)| *p));
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("probabilities sum to {total}, not 1")));
        }
        let mut keys: Vec<&Vec<f64>> = support.iter().map(|(x, _)| x).collect();
        keys.sort_by(|a, b| lex_cmp(a, b));
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("support points must be distinct".into()));
        }
        let (points, masses) = support.into_iter().unzip();
        Ok(DiscreteJoint { dim, points, masses, total: 1.0 })
    }

    /// Equally weighted points, e.g. `[(0,1), (1,0), (0,-1)]`.
    pub fn uniform(points: Vec<Vec<f64>>) -> Result<Self> {
        let p = 1.0 / points.len() as f64;
        Self::new(points.into_iter().map(|x| (x, p)).collect())
    }

    /// Empirical law of the rows of `sample`; repeated rows are merged.
    pub fn from_sample(sample: &SampleMatrix) -> Self {
        let n = sample.nrows();
        let mut rows: Vec<&[f64]> = sample.rows().collect();
        rows.sort_by(|a, b| lex_cmp(a, b));
        let mut support: Vec<(Vec<f64>, usize)> = Vec::new();
        for r in rows {
            match support.last_mut() {
                Some((x, c)) if x.as_slice() == r => *c += 1,
                _ => support.push((r.to_vec(), 1)),
            }
        }
        let (points, masses) = support.into_iter().map(|(x, c)| (x, c as f64)).unzip();
        DiscreteJoint { dim: sample.ncols(), points, masses, total: n as f64 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Support points with their probabilities.
    pub fn support(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.weighted_support().map(|(x, w)| (x, w / self.total))
    }

    /// Support points with their unnormalized masses; see [`Self::total_mass`].
    pub fn weighted_support(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.points.iter().map(|x| x.as_slice()).zip(self.masses.iter().copied())
    }

    pub fn total_mass(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Marginal `j` as ascending `(value, mass)` atoms.
    pub fn marginal_atoms(&self, j: usize) -> Vec<(f64, f64)> {
        let mut atoms: Vec<(f64, f64)> = self.weighted_support().map(|(x, w)| (x[j], w)).collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            match merged.last_mut() {
                Some((w, q)) if *w == v => *q += p,
                _ => merged.push((v, p)),
            }
        }
        merged
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
}

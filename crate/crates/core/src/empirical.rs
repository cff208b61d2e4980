//! Sample estimators of the dependence measures.
//!
//! All sums go through [`fsum`] and all row products through
//! [`canonical_product`], so the estimators are exactly invariant under row
//! and column permutations and under negating every entry.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::SampleMatrix;
use crate::special::{canonical_product, fsum};

/// Relative threshold below which a denominator counts as zero.
pub const DEGENERACY_RTOL: f64 = 1e-12;

/// Column-wise ascending order statistics of a sample: a sample of the
/// comonotone vector with the same empirical marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct ComonotoneRearrangement {
    sorted: SampleMatrix,
}

impl ComonotoneRearrangement {
    pub fn sorted(&self) -> &SampleMatrix {
        &self.sorted
    }

    pub fn into_sorted(self) -> SampleMatrix {
        self.sorted
    }
}

pub fn comonotonic_rearrangement(sample: &SampleMatrix) -> ComonotoneRearrangement {
    let (n, m) = (sample.nrows(), sample.ncols());
    let mut data = vec![0.0; n * m];
    for j in 0..m {
        let mut col = sample.column(j);
        col.sort_by(f64::total_cmp);
        for (i, v) in col.into_iter().enumerate() {
            data[i * m + j] = v;
        }
    }
    let mut sorted = SampleMatrix::from_row_major(n, m, data).expect("rearrangement of a valid sample");
    if let Some(names) = sample.names() {
        sorted = sorted.with_names(names.to_vec()).expect("same column count");
    }
    ComonotoneRearrangement { sorted }
}

/// Numerator and denominator of a ratio estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioParts {
    pub numerator: f64,
    pub denominator: f64,
}

impl RatioParts {
    /// `numerator / denominator`, or `DegenerateDenominator` when
    /// `|den| < 1e-12 · max(|num|, scale)`.
    pub fn ratio(&self, scale: f64) -> Result<f64> {
        let threshold = DEGENERACY_RTOL * self.numerator.abs().max(scale);
        if !(self.denominator.abs() >= threshold) || self.denominator == 0.0 {
            return Err(Error::DegenerateDenominator { numerator: self.numerator, denominator: self.denominator });
        }
        Ok(self.numerator / self.denominator)
    }
}

fn require_nondegenerate(sample: &SampleMatrix) -> Result<()> {
    if let Some(j) = sample.degenerate_columns().iter().position(|&d| d) {
        return Err(Error::DegenerateData(format!("column {} is constant", j + 1)));
    }
    Ok(())
}

fn range_product(sample: &SampleMatrix) -> f64 {
    let (lo, hi) = (sample.column_min(), sample.column_max());
    let mut ranges: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| b - a).collect();
    canonical_product(&mut ranges)
}

fn mean_of_row_products(sample: &SampleMatrix, shift: Option<&[f64]>) -> f64 {
    let mut buf = vec![0.0; sample.ncols()];
    let products = sample.rows().map(|r| {
        for (j, b) in buf.iter_mut().enumerate() {
            *b = match shift {
                Some(s) => r[j] - s[j],
                None => r[j],
            };
        }
        canonical_product(&mut buf)
    });
    fsum(products.collect::<Vec<_>>()) / sample.nrows() as f64
}

fn column_means(sample: &SampleMatrix) -> Vec<f64> {
    let n = sample.nrows() as f64;
    (0..sample.ncols()).map(|j| fsum(sample.column(j)) / n).collect()
}

/// Moment estimator: sample product moment, product of sample means and the
/// product moment of the column-sorted sample.
pub fn rho_hat_general_parts(sample: &SampleMatrix) -> RatioParts {
    let product_moment = mean_of_row_products(sample, None);
    let comonotone_moment = mean_of_row_products(comonotonic_rearrangement(sample).sorted(), None);
    let mut means = column_means(sample);
    let independent = canonical_product(&mut means);
    RatioParts { numerator: product_moment - independent, denominator: comonotone_moment - independent }
}

pub fn rho_hat_general(sample: &SampleMatrix) -> Result<f64> {
    require_nondegenerate(sample)?;
    rho_hat_general_parts(sample).ratio(range_product(sample))
}

/// Plug-in of the empirical tail functions into the tail-integral form,
/// integrating from the column minima.
pub fn rho_hat_nonneg_parts(sample: &SampleMatrix) -> RatioParts {
    let n = sample.nrows() as f64;
    let mins = sample.column_min();
    let product_moment = mean_of_row_products(sample, Some(&mins));
    let comonotone_moment = mean_of_row_products(comonotonic_rearrangement(sample).sorted(), Some(&mins));
    let mut centered_sums: Vec<f64> =
        (0..sample.ncols()).map(|j| fsum(sample.column(j).into_iter().chain([-n * mins[j]])) / n).collect();
    let independent = canonical_product(&mut centered_sums);
    RatioParts { numerator: product_moment - independent, denominator: comonotone_moment - independent }
}

pub fn rho_hat_nonneg(sample: &SampleMatrix) -> Result<f64> {
    require_nondegenerate(sample)?;
    rho_hat_nonneg_parts(sample).ratio(range_product(sample))
}

fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (fsum(a.iter().copied()) / n, fsum(b.iter().copied()) / n);
    fsum(a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).collect::<Vec<_>>()) / n
}

fn pairwise_covariance_sum(sample: &SampleMatrix) -> f64 {
    let cols: Vec<Vec<f64>> = (0..sample.ncols()).map(|j| sample.column(j)).collect();
    let mut terms = Vec::new();
    for i in 0..cols.len() {
        for j in 0..i {
            terms.push(covariance(&cols[i], &cols[j]));
        }
    }
    fsum(terms)
}

/// Sum of pairwise sample covariances over the same sum for the
/// column-sorted sample (1/n normalization).
pub fn rho_c_hat(sample: &SampleMatrix) -> Result<f64> {
    require_nondegenerate(sample)?;
    let parts = RatioParts {
        numerator: pairwise_covariance_sum(sample),
        denominator: pairwise_covariance_sum(comonotonic_rearrangement(sample).sorted()),
    };
    let (lo, hi) = (sample.column_min(), sample.column_max());
    let mut scale = 0.0;
    for i in 0..sample.ncols() {
        for j in 0..i {
            scale += (hi[i] - lo[i]) * (hi[j] - lo[j]);
        }
    }
    parts.ratio(scale)
}

/// `(1/n) Σ_i ∏_j I(Y_ij > x_j)`.
pub fn empirical_tail(sample: &SampleMatrix, x: &[f64]) -> f64 {
    assert_eq!(x.len(), sample.ncols(), "point dimension must match the sample");
    let hits = sample.rows().filter(|r| r.iter().zip(x).all(|(y, t)| y > t)).count();
    hits as f64 / sample.nrows() as f64
}

/// Exact integrals of empirical step functions over the sample bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxIntegrals {
    /// `∫ (F̂ − ∏ F̂_j)`
    pub cdf_gap: f64,
    /// `∫ (min_j F̂_j − ∏ F̂_j)`
    pub comonotone_cdf_gap: f64,
    /// `∫ (F̄̂ − ∏ F̄̂_j)`
    pub tail_gap: f64,
    /// `∫ (min_j F̄̂_j − ∏ F̄̂_j)`
    pub comonotone_tail_gap: f64,
}

/// Largest sample size accepted by [`box_integrals`].
pub const MAX_BOX_ROWS: usize = 5000;

struct Axis {
    ranks: Vec<usize>,
    widths: Vec<f64>,
    /// `#{i : rank_i <= k}` for each cell `k`
    below: Vec<usize>,
}

fn axis(values: &[f64]) -> Axis {
    let mut distinct = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let ranks: Vec<usize> =
        values.iter().map(|v| distinct.binary_search_by(|d| d.total_cmp(v)).expect("value present")).collect();
    let widths: Vec<f64> = distinct.windows(2).map(|w| w[1] - w[0]).collect();
    let mut counts = vec![0usize; distinct.len()];
    for &r in &ranks {
        counts[r] += 1;
    }
    let below = counts
        .iter()
        .scan(0usize, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .take(widths.len())
        .collect();
    Axis { ranks, widths, below }
}

#[derive(Default)]
struct Acc {
    sum: f64,
    comp: f64,
}

impl Acc {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Default)]
struct BoxAcc {
    cdf: Acc,
    cdf_com: Acc,
    tail: Acc,
    tail_com: Acc,
}

impl BoxAcc {
    /// Adds one cell: `marg` holds the marginal CDF values at the cell.
    fn add(&mut self, vol: f64, joint_below: f64, joint_above: f64, marg: &[f64]) {
        let mut prod_f = 1.0;
        let mut prod_t = 1.0;
        let mut min_f = 1.0f64;
        let mut min_t = 1.0f64;
        for &f in marg {
            prod_f *= f;
            prod_t *= 1.0 - f;
            min_f = min_f.min(f);
            min_t = min_t.min(1.0 - f);
        }
        self.cdf.add(vol * (joint_below - prod_f));
        self.cdf_com.add(vol * (min_f - prod_f));
        self.tail.add(vol * (joint_above - prod_t));
        self.tail_com.add(vol * (min_t - prod_t));
    }
}

/// Integrates the empirical joint CDF, joint tail and their independent and
/// comonotone counterparts over the bounding box of the sample.
///
/// Each axis is cut at the distinct order statistics; every step function is
/// constant on a cell and equal to its value at the cell's lower corner.
/// Joint counts come from cumulative count tables on the rank grid.
pub fn box_integrals(sample: &SampleMatrix) -> Result<BoxIntegrals> {
    let (n, m) = (sample.nrows(), sample.ncols());
    if !(2..=3).contains(&m) {
        return Err(Error::DimensionUnsupported { dim: m, supported: "2 or 3" });
    }
    if n > MAX_BOX_ROWS {
        return Err(Error::InvalidParameter(format!(
            "exact step-function integration is limited to {MAX_BOX_ROWS} rows, got {n}"
        )));
    }
    let nf = n as f64;
    let axes: Vec<Axis> = (0..m).map(|j| axis(&sample.column(j))).collect();
    let mut acc = BoxAcc::default();
    match m {
        2 => {
            let (a, b) = (&axes[0], &axes[1]);
            let (k1, k2) = (a.widths.len() + 1, b.widths.len() + 1);
            // hist[r1][r2]
            let mut hist = vec![0u32; k1 * k2];
            for i in 0..n {
                hist[a.ranks[i] * k2 + b.ranks[i]] += 1;
            }
            let below = prefix_2d(&hist, k1, k2);
            for c1 in 0..a.widths.len() {
                for c2 in 0..b.widths.len() {
                    let cnt_below = below[c1 * k2 + c2] as usize;
                    // rows with r1 > c1 and r2 > c2, by inclusion-exclusion
                    let cnt_above = n + cnt_below - a.below[c1] - b.below[c2];
                    let vol = a.widths[c1] * b.widths[c2];
                    let marg = [a.below[c1] as f64 / nf, b.below[c2] as f64 / nf];
                    acc.add(vol, cnt_below as f64 / nf, cnt_above as f64 / nf, &marg);
                }
            }
        }
        _ => {
            let (a, b, c) = (&axes[0], &axes[1], &axes[2]);
            let (k2, k3) = (b.widths.len() + 1, c.widths.len() + 1);
            let mut by_first: Vec<Vec<usize>> = vec![Vec::new(); a.widths.len() + 1];
            for i in 0..n {
                by_first[a.ranks[i]].push(i);
            }
            let mut lower = vec![0u32; k2 * k3];
            let mut upper = vec![0u32; k2 * k3];
            for i in 0..n {
                upper[b.ranks[i] * k3 + c.ranks[i]] += 1;
            }
            for (c1, rows) in by_first.iter().take(a.widths.len()).enumerate() {
                for &i in rows {
                    let cell = b.ranks[i] * k3 + c.ranks[i];
                    lower[cell] += 1;
                    upper[cell] -= 1;
                }
                let below = prefix_2d(&lower, k2, k3);
                let above = suffix_2d(&upper, k2, k3);
                for c2 in 0..b.widths.len() {
                    for c3 in 0..c.widths.len() {
                        let cnt_below = below[c2 * k3 + c3];
                        let cnt_above = above[(c2 + 1) * (k3 + 1) + (c3 + 1)];
                        let vol = a.widths[c1] * b.widths[c2] * c.widths[c3];
                        let marg = [a.below[c1] as f64 / nf, b.below[c2] as f64 / nf, c.below[c3] as f64 / nf];
                        acc.add(vol, cnt_below as f64 / nf, cnt_above as f64 / nf, &marg);
                    }
                }
            }
        }
    }
    Ok(BoxIntegrals {
        cdf_gap: acc.cdf.value(),
        comonotone_cdf_gap: acc.cdf_com.value(),
        tail_gap: acc.tail.value(),
        comonotone_tail_gap: acc.tail_com.value(),
    })
}

/// `out[r][c] = Σ_{r' <= r, c' <= c} h[r'][c']`
fn prefix_2d(h: &[u32], rows: usize, cols: usize) -> Vec<u32> {
    let mut out = vec![0u32; rows * cols];
    for r in 0..rows {
        let mut run = 0u32;
        for c in 0..cols {
            run += h[r * cols + c];
            out[r * cols + c] = run + if r > 0 { out[(r - 1) * cols + c] } else { 0 };
        }
    }
    out
}

/// `out[r][c] = Σ_{r' >= r, c' >= c} h[r'][c']`, padded to `(rows+1)×(cols+1)`.
fn suffix_2d(h: &[u32], rows: usize, cols: usize) -> Vec<u32> {
    let w = cols + 1;
    let mut out = vec![0u32; (rows + 1) * w];
    for r in (0..rows).rev() {
        let mut run = 0u32;
        for c in (0..cols).rev() {
            run += h[r * cols + c];
            out[r * w + c] = run + out[(r + 1) * w + c];
        }
    }
    out
}

/// Koch–Schepper comonotonicity coefficient with empirical CDFs, integrated
/// exactly over the sample bounding box.
pub fn kappa_hat(sample: &SampleMatrix) -> Result<f64> {
    require_nondegenerate(sample)?;
    let b = box_integrals(sample)?;
    RatioParts { numerator: b.cdf_gap, denominator: b.comonotone_cdf_gap }.ratio(range_product(sample))
}

/// Midranks (1-based; ties get the average of their positions).
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

pub fn pearson_hat(x: &[f64], y: &[f64]) -> Result<f64> {
    let parts = RatioParts { numerator: covariance(x, y), denominator: (covariance(x, x) * covariance(y, y)).sqrt() };
    if parts.denominator == 0.0 {
        return Err(Error::DegenerateDenominator { numerator: parts.numerator, denominator: 0.0 });
    }
    Ok(parts.ratio(0.0)?.clamp(-1.0, 1.0))
}

/// Kendall's tau-a: `(concordant − discordant) / (n choose 2)`.
pub fn kendall_hat(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut score: i64 = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let s = (x[i] - x[j]).signum() * (y[i] - y[j]).signum();
            if (x[i] - x[j]) != 0.0 && (y[i] - y[j]) != 0.0 {
                score += s as i64;
            }
        }
    }
    score as f64 / (n * (n - 1) / 2) as f64
}

pub fn spearman_hat(x: &[f64], y: &[f64]) -> Result<f64> {
    pearson_hat(&midranks(x), &midranks(y))
}

/// Gini's rank association: `(Σ|r+s−n−1| − Σ|r−s|) / ⌊n²/2⌋` on midranks.
pub fn gini_hat(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let (r, s) = (midranks(x), midranks(y));
    let nf = n as f64;
    let sum = fsum(r.iter().zip(&s).map(|(a, b)| (a + b - nf - 1.0).abs() - (a - b).abs()).collect::<Vec<_>>());
    (sum / ((n * n / 2) as f64)).clamp(-1.0, 1.0)
}

/// Blomqvist's medial coefficient `2·N / ⌈n/2⌉ − 1`, where `N` counts rows
/// at or below both columns' ⌈n/2⌉-th order statistics.
pub fn blomqvist_hat(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let half = n.div_ceil(2);
    let median = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(f64::total_cmp);
        s[half - 1]
    };
    let (mx, my) = (median(x), median(y));
    let count = x.iter().zip(y).filter(|(a, b)| **a <= mx && **b <= my).count();
    (2.0 * count as f64 / half as f64 - 1.0).clamp(-1.0, 1.0)
}

/// The classical bivariate measures on one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassicalMeasures {
    pub pearson: f64,
    pub kendall: f64,
    pub spearman: f64,
    pub gini: f64,
    pub blomqvist: f64,
}

pub fn classical_hat(sample: &SampleMatrix) -> Result<ClassicalMeasures> {
    if sample.ncols() != 2 {
        return Err(Error::DimensionUnsupported { dim: sample.ncols(), supported: "2" });
    }
    let (x, y) = (sample.column(0), sample.column(1));
    Ok(ClassicalMeasures {
        pearson: pearson_hat(&x, &y)?,
        kendall: kendall_hat(&x, &y),
        spearman: spearman_hat(&x, &y)?,
        gini: gini_hat(&x, &y),
        blomqvist: blomqvist_hat(&x, &y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(rows: &[&[f64]]) -> SampleMatrix {
        SampleMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn rearrangement_examples() {
        let r = comonotonic_rearrangement(&s(&[&[3.0, 1.0], &[1.0, 2.0], &[2.0, 3.0]]));
        assert_eq!(r.sorted().data(), &[1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        let sorted = s(&[&[1.0, 4.0], &[2.0, 5.0], &[3.0, 6.0]]);
        assert_eq!(comonotonic_rearrangement(&sorted).sorted(), &sorted);
        let r = comonotonic_rearrangement(&s(&[&[1.0, 5.0], &[1.0, 4.0]]));
        assert_eq!(r.sorted().data(), &[1.0, 4.0, 1.0, 5.0]);
    }

    #[test]
    fn rho_hat_general_examples() {
        assert_eq!(rho_hat_general(&s(&[&[1.0, 2.0], &[2.0, 1.0]])).unwrap(), -1.0);
        let same = s(&[&[0.3, 0.3, 0.3], &[2.0, 2.0, 2.0], &[-1.0, -1.0, -1.0]]);
        assert_eq!(rho_hat_general(&same).unwrap(), 1.0);
        let three_point = s(&[&[0.0, 1.0], &[1.0, 0.0], &[0.0, -1.0]]);
        assert_eq!(rho_hat_general(&three_point).unwrap(), 0.0);
        let parts = rho_hat_general_parts(&three_point);
        assert!((parts.denominator - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rho_hat_nonneg_examples() {
        let y = s(&[&[1.0, 2.0], &[2.0, 1.0]]);
        let p = rho_hat_nonneg_parts(&y);
        assert_eq!((p.numerator, p.denominator), (-0.25, 0.25));
        assert_eq!(rho_hat_nonneg(&y).unwrap(), -1.0);
        let sorted = s(&[&[0.0, 1.0], &[1.0, 1.5], &[4.0, 2.0]]);
        assert_eq!(rho_hat_nonneg(&sorted).unwrap(), 1.0);
    }

    #[test]
    fn rho_c_hat_examples() {
        assert_eq!(rho_c_hat(&s(&[&[1.0, 3.0], &[2.0, 2.0], &[3.0, 1.0]])).unwrap(), -1.0);
        assert_eq!(rho_c_hat(&s(&[&[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0], &[5.0, 5.0, 5.0]])).unwrap(), 1.0);
    }

    #[test]
    fn degenerate_inputs_raise() {
        let constant = s(&[&[1.0, 2.0], &[1.0, 3.0], &[1.0, 1.0]]);
        assert!(matches!(rho_hat_general(&constant), Err(Error::DegenerateData(_))));
        assert!(matches!(rho_hat_nonneg(&constant), Err(Error::DegenerateData(_))));
        assert!(matches!(kappa_hat(&constant), Err(Error::DegenerateData(_))));
        let c = classical_hat(&constant);
        assert!(matches!(c, Err(Error::DegenerateDenominator { .. })));
    }

    #[test]
    fn empirical_tail_examples() {
        let y = s(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert_eq!(empirical_tail(&y, &[0.0, 0.0]), 1.0);
        assert_eq!(empirical_tail(&y, &[5.0, 5.0]), 0.0);
        assert_eq!(empirical_tail(&y, &[1.0, 0.0]), 0.5);
    }

    #[test]
    fn classical_examples() {
        let sorted = s(&[&[1.0, 10.0], &[2.0, 20.0], &[3.0, 25.0], &[4.0, 40.0], &[5.0, 41.0]]);
        let c = classical_hat(&sorted).unwrap();
        assert_eq!((c.kendall, c.spearman, c.gini, c.blomqvist), (1.0, 1.0, 1.0, 1.0));
        let anti = s(&[&[1.0, 2.0], &[2.0, 1.0]]);
        let c = classical_hat(&anti).unwrap();
        assert_eq!(c.kendall, -1.0);
        assert_eq!(c.gini, -1.0);
        assert_eq!(c.blomqvist, -1.0);
        assert!(matches!(
            classical_hat(&s(&[&[1.0, 2.0, 3.0], &[2.0, 1.0, 0.0]])),
            Err(Error::DimensionUnsupported { .. })
        ));
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn kappa_hat_on_sorted_sample_is_one() {
        let sorted = s(&[&[0.0, 1.0, 2.0], &[1.0, 1.5, 2.5], &[4.0, 2.0, 7.0], &[5.0, 3.0, 9.0]]);
        assert!((kappa_hat(&sorted).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn box_integrals_of_two_point_sample() {
        // rows (0,1) and (1,0): one cell [0,1]x[0,1], F̂ = 0, F̂_j = 1/2
        let y = s(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let b = box_integrals(&y).unwrap();
        assert_eq!(b.cdf_gap, -0.25);
        assert_eq!(b.comonotone_cdf_gap, 0.25);
        assert_eq!(b.tail_gap, -0.25);
        assert!(matches!(
            box_integrals(&s(&[&[1.0, 2.0, 3.0, 4.0], &[2.0, 1.0, 0.0, 3.0]])),
            Err(Error::DimensionUnsupported { .. })
        ));
    }

    #[test]
    fn mixed_sign_trivariate_estimate_can_exceed_one() {
        // E∏ = 5, ∏E = 0, sorted E∏ = 4
        let v = rho_hat_general(&s(&[&[1.0, 2.0, 1.0], &[2.0, -2.0, -2.0]])).unwrap();
        assert!((v - 1.25).abs() < 1e-15);
    }
}

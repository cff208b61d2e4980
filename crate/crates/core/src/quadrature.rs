//! Tensor-product quadrature on the unit cube.
//!
//! Every node carries its coordinate `p` together with the complement
//! `q = 1 - p` computed independently, so integrands with endpoint
//! singularities (quantile functions of unbounded marginals) can be evaluated
//! without cancellation next to `p = 1`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::fsum;

/// A coordinate in the open unit interval together with its complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPoint {
    pub p: f64,
    pub q: f64,
}

impl UnitPoint {
    pub fn new(p: f64) -> Self {
        UnitPoint { p, q: 1.0 - p }
    }

    pub fn from_complement(q: f64) -> Self {
        UnitPoint { p: 1.0 - q, q }
    }

    /// `1 - 2p`, accurate near both endpoints.
    pub fn centered(&self) -> f64 {
        self.q - self.p
    }
}

/// A quadrature node on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x: f64,
    pub xc: f64,
    pub w: f64,
}

impl Node {
    pub fn point(&self) -> UnitPoint {
        UnitPoint { p: self.x, q: self.xc }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    GaussLegendre,
    TanhSinh,
}

/// Quadrature configuration shared by every integral evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    scheme: Scheme,
    nodes: usize,
    truncation: f64,
    tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { scheme: Scheme::TanhSinh, nodes: 16, truncation: 1e-6, tolerance: 1e-10 }
    }
}

impl QuadratureSpec {
    pub fn new(scheme: Scheme, nodes: usize, truncation: f64, tolerance: f64) -> Result<Self> {
        if nodes < 8 {
            return Err(Error::InvalidParameter(format!("quadrature needs at least 8 nodes per axis, got {nodes}")));
        }
        if !(truncation > 0.0 && truncation < 0.5) {
            return Err(Error::InvalidParameter(format!("truncation quantile {truncation} outside (0, 0.5)")));
        }
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance {tolerance} must be positive")));
        }
        Ok(QuadratureSpec { scheme, nodes, truncation, tolerance })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance {tolerance} must be positive")));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
    pub fn nodes(&self) -> usize {
        self.nodes
    }
    pub fn truncation(&self) -> f64 {
        self.truncation
    }
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Node set on [0, 1] at refinement `level`; each level doubles the density.
    pub fn rule(&self, level: u32) -> Vec<Node> {
        match self.scheme {
            Scheme::GaussLegendre => gauss_legendre(self.nodes << level),
            Scheme::TanhSinh => {
                let half = ((self.nodes - 1) / 2).max(1) as f64;
                tanh_sinh(TANH_SINH_RANGE / half / f64::from(1u32 << level), TANH_SINH_RANGE)
            }
        }
    }
}

/// Value of an integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// Nodes per axis of the finest rule used.
    pub nodes: usize,
}

const TANH_SINH_RANGE: f64 = 5.0;

/// Gauss–Legendre rule with `n` nodes mapped to [0, 1].
pub fn gauss_legendre(n: usize) -> Vec<Node> {
    let mut nodes = vec![Node { x: 0.0, xc: 0.0, w: 0.0 }; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        let w = 1.0 / ((1.0 - t * t) * dp * dp);
        // t is the i-th largest root; node pairs are mirror images.
        nodes[n - 1 - i] = Node { x: 0.5 * (1.0 + t), xc: 0.5 * (1.0 - t), w };
        nodes[i] = Node { x: 0.5 * (1.0 - t), xc: 0.5 * (1.0 + t), w };
    }
    nodes
}

/// Tanh–sinh rule on [0, 1] with step `h`, truncated at |t| <= `range`.
pub fn tanh_sinh(h: f64, range: f64) -> Vec<Node> {
    let k_max = (range / h).floor() as i64;
    let half_pi = std::f64::consts::FRAC_PI_2;
    (-k_max..=k_max)
        .filter_map(|k| {
            let t = k as f64 * h;
            let s = half_pi * t.sinh();
            let x = 1.0 / (1.0 + (-2.0 * s).exp());
            let xc = 1.0 / (1.0 + (2.0 * s).exp());
            let w = h * half_pi * t.cosh() * 2.0 * x * xc;
            (x > 0.0 && xc > 0.0 && w > 0.0).then_some(Node { x, xc, w })
        })
        .collect()
}

/// Per-axis integration range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisRange {
    /// The open unit interval.
    Full,
    /// An axis whose integrand is unbounded near the endpoints; Gauss–Legendre
    /// integrates it over [ε, 1 − ε] only.
    Unbounded,
}

fn map_rule(rule: &[Node], lo: f64, hi_c: f64) -> Vec<Node> {
    // maps [0,1] onto [lo, 1 - hi_c]
    let len = 1.0 - lo - hi_c;
    rule.iter().map(|n| Node { x: lo + len * n.x, xc: hi_c + len * n.xc, w: len * n.w }).collect()
}

fn tensor_sum<F>(axes: &[Vec<Node>], f: &F) -> f64
where
    F: Fn(&[UnitPoint]) -> f64 + Sync,
{
    let dim = axes.len();
    let partials: Vec<f64> = axes[0]
        .par_iter()
        .map(|first| {
            let mut idx = vec![0usize; dim];
            let mut pts = vec![first.point(); dim];
            let mut acc = 0.0;
            let mut comp = 0.0;
            'outer: loop {
                let mut w = first.w;
                for d in 1..dim {
                    let node = axes[d][idx[d]];
                    pts[d] = node.point();
                    w *= node.w;
                }
                let term = w * f(&pts);
                // Kahan-Babuska accumulation
                let t = acc + term;
                if acc.abs() >= term.abs() {
                    comp += (acc - t) + term;
                } else {
                    comp += (term - t) + acc;
                }
                acc = t;
                let mut d = dim;
                loop {
                    if d <= 1 {
                        break 'outer;
                    }
                    d -= 1;
                    idx[d] += 1;
                    if idx[d] < axes[d].len() {
                        break;
                    }
                    idx[d] = 0;
                }
            }
            acc + comp
        })
        .collect();
    fsum(partials)
}

const MAX_EVALUATIONS: f64 = 6.0e7;
const MAX_NODES_PER_AXIS: usize = 8192;

/// Integrates `f` over the unit cube of dimension `ranges.len()`.
///
/// The rule is refined by node doubling until two successive levels agree
/// within the spec's tolerance. For Gauss–Legendre, axes flagged
/// [`AxisRange::Unbounded`] are truncated at ε and the estimate at ε/2 is
/// compared against the one at ε as well.
pub fn integrate<F>(spec: &QuadratureSpec, ranges: &[AxisRange], f: F) -> Result<Estimate>
where
    F: Fn(&[UnitPoint]) -> f64 + Sync,
{
    let dim = ranges.len();
    assert!(dim >= 1, "integration needs at least one axis");
    let truncated = spec.scheme == Scheme::GaussLegendre && ranges.contains(&AxisRange::Unbounded);

    let eval = |level: u32, eps: f64| -> (f64, usize) {
        let rule = spec.rule(level);
        let axes: Vec<Vec<Node>> = ranges
            .iter()
            .map(|r| match r {
                AxisRange::Unbounded if truncated => map_rule(&rule, eps, eps),
                _ => rule.clone(),
            })
            .collect();
        (tensor_sum(&axes, &f), rule.len())
    };

    let eps = spec.truncation;
    let (mut prev, _) = eval(0, eps);
    let mut level = 1;
    loop {
        let (cur, nodes) = eval(level, eps);
        let mut err = (cur - prev).abs();
        let mut value = cur;
        if truncated {
            let (half, _) = eval(level, eps / 2.0);
            err += (half - cur).abs();
            value = half;
        }
        if !value.is_finite() {
            return Err(Error::QuadratureNotConverged { value, error: f64::INFINITY, tolerance: spec.tolerance });
        }
        if err <= spec.tolerance {
            return Ok(Estimate { value, error: err, nodes });
        }
        let next_nodes = spec.rule(level + 1).len();
        if next_nodes > MAX_NODES_PER_AXIS || (next_nodes as f64).powi(dim as i32) > MAX_EVALUATIONS {
            return Err(Error::QuadratureNotConverged { value, error: err, tolerance: spec.tolerance });
        }
        prev = cur;
        level += 1;
    }
}

/// Integrates a function over the unit cube when it is smooth on each
/// region `v_{π(1)} <= ... <= v_{π(m)}` but kinked across the planes
/// `v_i = v_j`.
///
/// Each ordered region is mapped onto the cube by
/// `t_m = s_m`, `t_k = s_k t_{k+1}`, so integrands such as `min_i v_i`
/// become smooth; all `m!` regions are summed inside a single refinement
/// loop. `f(v, log_jac)` must return the integrand at `v` multiplied by
/// `exp(log_jac)`, the Jacobian of the map; integrands that over- or
/// underflow near the corners can then fold it in before exponentiating.
pub fn integrate_sorted<F>(spec: &QuadratureSpec, dim: usize, f: F) -> Result<Estimate>
where
    F: Fn(&[UnitPoint], f64) -> f64 + Sync,
{
    assert!((1..=4).contains(&dim), "ordered-region integration supports 1 to 4 axes");
    let perms = permutations(dim);
    integrate(spec, &vec![AxisRange::Full; dim], |s| {
        let mut t = vec![UnitPoint { p: 0.0, q: 0.0 }; dim];
        t[dim - 1] = s[dim - 1];
        let mut log_jac = 0.0;
        for k in (0..dim - 1).rev() {
            let next = t[k + 1];
            t[k] = UnitPoint { p: s[k].p * next.p, q: next.q + next.p * s[k].q };
            log_jac += next.p.ln();
        }
        let mut v = vec![t[0]; dim];
        let mut terms = Vec::with_capacity(perms.len());
        for perm in &perms {
            for (k, &axis) in perm.iter().enumerate() {
                v[axis] = t[k];
            }
            terms.push(f(&v, log_jac));
        }
        fsum(terms)
    })
}

/// Convenience form of [`integrate_sorted`] for integrands that stay in
/// floating-point range.
pub fn integrate_sorted_plain<F>(spec: &QuadratureSpec, dim: usize, f: F) -> Result<Estimate>
where
    F: Fn(&[UnitPoint]) -> f64 + Sync,
{
    integrate_sorted(spec, dim, |v, log_jac| f(v) * log_jac.exp())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

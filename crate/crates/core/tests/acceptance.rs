//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any criterion fails.

use comodep::analytic::{
    comonotone_product_moment, egm3_kappa, egm3_rho, gaussian_product_moment, gaussian_rho, gaussian_rho_c,
    pareto3_moments, pareto3_rho, pareto3_rho_c, rho_from_copula, ParetoVariant,
};
use comodep::empirical::{
    comonotonic_rearrangement, kappa_hat, rho_c_hat, rho_hat_general, rho_hat_general_parts, rho_hat_nonneg,
    rho_hat_nonneg_parts,
};
use comodep::model::{
    egm3_admissible, Copula, CopulaModel, DiscreteJoint, GaussianJoint, JointModel, Marginal, ParetoII3,
    QuadratureSpec, SampleMatrix,
};
use comodep::oracle::{discrete_rho, isserlis_bruteforce, kappa_from_copula, pareto_tail_moment, tail_integral_rho};
use comodep::quadrature::{gauss_legendre, integrate, AxisRange};
use comodep::simulate::sample;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

/// Outcome of one criterion: failures collected as messages.
#[derive(Default)]
struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn close(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.require((got - want).abs() <= tol, || format!("{what}: got {got:.15e}, want {want:.15e}, tol {tol:e}"));
    }

    fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }
}

fn uniform(copula: Copula) -> CopulaModel {
    CopulaModel::with_identical_marginals(copula, Marginal::standard_uniform())
}

fn exp1(copula: Copula) -> CopulaModel {
    CopulaModel::with_identical_marginals(copula, Marginal::exponential(1.0).unwrap())
}

const EGM3_TUPLES: [[f64; 4]; 5] =
    [[0.5, 0.5, 0.5, 0.0], [1.0, 1.0, 1.0, 0.0], [0.3, -0.2, 0.1, 0.2], [0.0, 0.0, 0.0, 1.0], [0.2, 0.2, -0.3, -0.2]];

fn criterion_1(c: &mut Check) {
    let q = QuadratureSpec::default();
    let start = Instant::now();
    for alpha in [-1.0, -0.5, 0.5, 1.0] {
        let fgm = Copula::fgm2(alpha).unwrap();
        let u = rho_from_copula(&uniform(fgm.clone()), &q).unwrap().value;
        c.close(&format!("FGM2({alpha}) uniform"), u, alpha / 3.0, 1e-8);
        let e = rho_from_copula(&exp1(fgm), &q).unwrap().value;
        c.close(&format!("FGM2({alpha}) exp"), e, alpha / 4.0, 1e-6);
    }
    let elapsed = start.elapsed();
    c.require(elapsed < Duration::from_secs(5), || format!("runtime {elapsed:?} >= 5 s"));
    c.note(format!("runtime {:.2} s", elapsed.as_secs_f64()));
}

fn criterion_2(c: &mut Check) {
    let q = QuadratureSpec::default();
    for [a12, a13, a23, a123] in EGM3_TUPLES {
        c.require(egm3_admissible(a12, a13, a23, a123), || format!("tuple {a12},{a13},{a23},{a123} inadmissible"));
        let model = uniform(Copula::egm3(a12, a13, a23, a123).unwrap());
        let rho_form = (a12 + a13 + a23) / 9.0 - a123 / 27.0;
        let kappa_form = (a12 + a13 + a23) / 9.0 + a123 / 27.0;
        let rho = rho_from_copula(&model, &q).unwrap().value;
        c.close(&format!("EGM3 rho {a12},{a13},{a23},{a123}"), rho, rho_form, 1e-5);
        c.close("EGM3 rho closed form", egm3_rho(a12, a13, a23, a123).unwrap(), rho_form, 1e-15);
        let kappa = kappa_from_copula(&model, &q).unwrap().value;
        c.close(&format!("EGM3 kappa {a12},{a13},{a23},{a123}"), kappa, kappa_form, 1e-5);
        c.close("EGM3 kappa closed form", egm3_kappa(a12, a13, a23, a123).unwrap(), kappa_form, 1e-15);
    }
}

fn criterion_3(c: &mut Check) {
    let cases: [(Vec<f64>, Vec<f64>); 3] = [
        (vec![1.0, -0.5], vec![1.0, 0.6, 0.6, 2.0]),
        (vec![0.5, 1.0, 1.5], vec![1.0, 0.3, -0.2, 0.3, 1.5, 0.4, -0.2, 0.4, 0.8]),
        (
            vec![1.0, 0.5, -0.5, 0.8],
            vec![1.0, 0.4, 0.2, 0.1, 0.4, 1.0, 0.3, 0.2, 0.2, 0.3, 1.0, 0.4, 0.1, 0.2, 0.4, 1.0],
        ),
    ];
    for (k, (mean, cov)) in cases.iter().enumerate() {
        let m = mean.len();
        let cov = DMatrix::from_row_slice(m, m, cov);
        let exact = gaussian_product_moment(mean, &cov).unwrap();
        let mc = isserlis_bruteforce(mean, &cov, 1_000_000, 1000 + k as u64).unwrap();
        let z = (exact - mc.value) / mc.std_error;
        c.require(z.abs() <= 3.0, || format!("m={m}: pairing {exact}, MC {} ± {}", mc.value, mc.std_error));
        c.note(format!("m={m} z={z:+.2}"));
    }
    for (r, mean) in [(0.5, 1.0), (0.2, 2.0), (-0.3, 0.7), (0.9, -1.5), (0.0, 3.0)] {
        let g = GaussianJoint::exchangeable(3, mean, r).unwrap();
        let (a, b) = (gaussian_rho(&g).unwrap(), gaussian_rho_c(&g).unwrap());
        c.close(&format!("gaussian rho vs rho_c at r={r}, mean={mean}"), a, b, 1e-12);
    }
}

fn criterion_4(c: &mut Check) {
    let q = QuadratureSpec::default();
    for (a0, alpha) in [(1.0, 4.0), (2.0, 5.0)] {
        let moments = pareto3_moments(a0, alpha).unwrap();
        let rel = |got: f64, want: f64| ((got - want) / want).abs();
        let mean = pareto_tail_moment(a0, alpha, 1, &q).unwrap().value;
        let pair = pareto_tail_moment(a0, alpha, 2, &q).unwrap().value;
        let triple = pareto_tail_moment(a0, alpha, 3, &q).unwrap().value;
        c.require(rel(moments.pair_moment, pair) <= 1e-3, || {
            format!("({a0},{alpha}) pair {} vs {pair}", moments.pair_moment)
        });
        c.require(rel(moments.triple_moment, triple) <= 1e-3, || {
            format!("({a0},{alpha}) triple {} vs {triple}", moments.triple_moment)
        });

        let law = ParetoII3::standard(alpha, a0).unwrap();
        let margins: Vec<Marginal> = (0..3).map(|j| law.marginal(j)).collect();
        let com_pair = comonotone_product_moment(&margins[..2], &q).unwrap().value;
        let com_triple = comonotone_product_moment(&margins, &q).unwrap().value;
        let rho_c_quad = (pair - mean * mean) / (com_pair - mean * mean);
        let rho_c = pareto3_rho_c(a0, alpha).unwrap();
        c.close(&format!("({a0},{alpha}) rho_c"), rho_c, rho_c_quad, 1e-4);

        c.close(
            &format!("({a0},{alpha}) corrected comonotone triple"),
            moments.comonotone_triple_corrected,
            com_triple,
            1e-8,
        );
        let uncorrected = moments.comonotone_triple_uncorrected.unwrap();
        let gap = rel(uncorrected, com_triple);
        c.require(gap > 0.10, || {
            format!("({a0},{alpha}) uncorrected comonotone triple {uncorrected} within 10% of {com_triple}")
        });
        c.note(format!("({a0},{alpha}) uncorrected-moment gap {:.0}%", 100.0 * gap));

        let rho_quad = tail_integral_rho(&JointModel::ParetoII3(law), &q).unwrap();
        let rho = pareto3_rho(a0, alpha, ParetoVariant::Corrected).unwrap();
        c.require((rho - rho_quad.value).abs() <= 1e-6 * rho.abs(), || {
            format!("({a0},{alpha}) rho {rho} vs tail integral {}", rho_quad.value)
        });
    }
    for k in 0..=20 {
        let a0 = 0.5 * k as f64;
        let rho = pareto3_rho(a0, 4.0, ParetoVariant::Corrected).unwrap();
        let rho_c = pareto3_rho_c(a0, 4.0).unwrap();
        c.require(rho < 1.0, || format!("rho({a0}, 4) = {rho} not below 1"));
        if k == 0 {
            c.require(rho == 0.0 && rho_c == 0.0, || format!("a0 = 0 gives rho {rho}, rho_c {rho_c}"));
        }
    }
}

fn criterion_5(c: &mut Check) {
    let start = Instant::now();
    let n = 200_000;
    let fgm = JointModel::Copula(uniform(Copula::fgm2(0.8).unwrap()));
    let rho = rho_hat_general(&sample(&fgm, n, 2024).unwrap()).unwrap();
    c.close("FGM2(0.8) estimate", rho, 0.8 / 3.0, 0.02);
    let gauss = JointModel::Gaussian(GaussianJoint::exchangeable(3, 1.0, 0.5).unwrap());
    let rho_g = rho_hat_general(&sample(&gauss, n, 2025).unwrap()).unwrap();
    c.close("Gaussian r=0.5 estimate", rho_g, 0.5, 0.03);
    let elapsed = start.elapsed();
    c.require(elapsed < Duration::from_secs(30), || format!("runtime {elapsed:?} >= 30 s"));
    c.note(format!("fgm {rho:.4}, gaussian {rho_g:.4}, runtime {:.2} s", elapsed.as_secs_f64()));
}

/// Random sample: either continuous draws or a coarse grid with ties,
/// optionally non-negative.
fn random_sample(rng: &mut ChaCha8Rng, m: usize, n_max: usize, nonneg: bool) -> SampleMatrix {
    loop {
        let n = rng.random_range(2..=n_max);
        let ties = rng.random_bool(0.5);
        let data: Vec<f64> = (0..n * m)
            .map(|_| {
                let x = if ties { f64::from(rng.random_range(0..8u8)) } else { rng.random::<f64>() * 10.0 };
                if nonneg {
                    x
                } else {
                    x - 4.0
                }
            })
            .collect();
        let s = SampleMatrix::from_row_major(n, m, data).unwrap();
        if !s.has_degenerate_column() {
            return s;
        }
    }
}

fn shuffled(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        v.swap(i, rng.random_range(0..=i));
    }
    v
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn criterion_6(c: &mut Check) {
    const SAMPLES: usize = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut counts = [0usize; 6];
    for _ in 0..SAMPLES {
        let m = rng.random_range(2..=4);
        let s = random_sample(&mut rng, m, 200, false);

        let sorted = comonotonic_rearrangement(&s).into_sorted();
        if let Ok(v) = rho_hat_general(&sorted) {
            c.require(v == 1.0, || format!("sorted sample gives {v}"));
            counts[0] += 1;
        }

        let p =
            s.permute_rows(&shuffled(&mut rng, s.nrows())).unwrap().permute_columns(&shuffled(&mut rng, m)).unwrap();
        c.require(rho_hat_general_parts(&s) == rho_hat_general_parts(&p), || {
            "general parts not permutation invariant".into()
        });
        c.require(rho_hat_nonneg_parts(&s) == rho_hat_nonneg_parts(&p), || {
            "nonneg parts not permutation invariant".into()
        });
        counts[1] += 1;

        if let Ok(v) = rho_hat_general(&s) {
            let w = rho_hat_general(&s.negated()).unwrap();
            c.require(rel_gap(v, w) <= 1e-12, || format!("duality {v} vs {w}"));
            counts[2] += 1;
        }

        if let Ok(v) = rho_hat_nonneg(&s) {
            let w = rho_hat_general(&s.shifted_to_zero()).unwrap();
            c.require(rel_gap(v, w) <= 1e-12, || format!("shift identity {v} vs {w}"));
            counts[3] += 1;
        }

        let pair = random_sample(&mut rng, 2, 200, false);
        let r = rho_hat_general(&pair).unwrap();
        let (rc, k) = (rho_c_hat(&pair).unwrap(), kappa_hat(&pair).unwrap());
        c.require(rel_gap(r, rc) <= 1e-9 && rel_gap(r, k) <= 1e-9, || format!("m=2: rho {r}, rho_c {rc}, kappa {k}"));
        counts[4] += 1;

        let triple = random_sample(&mut rng, 3, 60, true);
        if let Ok(v) = rho_hat_nonneg(&triple) {
            let k = kappa_hat(&triple.negated()).unwrap();
            c.require(rel_gap(v, k) <= 1e-9, || format!("kappa(-Y) {k} vs rho_nonneg(Y) {v}"));
            counts[5] += 1;
        }
    }
    let names = ["normalization", "permutation", "duality", "shift", "m=2 identities", "kappa(-Y)"];
    for (name, &count) in names.iter().zip(&counts) {
        c.require(count >= SAMPLES, || format!("{name}: only {count} non-degenerate samples"));
    }
    c.note(format!("{SAMPLES} samples per identity"));
}

/// `∫_0^{2π} f(z) dz / 2π` by Gauss–Legendre on each piece between the
/// given breakpoints.
fn uniform_angle_mean(breaks: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|b| *b > 0.0 && *b < 2.0 * PI).collect();
    pts.push(0.0);
    pts.push(2.0 * PI);
    pts.sort_by(f64::total_cmp);
    let rule = gauss_legendre(32);
    pts.windows(2)
        .map(|w| rule.iter().map(|nd| nd.w * f(w[0] + nd.x * (w[1] - w[0]))).sum::<f64>() * (w[1] - w[0]))
        .sum::<f64>()
        / (2.0 * PI)
}

fn criterion_7(c: &mut Check) {
    let law = DiscreteJoint::uniform(vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
    let rho = discrete_rho(&law).unwrap();
    c.require(rho == 0.0, || format!("three-point law gives {rho}"));

    // With Z ~ U(0, 1), E[sin Z] = 1 - cos 1 is not zero, so sin Z and cos Z are correlated.
    let q = QuadratureSpec::default();
    let sin_mean_01 = integrate(&q, &[AxisRange::Full], |u| u[0].p.sin()).unwrap().value;
    c.require(sin_mean_01 > 0.4, || format!("E[sin U(0,1)] = {sin_mean_01}"));
    c.note(format!("U(0,1) gives E[sin Z] = {sin_mean_01:.4}, so it is replaced by U(0, 2pi)"));

    let es = uniform_angle_mean(&[PI], f64::sin);
    let ec = uniform_angle_mean(&[PI], f64::cos);
    let esc = uniform_angle_mean(&[PI], |z| z.sin() * z.cos());
    for (name, v) in [("E[sin Z]", es), ("E[cos Z]", ec), ("E[sin Z cos Z]", esc)] {
        c.require(v.abs() <= 1e-10, || format!("{name} = {v}"));
    }

    let (a, b) = (0.7f64, 0.7f64);
    let breaks = [a.asin(), PI - a.asin(), b.acos(), 2.0 * PI - b.acos()];
    let ind = |cond: bool| if cond { 1.0 } else { 0.0 };
    let joint = uniform_angle_mean(&breaks, |z| ind(z.sin() > a && z.cos() > b));
    let p1 = uniform_angle_mean(&breaks, |z| ind(z.sin() > a));
    let p2 = uniform_angle_mean(&breaks, |z| ind(z.cos() > b));
    let gap = (joint - p1 * p2).abs();
    c.require(gap > 0.05, || format!("tail gap {gap} at ({a}, {b})"));
    c.note(format!("joint tail {joint:.4} vs product {:.4}", p1 * p2));
}

fn criterion_8(c: &mut Check) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..200 {
        let m = rng.random_range(2..=4);
        let s = random_sample(&mut rng, m, 200, false);
        let law = DiscreteJoint::from_sample(&s);
        match (rho_hat_general(&s), discrete_rho(&law)) {
            (Ok(a), Ok(b)) => c.require(rel_gap(a, b) <= 1e-12, || format!("estimator {a} vs discrete oracle {b}")),
            (Err(_), Err(_)) => {}
            (a, b) => c.failures.push(format!("estimator {a:?} vs discrete oracle {b:?}")),
        }
    }

    // 3-D tail integrals with exponential margins carry a log singularity at
    // the corner and stall near 1e-9 absolute error
    let q = QuadratureSpec::default().with_tolerance(1e-8).unwrap();
    let mut models: Vec<(String, CopulaModel)> = Vec::new();
    for alpha in [-1.0, -0.5, 0.0, 0.5, 1.0] {
        models.push((format!("FGM2({alpha}) uniform"), uniform(Copula::fgm2(alpha).unwrap())));
        models.push((format!("FGM2({alpha}) exp"), exp1(Copula::fgm2(alpha).unwrap())));
    }
    for t in EGM3_TUPLES {
        models.push((format!("EGM3{t:?} uniform"), uniform(Copula::egm3(t[0], t[1], t[2], t[3]).unwrap())));
    }
    models.push(("EGM3 exp".into(), exp1(Copula::egm3(0.3, -0.2, 0.1, 0.2).unwrap())));
    models.push(("independent(3) exp".into(), exp1(Copula::independent(3).unwrap())));
    models.push(("comonotone(3) uniform".into(), uniform(Copula::comonotone(3).unwrap())));
    let start = Instant::now();
    let count = models.len();
    for (name, model) in models {
        let (a, b) = match (rho_from_copula(&model, &q), tail_integral_rho(&JointModel::Copula(model), &q)) {
            (Ok(a), Ok(b)) => (a, b),
            (a, b) => {
                c.failures.push(format!("{name}: {a:?} / {b:?}"));
                continue;
            }
        };
        let tol = a.error + b.error + 10.0 * q.tolerance();
        c.require((a.value - b.value).abs() <= tol, || {
            format!("{name}: copula {} vs tail {} (tol {tol:e})", a.value, b.value)
        });
    }
    c.note(format!("{count} shared models in {:.2} s", start.elapsed().as_secs_f64()));
}

type Criterion = (&'static str, fn(&mut Check));

fn main() {
    let criteria: [Criterion; 8] = [
        ("FGM closed forms", criterion_1),
        ("EGM3 rho and kappa", criterion_2),
        ("Gaussian pairing expansion", criterion_3),
        ("Pareto II moments", criterion_4),
        ("estimator consistency", criterion_5),
        ("exact algebraic identities", criterion_6),
        ("uncorrelated but dependent", criterion_7),
        ("oracle coherence", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let mut check = Check::default();
        run(&mut check);
        let status = if check.failures.is_empty() { "PASS" } else { "FAIL" };
        let detail = if check.notes.is_empty() { String::new() } else { format!(" ({})", check.notes.join("; ")) };
        println!("criterion {}: {status} {name}{detail}", k + 1);
        for f in &check.failures {
            println!("    {f}");
        }
        if !check.failures.is_empty() {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

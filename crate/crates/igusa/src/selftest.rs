//! The acceptance suite, runnable from the binary with no external data.

use std::time::Instant;

use igusa_core::continuation::{evaluate_continued, laurent_at, pole_report, ContinuationConfig};
use igusa_core::mpoly::{affine_names, parse_poly, MPoly};
use igusa_core::quadrature::{integrate_box_rep, integrate_power_log, j_value, log_via_t_integral, QuadConfig};
use igusa_core::rational::{rat, ratio, to_f64};
use igusa_core::recurrence::{
    guess_ode, guess_recurrence, normalize_recurrence, ode_to_recurrence, verify_recurrence, Recurrence,
    SearchConfig,
};
use igusa_core::simplex::{decompose_union, moments, sup_estimate, Domain, MomentSequence, SimplexDomain};
use igusa_core::{Rat, UniPoly};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracles::{beta_at_minus_one, monomial_product_at_minus_one};
use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

type Outcome = Result<(bool, String), CliError>;

pub const CRITERIA: [(&str, fn() -> Outcome); 11] = [
    ("moment exactness", moment_exactness),
    ("recurrence recovery", recurrence_recovery),
    ("simple pole", simple_pole),
    ("double pole", double_pole),
    ("residue", residue),
    ("point continuation", point_continuation),
    ("log-power vs box representation", box_equivalence),
    ("log as a t-integral", log_identity),
    ("J-function consistency", j_consistency),
    ("ODE path equivalence", ode_equivalence),
    ("property suites", property_suites),
];

pub fn run_criterion(id: usize) -> CriterionResult {
    let (name, check) = CRITERIA[id - 1];
    let start = Instant::now();
    let (passed, detail) = match check() {
        Ok(r) => r,
        Err(e) => (false, format!("{}: {e}", e.kind())),
    };
    CriterionResult { id, name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERIA.len()).map(run_criterion).collect()
}

fn poly(text: &str, n: usize) -> Result<MPoly, CliError> {
    let names = affine_names(n);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(parse_poly(text, &refs)?)
}

fn search() -> SearchConfig {
    SearchConfig::default()
}

fn moment_data(f: &MPoly, d: &Domain) -> Result<MomentSequence, CliError> {
    Ok(moments(f, d, search().moments_needed())?)
}

fn recurrence(f: &MPoly, d: &Domain) -> Result<Recurrence, CliError> {
    Ok(guess_recurrence(&moment_data(f, d)?, &search())?.recurrence)
}

fn p(c: &[i64]) -> UniPoly {
    UniPoly::from_ints(c)
}

/// Whether `rec` and `target` describe the same relation: equal after
/// normalization, which removes scalars and common polynomial factors.
fn proportional(rec: &Recurrence, target: &[UniPoly]) -> bool {
    match Recurrence::new(target.to_vec()) {
        Ok(t) => normalize_recurrence(&t) == normalize_recurrence(rec),
        Err(_) => false,
    }
}

fn within(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

fn moment_exactness() -> Outcome {
    let start = Instant::now();
    let m = moments(&poly("x1", 1)?, &Domain::standard(1), 30)?;
    let secs = start.elapsed().as_secs_f64();
    let exact = m.values.len() == 31 && m.values.iter().enumerate().all(|(k, v)| *v == ratio(1, k as i64 + 1));
    Ok((exact && secs < 1.0, format!("31 values exact={exact}, {secs:.3}s")))
}

fn recurrence_recovery() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    let cases: [(&str, Vec<UniPoly>); 2] = [
        ("x1", vec![p(&[-1, -1]), p(&[2, 1])]),
        ("x1 - x1^2", vec![p(&[-1, -2, -1]), p(&[6, 10, 4])]),
    ];
    for (text, target) in cases {
        let f = poly(text, 1)?;
        let m = moment_data(&f, &Domain::standard(1))?;
        let g = guess_recurrence(&m, &search())?;
        let prop = proportional(&g.recurrence, &target);
        let held_out = g.report.tested >= 20 && g.report.failures.is_empty();
        ok &= prop && held_out;
        notes.push(format!("{text}: [{}] proportional={prop} verified on {}", g.recurrence, g.report.tested));
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((ok && secs < 5.0, format!("{}; {secs:.2}s", notes.join("; "))))
}

fn simple_pole() -> Outcome {
    let f = poly("x1", 1)?;
    let d = Domain::standard(1);
    let e = laurent_at(&f, &d, &recurrence(&f, &d)?, -1, 2, &ContinuationConfig::default())?;
    let ok = e.min_exp == -1
        && within(e.coeffs[0], 1.0, 1e-8)
        && within(e.coeffs[1], 0.0, 1e-8)
        && within(e.coeffs[2], 0.0, 1e-8);
    Ok((ok, format!("min_exp={} coeffs={:?} err={:.1e}", e.min_exp, e.coeffs, e.err_estimate)))
}

fn double_pole() -> Outcome {
    let f = poly("x1*x2", 2)?;
    let d = Domain::standard(2);
    let e = laurent_at(&f, &d, &recurrence(&f, &d)?, -1, 0, &ContinuationConfig::default())?;
    let oracle = monomial_product_at_minus_one(2, 3);
    let ok = e.min_exp == -2
        && within(e.coeffs[0], oracle.coeff(-2), 1e-6)
        && within(e.coeffs[1], oracle.coeff(-1), 1e-5)
        && e.pole_order() == d.nvars();
    Ok((ok, format!("min_exp={} a_-2={:.10} a_-1={:.2e}, oracle a_-2={}", e.min_exp, e.coeffs[0], e.coeffs[1], oracle.coeff(-2))))
}

fn residue() -> Outcome {
    let f = poly("x1 - x1^2", 1)?;
    let d = Domain::standard(1);
    let e = laurent_at(&f, &d, &recurrence(&f, &d)?, -1, 0, &ContinuationConfig::default())?;
    let oracle = beta_at_minus_one(2);
    let ok = e.min_exp == -1 && within(e.coeffs[0], oracle.coeff(-1), 1e-6);
    Ok((ok, format!("min_exp={} a_-1={:.10} oracle={}", e.min_exp, e.coeffs[0], oracle.coeff(-1))))
}

fn point_continuation() -> Outcome {
    let f = poly("x1", 1)?;
    let d = Domain::standard(1);
    let rec = recurrence(&f, &d)?;
    let cfg = ContinuationConfig::default();
    let low = evaluate_continued(&f, &d, &rec, -2.5, &cfg)?.value;
    let high = evaluate_continued(&f, &d, &rec, 2.5, &cfg)?.value;
    let ok = within(low, -2.0 / 3.0, 1e-7) && within(high, 1.0 / 3.5, 1e-8);
    Ok((ok, format!("I(-2.5)={low:.12} I(2.5)={high:.12}")))
}

fn box_equivalence() -> Outcome {
    let f = poly("x1", 1)?;
    let d = Domain::standard(1);
    let cfg = QuadConfig::default();
    let a = integrate_power_log(&f, 2.0, 1, &d, &cfg)?;
    let b = integrate_box_rep(&f, 2, 1, &d, &cfg)?;
    let want = -1.0 / 9.0;
    // a few ulps of rounding on top of the estimate
    let slack = |v: f64| 8.0 * f64::EPSILON * v.abs();
    let ok = (a.value - want).abs() <= a.err_estimate + slack(want)
        && (b.value - want).abs() <= b.err_estimate + slack(want);
    Ok((
        ok,
        format!(
            "log-power {:.15} (±{:.1e}), box {:.15} (±{:.1e})",
            a.value, a.err_estimate, b.value, b.err_estimate
        ),
    ))
}

fn log_identity() -> Outcome {
    let f = poly("x1^2 + 3*x2 + 1/10", 2)?;
    let fp = f.to_float();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < 100 {
        let x = [rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0)];
        let v = fp.eval(&x);
        if !(v > 0.1 && v < 10.0) {
            continue;
        }
        count += 1;
        worst = worst.max((log_via_t_integral(v, 64) - v.ln()).abs());
    }
    Ok((worst <= 1e-10, format!("max |error| over 100 points = {worst:.2e}")))
}

fn j_consistency() -> Outcome {
    let f = poly("x1", 1)?;
    let d = Domain::standard(1);
    let t = 0.5;
    let j = j_value(&f, t, &d, &QuadConfig::default())?;
    let want = 2.0 * std::f64::consts::LN_2;
    let m = moments(&f, &d, 40)?;
    let partial: f64 = m.values.iter().enumerate().map(|(l, v)| to_f64(v) * t.powi(l as i32)).sum();
    let r = sup_estimate(&f, &d, 256);
    let vol = to_f64(&d.volume()?);
    let bound = vol * (r * t).powi(41) / (1.0 - r * t);
    let ok = within(j.value, want, 1e-8) && (j.value - partial).abs() <= bound + j.err_estimate;
    Ok((
        ok,
        format!("J(1/2)={:.12}, partial sum off by {:.2e} (bound {bound:.2e})", j.value, (j.value - partial).abs()),
    ))
}

fn ode_equivalence() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for text in ["2", "x1"] {
        let f = poly(text, 1)?;
        let m = moments(&f, &Domain::standard(1), 60)?;
        let s = search();
        let direct = guess_recurrence(&m, &s)?.recurrence;
        let ode = guess_ode(&m.values[..s.series_needed()], s.max_order, s.max_degree)?;
        let via_ode = ode_to_recurrence(&ode);
        let a = verify_recurrence(&via_ode, &m);
        let b = verify_recurrence(&direct, &m);
        let same = proportional(&via_ode, direct.coeffs());
        ok &= a.verified() && b.verified();
        notes.push(format!(
            "f={text}: ODE [{ode}] -> [{via_ode}], guessed [{direct}], both verified on {} moments, equal={same}",
            a.tested
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn example_set() -> Vec<(&'static str, usize)> {
    vec![("x1", 1), ("x1 - x1^2", 1), ("1", 1), ("2", 2), ("x1*x2", 2), ("x1 + x2", 2), ("1/2 + x1", 1)]
}

fn property_suites() -> Outcome {
    let cfg = ContinuationConfig::default();
    let mut failures: Vec<String> = Vec::new();

    // pole locations and orders
    let mut pole_count = 0;
    for (text, n) in example_set() {
        let f = poly(text, n)?;
        let d = Domain::standard(n);
        let rec = recurrence(&f, &d)?;
        for pole in pole_report(&f, &d, &rec, -3, &cfg)? {
            pole_count += 1;
            if pole.location >= 0 || pole.order > n {
                failures.push(format!("{text}: pole {pole:?}"));
            }
        }
        for k in 0..8 {
            let s = -3.3 + 0.6 * k as f64;
            if let Err(e) = evaluate_continued(&f, &d, &rec, s, &cfg) {
                failures.push(format!("{text}: evaluation at {s} failed with {e}"));
            }
        }
    }

    // scaling law
    for (text, n) in [("x1", 1), ("x1 - x1^2", 1)] {
        let d = Domain::standard(n);
        let f = poly(text, n)?;
        let g = f.scale(&rat(2));
        let (rf, rg) = (recurrence(&f, &d)?, recurrence(&g, &d)?);
        for s in [2.5, -0.5, -2.5] {
            let a = evaluate_continued(&f, &d, &rf, s, &cfg)?.value;
            let b = evaluate_continued(&g, &d, &rg, s, &cfg)?.value;
            let want = 2f64.powf(s) * a;
            if (b - want).abs() > 1e-6 * want.abs() {
                failures.push(format!("scaling {text} at {s}: {b} vs {want}"));
            }
        }
    }

    // additivity under a barycentric split
    let f = poly("x1*x2", 2)?;
    let whole = Domain::standard(2);
    let parts: Vec<Domain> = SimplexDomain::standard(2)
        .barycentric_split(&SimplexDomain::standard(2).barycenter())
        .into_iter()
        .map(|piece| Domain::new(2, vec![piece]))
        .collect::<Result<_, _>>()?;
    let whole_m = moments(&f, &whole, 12)?;
    let mut sum_m = vec![Rat::zero(); 13];
    for part in &parts {
        for (acc, v) in sum_m.iter_mut().zip(moments(&f, part, 12)?.values) {
            *acc += v;
        }
    }
    if sum_m != whole_m.values {
        failures.push("moments are not additive".into());
    }
    let whole_e = laurent_at(&f, &whole, &recurrence(&f, &whole)?, -1, 0, &cfg)?;
    let mut sum_e = [0.0; 3];
    for part in &parts {
        let e = laurent_at(&f, part, &recurrence(&f, part)?, -1, 0, &cfg)?;
        for k in -2..=0i64 {
            sum_e[(k + 2) as usize] += e.coeff(k).unwrap_or(f64::NAN);
        }
    }
    for k in -2..=0i64 {
        let got = whole_e.coeff(k).unwrap_or(f64::NAN);
        if !((sum_e[(k + 2) as usize] - got).abs() <= 1e-5) {
            failures.push(format!("Laurent a_{k}: whole {got} vs pieces {}", sum_e[(k + 2) as usize]));
        }
    }

    // sign-string decomposition of a union
    for n in 1..=4 {
        for m in 1..=4 {
            if decompose_union(n, m).len() != (1 << n) + (1 << m) - 1 {
                failures.push(format!("decompose_union({n},{m}) count"));
            }
        }
    }
    let (mc_ok, mc_note) = union_monte_carlo();
    if !mc_ok {
        failures.push(mc_note.clone());
    }

    let ok = failures.is_empty();
    let detail = if ok {
        format!("{pole_count} poles checked, scaling, additivity and union measure hold; {mc_note}")
    } else {
        failures.join("; ")
    };
    Ok((ok, detail))
}

fn union_monte_carlo() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let quadratic = |rng: &mut ChaCha8Rng| {
        let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-3..=3) as f64).collect();
        move |x: f64, y: f64| c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y - 0.5
    };
    let samples = 20_000;
    let mut worst: f64 = 0.0;
    for (n, m) in [(1, 1), (2, 1), (2, 2), (1, 3)] {
        let fs: Vec<_> = (0..n).map(|_| quadratic(&mut rng)).collect();
        let gs: Vec<_> = (0..m).map(|_| quadratic(&mut rng)).collect();
        let frequency = |rng: &mut ChaCha8Rng, inside: &dyn Fn(f64, f64) -> bool| {
            let hits = (0..samples)
                .filter(|_| inside(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .count();
            hits as f64 / samples as f64
        };
        let union = |x: f64, y: f64| fs.iter().all(|f| f(x, y) > 0.0) || gs.iter().all(|g| g(x, y) > 0.0);
        let pu = frequency(&mut rng, &union);
        let mut var = pu * (1.0 - pu) / samples as f64;
        let mut total = 0.0;
        for e in decompose_union(n, m) {
            let cell = |x: f64, y: f64| {
                fs.iter().zip(&e[..n]).all(|(f, &a)| a as f64 * f(x, y) > 0.0)
                    && gs.iter().zip(&e[n..]).all(|(g, &b)| b as f64 * g(x, y) > 0.0)
            };
            let pc = frequency(&mut rng, &cell);
            total += pc;
            var += pc * (1.0 - pc) / samples as f64;
        }
        let sigma = var.sqrt();
        if sigma > 0.0 {
            worst = worst.max((pu - total).abs() / sigma);
        }
    }
    (worst <= 3.0, format!("union measure within {worst:.2} standard errors"))
}

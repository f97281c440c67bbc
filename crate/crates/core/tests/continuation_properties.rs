use igusa_core::continuation::{evaluate_continued, laurent_at, pole_report, ContinuationConfig};
use igusa_core::mpoly::{parse_poly, MPoly};
use igusa_core::rational::{rat, ratio};
use igusa_core::recurrence::{guess_recurrence, Recurrence, SearchConfig};
use igusa_core::simplex::{moments, Domain, SimplexDomain};
use igusa_core::Error;

const ZETA2: f64 = 1.644_934_066_848_226_4;
const ZETA3: f64 = 1.202_056_903_159_594_3;

fn vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn poly(text: &str, n: usize) -> MPoly {
    let names = vars(n);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    parse_poly(text, &refs).unwrap()
}

fn recurrence(f: &MPoly, d: &Domain) -> Recurrence {
    let search = SearchConfig::default();
    let m = moments(f, d, search.moments_needed()).unwrap();
    guess_recurrence(&m, &search).unwrap().recurrence
}

fn examples() -> Vec<(&'static str, usize)> {
    vec![("x1", 1), ("x1 - x1^2", 1), ("1", 1), ("x1*x2", 2), ("x1 + x2", 2), ("1/2 + x1", 1), ("x1^3", 1)]
}

#[test]
fn poles_sit_at_negative_integers_with_bounded_order() {
    let cfg = ContinuationConfig::default();
    for (text, n) in examples() {
        let f = poly(text, n);
        let d = Domain::standard(n);
        let rec = recurrence(&f, &d);
        for pole in pole_report(&f, &d, &rec, -3, &cfg).unwrap() {
            assert!(pole.location < 0, "{text}");
            assert!(pole.order >= 1 && pole.order <= n, "{text}: {pole:?}");
        }
        for k in 0..12 {
            let s = -3.7 + 0.45 * k as f64;
            if s.fract() == 0.0 {
                continue;
            }
            let v = evaluate_continued(&f, &d, &rec, s, &cfg);
            assert!(v.is_ok(), "{text} at {s}: {v:?}");
        }
    }
}

#[test]
fn product_expansion_matches_gamma_series() {
    // Γ(1+ε)²/(ε² Γ(1+2ε)) = ε^{-2} (1 - ζ(2) ε² + 2 ζ(3) ε³ + ...)
    let f = poly("x1*x2", 2);
    let d = Domain::standard(2);
    let rec = recurrence(&f, &d);
    let e = laurent_at(&f, &d, &rec, -1, 1, &ContinuationConfig::default()).unwrap();
    assert_eq!(e.min_exp, -2);
    let want = [1.0, 0.0, -ZETA2, 2.0 * ZETA3];
    for (k, w) in want.iter().enumerate() {
        let got = e.coeffs[k];
        assert!((got - w).abs() < 1e-5, "a_{} = {got}, want {w}", k as i64 - 2);
    }
}

#[test]
fn triple_product_has_pole_of_full_order() {
    let f = poly("x1*x2*x3", 3);
    let d = Domain::standard(3);
    let rec = recurrence(&f, &d);
    let poles = pole_report(&f, &d, &rec, -1, &ContinuationConfig::default()).unwrap();
    assert_eq!(poles.len(), 1);
    assert_eq!(poles[0].order, 3);
    assert!((poles[0].leading_coeff - 1.0).abs() < 1e-5, "{:?}", poles[0]);
}

#[test]
fn scaling_law() {
    let cfg = ContinuationConfig::default();
    for (text, n) in [("x1", 1), ("x1 - x1^2", 1), ("x1*x2", 2)] {
        let d = Domain::standard(n);
        let f = poly(text, n);
        let g = f.scale(&rat(2));
        let (rf, rg) = (recurrence(&f, &d), recurrence(&g, &d));
        for s in [2.5, -0.5, -2.5] {
            let a = evaluate_continued(&f, &d, &rf, s, &cfg).unwrap().value;
            let b = evaluate_continued(&g, &d, &rg, s, &cfg).unwrap().value;
            let want = 2f64.powf(s) * a;
            assert!((b - want).abs() <= 1e-6 * want.abs(), "{text} at {s}: {b} vs {want}");
        }
    }
}

#[test]
fn laurent_coefficients_add_over_a_split() {
    let cfg = ContinuationConfig::default();
    let f = poly("x1 - x1^2", 1);
    let whole = Domain::standard(1);
    let interval = |a: i64, b: i64| SimplexDomain::new(vec![vec![ratio(a, 3)], vec![ratio(b, 3)]], 1).unwrap();
    let left = Domain::new(1, vec![interval(0, 1)]).unwrap();
    let right = Domain::new(1, vec![interval(1, 3)]).unwrap();
    for s0 in [-1, -2] {
        let e = laurent_at(&f, &whole, &recurrence(&f, &whole), s0, 1, &cfg).unwrap();
        let l = laurent_at(&f, &left, &recurrence(&f, &left), s0, 1, &cfg).unwrap();
        let r = laurent_at(&f, &right, &recurrence(&f, &right), s0, 1, &cfg).unwrap();
        for k in e.min_exp..=1 {
            let sum = l.coeff(k).unwrap() + r.coeff(k).unwrap();
            let got = e.coeff(k).unwrap();
            let tol = 1e-6 * (1.0 + got.abs());
            assert!((sum - got).abs() < tol, "s0={s0} k={k}: {got} vs {sum}");
        }
    }
}

#[test]
fn laurent_coefficients_add_over_a_planar_split() {
    let cfg = ContinuationConfig::default();
    let f = poly("x1*x2", 2);
    let whole = Domain::standard(2);
    let tri = SimplexDomain::standard(2);
    let centre = vec![ratio(1, 4), ratio(1, 4)];
    let whole_e = laurent_at(&f, &whole, &recurrence(&f, &whole), -1, 0, &cfg).unwrap();
    let mut sum = [0.0; 3];
    for piece in tri.barycentric_split(&centre) {
        let d = Domain::new(2, vec![piece]).unwrap();
        let e = laurent_at(&f, &d, &recurrence(&f, &d), -1, 0, &cfg).unwrap();
        for k in -2..=0 {
            sum[(k + 2) as usize] += e.coeff(k).unwrap();
        }
    }
    for k in -2..=0i64 {
        let got = whole_e.coeff(k).unwrap();
        assert!((sum[(k + 2) as usize] - got).abs() < 1e-5, "k={k}: {got} vs {sum:?}");
    }
}

#[test]
fn half_integer_pole_is_reported() {
    // ∫_0^1 x^{2s} = 1/(2s+1) has its only pole at -1/2
    let f = poly("x1^2", 1);
    let d = Domain::standard(1);
    let rec = recurrence(&f, &d);
    let cfg = ContinuationConfig::default();
    assert!(pole_report(&f, &d, &rec, -4, &cfg).unwrap().is_empty());
    assert!(matches!(evaluate_continued(&f, &d, &rec, -0.5, &cfg), Err(Error::PoleAt { .. })));
    let v = evaluate_continued(&f, &d, &rec, -1.75, &cfg).unwrap();
    assert!((v.value - 1.0 / (-2.5)).abs() < 1e-8);
}

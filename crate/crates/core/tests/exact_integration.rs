use igusa_core::mpoly::MPoly;
use igusa_core::rational::{rat, ratio, to_f64};
use igusa_core::simplex::{decompose_union, integrate_poly, moments, sup_estimate, Domain, SimplexDomain};
use igusa_core::Rat;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Integrates over the standard simplex one variable at a time, innermost
/// last: `∫_0^{1 - x_1 - ... - x_{k-1}} x_k^a dx_k = L^{a+1}/(a+1)`.
fn iterated_integral(f: &MPoly) -> Rat {
    let n = f.nvars();
    let mut p = f.clone();
    for k in (0..n).rev() {
        let mut bound = MPoly::one(n);
        for j in 0..k {
            bound = bound.sub(&MPoly::var(n, j));
        }
        let mut next = MPoly::zero(n);
        for (e, c) in p.terms() {
            let a = e[k];
            let mut rest = e.clone();
            rest[k] = 0;
            let mono = MPoly::from_terms(n, [(rest, c / rat(a as i64 + 1))]);
            next = next.add(&mono.mul(&bound.pow(a + 1)));
        }
        p = next;
    }
    p.as_constant().expect("all variables integrated out")
}

fn poly_strategy(n: usize) -> impl Strategy<Value = MPoly> {
    prop::collection::vec((prop::collection::vec(0u32..4, n), -5i64..6, 1i64..4), 1..5)
        .prop_map(move |terms| MPoly::from_terms(n, terms.into_iter().map(|(e, a, b)| (e, ratio(a, b)))))
}

fn point_strategy(n: usize) -> impl Strategy<Value = Vec<Rat>> {
    prop::collection::vec(1i64..20, n + 1).prop_map(move |w| {
        let total: i64 = w.iter().sum();
        w.iter().map(|&a| ratio(a, total)).collect()
    })
}

fn skewed_triangle() -> SimplexDomain {
    SimplexDomain::new(vec![vec![rat(0), rat(0)], vec![ratio(3, 2), ratio(1, 2)], vec![ratio(-1, 3), rat(2)]], 1)
        .unwrap()
}

#[test]
fn formula_matches_iterated_integration() {
    for n in 1..=3 {
        for e0 in 0..4u32 {
            for e1 in 0..3u32 {
                let mut e = vec![0; n];
                e[0] = e0;
                if n > 1 {
                    e[n - 1] += e1;
                }
                let f = MPoly::from_terms(n, [(e.clone(), rat(1))]);
                assert_eq!(integrate_poly(&f, &Domain::standard(n)).unwrap(), iterated_integral(&f), "{e:?}");
            }
        }
    }
}

#[test]
fn zeroth_moment_is_volume() {
    let d = Domain::new(2, vec![skewed_triangle()]).unwrap();
    let f = MPoly::var(2, 0).mul(&MPoly::var(2, 1)).add(&MPoly::one(2));
    let m = moments(&f, &d, 0).unwrap();
    assert_eq!(m.values[0], d.volume().unwrap());
    let vol = d.volume().unwrap();
    // |det [[3/2, 1/2], [-1/3, 2]]| / 2
    assert_eq!(vol, ratio(19, 12));
}

#[test]
fn signed_pieces_cancel() {
    let plus = SimplexDomain::standard(2);
    let minus = SimplexDomain::new(plus.vertices().to_vec(), -1).unwrap();
    let d = Domain::new(2, vec![plus, minus]).unwrap();
    let f = MPoly::var(2, 0).add(&MPoly::one(2));
    assert!(moments(&f, &d, 5).unwrap().values.iter().all(Zero::is_zero));
}

#[test]
fn moments_respect_growth_bound() {
    let f = MPoly::var(2, 0).mul(&MPoly::var(2, 1)).scale(&rat(4)).add(&MPoly::constant(2, ratio(1, 2)));
    let d = Domain::new(2, vec![skewed_triangle()]).unwrap();
    let r = sup_estimate(&f, &d, 512);
    let vol = to_f64(&d.volume().unwrap());
    let m = moments(&f, &d, 25).unwrap();
    for (k, v) in m.values.iter().enumerate() {
        assert!(to_f64(v).abs() <= vol * r.powi(k as i32) * (1.0 + 1e-12), "k={k}");
    }
}

#[test]
fn union_decomposition_counts() {
    for n in 1..=4 {
        for m in 1..=4 {
            let strings = decompose_union(n, m);
            assert_eq!(strings.len(), (1 << n) + (1 << m) - 1);
            let mut sorted = strings.clone();
            sorted.sort_by(|a, b| b.cmp(a));
            assert_eq!(sorted, strings, "lexicographic, + first");
        }
    }
    assert_eq!(decompose_union(1, 1), vec![vec![1, 1], vec![1, -1], vec![-1, 1]]);
}

fn random_quadratic(rng: &mut ChaCha8Rng) -> impl Fn(f64, f64) -> f64 {
    let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-3..=3) as f64).collect();
    move |x, y| c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y - 0.5
}

#[test]
fn union_measure_is_sum_of_cells() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (n, m) in [(1, 1), (2, 1), (2, 2), (1, 3)] {
        let fs: Vec<_> = (0..n).map(|_| random_quadratic(&mut rng)).collect();
        let gs: Vec<_> = (0..m).map(|_| random_quadratic(&mut rng)).collect();
        let samples = 20_000;
        let draw = |rng: &mut ChaCha8Rng| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let in_union = |x: f64, y: f64| fs.iter().all(|f| f(x, y) > 0.0) || gs.iter().all(|g| g(x, y) > 0.0);
        let hits = (0..samples).filter(|_| {
            let (x, y) = draw(&mut rng);
            in_union(x, y)
        });
        let p_union = hits.count() as f64 / samples as f64;
        let mut cells_total = 0.0;
        let mut var = p_union * (1.0 - p_union) / samples as f64;
        for e in decompose_union(n, m) {
            let hits = (0..samples)
                .filter(|_| {
                    let (x, y) = draw(&mut rng);
                    fs.iter().zip(&e[..n]).all(|(f, &a)| a as f64 * f(x, y) > 0.0)
                        && gs.iter().zip(&e[n..]).all(|(g, &b)| b as f64 * g(x, y) > 0.0)
                })
                .count();
            let p = hits as f64 / samples as f64;
            cells_total += p;
            var += p * (1.0 - p) / samples as f64;
        }
        let diff = (p_union - cells_total).abs();
        assert!(diff <= 3.0 * var.sqrt() + 1e-12, "n={n} m={m}: {p_union} vs {cells_total}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn additive_under_barycentric_split(f in poly_strategy(2), p in point_strategy(2)) {
        let tri = skewed_triangle();
        let point: Vec<Rat> = (0..2)
            .map(|i| tri.vertices().iter().zip(&p).map(|(v, w)| &v[i] * w).sum())
            .collect();
        let whole = integrate_poly(&f, &Domain::new(2, vec![tri.clone()]).unwrap()).unwrap();
        let parts = Domain::new(2, tri.barycentric_split(&point)).unwrap();
        prop_assert_eq!(whole.clone(), integrate_poly(&f, &parts).unwrap());
        let whole_moments = moments(&f, &Domain::new(2, vec![tri]).unwrap(), 4).unwrap();
        prop_assert_eq!(whole_moments.values, moments(&f, &parts, 4).unwrap().values);
    }

    #[test]
    fn linear_in_the_integrand(f in poly_strategy(3), g in poly_strategy(3), a in -4i64..5, b in 1i64..5) {
        let d = Domain::standard(3);
        let (alpha, beta) = (ratio(a, b), ratio(b, 3));
        let combo = f.scale(&alpha).add(&g.scale(&beta));
        let lhs = integrate_poly(&combo, &d).unwrap();
        let rhs = alpha * integrate_poly(&f, &d).unwrap() + beta * integrate_poly(&g, &d).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn iterated_oracle_on_random_polys(f in poly_strategy(3)) {
        prop_assert_eq!(integrate_poly(&f, &Domain::standard(3)).unwrap(), iterated_integral(&f));
    }
}

#[test]
fn unit_moment_sequence_of_identity() {
    let m = moments(&MPoly::var(1, 0), &Domain::standard(1), 30).unwrap();
    for (k, v) in m.values.iter().enumerate() {
        assert_eq!(*v, Rat::one() / rat(k as i64 + 1));
    }
}

//! Guessing and checking linear recurrences with polynomial coefficients.
//!
//! The moments satisfy `Σ_{i=0}^{m} c_i(s) I(s+i) = 0`. The coefficients are
//! found as a nullspace vector of the exact linear system obtained by
//! writing `c_i(s) = Σ_j a_{ij} s^j` and imposing the relation at
//! `s = 0, 1, 2, ...`. The same machinery finds a linear ODE
//! `Σ q_i(t) J^{(i)}(t) = 0` for the generating series `J(t) = Σ I(l) t^l`,
//! which then converts into a recurrence by comparing coefficients of `t^s`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rational::{from_usize, powi, rat, Rat};
use crate::simplex::MomentSequence;
use crate::unipoly::{primitive_factor, UniPoly};

/// Extra equations beyond the number of unknowns in every exact solve.
pub const SLACK: usize = 5;

/// `Σ_{i=0}^{m} c_i(s) I(s+i) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recurrence {
    coeffs: Vec<UniPoly>,
}

impl Recurrence {
    pub fn new(coeffs: Vec<UniPoly>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().all(UniPoly::is_zero) {
            return Err(Error::InvalidArgument("a recurrence needs a nonzero coefficient".into()));
        }
        Ok(Recurrence { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[UniPoly] {
        &self.coeffs
    }

    /// Largest coefficient degree.
    pub fn degree(&self) -> usize {
        self.coeffs.iter().filter_map(UniPoly::degree).max().unwrap_or(0)
    }

    /// `Σ c_i(k) I(k+i)`, or `None` if the sequence is too short.
    pub fn residual(&self, values: &[Rat], k: usize) -> Option<Rat> {
        if k + self.order() >= values.len() {
            return None;
        }
        let kk = from_usize(k);
        Some(
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| c.eval(&kk) * &values[k + i])
                .sum(),
        )
    }

    /// The recurrence satisfied by the moments of `λ f`: `c_i → λ^{m-i} c_i`.
    pub fn scaled(&self, lambda: &Rat) -> Recurrence {
        let m = self.order() as u32;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale(&powi(lambda, m - i as u32)))
            .collect();
        normalize_recurrence(&Recurrence { coeffs })
    }
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})·I(s+{i})")?;
        }
        f.write_str(" = 0")
    }
}

/// `Σ_{i=0}^{r} q_i(t) J^{(i)}(t) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OdeRelation {
    coeffs: Vec<UniPoly>,
}

impl fmt::Display for OdeRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, q) in self.coeffs.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({})·J^({i})", q.format_with("t"))?;
        }
        f.write_str(" = 0")
    }
}

impl OdeRelation {
    pub fn new(coeffs: Vec<UniPoly>) -> Result<Self> {
        if coeffs.len() < 2 || coeffs.last().is_some_and(UniPoly::is_zero) {
            return Err(Error::InvalidArgument("an ODE needs order >= 1 and q_r != 0".into()));
        }
        Ok(OdeRelation { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[UniPoly] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.iter().filter_map(UniPoly::degree).max().unwrap_or(0)
    }

    /// Coefficient of `t^n` in `Σ q_i(t) J^{(i)}(t)` for `J = Σ series[l] t^l`,
    /// or `None` if the series is too short.
    pub fn residual(&self, series: &[Rat], n: usize) -> Option<Rat> {
        if n + self.order() >= series.len() {
            return None;
        }
        let mut acc = Rat::zero();
        for (i, q) in self.coeffs.iter().enumerate() {
            for (j, a) in q.coeffs().iter().enumerate() {
                if a.is_zero() || j > n {
                    continue;
                }
                let m = n - j;
                acc += a * rising(m, i) * &series[m + i];
            }
        }
        Some(acc)
    }
}

/// `(m+1)(m+2)···(m+i)`.
fn rising(m: usize, i: usize) -> Rat {
    (1..=i).fold(Rat::one(), |acc, k| acc * from_usize(m + k))
}

/// Search box and held-out checks for the guessers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub max_order: usize,
    pub max_degree: usize,
    pub verify_count: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_order: 3, max_degree: 4, verify_count: 20 }
    }
}

impl SearchConfig {
    /// Moments needed by `guess_recurrence`.
    pub fn moments_needed(&self) -> usize {
        (self.max_order + 1) * (self.max_degree + 1) + self.max_order + self.verify_count + SLACK
    }

    /// Series terms needed by `guess_ode`.
    pub fn series_needed(&self) -> usize {
        (self.max_order + 1) * (self.max_degree + 1) + self.max_order + SLACK
    }
}

/// Which indices violate a recurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    /// Number of indices `k` with `I(k..=k+m)` available.
    pub tested: usize,
    pub failures: Vec<usize>,
}

impl VerificationReport {
    pub fn verified(&self) -> bool {
        self.tested > 0 && self.failures.is_empty()
    }
}

pub fn verify_recurrence(rec: &Recurrence, mom: &MomentSequence) -> VerificationReport {
    let values = &mom.values;
    let tested = values.len().saturating_sub(rec.order());
    let failures = (0..tested)
        .filter(|&k| !rec.residual(values, k).expect("in range").is_zero())
        .collect();
    VerificationReport { tested, failures }
}

/// Makes `c_0 ≢ 0` by shifting, strips `c_m ≡ 0`, removes the common
/// polynomial factor (when there are at least two coefficients) and the
/// rational content, leaving the leading coefficient of `c_m` positive.
pub fn normalize_recurrence(rec: &Recurrence) -> Recurrence {
    let mut coeffs = rec.coeffs.clone();
    while coeffs.len() > 1 && coeffs.last().is_some_and(UniPoly::is_zero) {
        coeffs.pop();
    }
    let i0 = coeffs.iter().take_while(|c| c.is_zero()).count();
    if i0 == coeffs.len() {
        return Recurrence { coeffs };
    }
    if i0 > 0 {
        let shift = -rat(i0 as i64);
        coeffs = coeffs[i0..].iter().map(|c| c.taylor_shift(&shift)).collect();
    }
    Recurrence { coeffs: make_primitive(coeffs) }
}

fn make_primitive(mut coeffs: Vec<UniPoly>) -> Vec<UniPoly> {
    if coeffs.iter().filter(|c| !c.is_zero()).count() >= 2 {
        let g = coeffs.iter().fold(UniPoly::zero(), |g, c| g.gcd(c));
        if g.degree().is_some_and(|d| d > 0) {
            coeffs = coeffs.iter().map(|c| c.div_rem(&g).0).collect();
        }
    }
    let factor = primitive_factor(&coeffs);
    coeffs.iter().map(|c| c.scale(&factor)).collect()
}

/// Candidate `(order, degree)` pairs: increasing `order + degree`, then order.
fn diagonal(max_order: usize, max_degree: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=max_order + max_degree).flat_map(move |total| {
        (1..=max_order.min(total))
            .filter(move |&m| total - m <= max_degree)
            .map(move |m| (m, total - m))
    })
}

/// Splits a nullspace vector into `m+1` polynomials of degree `≤ δ`.
fn polys_from_vector(v: &[Rat], m: usize, delta: usize) -> Vec<UniPoly> {
    (0..=m)
        .map(|i| UniPoly::new(v[i * (delta + 1)..(i + 1) * (delta + 1)].to_vec()))
        .collect()
}

/// The basis vector whose polynomials have the smallest maximal degree.
fn lowest_degree(basis: &[Vec<Rat>], m: usize, delta: usize) -> Vec<UniPoly> {
    basis
        .iter()
        .map(|v| polys_from_vector(v, m, delta))
        .min_by_key(|ps| ps.iter().filter_map(UniPoly::degree).max().unwrap_or(0))
        .expect("nonempty basis")
}

/// Outcome of `guess_recurrence`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuessedRecurrence {
    pub recurrence: Recurrence,
    pub report: VerificationReport,
    /// Dimension of the nullspace at the winning `(order, degree)`.
    pub nullity: usize,
    /// More than one independent relation at the minimal size; the
    /// lowest-degree representative was returned.
    pub ambiguous: bool,
}

pub fn guess_recurrence(mom: &MomentSequence, search: &SearchConfig) -> Result<GuessedRecurrence> {
    let values = &mom.values;
    let needed = search.moments_needed();
    if values.len() < needed {
        return Err(Error::InsufficientMoments { needed, have: values.len() });
    }
    let powers: Vec<Vec<Rat>> = (0..values.len())
        .map(|k| {
            let kk = from_usize(k);
            let mut p = vec![Rat::one()];
            for j in 1..=search.max_degree {
                let next = &p[j - 1] * &kk;
                p.push(next);
            }
            p
        })
        .collect();
    for (m, delta) in diagonal(search.max_order, search.max_degree) {
        let unknowns = (m + 1) * (delta + 1);
        let rows = unknowns + SLACK;
        let mut a = Matrix::zeros(rows, unknowns);
        for k in 0..rows {
            for i in 0..=m {
                for j in 0..=delta {
                    a.set(k, i * (delta + 1) + j, &powers[k][j] * &values[k + i]);
                }
            }
        }
        let basis = a.nullspace();
        if basis.is_empty() {
            continue;
        }
        let raw = Recurrence { coeffs: lowest_degree(&basis, m, delta) };
        if raw.coeffs.iter().all(UniPoly::is_zero) {
            continue;
        }
        let held_out_ok = (rows..values.len() - m).all(|k| raw.residual(values, k).is_some_and(|r| r.is_zero()));
        if !held_out_ok {
            continue;
        }
        let recurrence = normalize_recurrence(&raw);
        let report = verify_recurrence(&recurrence, mom);
        if !report.verified() {
            continue;
        }
        return Ok(GuessedRecurrence { recurrence, report, nullity: basis.len(), ambiguous: basis.len() > 1 });
    }
    Err(Error::NotFound { max_order: search.max_order, max_degree: search.max_degree })
}

pub fn guess_ode(series: &[Rat], max_order: usize, max_degree: usize) -> Result<OdeRelation> {
    let needed = (max_order + 1) * (max_degree + 1) + max_order + SLACK;
    if series.len() < needed {
        return Err(Error::InsufficientMoments { needed, have: series.len() });
    }
    for (r, d) in diagonal(max_order, max_degree) {
        let unknowns = (r + 1) * (d + 1);
        let rows = series.len() - r;
        let mut a = Matrix::zeros(rows, unknowns);
        for n in 0..rows {
            for i in 0..=r {
                for j in 0..=d.min(n) {
                    let m = n - j;
                    a.set(n, i * (d + 1) + j, rising(m, i) * &series[m + i]);
                }
            }
        }
        let basis = a.nullspace();
        if basis.is_empty() {
            continue;
        }
        let mut coeffs = lowest_degree(&basis, r, d);
        while coeffs.len() > 1 && coeffs.last().is_some_and(UniPoly::is_zero) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            continue;
        }
        return OdeRelation::new(make_primitive(coeffs));
    }
    Err(Error::NotFound { max_order, max_degree })
}

/// The recurrence read off from an ODE before normalization:
/// `c_u(s) = Σ_{i-j+d=u} a_{ij} P_{ij}(s+d)` with
/// `P_{ij}(s) = (s-j+1)(s-j+2)···(s-j+i)`, `d = max deg q_i`.
pub fn ode_to_recurrence_raw(ode: &OdeRelation) -> Recurrence {
    let r = ode.order();
    let d = ode.degree();
    let mut coeffs = vec![UniPoly::zero(); r + d + 1];
    for (i, q) in ode.coeffs.iter().enumerate() {
        for (j, a) in q.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            // P_{ij}(s + d) = Π_{k=1}^{i} (s + d - j + k)
            let p = (1..=i).fold(UniPoly::one(), |acc, k| {
                let root = -rat((d + k) as i64 - j as i64);
                &acc * &UniPoly::linear_root(&root)
            });
            let u = i + d - j;
            coeffs[u] = &coeffs[u] + &p.scale(a);
        }
    }
    Recurrence { coeffs }
}

pub fn ode_to_recurrence(ode: &OdeRelation) -> Recurrence {
    normalize_recurrence(&ode_to_recurrence_raw(ode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::parse_poly;
    use crate::rational::ratio;
    use crate::simplex::{moments, Domain};

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    fn seq(f: &str, n: usize, len: usize) -> MomentSequence {
        let names: Vec<String> = crate::mpoly::affine_names(n);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        moments(&parse_poly(f, &refs).unwrap(), &Domain::standard(n), len - 1).unwrap()
    }

    use alloc::string::String;

    /// Same recurrence up to a nonzero rational factor.
    fn proportional(a: &Recurrence, b: &[UniPoly]) -> bool {
        a.coeffs().len() == b.len() && {
            let x = normalize_recurrence(&Recurrence { coeffs: b.to_vec() });
            &x == a
        }
    }

    #[test]
    fn recovers_harmonic_moments() {
        let g = guess_recurrence(&seq("x1", 1, 60), &SearchConfig::default()).unwrap();
        assert!(proportional(&g.recurrence, &[p(&[-1, -1]), p(&[2, 1])]), "{}", g.recurrence);
        assert!(g.report.verified());
        assert!(!g.ambiguous);
    }

    #[test]
    fn recovers_beta_moments() {
        let g = guess_recurrence(&seq("x1 - x1^2", 1, 60), &SearchConfig::default()).unwrap();
        let c0 = -&(&p(&[1, 1]) * &p(&[1, 1]));
        let c1 = &p(&[2, 2]) * &p(&[3, 2]);
        assert!(proportional(&g.recurrence, &[c0, c1]), "{}", g.recurrence);
    }

    #[test]
    fn recovers_geometric_moments() {
        let g = guess_recurrence(&seq("2", 1, 60), &SearchConfig::default()).unwrap();
        assert_eq!(g.recurrence.coeffs(), &[p(&[-2]), p(&[1])]);
    }

    #[test]
    fn insufficient_and_not_found() {
        let short = seq("x1", 1, 10);
        assert!(matches!(
            guess_recurrence(&short, &SearchConfig::default()),
            Err(Error::InsufficientMoments { .. })
        ));
        // I(k) = 1/(k+1) needs degree 1; forbid it.
        let cfg = SearchConfig { max_order: 1, max_degree: 0, verify_count: 20 };
        assert!(matches!(guess_recurrence(&seq("x1", 1, 60), &cfg), Err(Error::NotFound { .. })));
    }

    #[test]
    fn verification_reports() {
        let rec = Recurrence::new(vec![p(&[-1, -1]), p(&[2, 1])]).unwrap();
        let good = verify_recurrence(&rec, &seq("x1", 1, 31));
        assert!(good.verified());
        assert_eq!(good.tested, 30);
        let bad = verify_recurrence(&rec, &seq("x1^2", 1, 31));
        assert_eq!(bad.failures, (0..30).collect::<Vec<_>>());
        let empty = verify_recurrence(&rec, &MomentSequence::from_values(vec![rat(1)]));
        assert_eq!(empty.tested, 0);
        assert!(!empty.verified());
    }

    #[test]
    fn normalization_cases() {
        let shifted = normalize_recurrence(&Recurrence::new(vec![UniPoly::zero(), p(&[0, 1])]).unwrap());
        assert_eq!(shifted.coeffs(), &[p(&[-1, 1])]);
        let done = Recurrence::new(vec![p(&[-1, -1]), p(&[2, 1])]).unwrap();
        assert_eq!(normalize_recurrence(&done), done);
        let common = Recurrence::new(vec![&p(&[1, 1]) * &p(&[0, 3]), &p(&[1, 1]) * &p(&[5])]).unwrap();
        assert_eq!(normalize_recurrence(&common).coeffs(), &[p(&[0, 3]), p(&[5])]);
    }

    #[test]
    fn ode_for_geometric_series() {
        let series: Vec<Rat> = (0..40).map(|l| powi(&rat(2), l)).collect();
        let ode = guess_ode(&series, 3, 4).unwrap();
        // (1 - 2t) J' - 2 J = 0
        assert_eq!(ode.coeffs(), &[p(&[2]), p(&[-1, 2])]);
        let raw = ode_to_recurrence_raw(&ode);
        assert!(raw.coeffs()[0].is_zero());
        assert_eq!(ode_to_recurrence(&ode).coeffs(), &[p(&[-2]), p(&[1])]);
    }

    #[test]
    fn ode_for_log_series_has_order_two() {
        let series: Vec<Rat> = (0..40).map(|l| ratio(1, l + 1)).collect();
        let ode = guess_ode(&series, 3, 4).unwrap();
        assert_eq!(ode.order(), 2);
        for n in 0..38 {
            assert!(ode.residual(&series, n).unwrap().is_zero());
        }
        // no first-order relation exists at any degree in range
        assert!(matches!(guess_ode(&series, 1, 4), Err(Error::NotFound { .. })));
        let rec = ode_to_recurrence(&ode);
        assert_eq!(rec.coeffs(), &[p(&[-1, -1]), p(&[2, 1])]);
    }

    #[test]
    fn ode_for_constant_series() {
        let series = vec![ratio(3, 7); 20];
        let ode = guess_ode(&series, 2, 2).unwrap();
        // (t - 1) J' + J = 0 for J = c/(1 - t)
        assert_eq!(ode.coeffs(), &[p(&[1]), p(&[-1, 1])]);
        let rec = ode_to_recurrence(&ode);
        assert_eq!(rec.coeffs(), &[p(&[-1]), p(&[1])]);
        assert!(verify_recurrence(&rec, &MomentSequence::from_values(series.clone())).verified());
    }

    #[test]
    fn first_order_ode_converts() {
        // (1 - c t) J' - c J with c = 3
        let ode = OdeRelation::new(vec![p(&[-3]), p(&[1, -3])]).unwrap();
        let raw = ode_to_recurrence_raw(&ode);
        // c_2 = s + 2, c_1 = -3(s + 2) (index shifted by d = 1)
        assert_eq!(raw.coeffs(), &[UniPoly::zero(), p(&[-6, -3]), p(&[2, 1])]);
        assert_eq!(ode_to_recurrence(&ode).coeffs(), &[p(&[-3]), p(&[1])]);
    }

    #[test]
    fn scaling_covariance() {
        let base = guess_recurrence(&seq("x1 - x1^2", 1, 60), &SearchConfig::default()).unwrap();
        let scaled_moments = seq("3/2*x1 - 3/2*x1^2", 1, 60);
        let predicted = base.recurrence.scaled(&ratio(3, 2));
        assert!(verify_recurrence(&predicted, &scaled_moments).verified());
        let guessed = guess_recurrence(&scaled_moments, &SearchConfig::default()).unwrap();
        assert_eq!(guessed.recurrence, predicted);
        let back = guessed.recurrence.scaled(&ratio(2, 3));
        assert!(verify_recurrence(&back, &seq("x1 - x1^2", 1, 60)).verified());
    }

    #[test]
    fn diagonal_order() {
        let v: Vec<_> = diagonal(2, 2).collect();
        assert_eq!(v, vec![(1, 0), (1, 1), (2, 0), (1, 2), (2, 1), (2, 2)]);
    }
}

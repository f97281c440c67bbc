//! Meromorphic continuation of `I(s)` through the recurrence.
//!
//! At a positive integer `s0` the Taylor coefficients come straight from
//! quadrature: `a_l = ∫ f^{s0} log^l f / l!`. Below that, the recurrence is
//! solved for its lowest term, `I(s) = Σ_{i≥1} l_i(s) I(s+i)` with
//! `l_i = -c_i/c_0`, and expansions are combined downward. Poles appear
//! exactly where `c_0` vanishes at the visited integers; their
//! multiplicities are exact because `c_0` has rational coefficients.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::mpoly::MPoly;
use crate::quadrature::{integrate_power_log, power_log_taylor, QuadConfig};
use crate::rational::rat;
use crate::ratfunc::RatFunc;
use crate::recurrence::Recurrence;
use crate::simplex::Domain;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuationConfig {
    pub quad: QuadConfig,
    /// Extra Taylor orders computed at the base integers.
    pub margin: usize,
    /// Largest working order any node may need.
    pub max_working_order: usize,
    /// Direct quadrature is used for `s > s_safe`.
    pub s_safe: f64,
    /// Negative-exponent leading coefficients not exceeding
    /// `pole_significance · err_estimate` are treated as cancelled.
    pub pole_significance: f64,
    /// Relative size of `c_0(σ)` treated as a zero during scalar descent.
    pub scalar_zero_threshold: f64,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        ContinuationConfig {
            quad: QuadConfig::default(),
            margin: 2,
            max_working_order: 24,
            s_safe: 1.0,
            pole_significance: 10.0,
            scalar_zero_threshold: 1e-12,
        }
    }
}

/// `I(s) = Σ_{i=min_exp}^{trunc_order} coeffs[i - min_exp] (s - s0)^i + ...`
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentExpansion {
    pub s0: i64,
    pub min_exp: i64,
    pub coeffs: Vec<f64>,
    pub trunc_order: i64,
    pub err_estimate: f64,
}

impl LaurentExpansion {
    fn from_series(s0: i64, series: &LaurentSeries<f64>, order: i64, err_estimate: f64) -> Self {
        let t = series.truncate(order);
        LaurentExpansion {
            s0,
            min_exp: t.min_exp(),
            coeffs: t.coeffs().to_vec(),
            trunc_order: t.trunc_order(),
            err_estimate,
        }
    }

    /// Coefficient of `(s - s0)^e` (zero below `min_exp`).
    pub fn coeff(&self, e: i64) -> Option<f64> {
        if e > self.trunc_order {
            None
        } else if e < self.min_exp {
            Some(0.0)
        } else {
            Some(self.coeffs[(e - self.min_exp) as usize])
        }
    }

    pub fn pole_order(&self) -> usize {
        if self.min_exp < 0 {
            (-self.min_exp) as usize
        } else {
            0
        }
    }

    fn series(&self) -> LaurentSeries<f64> {
        LaurentSeries::new(self.min_exp, self.coeffs.clone(), self.trunc_order)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleRecord {
    pub location: i64,
    pub order: usize,
    pub leading_coeff: f64,
}

/// Value of the continued function with a first-order error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointValue {
    pub value: f64,
    pub err_estimate: f64,
}

/// Taylor expansion at a positive integer from log-power moments.
pub fn base_expansion(
    f: &MPoly,
    d: &Domain,
    s0: u32,
    order: usize,
    cfg: &QuadConfig,
) -> Result<LaurentExpansion> {
    if s0 < 1 {
        return Err(Error::InvalidArgument("base expansions need s0 >= 1".into()));
    }
    let results = power_log_taylor(f, s0 as f64, order, d, cfg)?;
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut err = 0.0f64;
    for r in results {
        let r = r.require_converged(cfg.tol)?;
        coeffs.push(r.value);
        err = err.max(r.err_estimate);
    }
    Ok(LaurentExpansion { s0: s0 as i64, min_exp: 0, coeffs, trunc_order: order as i64, err_estimate: err })
}

/// Recurrence data shared by every descent.
struct Descent<'a> {
    f: &'a MPoly,
    d: &'a Domain,
    cfg: &'a ContinuationConfig,
    rec: &'a Recurrence,
    multipliers: Vec<Option<RatFunc>>,
    base: BTreeMap<i64, LaurentExpansion>,
}

impl<'a> Descent<'a> {
    fn new(f: &'a MPoly, d: &'a Domain, rec: &'a Recurrence, cfg: &'a ContinuationConfig) -> Result<Self> {
        let c0 = &rec.coeffs()[0];
        if c0.is_zero() || rec.order() == 0 {
            return Err(Error::InvalidArgument(
                "recurrence must be normalized with c_0 != 0 and order >= 1".into(),
            ));
        }
        let multipliers = rec
            .coeffs()
            .iter()
            .skip(1)
            .map(|c| if c.is_zero() { None } else { Some(RatFunc::new(-c, c0.clone()).expect("c_0 != 0")) })
            .collect();
        Ok(Descent { f, d, cfg, rec, multipliers, base: BTreeMap::new() })
    }

    fn order(&self) -> i64 {
        self.rec.order() as i64
    }

    /// Makes sure base expansions at `1..=m` exist with the given orders.
    fn ensure_base(&mut self, needed: &BTreeMap<i64, usize>) -> Result<()> {
        let missing: Vec<(i64, usize)> = needed
            .iter()
            .filter(|(s, &k)| self.base.get(s).is_none_or(|e| (e.trunc_order as usize) < k))
            .map(|(&s, &k)| (s, k))
            .collect();
        let computed = self.compute_bases(&missing)?;
        for e in computed {
            self.base.insert(e.s0, e);
        }
        Ok(())
    }

    #[cfg(feature = "parallel")]
    fn compute_bases(&self, jobs: &[(i64, usize)]) -> Result<Vec<LaurentExpansion>> {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(s, k)| base_expansion(self.f, self.d, s as u32, k, &self.cfg.quad))
            .collect()
    }

    #[cfg(not(feature = "parallel"))]
    fn compute_bases(&self, jobs: &[(i64, usize)]) -> Result<Vec<LaurentExpansion>> {
        jobs.iter()
            .map(|&(s, k)| base_expansion(self.f, self.d, s as u32, k, &self.cfg.quad))
            .collect()
    }

    fn laurent_at(&mut self, s0: i64, order: usize) -> Result<LaurentExpansion> {
        if s0 >= 1 {
            return base_expansion(self.f, self.d, s0 as u32, order, &self.cfg.quad);
        }
        let m = self.order();
        let c0 = &self.rec.coeffs()[0];
        // pass 1: multiplicities of the zeros of c_0 along the path
        let mu: BTreeMap<i64, usize> = (s0..=0).map(|s| (s, c0.root_multiplicity(&rat(s)))).collect();
        // pass 2: working orders, so that every node keeps enough terms
        let mut need: BTreeMap<i64, usize> = BTreeMap::new();
        need.insert(s0, order);
        for s in s0..=0 {
            let here = need.get(&s).copied().unwrap_or(0) + mu[&s];
            for i in 1..=m {
                let e = need.entry(s + i).or_insert(0);
                *e = (*e).max(here);
            }
        }
        let mut base_need = BTreeMap::new();
        for (&s, k) in need.iter_mut() {
            if s >= 1 {
                *k += self.cfg.margin;
                base_need.insert(s, *k);
            }
            if *k > self.cfg.max_working_order {
                return Err(Error::OrderExhausted { needed: *k, cap: self.cfg.max_working_order });
            }
        }
        // pass 3: base data, then combine downward
        self.ensure_base(&base_need)?;
        let mut nodes: BTreeMap<i64, (LaurentSeries<f64>, f64)> = BTreeMap::new();
        for s in 1..=m {
            let e = &self.base[&s];
            nodes.insert(s, (e.series(), e.err_estimate));
        }
        for s in (s0..=0).rev() {
            let target = need.get(&s).copied().unwrap_or(0) as i64;
            let mut acc = LaurentSeries::<f64>::zero(target);
            let mut err = 0.0;
            for (i, mult) in self.multipliers.iter().enumerate() {
                let Some(mult) = mult else { continue };
                let (upper, upper_err) = &nodes[&(s + i as i64 + 1)];
                let factor = mult.expand(&rat(s), target - upper.min_exp()).to_f64();
                acc = acc.add(&factor.mul(upper));
                let size: f64 = factor.coeffs().iter().map(|c| libm::fabs(*c)).sum();
                err += size * upper_err;
            }
            if acc.trunc_order() < target {
                return Err(Error::OrderExhausted { needed: target as usize, cap: acc.trunc_order().max(0) as usize });
            }
            acc = acc.truncate(target);
            while acc.min_exp() < 0
                && !acc.is_zero()
                && libm::fabs(acc.coeffs()[0]) <= self.cfg.pole_significance * err
            {
                acc = acc.without_leading();
            }
            nodes.insert(s, (acc, err));
        }
        let (series, err) = &nodes[&s0];
        Ok(LaurentExpansion::from_series(s0, series, order as i64, *err))
    }
}

/// Laurent expansion of `I` at the integer `s0`, valid through `(s-s0)^order`.
pub fn laurent_at(
    f: &MPoly,
    d: &Domain,
    rec: &Recurrence,
    s0: i64,
    order: usize,
    cfg: &ContinuationConfig,
) -> Result<LaurentExpansion> {
    Descent::new(f, d, rec, cfg)?.laurent_at(s0, order)
}

/// Poles of `I` at the integers `s_min ..= -1`, nearest to zero first.
pub fn pole_report(
    f: &MPoly,
    d: &Domain,
    rec: &Recurrence,
    s_min: i64,
    cfg: &ContinuationConfig,
) -> Result<Vec<PoleRecord>> {
    if s_min > -1 {
        return Err(Error::InvalidArgument(alloc::format!("s_min must be negative, got {s_min}")));
    }
    let mut descent = Descent::new(f, d, rec, cfg)?;
    let mut poles = Vec::new();
    // the deepest start needs the highest base orders, so it fills the cache
    for s0 in s_min..=-1 {
        let e = descent.laurent_at(s0, 0)?;
        if e.min_exp < 0 {
            poles.push(PoleRecord { location: s0, order: e.pole_order(), leading_coeff: e.coeffs[0] });
        }
    }
    poles.reverse();
    Ok(poles)
}

/// `I(s)` at a real point, continued through the recurrence when `s <= s_safe`.
pub fn evaluate_continued(
    f: &MPoly,
    d: &Domain,
    rec: &Recurrence,
    s: f64,
    cfg: &ContinuationConfig,
) -> Result<PointValue> {
    if !s.is_finite() {
        return Err(Error::InvalidArgument("s must be finite".into()));
    }
    if s > cfg.s_safe {
        let r = integrate_power_log(f, s, 0, d, &cfg.quad)?.require_converged(cfg.quad.tol)?;
        return Ok(PointValue { value: r.value, err_estimate: r.err_estimate });
    }
    let descent = Descent::new(f, d, rec, cfg)?;
    if libm::floor(s) == s {
        let e = laurent_at(f, d, rec, s as i64, 0, cfg)?;
        if e.min_exp < 0 {
            return Err(Error::PoleAt { at: s });
        }
        return Ok(PointValue { value: e.coeff(0).unwrap_or(0.0), err_estimate: e.err_estimate });
    }
    let m = descent.order() as usize;
    let shift = libm::floor(cfg.s_safe - s) + 1.0;
    let top = s + shift;
    let starts: Vec<f64> = (0..m).map(|j| top + j as f64).collect();
    let direct = direct_values(f, d, &starts, &cfg.quad)?;
    // window[i] = I(σ + 1 + i)
    let mut window: Vec<(f64, f64)> = direct;
    let coeffs: Vec<_> = rec.coeffs().to_vec();
    let mut sigma = top - 1.0;
    let steps = shift as usize;
    for _ in 0..steps {
        let c: Vec<f64> = coeffs.iter().map(|p| p.eval_f64(sigma)).collect();
        let scale = c.iter().map(|v| libm::fabs(*v)).fold(0.0, f64::max);
        if libm::fabs(c[0]) <= cfg.scalar_zero_threshold * scale {
            return Err(Error::PoleAt { at: sigma });
        }
        let mut value = 0.0;
        let mut err = 0.0;
        for i in 1..=m {
            let l = -c[i] / c[0];
            value += l * window[i - 1].0;
            err += libm::fabs(l) * window[i - 1].1;
        }
        window.insert(0, (value, err));
        window.truncate(m);
        sigma -= 1.0;
    }
    let (value, err_estimate) = window[0];
    Ok(PointValue { value, err_estimate })
}

#[cfg(feature = "parallel")]
fn direct_values(f: &MPoly, d: &Domain, at: &[f64], cfg: &QuadConfig) -> Result<Vec<(f64, f64)>> {
    use rayon::prelude::*;
    at.par_iter()
        .map(|&s| {
            let r = integrate_power_log(f, s, 0, d, cfg)?.require_converged(cfg.tol)?;
            Ok((r.value, r.err_estimate))
        })
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn direct_values(f: &MPoly, d: &Domain, at: &[f64], cfg: &QuadConfig) -> Result<Vec<(f64, f64)>> {
    at.iter()
        .map(|&s| {
            let r = integrate_power_log(f, s, 0, d, cfg)?.require_converged(cfg.tol)?;
            Ok((r.value, r.err_estimate))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpoly::parse_poly;
    use crate::recurrence::{guess_recurrence, SearchConfig};
    use crate::simplex::moments;

    fn setup(text: &str, n: usize) -> (MPoly, Domain, Recurrence) {
        let names: Vec<alloc::string::String> = (1..=n).map(|i| alloc::format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let f = parse_poly(text, &refs).unwrap();
        let d = Domain::standard(n);
        let cfg = SearchConfig::default();
        let seq = moments(&f, &d, cfg.moments_needed()).unwrap();
        let rec = guess_recurrence(&seq, &cfg).unwrap().recurrence;
        (f, d, rec)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn base_expansion_of_x() {
        let (f, d, _) = setup("x1", 1);
        let e = base_expansion(&f, &d, 1, 2, &QuadConfig::default()).unwrap();
        assert_eq!(e.min_exp, 0);
        for (a, b) in e.coeffs.iter().zip([0.5, -0.25, 0.125]) {
            assert!(close(*a, b, 1e-9), "{a} vs {b}");
        }
        let e = base_expansion(&f, &d, 3, 0, &QuadConfig::default()).unwrap();
        assert!(close(e.coeffs[0], 0.25, 1e-10));
    }

    #[test]
    fn base_expansion_of_constant() {
        let (f, d, _) = setup("1", 2);
        let e = base_expansion(&f, &d, 4, 2, &QuadConfig::default()).unwrap();
        assert!(close(e.coeffs[0], 0.5, 1e-12));
        assert_eq!(&e.coeffs[1..], &[0.0, 0.0]);
    }

    #[test]
    fn simple_pole_of_x() {
        let (f, d, rec) = setup("x1", 1);
        let e = laurent_at(&f, &d, &rec, -1, 2, &ContinuationConfig::default()).unwrap();
        assert_eq!(e.min_exp, -1);
        assert_eq!(e.coeffs.len(), 4);
        assert!(close(e.coeffs[0], 1.0, 1e-8));
        for c in &e.coeffs[1..] {
            assert!(close(*c, 0.0, 1e-8), "{c}");
        }
    }

    #[test]
    fn double_pole_of_product() {
        let (f, d, rec) = setup("x1*x2", 2);
        let e = laurent_at(&f, &d, &rec, -1, 0, &ContinuationConfig::default()).unwrap();
        assert_eq!(e.min_exp, -2);
        assert!(close(e.coeffs[0], 1.0, 1e-6), "{:?}", e);
        assert!(close(e.coeffs[1], 0.0, 1e-5), "{:?}", e);
    }

    #[test]
    fn residue_of_beta_integrand() {
        let (f, d, rec) = setup("x1 - x1^2", 1);
        let e = laurent_at(&f, &d, &rec, -1, 0, &ContinuationConfig::default()).unwrap();
        assert_eq!(e.min_exp, -1);
        assert!(close(e.coeffs[0], 2.0, 1e-6), "{:?}", e);
    }

    #[test]
    fn point_values() {
        let (f, d, rec) = setup("x1", 1);
        let cfg = ContinuationConfig::default();
        let v = evaluate_continued(&f, &d, &rec, 2.5, &cfg).unwrap();
        assert!(close(v.value, 1.0 / 3.5, 1e-8));
        let v = evaluate_continued(&f, &d, &rec, -2.5, &cfg).unwrap();
        assert!(close(v.value, -2.0 / 3.0, 1e-7), "{v:?}");
        assert!(matches!(evaluate_continued(&f, &d, &rec, -1.0, &cfg), Err(Error::PoleAt { .. })));
        let v = evaluate_continued(&f, &d, &rec, -2.0, &cfg).unwrap();
        assert!(close(v.value, -1.0, 1e-7), "{v:?}");
    }

    #[test]
    fn constant_is_entire() {
        let (f, d, rec) = setup("1", 1);
        let cfg = ContinuationConfig::default();
        let v = evaluate_continued(&f, &d, &rec, -7.3, &cfg).unwrap();
        assert!(close(v.value, 1.0, 1e-10), "{v:?}");
        assert!(pole_report(&f, &d, &rec, -5, &cfg).unwrap().is_empty());
    }

    #[test]
    fn pole_reports() {
        let cfg = ContinuationConfig::default();
        let (f, d, rec) = setup("x1", 1);
        let poles = pole_report(&f, &d, &rec, -3, &cfg).unwrap();
        assert_eq!(poles.len(), 1);
        assert_eq!((poles[0].location, poles[0].order), (-1, 1));
        assert!(close(poles[0].leading_coeff, 1.0, 1e-8));
        let (f, d, rec) = setup("x1*x2", 2);
        let poles = pole_report(&f, &d, &rec, -1, &cfg).unwrap();
        assert_eq!(poles.len(), 1);
        assert_eq!((poles[0].location, poles[0].order), (-1, 2));
    }

    #[test]
    fn descent_agrees_with_direct_expansion_at_two() {
        let cfg = ContinuationConfig::default();
        for text in ["x1", "x1 - x1^2"] {
            let (f, d, rec) = setup(text, 1);
            let mut descent = Descent::new(&f, &d, &rec, &cfg).unwrap();
            let m = rec.order() as i64;
            let mut need = BTreeMap::new();
            for s in 3..=2 + m {
                need.insert(s, 4usize);
            }
            descent.ensure_base(&need).unwrap();
            // one scalar step of the descent in series form, at s0 = 2
            let mut acc = LaurentSeries::<f64>::zero(3);
            let mut err = 0.0;
            for (i, mult) in descent.multipliers.iter().enumerate() {
                let Some(mult) = mult else { continue };
                let up = &descent.base[&(3 + i as i64)];
                let factor = mult.expand(&rat(2), 3).to_f64();
                acc = acc.add(&factor.mul(&up.series()));
                err += factor.coeffs().iter().map(|c| c.abs()).sum::<f64>() * up.err_estimate;
            }
            let direct = base_expansion(&f, &d, 2, 3, &cfg.quad).unwrap();
            for k in 0..=3 {
                let a = acc.coeff(k).unwrap();
                let b = direct.coeff(k).unwrap();
                assert!((a - b).abs() <= 10.0 * (err + direct.err_estimate) + 1e-12, "{text} k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn order_cap_is_enforced() {
        let (f, d, rec) = setup("x1", 1);
        let cfg = ContinuationConfig { max_working_order: 3, ..Default::default() };
        assert!(matches!(laurent_at(&f, &d, &rec, -1, 2, &cfg), Err(Error::OrderExhausted { .. })));
    }
}

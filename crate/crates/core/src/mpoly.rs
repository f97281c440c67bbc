//! Sparse multivariate polynomials over `Rat`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{to_f64, Rat};

/// Exponent vector of a monomial.
pub type Exponents = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, Rat>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rat) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rat::one())
    }

    /// The coordinate `x_{index}` (0-based).
    pub fn var(nvars: usize, index: usize) -> Self {
        assert!(index < nvars);
        let mut e = vec![0; nvars];
        e[index] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rat::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Rat)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(e, _)| e.iter().all(|&k| k == 0))
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    /// `self^k` by binary exponentiation.
    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn eval(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(point)
                    .fold(c.clone(), |acc, (&k, x)| acc * crate::rational::powi(x, k))
            })
            .sum()
    }

    /// Substitutes `x_i = offset[i] + Σ_k linear[i][k] y_k`, giving a
    /// polynomial in `y_0 .. y_{m-1}` with `m = linear[i].len()`.
    pub fn compose_affine(&self, offset: &[Rat], linear: &[Vec<Rat>]) -> Self {
        assert_eq!(offset.len(), self.nvars);
        assert_eq!(linear.len(), self.nvars);
        let m = linear.first().map_or(0, Vec::len);
        let images: Vec<MPoly> = (0..self.nvars)
            .map(|i| {
                let mut p = Self::constant(m, offset[i].clone());
                for (k, a) in linear[i].iter().enumerate() {
                    p = p.add(&Self::var(m, k).scale(a));
                }
                p
            })
            .collect();
        let mut powers: Vec<Vec<MPoly>> = images.iter().map(|p| vec![Self::one(m), p.clone()]).collect();
        let mut out = Self::zero(m);
        for (e, c) in &self.terms {
            let mut term = Self::constant(m, c.clone());
            for (i, &k) in e.iter().enumerate() {
                let k = k as usize;
                while powers[i].len() <= k {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                if k > 0 {
                    term = term.mul(&powers[i][k]);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Float copy for fast repeated evaluation.
    pub fn to_float(&self) -> FloatPoly {
        FloatPoly::new(self)
    }

    /// Formats with the given variable names.
    pub fn format_with(&self, names: &[String]) -> String {
        use core::fmt::Write;
        assert_eq!(names.len(), self.nvars);
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .zip(names)
                .filter(|(&k, _)| k > 0)
                .map(|(&k, name)| if k == 1 { name.clone() } else { alloc::format!("{name}^{k}") })
                .collect();
            if mono.is_empty() {
                let _ = write!(out, "{mag}");
            } else {
                if !mag.is_one() {
                    let _ = write!(out, "{mag}*");
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

/// Default variable names `x1 .. xn`.
pub fn affine_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| alloc::format!("x{i}")).collect()
}

/// Homogeneous variable names `x0 .. xn`.
pub fn homogeneous_names(n: usize) -> Vec<String> {
    (0..=n).map(|i| alloc::format!("x{i}")).collect()
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(&affine_names(self.nvars)))
    }
}

/// Substitutes `x0 = 1 - x1 - ... - xn` into a polynomial in `x0 .. xn`.
pub fn restrict_chart(f: &MPoly) -> Result<MPoly> {
    if f.nvars() < 2 {
        return Err(Error::InvalidArgument(
            "the homogeneous chart needs at least x0 and x1".into(),
        ));
    }
    let n = f.nvars() - 1;
    let mut offset = vec![Rat::zero(); n + 1];
    offset[0] = Rat::one();
    let linear: Vec<Vec<Rat>> = (0..=n)
        .map(|i| {
            (0..n)
                .map(|k| match i {
                    0 => -Rat::one(),
                    _ if k + 1 == i => Rat::one(),
                    _ => Rat::zero(),
                })
                .collect()
        })
        .collect();
    Ok(f.compose_affine(&offset, &linear))
}

/// Float polynomial with precomputed coefficients.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    nvars: usize,
    max_exp: usize,
    terms: Vec<(f64, Vec<u32>)>,
}

impl FloatPoly {
    fn new(p: &MPoly) -> Self {
        let max_exp = p.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0) as usize;
        FloatPoly {
            nvars: p.nvars,
            max_exp,
            terms: p.terms.iter().map(|(e, c)| (to_f64(c), e.clone())).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        if self.max_exp <= 1 {
            return self
                .terms
                .iter()
                .map(|(c, e)| e.iter().zip(x).fold(*c, |acc, (&k, &xi)| if k == 1 { acc * xi } else { acc }))
                .sum();
        }
        let stride = self.max_exp + 1;
        let mut pw = vec![1.0; self.nvars * stride];
        for (i, &xi) in x.iter().enumerate().take(self.nvars) {
            for k in 1..stride {
                pw[i * stride + k] = pw[i * stride + k - 1] * xi;
            }
        }
        self.terms
            .iter()
            .map(|(c, e)| {
                e.iter()
                    .enumerate()
                    .fold(*c, |acc, (i, &k)| acc * pw[i * stride + k as usize])
            })
            .sum()
    }
}

pub fn parse_poly(text: &str, var_names: &[&str]) -> Result<MPoly> {
    Parser { src: text.as_bytes(), pos: 0, names: var_names }.poly()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [&'a str],
}

impl Parser<'_> {
    fn err<T>(&self, message: &str) -> Result<T> {
        Err(Error::Parse { position: self.pos, message: message.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let digits = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Ok(digits.parse().expect("digits"))
    }

    fn small_integer(&mut self) -> Result<u32> {
        let start = self.pos;
        let v = self.integer()?;
        u32::try_from(v)
            .map_err(|_| Error::Parse { position: start, message: "exponent too large".to_string() })
    }

    fn identifier(&mut self) -> Option<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        let ok_start = |b: u8| b.is_ascii_alphabetic() || b == b'_';
        if !self.src.get(self.pos).copied().is_some_and(ok_start) {
            return None;
        }
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        Some((start, String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()))
    }

    fn poly(&mut self) -> Result<MPoly> {
        let n = self.names.len();
        if n == 0 {
            return Err(Error::InvalidArgument("no variables given".into()));
        }
        let mut out = MPoly::zero(n);
        let mut first = true;
        loop {
            let negative = if self.eat(b'-') {
                true
            } else if self.eat(b'+') {
                false
            } else if first {
                false
            } else if self.peek().is_none() {
                break;
            } else {
                return self.err("expected `+` or `-`");
            };
            first = false;
            let (e, c) = self.term()?;
            out.add_term(e, if negative { -c } else { c });
            if self.peek().is_none() {
                break;
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Exponents, Rat)> {
        let n = self.names.len();
        let mut coeff = Rat::one();
        let mut exps = vec![0u32; n];
        let mut has_coeff = false;
        let mut need_factor = false;
        if self.peek().is_some_and(|b| b.is_ascii_digit()) {
            let num = self.integer()?;
            let den = if self.eat(b'/') { self.integer()? } else { BigInt::one() };
            if den.is_zero() {
                return self.err("zero denominator");
            }
            coeff = Rat::new(num, den);
            has_coeff = true;
            need_factor = self.eat(b'*');
        }
        let mut has_factor = false;
        loop {
            let Some((at, name)) = self.identifier() else {
                if need_factor {
                    return self.err("expected a variable after `*`");
                }
                break;
            };
            let Some(idx) = self.names.iter().position(|v| *v == name) else {
                return Err(Error::UnknownVariable { name, position: at });
            };
            let k = if self.eat(b'^') { self.small_integer()? } else { 1 };
            exps[idx] += k;
            has_factor = true;
            need_factor = self.eat(b'*');
            if !need_factor {
                break;
            }
        }
        if !has_coeff && !has_factor {
            return self.err("expected a coefficient or a variable");
        }
        Ok((exps, coeff))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, ratio};
    use proptest::prelude::*;

    fn x(n: usize, i: usize) -> MPoly {
        MPoly::var(n, i)
    }

    #[test]
    fn parses_monomial_and_sum() {
        let p = parse_poly("x1*x2", &["x1", "x2"]).unwrap();
        assert_eq!(p, x(2, 0).mul(&x(2, 1)));
        let q = parse_poly("3/2*x1^3 + x1", &["x1"]).unwrap();
        assert_eq!(q.num_terms(), 2);
        assert_eq!(q.eval(&[rat(2)]), rat(14));
        let r = parse_poly(" - 2 x1 ^2 + 1/3 - x1*x1", &["x1"]).unwrap();
        assert_eq!(r.eval(&[rat(1)]), ratio(-8, 3));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_poly("x3", &["x1", "x2"]),
            Err(Error::UnknownVariable { ref name, position: 0 }) if name == "x3"
        ));
        assert!(matches!(parse_poly("x1 +", &["x1"]), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("x1 x1", &["x1"]), Err(Error::Parse { position: 3, .. })));
        assert!(matches!(parse_poly("", &["x1"]), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("1/0*x1", &["x1"]), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("2* ", &["x1"]), Err(Error::Parse { .. })));
        assert!(matches!(parse_poly("x1*", &["x1"]), Err(Error::Parse { .. })));
    }

    #[test]
    fn print_parse_roundtrip() {
        let names = ["x1", "x2"];
        let p = parse_poly("x2 - 7/3*x1^2*x2 + 5 - x1", &names).unwrap();
        let printed = p.to_string();
        let q = parse_poly(&printed, &names).unwrap();
        assert_eq!(p, q);
        assert_eq!(q.to_string(), printed);
    }

    #[test]
    fn powers() {
        assert_eq!(x(1, 0).pow(0), MPoly::one(1));
        let s = x(2, 0).add(&x(2, 1));
        assert_eq!(s.pow(2), parse_poly("x1^2 + 2*x1*x2 + x2^2", &["x1", "x2"]).unwrap());
        let f = parse_poly("x1 - x1^2", &["x1"]).unwrap();
        let f2 = f.pow(2);
        assert_eq!(f2, parse_poly("x1^2 - 2*x1^3 + x1^4", &["x1"]).unwrap());
        // (1/3 * 2/3)^2 = (2/9)^2
        assert_eq!(f2.eval(&[ratio(1, 3)]), ratio(4, 81));
    }

    #[test]
    fn chart_restriction() {
        let names = ["x0", "x1"];
        let sum = parse_poly("x0 + x1", &names).unwrap();
        assert_eq!(restrict_chart(&sum).unwrap(), MPoly::one(1));
        let prod = parse_poly("x0*x1", &names).unwrap();
        assert_eq!(restrict_chart(&prod).unwrap(), parse_poly("x1 - x1^2", &["x1"]).unwrap());
        let sq = parse_poly("x0^2", &names).unwrap();
        assert_eq!(restrict_chart(&sq).unwrap(), parse_poly("1 - 2*x1 + x1^2", &["x1"]).unwrap());
    }

    #[test]
    fn float_eval_matches_exact() {
        let p = parse_poly("3/2*x1^3*x2 - x2^2 + 1/7", &["x1", "x2"]).unwrap();
        let fp = p.to_float();
        let v = fp.eval(&[0.5, -0.25]);
        let e = to_f64(&p.eval(&[ratio(1, 2), ratio(-1, 4)]));
        assert!((v - e).abs() < 1e-15);
    }

    fn arb_poly(n: usize) -> impl Strategy<Value = MPoly> {
        proptest::collection::vec((proptest::collection::vec(0u32..3, n), -3i64..4), 0..4)
            .prop_map(move |ts| MPoly::from_terms(n, ts.into_iter().map(|(e, c)| (e, rat(c)))))
    }

    fn arb_point(n: usize) -> impl Strategy<Value = Vec<Rat>> {
        proptest::collection::vec((-5i64..6, 1i64..4).prop_map(|(a, b)| ratio(a, b)), n)
    }

    proptest! {
        #[test]
        fn evaluation_is_a_homomorphism(f in arb_poly(2), g in arb_poly(2), p in arb_point(2), k in 0u32..4) {
            prop_assert_eq!(f.mul(&g).eval(&p), f.eval(&p) * g.eval(&p));
            prop_assert_eq!(f.pow(k).eval(&p), crate::rational::powi(&f.eval(&p), k));
        }

        #[test]
        fn power_degree(f in arb_poly(2), k in 0u32..4) {
            if let Some(d) = f.degree() {
                prop_assert_eq!(f.pow(k).degree(), Some(k * d));
            }
        }

        #[test]
        fn chart_commutes_with_products(f in arb_poly(3), g in arb_poly(3)) {
            let lhs = restrict_chart(&f.mul(&g)).unwrap();
            let rhs = restrict_chart(&f).unwrap().mul(&restrict_chart(&g).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn printing_is_stable(f in arb_poly(2)) {
            let names = ["x1", "x2"];
            let once = parse_poly(&f.to_string(), &names).unwrap();
            prop_assert_eq!(&once, &f);
            prop_assert_eq!(once.to_string(), f.to_string());
        }
    }
}

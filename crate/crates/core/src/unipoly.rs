//! Dense univariate polynomials over `Rat`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::rational::{rat, to_f64, Rat};

/// `coeffs[i]` is the coefficient of `s^i`; never has a trailing zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `s`.
    pub fn var() -> Self {
        Self::from_ints(&[0, 1])
    }

    /// `s - a`.
    pub fn linear_root(a: &Rat) -> Self {
        Self::new(vec![-a.clone(), Rat::one()])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rat> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&lc.recip()),
            None => Self::zero(),
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lc = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let q = &rem[k + dd] / &lc;
            if !q.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &q * d;
                }
            }
            quot[k] = q;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Coefficients of `p(a + ε)` as a polynomial in `ε`.
    pub fn taylor_shift(&self, a: &Rat) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = &c[j + 1] * a;
                c[j] += t;
            }
        }
        Self::new(c)
    }

    /// Multiplicity of `a` as a root (0 if `p(a) != 0`, `usize::MAX` for zero).
    pub fn root_multiplicity(&self, a: &Rat) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        self.taylor_shift(a)
            .coeffs
            .iter()
            .take_while(|c| c.is_zero())
            .count()
    }

    /// Clears denominators and integer content, making the leading coefficient
    /// positive. Returns the scale factor that was applied.
    pub fn primitive(&self) -> (Self, Rat) {
        if self.is_zero() {
            return (Self::zero(), Rat::one());
        }
        let factor = primitive_factor(core::slice::from_ref(self));
        (self.scale(&factor), factor)
    }

    /// Formats with the given variable name, e.g. `2*s^2 - 1/3*s + 1`.
    pub fn format_with(&self, var: &str) -> String {
        use core::fmt::Write;
        if self.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => String::from(var),
                _ => alloc::format!("{var}^{i}"),
            };
            if mono.is_empty() {
                let _ = write!(out, "{mag}");
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                let _ = write!(out, "{mag}*{mono}");
            }
        }
        out
    }
}

/// Scale factor that makes a family of polynomials integral and primitive with
/// positive leading coefficient in the last nonzero member.
pub(crate) fn primitive_factor(polys: &[UniPoly]) -> Rat {
    let all = polys.iter().flat_map(|p| p.coeffs.iter());
    let den = crate::rational::common_denominator(all.clone());
    let scaled: Vec<Rat> = all
        .map(|c| c * Rat::from_integer(den.clone()))
        .collect();
    let content = crate::rational::integer_content(scaled.iter());
    if content.is_zero() {
        return Rat::one();
    }
    let mut factor = Rat::new(den, content);
    let last = polys
        .iter()
        .rev()
        .find_map(|p| p.leading())
        .expect("nonzero content implies a nonzero member");
    if last.is_negative() {
        factor = -factor;
    }
    factor
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with("s"))
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for UniPoly {
            type Output = UniPoly;
            fn $m(self, rhs: UniPoly) -> UniPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use alloc::string::ToString;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    #[test]
    fn trims_trailing_zeros() {
        assert_eq!(p(&[1, 2, 0, 0]).degree(), Some(1));
        assert!(p(&[0, 0]).is_zero());
        assert_eq!(p(&[0]).degree(), None);
    }

    #[test]
    fn division_and_gcd() {
        // (s+1)^2 (s+2) and (s+1)(s+3)
        let a = &(&p(&[1, 1]) * &p(&[1, 1])) * &p(&[2, 1]);
        let b = &p(&[1, 1]) * &p(&[3, 1]);
        assert_eq!(a.gcd(&b), p(&[1, 1]));
        let (q, r) = a.div_rem(&p(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(&q * &p(&[1, 1]), a);
    }

    #[test]
    fn shift_and_multiplicity() {
        let a = &p(&[1, 1]) * &p(&[1, 1]);
        assert_eq!(a.root_multiplicity(&rat(-1)), 2);
        assert_eq!(a.root_multiplicity(&rat(0)), 0);
        // (s+1)^2 at s = 1 + e: 4 + 4e + e^2
        assert_eq!(a.taylor_shift(&rat(1)), p(&[4, 4, 1]));
    }

    #[test]
    fn primitive_normalizes_sign_and_content() {
        let q = UniPoly::new(alloc::vec![ratio(-1, 2), ratio(-3, 2)]);
        let (prim, _) = q.primitive();
        assert_eq!(prim, p(&[1, 3]));
    }

    #[test]
    fn formatting() {
        assert_eq!(p(&[1, -2, 1]).to_string(), "s^2 - 2*s + 1");
        assert_eq!(p(&[0, -1]).to_string(), "-s");
        assert_eq!(UniPoly::zero().to_string(), "0");
    }
}

//! Rational functions in one variable and their Laurent expansions.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::laurent::LaurentSeries;
use crate::rational::Rat;
use crate::unipoly::UniPoly;

/// `num / den` in lowest terms with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl RatFunc {
    pub fn new(num: UniPoly, den: UniPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(RatFunc { num, den: UniPoly::one() });
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lc = den.leading().expect("nonzero").recip();
        Ok(RatFunc { num: num.scale(&lc), den: den.scale(&lc) })
    }

    pub fn num(&self) -> &UniPoly {
        &self.num
    }

    pub fn den(&self) -> &UniPoly {
        &self.den
    }

    /// `None` at a pole.
    pub fn eval(&self, x: &Rat) -> Option<Rat> {
        let d = self.den.eval(x);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.num * &other.num, &self.den * &other.den).expect("nonzero denominators")
    }

    /// Laurent expansion of `r(s0 + ε)`, exact through `ε^order`.
    pub fn expand(&self, s0: &Rat, order: i64) -> LaurentSeries<Rat> {
        ratfunc_expand(self, s0, order)
    }
}

pub fn ratfunc_expand(r: &RatFunc, s0: &Rat, order: i64) -> LaurentSeries<Rat> {
    let n = r.num.taylor_shift(s0);
    if n.is_zero() {
        return LaurentSeries::zero(order);
    }
    let d = r.den.taylor_shift(s0);
    let vn = n.coeffs().iter().take_while(|c| c.is_zero()).count();
    let vd = d.coeffs().iter().take_while(|c| c.is_zero()).count();
    let min_exp = vn as i64 - vd as i64;
    if order < min_exp {
        return LaurentSeries::zero(order);
    }
    let len = (order - min_exp + 1) as usize;
    let nn = &n.coeffs()[vn..];
    let dd = &d.coeffs()[vd..];
    // power series division nn / dd with dd[0] != 0
    let inv0 = dd[0].recip();
    let mut q: Vec<Rat> = Vec::with_capacity(len);
    for k in 0..len {
        let mut acc = nn.get(k).cloned().unwrap_or_else(Rat::zero);
        for j in 1..=k.min(dd.len() - 1) {
            acc -= &dd[j] * &q[k - j];
        }
        q.push(acc * &inv0);
    }
    LaurentSeries::new(min_exp, q, order)
}

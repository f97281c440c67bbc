//! Truncated Laurent series in `ε = s - s0`.
//!
//! A series stores coefficients for exponents `min_exp ..= trunc`; anything
//! above `trunc` is unknown. Every operation computes the widest range on
//! which its result is still determined by the inputs.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{to_f64, Rat};

/// Relative size below which a float leading coefficient is treated as zero.
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-12;

/// Coefficient field of a series: exact (`Rat`) or floating (`f64`).
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn magnitude(&self) -> f64;
    /// Whether `self` counts as zero next to a coefficient of size `scale`.
    fn negligible(&self, scale: f64, threshold: f64) -> bool;
}

impl Coeff for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        <Rat as num_traits::One>::one()
    }
    fn magnitude(&self) -> f64 {
        to_f64(&self.abs())
    }
    fn negligible(&self, _scale: f64, _threshold: f64) -> bool {
        self.is_zero()
    }
}

impl Coeff for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn magnitude(&self) -> f64 {
        libm::fabs(*self)
    }
    fn negligible(&self, scale: f64, threshold: f64) -> bool {
        *self == 0.0 || libm::fabs(*self) < threshold * scale
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries<C> {
    min_exp: i64,
    coeffs: Vec<C>,
    trunc: i64,
}

impl<C: Coeff> LaurentSeries<C> {
    /// `coeffs[k]` is the coefficient of `ε^(min_exp + k)`. Entries past
    /// `trunc` are dropped; missing entries up to `trunc` are zero.
    pub fn new(min_exp: i64, coeffs: Vec<C>, trunc: i64) -> Self {
        Self::new_with_threshold(min_exp, coeffs, trunc, DEFAULT_ZERO_THRESHOLD)
    }

    pub fn new_with_threshold(min_exp: i64, mut coeffs: Vec<C>, trunc: i64, threshold: f64) -> Self {
        if trunc < min_exp {
            return Self::zero(trunc);
        }
        let len = (trunc - min_exp + 1) as usize;
        coeffs.resize(len, C::zero());
        let mut s = LaurentSeries { min_exp, coeffs, trunc };
        s.normalize(threshold);
        s
    }

    /// The zero series, known up to `ε^trunc`.
    pub fn zero(trunc: i64) -> Self {
        LaurentSeries { min_exp: trunc, coeffs: vec![C::zero()], trunc }
    }

    pub fn constant(c: C, trunc: i64) -> Self {
        Self::new(0, vec![c], trunc)
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn trunc_order(&self) -> i64 {
        self.trunc
    }

    /// Coefficients for exponents `min_exp ..= trunc_order`.
    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C::zero())
    }

    /// Coefficient of `ε^e`, or `None` when `e` is beyond the truncation.
    pub fn coeff(&self, e: i64) -> Option<C> {
        if e > self.trunc {
            None
        } else if e < self.min_exp {
            Some(C::zero())
        } else {
            Some(self.coeffs[(e - self.min_exp) as usize].clone())
        }
    }

    fn scale(&self) -> f64 {
        self.coeffs.iter().map(Coeff::magnitude).fold(0.0, f64::max)
    }

    fn normalize(&mut self, threshold: f64) {
        let scale = self.scale();
        let lead = self
            .coeffs
            .iter()
            .take_while(|c| c.negligible(scale, threshold))
            .count();
        if lead == self.coeffs.len() {
            *self = Self::zero(self.trunc);
        } else if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_exp += lead as i64;
        }
    }

    /// Forgets everything above `ε^order`.
    pub fn truncate(&self, order: i64) -> Self {
        if order >= self.trunc {
            return self.clone();
        }
        let coeffs = if order >= self.min_exp {
            self.coeffs[..=(order - self.min_exp) as usize].to_vec()
        } else {
            Vec::new()
        };
        Self::new(self.min_exp, coeffs, order)
    }

    /// Drops the leading coefficient (treating it as zero).
    pub fn without_leading(&self) -> Self {
        if self.min_exp >= self.trunc {
            return Self::zero(self.trunc);
        }
        Self::new(self.min_exp + 1, self.coeffs[1..].to_vec(), self.trunc)
    }

    /// Multiplies by `ε^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentSeries {
            min_exp: self.min_exp + k,
            coeffs: self.coeffs.clone(),
            trunc: self.trunc + k,
        }
    }

    pub fn scale_by(&self, c: &C) -> Self {
        Self::new(
            self.min_exp,
            self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
            self.trunc,
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let lo = self.min_exp.min(other.min_exp);
        if trunc < lo {
            return Self::zero(trunc);
        }
        let coeffs = (lo..=trunc)
            .map(|e| self.coeff(e).unwrap() + other.coeff(e).unwrap())
            .collect();
        Self::new(lo, coeffs, trunc)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            trunc: self.trunc,
        }
    }

    /// Truncated Cauchy product.
    pub fn mul(&self, other: &Self) -> Self {
        let lo = self.min_exp + other.min_exp;
        let trunc = (self.trunc + other.min_exp).min(other.trunc + self.min_exp);
        if trunc < lo {
            return Self::zero(trunc);
        }
        let len = (trunc - lo + 1) as usize;
        let mut out = vec![C::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if *a == C::zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(lo, out, trunc)
    }

    pub fn inv(&self) -> Result<Self> {
        self.inv_with_threshold(DEFAULT_ZERO_THRESHOLD)
    }

    pub fn inv_with_threshold(&self, threshold: f64) -> Result<Self> {
        let lead = &self.coeffs[0];
        if self.is_zero() || lead.negligible(self.scale(), threshold) {
            return Err(Error::ZeroSeries);
        }
        let n = self.coeffs.len();
        let mut out: Vec<C> = Vec::with_capacity(n);
        let inv_lead = C::one() / lead.clone();
        out.push(inv_lead.clone());
        for k in 1..n {
            let mut acc = C::zero();
            for j in 1..=k {
                acc = acc + self.coeffs[j].clone() * out[k - j].clone();
            }
            out.push(-(acc * inv_lead.clone()));
        }
        let min_exp = -self.min_exp;
        Ok(Self::new(min_exp, out, min_exp + n as i64 - 1))
    }

    /// Converts the coefficient field (e.g. exact to float).
    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> LaurentSeries<D> {
        LaurentSeries::new(self.min_exp, self.coeffs.iter().map(f).collect(), self.trunc)
    }
}

impl LaurentSeries<Rat> {
    pub fn to_f64(&self) -> LaurentSeries<f64> {
        self.map(to_f64)
    }
}

pub fn laurent_mul<C: Coeff>(a: &LaurentSeries<C>, b: &LaurentSeries<C>) -> LaurentSeries<C> {
    a.mul(b)
}

pub fn laurent_inv<C: Coeff>(a: &LaurentSeries<C>) -> Result<LaurentSeries<C>> {
    a.inv()
}

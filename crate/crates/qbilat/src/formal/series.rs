//! Truncated formal Laurent series in p = q^{1/2} with exact rational
//! coefficients. A series stores its valuation, a dense coefficient window,
//! and the order through which it is known: arithmetic never claims
//! coefficients beyond what the operands support.

use rug::Rational;
use std::fmt;

use crate::error::{Error, Result};

/// Exact rational coefficient; canonical form (positive denominator,
/// reduced fraction) is maintained automatically by the underlying integers.
pub type RationalExact = Rational;

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries {
    /// Exponent of the first stored coefficient; meaningful when nonzero
    /// coefficients exist.
    val: i64,
    /// Dense window c_val .. c_{val + len - 1}; leading coefficient nonzero
    /// unless the series is zero (empty window).
    coeffs: Vec<Rational>,
    /// The series is known modulo p^{order + 1}.
    order: i64,
}

impl LaurentSeries {
    pub fn zero(order: i64) -> Self {
        Self { val: 0, coeffs: Vec::new(), order }
    }

    pub fn constant(c: Rational, order: i64) -> Self {
        Self::monomial(c, 0, order)
    }

    pub fn one(order: i64) -> Self {
        Self::constant(Rational::from(1), order)
    }

    pub fn monomial(c: Rational, k: i64, order: i64) -> Self {
        if c == 0 {
            return Self::zero(order);
        }
        Self { val: k, coeffs: vec![c], order }
    }

    pub fn from_coeffs(val: i64, coeffs: Vec<Rational>, order: i64) -> Self {
        let mut s = Self { val, coeffs, order };
        s.normalize();
        s
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn valuation(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn coeff(&self, k: i64) -> Rational {
        if self.is_zero() || k < self.val {
            return Rational::new();
        }
        let idx = (k - self.val) as usize;
        self.coeffs.get(idx).cloned().unwrap_or_default()
    }

    fn normalize(&mut self) {
        // trim beyond the known order
        if !self.coeffs.is_empty() {
            let max_len = (self.order - self.val + 1).max(0) as usize;
            self.coeffs.truncate(max_len);
        }
        // trim leading zeros
        let lead = self.coeffs.iter().position(|c| *c != 0);
        match lead {
            None => self.coeffs.clear(),
            Some(0) => {}
            Some(k) => {
                self.coeffs.drain(..k);
                self.val += k as i64;
            }
        }
        // trim trailing zeros (cosmetic; order is unaffected)
        while self.coeffs.last().is_some_and(|c| *c == 0) {
            self.coeffs.pop();
        }
    }

    pub fn truncate(&self, order: i64) -> Self {
        let mut out = self.clone();
        out.order = out.order.min(order);
        out.normalize();
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            val: self.val,
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
            order: self.order,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        if self.is_zero() {
            return rhs.truncate(order);
        }
        if rhs.is_zero() {
            return self.truncate(order);
        }
        let val = self.val.min(rhs.val);
        let hi = (self.val + self.coeffs.len() as i64 - 1)
            .max(rhs.val + rhs.coeffs.len() as i64 - 1)
            .min(order);
        if hi < val {
            return Self::zero(order);
        }
        let mut coeffs = vec![Rational::new(); (hi - val + 1) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.val + i as i64;
            if k <= hi {
                coeffs[(k - val) as usize] += c;
            }
        }
        for (i, c) in rhs.coeffs.iter().enumerate() {
            let k = rhs.val + i as i64;
            if k <= hi {
                coeffs[(k - val) as usize] += c;
            }
        }
        Self::from_coeffs(val, coeffs, order)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            // a zero factor contributes its valuation floor to the order
            let order = if self.is_zero() && rhs.is_zero() {
                self.order.min(rhs.order)
            } else if self.is_zero() {
                self.order + rhs.val.min(0)
            } else {
                rhs.order + self.val.min(0)
            };
            return Self::zero(order);
        }
        // known orders: (a + O(p^{Na+1}))(b + O(p^{Nb+1}))
        //   = ab + O(p^{Na+1+val_b}) + O(p^{Nb+1+val_a})
        let order = (self.order + rhs.val).min(rhs.order + self.val);
        let val = self.val + rhs.val;
        if val > order {
            return Self::zero(order);
        }
        let len = (order - val + 1) as usize;
        let mut coeffs = vec![Rational::new(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= len {
                    break;
                }
                coeffs[k] += Rational::from(a * b);
            }
        }
        Self::from_coeffs(val, coeffs, order)
    }

    pub fn mul_rational(&self, c: &Rational) -> Self {
        if *c == 0 {
            return Self::zero(self.order);
        }
        Self {
            val: self.val,
            coeffs: self.coeffs.iter().map(|x| Rational::from(x * c)).collect(),
            order: self.order,
        }
    }

    /// Multiplicative inverse: requires a nonzero leading coefficient. The
    /// result is known to the same relative precision as the input.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible("zero series".into()));
        }
        let rel = (self.order - self.val) as usize; // relative window length - 1
        let c0 = self.coeffs[0].clone();
        debug_assert!(c0 != 0);
        let mut out = vec![Rational::new(); rel + 1];
        let inv0 = Rational::from(c0.recip_ref());
        out[0] = inv0.clone();
        for k in 1..=rel {
            let mut acc = Rational::new();
            for j in 1..=k {
                let cj = if j < self.coeffs.len() {
                    self.coeffs[j].clone()
                } else {
                    Rational::new()
                };
                if cj != 0 {
                    acc += cj * &out[k - j];
                }
            }
            out[k] = -acc * &inv0;
        }
        Ok(Self::from_coeffs(-self.val, out, self.order - 2 * self.val))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn powi(&self, k: i64) -> Result<Self> {
        if k == 0 {
            return Ok(Self::one(self.order - self.val.min(0) * 2));
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// First exponent <= cap with a nonzero coefficient, if any.
    pub fn first_nonzero(&self, cap: i64) -> Option<(i64, Rational)> {
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.val + i as i64;
            if k > cap.min(self.order) {
                break;
            }
            if *c != 0 {
                return Some((k, c.clone()));
            }
        }
        None
    }

    /// Evaluate at a rational point (exact), for cross-backend comparison.
    pub fn eval_at(&self, p: &Rational) -> Result<Rational> {
        use rug::ops::Pow;
        let mut acc = Rational::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.val + i as i64;
            let pk = if k >= 0 {
                p.clone().pow(k as u32)
            } else {
                if *p == 0 {
                    return Err(Error::Domain("negative power of zero".into()));
                }
                p.clone().pow((-k) as u32).recip()
            };
            acc += pk * c;
        }
        Ok(acc)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O(p^{})", self.order + 1);
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let k = self.val + i as i64;
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "({c})p^{k}")?;
            first = false;
        }
        write!(f, " + O(p^{})", self.order + 1)
    }
}

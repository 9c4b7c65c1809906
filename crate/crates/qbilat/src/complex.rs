use rug::float::Round;
use rug::ops::Pow;
use rug::{Assign, Float, Rational};
use std::fmt;

use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

/// Complex number with both components at a fixed binary precision.
///
/// Built on MPFR reals; the complex layer (division, principal log/power,
/// argument conventions) is owned here so the branch rules match the
/// evaluators' contracts exactly: `arg` lands in `(-pi, pi]`, with the
/// negative real axis assigned to `+pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexHP {
    pub re: Float,
    pub im: Float,
}

impl ComplexHP {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn from_f64(ctx: &PrecisionContext, re: f64, im: f64) -> Self {
        Self { re: ctx.float(re), im: ctx.float(im) }
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        Self { re, im: Float::with_val(prec, 0) }
    }

    pub fn from_rational(ctx: &PrecisionContext, r: &Rational) -> Self {
        Self { re: ctx.float(r), im: ctx.zero() }
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        Self { re: ctx.zero(), im: ctx.zero() }
    }

    pub fn one(ctx: &PrecisionContext) -> Self {
        Self { re: ctx.one(), im: ctx.zero() }
    }

    pub fn i(ctx: &PrecisionContext) -> Self {
        Self { re: ctx.zero(), im: ctx.one() }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// The same value carried at a different working precision.
    pub fn raise(&self, prec: u32) -> Self {
        Self {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self { re: self.re.clone() + &rhs.re, im: self.im.clone() + &rhs.im }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self { re: self.re.clone() - &rhs.re, im: self.im.clone() - &rhs.im }
    }

    pub fn neg(&self) -> Self {
        Self { re: -self.re.clone(), im: -self.im.clone() }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let re = self.re.clone() * &rhs.re - self.im.clone() * &rhs.im;
        let im = self.re.clone() * &rhs.im + self.im.clone() * &rhs.re;
        Self { re, im }
    }

    pub fn mul_real(&self, rhs: &Float) -> Self {
        Self { re: self.re.clone() * rhs, im: self.im.clone() * rhs }
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::Pole("division by zero".into()));
        }
        let den = rhs.re.clone().square() + rhs.im.clone().square();
        let re = (self.re.clone() * &rhs.re + self.im.clone() * &rhs.im) / &den;
        let im = (self.im.clone() * &rhs.re - self.re.clone() * &rhs.im) / &den;
        Ok(Self { re, im })
    }

    pub fn recip(&self) -> Result<Self> {
        let prec = self.prec();
        let one = Self { re: Float::with_val(prec, 1), im: Float::with_val(prec, 0) };
        one.div(self)
    }

    /// |z| via hypot.
    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    pub fn abs_sq(&self) -> Float {
        self.re.clone().square() + self.im.clone().square()
    }

    /// Principal argument in `(-pi, pi]`. A zero imaginary part (including
    /// negative zero) is treated as `+0`, so negative reals get `+pi`.
    pub fn arg(&self) -> Float {
        let mut im = self.im.clone();
        if im.is_zero() {
            im.assign(0); // normalize -0 to +0
        }
        im.atan2(&self.re)
    }

    /// Principal logarithm: `ln|z| + i arg z`.
    pub fn ln(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::BranchPoint("log of zero".into()));
        }
        let r = self.abs().ln();
        Ok(Self { re: r, im: self.arg() })
    }

    pub fn exp(&self) -> Self {
        let m = self.re.clone().exp();
        let (sin, cos) = self.im.clone().sin_cos(Float::new(self.prec()));
        Self { re: m.clone() * cos, im: m * sin }
    }

    /// Integer power by repeated squaring; exact on the negative real axis
    /// where the principal-branch route would leak a rounding-sized
    /// imaginary part.
    pub fn powi(&self, n: i64) -> Result<Self> {
        let prec = self.prec();
        if n == 0 {
            return Ok(Self { re: Float::with_val(prec, 1), im: Float::with_val(prec, 0) });
        }
        if self.is_zero() {
            if n > 0 {
                return Ok(Self { re: Float::with_val(prec, 0), im: Float::with_val(prec, 0) });
            }
            return Err(Error::Pole("0 raised to a negative power".into()));
        }
        let mut base = if n < 0 { self.recip()? } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Self { re: Float::with_val(prec, 1), im: Float::with_val(prec, 0) };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.is_zero() {
            let prec = self.prec();
            return Ok(Self { re: Float::with_val(prec, 0), im: Float::with_val(prec, 0) });
        }
        if self.is_real() && self.re.is_sign_positive() {
            return Ok(Self::from_real(self.re.clone().sqrt()));
        }
        let half = Float::with_val(self.prec(), 0.5f64);
        cpow_principal(self, &Self::from_real(half))
    }

    /// Real power of a positive real, kept on the real axis.
    pub fn real_pow(x: &Float, e: &Float) -> Result<Self> {
        if x.is_sign_negative() || x.is_zero() {
            return Err(Error::Domain("real_pow requires a positive base".into()));
        }
        Ok(Self::from_real(Float::with_val(x.prec(), x.pow(e))))
    }

    pub fn to_f64_parts(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Decimal rendering with a fixed significant-digit count; used by the
    /// deterministic report writers.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        format!("{}{}{}i",
            float_decimal(&self.re, digits),
            if self.im.is_sign_negative() { "-" } else { "+" },
            float_decimal(&self.im.clone().abs(), digits))
    }
}

/// Fixed-digit decimal rendering of a Float (deterministic across runs).
pub fn float_decimal(x: &Float, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x.is_zero() {
        return "0".into();
    }
    let (sign, mantissa, exp) = x.to_sign_string_exp_round(10, Some(digits), Round::Nearest);
    let s = if sign { "-" } else { "" };
    format!("{s}0.{mantissa}e{}", exp.unwrap_or(0))
}

/// Principal-branch power `base^expo = exp(expo * Log base)` with
/// `Log` the principal logarithm, `arg` in `(-pi, pi]`.
pub fn cpow_principal(base: &ComplexHP, expo: &ComplexHP) -> Result<ComplexHP> {
    let prec = base.prec();
    if expo.is_zero() {
        return Ok(ComplexHP { re: Float::with_val(prec, 1), im: Float::with_val(prec, 0) });
    }
    if base.is_zero() {
        if expo.is_real() && expo.re.is_sign_positive() {
            return Ok(ComplexHP { re: Float::with_val(prec, 0), im: Float::with_val(prec, 0) });
        }
        return Err(Error::BranchPoint("0 raised to an exponent with non-positive real part".into()));
    }
    // positive real base with real exponent stays on the real axis
    if base.is_real() && base.re.is_sign_positive() && expo.is_real() {
        return Ok(ComplexHP::from_real(Float::with_val(prec, base.re.clone().pow(&expo.re))));
    }
    let ln = base.ln()?;
    Ok(expo.mul(&ln).exp())
}

impl fmt::Display for ComplexHP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal_string(20))
    }
}

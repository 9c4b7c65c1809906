use rug::Float;

use crate::complex::ComplexHP;
use crate::error::{Error, Result};

/// A computed value together with a bound on `|true - value|`.
///
/// Truncation bounds are tracked rigorously by the series and product
/// evaluators; arithmetic rounding is folded in as a small relative slack
/// per operation. Callers compare identity sides using the sum of both
/// sides' bounds.
#[derive(Debug, Clone)]
pub struct Eval {
    pub value: ComplexHP,
    pub err: Float,
}

fn rounding_slack(v: &ComplexHP) -> Float {
    let prec = v.prec();
    v.abs() * Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 3))
}

impl Eval {
    pub fn exact(value: ComplexHP) -> Self {
        let err = Float::with_val(value.prec(), 0);
        Self { value, err }
    }

    pub fn with_abs_err(value: ComplexHP, err: Float) -> Self {
        Self { value, err }
    }

    /// Value assumed accurate to `rel` relative error.
    pub fn with_rel_err(value: ComplexHP, rel: &Float) -> Self {
        let err = value.abs() * rel;
        Self { value, err }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let value = self.value.add(&rhs.value);
        let err = self.err.clone() + &rhs.err + rounding_slack(&value);
        Self { value, err }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let value = self.value.sub(&rhs.value);
        let err = self.err.clone() + &rhs.err + rounding_slack(&value);
        Self { value, err }
    }

    pub fn neg(&self) -> Self {
        Self { value: self.value.neg(), err: self.err.clone() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let value = self.value.mul(&rhs.value);
        let err = self.value.abs() * &rhs.err
            + rhs.value.abs() * &self.err
            + self.err.clone() * &rhs.err
            + rounding_slack(&value);
        Self { value, err }
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        let rabs = rhs.value.abs();
        // refuse to divide when the divisor is indistinguishable from zero
        if rabs <= Float::with_val(rabs.prec(), &rhs.err * 2u32) {
            return Err(Error::Pole(
                "denominator indistinguishable from zero at its error bound".into(),
            ));
        }
        let value = self.value.div(&rhs.value)?;
        let den = rabs.clone() - &rhs.err;
        let err = (self.err.clone() + value.abs() * &rhs.err) / den + rounding_slack(&value);
        Ok(Self { value, err })
    }

    pub fn recip(&self) -> Result<Self> {
        let prec = self.value.prec();
        Eval::exact(ComplexHP::new(
            Float::with_val(prec, 1),
            Float::with_val(prec, 0),
        ))
        .div(self)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let prec = self.value.prec();
        let f = Float::with_val(prec, k);
        Self {
            value: self.value.mul_real(&f),
            err: self.err.clone() * f.abs(),
        }
    }

    pub fn half(&self) -> Self {
        let prec = self.value.prec();
        let f = Float::with_val(prec, 0.5f64);
        Self { value: self.value.mul_real(&f), err: self.err.clone() * &f }
    }

    pub fn abs_value(&self) -> Float {
        self.value.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::PrecisionContext;

    #[test]
    fn bounds_accumulate_through_arithmetic() {
        let ctx = PrecisionContext::default();
        let a = Eval::with_abs_err(ComplexHP::from_f64(&ctx, 2.0, 0.0), ctx.float(1e-30));
        let b = Eval::with_abs_err(ComplexHP::from_f64(&ctx, 3.0, 0.0), ctx.float(1e-31));
        let s = a.add(&b);
        assert!(s.err > ctx.float(1e-30));
        let p = a.mul(&b);
        // |a| * err_b + |b| * err_a ~ 3.2e-30
        assert!(p.err > ctx.float(3e-30) && p.err < ctx.float(4e-30));
        let q = a.div(&b).unwrap();
        assert!(q.err.clone() > 0 && q.err < ctx.float(1e-29));
    }

    #[test]
    fn division_by_uncertain_zero_is_refused() {
        let ctx = PrecisionContext::default();
        let a = Eval::exact(ComplexHP::one(&ctx));
        let b = Eval::with_abs_err(ComplexHP::from_f64(&ctx, 1e-40, 0.0), ctx.float(1e-30));
        assert!(a.div(&b).is_err());
    }
}

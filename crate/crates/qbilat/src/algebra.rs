//! Evaluation algebra shared by the numeric and formal backends.
//!
//! Identity sides are assembled once, generically, from a small vocabulary:
//! field arithmetic, half-integer powers of the base, infinite q-products,
//! theta functions over q and q^2, and the one-over-one bilateral series.
//! The numeric backend instantiates the vocabulary with high-precision
//! complex values carrying error bounds; the formal backend instantiates it
//! with truncated Laurent series over exact rationals.

use std::cell::RefCell;

use crate::complex::ComplexHP;
use crate::error::Result;
use crate::precision::PrecisionContext;
use crate::psi::{psi_bilateral, PsiOptions, PsiSpec};
use crate::qseries::{qpoch_inf, BasePow, QBase};
use crate::theta::theta_series;
use crate::value::Eval;

/// Truncation metadata accumulated across one identity evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct EvalStats {
    pub psi_terms: usize,
    pub poch_factors: usize,
}

pub trait IdentityAlgebra {
    type V: Clone;

    fn int(&self, k: i64) -> Self::V;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn sub(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn neg(&self, a: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn div(&self, a: &Self::V, b: &Self::V) -> Result<Self::V>;
    fn powi(&self, a: &Self::V, k: i64) -> Result<Self::V>;

    /// q^{halves/2}: integer powers of the primitive half power of the base.
    fn q_half_pow(&self, halves: i64) -> Self::V;

    /// (a; Q)_inf with Q = q or q^2.
    fn qpoch(&self, a: &Self::V, bp: BasePow) -> Result<Self::V>;

    /// theta over base Q = q or q^2 (bilateral Gaussian sum).
    fn theta(&self, z: &Self::V, bp: BasePow) -> Result<Self::V>;

    /// One-over-one bilateral basic hypergeometric series with base q.
    fn psi11(&self, a: &Self::V, b: &Self::V, z: &Self::V) -> Result<Self::V>;

    fn one(&self) -> Self::V {
        self.int(1)
    }

    fn half(&self, a: &Self::V) -> Self::V;

    fn inv(&self, a: &Self::V) -> Result<Self::V> {
        self.div(&self.one(), a)
    }
}

/// Numeric instantiation: values are complex numbers with error bounds.
pub struct NumericAlgebra<'a> {
    pub ctx: &'a PrecisionContext,
    pub base: QBase,
    pub psi_opts: PsiOptions,
    stats: RefCell<EvalStats>,
}

impl<'a> NumericAlgebra<'a> {
    pub fn new(ctx: &'a PrecisionContext, base: QBase) -> Self {
        Self { ctx, base, psi_opts: PsiOptions::default(), stats: RefCell::new(EvalStats::default()) }
    }

    pub fn value(&self, z: ComplexHP) -> Eval {
        Eval::exact(z)
    }

    pub fn stats(&self) -> EvalStats {
        *self.stats.borrow()
    }
}

impl<'a> IdentityAlgebra for NumericAlgebra<'a> {
    type V = Eval;

    fn int(&self, k: i64) -> Eval {
        Eval::exact(ComplexHP::from_real(self.ctx.float(k)))
    }

    fn add(&self, a: &Eval, b: &Eval) -> Eval {
        a.add(b)
    }

    fn sub(&self, a: &Eval, b: &Eval) -> Eval {
        a.sub(b)
    }

    fn neg(&self, a: &Eval) -> Eval {
        a.neg()
    }

    fn mul(&self, a: &Eval, b: &Eval) -> Eval {
        a.mul(b)
    }

    fn div(&self, a: &Eval, b: &Eval) -> Result<Eval> {
        a.div(b)
    }

    fn powi(&self, a: &Eval, k: i64) -> Result<Eval> {
        let v = a.value.powi(k)?;
        let rel = self.ctx.tol() * 4u32;
        let mut out = Eval::with_rel_err(v, &rel);
        // first-order propagation of the operand's bound
        if !a.err.is_zero() && !a.value.is_zero() {
            out.err += out.value.abs() * (a.err.clone() / a.value.abs()) * k.unsigned_abs();
        }
        Ok(out)
    }

    fn q_half_pow(&self, halves: i64) -> Eval {
        Eval::exact(ComplexHP::from_real(self.base.q_half_pow(halves)))
    }

    fn qpoch(&self, a: &Eval, bp: BasePow) -> Result<Eval> {
        let q = bp.value(&self.base);
        let r = qpoch_inf(&a.value, &q, self.ctx)?;
        self.stats.borrow_mut().poch_factors += r.factors_used;
        let mut e = r.to_eval();
        // sensitivity of the product to the argument's own bound:
        // d/da log (a; q)_inf = -sum q^k/(1 - a q^k); bounded by 1/((1-q)(1-|a|))
        if !a.err.is_zero() {
            let qa = a.value.abs();
            let denom = (self.ctx.one() - &q) * (self.ctx.one() - qa).abs();
            if denom.cmp0() == Some(std::cmp::Ordering::Greater) {
                e.err += e.value.abs() * &a.err / denom;
            } else {
                e.err += a.err.clone() * 8u32;
            }
        }
        Ok(e)
    }

    fn theta(&self, z: &Eval, bp: BasePow) -> Result<Eval> {
        let mut e = theta_series(&z.value, &self.base, bp, self.ctx)?;
        if !z.err.is_zero() && !z.value.is_zero() {
            // crude sensitivity: theta is entire in z away from 0; scale by |z| derivative estimate
            e.err += e.value.abs() * (z.err.clone() / z.value.abs()) * 8u32;
        }
        Ok(e)
    }

    fn psi11(&self, a: &Eval, b: &Eval, z: &Eval) -> Result<Eval> {
        let spec = PsiSpec::one_one(a.value.clone(), b.value.clone());
        let r = psi_bilateral(&spec, &self.base, &z.value, self.ctx, &self.psi_opts)?;
        self.stats.borrow_mut().psi_terms += r.terms_pos + r.terms_neg;
        Ok(r.value)
    }

    fn half(&self, a: &Eval) -> Eval {
        a.half()
    }
}

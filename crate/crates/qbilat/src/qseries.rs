//! q-dependent special functions: q-shifted factorials (finite, infinite,
//! multi-argument) and the q-gamma function, all with explicit truncation
//! bounds. The base is stored through its half power p = q^{1/2}, so every
//! half-integer power of q in the identity catalog is an integer power of p.

use rug::ops::Pow;
use rug::Float;

use crate::complex::{cpow_principal, ComplexHP};
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use crate::value::Eval;

/// The base through its primitive half power p = q^{1/2}, restricted to
/// real 0 < p < 1. Every half-integer power of q in the catalog is an
/// integer power of p; the even powers are taken from q itself so that
/// exact rational bases keep exact powers (and exact zero factors).
#[derive(Debug, Clone)]
pub struct QBase {
    p: Float,
    q: Float,
}

impl QBase {
    /// Construct from q itself (0 < q < 1); p is the positive square root.
    pub fn from_q(q: Float) -> Result<Self> {
        if !q.is_finite() || q.cmp0() != Some(std::cmp::Ordering::Greater) || q >= 1u32 {
            return Err(Error::Domain(format!("q must lie in (0, 1), got {q}")));
        }
        let p = q.clone().sqrt();
        Ok(Self { p, q })
    }

    pub fn from_q_f64(ctx: &PrecisionContext, q: f64) -> Result<Self> {
        Self::from_q(ctx.float(q))
    }

    /// Construct directly from p = q^{1/2} (0 < p < 1).
    pub fn from_p(p: Float) -> Result<Self> {
        if !p.is_finite() || p.cmp0() != Some(std::cmp::Ordering::Greater) || p >= 1u32 {
            return Err(Error::Domain(format!("p must lie in (0, 1), got {p}")));
        }
        let q = p.clone().square();
        Ok(Self { p, q })
    }

    pub fn p(&self) -> Float {
        self.p.clone()
    }

    pub fn q(&self) -> Float {
        self.q.clone()
    }

    pub fn q_squared(&self) -> Float {
        self.q.clone().square()
    }

    /// q^{halves/2}: even half counts are integer powers of the stored q,
    /// odd ones carry a single factor of p.
    pub fn q_half_pow(&self, halves: i64) -> Float {
        let prec = self.p.prec();
        let whole = halves.div_euclid(2);
        let rem = halves.rem_euclid(2);
        let base = Float::with_val(prec, (&self.q).pow(whole as i32));
        if rem == 0 {
            base
        } else {
            base * &self.p
        }
    }

    /// The same base carried at a different working precision (the half
    /// power is recomputed from q at the new precision).
    pub fn raise(&self, prec: u32) -> Self {
        let q = Float::with_val(prec, &self.q);
        let p = q.clone().sqrt();
        Self { p, q }
    }

    /// q^x for real x.
    pub fn q_pow_real(&self, x: &Float) -> Float {
        let prec = self.p.prec();
        Float::with_val(prec, (&self.q).pow(x))
    }
}

/// Which power of q an infinite product or theta function runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasePow {
    Q,
    QSquared,
}

impl BasePow {
    pub fn value(&self, base: &QBase) -> Float {
        match self {
            BasePow::Q => base.q(),
            BasePow::QSquared => base.q_squared(),
        }
    }
}

/// Result of an infinite-product evaluation: value, a rigorous bound on
/// |true - value| for exact inputs, and the number of factors multiplied.
#[derive(Debug, Clone)]
pub struct QPochResult {
    pub value: ComplexHP,
    pub err_bound: Float,
    pub factors_used: usize,
}

impl QPochResult {
    pub fn to_eval(&self) -> Eval {
        Eval::with_abs_err(self.value.clone(), self.err_bound.clone())
    }
}

/// Finite q-shifted factorial (a; q)_n:
/// 1 for n = 0; (1-a)(1-aq)...(1-aq^{n-1}) for n >= 1;
/// [(1-aq^{-1})...(1-aq^{n})]^{-1} for n <= -1.
pub fn qpoch_finite(
    a: &ComplexHP,
    q: &Float,
    n: i64,
    ctx: &PrecisionContext,
) -> Result<ComplexHP> {
    let one = ComplexHP::one(ctx);
    let mut acc = ComplexHP::one(ctx);
    if n >= 0 {
        let mut aq = a.clone();
        for _ in 0..n {
            acc = acc.mul(&one.sub(&aq));
            aq = aq.mul_real(q);
        }
        Ok(acc)
    } else {
        let qinv = ctx.one() / q;
        let mut aq = a.mul_real(&qinv);
        for k in 1..=(-n) {
            let f = one.sub(&aq);
            if f.is_zero() {
                return Err(Error::Pole(format!(
                    "(a; q)_n factor (1 - a q^-{k}) vanishes"
                )));
            }
            acc = acc.mul(&f);
            aq = aq.mul_real(&qinv);
        }
        acc.recip()
    }
}

/// Infinite product (a; q)_inf, truncated when the remaining factors are
/// provably within the requested tolerance: with S = |a| q^K / (1 - q),
/// the relative deviation of the dropped tail is at most e^S - 1 <= 2S for
/// S <= 1/2. A factor that vanishes exactly makes the product exactly zero.
pub fn qpoch_inf(a: &ComplexHP, q: &Float, ctx: &PrecisionContext) -> Result<QPochResult> {
    let prec = ctx.bits();
    let one = ComplexHP::one(ctx);
    let tol = ctx.tol();
    let mut acc = ComplexHP::one(ctx);
    let mut aq = a.clone();
    let mut k = 0usize;
    let one_minus_q = ctx.one() - q;
    // |a| q^K / (1 - q) < tol/4 makes the tail bound 2S < tol/2
    loop {
        let f = one.sub(&aq);
        if f.is_zero() {
            return Ok(QPochResult {
                value: ComplexHP::zero(ctx),
                err_bound: ctx.zero(),
                factors_used: k + 1,
            });
        }
        acc = acc.mul(&f);
        aq = aq.mul_real(q);
        k += 1;
        let s = aq.abs() / &one_minus_q;
        if s < Float::with_val(prec, &tol / 4u32) {
            let rel = s * 2u32;
            let err = acc.abs() * rel + acc.abs() * &tol;
            return Ok(QPochResult { value: acc, err_bound: err, factors_used: k });
        }
        if k > 10_000_000 {
            return Err(Error::Budget("infinite product did not reach tolerance".into()));
        }
    }
}

/// Product of (a_i; q)_inf over a list, with first-order bound propagation.
pub fn qpoch_multi(args: &[ComplexHP], q: &Float, ctx: &PrecisionContext) -> Result<QPochResult> {
    let mut value = Eval::exact(ComplexHP::one(ctx));
    let mut factors = 0usize;
    for a in args {
        let r = qpoch_inf(a, q, ctx)?;
        factors += r.factors_used;
        value = value.mul(&r.to_eval());
    }
    Ok(QPochResult { value: value.value, err_bound: value.err, factors_used: factors })
}

/// q-gamma function (q; q)_inf / (q^z; q)_inf * (1-q)^{1-z}, principal branch
/// for the power. Pole where (q^z; q)_inf vanishes.
pub fn q_gamma(z: &ComplexHP, base: &QBase, ctx: &PrecisionContext) -> Result<Eval> {
    let q = base.q();
    let qz = cpow_principal(&ComplexHP::from_real(q.clone()), z)?;
    let num = qpoch_inf(&ComplexHP::from_real(q.clone()), &q, ctx)?;
    let den = qpoch_inf(&qz, &q, ctx)?;
    if den.value.is_zero() {
        return Err(Error::Pole(format!("(q^z; q)_inf vanishes at z = {z}")));
    }
    let one = ComplexHP::one(ctx);
    let one_minus_q = ComplexHP::from_real(ctx.one() - &q);
    let pw = cpow_principal(&one_minus_q, &one.sub(z))?;
    let rel = ctx.tol() * 4u32;
    num.to_eval().div(&den.to_eval())?.mul(&Eval::with_rel_err(pw, &rel)).pipe()
}

trait Pipe: Sized {
    fn pipe(self) -> Result<Self> {
        Ok(self)
    }
}
impl Pipe for Eval {}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn c(re: f64, im: f64) -> ComplexHP {
        ComplexHP::from_f64(&ctx(), re, im)
    }

    #[test]
    fn finite_qpoch_cases() {
        let x = ctx();
        let q = x.float(0.5);
        // n = 0 empty product
        let r = qpoch_finite(&c(0.7, 0.1), &q, 0, &x).unwrap();
        assert!(r.sub(&ComplexHP::one(&x)).abs() < x.tol());
        // (2; 1/2)_3 = (1-2)(1-1)(1-1/2) = 0
        let r = qpoch_finite(&c(2.0, 0.0), &q, 3, &x).unwrap();
        assert!(r.is_zero());
        // (1/4; 1/2)_{-1} = 1/(1 - (1/4)*2) = 2
        let r = qpoch_finite(&c(0.25, 0.0), &q, -1, &x).unwrap();
        assert!(r.sub(&c(2.0, 0.0)).abs() < x.tol() * 4u32);
        // pole when a = q^k for 1 <= k <= |n|
        let r = qpoch_finite(&c(0.25, 0.0), &q, -2, &x);
        assert!(matches!(r, Err(Error::Pole(_))));
    }

    #[test]
    fn qpoch_cocycle_mixed_signs() {
        // (a; q)_{m+n} = (a; q)_m (a q^m; q)_n
        let x = ctx();
        let q = x.float(0.35);
        let a = c(0.4, 0.7);
        for m in -3i64..=3 {
            for n in -3i64..=3 {
                let lhs = qpoch_finite(&a, &q, m + n, &x).unwrap();
                let qm = Float::with_val(x.bits(), (&q).pow(m as i32));
                let rhs = qpoch_finite(&a, &q, m, &x)
                    .unwrap()
                    .mul(&qpoch_finite(&a.mul_real(&qm), &q, n, &x).unwrap());
                assert!(
                    lhs.sub(&rhs).abs() < x.tol() * (lhs.abs() + x.one()) * 16u32,
                    "m = {m}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn infinite_product_spot_value() {
        // (1/2; 1/2)_inf ~ 0.2887880951
        let x = ctx();
        let q = x.float(0.5);
        let r = qpoch_inf(&c(0.5, 0.0), &q, &x).unwrap();
        // oracle: direct product with 64 factors at high precision
        let mut oracle = x.one();
        let mut aq = x.float(0.5);
        for _ in 0..64 {
            oracle *= x.one() - &aq;
            aq *= &q;
        }
        assert!((r.value.re.clone() - &oracle).abs() < x.float(1e-18));
        assert!((r.value.re.clone() - x.float(0.288788)).abs() < x.float(1e-6));
    }

    #[test]
    fn empty_multi_product_is_one() {
        let x = ctx();
        let q = x.float(0.3);
        let r = qpoch_multi(&[], &q, &x).unwrap();
        assert!(r.value.sub(&ComplexHP::one(&x)).abs() < x.tol());
        assert_eq!(r.factors_used, 0);
    }

    #[test]
    fn infinite_product_exact_zero() {
        let x = ctx();
        let q = x.float(0.3);
        let r = qpoch_inf(&ComplexHP::one(&x), &q, &x).unwrap();
        assert!(r.value.is_zero());
        assert!(r.err_bound.is_zero());
        // (0; q)_inf = 1
        let r = qpoch_inf(&ComplexHP::zero(&x), &q, &x).unwrap();
        assert!(r.value.sub(&ComplexHP::one(&x)).abs() < r.err_bound.clone() + x.tol());
    }

    #[test]
    fn splitting_identities() {
        let x = ctx();
        let q = x.float(0.4);
        let q2 = x.float(0.4).square();
        let a = c(0.3, 0.55);
        // (a^2; q^2)_inf = (a; q)_inf (-a; q)_inf
        let lhs = qpoch_inf(&a.mul(&a), &q2, &x).unwrap();
        let rhs = qpoch_multi(&[a.clone(), a.neg()], &q, &x).unwrap();
        let diff = lhs.value.sub(&rhs.value).abs();
        assert!(diff < lhs.err_bound.clone() + &rhs.err_bound + x.tol() * 16u32);
        // (a; q)_inf = (a; q^2)_inf (a q; q^2)_inf
        let lhs = qpoch_inf(&a, &q, &x).unwrap();
        let rhs = qpoch_multi(&[a.clone(), a.mul_real(&q)], &q2, &x).unwrap();
        let diff = lhs.value.sub(&rhs.value).abs();
        assert!(diff < lhs.err_bound.clone() + &rhs.err_bound + x.tol() * 16u32);
    }

    #[test]
    fn q_gamma_closed_values() {
        let x = ctx();
        let base = QBase::from_q_f64(&x, 0.5).unwrap();
        // Gamma_q(1) = 1 for every q
        let g = q_gamma(&c(1.0, 0.0), &base, &x).unwrap();
        assert!(g.value.sub(&ComplexHP::one(&x)).abs() < g.err.clone() + x.tol() * 8u32);
        // Gamma_q(2) = 1 for every q
        let g = q_gamma(&c(2.0, 0.0), &base, &x).unwrap();
        assert!(g.value.sub(&ComplexHP::one(&x)).abs() < g.err.clone() + x.tol() * 8u32);
        // Gamma_{1/2}(3) = 1 + q = 1.5
        let g = q_gamma(&c(3.0, 0.0), &base, &x).unwrap();
        assert!(g.value.sub(&c(1.5, 0.0)).abs() < g.err.clone() + x.tol() * 8u32);
        // pole at z = 0
        assert!(matches!(q_gamma(&c(0.0, 0.0), &base, &x), Err(Error::Pole(_))));
    }

    #[test]
    fn qbase_validation() {
        let x = ctx();
        assert!(QBase::from_q_f64(&x, 0.0).is_err());
        assert!(QBase::from_q_f64(&x, 1.0).is_err());
        assert!(QBase::from_q_f64(&x, -0.5).is_err());
        let b = QBase::from_q_f64(&x, 0.25).unwrap();
        assert!((b.p() - x.float(0.5)).abs() < x.tol());
        assert!((b.q_half_pow(3) - x.float(0.125)).abs() < x.tol());
    }
}

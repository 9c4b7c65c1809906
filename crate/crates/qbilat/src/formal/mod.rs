//! Exact verification backend: identities become statements about truncated
//! Laurent series in p = q^{1/2} with rational coefficients, proven
//! coefficient-by-coefficient at rational parameter specializations.
//!
//! Parameters are specialized to exact rationals rather than kept symbolic:
//! the coefficient ring stays Q, and several independent specializations
//! substitute for symbolic generality. The shipped points are a strong
//! heuristic for the identities' truth at each order, not a symbolic proof.

mod series;

pub use series::{LaurentSeries, RationalExact};

use rug::Rational;

use crate::algebra::IdentityAlgebra;
use crate::error::{Error, Result};
use crate::exprs::{eval_clauses, AlgParams};
use crate::identity::IdentityId;
use crate::qseries::BasePow;

/// Rational (beta, w) with alpha = -1/beta^2 and gamma = q/beta derived.
/// The common series argument -p beta w then has valuation exactly 1, and
/// the negative-direction ratio q beta^2 / z has valuation 1 as well, so
/// only |n| <= N bilateral terms contribute below p^{N+1}.
#[derive(Debug, Clone)]
pub struct RationalParams {
    pub beta: Rational,
    pub w: Rational,
}

impl RationalParams {
    pub fn new(beta: Rational, w: Rational) -> Result<Self> {
        if beta == 0 || w == 0 {
            return Err(Error::Domain("beta and w must be nonzero".into()));
        }
        Ok(Self { beta, w })
    }
}

/// The formal engine: all primitive series are built with the same relative
/// window, so products and inverses preserve it and the assembled sides are
/// certified through p^N by the honest order bookkeeping.
pub struct FormalAlgebra {
    /// Certification order: coefficients through p^order are compared.
    pub order: i64,
    /// Relative window used for constructed primitives.
    window: i64,
}

impl FormalAlgebra {
    pub fn new(order: i64) -> Self {
        Self { order, window: order + 4 }
    }

    fn series(&self, c: Rational, k: i64) -> LaurentSeries {
        LaurentSeries::monomial(c, k, k + self.window)
    }

    pub fn rational(&self, c: &Rational) -> LaurentSeries {
        self.series(c.clone(), 0)
    }
}

impl IdentityAlgebra for FormalAlgebra {
    type V = LaurentSeries;

    fn int(&self, k: i64) -> LaurentSeries {
        self.series(Rational::from(k), 0)
    }

    fn add(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a.add(b)
    }

    fn sub(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a.sub(b)
    }

    fn neg(&self, a: &LaurentSeries) -> LaurentSeries {
        a.neg()
    }

    fn mul(&self, a: &LaurentSeries, b: &LaurentSeries) -> LaurentSeries {
        a.mul(b)
    }

    fn div(&self, a: &LaurentSeries, b: &LaurentSeries) -> Result<LaurentSeries> {
        a.div(b)
    }

    fn powi(&self, a: &LaurentSeries, k: i64) -> Result<LaurentSeries> {
        a.powi(k)
    }

    fn q_half_pow(&self, halves: i64) -> LaurentSeries {
        self.series(Rational::from(1), halves)
    }

    fn qpoch(&self, a: &LaurentSeries, bp: BasePow) -> Result<LaurentSeries> {
        let step = match bp {
            BasePow::Q => 2i64,
            BasePow::QSquared => 4,
        };
        ls_qpoch_inf(self, a, step)
    }

    fn theta(&self, z: &LaurentSeries, bp: BasePow) -> Result<LaurentSeries> {
        let half_step = match bp {
            BasePow::Q => 1i64,
            BasePow::QSquared => 2,
        };
        ls_theta(self, z, half_step)
    }

    fn psi11(
        &self,
        a: &LaurentSeries,
        b: &LaurentSeries,
        z: &LaurentSeries,
    ) -> Result<LaurentSeries> {
        ls_psi11(self, a, b, z)
    }

    fn half(&self, a: &LaurentSeries) -> LaurentSeries {
        a.mul_rational(&Rational::from((1, 2)))
    }
}

/// (a; q^{step/2})_inf: only factors whose argument has valuation <= order
/// differ from 1 below the truncation, so the product is finite and exact.
fn ls_qpoch_inf(alg: &FormalAlgebra, a: &LaurentSeries, step: i64) -> Result<LaurentSeries> {
    if a.is_zero() {
        return Ok(LaurentSeries::one(a.order()));
    }
    let v = a.valuation().expect("nonzero");
    if v < 0 {
        return Err(Error::PrecisionContract(format!(
            "infinite product argument must have nonnegative valuation, got {v}"
        )));
    }
    let mut acc = alg.int(1);
    let mut shifted = a.clone();
    let mut k = 0i64;
    while v + step * k <= alg.order {
        acc = acc.mul(&alg.int(1).sub(&shifted));
        shifted = shifted.mul(&alg.q_half_pow(step));
        k += 1;
    }
    Ok(acc)
}

/// Bilateral Gaussian sum over base q^{half_step}: terms with
/// half_step n^2 + n val(z) > order vanish below the truncation, so the sum
/// is finite; the n^2 term dominates in both directions.
fn ls_theta(alg: &FormalAlgebra, z: &LaurentSeries, half_step: i64) -> Result<LaurentSeries> {
    if z.is_zero() {
        return Err(Error::Domain("theta argument must be nonzero".into()));
    }
    let vz = z.valuation().expect("nonzero");
    let mut sum = alg.int(1);
    let neg_z = z.neg();
    let neg_zinv = neg_z.inv()?;
    for (dir, vdir) in [(&neg_z, vz), (&neg_zinv, -vz)] {
        // term_n = q^{half_step n^2 / 2 ...} accumulated stepwise:
        // term_n = term_{n-1} * dir * p^{half_step (2n - 1)}
        let mut term = alg.int(1);
        let mut n = 1i64;
        loop {
            term = term.mul(dir).mul(&alg.q_half_pow(half_step * (2 * n - 1)));
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term);
            let val = term.valuation().expect("nonzero term");
            // once past the order with strictly growing valuations, the
            // remaining terms all vanish below the truncation
            if val > alg.order && half_step * (2 * n + 1) + vdir > 0 {
                break;
            }
            n += 1;
            if n > 4 * (alg.order.abs() + 16) {
                return Err(Error::PrecisionContract(
                    "theta term valuations failed to grow".into(),
                ));
            }
        }
    }
    Ok(sum)
}

/// Exact truncated bilateral sum of the one-over-one series. Valuation
/// preconditions: val(z) >= 1 and val(b/(a z)) >= 1 guarantee termination
/// with only |n| <= order terms contributing.
fn ls_psi11(
    alg: &FormalAlgebra,
    a: &LaurentSeries,
    b: &LaurentSeries,
    z: &LaurentSeries,
) -> Result<LaurentSeries> {
    if a.is_zero() || z.is_zero() {
        return Err(Error::Domain("a and z must be nonzero".into()));
    }
    let vz = z.valuation().expect("nonzero");
    if vz < 1 {
        return Err(Error::PrecisionContract(format!(
            "series argument must have valuation >= 1, got {vz}"
        )));
    }
    let one = alg.int(1);
    // a denominator parameter equal to the base annihilates the whole
    // negative direction at the first step
    let neg_side_vanishes = one.sub(&b.mul(&alg.q_half_pow(-2))).is_zero();
    if !b.is_zero() && !neg_side_vanishes {
        let back = b.mul(&a.mul(z).inv()?);
        if let Some(vb) = back.valuation() {
            if vb < 1 {
                return Err(Error::PrecisionContract(format!(
                    "negative-direction ratio must have valuation >= 1, got {vb}"
                )));
            }
        }
    }

    let mut sum = alg.int(1);

    // positive direction: t_{n+1} = t_n (1 - a q^n)/(1 - b q^n) z
    let mut t = alg.int(1);
    let mut n = 0i64;
    let mut prev_val = 0i64;
    loop {
        let qn = alg.q_half_pow(2 * n);
        let num = one.sub(&a.mul(&qn));
        let den = one.sub(&b.mul(&qn));
        t = t.mul(&num).mul(&den.inv().map_err(|_| {
            Error::Pole(format!("denominator factor (1 - b q^{n}) vanishes"))
        })?);
        t = t.mul(z);
        if t.is_zero() {
            break;
        }
        sum = sum.add(&t);
        n += 1;
        let val = t.valuation().expect("nonzero");
        // valuation increments are nondecreasing, so once past the order on
        // an ascent every later term vanishes below the truncation
        if val > alg.order && val > prev_val {
            break;
        }
        prev_val = val;
        if n > 4 * alg.order + 16 {
            return Err(Error::PrecisionContract(
                "positive-direction valuations failed to grow".into(),
            ));
        }
    }

    // negative direction: t_{n-1} = t_n (1 - b q^{n-1})/((1 - a q^{n-1}) z)
    let z_inv = z.inv()?;
    let mut t = if neg_side_vanishes { LaurentSeries::zero(alg.order) } else { alg.int(1) };
    let mut m = 0i64;
    let mut prev_val = 0i64;
    while !t.is_zero() {
        let qn = alg.q_half_pow(-2 * (m + 1));
        let num = one.sub(&b.mul(&qn));
        let den = one.sub(&a.mul(&qn));
        t = t.mul(&num).mul(&den.inv().map_err(|_| {
            Error::Pole(format!(
                "negative-index denominator factor (1 - a q^-{}) vanishes",
                m + 1
            ))
        })?);
        t = t.mul(&z_inv);
        if t.is_zero() {
            break;
        }
        sum = sum.add(&t);
        m += 1;
        let val = t.valuation().expect("nonzero");
        if val > alg.order && val > prev_val {
            break;
        }
        prev_val = val;
        if m > 4 * alg.order + 16 {
            return Err(Error::PrecisionContract(
                "negative-direction valuations failed to grow".into(),
            ));
        }
    }

    Ok(sum)
}

/// Parameters for a formal check: rational (beta, w), an optional direct
/// theta argument z, and the shift k for the theta shift rule.
#[derive(Debug, Clone)]
pub struct FormalParams {
    pub rp: RationalParams,
    pub z: Option<Rational>,
    pub k: i64,
}

impl FormalParams {
    pub fn from_beta_w(beta: Rational, w: Rational) -> Result<Self> {
        Ok(Self { rp: RationalParams::new(beta, w)?, z: None, k: 1 })
    }
}

/// Outcome of a coefficient-by-coefficient comparison through p^order.
#[derive(Debug, Clone)]
pub struct FormalOutcome {
    pub pass: bool,
    pub order: i64,
    /// First failing order and its (lhs - rhs) coefficient, when any.
    pub first_failure: Option<(i64, Rational)>,
    pub clauses: usize,
}

fn alg_params(alg: &FormalAlgebra, id: IdentityId, fp: &FormalParams) -> Result<AlgParams<LaurentSeries>> {
    use IdentityId::*;
    let beta = alg.rational(&fp.rp.beta);
    let w = alg.rational(&fp.rp.w);
    Ok(match id {
        MAIN1 | MAIN2 | COR1 | COR2 | CO3 | CO4 | CO5 | CORL3 | CORL4 | COROL1 | CO6 | CO7
        | CORO1 | CORO2 => AlgParams::Constrained { beta, w },
        LEM1 | P1 => AlgParams::XiEta { xi: beta, eta: w },
        RAMANUJAN => {
            // the constrained specialization: a = -1/beta, b = -q beta, z = -p beta w
            let a = alg.rational(&fp.rp.beta).inv()?.neg();
            let b = alg
                .rational(&fp.rp.beta)
                .mul(&alg.q_half_pow(2))
                .neg();
            let z = alg
                .rational(&fp.rp.beta)
                .mul(&alg.rational(&fp.rp.w))
                .mul(&alg.q_half_pow(1))
                .neg();
            AlgParams::Ramanujan { a, b, z }
        }
        QBINOM => {
            let a = alg.rational(&fp.rp.beta).inv()?.neg();
            let z = alg
                .rational(&fp.rp.beta)
                .mul(&alg.rational(&fp.rp.w))
                .mul(&alg.q_half_pow(1))
                .neg();
            AlgParams::QBinomial { a, z }
        }
        JTP | THETA_INV | THETA_QDIFF => {
            let z = fp
                .z
                .clone()
                .ok_or_else(|| Error::Usage("this identity needs a rational z".into()))?;
            AlgParams::Theta { z: alg.rational(&z), k: fp.k }
        }
        _ => {
            return Err(Error::Usage(format!(
                "identity {id} has no formal-series check"
            )))
        }
    })
}

/// Evaluate an identity's clause list in the formal algebra (exposed for
/// cross-backend comparisons).
pub fn eval_identity_formal(
    alg: &FormalAlgebra,
    id: IdentityId,
    fp: &FormalParams,
) -> Result<Vec<(LaurentSeries, LaurentSeries)>> {
    let params = alg_params(alg, id, fp)?;
    eval_clauses(alg, id, &params)
}

/// LHS - RHS computed exactly; pass iff every coefficient through p^order
/// is zero, otherwise the first nonzero order and coefficient are reported.
pub fn formal_check(id: IdentityId, fp: &FormalParams, order: i64) -> Result<FormalOutcome> {
    if !IdentityId::formal_checkable().contains(&id) {
        return Err(Error::Usage(format!("identity {id} has no formal-series check")));
    }
    let alg = FormalAlgebra::new(order);
    let params = alg_params(&alg, id, fp)?;
    let clauses = eval_clauses(&alg, id, &params)?;
    let mut first: Option<(i64, Rational)> = None;
    for (lhs, rhs) in &clauses {
        // the bookkeeping must actually certify the requested order
        let known = lhs.order().min(rhs.order());
        if known < order {
            return Err(Error::PrecisionContract(format!(
                "assembled sides are only known through p^{known}, below the requested p^{order}"
            )));
        }
        let diff = lhs.sub(rhs);
        if let Some((k, c)) = diff.first_nonzero(order) {
            if first.as_ref().is_none_or(|(k0, _)| k < *k0) {
                first = Some((k, c));
            }
        }
    }
    Ok(FormalOutcome { pass: first.is_none(), order, first_failure: first, clauses: clauses.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn qpoch_small_orders() {
        let alg = FormalAlgebra::new(4);
        // (p; q)_inf mod p^5: factors k = 0, 1 contribute: (1-p)(1-p^3)
        let p = alg.q_half_pow(1);
        let prod = ls_qpoch_inf(&alg, &p, 2).unwrap();
        let expect = alg.int(1).sub(&alg.q_half_pow(1)).mul(&alg.int(1).sub(&alg.q_half_pow(3)));
        assert!(prod.sub(&expect).first_nonzero(4).is_none());
        // argument with valuation beyond the order: product is 1
        let alg2 = FormalAlgebra::new(3);
        let hi = alg2.q_half_pow(7);
        let prod = ls_qpoch_inf(&alg2, &hi, 2).unwrap();
        assert!(prod.sub(&alg2.int(1)).first_nonzero(3).is_none());
    }

    #[test]
    fn qq_product_mod_p5() {
        // (q; q)_inf mod p^5 = (1 - p^2)(1 - p^4)
        let alg = FormalAlgebra::new(4);
        let q = alg.q_half_pow(2);
        let prod = ls_qpoch_inf(&alg, &q, 2).unwrap();
        let expect = alg.int(1).sub(&alg.q_half_pow(2)).mul(&alg.int(1).sub(&alg.q_half_pow(4)));
        assert!(prod.sub(&expect).first_nonzero(4).is_none());
    }

    #[test]
    fn psi_degenerate_cases() {
        let alg = FormalAlgebra::new(6);
        // z with valuation beyond the order and a vanishing negative side
        // (denominator parameter = q): only the constant term remains
        let a = alg.rational(&r(3, 2));
        let b = alg.q_half_pow(2);
        let z = alg.q_half_pow(9);
        let s = ls_psi11(&alg, &a, &b, &z).unwrap();
        assert_eq!(s.coeff(0), r(1, 1));
        assert!(s.first_nonzero(6).is_some_and(|(k, _)| k == 0));
        // valuation precondition violated
        let z0 = alg.rational(&r(1, 2));
        assert!(matches!(
            ls_psi11(&alg, &a, &b, &z0),
            Err(Error::PrecisionContract(_))
        ));
    }

    #[test]
    fn formal_ramanujan_and_qbinom() {
        let fp = FormalParams::from_beta_w(r(2, 3), r(1, 5)).unwrap();
        let out = formal_check(IdentityId::RAMANUJAN, &fp, 20).unwrap();
        assert!(out.pass, "first failure: {:?}", out.first_failure);
        let out = formal_check(IdentityId::QBINOM, &fp, 20).unwrap();
        assert!(out.pass, "first failure: {:?}", out.first_failure);
    }

    #[test]
    fn formal_ramanujan_two_orders_agree() {
        // the engine at two independent orders is its own oracle
        let fp = FormalParams::from_beta_w(r(2, 3), r(1, 5)).unwrap();
        for order in [20, 40] {
            let out = formal_check(IdentityId::RAMANUJAN, &fp, order).unwrap();
            assert!(out.pass, "order {order}: {:?}", out.first_failure);
        }
    }

    #[test]
    fn formal_theta_identities() {
        let mut fp = FormalParams::from_beta_w(r(2, 3), r(1, 5)).unwrap();
        fp.z = Some(r(2, 3));
        for id in [IdentityId::JTP, IdentityId::THETA_INV] {
            let out = formal_check(id, &fp, 30).unwrap();
            assert!(out.pass, "{id}: {:?}", out.first_failure);
        }
        for k in [-2i64, -1, 1, 2] {
            fp.k = k;
            let out = formal_check(IdentityId::THETA_QDIFF, &fp, 30).unwrap();
            assert!(out.pass, "k = {k}: {:?}", out.first_failure);
        }
    }

    #[test]
    fn formal_main_small_order() {
        let fp = FormalParams::from_beta_w(r(2, 3), r(1, 5)).unwrap();
        let out = formal_check(IdentityId::MAIN1, &fp, 12).unwrap();
        assert!(out.pass, "first failure: {:?}", out.first_failure);
        let out = formal_check(IdentityId::MAIN2, &fp, 12).unwrap();
        assert!(out.pass, "first failure: {:?}", out.first_failure);
    }

    #[test]
    fn formal_order_zero_trivial() {
        let fp = FormalParams::from_beta_w(r(2, 3), r(1, 5)).unwrap();
        let out = formal_check(IdentityId::MAIN1, &fp, 0).unwrap();
        assert!(out.pass);
    }

    #[test]
    fn order_monotonicity() {
        // pass at order N implies pass at every order below N
        let fp = FormalParams::from_beta_w(r(1, 2), r(-1, 3)).unwrap();
        let hi = formal_check(IdentityId::COR1, &fp, 16).unwrap();
        assert!(hi.pass);
        for n in [0, 4, 9] {
            assert!(formal_check(IdentityId::COR1, &fp, n).unwrap().pass);
        }
    }
}

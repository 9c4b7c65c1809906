//! General bilateral basic hypergeometric series and the Ramanujan closed
//! form for its one-over-one instance. Symmetric partial sums with geometric
//! tail bounds on each side of the annulus.

use rug::Float;

use crate::complex::ComplexHP;
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use crate::qseries::{qpoch_multi, QBase};
use crate::value::Eval;

/// Numerator and denominator parameter lists of an r-psi-s series. The
/// extra factor {(-1)^n q^{n(n-1)/2}}^{s-r} is applied exactly when s != r.
#[derive(Debug, Clone)]
pub struct PsiSpec {
    pub numerators: Vec<ComplexHP>,
    pub denominators: Vec<ComplexHP>,
}

impl PsiSpec {
    pub fn one_one(a: ComplexHP, b: ComplexHP) -> Self {
        Self { numerators: vec![a], denominators: vec![b] }
    }

    fn excess(&self) -> i64 {
        self.denominators.len() as i64 - self.numerators.len() as i64
    }
}

/// Evaluation options: term budget and the annulus safety margin. The
/// margin rejects |z| within 1e-3 of either convergence boundary, where the
/// geometric tail bounds blow up; `override_margin` accepts such points
/// anyway (the bounds still hold, they are just expensive).
#[derive(Debug, Clone)]
pub struct PsiOptions {
    pub max_terms: usize,
    pub margin: f64,
    pub override_margin: bool,
}

impl Default for PsiOptions {
    fn default() -> Self {
        Self { max_terms: 200_000, margin: 1e-3, override_margin: false }
    }
}

/// Value plus truncation metadata.
#[derive(Debug, Clone)]
pub struct PsiResult {
    pub value: Eval,
    pub terms_pos: usize,
    pub terms_neg: usize,
}

fn prod_abs(v: &[ComplexHP], ctx: &PrecisionContext) -> Float {
    let mut acc = ctx.one();
    for x in v {
        acc *= x.abs();
    }
    acc
}

/// Bilateral series sum_n prod(a_i; q)_n / prod(b_j; q)_n [(-1)^n q^{n(n-1)/2}]^{s-r} z^n.
pub fn psi_bilateral(
    spec: &PsiSpec,
    base: &QBase,
    z: &ComplexHP,
    ctx: &PrecisionContext,
    opts: &PsiOptions,
) -> Result<PsiResult> {
    let q = base.q();
    let excess = spec.excess();
    if excess < 0 {
        return Err(Error::Domain(
            "more numerator than denominator parameters: the series diverges for z != 0".into(),
        ));
    }
    if z.is_zero() {
        return Err(Error::Domain("z must be nonzero".into()));
    }

    let z_abs = z.abs();
    // denominators equal to the base make every negative-index term vanish
    let unilateral = spec
        .denominators
        .iter()
        .any(|b| b.is_real() && b.re == q);

    let neg_ratio = if unilateral {
        ctx.zero()
    } else {
        let num = prod_abs(&spec.denominators, ctx);
        let den = prod_abs(&spec.numerators, ctx) * &z_abs;
        if den.is_zero() {
            return Err(Error::Domain("numerator parameters must be nonzero".into()));
        }
        num / den
    };

    if excess == 0 {
        let margin = ctx.float(opts.margin);
        let hi_ok = z_abs.clone() + &margin <= 1u32;
        // |b.../a...| < |z| i.e. neg_ratio * |z| < |z| ... neg_ratio < 1 with margin
        let lo_ok = unilateral || neg_ratio.clone() + &margin <= 1u32;
        if !opts.override_margin && (!hi_ok || !lo_ok) {
            return Err(Error::Domain(format!(
                "outside the convergence annulus (margin {:.0e}): |z| = {}, negative-side ratio = {}",
                opts.margin, z_abs, neg_ratio
            )));
        }
        if z_abs >= 1u32 || neg_ratio >= 1u32 {
            return Err(Error::Domain(format!(
                "outside the convergence annulus: |z| = {z_abs}, negative-side ratio = {neg_ratio}"
            )));
        }
    } else if z_abs >= 1u32 && !opts.override_margin {
        // extra Gaussian factors dominate eventually; keep the same outer bound
        return Err(Error::Domain(format!("|z| must be below 1, got {z_abs}")));
    }

    let tol = ctx.tol();
    let one = ComplexHP::one(ctx);
    let mut sum = Eval::exact(ComplexHP::one(ctx));
    let mut tail_err = ctx.zero();
    let terms_pos;
    let mut terms_neg = 0usize;

    // positive direction: ratio t_{n+1}/t_n = prod(1 - a_i q^n)/prod(1 - b_j q^n)
    //                                         * z * [(-1) q^n]^{s-r}
    {
        let mut t = ComplexHP::one(ctx);
        let mut t_err = ctx.zero();
        let eps = ctx.float(Float::i_exp(1, -(ctx.bits() as i32) + 5));
        let mut qn = ctx.one(); // q^n
        let mut n = 0usize;
        loop {
            let mut ratio = z.clone();
            for a in &spec.numerators {
                ratio = ratio.mul(&one.sub(&a.mul_real(&qn)));
            }
            for b in &spec.denominators {
                let f = one.sub(&b.mul_real(&qn));
                if f.is_zero() {
                    return Err(Error::Pole(format!(
                        "denominator factor (1 - b q^{n}) vanishes"
                    )));
                }
                ratio = ratio.div(&f)?;
            }
            if excess > 0 {
                let extra = ComplexHP::from_real(-qn.clone()).powi(excess)?;
                ratio = ratio.mul(&extra);
            }
            t = t.mul(&ratio);
            t_err = t_err * ratio.abs() + t.abs() * &eps;
            qn *= &q;
            n += 1;
            if t.is_zero() {
                break; // numerator factor vanished: side truncates exactly
            }
            sum = sum.add(&Eval::with_abs_err(t.clone(), t_err.clone()));
            // geometric bound on everything past this term
            let mut rho = z_abs.clone();
            for a in &spec.numerators {
                rho *= ctx.one() + a.abs() * &qn;
            }
            let mut den_ok = true;
            for b in &spec.denominators {
                let d = ctx.one() - b.abs() * &qn;
                if d.cmp0() != Some(std::cmp::Ordering::Greater) {
                    den_ok = false;
                    break;
                }
                rho /= d;
            }
            if excess > 0 {
                rho *= Float::with_val(ctx.bits(), rug::ops::Pow::pow(&qn, excess as i32));
            }
            if den_ok && rho < 1u32 {
                let tail = t.abs() * &rho / (ctx.one() - &rho);
                if tail < tol.clone() * (sum.abs_value() + ctx.one()) {
                    tail_err += tail;
                    break;
                }
            }
            if n >= opts.max_terms {
                return Err(Error::Budget(format!(
                    "positive direction: {} terms insufficient",
                    opts.max_terms
                )));
            }
        }
        terms_pos = n;
    }

    // negative direction: ratio t_{n-1}/t_n = prod(1 - b_j q^{n-1})/prod(1 - a_i q^{n-1})
    //                                          / z * [(-1)^{s-r} q^{-(n-1)(s-r)}]
    if !unilateral {
        let qinv = ctx.one() / &q;
        let mut t = ComplexHP::one(ctx);
        let mut t_err = ctx.zero();
        let eps = ctx.float(Float::i_exp(1, -(ctx.bits() as i32) + 5));
        let mut qn = qinv.clone(); // q^{n-1} for current n (starts at n = 0)
        let mut m = 0usize;
        loop {
            let mut ratio = z.recip()?;
            for b in &spec.denominators {
                ratio = ratio.mul(&one.sub(&b.mul_real(&qn)));
            }
            for a in &spec.numerators {
                let f = one.sub(&a.mul_real(&qn));
                if f.is_zero() {
                    return Err(Error::Pole(format!(
                        "negative-index denominator factor (1 - a q^-{}) vanishes",
                        m + 1
                    )));
                }
                ratio = ratio.div(&f)?;
            }
            if excess > 0 {
                // [(-1) q^{n-1}]^{-(s-r)} with q^{n-1} = qn
                let extra = ComplexHP::from_real(-qn.clone()).powi(-excess)?;
                ratio = ratio.mul(&extra);
            }
            t = t.mul(&ratio);
            t_err = t_err * ratio.abs() + t.abs() * &eps;
            qn *= &qinv;
            m += 1;
            if t.is_zero() {
                break;
            }
            sum = sum.add(&Eval::with_abs_err(t.clone(), t_err.clone()));
            // bound: ratio modulus <= neg_ratio * prod(1 + q^{m+1}/|b_j|) / prod(1 - q^{m+1}/|a_i|)
            let qm = Float::with_val(ctx.bits(), rug::ops::Pow::pow(&q, (m + 1) as i32));
            let mut rho = neg_ratio.clone();
            let mut den_ok = true;
            for b in &spec.denominators {
                let ba = b.abs();
                if ba.is_zero() {
                    den_ok = false;
                    break;
                }
                rho *= ctx.one() + qm.clone() / ba;
            }
            for a in &spec.numerators {
                let d = ctx.one() - qm.clone() / a.abs();
                if d.cmp0() != Some(std::cmp::Ordering::Greater) {
                    den_ok = false;
                    break;
                }
                rho /= d;
            }
            if excess > 0 {
                den_ok = den_ok && qm < 1u32;
            }
            if den_ok && rho < 1u32 {
                let tail = t.abs() * &rho / (ctx.one() - &rho);
                if tail < tol.clone() * (sum.abs_value() + ctx.one()) {
                    tail_err += tail;
                    break;
                }
            }
            if m >= opts.max_terms {
                return Err(Error::Budget(format!(
                    "negative direction: {} terms insufficient",
                    opts.max_terms
                )));
            }
        }
        terms_neg = m;
    }

    sum.err += tail_err;
    Ok(PsiResult { value: sum, terms_pos, terms_neg })
}

/// Ramanujan's closed form for the one-over-one bilateral series:
/// (q, b/a, az, q/(az); q)_inf / (b, q/a, z, b/(az); q)_inf on |b/a| < |z| < 1.
pub fn ramanujan_rhs(
    a: &ComplexHP,
    b: &ComplexHP,
    base: &QBase,
    z: &ComplexHP,
    ctx: &PrecisionContext,
) -> Result<Eval> {
    let q = base.q();
    if a.is_zero() || z.is_zero() {
        return Err(Error::Domain("a and z must be nonzero".into()));
    }
    let ratio = b.abs() / a.abs();
    let z_abs = z.abs();
    if !(ratio < z_abs.clone() && z_abs < 1u32) {
        return Err(Error::Domain(format!(
            "annulus |b/a| < |z| < 1 violated: |b/a| = {ratio}, |z| = {z_abs}"
        )));
    }
    let qc = ComplexHP::from_real(q.clone());
    let az = a.mul(z);
    let num = qpoch_multi(
        &[qc.clone(), b.div(a)?, az.clone(), qc.div(&az)?],
        &q,
        ctx,
    )?;
    let den = qpoch_multi(
        &[b.clone(), qc.div(a)?, z.clone(), b.div(&az)?],
        &q,
        ctx,
    )?;
    if den.value.is_zero() {
        return Err(Error::Pole("a denominator product vanishes".into()));
    }
    num.to_eval().div(&den.to_eval())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn c(re: f64, im: f64) -> ComplexHP {
        ComplexHP::from_f64(&ctx(), re, im)
    }

    fn q_base(q: f64) -> QBase {
        QBase::from_q_f64(&ctx(), q).unwrap()
    }

    #[test]
    fn q_binomial_reduction() {
        // with b = q the negative terms vanish and the sum is (az; q)_inf/(z; q)_inf
        let x = ctx();
        let base = q_base(0.5);
        let q = base.q();
        let a = c(0.3, 0.0);
        let z = c(0.4, 0.0);
        let spec = PsiSpec::one_one(a.clone(), ComplexHP::from_real(q.clone()));
        let s = psi_bilateral(&spec, &base, &z, &x, &PsiOptions::default()).unwrap();
        assert_eq!(s.terms_neg, 0);
        let num = qpoch_multi(&[a.mul(&z)], &q, &x).unwrap();
        let den = qpoch_multi(std::slice::from_ref(&z), &q, &x).unwrap();
        let rhs = num.to_eval().div(&den.to_eval()).unwrap();
        let diff = s.value.value.sub(&rhs.value).abs();
        assert!(diff < s.value.err.clone() + &rhs.err + x.tol() * 16u32);
    }

    #[test]
    fn ramanujan_sum_random_spot() {
        let x = ctx();
        let base = q_base(0.3);
        let a = c(2.0, 0.5);
        let b = c(0.1, 0.0);
        let z = c(0.5, 0.2);
        let spec = PsiSpec::one_one(a.clone(), b.clone());
        let s = psi_bilateral(&spec, &base, &z, &x, &PsiOptions::default()).unwrap();
        let r = ramanujan_rhs(&a, &b, &base, &z, &x).unwrap();
        let diff = s.value.value.sub(&r.value).abs();
        assert!(diff < s.value.err.clone() + &r.err + x.tol() * 16u32, "diff = {diff}");
    }

    #[test]
    fn vanishing_closed_form_case() {
        // (a z; q)_inf = (2; 1/2)_inf has an exactly zero factor, so both
        // routes must produce zero
        let x = ctx();
        let base = q_base(0.5);
        let a = c(4.0, 0.0);
        let b = c(0.25, 0.0);
        let z = c(0.5, 0.0);
        let r = ramanujan_rhs(&a, &b, &base, &z, &x).unwrap();
        assert!(r.value.is_zero());
        let spec = PsiSpec::one_one(a, b);
        let s = psi_bilateral(&spec, &base, &z, &x, &PsiOptions::default()).unwrap();
        assert!(s.value.value.abs() < s.value.err, "symmetric sums must cancel");
    }

    #[test]
    fn annulus_enforced() {
        let x = ctx();
        let base = q_base(0.5);
        let spec = PsiSpec::one_one(c(0.9, 0.0), c(0.8, 0.0));
        // |b/a| = 8/9 > |z| = 0.5
        let r = psi_bilateral(&spec, &base, &c(0.5, 0.0), &x, &PsiOptions::default());
        assert!(matches!(r, Err(Error::Domain(_))));
        // |z| too close to 1 without override
        let spec = PsiSpec::one_one(c(2.0, 0.0), c(0.1, 0.0));
        let r = psi_bilateral(&spec, &base, &c(0.9999, 0.0), &x, &PsiOptions::default());
        assert!(matches!(r, Err(Error::Domain(_))));
        // same point accepted with the override
        let opts = PsiOptions { override_margin: true, ..Default::default() };
        assert!(psi_bilateral(&spec, &base, &c(0.9995, 0.0), &x, &opts).is_ok());
    }

    #[test]
    fn more_numerators_than_denominators_rejected() {
        let x = ctx();
        let base = q_base(0.5);
        let spec = PsiSpec {
            numerators: vec![c(0.5, 0.0), c(0.25, 0.0)],
            denominators: vec![c(0.1, 0.0)],
        };
        let r = psi_bilateral(&spec, &base, &c(0.5, 0.0), &x, &PsiOptions::default());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn gaussian_factor_branch_runs() {
        // r < s: the extra (-1)^n q^{n(n-1)/2} factor per excess denominator
        let x = ctx();
        let base = q_base(0.5);
        let spec = PsiSpec {
            numerators: vec![],
            denominators: vec![c(0.3, 0.0)],
        };
        let s = psi_bilateral(&spec, &base, &c(0.5, 0.0), &x, &PsiOptions::default()).unwrap();
        assert!(s.value.value.is_finite());
        assert!(s.terms_pos > 0 && s.terms_neg > 0);
    }
}

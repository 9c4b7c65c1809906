//! Jacobi theta function in its bilateral-series and triple-product forms,
//! plus the q-difference shift used as a test oracle. Both the base q and
//! base q^2 variants are needed by the identity catalog.

use rug::Float;

use crate::complex::ComplexHP;
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;
use crate::qseries::{qpoch_multi, BasePow, QBase};
use crate::value::Eval;

/// Effective half-power step for the selected base: theta over base Q has
/// terms Q^{n^2/2} (-z)^n, and Q^{1/2} is p for Q = q, q itself for Q = q^2.
fn half_step(base: &QBase, bp: BasePow) -> Float {
    match bp {
        BasePow::Q => base.p(),
        BasePow::QSquared => base.q(),
    }
}

/// Bilateral Gaussian sum over the selected base Q: sum_n Q^{n^2/2} (-z)^n.
/// Truncation from the Gaussian tail: |term_n| = h^{n^2} r^|n| with
/// h = Q^{1/2} and r = max(|z|, 1/|z|); successive ratios are h^{2n+1} r,
/// so once that ratio drops below 1/2 the tail is under twice the next term.
pub fn theta_series(
    z: &ComplexHP,
    base: &QBase,
    bp: BasePow,
    ctx: &PrecisionContext,
) -> Result<Eval> {
    if z.is_zero() {
        return Err(Error::Domain("theta argument must be nonzero".into()));
    }
    let h = half_step(base, bp);
    let tol = ctx.tol();
    let neg_z = z.neg();
    let neg_zinv = neg_z.recip()?;
    let r = {
        let za = z.abs();
        let inv = ctx.one() / &za;
        if za > inv.clone() { za } else { inv }
    };

    let mut sum = Eval::exact(ComplexHP::one(ctx));
    let mut err = ctx.zero();
    let eps = ctx.float(Float::i_exp(1, -(ctx.bits() as i32) + 4));
    for dirz in [&neg_z, &neg_zinv] {
        let mut t = ComplexHP::one(ctx);
        let mut t_err = ctx.zero();
        let step_mag = dirz.abs();
        let mut hpow = h.clone(); // h^{2n+1} at n = 0
        let h2 = h.clone().square();
        let mut n = 0usize;
        loop {
            t = t.mul(dirz).mul_real(&hpow);
            t_err = t_err * step_mag.clone() * &hpow + t.abs() * &eps;
            sum = sum.add(&Eval::with_abs_err(t.clone(), t_err.clone()));
            hpow *= &h2;
            n += 1;
            // ratio bound for all further terms
            let ratio = hpow.clone() * &r;
            if ratio < 0.5f64 {
                let next = t.abs() * &ratio;
                let tail = next / (ctx.one() - &ratio);
                if tail < tol.clone() * (sum.abs_value() + ctx.one()) {
                    err += tail;
                    break;
                }
            }
            if n > 5_000_000 {
                return Err(Error::Budget("theta series did not reach tolerance".into()));
            }
        }
    }
    sum.err += err;
    Ok(sum)
}

/// Triple-product form over base Q: (Q, Q^{1/2} z, Q^{1/2}/z; Q)_inf.
pub fn theta_product(
    z: &ComplexHP,
    base: &QBase,
    bp: BasePow,
    ctx: &PrecisionContext,
) -> Result<Eval> {
    if z.is_zero() {
        return Err(Error::Domain("theta argument must be nonzero".into()));
    }
    let h = half_step(base, bp);
    let q_eff = bp.value(base);
    let args = [
        ComplexHP::from_real(q_eff.clone()),
        z.mul_real(&h),
        z.recip()?.mul_real(&h),
    ];
    Ok(qpoch_multi(&args, &q_eff, ctx)?.to_eval())
}

/// The q-difference shift: the claimed value of theta(z Q^k), namely
/// (-z)^{-k} Q^{-k^2/2} theta(z). Integer powers stay exact on the negative
/// real axis, so (-z)^{-k} is computed by repeated multiplication.
pub fn theta_shift(
    z: &ComplexHP,
    k: i64,
    base: &QBase,
    bp: BasePow,
    ctx: &PrecisionContext,
) -> Result<Eval> {
    if z.is_zero() {
        return Err(Error::Domain("theta argument must be nonzero".into()));
    }
    let h = half_step(base, bp);
    let prec = ctx.bits();
    // Q^{-k^2/2} = h^{-k^2}
    let hk = Float::with_val(prec, rug::ops::Pow::pow(&h, -(k * k) as i32));
    let zk = z.neg().powi(-k)?;
    let th = theta_series(z, base, bp, ctx)?;
    Ok(th.mul(&Eval::exact(zk.mul_real(&hk))))
}

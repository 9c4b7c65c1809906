//! Identity sides assembled generically over the evaluation algebra, so the
//! numeric and formal backends evaluate the very same expression trees.

use crate::algebra::IdentityAlgebra;
use crate::error::{Error, Result};
use crate::identity::IdentityId;
use crate::qseries::BasePow;

/// Parameter record in algebra values.
pub enum AlgParams<V> {
    /// beta, w with alpha = -1/beta^2 and gamma = q/beta derived.
    Constrained { beta: V, w: V },
    /// free theta pair.
    XiEta { xi: V, eta: V },
    /// fugacity parameters; the square root is supplied by the caller
    /// (principal branch in the numeric backend).
    Physics { a: V, sqrt_a: V, w: V },
    /// free one-over-one series data.
    Ramanujan { a: V, b: V, z: V },
    /// binomial reduction data (denominator parameter is the base itself).
    QBinomial { a: V, z: V },
    /// theta argument and optional shift.
    Theta { z: V, k: i64 },
}

/// Derived quantities shared by the constrained-parameter identities.
struct Frame<V> {
    alpha: V,
    beta: V,
    gamma: V,
    w: V,
    ab: V,  // alpha beta
    u: V,   // alpha beta / q^{1/2}
    z1: V,  // gamma w / (alpha q^{1/2}), the common series argument
    zp: V,  // q^{1/2} / (alpha beta w)
    a_arg: V, // alpha q^{1/2} / (gamma w)
    b_arg: V, // alpha beta w / q^{1/2}
}

fn frame<A: IdentityAlgebra>(alg: &A, beta: &A::V, w: &A::V) -> Result<Frame<A::V>> {
    let q = alg.q_half_pow(2);
    let p = alg.q_half_pow(1);
    let beta2 = alg.mul(beta, beta);
    let alpha = alg.neg(&alg.inv(&beta2)?);
    let gamma = alg.div(&q, beta)?;
    let ab = alg.mul(&alpha, beta);
    let u = alg.div(&ab, &p)?;
    let gw = alg.mul(&gamma, w);
    let ap = alg.mul(&alpha, &p);
    let z1 = alg.div(&gw, &ap)?;
    let zp = alg.div(&p, &alg.mul(&ab, w))?;
    let a_arg = alg.div(&ap, &gw)?;
    let b_arg = alg.div(&alg.mul(&ab, w), &p)?;
    Ok(Frame { alpha, beta: beta.clone(), gamma, w: w.clone(), ab, u, z1, zp, a_arg, b_arg })
}

fn poch_prod<A: IdentityAlgebra>(alg: &A, args: &[&A::V], bp: BasePow) -> Result<A::V> {
    let mut acc = alg.one();
    for a in args {
        acc = alg.mul(&acc, &alg.qpoch(a, bp)?);
    }
    Ok(acc)
}

/// The two series terms of the main summations: prefactor times series, for
/// the (alpha beta; gamma/alpha) and (1/beta; beta^2 gamma) instances.
fn series_terms<A: IdentityAlgebra>(alg: &A, fr: &Frame<A::V>) -> Result<(A::V, A::V)> {
    let ga = alg.div(&fr.gamma, &fr.alpha)?;
    let f1 = alg.div(&alg.qpoch(&ga, BasePow::Q)?, &alg.qpoch(&fr.ab, BasePow::Q)?)?;
    let s1 = alg.psi11(&fr.ab, &ga, &fr.z1)?;
    let t1 = alg.mul(&f1, &s1);

    let binv = alg.inv(&fr.beta)?;
    let b2g = alg.mul(&alg.mul(&fr.beta, &fr.beta), &fr.gamma);
    let f2 = alg.div(&alg.qpoch(&b2g, BasePow::Q)?, &alg.qpoch(&binv, BasePow::Q)?)?;
    let s2 = alg.psi11(&binv, &b2g, &fr.z1)?;
    let t2 = alg.mul(&f2, &s2);
    Ok((t1, t2))
}

/// (q; q^2)_inf / (q^2; q^2)_inf.
fn half_base_prefactor<A: IdentityAlgebra>(alg: &A) -> Result<A::V> {
    let q = alg.q_half_pow(2);
    let q2 = alg.q_half_pow(4);
    alg.div(&alg.qpoch(&q, BasePow::QSquared)?, &alg.qpoch(&q2, BasePow::QSquared)?)
}

/// Product side core shared by the two branches: the gamma/(alpha^2 beta)
/// over alpha^2 beta^2 quotient times the shifted numerator pair over the
/// unshifted (plus branch) or once-shifted (minus branch) denominator pair.
fn product_side<A: IdentityAlgebra>(alg: &A, fr: &Frame<A::V>, minus: bool) -> Result<A::V> {
    let a2b = alg.mul(&alg.mul(&fr.alpha, &fr.alpha), &fr.beta);
    let lead_num = alg.div(&fr.gamma, &a2b)?;
    let a2b2 = alg.mul(&fr.ab, &fr.ab);
    let lead = alg.div(&alg.qpoch(&lead_num, BasePow::QSquared)?, &alg.qpoch(&a2b2, BasePow::QSquared)?)?;
    let (num_shift, den_shift) = if minus { (2i64, 1i64) } else { (1, 0) };
    let shift = |v: &A::V, k: i64| -> A::V {
        match k {
            0 => v.clone(),
            _ => alg.mul(v, &alg.q_half_pow(2 * k)),
        }
    };
    let num = poch_prod(
        alg,
        &[&shift(&fr.a_arg, num_shift), &shift(&fr.b_arg, num_shift)],
        BasePow::QSquared,
    )?;
    let den = poch_prod(
        alg,
        &[&shift(&fr.z1, den_shift), &shift(&fr.zp, den_shift)],
        BasePow::QSquared,
    )?;
    let core = alg.mul(&lead, &alg.div(&num, &den)?);
    if minus {
        Ok(alg.mul(&fr.ab, &core))
    } else {
        Ok(core)
    }
}

/// The two four-argument base-q products whose sum and difference drive the
/// assembly identities.
fn assembly_products<A: IdentityAlgebra>(alg: &A, fr: &Frame<A::V>) -> Result<(A::V, A::V)> {
    let p = alg.q_half_pow(1);
    let p3 = alg.q_half_pow(3);
    let q = alg.q_half_pow(2);
    let bgw = alg.mul(&alg.mul(&fr.beta, &fr.gamma), &fr.w);
    let g1 = alg.div(&bgw, &p)?;
    let g2 = alg.div(&p3, &bgw)?;
    let binv = alg.inv(&fr.beta)?;
    let qb = alg.mul(&q, &fr.beta);
    let sum1 = poch_prod(alg, &[&g1, &g2, &binv, &qb], BasePow::Q)?;

    let gw = alg.mul(&fr.gamma, &fr.w);
    let h1 = alg.div(&gw, &alg.mul(&fr.ab, &p))?;
    let h2 = alg.div(&alg.mul(&fr.ab, &p3), &gw)?;
    let qab = alg.div(&q, &fr.ab)?;
    let sum2 = poch_prod(alg, &[&h1, &h2, &fr.ab, &qab], BasePow::Q)?;
    Ok((sum1, sum2))
}

/// (q, q; q^2)_inf.
fn q_q_base2<A: IdentityAlgebra>(alg: &A) -> Result<A::V> {
    let q = alg.q_half_pow(2);
    let one = alg.qpoch(&q, BasePow::QSquared)?;
    Ok(alg.mul(&one, &one))
}

/// Evaluate every clause (lhs, rhs) of an identity.
pub fn eval_clauses<A: IdentityAlgebra>(
    alg: &A,
    id: IdentityId,
    params: &AlgParams<A::V>,
) -> Result<Vec<(A::V, A::V)>> {
    use IdentityId::*;
    match (id, params) {
        (MAIN1 | MAIN2 | COR1 | COR2, AlgParams::Constrained { beta, w }) => {
            let fr = frame(alg, beta, w)?;
            let (t1, t2) = series_terms(alg, &fr)?;
            let minus = matches!(id, MAIN2 | COR2);
            let braces = if minus { alg.sub(&t1, &t2) } else { alg.add(&t1, &t2) };
            let mut lhs = alg.half(&braces);
            let mut rhs = product_side(alg, &fr, minus)?;
            if matches!(id, MAIN1 | MAIN2) {
                lhs = alg.mul(&half_base_prefactor(alg)?, &lhs);
            } else {
                // prefactor moved to the product side, inverted
                rhs = alg.mul(&alg.inv(&half_base_prefactor(alg)?)?, &rhs);
            }
            Ok(vec![(lhs, rhs)])
        }
        (LEM1, AlgParams::XiEta { xi, eta }) => {
            let mut out = Vec::new();
            for arg in [alg.mul(xi, eta), alg.div(xi, eta)?] {
                let t = alg.theta(&arg, BasePow::QSquared)?;
                let ti = alg.theta(&alg.inv(&arg)?, BasePow::QSquared)?;
                out.push((t.clone(), alg.half(&alg.add(&t, &ti))));
            }
            Ok(out)
        }
        (P1, AlgParams::XiEta { xi, eta }) => {
            let lhs = alg.mul(
                &alg.theta(&alg.div(xi, eta)?, BasePow::QSquared)?,
                &alg.theta(&alg.mul(xi, eta), BasePow::QSquared)?,
            );
            let rhs = sym_theta_product(alg, xi, eta)?;
            Ok(vec![(lhs, rhs)])
        }
        (CO3 | CORL3, AlgParams::Constrained { beta, w }) => {
            let fr = frame(alg, beta, w)?;
            let q = alg.q_half_pow(2);
            let (x1, x2) = co_pair(alg, &fr, matches!(id, CORL3), &q)?;
            let t1 = alg.theta(&x1, BasePow::QSquared)?;
            let t2 = alg.theta(&x2, BasePow::QSquared)?;
            let t1i = alg.theta(&alg.inv(&x1)?, BasePow::QSquared)?;
            let t2i = alg.theta(&alg.inv(&x2)?, BasePow::QSquared)?;
            let lhs = alg.inv(&alg.mul(&t1, &t2))?;
            let den = alg.mul(&alg.add(&t1, &t1i), &alg.add(&t2, &t2i));
            let rhs = alg.div(&alg.int(4), &den)?;
            Ok(vec![(lhs, rhs)])
        }
        (CO4 | CORL4, AlgParams::Constrained { beta, w }) => {
            let fr = frame(alg, beta, w)?;
            let q = alg.q_half_pow(2);
            let shifted = matches!(id, CORL4);
            let (x1, x2) = co_pair(alg, &fr, shifted, &q)?;
            let uu = if shifted { alg.mul(&fr.u, &q) } else { fr.u.clone() };
            let th2 = |v: &A::V| alg.theta(v, BasePow::QSquared);
            let x1i = alg.inv(&x1)?;
            let x2i = alg.inv(&x2)?;
            // all four specializations share the symmetrized base-q value
            let rhs = sym_theta_product(alg, &uu, &fr.w)?;
            Ok(vec![
                (alg.mul(&th2(&x1)?, &th2(&x2)?), rhs.clone()),
                (alg.mul(&th2(&x1)?, &th2(&x2i)?), rhs.clone()),
                (alg.mul(&th2(&x1i)?, &th2(&x2)?), rhs.clone()),
                (alg.mul(&th2(&x1i)?, &th2(&x2i)?), rhs),
            ])
        }
        (CO5 | COROL1, AlgParams::Constrained { beta, w }) => {
            let fr = frame(alg, beta, w)?;
            let q = alg.q_half_pow(2);
            let p = alg.q_half_pow(1);
            let shifted = matches!(id, COROL1);
            let (x1, x2) = co_pair(alg, &fr, shifted, &q)?;
            let lhs = alg.inv(&alg.mul(
                &alg.theta(&x1, BasePow::QSquared)?,
                &alg.theta(&x2, BasePow::QSquared)?,
            ))?;
            let ab2 = alg.mul(&fr.alpha, &alg.mul(&fr.beta, &fr.beta));
            let term1 = alg.mul(
                &alg.theta(&fr.u, BasePow::Q)?,
                &alg.theta(&alg.div(&fr.w, &ab2)?, BasePow::Q)?,
            );
            let term2 = alg.mul(
                &alg.theta(&fr.w, BasePow::Q)?,
                &alg.theta(&alg.inv(&alg.mul(&fr.beta, &p))?, BasePow::Q)?,
            );
            let rhs = if shifted {
                let den = alg.add(&alg.neg(&term1), &term2);
                alg.div(&alg.mul(&alg.int(2), &fr.ab), &den)?
            } else {
                alg.div(&alg.int(2), &alg.add(&term1, &term2))?
            };
            Ok(vec![(lhs, rhs)])
        }
        (CO6 | CO7 | CORO1 | CORO2, AlgParams::Constrained { beta, w }) => {
            let fr = frame(alg, beta, w)?;
            let q = alg.q_half_pow(2);
            let q2 = alg.q_half_pow(4);
            let (sum1, sum2) = assembly_products(alg, &fr)?;
            let qq = q_q_base2(alg)?;
            let minus = matches!(id, CORO1 | CORO2);
            let combo = if minus { alg.sub(&sum1, &sum2) } else { alg.add(&sum1, &sum2) };
            let shift = |v: &A::V, by: &A::V| alg.mul(v, by);
            let (lhs, den_args): (A::V, (A::V, A::V)) = match id {
                CO6 => (
                    alg.one(),
                    (shift(&fr.z1, &q), shift(&fr.zp, &q)),
                ),
                CO7 => (
                    alg.mul(
                        &alg.qpoch(&shift(&fr.a_arg, &q), BasePow::QSquared)?,
                        &alg.qpoch(&shift(&fr.b_arg, &q), BasePow::QSquared)?,
                    ),
                    (shift(&fr.z1, &q), shift(&fr.zp, &q)),
                ),
                CORO1 => (fr.ab.clone(), (fr.z1.clone(), fr.zp.clone())),
                _ => (
                    alg.mul(
                        &fr.ab,
                        &alg.mul(
                            &alg.qpoch(&shift(&fr.a_arg, &q2), BasePow::QSquared)?,
                            &alg.qpoch(&shift(&fr.b_arg, &q2), BasePow::QSquared)?,
                        ),
                    ),
                    (fr.z1.clone(), fr.zp.clone()),
                ),
            };
            let mut den = alg.mul(
                &alg.qpoch(&den_args.0, BasePow::QSquared)?,
                &alg.qpoch(&den_args.1, BasePow::QSquared)?,
            );
            // the two normalization identities also divide by the numerator pair
            match id {
                CO6 => {
                    den = alg.mul(
                        &den,
                        &alg.mul(
                            &alg.qpoch(&shift(&fr.a_arg, &q), BasePow::QSquared)?,
                            &alg.qpoch(&shift(&fr.b_arg, &q), BasePow::QSquared)?,
                        ),
                    );
                }
                CORO1 => {
                    den = alg.mul(
                        &den,
                        &alg.mul(
                            &alg.qpoch(&shift(&fr.a_arg, &q2), BasePow::QSquared)?,
                            &alg.qpoch(&shift(&fr.b_arg, &q2), BasePow::QSquared)?,
                        ),
                    );
                }
                _ => {}
            }
            let rhs = alg.half(&alg.mul(&alg.div(&qq, &den)?, &combo));
            Ok(vec![(lhs, rhs)])
        }
        (PHYS1 | PHYS2, AlgParams::Physics { a, sqrt_a, w }) => {
            let q = alg.q_half_pow(2);
            let p = alg.q_half_pow(1);
            let p3 = alg.q_half_pow(3);
            let minus = matches!(id, PHYS2);
            let sa = sqrt_a;
            let qsa = alg.div(&q, sa)?;
            let z = alg.div(&alg.mul(&p, w), sa)?;
            let t1 = alg.mul(
                &alg.div(&alg.qpoch(&qsa, BasePow::Q)?, &alg.qpoch(sa, BasePow::Q)?)?,
                &alg.psi11(sa, &qsa, &z)?,
            );
            let t2 = alg.mul(
                &alg.div(
                    &alg.qpoch(&alg.neg(&qsa), BasePow::Q)?,
                    &alg.qpoch(&alg.neg(sa), BasePow::Q)?,
                )?,
                &alg.psi11(&alg.neg(sa), &alg.neg(&qsa), &z)?,
            );
            let braces = if minus { alg.sub(&t1, &t2) } else { alg.add(&t1, &t2) };
            let lhs = alg.mul(&half_base_prefactor(alg)?, &alg.half(&braces));
            let step = if minus { &p3 } else { &p };
            let num = poch_prod(
                alg,
                &[
                    &alg.div(&q, a)?,
                    &alg.div(&alg.mul(sa, step), w)?,
                    &alg.mul(&alg.mul(sa, step), w),
                ],
                BasePow::QSquared,
            )?;
            let den = poch_prod(
                alg,
                &[
                    a,
                    &alg.div(&alg.mul(step, w), sa)?,
                    &alg.div(step, &alg.mul(w, sa))?,
                ],
                BasePow::QSquared,
            )?;
            let mut rhs = alg.div(&num, &den)?;
            if minus {
                rhs = alg.mul(sa, &rhs);
            }
            Ok(vec![(lhs, rhs)])
        }
        (RAMANUJAN, AlgParams::Ramanujan { a, b, z }) => {
            let q = alg.q_half_pow(2);
            let lhs = alg.psi11(a, b, z)?;
            let az = alg.mul(a, z);
            let num = poch_prod(
                alg,
                &[&q, &alg.div(b, a)?, &az, &alg.div(&q, &az)?],
                BasePow::Q,
            )?;
            let den = poch_prod(
                alg,
                &[b, &alg.div(&q, a)?, z, &alg.div(b, &az)?],
                BasePow::Q,
            )?;
            Ok(vec![(lhs, alg.div(&num, &den)?)])
        }
        (QBINOM, AlgParams::QBinomial { a, z }) => {
            let q = alg.q_half_pow(2);
            let lhs = alg.psi11(a, &q, z)?;
            let rhs = alg.div(&alg.qpoch(&alg.mul(a, z), BasePow::Q)?, &alg.qpoch(z, BasePow::Q)?)?;
            Ok(vec![(lhs, rhs)])
        }
        (JTP, AlgParams::Theta { z, .. }) => {
            let q = alg.q_half_pow(2);
            let p = alg.q_half_pow(1);
            let lhs = alg.theta(z, BasePow::Q)?;
            let rhs = poch_prod(
                alg,
                &[&q, &alg.mul(&p, z), &alg.div(&p, z)?],
                BasePow::Q,
            )?;
            Ok(vec![(lhs, rhs)])
        }
        (THETA_INV, AlgParams::Theta { z, .. }) => {
            let lhs = alg.theta(z, BasePow::Q)?;
            let rhs = alg.theta(&alg.inv(z)?, BasePow::Q)?;
            Ok(vec![(lhs, rhs)])
        }
        (THETA_QDIFF, AlgParams::Theta { z, k }) => {
            let lhs = alg.theta(&alg.mul(z, &alg.q_half_pow(2 * k)), BasePow::Q)?;
            let factor = alg.mul(
                &alg.powi(&alg.neg(z), -k)?,
                &alg.q_half_pow(-(k * k)),
            );
            let rhs = alg.mul(&factor, &alg.theta(z, BasePow::Q)?);
            Ok(vec![(lhs, rhs)])
        }
        _ => Err(Error::Usage(format!(
            "identity {id} does not take this parameter family (or is numeric-only)"
        ))),
    }
}

/// The symmetrized cross-base product value
/// (theta_q(xi) theta_q(-eta) + theta_q(-xi) theta_q(eta)) / 2,
/// equal to theta_{q^2}(xi/eta) theta_{q^2}(xi eta). The unsymmetrized
/// theta_q(xi) theta_q(-eta) alone overcounts: the double-sum rearrangement
/// behind the product rule keeps only index pairs of equal parity.
fn sym_theta_product<A: IdentityAlgebra>(alg: &A, xi: &A::V, eta: &A::V) -> Result<A::V> {
    let first = alg.mul(
        &alg.theta(xi, BasePow::Q)?,
        &alg.theta(&alg.neg(eta), BasePow::Q)?,
    );
    let second = alg.mul(
        &alg.theta(&alg.neg(xi), BasePow::Q)?,
        &alg.theta(eta, BasePow::Q)?,
    );
    Ok(alg.half(&alg.add(&first, &second)))
}

/// The reciprocal theta pair arguments: (alpha beta/(q^{1/2} w), alpha beta w/q^{1/2}),
/// optionally both shifted by q.
fn co_pair<A: IdentityAlgebra>(
    alg: &A,
    fr: &Frame<A::V>,
    shifted: bool,
    q: &A::V,
) -> Result<(A::V, A::V)> {
    let x1 = alg.div(&fr.u, &fr.w)?;
    let x2 = alg.mul(&fr.u, &fr.w);
    if shifted {
        Ok((alg.mul(&x1, q), alg.mul(&x2, q)))
    } else {
        Ok((x1, x2))
    }
}

//! Classical (q = 1) bilateral hypergeometric series and their closed forms:
//! integer-shifted factorials, symmetric partial sums for the one- and
//! two-parameter bilateral series on |z| = 1, and the gamma-function
//! evaluations they are checked against.

use rug::Float;

use crate::complex::{cpow_principal, ComplexHP};
use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::precision::PrecisionContext;
use crate::value::Eval;

/// Bilateral term index; negative values select the reciprocal-product
/// branch of the shifted factorial.
pub type BilateralTermIndex = i64;

/// Term budget and requested tolerance for the classical series, which
/// converge only algebraically: the full context tolerance is normally out
/// of reach, so the target is explicit and the achieved bound is reported.
#[derive(Debug, Clone)]
pub struct SeriesBudget {
    pub max_terms: usize,
    pub rtol: f64,
}

impl Default for SeriesBudget {
    fn default() -> Self {
        Self { max_terms: 100_000, rtol: 1e-8 }
    }
}

/// Shifted factorial (alpha)_n = alpha (alpha+1) ... (alpha+n-1), extended to
/// n = 0 (empty product) and n <= -1 by 1 / ((alpha-1)(alpha-2)...(alpha-|n|)),
/// the unique extension satisfying (alpha)_{n+1} = (alpha+n)(alpha)_n.
pub fn shifted_factorial(
    alpha: &ComplexHP,
    n: BilateralTermIndex,
    ctx: &PrecisionContext,
) -> Result<ComplexHP> {
    let mut acc = ComplexHP::one(ctx);
    if n >= 0 {
        for k in 0..n {
            let f = alpha.add(&ComplexHP::from_real(ctx.float(k)));
            acc = acc.mul(&f);
        }
        Ok(acc)
    } else {
        for k in 1..=(-n) {
            let f = alpha.sub(&ComplexHP::from_real(ctx.float(k)));
            if f.is_zero() {
                return Err(Error::Pole(format!(
                    "shifted factorial denominator factor (alpha - {k}) vanishes"
                )));
            }
            acc = acc.mul(&f);
        }
        acc.recip()
    }
}

/// Smallest n beyond which |num + n| <= |den + n|, so term moduli stop growing.
fn monotone_start(num: &ComplexHP, den: &ComplexHP) -> usize {
    let na = num.abs().to_f64();
    let da = den.abs().to_f64();
    let gap = den.re.to_f64() - num.re.to_f64();
    if gap <= 0.0 {
        return 0;
    }
    let n0 = (na * na - da * da) / (2.0 * gap);
    if n0.is_finite() && n0 > 0.0 {
        n0.ceil() as usize + 4
    } else {
        0
    }
}

/// Tail estimate after the last included term `t_last`, for coefficients
/// decaying like n^{-s}: Abel summation against the geometric factor when
/// z != 1, integral comparison when z = 1.
fn tail_estimate(t_last: &Float, z: &ComplexHP, s: f64, param_scale: f64, n: usize) -> Float {
    let prec = t_last.prec();
    let one = ComplexHP::new(Float::with_val(prec, 1), Float::with_val(prec, 0));
    let dist = one.sub(z).abs();
    if dist.is_zero() {
        // z = 1: monotone comparison sum_{m>n} m^{-s} <= n^{1-s}/(s-1)
        t_last.clone() * Float::with_val(prec, 2.0 * n as f64 / (s - 1.0))
    } else {
        t_last.clone() * Float::with_val(prec, 4.0 * param_scale.max(1.0)) / dist
    }
}

struct BilateralSum {
    value: Eval,
}

/// Symmetric partial sums of a classical bilateral series given the two
/// one-step ratio maps. `s` is the algebraic decay exponent Re(sum of
/// denominators - sum of numerators); convergence needs s > 1.
#[allow(clippy::too_many_arguments)]
fn bilateral_sum(
    ctx: &PrecisionContext,
    budget: &SeriesBudget,
    z: &ComplexHP,
    s: f64,
    param_scale: f64,
    n0_up: usize,
    n0_down: usize,
    ratio_up: impl Fn(i64) -> Result<ComplexHP>,
    ratio_down: impl Fn(i64) -> Result<ComplexHP>,
) -> Result<BilateralSum> {
    let mut sum = Eval::exact(ComplexHP::one(ctx));
    let rtol = ctx.float(budget.rtol);

    let mut used = 1usize;
    let mut last_bounds = ctx.zero();
    for (n0, ratio, dir) in [
        (n0_up, &ratio_up as &dyn Fn(i64) -> Result<ComplexHP>, 1i64),
        (n0_down, &ratio_down as &dyn Fn(i64) -> Result<ComplexHP>, -1i64),
    ] {
        let mut t = ComplexHP::one(ctx);
        let mut n: i64 = 0;
        let mut done = false;
        loop {
            let r = ratio(n)?;
            t = t.mul(&r);
            n += dir;
            used += 1;
            if t.is_zero() {
                // a vanishing numerator factor truncates this direction exactly
                done = true;
                break;
            }
            sum = sum.add(&Eval::exact(t.clone()));
            let far_enough = n.unsigned_abs() as usize >= n0;
            if far_enough {
                let bound = tail_estimate(&t.abs(), z, s, param_scale, n.unsigned_abs() as usize);
                if bound < rtol.clone() * sum.abs_value() {
                    last_bounds += bound;
                    done = true;
                    break;
                }
            }
            if used >= budget.max_terms {
                break;
            }
        }
        if !done {
            return Err(Error::Budget(format!(
                "term budget {} exhausted before relative tolerance {:.3e} was reached",
                budget.max_terms, budget.rtol
            )));
        }
    }
    let mut value = sum;
    value.err += last_bounds;
    Ok(BilateralSum { value })
}

fn check_unit_circle(z: &ComplexHP, ctx: &PrecisionContext) -> Result<()> {
    // unit-circle membership is accepted at double-precision accuracy, so
    // decimal command-line literals for points like e^{i t} stay usable
    let tol = ctx.float(1e-9);
    let dev = (z.abs() - ctx.one()).abs();
    if dev > tol {
        return Err(Error::Domain(format!("|z| must be 1, got |z| = {}", z.abs())));
    }
    let one = ComplexHP::one(ctx);
    if z.sub(&one).abs() < tol {
        return Err(Error::Domain("z = 1 is excluded".into()));
    }
    Ok(())
}

/// Bilateral series sum_n (a)_n/(c)_n z^n over all integers n, for |z| = 1,
/// z != 1, Re(c - a) > 1. Returns the value with its achieved tail bound.
pub fn eval_1h1(
    a: &ComplexHP,
    c: &ComplexHP,
    z: &ComplexHP,
    ctx: &PrecisionContext,
    budget: &SeriesBudget,
) -> Result<Eval> {
    check_unit_circle(z, ctx)?;
    let s = (c.re.clone() - &a.re).to_f64();
    if s <= 1.0 {
        return Err(Error::Domain(format!("Re(c - a) must exceed 1, got {s}")));
    }
    let param_scale = c.sub(a).abs().to_f64();
    let n0_up = monotone_start(a, c);
    let n0_down = monotone_start(&c.neg(), &a.neg());
    let res = bilateral_sum(
        ctx,
        budget,
        z,
        s,
        param_scale,
        n0_up,
        n0_down,
        |n| {
            let num = a.add(&ComplexHP::from_real(ctx.float(n)));
            let den = c.add(&ComplexHP::from_real(ctx.float(n)));
            if den.is_zero() {
                return Err(Error::Pole(format!("denominator factor (c + {n}) vanishes")));
            }
            num.mul(z).div(&den)
        },
        |n| {
            // t_{n-1} = t_n (c + n - 1) / ((a + n - 1) z)
            let num = c.add(&ComplexHP::from_real(ctx.float(n - 1)));
            let den = a.add(&ComplexHP::from_real(ctx.float(n - 1)));
            if den.is_zero() {
                return Err(Error::Pole(format!(
                    "negative-index denominator factor (a + {}) vanishes",
                    n - 1
                )));
            }
            num.div(&den.mul(z))
        },
    )?;
    let mut out = res.value;
    out.err += out.value.abs() * ctx.tol();
    Ok(out)
}

/// Bilateral series sum_n (a)_n (b)_n / ((c)_n (d)_n) z^n; the z = 1 path
/// requires Re(c + d - a - b) > 1.
pub fn eval_2h2(
    a: &ComplexHP,
    b: &ComplexHP,
    c: &ComplexHP,
    d: &ComplexHP,
    z: &ComplexHP,
    ctx: &PrecisionContext,
    budget: &SeriesBudget,
) -> Result<Eval> {
    let dev = (z.abs() - ctx.one()).abs();
    if dev > ctx.float(1e-9) {
        return Err(Error::Domain(format!("|z| must be 1, got |z| = {}", z.abs())));
    }
    let s = (c.re.clone() + &d.re - &a.re - &b.re).to_f64();
    if s <= 1.0 {
        return Err(Error::Domain(format!("Re(c + d - a - b) must exceed 1, got {s}")));
    }
    let param_scale = c.sub(a).abs().to_f64().max(d.sub(b).abs().to_f64());
    let n0_up = monotone_start(a, c).max(monotone_start(b, d));
    let n0_down = monotone_start(&c.neg(), &a.neg()).max(monotone_start(&d.neg(), &b.neg()));
    let res = bilateral_sum(
        ctx,
        budget,
        z,
        s,
        param_scale,
        n0_up,
        n0_down,
        |n| {
            let nf = ComplexHP::from_real(ctx.float(n));
            let num = a.add(&nf).mul(&b.add(&nf));
            let den = c.add(&nf).mul(&d.add(&nf));
            if den.is_zero() {
                return Err(Error::Pole(format!("denominator factor at n = {n} vanishes")));
            }
            num.mul(z).div(&den)
        },
        |n| {
            let nf = ComplexHP::from_real(ctx.float(n - 1));
            let num = c.add(&nf).mul(&d.add(&nf));
            let den = a.add(&nf).mul(&b.add(&nf));
            if den.is_zero() {
                return Err(Error::Pole(format!(
                    "negative-index denominator factor at n = {} vanishes",
                    n - 1
                )));
            }
            num.div(&den.mul(z))
        },
    )?;
    let mut out = res.value;
    out.err += out.value.abs() * ctx.tol();
    Ok(out)
}

fn gamma_eval(z: &ComplexHP, ctx: &PrecisionContext) -> Result<Eval> {
    let g = gamma(z, ctx)?;
    let rel = ctx.tol() * 4u32;
    Ok(Eval::with_rel_err(g, &rel))
}

/// Closed form for the one-parameter bilateral series:
/// (1-z)^{c-a-1} / (-z)^{c-1} * Gamma(1-a) Gamma(c) / Gamma(c-a).
pub fn horn_closed_form(
    a: &ComplexHP,
    c: &ComplexHP,
    z: &ComplexHP,
    ctx: &PrecisionContext,
) -> Result<Eval> {
    let one = ComplexHP::one(ctx);
    if z.is_zero() || z.sub(&one).abs() < ctx.tol().sqrt() {
        return Err(Error::Domain("z = 0 and z = 1 are excluded".into()));
    }
    let cma1 = c.sub(a).sub(&one);
    let pow1 = cpow_principal(&one.sub(z), &cma1)?;
    let pow2 = cpow_principal(&z.neg(), &c.sub(&one))?;
    let g = gamma_eval(&one.sub(a), ctx)?
        .mul(&gamma_eval(c, ctx)?)
        .div(&gamma_eval(&c.sub(a), ctx)?)?;
    let rel = ctx.tol() * 4u32;
    Eval::with_rel_err(pow1, &rel)
        .div(&Eval::with_rel_err(pow2, &rel))?
        .mul(&g)
        .pipe_ok()
}

/// Closed form for the two-parameter bilateral series at z = 1:
/// Gamma(1-a) Gamma(1-b) Gamma(c) Gamma(d) Gamma(c+d-a-b-1)
///   / (Gamma(c-a) Gamma(c-b) Gamma(d-a) Gamma(d-b)).
pub fn dougall_closed_form(
    a: &ComplexHP,
    b: &ComplexHP,
    c: &ComplexHP,
    d: &ComplexHP,
    ctx: &PrecisionContext,
) -> Result<Eval> {
    let s = (c.re.clone() + &d.re - &a.re - &b.re).to_f64();
    if s <= 1.0 {
        return Err(Error::Domain(format!("Re(c + d - a - b) must exceed 1, got {s}")));
    }
    let one = ComplexHP::one(ctx);
    let num = gamma_eval(&one.sub(a), ctx)?
        .mul(&gamma_eval(&one.sub(b), ctx)?)
        .mul(&gamma_eval(c, ctx)?)
        .mul(&gamma_eval(d, ctx)?)
        .mul(&gamma_eval(&c.add(d).sub(a).sub(b).sub(&one), ctx)?);
    let den = gamma_eval(&c.sub(a), ctx)?
        .mul(&gamma_eval(&c.sub(b), ctx)?)
        .mul(&gamma_eval(&d.sub(a), ctx)?)
        .mul(&gamma_eval(&d.sub(b), ctx)?);
    num.div(&den)
}

trait PipeOk: Sized {
    fn pipe_ok(self) -> Result<Self> {
        Ok(self)
    }
}
impl PipeOk for Eval {}

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
    fn shifted_factorial_cases() {
        let x = ctx();
        // empty product
        let r = shifted_factorial(&c(2.7, 1.1), 0, &x).unwrap();
        assert!(r.sub(&ComplexHP::one(&x)).abs() < x.tol());
        // zero factor: (-1)_2 = (-1)(0) = 0
        let r = shifted_factorial(&c(-1.0, 0.0), 2, &x).unwrap();
        assert!(r.is_zero());
        // single-factor reciprocal: (2)_{-1} = 1/(2-1) = 1
        let r = shifted_factorial(&c(2.0, 0.0), -1, &x).unwrap();
        assert!(r.sub(&ComplexHP::one(&x)).abs() < x.tol());
        // pole: (1)_{-1} divides by zero
        assert!(matches!(shifted_factorial(&c(1.0, 0.0), -1, &x), Err(Error::Pole(_))));
    }

    #[test]
    fn shifted_factorial_recurrence_across_zero() {
        let x = ctx();
        let alpha = c(0.3, -0.8);
        for n in -4i64..4 {
            let lhs = shifted_factorial(&alpha, n + 1, &x).unwrap();
            let rhs = shifted_factorial(&alpha, n, &x)
                .unwrap()
                .mul(&alpha.add(&ComplexHP::from_real(x.float(n))));
            assert!(lhs.sub(&rhs).abs() < x.tol() * (lhs.abs() + x.one()), "n = {n}");
        }
    }

    #[test]
    fn brute_force_three_term_sum() {
        // only n in {-1, 0, 1} contribute: 1/2 + 1 + 1/2 = 2, exactly
        let x = ctx();
        let v = eval_1h1(&c(-1.0, 0.0), &c(2.0, 0.0), &c(-1.0, 0.0), &x, &SeriesBudget::default())
            .unwrap();
        let two = c(2.0, 0.0);
        assert!(v.value.sub(&two).abs() < x.tol() * 4u32);
    }

    #[test]
    fn reduces_to_binomial_when_a_is_zero() {
        // (0)_n kills n >= 1; remaining sum is (1 - 1/z)^{c-1}
        let x = ctx();
        let cc = c(3.0, 0.0);
        let z = c(-1.0, 0.0);
        let v = eval_1h1(&ComplexHP::zero(&x), &cc, &z, &x, &SeriesBudget::default()).unwrap();
        let one = ComplexHP::one(&x);
        let expected = cpow_principal(&one.sub(&one.div(&z).unwrap()), &cc.sub(&one)).unwrap();
        assert!(v.value.sub(&expected).abs() < v.err.clone() + x.tol() * 8u32);
    }

    #[test]
    fn matches_horn_closed_form() {
        let x = ctx();
        let budget = SeriesBudget { max_terms: 200_000, rtol: 1e-8 };
        let a = c(-0.3, 0.0);
        let cc = c(1.6, 0.0);
        for z in [c(-1.0, 0.0), c(0.0, 1.0)] {
            let series = eval_1h1(&a, &cc, &z, &x, &budget).unwrap();
            let closed = horn_closed_form(&a, &cc, &z, &x).unwrap();
            let diff = series.value.sub(&closed.value).abs();
            assert!(diff < series.err.clone() + &closed.err, "z = {z}, diff = {diff}");
        }
    }

    #[test]
    fn balanced_pair_matches_horn() {
        // the (-b; b+1) pair the limit study leans on, at b = 0.3, w = i;
        // the decay exponent is only 1.6, so ask for a feasible tolerance
        let x = ctx();
        let b = 0.3;
        let a = c(-b, 0.0);
        let cc = c(b + 1.0, 0.0);
        let w = c(0.0, 1.0);
        let budget = SeriesBudget { max_terms: 200_000, rtol: 1e-6 };
        let series = eval_1h1(&a, &cc, &w, &x, &budget).unwrap();
        let closed = horn_closed_form(&a, &cc, &w, &x).unwrap();
        let diff = series.value.sub(&closed.value).abs();
        assert!(diff < series.err.clone() + &closed.err, "diff = {diff}");
    }

    #[test]
    fn horn_spot_values() {
        let x = ctx();
        // a = 0 reduction: (1 - 1/(-1))^{3-1} = 4
        let v = horn_closed_form(&ComplexHP::zero(&x), &c(3.0, 0.0), &c(-1.0, 0.0), &x).unwrap();
        assert!(v.value.sub(&c(4.0, 0.0)).abs() < x.float(1e-60));
        // must equal the brute-force three-term sum
        let v = horn_closed_form(&c(-1.0, 0.0), &c(2.0, 0.0), &c(-1.0, 0.0), &x).unwrap();
        assert!(v.value.sub(&c(2.0, 0.0)).abs() < x.float(1e-60));
        // z = 1 excluded
        assert!(horn_closed_form(&c(-1.0, 0.0), &c(2.0, 0.0), &c(1.0, 0.0), &x).is_err());
    }

    #[test]
    fn dougall_finite_case() {
        let x = ctx();
        let v = eval_2h2(
            &c(-1.0, 0.0), &c(-1.0, 0.0), &c(2.0, 0.0), &c(2.0, 0.0), &c(1.0, 0.0),
            &x, &SeriesBudget::default(),
        )
        .unwrap();
        let expected = c(1.5, 0.0);
        assert!(v.value.sub(&expected).abs() < x.tol() * 4u32);
        let closed =
            dougall_closed_form(&c(-1.0, 0.0), &c(-1.0, 0.0), &c(2.0, 0.0), &c(2.0, 0.0), &x)
                .unwrap();
        assert!(closed.value.sub(&expected).abs() < closed.err);
    }

    #[test]
    fn dougall_generic_parameters() {
        let x = ctx();
        let budget = SeriesBudget { max_terms: 200_000, rtol: 1e-9 };
        let (a, b, cc, d) = (c(0.1, 0.0), c(0.2, 0.0), c(1.5, 0.0), c(1.7, 0.0));
        let series = eval_2h2(&a, &b, &cc, &d, &c(1.0, 0.0), &x, &budget).unwrap();
        let closed = dougall_closed_form(&a, &b, &cc, &d, &x).unwrap();
        let diff = series.value.sub(&closed.value).abs();
        assert!(diff < series.err.clone() + &closed.err, "diff = {diff}");
    }

    #[test]
    fn domain_violations_rejected() {
        let x = ctx();
        // Re(c + d - a - b) = 0.5
        let r = eval_2h2(
            &c(0.5, 0.0), &c(0.5, 0.0), &c(0.75, 0.0), &c(0.75, 0.0), &c(1.0, 0.0),
            &x, &SeriesBudget::default(),
        );
        assert!(matches!(r, Err(Error::Domain(_))));
        // |z| != 1
        let r = eval_1h1(&c(-1.0, 0.0), &c(2.0, 0.0), &c(0.5, 0.0), &x, &SeriesBudget::default());
        assert!(matches!(r, Err(Error::Domain(_))));
        // z = 1 for the one-parameter series
        let r = eval_1h1(&c(-0.3, 0.0), &c(1.6, 0.0), &c(1.0, 0.0), &x, &SeriesBudget::default());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn budget_exhaustion_reported() {
        let x = ctx();
        let budget = SeriesBudget { max_terms: 50, rtol: 1e-30 };
        let r = eval_1h1(&c(-0.3, 0.0), &c(1.6, 0.0), &c(0.0, 1.0), &x, &budget);
        assert!(matches!(r, Err(Error::Budget(_))));
    }
}

use once_cell::sync::Lazy;
use rug::ops::Pow;
use rug::Float;
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::complex::{cpow_principal, ComplexHP};
use crate::error::{Error, Result};
use crate::precision::PrecisionContext;

type CoeffCache = Mutex<HashMap<(u32, u32), Arc<Vec<Float>>>>;

/// Spouge coefficient cache keyed by (order a, working precision).
static COEFF_CACHE: Lazy<CoeffCache> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Spouge order for a target precision: the proven bound on the relative
/// truncation error is below `a^{-1/2} (2 pi)^{-(a + 1/2)}`, so
/// `a = bits / log2(2 pi) + margin` keeps it under `2^-bits`.
fn spouge_order(bits: u32) -> u32 {
    (bits as f64 / 2.651 + 8.0).ceil() as u32
}

/// Working precision for the coefficient sum. The alternating coefficients
/// reach magnitudes near `2^a`, so about `a` extra bits absorb the
/// cancellation, plus headroom for the per-term rounding.
fn spouge_working_prec(bits: u32, a: u32) -> u32 {
    bits + a + 48
}

fn spouge_coeffs(a: u32, wp: u32) -> Arc<Vec<Float>> {
    let mut cache = COEFF_CACHE.lock().unwrap();
    if let Some(c) = cache.get(&(a, wp)) {
        return Arc::clone(c);
    }
    let mut coeffs = Vec::with_capacity(a as usize);
    // c_0 = sqrt(2 pi)
    let two_pi = Float::with_val(wp, rug::float::Constant::Pi) * 2u32;
    coeffs.push(two_pi.sqrt());
    // c_k = (-1)^{k-1} (a-k)^{k-1/2} e^{a-k} / (k-1)!
    let mut factorial = Float::with_val(wp, 1);
    for k in 1..a {
        if k > 1 {
            factorial *= k - 1;
        }
        let amk = Float::with_val(wp, a - k);
        let e_pow = Float::with_val(wp, &amk).exp();
        let half_exp = Float::with_val(wp, k) - Float::with_val(wp, 0.5f64);
        let pow = Float::with_val(wp, amk.pow(&half_exp));
        let mut c = pow * e_pow / &factorial;
        if k % 2 == 0 {
            c = -c;
        }
        coeffs.push(c);
    }
    let arc = Arc::new(coeffs);
    cache.insert((a, wp), Arc::clone(&arc));
    arc
}

fn is_nonpositive_integer(z: &ComplexHP) -> bool {
    z.is_real() && z.re.is_integer() && z.re.cmp0() != Some(std::cmp::Ordering::Greater)
}

/// Classical gamma function by the Spouge convergent approximation, with the
/// reflection formula for the left half plane.
pub fn gamma(z: &ComplexHP, ctx: &PrecisionContext) -> Result<ComplexHP> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(format!("gamma pole at {z}")));
    }
    let bits = ctx.bits();
    let a = spouge_order(bits);
    let wp = spouge_working_prec(bits, a);

    let up = |x: &Float| Float::with_val(wp, x);
    let zw = ComplexHP::new(up(&z.re), up(&z.im));

    let value = if z.re >= 0.5f64 {
        spouge_pos(&zw, a, wp)?
    } else {
        // gamma(z) = pi / (sin(pi z) * gamma(1 - z))
        let pi = Float::with_val(wp, rug::float::Constant::Pi);
        let pz = zw.mul_real(&pi);
        let s = complex_sin(&pz);
        if s.is_zero() {
            return Err(Error::Pole(format!("gamma pole at {z}")));
        }
        let one = ComplexHP::new(Float::with_val(wp, 1), Float::with_val(wp, 0));
        let g = spouge_pos(&one.sub(&zw), a, wp)?;
        ComplexHP::from_real(pi).div(&s.mul(&g))?
    };
    // round back to the context precision
    Ok(ComplexHP::new(ctx.float(&value.re), ctx.float(&value.im)))
}

/// Spouge sum for Re(z) >= 1/2: with t = z - 1,
/// gamma(z) = (t + a)^{t + 1/2} e^{-(t + a)} [c0 + sum_k c_k / (t + k)].
fn spouge_pos(z: &ComplexHP, a: u32, wp: u32) -> Result<ComplexHP> {
    let coeffs = spouge_coeffs(a, wp);
    let one = Float::with_val(wp, 1);
    let t = ComplexHP::new(z.re.clone() - &one, z.im.clone());
    let mut sum = ComplexHP::from_real(coeffs[0].clone());
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        let den = ComplexHP::new(t.re.clone() + k as u32, t.im.clone());
        sum = sum.add(&ComplexHP::from_real(c.clone()).div(&den)?);
    }
    let ta = ComplexHP::new(t.re.clone() + a, t.im.clone());
    let expo = ComplexHP::new(t.re.clone() + Float::with_val(wp, 0.5f64), t.im.clone());
    let pow = cpow_principal(&ta, &expo)?;
    let damp = ta.neg().exp();
    Ok(pow.mul(&damp).mul(&sum))
}

fn complex_sin(z: &ComplexHP) -> ComplexHP {
    let prec = z.prec();
    let (sin, cos) = z.re.clone().sin_cos(Float::new(prec));
    let (sinh, cosh) = z.im.clone().sinh_cosh(Float::new(prec));
    ComplexHP::new(sin * cosh, cos * sinh)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn gamma_two_is_one() {
        let c = ctx();
        let g = gamma(&ComplexHP::from_f64(&c, 2.0, 0.0), &c).unwrap();
        assert!(g.sub(&ComplexHP::one(&c)).abs() < c.tol());
    }

    #[test]
    fn gamma_half_is_sqrt_pi() {
        let c = ctx();
        let g = gamma(&ComplexHP::from_f64(&c, 0.5, 0.0), &c).unwrap();
        let sqrt_pi = c.pi().sqrt();
        assert!((g.re.clone() - &sqrt_pi).abs() < c.tol() * &sqrt_pi);
        assert!(g.im.clone().abs() < c.tol());
    }

    #[test]
    fn gamma_three_halves_via_functional_equation() {
        let c = ctx();
        let g = gamma(&ComplexHP::from_f64(&c, 1.5, 0.0), &c).unwrap();
        let expected = c.pi().sqrt() / 2u32;
        assert!((g.re.clone() - &expected).abs() < c.tol() * &expected);
    }

    #[test]
    fn matches_mpfr_on_the_real_axis() {
        // independent oracle: MPFR's own gamma
        let c = ctx();
        for i in 1..40 {
            let x = 0.25f64 * i as f64 + 0.125;
            let ours = gamma(&ComplexHP::from_f64(&c, x, 0.0), &c).unwrap();
            let mpfr = c.float(x).gamma();
            let diff = (ours.re.clone() - &mpfr).abs();
            assert!(diff < c.tol().mul_add(&mpfr.clone().abs(), &c.tol()) * 8u32, "x = {x}");
        }
    }

    #[test]
    fn functional_equation_off_the_axis() {
        let c = ctx();
        let samples = [(0.3, 2.1), (-1.7, 0.9), (3.2, -4.4), (-4.6, -0.35), (0.5, 9.0)];
        for (re, im) in samples {
            let z = ComplexHP::from_f64(&c, re, im);
            let g1 = gamma(&z.add(&ComplexHP::one(&c)), &c).unwrap();
            let g0 = gamma(&z, &c).unwrap();
            let prod = z.mul(&g0);
            let err = g1.sub(&prod).abs();
            assert!(err < c.tol() * g1.abs() * 8u32, "z = ({re}, {im})");
        }
    }

    #[test]
    fn reflection_left_half_plane() {
        let c = ctx();
        // gamma(-1/2) = -2 sqrt(pi)
        let g = gamma(&ComplexHP::from_f64(&c, -0.5, 0.0), &c).unwrap();
        let expected = -(c.pi().sqrt() * 2u32);
        assert!((g.re.clone() - &expected).abs() < c.tol() * expected.abs());
    }

    #[test]
    fn poles_detected() {
        let c = ctx();
        for x in [0.0, -1.0, -2.0, -7.0] {
            assert!(matches!(
                gamma(&ComplexHP::from_f64(&c, x, 0.0), &c),
                Err(Error::Pole(_))
            ));
        }
    }
}

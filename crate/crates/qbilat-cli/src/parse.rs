//! Shell-safe literal parsing: complex numbers as `re`, `re+imi`, `re-imi`
//! with decimal or rational components, rationals as `n/d`, grids and ranges.

use qbilat::{ComplexHP, Error, PrecisionContext, Result};
use rug::{Float, Rational};

/// Parse one real component: decimal (`-0.25`, `1e-3`) or rational (`-2/3`).
pub fn parse_real(s: &str, ctx: &PrecisionContext) -> Result<Float> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let r: Rational = format!("{}/{}", n.trim(), d.trim())
            .parse()
            .map_err(|_| Error::Usage(format!("bad rational literal: {s}")))?;
        return Ok(ctx.float(&r));
    }
    Float::parse(s)
        .map(|v| ctx.float(v))
        .map_err(|_| Error::Usage(format!("bad numeric literal: {s}")))
}

/// Parse a complex literal: `re`, `imi`, `re+imi`, `re-imi`.
pub fn parse_complex(s: &str, ctx: &PrecisionContext) -> Result<ComplexHP> {
    let s = s.trim().replace(' ', "");
    if s.is_empty() {
        return Err(Error::Usage("empty complex literal".into()));
    }
    if let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('I')) {
        // find the sign that splits real and imaginary parts (skip a leading
        // sign and signs inside exponents)
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re = parse_real(&body[..i], ctx)?;
                let sign = if bytes[i] as char == '-' { -1.0 } else { 1.0 };
                let imag_txt = &body[i + 1..];
                let im = if imag_txt.is_empty() {
                    ctx.one()
                } else {
                    parse_real(imag_txt, ctx)?
                };
                Ok(ComplexHP::new(re, im * ctx.float(sign)))
            }
            None => {
                let im = if body.is_empty() || body == "+" {
                    ctx.one()
                } else if body == "-" {
                    -ctx.one()
                } else {
                    parse_real(body, ctx)?
                };
                Ok(ComplexHP::new(ctx.zero(), im))
            }
        }
    } else {
        Ok(ComplexHP::from_real(parse_real(&s, ctx)?))
    }
}

/// Parse an exact rational `n/d` or integer `n`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse()
        .map_err(|_| Error::Usage(format!("bad rational literal: {s}")))
}

/// Comma-separated f64 grid.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Usage(format!("bad grid entry: {p}")))
        })
        .collect()
}

/// `a..b` inclusive range of small integers.
pub fn parse_range(s: &str) -> Result<(u32, u32)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Error::Usage(format!("bad range (want k_min..k_max): {s}")))?;
    let lo = a.trim().parse().map_err(|_| Error::Usage(format!("bad range start: {a}")))?;
    let hi = b.trim().parse().map_err(|_| Error::Usage(format!("bad range end: {b}")))?;
    Ok((lo, hi))
}

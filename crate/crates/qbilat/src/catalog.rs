//! Machine-checkable registry evaluation: parameter records enforcing the
//! constraints, side evaluators, domain validation, and residual reports.

use serde::Serialize;

use crate::algebra::NumericAlgebra;
use crate::classical::{dougall_closed_form, eval_1h1, eval_2h2, horn_closed_form, SeriesBudget};
use crate::complex::{float_decimal, ComplexHP};
use crate::error::{Error, Result};
use crate::exprs::{eval_clauses, AlgParams};
use crate::identity::{IdentityId, Side};
use crate::precision::PrecisionContext;
use crate::qseries::QBase;
use crate::value::Eval;

pub const REPORT_DIGITS: usize = 50;

/// (beta, w) pair with the base; alpha and gamma are derived so that
/// alpha beta^2 = -1 and beta gamma = q hold by construction.
#[derive(Debug, Clone)]
pub struct ConstrainedParams {
    pub beta: ComplexHP,
    pub w: ComplexHP,
    pub base: QBase,
}

impl ConstrainedParams {
    pub fn new(beta: ComplexHP, w: ComplexHP, base: QBase, ctx: &PrecisionContext) -> Result<Self> {
        if beta.is_zero() || w.is_zero() {
            return Err(Error::Domain("beta and w must be nonzero".into()));
        }
        let s = Self { beta, w, base };
        s.assert_argument_consistency(ctx)?;
        Ok(s)
    }

    pub fn alpha(&self, _ctx: &PrecisionContext) -> Result<ComplexHP> {
        Ok(self.beta.mul(&self.beta).recip()?.neg())
    }

    pub fn gamma(&self) -> Result<ComplexHP> {
        ComplexHP::from_real(self.base.q()).div(&self.beta)
    }

    /// The common series argument gamma w / (alpha q^{1/2}), which must agree
    /// with its algebraic simplification -p beta w to rounding.
    fn assert_argument_consistency(&self, ctx: &PrecisionContext) -> Result<()> {
        let alpha = self.alpha(ctx)?;
        let p = self.base.p();
        let z_long = self
            .gamma()?
            .mul(&self.w)
            .div(&alpha.mul_real(&p))?;
        let z_short = self.beta.mul(&self.w).mul_real(&p).neg();
        let diff = z_long.sub(&z_short).abs();
        let scale = z_short.abs() + ctx.one();
        if diff > scale * ctx.tol() * 64u32 {
            return Err(Error::Domain(
                "internal: the two computations of the series argument disagree beyond rounding"
                    .into(),
            ));
        }
        Ok(())
    }
}

/// Fugacity-style parameters; the induced constrained triple is
/// (alpha, beta, gamma) = (-a, -a^{-1/2}, -a^{1/2} q), principal square root.
#[derive(Debug, Clone)]
pub struct PhysicsParams {
    pub a: ComplexHP,
    pub w: ComplexHP,
    pub base: QBase,
}

impl PhysicsParams {
    pub fn new(a: ComplexHP, w: ComplexHP, base: QBase) -> Result<Self> {
        if a.is_zero() || w.is_zero() {
            return Err(Error::Domain("a and w must be nonzero".into()));
        }
        Ok(Self { a, w, base })
    }

    pub fn sqrt_a(&self) -> Result<ComplexHP> {
        self.a.sqrt()
    }

    /// The embedding into the constrained family.
    pub fn to_constrained(&self, ctx: &PrecisionContext) -> Result<ConstrainedParams> {
        let beta = self.sqrt_a()?.recip()?.neg();
        ConstrainedParams::new(beta, self.w.clone(), self.base.clone(), ctx)
    }
}

/// Concrete parameter record for a check.
#[derive(Debug, Clone)]
pub enum ParamSet {
    Constrained(ConstrainedParams),
    XiEta { xi: ComplexHP, eta: ComplexHP, base: QBase },
    Physics(PhysicsParams),
    Ramanujan { a: ComplexHP, b: ComplexHP, z: ComplexHP, base: QBase },
    QBinomial { a: ComplexHP, z: ComplexHP, base: QBase },
    Theta { z: ComplexHP, k: i64, base: QBase },
    Classical1 { a: ComplexHP, c: ComplexHP, z: ComplexHP },
    Classical2 { a: ComplexHP, b: ComplexHP, c: ComplexHP, d: ComplexHP },
    Limit { b: f64, w: ComplexHP },
}

impl ParamSet {
    /// The same parameter values carried at the context's working precision,
    /// so every downstream operation computes at full precision regardless
    /// of how the record was constructed.
    pub fn raise(&self, ctx: &PrecisionContext) -> ParamSet {
        let bits = ctx.bits();
        match self {
            ParamSet::Constrained(p) => ParamSet::Constrained(ConstrainedParams {
                beta: p.beta.raise(bits),
                w: p.w.raise(bits),
                base: p.base.raise(bits),
            }),
            ParamSet::XiEta { xi, eta, base } => ParamSet::XiEta {
                xi: xi.raise(bits),
                eta: eta.raise(bits),
                base: base.raise(bits),
            },
            ParamSet::Physics(p) => ParamSet::Physics(PhysicsParams {
                a: p.a.raise(bits),
                w: p.w.raise(bits),
                base: p.base.raise(bits),
            }),
            ParamSet::Ramanujan { a, b, z, base } => ParamSet::Ramanujan {
                a: a.raise(bits),
                b: b.raise(bits),
                z: z.raise(bits),
                base: base.raise(bits),
            },
            ParamSet::QBinomial { a, z, base } => ParamSet::QBinomial {
                a: a.raise(bits),
                z: z.raise(bits),
                base: base.raise(bits),
            },
            ParamSet::Theta { z, k, base } => ParamSet::Theta {
                z: z.raise(bits),
                k: *k,
                base: base.raise(bits),
            },
            ParamSet::Classical1 { a, c, z } => ParamSet::Classical1 {
                a: a.raise(bits),
                c: c.raise(bits),
                z: z.raise(bits),
            },
            ParamSet::Classical2 { a, b, c, d } => ParamSet::Classical2 {
                a: a.raise(bits),
                b: b.raise(bits),
                c: c.raise(bits),
                d: d.raise(bits),
            },
            ParamSet::Limit { b, w } => ParamSet::Limit { b: *b, w: w.raise(bits) },
        }
    }

    pub fn base(&self) -> Option<&QBase> {
        match self {
            ParamSet::Constrained(p) => Some(&p.base),
            ParamSet::XiEta { base, .. }
            | ParamSet::Ramanujan { base, .. }
            | ParamSet::QBinomial { base, .. }
            | ParamSet::Theta { base, .. } => Some(base),
            ParamSet::Physics(p) => Some(&p.base),
            _ => None,
        }
    }

    pub fn describe(&self) -> serde_json::Value {
        let c = |z: &ComplexHP| serde_json::Value::String(z.to_decimal_string(24));
        let f = |x: &rug::Float| serde_json::Value::String(float_decimal(x, 24));
        let mut m = serde_json::Map::new();
        match self {
            ParamSet::Constrained(p) => {
                m.insert("beta".into(), c(&p.beta));
                m.insert("w".into(), c(&p.w));
                m.insert("q".into(), f(&p.base.q()));
            }
            ParamSet::XiEta { xi, eta, base } => {
                m.insert("xi".into(), c(xi));
                m.insert("eta".into(), c(eta));
                m.insert("q".into(), f(&base.q()));
            }
            ParamSet::Physics(p) => {
                m.insert("a".into(), c(&p.a));
                m.insert("w".into(), c(&p.w));
                m.insert("q".into(), f(&p.base.q()));
            }
            ParamSet::Ramanujan { a, b, z, base } => {
                m.insert("a".into(), c(a));
                m.insert("b".into(), c(b));
                m.insert("z".into(), c(z));
                m.insert("q".into(), f(&base.q()));
            }
            ParamSet::QBinomial { a, z, base } => {
                m.insert("a".into(), c(a));
                m.insert("z".into(), c(z));
                m.insert("q".into(), f(&base.q()));
            }
            ParamSet::Theta { z, k, base } => {
                m.insert("z".into(), c(z));
                m.insert("k".into(), serde_json::Value::from(*k));
                m.insert("q".into(), f(&base.q()));
            }
            ParamSet::Classical1 { a, c: cc, z } => {
                m.insert("a".into(), c(a));
                m.insert("c".into(), c(cc));
                m.insert("z".into(), c(z));
            }
            ParamSet::Classical2 { a, b, c: cc, d } => {
                m.insert("a".into(), c(a));
                m.insert("b".into(), c(b));
                m.insert("c".into(), c(cc));
                m.insert("d".into(), c(d));
            }
            ParamSet::Limit { b, w } => {
                m.insert("b".into(), serde_json::Value::from(*b));
                m.insert("w".into(), c(w));
            }
        }
        serde_json::Value::Object(m)
    }
}

/// Outcome of a domain check: pass/fail plus the reason string.
#[derive(Debug, Clone, Serialize)]
pub struct DomainCheck {
    pub pass: bool,
    pub reason: String,
}

impl DomainCheck {
    fn ok() -> Self {
        Self { pass: true, reason: "in domain".into() }
    }

    fn fail(reason: impl Into<String>) -> Self {
        Self { pass: false, reason: reason.into() }
    }
}

/// Validate parameters against an identity's convergence domain.
pub fn domain_check(id: IdentityId, params: &ParamSet, ctx: &PrecisionContext) -> DomainCheck {
    use IdentityId::*;
    match (id, params) {
        (MAIN1 | MAIN2 | COR1 | COR2, ParamSet::Constrained(p)) => {
            // the image of the annulus |b/a| < |z| < 1 under both series:
            // |p beta| < |w| < 1 / |p beta|
            let pb = p.beta.abs() * p.base.p();
            let w = p.w.abs();
            let hi = ctx.one() / &pb;
            if pb >= 1u32 {
                return DomainCheck::fail(format!("|q^(1/2) beta| = {pb} must be below 1"));
            }
            if !(w.clone() > pb.clone() && w < hi.clone()) {
                return DomainCheck::fail(format!(
                    "|w| = {w} outside the open annulus ({pb}, {hi})"
                ));
            }
            // strict interior: reject points within the series safety margin
            let margin = ctx.float(1e-3);
            if w.clone() - &pb < margin || hi - &w < margin {
                return DomainCheck::fail(format!(
                    "|w| = {w} within 1e-3 of the annulus boundary ({pb}, {})",
                    ctx.one() / &pb
                ));
            }
            DomainCheck::ok()
        }
        (PHYS1 | PHYS2, ParamSet::Physics(p)) => {
            let q = p.base.q();
            let lo = q / p.a.abs();
            let mid = p.base.p() * p.w.abs() / p.a.abs().sqrt();
            if lo < mid && mid < 1u32 {
                DomainCheck::ok()
            } else {
                DomainCheck::fail(format!(
                    "|q/a| < |q^(1/2) w / a^(1/2)| < 1 violated: {lo} vs {mid}"
                ))
            }
        }
        (RAMANUJAN, ParamSet::Ramanujan { a, b, z, .. }) => {
            let lo = b.abs() / a.abs();
            let za = z.abs();
            if lo < za.clone() && za < 1u32 {
                DomainCheck::ok()
            } else {
                DomainCheck::fail(format!("annulus |b/a| < |z| < 1 violated: {lo} vs {za}"))
            }
        }
        (QBINOM, ParamSet::QBinomial { z, .. }) => {
            if z.abs() < 1u32 {
                DomainCheck::ok()
            } else {
                DomainCheck::fail("|z| must be below 1")
            }
        }
        (JTP | THETA_INV | THETA_QDIFF, ParamSet::Theta { z, .. }) => {
            if z.is_zero() {
                DomainCheck::fail("z must be nonzero")
            } else {
                DomainCheck::ok()
            }
        }
        (LEM1 | P1, ParamSet::XiEta { xi, eta, .. }) => {
            if xi.is_zero() || eta.is_zero() {
                DomainCheck::fail("xi and eta must be nonzero")
            } else {
                DomainCheck::ok()
            }
        }
        (CO3 | CO4 | CO5 | CORL3 | CORL4 | COROL1 | CO6 | CO7 | CORO1 | CORO2,
            ParamSet::Constrained(p)) => {
            if p.beta.is_zero() || p.w.is_zero() {
                DomainCheck::fail("beta and w must be nonzero")
            } else {
                DomainCheck::ok()
            }
        }
        (HORN, ParamSet::Classical1 { a, c, z }) => {
            let s = (c.re.clone() - &a.re).to_f64();
            if s <= 1.0 {
                return DomainCheck::fail(format!("Re(c - a) = {s} must exceed 1"));
            }
            let one = ComplexHP::one(ctx);
            if (z.abs() - ctx.one()).abs() > ctx.float(1e-9) || z.sub(&one).abs() < ctx.float(1e-6)
            {
                return DomainCheck::fail("|z| = 1 with z != 1 required");
            }
            DomainCheck::ok()
        }
        (DOUGALL, ParamSet::Classical2 { a, b, c, d }) => {
            let s = (c.re.clone() + &d.re - &a.re - &b.re).to_f64();
            if s > 1.0 {
                DomainCheck::ok()
            } else {
                DomainCheck::fail(format!("Re(c + d - a - b) = {s} must exceed 1"))
            }
        }
        (LIMIT_MAIN, ParamSet::Limit { b, w }) => {
            if *b <= 0.0 {
                return DomainCheck::fail("b must be positive");
            }
            let one = ComplexHP::one(ctx);
            if (w.abs() - ctx.one()).abs() > ctx.float(1e-9) || w.sub(&one).abs() < ctx.float(1e-9)
            {
                return DomainCheck::fail("|w| = 1 with w != 1 required");
            }
            DomainCheck::ok()
        }
        _ => DomainCheck::fail(format!(
            "identity {id} does not accept this parameter family"
        )),
    }
}

fn alg_params(params: &ParamSet, ctx: &PrecisionContext) -> Result<AlgParams<Eval>> {
    Ok(match params {
        ParamSet::Constrained(p) => AlgParams::Constrained {
            beta: Eval::exact(p.beta.clone()),
            w: Eval::exact(p.w.clone()),
        },
        ParamSet::XiEta { xi, eta, .. } => AlgParams::XiEta {
            xi: Eval::exact(xi.clone()),
            eta: Eval::exact(eta.clone()),
        },
        ParamSet::Physics(p) => AlgParams::Physics {
            a: Eval::exact(p.a.clone()),
            sqrt_a: Eval::exact(p.sqrt_a()?),
            w: Eval::exact(p.w.clone()),
        },
        ParamSet::Ramanujan { a, b, z, .. } => AlgParams::Ramanujan {
            a: Eval::exact(a.clone()),
            b: Eval::exact(b.clone()),
            z: Eval::exact(z.clone()),
        },
        ParamSet::QBinomial { a, z, .. } => AlgParams::QBinomial {
            a: Eval::exact(a.clone()),
            z: Eval::exact(z.clone()),
        },
        ParamSet::Theta { z, k, .. } => AlgParams::Theta { z: Eval::exact(z.clone()), k: *k },
        _ => {
            let _ = ctx;
            return Err(Error::Usage(
                "classical and limit statements are evaluated outside the q-algebra".into(),
            ));
        }
    })
}

/// Evaluate the clause list (lhs, rhs pairs) of an identity at numeric
/// parameters, with truncation metadata.
pub fn eval_all_clauses_with_stats(
    id: IdentityId,
    params: &ParamSet,
    ctx: &PrecisionContext,
    budget: &SeriesBudget,
) -> Result<(Vec<(Eval, Eval)>, serde_json::Value)> {
    use IdentityId::*;
    let params = &params.raise(ctx);
    match (id, params) {
        (HORN, ParamSet::Classical1 { a, c, z }) => {
            let lhs = eval_1h1(a, c, z, ctx, budget)?;
            let rhs = horn_closed_form(a, c, z, ctx)?;
            let meta = serde_json::json!({ "rtol": budget.rtol, "max_terms": budget.max_terms });
            Ok((vec![(lhs, rhs)], meta))
        }
        (DOUGALL, ParamSet::Classical2 { a, b, c, d }) => {
            let one = ComplexHP::one(ctx);
            let lhs = eval_2h2(a, b, c, d, &one, ctx, budget)?;
            let rhs = dougall_closed_form(a, b, c, d, ctx)?;
            let meta = serde_json::json!({ "rtol": budget.rtol, "max_terms": budget.max_terms });
            Ok((vec![(lhs, rhs)], meta))
        }
        (LIMIT_MAIN, ParamSet::Limit { b, w }) => {
            let lhs = crate::limits::mainlim2_lhs_via_h(
                &crate::limits::LimitParams::new(*b, w.clone(), ctx)?,
                ctx,
                budget,
            )?;
            let rhs = crate::limits::mainlim2_rhs(
                &crate::limits::LimitParams::new(*b, w.clone(), ctx)?,
                ctx,
            )?;
            let meta = serde_json::json!({ "rtol": budget.rtol, "max_terms": budget.max_terms });
            Ok((vec![(lhs, rhs)], meta))
        }
        _ => {
            let base = params
                .base()
                .ok_or_else(|| Error::Usage("parameter record lacks a base".into()))?
                .clone();
            let alg = NumericAlgebra::new(ctx, base);
            let ap = alg_params(params, ctx)?;
            let clauses = eval_clauses(&alg, id, &ap)?;
            let stats = alg.stats();
            let meta = serde_json::json!({
                "psi_terms": stats.psi_terms,
                "poch_factors": stats.poch_factors,
            });
            Ok((clauses, meta))
        }
    }
}

/// Evaluate the clause list (lhs, rhs pairs) of an identity at numeric
/// parameters.
pub fn eval_all_clauses(
    id: IdentityId,
    params: &ParamSet,
    ctx: &PrecisionContext,
    budget: &SeriesBudget,
) -> Result<Vec<(Eval, Eval)>> {
    eval_all_clauses_with_stats(id, params, ctx, budget).map(|(c, _)| c)
}

/// Evaluate one side of an identity (principal clause).
pub fn eval_side(
    id: IdentityId,
    side: Side,
    params: &ParamSet,
    ctx: &PrecisionContext,
    budget: &SeriesBudget,
) -> Result<Eval> {
    let clauses = eval_all_clauses(id, params, ctx, budget)?;
    let (lhs, rhs) = clauses.into_iter().next().expect("every identity has a clause");
    Ok(match side {
        Side::Lhs => lhs,
        Side::Rhs => rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportStatus {
    Pass,
    Fail,
    Indeterminate,
}

/// Evaluation record for one identity at one parameter point.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityReport {
    pub identity: IdentityId,
    pub source: String,
    pub params: serde_json::Value,
    pub precision_bits: u32,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub abs_err: Option<String>,
    pub rel_err: Option<String>,
    pub lhs_bound: Option<String>,
    pub rhs_bound: Option<String>,
    pub status: ReportStatus,
    pub pass: bool,
    pub worst_clause: usize,
    pub clauses: usize,
    pub truncation: serde_json::Value,
    pub notes: String,
    /// Relative residual as f64 for summaries (None when indeterminate).
    #[serde(skip)]
    pub rel_err_f64: Option<f64>,
}

/// Acceptance rule for a residual: strict but rounding-aware.
pub fn tolerance_policy(
    abs_err: &rug::Float,
    lhs_bound: &rug::Float,
    rhs_bound: &rug::Float,
    lhs_abs: &rug::Float,
    rhs_abs: &rug::Float,
    ctx: &PrecisionContext,
) -> bool {
    let scale = if lhs_abs > rhs_abs { lhs_abs.clone() } else { rhs_abs.clone() };
    let budget = (lhs_bound.clone() + rhs_bound) * 4u32 + ctx.tol() * scale;
    *abs_err <= budget
}

/// Evaluate both sides of every clause, compute residuals, apply the
/// tolerance policy, and record truncation metadata.
pub fn check(
    id: IdentityId,
    params: &ParamSet,
    ctx: &PrecisionContext,
    budget: &SeriesBudget,
) -> Result<IdentityReport> {
    let dc = domain_check(id, params, ctx);
    if !dc.pass {
        return Err(Error::Domain(dc.reason));
    }
    let info = id.info();
    let mut report = IdentityReport {
        identity: id,
        source: info.source.to_string(),
        params: params.describe(),
        precision_bits: ctx.bits(),
        lhs: None,
        rhs: None,
        abs_err: None,
        rel_err: None,
        lhs_bound: None,
        rhs_bound: None,
        status: ReportStatus::Indeterminate,
        pass: false,
        worst_clause: 0,
        clauses: info.clauses,
        truncation: serde_json::Value::Null,
        notes: info.notes.to_string(),
        rel_err_f64: None,
    };

    let (clauses, trunc_meta) = match eval_all_clauses_with_stats(id, params, ctx, budget) {
        Ok(c) => c,
        Err(Error::Pole(msg)) => {
            // a vanishing denominator (measure-zero parameter set) is
            // indeterminate rather than a failure
            report.notes = format!("indeterminate: {msg}");
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.truncation = trunc_meta;

    if id == IdentityId::LIMIT_MAIN {
        // recorded, never asserted: report the measured ratio of the two
        // printed sides
        let (lhs, rhs) = &clauses[0];
        let ratio = lhs.value.div(&rhs.value)?;
        report.lhs = Some(lhs.value.to_decimal_string(REPORT_DIGITS));
        report.rhs = Some(rhs.value.to_decimal_string(REPORT_DIGITS));
        report.lhs_bound = Some(float_decimal(&lhs.err, 8));
        report.rhs_bound = Some(float_decimal(&rhs.err, 8));
        report.notes = format!(
            "{}; measured lhs/rhs = {}",
            info.notes,
            ratio.to_decimal_string(12)
        );
        return Ok(report);
    }

    let mut worst: Option<(usize, rug::Float, rug::Float)> = None; // (idx, abs, rel)
    let mut all_pass = true;
    for (i, (lhs, rhs)) in clauses.iter().enumerate() {
        let abs = lhs.value.sub(&rhs.value).abs();
        let lab = lhs.value.abs();
        let rab = rhs.value.abs();
        let scale = if lab > rab { lab.clone() } else { rab.clone() };
        let rel = if scale.cmp0() == Some(std::cmp::Ordering::Greater) {
            abs.clone() / &scale
        } else {
            abs.clone()
        };
        let pass = tolerance_policy(&abs, &lhs.err, &rhs.err, &lab, &rab, ctx);
        all_pass &= pass;
        let replace = match &worst {
            None => true,
            Some((_, _, wr)) => rel > *wr,
        };
        if replace {
            worst = Some((i, abs, rel));
        }
    }
    let (wi, wabs, wrel) = worst.expect("at least one clause");
    let (lhs, rhs) = &clauses[wi];
    report.lhs = Some(lhs.value.to_decimal_string(REPORT_DIGITS));
    report.rhs = Some(rhs.value.to_decimal_string(REPORT_DIGITS));
    report.abs_err = Some(float_decimal(&wabs, 8));
    report.rel_err = Some(float_decimal(&wrel, 8));
    report.lhs_bound = Some(float_decimal(&lhs.err, 8));
    report.rhs_bound = Some(float_decimal(&rhs.err, 8));
    report.worst_clause = wi;
    report.rel_err_f64 = Some(wrel.to_f64());
    report.status = if all_pass { ReportStatus::Pass } else { ReportStatus::Fail };
    report.pass = all_pass;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi::{psi_bilateral, PsiOptions, PsiSpec};
    use crate::qseries::qpoch_inf;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn c(re: f64, im: f64) -> ComplexHP {
        ComplexHP::from_f64(&ctx(), re, im)
    }

    fn constrained(q: f64, beta: ComplexHP, w: ComplexHP) -> ParamSet {
        let x = ctx();
        let base = QBase::from_q_f64(&x, q).unwrap();
        ParamSet::Constrained(ConstrainedParams::new(beta, w, base, &x).unwrap())
    }

    #[test]
    fn main1_spot_check() {
        let x = ctx();
        let params = constrained(0.25, c(0.6, 0.1), c(0.7, 0.0));
        let r = check(IdentityId::MAIN1, &params, &x, &SeriesBudget::default()).unwrap();
        assert_eq!(r.status, ReportStatus::Pass, "report: {r:?}");
        assert!(r.rel_err_f64.unwrap() < 1e-40);
    }

    #[test]
    fn main2_and_corollaries() {
        let x = ctx();
        for id in [IdentityId::MAIN2, IdentityId::COR1, IdentityId::COR2] {
            let params = constrained(0.3, c(0.55, -0.2), c(0.4, 0.45));
            let r = check(id, &params, &x, &SeriesBudget::default()).unwrap();
            assert_eq!(r.status, ReportStatus::Pass, "{id}: {r:?}");
        }
    }

    #[test]
    fn adding_both_branches_cancels_the_second_series() {
        // lhs(MAIN1) + lhs(MAIN2) must equal the first prefactor-series
        // product alone times the half-base prefactor
        let x = ctx();
        let budget = SeriesBudget::default();
        let params = constrained(0.25, c(0.6, 0.1), c(0.7, 0.0));
        let l1 = eval_side(IdentityId::MAIN1, Side::Lhs, &params, &x, &budget).unwrap();
        let l2 = eval_side(IdentityId::MAIN2, Side::Lhs, &params, &x, &budget).unwrap();
        let total = l1.add(&l2);

        // independent assembly of the first term
        let (beta, w, base) = match &params {
            ParamSet::Constrained(p) => (p.beta.clone(), p.w.clone(), p.base.clone()),
            _ => unreachable!(),
        };
        let q = base.q();
        let p = base.p();
        let alpha = beta.mul(&beta).recip().unwrap().neg();
        let gamma = ComplexHP::from_real(q.clone()).div(&beta).unwrap();
        let ab = alpha.mul(&beta);
        let ga = gamma.div(&alpha).unwrap();
        let z = gamma.mul(&w).div(&alpha.mul_real(&p)).unwrap();
        let spec = PsiSpec::one_one(ab.clone(), ga.clone());
        let s1 = psi_bilateral(&spec, &base, &z, &x, &PsiOptions::default()).unwrap();
        let f1 = qpoch_inf(&ga, &q, &x)
            .unwrap()
            .to_eval()
            .div(&qpoch_inf(&ab, &q, &x).unwrap().to_eval())
            .unwrap();
        let q2 = base.q_squared();
        let pref = qpoch_inf(&ComplexHP::from_real(q.clone()), &q2, &x)
            .unwrap()
            .to_eval()
            .div(&qpoch_inf(&ComplexHP::from_real(q2.clone()), &q2, &x).unwrap().to_eval())
            .unwrap();
        let expected = pref.mul(&f1).mul(&s1.value);
        let diff = total.value.sub(&expected.value).abs();
        assert!(diff < total.err.clone() + &expected.err + x.tol() * 32u32);
    }

    #[test]
    fn theta_identities_pass() {
        let x = ctx();
        let base = QBase::from_q_f64(&x, 0.3).unwrap();
        for (id, k) in [(IdentityId::JTP, 0), (IdentityId::THETA_INV, 0), (IdentityId::THETA_QDIFF, 2)]
        {
            let params = ParamSet::Theta { z: c(0.8, 0.45), k, base: base.clone() };
            let r = check(id, &params, &x, &SeriesBudget::default()).unwrap();
            assert_eq!(r.status, ReportStatus::Pass, "{id}: {r:?}");
        }
    }

    #[test]
    fn product_lemmas_pass() {
        let x = ctx();
        let base = QBase::from_q_f64(&x, 0.3).unwrap();
        let params = ParamSet::XiEta { xi: c(1.0, 1.0), eta: c(2.0, 0.0), base: base.clone() };
        for id in [IdentityId::LEM1, IdentityId::P1] {
            let r = check(id, &params, &x, &SeriesBudget::default()).unwrap();
            assert_eq!(r.status, ReportStatus::Pass, "{id}: {r:?}");
        }
        let cons = constrained(0.3, c(0.7, 0.3), c(0.5, 0.6));
        for id in [
            IdentityId::CO3,
            IdentityId::CO4,
            IdentityId::CO5,
            IdentityId::CORL3,
            IdentityId::CORL4,
            IdentityId::COROL1,
            IdentityId::CO6,
            IdentityId::CO7,
            IdentityId::CORO1,
            IdentityId::CORO2,
        ] {
            let r = check(id, &cons, &x, &SeriesBudget::default()).unwrap();
            assert_eq!(r.status, ReportStatus::Pass, "{id}: {r:?}");
        }
    }

    #[test]
    fn ramanujan_zero_case() {
        let x = ctx();
        let base = QBase::from_q_f64(&x, 0.5).unwrap();
        let params = ParamSet::Ramanujan {
            a: c(4.0, 0.0),
            b: c(0.25, 0.0),
            z: c(0.5, 0.0),
            base,
        };
        let r = check(IdentityId::RAMANUJAN, &params, &x, &SeriesBudget::default()).unwrap();
        assert_eq!(r.status, ReportStatus::Pass);
        // |lhs| itself is below its own error bound
        let lhs = eval_side(IdentityId::RAMANUJAN, Side::Lhs, &params, &x, &SeriesBudget::default())
            .unwrap();
        assert!(lhs.value.abs() < lhs.err);
    }

    #[test]
    fn physics_embedding_matches_main() {
        let x = ctx();
        let base = QBase::from_q_f64(&x, 0.2).unwrap();
        let a = c(2.5, 0.7);
        let w = c(0.35, 0.3);
        let phys = ParamSet::Physics(PhysicsParams::new(a.clone(), w.clone(), base.clone()).unwrap());
        let dc = domain_check(IdentityId::PHYS1, &phys, &x);
        assert!(dc.pass, "{}", dc.reason);
        let r = check(IdentityId::PHYS1, &phys, &x, &SeriesBudget::default()).unwrap();
        assert_eq!(r.status, ReportStatus::Pass, "{r:?}");
        let r = check(IdentityId::PHYS2, &phys, &x, &SeriesBudget::default()).unwrap();
        assert_eq!(r.status, ReportStatus::Pass, "{r:?}");

        // cross-substitution: both sides of PHYS1 equal those of MAIN1 under
        // the embedding
        let pp = match &phys {
            ParamSet::Physics(p) => p.clone(),
            _ => unreachable!(),
        };
        let cons = ParamSet::Constrained(pp.to_constrained(&x).unwrap());
        let budget = SeriesBudget::default();
        for side in [Side::Lhs, Side::Rhs] {
            let vp = eval_side(IdentityId::PHYS1, side, &phys, &x, &budget).unwrap();
            let vm = eval_side(IdentityId::MAIN1, side, &cons, &x, &budget).unwrap();
            let diff = vp.value.sub(&vm.value).abs();
            assert!(diff < vp.err.clone() + &vm.err + x.tol() * 32u32);
        }
    }

    #[test]
    fn domain_checks() {
        let x = ctx();
        // the worked annulus example: q = 0.25, beta = 0.6, |w| = 0.7
        let params = constrained(0.25, c(0.6, 0.0), c(0.7, 0.0));
        assert!(domain_check(IdentityId::MAIN1, &params, &x).pass);
        // boundary |w| = |p beta| excluded
        let params = constrained(0.25, c(0.6, 0.0), c(0.3, 0.0));
        assert!(!domain_check(IdentityId::MAIN1, &params, &x).pass);
        // check() propagates a domain failure as an error
        assert!(matches!(
            check(IdentityId::MAIN1, &params, &x, &SeriesBudget::default()),
            Err(Error::Domain(_))
        ));
        // physics boundary |q^{1/2} w / a^{1/2}| = 1 excluded
        let base = QBase::from_q_f64(&x, 0.25).unwrap();
        let a = c(4.0, 0.0);
        let w = c(4.0, 0.0); // |p w / sqrt(a)| = 0.5 * 4 / 2 = 1
        let phys = ParamSet::Physics(PhysicsParams::new(a, w, base).unwrap());
        assert!(!domain_check(IdentityId::PHYS1, &phys, &x).pass);
    }

    #[test]
    fn residuals_are_q_independent_at_fixed_parameters() {
        // an exact identity passes with the same (beta, w) at every base
        let x = ctx();
        let budget = SeriesBudget::default();
        for q in [0.3, 0.5, 0.7] {
            let params = constrained(q, c(0.55, 0.15), c(0.8, 0.3));
            let r = check(IdentityId::MAIN1, &params, &x, &budget).unwrap();
            assert_eq!(r.status, ReportStatus::Pass, "q = {q}");
            assert!(r.rel_err_f64.unwrap() < 1e-40, "q = {q}");
        }
    }

    #[test]
    fn limit_statement_reported_not_asserted() {
        let x = ctx();
        let params = ParamSet::Limit { b: 1.0, w: c(-1.0, 0.0) };
        let r = check(IdentityId::LIMIT_MAIN, &params, &x, &SeriesBudget::default()).unwrap();
        assert_eq!(r.status, ReportStatus::Indeterminate);
        assert!(r.notes.contains("measured lhs/rhs"));
        assert!(r.notes.contains("0.20000"), "ratio 2 expected in notes: {}", r.notes);
    }
}

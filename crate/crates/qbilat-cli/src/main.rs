//! Command-line front end: evaluate the special functions, verify catalog
//! identities numerically or formally, run randomized scans, and run the
//! q -> 1-0 limit study, emitting deterministic JSON/CSV reports.

mod parse;

use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use qbilat::catalog::{
    check, domain_check, ConstrainedParams, ParamSet, PhysicsParams, ReportStatus,
};
use qbilat::classical::{
    dougall_closed_form, eval_1h1, eval_2h2, horn_closed_form, SeriesBudget,
};
use qbilat::complex::float_decimal;
use qbilat::formal::{formal_check, FormalParams};
use qbilat::limits::{limit_report, LimitBranch, LimitParams};
use qbilat::psi::{psi_bilateral, ramanujan_rhs, PsiOptions, PsiSpec};
use qbilat::qseries::{q_gamma, qpoch_finite, qpoch_inf, QBase};
use qbilat::scan::{scan, ScanConfig};
use qbilat::theta::{theta_product, theta_series};
use qbilat::{ComplexHP, Error, IdentityId, PrecisionContext};

const EXIT_PASS: u8 = 0;
const EXIT_VERIFY_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "qbilat", version, about = "evaluate and verify bilateral q-series identities")]
struct Cli {
    /// Working precision in bits (default 256; env QBILAT_PREC overrides the
    /// default, the flag wins over both).
    #[arg(long, global = true)]
    prec: Option<u32>,

    /// Sampler seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the report to this path instead of stdout.
    #[arg(long, global = true)]
    output: Option<String>,

    /// Suppress run metadata that varies between runs (timestamps).
    #[arg(long, global = true, default_value_t = false)]
    deterministic: bool,

    /// Flat key = value file mirroring the long flags; flags override it.
    #[arg(long, global = true)]
    config: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    max_terms: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one function and print value, error bound, and truncation
    /// metadata.
    Eval {
        /// qpoch | theta | qgamma | psi | h1 | h2 | horn | dougall | ramanujan_rhs
        function: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Finite order for qpoch (omit for the infinite product).
        #[arg(long, allow_hyphen_values = true)]
        n: Option<i64>,
        /// theta route: series (default) or product.
        #[arg(long)]
        route: Option<String>,
    },
    /// Check one identity at explicit parameters and emit the report.
    Verify {
        #[arg(long)]
        identity: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Print the registry's statement, anchor, and notes, then exit.
        #[arg(long, default_value_t = false)]
        source: bool,
    },
    /// Seeded randomized scan over one identity or all of them.
    Scan {
        /// Identity tag or "all".
        #[arg(long, default_value = "all")]
        identity: String,
        #[arg(long)]
        samples: Option<usize>,
        /// Comma-separated q grid, e.g. 0.3,0.5,0.7.
        #[arg(long)]
        q: Option<String>,
    },
    /// Exact formal-series check at rational parameters.
    Formal {
        #[arg(long)]
        identity: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
        #[arg(long)]
        order: Option<i64>,
        /// Print the registry's statement, anchor, and notes, then exit.
        #[arg(long, default_value_t = false)]
        source: bool,
    },
    /// Weighted q -> 1-0 study of the two-branch summation formulae.
    Limit {
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
        /// k range for q_k = 1 - 2^-k, e.g. 3..10.
        #[arg(long)]
        k: Option<String>,
        /// plus (default) or minus branch.
        #[arg(long)]
        branch: Option<String>,
        /// json (default) or csv.
        #[arg(long)]
        format: Option<String>,
    },
}

fn load_config(path: &Option<String>) -> Result<BTreeMap<String, String>, Error> {
    let mut map = BTreeMap::new();
    if let Some(p) = path {
        let text = std::fs::read_to_string(p)
            .map_err(|e| Error::Usage(format!("cannot read config {p}: {e}")))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Usage(format!("config line {} is not key = value", lineno + 1))
            })?;
            let key = k.trim().to_string();
            if !matches!(
                key.as_str(),
                "prec" | "seed" | "samples" | "q" | "order" | "deterministic" | "output"
            ) {
                return Err(Error::Usage(format!("unknown config key: {key}")));
            }
            map.insert(key, v.trim().to_string());
        }
    }
    Ok(map)
}

struct Resolved {
    ctx: PrecisionContext,
    seed: u64,
    deterministic: bool,
    output: Option<String>,
    cfg: BTreeMap<String, String>,
}

fn resolve(cli: &Cli) -> Result<Resolved, Error> {
    let cfg = load_config(&cli.config)?;
    let cfg_get = |k: &str| cfg.get(k).cloned();
    let prec = match cli.prec {
        Some(p) => p,
        None => match cfg_get("prec") {
            Some(s) => s.parse().map_err(|_| Error::Usage(format!("bad prec: {s}")))?,
            None => match std::env::var("QBILAT_PREC") {
                Ok(s) => s.parse().map_err(|_| Error::Usage(format!("bad QBILAT_PREC: {s}")))?,
                Err(_) => qbilat::precision::DEFAULT_PREC_BITS,
            },
        },
    };
    let seed = match cli.seed {
        Some(s) => s,
        None => match cfg_get("seed") {
            Some(s) => s.parse().map_err(|_| Error::Usage(format!("bad seed: {s}")))?,
            None => 42,
        },
    };
    let deterministic = cli.deterministic
        || cfg_get("deterministic").map(|s| s == "true" || s == "1").unwrap_or(false);
    let output = cli.output.clone().or_else(|| cfg_get("output"));
    Ok(Resolved {
        ctx: PrecisionContext::with_bits(prec)?,
        seed,
        deterministic,
        output,
        cfg,
    })
}

fn budget_from(params: &ParamArgs) -> SeriesBudget {
    let mut b = SeriesBudget::default();
    if let Some(r) = params.rtol {
        b.rtol = r;
    }
    if let Some(m) = params.max_terms {
        b.max_terms = m;
    }
    b
}

fn need<'a>(v: &'a Option<String>, name: &str) -> Result<&'a str, Error> {
    v.as_deref().ok_or_else(|| Error::Usage(format!("missing required parameter --{name}")))
}

fn base_from(params: &ParamArgs, ctx: &PrecisionContext) -> Result<QBase, Error> {
    let q = parse::parse_real(need(&params.q, "q")?, ctx)?;
    QBase::from_q(q)
}

fn emit(doc: &serde_json::Value, out: &Option<String>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(doc).expect("report serializes") + "\n";
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Usage(format!("cannot write {path}: {e}"))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Usage(format!("cannot write report: {e}"))),
    }
}

fn run_metadata(r: &Resolved, doc: &mut serde_json::Map<String, serde_json::Value>) {
    doc.insert("precision_bits".into(), r.ctx.bits().into());
    doc.insert("guard_bits".into(), r.ctx.guard().into());
    if !r.deterministic {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        doc.insert("generated_at_unix".into(), now.into());
    }
}

/// Assemble a parameter record for an identity from explicit flags.
fn param_set_for(
    id: IdentityId,
    p: &ParamArgs,
    ctx: &PrecisionContext,
) -> Result<ParamSet, Error> {
    use qbilat::identity::ParamKind::*;
    Ok(match id.info().kind {
        Constrained => {
            let base = base_from(p, ctx)?;
            let beta = parse::parse_complex(need(&p.beta, "beta")?, ctx)?;
            let w = parse::parse_complex(need(&p.w, "w")?, ctx)?;
            ParamSet::Constrained(ConstrainedParams::new(beta, w, base, ctx)?)
        }
        XiEta => {
            let base = base_from(p, ctx)?;
            ParamSet::XiEta {
                xi: parse::parse_complex(need(&p.xi, "xi")?, ctx)?,
                eta: parse::parse_complex(need(&p.eta, "eta")?, ctx)?,
                base,
            }
        }
        Physics => {
            let base = base_from(p, ctx)?;
            let a = parse::parse_complex(need(&p.a, "a")?, ctx)?;
            let w = parse::parse_complex(need(&p.w, "w")?, ctx)?;
            ParamSet::Physics(PhysicsParams::new(a, w, base)?)
        }
        Ramanujan => {
            let base = base_from(p, ctx)?;
            ParamSet::Ramanujan {
                a: parse::parse_complex(need(&p.a, "a")?, ctx)?,
                b: parse::parse_complex(need(&p.b, "b")?, ctx)?,
                z: parse::parse_complex(need(&p.z, "z")?, ctx)?,
                base,
            }
        }
        QBinomial => {
            let base = base_from(p, ctx)?;
            ParamSet::QBinomial {
                a: parse::parse_complex(need(&p.a, "a")?, ctx)?,
                z: parse::parse_complex(need(&p.z, "z")?, ctx)?,
                base,
            }
        }
        Theta => {
            let base = base_from(p, ctx)?;
            let k = match &p.k {
                Some(s) => s.parse().map_err(|_| Error::Usage(format!("bad k: {s}")))?,
                None => 1,
            };
            ParamSet::Theta { z: parse::parse_complex(need(&p.z, "z")?, ctx)?, k, base }
        }
        Classical1 => ParamSet::Classical1 {
            a: parse::parse_complex(need(&p.a, "a")?, ctx)?,
            c: parse::parse_complex(need(&p.c, "c")?, ctx)?,
            z: parse::parse_complex(need(&p.z, "z")?, ctx)?,
        },
        Classical2 => ParamSet::Classical2 {
            a: parse::parse_complex(need(&p.a, "a")?, ctx)?,
            b: parse::parse_complex(need(&p.b, "b")?, ctx)?,
            c: parse::parse_complex(need(&p.c, "c")?, ctx)?,
            d: parse::parse_complex(need(&p.d, "d")?, ctx)?,
        },
        Limit => {
            let b = parse::parse_real(need(&p.b, "b")?, ctx)?.to_f64();
            ParamSet::Limit { b, w: parse::parse_complex(need(&p.w, "w")?, ctx)? }
        }
    })
}

fn source_doc(id: IdentityId) -> serde_json::Value {
    let info = id.info();
    serde_json::json!({
        "identity": format!("{id}"),
        "source": info.source,
        "anchor": info.anchor,
        "notes": info.notes,
        "clauses": info.clauses,
    })
}

fn cmd_eval(
    r: &Resolved,
    function: &str,
    p: &ParamArgs,
    n: Option<i64>,
    route: Option<&str>,
) -> Result<u8, Error> {
    let ctx = &r.ctx;
    let budget = budget_from(p);
    let mut doc = serde_json::Map::new();
    doc.insert("command".into(), "eval".into());
    doc.insert("function".into(), function.into());
    run_metadata(r, &mut doc);

    let (value, err, trunc): (ComplexHP, rug::Float, serde_json::Value) = match function {
        "qpoch" => {
            let base = base_from(p, ctx)?;
            let a = parse::parse_complex(need(&p.a, "a")?, ctx)?;
            match n {
                Some(kk) => {
                    let v = qpoch_finite(&a, &base.q(), kk, ctx)?;
                    (v, ctx.zero(), serde_json::json!({ "factors": kk.unsigned_abs() }))
                }
                None => {
                    let v = qpoch_inf(&a, &base.q(), ctx)?;
                    (v.value, v.err_bound, serde_json::json!({ "factors": v.factors_used }))
                }
            }
        }
        "theta" => {
            let base = base_from(p, ctx)?;
            let z = parse::parse_complex(need(&p.z, "z")?, ctx)?;
            let v = match route.unwrap_or("series") {
                "product" => theta_product(&z, &base, qbilat::qseries::BasePow::Q, ctx)?,
                _ => theta_series(&z, &base, qbilat::qseries::BasePow::Q, ctx)?,
            };
            (v.value, v.err, serde_json::json!({}))
        }
        "qgamma" => {
            let base = base_from(p, ctx)?;
            let z = parse::parse_complex(need(&p.z, "z")?, ctx)?;
            let v = q_gamma(&z, &base, ctx)?;
            (v.value, v.err, serde_json::json!({}))
        }
        "psi" => {
            let base = base_from(p, ctx)?;
            let parse_list = |s: &str| -> Result<Vec<ComplexHP>, Error> {
                if s.trim().is_empty() {
                    return Ok(vec![]);
                }
                s.split(',').map(|t| parse::parse_complex(t, ctx)).collect()
            };
            let nums = parse_list(p.a.as_deref().unwrap_or(""))?;
            let dens = parse_list(p.b.as_deref().unwrap_or(""))?;
            let z = parse::parse_complex(need(&p.z, "z")?, ctx)?;
            let spec = PsiSpec { numerators: nums, denominators: dens };
            let mut opts = PsiOptions::default();
            if let Some(m) = p.max_terms {
                opts.max_terms = m;
            }
            let v = psi_bilateral(&spec, &base, &z, ctx, &opts)?;
            (
                v.value.value,
                v.value.err,
                serde_json::json!({ "terms_pos": v.terms_pos, "terms_neg": v.terms_neg }),
            )
        }
        "h1" => {
            let a = parse::parse_complex(need(&p.a, "a")?, ctx)?;
            let c = parse::parse_complex(need(&p.c, "c")?, ctx)?;
            let z = parse::parse_complex(need(&p.z, "z")?, ctx)?;
            let v = eval_1h1(&a, &c, &z, ctx, &budget)?;
            (
                v.value,
                v.err,
                serde_json::json!({ "rtol": budget.rtol, "max_terms": budget.max_terms }),
            )
        }
        "h2" => {
            let a = parse::parse_complex(need(&p.a, "a")?, ctx)?;
            let b = parse::parse_complex(need(&p.b, "b")?, ctx)?;
            let c = parse::parse_complex(need(&p.c, "c")?, ctx)?;
            let d = parse::parse_complex(need(&p.d, "d")?, ctx)?;
            let z = match &p.z {
                Some(s) => parse::parse_complex(s, ctx)?,
                None => ComplexHP::one(ctx),
            };
            let v = eval_2h2(&a, &b, &c, &d, &z, ctx, &budget)?;
            (
                v.value,
                v.err,
                serde_json::json!({ "rtol": budget.rtol, "max_terms": budget.max_terms }),
            )
        }
        "horn" => {
            let a = parse::parse_complex(need(&p.a, "a")?, ctx)?;
            let c = parse::parse_complex(need(&p.c, "c")?, ctx)?;
            let z = parse::parse_complex(need(&p.z, "z")?, ctx)?;
            let v = horn_closed_form(&a, &c, &z, ctx)?;
            (v.value, v.err, serde_json::json!({}))
        }
        "dougall" => {
            let a = parse::parse_complex(need(&p.a, "a")?, ctx)?;
            let b = parse::parse_complex(need(&p.b, "b")?, ctx)?;
            let c = parse::parse_complex(need(&p.c, "c")?, ctx)?;
            let d = parse::parse_complex(need(&p.d, "d")?, ctx)?;
            let v = dougall_closed_form(&a, &b, &c, &d, ctx)?;
            (v.value, v.err, serde_json::json!({}))
        }
        "ramanujan_rhs" => {
            let base = base_from(p, ctx)?;
            let a = parse::parse_complex(need(&p.a, "a")?, ctx)?;
            let b = parse::parse_complex(need(&p.b, "b")?, ctx)?;
            let z = parse::parse_complex(need(&p.z, "z")?, ctx)?;
            let v = ramanujan_rhs(&a, &b, &base, &z, ctx)?;
            (v.value, v.err, serde_json::json!({}))
        }
        other => {
            return Err(Error::Usage(format!(
                "unknown function {other}; expected qpoch | theta | qgamma | psi | h1 | h2 | horn | dougall | ramanujan_rhs"
            )))
        }
    };

    doc.insert("value".into(), value.to_decimal_string(qbilat::catalog::REPORT_DIGITS).into());
    doc.insert("err_bound".into(), float_decimal(&err, 8).into());
    doc.insert("truncation".into(), trunc);
    emit(&serde_json::Value::Object(doc), &r.output)?;
    Ok(EXIT_PASS)
}

fn cmd_verify(r: &Resolved, identity: &str, p: &ParamArgs, source: bool) -> Result<u8, Error> {
    let id: IdentityId = identity.parse()?;
    if source {
        emit(&source_doc(id), &r.output)?;
        return Ok(EXIT_PASS);
    }
    let params = param_set_for(id, p, &r.ctx)?;
    let dc = domain_check(id, &params, &r.ctx);
    if !dc.pass {
        return Err(Error::Domain(dc.reason));
    }
    let report = check(id, &params, &r.ctx, &budget_from(p))?;
    let mut doc = serde_json::Map::new();
    doc.insert("command".into(), "verify".into());
    run_metadata(r, &mut doc);
    doc.insert("domain_check".into(), serde_json::to_value(&dc).unwrap());
    doc.insert("report".into(), serde_json::to_value(&report).unwrap());
    emit(&serde_json::Value::Object(doc), &r.output)?;
    Ok(match report.status {
        ReportStatus::Pass | ReportStatus::Indeterminate => EXIT_PASS,
        ReportStatus::Fail => EXIT_VERIFY_FAIL,
    })
}

fn cmd_scan(
    r: &Resolved,
    identity: &str,
    samples: Option<usize>,
    q: &Option<String>,
) -> Result<u8, Error> {
    let ids: Vec<IdentityId> = if identity.eq_ignore_ascii_case("all") {
        IdentityId::scannable()
    } else {
        vec![identity.parse()?]
    };
    let mut cfg = ScanConfig { seed: r.seed, ..Default::default() };
    if let Some(s) = samples {
        cfg.samples = s;
    } else if let Some(s) = r.cfg.get("samples") {
        cfg.samples = s.parse().map_err(|_| Error::Usage(format!("bad samples: {s}")))?;
    }
    if let Some(grid) = q {
        cfg.q_grid = parse::parse_grid(grid)?;
    } else if let Some(grid) = r.cfg.get("q") {
        cfg.q_grid = parse::parse_grid(grid)?;
    }
    for qv in &cfg.q_grid {
        if !(*qv > 0.0 && *qv < 1.0) {
            return Err(Error::Usage(format!("q grid entries must lie in (0, 1), got {qv}")));
        }
    }
    let out = scan(&ids, &cfg, &r.ctx, &SeriesBudget::default());
    let mut doc = serde_json::Map::new();
    doc.insert("command".into(), "scan".into());
    run_metadata(r, &mut doc);
    doc.insert(
        "identities".into(),
        ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().into(),
    );
    doc.insert("outcome".into(), serde_json::to_value(&out).unwrap());
    emit(&serde_json::Value::Object(doc), &r.output)?;
    if out.summary.failures > 0 || !out.errors.is_empty() {
        Ok(EXIT_VERIFY_FAIL)
    } else {
        Ok(EXIT_PASS)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_formal(
    r: &Resolved,
    identity: &str,
    beta: &Option<String>,
    w: &Option<String>,
    z: &Option<String>,
    k: Option<i64>,
    order: Option<i64>,
    source: bool,
) -> Result<u8, Error> {
    let id: IdentityId = identity.parse()?;
    if source {
        emit(&source_doc(id), &r.output)?;
        return Ok(EXIT_PASS);
    }
    let order = order
        .or_else(|| r.cfg.get("order").and_then(|s| s.parse().ok()))
        .unwrap_or(50);
    if order < 0 {
        return Err(Error::Usage("order must be nonnegative".into()));
    }
    let beta_r = match beta {
        Some(s) => parse::parse_rational(s)?,
        None => rug::Rational::from((2, 3)),
    };
    let w_r = match w {
        Some(s) => parse::parse_rational(s)?,
        None => rug::Rational::from((1, 5)),
    };
    let mut fp = FormalParams::from_beta_w(beta_r.clone(), w_r.clone())?;
    if let Some(zs) = z {
        fp.z = Some(parse::parse_rational(zs)?);
    }
    if let Some(kv) = k {
        fp.k = kv;
    }
    let outcome = formal_check(id, &fp, order)?;
    let mut doc = serde_json::Map::new();
    doc.insert("command".into(), "formal".into());
    run_metadata(r, &mut doc);
    doc.insert("identity".into(), id.to_string().into());
    doc.insert(
        "params".into(),
        serde_json::json!({
            "beta": beta_r.to_string(),
            "w": w_r.to_string(),
            "z": fp.z.as_ref().map(|v| v.to_string()),
            "k": fp.k,
        }),
    );
    doc.insert("order".into(), outcome.order.into());
    doc.insert("clauses".into(), outcome.clauses.into());
    doc.insert("pass".into(), outcome.pass.into());
    if let Some((ord, coeff)) = &outcome.first_failure {
        doc.insert(
            "first_failure".into(),
            serde_json::json!({ "order": ord, "coefficient": coeff.to_string() }),
        );
    }
    emit(&serde_json::Value::Object(doc), &r.output)?;
    Ok(if outcome.pass { EXIT_PASS } else { EXIT_VERIFY_FAIL })
}

fn cmd_limit(
    r: &Resolved,
    b: Option<f64>,
    w: &Option<String>,
    k: &Option<String>,
    branch: &Option<String>,
    format: &Option<String>,
) -> Result<u8, Error> {
    let ctx = &r.ctx;
    let b = b.ok_or_else(|| Error::Usage("missing required parameter --b".into()))?;
    let w = parse::parse_complex(need(w, "w")?, ctx)?;
    let lp = LimitParams::new(b, w, ctx)?;
    let (k_min, k_max) = match k {
        Some(s) => parse::parse_range(s)?,
        None => (3, 10),
    };
    let branch = match branch.as_deref() {
        None | Some("plus") => LimitBranch::Plus,
        Some("minus") => LimitBranch::Minus,
        Some(other) => return Err(Error::Usage(format!("unknown branch: {other}"))),
    };
    let table = limit_report(
        &lp,
        branch,
        k_min,
        k_max,
        ctx,
        &PsiOptions::default(),
        &SeriesBudget::default(),
    )?;

    // hard assertion: rowwise ratio is 1 within the combined bounds
    let mut rows_ok = true;
    let mut any_row_error = false;
    for row in &table.rows {
        match &row.data {
            Some(d) => {
                let abs = d.lhs.value.sub(&d.rhs.value).abs();
                if !qbilat::catalog::tolerance_policy(
                    &abs,
                    &d.lhs.err,
                    &d.rhs.err,
                    &d.lhs.value.abs(),
                    &d.rhs.value.abs(),
                    ctx,
                ) {
                    rows_ok = false;
                }
            }
            None => any_row_error = true,
        }
    }

    match format.as_deref() {
        Some("csv") => {
            let text = table.to_csv();
            match &r.output {
                Some(path) => std::fs::write(path, text)
                    .map_err(|e| Error::Usage(format!("cannot write {path}: {e}")))?,
                None => print!("{text}"),
            }
        }
        None | Some("json") => {
            let mut doc = serde_json::Map::new();
            doc.insert("command".into(), "limit".into());
            run_metadata(r, &mut doc);
            doc.insert("table".into(), table.to_json());
            doc.insert("rowwise_ratio_ok".into(), rows_ok.into());
            emit(&serde_json::Value::Object(doc), &r.output)?;
        }
        Some(other) => return Err(Error::Usage(format!("unknown format: {other}"))),
    }

    if any_row_error {
        Ok(EXIT_BUDGET)
    } else if rows_ok {
        Ok(EXIT_PASS)
    } else {
        Ok(EXIT_VERIFY_FAIL)
    }
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    let r = resolve(&cli)?;
    match &cli.command {
        Command::Eval { function, params, n, route } => {
            cmd_eval(&r, function, params, *n, route.as_deref())
        }
        Command::Verify { identity, params, source } => cmd_verify(&r, identity, params, *source),
        Command::Scan { identity, samples, q } => cmd_scan(&r, identity, *samples, q),
        Command::Formal { identity, beta, w, z, k, order, source } => {
            cmd_formal(&r, identity, beta, w, z, *k, *order, *source)
        }
        Command::Limit { b, w, k, branch, format } => cmd_limit(&r, *b, w, k, branch, format),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Budget(_) | Error::InsufficientData(_) | Error::PrecisionContract(_) => {
                    EXIT_BUDGET
                }
                _ => EXIT_USAGE,
            };
            ExitCode::from(code)
        }
    }
}

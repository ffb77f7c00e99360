//! Command implementations.  Every mathematical result is emitted as JSON
//! with the `(p, r, depth, m)` context echoed, or as pretty text with
//! `--pretty`.

use crate::expr::{self, ElabCtx, Value};
use drw_core::error::Error as CoreError;
use drw_core::tower::{Tower, TowerSpec};
use drw_core::{cartier, conductor, fil, forms, json as cjson, laws, wittpoly};
use serde_json::{json, Value as Json};
use std::collections::BTreeMap;
use std::fmt;

/// A resolved mathematical context.
#[derive(Debug, Clone)]
pub struct MathCtx {
    pub tower: Tower,
    pub m: u8,
}

impl MathCtx {
    pub fn new(p: u8, r: u8, depth: u8, m: u8) -> Result<Self, CmdError> {
        if m == 0 || m > drw_core::field::MAX_M {
            return Err(CmdError::Usage(format!(
                "length m = {m} outside 1..={}",
                drw_core::field::MAX_M
            )));
        }
        let tower = Tower::new(TowerSpec::new(p, r, depth)?)?;
        Ok(MathCtx { tower, m })
    }

    pub fn context_json(&self) -> Json {
        json!({
            "p": self.tower.spec.p,
            "r": self.tower.spec.r,
            "depth": self.tower.spec.depth,
            "m": self.m,
            "vars": self.tower.spec.var_names,
        })
    }
}

/// Command-level errors carrying the intended exit status.
#[derive(Debug)]
pub enum CmdError {
    /// mathematical rejection (exit 1), with a stable code
    Math { code: String, message: String },
    /// usage problem (exit 2)
    Usage(String),
}

impl fmt::Display for CmdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CmdError::Math { code, message } => write!(f, "error[{code}]: {message}"),
            CmdError::Usage(m) => write!(f, "usage error: {m}"),
        }
    }
}

impl From<CoreError> for CmdError {
    fn from(e: CoreError) -> Self {
        CmdError::Math { code: e.code().to_string(), message: e.to_string() }
    }
}

impl From<expr::ElabError> for CmdError {
    fn from(e: expr::ElabError) -> Self {
        CmdError::Math { code: e.code().to_string(), message: e.to_string() }
    }
}

impl From<expr::SyntaxError> for CmdError {
    fn from(e: expr::SyntaxError) -> Self {
        CmdError::Math { code: "SyntaxError".to_string(), message: e.to_string() }
    }
}

pub type CmdResult = Result<String, CmdError>;

fn eval_expression(ctx: &MathCtx, src: &str) -> Result<Value, CmdError> {
    let ast = expr::parse(src)?;
    let ec = ElabCtx { tower: &ctx.tower, m: ctx.m };
    Ok(ec.eval(&ast)?)
}

fn eval_form(ctx: &MathCtx, src: &str) -> Result<forms::DrwForm, CmdError> {
    match eval_expression(ctx, src)? {
        Value::Form(f) => Ok(f),
        Value::Elem(x) => Ok(forms::teich_form(&ctx.tower, &x, ctx.m)?),
        Value::Int(n) => Ok(forms::scalar_int(
            &ctx.tower,
            n,
            &forms::one_form(&ctx.tower, ctx.tower.depth(), ctx.m),
        )),
    }
}

/// Load a character/form from an expression or a JSON file.
pub fn load_form(
    ctx: &MathCtx,
    expr_src: Option<&str>,
    input: Option<&str>,
) -> Result<forms::DrwForm, CmdError> {
    match (expr_src, input) {
        (Some(src), None) => eval_form(ctx, src),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CmdError::Usage(format!("cannot read {path}: {e}")))?;
            let value: Json = serde_json::from_str(&text)
                .map_err(|e| CmdError::Usage(format!("invalid JSON in {path}: {e}")))?;
            if value.get("coords").is_some() {
                let w = cjson::witt_from_value(&ctx.tower, &value)?;
                Ok(forms::from_witt(&ctx.tower, &w)?)
            } else {
                let level = value.get("level").and_then(Json::as_u64).unwrap_or(ctx.tower.depth() as u64) as u8;
                let q = value.get("q").and_then(Json::as_u64).unwrap_or(0) as u8;
                let m = value.get("m").and_then(Json::as_u64).unwrap_or(ctx.m as u64) as u8;
                Ok(cjson::form_from_value(&ctx.tower, &value, level, q, m)?)
            }
        }
        _ => Err(CmdError::Usage("provide exactly one of an expression or --input".into())),
    }
}

fn emit(ctx: &MathCtx, body: Json, pretty: Option<String>, use_pretty: bool) -> String {
    if use_pretty {
        pretty.unwrap_or_else(|| body.to_string())
    } else {
        let mut obj = serde_json::Map::new();
        obj.insert("context".into(), ctx.context_json());
        if let Json::Object(extra) = body {
            for (k, v) in extra {
                obj.insert(k, v);
            }
        } else {
            obj.insert("result".into(), body);
        }
        serde_json::to_string(&Json::Object(obj)).unwrap()
    }
}

pub fn cmd_drw_eval(ctx: &MathCtx, src: &str, pretty: bool) -> CmdResult {
    let v = eval_expression(ctx, src)?;
    Ok(match v {
        Value::Form(f) => emit(
            ctx,
            json!({"form": cjson::form_to_value(&f)}),
            Some(forms::pretty(&ctx.tower, &f)),
            pretty,
        ),
        Value::Elem(x) => emit(
            ctx,
            json!({"element": cjson::elem_to_value(&x)}),
            Some(ctx.tower.pretty(&x)),
            pretty,
        ),
        Value::Int(n) => emit(ctx, json!({"int": n}), Some(n.to_string()), pretty),
    })
}

pub fn cmd_witt_eval(ctx: &MathCtx, src: &str, pretty: bool) -> CmdResult {
    let f = eval_form(ctx, src)?;
    if f.q != 0 {
        return Err(CmdError::Math {
            code: "DegreeOutOfRange".into(),
            message: format!("witt coordinates need degree 0, got q = {}", f.q),
        });
    }
    let w = forms::to_witt(&ctx.tower, &f)?;
    let text = w.coords.iter().map(|c| ctx.tower.pretty(c)).collect::<Vec<_>>().join(", ");
    Ok(emit(ctx, json!({"witt": cjson::witt_to_value(&w)}), Some(format!("({text})")), pretty))
}

pub fn cmd_fil_level(
    ctx: &MathCtx,
    expr_src: Option<&str>,
    input: Option<&str>,
    multi: bool,
    pretty: bool,
) -> CmdResult {
    let f = load_form(ctx, expr_src, input)?;
    if multi {
        let (t, u) = fil::fil_level_multi_m1(&ctx.tower, &f)?;
        return Ok(emit(
            ctx,
            json!({"level": [t, u]}),
            Some(format!("({}, {})", opt_level(t), opt_level(u))),
            pretty,
        ));
    }
    let l = fil::fil_level(&f);
    Ok(emit(ctx, json!({"level": l}), Some(opt_level(l)), pretty))
}

fn opt_level(l: Option<i64>) -> String {
    l.map(|n| n.to_string()).unwrap_or_else(|| "-inf".into())
}

pub fn cmd_fil_member(
    ctx: &MathCtx,
    expr_src: Option<&str>,
    input: Option<&str>,
    bounds: &[i64],
    pretty: bool,
) -> CmdResult {
    let f = load_form(ctx, expr_src, input)?;
    let member = if bounds.len() > 1 {
        if f.q == 0 {
            let w = forms::to_witt(&ctx.tower, &f)?;
            fil::fil_member_witt(&ctx.tower, &w, bounds)?
        } else if f.m == 1 && ctx.tower.depth() == 2 {
            let (t, u) = fil::fil_level_multi_m1(&ctx.tower, &f)?;
            t.is_none_or(|l| l <= bounds[0]) && u.is_none_or(|l| l <= bounds[1])
        } else {
            return Err(CmdError::from(CoreError::UnsupportedShape(
                "multivariate membership needs q = 0 or m = 1".into(),
            )));
        }
    } else {
        fil::in_fil(&f, bounds[0])
    };
    Ok(emit(ctx, json!({"member": member, "n": bounds}), Some(member.to_string()), pretty))
}

pub fn cmd_fil_gr(ctx: &MathCtx, n: i64, q: u8, pretty: bool) -> CmdResult {
    let shape = fil::graded_rep(&ctx.tower, n, ctx.m, q);
    let kind = if shape.s == 0 { "A" } else { "B" };
    let text = if shape.s == 0 {
        format!(
            "gr_{n} W_{}O^{q}: (W_{}O^{q}(S) + W_{}O^{}(S) dlog) [t]^{}",
            ctx.m,
            shape.coeff_len,
            shape.coeff_len,
            q.saturating_sub(1),
            shape.i
        )
    } else {
        format!(
            "gr_{n} W_{}O^{q}: V^{}(W_{}O^{q}(S)[t]^{}) + dV^{}(W_{}O^{}(S)[t]^{})",
            ctx.m,
            shape.s,
            shape.coeff_len,
            shape.i,
            shape.s,
            shape.coeff_len,
            q.saturating_sub(1),
            shape.i
        )
    };
    Ok(emit(
        ctx,
        json!({
            "graded": {
                "n": shape.n, "s": shape.s, "i": shape.i,
                "coeff_len": shape.coeff_len, "q": shape.q, "kind": kind,
            }
        }),
        Some(text),
        pretty,
    ))
}

pub fn cmd_cartier_apply(
    ctx: &MathCtx,
    expr_src: Option<&str>,
    input: Option<&str>,
    pretty: bool,
) -> CmdResult {
    let f = load_form(ctx, expr_src, input)?;
    let c = cartier::cartier_c(&ctx.tower, &f)?;
    Ok(emit(
        ctx,
        json!({"cartier": cjson::form_to_value(&c)}),
        Some(forms::pretty(&ctx.tower, &c)),
        pretty,
    ))
}

pub fn cmd_cartier_z1(
    ctx: &MathCtx,
    expr_src: Option<&str>,
    input: Option<&str>,
    bound: Option<i64>,
    pretty: bool,
) -> CmdResult {
    let f = load_form(ctx, expr_src, input)?;
    let z1 = cartier::is_z1(&ctx.tower, &f, bound)?;
    Ok(emit(ctx, json!({"z1": z1, "fil_bound": bound}), Some(z1.to_string()), pretty))
}

pub fn cmd_cartier_zb(
    ctx: &MathCtx,
    expr_src: Option<&str>,
    input: Option<&str>,
    i: u8,
    pretty: bool,
) -> CmdResult {
    let f = load_form(ctx, expr_src, input)?;
    let (z, b) = cartier::zb_membership(&ctx.tower, &f, i)?;
    Ok(emit(
        ctx,
        json!({"i": i, "z": z, "b": b}),
        Some(format!("Z_{i}: {z}, B_{i}: {b}")),
        pretty,
    ))
}

fn swan_report_json(rep: &conductor::SwanReport) -> Json {
    json!({
        "sw": rep.sw,
        "reduced": cjson::form_to_value(&rep.reduced),
        "rsw": rep.rsw.as_ref().map(cjson::form_to_value).unwrap_or(Json::Null),
        "rsw_modulus": rep.rsw_modulus,
        "tame": rep.sw == 0,
    })
}

pub fn cmd_swan(
    ctx: &MathCtx,
    expr_src: Option<&str>,
    input: Option<&str>,
    pretty: bool,
) -> CmdResult {
    let chi = load_form(ctx, expr_src, input)?;
    let rep = conductor::swan(&ctx.tower, &chi)?;
    let text = match (&rep.rsw, rep.rsw_modulus) {
        (Some(r), Some(n1)) => format!(
            "sw = {}\nreduced = {}\nrsw = {} (mod fil_{})",
            rep.sw,
            forms::pretty(&ctx.tower, &rep.reduced),
            forms::pretty(&ctx.tower, r),
            n1
        ),
        _ => format!("sw = 0 (tame)\nreduced = {}", forms::pretty(&ctx.tower, &rep.reduced)),
    };
    Ok(emit(ctx, swan_report_json(&rep), Some(text), pretty))
}

pub fn cmd_rsw(
    ctx: &MathCtx,
    expr_src: Option<&str>,
    input: Option<&str>,
    pretty: bool,
) -> CmdResult {
    let chi = load_form(ctx, expr_src, input)?;
    let rep = conductor::swan(&ctx.tower, &chi)?;
    match (&rep.rsw, rep.rsw_modulus) {
        (Some(r), Some(n1)) => Ok(emit(
            ctx,
            json!({
                "sw": rep.sw,
                "rsw": cjson::form_to_value(r),
                "rsw_modulus": n1,
            }),
            Some(format!("{} (mod fil_{})", forms::pretty(&ctx.tower, r), n1)),
            pretty,
        )),
        _ => Err(CmdError::from(CoreError::TameInput)),
    }
}

pub fn cmd_gen_polys(p: u8, m: u8) -> CmdResult {
    let table = wittpoly::gen_witt_polys(p, m)?;
    Ok(serde_json::to_string(&cjson::table_to_value(&table)).unwrap())
}

pub struct VerifyArgs {
    pub suite: String,
    pub seed: u64,
    pub samples: u32,
    pub max_exp: i64,
    pub experimental_p2: bool,
    pub mutate: Option<String>,
    pub timing: bool,
}

/// Run a verification suite; the returned bool is "all laws passed".
pub fn cmd_verify(args: &VerifyArgs) -> Result<(String, bool), CmdError> {
    let suite = laws::make_suite(
        &args.suite,
        args.seed,
        args.samples,
        args.max_exp,
        args.experimental_p2,
    )?;
    let mutation = match &args.mutate {
        None => None,
        Some(name) => {
            let table: BTreeMap<String, laws::Mutation> = laws::MUTATIONS
                .iter()
                .map(|m| (format!("{m:?}"), *m))
                .collect();
            Some(*table.get(name).ok_or_else(|| {
                CmdError::Usage(format!(
                    "unknown mutation '{name}'; available: {}",
                    table.keys().cloned().collect::<Vec<_>>().join(", ")
                ))
            })?)
        }
    };
    let started = std::time::Instant::now();
    let mut report = laws::run_suite(&suite, mutation)?;
    if args.timing {
        report.elapsed_ms = Some(started.elapsed().as_millis() as u64);
    }
    let ok = report.all_pass();
    Ok((serde_json::to_string(&report).unwrap(), ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u8, r: u8, depth: u8, m: u8) -> MathCtx {
        MathCtx::new(p, r, depth, m).unwrap()
    }

    #[test]
    fn drw_eval_example() {
        // `drw eval -p 2 -r 1 --depth 1 -m 2 "d(T(t))"` -> component {n=2, b=[1]}
        let c = ctx(2, 1, 1, 2);
        let out = cmd_drw_eval(&c, "d(T(t))", false).unwrap();
        let v: Json = serde_json::from_str(&out).unwrap();
        let comps = v["form"]["components"].as_array().unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0]["n"], 2);
        assert_eq!(comps[0]["a"], Json::Null);
        assert_eq!(v["context"]["p"], 2);
    }

    #[test]
    fn swan_example() {
        // `swan -p 2 -m 1 --depth 1 --expr "T(t^-3)"` -> {"sw": 3}
        let c = ctx(2, 1, 1, 1);
        let out = cmd_swan(&c, Some("T(t^-3)"), None, false).unwrap();
        let v: Json = serde_json::from_str(&out).unwrap();
        assert_eq!(v["sw"], 3);
        assert_eq!(v["rsw_modulus"], 2);
    }

    #[test]
    fn rsw_rejects_tame() {
        let c = ctx(2, 1, 1, 1);
        let err = cmd_rsw(&c, Some("T(t^2)"), None, false).unwrap_err();
        match err {
            CmdError::Math { code, .. } => assert_eq!(code, "TameInput"),
            _ => panic!("expected a math rejection"),
        }
    }

    #[test]
    fn witt_eval_roundtrip() {
        let c = ctx(3, 1, 1, 2);
        let out = cmd_witt_eval(&c, "T(t^-1) + T(t)", false).unwrap();
        let v: Json = serde_json::from_str(&out).unwrap();
        assert!(v["witt"]["coords"].as_array().unwrap().len() == 2);
    }

    #[test]
    fn gen_polys_cap() {
        assert!(cmd_gen_polys(3, 2).is_ok());
        assert!(matches!(cmd_gen_polys(7, 4), Err(CmdError::Math { .. })));
    }

    #[test]
    fn verify_small() {
        let args = VerifyArgs {
            suite: "goodness".into(),
            seed: 7,
            samples: 3,
            max_exp: 4,
            experimental_p2: false,
            mutate: None,
            timing: false,
        };
        let (out, ok) = cmd_verify(&args).unwrap();
        assert!(ok, "{out}");
        let v: Json = serde_json::from_str(&out).unwrap();
        assert_eq!(v["suite"], "goodness");
        // determinism: elapsed_ms absent by default
        assert!(v.get("elapsed_ms").is_none());
    }

    #[test]
    fn unknown_suite() {
        let args = VerifyArgs {
            suite: "no-such".into(),
            seed: 1,
            samples: 1,
            max_exp: 4,
            experimental_p2: false,
            mutate: None,
            timing: false,
        };
        match cmd_verify(&args) {
            Err(CmdError::Math { code, .. }) => assert_eq!(code, "UnknownSuite"),
            other => panic!("expected UnknownSuite, got {other:?}"),
        }
    }
}

//! Commands behind the `biext-witt` binary.
//!
//! Every command returns an [`Outcome`]: a JSON value plus the exit status.
//! Campaign trials are independent and may run in parallel; records are
//! always merged back in trial order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use biext_core::biext::{descend, metric_of, pullback, random_instance};
use biext_core::json::{
    elem_to_json, model_report, witt_to_json, CycIntJson, FieldJson, HomJson, MetricGroupJson,
    OrePolyJson, SubspaceJson,
};
use biext_core::mgrp::{witt_class, WittLabel};
use biext_core::{make_field, metric_from_skew, BiextModel, Caps, CycInt, Error, MetricGroup, OrePoly, QpZp};
use serde_json::{json, Value};

pub const SCHEMA: &str = "biext-witt/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Cap,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Cap => "cap",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Cap => 3,
        }
    }
}

/// Errors that abort a command before any report is produced.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or input: exit code 2.
    Usage(String),
    /// A search budget ran out: exit code 3.
    Cap(String),
    /// The library contradicted itself: exit code 1.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Failed(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Cap(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_cap() {
            CliError::Cap(e.to_string())
        } else if matches!(e, Error::Internal(_)) {
            CliError::Failed(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("invalid JSON: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub struct Outcome {
    pub value: Value,
    pub status: Status,
    /// Plain-text rendering for `--table`, where the command has one.
    pub table: Option<String>,
}

impl Outcome {
    fn plain(value: Value) -> Self {
        Outcome {
            value,
            status: Status::Pass,
            table: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub p: u32,
    pub m: usize,
    pub n: u32,
    pub d: usize,
    pub trials: u64,
    pub seed: u64,
    pub caps: Caps,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 3,
            m: 1,
            n: 2,
            d: 1,
            trials: 25,
            seed: 0,
            caps: Caps::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> CliResult<()> {
        make_field(self.p, self.m)?;
        if self.n == 0 || self.d == 0 || self.trials == 0 {
            return Err(CliError::Usage("--n, --d and --trials must be positive".into()));
        }
        let c = &self.caps;
        if c.max_ext == 0 || c.enum_cap == 0 || c.iso_cap == 0 {
            return Err(CliError::Usage("caps must be positive".into()));
        }
        Ok(())
    }

    fn to_json(self) -> Value {
        json!({
            "p": self.p,
            "m": self.m,
            "n": self.n,
            "d": self.d,
            "trials": self.trials,
            "seed": self.seed,
            "max_ext": self.caps.max_ext,
            "enum_cap": self.caps.enum_cap,
            "iso_cap": self.caps.iso_cap,
        })
    }
}

struct Record {
    status: Status,
    value: Value,
    row: String,
}

fn map_trials<F>(trials: u64, f: F) -> Vec<Record>
where
    F: Fn(u64) -> Record + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials).map(f).collect()
    }
}

fn histogram_json(g: &MetricGroup) -> Value {
    let rows: Vec<Value> = g
        .q_histogram()
        .into_iter()
        .map(|(v, count)| {
            let (num, den) = v.fraction();
            json!([num, den, count])
        })
        .collect();
    Value::Array(rows)
}

fn overall(records: &[Record]) -> Status {
    if records.iter().any(|r| r.status == Status::Fail) {
        Status::Fail
    } else if records.iter().any(|r| r.status == Status::Cap) {
        Status::Cap
    } else {
        Status::Pass
    }
}

fn campaign_report(command: &str, cfg: &RunConfig, records: Vec<Record>) -> Outcome {
    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    let status = overall(&records);
    let summary = json!({
        "trials": records.len(),
        "passed": count(Status::Pass),
        "failed": count(Status::Fail),
        "capped": count(Status::Cap),
        "status": status.as_str(),
    });
    let mut table = String::new();
    let _ = writeln!(table, "{command}  p={} m={} n={} d={} seed={}", cfg.p, cfg.m, cfg.n, cfg.d, cfg.seed);
    let _ = writeln!(table, "{:>6} {:>20} {:>10} {:>8} {:>12} {:>14} {:>6}", "trial", "seed", "kind", "|A|", "witt", "gauss", "status");
    for r in &records {
        table.push_str(&r.row);
        table.push('\n');
    }
    let _ = writeln!(
        table,
        "{} trials: {} passed, {} failed, {} capped",
        records.len(),
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Cap)
    );
    Outcome {
        value: json!({
            "schema": SCHEMA,
            "command": command,
            "config": cfg.to_json(),
            "records": records.into_iter().map(|r| r.value).collect::<Vec<_>>(),
            "summary": summary,
        }),
        status,
        table: Some(table),
    }
}

fn error_record(trial: u64, seed: u64, e: &Error) -> Record {
    let status = if e.is_cap() { Status::Cap } else { Status::Fail };
    Record {
        status,
        value: json!({"trial": trial, "seed": seed, "status": status.as_str(), "error": e.to_string()}),
        row: format!("{trial:>6} {seed:>20} {:>10} {:>8} {:>12} {:>14} {:>6}  {e}", "-", "-", "-", "-", status.as_str()),
    }
}

struct Trial {
    kind: &'static str,
    f: HomJson,
    expected_log: u32,
    model: BiextModel,
    group: MetricGroup,
}

fn run_instance(cfg: &RunConfig, seed: u64) -> Result<Trial, Error> {
    let ctx = make_field(cfg.p, cfg.m)?;
    let inst = random_instance(&ctx, cfg.d, cfg.n, seed, cfg.caps.enum_cap);
    let model = metric_of(&inst.matrix, &cfg.caps)?;
    let group = model.metric_group();
    let kind = match inst.kind {
        biext_core::biext::InstanceKind::Scalar => "scalar",
        biext_core::biext::InstanceKind::Diagonal => "diagonal",
        biext_core::biext::InstanceKind::Hyperbolic => "hyperbolic",
    };
    Ok(Trial {
        kind,
        f: HomJson::from_matrix(&inst.matrix),
        expected_log: inst.expected_log,
        model,
        group,
    })
}

fn expected_gauss(p: u32, d: usize, log: usize) -> i64 {
    let sign = if d % 2 == 0 { 1 } else { -1 };
    sign * (p as i64).pow(log as u32 / 2)
}

fn trial_record(
    trial: u64,
    seed: u64,
    t: &Trial,
    witt: &Value,
    gauss: &CycInt,
    checks: BTreeMap<&'static str, bool>,
) -> Record {
    let status = if checks.values().all(|&ok| ok) { Status::Pass } else { Status::Fail };
    let gauss_text = gauss.as_int().map_or_else(|| gauss.to_string(), |v| v.to_string());
    let witt_text = match witt {
        Value::String(s) => s.clone(),
        _ => "Other".into(),
    };
    Record {
        status,
        row: format!(
            "{trial:>6} {seed:>20} {:>10} {:>8} {:>12} {:>14} {:>6}",
            t.kind,
            t.model.size(),
            witt_text,
            gauss_text,
            status.as_str()
        ),
        value: json!({
            "trial": trial,
            "seed": seed,
            "kind": t.kind,
            "f": t.f,
            "kernel_size": t.model.size(),
            "log_p_size": t.model.log_size(),
            "q_histogram": histogram_json(&t.group),
            "witt_class": witt,
            "gauss_sum": CycIntJson::from_cyc(gauss),
            "checks": checks,
            "status": status.as_str(),
        }),
    }
}

/// Random skew instances: even kernel order, Witt class by parity of `d`, and
/// the structural identities.
pub fn verify_theorem1(cfg: &RunConfig) -> CliResult<Outcome> {
    cfg.validate()?;
    let records = map_trials(cfg.trials, |i| {
        let seed = cfg.seed.wrapping_add(i);
        let run = || -> Result<Record, Error> {
            let t = run_instance(cfg, seed)?;
            let w = witt_class(&t.group, &cfg.caps)?;
            let gauss = t.group.gauss_sum(cfg.caps.gauss_cap)?;
            let witt_ok = if cfg.d % 2 == 0 {
                w.is_zero()
            } else {
                matches!(w.label, WittLabel::NormForm)
            };
            let log = t.model.log_size();
            let checks = BTreeMap::from([
                ("log_even", log % 2 == 0),
                ("kernel_size", log == t.expected_log as usize),
                ("witt_class", witt_ok),
                ("symmetric", t.model.is_symmetric()),
                ("nondegenerate", t.model.is_nondegenerate()),
                ("polarization", t.model.polarization_holds()),
            ]);
            Ok(trial_record(i, seed, &t, &witt_to_json(&w), &gauss, checks))
        };
        run().unwrap_or_else(|e| error_record(i, seed, &e))
    });
    Ok(campaign_report("verify-theorem1", cfg, records))
}

/// Random skew instances: the Gauss sum is `(-1)^d p^(log_p |A| / 2)`.
pub fn verify_gauss(cfg: &RunConfig) -> CliResult<Outcome> {
    cfg.validate()?;
    let records = map_trials(cfg.trials, |i| {
        let seed = cfg.seed.wrapping_add(i);
        let run = || -> Result<Record, Error> {
            let t = run_instance(cfg, seed)?;
            let gauss = t.group.gauss_sum(cfg.caps.gauss_cap)?;
            let want = expected_gauss(cfg.p, cfg.d, t.model.log_size());
            let checks = BTreeMap::from([
                ("log_even", t.model.log_size() % 2 == 0),
                ("gauss_sum", gauss == CycInt::from_int(cfg.p, want)),
            ]);
            Ok(trial_record(i, seed, &t, &Value::Null, &gauss, checks))
        };
        run().unwrap_or_else(|e| error_record(i, seed, &e))
    });
    Ok(campaign_report("verify-gauss", cfg, records))
}

/// `f = tau - tau^-1`: `A = F_{p^2}`, `B` the trace form, `q` the norm form,
/// Gauss sum `-p` and Witt class `NormForm`.
pub fn example(p: u32, caps: &Caps) -> CliResult<Outcome> {
    let k = make_field(p, 1)?;
    let f = OrePoly::from_prime_terms(&k, &[(1, 1), (-1, -1)]);
    let model = metric_from_skew(&f, caps)?;
    let group = model.metric_group();
    let pts: Vec<_> = model.points().iter().map(|x| x[0].clone()).collect();
    let tr = |x: &biext_core::FieldElem| (x + &x.frobenius()).as_prime();
    let trace_form = pts.iter().enumerate().all(|(i, a)| {
        pts.iter().enumerate().all(|(j, b)| {
            let v = tr(&(a * &b.frobenius()));
            v == Some(model.b_fp(i, j))
        })
    });
    let norm_form = pts.iter().enumerate().all(|(i, a)| {
        (a * &a.frobenius()).as_prime().map(|n| QpZp::from_prime(p, n)) == Some(model.q_value(i))
    });
    let gauss = group.gauss_sum(caps.gauss_cap)?;
    let w = witt_class(&group, caps)?;
    let checks = BTreeMap::from([
        ("kernel_size", model.size() == (p * p) as usize),
        ("trace_form", trace_form),
        ("norm_form", norm_form),
        ("gauss_sum", gauss == CycInt::from_int(p, -(p as i64))),
        ("witt_class", matches!(w.label, WittLabel::NormForm)),
    ]);
    let status = if checks.values().all(|&ok| ok) { Status::Pass } else { Status::Fail };
    let mut table = format!("f = tau - tau^-1 over F_{p}, |A| = {}\n", model.size());
    for (name, ok) in &checks {
        let _ = writeln!(table, "  {name:<12} {}", if *ok { "ok" } else { "FAILED" });
    }
    let _ = writeln!(table, "witt class {w}, gauss sum {gauss}");
    Ok(Outcome {
        value: json!({
            "schema": SCHEMA,
            "command": "example",
            "p": p,
            "f": OrePolyJson::from_poly(&f),
            "kernel_size": model.size(),
            "witt_class": witt_to_json(&w),
            "gauss_sum": CycIntJson::from_cyc(&gauss),
            "checks": checks,
            "status": status.as_str(),
        }),
        status,
        table: Some(table),
    })
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid {what} JSON: {e}")))
}

/// Kernel of an isogeny: its splitting field, size and an `F_p`-basis.
pub fn kernel(text: &str, caps: &Caps) -> CliResult<Outcome> {
    let m = parse::<HomJson>(text, "isogeny")?.to_matrix()?;
    if m.dim() == 1 {
        let k = m.get(0, 0).kernel(caps.max_ext)?;
        return Ok(Outcome::plain(json!({
            "schema": SCHEMA,
            "field": FieldJson::from_field(&k.field),
            "kernel_size": k.size(),
            "basis": k.basis.iter().map(elem_to_json).collect::<Vec<_>>(),
        })));
    }
    let model = metric_of(&m, caps)?;
    Ok(Outcome::plain(json!({
        "schema": SCHEMA,
        "field": FieldJson::from_field(model.field()),
        "kernel_size": model.size(),
        "basis": model
            .basis()
            .iter()
            .map(|v| v.iter().map(elem_to_json).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })))
}

/// Full report for a skew isogeny: `q` on every kernel point, Witt class and
/// Gauss sum.
pub fn model(text: &str, caps: &Caps) -> CliResult<Outcome> {
    let m = parse::<HomJson>(text, "isogeny")?.to_matrix()?;
    let model = metric_of(&m, caps)?;
    let group = model.metric_group();
    let w = witt_class(&group, caps)?;
    let gauss = group.gauss_sum(caps.gauss_cap)?;
    let mut value = model_report(&model, &w, &gauss);
    value["schema"] = json!(SCHEMA);
    Ok(Outcome::plain(value))
}

/// Quotient of a skew `f` by the isotropic subspace `L` of its kernel.
pub fn descend_cmd(f_text: &str, l_text: &str) -> CliResult<Outcome> {
    let f = parse::<OrePolyJson>(f_text, "isogeny")?.to_poly()?;
    let l = parse::<SubspaceJson>(l_text, "subspace")?;
    let (_, elems) = l.to_elems()?;
    let out = descend(&f, &elems)?;
    Ok(Outcome::plain(json!({
        "schema": SCHEMA,
        "f": OrePolyJson::from_poly(&out),
    })))
}

/// `Phi* F Phi`.
pub fn pullback_cmd(f_text: &str, phi_text: &str) -> CliResult<Outcome> {
    let f = parse::<HomJson>(f_text, "isogeny")?.to_matrix()?;
    let phi = parse::<HomJson>(phi_text, "isogeny")?.to_matrix()?;
    let out = pullback(&f, &phi)?;
    Ok(Outcome::plain(json!({
        "schema": SCHEMA,
        "f": HomJson::from_matrix(&out),
    })))
}

fn group_from(text: &str) -> CliResult<MetricGroup> {
    let g = parse::<MetricGroupJson>(text, "metric group")?.to_group()?;
    if !g.is_metric() {
        return Err(CliError::Usage("the form is not nondegenerate quadratic".into()));
    }
    Ok(g)
}

pub fn witt(text: &str, caps: &Caps) -> CliResult<Outcome> {
    let g = group_from(text)?;
    let w = witt_class(&g, caps)?;
    Ok(Outcome::plain(json!({
        "schema": SCHEMA,
        "order": g.size(),
        "witt_class": witt_to_json(&w),
    })))
}

pub fn gauss(text: &str, caps: &Caps) -> CliResult<Outcome> {
    let g = group_from(text)?;
    let s = g.gauss_sum(caps.gauss_cap)?;
    Ok(Outcome::plain(json!({
        "schema": SCHEMA,
        "order": g.size(),
        "gauss_sum": CycIntJson::from_cyc(&s),
        "integer": s.as_int(),
    })))
}

pub fn norm_form(p: u32) -> CliResult<Outcome> {
    let g = MetricGroup::norm_form_group(p)?;
    Ok(Outcome::plain(serde_json::to_value(MetricGroupJson::from_group(&g))?))
}

pub fn hyperbolic(p: u32) -> CliResult<Outcome> {
    let g = MetricGroup::hyperbolic_plane(p)?;
    Ok(Outcome::plain(serde_json::to_value(MetricGroupJson::from_group(&g))?))
}

/// The instance a campaign would draw for `seed`.
pub fn random(cfg: &RunConfig) -> CliResult<Outcome> {
    cfg.validate()?;
    let ctx = make_field(cfg.p, cfg.m)?;
    let inst = random_instance(&ctx, cfg.d, cfg.n, cfg.seed, cfg.caps.enum_cap);
    Ok(Outcome::plain(serde_json::to_value(HomJson::from_matrix(&inst.matrix))?))
}

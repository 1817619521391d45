//! Dispatch of a [`RunConfig`] to the library and report assembly.

use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tsallis_core::ccq::{closed_form_iq, direct_iq, induced_ensembles};
use tsallis_core::entropy::{q_log, renyi_entropy, tsallis, tsallis_q_difference, von_neumann};
use tsallis_core::lab::{
    monogamy_check_multiqubit, scan, theorem1_check, InequalityVerdict, ScanConfig, Side, VerdictCounts,
};
use tsallis_core::qstate::partial_trace;
use tsallis_core::roof::{concave_roof, convex_roof, qb_split_measurement, unlocalizable_q_entanglement};
use tsallis_core::{Bipartition, EntropicParameter, PureFunctional, Verdict, VERSION};

use crate::config::{Command, Measure, RoofKind, RunConfig};
use crate::io::{load_state, write_atomic, InputState};
use crate::table::{emit_table, Row};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub counts: VerdictCounts,
    pub verdict: Verdict,
}

/// Everything a run produced. Only `wall_time_secs` varies between
/// replays of the same config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub command: Command,
    pub config: RunConfig,
    pub items: Vec<Row>,
    pub results: Value,
    pub summary: Summary,
    pub wall_time_secs: f64,
    pub version: String,
    pub master_seed: u64,
}

impl ReportRecord {
    /// 0 all verified, 2 any violated, 3 any inconclusive and none violated.
    pub fn exit_code(&self) -> u8 {
        match self.summary.verdict {
            Verdict::Verified => 0,
            Verdict::Violated => 2,
            Verdict::Inconclusive => 3,
        }
    }
}

fn param(q: f64) -> Result<EntropicParameter> {
    EntropicParameter::new(q).map_err(|e| anyhow!("q_values: {e}"))
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    d: usize,
    rows: Vec<Row>,
}

impl Ctx<'_> {
    fn push(&mut self, check: &str, q: f64, v: &InequalityVerdict) {
        self.rows.push(Row {
            check: check.to_string(),
            q,
            d: self.d,
            sample_index: 0,
            gap: v.gap,
            verdict: v.verdict,
            seed: self.cfg.seed,
        });
    }
}

fn functional(measure: Measure, q: EntropicParameter) -> PureFunctional {
    match measure {
        Measure::Tsallis => PureFunctional::Tsallis(q),
        Measure::Renyi => PureFunctional::Renyi(q),
        Measure::Tangle => PureFunctional::Tangle,
    }
}

/// The tangle ignores q; its rows carry q = 2, where it is twice `T_2`.
fn measure_qs(cfg: &RunConfig) -> Vec<f64> {
    if cfg.measure == Measure::Tangle {
        vec![2.0]
    } else {
        cfg.q_values.clone()
    }
}

fn entropy(ctx: &mut Ctx, state: &InputState) -> Result<Value> {
    let rho = state.density();
    let n = rho.dims().len();
    let mut out = Vec::new();
    for &qv in &ctx.cfg.q_values {
        let q = param(qv)?;
        let s = tsallis(&rho, q);
        let max = q_log(rho.dim() as f64, q)?;
        let v = InequalityVerdict::judge(
            "entropy_maximality",
            Side::exact(s, "S_q"),
            Side::exact(max, "ln_q(dim)"),
            ctx.cfg.tolerance,
        );
        ctx.push("entropy_maximality", qv, &v);
        let marginals = (0..n)
            .map(|i| Ok(tsallis(&partial_trace(&rho, &[i])?, q)))
            .collect::<tsallis_core::Result<Vec<f64>>>()?;
        out.push(json!({
            "q": qv,
            "tsallis": s,
            "renyi": renyi_entropy(&rho, q),
            "q_log_dim": max,
            "marginal_tsallis": marginals,
        }));
    }
    Ok(json!({
        "dims": rho.dims().as_slice(),
        "spectrum": rho.spectrum(),
        "purity": rho.purity(),
        "von_neumann": von_neumann(&rho),
        "values": out,
    }))
}

fn ccq_verify(ctx: &mut Ctx, state: &InputState) -> Result<Value> {
    let rho = state.density();
    let mut out = Vec::new();
    for &qv in &ctx.cfg.q_values {
        let q = param(qv)?;
        let closed = closed_form_iq(&rho, q).context("q_values: ccq-verify needs a bipartite state and q >= 1")?;
        let direct = direct_iq(&rho, q)?;
        let dev = closed.max_abs_diff(&direct);
        let v = InequalityVerdict::judge(
            "ccq_closed_forms",
            Side::exact(dev, "max deviation"),
            Side::exact(0.0, "zero"),
            ctx.cfg.tolerance,
        );
        ctx.push("ccq_closed_forms", qv, &v);
        out.push(json!({
            "q": qv,
            "closed_form": to_value(&closed),
            "direct": to_value(&direct),
            "deviation": dev,
            "subadditivity_gap": closed.subadditivity_gap(),
        }));
    }
    Ok(Value::Array(out))
}

fn roof(ctx: &mut Ctx, state: &InputState) -> Result<Value> {
    let rho = state.density();
    let cut = Bipartition::first(rho.dims().len())?;
    let mut out = Vec::new();
    for qv in measure_qs(ctx.cfg) {
        let f = functional(ctx.cfg.measure, param(qv)?);
        let r = match ctx.cfg.kind {
            RoofKind::Convex => convex_roof(&rho, &cut, f, &ctx.cfg.budget)?,
            RoofKind::Concave => concave_roof(&rho, &cut, f, &ctx.cfg.budget)?,
        };
        let again = r.reevaluate()?;
        let v = InequalityVerdict::judge(
            "roof_certificate",
            Side::exact((again - r.value).abs(), "certificate deviation"),
            Side::exact(0.0, "zero"),
            ctx.cfg.tolerance,
        );
        ctx.push("roof_certificate", qv, &v);
        out.push(json!({ "q": qv, "result": to_value(&r) }));
    }
    Ok(Value::Array(out))
}

fn uq(ctx: &mut Ctx, state: &InputState) -> Result<Value> {
    let rho = state.density();
    let mut out = Vec::new();
    for &qv in &ctx.cfg.q_values {
        let q = param(qv)?;
        let r = unlocalizable_q_entanglement(&rho, q, &ctx.cfg.budget)
            .context("q_values: uq needs a bipartite state and q >= 1")?;
        let ens = induced_ensembles(&rho)?;
        let chi0 = tsallis_q_difference(&ens.e0, q);
        let chi1 = tsallis_q_difference(&ens.e1, q);
        let split = qb_split_measurement(&rho)?.chi_q(&rho, q)?;
        let v = InequalityVerdict::judge(
            "ue_below_basis_average",
            Side::bound(r.value, tsallis_core::lab::BoundKind::Upper, "measurement search"),
            Side::exact(0.5 * (chi0 + chi1), "eigenbasis and Fourier ensembles"),
            ctx.cfg.tolerance,
        );
        ctx.push("ue_below_basis_average", qv, &v);
        out.push(json!({
            "q": qv,
            "result": to_value(&r),
            "chi_eigenbasis": chi0,
            "chi_fourier": chi1,
            "chi_split_measurement": split,
        }));
    }
    Ok(Value::Array(out))
}

fn theorem1(ctx: &mut Ctx, state: &InputState) -> Result<Value> {
    let psi = state
        .pure()
        .filter(|p| p.dims().len() == 3)
        .ok_or_else(|| anyhow!("input_state: theorem1 needs a pure three-party state"))?;
    let mut out = Vec::new();
    for &qv in &ctx.cfg.q_values {
        let v = theorem1_check(&psi, param(qv)?, &ctx.cfg.budget, ctx.cfg.tolerance)?;
        ctx.push("theorem1", qv, &v);
        out.push(to_value(&v));
    }
    Ok(Value::Array(out))
}

fn monogamy(ctx: &mut Ctx, state: &InputState) -> Result<Value> {
    let rho = state.density();
    let mut out = Vec::new();
    for qv in measure_qs(ctx.cfg) {
        let f = functional(ctx.cfg.measure, param(qv)?);
        let v = monogamy_check_multiqubit(&rho, f, &ctx.cfg.budget, ctx.cfg.tolerance)?;
        ctx.push("monogamy", qv, &v);
        out.push(to_value(&v));
    }
    Ok(Value::Array(out))
}

fn sampled(ctx: &mut Ctx, check: tsallis_core::CheckKind) -> Result<Value> {
    let cfg = ctx.cfg;
    if check == tsallis_core::CheckKind::Monogamy && cfg.measure != Measure::Tsallis {
        bail!("measure: random monogamy scans use tsallis only");
    }
    let sc = ScanConfig {
        check,
        dims: cfg.dims.clone(),
        q_values: cfg.q_values.clone(),
        samples: cfg.samples,
        seed: cfg.seed,
        budget: cfg.budget,
        tolerance: cfg.tolerance,
    };
    let report = scan(&sc)?;
    ctx.rows = report
        .items
        .iter()
        .map(|it| Row {
            check: it.check.as_str().to_string(),
            q: it.q,
            d: it.d,
            sample_index: it.sample_index,
            gap: it.gap,
            verdict: it.verdict,
            seed: it.seed,
        })
        .collect();
    Ok(to_value(&report))
}

/// Runs the configured command.
pub fn run(cfg: &RunConfig) -> Result<ReportRecord> {
    let start = Instant::now();
    let state = cfg.input_state.as_deref().map(load_state).transpose()?;
    let d = state
        .as_ref()
        .map_or_else(|| cfg.dims.clone(), |s| s.local_dims())
        .into_iter()
        .max()
        .unwrap_or(1);
    let mut ctx = Ctx { cfg, d, rows: Vec::new() };
    let results = match (cfg.command, &state) {
        (Command::Entropy, Some(s)) => entropy(&mut ctx, s)?,
        (Command::CcqVerify, Some(s)) => ccq_verify(&mut ctx, s)?,
        (Command::Roof, Some(s)) => roof(&mut ctx, s)?,
        (Command::Uq, Some(s)) => uq(&mut ctx, s)?,
        (Command::Theorem1, Some(s)) => theorem1(&mut ctx, s)?,
        (Command::Monogamy, Some(s)) => monogamy(&mut ctx, s)?,
        (c, _) => {
            let check = c
                .sampled_check(cfg.check)
                .ok_or_else(|| anyhow!("input_state: required for the {c} command"))?;
            sampled(&mut ctx, check)?
        }
    };
    let counts: VerdictCounts = ctx.rows.iter().map(|r| r.verdict).collect();
    Ok(ReportRecord {
        command: cfg.command,
        config: cfg.clone(),
        items: ctx.rows,
        results,
        summary: Summary {
            verdict: counts.verdict(),
            counts,
        },
        wall_time_secs: start.elapsed().as_secs_f64(),
        version: VERSION.to_string(),
        master_seed: cfg.seed,
    })
}

/// Runs, writes the table (to `out` or stdout) and the optional JSON report,
/// and returns the record.
pub fn execute(cfg: &RunConfig) -> Result<ReportRecord> {
    let record = run(cfg)?;
    let table = emit_table(&record, cfg.format);
    match &cfg.out {
        Some(p) => write_atomic(p, &table)?,
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&table)?;
        }
    }
    if let Some(p) = &cfg.report {
        write_report(p, &record)?;
    }
    Ok(record)
}

pub fn write_report(path: &Path, record: &ReportRecord) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(record)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

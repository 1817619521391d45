//! Plot-ready tables: CSV or JSON lines, 12 significant digits.

use anyhow::{anyhow, Context, Result};
use serde::{Deserialize, Serialize};
use tsallis_core::Verdict;

use crate::config::Format;
use crate::run::ReportRecord;

pub const COLUMNS: [&str; 7] = ["check", "q", "d", "sample_index", "gap", "verdict", "seed"];

/// One table row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub check: String,
    pub q: f64,
    pub d: usize,
    pub sample_index: usize,
    pub gap: f64,
    pub verdict: Verdict,
    pub seed: u64,
}

/// `x` with at most 12 significant digits, trailing zeros dropped;
/// scientific notation outside `[1e-5, 1e12)`.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        trim(format!("{:.*}", (11 - exp) as usize, x))
    } else {
        format!("{}e{exp}", trim(mant.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        fmt_sig(x)
    } else {
        "null".into()
    }
}

/// Renders the rows of `record`.
pub fn emit_table(record: &ReportRecord, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(COLUMNS).expect("in-memory write");
            for r in &record.items {
                w.write_record([
                    r.check.clone(),
                    fmt_sig(r.q),
                    r.d.to_string(),
                    r.sample_index.to_string(),
                    fmt_sig(r.gap),
                    r.verdict.to_string(),
                    r.seed.to_string(),
                ])
                .expect("in-memory write");
            }
            w.into_inner().expect("in-memory flush")
        }
        Format::JsonLines => {
            let mut out = String::new();
            for r in &record.items {
                out.push_str(&format!(
                    "{{\"check\":{},\"q\":{},\"d\":{},\"sample_index\":{},\"gap\":{},\"verdict\":\"{}\",\"seed\":{}}}\n",
                    serde_json::to_string(&r.check).expect("string"),
                    json_number(r.q),
                    r.d,
                    r.sample_index,
                    json_number(r.gap),
                    r.verdict,
                    r.seed
                ));
            }
            out.into_bytes()
        }
    }
}

#[derive(Deserialize)]
struct JsonRow {
    check: String,
    q: Option<f64>,
    d: usize,
    sample_index: usize,
    gap: Option<f64>,
    verdict: Verdict,
    seed: u64,
}

/// Reads rows back from either format.
pub fn parse_table(bytes: &[u8], format: Format) -> Result<Vec<Row>> {
    match format {
        Format::JsonLines => std::str::from_utf8(bytes)?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let r: JsonRow = serde_json::from_str(l).with_context(|| format!("bad row: {l}"))?;
                Ok(Row {
                    check: r.check,
                    q: r.q.unwrap_or(f64::NAN),
                    d: r.d,
                    sample_index: r.sample_index,
                    gap: r.gap.unwrap_or(f64::NAN),
                    verdict: r.verdict,
                    seed: r.seed,
                })
            })
            .collect(),
        Format::Csv => {
            let mut rd = csv::Reader::from_reader(bytes);
            let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
            if header != COLUMNS {
                return Err(anyhow!("unexpected header {header:?}"));
            }
            rd.records()
                .map(|rec| {
                    let rec = rec?;
                    let num = |i: usize| -> Result<f64> { Ok(rec[i].parse()?) };
                    Ok(Row {
                        check: rec[0].to_string(),
                        q: num(1)?,
                        d: rec[2].parse()?,
                        sample_index: rec[3].parse()?,
                        gap: num(4)?,
                        verdict: serde_json::from_value(serde_json::Value::String(rec[5].to_string()))?,
                        seed: rec[6].parse()?,
                    })
                })
                .collect()
        }
    }
}

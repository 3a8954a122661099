//! Text and JSON output, all through one locked stdout.

use std::io::Write;

use serde_json::json;
use taubound::search::tables::TableData;
use taubound::search::VerificationReport;

use crate::compute::Computed;

pub fn emit_value(c: &Computed, json: bool) {
    let mut out = std::io::stdout().lock();
    if json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(c).expect("serializable"));
    } else {
        let _ = writeln!(out, "{}", c.value);
    }
}

pub fn emit_table(t: &TableData, json: bool) {
    let mut out = std::io::stdout().lock();
    if json {
        let v = json!({"table": t.id, "header": t.header, "rows": t.rows});
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"));
    } else {
        let _ = write!(out, "{}", t.to_csv());
    }
}

pub fn emit_comparison(t: &TableData, diffs: &[String], json: bool) {
    let mut out = std::io::stdout().lock();
    if json {
        let v = json!({"table": t.id, "matches": diffs.is_empty(), "differences": diffs});
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializable"));
    } else if diffs.is_empty() {
        let _ = writeln!(out, "table {}: matches golden", t.id);
    } else {
        let _ = writeln!(out, "table {}: {} difference(s)", t.id, diffs.len());
        for d in diffs {
            let _ = writeln!(out, "  {d}");
        }
    }
}

pub fn emit_report(rep: &VerificationReport, json: bool) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(rep)?)?;
        return Ok(());
    }
    let phase = rep.phase.as_deref().map(|p| format!(" [{p}]")).unwrap_or_default();
    writeln!(out, "{}{}: {:?} ({:.2} s, {} digits)", rep.theorem, phase, rep.status, rep.wall_time_s, rep.digits)?;
    for c in &rep.checks {
        writeln!(out, "  {} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail)?;
    }
    for w in rep.witnesses.iter().take(10) {
        writeln!(out, "  witness {}: {}", w.label, serde_json::to_string(&w.factorization)?)?;
    }
    if rep.witnesses.len() > 10 {
        writeln!(out, "  ... {} more witnesses", rep.witnesses.len() - 10)?;
    }
    writeln!(out, "  enumerated {}", rep.exhaustion.enumerated)?;
    for n in &rep.notes {
        writeln!(out, "  note: {n}")?;
    }
    Ok(())
}

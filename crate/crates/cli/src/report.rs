//! Plain-text rendering of computed tables.

use std::fmt::Write;

use dgquot::category::{ExtEntry, ExtTable, Status};
use dgquot::quotient::{CrossCheckReport, Pipeline};

pub fn status(s: Status) -> String {
    match s {
        Status::Exact => "exact".into(),
        Status::Stable { level } => format!("stable@{level}"),
        Status::Certified => "certified".into(),
        Status::Unstable => "unstable".into(),
    }
}

fn entry(e: &ExtEntry) -> String {
    format!("{} ({})", e.dim, status(e.status))
}

pub fn ext_table(title: &str, t: &ExtTable) -> String {
    let mut out = format!("{title}\n");
    for (m, e) in &t.entries {
        let _ = write!(out, "  H^{m:<3} {}", entry(e));
        if !e.representatives.is_empty() {
            let _ = write!(out, "  [{}]", e.representatives.join(", "));
        }
        out.push('\n');
    }
    out
}

fn pipeline(p: Option<Pipeline>) -> &'static str {
    match p {
        Some(Pipeline::Truncation) => "truncation",
        Some(Pipeline::Cone) => "cone",
        Some(Pipeline::Verdier) => "verdier",
        None => "-",
    }
}

pub fn cross_check(r: &CrossCheckReport, names: &[String]) -> String {
    let mut out = String::new();
    for p in &r.pairs {
        let _ = writeln!(
            out,
            "{} -> {}{}",
            names[p.x],
            names[p.y],
            if p.verdier_authoritative { "" } else { "  (verdier not authoritative)" }
        );
        let _ = writeln!(out, "  {:<6}{:<18}{:<18}{:<18}{:<6}{}", "deg", "truncation", "cone", "verdier", "dim", "by");
        for d in &p.degrees {
            let _ = writeln!(
                out,
                "  {:<6}{:<18}{:<18}{:<18}{:<6}{}{}",
                d.degree,
                entry(&d.truncation),
                entry(&d.cone),
                entry(&d.verdier),
                d.dim.map_or("?".into(), |n| n.to_string()),
                pipeline(d.authority),
                if d.discrepancy { "  DISAGREE" } else { "" }
            );
        }
    }
    let bad = r.discrepancies();
    if bad.is_empty() {
        out.push_str("no discrepancies\n");
    } else {
        let _ = writeln!(out, "{} discrepancies", bad.len());
    }
    out
}

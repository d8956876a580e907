//! JSON and markdown reports of verification runs, and golden test vectors.

use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value as Json};

use crate::catalog::CatalogEntry;
use crate::dsl::format_identity;
use crate::error::{Error, Result};
use crate::verify::{sweep, Mode, Ranges, Summary, VerificationResult};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "json" => Some(Format::Json),
            "markdown" | "md" => Some(Format::Markdown),
            _ => None,
        }
    }
}

/// `{"meta": {version, config, timestamp?}, "results": [...], "summary": {...}}`.
pub fn report_json(results: &[VerificationResult], config: Json, deterministic: bool) -> Json {
    let mut meta = json!({ "version": VERSION, "config": config });
    if !deterministic {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        meta["timestamp"] = json!(secs);
    }
    json!({
        "meta": meta,
        "results": results.iter().map(VerificationResult::to_json).collect::<Vec<_>>(),
        "summary": Summary::of(results),
    })
}

/// Recount the statuses listed in a JSON report.
pub fn summary_from_json(report: &Json) -> Result<Summary> {
    let results = report["results"].as_array().ok_or_else(|| Error::Io("report has no results array".into()))?;
    let mut s = Summary::default();
    for r in results {
        s.add(r["status"].as_str().ok_or_else(|| Error::Io("result without status".into()))?);
    }
    Ok(s)
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|")
}

/// A table per identity, in order of first appearance.
pub fn report_markdown(results: &[VerificationResult]) -> String {
    let s = Summary::of(results);
    let mut out = format!(
        "# Verification report\n\ntotal {}, exact {}, numeric {}, mismatch {}, skipped {}, failed {}\n",
        s.total, s.exact, s.numeric, s.mismatch, s.skipped, s.failed
    );
    let mut ids: Vec<&str> = Vec::new();
    for r in results {
        if !ids.contains(&r.id.as_str()) {
            ids.push(&r.id);
        }
    }
    for id in ids {
        let rows: Vec<&VerificationResult> = results.iter().filter(|r| r.id == id).collect();
        let sub = Summary::of(&rows.iter().map(|r| (*r).clone()).collect::<Vec<_>>());
        out.push_str(&format!(
            "\n## {id}\n\n{} instances: {} exact, {} numeric, {} mismatch, {} skipped, {} failed\n\n",
            sub.total, sub.exact, sub.numeric, sub.mismatch, sub.skipped, sub.failed
        ));
        out.push_str("| binding | status | lhs | rhs | detail |\n|---|---|---|---|---|\n");
        for r in rows {
            let j = r.to_json();
            let get = |k: &str| j[k].as_str().map(cell).unwrap_or_default();
            let detail = [get("relerr"), get("reason"), get("note")].into_iter().filter(|d| !d.is_empty()).collect::<Vec<_>>();
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} |\n",
                cell(&r.binding.to_string()),
                r.status.name(),
                get("lhs"),
                get("rhs"),
                detail.join("; ")
            ));
        }
    }
    out
}

pub fn render(results: &[VerificationResult], format: Format, config: Json, deterministic: bool) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report_json(results, config, deterministic)).expect("json");
            s.push('\n');
            s
        }
        Format::Markdown => report_markdown(results),
    }
}

pub fn write_text(path: &std::path::Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Exact values of every instance of `entry` over `ranges`.
pub fn vectors_for(entry: &CatalogEntry, ranges: &Ranges) -> Json {
    let results = sweep(&entry.identity, ranges, Mode::Exact);
    json!({
        "id": entry.id(),
        "dsl": format_identity(&entry.identity),
        "vectors": results.iter().map(VerificationResult::to_json).collect::<Vec<_>>(),
    })
}

/// Golden vectors for `entries` over their default ranges.
pub fn golden_vectors(entries: &[CatalogEntry]) -> Json {
    json!({
        "version": VERSION,
        "entries": entries.iter().map(|e| vectors_for(e, &e.ranges)).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::verify::int_range;

    fn knuth_results(hi: i64) -> Vec<VerificationResult> {
        let e = lookup("knuth").unwrap();
        sweep(&e.identity, &vec![("n".to_string(), int_range(0, hi))], Mode::Exact)
    }

    #[test]
    fn json_summary_recomputes() {
        let mut results = knuth_results(6);
        let skips = lookup("amsa61r").unwrap();
        let small: Ranges = skips.ranges.iter().map(|(n, v)| (n.clone(), v[..3].to_vec())).collect();
        results.extend(sweep(&skips.identity, &small, Mode::Exact));
        let j = report_json(&results, json!({"ids": ["knuth"]}), true);
        let s = summary_from_json(&j).unwrap();
        assert_eq!(serde_json::to_value(&s).unwrap(), j["summary"]);
        assert_eq!(s.total, results.len());
        assert_eq!(s.exact + s.numeric + s.mismatch + s.skipped + s.failed, s.total);
        assert!(j["meta"].get("timestamp").is_none());
        assert!(report_json(&results, json!({}), false)["meta"].get("timestamp").is_some());
    }

    #[test]
    fn deterministic_json_is_stable() {
        let a = render(&knuth_results(10), Format::Json, json!({}), true);
        let b = render(&knuth_results(10), Format::Json, json!({}), true);
        assert_eq!(a, b);
    }

    #[test]
    fn markdown_groups_by_identity() {
        let mut results = knuth_results(2);
        let c = lookup("complement2").unwrap();
        results.extend(sweep(&c.identity, &vec![("n".to_string(), int_range(0, 1))], Mode::Exact));
        let md = report_markdown(&results);
        assert!(md.contains("## knuth\n"));
        assert!(md.contains("## complement2\n"));
        assert!(md.contains("| n=2 | ExactEqual | 1/2 | 1/2 |"), "{md}");
    }

    #[test]
    fn knuth_vectors() {
        let e = lookup("knuth").unwrap();
        let v = vectors_for(e, &vec![("n".to_string(), int_range(0, 4))]);
        let lhs: Vec<&str> = v["vectors"].as_array().unwrap().iter().map(|r| r["lhs"].as_str().unwrap()).collect();
        assert_eq!(lhs, ["1", "0", "1/2", "0", "3/8"]);
    }
}

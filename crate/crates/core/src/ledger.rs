//! Append-only JSONL record of computed results, plus summaries of it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::search::{compare_to_turan, SearchResult};

/// Environment variable overriding the ledger location.
pub const LEDGER_ENV: &str = "NIMEDGE_LEDGER";
pub const DEFAULT_LEDGER: &str = "nimedge-ledger.jsonl";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerRecord {
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub command: String,
    pub parameters: Value,
    pub result: Value,
    pub version: String,
}

impl LedgerRecord {
    pub fn new(command: &str, parameters: Value, result: Value) -> Self {
        LedgerRecord {
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            command: command.to_string(),
            parameters,
            result,
            version: crate::VERSION.to_string(),
        }
    }
}

pub fn ledger_path() -> PathBuf {
    std::env::var_os(LEDGER_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_LEDGER))
}

/// Appends one line with a single `write` on an `O_APPEND` handle, so
/// concurrent writers never interleave within a record.
pub fn append(path: &Path, record: &LedgerRecord) -> Result<()> {
    let mut line = serde_json::to_string(record)?;
    line.push('\n');
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    file.write_all(line.as_bytes())?;
    Ok(())
}

pub fn read(path: &Path) -> Result<Vec<LedgerRecord>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| Error::InvalidArgument(format!("ledger line {}: {e}", i + 1)))
        })
        .collect()
}

/// One search record set against `ex(n, H)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapRow {
    pub pattern: String,
    pub n: usize,
    pub k: usize,
    pub method: String,
    pub exhaustive: bool,
    pub best_count: usize,
    pub reference: Option<u64>,
    pub gap: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total_records: usize,
    pub by_command: BTreeMap<String, usize>,
    pub rows: Vec<GapRow>,
}

pub fn summarize(records: &[LedgerRecord]) -> Result<Summary> {
    let mut by_command = BTreeMap::new();
    let mut rows = Vec::new();
    for r in records {
        *by_command.entry(r.command.clone()).or_insert(0) += 1;
        if r.command != "search" {
            continue;
        }
        let s: SearchResult = serde_json::from_value(r.result.clone())?;
        let cmp = compare_to_turan(&s).ok();
        rows.push(GapRow {
            pattern: s.pattern.clone(),
            n: s.n,
            k: s.k,
            method: serde_json::to_value(s.method)?
                .as_str()
                .unwrap_or_default()
                .to_string(),
            exhaustive: s.exhaustive,
            best_count: s.best_count,
            reference: cmp.as_ref().map(|c| c.reference),
            gap: cmp.map(|c| c.gap),
        });
    }
    Ok(Summary {
        total_records: records.len(),
        by_command,
        rows,
    })
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(String::new, T::to_string)
}

pub fn render_csv(s: &Summary) -> String {
    let mut out = String::from("pattern,n,k,method,exhaustive,best_count,reference,gap\n");
    for r in &s.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.pattern,
            r.n,
            r.k,
            r.method,
            r.exhaustive,
            r.best_count,
            opt(&r.reference),
            opt(&r.gap)
        );
    }
    out
}

pub fn render_table(s: &Summary) -> String {
    let head = [
        "pattern", "n", "k", "method", "exact", "best", "(k-1)ex", "gap",
    ];
    let cells: Vec<[String; 8]> = s
        .rows
        .iter()
        .map(|r| {
            [
                r.pattern.clone(),
                r.n.to_string(),
                r.k.to_string(),
                r.method.clone(),
                if r.exhaustive {
                    "yes".into()
                } else {
                    "no".into()
                },
                r.best_count.to_string(),
                opt(&r.reference),
                r.gap.map_or_else(String::new, |g| format!("{g:+}")),
            ]
        })
        .collect();
    let mut width = head.map(str::len);
    for row in &cells {
        for (w, c) in width.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cols: &[&str]| {
        let parts: Vec<String> = cols
            .iter()
            .zip(width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &head);
    for row in &cells {
        line(
            &mut out,
            &row.iter().map(String::as_str).collect::<Vec<_>>(),
        );
    }
    let counts: Vec<String> = s
        .by_command
        .iter()
        .map(|(c, n)| format!("{c}={n}"))
        .collect();
    let _ = writeln!(out, "records: {} ({})", s.total_records, counts.join(", "));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::make_path;
    use crate::search::exhaustive_f;

    #[test]
    fn append_read_summarize() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.jsonl");
        let s = exhaustive_f(5, 2, &make_path(3)).unwrap();
        let rec = LedgerRecord::new(
            "search",
            serde_json::json!({"n": 5, "k": 2, "pattern": "path:3"}),
            serde_json::to_value(&s).unwrap(),
        );
        append(&path, &rec).unwrap();
        append(&path, &LedgerRecord::new("turan", Value::Null, Value::Null)).unwrap();
        let back = read(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0], rec);
        let sum = summarize(&back).unwrap();
        assert_eq!(sum.total_records, sum.by_command.values().sum::<usize>());
        assert_eq!(sum.rows[0].gap, Some(0));
        assert!(render_csv(&sum)
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("path:3,5,2,exhaustive,true,2,2,0"));
        assert!(render_table(&sum).contains("records: 2 (search=1, turan=1)"));
    }

    #[test]
    fn bad_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.jsonl");
        std::fs::write(&path, "{}\n").unwrap();
        let err = read(&path).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }
}

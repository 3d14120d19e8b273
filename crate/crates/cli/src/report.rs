//! Report envelopes and plain-text tables.

use std::fmt::Write;

use serde_json::{json, Value};

use laxkit::FuzzyRel;

use crate::load::Input;

/// What a subcommand produced: a JSON body, a table rendering of the same,
/// and whether the verdict was positive.
pub struct Output {
    pub body: Value,
    pub table: String,
    pub ok: bool,
}

pub fn envelope(command: &str, seed: u64, inputs: &[Input], out: &Output) -> Value {
    json!({
        "tool": "laxkit",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": seed,
        "inputs": inputs
            .iter()
            .map(|i| json!({"path": i.path.display().to_string(), "sha256": i.sha256}))
            .collect::<Vec<_>>(),
        "ok": out.ok,
        "result": out.body,
    })
}

pub fn header(command: &str, seed: u64, inputs: &[Input]) -> String {
    let mut s = format!(
        "laxkit {} {command} (seed {seed})\n",
        env!("CARGO_PKG_VERSION")
    );
    for i in inputs {
        let _ = writeln!(s, "  {}  sha256:{}", i.path.display(), i.sha256);
    }
    s
}

/// Renders rows of cells with left-aligned, padded columns.
pub fn columns(rows: &[Vec<String>]) -> String {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..width)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, cell)| format!("{cell:<w$}", w = widths[c]))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

pub fn matrix(r: &FuzzyRel) -> String {
    let mut rows = vec![std::iter::once(String::new())
        .chain(r.target().elements().iter().cloned())
        .collect::<Vec<_>>()];
    for (i, a) in r.source().elements().iter().enumerate() {
        let mut row = vec![a.clone()];
        row.extend((0..r.target().len()).map(|j| r.get(i, j).to_string()));
        rows.push(row);
    }
    columns(&rows)
}

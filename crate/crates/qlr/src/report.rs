//! Table, JSON and CSV renderings of lifetime reports.

use std::fmt::Write as _;

use anyhow::Result;
use qlr_core::cost::{Comparison, LifetimeReport};
use qlr_core::{AvgDenominator, CostModel, FlatProgram, Model, Qubit};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// One before/after line; the same field names are used in JSON and CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub workload: String,
    pub qubits: usize,
    pub exec_before: u64,
    pub exec_after: u64,
    pub longest_before: u64,
    pub longest_after: u64,
    pub avg_before: f64,
    pub avg_after: f64,
}

impl Row {
    pub fn new(workload: &str, qubits: usize, c: &Comparison) -> Self {
        Row {
            workload: workload.into(),
            qubits,
            exec_before: c.before.execution_time,
            exec_after: c.after.execution_time,
            longest_before: c.before.longest_lifetime,
            longest_after: c.after.longest_lifetime,
            avg_before: round(c.before.average_lifetime),
            avg_after: round(c.after.average_lifetime),
        }
    }
}

/// A single program's report, flattened.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Single {
    pub workload: String,
    pub qubits: usize,
    pub model: Model,
    pub measure_cost: u64,
    pub execution_time: u64,
    pub depth: usize,
    pub longest_lifetime: u64,
    pub average_lifetime: f64,
    pub average_denominator: AvgDenominator,
    pub per_qubit: String,
}

impl Single {
    pub fn new(workload: &str, r: &LifetimeReport, cm: &CostModel) -> Self {
        Single {
            workload: workload.into(),
            qubits: r.per_qubit.len(),
            model: r.mode,
            measure_cost: cm.measure,
            execution_time: r.execution_time,
            depth: r.depth,
            longest_lifetime: r.longest_lifetime,
            average_lifetime: round(r.average_lifetime),
            average_denominator: r.average_denominator,
            per_qubit: r.per_qubit.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
        }
    }
}

fn round(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::Layered => "layered",
        Model::Serial => "serial",
    }
}

fn denominator_name(d: AvgDenominator) -> &'static str {
    match d {
        AvgDenominator::Declared => "declared",
        AvgDenominator::Active => "active",
    }
}

pub fn header(model: Model, cm: &CostModel, denom: AvgDenominator) -> String {
    format!(
        "# {} model, durations in τu (1q = {}, 2q = {}, m = {}), average over {} qubits\n",
        model_name(model),
        cm.single_qubit,
        cm.two_qubit,
        cm.measure,
        denominator_name(denom)
    )
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn json_rows<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut s = if rows.len() == 1 { serde_json::to_string_pretty(&rows[0])? } else { serde_json::to_string_pretty(rows)? };
    s.push('\n');
    Ok(s)
}

fn table(head: &[&str], body: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = head.iter().map(|h| h.chars().count()).collect();
    for r in body {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &mut dyn Iterator<Item = &str>| {
        let parts: Vec<String> = cells.zip(&widths).map(|(c, w)| format!("{:<w$}", c, w = w)).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &mut head.iter().copied());
    for r in body {
        line(&mut out, &mut r.iter().map(String::as_str));
    }
    out
}

pub fn render_rows(rows: &[Row], format: Format, head: &str) -> Result<String> {
    match format {
        Format::Csv => csv_rows(rows),
        Format::Json => json_rows(rows),
        Format::Table => {
            let cols = ["workload", "qubits", "exec_before", "exec_after", "longest_before", "longest_after", "avg_before", "avg_after"];
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.workload.clone(),
                        r.qubits.to_string(),
                        r.exec_before.to_string(),
                        r.exec_after.to_string(),
                        r.longest_before.to_string(),
                        r.longest_after.to_string(),
                        format!("{:.3}", r.avg_before),
                        format!("{:.3}", r.avg_after),
                    ]
                })
                .collect();
            Ok(format!("{}{}", head, table(&cols, &body)))
        }
    }
}

/// Table of touched qubits whose lifetime is non-zero before or after.
pub fn per_qubit_table(fp: &FlatProgram, c: &Comparison) -> String {
    let body: Vec<Vec<String>> = (0..fp.num_qubits())
        .filter(|&q| c.before.per_qubit[q] > 0 || c.after.per_qubit[q] > 0)
        .map(|q| {
            vec![fp.qubit_name(Qubit(q)).to_string(), c.before.per_qubit[q].to_string(), c.after.per_qubit[q].to_string()]
        })
        .collect();
    table(&["qubit", "lifetime_before", "lifetime_after"], &body)
}

pub fn render_single(s: &Single, fp: &FlatProgram, r: &LifetimeReport, format: Format, head: &str) -> Result<String> {
    match format {
        Format::Csv => csv_rows(std::slice::from_ref(s)),
        Format::Json => json_rows(std::slice::from_ref(s)),
        Format::Table => {
            let mut out = String::from(head);
            let summary = [
                ("workload", s.workload.clone()),
                ("qubits", s.qubits.to_string()),
                ("execution_time", s.execution_time.to_string()),
                ("depth", s.depth.to_string()),
                ("longest_lifetime", s.longest_lifetime.to_string()),
                ("average_lifetime", format!("{:.3}", s.average_lifetime)),
            ];
            for (k, v) in summary {
                let _ = writeln!(out, "{:<17} {}", k, v);
            }
            let body: Vec<Vec<String>> = (0..fp.num_qubits())
                .filter(|&q| r.per_qubit[q] > 0)
                .map(|q| vec![fp.qubit_name(Qubit(q)).to_string(), r.per_qubit[q].to_string()])
                .collect();
            if !body.is_empty() {
                out.push('\n');
                out.push_str(&table(&["qubit", "lifetime"], &body));
            }
            Ok(out)
        }
    }
}

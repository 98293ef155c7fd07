//! Text and JSON renderings of command results.
//!
//! Every JSON document is one object with `format_version` (currently 1)
//! and `command` keys; the remaining keys are listed in the README.

use std::fmt::Write;

use fluxlogic::{
    AnnealSchedule, Error, IsingModel, Method, Model, Network, SatOutcome, SatStatus, SolveResult,
    TruthTableReport,
};
use serde::Serialize;

pub const FORMAT_VERSION: u32 = 1;

/// Ground states printed in text mode before eliding the rest.
const TEXT_STATES: usize = 16;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    format_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

fn envelope<T: Serialize>(command: &str, body: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Envelope {
        format_version: FORMAT_VERSION,
        command,
        body,
    })
    .expect("report serializes");
    s.push('\n');
    s
}

pub enum Report {
    Solve(SolveReport),
    TruthTable(TruthTableReport),
    CheckGate(TruthTableReport),
    Sat(SatReport),
    Ising(IsingReport),
}

impl Report {
    pub fn to_json(&self) -> String {
        match self {
            Report::Solve(r) => envelope(r.command, r),
            Report::TruthTable(r) => envelope("truth-table", r),
            Report::CheckGate(r) => envelope("check-gate", r),
            Report::Sat(r) => envelope("sat", r),
            Report::Ising(r) => envelope("export-ising", r),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Report::Solve(r) => r.text(),
            Report::TruthTable(r) | Report::CheckGate(r) => truth_text(r),
            Report::Sat(r) => r.text(),
            Report::Ising(r) => r.text(),
        }
    }
}

pub fn error_json(error: &Error, hint: Option<&str>) -> String {
    #[derive(Serialize)]
    struct Body<'a> {
        error: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        line: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        hint: Option<&'a str>,
    }
    envelope(
        "error",
        &Body {
            error: error.to_string(),
            line: error.line(),
            hint,
        },
    )
}

fn bits(state: &[bool]) -> String {
    state.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Serialize)]
pub struct SolveReport {
    #[serde(skip)]
    command: &'static str,
    model: Model,
    method: Method,
    certified: bool,
    /// Cell names; ground-state strings index cells in this order.
    cells: Vec<String>,
    min_energy: f64,
    degeneracy: Option<u128>,
    gap: Option<f64>,
    truncated: bool,
    ground_states: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    schedule: Option<AnnealSchedule>,
}

impl SolveReport {
    pub fn new(
        command: &'static str,
        net: &Network,
        model: Model,
        r: &SolveResult,
        schedule: Option<AnnealSchedule>,
    ) -> Self {
        SolveReport {
            command,
            model,
            method: r.method,
            certified: r.certified,
            cells: net.cells().iter().map(|c| c.name().to_string()).collect(),
            min_energy: r.min_energy,
            degeneracy: r.degeneracy,
            gap: r.gap,
            truncated: r.truncated,
            ground_states: r.ground_states.iter().map(|g| bits(&g.to_bits())).collect(),
            schedule,
        }
    }

    fn text(&self) -> String {
        let mut s = String::new();
        let method = match self.method {
            Method::Exact => "exact",
            Method::Anneal => "anneal (not certified)",
        };
        let _ = writeln!(s, "model: {}  method: {method}", self.model);
        let _ = writeln!(s, "min energy: {}", self.min_energy);
        if let Some(d) = self.degeneracy {
            let _ = writeln!(s, "degeneracy: {d}");
        }
        if let Some(g) = self.gap {
            let _ = writeln!(s, "gap: {g}");
        }
        let _ = writeln!(s, "cells: {}", self.cells.join(" "));
        for g in self.ground_states.iter().take(TEXT_STATES) {
            let _ = writeln!(s, "  {g}");
        }
        let hidden = self.ground_states.len().saturating_sub(TEXT_STATES);
        if hidden > 0 || self.truncated {
            let _ = writeln!(s, "  ... more ground states not shown");
        }
        s
    }
}

fn truth_text(r: &TruthTableReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} | {} | energy",
        r.inputs.join(" "),
        r.outputs.join(" ")
    );
    for (k, row) in r.rows.iter().enumerate() {
        let ins: Vec<String> = row.inputs.iter().map(|v| v.to_string()).collect();
        let outs: Vec<String> = row.outputs.iter().map(|v| v.to_string()).collect();
        let mut line = format!(
            "{} | {} | {}",
            ins.join(" "),
            outs.join(" "),
            row.min_energy
        );
        if !row.in_regime {
            line.push_str("  (flux out of range)");
        }
        if let Some(want) = &row.expected {
            if r.failing_rows.contains(&k) {
                let want: Vec<String> = want.iter().map(|v| v.to_string()).collect();
                let _ = write!(line, "  FAIL, expected {}", want.join(" "));
            }
        }
        let _ = writeln!(s, "{line}");
    }
    if let Some(p) = r.passed {
        let _ = writeln!(s, "{}", if p { "PASS" } else { "FAIL" });
    }
    s
}

#[derive(Serialize)]
pub struct SatReport {
    model: Model,
    status: SatStatus,
    /// Signed DIMACS literals of the satisfying assignment.
    assignment: Option<Vec<i64>>,
    min_energy: f64,
    violated_clauses: Option<u64>,
    certified: bool,
    method: Method,
}

impl SatReport {
    pub fn new(model: Model, o: SatOutcome) -> Self {
        SatReport {
            model,
            status: o.status,
            assignment: o.assignment.map(|vals| {
                vals.iter()
                    .enumerate()
                    .map(|(k, &b)| if b { k as i64 + 1 } else { -(k as i64 + 1) })
                    .collect()
            }),
            min_energy: o.min_energy,
            violated_clauses: o.violated_clauses,
            certified: o.certified,
            method: o.method,
        }
    }

    fn text(&self) -> String {
        let status = match self.status {
            SatStatus::Sat => "SATISFIABLE",
            SatStatus::Unsat => "UNSATISFIABLE",
            SatStatus::Unknown => "UNKNOWN",
        };
        let mut s = format!("s {status}\n");
        if let Some(a) = &self.assignment {
            let lits: Vec<String> = a.iter().map(|l| l.to_string()).collect();
            let _ = writeln!(s, "v {} 0", lits.join(" "));
        }
        let _ = writeln!(s, "c min energy {}", self.min_energy);
        if let Some(v) = self.violated_clauses {
            let _ = writeln!(s, "c min violated clauses {v}");
        }
        s
    }
}

#[derive(Serialize)]
pub struct FieldEntry {
    spin: String,
    value: f64,
}

#[derive(Serialize)]
pub struct CouplingEntry {
    a: String,
    b: String,
    value: f64,
}

/// `E(s) = constant + sum h_i s_i + sum J_ij s_i s_j`, with `s = +1` for
/// logic 0 and `s = -1` for logic 1.
#[derive(Serialize)]
pub struct IsingReport {
    spins: Vec<String>,
    constant: f64,
    h: Vec<FieldEntry>,
    j: Vec<CouplingEntry>,
}

impl IsingReport {
    pub fn new(m: &IsingModel) -> Self {
        let name = |id: fluxlogic::CellId| m.names()[id.0].clone();
        IsingReport {
            spins: m.names().to_vec(),
            constant: m.constant(),
            h: m.fields()
                .iter()
                .map(|(&id, &value)| FieldEntry {
                    spin: name(id),
                    value,
                })
                .collect(),
            j: m.couplings()
                .iter()
                .map(|(&(a, b), &value)| CouplingEntry {
                    a: name(a),
                    b: name(b),
                    value,
                })
                .collect(),
        }
    }

    fn text(&self) -> String {
        let mut s = format!("constant {}\n", self.constant);
        for f in &self.h {
            let _ = writeln!(s, "h {} {}", f.spin, f.value);
        }
        for c in &self.j {
            let _ = writeln!(s, "J {} {} {}", c.a, c.b, c.value);
        }
        s
    }
}

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A signed reference to a 1-based variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Lit {
    pub var: usize,
    pub negated: bool,
}

impl Lit {
    pub fn from_dimacs(x: i64) -> Self {
        Lit {
            var: x.unsigned_abs() as usize,
            negated: x < 0,
        }
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64;
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// Truth value under `values`, indexed by `var - 1`.
    pub fn holds(self, values: &[bool]) -> bool {
        values[self.var - 1] != self.negated
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A 3-CNF formula. Shorter clauses are padded by repeating a literal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<[Lit; 3]>,
}

/// `[a]` becomes `[a, a, a]`, `[a, b]` becomes `[a, b, b]`.
fn pad(lits: &[Lit]) -> Option<[Lit; 3]> {
    match *lits {
        [a] => Some([a, a, a]),
        [a, b] => Some([a, b, b]),
        [a, b, c] => Some([a, b, c]),
        _ => None,
    }
}

impl CnfFormula {
    /// Builds a formula from DIMACS-style signed literals.
    pub fn new(num_vars: usize, clauses: &[Vec<i64>]) -> Result<Self> {
        let mut out = Vec::with_capacity(clauses.len());
        for (k, clause) in clauses.iter().enumerate() {
            let lits: Vec<Lit> = clause.iter().map(|&x| Lit::from_dimacs(x)).collect();
            if let Some(l) = lits.iter().find(|l| l.var == 0 || l.var > num_vars) {
                return Err(Error::InvalidValue(format!(
                    "clause {k}: literal {l} out of range 1..={num_vars}"
                )));
            }
            out.push(pad(&lits).ok_or_else(|| {
                Error::InvalidValue(format!(
                    "clause {k} has {} literals, expected 1 to 3",
                    lits.len()
                ))
            })?);
        }
        Ok(CnfFormula {
            num_vars,
            clauses: out,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[Lit; 3]] {
        &self.clauses
    }

    pub fn clause_satisfied(clause: &[Lit; 3], values: &[bool]) -> bool {
        clause.iter().any(|l| l.holds(values))
    }

    /// Number of clauses not satisfied by `values`.
    pub fn violated(&self, values: &[bool]) -> usize {
        self.clauses
            .iter()
            .filter(|c| !Self::clause_satisfied(c, values))
            .count()
    }

    pub fn satisfied_by(&self, values: &[bool]) -> bool {
        values.len() == self.num_vars && self.violated(values) == 0
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            s.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        s
    }
}

/// Parses DIMACS CNF: `c` comment lines, a `p cnf <vars> <clauses>` header,
/// then 0-terminated clauses that may span lines. A `%` line ends input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses: Vec<[Lit; 3]> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut clause_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(line_no, "duplicate header"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", v, c] => v.parse::<usize>().ok().zip(c.parse::<usize>().ok()),
                _ => None,
            };
            let (v, c) = parsed.ok_or_else(|| {
                Error::parse(
                    line_no,
                    format!("malformed header `{line}`, expected `p cnf <vars> <clauses>`"),
                )
            })?;
            header = Some((v, c, line_no));
            continue;
        }
        let (num_vars, _, _) =
            header.ok_or_else(|| Error::parse(line_no, "clause before `p cnf` header"))?;
        for tok in line.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid literal `{tok}`")))?;
            if x == 0 {
                if current.is_empty() {
                    return Err(Error::parse(line_no, "empty clause"));
                }
                let padded = pad(&current).ok_or_else(|| {
                    Error::parse(
                        clause_line,
                        format!(
                            "clause has {} literals; only 3-CNF is supported",
                            current.len()
                        ),
                    )
                })?;
                clauses.push(padded);
                current.clear();
                continue;
            }
            if x.unsigned_abs() as usize > num_vars {
                return Err(Error::parse(
                    line_no,
                    format!("literal {x} out of range (header declares {num_vars} variables)"),
                ));
            }
            if current.is_empty() {
                clause_line = line_no;
            }
            current.push(Lit::from_dimacs(x));
        }
    }

    let (num_vars, expected, header_line) = header
        .ok_or_else(|| Error::parse(text.lines().count().max(1), "missing `p cnf` header"))?;
    if !current.is_empty() {
        return Err(Error::parse(
            clause_line,
            "unterminated clause (missing trailing 0)",
        ));
    }
    if clauses.len() != expected {
        return Err(Error::parse(
            header_line,
            format!(
                "header declares {expected} clauses, found {}",
                clauses.len()
            ),
        ));
    }
    Ok(CnfFormula { num_vars, clauses })
}

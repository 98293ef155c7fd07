//! 3SAT search machine: one free cell per variable and one clause evaluator
//! per clause. Every clause evaluator adds its decision penalty when its
//! clause is violated, so in the mismatch model the minimum network energy
//! is `dedlu_strength` times the minimum number of violated clauses.

mod cnf;

use serde::Serialize;

pub use cnf::{parse_dimacs, CnfFormula, Lit};

use crate::error::{Error, Result};
use crate::gates::{three_ce_named, GateParams, Literal};
use crate::model::{Assignment, CellId, Model, Network, Role};
use crate::solver::{anneal, solve_exact, AnnealSchedule, ExactOptions, Method, SolveResult};

/// A compiled formula.
#[derive(Debug, Clone)]
pub struct SatMachine {
    pub network: Network,
    /// Cell of variable `k + 1` at index `k`.
    pub variables: Vec<CellId>,
    /// Violation cell of each clause.
    pub violations: Vec<CellId>,
    pub params: GateParams,
}

/// Builds the network for `cnf`.
pub fn compile_cnf(cnf: &CnfFormula, p: &GateParams) -> Result<SatMachine> {
    let mut net = Network::new();
    p.validate(net.constants().phi0)?;
    let l = net.constants().default_inductance;
    let variables = (1..=cnf.num_vars())
        .map(|v| net.add_cell_with(format!("x{v}"), 0.0, l, Role::Input))
        .collect::<Result<Vec<_>>>()?;
    let mut violations = Vec::with_capacity(cnf.clauses().len());
    for (k, clause) in cnf.clauses().iter().enumerate() {
        let lits = clause.map(|lit| Literal {
            cell: variables[lit.var - 1],
            positive: !lit.negated,
        });
        let g = three_ce_named(&mut net, lits, format!("c{k}.v"), p)?;
        violations.push(g.output());
    }
    Ok(SatMachine {
        network: net,
        variables,
        violations,
        params: *p,
    })
}

/// Projects a network state onto the variable cells.
pub fn extract_assignment(
    net: &Network,
    state: &Assignment,
    variables: &[CellId],
) -> Result<Vec<bool>> {
    if state.len() != net.len() {
        return Err(Error::AssignmentSize {
            expected: net.len(),
            got: state.len(),
        });
    }
    variables
        .iter()
        .map(|&v| {
            net.cell(v)?;
            Ok(net.value(state, v).bit())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SatStatus {
    Sat,
    Unsat,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatOutcome {
    pub status: SatStatus,
    /// Variable values, index `k` for variable `k + 1`; present when SAT.
    pub assignment: Option<Vec<bool>>,
    pub min_energy: f64,
    /// `min_energy / dedlu_strength` in the mismatch model.
    pub violated_clauses: Option<u64>,
    pub certified: bool,
    pub method: Method,
}

#[derive(Debug, Clone)]
pub enum SatSolver {
    Exact(ExactOptions),
    Anneal(AnnealSchedule),
}

#[derive(Debug, Clone)]
pub struct SatConfig {
    pub model: Model,
    pub solver: SatSolver,
}

impl Default for SatConfig {
    fn default() -> Self {
        SatConfig {
            model: Model::Mismatch,
            solver: SatSolver::Exact(ExactOptions::default()),
        }
    }
}

/// Decides `cnf` from the ground-state energy of its machine.
///
/// Exact solving enumerates the variable cells in an outer loop and each
/// clause evaluator separately. SAT answers always carry an assignment that
/// has been checked clause by clause. UNSAT is reported only by the exact
/// solver under the mismatch model, where the energy threshold is exact.
pub fn decide_sat(cnf: &CnfFormula, p: &GateParams, cfg: &SatConfig) -> Result<SatOutcome> {
    let machine = compile_cnf(cnf, p)?;
    let net = &machine.network;
    let result: SolveResult = match &cfg.solver {
        SatSolver::Exact(opts) => {
            let mut opts = opts.clone();
            opts.condition_on.extend(&machine.variables);
            solve_exact(net, cfg.model, &opts)?
        }
        SatSolver::Anneal(schedule) => anneal(net, cfg.model, schedule)?,
    };

    let violated_clauses = match cfg.model {
        Model::Mismatch => Some((result.min_energy / p.dedlu_strength).round() as u64),
        Model::Quadratic => None,
    };
    let mut satisfying = None;
    for g in &result.ground_states {
        let values = extract_assignment(net, g, &machine.variables)?;
        if cnf.satisfied_by(&values) {
            satisfying = Some(values);
            break;
        }
    }
    let tol = match &cfg.solver {
        SatSolver::Exact(o) => o.tolerance,
        SatSolver::Anneal(_) => crate::model::DEFAULT_TOLERANCE,
    };
    let status = match (&satisfying, cfg.model, result.certified) {
        (Some(_), _, _) => SatStatus::Sat,
        (None, Model::Mismatch, true) if result.min_energy >= p.dedlu_strength - tol => {
            SatStatus::Unsat
        }
        _ => SatStatus::Unknown,
    };
    Ok(SatOutcome {
        status,
        assignment: satisfying,
        min_energy: result.min_energy,
        violated_clauses,
        certified: result.certified,
        method: result.method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_clause_machine() {
        let cnf = parse_dimacs("p cnf 3 1\n1 2 3 0").unwrap();
        let m = compile_cnf(&cnf, &GateParams::default()).unwrap();
        assert_eq!(m.variables.len(), 3);
        assert_eq!(m.violations.len(), 1);
        let out = decide_sat(&cnf, &GateParams::default(), &SatConfig::default()).unwrap();
        assert_eq!(out.status, SatStatus::Sat);
        assert_eq!(out.min_energy, 0.0);
        assert!(cnf.satisfied_by(out.assignment.as_ref().unwrap()));
    }

    #[test]
    fn contradiction_costs_one_penalty() {
        let cnf = parse_dimacs("p cnf 1 2\n1 0\n-1 0").unwrap();
        let out = decide_sat(&cnf, &GateParams::default(), &SatConfig::default()).unwrap();
        assert_eq!(out.status, SatStatus::Unsat);
        assert!(out.certified);
        assert_eq!(out.min_energy, 0.5);
        assert_eq!(out.violated_clauses, Some(1));
    }

    #[test]
    fn empty_formula_every_assignment_is_ground() {
        let cnf = CnfFormula::new(3, &[]).unwrap();
        let m = compile_cnf(&cnf, &GateParams::default()).unwrap();
        let r = solve_exact(&m.network, Model::Mismatch, &ExactOptions::default()).unwrap();
        assert_eq!(r.min_energy, 0.0);
        assert_eq!(r.degeneracy, Some(8));
    }

    #[test]
    fn extract_single_variable() {
        let cnf = CnfFormula::new(1, &[]).unwrap();
        let m = compile_cnf(&cnf, &GateParams::default()).unwrap();
        let a = Assignment::new(vec![crate::model::Logic::One]);
        assert_eq!(
            extract_assignment(&m.network, &a, &m.variables).unwrap(),
            vec![true]
        );
        assert!(extract_assignment(&m.network, &a, &[CellId(4)]).is_err());
    }
}

//! Static ground-state logic on flux-biased superconducting ring cells.
//!
//! A [`Network`] of cells and directed couplings is built with the
//! constructors in [`gates`], solved for its ground states with
//! [`solver`], checked against Boolean functions with [`verify`], and
//! compiled from 3-CNF formulas with [`sat`]. [`netlist`] reads and writes
//! the line-oriented netlist text format.

pub mod error;
pub mod gates;
pub mod ising;
pub mod model;
pub mod netlist;
pub mod sat;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use gates::{GateParams, Literal};
pub use ising::{ising_energy, to_ising, IsingModel};
pub use model::{
    Assignment, Cell, CellId, Coupling, FluxConstants, GateHandle, GateKind, Logic, Model, Network,
    Penalty, Role, DEFAULT_TOLERANCE,
};
pub use netlist::{parse_netlist, parse_netlist_with, serialize, NetlistDocument, Overrides};
pub use sat::{
    compile_cnf, decide_sat, parse_dimacs, CnfFormula, SatConfig, SatMachine, SatOutcome,
    SatSolver, SatStatus,
};
pub use solver::{
    anneal, anneal_with_workers, single_flip_delta, solve_exact, AnnealSchedule, ExactOptions,
    Method, SolveResult,
};
pub use verify::{
    check_edc, check_function, check_gate, check_ising_equivalence, truth_table, BoolFn,
    OutputValue, TruthRow, TruthTableReport,
};

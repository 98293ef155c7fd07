//! Ground-state search: exact enumeration and simulated annealing.

mod anneal;
pub(crate) mod eval;
mod exact;

use serde::Serialize;

pub use anneal::{anneal, anneal_with_workers, AnnealSchedule};
pub use exact::{brute_force_min, solve_exact, ExactOptions, HARD_LIMIT};

use crate::error::{Error, Result};
use crate::model::{Assignment, CellId, Model, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Anneal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub method: Method,
    /// True only for exhaustive enumeration.
    pub certified: bool,
    pub min_energy: f64,
    /// All ground states in lexicographic order (exact), or the best state
    /// found (anneal).
    pub ground_states: Vec<Assignment>,
    /// Number of ground states; exact mode only.
    pub degeneracy: Option<u128>,
    /// Distance to the next energy level, 0 when there is none; exact only.
    pub gap: Option<f64>,
    /// Set when `ground_states` lists fewer states than `degeneracy`.
    pub truncated: bool,
}

impl SolveResult {
    pub fn best(&self) -> &Assignment {
        &self.ground_states[0]
    }
}

/// Energy change of `a` when the free cell `cell` flips.
pub fn single_flip_delta(net: &Network, model: Model, a: &Assignment, cell: CellId) -> Result<f64> {
    let c = net.cell(cell)?;
    if c.clamp().is_some() {
        return Err(Error::ClampedCell(cell));
    }
    if a.len() != net.len() {
        return Err(Error::AssignmentSize {
            expected: net.len(),
            got: a.len(),
        });
    }
    let local = |s: &Assignment| -> Result<f64> {
        let mut e = net.cell_energy(s, cell, model)?;
        for k in net.outgoing(cell) {
            e += net.cell_energy(s, k.target, model)?;
        }
        Ok(e)
    };
    let mut flipped = a.clone();
    flipped.flip(cell);
    Ok(local(&flipped)? - local(a)?)
}

//! Dense evaluator used by the solvers.

use crate::model::{
    mismatch_cost, penalty_cost, quadratic_branch, spin_of, Logic, Model, Network, Penalty,
};

/// Flattened copy of a network for fast energy and flip-delta evaluation.
///
/// States are `bool` slices over all cells (`true` = logic 1). Incoming
/// perturbations are summed in the same order as [`Network::applied_flux`],
/// so per-cell energies agree bit for bit.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub model: Model,
    phi0: f64,
    half: f64,
    tol: f64,
    bias: Vec<f64>,
    inductance: Vec<f64>,
    penalty: Vec<Option<Penalty>>,
    incoming: Vec<Vec<(usize, f64)>>,
    outgoing: Vec<Vec<usize>>,
    pub clamp: Vec<Option<bool>>,
}

impl Compiled {
    pub fn new(net: &Network, model: Model) -> Self {
        let n = net.len();
        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        for id in net.cell_ids() {
            for c in net.incoming(id) {
                incoming[id.0].push((c.source.0, c.strength));
            }
            for c in net.outgoing(id) {
                outgoing[id.0].push(c.target.0);
            }
        }
        let constants = net.constants();
        Compiled {
            model,
            phi0: constants.phi0,
            half: constants.half_quantum(),
            tol: net.tolerance(),
            bias: net.cells().iter().map(|c| c.bias()).collect(),
            inductance: net.cells().iter().map(|c| c.inductance()).collect(),
            penalty: net.cells().iter().map(|c| c.penalty()).collect(),
            incoming,
            outgoing,
            clamp: net
                .cells()
                .iter()
                .map(|c| c.clamp().map(Logic::bit))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bias.len()
    }

    pub fn sources(&self, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.incoming[c].iter().map(|&(s, _)| s)
    }

    /// Base state: clamps applied, free cells at logic 0.
    pub fn base_state(&self) -> Vec<bool> {
        self.clamp.iter().map(|c| c.unwrap_or(false)).collect()
    }

    #[inline]
    pub fn flux(&self, s: &[bool], c: usize) -> f64 {
        let mut f = self.half + self.bias[c];
        for &(src, w) in &self.incoming[c] {
            f += w * spin_of(s[src]);
        }
        f
    }

    #[inline]
    pub fn cell_energy(&self, s: &[bool], c: usize) -> f64 {
        let f = self.flux(s, c);
        match self.model {
            Model::Quadratic => quadratic_branch(f, s[c], self.phi0, self.inductance[c]),
            Model::Mismatch => {
                mismatch_cost(f, s[c], self.half, self.tol) + penalty_cost(self.penalty[c], s[c])
            }
        }
    }

    pub fn energy(&self, s: &[bool]) -> f64 {
        (0..self.len()).map(|c| self.cell_energy(s, c)).sum()
    }

    /// Energy change from flipping cell `c`; `s` is restored on return.
    #[inline]
    pub fn flip_delta(&self, s: &mut [bool], c: usize) -> f64 {
        let before = self.local_energy(s, c);
        s[c] = !s[c];
        let after = self.local_energy(s, c);
        s[c] = !s[c];
        after - before
    }

    /// Energy of `c` and of every cell it perturbs.
    #[inline]
    fn local_energy(&self, s: &[bool], c: usize) -> f64 {
        let mut e = self.cell_energy(s, c);
        for &t in &self.outgoing[c] {
            e += self.cell_energy(s, t);
        }
        e
    }
}

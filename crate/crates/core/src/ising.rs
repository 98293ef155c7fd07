//! Exact reduction of the quadratic flux energy to an Ising model.
//!
//! With spin `s = +1` for logic 0 the residual flux of a cell is
//! `s*phi0/2 + d`, where `d = bias + sum_j w_j s_j` collects the bias and the
//! incoming perturbations. Squaring and dividing by `2L` gives constant,
//! linear and pairwise terms; `s^2 = 1` folds the squares into the constant.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{spin_of, Assignment, CellId, Network};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsingModel {
    names: Vec<String>,
    h: BTreeMap<CellId, f64>,
    j: BTreeMap<(CellId, CellId), f64>,
    constant: f64,
}

impl IsingModel {
    /// Model over `names.len()` spins with no fields or couplings.
    pub fn new(names: Vec<String>) -> Self {
        IsingModel {
            names,
            h: BTreeMap::new(),
            j: BTreeMap::new(),
            constant: 0.0,
        }
    }

    pub fn num_spins(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn field(&self, id: CellId) -> f64 {
        self.h.get(&id).copied().unwrap_or(0.0)
    }

    pub fn fields(&self) -> &BTreeMap<CellId, f64> {
        &self.h
    }

    /// Pair couplings keyed with the smaller id first.
    pub fn couplings(&self) -> &BTreeMap<(CellId, CellId), f64> {
        &self.j
    }

    pub fn coupling(&self, a: CellId, b: CellId) -> f64 {
        self.j.get(&ordered(a, b)).copied().unwrap_or(0.0)
    }

    pub fn add_constant(&mut self, v: f64) {
        self.constant += v;
    }

    pub fn add_field(&mut self, id: CellId, v: f64) {
        *self.h.entry(id).or_insert(0.0) += v;
    }

    pub fn add_coupling(&mut self, a: CellId, b: CellId, v: f64) -> Result<()> {
        if a == b {
            return Err(Error::InvalidValue(format!(
                "self-pair {a} in Ising coupling"
            )));
        }
        *self.j.entry(ordered(a, b)).or_insert(0.0) += v;
        Ok(())
    }

    /// `constant + sum h_i s_i + sum_{i<j} J_ij s_i s_j`.
    pub fn energy(&self, a: &Assignment) -> Result<f64> {
        if a.len() != self.names.len() {
            return Err(Error::AssignmentSize {
                expected: self.names.len(),
                got: a.len(),
            });
        }
        Ok(self.energy_bits(&a.to_bits()))
    }

    pub(crate) fn energy_bits(&self, bits: &[bool]) -> f64 {
        let mut e = self.constant;
        for (&i, &h) in &self.h {
            e += h * spin_of(bits[i.0]);
        }
        for (&(i, k), &j) in &self.j {
            e += j * spin_of(bits[i.0]) * spin_of(bits[k.0]);
        }
        e
    }
}

fn ordered(a: CellId, b: CellId) -> (CellId, CellId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Expands the quadratic network energy into Ising form.
///
/// Clamps are not folded in: the model ranges over every cell, and an
/// assignment that honors the clamps evaluates to the same energy.
pub fn to_ising(net: &Network) -> IsingModel {
    let phi0 = net.constants().phi0;
    let mut m = IsingModel::new(net.cells().iter().map(|c| c.name().to_string()).collect());
    for c in net.cell_ids() {
        let cell = net.cell(c).expect("own id");
        let scale = 1.0 / (2.0 * cell.inductance());
        let b = cell.bias();
        let incoming: Vec<(CellId, f64)> =
            net.incoming(c).map(|k| (k.source, k.strength)).collect();

        // (s phi0/2)^2 and the d^2 squares that do not depend on spins.
        let mut constant = phi0 * phi0 / 4.0 + b * b;
        for &(_, w) in &incoming {
            constant += w * w;
        }
        m.add_constant(constant * scale);

        // s_c * phi0 * d
        m.add_field(c, phi0 * b * scale);
        for &(src, w) in &incoming {
            m.add_coupling(c, src, phi0 * w * scale)
                .expect("no self-couplings");
        }

        // cross terms of d^2
        for &(src, w) in &incoming {
            m.add_field(src, 2.0 * b * w * scale);
        }
        for (x, &(sx, wx)) in incoming.iter().enumerate() {
            for &(sy, wy) in &incoming[x + 1..] {
                m.add_coupling(sx, sy, 2.0 * wx * wy * scale)
                    .expect("merged couplings have distinct sources");
            }
        }
    }
    m
}

/// Energy of `a` under `m`; see [`IsingModel::energy`].
pub fn ising_energy(m: &IsingModel, a: &Assignment) -> Result<f64> {
    m.energy(a)
}

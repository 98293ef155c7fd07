//! Test oracles written from the energy definitions, independent of the
//! library's evaluators, plus random instance generators.
#![allow(dead_code)]

use fluxlogic::{Assignment, CellId, CnfFormula, Logic, Model, Network};
use rand::seq::SliceRandom;
use rand::Rng;

/// Network energy from the public cell and coupling data.
pub fn oracle_energy(net: &Network, bits: &[bool], model: Model) -> f64 {
    let phi0 = net.constants().phi0;
    let tol = net.tolerance();
    let value = |i: usize| match net.cells()[i].clamp() {
        Some(v) => v == Logic::One,
        None => bits[i],
    };
    let mut flux: Vec<f64> = net.cells().iter().map(|c| phi0 / 2.0 + c.bias()).collect();
    for k in net.couplings() {
        let spin = if value(k.source.0) { -1.0 } else { 1.0 };
        flux[k.target.0] += k.strength * spin;
    }
    let mut total = 0.0;
    for (i, cell) in net.cells().iter().enumerate() {
        let n = if value(i) { 1.0 } else { 0.0 };
        total += match model {
            Model::Quadratic => (flux[i] - n * phi0).powi(2) / (2.0 * cell.inductance()),
            Model::Mismatch => {
                let e0 = flux[i].powi(2);
                let e1 = (flux[i] - phi0).powi(2);
                let tie = (flux[i] - phi0 / 2.0).abs() <= tol;
                let locally_optimal = tie || if value(i) { e1 < e0 } else { e0 < e1 };
                let mismatch = if locally_optimal { 0.0 } else { 1.0 };
                let penalty = match cell.penalty() {
                    Some(p) if (p.favored == Logic::One) != value(i) => p.amount,
                    _ => 0.0,
                };
                mismatch + penalty
            }
        };
    }
    total
}

/// Every assignment of the free cells, clamped cells at their clamp.
pub fn all_states(net: &Network) -> Vec<Vec<bool>> {
    let free = net.free_cells();
    let base: Vec<bool> = net
        .cells()
        .iter()
        .map(|c| c.clamp() == Some(Logic::One))
        .collect();
    (0u64..1 << free.len())
        .map(|m| {
            let mut s = base.clone();
            for (k, id) in free.iter().enumerate() {
                s[id.0] = (m >> k) & 1 == 1;
            }
            s
        })
        .collect()
}

/// Brute-force minimum and the sorted set of minimizing states.
pub fn brute_ground(net: &Network, model: Model, tol: f64) -> (f64, Vec<Vec<bool>>) {
    let states = all_states(net);
    let energies: Vec<f64> = states
        .iter()
        .map(|s| oracle_energy(net, s, model))
        .collect();
    let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut ground: Vec<Vec<bool>> = states
        .into_iter()
        .zip(&energies)
        .filter(|(_, &e)| e <= min + tol)
        .map(|(s, _)| s)
        .collect();
    ground.sort();
    (min, ground)
}

pub fn bits_of(a: &Assignment) -> Vec<bool> {
    a.to_bits()
}

/// Options for [`random_network`].
#[derive(Debug, Clone, Copy)]
pub struct NetSpec {
    pub cells: usize,
    pub max_incoming: usize,
    pub bias: f64,
    pub min_strength: f64,
    pub max_strength: f64,
    pub clamp_prob: f64,
    pub penalty_prob: f64,
}

impl NetSpec {
    /// Biases in (-0.3, 0.3), couplings in (0, 0.15), up to 3 sources.
    pub fn standard(cells: usize) -> Self {
        NetSpec {
            cells,
            max_incoming: 3,
            bias: 0.3,
            min_strength: 0.0,
            max_strength: 0.15,
            clamp_prob: 0.0,
            penalty_prob: 0.0,
        }
    }
}

fn open_interval<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    loop {
        let x = rng.random_range(lo..hi);
        if x > lo {
            return x;
        }
    }
}

pub fn random_network<R: Rng>(rng: &mut R, spec: NetSpec) -> Network {
    let mut net = Network::new();
    let ids: Vec<CellId> = (0..spec.cells)
        .map(|i| {
            let b = open_interval(rng, -spec.bias, spec.bias);
            net.add_cell(format!("c{i}"), b).unwrap()
        })
        .collect();
    for &t in &ids {
        let k = rng.random_range(0..=spec.max_incoming.min(spec.cells - 1));
        let mut others: Vec<CellId> = ids.iter().copied().filter(|&s| s != t).collect();
        others.shuffle(rng);
        for &s in others.iter().take(k) {
            let w = open_interval(rng, spec.min_strength, spec.max_strength);
            net.couple(s, t, w).unwrap();
        }
        if rng.random_bool(spec.clamp_prob) {
            net.set_clamp(t, Some(Logic::from_bit(rng.random_bool(0.5))))
                .unwrap();
        }
        if rng.random_bool(spec.penalty_prob) {
            let favored = Logic::from_bit(rng.random_bool(0.5));
            let amount = rng.random_range(0.1..0.9);
            net.set_penalty(t, Some(fluxlogic::Penalty { favored, amount }))
                .unwrap();
        }
    }
    net
}

pub fn random_state<R: Rng>(rng: &mut R, net: &Network) -> Assignment {
    let bits: Vec<bool> = (0..net.len()).map(|_| rng.random_bool(0.5)).collect();
    Assignment::from_bits(&bits)
}

/// Random 3-CNF as DIMACS clauses; clause widths 1 to 3.
pub fn random_cnf<R: Rng>(
    rng: &mut R,
    max_vars: usize,
    max_clauses: usize,
) -> (usize, Vec<Vec<i64>>) {
    let n = rng.random_range(1..=max_vars);
    let m = rng.random_range(1..=max_clauses);
    let clauses = (0..m)
        .map(|_| {
            let width = if rng.random_bool(0.8) {
                3
            } else {
                rng.random_range(1..=2)
            };
            (0..width)
                .map(|_| {
                    let v = rng.random_range(1..=n) as i64;
                    if rng.random_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    (n, clauses)
}

fn holds(clause: &[i64], values: &[bool]) -> bool {
    clause
        .iter()
        .any(|&l| values[l.unsigned_abs() as usize - 1] == (l > 0))
}

/// Minimum number of violated clauses over all assignments.
pub fn brute_min_violated(n: usize, clauses: &[Vec<i64>]) -> usize {
    (0u32..1 << n)
        .map(|m| {
            let values: Vec<bool> = (0..n).map(|k| (m >> k) & 1 == 1).collect();
            clauses.iter().filter(|c| !holds(c, &values)).count()
        })
        .min()
        .unwrap()
}

/// Plain DPLL with unit propagation.
pub fn dpll(n: usize, clauses: &[Vec<i64>]) -> Option<Vec<bool>> {
    fn go(clauses: &[Vec<i64>], assign: &mut Vec<Option<bool>>) -> bool {
        let mut forced = Vec::new();
        loop {
            let mut changed = false;
            for c in clauses {
                let mut open = None;
                let mut open_count = 0;
                let mut sat = false;
                for &l in c {
                    match assign[l.unsigned_abs() as usize - 1] {
                        Some(v) if v == (l > 0) => {
                            sat = true;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            open = Some(l);
                            open_count += 1;
                        }
                    }
                }
                if sat {
                    continue;
                }
                match (open_count, open) {
                    (0, _) => {
                        for v in forced {
                            assign[v] = None;
                        }
                        return false;
                    }
                    (1, Some(l)) => {
                        let v = l.unsigned_abs() as usize - 1;
                        if assign[v].is_none() {
                            assign[v] = Some(l > 0);
                            forced.push(v);
                            changed = true;
                        }
                    }
                    _ => {}
                }
            }
            if !changed {
                break;
            }
        }
        let Some(v) = assign.iter().position(|a| a.is_none()) else {
            return true;
        };
        for choice in [false, true] {
            assign[v] = Some(choice);
            if go(clauses, assign) {
                return true;
            }
        }
        assign[v] = None;
        for v in forced {
            assign[v] = None;
        }
        false
    }
    let mut assign = vec![None; n];
    go(clauses, &mut assign).then(|| assign.into_iter().map(|a| a.unwrap_or(false)).collect())
}

pub fn cnf(n: usize, clauses: &[Vec<i64>]) -> CnfFormula {
    CnfFormula::new(n, clauses).unwrap()
}

pub fn satisfies(clauses: &[Vec<i64>], values: &[bool]) -> bool {
    clauses.iter().all(|c| holds(c, values))
}

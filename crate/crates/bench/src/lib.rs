//! Deterministic workloads shared by the benchmarks.

use fluxlogic::gates::{self, add_input_cell, GateParams};
use fluxlogic::{CellId, CnfFormula, Network};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A chain of `n` coupled cells with random biases: one component.
pub fn chain(n: usize, seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = Network::new();
    let mut prev: Option<CellId> = None;
    for i in 0..n {
        let c = net
            .add_cell(format!("c{i}"), rng.random_range(-0.2..0.2))
            .expect("valid cell");
        if let Some(p) = prev {
            net.couple(p, c, rng.random_range(0.01..0.15))
                .expect("distinct cells");
        }
        prev = Some(c);
    }
    net
}

/// `copies` disjoint NAND/NOR gates with free inputs.
pub fn nand_nor_bank(copies: usize) -> Network {
    let p = GateParams::default();
    let mut net = Network::new();
    for _ in 0..copies {
        let a = add_input_cell(&mut net);
        let b = add_input_cell(&mut net);
        gates::nand_nor(&mut net, a, b, &p).expect("default parameters");
    }
    net
}

/// Random 3-CNF with `vars` variables and `clauses` three-literal clauses.
pub fn random_3cnf(vars: usize, clauses: usize, seed: u64) -> CnfFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cs: Vec<Vec<i64>> = (0..clauses)
        .map(|_| {
            (0..3)
                .map(|_| {
                    let v = rng.random_range(1..=vars) as i64;
                    if rng.random_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect();
    CnfFormula::new(vars, &cs).expect("literals in range")
}

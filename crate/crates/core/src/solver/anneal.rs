//! Seeded simulated annealing with single-cell Metropolis flips.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eval::Compiled;
use super::{Method, SolveResult};
use crate::error::{Error, Result};
use crate::model::{Assignment, Model, Network};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub t_initial: f64,
    pub t_final: f64,
    pub sweeps: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            t_initial: 2.0,
            t_final: 0.005,
            sweeps: 2000,
            restarts: 8,
            seed: 0,
        }
    }
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_final > 0.0 && self.t_initial >= self.t_final && self.t_initial.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "temperatures must satisfy t_initial >= t_final > 0 (got {} and {})",
                self.t_initial, self.t_final
            )));
        }
        if self.sweeps == 0 || self.restarts == 0 {
            return Err(Error::InvalidValue(
                "sweeps and restarts must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Geometric temperature for sweep `k`.
    pub fn temperature(&self, k: usize) -> f64 {
        if self.sweeps == 1 {
            return self.t_final;
        }
        let frac = k as f64 / (self.sweeps - 1) as f64;
        self.t_initial * (self.t_final / self.t_initial).powf(frac)
    }
}

/// Anneals on the global rayon pool.
pub fn anneal(net: &Network, model: Model, schedule: &AnnealSchedule) -> Result<SolveResult> {
    schedule.validate()?;
    let compiled = Compiled::new(net, model);
    let runs: Vec<(f64, Vec<bool>)> = (0..schedule.restarts)
        .into_par_iter()
        .map(|r| run(&compiled, schedule, r))
        .collect();
    finish(net, model, &compiled, runs)
}

/// Anneals on a dedicated pool of `workers` threads. Results do not depend
/// on `workers`.
pub fn anneal_with_workers(
    net: &Network,
    model: Model,
    schedule: &AnnealSchedule,
    workers: usize,
) -> Result<SolveResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidValue(format!("thread pool: {e}")))?;
    pool.install(|| anneal(net, model, schedule))
}

/// One restart. Its random stream depends only on the master seed and the
/// restart index.
fn run(compiled: &Compiled, schedule: &AnnealSchedule, restart: usize) -> (f64, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    rng.set_stream(restart as u64);
    let free: Vec<usize> = (0..compiled.len())
        .filter(|&c| compiled.clamp[c].is_none())
        .collect();
    let mut state = compiled.base_state();
    for &c in &free {
        state[c] = rng.random_bool(0.5);
    }
    let mut energy = compiled.energy(&state);
    let mut best = (energy, state.clone());
    if free.is_empty() {
        return best;
    }
    for k in 0..schedule.sweeps {
        let beta = 1.0 / schedule.temperature(k);
        for _ in 0..free.len() {
            let c = free[rng.random_range(0..free.len())];
            let delta = compiled.flip_delta(&mut state, c);
            if delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp() {
                state[c] = !state[c];
                energy += delta;
                if energy < best.0 - 1e-12 {
                    best = (energy, state.clone());
                }
            }
        }
        // drop accumulated round-off once per sweep
        energy = compiled.energy(&state);
    }
    best.0 = compiled.energy(&best.1);
    best
}

fn finish(
    net: &Network,
    model: Model,
    compiled: &Compiled,
    runs: Vec<(f64, Vec<bool>)>,
) -> Result<SolveResult> {
    let zeros = compiled.base_state();
    let mut best = (compiled.energy(&zeros), zeros);
    for (e, s) in runs {
        if e < best.0 {
            best = (e, s);
        }
    }
    let a = Assignment::from_bits(&best.1);
    Ok(SolveResult {
        method: Method::Anneal,
        certified: false,
        min_energy: net.energy(&a, model)?,
        ground_states: vec![a],
        degeneracy: None,
        gap: None,
        truncated: false,
    })
}

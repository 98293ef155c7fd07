//! Exhaustive ground-state enumeration.
//!
//! Free cells are split into independent components: two free cells share a
//! component when some cell's energy depends on both (the cell itself or one
//! of its sources). Each component is enumerated on its own with a Gray-code
//! walk, and the component minima add up. Optionally a set of cut cells is
//! enumerated in an outer loop, which separates networks whose components
//! only meet at those cells.

use rayon::prelude::*;

use super::eval::Compiled;
use super::{Method, SolveResult};
use crate::error::{Error, Result};
use crate::model::{Assignment, CellId, Model, Network, DEFAULT_TOLERANCE};

/// Largest component the enumerator accepts regardless of options.
pub const HARD_LIMIT: usize = 40;

const BLOCK_BITS: usize = 14;
const CUT_CHUNK: usize = 1 << 10;

#[derive(Debug, Clone)]
pub struct ExactOptions {
    /// Maximum free cells per enumerated component (and in the cut set).
    pub max_free_cells: usize,
    /// Absolute energy tolerance for degeneracy.
    pub tolerance: f64,
    /// Cells enumerated in the outer loop.
    pub condition_on: Vec<CellId>,
    /// Cap on materialized ground states; counts stay exact.
    pub max_listed: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            max_free_cells: 24,
            tolerance: DEFAULT_TOLERANCE,
            condition_on: Vec::new(),
            max_listed: 1 << 16,
        }
    }
}

impl ExactOptions {
    pub fn with_limit(max_free_cells: usize) -> Self {
        ExactOptions {
            max_free_cells,
            ..ExactOptions::default()
        }
    }
}

/// Minimum level, ground entries, and the next level above it.
///
/// Each entry carries a weight (the number of states it stands for);
/// `count` sums the weights and `entries` counts entries, listed or not.
#[derive(Debug, Clone)]
struct Levels<T> {
    min: f64,
    grounds: Vec<(T, f64, u128)>,
    count: u128,
    entries: u128,
    excited: f64,
}

impl<T> Levels<T> {
    fn empty() -> Self {
        Levels {
            min: f64::INFINITY,
            grounds: Vec::new(),
            count: 0,
            entries: 0,
            excited: f64::INFINITY,
        }
    }

    fn push(&mut self, item: T, e: f64, weight: u128, tol: f64, cap: usize) {
        if e < self.min - tol {
            self.excited = self.excited.min(self.min);
            self.min = e;
            self.grounds.clear();
            self.grounds.push((item, e, weight));
            self.count = weight;
            self.entries = 1;
        } else if e <= self.min + tol {
            if e < self.min {
                self.min = e;
                self.prune(tol);
            }
            self.count = self.count.saturating_add(weight);
            self.entries += 1;
            if self.grounds.len() < cap {
                self.grounds.push((item, e, weight));
            }
        } else {
            self.excited = self.excited.min(e);
        }
    }

    fn prune(&mut self, tol: f64) {
        let limit = self.min + tol;
        let mut excited = self.excited;
        let mut removed_weight = 0u128;
        let mut removed = 0u128;
        self.grounds.retain(|&(_, e, w)| {
            if e > limit {
                excited = excited.min(e);
                removed_weight = removed_weight.saturating_add(w);
                removed += 1;
                false
            } else {
                true
            }
        });
        self.excited = excited;
        self.count = self.count.saturating_sub(removed_weight);
        self.entries = self.entries.saturating_sub(removed);
    }

    fn merge(mut self, mut other: Levels<T>, tol: f64, cap: usize) -> Self {
        if other.entries == 0 {
            return self;
        }
        if self.entries == 0 {
            return other;
        }
        let min = self.min.min(other.min);
        let mut out = Levels {
            min,
            grounds: Vec::new(),
            count: 0,
            entries: 0,
            excited: self.excited.min(other.excited),
        };
        for side in [&mut self, &mut other] {
            if side.min > min + tol {
                out.excited = out.excited.min(side.min);
                continue;
            }
            side.min = min;
            side.prune(tol);
            out.excited = out.excited.min(side.excited);
            out.count = out.count.saturating_add(side.count);
            out.entries += side.entries;
            for g in side.grounds.drain(..) {
                if out.grounds.len() < cap {
                    out.grounds.push(g);
                }
            }
        }
        out
    }

    fn truncated(&self) -> bool {
        (self.grounds.len() as u128) < self.entries
    }
}

struct Component {
    cells: Vec<usize>,
    terms: Vec<usize>,
}

struct Plan {
    compiled: Compiled,
    cut: Vec<usize>,
    components: Vec<Component>,
    constant_terms: Vec<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn plan(net: &Network, model: Model, opts: &ExactOptions) -> Result<Plan> {
    let compiled = Compiled::new(net, model);
    let n = compiled.len();
    let limit = opts.max_free_cells.min(HARD_LIMIT);

    let mut is_cut = vec![false; n];
    for id in &opts.condition_on {
        net.cell(*id)?;
        if compiled.clamp[id.0].is_none() {
            is_cut[id.0] = true;
        }
    }
    let cut: Vec<usize> = (0..n).filter(|&c| is_cut[c]).collect();
    if cut.len() > limit {
        return Err(Error::OverLimit {
            free: cut.len(),
            limit,
        });
    }

    let enumerated = |c: usize| compiled.clamp[c].is_none() && !is_cut[c];
    let mut parent: Vec<usize> = (0..n).collect();
    let mut involved_root = vec![None; n];
    for (c, root) in involved_root.iter_mut().enumerate() {
        let mut first = None;
        for x in std::iter::once(c).chain(compiled.sources(c)) {
            if !enumerated(x) {
                continue;
            }
            match first {
                None => first = Some(x),
                Some(f) => {
                    let (a, b) = (find(&mut parent, f), find(&mut parent, x));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        *root = first;
    }

    let mut index_of_root = vec![usize::MAX; n];
    let mut components: Vec<Component> = Vec::new();
    for c in (0..n).filter(|&c| enumerated(c)) {
        let r = find(&mut parent, c);
        if index_of_root[r] == usize::MAX {
            index_of_root[r] = components.len();
            components.push(Component {
                cells: Vec::new(),
                terms: Vec::new(),
            });
        }
        components[index_of_root[r]].cells.push(c);
    }
    let mut constant_terms = Vec::new();
    for (c, root) in involved_root.iter().enumerate() {
        match *root {
            Some(x) => {
                let r = find(&mut parent, x);
                components[index_of_root[r]].terms.push(c);
            }
            None => constant_terms.push(c),
        }
    }
    if let Some(big) = components.iter().map(|c| c.cells.len()).max() {
        if big > limit {
            return Err(Error::OverLimit { free: big, limit });
        }
    }
    Ok(Plan {
        compiled,
        cut,
        components,
        constant_terms,
    })
}

/// Bit `k-1-i` of a component mask holds `cells[i]`, so numeric order of
/// masks is lexicographic order by cell id.
fn set_bits(state: &mut [bool], cells: &[usize], mask: u64) {
    let k = cells.len();
    for (i, &c) in cells.iter().enumerate() {
        state[c] = (mask >> (k - 1 - i)) & 1 == 1;
    }
}

fn enumerate_block(
    compiled: &Compiled,
    comp: &Component,
    base: &[bool],
    high: u64,
    low_bits: usize,
    tol: f64,
    cap: usize,
) -> Levels<u64> {
    let k = comp.cells.len();
    let mut state = base.to_vec();
    let mut mask = high << low_bits;
    set_bits(&mut state, &comp.cells, mask);
    let mut e: f64 = comp
        .terms
        .iter()
        .map(|&t| compiled.cell_energy(&state, t))
        .sum();
    let mut levels = Levels::empty();
    levels.push(mask, e, 1, tol, cap);
    for t in 1u64..(1u64 << low_bits) {
        let pos = t.trailing_zeros() as usize;
        let cell = comp.cells[k - 1 - pos];
        e += compiled.flip_delta(&mut state, cell);
        state[cell] = !state[cell];
        mask ^= 1 << pos;
        levels.push(mask, e, 1, tol, cap);
    }
    levels
}

fn enumerate_component(
    compiled: &Compiled,
    comp: &Component,
    base: &[bool],
    tol: f64,
    cap: usize,
) -> Levels<u64> {
    let k = comp.cells.len();
    if k <= BLOCK_BITS {
        return enumerate_block(compiled, comp, base, 0, k, tol, cap);
    }
    let high_bits = k - BLOCK_BITS;
    let blocks: Vec<Levels<u64>> = (0..1u64 << high_bits)
        .into_par_iter()
        .map(|b| enumerate_block(compiled, comp, base, b, BLOCK_BITS, tol, cap))
        .collect();
    blocks
        .into_iter()
        .fold(Levels::empty(), |acc, l| acc.merge(l, tol, cap))
}

/// Component levels for one assignment of the cut cells.
struct CutOutcome {
    comps: Vec<Levels<u64>>,
}

fn solve_cut(plan: &Plan, cut_mask: u64, tol: f64, cap: usize) -> (f64, u128, f64, CutOutcome) {
    let mut base = plan.compiled.base_state();
    set_bits(&mut base, &plan.cut, cut_mask);
    let mut total: f64 = plan
        .constant_terms
        .iter()
        .map(|&t| plan.compiled.cell_energy(&base, t))
        .sum();
    let mut count: u128 = 1;
    let mut best_gap = f64::INFINITY;
    let mut comps = Vec::with_capacity(plan.components.len());
    for comp in &plan.components {
        let levels = enumerate_component(&plan.compiled, comp, &base, tol, cap);
        total += levels.min;
        count = count.saturating_mul(levels.count);
        best_gap = best_gap.min(levels.excited - levels.min);
        comps.push(levels);
    }
    (total, count, total + best_gap, CutOutcome { comps })
}

/// Exact minimum-energy configurations by enumeration.
pub fn solve_exact(net: &Network, model: Model, opts: &ExactOptions) -> Result<SolveResult> {
    let plan = plan(net, model, opts)?;
    let tol = opts.tolerance;
    let cap = opts.max_listed.max(1);

    let cut_states = 1u64 << plan.cut.len();
    let mut levels: Levels<(u64, CutOutcome)> = Levels::empty();
    let mut start = 0u64;
    while start < cut_states {
        let end = (start + CUT_CHUNK as u64).min(cut_states);
        let chunk: Vec<_> = (start..end)
            .into_par_iter()
            .map(|m| (m, solve_cut(&plan, m, tol, cap)))
            .collect();
        for (m, (total, count, excited, outcome)) in chunk {
            levels.excited = levels.excited.min(excited);
            levels.push((m, outcome), total, count, tol, cap);
        }
        start = end;
    }

    let mut truncated = levels.truncated();
    let mut grounds: Vec<Assignment> = Vec::new();
    let mut cuts = levels.grounds;
    cuts.sort_by_key(|((m, _), _, _)| *m);
    'outer: for ((m, outcome), _, _) in &cuts {
        let mut base = plan.compiled.base_state();
        set_bits(&mut base, &plan.cut, *m);
        truncated |= outcome.comps.iter().any(Levels::truncated);
        let mut idx = vec![0usize; outcome.comps.len()];
        loop {
            if grounds.len() >= cap {
                truncated = true;
                break 'outer;
            }
            let mut state = base.clone();
            for (ci, comp) in plan.components.iter().enumerate() {
                set_bits(
                    &mut state,
                    &comp.cells,
                    outcome.comps[ci].grounds[idx[ci]].0,
                );
            }
            grounds.push(Assignment::from_bits(&state));
            // odometer over component ground lists
            let mut k = outcome.comps.len();
            loop {
                if k == 0 {
                    continue 'outer;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < outcome.comps[k].grounds.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
    grounds.sort();

    let min_energy = net.energy(&grounds[0], model)?;
    let gap = if levels.excited.is_finite() {
        (levels.excited - levels.min).max(0.0)
    } else {
        0.0
    };
    Ok(SolveResult {
        method: Method::Exact,
        certified: true,
        min_energy,
        ground_states: grounds,
        degeneracy: Some(levels.count),
        gap: Some(gap),
        truncated,
    })
}

/// Minimum energy over all configurations, evaluated state by state.
///
/// Reference path for tests and small networks; no decomposition.
pub fn brute_force_min(net: &Network, model: Model) -> Result<f64> {
    let free = net.free_cells();
    if free.len() > 24 {
        return Err(Error::OverLimit {
            free: free.len(),
            limit: 24,
        });
    }
    let mut best = f64::INFINITY;
    let mut a = Assignment::zeros(net);
    for mask in 0u64..(1 << free.len()) {
        for (i, &c) in free.iter().enumerate() {
            a.set(c, crate::model::Logic::from_bit((mask >> i) & 1 == 1));
        }
        best = best.min(net.energy(&a, model)?);
    }
    Ok(best)
}

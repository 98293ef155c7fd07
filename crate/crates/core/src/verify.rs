//! Truth tables read off ground-state manifolds, and the checks built on them.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ising::to_ising;
use crate::model::{Assignment, CellId, GateHandle, Logic, Model, Network};
use crate::solver::eval::Compiled;
use crate::solver::{solve_exact, ExactOptions};

/// An output cell's value across the ground states of one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OutputValue {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "AMBIGUOUS")]
    Ambiguous,
}

impl OutputValue {
    pub fn logic(self) -> Option<Logic> {
        match self {
            OutputValue::Zero => Some(Logic::Zero),
            OutputValue::One => Some(Logic::One),
            OutputValue::Ambiguous => None,
        }
    }
}

impl From<Logic> for OutputValue {
    fn from(v: Logic) -> Self {
        match v {
            Logic::Zero => OutputValue::Zero,
            Logic::One => OutputValue::One,
        }
    }
}

impl fmt::Display for OutputValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputValue::Zero => f.write_str("0"),
            OutputValue::One => f.write_str("1"),
            OutputValue::Ambiguous => f.write_str("AMBIGUOUS"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruthRow {
    pub inputs: Vec<Logic>,
    pub outputs: Vec<OutputValue>,
    pub min_energy: f64,
    pub degeneracy: u128,
    /// Every ground state keeps every cell's applied flux inside `(0, phi0)`,
    /// where the two-state description holds.
    pub in_regime: bool,
    /// Set by the checking functions.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Vec<Logic>>,
}

impl TruthRow {
    fn matches(&self, expected: &[Logic]) -> bool {
        self.in_regime
            && self.outputs.len() == expected.len()
            && self
                .outputs
                .iter()
                .zip(expected)
                .all(|(o, e)| o.logic() == Some(*e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruthTableReport {
    pub model: Model,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub rows: Vec<TruthRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    /// Row indices that disagree with the expected function.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failing_rows: Vec<usize>,
}

impl TruthTableReport {
    pub fn row_outputs(&self) -> Vec<Vec<OutputValue>> {
        self.rows.iter().map(|r| r.outputs.clone()).collect()
    }

    pub fn has_ambiguous(&self) -> bool {
        self.rows
            .iter()
            .any(|r| r.outputs.contains(&OutputValue::Ambiguous))
    }
}

/// Input values of row `r` for `k` inputs; the first input is the most
/// significant bit.
pub fn row_inputs(r: usize, k: usize) -> Vec<Logic> {
    (0..k)
        .map(|j| Logic::from_bit((r >> (k - 1 - j)) & 1 == 1))
        .collect()
}

/// Clamps each input row, solves exactly, and projects onto `outputs`.
pub fn truth_table(
    net: &Network,
    inputs: &[CellId],
    outputs: &[CellId],
    model: Model,
    opts: &ExactOptions,
) -> Result<TruthTableReport> {
    for &id in inputs.iter().chain(outputs) {
        net.cell(id)?;
    }
    let k = inputs.len();
    if k > 20 {
        return Err(Error::InvalidValue(format!(
            "{k} inputs give too many rows"
        )));
    }
    let rows = (0..1usize << k)
        .into_par_iter()
        .map(|r| solve_row(net, inputs, outputs, model, opts, row_inputs(r, k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TruthTableReport {
        model,
        inputs: inputs.iter().map(|&i| net.name(i).to_string()).collect(),
        outputs: outputs.iter().map(|&o| net.name(o).to_string()).collect(),
        rows,
        passed: None,
        failing_rows: Vec::new(),
    })
}

fn solve_row(
    net: &Network,
    inputs: &[CellId],
    outputs: &[CellId],
    model: Model,
    opts: &ExactOptions,
    values: Vec<Logic>,
) -> Result<TruthRow> {
    let clamps: Vec<(CellId, Logic)> = inputs.iter().copied().zip(values.iter().copied()).collect();
    let clamped = net.with_clamps(&clamps)?;
    let result = solve_exact(&clamped, model, opts)?;
    let outputs = outputs
        .iter()
        .map(|&o| {
            let first = clamped.value(&result.ground_states[0], o);
            let agree = result
                .ground_states
                .iter()
                .all(|g| clamped.value(g, o) == first);
            if agree && !result.truncated {
                first.into()
            } else {
                OutputValue::Ambiguous
            }
        })
        .collect();
    let in_regime = result
        .ground_states
        .iter()
        .all(|g| in_flux_regime(&clamped, g));
    Ok(TruthRow {
        inputs: values,
        outputs,
        min_energy: result.min_energy,
        degeneracy: result.degeneracy.unwrap_or(0),
        in_regime,
        expected: None,
    })
}

/// True when every cell's applied flux lies strictly inside `(0, phi0)`.
pub fn in_flux_regime(net: &Network, a: &Assignment) -> bool {
    let phi0 = net.constants().phi0;
    let tol = net.tolerance();
    net.cell_ids().all(|c| {
        let f = net.applied_flux(a, c).expect("ids from the network");
        f > tol && f < phi0 - tol
    })
}

/// Named Boolean functions for gate checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoolFn {
    Buf,
    Not,
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
}

impl BoolFn {
    pub fn eval(self, xs: &[bool]) -> bool {
        let and = xs.iter().all(|&x| x);
        let or = xs.iter().any(|&x| x);
        let parity = xs.iter().filter(|&&x| x).count() % 2 == 1;
        match self {
            BoolFn::Buf => xs[0],
            BoolFn::Not => !xs[0],
            BoolFn::And => and,
            BoolFn::Or => or,
            BoolFn::Nand => !and,
            BoolFn::Nor => !or,
            BoolFn::Xor => parity,
            BoolFn::Xnor => !parity,
        }
    }
}

impl FromStr for BoolFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "buf" | "id" | "wire" => BoolFn::Buf,
            "not" | "inv" => BoolFn::Not,
            "and" | "sand" => BoolFn::And,
            "or" => BoolFn::Or,
            "nand" => BoolFn::Nand,
            "nor" => BoolFn::Nor,
            "xor" => BoolFn::Xor,
            "xnor" => BoolFn::Xnor,
            other => return Err(Error::InvalidValue(format!("unknown function `{other}`"))),
        })
    }
}

/// Truth table plus a pass/fail verdict against `expected`, which maps an
/// input row to the expected output values.
pub fn check_function<F>(
    net: &Network,
    inputs: &[CellId],
    outputs: &[CellId],
    expected: F,
    model: Model,
    opts: &ExactOptions,
) -> Result<TruthTableReport>
where
    F: Fn(&[bool]) -> Vec<bool>,
{
    let mut report = truth_table(net, inputs, outputs, model, opts)?;
    for (r, row) in report.rows.iter_mut().enumerate() {
        let xs: Vec<bool> = row.inputs.iter().map(|v| v.bit()).collect();
        let want: Vec<Logic> = expected(&xs).into_iter().map(Logic::from_bit).collect();
        if !row.matches(&want) {
            report.failing_rows.push(r);
        }
        row.expected = Some(want);
    }
    report.passed = Some(report.failing_rows.is_empty());
    Ok(report)
}

/// Checks a gate's outputs against one function per output.
pub fn check_gate(
    net: &Network,
    handle: &GateHandle,
    expected: &[BoolFn],
    model: Model,
    opts: &ExactOptions,
) -> Result<TruthTableReport> {
    if expected.len() != handle.outputs.len() {
        return Err(Error::InvalidValue(format!(
            "{} expected functions for {} outputs",
            expected.len(),
            handle.outputs.len()
        )));
    }
    check_function(
        net,
        &handle.inputs,
        &handle.outputs,
        |xs| expected.iter().map(|f| f.eval(xs)).collect(),
        model,
        opts,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdcReport {
    pub free_inputs: usize,
    pub expected_degeneracy: u128,
    pub degeneracy: u128,
    pub gap: f64,
    pub passed: bool,
}

/// Energy-degeneracy conservation: exactly `2^k` ground states separated
/// from the next level by a positive gap.
pub fn check_edc(net: &Network, k: usize, model: Model, opts: &ExactOptions) -> Result<EdcReport> {
    let r = solve_exact(net, model, opts)?;
    let expected = 1u128 << k;
    let degeneracy = r.degeneracy.unwrap_or(0);
    let gap = r.gap.unwrap_or(0.0);
    Ok(EdcReport {
        free_inputs: k,
        expected_degeneracy: expected,
        degeneracy,
        gap,
        passed: degeneracy == expected && gap > opts.tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsingEquivalenceReport {
    pub trials: usize,
    pub states_compared: u64,
    pub max_discrepancy: f64,
    pub argmin_equal: bool,
    pub passed: bool,
}

/// Compares the quadratic flux energy with its Ising reduction on `trials`
/// random assignments and on every free-cell configuration, and compares
/// the two ground-state sets.
pub fn check_ising_equivalence(
    net: &Network,
    trials: usize,
    seed: u64,
    opts: &ExactOptions,
) -> Result<IsingEquivalenceReport> {
    let free = net.free_cells();
    let limit = opts.max_free_cells.min(crate::solver::HARD_LIMIT);
    if free.len() > limit {
        return Err(Error::OverLimit {
            free: free.len(),
            limit,
        });
    }
    let ising = to_ising(net);
    let compiled = Compiled::new(net, Model::Quadratic);
    let tol = opts.tolerance;
    let mut max_discrepancy = 0.0f64;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = compiled.base_state();
    for _ in 0..trials {
        for &c in &free {
            state[c.0] = rng.random_bool(0.5);
        }
        let d = (compiled.energy(&state) - ising.energy_bits(&state)).abs();
        max_discrepancy = max_discrepancy.max(d);
    }

    let total = 1u64 << free.len();
    let energies: Vec<(f64, f64)> = (0..total)
        .into_par_iter()
        .map(|mask| {
            let mut s = compiled.base_state();
            for (i, c) in free.iter().enumerate() {
                s[c.0] = (mask >> i) & 1 == 1;
            }
            (compiled.energy(&s), ising.energy_bits(&s))
        })
        .collect();
    let mut flux_min = f64::INFINITY;
    let mut ising_min = f64::INFINITY;
    for &(f, i) in &energies {
        max_discrepancy = max_discrepancy.max((f - i).abs());
        flux_min = flux_min.min(f);
        ising_min = ising_min.min(i);
    }
    let argmin_equal = energies
        .iter()
        .all(|&(f, i)| (f <= flux_min + tol) == (i <= ising_min + tol));
    Ok(IsingEquivalenceReport {
        trials,
        states_compared: total,
        max_discrepancy,
        argmin_equal,
        passed: argmin_equal && max_discrepancy <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{self, GateParams};

    fn opts() -> ExactOptions {
        ExactOptions::default()
    }

    #[test]
    fn nand_nor_table_both_models() {
        let mut net = Network::new();
        let a = gates::add_input_cell(&mut net);
        let b = gates::add_input_cell(&mut net);
        let g = gates::nand_nor(&mut net, a, b, &GateParams::default()).unwrap();
        for model in [Model::Quadratic, Model::Mismatch] {
            let t = truth_table(&net, &[a, b], &g.outputs, model, &opts()).unwrap();
            use OutputValue::{One, Zero};
            assert_eq!(
                t.row_outputs(),
                vec![
                    vec![One, One],
                    vec![One, Zero],
                    vec![One, Zero],
                    vec![Zero, Zero]
                ]
            );
            assert!(t.rows.iter().all(|r| r.in_regime && r.degeneracy == 1));
        }
    }

    #[test]
    fn uncoupled_cells_are_ambiguous() {
        let mut net = Network::new();
        let a = net.add_cell("a", 0.0).unwrap();
        let b = net.add_cell("b", 0.0).unwrap();
        let t = truth_table(&net, &[a], &[b], Model::Mismatch, &opts()).unwrap();
        assert!(t
            .rows
            .iter()
            .all(|r| r.outputs == vec![OutputValue::Ambiguous]));
    }

    #[test]
    fn nand_checked_against_or_fails_on_equal_inputs() {
        let mut net = Network::new();
        let a = gates::add_input_cell(&mut net);
        let b = gates::add_input_cell(&mut net);
        let g = gates::nand_nor(&mut net, a, b, &GateParams::default()).unwrap();
        let r = check_function(
            &net,
            &[a, b],
            &g.outputs[..1],
            |xs| vec![BoolFn::Or.eval(xs)],
            Model::Mismatch,
            &opts(),
        )
        .unwrap();
        assert_eq!(r.passed, Some(false));
        assert_eq!(r.failing_rows, vec![0, 3]);
    }

    #[test]
    fn window_violation_fails_quadratic_check() {
        let mut net = Network::new();
        let a = gates::add_input_cell(&mut net);
        let b = gates::add_input_cell(&mut net);
        let g = gates::nand_nor_unchecked(&mut net, a, b, 0.1, 0.3).unwrap();
        let r = check_gate(
            &net,
            &g,
            &[BoolFn::Nand, BoolFn::Nor],
            Model::Quadratic,
            &opts(),
        )
        .unwrap();
        assert_eq!(r.passed, Some(false));
        assert!(r.failing_rows.contains(&3));
    }

    #[test]
    fn edc_counts() {
        let p = GateParams::default();
        let mut net = Network::new();
        let a = gates::add_input_cell(&mut net);
        let b = gates::add_input_cell(&mut net);
        gates::sand(&mut net, a, b, &p).unwrap();
        let r = check_edc(&net, 2, Model::Mismatch, &opts()).unwrap();
        assert!(r.passed);
        assert_eq!(r.degeneracy, 4);
        gates::edl(&mut net, a, Logic::One, 0.5, Model::Mismatch).unwrap();
        let r = check_edc(&net, 2, Model::Mismatch, &opts()).unwrap();
        assert!(!r.passed);
        assert_eq!(r.degeneracy, 2);
    }

    #[test]
    fn ising_equivalence_trivial_cases() {
        let net = Network::new();
        let r = check_ising_equivalence(&net, 10, 1, &opts()).unwrap();
        assert!(r.passed);
        let mut net = Network::new();
        net.add_cell("c", 0.17).unwrap();
        let r = check_ising_equivalence(&net, 10, 1, &opts()).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn bool_fns() {
        assert!(BoolFn::Nand.eval(&[true, false]));
        assert!(!BoolFn::Nor.eval(&[true, false]));
        assert!(BoolFn::Xor.eval(&[true, false, false]));
        assert_eq!("SAND".parse::<BoolFn>().unwrap(), BoolFn::And);
        assert!("maj".parse::<BoolFn>().is_err());
    }
}

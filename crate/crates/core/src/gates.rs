//! Gate constructors.
//!
//! Every gate is a small sub-network whose ground states carry its truth
//! table. Couplings run from input cells to output heads only, so outputs
//! never act back on their inputs.
//!
//! | gate      | construction                                            |
//! |-----------|---------------------------------------------------------|
//! | inverter  | one coupling of strength `delta` per output cell        |
//! | wire      | two chained inverters                                   |
//! | NAND/NOR  | two heads biased `+d` / `-d`, each fed by both inputs   |
//! | SAND / OR | NAND / NOR head followed by an inverter                 |
//! | EDL       | bias detuning (quadratic) or value penalty (mismatch)   |
//! | DEDLU     | EDL on a decision cell favoring 0                       |
//! | 3CE       | `SAND(SAND(!l1, !l2), !l3)` followed by a DEDLU          |

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CellId, GateHandle, GateKind, Logic, Model, Network, Penalty, Role};

/// Coupling and detuning parameters shared by the gate constructors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateParams {
    /// Perturbation each input contributes to an output head.
    pub delta: f64,
    /// NAND/NOR head detuning.
    pub d_bias: f64,
    /// Default EDL strength, flux units.
    pub edl_strength: f64,
    /// DEDLU penalty in mismatch units; must stay below one gate mismatch.
    pub dedlu_strength: f64,
    /// DEDLU detuning in flux units, used by the quadratic model.
    pub dedlu_flux: f64,
}

impl Default for GateParams {
    fn default() -> Self {
        GateParams {
            delta: 0.1,
            d_bias: 0.05,
            edl_strength: 0.05,
            dedlu_strength: 0.5,
            dedlu_flux: 0.05,
        }
    }
}

impl GateParams {
    /// Parameters with the given `delta` and `d_bias`, checked against the
    /// operating window for `phi0 = 1`.
    pub fn new(delta: f64, d_bias: f64) -> Result<Self> {
        Self::with_phi0(delta, d_bias, 1.0)
    }

    pub fn with_phi0(delta: f64, d_bias: f64, phi0: f64) -> Result<Self> {
        let p = GateParams {
            delta,
            d_bias,
            ..GateParams::default()
        };
        check_window(delta, d_bias, phi0)?;
        Ok(p)
    }

    /// Full validation against a flux quantum.
    pub fn validate(&self, phi0: f64) -> Result<()> {
        check_window(self.delta, self.d_bias, phi0)?;
        let half = phi0 / 2.0;
        if !(self.edl_strength > 0.0 && self.edl_strength < half) {
            return Err(Error::InvalidParams(format!(
                "edl strength {} must lie in (0, phi0/2)",
                self.edl_strength
            )));
        }
        if !(self.dedlu_strength > 0.0 && self.dedlu_strength < 1.0) {
            return Err(Error::InvalidParams(format!(
                "dedlu strength {} must lie in (0, 1)",
                self.dedlu_strength
            )));
        }
        if !(self.dedlu_flux >= 0.0 && self.dedlu_flux < self.delta) {
            return Err(Error::InvalidParams(format!(
                "dedlu flux {} must lie in [0, delta = {})",
                self.dedlu_flux, self.delta
            )));
        }
        Ok(())
    }
}

/// Checks `D < 2*delta < phi0/2 - D` with `delta, D > 0`.
pub fn check_window(delta: f64, d_bias: f64, phi0: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "delta must be > 0, got {delta}"
        )));
    }
    if !(d_bias > 0.0 && d_bias.is_finite()) {
        return Err(Error::InvalidParams(format!("D must be > 0, got {d_bias}")));
    }
    if d_bias >= 2.0 * delta {
        return Err(Error::InvalidParams(format!(
            "D < 2*delta fails (D = {d_bias}, 2*delta = {})",
            2.0 * delta
        )));
    }
    if 2.0 * delta >= phi0 / 2.0 - d_bias {
        return Err(Error::InvalidParams(format!(
            "2*delta < phi0/2 - D fails (2*delta = {}, phi0/2 - D = {})",
            2.0 * delta,
            phi0 / 2.0 - d_bias
        )));
    }
    Ok(())
}

/// A clause literal: a variable cell and its polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Literal {
    pub cell: CellId,
    pub positive: bool,
}

impl Literal {
    pub fn pos(cell: CellId) -> Self {
        Literal {
            cell,
            positive: true,
        }
    }

    pub fn neg(cell: CellId) -> Self {
        Literal {
            cell,
            positive: false,
        }
    }
}

fn prefix(net: &Network, kind: GateKind) -> String {
    let base = format!("{}{}", kind.keyword(), net.gates().len());
    let mut candidate = base.clone();
    let mut n = 0;
    while net
        .cells()
        .iter()
        .any(|c| c.name() == candidate || c.name().starts_with(&format!("{candidate}.")))
    {
        n += 1;
        candidate = format!("{base}_{n}");
    }
    candidate
}

fn checked(net: &Network, p: &GateParams) -> Result<()> {
    p.validate(net.constants().phi0)
}

/// Adds a free, unbiased input cell.
pub fn add_input_cell(net: &mut Network) -> CellId {
    let name = net.fresh_name("in");
    let l = net.constants().default_inductance;
    net.add_cell_with(name, 0.0, l, Role::Input)
        .expect("fresh name and zero bias are valid")
}

/// Inverter driving `fanout` output cells from `input`.
pub fn inverter(
    net: &mut Network,
    input: CellId,
    fanout: usize,
    p: &GateParams,
) -> Result<GateHandle> {
    let pre = prefix(
        net,
        if fanout > 1 {
            GateKind::Fanout
        } else {
            GateKind::Inv
        },
    );
    let names = (0..fanout).map(|k| format!("{pre}.out{k}")).collect();
    inverter_named(net, input, names, p)
}

pub(crate) fn inverter_named(
    net: &mut Network,
    input: CellId,
    names: Vec<String>,
    p: &GateParams,
) -> Result<GateHandle> {
    checked(net, p)?;
    net.cell(input)?;
    if names.is_empty() {
        return Err(Error::InvalidValue("inverter fan-out must be >= 1".into()));
    }
    let kind = if names.len() > 1 {
        GateKind::Fanout
    } else {
        GateKind::Inv
    };
    let outputs = names
        .into_iter()
        .map(|name| head(net, name, 0.0, input, None, p.delta, Role::Output))
        .collect::<Result<Vec<_>>>()?;
    let handle = GateHandle {
        kind,
        inputs: vec![input],
        outputs,
        internals: vec![],
    };
    net.annotate(handle.clone())?;
    Ok(handle)
}

/// Output head fed by one or two inputs.
fn head(
    net: &mut Network,
    name: String,
    bias: f64,
    i1: CellId,
    i2: Option<CellId>,
    delta: f64,
    role: Role,
) -> Result<CellId> {
    let l = net.constants().default_inductance;
    let o = net.add_cell_with(name, bias, l, role)?;
    net.couple(i1, o, delta)?;
    if let Some(i2) = i2 {
        net.couple(i2, o, delta)?;
    }
    Ok(o)
}

/// Two chained inverters: the output copies the input.
pub fn wire(net: &mut Network, input: CellId, p: &GateParams) -> Result<GateHandle> {
    let pre = prefix(net, GateKind::Wire);
    wire_named(net, input, format!("{pre}.out"), p)
}

pub(crate) fn wire_named(
    net: &mut Network,
    input: CellId,
    out: String,
    p: &GateParams,
) -> Result<GateHandle> {
    checked(net, p)?;
    net.cell(input)?;
    let mid = head(
        net,
        format!("{out}.mid"),
        0.0,
        input,
        None,
        p.delta,
        Role::Internal,
    )?;
    let o = head(net, out, 0.0, mid, None, p.delta, Role::Output)?;
    let handle = GateHandle {
        kind: GateKind::Wire,
        inputs: vec![input],
        outputs: vec![o],
        internals: vec![mid],
    };
    net.annotate(handle.clone())?;
    Ok(handle)
}

/// NAND/NOR gate; outputs are `[nand, nor]`.
pub fn nand_nor(net: &mut Network, i1: CellId, i2: CellId, p: &GateParams) -> Result<GateHandle> {
    let pre = prefix(net, GateKind::NandNor);
    nand_nor_named(
        net,
        i1,
        i2,
        [format!("{pre}.nand"), format!("{pre}.nor")],
        p,
    )
}

pub(crate) fn nand_nor_named(
    net: &mut Network,
    i1: CellId,
    i2: CellId,
    names: [String; 2],
    p: &GateParams,
) -> Result<GateHandle> {
    checked(net, p)?;
    let handle = nand_nor_cells(net, i1, i2, names, p.delta, p.d_bias, Role::Output)?;
    net.annotate(handle.clone())?;
    Ok(handle)
}

/// NAND/NOR gate without the operating-window check.
///
/// Only `delta > 0` and the cell bias bound are enforced, so parameter pairs
/// outside the window can be studied.
pub fn nand_nor_unchecked(
    net: &mut Network,
    i1: CellId,
    i2: CellId,
    delta: f64,
    d_bias: f64,
) -> Result<GateHandle> {
    if !(delta > 0.0 && d_bias > 0.0) {
        return Err(Error::InvalidParams(format!(
            "delta and D must be > 0, got delta = {delta}, D = {d_bias}"
        )));
    }
    let pre = prefix(net, GateKind::NandNor);
    let handle = nand_nor_cells(
        net,
        i1,
        i2,
        [format!("{pre}.nand"), format!("{pre}.nor")],
        delta,
        d_bias,
        Role::Output,
    )?;
    net.annotate(handle.clone())?;
    Ok(handle)
}

fn nand_nor_cells(
    net: &mut Network,
    i1: CellId,
    i2: CellId,
    [nand_name, nor_name]: [String; 2],
    delta: f64,
    d_bias: f64,
    role: Role,
) -> Result<GateHandle> {
    net.cell(i1)?;
    net.cell(i2)?;
    let nand = head(net, nand_name, d_bias, i1, Some(i2), delta, role)?;
    let nor = head(net, nor_name, -d_bias, i1, Some(i2), delta, role)?;
    Ok(GateHandle {
        kind: GateKind::NandNor,
        inputs: vec![i1, i2],
        outputs: vec![nand, nor],
        internals: vec![],
    })
}

/// AND built as a NAND head followed by an inverter.
pub fn sand(net: &mut Network, i1: CellId, i2: CellId, p: &GateParams) -> Result<GateHandle> {
    let pre = prefix(net, GateKind::Sand);
    sand_named(net, i1, i2, format!("{pre}.out"), p)
}

pub(crate) fn sand_named(
    net: &mut Network,
    i1: CellId,
    i2: CellId,
    out: String,
    p: &GateParams,
) -> Result<GateHandle> {
    checked(net, p)?;
    let handle = inverted_head(net, i1, i2, out, p, GateKind::Sand)?;
    net.annotate(handle.clone())?;
    Ok(handle)
}

/// OR built as a NOR head followed by an inverter.
pub fn or_gate(net: &mut Network, i1: CellId, i2: CellId, p: &GateParams) -> Result<GateHandle> {
    let pre = prefix(net, GateKind::Or);
    or_named(net, i1, i2, format!("{pre}.out"), p)
}

pub(crate) fn or_named(
    net: &mut Network,
    i1: CellId,
    i2: CellId,
    out: String,
    p: &GateParams,
) -> Result<GateHandle> {
    checked(net, p)?;
    let handle = inverted_head(net, i1, i2, out, p, GateKind::Or)?;
    net.annotate(handle.clone())?;
    Ok(handle)
}

fn inverted_head(
    net: &mut Network,
    i1: CellId,
    i2: CellId,
    out: String,
    p: &GateParams,
    kind: GateKind,
) -> Result<GateHandle> {
    let pair = nand_nor_cells(
        net,
        i1,
        i2,
        [format!("{out}.nand"), format!("{out}.nor")],
        p.delta,
        p.d_bias,
        Role::Internal,
    )?;
    let driver = match kind {
        GateKind::Sand => pair.outputs[0],
        _ => pair.outputs[1],
    };
    let o = head(net, out, 0.0, driver, None, p.delta, Role::Output)?;
    Ok(GateHandle {
        kind,
        inputs: vec![i1, i2],
        outputs: vec![o],
        internals: pair.outputs,
    })
}

/// Energy degeneracy lifting on `cell`, making `favored` its preferred value.
///
/// Quadratic: shifts the bias by `+strength` (favor 1) or `-strength`
/// (favor 0); requires `0 < strength < phi0/2 - |bias|`.
/// Mismatch: charges `strength` whenever the cell holds the other value.
pub fn edl(
    net: &mut Network,
    cell: CellId,
    favored: Logic,
    strength: f64,
    model: Model,
) -> Result<()> {
    lift(net, cell, favored, strength, model)?;
    net.annotate(GateHandle {
        kind: GateKind::Edl,
        inputs: vec![],
        outputs: vec![cell],
        internals: vec![],
    })
}

fn lift(
    net: &mut Network,
    cell: CellId,
    favored: Logic,
    strength: f64,
    model: Model,
) -> Result<()> {
    let c = net.cell(cell)?.clone();
    if !(strength > 0.0 && strength.is_finite()) {
        return Err(Error::StrengthOutOfRange {
            strength,
            reason: "must be > 0".into(),
        });
    }
    match model {
        Model::Quadratic => {
            let room = net.constants().half_quantum() - c.bias().abs();
            if strength >= room {
                return Err(Error::StrengthOutOfRange {
                    strength,
                    reason: format!("must be < phi0/2 - |bias| = {room}"),
                });
            }
            let shift = if favored == Logic::One {
                strength
            } else {
                -strength
            };
            net.set_bias(cell, c.bias() + shift)
        }
        Model::Mismatch => {
            if let Some(existing) = c.penalty() {
                if existing.favored != favored {
                    return Err(Error::InvalidValue(format!(
                        "cell `{}` already favors {}",
                        c.name(),
                        existing.favored
                    )));
                }
            }
            net.set_penalty(
                cell,
                Some(Penalty {
                    favored,
                    amount: strength,
                }),
            )
        }
    }
}

/// Decision lifting: an EDL favoring 0 on a decision cell.
///
/// In the mismatch model `strength` must stay below 1 so that breaking a
/// gate never costs less than paying the decision penalty.
pub fn dedlu(net: &mut Network, decision: CellId, strength: f64, model: Model) -> Result<()> {
    dedlu_lift(net, decision, strength, model)?;
    net.annotate(GateHandle {
        kind: GateKind::Dedlu,
        inputs: vec![],
        outputs: vec![decision],
        internals: vec![],
    })
}

fn dedlu_lift(net: &mut Network, decision: CellId, strength: f64, model: Model) -> Result<()> {
    if model == Model::Mismatch && strength >= 1.0 {
        return Err(Error::StrengthOutOfRange {
            strength,
            reason: "mismatch-model decision penalty must be < 1".into(),
        });
    }
    lift(net, decision, Logic::Zero, strength, model)
}

/// Three-literal clause evaluator; the output is the violation cell.
///
/// Negated literals come from inverters on positive literals; a negative
/// literal feeds its variable cell directly. The violation cell carries a
/// DEDLU with `p.dedlu_strength` (mismatch) and, when nonzero,
/// `p.dedlu_flux` (quadratic detuning).
pub fn three_ce(net: &mut Network, lits: [Literal; 3], p: &GateParams) -> Result<GateHandle> {
    let pre = prefix(net, GateKind::Ce3);
    three_ce_named(net, lits, format!("{pre}.v"), p)
}

pub(crate) fn three_ce_named(
    net: &mut Network,
    lits: [Literal; 3],
    v_name: String,
    p: &GateParams,
) -> Result<GateHandle> {
    checked(net, p)?;
    for l in &lits {
        net.cell(l.cell)?;
    }
    let mut internals = Vec::new();
    let mut negated = Vec::with_capacity(3);
    for (k, l) in lits.iter().enumerate() {
        if l.positive {
            let n = head(
                net,
                format!("{v_name}.not{k}"),
                0.0,
                l.cell,
                None,
                p.delta,
                Role::Internal,
            )?;
            internals.push(n);
            negated.push(n);
        } else {
            negated.push(l.cell);
        }
    }
    let first = inverted_head(
        net,
        negated[0],
        negated[1],
        format!("{v_name}.and"),
        p,
        GateKind::Sand,
    )?;
    internals.extend(&first.internals);
    internals.push(first.output());
    let second = inverted_head(net, first.output(), negated[2], v_name, p, GateKind::Sand)?;
    internals.extend(&second.internals);
    let v = second.output();
    net.set_role(v, Role::Output)?;
    for &id in &internals {
        net.set_role(id, Role::Internal)?;
    }

    dedlu_lift(net, v, p.dedlu_strength, Model::Mismatch)?;
    if p.dedlu_flux > 0.0 {
        dedlu_lift(net, v, p.dedlu_flux, Model::Quadratic)?;
    }

    let mut inputs: Vec<CellId> = Vec::new();
    for l in &lits {
        if !inputs.contains(&l.cell) {
            inputs.push(l.cell);
        }
    }
    let handle = GateHandle {
        kind: GateKind::Ce3,
        inputs,
        outputs: vec![v],
        internals,
    };
    net.annotate(handle.clone())?;
    Ok(handle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Assignment;

    #[test]
    fn window_rejections() {
        assert!(GateParams::new(0.1, 0.05).is_ok());
        let err = GateParams::new(0.1, 0.3).unwrap_err().to_string();
        assert!(err.contains("D < 2*delta"), "{err}");
        let err = GateParams::new(0.2, 0.15).unwrap_err().to_string();
        assert!(err.contains("phi0/2 - D"), "{err}");
        assert!(GateParams::new(0.0, 0.05).is_err());
        assert!(GateParams::new(0.1, 0.0).is_err());
        assert!(GateParams::default().validate(1.0).is_ok());
    }

    #[test]
    fn input_cell_is_free_and_unbiased() {
        let mut net = Network::new();
        let c = add_input_cell(&mut net);
        assert_eq!(net.len(), 1);
        assert!(net.couplings().is_empty());
        let cell = net.cell(c).unwrap();
        assert_eq!(cell.bias(), 0.0);
        assert_eq!(cell.role(), Role::Input);
        assert!(cell.is_free());
    }

    #[test]
    fn nand_nor_structure() {
        let mut net = Network::new();
        let a = add_input_cell(&mut net);
        let b = add_input_cell(&mut net);
        let g = nand_nor(&mut net, a, b, &GateParams::default()).unwrap();
        assert_eq!(net.len(), 4);
        assert_eq!(net.couplings().len(), 4);
        assert_eq!(net.cell(g.outputs[0]).unwrap().bias(), 0.05);
        assert_eq!(net.cell(g.outputs[1]).unwrap().bias(), -0.05);
        // no coupling targets an input
        assert!(net
            .couplings()
            .iter()
            .all(|c| c.target != a && c.target != b));
        assert_eq!(net.gates().len(), 1);
    }

    #[test]
    fn builders_reject_invalid_params() {
        let mut net = Network::new();
        let a = add_input_cell(&mut net);
        let bad = GateParams {
            d_bias: 0.3,
            ..GateParams::default()
        };
        assert!(matches!(
            inverter(&mut net, a, 1, &bad),
            Err(Error::InvalidParams(_))
        ));
        assert!(inverter(&mut net, CellId(9), 1, &GateParams::default()).is_err());
        assert!(inverter(&mut net, a, 0, &GateParams::default()).is_err());
    }

    #[test]
    fn edl_quadratic_shifts_bias() {
        let mut net = Network::new();
        let c = add_input_cell(&mut net);
        edl(&mut net, c, Logic::One, 0.05, Model::Quadratic).unwrap();
        assert_eq!(net.cell(c).unwrap().bias(), 0.05);
        let mut other = Network::new();
        let d = add_input_cell(&mut other);
        edl(&mut other, d, Logic::Zero, 0.05, Model::Quadratic).unwrap();
        assert_eq!(other.cell(d).unwrap().bias(), -0.05);
        assert!(matches!(
            edl(&mut net, c, Logic::One, 0.0, Model::Quadratic),
            Err(Error::StrengthOutOfRange { .. })
        ));
        assert!(edl(&mut net, c, Logic::One, 0.46, Model::Quadratic).is_err());
    }

    #[test]
    fn dedlu_penalty_bounds() {
        let mut net = Network::new();
        let v = add_input_cell(&mut net);
        assert!(dedlu(&mut net, v, 1.0, Model::Mismatch).is_err());
        dedlu(&mut net, v, 0.5, Model::Mismatch).unwrap();
        let mut a = Assignment::zeros(&net);
        assert_eq!(net.penalty_energy(&a).unwrap(), 0.0);
        a.set(v, Logic::One);
        assert_eq!(net.penalty_energy(&a).unwrap(), 0.5);
        assert_eq!(net.energy(&a, Model::Mismatch).unwrap(), 0.5);
    }

    #[test]
    fn three_ce_cell_counts() {
        let mut net = Network::new();
        let x = add_input_cell(&mut net);
        let y = add_input_cell(&mut net);
        let z = add_input_cell(&mut net);
        let g = three_ce(
            &mut net,
            [Literal::pos(x), Literal::neg(y), Literal::pos(z)],
            &GateParams::default(),
        )
        .unwrap();
        // two literal inverters + two (nand, nor, inverter) triples
        assert_eq!(net.len(), 3 + 2 + 6);
        assert_eq!(g.inputs, vec![x, y, z]);
        let v = net.cell(g.output()).unwrap();
        assert_eq!(v.penalty().unwrap().favored, Logic::Zero);
        assert!((v.bias() + 0.05).abs() < 1e-15);
    }
}

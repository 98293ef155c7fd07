//! Line-oriented netlist format.
//!
//! ```text
//! # comments run to end of line
//! param phi0=1 l=1 tol=1e-9 delta=0.1 d=0.05 edl=0.05 dedlu=0.5 dedlu_flux=0.05 model=mismatch
//! cell <name> [bias=<f>] [l=<f>]
//! clamp <name> <0|1>
//! couple <src> <dst> <strength>
//! penalty <name> <favored 0|1> <amount>
//! gate inv <in> <out>
//! gate fanout <in> <out>...
//! gate nandnor <i1> <i2> <o_nand> <o_nor>
//! gate sand|or <i1> <i2> <out>
//! gate wire <in> <out>
//! gate edl <cell> <0|1> [strength=<f>] [model=quadratic|mismatch]
//! gate dedlu <cell> [strength=<f>] [model=quadratic|mismatch]
//! gate 3ce <lit> <lit> <lit> <v>          # lit is `x` or `!x`
//! annotate <kind> in=<a,b> out=<c> int=<d,e>
//! input <name>...
//! output <name>...
//! ```
//!
//! Gate lines accept `delta=`, `d=`, `dedlu=` and `dedlu_flux=` overrides.
//! `gate edl` defaults to the document model, with strength `edl` for the
//! quadratic model and `dedlu` for the mismatch model. Names must be
//! declared before use; `phi0` and `l` can only be set before the first cell.
//!
//! [`serialize`] writes only primitive statements (`cell`, `couple`,
//! `clamp`, `penalty`, `annotate`, `input`, `output`), so parsing its output
//! reproduces the network exactly.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gates::{self, GateParams, Literal};
use crate::model::{
    CellId, FluxConstants, GateHandle, GateKind, Logic, Model, Network, Penalty, Role,
};

#[derive(Debug, Clone, PartialEq)]
pub struct NetlistDocument {
    pub network: Network,
    pub params: GateParams,
    /// Model chosen by a `param model=` line, if any.
    pub model: Option<Model>,
}

impl NetlistDocument {
    /// Cells declared with `input`, in id order.
    pub fn inputs(&self) -> Vec<CellId> {
        self.network.cells_with_role(Role::Input)
    }

    pub fn outputs(&self) -> Vec<CellId> {
        self.network.cells_with_role(Role::Output)
    }
}

struct Statement<'a> {
    words: Vec<&'a str>,
    options: BTreeMap<&'a str, &'a str>,
}

fn split(line: &str) -> Statement<'_> {
    let body = line.split('#').next().unwrap_or("");
    let mut words = Vec::new();
    let mut options = BTreeMap::new();
    for tok in body.split_whitespace() {
        match tok.split_once('=') {
            Some((k, v)) => {
                options.insert(k, v);
            }
            None => words.push(tok),
        }
    }
    Statement { words, options }
}

fn number(line: usize, key: &str, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(line, format!("`{key}` expects a number, got `{s}`")))
}

fn at(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    }
}

/// Values that take precedence over `param` lines, e.g. from command-line
/// flags. Per-gate options still apply to their own gate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub delta: Option<f64>,
    pub d_bias: Option<f64>,
    pub edl_strength: Option<f64>,
    pub dedlu_strength: Option<f64>,
    pub dedlu_flux: Option<f64>,
    pub model: Option<Model>,
    pub tolerance: Option<f64>,
}

struct Parser {
    net: Network,
    params: GateParams,
    model: Option<Model>,
    overrides: Overrides,
}

impl Parser {
    fn id(&self, line: usize, name: &str) -> Result<CellId> {
        self.net
            .id(name)
            .map_err(|_| Error::parse(line, format!("unknown cell `{name}`")))
    }

    fn statement(&mut self, line: usize, st: Statement<'_>) -> Result<()> {
        let Some((&keyword, args)) = st.words.split_first() else {
            if st.options.is_empty() {
                return Ok(());
            }
            return Err(Error::parse(line, "missing statement keyword"));
        };
        let allow = |keys: &[&str]| -> Result<()> {
            match st.options.keys().find(|k| !keys.contains(k)) {
                Some(k) => Err(Error::parse(
                    line,
                    format!("unknown option `{k}` for `{keyword}`"),
                )),
                None => Ok(()),
            }
        };
        let arity = |n: usize| -> Result<()> {
            if args.len() != n {
                return Err(Error::parse(
                    line,
                    format!("`{keyword}` expects {n} arguments, got {}", args.len()),
                ));
            }
            Ok(())
        };
        match keyword {
            "param" => {
                allow(&[
                    "phi0",
                    "l",
                    "tol",
                    "delta",
                    "d",
                    "edl",
                    "dedlu",
                    "dedlu_flux",
                    "model",
                ])?;
                arity(0)?;
                self.param(line, &st.options)
            }
            "cell" => {
                allow(&["bias", "l"])?;
                arity(1)?;
                let bias = match st.options.get("bias") {
                    Some(v) => number(line, "bias", v)?,
                    None => 0.0,
                };
                let l = match st.options.get("l") {
                    Some(v) => number(line, "l", v)?,
                    None => self.net.constants().default_inductance,
                };
                self.net
                    .add_cell_with(args[0], bias, l, Role::Internal)
                    .map(|_| ())
                    .map_err(at(line))
            }
            "clamp" => {
                allow(&[])?;
                arity(2)?;
                let id = self.id(line, args[0])?;
                let v: Logic = args[1].parse().map_err(at(line))?;
                self.net.set_clamp(id, Some(v)).map_err(at(line))
            }
            "couple" => {
                allow(&[])?;
                arity(3)?;
                let src = self.id(line, args[0])?;
                let dst = self.id(line, args[1])?;
                let w = number(line, "strength", args[2])?;
                self.net.couple(src, dst, w).map_err(at(line))
            }
            "penalty" => {
                allow(&[])?;
                arity(3)?;
                let id = self.id(line, args[0])?;
                let favored: Logic = args[1].parse().map_err(at(line))?;
                let amount = number(line, "amount", args[2])?;
                self.net
                    .set_penalty(id, Some(Penalty { favored, amount }))
                    .map_err(at(line))
            }
            "input" | "output" => {
                allow(&[])?;
                if args.is_empty() {
                    return Err(Error::parse(
                        line,
                        format!("`{keyword}` expects cell names"),
                    ));
                }
                let role = if keyword == "input" {
                    Role::Input
                } else {
                    Role::Output
                };
                for name in args {
                    let id = self.id(line, name)?;
                    self.net.set_role(id, role).map_err(at(line))?;
                }
                Ok(())
            }
            "annotate" => {
                allow(&["in", "out", "int"])?;
                arity(1)?;
                let kind: GateKind = args[0].parse().map_err(at(line))?;
                let list = |key: &str| -> Result<Vec<CellId>> {
                    match st.options.get(key) {
                        None | Some(&"") => Ok(vec![]),
                        Some(v) => v.split(',').map(|n| self.id(line, n)).collect(),
                    }
                };
                let handle = GateHandle {
                    kind,
                    inputs: list("in")?,
                    outputs: list("out")?,
                    internals: list("int")?,
                };
                self.net.annotate(handle).map_err(at(line))
            }
            "gate" => self.gate(line, args, &st.options),
            other => Err(Error::parse(line, format!("unknown statement `{other}`"))),
        }
    }

    fn param(&mut self, line: usize, options: &BTreeMap<&str, &str>) -> Result<()> {
        let mut constants = self.net.constants();
        for (&key, &value) in options {
            match key {
                "model" => self.model = Some(value.parse().map_err(at(line))?),
                "phi0" | "l" => {
                    if !self.net.is_empty() {
                        return Err(Error::parse(
                            line,
                            format!("`{key}` must be set before any cell"),
                        ));
                    }
                    let v = number(line, key, value)?;
                    if key == "phi0" {
                        constants.phi0 = v;
                    } else {
                        constants.default_inductance = v;
                    }
                }
                "tol" => {
                    let v = number(line, key, value)?;
                    self.net.set_tolerance(v).map_err(at(line))?;
                }
                "delta" => self.params.delta = number(line, key, value)?,
                "d" => self.params.d_bias = number(line, key, value)?,
                "edl" => self.params.edl_strength = number(line, key, value)?,
                "dedlu" => self.params.dedlu_strength = number(line, key, value)?,
                "dedlu_flux" => self.params.dedlu_flux = number(line, key, value)?,
                _ => unreachable!("filtered by caller"),
            }
        }
        if constants != self.net.constants() {
            let constants = FluxConstants::new(constants.phi0, constants.default_inductance)
                .map_err(at(line))?;
            let tol = self.net.tolerance();
            self.net = Network::with_constants(constants);
            self.net.set_tolerance(tol).map_err(at(line))?;
        }
        self.apply_overrides().map_err(at(line))
    }

    fn apply_overrides(&mut self) -> Result<()> {
        let o = self.overrides;
        let p = &mut self.params;
        p.delta = o.delta.unwrap_or(p.delta);
        p.d_bias = o.d_bias.unwrap_or(p.d_bias);
        p.edl_strength = o.edl_strength.unwrap_or(p.edl_strength);
        p.dedlu_strength = o.dedlu_strength.unwrap_or(p.dedlu_strength);
        p.dedlu_flux = o.dedlu_flux.unwrap_or(p.dedlu_flux);
        self.model = o.model.or(self.model);
        if let Some(tol) = o.tolerance {
            self.net.set_tolerance(tol)?;
        }
        Ok(())
    }

    fn gate(&mut self, line: usize, args: &[&str], options: &BTreeMap<&str, &str>) -> Result<()> {
        let Some((&kind, rest)) = args.split_first() else {
            return Err(Error::parse(line, "`gate` expects a kind"));
        };
        let kind: GateKind = kind.parse().map_err(at(line))?;
        let mut p = self.params;
        let mut strength = None;
        let mut model = self.model.unwrap_or_default();
        for (&key, &value) in options {
            match key {
                "delta" => p.delta = number(line, key, value)?,
                "d" => p.d_bias = number(line, key, value)?,
                "dedlu" => p.dedlu_strength = number(line, key, value)?,
                "dedlu_flux" => p.dedlu_flux = number(line, key, value)?,
                "strength" if matches!(kind, GateKind::Edl | GateKind::Dedlu) => {
                    strength = Some(number(line, key, value)?)
                }
                "model" if matches!(kind, GateKind::Edl | GateKind::Dedlu) => {
                    model = value.parse().map_err(at(line))?
                }
                other => {
                    return Err(Error::parse(
                        line,
                        format!("unknown option `{other}` for gate {kind}"),
                    ))
                }
            }
        }
        let arity = |n: usize| -> Result<()> {
            if rest.len() != n {
                return Err(Error::parse(
                    line,
                    format!("gate {kind} expects {n} names, got {}", rest.len()),
                ));
            }
            Ok(())
        };
        let net = &mut self.net;
        let result = match kind {
            GateKind::Inv | GateKind::Fanout => {
                if rest.len() < 2 || (kind == GateKind::Inv && rest.len() != 2) {
                    return Err(Error::parse(
                        line,
                        format!("gate {kind}: expected input and output names"),
                    ));
                }
                let input = net.id(rest[0]).map_err(|_| unknown(line, rest[0]))?;
                let outs = rest[1..]
                    .iter()
                    .map(|n| fresh(net, line, n))
                    .collect::<Result<Vec<_>>>()?;
                gates::inverter_named(net, input, outs, &p).map(|_| ())
            }
            GateKind::Wire => {
                arity(2)?;
                let input = net.id(rest[0]).map_err(|_| unknown(line, rest[0]))?;
                let out = fresh(net, line, rest[1])?;
                gates::wire_named(net, input, out, &p).map(|_| ())
            }
            GateKind::NandNor => {
                arity(4)?;
                let i1 = net.id(rest[0]).map_err(|_| unknown(line, rest[0]))?;
                let i2 = net.id(rest[1]).map_err(|_| unknown(line, rest[1]))?;
                let names = [fresh(net, line, rest[2])?, fresh(net, line, rest[3])?];
                gates::nand_nor_named(net, i1, i2, names, &p).map(|_| ())
            }
            GateKind::Sand | GateKind::Or => {
                arity(3)?;
                let i1 = net.id(rest[0]).map_err(|_| unknown(line, rest[0]))?;
                let i2 = net.id(rest[1]).map_err(|_| unknown(line, rest[1]))?;
                let out = fresh(net, line, rest[2])?;
                if kind == GateKind::Sand {
                    gates::sand_named(net, i1, i2, out, &p).map(|_| ())
                } else {
                    gates::or_named(net, i1, i2, out, &p).map(|_| ())
                }
            }
            GateKind::Edl => {
                arity(2)?;
                let id = net.id(rest[0]).map_err(|_| unknown(line, rest[0]))?;
                let favored: Logic = rest[1].parse().map_err(at(line))?;
                let s = strength.unwrap_or(match model {
                    Model::Quadratic => p.edl_strength,
                    Model::Mismatch => p.dedlu_strength,
                });
                gates::edl(net, id, favored, s, model)
            }
            GateKind::Dedlu => {
                arity(1)?;
                let id = net.id(rest[0]).map_err(|_| unknown(line, rest[0]))?;
                let s = strength.unwrap_or(match model {
                    Model::Quadratic => p.dedlu_flux,
                    Model::Mismatch => p.dedlu_strength,
                });
                gates::dedlu(net, id, s, model)
            }
            GateKind::Ce3 => {
                arity(4)?;
                let mut lits = Vec::with_capacity(3);
                for tok in &rest[..3] {
                    let (name, positive) = match tok.strip_prefix('!') {
                        Some(n) => (n, false),
                        None => (*tok, true),
                    };
                    let cell = net.id(name).map_err(|_| unknown(line, name))?;
                    lits.push(Literal { cell, positive });
                }
                let v = fresh(net, line, rest[3])?;
                gates::three_ce_named(net, [lits[0], lits[1], lits[2]], v, &p).map(|_| ())
            }
        };
        result.map_err(at(line))
    }
}

fn fresh(net: &Network, line: usize, name: &str) -> Result<String> {
    if net.contains_name(name) {
        return Err(Error::parse(
            line,
            format!("cell `{name}` already declared"),
        ));
    }
    Ok(name.to_string())
}

fn unknown(line: usize, name: &str) -> Error {
    Error::parse(line, format!("unknown cell `{name}`"))
}

/// Parses netlist text.
pub fn parse_netlist(text: &str) -> Result<NetlistDocument> {
    parse_netlist_with(text, &Overrides::default())
}

/// Parses netlist text with `overrides` winning over `param` lines.
pub fn parse_netlist_with(text: &str, overrides: &Overrides) -> Result<NetlistDocument> {
    let mut parser = Parser {
        net: Network::new(),
        params: GateParams::default(),
        model: None,
        overrides: *overrides,
    };
    parser
        .apply_overrides()
        .map_err(|e| Error::parse(1, e.to_string()))?;
    for (idx, raw) in text.lines().enumerate() {
        parser.statement(idx + 1, split(raw))?;
    }
    Ok(NetlistDocument {
        network: parser.net,
        params: parser.params,
        model: parser.model,
    })
}

/// Writes `net` as primitive statements.
pub fn serialize(net: &Network) -> String {
    let mut out = String::new();
    let c = net.constants();
    out.push_str(&format!(
        "param phi0={} l={} tol={}\n",
        c.phi0,
        c.default_inductance,
        net.tolerance()
    ));
    for cell in net.cells() {
        out.push_str(&format!("cell {}", cell.name()));
        if cell.bias() != 0.0 {
            out.push_str(&format!(" bias={}", cell.bias()));
        }
        if cell.inductance() != c.default_inductance {
            out.push_str(&format!(" l={}", cell.inductance()));
        }
        out.push('\n');
    }
    for k in net.couplings() {
        out.push_str(&format!(
            "couple {} {} {}\n",
            net.name(k.source),
            net.name(k.target),
            k.strength
        ));
    }
    for cell in net.cells() {
        if let Some(v) = cell.clamp() {
            out.push_str(&format!("clamp {} {}\n", cell.name(), v));
        }
        if let Some(p) = cell.penalty() {
            out.push_str(&format!(
                "penalty {} {} {}\n",
                cell.name(),
                p.favored,
                p.amount
            ));
        }
    }
    for (keyword, role) in [("input", Role::Input), ("output", Role::Output)] {
        let ids = net.cells_with_role(role);
        if !ids.is_empty() {
            let names: Vec<&str> = ids.iter().map(|&i| net.name(i)).collect();
            out.push_str(&format!("{keyword} {}\n", names.join(" ")));
        }
    }
    for g in net.gates() {
        let list = |ids: &[CellId]| -> String {
            ids.iter()
                .map(|&i| net.name(i))
                .collect::<Vec<_>>()
                .join(",")
        };
        out.push_str(&format!(
            "annotate {} in={} out={} int={}\n",
            g.kind,
            list(&g.inputs),
            list(&g.outputs),
            list(&g.internals)
        ));
    }
    out
}

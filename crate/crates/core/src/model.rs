//! Cells, couplings, networks and the two energy semantics.
//!
//! A cell is a flux-biased superconducting double ring. Its two supercurrent
//! directions carry logic 0 (no trapped quantum) and logic 1 (one trapped
//! quantum). The externally applied flux is `phi0/2 + bias` plus a
//! perturbation `strength * spin(source)` from every incoming coupling, with
//! spin `+1` for logic 0 and `-1` for logic 1.
//!
//! Two energy models are provided:
//!
//! * [`Model::Quadratic`]: the screening energy `(flux - n*phi0)^2 / (2L)`
//!   where `n` is the cell's logic value.
//! * [`Model::Mismatch`]: 0 when the cell holds the value preferred by its
//!   applied flux (both values are preferred at exactly `phi0/2`), 1
//!   otherwise, plus any degeneracy-lifting penalty attached to the cell.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance for degeneracy and tie detection.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxConstants {
    /// Flux quantum in normalized units.
    pub phi0: f64,
    /// Inductance given to cells that do not set their own.
    pub default_inductance: f64,
}

impl FluxConstants {
    pub fn new(phi0: f64, default_inductance: f64) -> Result<Self> {
        if !(phi0 > 0.0 && phi0.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "phi0 must be positive, got {phi0}"
            )));
        }
        if !(default_inductance > 0.0 && default_inductance.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "inductance must be positive, got {default_inductance}"
            )));
        }
        Ok(FluxConstants {
            phi0,
            default_inductance,
        })
    }

    pub fn half_quantum(&self) -> f64 {
        self.phi0 / 2.0
    }
}

impl Default for FluxConstants {
    fn default() -> Self {
        FluxConstants {
            phi0: 1.0,
            default_inductance: 1.0,
        }
    }
}

/// Binary logic value of a cell: the number of trapped flux quanta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Logic {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
}

impl Logic {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Logic::One
        } else {
            Logic::Zero
        }
    }

    pub fn bit(self) -> bool {
        self == Logic::One
    }

    pub fn as_u8(self) -> u8 {
        self.bit() as u8
    }

    /// Ising spin: `+1` for logic 0 (clockwise current), `-1` for logic 1.
    pub fn spin(self) -> i8 {
        match self {
            Logic::Zero => 1,
            Logic::One => -1,
        }
    }

    pub fn from_spin(spin: i8) -> Option<Self> {
        match spin {
            1 => Some(Logic::Zero),
            -1 => Some(Logic::One),
            _ => None,
        }
    }
}

impl std::ops::Not for Logic {
    type Output = Logic;

    fn not(self) -> Logic {
        Logic::from_bit(!self.bit())
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl FromStr for Logic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(Logic::Zero),
            "1" => Ok(Logic::One),
            _ => Err(Error::InvalidValue(format!(
                "expected logic value 0 or 1, got `{s}`"
            ))),
        }
    }
}

/// Spin value of a logic bit (`true` = logic 1) as a float.
#[inline]
pub(crate) fn spin_of(bit: bool) -> f64 {
    if bit {
        -1.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId(pub usize);

impl CellId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Input,
    Output,
    Internal,
}

/// Energy semantics used by solvers and verifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Quadratic,
    #[default]
    Mismatch,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Quadratic => "quadratic",
            Model::Mismatch => "mismatch",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(Model::Quadratic),
            "mismatch" => Ok(Model::Mismatch),
            _ => Err(Error::InvalidValue(format!(
                "unknown energy model `{s}` (expected quadratic or mismatch)"
            ))),
        }
    }
}

/// Mismatch-model energy charged when a cell does not hold `favored`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalty {
    pub favored: Logic,
    pub amount: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    name: String,
    bias: f64,
    inductance: f64,
    clamp: Option<Logic>,
    role: Role,
    penalty: Option<Penalty>,
}

impl Cell {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Offset of the applied flux from `phi0/2`.
    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn inductance(&self) -> f64 {
        self.inductance
    }

    pub fn clamp(&self) -> Option<Logic> {
        self.clamp
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn penalty(&self) -> Option<Penalty> {
        self.penalty
    }

    pub fn is_free(&self) -> bool {
        self.clamp.is_none()
    }
}

/// Directed flux perturbation: the target sees `strength * spin(source)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub source: CellId,
    pub target: CellId,
    pub strength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    #[serde(rename = "inv")]
    Inv,
    #[serde(rename = "fanout")]
    Fanout,
    #[serde(rename = "nandnor")]
    NandNor,
    #[serde(rename = "sand")]
    Sand,
    #[serde(rename = "or")]
    Or,
    #[serde(rename = "wire")]
    Wire,
    #[serde(rename = "edl")]
    Edl,
    #[serde(rename = "dedlu")]
    Dedlu,
    #[serde(rename = "3ce")]
    Ce3,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::Inv,
        GateKind::Fanout,
        GateKind::NandNor,
        GateKind::Sand,
        GateKind::Or,
        GateKind::Wire,
        GateKind::Edl,
        GateKind::Dedlu,
        GateKind::Ce3,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            GateKind::Inv => "inv",
            GateKind::Fanout => "fanout",
            GateKind::NandNor => "nandnor",
            GateKind::Sand => "sand",
            GateKind::Or => "or",
            GateKind::Wire => "wire",
            GateKind::Edl => "edl",
            GateKind::Dedlu => "dedlu",
            GateKind::Ce3 => "3ce",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.keyword() == s)
            .ok_or_else(|| Error::InvalidValue(format!("unknown gate kind `{s}`")))
    }
}

/// Cells making up one constructed gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateHandle {
    pub kind: GateKind,
    pub inputs: Vec<CellId>,
    pub outputs: Vec<CellId>,
    pub internals: Vec<CellId>,
}

impl GateHandle {
    /// Single-output gates: the output cell.
    pub fn output(&self) -> CellId {
        self.outputs[0]
    }
}

/// Total configuration: one logic value per cell, indexed by [`CellId`].
///
/// Clamped cells always read their clamp, whatever is stored here.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    values: Vec<Logic>,
}

impl Assignment {
    pub fn new(values: Vec<Logic>) -> Self {
        Assignment { values }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        Assignment {
            values: bits.iter().map(|&b| Logic::from_bit(b)).collect(),
        }
    }

    /// All free cells at logic 0, clamped cells at their clamp.
    pub fn zeros(net: &Network) -> Self {
        Assignment {
            values: net
                .cells
                .iter()
                .map(|c| c.clamp.unwrap_or(Logic::Zero))
                .collect(),
        }
    }

    /// Builds a total assignment from values for the free cells, in id order.
    pub fn from_free(net: &Network, free_values: &[Logic]) -> Result<Self> {
        let free = net.free_cells();
        if free.len() != free_values.len() {
            return Err(Error::AssignmentSize {
                expected: free.len(),
                got: free_values.len(),
            });
        }
        let mut a = Assignment::zeros(net);
        for (id, &v) in free.iter().zip(free_values) {
            a.values[id.0] = v;
        }
        Ok(a)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, id: CellId) -> Logic {
        self.values[id.0]
    }

    pub fn set(&mut self, id: CellId, v: Logic) {
        self.values[id.0] = v;
    }

    pub fn flip(&mut self, id: CellId) {
        self.values[id.0] = !self.values[id.0];
    }

    pub fn values(&self) -> &[Logic] {
        &self.values
    }

    pub fn to_bits(&self) -> Vec<bool> {
        self.values.iter().map(|v| v.bit()).collect()
    }
}

/// Screening energy of a cell holding `value` under applied `flux`.
#[inline]
pub(crate) fn quadratic_branch(flux: f64, value: bool, phi0: f64, inductance: f64) -> f64 {
    let residual = if value { flux - phi0 } else { flux };
    residual * residual / (2.0 * inductance)
}

/// Which values minimize the screening energy: `None` on a tie.
#[inline]
pub(crate) fn preferred_value(flux: f64, half: f64, tol: f64) -> Option<bool> {
    let detuning = flux - half;
    if detuning.abs() <= tol {
        None
    } else {
        Some(detuning > 0.0)
    }
}

#[inline]
pub(crate) fn mismatch_cost(flux: f64, value: bool, half: f64, tol: f64) -> f64 {
    match preferred_value(flux, half, tol) {
        Some(p) if p != value => 1.0,
        _ => 0.0,
    }
}

#[inline]
pub(crate) fn penalty_cost(penalty: Option<Penalty>, value: bool) -> f64 {
    match penalty {
        Some(p) if p.favored.bit() != value => p.amount,
        _ => 0.0,
    }
}

/// A network of cells and directed couplings.
///
/// Couplings between the same ordered pair are merged by summing strengths.
#[derive(Debug, Clone)]
pub struct Network {
    constants: FluxConstants,
    tolerance: f64,
    cells: Vec<Cell>,
    couplings: Vec<Coupling>,
    gates: Vec<GateHandle>,
    names: HashMap<String, CellId>,
    pair_index: BTreeMap<(CellId, CellId), usize>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.constants == other.constants
            && self.tolerance == other.tolerance
            && self.cells == other.cells
            && self.couplings == other.couplings
            && self.gates == other.gates
    }
}

impl Default for Network {
    fn default() -> Self {
        Network::new()
    }
}

impl Network {
    pub fn new() -> Self {
        Network::with_constants(FluxConstants::default())
    }

    pub fn with_constants(constants: FluxConstants) -> Self {
        Network {
            constants,
            tolerance: DEFAULT_TOLERANCE,
            cells: Vec::new(),
            couplings: Vec::new(),
            gates: Vec::new(),
            names: HashMap::new(),
            pair_index: BTreeMap::new(),
            incoming: Vec::new(),
            outgoing: Vec::new(),
        }
    }

    pub fn constants(&self) -> FluxConstants {
        self.constants
    }

    /// Tie tolerance on flux used by the mismatch model.
    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn set_tolerance(&mut self, tol: f64) -> Result<()> {
        if !(tol >= 0.0 && tol.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "tolerance must be >= 0, got {tol}"
            )));
        }
        self.tolerance = tol;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn gates(&self) -> &[GateHandle] {
        &self.gates
    }

    pub fn cell_ids(&self) -> impl Iterator<Item = CellId> {
        (0..self.cells.len()).map(CellId)
    }

    pub fn cell(&self, id: CellId) -> Result<&Cell> {
        self.cells
            .get(id.0)
            .ok_or_else(|| Error::UnknownCell(id.to_string()))
    }

    pub fn name(&self, id: CellId) -> &str {
        &self.cells[id.0].name
    }

    pub fn id(&self, name: &str) -> Result<CellId> {
        self.names
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownCell(format!("`{name}`")))
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.names.contains_key(name)
    }

    pub fn free_cells(&self) -> Vec<CellId> {
        self.cell_ids()
            .filter(|&id| self.cells[id.0].is_free())
            .collect()
    }

    pub fn cells_with_role(&self, role: Role) -> Vec<CellId> {
        self.cell_ids()
            .filter(|&id| self.cells[id.0].role == role)
            .collect()
    }

    /// Couplings ending at `id`, in insertion order.
    pub fn incoming(&self, id: CellId) -> impl Iterator<Item = &Coupling> {
        self.incoming[id.0].iter().map(move |&k| &self.couplings[k])
    }

    /// Couplings leaving `id`, in insertion order.
    pub fn outgoing(&self, id: CellId) -> impl Iterator<Item = &Coupling> {
        self.outgoing[id.0].iter().map(move |&k| &self.couplings[k])
    }

    fn check(&self, id: CellId) -> Result<()> {
        self.cell(id).map(|_| ())
    }

    fn check_bias(&self, name: &str, bias: f64) -> Result<()> {
        let limit = self.constants.half_quantum();
        if !(bias.is_finite() && bias.abs() < limit) {
            return Err(Error::BiasOutOfRange {
                name: name.to_string(),
                bias,
                limit,
            });
        }
        Ok(())
    }

    /// Adds a free internal cell with the default inductance.
    pub fn add_cell(&mut self, name: impl Into<String>, bias: f64) -> Result<CellId> {
        let l = self.constants.default_inductance;
        self.add_cell_with(name, bias, l, Role::Internal)
    }

    pub fn add_cell_with(
        &mut self,
        name: impl Into<String>,
        bias: f64,
        inductance: f64,
        role: Role,
    ) -> Result<CellId> {
        let name = name.into();
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == ',') {
            return Err(Error::InvalidValue(format!("invalid cell name `{name}`")));
        }
        if self.names.contains_key(&name) {
            return Err(Error::DuplicateName(name));
        }
        self.check_bias(&name, bias)?;
        if !(inductance > 0.0 && inductance.is_finite()) {
            return Err(Error::InvalidValue(format!(
                "cell `{name}`: inductance must be positive, got {inductance}"
            )));
        }
        let id = CellId(self.cells.len());
        self.names.insert(name.clone(), id);
        self.cells.push(Cell {
            name,
            bias,
            inductance,
            clamp: None,
            role,
            penalty: None,
        });
        self.incoming.push(Vec::new());
        self.outgoing.push(Vec::new());
        Ok(id)
    }

    /// First unused name of the form `{prefix}{n}`.
    pub fn fresh_name(&self, prefix: &str) -> String {
        (self.cells.len()..)
            .map(|n| format!("{prefix}{n}"))
            .find(|candidate| !self.names.contains_key(candidate))
            .expect("unbounded search")
    }

    pub fn set_bias(&mut self, id: CellId, bias: f64) -> Result<()> {
        self.check(id)?;
        let name = self.cells[id.0].name.clone();
        self.check_bias(&name, bias)?;
        self.cells[id.0].bias = bias;
        Ok(())
    }

    pub fn set_role(&mut self, id: CellId, role: Role) -> Result<()> {
        self.check(id)?;
        self.cells[id.0].role = role;
        Ok(())
    }

    pub fn set_clamp(&mut self, id: CellId, clamp: Option<Logic>) -> Result<()> {
        self.check(id)?;
        self.cells[id.0].clamp = clamp;
        Ok(())
    }

    pub fn set_penalty(&mut self, id: CellId, penalty: Option<Penalty>) -> Result<()> {
        self.check(id)?;
        if let Some(p) = penalty {
            if !(p.amount >= 0.0 && p.amount.is_finite()) {
                return Err(Error::InvalidValue(format!(
                    "penalty must be finite and >= 0, got {}",
                    p.amount
                )));
            }
        }
        self.cells[id.0].penalty = penalty;
        Ok(())
    }

    /// Adds `strength` to the coupling `source -> target`, creating it if needed.
    pub fn couple(&mut self, source: CellId, target: CellId, strength: f64) -> Result<()> {
        self.check(source)?;
        self.check(target)?;
        if source == target {
            return Err(Error::SelfCoupling(self.cells[source.0].name.clone()));
        }
        if !strength.is_finite() {
            return Err(Error::InvalidValue(format!("coupling strength {strength}")));
        }
        match self.pair_index.get(&(source, target)) {
            Some(&k) => self.couplings[k].strength += strength,
            None => {
                let k = self.couplings.len();
                self.couplings.push(Coupling {
                    source,
                    target,
                    strength,
                });
                self.pair_index.insert((source, target), k);
                self.incoming[target.0].push(k);
                self.outgoing[source.0].push(k);
            }
        }
        Ok(())
    }

    pub fn annotate(&mut self, handle: GateHandle) -> Result<()> {
        for &id in handle
            .inputs
            .iter()
            .chain(&handle.outputs)
            .chain(&handle.internals)
        {
            self.check(id)?;
        }
        self.gates.push(handle);
        Ok(())
    }

    /// Copy of the network with additional clamps.
    pub fn with_clamps(&self, clamps: &[(CellId, Logic)]) -> Result<Network> {
        let mut net = self.clone();
        for &(id, v) in clamps {
            net.set_clamp(id, Some(v))?;
        }
        Ok(net)
    }

    /// Logic value of `id` under `a`, honoring clamps.
    pub fn value(&self, a: &Assignment, id: CellId) -> Logic {
        self.cells[id.0].clamp.unwrap_or_else(|| a.get(id))
    }

    fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.len() != self.cells.len() {
            return Err(Error::AssignmentSize {
                expected: self.cells.len(),
                got: a.len(),
            });
        }
        Ok(())
    }

    /// Applied flux threading `id` before its own screening current.
    pub fn applied_flux(&self, a: &Assignment, id: CellId) -> Result<f64> {
        self.check(id)?;
        self.check_assignment(a)?;
        Ok(self.flux_unchecked(a, id))
    }

    fn flux_unchecked(&self, a: &Assignment, id: CellId) -> f64 {
        let cell = &self.cells[id.0];
        let mut flux = self.constants.half_quantum() + cell.bias;
        for c in self.incoming(id) {
            flux += c.strength * spin_of(self.value(a, c.source).bit());
        }
        flux
    }

    pub fn cell_energy_quadratic(&self, a: &Assignment, id: CellId) -> Result<f64> {
        let flux = self.applied_flux(a, id)?;
        let cell = &self.cells[id.0];
        Ok(quadratic_branch(
            flux,
            self.value(a, id).bit(),
            self.constants.phi0,
            cell.inductance,
        ))
    }

    /// Local-optimality cost plus any lifting penalty on the cell.
    pub fn cell_energy_mismatch(&self, a: &Assignment, id: CellId) -> Result<f64> {
        let flux = self.applied_flux(a, id)?;
        let value = self.value(a, id).bit();
        let cell = &self.cells[id.0];
        Ok(
            mismatch_cost(flux, value, self.constants.half_quantum(), self.tolerance)
                + penalty_cost(cell.penalty, value),
        )
    }

    pub fn cell_energy(&self, a: &Assignment, id: CellId, model: Model) -> Result<f64> {
        match model {
            Model::Quadratic => self.cell_energy_quadratic(a, id),
            Model::Mismatch => self.cell_energy_mismatch(a, id),
        }
    }

    pub fn energy(&self, a: &Assignment, model: Model) -> Result<f64> {
        self.check_assignment(a)?;
        self.cell_ids()
            .map(|id| self.cell_energy(a, id, model))
            .sum()
    }

    /// Sum of the lifting penalties paid under `a` (mismatch units).
    pub fn penalty_energy(&self, a: &Assignment) -> Result<f64> {
        self.check_assignment(a)?;
        Ok(self
            .cell_ids()
            .map(|id| penalty_cost(self.cells[id.0].penalty, self.value(a, id).bit()))
            .sum())
    }
}

//! Mixed-integer linear model of progressive big-data processing over a
//! bypass IP-over-WDM network.
//!
//! [`build_model`] emits every variable and constraint for one instance and
//! one set of [`ModeFlags`]. Each constraint carries an [`Annotation`] naming
//! the equation family it belongs to, which the feasibility checker and the
//! LP export both surface.

mod build;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::names;
use crate::power::{Assignment, SwitchingReading};
use crate::topology::NodeId;

pub use build::{add_classical_restriction, add_renewable, big_m_values, build_model, chunk_volume, BigM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

impl VarKind {
    pub fn is_integral(self) -> bool {
        !matches!(self, VarKind::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

/// Which equation family a constraint instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Annotation {
    /// Numbered equation of the formulation (12..=44).
    Equation(u8),
    /// Processing restricted to data centres (classical baseline).
    Classical,
    /// Bookkeeping rows that are not part of the published formulation.
    Plumbing,
}

impl std::fmt::Display for Annotation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Annotation::Equation(n) => write!(f, "({n})"),
            Annotation::Classical => f.write_str("classical"),
            Annotation::Plumbing => f.write_str("plumbing"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub relation: Relation,
    pub rhs: f64,
    pub annotation: Annotation,
}

impl Constraint {
    pub fn activity(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v.0]).sum()
    }

    /// Amount by which `values` violate the row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.activity(values);
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }

    /// Largest magnitude among the row's coefficients and right-hand side.
    pub fn scale(&self) -> f64 {
        self.terms.iter().map(|t| t.1.abs()).fold(self.rhs.abs(), f64::max).max(1.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Objective {
    pub terms: Vec<(VarId, f64)>,
    pub constant: f64,
}

impl Objective {
    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(v, a)| a * values[v.0]).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    /// Progressive processing in PNs, IPNs and DCs on cleansed chunks.
    #[default]
    Green,
    /// Raw chunks processed in data centres only.
    Classical,
}

impl std::str::FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "green" => Ok(Approach::Green),
            "classical" => Ok(Approach::Classical),
            other => Err(Error::Invalid(format!("unknown mode '{other}', expected green or classical"))),
        }
    }
}

impl std::fmt::Display for Approach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Approach::Green => "green",
            Approach::Classical => "classical",
        })
    }
}

/// Switches selecting the model variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModeFlags {
    pub approach: Approach,
    pub backup: bool,
    pub renewable: bool,
    /// Number of data centres to build.
    pub dcn: u32,
    /// Number of backup nodes. Only 1 matches the published formulation.
    pub bn_count: u32,
    /// Integer aggregation ports (`>=` rows) instead of continuous equalities.
    pub integer_ports: bool,
    pub switching: SwitchingReading,
    /// Classical approach uses cleansed instead of raw volumes.
    pub same_volumes: bool,
    /// Solar power available per node (kW); only read when `renewable`.
    pub solar_kw: BTreeMap<NodeId, f64>,
    /// Override for the instance-derived big-M constants.
    #[serde(skip)]
    pub big_m: Option<BigM>,
}

impl Default for ModeFlags {
    fn default() -> Self {
        ModeFlags {
            approach: Approach::Green,
            backup: false,
            renewable: false,
            dcn: 2,
            bn_count: 1,
            integer_ports: false,
            switching: SwitchingReading::ReceiverSplit,
            same_volumes: false,
            solar_kw: BTreeMap::new(),
            big_m: None,
        }
    }
}

impl ModeFlags {
    pub fn validate(&self) -> Result<()> {
        if self.dcn == 0 {
            return Err(Error::Invalid("DCN must be at least 1".into()));
        }
        if self.backup && self.bn_count == 0 {
            return Err(Error::Invalid("backup mode needs at least one backup node".into()));
        }
        if self.solar_kw.values().any(|&s| !(s >= 0.0)) {
            return Err(Error::Invalid("solar power must be non-negative".into()));
        }
        Ok(())
    }
}

/// A complete MILP: minimise `objective` subject to `constraints` and bounds.
#[derive(Debug, Clone)]
pub struct MilpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Objective,
    pub flags: ModeFlags,
    index: HashMap<String, VarId>,
    row_names: HashMap<String, usize>,
}

impl MilpModel {
    pub fn new(flags: ModeFlags) -> Self {
        MilpModel {
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Objective::default(),
            flags,
            index: HashMap::new(),
            row_names: HashMap::new(),
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: f64, upper: f64) -> VarId {
        let name = name.into();
        let (lower, upper) = match kind {
            VarKind::Binary => (lower.max(0.0), upper.min(1.0)),
            _ => (lower, upper),
        };
        let id = VarId(self.variables.len());
        let previous = self.index.insert(name.clone(), id);
        assert!(previous.is_none(), "variable {name} declared twice");
        self.variables.push(Variable { name, kind, lower, upper });
        id
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        relation: Relation,
        rhs: f64,
        annotation: Annotation,
    ) {
        let name = name.into();
        let mut merged: BTreeMap<VarId, f64> = BTreeMap::new();
        for (v, a) in terms {
            assert!(v.0 < self.variables.len(), "constraint {name} references an undeclared variable");
            *merged.entry(v).or_insert(0.0) += a;
        }
        let terms = merged.into_iter().filter(|t| t.1 != 0.0).collect();
        let previous = self.row_names.insert(name.clone(), self.constraints.len());
        assert!(previous.is_none(), "constraint {name} declared twice");
        self.constraints.push(Constraint { name, terms, relation, rhs, annotation });
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<VarId> {
        self.var(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn constraint(&self, name: &str) -> Option<&Constraint> {
        self.row_names.get(name).map(|&i| &self.constraints[i])
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn count_vars_with_prefix(&self, prefix: &str) -> usize {
        self.variables.iter().filter(|v| v.name.starts_with(prefix)).count()
    }

    pub fn rows_annotated(&self, annotation: Annotation) -> usize {
        self.constraints.iter().filter(|c| c.annotation == annotation).count()
    }

    /// Dense value vector from a name map; unknown names are errors.
    pub fn values_from(&self, assignment: &Assignment) -> Result<Vec<f64>> {
        self.variables.iter().map(|v| assignment.get(&v.name)).collect()
    }

    /// Named assignment for a dense solution vector. Symbols that the power
    /// model reads but the active mode does not declare (backup traffic and
    /// storage without a backup node) are filled with zero.
    pub fn assignment(&self, values: &[f64]) -> Assignment {
        let mut out: Assignment =
            self.variables.iter().zip(values).map(|(v, &x)| (v.name.clone(), x)).collect();
        if !self.flags.backup {
            let nodes = self.nodes();
            for &a in &nodes {
                out.set(names::ab(a), 0.0);
                out.set(names::sbch(a), 0.0);
                for &b in &nodes {
                    out.set(names::bch(a, b), 0.0);
                }
            }
        }
        out
    }

    /// Node ids, recovered from the per-node `DC_d` variables.
    pub fn nodes(&self) -> Vec<NodeId> {
        self.variables
            .iter()
            .filter_map(|v| v.name.strip_prefix("DC_").and_then(|s| s.parse().ok()))
            .collect()
    }

    /// SHA-256 of the canonical LP export.
    pub fn digest(&self) -> String {
        let text = crate::solver::lp_format::to_lp_string(self);
        let hash = Sha256::digest(text.as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

//! Variable naming scheme shared by the model builder, the power model and
//! the enumeration oracle. Names are valid LP-format identifiers and carry node
//! ids, so `CHT_3_7` is the chunk traffic from node 3 to node 7.

use crate::topology::NodeId;

pub fn y(s: NodeId, c: u32, p: NodeId) -> String {
    format!("Y_{s}_{c}_{p}")
}
pub fn dc(d: NodeId) -> String {
    format!("DC_{d}")
}
pub fn bn(d: NodeId) -> String {
    format!("BN_{d}")
}
pub fn cht(s: NodeId, p: NodeId) -> String {
    format!("CHT_{s}_{p}")
}
pub fn inf(p: NodeId, d: NodeId) -> String {
    format!("IT_{p}_{d}")
}
pub fn bch(s: NodeId, d: NodeId) -> String {
    format!("BCH_{s}_{d}")
}
pub fn pnw(p: NodeId) -> String {
    format!("PNW_{p}")
}
pub fn sch(p: NodeId) -> String {
    format!("SCH_{p}")
}
pub fn sbch(d: NodeId) -> String {
    format!("SBCH_{d}")
}
pub fn ar(i: NodeId) -> String {
    format!("AR_{i}")
}
pub fn ach(i: NodeId) -> String {
    format!("ACH_{i}")
}
pub fn ai(i: NodeId) -> String {
    format!("AI_{i}")
}
pub fn ab(i: NodeId) -> String {
    format!("AB_{i}")
}
/// Wavelength channels on virtual link `(i, j)`.
pub fn c(i: NodeId, j: NodeId) -> String {
    format!("C_{i}_{j}")
}
/// Channels of virtual link `(i, j)` routed over physical link `(m, n)`.
pub fn wv(i: NodeId, j: NodeId, m: NodeId, n: NodeId) -> String {
    format!("WV_{i}_{j}_{m}_{n}")
}
pub fn w(m: NodeId, n: NodeId) -> String {
    format!("W_{m}_{n}")
}
pub fn f(m: NodeId, n: NodeId) -> String {
    format!("F_{m}_{n}")
}
/// IP-layer flow of commodity `class` between `(a, b)` on virtual link `(i, j)`.
pub fn flow(class: TrafficClass, a: NodeId, b: NodeId, i: NodeId, j: NodeId) -> String {
    format!("{}f_{a}_{b}_{i}_{j}", class.symbol())
}
pub fn npc(s: NodeId) -> String {
    format!("NPC_{s}")
}
pub fn re(s: NodeId) -> String {
    format!("RE_{s}")
}
pub fn nre(s: NodeId) -> String {
    format!("NRE_{s}")
}
pub const TNRE: &str = "TNRE";

/// The four traffic classes routed over the virtual topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TrafficClass {
    Regular,
    Chunk,
    Info,
    Backup,
}

impl TrafficClass {
    pub const ALL: [TrafficClass; 4] =
        [TrafficClass::Regular, TrafficClass::Chunk, TrafficClass::Info, TrafficClass::Backup];

    pub fn symbol(self) -> &'static str {
        match self {
            TrafficClass::Regular => "R",
            TrafficClass::Chunk => "CHT",
            TrafficClass::Info => "IT",
            TrafficClass::Backup => "BCH",
        }
    }

    /// Flow-conservation equation number for this class.
    pub fn conservation_eq(self) -> u8 {
        match self {
            TrafficClass::Regular => 30,
            TrafficClass::Chunk => 31,
            TrafficClass::Info => 32,
            TrafficClass::Backup => 33,
        }
    }
}

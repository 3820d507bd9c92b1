//! Physical IP-over-WDM topology: nodes, directed fibre links and the optical
//! line parameters that drive the network power terms.
//!
//! Topologies are read from JSON where every link entry is bidirectional unless
//! it sets `"bidirectional": false`. After materialisation every directed link
//! must have a reverse link of equal length.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = u32;

/// Optical switch power used when the file does not say otherwise (W).
pub const DEFAULT_OPTICAL_SWITCH_W: f64 = 85.0;

/// A directed fibre link `from -> to`.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub from: NodeId,
    pub to: NodeId,
    pub km: f64,
    /// Regenerators per wavelength on this link.
    pub regenerators: u32,
    /// EDFAs on this link, derived from `km` and the span length.
    pub edfas: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    nodes: Vec<NodeId>,
    links: Vec<Link>,
    neighbors: BTreeMap<NodeId, Vec<NodeId>>,
    span_km: f64,
    wavelengths_per_fiber: u32,
    wavelength_gbps: f64,
    optical_switch_w: BTreeMap<NodeId, f64>,
}

/// Number of EDFAs on a link of `distance_km` with amplifier spacing `span_km`:
/// `floor(D/S - 1) + 2`.
///
/// The formula is applied literally, so links shorter than one span get a
/// single amplifier.
pub fn edfa_count(distance_km: f64, span_km: f64) -> Result<u32> {
    if !(distance_km > 0.0) || !distance_km.is_finite() {
        return Err(Error::Invalid(format!("link distance must be positive, got {distance_km}")));
    }
    if !(span_km > 0.0) || !span_km.is_finite() {
        return Err(Error::Invalid(format!("span distance must be positive, got {span_km}")));
    }
    let count = (distance_km / span_km - 1.0).floor() as i64 + 2;
    Ok(count as u32)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LinkEntry {
    a: NodeId,
    b: NodeId,
    km: f64,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    bidirectional: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RegeneratorEntry {
    a: NodeId,
    b: NodeId,
    count: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum OpticalSwitchPower {
    Uniform(f64),
    PerNode(BTreeMap<String, f64>),
}

/// On-disk topology schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct TopologyFile {
    nodes: Vec<NodeId>,
    links: Vec<LinkEntry>,
    span_km: f64,
    wavelengths_per_fiber: u32,
    wavelength_gbps: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    regenerators: Vec<RegeneratorEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    optical_switch_w: Option<OpticalSwitchPower>,
}

fn default_true() -> bool {
    true
}

fn is_true(v: &bool) -> bool {
    *v
}

/// Builder used by tests and examples to assemble a topology in code.
#[derive(Debug, Clone)]
pub struct TopologyBuilder {
    file: TopologyFile,
}

impl TopologyBuilder {
    pub fn new(nodes: impl IntoIterator<Item = NodeId>) -> Self {
        TopologyBuilder {
            file: TopologyFile {
                nodes: nodes.into_iter().collect(),
                links: Vec::new(),
                span_km: 80.0,
                wavelengths_per_fiber: 32,
                wavelength_gbps: 40.0,
                regenerators: Vec::new(),
                optical_switch_w: None,
            },
        }
    }

    /// Adds a bidirectional link.
    pub fn link(mut self, a: NodeId, b: NodeId, km: f64) -> Self {
        self.file.links.push(LinkEntry { a, b, km, bidirectional: true });
        self
    }

    /// Adds a single directed link.
    pub fn directed_link(mut self, a: NodeId, b: NodeId, km: f64) -> Self {
        self.file.links.push(LinkEntry { a, b, km, bidirectional: false });
        self
    }

    pub fn regenerators(mut self, a: NodeId, b: NodeId, count: u32) -> Self {
        self.file.regenerators.push(RegeneratorEntry { a, b, count });
        self
    }

    pub fn span_km(mut self, span_km: f64) -> Self {
        self.file.span_km = span_km;
        self
    }

    pub fn wavelengths_per_fiber(mut self, wl: u32) -> Self {
        self.file.wavelengths_per_fiber = wl;
        self
    }

    pub fn wavelength_gbps(mut self, gbps: f64) -> Self {
        self.file.wavelength_gbps = gbps;
        self
    }

    pub fn optical_switch_w(mut self, watts: f64) -> Self {
        self.file.optical_switch_w = Some(OpticalSwitchPower::Uniform(watts));
        self
    }

    pub fn build(self) -> Result<Topology> {
        Topology::from_file_schema(self.file)
    }
}

impl Topology {
    /// Reads and validates a topology JSON file.
    pub fn load(path: impl AsRef<Path>) -> Result<Topology> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Topology::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Topology> {
        let file: TopologyFile = serde_json::from_str(text)?;
        Topology::from_file_schema(file)
    }

    /// Serialises back to the file schema, one bidirectional entry per node pair.
    pub fn to_json(&self) -> Result<String> {
        let mut links = Vec::new();
        let mut regenerators = Vec::new();
        for link in &self.links {
            if link.from < link.to {
                links.push(LinkEntry { a: link.from, b: link.to, km: link.km, bidirectional: true });
                if link.regenerators > 0 {
                    regenerators.push(RegeneratorEntry { a: link.from, b: link.to, count: link.regenerators });
                }
            }
        }
        let uniform = self.optical_switch_w.values().all(|&w| w == DEFAULT_OPTICAL_SWITCH_W);
        let optical_switch_w = if uniform {
            None
        } else {
            Some(OpticalSwitchPower::PerNode(
                self.optical_switch_w.iter().map(|(n, w)| (n.to_string(), *w)).collect(),
            ))
        };
        let file = TopologyFile {
            nodes: self.nodes.clone(),
            links,
            span_km: self.span_km,
            wavelengths_per_fiber: self.wavelengths_per_fiber,
            wavelength_gbps: self.wavelength_gbps,
            regenerators,
            optical_switch_w,
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    fn from_file_schema(file: TopologyFile) -> Result<Topology> {
        if file.nodes.is_empty() {
            return Err(Error::Invalid("topology has no nodes".into()));
        }
        if !(file.span_km > 0.0) {
            return Err(Error::Invalid(format!("span_km must be positive, got {}", file.span_km)));
        }
        if file.wavelengths_per_fiber == 0 {
            return Err(Error::Invalid("wavelengths_per_fiber must be at least 1".into()));
        }
        if !(file.wavelength_gbps > 0.0) {
            return Err(Error::Invalid(format!(
                "wavelength_gbps must be positive, got {}",
                file.wavelength_gbps
            )));
        }

        let node_set: BTreeSet<NodeId> = file.nodes.iter().copied().collect();
        if node_set.len() != file.nodes.len() {
            return Err(Error::Invalid("duplicate node id".into()));
        }

        let mut directed: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
        let mut insert = |a: NodeId, b: NodeId, km: f64| -> Result<()> {
            if directed.insert((a, b), km).is_some() {
                return Err(Error::Invalid(format!("duplicate link ({a}, {b})")));
            }
            Ok(())
        };
        for entry in &file.links {
            for n in [entry.a, entry.b] {
                if !node_set.contains(&n) {
                    return Err(Error::Invalid(format!("link references unknown node {n}")));
                }
            }
            if entry.a == entry.b {
                return Err(Error::Invalid(format!("self loop at node {}", entry.a)));
            }
            if !(entry.km > 0.0) || !entry.km.is_finite() {
                return Err(Error::Invalid(format!(
                    "link ({}, {}) has non-positive distance {}",
                    entry.a, entry.b, entry.km
                )));
            }
            insert(entry.a, entry.b, entry.km)?;
            if entry.bidirectional {
                insert(entry.b, entry.a, entry.km)?;
            }
        }
        for (&(a, b), &km) in &directed {
            match directed.get(&(b, a)) {
                Some(&back) if back == km => {}
                Some(&back) => {
                    return Err(Error::Invalid(format!(
                        "asymmetric link ({a}, {b}): {km} km forward but {back} km back"
                    )))
                }
                None => return Err(Error::Invalid(format!("asymmetric link ({a}, {b}): no reverse link"))),
            }
        }

        let mut regen: BTreeMap<(NodeId, NodeId), u32> = BTreeMap::new();
        for entry in &file.regenerators {
            if !directed.contains_key(&(entry.a, entry.b)) {
                return Err(Error::Invalid(format!(
                    "regenerators declared on missing link ({}, {})",
                    entry.a, entry.b
                )));
            }
            regen.insert((entry.a, entry.b), entry.count);
            regen.insert((entry.b, entry.a), entry.count);
        }

        let mut optical_switch_w: BTreeMap<NodeId, f64> =
            node_set.iter().map(|&n| (n, DEFAULT_OPTICAL_SWITCH_W)).collect();
        match file.optical_switch_w {
            None => {}
            Some(OpticalSwitchPower::Uniform(w)) => optical_switch_w.values_mut().for_each(|v| *v = w),
            Some(OpticalSwitchPower::PerNode(map)) => {
                for (key, w) in map {
                    let id: NodeId = key
                        .parse()
                        .map_err(|_| Error::Invalid(format!("bad node id '{key}' in optical_switch_w")))?;
                    match optical_switch_w.get_mut(&id) {
                        Some(slot) => *slot = w,
                        None => return Err(Error::Invalid(format!("optical_switch_w names unknown node {id}"))),
                    }
                }
            }
        }
        if optical_switch_w.values().any(|&w| !(w >= 0.0)) {
            return Err(Error::Invalid("optical switch power must be non-negative".into()));
        }

        let mut links = Vec::with_capacity(directed.len());
        for (&(from, to), &km) in &directed {
            links.push(Link {
                from,
                to,
                km,
                regenerators: regen.get(&(from, to)).copied().unwrap_or(0),
                edfas: edfa_count(km, file.span_km)?,
            });
        }
        let mut neighbors: BTreeMap<NodeId, Vec<NodeId>> = node_set.iter().map(|&n| (n, Vec::new())).collect();
        for link in &links {
            neighbors.get_mut(&link.from).expect("validated node").push(link.to);
        }

        Ok(Topology {
            nodes: node_set.into_iter().collect(),
            links,
            neighbors,
            span_km: file.span_km,
            wavelengths_per_fiber: file.wavelengths_per_fiber,
            wavelength_gbps: file.wavelength_gbps,
            optical_switch_w,
        })
    }

    /// Node ids in ascending order. Model indices follow this order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_index(&self, id: NodeId) -> Option<usize> {
        self.nodes.binary_search(&id).ok()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.node_index(id).is_some()
    }

    /// Directed links sorted by `(from, to)`.
    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, from: NodeId, to: NodeId) -> Option<&Link> {
        self.links
            .binary_search_by(|l| (l.from, l.to).cmp(&(from, to)))
            .ok()
            .map(|i| &self.links[i])
    }

    /// Physical neighbours of `node` in ascending order.
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        self.neighbors.get(&node).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn span_km(&self) -> f64 {
        self.span_km
    }

    pub fn wavelengths_per_fiber(&self) -> u32 {
        self.wavelengths_per_fiber
    }

    pub fn wavelength_gbps(&self) -> f64 {
        self.wavelength_gbps
    }

    pub fn optical_switch_w(&self, node: NodeId) -> f64 {
        self.optical_switch_w.get(&node).copied().unwrap_or(DEFAULT_OPTICAL_SWITCH_W)
    }

    pub fn total_optical_switch_w(&self) -> f64 {
        self.optical_switch_w.values().sum()
    }

    /// True when the undirected physical graph is connected.
    pub fn is_connected(&self) -> bool {
        let mut seen = BTreeSet::new();
        let mut stack = vec![self.nodes[0]];
        while let Some(n) = stack.pop() {
            if seen.insert(n) {
                stack.extend(self.neighbors(n).iter().copied());
            }
        }
        seen.len() == self.nodes.len()
    }

    /// True when the undirected physical graph is a tree.
    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.links.len() == 2 * (self.nodes.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edfa_examples() {
        assert_eq!(edfa_count(80.0, 80.0).unwrap(), 2);
        assert_eq!(edfa_count(200.0, 80.0).unwrap(), 3);
        assert_eq!(edfa_count(79.0, 80.0).unwrap(), 1);
        assert!(edfa_count(0.0, 80.0).is_err());
        assert!(edfa_count(10.0, -1.0).is_err());
    }

    #[test]
    fn two_node_file() {
        let topo = Topology::from_json(
            r#"{"nodes":[1,2],"links":[{"a":1,"b":2,"km":80}],
                "span_km":80,"wavelengths_per_fiber":32,"wavelength_gbps":40}"#,
        )
        .unwrap();
        assert_eq!(topo.links().len(), 2);
        assert_eq!(topo.neighbors(1), &[2]);
        assert_eq!(topo.link(2, 1).unwrap().edfas, 2);
        assert_eq!(topo.total_optical_switch_w(), 170.0);
    }

    #[test]
    fn one_way_link_is_asymmetric() {
        let err = TopologyBuilder::new([1, 2]).directed_link(1, 2, 80.0).build().unwrap_err();
        assert!(err.to_string().contains("asymmetric"), "{err}");
        let err = TopologyBuilder::new([1, 2])
            .directed_link(1, 2, 80.0)
            .directed_link(2, 1, 90.0)
            .build()
            .unwrap_err();
        assert!(err.to_string().contains("asymmetric"), "{err}");
        TopologyBuilder::new([1, 2]).directed_link(1, 2, 80.0).directed_link(2, 1, 80.0).build().unwrap();
    }

    #[test]
    fn rejects_bad_links() {
        let dup = TopologyBuilder::new([1, 2]).link(1, 2, 80.0).link(2, 1, 80.0).build();
        assert!(dup.unwrap_err().to_string().contains("duplicate"));
        let neg = TopologyBuilder::new([1, 2]).link(1, 2, 0.0).build();
        assert!(neg.unwrap_err().to_string().contains("non-positive"));
        let unknown = TopologyBuilder::new([1, 2]).link(1, 3, 10.0).build();
        assert!(unknown.is_err());
        assert!(Topology::from_json("{not json").is_err());
    }

    #[test]
    fn per_node_optical_switch_override() {
        let topo = Topology::from_json(
            r#"{"nodes":[1,2,3],"links":[{"a":1,"b":2,"km":100},{"a":2,"b":3,"km":100}],
                "span_km":80,"wavelengths_per_fiber":32,"wavelength_gbps":40,
                "optical_switch_w":{"2":100},
                "regenerators":[{"a":2,"b":3,"count":1}]}"#,
        )
        .unwrap();
        assert_eq!(topo.optical_switch_w(1), 85.0);
        assert_eq!(topo.optical_switch_w(2), 100.0);
        assert_eq!(topo.link(3, 2).unwrap().regenerators, 1);
        assert!(topo.is_tree());
        let again = Topology::from_json(&topo.to_json().unwrap()).unwrap();
        assert_eq!(again, topo);
    }
}

//! Big-data workloads: chunks generated at every source node, the processing
//! node capabilities, and the background ("regular") traffic matrix.
//!
//! Generation is reproducible across platforms. Every random stream is a
//! PCG-XSL-RR 128/64 generator (`rand_pcg::Pcg64`) constructed with
//! `Pcg64::new(seed, stream)`, and uniforms are produced directly from
//! `next_u64` (see [`uniform`]) so no distribution-sampling code sits between
//! the generator and the instance. Streams: 1 = chunks, 2 = regular traffic,
//! 3 = server counts, 4 = storage.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::RngCore;
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{NodeId, Topology};

const STREAM_CHUNKS: u128 = 1;
const STREAM_TRAFFIC: u128 = 2;
const STREAM_SERVERS: u128 = 3;
const STREAM_STORAGE: u128 = 4;

/// Gb in one Tb and one Pb.
pub const GB_PER_TB: f64 = 1e3;
pub const GB_PER_PB: f64 = 1e6;

/// One big-data chunk generated at `source`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chunk {
    pub source: NodeId,
    /// 1-based index within the source node.
    pub index: u32,
    /// Volume before cleansing (Gb).
    pub raw_volume_gb: f64,
    /// Volume after cleansing (Gb).
    pub clean_volume_gb: f64,
    /// Processing reduction ratio, info volume / chunk volume.
    pub prr: f64,
    /// CPU demand (GHz).
    pub cpu_ghz: f64,
}

impl Chunk {
    fn validate(&self) -> Result<()> {
        if !(self.clean_volume_gb > 0.0 && self.clean_volume_gb <= self.raw_volume_gb) {
            return Err(Error::Invalid(format!(
                "chunk {}/{}: need 0 < clean ({}) <= raw ({})",
                self.source, self.index, self.clean_volume_gb, self.raw_volume_gb
            )));
        }
        if !(self.prr > 0.0 && self.prr <= 1.0) {
            return Err(Error::Invalid(format!("chunk {}/{}: PRR {} outside (0, 1]", self.source, self.index, self.prr)));
        }
        if !(self.cpu_ghz > 0.0) {
            return Err(Error::Invalid(format!("chunk {}/{}: CPU demand must be positive", self.source, self.index)));
        }
        Ok(())
    }
}

/// Info volume extracted from a chunk: `PRR x cleansed volume`.
pub fn info_volume(chunk: &Chunk) -> f64 {
    chunk.prr * chunk.clean_volume_gb
}

/// Capabilities of the processing node attached to a core node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeProfile {
    pub node: NodeId,
    pub servers: u32,
    pub max_server_ghz: f64,
    pub storage_gb: f64,
    pub switch_router_gbps: f64,
    #[serde(default = "yes")]
    pub dc_candidate: bool,
    #[serde(default = "yes")]
    pub bn_candidate: bool,
}

fn yes() -> bool {
    true
}

impl NodeProfile {
    /// Maximum processing workload of the node (GHz).
    pub fn max_workload_ghz(&self) -> f64 {
        self.servers as f64 * self.max_server_ghz
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Demand {
    pub s: NodeId,
    pub d: NodeId,
    pub gbps: f64,
}

/// A closed interval used for uniform draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Range {
        Range { lo, hi }
    }

    fn check(&self, what: &str, allow_zero: bool) -> Result<()> {
        let lo_ok = if allow_zero { self.lo >= 0.0 } else { self.lo > 0.0 };
        if !(lo_ok && self.lo <= self.hi && self.hi.is_finite()) {
            return Err(Error::Invalid(format!("invalid {what} range [{}, {}]", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

impl From<[f64; 2]> for Range {
    fn from(v: [f64; 2]) -> Self {
        Range::new(v[0], v[1])
    }
}

impl From<Range> for [f64; 2] {
    fn from(r: Range) -> Self {
        [r.lo, r.hi]
    }
}

/// Draw ranges for chunk generation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorkloadRanges {
    pub clean_gb: Range,
    pub raw_gb: Range,
    pub prr: Range,
    pub cpu_ghz: Range,
    /// Regular traffic per ordered node pair (Gbps).
    pub regular_gbps: Range,
}

impl Default for WorkloadRanges {
    fn default() -> Self {
        WorkloadRanges {
            clean_gb: Range::new(10.0, 220.0),
            raw_gb: Range::new(50.0, 300.0),
            prr: Range::new(0.01, 1.0),
            cpu_ghz: Range::new(1.0, 4.0),
            regular_gbps: Range::new(0.0, 20.0),
        }
    }
}

impl WorkloadRanges {
    fn validate(&self) -> Result<()> {
        self.clean_gb.check("cleansed volume", false)?;
        self.raw_gb.check("raw volume", false)?;
        self.prr.check("PRR", false)?;
        self.cpu_ghz.check("CPU", false)?;
        self.regular_gbps.check("regular traffic", true)?;
        if self.prr.hi > 1.0 {
            return Err(Error::Invalid("PRR above 1 is not supported".into()));
        }
        if self.clean_gb.lo > self.raw_gb.hi {
            return Err(Error::Invalid("cleansed volumes can never fit under raw volumes".into()));
        }
        Ok(())
    }
}

/// Storage scenario for the processing nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StorageScenario {
    /// Storage large enough for everything (10-70 Pb per node).
    A1,
    /// Limited storage (1-4 Tb per node).
    A2,
}

impl std::str::FromStr for StorageScenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a1" => Ok(StorageScenario::A1),
            "a2" => Ok(StorageScenario::A2),
            other => Err(Error::Invalid(format!("unknown scenario '{other}', expected a1 or a2"))),
        }
    }
}

impl std::fmt::Display for StorageScenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StorageScenario::A1 => "a1",
            StorageScenario::A2 => "a2",
        })
    }
}

/// Draw ranges for node profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProfileRanges {
    pub servers: (u32, u32),
    pub max_server_ghz: f64,
    pub a1_storage_gb: Range,
    pub a2_storage_gb: Range,
    /// Internal switch/router capacity. Treated as non-binding by default.
    pub switch_router_gbps: f64,
}

impl Default for ProfileRanges {
    fn default() -> Self {
        ProfileRanges {
            servers: (10, 30),
            max_server_ghz: 4.0,
            a1_storage_gb: Range::new(10.0 * GB_PER_PB, 70.0 * GB_PER_PB),
            a2_storage_gb: Range::new(1.0 * GB_PER_TB, 4.0 * GB_PER_TB),
            switch_router_gbps: 1e6,
        }
    }
}

/// Uniform draw on `[lo, hi]` from the top 53 bits of one 64-bit output.
pub fn uniform(rng: &mut Pcg64, range: Range) -> f64 {
    let unit = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    range.lo + (range.hi - range.lo) * unit
}

/// Integer draw on `[lo, hi]` by modulo reduction.
pub fn uniform_int(rng: &mut Pcg64, lo: u32, hi: u32) -> u32 {
    let span = (hi - lo) as u64 + 1;
    lo + (rng.next_u64() % span) as u32
}

fn stream(seed: u64, stream: u128) -> Pcg64 {
    Pcg64::new(seed as u128, stream)
}

/// Node profiles for a storage scenario.
///
/// Server counts come from their own stream, so A1 and A2 profiles drawn with
/// the same seed differ only in storage.
pub fn scenario_profiles(
    kind: StorageScenario,
    seed: u64,
    topology: &Topology,
    ranges: &ProfileRanges,
) -> Result<Vec<NodeProfile>> {
    if ranges.servers.0 > ranges.servers.1 {
        return Err(Error::Invalid("servers range lo > hi".into()));
    }
    if !(ranges.max_server_ghz > 0.0) {
        return Err(Error::Invalid("max_server_ghz must be positive".into()));
    }
    let storage = match kind {
        StorageScenario::A1 => ranges.a1_storage_gb,
        StorageScenario::A2 => ranges.a2_storage_gb,
    };
    storage.check("storage", true)?;
    let mut servers_rng = stream(seed, STREAM_SERVERS);
    let mut storage_rng = stream(seed, STREAM_STORAGE);
    Ok(topology
        .nodes()
        .iter()
        .map(|&node| NodeProfile {
            node,
            servers: uniform_int(&mut servers_rng, ranges.servers.0, ranges.servers.1),
            max_server_ghz: ranges.max_server_ghz,
            storage_gb: uniform(&mut storage_rng, storage),
            switch_router_gbps: ranges.switch_router_gbps,
            dc_candidate: true,
            bn_candidate: true,
        })
        .collect())
}

/// Everything the model needs to know about the demand side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadInstance {
    pub beta: u32,
    /// Chunks ordered by source node, then index.
    pub chunks: Vec<Chunk>,
    /// One profile per topology node, in node order.
    pub profiles: Vec<NodeProfile>,
    /// Non-zero regular traffic demands, ordered by `(s, d)`.
    pub regular_traffic: Vec<Demand>,
}

/// Generates `beta` chunks per node and the regular traffic matrix. Profiles
/// default to the A1 scenario for the same seed.
pub fn generate_workload(
    ranges: &WorkloadRanges,
    beta: u32,
    seed: u64,
    topology: &Topology,
) -> Result<WorkloadInstance> {
    ranges.validate()?;
    if beta == 0 {
        return Err(Error::Invalid("beta must be at least 1".into()));
    }
    if topology.node_count() == 0 {
        return Err(Error::Invalid("topology has no nodes".into()));
    }

    let mut rng = stream(seed, STREAM_CHUNKS);
    let mut chunks = Vec::with_capacity(topology.node_count() * beta as usize);
    for &source in topology.nodes() {
        for index in 1..=beta {
            let raw = uniform(&mut rng, ranges.raw_gb);
            let mut clean = uniform(&mut rng, ranges.clean_gb);
            let mut tries = 0;
            while clean > raw {
                if ranges.clean_gb.lo > raw || tries >= 10_000 {
                    clean = ranges.clean_gb.lo.min(raw);
                    break;
                }
                clean = uniform(&mut rng, ranges.clean_gb);
                tries += 1;
            }
            let prr = uniform(&mut rng, ranges.prr);
            let cpu = uniform(&mut rng, ranges.cpu_ghz);
            chunks.push(Chunk { source, index, raw_volume_gb: raw, clean_volume_gb: clean, prr, cpu_ghz: cpu });
        }
    }

    let mut traffic_rng = stream(seed, STREAM_TRAFFIC);
    let mut regular_traffic = Vec::new();
    for &s in topology.nodes() {
        for &d in topology.nodes() {
            if s == d {
                continue;
            }
            let gbps = uniform(&mut traffic_rng, ranges.regular_gbps);
            if gbps > 0.0 {
                regular_traffic.push(Demand { s, d, gbps });
            }
        }
    }

    let profiles = scenario_profiles(StorageScenario::A1, seed, topology, &ProfileRanges::default())?;
    Ok(WorkloadInstance { beta, chunks, profiles, regular_traffic })
}

impl WorkloadInstance {
    pub fn with_profiles(mut self, profiles: Vec<NodeProfile>) -> Self {
        self.profiles = profiles;
        self
    }

    pub fn with_regular_traffic(mut self, demands: Vec<Demand>) -> Self {
        self.regular_traffic = demands;
        self
    }

    /// Chunks generated at `source`.
    pub fn chunks_at(&self, source: NodeId) -> impl Iterator<Item = &Chunk> {
        self.chunks.iter().filter(move |c| c.source == source)
    }

    pub fn profile(&self, node: NodeId) -> Option<&NodeProfile> {
        self.profiles.iter().find(|p| p.node == node)
    }

    pub fn profile_mut(&mut self, node: NodeId) -> Option<&mut NodeProfile> {
        self.profiles.iter_mut().find(|p| p.node == node)
    }

    /// Regular traffic as a map keyed by `(s, d)`.
    pub fn regular_map(&self) -> BTreeMap<(NodeId, NodeId), f64> {
        self.regular_traffic.iter().map(|d| ((d.s, d.d), d.gbps)).collect()
    }

    /// Checks the instance against a topology and the type invariants.
    pub fn validate(&self, topology: &Topology) -> Result<()> {
        for chunk in &self.chunks {
            if !topology.contains(chunk.source) {
                return Err(Error::Invalid(format!("chunk source {} is not a topology node", chunk.source)));
            }
            chunk.validate()?;
        }
        let mut keys: Vec<(NodeId, u32)> = self.chunks.iter().map(|c| (c.source, c.index)).collect();
        let sorted = keys.windows(2).all(|w| w[0] < w[1]);
        keys.dedup();
        if keys.len() != self.chunks.len() {
            return Err(Error::Invalid("duplicate chunk (source, index)".into()));
        }
        if !sorted {
            return Err(Error::Invalid("chunks must be ordered by (source, index)".into()));
        }
        let profile_nodes: Vec<NodeId> = self.profiles.iter().map(|p| p.node).collect();
        if profile_nodes != topology.nodes() {
            return Err(Error::Invalid("node profiles do not match the topology node set".into()));
        }
        for p in &self.profiles {
            if !(p.storage_gb >= 0.0 && p.switch_router_gbps >= 0.0 && p.max_server_ghz > 0.0) {
                return Err(Error::Invalid(format!("node {} has a negative capacity", p.node)));
            }
        }
        for d in &self.regular_traffic {
            if d.s == d.d {
                return Err(Error::Invalid(format!("regular traffic from node {} to itself", d.s)));
            }
            if !(d.gbps >= 0.0) || !topology.contains(d.s) || !topology.contains(d.d) {
                return Err(Error::Invalid(format!("bad regular demand {} -> {}", d.s, d.d)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<WorkloadInstance> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<WorkloadInstance> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        WorkloadInstance::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::TopologyBuilder;

    fn line(n: u32) -> Topology {
        let mut b = TopologyBuilder::new(1..=n);
        for i in 1..n {
            b = b.link(i, i + 1, 100.0);
        }
        b.build().unwrap()
    }

    #[test]
    fn info_volume_examples() {
        let mut chunk =
            Chunk { source: 1, index: 1, raw_volume_gb: 10.0, clean_volume_gb: 10.0, prr: 0.001, cpu_ghz: 1.0 };
        assert!((info_volume(&chunk) - 0.01).abs() < 1e-15);
        chunk.clean_volume_gb = 100.0;
        chunk.prr = 1.0;
        assert_eq!(info_volume(&chunk), 100.0);
        // 6.9 MB at PRR 0.0086 gives about 60 KB.
        chunk.clean_volume_gb = 6.9;
        chunk.prr = 0.0086;
        assert!((info_volume(&chunk) * 1000.0 - 59.34).abs() < 1e-9);
    }

    #[test]
    fn degenerate_ranges() {
        let ranges = WorkloadRanges {
            clean_gb: Range::new(50.0, 50.0),
            raw_gb: Range::new(50.0, 50.0),
            ..WorkloadRanges::default()
        };
        let w = generate_workload(&ranges, 1, 3, &line(2)).unwrap();
        assert_eq!(w.chunks.len(), 2);
        assert!(w.chunks.iter().all(|c| c.clean_volume_gb == 50.0 && c.raw_volume_gb == 50.0));
    }

    #[test]
    fn rejects_bad_ranges() {
        let topo = line(2);
        let bad = WorkloadRanges { prr: Range::new(0.5, 0.1), ..Default::default() };
        assert!(generate_workload(&bad, 1, 1, &topo).is_err());
        let bad = WorkloadRanges { cpu_ghz: Range::new(0.0, 1.0), ..Default::default() };
        assert!(generate_workload(&bad, 1, 1, &topo).is_err());
        assert!(generate_workload(&WorkloadRanges::default(), 0, 1, &topo).is_err());
    }

    #[test]
    fn profiles_by_scenario() {
        let topo = line(5);
        let ranges = ProfileRanges::default();
        for seed in 0..10 {
            let a1 = scenario_profiles(StorageScenario::A1, seed, &topo, &ranges).unwrap();
            let a2 = scenario_profiles(StorageScenario::A2, seed, &topo, &ranges).unwrap();
            assert!(a1.iter().all(|p| p.storage_gb >= 1e7 && p.storage_gb <= 7e7));
            assert!(a2.iter().all(|p| p.storage_gb >= 1000.0 && p.storage_gb <= 4000.0));
            for (x, y) in a1.iter().zip(&a2) {
                assert_eq!(x.servers, y.servers);
                assert!((10..=30).contains(&x.servers));
            }
            assert_eq!(a2, scenario_profiles(StorageScenario::A2, seed, &topo, &ranges).unwrap());
        }
        assert!("a3".parse::<StorageScenario>().is_err());
    }

    #[test]
    fn regular_traffic_has_no_self_demand() {
        let w = generate_workload(&WorkloadRanges::default(), 2, 11, &line(4)).unwrap();
        assert!(w.regular_traffic.iter().all(|d| d.s != d.d && d.gbps <= 20.0));
        w.validate(&line(4)).unwrap();
    }
}

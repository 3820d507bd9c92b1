//! Small instances for cross-checking the solver against the oracle.

use rand_pcg::Pcg64;

use crate::error::Result;
use crate::model::{Approach, ModeFlags};
use crate::topology::{Topology, TopologyBuilder};
use crate::workload::{uniform, uniform_int, Chunk, Demand, NodeProfile, Range, WorkloadInstance};

const TINY_STREAM: u128 = 0x7469_6e79;

#[derive(Debug, Clone)]
pub struct TinyInstance {
    pub seed: u64,
    pub topology: Topology,
    pub workload: WorkloadInstance,
    pub flags: ModeFlags,
}

impl TinyInstance {
    /// One chunk, one data centre, no backup and no regular traffic: a
    /// single placement decision over unique tree routes.
    pub fn single_demand(&self) -> bool {
        self.workload.chunks.len() == 1
            && self.flags.dcn == 1
            && !self.flags.backup
            && self.workload.regular_traffic.is_empty()
    }
}

fn profile(node: u32, servers: u32, dc: bool, bn: bool) -> NodeProfile {
    NodeProfile {
        node,
        servers,
        max_server_ghz: 4.0,
        storage_gb: 1e7,
        switch_router_gbps: 1e6,
        dc_candidate: dc,
        bn_candidate: bn,
    }
}

/// Random tree of 2 to 4 nodes with 1 to 3 chunks. Every fourth seed is a
/// single-demand instance.
pub fn tiny_instance(seed: u64) -> Result<TinyInstance> {
    let mut rng = Pcg64::new(seed as u128, TINY_STREAM);
    let single = seed % 4 == 0;
    let n = uniform_int(&mut rng, 2, 4);
    let mut builder = TopologyBuilder::new(1..=n);
    for k in 2..=n {
        let parent = uniform_int(&mut rng, 1, k - 1);
        let km = (uniform(&mut rng, Range::new(80.0, 1600.0)) / 10.0).round() * 10.0;
        builder = builder.link(parent, k, km);
    }
    let topology = builder.build()?;

    let count = if single { 1 } else { uniform_int(&mut rng, 1, 3) };
    let mut chunks: Vec<Chunk> = (0..count)
        .map(|k| {
            let raw = (uniform(&mut rng, Range::new(20.0, 400.0))).round();
            let clean = (raw * uniform(&mut rng, Range::new(0.3, 1.0))).round().max(10.0).min(raw);
            Chunk {
                source: uniform_int(&mut rng, 1, n),
                index: k + 1,
                raw_volume_gb: raw,
                clean_volume_gb: clean,
                prr: (uniform(&mut rng, Range::new(0.1, 0.5)) * 100.0).round() / 100.0,
                cpu_ghz: (uniform(&mut rng, Range::new(1.0, 12.0))).round(),
            }
        })
        .collect();
    chunks.sort_by_key(|c| c.source);
    let mut next = std::collections::BTreeMap::new();
    for c in &mut chunks {
        let i = next.entry(c.source).or_insert(0);
        *i += 1;
        c.index = *i;
    }

    let mut profiles: Vec<NodeProfile> = (1..=n)
        .map(|node| {
            let servers = uniform_int(&mut rng, 1, 3);
            let dc = uniform_int(&mut rng, 0, 3) > 0;
            let bn = uniform_int(&mut rng, 0, 3) > 0;
            profile(node, servers, dc, bn)
        })
        .collect();
    if !profiles.iter().any(|p| p.dc_candidate) {
        let k = uniform_int(&mut rng, 0, n - 1) as usize;
        profiles[k].dc_candidate = true;
    }

    let mut regular_traffic = Vec::new();
    if !single && uniform_int(&mut rng, 0, 1) == 1 {
        for s in 1..=n {
            for d in 1..=n {
                if s != d && uniform_int(&mut rng, 0, 2) == 0 {
                    let gbps = uniform(&mut rng, Range::new(1.0, 30.0)).round();
                    regular_traffic.push(Demand { s, d, gbps });
                }
            }
        }
    }

    let candidates = profiles.iter().filter(|p| p.dc_candidate).count() as u32;
    let approach = if uniform_int(&mut rng, 0, 1) == 0 { Approach::Green } else { Approach::Classical };
    let backup = !single && uniform_int(&mut rng, 0, 2) == 0;
    let dcn = if single || candidates < 2 { 1 } else { uniform_int(&mut rng, 1, 2) };
    let flags = ModeFlags { approach, backup, dcn, ..Default::default() };
    let workload = WorkloadInstance { beta: count, chunks, profiles, regular_traffic };
    Ok(TinyInstance { seed, topology, workload, flags })
}

/// Two nodes 80 km apart, one 100 Gb chunk at node 1 and the only data-centre
/// candidate at node 2, under the classical approach. Hand count: 2.5 chunk
/// ports, 3 channels, 3 wavelengths, 1 fibre and 2 EDFAs, giving
/// `(825 * 2.5 + 825 * 3 + 167 * 3 + 55 * 2 + 170) * 1.5 = 7977.75` W.
pub fn golden_instance() -> Result<TinyInstance> {
    let topology = TopologyBuilder::new([1, 2]).link(1, 2, 80.0).build()?;
    let workload = WorkloadInstance {
        beta: 1,
        chunks: vec![Chunk { source: 1, index: 1, raw_volume_gb: 100.0, clean_volume_gb: 100.0, prr: 0.05, cpu_ghz: 2.0 }],
        profiles: vec![profile(1, 10, false, true), profile(2, 10, true, true)],
        regular_traffic: vec![],
    };
    let flags = ModeFlags { approach: Approach::Classical, dcn: 1, ..Default::default() };
    Ok(TinyInstance { seed: 0, topology, workload, flags })
}

pub const GOLDEN_NETWORK_W: f64 = 7977.75;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_valid_and_reproducible() {
        for seed in 0..40 {
            let t = tiny_instance(seed).unwrap();
            t.workload.validate(&t.topology).unwrap();
            assert!(t.topology.is_tree());
            assert!(t.workload.chunks.len() <= 3 && t.topology.node_count() <= 4);
            assert!(seed % 4 != 0 || t.single_demand());
            assert_eq!(tiny_instance(seed).unwrap().workload, t.workload);
        }
    }
}

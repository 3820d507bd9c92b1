//! Power consumption of the IP-over-WDM layer and of the processing nodes,
//! evaluated directly from variable values.
//!
//! Nothing here touches the optimisation model: the functions read an
//! [`Assignment`] by variable name so they can audit solver output, score
//! oracle candidates, and report breakdowns.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::names;
use crate::topology::{NodeId, Topology};
use crate::workload::WorkloadInstance;

/// Device powers and efficiency factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PowerParams {
    /// Router port (W).
    pub pr: f64,
    /// Transponder (W).
    pub ptr: f64,
    /// Regenerator (W).
    pub prg: f64,
    /// EDFA (W).
    pub pe: f64,
    /// PUE of the IP-over-WDM network.
    pub pun: f64,
    /// PUE of processing nodes and data centres.
    pub pu: f64,
    /// Server maximum power (W).
    pub smp: f64,
    /// Server maximum workload (GHz).
    pub msw: f64,
    /// Switch energy per bit (W/Gbps).
    pub seb: f64,
    /// Router energy per bit (W/Gbps).
    pub reb: f64,
    /// Switch, router and storage redundancy.
    pub rs: f64,
    pub rr: f64,
    pub rsg: f64,
    /// PN/DC storage power (W/Gb).
    pub psg: f64,
    /// Backup-node storage power (W/Gb).
    pub psb: f64,
}

impl Default for PowerParams {
    fn default() -> Self {
        PowerParams {
            pr: 825.0,
            ptr: 167.0,
            prg: 334.0,
            pe: 55.0,
            pun: 1.5,
            pu: 2.5,
            smp: 300.0,
            msw: 4.0,
            seb: 11.875,
            reb: 7.727,
            rs: 1.0,
            rr: 1.0,
            rsg: 1.0,
            psg: 0.008,
            psb: 0.008,
        }
    }
}

impl PowerParams {
    /// Server power per GHz.
    pub fn delta(&self) -> f64 {
        self.smp / self.msw
    }

    /// Internal switch + router energy per unit of traffic.
    pub fn switching_w_per_gbps(&self) -> f64 {
        self.rs * self.seb + self.rr * self.reb
    }

    pub fn validate(&self) -> Result<()> {
        let powers = [
            self.pr, self.ptr, self.prg, self.pe, self.smp, self.seb, self.reb, self.rs, self.rr, self.rsg,
            self.psg, self.psb,
        ];
        if powers.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::Invalid("power parameters must be finite and non-negative".into()));
        }
        if !(self.msw > 0.0) {
            return Err(Error::Invalid("MSW must be positive".into()));
        }
        if !(self.pun >= 1.0 && self.pu >= 1.0) {
            return Err(Error::Invalid("PUE factors must be at least 1".into()));
        }
        Ok(())
    }
}

/// How the chunk terms of the internal switching power are read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchingReading {
    /// Chunk traffic counted once, at whichever node receives it; info counted
    /// at the sending PN and at the receiving DC.
    #[default]
    ReceiverSplit,
    /// All four sums exactly as printed, so chunk traffic is counted twice.
    Literal,
}

/// Variable values keyed by variable name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(BTreeMap<String, f64>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        self.0.get(name).copied().ok_or_else(|| Error::MissingValue(name.to_string()))
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) {
        self.0.insert(name.into(), value);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Multiplies every value by `k`.
    pub fn scaled(&self, k: f64) -> Assignment {
        Assignment(self.0.iter().map(|(n, v)| (n.clone(), v * k)).collect())
    }
}

impl FromIterator<(String, f64)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (String, f64)>>(iter: T) -> Self {
        Assignment(iter.into_iter().collect())
    }
}

/// The five IP-over-WDM components, unscaled by PUE.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkPower {
    pub router_ports_w: f64,
    pub transponders_w: f64,
    pub regenerators_w: f64,
    pub edfas_w: f64,
    pub optical_switches_w: f64,
}

impl NetworkPower {
    pub fn sum(&self) -> f64 {
        self.router_ports_w + self.transponders_w + self.regenerators_w + self.edfas_w + self.optical_switches_w
    }
}

/// The four processing components, unscaled by PUE.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ProcessingPower {
    pub internal_switch_router_w: f64,
    pub servers_w: f64,
    pub pn_dc_storage_w: f64,
    pub bn_storage_w: f64,
}

impl ProcessingPower {
    pub fn sum(&self) -> f64 {
        self.internal_switch_router_w + self.servers_w + self.pn_dc_storage_w + self.bn_storage_w
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub router_ports_w: f64,
    pub transponders_w: f64,
    pub regenerators_w: f64,
    pub edfas_w: f64,
    pub optical_switches_w: f64,
    pub internal_switch_router_w: f64,
    pub servers_w: f64,
    pub pn_dc_storage_w: f64,
    pub bn_storage_w: f64,
    /// PUN x network components.
    pub network_total_w: f64,
    /// PU x processing components.
    pub processing_total_w: f64,
    pub objective_w: f64,
}

/// Router ports, transponders, regenerators, EDFAs and optical switches.
pub fn network_power(assignment: &Assignment, topology: &Topology, params: &PowerParams) -> Result<NetworkPower> {
    let mut out = NetworkPower::default();
    for &i in topology.nodes() {
        let ports = assignment.get(&names::ab(i))?
            + assignment.get(&names::ar(i))?
            + assignment.get(&names::ach(i))?
            + assignment.get(&names::ai(i))?;
        out.router_ports_w += params.pr * ports;
        for &j in topology.nodes() {
            if i != j {
                out.router_ports_w += params.pr * assignment.get(&names::c(i, j))?;
            }
        }
        out.optical_switches_w += topology.optical_switch_w(i);
    }
    for link in topology.links() {
        let w = assignment.get(&names::w(link.from, link.to))?;
        let f = assignment.get(&names::f(link.from, link.to))?;
        out.transponders_w += params.ptr * w;
        out.regenerators_w += params.prg * w * link.regenerators as f64;
        out.edfas_w += params.pe * link.edfas as f64 * f;
    }
    Ok(out)
}

/// Internal switching, servers, PN/DC storage and BN storage.
pub fn processing_power(
    assignment: &Assignment,
    workload: &WorkloadInstance,
    params: &PowerParams,
    reading: SwitchingReading,
) -> Result<ProcessingPower> {
    let nodes: Vec<NodeId> = workload.profiles.iter().map(|p| p.node).collect();
    let mut is_dc = BTreeMap::new();
    for &d in &nodes {
        is_dc.insert(d, assignment.get(&names::dc(d))? > 0.5);
    }

    let mut backup = 0.0;
    let mut chunk_at_pn = 0.0;
    let mut received_at_dc = 0.0;
    let mut info_sent = 0.0;
    for &a in &nodes {
        for &b in &nodes {
            backup += assignment.get(&names::bch(a, b))?;
            let cht = assignment.get(&names::cht(a, b))?;
            let inf = assignment.get(&names::inf(a, b))?;
            info_sent += inf;
            match reading {
                SwitchingReading::ReceiverSplit => {
                    if is_dc[&b] {
                        received_at_dc += cht + inf;
                    } else {
                        chunk_at_pn += cht;
                    }
                }
                SwitchingReading::Literal => {
                    chunk_at_pn += cht;
                    received_at_dc += cht + inf;
                }
            }
        }
    }
    let k = params.switching_w_per_gbps();
    let internal = 2.0 * backup * k + chunk_at_pn * k + received_at_dc * k + info_sent * k;

    let mut out = ProcessingPower { internal_switch_router_w: internal, ..Default::default() };
    for &p in &nodes {
        out.servers_w += params.delta() * assignment.get(&names::pnw(p))?;
        out.pn_dc_storage_w += assignment.get(&names::sch(p))? * params.rsg * params.psg;
        out.bn_storage_w += assignment.get(&names::sbch(p))? * params.rsg * params.psb;
    }
    Ok(out)
}

/// Full breakdown with PUE scaling; `objective_w` is the minimised quantity.
pub fn objective_value(
    assignment: &Assignment,
    topology: &Topology,
    workload: &WorkloadInstance,
    params: &PowerParams,
    reading: SwitchingReading,
) -> Result<PowerBreakdown> {
    let net = network_power(assignment, topology, params)?;
    let proc = processing_power(assignment, workload, params, reading)?;
    let network_total_w = params.pun * net.sum();
    let processing_total_w = params.pu * proc.sum();
    Ok(PowerBreakdown {
        router_ports_w: net.router_ports_w,
        transponders_w: net.transponders_w,
        regenerators_w: net.regenerators_w,
        edfas_w: net.edfas_w,
        optical_switches_w: net.optical_switches_w,
        internal_switch_router_w: proc.internal_switch_router_w,
        servers_w: proc.servers_w,
        pn_dc_storage_w: proc.pn_dc_storage_w,
        bn_storage_w: proc.bn_storage_w,
        network_total_w,
        processing_total_w,
        objective_w: network_total_w + processing_total_w,
    })
}

/// PUN-scaled network power attributed to each node: its router ports, the
/// wavelengths it originates, the line devices of its outgoing fibres, and its
/// optical switch. The values sum to the network total.
pub fn node_network_power(
    assignment: &Assignment,
    topology: &Topology,
    params: &PowerParams,
) -> Result<BTreeMap<NodeId, f64>> {
    let mut out = BTreeMap::new();
    for &s in topology.nodes() {
        let mut p = params.pr
            * (assignment.get(&names::ab(s))?
                + assignment.get(&names::ar(s))?
                + assignment.get(&names::ach(s))?
                + assignment.get(&names::ai(s))?);
        for &j in topology.nodes() {
            if j != s {
                p += params.pr * assignment.get(&names::c(s, j))?;
            }
        }
        for &n in topology.neighbors(s) {
            let link = topology.link(s, n).expect("neighbour link exists");
            p += (params.ptr + params.prg * link.regenerators as f64) * assignment.get(&names::w(s, n))?;
            p += params.pe * link.edfas as f64 * assignment.get(&names::f(s, n))?;
        }
        p += topology.optical_switch_w(s);
        out.insert(s, params.pun * p);
    }
    Ok(out)
}

/// Least non-renewable power for a fixed assignment when node `s` can draw up
/// to `solar_kw[s]` kW of solar power.
pub fn non_renewable_w(node_power_w: &BTreeMap<NodeId, f64>, solar_kw: &BTreeMap<NodeId, f64>) -> f64 {
    node_power_w
        .iter()
        .map(|(n, p)| (p - 1000.0 * solar_kw.get(n).copied().unwrap_or(0.0)).max(0.0))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::TopologyBuilder;
    use crate::workload::{Chunk, NodeProfile};

    fn two_nodes() -> Topology {
        TopologyBuilder::new([1, 2]).link(1, 2, 80.0).build().unwrap()
    }

    fn zero_assignment(topo: &Topology) -> Assignment {
        let mut a = Assignment::new();
        for &i in topo.nodes() {
            for name in [names::ab(i), names::ar(i), names::ach(i), names::ai(i)] {
                a.set(name, 0.0);
            }
            for name in [names::pnw(i), names::sch(i), names::sbch(i), names::dc(i)] {
                a.set(name, 0.0);
            }
            for &j in topo.nodes() {
                if i != j {
                    a.set(names::c(i, j), 0.0);
                }
                for name in [names::bch(i, j), names::cht(i, j), names::inf(i, j)] {
                    a.set(name, 0.0);
                }
            }
        }
        for l in topo.links() {
            a.set(names::w(l.from, l.to), 0.0);
            a.set(names::f(l.from, l.to), 0.0);
        }
        a
    }

    fn workload(topo: &Topology) -> WorkloadInstance {
        WorkloadInstance {
            beta: 1,
            chunks: vec![Chunk {
                source: 1,
                index: 1,
                raw_volume_gb: 100.0,
                clean_volume_gb: 100.0,
                prr: 0.05,
                cpu_ghz: 4.0,
            }],
            profiles: topo
                .nodes()
                .iter()
                .map(|&node| NodeProfile {
                    node,
                    servers: 10,
                    max_server_ghz: 4.0,
                    storage_gb: 1e7,
                    switch_router_gbps: 1e6,
                    dc_candidate: true,
                    bn_candidate: true,
                })
                .collect(),
            regular_traffic: vec![],
        }
    }

    #[test]
    fn delta_is_exact_ratio() {
        let p = PowerParams::default();
        assert_eq!(p.delta(), 75.0);
        p.validate().unwrap();
        assert!(PowerParams { pun: 0.9, ..p.clone() }.validate().is_err());
        assert!(PowerParams { pr: -1.0, ..p }.validate().is_err());
    }

    #[test]
    fn zero_traffic_network() {
        let topo = two_nodes();
        let net = network_power(&zero_assignment(&topo), &topo, &PowerParams::default()).unwrap();
        assert_eq!(net.router_ports_w + net.transponders_w + net.regenerators_w + net.edfas_w, 0.0);
        assert_eq!(net.optical_switches_w, 170.0);
    }

    #[test]
    fn aggregation_port_examples() {
        let topo = two_nodes();
        let mut a = zero_assignment(&topo);
        // 320 Gbps at 40 Gbps per port is 8 ports.
        a.set(names::ach(1), 320.0 / 40.0);
        let net = network_power(&a, &topo, &PowerParams::default()).unwrap();
        assert_eq!(net.router_ports_w, 6600.0);
        a.set(names::ach(1), 1.0);
        let net = network_power(&a, &topo, &PowerParams::default()).unwrap();
        assert_eq!(net.router_ports_w, 825.0);
    }

    #[test]
    fn processing_examples() {
        let topo = two_nodes();
        let w = workload(&topo);
        let params = PowerParams::default();
        let mut a = zero_assignment(&topo);
        let zero = processing_power(&a, &w, &params, SwitchingReading::default()).unwrap();
        assert_eq!(zero.sum(), 0.0);
        a.set(names::pnw(1), 4.0);
        a.set(names::sch(2), 100.0);
        let p = processing_power(&a, &w, &params, SwitchingReading::default()).unwrap();
        assert_eq!(p.servers_w, 300.0);
        assert!((p.pn_dc_storage_w - 0.8).abs() < 1e-12);
    }

    #[test]
    fn switching_readings_differ_only_on_chunks() {
        let topo = two_nodes();
        let w = workload(&topo);
        let params = PowerParams::default();
        let k = params.switching_w_per_gbps();
        let mut a = zero_assignment(&topo);
        a.set(names::dc(2), 1.0);
        a.set(names::cht(1, 2), 100.0);
        a.set(names::inf(2, 2), 5.0);
        a.set(names::bch(1, 1), 10.0);
        let split = processing_power(&a, &w, &params, SwitchingReading::ReceiverSplit).unwrap();
        let literal = processing_power(&a, &w, &params, SwitchingReading::Literal).unwrap();
        assert!((split.internal_switch_router_w - k * (20.0 + 100.0 + 10.0)).abs() < 1e-9);
        assert!((literal.internal_switch_router_w - k * (20.0 + 200.0 + 10.0)).abs() < 1e-9);
    }

    #[test]
    fn zero_workload_objective_is_optical_switches() {
        let topo = two_nodes();
        let w = WorkloadInstance { chunks: vec![], ..workload(&topo) };
        let params = PowerParams::default();
        let b = objective_value(&zero_assignment(&topo), &topo, &w, &params, SwitchingReading::default()).unwrap();
        assert_eq!(b.objective_w, 1.5 * 170.0);
        assert_eq!(b.network_total_w, 1.5 * 170.0);
    }

    #[test]
    fn missing_values_are_errors() {
        let topo = two_nodes();
        let err = network_power(&Assignment::new(), &topo, &PowerParams::default()).unwrap_err();
        assert!(matches!(err, Error::MissingValue(_)));
    }

    #[test]
    fn node_attribution_sums_to_total() {
        let topo = TopologyBuilder::new([1, 2, 3]).link(1, 2, 500.0).link(2, 3, 90.0).regenerators(1, 2, 2).build().unwrap();
        let mut a = zero_assignment(&topo);
        a.set(names::c(1, 3), 2.0);
        a.set(names::w(1, 2), 2.0);
        a.set(names::w(2, 3), 2.0);
        a.set(names::f(1, 2), 1.0);
        a.set(names::f(2, 3), 1.0);
        a.set(names::ach(1), 1.7);
        let params = PowerParams::default();
        let per_node = node_network_power(&a, &topo, &params).unwrap();
        let total = params.pun * network_power(&a, &topo, &params).unwrap().sum();
        assert!((per_node.values().sum::<f64>() - total).abs() < 1e-9);
        assert_eq!(non_renewable_w(&per_node, &BTreeMap::new()), per_node.values().sum::<f64>());
        let all_sun: BTreeMap<NodeId, f64> = topo.nodes().iter().map(|&n| (n, 1000.0)).collect();
        assert_eq!(non_renewable_w(&per_node, &all_sun), 0.0);
    }
}

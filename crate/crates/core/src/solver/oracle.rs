//! Exhaustive search over tiny instances, independent of the LP code.
//!
//! Every placement of chunks, data centres and the backup node is tried; each
//! processing node sends all of its information to one data centre; each
//! node pair's traffic follows one simple virtual path, and each used virtual
//! link's lightpaths follow one simple physical path. Wavelength channels and
//! fibres are counted by ceilings, and candidates are compared through the
//! power model. The oracle explores a subset of the model's feasible region,
//! so its optimum can only match or exceed the solver's.

use crate::error::{Error, Result};
use crate::model::{Approach, ModeFlags};
use crate::names;
use crate::power::{objective_value, Assignment, PowerBreakdown, PowerParams};
use crate::topology::{NodeId, Topology};
use crate::workload::WorkloadInstance;

pub const ORACLE_MAX_NODES: usize = 4;
pub const ORACLE_MAX_CHUNKS: usize = 3;
const MAX_ROUTINGS: u64 = 20_000_000;
const CEIL_EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub objective: f64,
    pub breakdown: PowerBreakdown,
    pub assignment: Assignment,
    pub data_centres: Vec<NodeId>,
    pub backup_node: Option<NodeId>,
    /// Routings evaluated across all placements.
    pub routings: u64,
}

fn ceil(x: f64) -> f64 {
    (x - CEIL_EPS).ceil().max(0.0)
}

/// All simple paths from `a` to `z`, as node sequences, where `next(u)` lists
/// the successors of `u`.
fn simple_paths(a: usize, z: usize, n: usize, next: &dyn Fn(usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    fn walk(u: usize, z: usize, seen: &mut Vec<bool>, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>, next: &dyn Fn(usize) -> Vec<usize>) {
        if u == z {
            out.push(path.clone());
            return;
        }
        for v in next(u) {
            if !seen[v] {
                seen[v] = true;
                path.push(v);
                walk(v, z, seen, path, out, next);
                path.pop();
                seen[v] = false;
            }
        }
    }
    let mut seen = vec![false; n];
    seen[a] = true;
    let mut out = Vec::new();
    walk(a, z, &mut seen, &mut vec![a], &mut out, next);
    out
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &first) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Advances a mixed-radix counter; false once it wraps around.
fn advance(counter: &mut [usize], radix: &[usize]) -> bool {
    for (c, &r) in counter.iter_mut().zip(radix) {
        *c += 1;
        if *c < r {
            return true;
        }
        *c = 0;
    }
    false
}

struct Net<'a> {
    topo: &'a Topology,
    params: &'a PowerParams,
    ids: Vec<NodeId>,
    /// Physical links as (from, to) indices with their per-wavelength and
    /// per-fibre costs.
    links: Vec<(usize, usize, f64, f64)>,
    /// Simple virtual paths for each ordered pair.
    virtual_paths: Vec<Vec<Vec<Vec<usize>>>>,
    /// Simple physical paths for each ordered pair, as link indices.
    physical_paths: Vec<Vec<Vec<Vec<usize>>>>,
}

/// Cheapest routing found for one demand matrix.
struct Routing {
    cost: f64,
    channels: Vec<Vec<f64>>,
    wavelengths: Vec<f64>,
    fibres: Vec<f64>,
}

impl<'a> Net<'a> {
    fn new(topo: &'a Topology, params: &'a PowerParams) -> Net<'a> {
        let ids = topo.nodes().to_vec();
        let n = ids.len();
        let idx = |id: NodeId| topo.node_index(id).expect("topology node");
        let links: Vec<_> = topo
            .links()
            .iter()
            .map(|l| {
                (idx(l.from), idx(l.to), params.ptr + params.prg * l.regenerators as f64, params.pe * l.edfas as f64)
            })
            .collect();
        let mesh = |u: usize| (0..n).filter(|&v| v != u).collect::<Vec<_>>();
        let adjacent = |u: usize| topo.neighbors(ids[u]).iter().map(|&v| idx(v)).collect::<Vec<_>>();
        let mut virtual_paths = vec![vec![Vec::new(); n]; n];
        let mut physical_paths = vec![vec![Vec::new(); n]; n];
        for a in 0..n {
            for z in 0..n {
                if a == z {
                    continue;
                }
                virtual_paths[a][z] = simple_paths(a, z, n, &mesh);
                physical_paths[a][z] = simple_paths(a, z, n, &adjacent)
                    .into_iter()
                    .map(|p| {
                        p.windows(2)
                            .map(|h| links.iter().position(|l| l.0 == h[0] && l.1 == h[1]).expect("adjacent link"))
                            .collect()
                    })
                    .collect();
            }
        }
        Net { topo, params, ids, links, virtual_paths, physical_paths }
    }

    /// Cheapest single-path routing of `demands` (dense Gb/s matrix).
    fn route(&self, demands: &[Vec<f64>], budget: &mut u64) -> Result<Routing> {
        let n = self.ids.len();
        let b = self.topo.wavelength_gbps();
        let wl = self.topo.wavelengths_per_fiber() as f64;
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (0..n).map(move |z| (a, z))).filter(|&(a, z)| a != z && demands[a][z] > 0.0).collect();
        let radix: Vec<usize> = pairs.iter().map(|&(a, z)| self.virtual_paths[a][z].len()).collect();
        let mut counter = vec![0; pairs.len()];
        let mut best: Option<Routing> = None;
        loop {
            let mut traffic = vec![vec![0.0; n]; n];
            for (k, &(a, z)) in pairs.iter().enumerate() {
                for hop in self.virtual_paths[a][z][counter[k]].windows(2) {
                    traffic[hop[0]][hop[1]] += demands[a][z];
                }
            }
            let channels: Vec<Vec<f64>> = traffic.iter().map(|row| row.iter().map(|&t| ceil(t / b)).collect()).collect();
            let used: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| channels[i][j] > 0.0).collect();
            let port_cost: f64 = channels.iter().flatten().sum::<f64>() * self.params.pr;
            let lp_radix: Vec<usize> = used.iter().map(|&(i, j)| self.physical_paths[i][j].len()).collect();
            let mut lp_counter = vec![0; used.len()];
            loop {
                *budget += 1;
                if *budget > MAX_ROUTINGS {
                    return Err(Error::TooLarge(format!("more than {MAX_ROUTINGS} routings")));
                }
                let mut wavelengths = vec![0.0; self.links.len()];
                for (k, &(i, j)) in used.iter().enumerate() {
                    for &l in &self.physical_paths[i][j][lp_counter[k]] {
                        wavelengths[l] += channels[i][j];
                    }
                }
                let fibres: Vec<f64> = wavelengths.iter().map(|&w| ceil(w / wl)).collect();
                let line_cost: f64 =
                    self.links.iter().enumerate().map(|(l, link)| link.2 * wavelengths[l] + link.3 * fibres[l]).sum();
                let cost = port_cost + line_cost;
                if best.as_ref().map_or(true, |r| cost < r.cost) {
                    best = Some(Routing { cost, channels: channels.clone(), wavelengths, fibres });
                }
                if !advance(&mut lp_counter, &lp_radix) {
                    break;
                }
            }
            if !advance(&mut counter, &radix) {
                break;
            }
        }
        Ok(best.expect("at least one routing"))
    }
}

/// Exhaustively searches a tiny instance. `Ok(None)` means no enumerated
/// configuration is feasible.
pub fn enumerate_oracle(
    topology: &Topology,
    workload: &WorkloadInstance,
    params: &PowerParams,
    flags: &ModeFlags,
) -> Result<Option<OracleSolution>> {
    flags.validate()?;
    params.validate()?;
    workload.validate(topology)?;
    let n = topology.node_count();
    if n > ORACLE_MAX_NODES {
        return Err(Error::TooLarge(format!("{n} nodes (limit {ORACLE_MAX_NODES})")));
    }
    if workload.chunks.len() > ORACLE_MAX_CHUNKS {
        return Err(Error::TooLarge(format!("{} chunks (limit {ORACLE_MAX_CHUNKS})", workload.chunks.len())));
    }
    if flags.renewable {
        return Err(Error::Invalid("the oracle does not model renewable supply".into()));
    }
    if flags.backup && flags.bn_count != 1 {
        return Err(Error::Invalid("the oracle supports exactly one backup node".into()));
    }

    let net = Net::new(topology, params);
    let ids = &net.ids;
    let b = topology.wavelength_gbps();
    let at = |id: NodeId| topology.node_index(id).expect("validated node");
    let profile = |i: usize| workload.profile(ids[i]).expect("validated profile");
    let volume: Vec<f64> = workload
        .chunks
        .iter()
        .map(|c| match flags.approach {
            Approach::Classical if !flags.same_volumes => c.raw_volume_gb,
            _ => c.clean_volume_gb,
        })
        .collect();
    let total_volume: f64 = volume.iter().sum();
    let (big_m, big_h, big_a) = match flags.big_m {
        Some(m) => (m.m, m.h, m.a),
        None => (workload.chunks.iter().map(|c| c.cpu_ghz).sum(), total_volume, total_volume),
    };
    let mut regular = vec![vec![0.0; n]; n];
    for d in &workload.regular_traffic {
        if d.s != d.d {
            regular[at(d.s)][at(d.d)] += d.gbps;
        }
    }
    let dc_candidates: Vec<usize> = (0..n).filter(|&i| profile(i).dc_candidate).collect();
    let ports = |traffic: f64| if flags.integer_ports { ceil(traffic / b) } else { traffic / b };

    let mut budget = 0u64;
    let mut best: Option<OracleSolution> = None;
    for dcs in combinations(&dc_candidates, flags.dcn as usize) {
        let is_dc: Vec<bool> = (0..n).map(|i| dcs.contains(&i)).collect();
        let bn_options: Vec<Option<usize>> = if flags.backup {
            (0..n).filter(|&i| profile(i).bn_candidate && !is_dc[i]).map(Some).collect()
        } else {
            vec![None]
        };
        let hosts: Vec<usize> = match flags.approach {
            Approach::Classical => dcs.clone(),
            Approach::Green => (0..n).collect(),
        };
        for &bn in &bn_options {
            let mut placement = vec![0usize; workload.chunks.len()];
            let place_radix = vec![hosts.len(); workload.chunks.len()];
            loop {
                let host = |c: usize| hosts[placement[c]];
                let mut cht = vec![vec![0.0; n]; n];
                let mut pnw = vec![0.0; n];
                let mut sch = vec![0.0; n];
                let mut info = vec![0.0; n];
                for (c, chunk) in workload.chunks.iter().enumerate() {
                    let (s, p) = (at(chunk.source), host(c));
                    cht[s][p] += volume[c];
                    pnw[p] += chunk.cpu_ghz;
                    sch[p] += volume[c];
                    info[p] += volume[c] * chunk.prr;
                }
                let capacity_ok = (0..n).all(|p| {
                    let dc = if is_dc[p] { 1.0 } else { 0.0 };
                    let switched: f64 = (0..n).map(|s| cht[s][p]).sum();
                    pnw[p] <= profile(p).max_workload_ghz() + big_m * dc + 1e-9
                        && sch[p] <= profile(p).storage_gb + big_h * dc + 1e-9
                        && switched <= profile(p).switch_router_gbps + big_a * dc + 1e-9
                });
                let backup_ok = match bn {
                    Some(d) => total_volume >= 1.0 && total_volume <= profile(d).storage_gb + big_h + 1e-9,
                    None => true,
                };
                if capacity_ok && backup_ok {
                    let senders: Vec<usize> = (0..n).filter(|&p| info[p] > 0.0).collect();
                    let mut choice = vec![0usize; senders.len()];
                    let choice_radix = vec![dcs.len(); senders.len()];
                    loop {
                        let mut inf = vec![vec![0.0; n]; n];
                        for (k, &p) in senders.iter().enumerate() {
                            inf[p][dcs[choice[k]]] += info[p];
                        }
                        let dcs_fed = dcs.iter().all(|&d| (0..n).map(|p| inf[p][d]).sum::<f64>() >= 1.0 - 1e-9);
                        if dcs_fed {
                            let mut bch = vec![vec![0.0; n]; n];
                            if let Some(d) = bn {
                                for (c, chunk) in workload.chunks.iter().enumerate() {
                                    bch[at(chunk.source)][d] += volume[c];
                                }
                            }
                            let mut demands = regular.clone();
                            for a in 0..n {
                                for z in 0..n {
                                    if a != z {
                                        demands[a][z] += cht[a][z] + inf[a][z] + bch[a][z];
                                    }
                                }
                            }
                            let routing = net.route(&demands, &mut budget)?;
                            let mut asg = Assignment::new();
                            for i in 0..n {
                                let id = ids[i];
                                let off = |m: &Vec<Vec<f64>>| (0..n).filter(|&j| j != i).map(|j| m[i][j]).sum::<f64>();
                                asg.set(names::dc(id), if is_dc[i] { 1.0 } else { 0.0 });
                                asg.set(names::ar(id), ports(off(&regular)));
                                asg.set(names::ach(id), ports(off(&cht)));
                                asg.set(names::ai(id), ports(off(&inf)));
                                asg.set(names::ab(id), ports(off(&bch)));
                                asg.set(names::pnw(id), pnw[i]);
                                asg.set(names::sch(id), sch[i]);
                                asg.set(names::sbch(id), if bn == Some(i) { total_volume } else { 0.0 });
                                for j in 0..n {
                                    asg.set(names::cht(id, ids[j]), cht[i][j]);
                                    asg.set(names::inf(id, ids[j]), inf[i][j]);
                                    asg.set(names::bch(id, ids[j]), bch[i][j]);
                                    if i != j {
                                        asg.set(names::c(id, ids[j]), routing.channels[i][j]);
                                    }
                                }
                            }
                            for (l, link) in topology.links().iter().enumerate() {
                                asg.set(names::w(link.from, link.to), routing.wavelengths[l]);
                                asg.set(names::f(link.from, link.to), routing.fibres[l]);
                            }
                            let breakdown = objective_value(&asg, topology, workload, params, flags.switching)?;
                            if best.as_ref().map_or(true, |s| breakdown.objective_w < s.objective) {
                                best = Some(OracleSolution {
                                    objective: breakdown.objective_w,
                                    breakdown,
                                    assignment: asg,
                                    data_centres: dcs.iter().map(|&d| ids[d]).collect(),
                                    backup_node: bn.map(|d| ids[d]),
                                    routings: 0,
                                });
                            }
                        }
                        if !advance(&mut choice, &choice_radix) {
                            break;
                        }
                    }
                }
                if !advance(&mut placement, &place_radix) {
                    break;
                }
            }
        }
    }
    Ok(best.map(|mut s| {
        s.routings = budget;
        s
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::TopologyBuilder;
    use crate::workload::{Chunk, NodeProfile};

    fn profiles(nodes: &[NodeId]) -> Vec<NodeProfile> {
        nodes
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
            .collect()
    }

    #[test]
    fn paths_in_a_triangle() {
        let mesh = |u: usize| (0..3).filter(|&v| v != u).collect::<Vec<_>>();
        assert_eq!(simple_paths(0, 2, 3, &mesh), vec![vec![0, 1, 2], vec![0, 2]]);
        assert_eq!(combinations(&[0, 1, 2], 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn two_node_classical_hand_value() {
        let topo = TopologyBuilder::new([1, 2]).link(1, 2, 80.0).build().unwrap();
        let mut profiles = profiles(&[1, 2]);
        profiles[0].dc_candidate = false;
        let work = WorkloadInstance {
            beta: 1,
            chunks: vec![Chunk { source: 1, index: 1, raw_volume_gb: 100.0, clean_volume_gb: 100.0, prr: 0.05, cpu_ghz: 2.0 }],
            profiles,
            regular_traffic: vec![],
        };
        let flags = ModeFlags { approach: Approach::Classical, dcn: 1, ..Default::default() };
        let s = enumerate_oracle(&topo, &work, &PowerParams::default(), &flags).unwrap().unwrap();
        assert!((s.breakdown.network_total_w - 7977.75).abs() < 1e-9, "{}", s.breakdown.network_total_w);
        assert_eq!(s.data_centres, vec![2]);
    }

    #[test]
    fn guards() {
        let topo = TopologyBuilder::new([1, 2, 3, 4, 5])
            .link(1, 2, 80.0)
            .link(2, 3, 80.0)
            .link(3, 4, 80.0)
            .link(4, 5, 80.0)
            .build()
            .unwrap();
        let work = WorkloadInstance { beta: 0, chunks: vec![], profiles: profiles(&[1, 2, 3, 4, 5]), regular_traffic: vec![] };
        let err = enumerate_oracle(&topo, &work, &PowerParams::default(), &ModeFlags::default()).unwrap_err();
        assert!(matches!(err, Error::TooLarge(_)));
    }
}

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::names::{self, TrafficClass};
use crate::power::{PowerParams, SwitchingReading};
use crate::topology::{NodeId, Topology};
use crate::workload::{Chunk, WorkloadInstance};

use super::{Annotation, Approach, MilpModel, ModeFlags, Relation, VarId, VarKind};

const INF: f64 = f64::INFINITY;

/// Big-M constants: workload (M), storage (H), switching (A) and the
/// indicator constant (Z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BigM {
    pub m: f64,
    pub h: f64,
    pub a: f64,
    pub z: f64,
}

/// Chunk volume seen by the model under `flags`.
pub fn chunk_volume(chunk: &Chunk, flags: &ModeFlags) -> f64 {
    match flags.approach {
        Approach::Classical if !flags.same_volumes => chunk.raw_volume_gb,
        _ => chunk.clean_volume_gb,
    }
}

/// Instance-tight big-M values: total CPU demand and total chunk volume.
pub fn big_m_values(workload: &WorkloadInstance, flags: &ModeFlags) -> BigM {
    let cpu: f64 = workload.chunks.iter().map(|c| c.cpu_ghz).sum();
    let volume: f64 = workload.chunks.iter().map(|c| chunk_volume(c, flags)).sum();
    BigM { m: cpu, h: volume, a: volume, z: volume }
}

struct Ctx<'a> {
    topo: &'a Topology,
    work: &'a WorkloadInstance,
    nodes: Vec<NodeId>,
    model: MilpModel,
}

impl Ctx<'_> {
    fn v(&self, name: &str) -> VarId {
        self.model.var(name).unwrap_or_else(|| panic!("builder referenced undeclared {name}"))
    }

    fn pairs(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for &a in &self.nodes {
            for &b in &self.nodes {
                if a != b {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Builds the full model for one instance and mode.
pub fn build_model(
    topology: &Topology,
    workload: &WorkloadInstance,
    params: &PowerParams,
    flags: &ModeFlags,
) -> Result<MilpModel> {
    flags.validate()?;
    params.validate()?;
    workload.validate(topology)?;
    if !workload.profiles.iter().any(|p| p.dc_candidate) {
        return Err(Error::Invalid("no data-centre candidate: the workload cannot be placed".into()));
    }
    if !topology.is_connected() {
        return Err(Error::Invalid("physical topology is not connected".into()));
    }

    let mut ctx =
        Ctx { topo: topology, work: workload, nodes: topology.nodes().to_vec(), model: MilpModel::new(flags.clone()) };
    let big_m = flags.big_m.unwrap_or_else(|| big_m_values(workload, flags));
    let b = topology.wavelength_gbps();
    let regular = workload.regular_map();
    let pairs = ctx.pairs();

    // Integral variables first: branching follows declaration order.
    for &d in &ctx.nodes {
        let upper = if workload.profile(d).is_some_and(|p| p.dc_candidate) { 1.0 } else { 0.0 };
        ctx.model.add_var(names::dc(d), VarKind::Binary, 0.0, upper);
    }
    if flags.backup {
        for &d in &ctx.nodes {
            let upper = if workload.profile(d).is_some_and(|p| p.bn_candidate) { 1.0 } else { 0.0 };
            ctx.model.add_var(names::bn(d), VarKind::Binary, 0.0, upper);
        }
    }
    for chunk in &workload.chunks {
        for &p in &ctx.nodes {
            ctx.model.add_var(names::y(chunk.source, chunk.index, p), VarKind::Binary, 0.0, 1.0);
        }
    }
    for &(i, j) in &pairs {
        ctx.model.add_var(names::c(i, j), VarKind::Integer, 0.0, INF);
    }
    for &(i, j) in &pairs {
        for link in topology.links() {
            ctx.model.add_var(names::wv(i, j, link.from, link.to), VarKind::Integer, 0.0, INF);
        }
    }
    for link in topology.links() {
        ctx.model.add_var(names::w(link.from, link.to), VarKind::Integer, 0.0, INF);
    }
    for link in topology.links() {
        ctx.model.add_var(names::f(link.from, link.to), VarKind::Integer, 0.0, INF);
    }
    let port_kind = if flags.integer_ports { VarKind::Integer } else { VarKind::Continuous };
    for &i in &ctx.nodes {
        ctx.model.add_var(names::ar(i), port_kind, 0.0, INF);
        ctx.model.add_var(names::ach(i), port_kind, 0.0, INF);
        ctx.model.add_var(names::ai(i), port_kind, 0.0, INF);
        if flags.backup {
            ctx.model.add_var(names::ab(i), port_kind, 0.0, INF);
        }
    }

    // Continuous traffic, workload and storage variables.
    for &s in &ctx.nodes {
        for &p in &ctx.nodes {
            ctx.model.add_var(names::cht(s, p), VarKind::Continuous, 0.0, INF);
        }
    }
    for &p in &ctx.nodes {
        for &d in &ctx.nodes {
            ctx.model.add_var(names::inf(p, d), VarKind::Continuous, 0.0, INF);
        }
    }
    for &p in &ctx.nodes {
        ctx.model.add_var(names::pnw(p), VarKind::Continuous, 0.0, INF);
        ctx.model.add_var(names::sch(p), VarKind::Continuous, 0.0, INF);
    }
    if flags.backup {
        for &s in &ctx.nodes {
            for &d in &ctx.nodes {
                ctx.model.add_var(names::bch(s, d), VarKind::Continuous, 0.0, INF);
            }
        }
        for &d in &ctx.nodes {
            ctx.model.add_var(names::sbch(d), VarKind::Continuous, 0.0, INF);
        }
    }

    let mut classes = vec![TrafficClass::Regular, TrafficClass::Chunk, TrafficClass::Info];
    if flags.backup {
        classes.push(TrafficClass::Backup);
    }
    let commodities = |class: TrafficClass| -> Vec<(NodeId, NodeId)> {
        match class {
            TrafficClass::Regular => pairs.iter().copied().filter(|p| regular.get(p).is_some_and(|&g| g > 0.0)).collect(),
            _ => pairs.clone(),
        }
    };
    for &class in &classes {
        for (a, z) in commodities(class) {
            for &(i, j) in &pairs {
                ctx.model.add_var(names::flow(class, a, z, i, j), VarKind::Continuous, 0.0, INF);
            }
        }
    }

    processing_constraints(&mut ctx, flags, &big_m);
    if flags.backup {
        backup_constraints(&mut ctx, flags, &big_m);
    }
    routing_constraints(&mut ctx, &classes, &commodities, &regular);
    port_constraints(&mut ctx, flags, &regular, b);

    objective(&mut ctx, params, flags);

    let mut model = ctx.model;
    if flags.approach == Approach::Classical {
        add_classical_restriction(&mut model, workload)?;
    }
    if flags.renewable {
        add_renewable(&mut model, topology, params, &flags.solar_kw)?;
    }
    Ok(model)
}

fn processing_constraints(ctx: &mut Ctx<'_>, flags: &ModeFlags, big_m: &BigM) {
    let nodes = ctx.nodes.clone();
    let work = ctx.work;

    for chunk in &work.chunks {
        let terms = nodes.iter().map(|&p| (ctx.v(&names::y(chunk.source, chunk.index, p)), 1.0)).collect();
        ctx.model.add_constraint(
            format!("assign_{}_{}", chunk.source, chunk.index),
            terms,
            Relation::Eq,
            1.0,
            Annotation::Equation(12),
        );
    }

    for &s in &nodes {
        for &p in &nodes {
            let mut terms = vec![(ctx.v(&names::cht(s, p)), 1.0)];
            for chunk in work.chunks_at(s) {
                terms.push((ctx.v(&names::y(s, chunk.index, p)), -chunk_volume(chunk, flags)));
            }
            ctx.model.add_constraint(format!("chunk_traffic_{s}_{p}"), terms, Relation::Eq, 0.0, Annotation::Equation(13));
        }
    }

    for &p in &nodes {
        let mut terms: Vec<(VarId, f64)> = nodes.iter().map(|&d| (ctx.v(&names::inf(p, d)), 1.0)).collect();
        for chunk in &work.chunks {
            terms.push((ctx.v(&names::y(chunk.source, chunk.index, p)), -chunk_volume(chunk, flags) * chunk.prr));
        }
        ctx.model.add_constraint(format!("pn_info_{p}"), terms, Relation::Eq, 0.0, Annotation::Equation(14));
    }

    for &d in &nodes {
        let received: Vec<(VarId, f64)> = nodes.iter().map(|&p| (ctx.v(&names::inf(p, d)), 1.0)).collect();
        let dc = ctx.v(&names::dc(d));
        let mut lo = received.clone();
        lo.push((dc, -1.0));
        ctx.model.add_constraint(format!("dc_used_{d}"), lo, Relation::Ge, 0.0, Annotation::Equation(15));
        let mut hi = received;
        hi.push((dc, -big_m.z));
        ctx.model.add_constraint(format!("dc_open_{d}"), hi, Relation::Le, 0.0, Annotation::Equation(16));
    }
    let all_dc = nodes.iter().map(|&d| (ctx.v(&names::dc(d)), 1.0)).collect();
    ctx.model.add_constraint("dc_count", all_dc, Relation::Eq, flags.dcn as f64, Annotation::Equation(17));

    for &p in &nodes {
        let profile = work.profile(p).expect("validated profile");
        let mut workload = vec![(ctx.v(&names::pnw(p)), 1.0)];
        let mut stored = vec![(ctx.v(&names::sch(p)), 1.0)];
        for chunk in &work.chunks {
            let y = ctx.v(&names::y(chunk.source, chunk.index, p));
            workload.push((y, -chunk.cpu_ghz));
            stored.push((y, -chunk_volume(chunk, flags)));
        }
        ctx.model.add_constraint(format!("workload_{p}"), workload, Relation::Eq, 0.0, Annotation::Equation(18));
        let dc = ctx.v(&names::dc(p));
        ctx.model.add_constraint(
            format!("workload_cap_{p}"),
            vec![(ctx.v(&names::pnw(p)), 1.0), (dc, -big_m.m)],
            Relation::Le,
            profile.max_workload_ghz(),
            Annotation::Equation(19),
        );
        ctx.model.add_constraint(format!("stored_{p}"), stored, Relation::Eq, 0.0, Annotation::Equation(20));
        ctx.model.add_constraint(
            format!("storage_cap_{p}"),
            vec![(ctx.v(&names::sch(p)), 1.0), (dc, -big_m.h)],
            Relation::Le,
            profile.storage_gb,
            Annotation::Equation(21),
        );
        let mut switching: Vec<(VarId, f64)> = nodes.iter().map(|&s| (ctx.v(&names::cht(s, p)), 1.0)).collect();
        switching.push((dc, -big_m.a));
        ctx.model.add_constraint(
            format!("switching_cap_{p}"),
            switching,
            Relation::Le,
            profile.switch_router_gbps,
            Annotation::Equation(22),
        );
    }
}

fn backup_constraints(ctx: &mut Ctx<'_>, flags: &ModeFlags, big_m: &BigM) {
    let nodes = ctx.nodes.clone();
    let work = ctx.work;
    let total: f64 = work.chunks.iter().map(|c| chunk_volume(c, flags)).sum();

    // One row per source: every chunk of `s` is backed up exactly once.
    for &s in &nodes {
        let terms = nodes.iter().map(|&d| (ctx.v(&names::bch(s, d)), 1.0)).collect();
        let volume: f64 = work.chunks_at(s).map(|c| chunk_volume(c, flags)).sum();
        ctx.model.add_constraint(format!("backup_{s}"), terms, Relation::Eq, volume, Annotation::Equation(23));
    }
    for &d in &nodes {
        let received: Vec<(VarId, f64)> = nodes.iter().map(|&s| (ctx.v(&names::bch(s, d)), 1.0)).collect();
        let bn = ctx.v(&names::bn(d));
        let mut lo = received.clone();
        lo.push((bn, -1.0));
        ctx.model.add_constraint(format!("bn_used_{d}"), lo, Relation::Ge, 0.0, Annotation::Equation(24));
        let mut hi = received;
        hi.push((bn, -big_m.z));
        ctx.model.add_constraint(format!("bn_open_{d}"), hi, Relation::Le, 0.0, Annotation::Equation(25));
    }
    let all_bn = nodes.iter().map(|&d| (ctx.v(&names::bn(d)), 1.0)).collect();
    ctx.model.add_constraint("bn_count", all_bn, Relation::Eq, flags.bn_count as f64, Annotation::Equation(26));
    for &d in &nodes {
        ctx.model.add_constraint(
            format!("dc_bn_exclusive_{d}"),
            vec![(ctx.v(&names::dc(d)), 1.0), (ctx.v(&names::bn(d)), 1.0)],
            Relation::Le,
            1.0,
            Annotation::Equation(27),
        );
    }
    for &d in &nodes {
        let profile = work.profile(d).expect("validated profile");
        let sbch = ctx.v(&names::sbch(d));
        let bn = ctx.v(&names::bn(d));
        ctx.model.add_constraint(
            format!("bn_storage_cap_{d}"),
            vec![(sbch, 1.0), (bn, -big_m.h)],
            Relation::Le,
            profile.storage_gb,
            Annotation::Equation(28),
        );
        ctx.model.add_constraint(
            format!("bn_stored_{d}"),
            vec![(sbch, 1.0), (bn, -total)],
            Relation::Eq,
            0.0,
            Annotation::Equation(29),
        );
    }
}

fn routing_constraints(
    ctx: &mut Ctx<'_>,
    classes: &[TrafficClass],
    commodities: &dyn Fn(TrafficClass) -> Vec<(NodeId, NodeId)>,
    regular: &BTreeMap<(NodeId, NodeId), f64>,
) {
    let nodes = ctx.nodes.clone();
    let pairs = ctx.pairs();
    let topo = ctx.topo;

    for &class in classes {
        for (a, z) in commodities(class) {
            let demand_var = match class {
                TrafficClass::Regular => None,
                TrafficClass::Chunk => Some(ctx.v(&names::cht(a, z))),
                TrafficClass::Info => Some(ctx.v(&names::inf(a, z))),
                TrafficClass::Backup => Some(ctx.v(&names::bch(a, z))),
            };
            let demand_const = regular.get(&(a, z)).copied().unwrap_or(0.0);
            for &i in &nodes {
                let mut terms = Vec::new();
                for &j in &nodes {
                    if j != i {
                        terms.push((ctx.v(&names::flow(class, a, z, i, j)), 1.0));
                        terms.push((ctx.v(&names::flow(class, a, z, j, i)), -1.0));
                    }
                }
                let sign = if i == a {
                    1.0
                } else if i == z {
                    -1.0
                } else {
                    0.0
                };
                let rhs = match demand_var {
                    Some(v) => {
                        if sign != 0.0 {
                            terms.push((v, -sign));
                        }
                        0.0
                    }
                    None => sign * demand_const,
                };
                ctx.model.add_constraint(
                    format!("{}_conserve_{a}_{z}_{i}", class.symbol()),
                    terms,
                    Relation::Eq,
                    rhs,
                    Annotation::Equation(class.conservation_eq()),
                );
            }
        }
    }

    let b = topo.wavelength_gbps();
    for &(i, j) in &pairs {
        let mut terms = Vec::new();
        for &class in classes {
            for (a, z) in commodities(class) {
                terms.push((ctx.v(&names::flow(class, a, z, i, j)), 1.0));
            }
        }
        terms.push((ctx.v(&names::c(i, j)), -b));
        ctx.model.add_constraint(format!("vlink_cap_{i}_{j}"), terms, Relation::Le, 0.0, Annotation::Equation(34));
    }

    for &(i, j) in &pairs {
        let c = ctx.v(&names::c(i, j));
        for &m in &nodes {
            let mut terms = Vec::new();
            for &n in topo.neighbors(m) {
                terms.push((ctx.v(&names::wv(i, j, m, n)), 1.0));
                terms.push((ctx.v(&names::wv(i, j, n, m)), -1.0));
            }
            if m == i {
                terms.push((c, -1.0));
            } else if m == j {
                terms.push((c, 1.0));
            }
            ctx.model.add_constraint(
                format!("lightpath_{i}_{j}_{m}"),
                terms,
                Relation::Eq,
                0.0,
                Annotation::Equation(35),
            );
        }
    }

    let wl = topo.wavelengths_per_fiber() as f64;
    for link in topo.links() {
        let (m, n) = (link.from, link.to);
        let routed: Vec<(VarId, f64)> = pairs.iter().map(|&(i, j)| (ctx.v(&names::wv(i, j, m, n)), 1.0)).collect();
        let mut fibre = routed.clone();
        fibre.push((ctx.v(&names::f(m, n)), -wl));
        ctx.model.add_constraint(format!("fibre_cap_{m}_{n}"), fibre, Relation::Le, 0.0, Annotation::Equation(36));
        let mut total = routed;
        total.push((ctx.v(&names::w(m, n)), -1.0));
        ctx.model.add_constraint(format!("wavelengths_{m}_{n}"), total, Relation::Eq, 0.0, Annotation::Equation(37));
    }
}

fn port_constraints(ctx: &mut Ctx<'_>, flags: &ModeFlags, regular: &BTreeMap<(NodeId, NodeId), f64>, b: f64) {
    let nodes = ctx.nodes.clone();
    let relation = if flags.integer_ports { Relation::Ge } else { Relation::Eq };
    for &i in &nodes {
        let outgoing: f64 = regular.iter().filter(|((s, _), _)| *s == i).map(|(_, g)| *g).sum();
        ctx.model.add_constraint(
            format!("ports_regular_{i}"),
            vec![(ctx.v(&names::ar(i)), 1.0)],
            relation,
            outgoing / b,
            Annotation::Equation(38),
        );

        let mut families = vec![
            (names::ach(i), "chunk", 39, nodes.iter().map(|&p| names::cht(i, p)).collect::<Vec<_>>()),
            (names::ai(i), "info", 40, nodes.iter().map(|&d| names::inf(i, d)).collect()),
        ];
        if flags.backup {
            families.push((names::ab(i), "backup", 41, nodes.iter().map(|&d| names::bch(i, d)).collect()));
        }
        for (port, label, eq, traffic) in families {
            let mut terms = vec![(ctx.v(&port), 1.0)];
            for (k, name) in traffic.iter().enumerate() {
                if nodes[k] != i {
                    terms.push((ctx.v(name), -1.0 / b));
                }
            }
            ctx.model.add_constraint(format!("ports_{label}_{i}"), terms, relation, 0.0, Annotation::Equation(eq));
        }
    }
}

fn objective(ctx: &mut Ctx<'_>, params: &PowerParams, flags: &ModeFlags) {
    let nodes = ctx.nodes.clone();
    let topo = ctx.topo;
    let mut terms: Vec<(VarId, f64)> = Vec::new();
    let pun = params.pun;
    let pu = params.pu;

    for &i in &nodes {
        terms.push((ctx.v(&names::ar(i)), pun * params.pr));
        terms.push((ctx.v(&names::ach(i)), pun * params.pr));
        terms.push((ctx.v(&names::ai(i)), pun * params.pr));
        if flags.backup {
            terms.push((ctx.v(&names::ab(i)), pun * params.pr));
        }
        for &j in &nodes {
            if i != j {
                terms.push((ctx.v(&names::c(i, j)), pun * params.pr));
            }
        }
    }
    for link in topo.links() {
        let w = ctx.v(&names::w(link.from, link.to));
        terms.push((w, pun * (params.ptr + params.prg * link.regenerators as f64)));
        terms.push((ctx.v(&names::f(link.from, link.to)), pun * params.pe * link.edfas as f64));
    }

    // Internal switching: on feasible points info only reaches data centres,
    // so the receiver-split reading collapses to chunks once and info twice.
    let k = params.switching_w_per_gbps();
    let chunk_weight = match flags.switching {
        SwitchingReading::ReceiverSplit => 1.0,
        SwitchingReading::Literal => 2.0,
    };
    for &a in &nodes {
        for &z in &nodes {
            terms.push((ctx.v(&names::cht(a, z)), pu * k * chunk_weight));
            terms.push((ctx.v(&names::inf(a, z)), pu * k * 2.0));
            if flags.backup {
                terms.push((ctx.v(&names::bch(a, z)), pu * k * 2.0));
            }
        }
    }
    for &p in &nodes {
        terms.push((ctx.v(&names::pnw(p)), pu * params.delta()));
        terms.push((ctx.v(&names::sch(p)), pu * params.rsg * params.psg));
        if flags.backup {
            terms.push((ctx.v(&names::sbch(p)), pu * params.rsg * params.psb));
        }
    }

    let mut merged: BTreeMap<VarId, f64> = BTreeMap::new();
    for (v, a) in terms {
        *merged.entry(v).or_insert(0.0) += a;
    }
    ctx.model.objective.terms = merged.into_iter().collect();
    ctx.model.objective.constant = pun * topo.total_optical_switch_w();
}

/// Restricts processing to data centres: `Y_scp <= DC_p` for every chunk and node.
pub fn add_classical_restriction(model: &mut MilpModel, workload: &WorkloadInstance) -> Result<()> {
    if model.flags.approach != Approach::Classical {
        return Err(Error::Invalid("classical restriction applied to a green model".into()));
    }
    let nodes = model.nodes();
    for chunk in &workload.chunks {
        for &p in &nodes {
            let y = model.require(&names::y(chunk.source, chunk.index, p))?;
            let dc = model.require(&names::dc(p))?;
            model.add_constraint(
                format!("dc_only_{}_{}_{p}", chunk.source, chunk.index),
                vec![(y, 1.0), (dc, -1.0)],
                Relation::Le,
                0.0,
                Annotation::Classical,
            );
        }
    }
    Ok(())
}

/// Adds per-node renewable/non-renewable split and switches the objective to
/// total non-renewable network power (W; `solar_kw` is in kW).
pub fn add_renewable(
    model: &mut MilpModel,
    topology: &Topology,
    params: &PowerParams,
    solar_kw: &BTreeMap<NodeId, f64>,
) -> Result<()> {
    if solar_kw.values().any(|&s| !(s >= 0.0)) {
        return Err(Error::Invalid("solar power must be non-negative".into()));
    }
    if model.var(names::TNRE).is_some() {
        return Err(Error::Invalid("renewable extension already present".into()));
    }
    let nodes = topology.nodes().to_vec();
    let backup = model.flags.backup;
    let pun = params.pun;
    let mut nre_terms = Vec::new();
    for &s in &nodes {
        let npc = model.add_var(names::npc(s), VarKind::Continuous, 0.0, INF);
        let re = model.add_var(names::re(s), VarKind::Continuous, 0.0, INF);
        let nre = model.add_var(names::nre(s), VarKind::Continuous, 0.0, INF);
        nre_terms.push((nre, -1.0));

        // NPC_s = PUN * (ports + originated wavelengths + outgoing line devices + PO_s)
        let mut def = vec![(npc, 1.0)];
        let mut ports = vec![names::ar(s), names::ach(s), names::ai(s)];
        if backup {
            ports.push(names::ab(s));
        }
        for name in ports {
            def.push((model.require(&name)?, -pun * params.pr));
        }
        for &j in &nodes {
            if j != s {
                def.push((model.require(&names::c(s, j))?, -pun * params.pr));
            }
        }
        for &n in topology.neighbors(s) {
            let link = topology.link(s, n).expect("neighbour link exists");
            def.push((model.require(&names::w(s, n))?, -pun * (params.ptr + params.prg * link.regenerators as f64)));
            def.push((model.require(&names::f(s, n))?, -pun * params.pe * link.edfas as f64));
        }
        model.add_constraint(
            format!("node_power_{s}"),
            def,
            Relation::Eq,
            pun * topology.optical_switch_w(s),
            Annotation::Plumbing,
        );
        model.add_constraint(
            format!("power_split_{s}"),
            vec![(npc, 1.0), (re, -1.0), (nre, -1.0)],
            Relation::Eq,
            0.0,
            Annotation::Equation(42),
        );
        let solar_w = 1000.0 * solar_kw.get(&s).copied().unwrap_or(0.0);
        model.add_constraint(format!("solar_cap_{s}"), vec![(re, 1.0)], Relation::Le, solar_w, Annotation::Equation(43));
    }
    let tnre = model.add_var(names::TNRE, VarKind::Continuous, 0.0, INF);
    nre_terms.push((tnre, 1.0));
    model.add_constraint("total_non_renewable", nre_terms, Relation::Eq, 0.0, Annotation::Equation(44));
    model.objective.terms = vec![(tnre, 1.0)];
    model.objective.constant = 0.0;
    model.flags.renewable = true;
    model.flags.solar_kw = solar_kw.clone();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::TopologyBuilder;
    use crate::workload::NodeProfile;

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

    fn chunk(source: NodeId, index: u32, gb: f64, cpu: f64) -> Chunk {
        Chunk { source, index, raw_volume_gb: gb * 1.5, clean_volume_gb: gb, prr: 0.1, cpu_ghz: cpu }
    }

    fn two_node_instance() -> (Topology, WorkloadInstance) {
        let topo = TopologyBuilder::new([1, 2]).link(1, 2, 80.0).build().unwrap();
        let work = WorkloadInstance {
            beta: 1,
            chunks: vec![chunk(1, 1, 100.0, 2.0)],
            profiles: profiles(topo.nodes()),
            regular_traffic: vec![],
        };
        (topo, work)
    }

    #[test]
    fn smallest_instance_has_two_assignment_vars() {
        let (topo, work) = two_node_instance();
        let flags = ModeFlags { dcn: 1, ..Default::default() };
        let model = build_model(&topo, &work, &PowerParams::default(), &flags).unwrap();
        assert_eq!(model.count_vars_with_prefix("Y_"), 2);
        assert_eq!(model.rows_annotated(Annotation::Equation(12)), 1);
        let row = model.constraint("assign_1_1").unwrap();
        assert_eq!(row.terms.len(), 2);
        assert_eq!(row.relation, Relation::Eq);
        assert_eq!(row.rhs, 1.0);
    }

    #[test]
    fn backup_gating() {
        let (topo, mut work) = two_node_instance();
        work.regular_traffic = vec![crate::workload::Demand { s: 2, d: 1, gbps: 5.0 }];
        let params = PowerParams::default();
        let off = build_model(&topo, &work, &params, &ModeFlags { dcn: 1, ..Default::default() }).unwrap();
        assert_eq!(off.count_vars_with_prefix("BCH") + off.count_vars_with_prefix("BN_"), 0);
        for eq in 23..=29 {
            assert_eq!(off.rows_annotated(Annotation::Equation(eq)), 0);
        }
        let on = build_model(&topo, &work, &params, &ModeFlags { dcn: 1, backup: true, ..Default::default() }).unwrap();
        for eq in 12..=41 {
            assert!(on.rows_annotated(Annotation::Equation(eq)) > 0, "missing ({eq})");
        }
    }

    #[test]
    fn big_m_sums() {
        let topo = TopologyBuilder::new([1, 2]).link(1, 2, 80.0).build().unwrap();
        let work = WorkloadInstance {
            beta: 3,
            chunks: vec![chunk(1, 1, 100.0, 2.0), chunk(1, 2, 100.0, 2.0), chunk(2, 1, 0.5, 2.0)],
            profiles: profiles(topo.nodes()),
            regular_traffic: vec![],
        };
        let m = big_m_values(&work, &ModeFlags::default());
        assert_eq!(m.m, 6.0);
        assert_eq!(m.h, 200.5);
        assert_eq!((m.a, m.z), (m.h, m.h));
        let classical = ModeFlags { approach: Approach::Classical, ..Default::default() };
        assert_eq!(big_m_values(&work, &classical).h, 300.75);
    }

    #[test]
    fn classical_restriction_rows() {
        let (topo, work) = two_node_instance();
        let flags = ModeFlags { dcn: 1, approach: Approach::Classical, ..Default::default() };
        let model = build_model(&topo, &work, &PowerParams::default(), &flags).unwrap();
        assert_eq!(model.rows_annotated(Annotation::Classical), 2);
        // Raw volume drives the chunk traffic definition.
        let row = model.constraint("chunk_traffic_1_2").unwrap();
        assert!(row.terms.iter().any(|&(_, a)| a == -150.0));

        let mut green = build_model(&topo, &work, &PowerParams::default(), &ModeFlags { dcn: 1, ..Default::default() }).unwrap();
        assert!(add_classical_restriction(&mut green, &work).is_err());
    }

    #[test]
    fn renewable_replaces_objective() {
        let (topo, work) = two_node_instance();
        let solar: BTreeMap<NodeId, f64> = [(1, 20.0), (2, 20.0)].into();
        let flags = ModeFlags { dcn: 1, renewable: true, solar_kw: solar.clone(), ..Default::default() };
        let model = build_model(&topo, &work, &PowerParams::default(), &flags).unwrap();
        assert_eq!(model.objective.terms.len(), 1);
        assert_eq!(model.variables[model.objective.terms[0].0 .0].name, "TNRE");
        assert_eq!(model.rows_annotated(Annotation::Equation(43)), 2);
        let bad: BTreeMap<NodeId, f64> = [(1, -1.0)].into();
        let mut m2 = build_model(&topo, &work, &PowerParams::default(), &ModeFlags { dcn: 1, ..Default::default() }).unwrap();
        assert!(add_renewable(&mut m2, &topo, &PowerParams::default(), &bad).is_err());
    }

    #[test]
    fn rejects_inconsistent_instances() {
        let (topo, mut work) = two_node_instance();
        work.profiles.pop();
        assert!(build_model(&topo, &work, &PowerParams::default(), &ModeFlags::default()).is_err());
        let (topo, mut work) = two_node_instance();
        work.profiles.iter_mut().for_each(|p| p.dc_candidate = false);
        let err = build_model(&topo, &work, &PowerParams::default(), &ModeFlags::default()).unwrap_err();
        assert!(err.to_string().contains("data-centre candidate"));
    }

    #[test]
    fn binaries_are_unit_bounded() {
        let (topo, work) = two_node_instance();
        let flags = ModeFlags { dcn: 1, backup: true, ..Default::default() };
        let model = build_model(&topo, &work, &PowerParams::default(), &flags).unwrap();
        for v in &model.variables {
            if v.kind == VarKind::Binary {
                assert!(v.lower >= 0.0 && v.upper <= 1.0, "{}", v.name);
            }
        }
    }
}

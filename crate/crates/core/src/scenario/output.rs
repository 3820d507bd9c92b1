use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::run::{ExperimentRow, RenewableRow, SweepOutput};
use super::siting::report_siting;
use crate::error::{Error, Result};

pub const RESULTS_CSV: &str = "results.csv";
pub const STORAGE_CSV: &str = "storage.csv";
pub const RENEWABLE_CSV: &str = "renewable.csv";
pub const SITING_CSV: &str = "siting.csv";
pub const RESULTS_DAT: &str = "results.dat";
pub const RENEWABLE_DAT: &str = "renewable.dat";
/// Wall-clock times; kept out of the CSV files so those stay reproducible.
pub const TIMINGS_LOG: &str = "timings.log";

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Serialises `rows` with a header line, even when there are no rows.
pub fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(format!("csv flush: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn dat_number(v: Option<f64>) -> String {
    v.map_or("NaN".into(), |x| format!("{x:.6}"))
}

/// Gnuplot data: one block per (scenario, approach, backup), separated by two
/// blank lines so `index N` selects a block. Columns: beta, mean objective,
/// mean savings, rows averaged.
pub fn results_dat(rows: &[ExperimentRow]) -> String {
    let mut blocks: BTreeMap<_, BTreeMap<u32, Vec<&ExperimentRow>>> = BTreeMap::new();
    for r in rows {
        blocks.entry((r.scenario, r.approach, r.backup)).or_default().entry(r.beta).or_default().push(r);
    }
    let mut out = String::from("# greenplan sweep: mean over seeds with a solution\n");
    out.push_str("# reference on the 14-node network at beta=50: savings 58% (no backup), 45% (backup);\n");
    out.push_str("# limited storage: 51% (no backup), 40% (backup)\n");
    for (k, ((scenario, approach, backup), by_beta)) in blocks.iter().enumerate() {
        if k > 0 {
            out.push_str("\n\n");
        }
        let _ = writeln!(out, "# index {k}: scenario={scenario} approach={approach} backup={}", if *backup { "on" } else { "off" });
        out.push_str("# beta objective_w savings_pct rows\n");
        for (beta, rs) in by_beta {
            let obj: Vec<f64> = rs.iter().filter_map(|r| r.objective_w).collect();
            let sav: Vec<f64> = rs.iter().filter_map(|r| r.savings_pct).collect();
            let _ = writeln!(out, "{beta} {} {} {}", dat_number(mean(&obj)), dat_number(mean(&sav)), obj.len());
        }
    }
    out
}

/// Gnuplot data for the solar sweep: solar level, mean TNRE, mean reduction.
pub fn renewable_dat(rows: &[RenewableRow]) -> String {
    let mut by_level: BTreeMap<u64, (f64, Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in rows {
        let e = by_level.entry(r.solar_kw.to_bits()).or_insert((r.solar_kw, Vec::new(), Vec::new()));
        e.1.extend(r.tnre_w);
        e.2.extend(r.reduction_pct);
    }
    let mut levels: Vec<_> = by_level.into_values().collect();
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = String::from("# greenplan solar sweep: mean over cells with a solution\n");
    out.push_str("# reference on the 14-node network: about 3% reduction at 20 kW, about 9% at 80 kW\n");
    out.push_str("# solar_kw tnre_w reduction_pct rows\n");
    for (solar, tnre, red) in levels {
        let _ = writeln!(out, "{solar} {} {} {}", dat_number(mean(&tnre)), dat_number(mean(&red)), tnre.len());
    }
    out
}

const RESULTS_HEADER: &[&str] = &[
    "scenario", "beta", "seed", "approach", "backup", "status", "gap", "objective_w", "bound_w", "router_ports_w",
    "transponders_w", "regenerators_w", "edfas_w", "optical_switches_w", "internal_switch_router_w", "servers_w",
    "pn_dc_storage_w", "bn_storage_w", "network_w", "processing_w", "savings_pct", "dc_nodes", "bn_node", "verified",
    "note", "bb_nodes", "lp_iterations",
];

const STORAGE_HEADER: &[&str] = &[
    "scenario", "beta", "seed", "approach", "backup", "node", "workload_ghz", "stored_gb", "backup_stored_gb",
    "storage_capacity_gb", "dc", "bn",
];

const RENEWABLE_HEADER: &[&str] = &[
    "scenario", "approach", "backup", "beta", "seed", "solar_kw", "status", "gap", "tnre_w", "bound_w", "network_w",
    "reduction_pct", "verified", "note", "bb_nodes",
];

pub(crate) fn write_results(dir: &Path, out: &SweepOutput) -> Result<()> {
    ensure_dir(dir)?;
    write_text(&dir.join(RESULTS_CSV), &to_csv(&out.rows, RESULTS_HEADER)?)?;
    write_text(&dir.join(STORAGE_CSV), &to_csv(&out.storage, STORAGE_HEADER)?)?;
    write_text(&dir.join(RESULTS_DAT), &results_dat(&out.rows))?;
    if let Ok(siting) = report_siting(&out.rows) {
        write_text(&dir.join(SITING_CSV), &siting.to_csv())?;
    }
    Ok(())
}

pub fn write_renewable(dir: &Path, rows: &[RenewableRow]) -> Result<()> {
    ensure_dir(dir)?;
    write_text(&dir.join(RENEWABLE_CSV), &to_csv(rows, RENEWABLE_HEADER)?)?;
    write_text(&dir.join(RENEWABLE_DAT), &renewable_dat(rows))
}

pub(crate) fn write_timings(dir: &Path, timings: &[(String, f64)]) -> Result<()> {
    ensure_dir(dir)?;
    let mut text = String::new();
    for (label, secs) in timings {
        let _ = writeln!(text, "{label} {secs:.3}");
    }
    write_text(&dir.join(TIMINGS_LOG), &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Approach;
    use crate::workload::StorageScenario;

    #[test]
    fn empty_csv_keeps_header() {
        let text = to_csv::<RenewableRow>(&[], RENEWABLE_HEADER).unwrap();
        assert_eq!(text.lines().next().unwrap(), RENEWABLE_HEADER.join(","));
    }

    #[test]
    fn header_matches_serialised_fields() {
        let row = RenewableRow {
            scenario: StorageScenario::A1,
            approach: Approach::Green,
            backup: true,
            beta: 2,
            seed: 1,
            solar_kw: 20.0,
            status: "optimal".into(),
            gap: None,
            tnre_w: Some(1.5),
            bound_w: None,
            network_w: None,
            reduction_pct: None,
            verified: true,
            note: String::new(),
            bb_nodes: 3,
        };
        let text = to_csv(&[row], RENEWABLE_HEADER).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), RENEWABLE_HEADER.join(","));
        assert_eq!(lines.next().unwrap(), "a1,green,on,2,1,20.0,optimal,,1.5,,,,true,,3");
        assert!(renewable_dat(&[]).lines().all(|l| l.starts_with('#')));
    }
}

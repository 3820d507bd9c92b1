use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::run::ExperimentRow;
use crate::error::{Error, Result};
use crate::topology::NodeId;

/// How often each node was chosen as a data centre or backup node.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SitingReport {
    /// Rows with a solution.
    pub rows: usize,
    /// Rows with a solution and a backup node.
    pub backup_rows: usize,
    pub dc_counts: BTreeMap<NodeId, usize>,
    pub bn_counts: BTreeMap<NodeId, usize>,
}

impl SitingReport {
    /// Share of backup rows that placed the backup node at `node`.
    pub fn bn_share(&self, node: NodeId) -> f64 {
        if self.backup_rows == 0 {
            return 0.0;
        }
        self.bn_counts.get(&node).copied().unwrap_or(0) as f64 / self.backup_rows as f64
    }

    pub fn to_csv(&self) -> String {
        let mut nodes: Vec<NodeId> = self.dc_counts.keys().chain(self.bn_counts.keys()).copied().collect();
        nodes.sort();
        nodes.dedup();
        let mut out = String::from("node,dc_count,dc_rows,bn_count,bn_rows\n");
        for n in nodes {
            let _ = writeln!(
                out,
                "{n},{},{},{},{}",
                self.dc_counts.get(&n).copied().unwrap_or(0),
                self.rows,
                self.bn_counts.get(&n).copied().unwrap_or(0),
                self.backup_rows
            );
        }
        out
    }
}

/// Tabulates data-centre and backup-node locations across solved rows.
pub fn report_siting(rows: &[ExperimentRow]) -> Result<SitingReport> {
    let solved: Vec<&ExperimentRow> = rows.iter().filter(|r| r.objective_w.is_some()).collect();
    if solved.is_empty() {
        return Err(Error::Invalid("no solved rows to report siting for".into()));
    }
    let mut report = SitingReport { rows: solved.len(), ..Default::default() };
    for r in solved {
        for &d in &r.dc_nodes {
            *report.dc_counts.entry(d).or_default() += 1;
        }
        if let Some(b) = r.bn_node {
            report.backup_rows += 1;
            *report.bn_counts.entry(b).or_default() += 1;
        }
    }
    Ok(report)
}

//! Independent re-evaluation of a solution against every row, bound and
//! integrality requirement of a model.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Annotation, MilpModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Row tolerance relative to the row's largest coefficient or
    /// right-hand side, so big-M rows are judged on the scale of M.
    pub feasibility: f64,
    pub integrality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { feasibility: 1e-6, integrality: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Row,
    Bound,
    Integrality,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Row or variable name.
    pub name: String,
    /// Equation family of the violated row; `None` for bounds and integrality.
    pub annotation: Option<Annotation>,
    pub amount: f64,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.annotation {
            Some(a) => write!(f, "row {} {} violated by {:.6e}", self.name, a, self.amount),
            None => write!(f, "{:?} of {} violated by {:.6e}", self.kind, self.name, self.amount),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    /// Violated rows annotated with `annotation`.
    pub fn cites(&self, annotation: Annotation) -> bool {
        self.violations.iter().any(|v| v.annotation == Some(annotation))
    }
}

impl std::fmt::Display for FeasibilityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("feasible");
        }
        writeln!(f, "{} violation(s)", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Checks `values` (declaration order) against `model`.
pub fn check_feasibility(model: &MilpModel, values: &[f64], tol: &Tolerances) -> Result<FeasibilityReport> {
    if values.len() != model.variables.len() {
        return Err(Error::Invalid(format!(
            "solution has {} values but the model has {} variables",
            values.len(),
            model.variables.len()
        )));
    }
    let mut report = FeasibilityReport::default();
    for (v, &x) in model.variables.iter().zip(values) {
        if !x.is_finite() {
            return Err(Error::MissingValue(v.name.clone()));
        }
        let slack = tol.feasibility * x.abs().max(1.0);
        let below = v.lower - x;
        let above = x - v.upper;
        if below > slack || above > slack {
            report.violations.push(Violation {
                kind: ViolationKind::Bound,
                name: v.name.clone(),
                annotation: None,
                amount: below.max(above),
            });
        }
        if v.kind.is_integral() && (x - x.round()).abs() > tol.integrality {
            report.violations.push(Violation {
                kind: ViolationKind::Integrality,
                name: v.name.clone(),
                annotation: None,
                amount: (x - x.round()).abs(),
            });
        }
    }
    for row in &model.constraints {
        let amount = row.violation(values);
        if amount > tol.feasibility * row.scale() {
            report.violations.push(Violation {
                kind: ViolationKind::Row,
                name: row.name.clone(),
                annotation: Some(row.annotation),
                amount,
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModeFlags, Relation, VarKind};

    fn model() -> MilpModel {
        let mut m = MilpModel::new(ModeFlags::default());
        let y = m.add_var("y", VarKind::Binary, 0.0, 1.0);
        let x = m.add_var("x", VarKind::Continuous, 0.0, 100.0);
        m.add_constraint("link", vec![(x, 1.0), (y, -1e6)], Relation::Le, 0.0, Annotation::Equation(16));
        m.add_constraint("demand", vec![(x, 1.0)], Relation::Eq, 10.0, Annotation::Equation(31));
        m
    }

    #[test]
    fn feasible_point_is_clean() {
        let r = check_feasibility(&model(), &[1.0, 10.0], &Tolerances::default()).unwrap();
        assert!(r.is_feasible(), "{r}");
    }

    #[test]
    fn violations_cite_annotations() {
        let r = check_feasibility(&model(), &[0.0, 11.0], &Tolerances::default()).unwrap();
        assert!(r.cites(Annotation::Equation(16)));
        assert!(r.cites(Annotation::Equation(31)));
        let r = check_feasibility(&model(), &[0.5, 10.0], &Tolerances::default()).unwrap();
        assert!(r.violations.iter().any(|v| v.kind == ViolationKind::Integrality));
    }

    #[test]
    fn big_m_rows_use_scaled_tolerance() {
        let mut m = MilpModel::new(ModeFlags::default());
        let y = m.add_var("y", VarKind::Binary, 0.0, 1.0);
        let x = m.add_var("x", VarKind::Continuous, 0.0, 100.0);
        m.add_constraint("link", vec![(x, 1.0), (y, -1e6)], Relation::Le, 0.0, Annotation::Equation(16));
        // Excess of 1e-3 on a row whose scale is 1e6.
        assert!(check_feasibility(&m, &[0.0, 1e-3], &Tolerances::default()).unwrap().is_feasible());
        assert!(!check_feasibility(&m, &[0.0, 2.0], &Tolerances::default()).unwrap().is_feasible());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(check_feasibility(&model(), &[1.0], &Tolerances::default()).is_err());
    }
}

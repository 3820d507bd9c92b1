//! CPLEX LP text export.
//!
//! Output is a pure function of the model, so identical models produce
//! identical bytes. Each row is preceded by a `\ (n)` comment naming its
//! equation family.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{MilpModel, VarKind};

const TERMS_PER_LINE: usize = 6;

fn push_terms(out: &mut String, terms: impl Iterator<Item = (f64, String)>) {
    let mut first = true;
    for (k, (coef, name)) in terms.enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n  ");
        }
        let (sign, mag) = if coef < 0.0 { ("-", -coef) } else { ("+", coef) };
        if first {
            if sign == "-" {
                out.push_str("- ");
            }
            first = false;
        } else {
            let _ = write!(out, " {sign} ");
        }
        if mag == 1.0 {
            out.push_str(&name);
        } else {
            let _ = write!(out, "{mag} {name}");
        }
    }
    if first {
        out.push('0');
    }
}

fn number(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

/// Renders the model in LP format.
pub fn to_lp_string(model: &MilpModel) -> String {
    let mut out = String::new();
    let f = &model.flags;
    let _ = writeln!(
        out,
        "\\ greenplan: approach={} backup={} renewable={} dcn={} integer_ports={}",
        f.approach, f.backup, f.renewable, f.dcn, f.integer_ports
    );
    let _ = writeln!(out, "\\ {} variables, {} constraints", model.variables.len(), model.constraints.len());
    out.push_str("Minimize\n obj: ");
    let mut terms: Vec<(f64, String)> =
        model.objective.terms.iter().map(|&(v, a)| (a, model.variables[v.0].name.clone())).collect();
    if model.objective.constant != 0.0 {
        // Constant offset carried by a fixed variable so every reader accepts it.
        terms.push((model.objective.constant, "OBJ_CONSTANT".into()));
    }
    push_terms(&mut out, terms.into_iter());
    out.push_str("\nSubject To\n");
    for row in &model.constraints {
        let _ = writeln!(out, "\\ {}", row.annotation);
        let _ = write!(out, " {}: ", row.name);
        push_terms(&mut out, row.terms.iter().map(|&(v, a)| (a, model.variables[v.0].name.clone())));
        let _ = writeln!(out, " {} {}", row.relation.symbol(), number(row.rhs));
    }

    out.push_str("Bounds\n");
    if model.objective.constant != 0.0 {
        out.push_str(" OBJ_CONSTANT = 1\n");
    }
    for v in &model.variables {
        match v.kind {
            VarKind::Binary if v.lower == 0.0 && v.upper == 1.0 => {}
            _ if v.lower == v.upper => {
                let _ = writeln!(out, " {} = {}", v.name, number(v.lower));
            }
            _ if v.lower == 0.0 && v.upper == f64::INFINITY => {}
            _ if v.upper == f64::INFINITY => {
                let _ = writeln!(out, " {} >= {}", v.name, number(v.lower));
            }
            _ => {
                let _ = writeln!(out, " {} <= {} <= {}", number(v.lower), v.name, number(v.upper));
            }
        }
    }
    for (section, kind) in [("Generals", VarKind::Integer), ("Binaries", VarKind::Binary)] {
        let names: Vec<&str> = model.variables.iter().filter(|v| v.kind == kind).map(|v| v.name.as_str()).collect();
        if names.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{section}");
        for chunk in names.chunks(8) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    out
}

/// Writes the LP export to `path`.
pub fn export_lp(model: &MilpModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_lp_string(model)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Annotation, ModeFlags, Relation};

    fn tiny() -> MilpModel {
        let mut m = MilpModel::new(ModeFlags::default());
        let x = m.add_var("x", VarKind::Continuous, 0.0, f64::INFINITY);
        let y = m.add_var("Y_1_1_2", VarKind::Binary, 0.0, 1.0);
        let c = m.add_var("C_1_2", VarKind::Integer, 0.0, 5.0);
        m.add_constraint("r1", vec![(x, 1.0), (y, -2.5)], Relation::Ge, 3.0, Annotation::Equation(31));
        m.add_constraint("r2", vec![(c, 40.0), (x, -1.0)], Relation::Ge, 0.0, Annotation::Equation(34));
        m.objective.terms = vec![(x, 1.0), (c, 1237.5)];
        m.objective.constant = 255.0;
        m
    }

    #[test]
    fn sections_and_annotations() {
        let text = to_lp_string(&tiny());
        assert!(text.contains("Minimize\n obj: x + 1237.5 C_1_2 + 255 OBJ_CONSTANT\n"));
        assert!(text.contains("\\ (31)\n r1: x - 2.5 Y_1_1_2 >= 3\n"));
        assert!(text.contains(" 0 <= C_1_2 <= 5\n"));
        assert!(text.contains("Generals\n C_1_2\n"));
        assert!(text.contains("Binaries\n Y_1_1_2\n"));
        assert!(text.ends_with("End\n"));
    }

    #[test]
    fn export_is_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.lp");
        let b = dir.path().join("b.lp");
        export_lp(&tiny(), &a).unwrap();
        export_lp(&tiny(), &b).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }
}

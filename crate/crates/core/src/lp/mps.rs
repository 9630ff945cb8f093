//! External-solver adapter: MPS writer and a CSV solution importer.
//!
//! The writer emits free-format MPS (whitespace-separated fields, names up
//! to 64 characters) with integer columns wrapped in INTORG/INTEND markers.
//! The importer reads `status,objective` followed by `column,value` and
//! `row,dual` sections and validates every name against the problem's
//! catalogs; all columns must be present, duals may be partial.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use super::{LpError, LpProblem, PrimalDualSolution, RowSense, SolveStatus};

const MAX_NAME: usize = 64;

/// Solution as read back from an external solver run.
pub type ImportedSolution = PrimalDualSolution;

pub fn export_mps(p: &LpProblem, integers: &[usize], path: &Path) -> Result<(), LpError> {
    p.check()?;
    for name in p.col_names.iter().chain(p.rows.iter().map(|r| &r.name)) {
        if name.len() > MAX_NAME || name.chars().any(|c| c.is_whitespace()) {
            return Err(LpError::BadInput(format!(
                "name '{name}' is not a valid MPS free-format name"
            )));
        }
    }
    let mut is_int = vec![false; p.num_cols()];
    for &j in integers {
        is_int[j] = true;
    }

    let mut out = String::new();
    let _ = writeln!(out, "NAME problem");
    let _ = writeln!(out, "ROWS");
    let _ = writeln!(out, " N obj");
    for row in &p.rows {
        let tag = match row.sense {
            RowSense::Le => 'L',
            RowSense::Eq => 'E',
            RowSense::Ge => 'G',
        };
        let _ = writeln!(out, " {tag} {}", row.name);
    }

    // Column-major entries: objective first, then each row's terms.
    let mut entries: Vec<Vec<(String, f64)>> = vec![Vec::new(); p.num_cols()];
    for (j, &c) in p.obj.iter().enumerate() {
        if c != 0.0 {
            entries[j].push(("obj".into(), c));
        }
    }
    for row in &p.rows {
        for &(j, v) in &row.terms {
            entries[j].push((row.name.clone(), v));
        }
    }
    let _ = writeln!(out, "COLUMNS");
    let mut in_int = false;
    for j in 0..p.num_cols() {
        if is_int[j] != in_int {
            let marker = if is_int[j] { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, " MARKER 'MARKER' '{marker}'");
            in_int = is_int[j];
        }
        for (rname, v) in &entries[j] {
            let _ = writeln!(out, " {} {} {v:.17}", p.col_names[j], rname);
        }
        if entries[j].is_empty() {
            // Keep empty columns visible so catalogs round-trip.
            let _ = writeln!(out, " {} obj 0", p.col_names[j]);
        }
    }
    if in_int {
        let _ = writeln!(out, " MARKER 'MARKER' 'INTEND'");
    }

    let _ = writeln!(out, "RHS");
    for row in &p.rows {
        if row.rhs != 0.0 {
            let _ = writeln!(out, " rhs {} {:.17}", row.name, row.rhs);
        }
    }
    if p.obj_offset != 0.0 {
        // Common convention: objective constant as negated rhs on the N row.
        let _ = writeln!(out, " rhs obj {:.17}", -p.obj_offset);
    }

    let _ = writeln!(out, "BOUNDS");
    for j in 0..p.num_cols() {
        let name = &p.col_names[j];
        let (lb, ub) = (p.lb[j], p.ub[j]);
        if lb == ub {
            let _ = writeln!(out, " FX bnd {name} {lb:.17}");
            continue;
        }
        match (lb.is_finite(), ub.is_finite()) {
            (false, false) => {
                let _ = writeln!(out, " FR bnd {name}");
            }
            (true, false) => {
                if lb != 0.0 {
                    let _ = writeln!(out, " LO bnd {name} {lb:.17}");
                }
            }
            (false, true) => {
                let _ = writeln!(out, " MI bnd {name}");
                let _ = writeln!(out, " UP bnd {name} {ub:.17}");
            }
            (true, true) => {
                if lb != 0.0 {
                    let _ = writeln!(out, " LO bnd {name} {lb:.17}");
                }
                let _ = writeln!(out, " UP bnd {name} {ub:.17}");
            }
        }
    }
    let _ = writeln!(out, "ENDATA");

    let mut f = std::fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

pub fn import_solution(path: &Path, p: &LpProblem) -> Result<ImportedSolution, LpError> {
    let text = std::fs::read_to_string(path)?;
    let parse_err = |line: usize, message: String| LpError::ParseError { line, message };

    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (ln, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty solution file".into()))?;
    if header.trim() != "status,objective" {
        return Err(parse_err(ln + 1, "expected 'status,objective' header".into()));
    }
    let (ln, statline) = lines
        .next()
        .ok_or_else(|| parse_err(ln + 2, "missing status line".into()))?;
    let mut it = statline.trim().splitn(2, ',');
    let status = match it.next().unwrap_or("") {
        "optimal" => SolveStatus::Optimal,
        "infeasible" => SolveStatus::Infeasible,
        "unbounded" => SolveStatus::Unbounded,
        "iteration-limit" => SolveStatus::IterationLimit,
        other => {
            return Err(parse_err(ln + 1, format!("unknown status '{other}'")));
        }
    };
    let objective: f64 = it
        .next()
        .ok_or_else(|| parse_err(ln + 1, "missing objective value".into()))?
        .trim()
        .parse()
        .map_err(|_| parse_err(ln + 1, "objective is not a number".into()))?;

    let mut primal = vec![f64::NAN; p.num_cols()];
    let mut row_duals = vec![0.0; p.num_rows()];
    let mut row_index = std::collections::HashMap::new();
    for (i, row) in p.rows.iter().enumerate() {
        row_index.insert(row.name.as_str(), i);
    }

    #[derive(PartialEq)]
    enum Section {
        None,
        Columns,
        Rows,
    }
    let mut section = Section::None;
    for (ln, line) in lines {
        let t = line.trim();
        if t == "column,value" {
            section = Section::Columns;
            continue;
        }
        if t == "row,dual" {
            section = Section::Rows;
            continue;
        }
        let (name, val) = t
            .split_once(',')
            .ok_or_else(|| parse_err(ln + 1, format!("expected 'name,value', got '{t}'")))?;
        let v: f64 = val
            .trim()
            .parse()
            .map_err(|_| parse_err(ln + 1, format!("bad number for '{name}'")))?;
        match section {
            Section::Columns => {
                let j = p
                    .col_index(name)
                    .ok_or_else(|| parse_err(ln + 1, format!("unknown column '{name}'")))?;
                primal[j] = v;
            }
            Section::Rows => {
                let i = *row_index
                    .get(name)
                    .ok_or_else(|| parse_err(ln + 1, format!("unknown row '{name}'")))?;
                row_duals[i] = v;
            }
            Section::None => {
                return Err(parse_err(ln + 1, "value outside any section".into()));
            }
        }
    }
    if status == SolveStatus::Optimal {
        if let Some(j) = primal.iter().position(|v| v.is_nan()) {
            return Err(parse_err(
                text.lines().count(),
                format!("missing value for column '{}'", p.col_names[j]),
            ));
        }
    }
    Ok(ImportedSolution {
        status,
        primal,
        objective,
        row_duals,
        reduced_costs: vec![0.0; p.num_cols()],
    })
}

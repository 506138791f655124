//! Subcommand implementations.

use std::path::Path;

use casimir_core::analysis::{
    comparison_pair, compare_point, nernst_check, smallest_decade_slope, AnalysisError, ComparisonRow,
    DEFAULT_LADDER, DEFAULT_RESIDUAL_TOLERANCE,
};
use casimir_core::materials::{eval_eps, resolve_material, static_eps, MaterialError};
use casimir_core::{entropy, free_energy, pressure, Evaluated, LifshitzError, PlateConfiguration, Quantity};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Cell, Table};

/// A table to emit, and the failure to report once it is written.
pub struct Report {
    pub table: Table,
    pub failure: Option<CliError>,
}

/// Value, error and term count of one column.
struct Outcome {
    value: f64,
    error: f64,
    terms: u64,
    converged: bool,
}

fn outcome(r: Result<Evaluated, LifshitzError>) -> Result<Outcome, CliError> {
    match r {
        Ok(e) => Ok(Outcome {
            value: e.value,
            error: e.error,
            terms: e.diagnostics.terms_used,
            converged: true,
        }),
        Err(LifshitzError::Convergence { partial, terms, .. }) => Ok(Outcome {
            value: partial,
            error: f64::NAN,
            terms,
            converged: false,
        }),
        Err(LifshitzError::DerivativeUnstable { value, .. }) => Ok(Outcome {
            value,
            error: f64::NAN,
            terms: 0,
            converged: false,
        }),
        Err(e) => Err(CliError::config("materials", &e.to_string())),
    }
}

fn flag(failed: &[&str]) -> Cell {
    if failed.is_empty() {
        Cell::Text("ok".into())
    } else {
        Cell::Text(format!("unconverged:{}", failed.join("+")))
    }
}

fn failure_for(rows_failed: usize, what: &str) -> Option<CliError> {
    (rows_failed > 0).then(|| CliError::Convergence(format!("{rows_failed} {what} did not converge; see the flag column")))
}

fn base_configuration(cfg: &RunConfig) -> Result<PlateConfiguration, CliError> {
    let [m1, m2] = cfg.materials.clone();
    PlateConfiguration::new(m1, m2, cfg.separations[0], cfg.temperatures[0])
        .map_err(|e| CliError::config("separation_m", &e.to_string()))
}

pub fn compute(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.require_temperatures()?;
    let base = base_configuration(cfg)?;
    let grid = cfg.grid();
    let results: Vec<Result<Vec<Cell>, CliError>> = grid
        .par_iter()
        .map(|&(a, t)| {
            let pc = base.with_separation(a).with_temperature(t);
            let f = outcome(free_energy(&pc, &cfg.numerics))?;
            let p = outcome(pressure(&pc, &cfg.numerics))?;
            // A failed inner free energy carries F's partial sum, not S.
            let s = match entropy(&pc, &cfg.numerics) {
                Err(LifshitzError::Convergence { terms, .. }) => Outcome {
                    value: f64::NAN,
                    error: f64::NAN,
                    terms,
                    converged: false,
                },
                r => outcome(r)?,
            };
            let failed: Vec<&str> = [("F", &f), ("P", &p), ("S", &s)]
                .iter()
                .filter(|(_, o)| !o.converged)
                .map(|(n, _)| *n)
                .collect();
            Ok(vec![
                Cell::Num(a),
                Cell::Num(t),
                Cell::Num(pc.tau()),
                Cell::Num(f.value),
                Cell::Num(p.value),
                Cell::Num(s.value),
                Cell::Num(f.error),
                Cell::Num(p.error),
                Cell::Num(s.error),
                Cell::Int(f.terms),
                flag(&failed),
            ])
        })
        .collect();
    let mut table = Table::new(vec![
        "a_m",
        "T_K",
        "tau",
        "F_J_per_m2",
        "P_Pa",
        "S_J_per_K_m2",
        "err_F",
        "err_P",
        "err_S",
        "l_terms_used",
        "flag",
    ]);
    for r in results {
        table.rows.push(r?);
    }
    let failed = table
        .rows
        .iter()
        .filter(|r| matches!(r.last(), Some(Cell::Text(f)) if f != "ok"))
        .count();
    Ok(Report {
        table,
        failure: failure_for(failed, "grid points"),
    })
}

fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::FreeEnergy => "free_energy",
        Quantity::Pressure => "pressure",
        Quantity::Entropy => "entropy",
    }
}

pub fn compare_asymptotic(cfg: &RunConfig) -> Result<Report, CliError> {
    cfg.require_temperatures()?;
    let a = cfg.single_separation()?;
    let [m1, m2] = &cfg.materials;
    let pair = comparison_pair(m1, m2).map_err(|e| CliError::config("materials", &e.to_string()))?;
    let base = base_configuration(cfg)?;
    let points: Vec<(f64, Quantity)> = cfg
        .temperatures
        .iter()
        .flat_map(|&t| [(t, Quantity::FreeEnergy), (t, Quantity::Pressure)])
        .collect();
    let results: Vec<Result<Result<ComparisonRow, (f64, f64, Quantity)>, CliError>> = points
        .par_iter()
        .map(|&(t, q)| {
            let pc = base.with_separation(a).with_temperature(t);
            match compare_point(pair, &pc, q, &cfg.numerics) {
                Ok(row) => Ok(Ok(row)),
                Err(e) if e.is_convergence_failure() => Ok(Err((t, pc.tau(), q))),
                Err(e) => Err(CliError::config("materials", &e.to_string())),
            }
        })
        .collect();

    let mut table = Table::new(vec![
        "quantity",
        "T_K",
        "tau",
        "exact_correction",
        "err_exact",
        "asymptotic_correction",
        "rel_diff",
        "flag",
    ]);
    let mut good = Vec::new();
    let mut failed = 0;
    for r in results {
        match r? {
            Ok(row) => {
                table.rows.push(vec![
                    Cell::Text(quantity_name(row.quantity).into()),
                    Cell::Num(row.temperature),
                    Cell::Num(row.tau),
                    Cell::Num(row.exact.value),
                    Cell::Num(row.exact.error),
                    Cell::Num(row.asymptotic),
                    Cell::Num(row.rel_diff),
                    Cell::Text("ok".into()),
                ]);
                good.push(row);
            }
            Err((t, tau, q)) => {
                failed += 1;
                table.rows.push(vec![
                    Cell::Text(quantity_name(q).into()),
                    Cell::Num(t),
                    Cell::Num(tau),
                    Cell::Num(f64::NAN),
                    Cell::Num(f64::NAN),
                    Cell::Num(f64::NAN),
                    Cell::Num(f64::NAN),
                    Cell::Text("unconverged".into()),
                ]);
            }
        }
    }
    for q in [Quantity::FreeEnergy, Quantity::Pressure] {
        if let Some(fit) = smallest_decade_slope(&good, q) {
            let name = quantity_name(q);
            table.note(format!("slope_{name}"), Cell::Num(fit.slope));
            table.note(format!("slope_{name}_stderr"), Cell::Num(fit.slope_stderr));
            table.note(format!("slope_{name}_points"), Cell::Int(fit.points as u64));
        }
    }
    Ok(Report {
        table,
        failure: failure_for(failed, "rows"),
    })
}

pub fn nernst(cfg: &RunConfig) -> Result<Report, CliError> {
    let a = cfg.single_separation()?;
    let ladder = cfg.ladder.clone().unwrap_or_else(|| DEFAULT_LADDER.to_vec());
    let tol = cfg.residual_tolerance.unwrap_or(DEFAULT_RESIDUAL_TOLERANCE);
    let [m1, m2] = &cfg.materials;
    let report = nernst_check(m1, m2, a, &ladder, &cfg.numerics, tol).map_err(|e| match e {
        AnalysisError::LadderUnconverged { .. } => CliError::Convergence(e.to_string()),
        e if e.is_convergence_failure() => CliError::Convergence(format!("ladder-unconverged: {e}")),
        e => CliError::config("materials", &e.to_string()),
    })?;
    let mut table = Table::new(vec!["T_K", "tau", "S_J_per_K_m2", "err_S"]);
    for p in &report.ladder {
        table.rows.push(vec![
            Cell::Num(p.temperature),
            Cell::Num(p.tau),
            Cell::Num(p.entropy.value),
            Cell::Num(p.entropy.error),
        ]);
    }
    table.note("s0_J_per_K_m2", Cell::Num(report.fit.s0));
    table.note("s0_uncertainty", Cell::Num(report.fit.s0_uncertainty));
    table.note("s2", Cell::Num(report.fit.s2));
    table.note("s3", Cell::Num(report.fit.s3));
    table.note("rms_residual", Cell::Num(report.fit.rms_residual));
    table.note("all_positive", Cell::Text(report.all_positive.to_string()));
    let verdict = serde_json::to_value(report.verdict).expect("verdict serializes");
    table.note("verdict", Cell::Text(verdict.as_str().unwrap_or_default().to_string()));
    if let (Some(e), Some(r)) = (report.expected_s0, report.relative_to_expected) {
        table.note("expected_s0", Cell::Num(e));
        table.note("relative_to_expected", Cell::Num(r));
    }
    Ok(Report { table, failure: None })
}

fn material_error(e: MaterialError, field: &str) -> CliError {
    match e {
        MaterialError::Io { .. } => CliError::Io(e.to_string()),
        e => CliError::config(field, &e.to_string()),
    }
}

pub fn validate_material(path: &Path) -> Result<String, CliError> {
    if !path.exists() {
        return Err(CliError::Io(format!("{}: no such file", path.display())));
    }
    let model = resolve_material(&path.to_string_lossy(), Path::new(".")).map_err(|e| material_error(e, "material"))?;
    let static_value = match static_eps(&model).finite() {
        Some(e) => format!("{e:.16e}"),
        None => "divergent".into(),
    };
    Ok(format!("ok: {} (static permittivity {static_value})\n", model.kind()))
}

pub fn eps(material: &str, xi: f64, temperature: Option<f64>) -> Result<String, CliError> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(CliError::config("--xi", "must be finite and > 0"));
    }
    let model = resolve_material(material, Path::new(".")).map_err(|e| material_error(e, "--material"))?;
    let value = eval_eps(&model, xi, temperature).map_err(|e| material_error(e, "--material"))?;
    Ok(format!("{value:.16e}\n"))
}

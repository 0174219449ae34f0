use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::Format;
use crate::error::CliError;
use crate::plot::write_plots;
use crate::report::Report;
use crate::run::Outcome;
use crate::table::Table;

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(&path.display().to_string(), e))
}

pub fn report_json(report: &Report) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| CliError::Numerical(format!("report: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn modes_table(report: &Report) -> Table {
    let mut columns: [Vec<f64>; 5] = Default::default();
    for b in &report.branches {
        for m in &b.stability.modes {
            columns[0].push(b.branch as f64);
            columns[1].push(m.l as f64);
            columns[2].push(m.kappa);
            columns[3].push(m.min_eigenvalue);
            columns[4].push(m.max_eigenvalue);
        }
    }
    let mut table = Table::default();
    for (name, values) in ["branch", "l", "kappa", "min_eigenvalue", "max_eigenvalue"]
        .into_iter()
        .zip(columns)
    {
        table.push(name, values);
    }
    table
}

pub fn report_text(report: &Report) -> String {
    let c = &report.config;
    let mut out = String::new();
    let _ = writeln!(out, "dualwell {} run at {}", report.version, report.timestamp);
    let _ = writeln!(
        out,
        "nu = {}, lambda = {}, annulus [{}, {}], n = {}, {} nodes",
        c.spec.nu, c.spec.lambda, c.spec.r2, c.spec.r1, c.spec.n, c.grid.nodes
    );
    let load = &report.validation.load;
    let _ = writeln!(
        out,
        "load: balance residual {:.3e}, {} sign change(s), L1 norm {:.6} below bound {:.6}",
        load.balance_residual, load.sign_changes, load.l1_norm, load.l1_bound
    );
    let stress = &report.validation.stress;
    let _ = writeln!(
        out,
        "stress: F(R2) = {:.3e}, F(R1) = {:.3e}, max |sigma|^2 = {:.6e} of critical {:.6e}",
        stress.inner_endpoint, stress.outer_endpoint, stress.max_amplitude, stress.critical_amplitude
    );
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<7}{:>22}{:>22}{:>12}{:>12}{:>12}  verdict",
        "branch", "primal", "dual", "gap", "EL const", "EL fd"
    );
    for b in &report.branches {
        let _ = writeln!(
            out,
            "{:<7}{:>22.15e}{:>22.15e}{:>12.3e}{:>12.3e}{:>12.3e}  {}",
            b.branch,
            b.energies.primal,
            b.energies.dual,
            b.energies.gap,
            b.residuals.constitutive,
            b.residuals.finite_difference,
            b.stability.verdict
        );
    }
    let _ = writeln!(out);
    for b in &report.branches {
        let mins: Vec<String> = b
            .stability
            .modes
            .iter()
            .map(|m| format!("{:.3e}", m.min_eigenvalue))
            .collect();
        let _ = writeln!(out, "branch {} mode minima (l = 0..): {}", b.branch, mins.join(" "));
    }
    if let Some(oracle) = &report.oracle {
        let _ = writeln!(out);
        let _ = writeln!(out, "oracle (seed {}):", oracle.seed);
        for s in &oracle.sampled {
            let _ = writeln!(
                out,
                "  branch {} sampled energy {:.12e}, relative difference {:.3e}",
                s.branch, s.discrete, s.relative_difference
            );
        }
        for d in &oracle.descents {
            let _ = writeln!(
                out,
                "  start {}: {} steps, converged {}, energy {:.6e} -> {:.12e}, nearest branch {} at {:.3e}",
                d.start, d.iterations, d.converged, d.initial_energy, d.final_energy, d.nearest_branch, d.distance
            );
        }
    }
    out
}

/// Writes every artifact in one pass after the computation has finished.
pub fn write_outcome(outcome: &Outcome, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(&dir.display().to_string(), e))?;
    let formats = &outcome.report.config.output;
    let mut written = Vec::new();

    let fields = dir.join("fields.csv");
    outcome.fields.write_csv(&fields)?;
    written.push(fields);

    let json = dir.join("report.json");
    write(&json, &report_json(&outcome.report)?)?;
    written.push(json);

    if formats.wants(Format::Modes) {
        let modes = dir.join("modes.csv");
        modes_table(&outcome.report).write_csv(&modes)?;
        written.push(modes);
    }
    if formats.wants(Format::Text) {
        let text = dir.join("report.txt");
        write(&text, &report_text(&outcome.report))?;
        written.push(text);
    }
    if formats.wants(Format::Plots) {
        written.extend(write_plots(&outcome.fields, dir)?);
    }
    Ok(written)
}

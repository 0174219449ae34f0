use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dualwell::dual_algebra::Branch;
use dualwell::energy::{duality_gap, primal_energy};
use dualwell::fields::{compute_f, max_norm, solve_branches, strain_consistency, BranchSet};
use dualwell::oracle::{descend, discrete_energy, el_residual_direct, smooth_start, DescentControls, DiscreteState};
use dualwell::problem::{validate_load, validate_spec, LoadReport};
use dualwell::stability::{classify, dual_curvature};

use crate::config::Prepared;
use crate::error::CliError;
use crate::report::{
    BranchReport, Check, Descent, Energies, LoadCertificate, Mode, OracleReport, Report, Residuals, SampledEnergy,
    Stability, StressSummary, Validation,
};
use crate::table::Table;

/// Amplitude of the random smooth starts handed to the oracle.
pub const START_AMPLITUDE: f64 = 1e-4;
const START_MODES: usize = 4;

pub struct Outcome {
    pub report: Report,
    pub fields: Table,
}

pub fn spec_checks(prepared: &Prepared) -> Vec<Check> {
    validate_spec(&prepared.spec)
        .checks
        .into_iter()
        .map(|c| Check {
            name: c.name.to_string(),
            passed: c.passed,
            detail: c.detail,
        })
        .collect()
}

fn certificate(report: &LoadReport) -> LoadCertificate {
    LoadCertificate {
        balance_residual: report.balance_residual,
        balance_ok: report.balance_ok,
        sign_changes: report.sign_changes,
        single_zero_ok: report.single_zero_ok,
        r3: report.r3,
        l1_norm: report.l1_norm,
        l1_bound: report.l1_bound,
        l1_ok: report.l1_ok,
    }
}

/// Load hypotheses only. Fails with exit code 3 when one of them does not hold.
pub fn check_load(prepared: &Prepared) -> Result<LoadCertificate, CliError> {
    let report = validate_load(&prepared.load, &prepared.spec).map_err(CliError::from_core)?;
    if !report.passed() {
        return Err(CliError::Hypothesis(report.failures().join("; ")));
    }
    Ok(certificate(&report))
}

fn fields_table(set: &BranchSet) -> Table {
    let stress = &set.stress;
    let mut table = Table::default();
    table.push("r", stress.grid().nodes().to_vec());
    table.push("f", stress.f_values.clone());
    table.push("G", stress.g_values.clone());
    table.push("F", stress.stress_values.clone());
    table.push("sigma_norm_sq", stress.amplitude_values.clone());
    for b in Branch::ALL {
        table.push(&format!("zeta{}", b.index()), set.dual(b).zeta_values.clone());
    }
    for b in Branch::ALL {
        table.push(&format!("u{}", b.index()), set.point(b).u_values.clone());
    }
    for b in Branch::ALL {
        table.push(&format!("strain{}", b.index()), set.point(b).strain_values.clone());
    }
    table
}

fn sampled(set: &BranchSet, b: Branch) -> DiscreteState {
    DiscreteState {
        grid: set.stress.grid().clone(),
        u_nodes: set.point(b).u_values.clone(),
    }
}

fn run_oracle(prepared: &Prepared, set: &BranchSet) -> Result<OracleReport, CliError> {
    let (spec, load) = (&prepared.spec, &prepared.load);
    let seed = prepared.config.oracle.seed;
    let mut sampled_energies = Vec::new();
    let mut centered = Vec::new();
    for b in Branch::ALL {
        let state = sampled(set, b);
        let discrete = discrete_energy(&state, load, spec);
        let primal = primal_energy(set.point(b), load).map_err(CliError::from_core)?;
        sampled_energies.push(SampledEnergy {
            branch: b.index(),
            discrete,
            primal,
            relative_difference: (discrete - primal).abs() / primal.abs().max(f64::MIN_POSITIVE),
        });
        centered.push(state.centered());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let controls = DescentControls::default();
    let mut descents = Vec::new();
    for start in 0..prepared.config.oracle.starts {
        let coefficients: Vec<f64> = (0..START_MODES).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let initial = smooth_start(&prepared.grid, &coefficients, START_AMPLITUDE);
        let out = descend(&initial, load, spec, &controls).map_err(CliError::from_core)?;
        let end = out.state.centered();
        let (nearest, distance) = centered
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let d = end.iter().zip(c).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                (i + 1, d)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("three branches");
        descents.push(Descent {
            start,
            iterations: out.iterations,
            converged: out.converged,
            gradient_norm: out.gradient_norm,
            initial_energy: out.energies[0],
            final_energy: out.final_energy(),
            nearest_branch: nearest,
            distance,
        });
    }
    Ok(OracleReport {
        seed,
        sampled: sampled_energies,
        descents,
    })
}

/// validate → stress → branches → energies → stability → oracle.
pub fn run(prepared: &Prepared, timestamp: String) -> Result<Outcome, CliError> {
    let load_certificate = check_load(prepared)?;
    let (spec, load) = (&prepared.spec, &prepared.load);
    let stress = compute_f(load, spec, &prepared.grid).map_err(CliError::from_core)?;
    let c = stress.certificate;
    let stress_summary = StressSummary {
        inner_endpoint: c.inner_endpoint,
        outer_endpoint: c.outer_endpoint,
        sign_constant: c.sign_constant,
        interior_positive: c.interior_positive,
        max_amplitude: c.max_amplitude,
        critical_amplitude: c.critical,
    };
    let set = solve_branches(stress).map_err(CliError::from_core)?;
    let fields = fields_table(&set);
    if let Some((column, row)) = fields.first_non_finite() {
        return Err(CliError::Numerical(format!("non-finite {column} at row {row}")));
    }

    let stability = &prepared.config.stability;
    let classes = classify(&set, stability.max_mode, stability.elements).map_err(CliError::from_core)?;
    let mut branches = Vec::new();
    for (b, class) in Branch::ALL.into_iter().zip(&classes) {
        let energy = duality_gap(set.point(b), set.dual(b), load).map_err(CliError::from_core)?;
        let fd = el_residual_direct(&sampled(&set, b), load, spec);
        let curvature = dual_curvature(set.dual(b));
        branches.push(BranchReport {
            branch: b.index(),
            energies: Energies {
                primal: energy.primal,
                dual: energy.dual,
                total_complementary: energy.total_complementary,
                gap: energy.gap,
                tolerance: energy.tolerance,
            },
            residuals: Residuals {
                constitutive: max_norm(&strain_consistency(set.point(b))),
                finite_difference: max_norm(&fd),
            },
            stability: Stability {
                verdict: class.verdict.as_str().to_string(),
                scale: class.spectrum.scale,
                tolerance: class.spectrum.tolerance(),
                modes: class
                    .spectrum
                    .modes
                    .iter()
                    .map(|m| Mode {
                        l: m.l,
                        kappa: m.kappa,
                        min_eigenvalue: m.min_eigenvalue,
                        max_eigenvalue: m.max_eigenvalue,
                    })
                    .collect(),
                dual_form_sign: class.dual_form_sign,
                dual_bracket_discrepancy: curvature.max_discrepancy(),
            },
        });
    }

    let oracle = if prepared.config.oracle.enabled {
        Some(run_oracle(prepared, &set)?)
    } else {
        None
    };

    let report = Report {
        timestamp,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: prepared.config.clone(),
        validation: Validation {
            spec: spec_checks(prepared),
            load: load_certificate,
            stress: stress_summary,
        },
        branches,
        oracle,
    };
    Ok(Outcome { report, fields })
}

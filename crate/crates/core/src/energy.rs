//! Primal, total complementary and pure complementary energies.
//!
//! All three reduce to radial integrals ω_{n−1}∫ (…) ρ^{n−1} dρ evaluated
//! with the same composite Gauss rule on the stress mesh:
//!
//! ```text
//! I[u]    = ∫ ν/2 (½u′² − λ)² − f u
//! Ξ(u, ζ) = ∫ ½u′² ζ − (ζ²/2ν + λζ) − f u
//! I_d[ζ]  = −½ ∫ |σ|²/ζ + 2λζ + ζ²/ν
//! ```

use crate::dual_algebra::{critical_amplitude, Branch};
use crate::error::{Error, Result};
use crate::fields::{CriticalPoint, DualBranchField, RadialStress, SWITCH_FRACTION};
use crate::problem::{LoadFunction, ProblemSpec};
use crate::quadrature::{gauss_points, CompensatedSum};

/// Relative gap tolerance: gap ≤ GAP_TOLERANCE · (1 + |I|).
pub const GAP_TOLERANCE: f64 = 1e-7;

/// Double-well density H(s) = ν/2 (½s² − λ)².
pub fn well_density(strain: f64, spec: &ProblemSpec) -> f64 {
    0.5 * spec.nu * (0.5 * strain * strain - spec.lambda).powi(2)
}

/// Conjugate Ψ*(ζ) = ζ²/(2ν) + λζ.
pub fn conjugate_density(zeta: f64, spec: &ProblemSpec) -> f64 {
    zeta * zeta / (2.0 * spec.nu) + spec.lambda * zeta
}

/// |σ|²/ζ, replaced by 2ζ(λ + ζ/ν) where both numerator and denominator vanish.
pub fn stress_over_zeta(amplitude: f64, zeta: f64, spec: &ProblemSpec) -> f64 {
    let switch = SWITCH_FRACTION * critical_amplitude(spec.nu, spec.lambda);
    if zeta == 0.0 || amplitude < switch {
        2.0 * zeta * (spec.lambda + zeta / spec.nu)
    } else {
        amplitude / zeta
    }
}

/// ω_{n−1}∫ integrand(ρ)·ρ^{n−1} dρ over the stress mesh.
fn radial_integral<F>(stress: &RadialStress, mut integrand: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let spec = stress.spec();
    let mut acc = CompensatedSum::default();
    for pair in stress.mesh().windows(2) {
        for (x, w) in gauss_points(pair[0], pair[1]) {
            acc.add(w * integrand(x)? * spec.radial_weight(x));
        }
    }
    Ok(spec.sphere_area() * acc.value())
}

/// I[u] for a critical point, optionally shifted by a constant.
pub fn primal_energy_shifted(cp: &CriticalPoint, load: &LoadFunction, shift: f64) -> Result<f64> {
    let stress = cp.stress();
    let spec = *stress.spec();
    radial_integral(stress, |r| {
        let s = cp.strain_at(r)?;
        let u = cp.u_at(r)? + shift;
        Ok(well_density(s, &spec) - load.eval(r) * u)
    })
}

/// I[ū] = ∫_Ω H(|∇ū|) − f ū dx.
pub fn primal_energy(cp: &CriticalPoint, load: &LoadFunction) -> Result<f64> {
    primal_energy_shifted(cp, load, 0.0)
}

/// I_d[ζ] = −½∫_Ω |σ|²/ζ + 2λζ + ζ²/ν dx.
pub fn dual_energy(zeta: &DualBranchField) -> Result<f64> {
    let stress = zeta.stress();
    let spec = *stress.spec();
    let value = radial_integral(stress, |r| {
        let z = zeta.zeta_at(r)?;
        let a = stress.amplitude_at(r);
        Ok(stress_over_zeta(a, z, &spec) + 2.0 * spec.lambda * z + z * z / spec.nu)
    })?;
    Ok(-0.5 * value)
}

/// Ξ(u, ζ) = ∫_Ω ½|∇u|² ζ − Ψ*(ζ) − f u dx.
pub fn total_complementary(cp: &CriticalPoint, zeta: &DualBranchField, load: &LoadFunction) -> Result<f64> {
    let stress = cp.stress();
    let spec = *stress.spec();
    radial_integral(stress, |r| {
        let s = cp.strain_at(r)?;
        let z = zeta.zeta_at(r)?;
        let u = cp.u_at(r)?;
        Ok(0.5 * s * s * z - conjugate_density(z, &spec) - load.eval(r) * u)
    })
}

/// Energies of one branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub branch: Branch,
    pub primal: f64,
    pub dual: f64,
    pub total_complementary: f64,
    /// |primal − dual|.
    pub gap: f64,
    pub tolerance: f64,
}

/// Assembles the energies of one critical pair and enforces the zero gap.
pub fn duality_gap(cp: &CriticalPoint, zeta: &DualBranchField, load: &LoadFunction) -> Result<EnergyReport> {
    if cp.branch != zeta.branch {
        return Err(Error::GridMismatch(format!(
            "critical point of branch {} paired with dual field of branch {}",
            cp.branch, zeta.branch
        )));
    }
    let primal = primal_energy(cp, load)?;
    let dual = dual_energy(zeta)?;
    let total_complementary = total_complementary(cp, zeta, load)?;
    let gap = (primal - dual).abs();
    let tolerance = GAP_TOLERANCE * (1.0 + primal.abs());
    if gap > tolerance || (total_complementary - dual).abs() > tolerance {
        return Err(Error::GapViolation {
            branch: cp.branch.index(),
            gap: gap.max((total_complementary - dual).abs()),
            tolerance,
        });
    }
    Ok(EnergyReport {
        branch: cp.branch,
        primal,
        dual,
        total_complementary,
        gap,
        tolerance,
    })
}

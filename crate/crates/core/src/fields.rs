//! Radial stress, dual branch fields and the three displacement profiles.
//!
//! The radial stress is σ(x) = F(r)·x with F(r) = −G(r)/rⁿ and
//! G(r) = ∫_{R₂}^r f(ρ)ρ^{n−1} dρ, so |σ|² = F²r² and the radial flux is
//! F·r = −G/r^{n−1}. Each branch root ζᵢ of E(ζ) = F²r² gives a strain
//! ūᵢ′ = F·r/ζᵢ, and ūᵢ is its running integral.

use std::sync::Arc;

use crate::dual_algebra::{critical_amplitude, solve_dae, Branch};
use crate::error::{Error, Result};
use crate::problem::{LoadFunction, ProblemSpec, RadialGrid};
use crate::quadrature::{gauss_cell, gauss_points};

/// Tolerance on F at the two boundary spheres.
pub const ENDPOINT_TOLERANCE: f64 = 1e-10;

/// Below `SWITCH_FRACTION · critical` the strain of branches 1 and 2 is taken
/// from |ū′|² = 2(λ + ζ/ν) instead of the 0/0 quotient F·r/ζ.
pub const SWITCH_FRACTION: f64 = 1e-10;

/// Default number of radial nodes.
pub const DEFAULT_NODES: usize = 2001;

/// Certificate attached to a computed stress profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressCertificate {
    /// F(R₂).
    pub inner_endpoint: f64,
    /// F(R₁); nonzero only through the balance residual.
    pub outer_endpoint: f64,
    /// F has one sign on the open interval.
    pub sign_constant: bool,
    /// F²r² > 0 at every interior node.
    pub interior_positive: bool,
    pub max_amplitude: f64,
    pub critical: f64,
}

impl StressCertificate {
    pub fn endpoints_ok(&self) -> bool {
        self.inner_endpoint.abs() <= ENDPOINT_TOLERANCE
            && self.outer_endpoint.abs() <= ENDPOINT_TOLERANCE
    }

    pub fn bound_ok(&self) -> bool {
        self.max_amplitude < self.critical
    }

    pub fn is_certified(&self) -> bool {
        self.endpoints_ok() && self.sign_constant && self.interior_positive && self.bound_ok()
    }
}

/// F, G and |σ|² on a radial grid.
///
/// Integrals run over a mesh made of the grid nodes plus any interior kinks
/// of the load, so piecewise-linear loads are integrated piece by piece.
#[derive(Debug, Clone)]
pub struct RadialStress {
    spec: ProblemSpec,
    load: LoadFunction,
    grid: RadialGrid,
    mesh: Vec<f64>,
    mesh_g: Vec<f64>,
    pub f_values: Vec<f64>,
    pub g_values: Vec<f64>,
    pub stress_values: Vec<f64>,
    pub amplitude_values: Vec<f64>,
    interior_sign: f64,
    allow_degenerate: bool,
    pub certificate: StressCertificate,
}

impl RadialStress {
    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn load(&self) -> &LoadFunction {
        &self.load
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// Integration mesh: grid nodes merged with the load's interior kinks.
    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }

    /// Sign of F on the open interval; −1 by convention for the zero load.
    pub fn interior_sign(&self) -> f64 {
        self.interior_sign
    }

    /// Accepts the identically zero load downstream. Branches 1 and 2 then
    /// carry the constant strains −√(2λ) and +√(2λ).
    pub fn allow_degenerate(mut self) -> Self {
        self.allow_degenerate = true;
        self
    }

    pub fn is_degenerate(&self) -> bool {
        self.certificate.max_amplitude == 0.0
    }

    fn mesh_piece(&self, r: f64) -> usize {
        self.mesh
            .partition_point(|&x| x <= r)
            .saturating_sub(1)
            .min(self.mesh.len() - 2)
    }

    /// G(r) = ∫_{R₂}^r f ρ^{n−1} dρ at any radius in [R₂, R₁].
    pub fn g_at(&self, r: f64) -> f64 {
        let k = self.mesh_piece(r);
        let start = self.mesh[k];
        if r == start {
            return self.mesh_g[k];
        }
        self.mesh_g[k] + gauss_cell(|x| self.load.eval(x) * self.spec.radial_weight(x), start, r)
    }

    /// Radial flux F(r)·r.
    pub fn flux_at(&self, r: f64) -> f64 {
        -self.g_at(r) / self.spec.radial_weight(r)
    }

    /// |σ|² = F²r².
    pub fn amplitude_at(&self, r: f64) -> f64 {
        self.flux_at(r).powi(2)
    }

    fn is_endpoint(&self, r: f64) -> bool {
        r == self.spec.r2 || r == self.spec.r1
    }

    fn check_usable(&self) -> Result<()> {
        if self.is_degenerate() {
            return if self.allow_degenerate {
                Ok(())
            } else {
                Err(Error::DegenerateLoad(
                    "F vanishes identically; enable the degenerate case explicitly".into(),
                ))
            };
        }
        let c = &self.certificate;
        if !c.endpoints_ok() {
            return Err(Error::Numerical(format!(
                "stress violates F(R2) = F(R1) = 0: {:e}, {:e}",
                c.inner_endpoint, c.outer_endpoint
            )));
        }
        if !c.sign_constant || !c.interior_positive {
            return Err(Error::Numerical(
                "stress changes sign or vanishes inside the annulus".into(),
            ));
        }
        Ok(())
    }

    /// ζ of `branch` at radius `r`. The boundary spheres take the A = 0 roots.
    pub fn zeta_at(&self, branch: Branch, r: f64) -> Result<f64> {
        let (nu, lambda) = (self.spec.nu, self.spec.lambda);
        let amplitude = if self.is_endpoint(r) {
            0.0
        } else {
            self.amplitude_at(r)
        };
        let roots = solve_dae(amplitude, nu, lambda)?;
        roots.branch(branch).ok_or(Error::AmplitudeOverflow {
            radius: r,
            amplitude,
            critical: critical_amplitude(nu, lambda),
        })
    }

    /// Strain ūᵢ′(r) = F·r/ζᵢ, with the finite limit used near F·r = 0.
    pub fn strain_at(&self, branch: Branch, r: f64) -> Result<f64> {
        let zeta = self.zeta_at(branch, r)?;
        let flux = if self.is_endpoint(r) {
            0.0
        } else {
            self.flux_at(r)
        };
        Ok(self.strain_from(branch, flux, zeta))
    }

    fn strain_from(&self, branch: Branch, flux: f64, zeta: f64) -> f64 {
        let (nu, lambda) = (self.spec.nu, self.spec.lambda);
        let switch = SWITCH_FRACTION * critical_amplitude(nu, lambda);
        match branch {
            Branch::Third => flux / zeta,
            Branch::First | Branch::Second if flux * flux >= switch && zeta != 0.0 => flux / zeta,
            Branch::First | Branch::Second => {
                let well_side = if branch == Branch::First { 1.0 } else { -1.0 };
                well_side * self.interior_sign * (2.0 * (lambda + zeta / nu)).max(0.0).sqrt()
            }
        }
    }
}

/// Builds F, G and |σ|² on `grid` by cumulative Gauss–Legendre quadrature.
///
/// Fails with [`Error::AmplitudeOverflow`] when F²r² reaches 8λ³ν²/27 at an
/// interior node.
pub fn compute_f(load: &LoadFunction, spec: &ProblemSpec, grid: &RadialGrid) -> Result<RadialStress> {
    if grid.first() != spec.r2 || grid.last() != spec.r1 {
        return Err(Error::GridMismatch(format!(
            "grid spans [{}, {}], problem spans [{}, {}]",
            grid.first(),
            grid.last(),
            spec.r2,
            spec.r1
        )));
    }
    let mut mesh: Vec<f64> = grid.nodes().to_vec();
    mesh.extend(load.kinks().into_iter().filter(|&r| r > spec.r2 && r < spec.r1));
    mesh.sort_by(f64::total_cmp);
    mesh.dedup();

    let integrand = |x: f64| load.eval(x) * spec.radial_weight(x);
    let mut mesh_g = Vec::with_capacity(mesh.len());
    let mut acc = crate::quadrature::CompensatedSum::default();
    mesh_g.push(0.0);
    for pair in mesh.windows(2) {
        for (x, w) in gauss_points(pair[0], pair[1]) {
            acc.add(w * integrand(x));
        }
        mesh_g.push(acc.value());
    }

    let mut g_values = Vec::with_capacity(grid.len());
    let mut cursor = 0;
    for &r in grid.nodes() {
        while mesh[cursor] != r {
            cursor += 1;
        }
        g_values.push(mesh_g[cursor]);
    }

    let nodes = grid.nodes();
    let f_values: Vec<f64> = nodes.iter().map(|&r| load.eval(r)).collect();
    let stress_values: Vec<f64> = nodes
        .iter()
        .zip(&g_values)
        .map(|(&r, &g)| -g / r.powi(spec.n as i32))
        .collect();
    let amplitude_values: Vec<f64> = stress_values
        .iter()
        .zip(nodes)
        .map(|(&f, &r)| (f * r).powi(2))
        .collect();

    let critical = critical_amplitude(spec.nu, spec.lambda);
    let last = nodes.len() - 1;
    let interior = 1..last;
    if let Some(k) = interior.clone().find(|&k| amplitude_values[k] >= critical) {
        return Err(Error::AmplitudeOverflow {
            radius: nodes[k],
            amplitude: amplitude_values[k],
            critical,
        });
    }
    let positives = interior.clone().filter(|&k| stress_values[k] > 0.0).count();
    let negatives = interior.clone().filter(|&k| stress_values[k] < 0.0).count();
    let interior_sign = if positives > 0 && negatives == 0 { 1.0 } else { -1.0 };
    let max_amplitude = amplitude_values.iter().copied().fold(0.0, f64::max);
    let certificate = StressCertificate {
        inner_endpoint: stress_values[0],
        outer_endpoint: stress_values[last],
        sign_constant: positives == 0 || negatives == 0,
        interior_positive: interior.clone().all(|k| amplitude_values[k] > 0.0),
        max_amplitude,
        critical,
    };

    Ok(RadialStress {
        spec: *spec,
        load: load.clone(),
        grid: grid.clone(),
        mesh,
        mesh_g,
        f_values,
        g_values,
        stress_values,
        amplitude_values,
        interior_sign,
        allow_degenerate: false,
        certificate,
    })
}

/// One root branch ζᵢ(r) of the dual algebraic equation over the grid.
#[derive(Debug, Clone)]
pub struct DualBranchField {
    pub branch: Branch,
    stress: Arc<RadialStress>,
    pub zeta_values: Vec<f64>,
}

impl DualBranchField {
    pub fn stress(&self) -> &Arc<RadialStress> {
        &self.stress
    }

    pub fn grid(&self) -> &RadialGrid {
        self.stress.grid()
    }

    pub fn zeta_at(&self, r: f64) -> Result<f64> {
        self.stress.zeta_at(self.branch, r)
    }
}

/// Evaluates branch `branch` of the dual equation at every node.
pub fn dual_field(stress: &Arc<RadialStress>, branch: Branch) -> Result<DualBranchField> {
    stress.check_usable()?;
    let zeta_values = stress
        .grid()
        .nodes()
        .iter()
        .map(|&r| stress.zeta_at(branch, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(DualBranchField {
        branch,
        stress: Arc::clone(stress),
        zeta_values,
    })
}

/// A displacement profile ūᵢ together with its strain.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub branch: Branch,
    stress: Arc<RadialStress>,
    pub constant: f64,
    pub u_values: Vec<f64>,
    pub strain_values: Vec<f64>,
    mesh_u: Vec<f64>,
}

impl CriticalPoint {
    pub fn stress(&self) -> &Arc<RadialStress> {
        &self.stress
    }

    pub fn grid(&self) -> &RadialGrid {
        self.stress.grid()
    }

    pub fn strain_at(&self, r: f64) -> Result<f64> {
        self.stress.strain_at(self.branch, r)
    }

    /// ūᵢ(r) at any radius, by integrating the strain from the nearest mesh point.
    pub fn u_at(&self, r: f64) -> Result<f64> {
        let k = self.stress.mesh_piece(r);
        let start = self.stress.mesh[k];
        if r == start {
            return Ok(self.mesh_u[k]);
        }
        Ok(self.mesh_u[k] + integrate_strain(&self.stress, self.branch, start, r)?)
    }
}

fn integrate_strain(stress: &RadialStress, branch: Branch, a: f64, b: f64) -> Result<f64> {
    let mut total = 0.0;
    for (x, w) in gauss_points(a, b) {
        total += w * stress.strain_at(branch, x)?;
    }
    Ok(total)
}

/// ūᵢ(r) = ∫_{R₂}^r F(ρ)ρ/ζᵢ(ρ) dρ + C.
pub fn displacement(stress: &Arc<RadialStress>, zeta: &DualBranchField, constant: f64) -> Result<CriticalPoint> {
    if !Arc::ptr_eq(stress, zeta.stress()) && !stress.grid().same_as(zeta.grid()) {
        return Err(Error::GridMismatch(
            "dual field was built on a different grid".into(),
        ));
    }
    stress.check_usable()?;
    let branch = zeta.branch;
    let mesh = stress.mesh();
    let mut mesh_u = Vec::with_capacity(mesh.len());
    let mut acc = crate::quadrature::CompensatedSum::default();
    acc.add(constant);
    mesh_u.push(constant);
    for pair in mesh.windows(2) {
        acc.add(integrate_strain(stress, branch, pair[0], pair[1])?);
        mesh_u.push(acc.value());
    }

    let nodes = stress.grid().nodes();
    let mut u_values = Vec::with_capacity(nodes.len());
    let mut cursor = 0;
    for &r in nodes {
        while mesh[cursor] != r {
            cursor += 1;
        }
        u_values.push(mesh_u[cursor]);
    }
    let strain_values = nodes
        .iter()
        .zip(&zeta.zeta_values)
        .map(|(&r, &z)| {
            let flux = if stress.is_endpoint(r) { 0.0 } else { stress.flux_at(r) };
            stress.strain_from(branch, flux, z)
        })
        .collect();

    Ok(CriticalPoint {
        branch,
        stress: Arc::clone(stress),
        constant,
        u_values,
        strain_values,
        mesh_u,
    })
}

/// Per-node residual ν(½s² − λ)s − F·r of the constitutive law for any strain
/// samples `strain` on the stress grid.
pub fn constitutive_residual(strain: &[f64], stress: &RadialStress) -> Vec<f64> {
    let spec = stress.spec();
    strain
        .iter()
        .zip(stress.stress_values.iter().zip(stress.grid().nodes()))
        .map(|(&s, (&f, &r))| spec.nu * (0.5 * s * s - spec.lambda) * s - f * r)
        .collect()
}

/// Constitutive residual of a critical point at every node.
pub fn strain_consistency(cp: &CriticalPoint) -> Vec<f64> {
    constitutive_residual(&cp.strain_values, cp.stress())
}

/// Largest absolute entry.
pub fn max_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Stress, the three dual fields and the three critical points for one load.
#[derive(Debug, Clone)]
pub struct BranchSet {
    pub stress: Arc<RadialStress>,
    pub duals: Vec<DualBranchField>,
    pub points: Vec<CriticalPoint>,
}

impl BranchSet {
    pub fn dual(&self, branch: Branch) -> &DualBranchField {
        &self.duals[branch.index() - 1]
    }

    pub fn point(&self, branch: Branch) -> &CriticalPoint {
        &self.points[branch.index() - 1]
    }
}

/// Runs stress → dual fields → displacements for all three branches with
/// integration constants set to zero.
pub fn solve_branches(stress: RadialStress) -> Result<BranchSet> {
    let stress = Arc::new(stress);
    let duals = Branch::ALL
        .iter()
        .map(|&b| dual_field(&stress, b))
        .collect::<Result<Vec<_>>>()?;
    let points = duals
        .iter()
        .map(|z| displacement(&stress, z, 0.0))
        .collect::<Result<Vec<_>>>()?;
    Ok(BranchSet {
        stress,
        duals,
        points,
    })
}

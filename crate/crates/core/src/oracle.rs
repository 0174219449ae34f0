//! Direct discretization of the primal energy, independent of the dual
//! pipeline: nodal displacements, midpoint strains, midpoint load.
//!
//! The energy depends on u only through the cell strains and the load term,
//! so a gradient preconditioned by the weighted strain metric
//! Σ c·w_k (Δu_k/Δr_k)² moves every cell strain independently. That
//! preconditioner is inverted exactly by two running sums. The mean of u is
//! held fixed during descent since the discrete energy is translation
//! invariant only up to the midpoint balance residual.

use crate::error::{Error, Result};
use crate::problem::{LoadFunction, ProblemSpec, RadialGrid};
use crate::quadrature::CompensatedSum;

/// Nodal values of a radial displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteState {
    pub grid: RadialGrid,
    pub u_nodes: Vec<f64>,
}

impl DiscreteState {
    pub fn new(grid: RadialGrid, u_nodes: Vec<f64>) -> Result<Self> {
        if u_nodes.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} nodal values for a grid of {} nodes",
                u_nodes.len(),
                grid.len()
            )));
        }
        if let Some(k) = u_nodes.iter().position(|u| !u.is_finite()) {
            return Err(Error::Numerical(format!("non-finite displacement at node {k}")));
        }
        Ok(Self { grid, u_nodes })
    }

    pub fn mean(&self) -> f64 {
        self.u_nodes.iter().sum::<f64>() / self.u_nodes.len() as f64
    }

    /// Values with the mean removed, for comparing states up to a constant.
    pub fn centered(&self) -> Vec<f64> {
        let m = self.mean();
        self.u_nodes.iter().map(|u| u - m).collect()
    }
}

/// Per-cell geometry: midpoint, width and ω r_mid^{n−1} Δr.
struct Cells {
    mid: Vec<f64>,
    width: Vec<f64>,
    weight: Vec<f64>,
    load: Vec<f64>,
}

impl Cells {
    fn new(grid: &RadialGrid, load: &LoadFunction, spec: &ProblemSpec) -> Self {
        let omega = spec.sphere_area();
        let nodes = grid.nodes();
        let mid: Vec<f64> = nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let width: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        let weight = mid
            .iter()
            .zip(&width)
            .map(|(&r, &h)| omega * spec.radial_weight(r) * h)
            .collect();
        let load = mid.iter().map(|&r| load.eval(r)).collect();
        Self {
            mid,
            width,
            weight,
            load,
        }
    }
}

fn flux(strain: f64, spec: &ProblemSpec) -> f64 {
    spec.nu * (0.5 * strain * strain - spec.lambda) * strain
}

fn density(strain: f64, spec: &ProblemSpec) -> f64 {
    0.5 * spec.nu * (0.5 * strain * strain - spec.lambda).powi(2)
}

fn energy_on(cells: &Cells, u: &[f64], spec: &ProblemSpec) -> f64 {
    (0..cells.mid.len())
        .map(|k| {
            let strain = (u[k + 1] - u[k]) / cells.width[k];
            let u_mid = 0.5 * (u[k] + u[k + 1]);
            cells.weight[k] * (density(strain, spec) - cells.load[k] * u_mid)
        })
        .sum()
}

/// E(u + t·d) − E(u) computed cell by cell, so small decreases are not lost
/// against the size of E itself.
fn energy_change(cells: &Cells, u: &[f64], d: &[f64], t: f64, spec: &ProblemSpec) -> f64 {
    let mut acc = CompensatedSum::default();
    for k in 0..cells.mid.len() {
        let h = cells.width[k];
        let strain = (u[k + 1] - u[k]) / h;
        let delta = t * (d[k + 1] - d[k]) / h;
        let q0 = 0.5 * strain * strain - spec.lambda;
        let q1 = q0 + delta * (strain + 0.5 * delta);
        let dh = 0.5 * spec.nu * (q1 - q0) * (q0 + q1);
        let du_mid = 0.5 * t * (d[k] + d[k + 1]);
        acc.add(cells.weight[k] * (dh - cells.load[k] * du_mid));
    }
    acc.value()
}

fn gradient_on(cells: &Cells, u: &[f64], spec: &ProblemSpec) -> Vec<f64> {
    let mut g = vec![0.0; u.len()];
    for k in 0..cells.mid.len() {
        let strain = (u[k + 1] - u[k]) / cells.width[k];
        let stiff = cells.weight[k] * flux(strain, spec) / cells.width[k];
        let pull = 0.5 * cells.weight[k] * cells.load[k];
        g[k] += -stiff - pull;
        g[k + 1] += stiff - pull;
    }
    g
}

/// Σ_cells [ν/2(½(Δu/Δr)² − λ)² − f(r_mid)·u_mid]·ω r_mid^{n−1} Δr.
pub fn discrete_energy(state: &DiscreteState, load: &LoadFunction, spec: &ProblemSpec) -> f64 {
    energy_on(&Cells::new(&state.grid, load, spec), &state.u_nodes, spec)
}

/// Gradient of [`discrete_energy`] with respect to the nodal values.
pub fn discrete_gradient(state: &DiscreteState, load: &LoadFunction, spec: &ProblemSpec) -> Vec<f64> {
    gradient_on(&Cells::new(&state.grid, load, spec), &state.u_nodes, spec)
}

/// Stopping and line-search parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentControls {
    pub max_iterations: usize,
    /// Bound on the max-norm of the mean-free gradient.
    pub gradient_tolerance: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for DescentControls {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            gradient_tolerance: 1e-8,
            armijo: 1e-4,
            max_backtracks: 60,
        }
    }
}

/// Result of [`descend`]. Hitting the iteration cap is reported, not raised.
#[derive(Debug, Clone, PartialEq)]
pub struct DescentOutcome {
    pub state: DiscreteState,
    pub iterations: usize,
    pub converged: bool,
    pub gradient_norm: f64,
    /// Energy before the first step and after every accepted step, tracked as
    /// the start value plus the accumulated per-step changes.
    pub energies: Vec<f64>,
}

impl DescentOutcome {
    pub fn final_energy(&self) -> f64 {
        *self.energies.last().expect("at least the starting energy")
    }
}

fn mean_free(g: &mut [f64]) {
    let m = g.iter().sum::<f64>() / g.len() as f64;
    for x in g.iter_mut() {
        *x -= m;
    }
}

/// Direction −P⁻¹g for the weighted strain metric, with zero mean.
fn preconditioned_direction(cells: &Cells, g: &[f64], curvature: f64) -> Vec<f64> {
    let mut d = Vec::with_capacity(g.len());
    d.push(0.0);
    let mut running = 0.0;
    let mut u = 0.0;
    for k in 0..cells.mid.len() {
        running += g[k];
        let strain_step = running * cells.width[k] / (curvature * cells.weight[k]);
        u += strain_step * cells.width[k];
        d.push(u);
    }
    mean_free(&mut d);
    d
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Preconditioned gradient descent with backtracking on [`discrete_energy`].
///
/// No boundary condition is imposed; the Neumann condition is natural.
pub fn descend(
    start: &DiscreteState,
    load: &LoadFunction,
    spec: &ProblemSpec,
    controls: &DescentControls,
) -> Result<DescentOutcome> {
    let cells = Cells::new(&start.grid, load, spec);
    let curvature = 2.0 * spec.nu * spec.lambda;
    let mut u = start.u_nodes.clone();
    let start_energy = energy_on(&cells, &u, spec);
    let mut descent = CompensatedSum::default();
    let mut energies = vec![start_energy];
    let mut gradient_norm = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < controls.max_iterations {
        let mut g = gradient_on(&cells, &u, spec);
        mean_free(&mut g);
        gradient_norm = max_abs(&g);
        if gradient_norm <= controls.gradient_tolerance {
            converged = true;
            break;
        }
        let d = preconditioned_direction(&cells, &g, curvature);
        let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        if !(slope < 0.0) {
            break;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..controls.max_backtracks {
            let change = energy_change(&cells, &u, &d, step, spec);
            if change <= controls.armijo * step * slope {
                accepted = Some((step, change));
                break;
            }
            step *= 0.5;
        }
        let Some((step, change)) = accepted else {
            break;
        };
        for (x, dx) in u.iter_mut().zip(&d) {
            *x += step * dx;
        }
        descent.add(change);
        energies.push(start_energy + descent.value());
        iterations += 1;
    }
    if !converged && iterations == controls.max_iterations {
        let mut g = gradient_on(&cells, &u, spec);
        mean_free(&mut g);
        gradient_norm = max_abs(&g);
        converged = gradient_norm <= controls.gradient_tolerance;
    }

    Ok(DescentOutcome {
        state: DiscreteState {
            grid: start.grid.clone(),
            u_nodes: u,
        },
        iterations,
        converged,
        gradient_norm,
        energies,
    })
}

/// Conservative finite-difference residual of the radial Euler–Lagrange
/// equation, d/dr[r^{n−1}ν(½u′² − λ)u′] + f r^{n−1}, at interior nodes.
///
/// Entry `k` belongs to node `k + 1`.
pub fn el_residual_direct(state: &DiscreteState, load: &LoadFunction, spec: &ProblemSpec) -> Vec<f64> {
    let nodes = state.grid.nodes();
    let u = &state.u_nodes;
    let fluxes: Vec<f64> = (0..nodes.len() - 1)
        .map(|k| {
            let h = nodes[k + 1] - nodes[k];
            let mid = 0.5 * (nodes[k] + nodes[k + 1]);
            spec.radial_weight(mid) * flux((u[k + 1] - u[k]) / h, spec)
        })
        .collect();
    (1..nodes.len() - 1)
        .map(|j| {
            let span = 0.5 * (nodes[j + 1] - nodes[j - 1]);
            (fluxes[j] - fluxes[j - 1]) / span + load.eval(nodes[j]) * spec.radial_weight(nodes[j])
        })
        .collect()
}

/// Smooth start u(r) = amplitude·Σ_k c_k cos(kπ(r − R₂)/(R₁ − R₂)), k = 1, 2, …
pub fn smooth_start(grid: &RadialGrid, coefficients: &[f64], amplitude: f64) -> DiscreteState {
    let (a, b) = (grid.first(), grid.last());
    let u = grid
        .nodes()
        .iter()
        .map(|&r| {
            let x = (r - a) / (b - a);
            amplitude
                * coefficients
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c * ((k + 1) as f64 * std::f64::consts::PI * x).cos())
                    .sum::<f64>()
        })
        .collect();
    DiscreteState {
        grid: grid.clone(),
        u_nodes: u,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual_algebra::Branch;
    use crate::energy::primal_energy;
    use crate::fields::{compute_f, solve_branches, BranchSet};
    use crate::problem::balanced_linear_load;
    use approx::assert_relative_eq;

    fn reference(nodes: usize) -> (ProblemSpec, LoadFunction, BranchSet) {
        let spec = ProblemSpec::new(1.0, 1.0, 2.0, 1.0, 2).unwrap();
        let load = balanced_linear_load(&spec, 0.2).unwrap();
        let grid = RadialGrid::uniform(&spec, nodes).unwrap();
        let set = solve_branches(compute_f(&load, &spec, &grid).unwrap()).unwrap();
        (spec, load, set)
    }

    fn sampled(set: &BranchSet, b: Branch) -> DiscreteState {
        DiscreteState::new(set.stress.grid().clone(), set.point(b).u_values.clone()).unwrap()
    }

    #[test]
    fn zero_state_zero_load() {
        let spec = ProblemSpec::new(1.0, 1.0, 2.0, 1.0, 2).unwrap();
        let grid = RadialGrid::uniform(&spec, 2001).unwrap();
        let state = DiscreteState::new(grid, vec![0.0; 2001]).unwrap();
        let e = discrete_energy(&state, &LoadFunction::zero(&spec), &spec);
        assert_relative_eq!(e, 0.5 * spec.annulus_volume(), max_relative = 1e-6);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (spec, load, set) = reference(41);
        let mut state = sampled(&set, Branch::Second);
        for (k, u) in state.u_nodes.iter_mut().enumerate() {
            *u += 0.01 * (k as f64).sin();
        }
        let g = discrete_gradient(&state, &load, &spec);
        let h = 1e-6;
        for k in [0, 7, 20, 40] {
            let mut plus = state.clone();
            let mut minus = state.clone();
            plus.u_nodes[k] += h;
            minus.u_nodes[k] -= h;
            let fd = (discrete_energy(&plus, &load, &spec) - discrete_energy(&minus, &load, &spec)) / (2.0 * h);
            assert_relative_eq!(g[k], fd, epsilon = 1e-9, max_relative = 1e-6);
        }
    }

    #[test]
    fn sampled_energy_matches_primal() {
        let (spec, load, set) = reference(2001);
        for b in Branch::ALL {
            let discrete = discrete_energy(&sampled(&set, b), &load, &spec);
            let primal = primal_energy(set.point(b), &load).unwrap();
            assert_relative_eq!(discrete, primal, max_relative = 1e-4);
        }
    }

    #[test]
    fn first_branch_is_discrete_local_min() {
        use rand::{Rng, SeedableRng};
        let (spec, load, set) = reference(2001);
        let base = sampled(&set, Branch::First);
        let e0 = discrete_energy(&base, &load, &spec);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let coefficients: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let bump = smooth_start(&base.grid, &coefficients, 1e-3);
            let mut moved = base.clone();
            for (u, p) in moved.u_nodes.iter_mut().zip(&bump.u_nodes) {
                *u += p;
            }
            assert!(discrete_energy(&moved, &load, &spec) >= e0 - 1e-12);
        }
    }

    #[test]
    fn descent_from_first_branch_stays() {
        let (spec, load, set) = reference(2001);
        let start = sampled(&set, Branch::First);
        let out = descend(&start, &load, &spec, &DescentControls::default()).unwrap();
        assert!(out.converged);
        let diff = out
            .state
            .centered()
            .iter()
            .zip(start.centered())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff <= 1e-5, "{diff:e}");
    }

    #[test]
    fn second_branch_is_a_radial_fixed_point() {
        let (spec, load, set) = reference(2001);
        let start = sampled(&set, Branch::Second);
        let e2 = discrete_energy(&start, &load, &spec);
        let bump = smooth_start(&start.grid, &[0.5, 0.2, -0.4, 0.3], 1e-3);
        let mut moved = start.clone();
        for (u, p) in moved.u_nodes.iter_mut().zip(&bump.u_nodes) {
            *u += p;
        }
        let out = descend(&moved, &load, &spec, &DescentControls::default()).unwrap();
        assert!(out.converged);
        assert!((out.final_energy() - e2).abs() <= 1e-8, "{:e}", out.final_energy() - e2);
        let diff = out
            .state
            .centered()
            .iter()
            .zip(start.centered())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff <= 1e-4, "{diff:e}");
    }

    #[test]
    fn descent_returns_to_first_basin() {
        let (spec, load, set) = reference(2001);
        let base = sampled(&set, Branch::First);
        let e_ref = discrete_energy(&base, &load, &spec);
        let bump = smooth_start(&base.grid, &[0.6, -0.3, 0.8, 0.1], 1e-2);
        let mut start = base.clone();
        for (u, p) in start.u_nodes.iter_mut().zip(&bump.u_nodes) {
            *u += p;
        }
        let out = descend(&start, &load, &spec, &DescentControls::default()).unwrap();
        assert!(out.converged);
        assert!(out.energies.windows(2).all(|w| w[1] <= w[0]));
        assert!((out.final_energy() - e_ref).abs() <= 1e-8, "{:e}", out.final_energy() - e_ref);
    }

    #[test]
    fn descent_leaves_third_branch() {
        let (spec, load, set) = reference(2001);
        let start = sampled(&set, Branch::Third);
        let out = descend(&start, &load, &spec, &DescentControls::default()).unwrap();
        let i3 = primal_energy(set.point(Branch::Third), &load).unwrap();
        assert!(out.converged);
        assert!(out.final_energy() < i3 - 1.0);
        assert!(out.energies.windows(2).all(|w| w[1] <= w[0]));
        let recomputed = discrete_energy(&out.state, &load, &spec);
        assert!((recomputed - out.final_energy()).abs() <= 1e-12);
    }

    #[test]
    fn small_random_starts_reach_the_low_branches() {
        use rand::{Rng, SeedableRng};
        let (spec, load, set) = reference(2001);
        let floor = primal_energy(set.point(Branch::First), &load)
            .unwrap()
            .min(primal_energy(set.point(Branch::Second), &load).unwrap());
        let third = sampled(&set, Branch::Third).centered();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let coefficients: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let start = smooth_start(set.stress.grid(), &coefficients, 1e-4);
            let out = descend(&start, &load, &spec, &DescentControls::default()).unwrap();
            assert!(out.converged);
            assert!(out.energies.windows(2).all(|w| w[1] <= w[0]));
            assert!(out.final_energy() <= floor + 1e-6, "{} against {floor}", out.final_energy());
            let distance = out
                .state
                .centered()
                .iter()
                .zip(&third)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            assert!(distance > 1e-2);
        }
    }

    #[test]
    fn residual_examples() {
        let (spec, load, set) = reference(2001);
        let r1 = el_residual_direct(&sampled(&set, Branch::First), &load, &spec);
        assert!(r1.iter().all(|r| r.abs() <= 1e-3));

        let grid = set.stress.grid().clone();
        let zero = DiscreteState::new(grid.clone(), vec![0.0; grid.len()]).unwrap();
        let r0 = el_residual_direct(&zero, &load, &spec);
        for (k, r) in r0.iter().enumerate() {
            let x = grid.nodes()[k + 1];
            assert_relative_eq!(*r, load.eval(x) * x, epsilon = 1e-15);
        }

        let slope = 2f64.sqrt();
        let linear = DiscreteState::new(
            grid.clone(),
            grid.nodes().iter().map(|r| slope * (r - 1.0)).collect(),
        )
        .unwrap();
        let free = LoadFunction::zero(&spec);
        assert!(el_residual_direct(&linear, &free, &spec).iter().all(|r| r.abs() <= 1e-7));
    }

    #[test]
    fn mismatched_state_is_rejected() {
        let spec = ProblemSpec::new(1.0, 1.0, 2.0, 1.0, 2).unwrap();
        let grid = RadialGrid::uniform(&spec, 11).unwrap();
        assert!(DiscreteState::new(grid.clone(), vec![0.0; 10]).is_err());
        assert!(DiscreteState::new(grid, vec![f64::NAN; 11]).is_err());
    }
}

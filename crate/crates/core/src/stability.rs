//! Second-variation analysis of the critical points.
//!
//! Perturbations are split into angular modes φ = g(r)·Y_l, where Y_l is a
//! unit-normalized degree-l spherical harmonic with ∫|∇_S Y_l|² = κ_l =
//! l(l+n−2). Per mode the second variation of I becomes
//!
//! ```text
//! Q_l[g] = ν ω ∫ [ ū′² g′² + (½ū′² − λ)(g′² + κ_l g²/r²) ] r^{n−1} dr
//! ```
//!
//! discretized with continuous piecewise-linear g. The mass matrix of the same
//! basis, ω ∫ g² r^{n−1} dr, serves as the Gram matrix of the generalized
//! eigenproblem. Both matrices are tridiagonal, so extreme eigenvalues come
//! from inertia counts of Q − μM and bisection.

use std::fmt;

use crate::dual_algebra::Branch;
use crate::energy::stress_over_zeta;
use crate::error::{Error, Result};
use crate::fields::{BranchSet, CriticalPoint, DualBranchField};
use crate::quadrature::{gauss_points, linspace};

/// Default element count of the perturbation mesh.
pub const DEFAULT_ELEMENTS: usize = 400;

/// Default highest angular mode.
pub const DEFAULT_MAX_MODE: usize = 8;

/// Eigenvalue tolerance relative to the form scale ν·λ.
pub const EIGEN_TOLERANCE: f64 = 1e-8;

const MAX_BRACKET_DOUBLINGS: usize = 200;
const MAX_BISECTIONS: usize = 4000;

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn zeros(size: usize) -> Self {
        Self {
            diag: vec![0.0; size],
            off: vec![0.0; size.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Adds a 2×2 element block at rows `i`, `i + 1`.
    fn add_block(&mut self, i: usize, a: f64, b: f64, d: f64) {
        self.diag[i] += a;
        self.off[i] += b;
        self.diag[i + 1] += d;
    }

    /// vᵀ A v.
    pub fn quadratic(&self, v: &[f64]) -> f64 {
        let mut total: f64 = self.diag.iter().zip(v).map(|(d, x)| d * x * x).sum();
        for (i, o) in self.off.iter().enumerate() {
            total += 2.0 * o * v[i] * v[i + 1];
        }
        total
    }

    fn inf_norm(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = self.off.get(i).map_or(0.0, |o| o.abs());
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// Gershgorin lower bound on the spectrum.
    fn gershgorin_floor(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = self.off.get(i).map_or(0.0, |o| o.abs());
                self.diag[i] - left - right
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Number of generalized eigenvalues of (form, gram) strictly below `shift`,
/// read off the inertia of form − shift·gram.
pub fn count_below(form: &SymTridiagonal, gram: &SymTridiagonal, shift: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut negatives = 0;
    let mut pivot = 0.0;
    for i in 0..form.len() {
        let d = form.diag[i] - shift * gram.diag[i];
        pivot = if i == 0 {
            d
        } else {
            let o = form.off[i - 1] - shift * gram.off[i - 1];
            d - o * o / pivot
        };
        if pivot == 0.0 {
            pivot = -tiny;
        }
        if pivot < 0.0 {
            negatives += 1;
        }
    }
    negatives
}

fn check_pencil(form: &SymTridiagonal, gram: &SymTridiagonal) -> Result<()> {
    if form.len() != gram.len() || form.off.len() != gram.off.len() || form.is_empty() {
        return Err(Error::GridMismatch(format!(
            "form has size {}, gram has size {}",
            form.len(),
            gram.len()
        )));
    }
    let finite = |m: &SymTridiagonal| m.diag.iter().chain(&m.off).all(|x| x.is_finite());
    if !finite(form) || !finite(gram) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    if count_below(gram, &SymTridiagonal::zeros(gram.len()), 0.0) > 0 {
        return Err(Error::Numerical("gram matrix is not positive definite".into()));
    }
    Ok(())
}

fn spectral_bracket(form: &SymTridiagonal, gram: &SymTridiagonal) -> Result<f64> {
    let floor = gram.gershgorin_floor();
    let min_diag = gram.diag.iter().copied().fold(f64::INFINITY, f64::min);
    let mut bound = form.inf_norm() / if floor > 0.0 { floor } else { min_diag } + 1.0;
    for _ in 0..MAX_BRACKET_DOUBLINGS {
        if count_below(form, gram, -bound) == 0 && count_below(form, gram, bound) == form.len() {
            return Ok(bound);
        }
        bound *= 2.0;
    }
    Err(Error::Numerical(
        "could not bracket the generalized spectrum".into(),
    ))
}

/// Bisects for the generalized eigenvalue with `rank` eigenvalues below it
/// (0 = smallest).
fn bisect_eigenvalue(form: &SymTridiagonal, gram: &SymTridiagonal, rank: usize) -> Result<f64> {
    check_pencil(form, gram)?;
    let bound = spectral_bracket(form, gram)?;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if count_below(form, gram, mid) > rank {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::Numerical(format!(
        "eigenvalue bisection did not converge within {MAX_BISECTIONS} steps"
    )))
}

/// Smallest μ with form·v = μ·gram·v.
pub fn min_eigenvalue(form: &SymTridiagonal, gram: &SymTridiagonal) -> Result<f64> {
    bisect_eigenvalue(form, gram, 0)
}

/// Largest μ with form·v = μ·gram·v.
pub fn max_eigenvalue(form: &SymTridiagonal, gram: &SymTridiagonal) -> Result<f64> {
    bisect_eigenvalue(form, gram, form.len() - 1)
}

/// vᵀ form v / vᵀ gram v.
pub fn rayleigh_quotient(form: &SymTridiagonal, gram: &SymTridiagonal, v: &[f64]) -> f64 {
    form.quadratic(v) / gram.quadratic(v)
}

/// Laplace–Beltrami eigenvalue l(l+n−2) of degree-l harmonics on S^{n−1}.
pub fn angular_eigenvalue(l: usize, n: usize) -> f64 {
    let l = l as f64;
    l * (l + n as f64 - 2.0)
}

fn check_mode(l: usize, n: usize) -> Result<()> {
    if n == 1 && l >= 1 {
        return Err(Error::Domain(
            "only the radial mode l = 0 exists in one dimension".into(),
        ));
    }
    Ok(())
}

fn element_mesh(cp: &CriticalPoint, elements: usize) -> Result<Vec<f64>> {
    if elements < 2 {
        return Err(Error::GridMismatch("at least 2 elements are required".into()));
    }
    let spec = cp.stress().spec();
    Ok(linspace(spec.r2, spec.r1, elements + 1))
}

/// The two pieces of Q_l: the g′² part and the κ_l g²/r² part.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeFormParts {
    pub stiffness: SymTridiagonal,
    pub angular: SymTridiagonal,
}

impl ModeFormParts {
    pub fn combined(&self) -> SymTridiagonal {
        SymTridiagonal {
            diag: self.stiffness.diag.iter().zip(&self.angular.diag).map(|(a, b)| a + b).collect(),
            off: self.stiffness.off.iter().zip(&self.angular.off).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Assembles the stiffness and angular parts of Q_l separately.
pub fn mode_form_parts(cp: &CriticalPoint, l: usize, elements: usize) -> Result<ModeFormParts> {
    let spec = *cp.stress().spec();
    check_mode(l, spec.n)?;
    let kappa = angular_eigenvalue(l, spec.n);
    let mesh = element_mesh(cp, elements)?;
    let omega = spec.sphere_area();
    let mut stiffness = SymTridiagonal::zeros(mesh.len());
    let mut angular = SymTridiagonal::zeros(mesh.len());
    for (e, pair) in mesh.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let h = b - a;
        let (mut stiff, mut m00, mut m01, mut m11) = (0.0, 0.0, 0.0, 0.0);
        for (x, w) in gauss_points(a, b) {
            let s = cp.strain_at(x)?;
            let well = 0.5 * s * s - spec.lambda;
            let weight = w * omega * spec.nu * spec.radial_weight(x);
            stiff += weight * (s * s + well);
            let m = weight * well * kappa / (x * x);
            let t = (x - a) / h;
            m00 += m * (1.0 - t) * (1.0 - t);
            m01 += m * (1.0 - t) * t;
            m11 += m * t * t;
        }
        let k = stiff / (h * h);
        stiffness.add_block(e, k, -k, k);
        angular.add_block(e, m00, m01, m11);
    }
    Ok(ModeFormParts { stiffness, angular })
}

/// Discretized second-variation form Q_l of a critical point.
pub fn mode_form(cp: &CriticalPoint, l: usize, elements: usize) -> Result<SymTridiagonal> {
    Ok(mode_form_parts(cp, l, elements)?.combined())
}

/// Mass matrix ω∫ g_i g_j r^{n−1} dr of the same piecewise-linear basis.
pub fn gram_matrix(cp: &CriticalPoint, elements: usize) -> Result<SymTridiagonal> {
    let spec = *cp.stress().spec();
    let mesh = element_mesh(cp, elements)?;
    let omega = spec.sphere_area();
    let mut gram = SymTridiagonal::zeros(mesh.len());
    for (e, pair) in mesh.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let h = b - a;
        let (mut m00, mut m01, mut m11) = (0.0, 0.0, 0.0);
        for (x, w) in gauss_points(a, b) {
            let weight = w * omega * spec.radial_weight(x);
            let t = (x - a) / h;
            m00 += weight * (1.0 - t) * (1.0 - t);
            m01 += weight * (1.0 - t) * t;
            m11 += weight * t * t;
        }
        gram.add_block(e, m00, m01, m11);
    }
    Ok(gram)
}

/// Extreme eigenvalues of one angular mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEigen {
    pub l: usize,
    pub kappa: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

/// Extreme eigenvalues of Q_0 … Q_L for one branch.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    pub branch: Branch,
    pub modes: Vec<ModeEigen>,
    /// ν·λ; eigenvalue signs are judged against `EIGEN_TOLERANCE · scale`.
    pub scale: f64,
}

impl ModeSpectrum {
    pub fn tolerance(&self) -> f64 {
        EIGEN_TOLERANCE * self.scale
    }
}

/// Assembles and solves modes 0 through `max_mode`; n = 1 keeps only l = 0.
pub fn mode_spectrum(cp: &CriticalPoint, max_mode: usize, elements: usize) -> Result<ModeSpectrum> {
    let spec = *cp.stress().spec();
    let top = if spec.n == 1 { 0 } else { max_mode };
    let gram = gram_matrix(cp, elements)?;
    let modes = (0..=top)
        .map(|l| {
            let form = mode_form(cp, l, elements)?;
            Ok(ModeEigen {
                l,
                kappa: angular_eigenvalue(l, spec.n),
                min_eigenvalue: min_eigenvalue(&form, &gram)?,
                max_eigenvalue: max_eigenvalue(&form, &gram)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModeSpectrum {
        branch: cp.branch,
        modes,
        scale: spec.nu * spec.lambda,
    })
}

/// Pointwise sign summary of the dual second variation.
///
/// Under the dual equation |σ|²/ζ³ + 1/ν = 2λ/ζ + 3/ν, and δ²I_d has the
/// opposite sign of that bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCurvature {
    pub branch: Branch,
    /// 2λ/ζ + 3/ν at interior nodes.
    pub bracket: Vec<f64>,
    /// |σ|²/ζ³ + 1/ν at interior nodes.
    pub raw_bracket: Vec<f64>,
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl DualCurvature {
    /// Common sign of the bracket over the interior, if there is one.
    pub fn bracket_sign(&self) -> Option<f64> {
        match (self.positive, self.negative, self.zero) {
            (p, 0, 0) if p > 0 => Some(1.0),
            (0, m, 0) if m > 0 => Some(-1.0),
            _ => None,
        }
    }

    /// Sign of δ²_ψ I_d, the negative of the bracket sign.
    pub fn form_sign(&self) -> Option<f64> {
        self.bracket_sign().map(|s| -s)
    }

    /// max |raw − bracket| / max(1, |bracket|).
    pub fn max_discrepancy(&self) -> f64 {
        self.bracket
            .iter()
            .zip(&self.raw_bracket)
            .map(|(b, r)| (b - r).abs() / b.abs().max(1.0))
            .fold(0.0, f64::max)
    }
}

/// Sign of 2λ/ζ + 3/ν, the dual curvature density, at a single value of ζ.
pub fn curvature_bracket(zeta: f64, nu: f64, lambda: f64) -> f64 {
    2.0 * lambda / zeta + 3.0 / nu
}

/// Evaluates the dual curvature bracket at interior nodes.
pub fn dual_curvature(zeta: &DualBranchField) -> DualCurvature {
    let stress = zeta.stress();
    let spec = *stress.spec();
    let last = zeta.zeta_values.len() - 1;
    let mut bracket = Vec::with_capacity(last.saturating_sub(1));
    let mut raw_bracket = Vec::with_capacity(last.saturating_sub(1));
    for k in 1..last {
        let z = zeta.zeta_values[k];
        if z == 0.0 {
            continue;
        }
        let a = stress.amplitude_values[k];
        bracket.push(curvature_bracket(z, spec.nu, spec.lambda));
        raw_bracket.push(stress_over_zeta(a, z, &spec) / (z * z) + 1.0 / spec.nu);
    }
    let positive = bracket.iter().filter(|&&b| b > 0.0).count();
    let negative = bracket.iter().filter(|&&b| b < 0.0).count();
    let zero = bracket.len() - positive - negative;
    DualCurvature {
        branch: zeta.branch,
        bracket,
        raw_bracket,
        positive,
        negative,
        zero,
    }
}

/// Stability verdict of a critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    LocalMin,
    LocalMax,
    RadialMinButAngularUnstable,
    Indefinite,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::LocalMin => "local-min",
            Verdict::LocalMax => "local-max",
            Verdict::RadialMinButAngularUnstable => "radial-min-but-angular-unstable",
            Verdict::Indefinite => "indefinite",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict plus the evidence it was read from.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub branch: Branch,
    pub verdict: Verdict,
    pub spectrum: ModeSpectrum,
    pub dual_form_sign: Option<f64>,
}

/// Reads the verdict off the eigenvalue signs.
pub fn verdict_of(spectrum: &ModeSpectrum) -> Verdict {
    let tol = spectrum.tolerance();
    let modes = &spectrum.modes;
    if modes.iter().all(|m| m.min_eigenvalue >= -tol) {
        return Verdict::LocalMin;
    }
    if modes.iter().all(|m| m.max_eigenvalue <= tol) {
        return Verdict::LocalMax;
    }
    let radial_stable = modes
        .iter()
        .find(|m| m.l == 0)
        .is_some_and(|m| m.min_eigenvalue >= -tol);
    if radial_stable && modes.iter().any(|m| m.l >= 1 && m.min_eigenvalue < -tol) {
        return Verdict::RadialMinButAngularUnstable;
    }
    Verdict::Indefinite
}

/// Classifies all three branches using modes 0..=`max_mode`.
pub fn classify(set: &BranchSet, max_mode: usize, elements: usize) -> Result<Vec<Classification>> {
    let n = set.stress.spec().n;
    if n >= 2 && max_mode < 1 {
        return Err(Error::Domain(
            "at least one angular mode is needed when n >= 2".into(),
        ));
    }
    Branch::ALL
        .iter()
        .map(|&b| {
            let spectrum = mode_spectrum(set.point(b), max_mode, elements)?;
            let curvature = dual_curvature(set.dual(b));
            Ok(Classification {
                branch: b,
                verdict: verdict_of(&spectrum),
                spectrum,
                dual_form_sign: curvature.form_sign(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{compute_f, solve_branches};
    use crate::problem::{balanced_linear_load, ProblemSpec, RadialGrid};
    use crate::quadrature::composite;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn set_for(n: usize, nodes: usize) -> BranchSet {
        let spec = ProblemSpec::new(1.0, 1.0, 2.0, 1.0, n).unwrap();
        let load = balanced_linear_load(&spec, 0.2).unwrap();
        let grid = RadialGrid::uniform(&spec, nodes).unwrap();
        solve_branches(compute_f(&load, &spec, &grid).unwrap()).unwrap()
    }

    fn dense(m: &SymTridiagonal) -> DMatrix<f64> {
        let n = m.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                m.diag[i]
            } else if i + 1 == j {
                m.off[i]
            } else if j + 1 == i {
                m.off[j]
            } else {
                0.0
            }
        })
    }

    /// Dense generalized eigenvalues through Cholesky reduction.
    fn dense_eigenvalues(form: &SymTridiagonal, gram: &SymTridiagonal) -> Vec<f64> {
        let l = dense(gram).cholesky().unwrap().l();
        let l_inv = l.try_inverse().unwrap();
        let reduced = &l_inv * dense(form) * l_inv.transpose();
        let reduced = 0.5 * (&reduced + reduced.transpose());
        let mut values: Vec<f64> = reduced.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    fn laplacian_pair(size: usize, h: f64) -> (SymTridiagonal, SymTridiagonal) {
        let mut k = SymTridiagonal::zeros(size);
        let mut m = SymTridiagonal::zeros(size);
        for e in 0..size - 1 {
            k.add_block(e, 1.0 / h, -1.0 / h, 1.0 / h);
            m.add_block(e, h / 3.0, h / 6.0, h / 3.0);
        }
        (k, m)
    }

    #[test]
    fn identity_pencil() {
        let (_, m) = laplacian_pair(30, 0.1);
        assert_relative_eq!(min_eigenvalue(&m, &m).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(max_eigenvalue(&m, &m).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn free_laplacian_has_constant_null_mode() {
        let (k, m) = laplacian_pair(51, 0.02);
        assert!(min_eigenvalue(&k, &m).unwrap().abs() < 1e-9);
        let ones = vec![1.0; 51];
        assert!(rayleigh_quotient(&k, &m, &ones).abs() < 1e-12);
        // Second eigenvalue approximates π² on the unit interval.
        let second = bisect_eigenvalue(&k, &m, 1).unwrap();
        assert_relative_eq!(second, std::f64::consts::PI.powi(2), max_relative = 1e-3);
    }

    #[test]
    fn bisection_matches_dense_solver() {
        let set = set_for(2, 401);
        for b in Branch::ALL {
            let cp = set.point(b);
            let gram = gram_matrix(cp, 40).unwrap();
            for l in [0, 1, 3] {
                let form = mode_form(cp, l, 40).unwrap();
                let values = dense_eigenvalues(&form, &gram);
                let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                let lo = min_eigenvalue(&form, &gram).unwrap();
                let hi = max_eigenvalue(&form, &gram).unwrap();
                assert!((lo - values[0]).abs() <= 1e-9 * scale, "branch {b} l {l}");
                assert!((hi - values[values.len() - 1]).abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn non_positive_gram_is_rejected() {
        let (k, _) = laplacian_pair(5, 0.1);
        assert!(matches!(min_eigenvalue(&k, &k), Err(Error::Numerical(_))));
        let small = SymTridiagonal::zeros(3);
        assert!(matches!(min_eigenvalue(&small, &k), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn one_dimension_has_only_radial_mode() {
        let set = set_for(1, 201);
        assert!(matches!(
            mode_form(set.point(Branch::First), 1, 20),
            Err(Error::Domain(_))
        ));
        let spectrum = mode_spectrum(set.point(Branch::Second), 8, 100).unwrap();
        assert_eq!(spectrum.modes.len(), 1);
        assert_eq!(verdict_of(&spectrum), Verdict::LocalMin);
    }

    #[test]
    fn kappa_values() {
        assert_eq!(angular_eigenvalue(0, 2), 0.0);
        assert_eq!(angular_eigenvalue(1, 2), 1.0);
        assert_eq!(angular_eigenvalue(3, 2), 9.0);
        assert_eq!(angular_eigenvalue(2, 3), 6.0);
        let kappas: Vec<f64> = (0..9).map(|l| angular_eigenvalue(l, 4)).collect();
        assert!(kappas.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn first_branch_form_is_positive_semidefinite() {
        let set = set_for(2, 801);
        let cp = set.point(Branch::First);
        let gram = gram_matrix(cp, 200).unwrap();
        for l in [0, 1, 5] {
            let form = mode_form(cp, l, 200).unwrap();
            assert!(min_eigenvalue(&form, &gram).unwrap() >= -1e-8);
        }
    }

    #[test]
    fn third_branch_radial_form_is_negative_semidefinite() {
        let set = set_for(2, 801);
        let cp = set.point(Branch::Third);
        let gram = gram_matrix(cp, 200).unwrap();
        let form = mode_form(cp, 0, 200).unwrap();
        assert!(max_eigenvalue(&form, &gram).unwrap() <= 1e-8);
    }

    #[test]
    fn second_branch_constant_witness() {
        let set = set_for(2, 2001);
        let cp = set.point(Branch::Second);
        let elements = 400;
        let parts = mode_form_parts(cp, 1, elements).unwrap();
        let form = parts.combined();
        let gram = gram_matrix(cp, elements).unwrap();
        let ones = vec![1.0; elements + 1];
        // g′ = 0 removes the stiffness part exactly.
        let stiffness_scale: f64 = parts.stiffness.diag.iter().map(|d| d.abs()).sum();
        assert!(parts.stiffness.quadratic(&ones).abs() <= 1e-14 * stiffness_scale);
        let q = parts.angular.quadratic(&ones);

        // ν ω κ₁ ∫ (ζ₂/ν) r^{n−3} dr, integrated directly from the dual field.
        let stress = set.stress.clone();
        let breaks = linspace(1.0, 2.0, 801);
        let direct = 2.0 * std::f64::consts::PI
            * composite(|r| stress.zeta_at(Branch::Second, r).unwrap() / r, &breaks);
        assert!(q < 0.0);
        assert_relative_eq!(q, direct, max_relative = 1e-8);

        let lowest = min_eigenvalue(&form, &gram).unwrap();
        assert!(lowest <= rayleigh_quotient(&form, &gram, &ones));
        assert!(lowest < 0.0);
    }

    #[test]
    fn second_branch_modes_decrease() {
        let set = set_for(2, 1001);
        let spectrum = mode_spectrum(set.point(Branch::Second), 8, 200).unwrap();
        let mins: Vec<f64> = spectrum.modes.iter().map(|m| m.min_eigenvalue).collect();
        for w in mins[1..].windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{mins:?}");
        }
    }

    #[test]
    fn dual_curvature_signs() {
        let set = set_for(2, 2001);
        let expected = [(Branch::First, 1.0), (Branch::Second, -1.0), (Branch::Third, 1.0)];
        for (b, sign) in expected {
            let c = dual_curvature(set.dual(b));
            assert_eq!(c.bracket_sign(), Some(sign), "branch {b}");
            assert_eq!(c.form_sign(), Some(-sign));
            assert!(c.max_discrepancy() <= 1e-10, "branch {b}: {:e}", c.max_discrepancy());
        }
        assert_eq!(curvature_bracket(-2.0 / 3.0, 1.0, 1.0), 0.0);
    }

    #[test]
    fn verdicts_from_signs() {
        let spectrum = |mins: &[f64], maxs: &[f64]| ModeSpectrum {
            branch: Branch::First,
            modes: mins
                .iter()
                .zip(maxs)
                .enumerate()
                .map(|(l, (&lo, &hi))| ModeEigen {
                    l,
                    kappa: l as f64,
                    min_eigenvalue: lo,
                    max_eigenvalue: hi,
                })
                .collect(),
            scale: 1.0,
        };
        assert_eq!(verdict_of(&spectrum(&[0.0, 1.0], &[5.0, 6.0])), Verdict::LocalMin);
        assert_eq!(verdict_of(&spectrum(&[-5.0, -6.0], &[0.0, -1.0])), Verdict::LocalMax);
        assert_eq!(
            verdict_of(&spectrum(&[0.0, -0.1], &[5.0, 5.0])),
            Verdict::RadialMinButAngularUnstable
        );
        assert_eq!(verdict_of(&spectrum(&[-1.0, -0.1], &[5.0, 5.0])), Verdict::Indefinite);
    }

    #[test]
    fn reference_classification() {
        let set = set_for(2, 2001);
        let verdicts: Vec<Verdict> = classify(&set, 8, 400)
            .unwrap()
            .iter()
            .map(|c| c.verdict)
            .collect();
        assert_eq!(
            verdicts,
            [
                Verdict::LocalMin,
                Verdict::RadialMinButAngularUnstable,
                Verdict::LocalMax
            ]
        );
    }
}

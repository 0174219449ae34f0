//! Problem data: material and geometry constants, the radial grid, and the
//! load model together with the hypotheses it has to satisfy.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{composite, linspace};

/// Absolute tolerance on the radial balance integral.
pub const BALANCE_TOLERANCE: f64 = 1e-10;

/// Cells used by the load validator, before load breakpoints are merged in.
const VALIDATION_CELLS: usize = 1024;

/// Sample count for the single-zero certificate.
const SIGN_SAMPLES: usize = 4097;

/// Material and geometry constants of the annulus problem.
///
/// `r1` is the outer radius and `r2` the inner one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    pub nu: f64,
    pub lambda: f64,
    pub r1: f64,
    pub r2: f64,
    pub n: usize,
}

impl ProblemSpec {
    /// Builds a spec and rejects it unless every hypothesis holds.
    pub fn new(nu: f64, lambda: f64, r1: f64, r2: f64, n: usize) -> Result<Self> {
        let spec = Self {
            nu,
            lambda,
            r1,
            r2,
            n,
        };
        let report = validate_spec(&spec);
        match report.first_failure() {
            None => Ok(spec),
            Some(check) => Err(Error::InvalidSpec(format!(
                "{} ({})",
                check.name, check.detail
            ))),
        }
    }

    /// Area of the unit sphere in this dimension.
    pub fn sphere_area(&self) -> f64 {
        sphere_area(self.n).expect("validated dimension")
    }

    /// Γ(n/2).
    pub fn gamma_half_dimension(&self) -> f64 {
        gamma_half_integer(self.n).expect("validated dimension")
    }

    /// Radial weight ρ^(n-1).
    pub fn radial_weight(&self, r: f64) -> f64 {
        r.powi(self.n as i32 - 1)
    }

    /// Volume of the annulus from the ball-volume difference.
    pub fn annulus_volume(&self) -> f64 {
        let n = self.n as i32;
        self.sphere_area() * (self.r1.powi(n) - self.r2.powi(n)) / self.n as f64
    }

    /// Right-hand side of the L¹ smallness bound on the load.
    pub fn l1_bound(&self) -> f64 {
        let n = self.n as i32;
        4.0 * self.lambda * self.nu * self.r2.powi(n - 1) * (2.0 * self.lambda * PI.powi(n)).sqrt()
            / (3.0 * 3f64.sqrt() * self.gamma_half_dimension())
    }
}

/// One named hypothesis and its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`validate_spec`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<HypothesisCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Checks ν > 0, λ > 0, R₁ > R₂ > 0 and n ≥ 1.
pub fn validate_spec(spec: &ProblemSpec) -> ValidationReport {
    let positive = |x: f64| x.is_finite() && x > 0.0;
    let checks = vec![
        HypothesisCheck {
            name: "nu > 0",
            passed: positive(spec.nu),
            detail: format!("nu = {}", spec.nu),
        },
        HypothesisCheck {
            name: "lambda > 0",
            passed: positive(spec.lambda),
            detail: format!("lambda = {}", spec.lambda),
        },
        HypothesisCheck {
            name: "r2 > 0",
            passed: positive(spec.r2),
            detail: format!("r2 = {}", spec.r2),
        },
        HypothesisCheck {
            name: "r1 > r2",
            passed: spec.r1.is_finite() && spec.r1 > spec.r2,
            detail: format!("r1 = {}, r2 = {}", spec.r1, spec.r2),
        },
        HypothesisCheck {
            name: "n >= 1",
            passed: spec.n >= 1,
            detail: format!("n = {}", spec.n),
        },
    ];
    ValidationReport { checks }
}

/// Γ(m/2) for a positive integer `m`, built up from Γ(1/2) = √π and Γ(1) = 1.
pub fn gamma_half_integer(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("gamma_half_integer needs m >= 1".into()));
    }
    let (mut value, mut x) = if m % 2 == 0 {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = m as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    Ok(value)
}

/// Surface area ω_{n-1} = 2π^{n/2}/Γ(n/2) of the unit sphere in ℝⁿ.
///
/// For n = 1 this is 2, one unit per half-line.
pub fn sphere_area(n: usize) -> Result<f64> {
    let gamma = gamma_half_integer(n)?;
    Ok(2.0 * PI.powf(n as f64 / 2.0) / gamma)
}

/// Strictly increasing radii spanning [R₂, R₁].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
}

impl RadialGrid {
    /// `count` uniformly spaced nodes.
    pub fn uniform(spec: &ProblemSpec, count: usize) -> Result<Self> {
        if count < 3 {
            return Err(Error::GridMismatch(format!(
                "a radial grid needs at least 3 nodes, got {count}"
            )));
        }
        Ok(Self {
            nodes: linspace(spec.r2, spec.r1, count),
        })
    }

    pub fn from_nodes(nodes: Vec<f64>, spec: &ProblemSpec) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::GridMismatch("fewer than 3 nodes".into()));
        }
        if nodes[0] != spec.r2 || nodes[nodes.len() - 1] != spec.r1 {
            return Err(Error::GridMismatch(format!(
                "grid must span [{}, {}]",
                spec.r2, spec.r1
            )));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::GridMismatch("nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Index of the cell `[nodes[k], nodes[k+1]]` containing `r`, clamped to the grid.
    pub fn cell_of(&self, r: f64) -> usize {
        let k = self.nodes.partition_point(|&x| x <= r);
        k.saturating_sub(1).min(self.nodes.len() - 2)
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        self.nodes == other.nodes
    }
}

/// How the load is represented.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadKind {
    /// f(r) = a (R₃ - r).
    Linear { amplitude: f64 },
    /// Piecewise-linear interpolation of `(r, f(r))` samples.
    Tabulated { samples: Vec<(f64, f64)> },
}

/// Radially symmetric load f(r).
#[derive(Debug, Clone, PartialEq)]
pub struct LoadFunction {
    kind: LoadKind,
    r3: Option<f64>,
}

impl LoadFunction {
    /// Tabulated load. Sample ordering and range are checked by [`validate_load`].
    pub fn tabulated(samples: Vec<(f64, f64)>) -> Self {
        let r3 = tabulated_zero(&samples);
        Self {
            kind: LoadKind::Tabulated { samples },
            r3,
        }
    }

    /// The identically zero load on the spec's interval.
    ///
    /// It violates the single-zero hypothesis; downstream code accepts it only
    /// when explicitly asked to.
    pub fn zero(spec: &ProblemSpec) -> Self {
        Self::tabulated(vec![(spec.r2, 0.0), (spec.r1, 0.0)])
    }

    pub fn kind(&self) -> &LoadKind {
        &self.kind
    }

    /// The interior zero R₃, when one was located.
    pub fn r3(&self) -> Option<f64> {
        self.r3
    }

    pub fn eval(&self, r: f64) -> f64 {
        match &self.kind {
            LoadKind::Linear { amplitude } => {
                amplitude * (self.r3.expect("linear loads carry r3") - r)
            }
            LoadKind::Tabulated { samples } => interpolate(samples, r),
        }
    }

    /// Radii where f fails to be smooth or changes sign.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = match &self.kind {
            LoadKind::Linear { .. } => Vec::new(),
            LoadKind::Tabulated { samples } => samples.iter().map(|s| s.0).collect(),
        };
        out.extend(self.r3);
        out
    }

    /// Radii where f itself has a kink (tabulated sample radii).
    pub fn kinks(&self) -> Vec<f64> {
        match &self.kind {
            LoadKind::Linear { .. } => Vec::new(),
            LoadKind::Tabulated { samples } => samples.iter().map(|s| s.0).collect(),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        match &self.kind {
            LoadKind::Linear { amplitude } => *amplitude == 0.0,
            LoadKind::Tabulated { samples } => samples.iter().all(|s| s.1 == 0.0),
        }
    }
}

fn interpolate(samples: &[(f64, f64)], r: f64) -> f64 {
    match samples.len() {
        0 => 0.0,
        1 => samples[0].1,
        len => {
            let k = samples
                .partition_point(|s| s.0 <= r)
                .saturating_sub(1)
                .min(len - 2);
            let (r0, f0) = samples[k];
            let (r1, f1) = samples[k + 1];
            f0 + (f1 - f0) * (r - r0) / (r1 - r0)
        }
    }
}

fn tabulated_zero(samples: &[(f64, f64)]) -> Option<f64> {
    let len = samples.len();
    if len < 3 {
        return None;
    }
    if let Some(&(r, _)) = samples[1..len - 1].iter().find(|s| s.1 == 0.0) {
        return Some(r);
    }
    samples.windows(2).find_map(|w| {
        let ((r0, f0), (r1, f1)) = (w[0], w[1]);
        (f0 * f1 < 0.0).then(|| r0 + f0 * (r1 - r0) / (f0 - f1))
    })
}

/// Linear load a(R₃ − r) with R₃ placed so the radial balance integral vanishes.
pub fn balanced_linear_load(spec: &ProblemSpec, amplitude: f64) -> Result<LoadFunction> {
    if amplitude == 0.0 || !amplitude.is_finite() {
        return Err(Error::DegenerateLoad(format!(
            "linear load amplitude must be finite and nonzero, got {amplitude}"
        )));
    }
    let n = spec.n as i32;
    let nf = spec.n as f64;
    let r3 = nf / (nf + 1.0) * (spec.r1.powi(n + 1) - spec.r2.powi(n + 1))
        / (spec.r1.powi(n) - spec.r2.powi(n));
    Ok(LoadFunction {
        kind: LoadKind::Linear { amplitude },
        r3: Some(r3),
    })
}

/// Outcome of [`validate_load`].
#[derive(Debug, Clone, PartialEq)]
pub struct LoadReport {
    /// |∫ f ρ^{n-1} dρ| over [R₂, R₁].
    pub balance_residual: f64,
    pub balance_ok: bool,
    pub sign_changes: usize,
    pub single_zero_ok: bool,
    pub r3: Option<f64>,
    /// ‖f‖ over the annulus.
    pub l1_norm: f64,
    pub l1_bound: f64,
    pub l1_ok: bool,
}

impl LoadReport {
    pub fn passed(&self) -> bool {
        self.balance_ok && self.single_zero_ok && self.l1_ok
    }

    /// Names of the failed hypotheses.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.balance_ok {
            out.push(format!(
                "balance: |int f rho^(n-1)| = {:e} exceeds {:e}",
                self.balance_residual, BALANCE_TOLERANCE
            ));
        }
        if !self.single_zero_ok {
            out.push(format!(
                "single interior zero: f changes sign {} times or vanishes elsewhere",
                self.sign_changes
            ));
        }
        if !self.l1_ok {
            out.push(format!(
                "L1 bound: ||f|| = {:e} is not below {:e}",
                self.l1_norm, self.l1_bound
            ));
        }
        out
    }
}

/// Checks balance, the single interior zero, and the L¹ smallness bound.
pub fn validate_load(load: &LoadFunction, spec: &ProblemSpec) -> Result<LoadReport> {
    if let LoadKind::Tabulated { samples } = load.kind() {
        check_samples(samples, spec)?;
    }
    let breaks = validation_breaks(load, spec);
    let balance = composite(|r| load.eval(r) * spec.radial_weight(r), &breaks);
    let l1_radial = composite(|r| load.eval(r).abs() * spec.radial_weight(r), &breaks);
    let l1_norm = spec.sphere_area() * l1_radial;
    let l1_bound = spec.l1_bound();

    let (sign_changes, single_zero_ok) = sign_certificate(load, spec);
    let balance_residual = balance.abs();
    Ok(LoadReport {
        balance_residual,
        balance_ok: balance_residual <= BALANCE_TOLERANCE,
        sign_changes,
        single_zero_ok,
        r3: load.r3(),
        l1_norm,
        l1_bound,
        l1_ok: l1_norm < l1_bound,
    })
}

fn check_samples(samples: &[(f64, f64)], spec: &ProblemSpec) -> Result<()> {
    if samples.len() < 2 {
        return Err(Error::MalformedLoad(
            "a tabulated load needs at least 2 samples".into(),
        ));
    }
    if let Some((i, _)) = samples
        .iter()
        .enumerate()
        .find(|(_, s)| !s.0.is_finite() || !s.1.is_finite())
    {
        return Err(Error::MalformedLoad(format!("sample {i} is not finite")));
    }
    if let Some(i) = samples.windows(2).position(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::MalformedLoad(format!(
            "sample radii must be strictly increasing (samples {i} and {})",
            i + 1
        )));
    }
    let span = spec.r1 - spec.r2;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * span.max(1.0);
    let (first, last) = (samples[0].0, samples[samples.len() - 1].0);
    if !close(first, spec.r2) || !close(last, spec.r1) {
        return Err(Error::MalformedLoad(format!(
            "sample radii span [{first}, {last}] instead of [{}, {}]",
            spec.r2, spec.r1
        )));
    }
    Ok(())
}

fn validation_breaks(load: &LoadFunction, spec: &ProblemSpec) -> Vec<f64> {
    let mut breaks = linspace(spec.r2, spec.r1, VALIDATION_CELLS + 1);
    breaks.extend(
        load.breakpoints()
            .into_iter()
            .filter(|&r| r > spec.r2 && r < spec.r1),
    );
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
}

/// Counts sign changes of f on a fine sample set. Passes iff f is nonzero at
/// both ends, changes sign exactly once, and vanishes at most at one sample.
fn sign_certificate(load: &LoadFunction, spec: &ProblemSpec) -> (usize, bool) {
    let mut radii = linspace(spec.r2, spec.r1, SIGN_SAMPLES);
    radii.extend(
        load.breakpoints()
            .into_iter()
            .filter(|&r| r > spec.r2 && r < spec.r1),
    );
    radii.sort_by(f64::total_cmp);
    radii.dedup();

    let values: Vec<f64> = radii.iter().map(|&r| load.eval(r)).collect();
    let mut changes = 0;
    let mut zeros = 0;
    let mut last_sign = 0.0;
    for &v in &values {
        if v == 0.0 {
            zeros += 1;
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            changes += 1;
        }
        last_sign = s;
    }
    let ends_nonzero = values[0] != 0.0 && values[values.len() - 1] != 0.0;
    (changes, ends_nonzero && changes == 1 && zeros <= 1)
}

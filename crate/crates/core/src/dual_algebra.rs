//! The cubic dual algebraic equation 2ζ²(λ + ζ/ν) = A and its root branches.
//!
//! Roots come from the trigonometric (three real roots) or hyperbolic (one
//! real root) closed form of the depressed cubic, then get polished by a
//! bracketed Newton iteration on E(ζ) − A. Each branch lives on an interval
//! where E is monotone, which gives a safe bracket:
//!
//! ```text
//! ζ₁ ∈ [0, ∞)          E increasing
//! ζ₂ ∈ [−2νλ/3, 0]     E decreasing
//! ζ₃ ∈ [−νλ, −2νλ/3]   E increasing
//! ```

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Amplitudes this far below zero are treated as rounding noise and clamped.
pub const NEGATIVE_AMPLITUDE_SLACK: f64 = 1e-14;

/// Relative window around the critical amplitude reported as a double root.
pub const REGIME_TOLERANCE: f64 = 1e-12;

/// Relative residual bound |E(ζ) − A| ≤ ROOT_TOLERANCE · max(1, A).
pub const ROOT_TOLERANCE: f64 = 1e-12;

const POLISH_ITERATIONS: usize = 100;

/// Label of a root branch, ordered ζ₁ > ζ₂ > ζ₃.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    First,
    Second,
    Third,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::First, Branch::Second, Branch::Third];

    /// 1, 2 or 3.
    pub fn index(self) -> usize {
        match self {
            Branch::First => 1,
            Branch::Second => 2,
            Branch::Third => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            1 => Some(Branch::First),
            2 => Some(Branch::Second),
            3 => Some(Branch::Third),
            _ => None,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// How many real roots lie in [−νλ, ∞).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    ThreeRoots,
    CriticalDouble,
    SingleRoot,
}

/// Real roots of E(ζ) = A in [−νλ, ∞), sorted descending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRootSet {
    pub amplitude: f64,
    pub regime: Regime,
    roots: [f64; 3],
    count: usize,
}

impl CubicRootSet {
    /// The roots, largest first. In the critical regime the double root is
    /// listed twice, as ζ₂ and ζ₃.
    pub fn roots(&self) -> &[f64] {
        &self.roots[..self.count]
    }

    pub fn branch(&self, branch: Branch) -> Option<f64> {
        let i = branch.index() - 1;
        (i < self.count).then(|| self.roots[i])
    }
}

/// E(y) = 2y²(λ + y/ν) on y ≥ −νλ.
pub fn evaluate_e(y: f64, nu: f64, lambda: f64) -> Result<f64> {
    if !(y >= -nu * lambda) {
        return Err(Error::Domain(format!(
            "E(y) is defined for y >= -nu*lambda = {}, got {y}",
            -nu * lambda
        )));
    }
    Ok(energy_polynomial(y, nu, lambda))
}

#[inline]
fn energy_polynomial(y: f64, nu: f64, lambda: f64) -> f64 {
    2.0 * y * y * (lambda + y / nu)
}

#[inline]
fn energy_slope(y: f64, nu: f64, lambda: f64) -> f64 {
    2.0 * y * (2.0 * lambda + 3.0 * y / nu)
}

/// Maximum 8λ³ν²/27 of E on [−νλ, 0], attained at −2νλ/3.
pub fn critical_amplitude(nu: f64, lambda: f64) -> f64 {
    8.0 * lambda.powi(3) * nu * nu / 27.0
}

/// Solves E(ζ) = A for every real root in [−νλ, ∞).
pub fn solve_dae(amplitude: f64, nu: f64, lambda: f64) -> Result<CubicRootSet> {
    if !amplitude.is_finite() || !(nu > 0.0) || !(lambda > 0.0) {
        return Err(Error::Domain(format!(
            "solve_dae needs finite A and nu, lambda > 0 (A = {amplitude}, nu = {nu}, lambda = {lambda})"
        )));
    }
    if amplitude < -NEGATIVE_AMPLITUDE_SLACK {
        return Err(Error::NegativeAmplitude(amplitude));
    }
    let a = amplitude.max(0.0);
    let b = nu * lambda;
    let critical = critical_amplitude(nu, lambda);

    if a == 0.0 {
        return Ok(CubicRootSet {
            amplitude: a,
            regime: Regime::ThreeRoots,
            roots: [0.0, 0.0, -b],
            count: 3,
        });
    }

    let ratio = a / critical;
    if (a - critical).abs() <= REGIME_TOLERANCE * critical {
        let top = polish_first(b / 3.0, a, nu, lambda);
        return Ok(CubicRootSet {
            amplitude: a,
            regime: Regime::CriticalDouble,
            roots: [top, -2.0 * b / 3.0, -2.0 * b / 3.0],
            count: 3,
        });
    }

    if ratio < 1.0 {
        let theta = (2.0 * ratio - 1.0).clamp(-1.0, 1.0).acos();
        let trig = |k: f64| 2.0 * b / 3.0 * (theta / 3.0 - 2.0 * PI * k / 3.0).cos() - b / 3.0;
        let roots = [
            polish_first(trig(0.0), a, nu, lambda),
            polish_second(trig(1.0), a, nu, lambda),
            polish_third(trig(2.0), a, nu, lambda),
        ];
        Ok(CubicRootSet {
            amplitude: a,
            regime: Regime::ThreeRoots,
            roots,
            count: 3,
        })
    } else {
        let phi = (2.0 * ratio - 1.0).acosh();
        let guess = 2.0 * b / 3.0 * (phi / 3.0).cosh() - b / 3.0;
        Ok(CubicRootSet {
            amplitude: a,
            regime: Regime::SingleRoot,
            roots: [polish_first(guess, a, nu, lambda), f64::NAN, f64::NAN],
            count: 1,
        })
    }
}

/// Root of one branch. `None` when the branch does not exist at this amplitude.
pub fn branch_root(amplitude: f64, nu: f64, lambda: f64, branch: Branch) -> Result<Option<f64>> {
    Ok(solve_dae(amplitude, nu, lambda)?.branch(branch))
}

fn polish_first(guess: f64, a: f64, nu: f64, lambda: f64) -> f64 {
    // E(ζ) ≥ 2λζ² and E(ζ) ≥ 2ζ³/ν for ζ ≥ 0.
    let upper = (a / (2.0 * lambda)).sqrt().min((nu * a / 2.0).cbrt());
    polish(guess, 0.0, upper, true, a, nu, lambda)
}

fn polish_second(guess: f64, a: f64, nu: f64, lambda: f64) -> f64 {
    polish(guess, -2.0 * nu * lambda / 3.0, 0.0, false, a, nu, lambda)
}

fn polish_third(guess: f64, a: f64, nu: f64, lambda: f64) -> f64 {
    polish(guess, -nu * lambda, -2.0 * nu * lambda / 3.0, true, a, nu, lambda)
}

/// Newton on E(ζ) − A, safeguarded by bisection inside `[lo, hi]` where E is
/// monotone (increasing when `increasing`).
fn polish(guess: f64, lo: f64, hi: f64, increasing: bool, a: f64, nu: f64, lambda: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    let residual = |z: f64| {
        let g = energy_polynomial(z, nu, lambda) - a;
        if increasing {
            g
        } else {
            -g
        }
    };
    let mut x = guess.clamp(lo, hi);
    let mut best = (residual(x).abs(), x);
    for _ in 0..POLISH_ITERATIONS {
        let g = residual(x);
        if g.abs() < best.0 {
            best = (g.abs(), x);
        }
        if g == 0.0 {
            return x;
        }
        if g > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let slope = energy_slope(x, nu, lambda) * if increasing { 1.0 } else { -1.0 };
        let newton = x - g / slope;
        let next = if slope > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == x || hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()) {
            break;
        }
        x = next;
    }
    let g = residual(x).abs();
    if g < best.0 {
        x
    } else {
        best.1
    }
}

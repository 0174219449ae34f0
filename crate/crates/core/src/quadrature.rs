//! Composite Gauss–Legendre quadrature on radial grids.
//!
//! Every radial integral in the crate goes through the 4-point rule applied
//! cell by cell. Sums use Neumaier compensation, since the balance integrals
//! are differences of nearly equal moments.

/// Abscissae of the 4-point Gauss–Legendre rule on [-1, 1].
const NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];

/// Weights matching [`NODES`].
const WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Number of Gauss points per cell.
pub const POINTS_PER_CELL: usize = 4;

/// Gauss points and weights of the 4-point rule mapped onto `[a, b]`.
pub fn gauss_points(a: f64, b: f64) -> [(f64, f64); POINTS_PER_CELL] {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = [(0.0, 0.0); POINTS_PER_CELL];
    for (slot, (x, w)) in out.iter_mut().zip(NODES.iter().zip(WEIGHTS.iter())) {
        *slot = (mid + half * x, half * w);
    }
    out
}

/// Integrates `f` over `[a, b]` with a single 4-point cell.
pub fn gauss_cell<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mut acc = CompensatedSum::default();
    for (x, w) in gauss_points(a, b) {
        acc.add(w * f(x));
    }
    acc.value()
}

/// Integrates `f` over the span of `breaks`, one 4-point cell per interval.
pub fn composite<F: Fn(f64) -> f64>(f: F, breaks: &[f64]) -> f64 {
    let mut acc = CompensatedSum::default();
    for pair in breaks.windows(2) {
        for (x, w) in gauss_points(pair[0], pair[1]) {
            acc.add(w * f(x));
        }
    }
    acc.value()
}

/// Running integral of `f` from `breaks[0]` to every break point.
///
/// The first entry is exactly zero.
pub fn cumulative<F: Fn(f64) -> f64>(f: F, breaks: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(breaks.len());
    let mut acc = CompensatedSum::default();
    out.push(0.0);
    for pair in breaks.windows(2) {
        for (x, w) in gauss_points(pair[0], pair[1]) {
            acc.add(w * f(x));
        }
        out.push(acc.value());
    }
    out
}

/// `count` equally spaced points from `a` to `b`, endpoints included exactly.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "linspace needs at least two points");
    let step = (b - a) / (count - 1) as f64;
    let mut out: Vec<f64> = (0..count).map(|i| a + step * i as f64).collect();
    out[count - 1] = b;
    out
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::default();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_on_degree_seven() {
        let f = |x: f64| 3.0 * x.powi(7) - x.powi(4) + 2.0 * x - 1.0;
        let exact = |x: f64| 3.0 / 8.0 * x.powi(8) - x.powi(5) / 5.0 + x * x - x;
        let got = gauss_cell(f, 0.5, 2.25);
        assert_relative_eq!(got, exact(2.25) - exact(0.5), max_relative = 1e-14);
    }

    #[test]
    fn cumulative_matches_composite() {
        let breaks = linspace(1.0, 3.0, 17);
        let run = cumulative(f64::sin, &breaks);
        assert_eq!(run[0], 0.0);
        assert_relative_eq!(
            *run.last().unwrap(),
            composite(f64::sin, &breaks),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            *run.last().unwrap(),
            1.0f64.cos() - 3.0f64.cos(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let acc: CompensatedSum = [1e16, 1.0, -1e16, 1.0].into_iter().collect();
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn linspace_hits_endpoints() {
        let pts = linspace(0.1, 0.7, 7);
        assert_eq!(pts[0], 0.1);
        assert_eq!(pts[6], 0.7);
    }
}

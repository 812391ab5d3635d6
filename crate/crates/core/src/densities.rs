//! Predicted fluctuation densities of the universality classes: the sine
//! kernels K₀, K₊, K₋, determinant r-level densities W^(r), Fejér test
//! functions, and closed-form one-level predictions.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::util::sum::mean_and_se;

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("empty family")]
    EmptyFamily,
    #[error("Fourier support parameter a = {0} outside validated range (0, 4]")]
    SupportOutOfRange(f64),
}

/// Which sine kernel: K₀ (unitary), K₊ (even orthogonal),
/// K₋ (odd orthogonal / symplectic).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    UnitaryK,
    EvenOrthK,
    OddOrSympK,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Kernel value; the removable singularities at x = y and x = −y are
/// evaluated by the limit sinc(0) = 1.
pub fn kernel(kind: KernelKind, x: f64, y: f64) -> f64 {
    let s0 = sinc(PI * (x - y));
    match kind {
        KernelKind::UnitaryK => s0,
        KernelKind::EvenOrthK => s0 + sinc(PI * (x + y)),
        KernelKind::OddOrSympK => s0 - sinc(PI * (x + y)),
    }
}

/// r-level density W^(r)(x₁,…,x_r) = det(K(x_i, x_j)).
pub fn w_r(kind: KernelKind, points: &[f64]) -> f64 {
    let r = points.len();
    assert!(r >= 1, "need at least one point");
    if r == 1 {
        return kernel(kind, points[0], points[0]);
    }
    let m = nalgebra::DMatrix::<f64>::from_fn(r, r, |i, j| kernel(kind, points[i], points[j]));
    m.determinant()
}

/// Fejér test function Φ(x) = a·(sin(πax)/(πax))² with transform
/// Φ̂(ξ) = max(0, 1 − |ξ|/a); Φ̂ is supported in [−a, a].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TestFunction {
    pub a: f64,
}

impl TestFunction {
    pub fn fejer(a: f64) -> Self {
        assert!(a > 0.0, "support parameter must be positive");
        TestFunction { a }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = PI * self.a * x;
        let s = sinc(u);
        self.a * s * s
    }

    pub fn transform(&self, xi: f64) -> f64 {
        (1.0 - xi.abs() / self.a).max(0.0)
    }
}

/// Closed-form ∫ Φ W^(1) for the Fejér family:
/// K₀ gives 1; K∓ give 1 ∓ T(a)/2 with T(a) = ∫_{−1}^{1} Φ̂,
/// which is a for a ≤ 1 and 2 − 1/a for a ≥ 1. The OddOrSympK case with
/// a retained central zero adds Φ(0) = a.
pub fn predicted_one_level(
    kind: KernelKind,
    phi: &TestFunction,
    include_central_zero: bool,
) -> Result<f64, DensityError> {
    if phi.a <= 0.0 || phi.a > 4.0 {
        return Err(DensityError::SupportOutOfRange(phi.a));
    }
    let t = if phi.a <= 1.0 { phi.a } else { 2.0 - 1.0 / phi.a };
    let base = match kind {
        KernelKind::UnitaryK => 1.0,
        KernelKind::EvenOrthK => 1.0 + t / 2.0,
        KernelKind::OddOrSympK => 1.0 - t / 2.0,
    };
    let central = if include_central_zero && kind == KernelKind::OddOrSympK {
        phi.eval(0.0)
    } else {
        0.0
    };
    Ok(base + central)
}

/// Quadrature route for ∫_ℝ Φ(x) W^(1)(x) dx: composite Simpson on
/// [−L, L] plus a two-term analytic tail (Φ ~ sin²(πax)/(π²ax²) for
/// large x, and the kernel term contributes O(1/L²)). Independent of the
/// closed form; used as its oracle.
pub fn one_level_by_quadrature(kind: KernelKind, phi: &TestFunction, half_width: f64, panels: usize) -> f64 {
    let f = |x: f64| phi.eval(x) * kernel(kind, x, x);
    let core = crate::util::quad::simpson(&f, -half_width, half_width, panels);
    let l = half_width;
    let a = phi.a;
    // ∫_L^∞ Φ ≈ (1/π²a)·[1/(2L) − sin(2πaL)/(4πaL²)]; W → 1 at infinity
    let tail_one_side = (1.0 / (PI * PI * a)) * (0.5 / l - (2.0 * PI * a * l).sin() / (4.0 * PI * a * l * l));
    core + 2.0 * tail_one_side
}

/// Empirical-vs-predicted one-level comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityReport {
    pub empirical_mean: f64,
    pub predicted: f64,
    pub abs_gap: f64,
    pub stderr: f64,
    pub members: usize,
}

/// Averages Σ_j Φ(x_j) over family members. Each inner list holds one
/// member's scaled ordinates, already signed by the caller's convention.
pub fn compare_density(
    scaled_points: &[Vec<f64>],
    kind: KernelKind,
    phi: &TestFunction,
    include_central_zero: bool,
) -> Result<DensityReport, DensityError> {
    if scaled_points.is_empty() {
        return Err(DensityError::EmptyFamily);
    }
    let sums: Vec<f64> = scaled_points
        .iter()
        .map(|pts| {
            let terms: Vec<f64> = pts.iter().map(|&x| phi.eval(x)).collect();
            crate::util::sum::pairwise_sum(&terms)
        })
        .collect();
    let (mean, se) = mean_and_se(&sums);
    let predicted = predicted_one_level(kind, phi, include_central_zero)?;
    Ok(DensityReport {
        empirical_mean: mean,
        predicted,
        abs_gap: (mean - predicted).abs(),
        stderr: se,
        members: scaled_points.len(),
    })
}

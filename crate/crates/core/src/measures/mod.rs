//! Conjugacy-class data on the n-torus, measures on it, compact-group
//! sampling specs, indicator triples and measure pushforwards.

mod indicators;
mod plancherel;
mod sampling;

pub use indicators::{
    decompose_indicators, decompose_indicators_default, indicators_exact, indicators_monte_carlo,
    indicators_of_measure, MassDecomposition,
};
pub use plancherel::{density_integral, density_sup_distance, plancherel_pgl2};
pub use sampling::{dihedral_d3, sample_group};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

use crate::rmt::HaarFamily;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("finite group element is not unitary (defect {0:e})")]
    NonUnitaryElement(f64),
    #[error("finite group is not closed under products")]
    NotClosed,
    #[error("group too large: {0} elements")]
    GroupTooLarge(usize),
    #[error("need at least {0} samples")]
    TooFewSamples(usize),
    #[error("twistor must have rank 1, got {0}")]
    TwistorRank(usize),
    #[error("operation requires an atomic or empirical measure")]
    DensityUnsupported,
    #[error("empty input")]
    Empty,
    #[error("primes must be distinct and below the cutoff")]
    BadPrimes,
    #[error("i1 = {0} is too far from 1 (not essentially cuspidal, tolerance {1})")]
    NotCuspidal(f64, f64),
    #[error("spec not supported by exact enumeration")]
    NotFiniteSpec,
    #[error(transparent)]
    Rmt(#[from] crate::rmt::RmtError),
}

/// Wrap an angle into the canonical interval (−π, π].
pub fn wrap_angle(t: f64) -> f64 {
    let mut x = t % std::f64::consts::TAU;
    if x <= -PI {
        x += std::f64::consts::TAU;
    } else if x > PI {
        x -= std::f64::consts::TAU;
    }
    x
}

/// A point of the torus quotient T_c/W: sorted eigenvalue arguments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    angles: Vec<f64>,
}

impl TorusPoint {
    /// Canonicalizes: wraps every angle into (−π, π] and sorts ascending.
    pub fn new(mut angles: Vec<f64>) -> Self {
        for a in angles.iter_mut() {
            *a = wrap_angle(*a);
        }
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        TorusPoint { angles }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn rank(&self) -> usize {
        self.angles.len()
    }

    /// tr(t) = Σ e^{iθ_j}, summed in fixed index order.
    pub fn trace(&self) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in &self.angles {
            acc += Complex64::from_polar(1.0, a);
        }
        acc
    }

    /// The point with every eigenvalue squared (angles doubled).
    pub fn squared(&self) -> TorusPoint {
        TorusPoint::new(self.angles.iter().map(|&a| 2.0 * a).collect())
    }

    /// tr(t²) = Σ e^{2iθ_j}.
    pub fn trace_of_square(&self) -> Complex64 {
        self.squared().trace()
    }

    /// Coordinatewise product with a rank-1 point (adds its angle).
    pub fn twisted_by(&self, phi: f64) -> TorusPoint {
        TorusPoint::new(self.angles.iter().map(|&a| a + phi).collect())
    }

    /// All pairwise products of eigenvalues with another point.
    pub fn tensor(&self, other: &TorusPoint) -> TorusPoint {
        let mut angles = Vec::with_capacity(self.rank() * other.rank());
        for &a in &self.angles {
            for &b in &other.angles {
                angles.push(a + b);
            }
        }
        TorusPoint::new(angles)
    }
}

/// A local spectral datum: a tempered Satake parameter or a ramified
/// marker carrying its conductor exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpectralSample {
    Unramified(TorusPoint),
    Ramified { conductor_exponent: u32 },
}

/// A (sub-)probability measure on conjugacy-class data. Total mass ≤ 1;
/// the deficit is ramified mass.
#[derive(Clone)]
pub enum TorusMeasure {
    Atomic { atoms: Vec<(TorusPoint, f64)> },
    Empirical { samples: Vec<SpectralSample> },
    Density { density: Arc<dyn Fn(f64) -> f64 + Send + Sync>, grid: usize },
}

impl std::fmt::Debug for TorusMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TorusMeasure::Atomic { atoms } => f.debug_struct("Atomic").field("atoms", &atoms.len()).finish(),
            TorusMeasure::Empirical { samples } => {
                f.debug_struct("Empirical").field("samples", &samples.len()).finish()
            }
            TorusMeasure::Density { grid, .. } => f.debug_struct("Density").field("grid", grid).finish(),
        }
    }
}

impl TorusMeasure {
    pub fn atomic(atoms: Vec<(TorusPoint, f64)>) -> Self {
        TorusMeasure::Atomic { atoms }
    }

    pub fn empirical(samples: Vec<SpectralSample>) -> Self {
        TorusMeasure::Empirical { samples }
    }

    pub fn from_points(points: Vec<TorusPoint>) -> Self {
        TorusMeasure::Empirical { samples: points.into_iter().map(SpectralSample::Unramified).collect() }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            TorusMeasure::Atomic { atoms } => atoms.iter().map(|(_, w)| w).sum(),
            TorusMeasure::Empirical { samples } => {
                if samples.is_empty() {
                    return 0.0;
                }
                let unram = samples.iter().filter(|s| matches!(s, SpectralSample::Unramified(_))).count();
                unram as f64 / samples.len() as f64
            }
            TorusMeasure::Density { density, grid } => {
                crate::util::quad::simpson(&|t| density(t), 0.0, PI, *grid)
            }
        }
    }

    /// Weighted atoms of an atomic or empirical measure (ramified samples
    /// contribute to the mass deficit, not to the atom list).
    pub fn atoms(&self) -> Result<Vec<(TorusPoint, f64)>, MeasureError> {
        match self {
            TorusMeasure::Atomic { atoms } => Ok(atoms.clone()),
            TorusMeasure::Empirical { samples } => {
                let w = 1.0 / samples.len().max(1) as f64;
                Ok(samples
                    .iter()
                    .filter_map(|s| match s {
                        SpectralSample::Unramified(p) => Some((p.clone(), w)),
                        SpectralSample::Ramified { .. } => None,
                    })
                    .collect())
            }
            TorusMeasure::Density { .. } => Err(MeasureError::DensityUnsupported),
        }
    }

    /// Mean of f(t) with respect to the mass-normalized measure.
    pub fn expect<F: Fn(&TorusPoint) -> Complex64>(&self, f: F) -> Result<Complex64, MeasureError> {
        let atoms = self.atoms()?;
        let mass: f64 = atoms.iter().map(|(_, w)| w).sum();
        if mass == 0.0 {
            return Err(MeasureError::Empty);
        }
        let vals: Vec<Complex64> = atoms.iter().map(|(p, w)| f(p) * *w).collect();
        Ok(crate::util::sum::pairwise_sum_c(&vals) / mass)
    }
}

/// A compact-group sampling specification.
#[derive(Clone, Debug)]
pub enum GroupSpec {
    /// An explicit finite subgroup of U(n), given by its elements.
    FiniteGroup(Vec<DMatrix<Complex64>>),
    /// SU(2) in its (k+1)-dimensional symmetric-power representation.
    SU2Sym(u32),
    /// All of U(1).
    FullCircle,
    /// The group of m-th roots of unity in U(1).
    RootsOfUnity(u32),
    /// One of the classical compact families at finite rank.
    ClassicalHaar(HaarFamily),
    /// Pairwise eigenvalue products of the two factors.
    Tensor(Box<GroupSpec>, Box<GroupSpec>),
    /// Every eigenvalue of `base` multiplied by a rank-1 `twistor` sample.
    TwistBy { base: Box<GroupSpec>, twistor: Box<GroupSpec> },
}

impl GroupSpec {
    pub fn tensor(a: GroupSpec, b: GroupSpec) -> GroupSpec {
        GroupSpec::Tensor(Box::new(a), Box::new(b))
    }

    pub fn twist(base: GroupSpec, twistor: GroupSpec) -> GroupSpec {
        GroupSpec::TwistBy { base: Box::new(base), twistor: Box::new(twistor) }
    }

    /// Dimension of the ambient GL_n.
    pub fn rank(&self) -> usize {
        match self {
            GroupSpec::FiniteGroup(mats) => mats.first().map(|m| m.nrows()).unwrap_or(0),
            GroupSpec::SU2Sym(k) => *k as usize + 1,
            GroupSpec::FullCircle | GroupSpec::RootsOfUnity(_) => 1,
            GroupSpec::ClassicalHaar(f) => f.dim(),
            GroupSpec::Tensor(a, b) => a.rank() * b.rank(),
            GroupSpec::TwistBy { base, .. } => base.rank(),
        }
    }
}

/// Estimates of the three indicator integrals with standard errors.
/// `i2` and `i3` are reported as the real parts of the complex means; the
/// imaginary parts are kept as diagnostics for non-self-dual specs.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IndicatorTriple {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub se1: f64,
    pub se2: f64,
    pub se3: f64,
    pub i2_im: f64,
    pub i3_im: f64,
}

impl IndicatorTriple {
    pub fn exact(i1: f64, i2: f64, i3: f64) -> Self {
        IndicatorTriple { i1, i2, i3, se1: 0.0, se2: 0.0, se3: 0.0, i2_im: 0.0, i3_im: 0.0 }
    }

    /// True when an imaginary part exceeds three standard errors, i.e. the
    /// real-part reading of i2/i3 is suspect.
    pub fn imaginary_flagged(&self) -> bool {
        self.i2_im.abs() > 3.0 * self.se2.max(1e-12) || self.i3_im.abs() > 3.0 * self.se3.max(1e-12)
    }
}

/// Squares every point of an atomic or empirical measure.
pub fn pushforward_square(mu: &TorusMeasure) -> Result<TorusMeasure, MeasureError> {
    match mu {
        TorusMeasure::Atomic { atoms } => {
            Ok(TorusMeasure::Atomic { atoms: atoms.iter().map(|(p, w)| (p.squared(), *w)).collect() })
        }
        TorusMeasure::Empirical { samples } => Ok(TorusMeasure::Empirical {
            samples: samples
                .iter()
                .map(|s| match s {
                    SpectralSample::Unramified(p) => SpectralSample::Unramified(p.squared()),
                    r => r.clone(),
                })
                .collect(),
        }),
        TorusMeasure::Density { .. } => Err(MeasureError::DensityUnsupported),
    }
}

/// Pushforward of the product measure through coordinatewise
/// multiplication by a rank-1 twistor.
pub fn twist_pushforward(mu: &TorusMeasure, twistor: &TorusMeasure) -> Result<TorusMeasure, MeasureError> {
    let base_atoms = mu.atoms()?;
    let twist_atoms = twistor.atoms()?;
    for (p, _) in &twist_atoms {
        if p.rank() != 1 {
            return Err(MeasureError::TwistorRank(p.rank()));
        }
    }
    let mut out = Vec::with_capacity(base_atoms.len() * twist_atoms.len());
    for (t, wt) in &twist_atoms {
        let phi = t.angles()[0];
        for (p, wp) in &base_atoms {
            out.push((p.twisted_by(phi), wp * wt));
        }
    }
    Ok(TorusMeasure::Atomic { atoms: out })
}

/// Raw and mass-normalized log-weighted averages of vertical measures:
/// the raw mixture is (1/x)·Σ_{p<x} log p · μ_p.
pub struct StAverage {
    pub raw: TorusMeasure,
    pub normalized: TorusMeasure,
    pub raw_mass: f64,
}

pub fn st_average(measures: &[(u64, TorusMeasure)], x: f64) -> Result<StAverage, MeasureError> {
    if measures.is_empty() {
        return Err(MeasureError::Empty);
    }
    let mut seen = std::collections::HashSet::new();
    for (p, _) in measures {
        if (*p as f64) >= x || !seen.insert(*p) {
            return Err(MeasureError::BadPrimes);
        }
    }
    let mut atoms: Vec<(TorusPoint, f64)> = Vec::new();
    for (p, mu) in measures {
        let lp = (*p as f64).ln();
        for (pt, w) in mu.atoms()? {
            atoms.push((pt, w * lp / x));
        }
    }
    let raw_mass: f64 = atoms.iter().map(|(_, w)| w).sum();
    let normalized = TorusMeasure::Atomic {
        atoms: atoms.iter().map(|(p, w)| (p.clone(), w / raw_mass)).collect(),
    };
    Ok(StAverage { raw: TorusMeasure::Atomic { atoms }, normalized, raw_mass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalization_wraps_and_sorts() {
        let p = TorusPoint::new(vec![3.0 * PI, -PI, 0.5]);
        // 3π wraps to π, −π wraps to π
        assert_eq!(p.angles(), &[0.5, PI, PI]);
    }

    #[test]
    fn trace_is_reproducible() {
        let p = TorusPoint::new(vec![0.3, -1.2, 2.9]);
        let t1 = p.trace();
        let t2 = p.trace();
        assert_eq!(t1, t2);
    }

    #[test]
    fn square_of_minus_one_is_one() {
        let p = TorusPoint::new(vec![PI]);
        let sq = p.squared();
        assert!(sq.angles()[0].abs() < 1e-15);
    }

    #[test]
    fn square_of_cube_root() {
        let p = TorusPoint::new(vec![2.0 * PI / 3.0]);
        let sq = p.squared();
        assert!((sq.angles()[0] - (-2.0 * PI / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn identity_twist_preserves_measure() {
        let mu = TorusMeasure::atomic(vec![
            (TorusPoint::new(vec![0.4, -0.4]), 0.5),
            (TorusPoint::new(vec![1.0, -1.0]), 0.5),
        ]);
        let id = TorusMeasure::atomic(vec![(TorusPoint::new(vec![0.0]), 1.0)]);
        let out = twist_pushforward(&mu, &id).unwrap();
        let atoms = out.atoms().unwrap();
        assert_eq!(atoms.len(), 2);
        assert!((atoms[0].0.angles()[0] - (-0.4)).abs() < 1e-15);
    }

    #[test]
    fn mu3_twisted_by_pm1_gives_sixth_roots() {
        let third = 2.0 * PI / 3.0;
        let mu3 = TorusMeasure::atomic(vec![
            (TorusPoint::new(vec![0.0]), 1.0 / 3.0),
            (TorusPoint::new(vec![third]), 1.0 / 3.0),
            (TorusPoint::new(vec![-third]), 1.0 / 3.0),
        ]);
        let pm = TorusMeasure::atomic(vec![
            (TorusPoint::new(vec![0.0]), 0.5),
            (TorusPoint::new(vec![PI]), 0.5),
        ]);
        let out = twist_pushforward(&mu3, &pm).unwrap();
        let mut angles: Vec<f64> = out.atoms().unwrap().iter().map(|(p, _)| p.angles()[0]).collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected: Vec<f64> = vec![-third, -PI / 3.0, 0.0, PI / 3.0, third, PI];
        for (a, e) in angles.iter().zip(&expected) {
            assert!((a - e).abs() < 1e-12, "{a} vs {e}");
        }
        assert!((out.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn st_average_of_constant_sequence() {
        let atom = TorusMeasure::atomic(vec![(TorusPoint::new(vec![0.7]), 1.0)]);
        let ms: Vec<(u64, TorusMeasure)> = [2u64, 3, 5, 7].iter().map(|&p| (p, atom.clone())).collect();
        let x = 10.0;
        let st = st_average(&ms, x).unwrap();
        let expected_mass = (2.0f64.ln() + 3.0f64.ln() + 5.0f64.ln() + 7.0f64.ln()) / x;
        assert!((st.raw_mass - expected_mass).abs() < 1e-12);
        let tr = st.normalized.expect(|p| p.trace()).unwrap();
        assert!((tr.re - 0.7f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn st_average_rejects_duplicate_primes() {
        let atom = TorusMeasure::atomic(vec![(TorusPoint::new(vec![0.0]), 1.0)]);
        let ms = vec![(5u64, atom.clone()), (5u64, atom)];
        assert!(st_average(&ms, 100.0).is_err());
    }

    #[test]
    fn empirical_mass_counts_ramified_deficit() {
        let mu = TorusMeasure::empirical(vec![
            SpectralSample::Unramified(TorusPoint::new(vec![0.0])),
            SpectralSample::Unramified(TorusPoint::new(vec![1.0])),
            SpectralSample::Ramified { conductor_exponent: 1 },
            SpectralSample::Unramified(TorusPoint::new(vec![2.0])),
        ]);
        assert!((mu.total_mass() - 0.75).abs() < 1e-15);
    }
}

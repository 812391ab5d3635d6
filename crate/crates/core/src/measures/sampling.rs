//! Sampling eigenvalue tuples from a [`GroupSpec`].

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

use super::{GroupSpec, MeasureError, TorusPoint};
use crate::rmt;
use crate::util::rng_for_index;

/// Draws `count` Weyl-canonicalized eigenvalue tuples from the spec.
/// Deterministic in (spec, count, seed) and independent of worker count:
/// sample i uses the generator stream derived from (seed, i).
pub fn sample_group(spec: &GroupSpec, count: usize, seed: u64) -> Result<Vec<TorusPoint>, MeasureError> {
    if count < 1 {
        return Err(MeasureError::TooFewSamples(1));
    }
    if let GroupSpec::FiniteGroup(mats) = spec {
        validate_finite_group(mats)?;
    }
    (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for_index(seed, i);
            sample_one(spec, seed, i, &mut rng)
        })
        .collect()
}

fn sample_one(
    spec: &GroupSpec,
    seed: u64,
    index: u64,
    rng: &mut ChaCha8Rng,
) -> Result<TorusPoint, MeasureError> {
    match spec {
        GroupSpec::FiniteGroup(mats) => {
            let pick = rng.random_range(0..mats.len());
            let angles = rmt::unitary_eigenangles(&mats[pick])?;
            Ok(TorusPoint::new(angles))
        }
        GroupSpec::SU2Sym(k) => {
            let theta = sample_sine_squared(rng);
            let k = *k as i64;
            let angles = (0..=k).map(|j| (k - 2 * j) as f64 * theta).collect();
            Ok(TorusPoint::new(angles))
        }
        GroupSpec::FullCircle => Ok(TorusPoint::new(vec![rng.random_range(-PI..PI)])),
        GroupSpec::RootsOfUnity(m) => {
            let j = rng.random_range(0..*m);
            Ok(TorusPoint::new(vec![TAU * j as f64 / *m as f64]))
        }
        GroupSpec::ClassicalHaar(fam) => {
            let sample = rmt::sample_haar_indexed(*fam, seed, index)?;
            let angles = match fam {
                rmt::HaarFamily::Unitary(_) => rmt::eigen_angles(&sample)?,
                rmt::HaarFamily::SoOdd(_) => {
                    // full spectrum: paired ±θ plus the forced +1 eigenvalue
                    let half = rmt::eigen_angles(&sample)?;
                    let mut all = vec![0.0];
                    for t in half {
                        all.push(t);
                        all.push(-t);
                    }
                    all
                }
                _ => {
                    let half = rmt::eigen_angles(&sample)?;
                    let mut all = Vec::with_capacity(2 * half.len());
                    for t in half {
                        all.push(t);
                        all.push(-t);
                    }
                    all
                }
            };
            Ok(TorusPoint::new(angles))
        }
        GroupSpec::Tensor(a, b) => {
            let pa = sample_one(a, seed, index, rng)?;
            let pb = sample_one(b, seed, index, rng)?;
            Ok(pa.tensor(&pb))
        }
        GroupSpec::TwistBy { base, twistor } => {
            if twistor.rank() != 1 {
                return Err(MeasureError::TwistorRank(twistor.rank()));
            }
            let pb = sample_one(base, seed, index, rng)?;
            let tw = sample_one(twistor, seed, index, rng)?;
            Ok(pb.twisted_by(tw.angles()[0]))
        }
    }
}

/// θ in [0, π] with density (2/π)·sin²θ, by rejection from the uniform.
fn sample_sine_squared(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let t = rng.random_range(0.0..PI);
        let u: f64 = rng.random();
        if u <= t.sin() * t.sin() {
            return t;
        }
    }
}

pub(super) fn validate_finite_group(mats: &[DMatrix<Complex64>]) -> Result<(), MeasureError> {
    if mats.is_empty() {
        return Err(MeasureError::Empty);
    }
    if mats.len() > 1_000_000 {
        return Err(MeasureError::GroupTooLarge(mats.len()));
    }
    for m in mats {
        let defect = rmt::unitarity_defect(m);
        if defect > 1e-10 {
            return Err(MeasureError::NonUnitaryElement(defect));
        }
    }
    // product closure, checked at small order only
    if mats.len() <= 1000 {
        for a in mats {
            for b in mats {
                let p = a * b;
                if !mats.iter().any(|c| matrices_close(&p, c, 1e-8)) {
                    return Err(MeasureError::NotClosed);
                }
            }
        }
    }
    Ok(())
}

fn matrices_close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= tol)
}

/// The 2-dimensional dihedral group D₃ ⊂ U(2): identity, rotations by
/// ±2π/3, and three reflections. Handy as the exact-indicator oracle for
/// cubic-field statistics.
pub fn dihedral_d3() -> Vec<DMatrix<Complex64>> {
    let rot = |t: f64| {
        DMatrix::from_row_slice(2, 2, &[
            Complex64::new(t.cos(), 0.0),
            Complex64::new(-t.sin(), 0.0),
            Complex64::new(t.sin(), 0.0),
            Complex64::new(t.cos(), 0.0),
        ])
    };
    let refl = |t: f64| {
        DMatrix::from_row_slice(2, 2, &[
            Complex64::new(t.cos(), 0.0),
            Complex64::new(t.sin(), 0.0),
            Complex64::new(t.sin(), 0.0),
            Complex64::new(-t.cos(), 0.0),
        ])
    };
    let third = 2.0 * PI / 3.0;
    vec![rot(0.0), rot(third), rot(-third), refl(0.0), refl(third), refl(-third)]
}

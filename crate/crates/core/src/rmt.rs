//! Haar sampling from the classical compact groups and extraction of
//! scaled low-lying eigenangle statistics.
//!
//! Samplers follow the orthonormalization recipe: fill a matrix with
//! Gaussian entries, orthonormalize, and fix the residual diagonal phases
//! (signs in the real case) so the distribution is exactly Haar. Special
//! orthogonal samples of determinant −1 are translated into SO by negating
//! a fixed column, and compact symplectic matrices come from Gram–Schmidt
//! over the quaternions.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

use crate::util::rng_for_index;

#[derive(Debug, Error)]
pub enum RmtError {
    #[error("matrix dimension {0} too small for {1}")]
    DimensionTooSmall(usize, &'static str),
    #[error("dimension {0} has wrong parity for {1}")]
    BadParity(usize, &'static str),
    #[error("requested {requested} low angles but only {available} available")]
    TooManyAngles { requested: usize, available: usize },
    #[error("eigenvalue extraction failed: {0}")]
    EigenFailure(String),
}

/// One of the four classical compact families, tagged with its matrix
/// dimension (so `SoOdd(21)` is SO(21) and `USp(20)` is USp(20)).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HaarFamily {
    Unitary(usize),
    SoEven(usize),
    SoOdd(usize),
    USp(usize),
}

impl HaarFamily {
    pub fn dim(&self) -> usize {
        match *self {
            HaarFamily::Unitary(n) | HaarFamily::SoEven(n) | HaarFamily::SoOdd(n) | HaarFamily::USp(n) => n,
        }
    }

    fn validate(&self) -> Result<(), RmtError> {
        match *self {
            HaarFamily::Unitary(n) => {
                if n < 2 {
                    return Err(RmtError::DimensionTooSmall(n, "U(N)"));
                }
            }
            HaarFamily::SoEven(n) => {
                if n % 2 != 0 {
                    return Err(RmtError::BadParity(n, "SO(even)"));
                }
                if n < 4 {
                    return Err(RmtError::DimensionTooSmall(n, "SO(even)"));
                }
            }
            HaarFamily::SoOdd(n) => {
                if n % 2 != 1 {
                    return Err(RmtError::BadParity(n, "SO(odd)"));
                }
                if n < 3 {
                    return Err(RmtError::DimensionTooSmall(n, "SO(odd)"));
                }
            }
            HaarFamily::USp(n) => {
                if n % 2 != 0 {
                    return Err(RmtError::BadParity(n, "USp"));
                }
                if n < 2 {
                    return Err(RmtError::DimensionTooSmall(n, "USp"));
                }
            }
        }
        Ok(())
    }

    /// Mean-spacing scaling constant dim/(2π).
    pub fn scaling_constant(&self) -> f64 {
        self.dim() as f64 / TAU
    }
}

#[derive(Clone, Debug)]
pub struct HaarSample {
    pub family: HaarFamily,
    pub matrix: DMatrix<Complex64>,
    pub seed_tag: u64,
}

/// Scaled low-lying eigenangles, sorted ascending.
#[derive(Clone, Debug)]
pub struct ScaledAngles {
    pub values: Vec<f64>,
    pub scaling_constant: f64,
    pub removed_forced_eigenvalue: bool,
}

pub fn sample_haar(family: HaarFamily, seed: u64) -> Result<HaarSample, RmtError> {
    sample_haar_indexed(family, seed, 0)
}

/// Sample number `index` of the stream owned by `seed`; used by the batch
/// samplers so that results are independent of worker count.
pub fn sample_haar_indexed(family: HaarFamily, seed: u64, index: u64) -> Result<HaarSample, RmtError> {
    family.validate()?;
    let mut rng = rng_for_index(seed, index);
    let n = family.dim();
    let matrix = match family {
        HaarFamily::Unitary(_) => {
            let g = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            });
            let qr = g.qr();
            let r = qr.r();
            let mut q = qr.q();
            for j in 0..n {
                let d = r[(j, j)];
                let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
                for i in 0..n {
                    q[(i, j)] *= phase;
                }
            }
            q
        }
        HaarFamily::SoEven(_) | HaarFamily::SoOdd(_) => {
            let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
            let qr = g.qr();
            let r = qr.r();
            let mut q = qr.q();
            for j in 0..n {
                if r[(j, j)] < 0.0 {
                    for i in 0..n {
                        q[(i, j)] = -q[(i, j)];
                    }
                }
            }
            if q.determinant() < 0.0 {
                for i in 0..n {
                    q[(i, 0)] = -q[(i, 0)];
                }
            }
            q.map(|x| Complex64::new(x, 0.0))
        }
        HaarFamily::USp(_) => sample_usp(n / 2, &mut rng),
    };
    Ok(HaarSample { family, matrix, seed_tag: seed ^ index })
}

// --- quaternion arithmetic (a + b·j acting on ℂ² from the left) ---

#[derive(Clone, Copy, Debug)]
struct Quat {
    a: Complex64,
    b: Complex64,
}

impl Quat {
    fn zero() -> Self {
        Quat { a: Complex64::new(0.0, 0.0), b: Complex64::new(0.0, 0.0) }
    }

    fn mul(self, o: Quat) -> Quat {
        // (a1 + b1 j)(a2 + b2 j) with j z = conj(z) j and j² = −1
        Quat {
            a: self.a * o.a - self.b * o.b.conj(),
            b: self.a * o.b + self.b * o.a.conj(),
        }
    }

    fn conj(self) -> Quat {
        Quat { a: self.a.conj(), b: -self.b }
    }

    fn norm_sqr(self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    fn scale(self, s: f64) -> Quat {
        Quat { a: self.a * s, b: self.b * s }
    }

    fn sub(self, o: Quat) -> Quat {
        Quat { a: self.a - o.a, b: self.b - o.b }
    }
}

/// Haar sample from USp(2n) via quaternionic Gram–Schmidt; the positive
/// real normalization of the diagonal makes the factorization unique, so
/// the left-invariance of the Gaussian ensemble descends to Haar measure.
fn sample_usp(n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let mut cols: Vec<Vec<Quat>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let g = |r: &mut dyn FnMut() -> f64| Complex64::new(r(), r());
                    let mut draw = || rng.sample::<f64, _>(StandardNormal) * 0.5;
                    Quat { a: g(&mut draw), b: g(&mut draw) }
                })
                .collect()
        })
        .collect();

    // modified Gram–Schmidt, two passes for orthogonality at large n
    for k in 0..n {
        for _pass in 0..2 {
            for j in 0..k {
                let mut proj = Quat::zero();
                for i in 0..n {
                    proj = Quat::mul(cols[j][i].conj(), cols[k][i]).addq(proj);
                }
                for i in 0..n {
                    let s = Quat::mul(cols[j][i], proj);
                    cols[k][i] = cols[k][i].sub(s);
                }
            }
        }
        let norm: f64 = cols[k].iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            cols[k][i] = cols[k][i].scale(1.0 / norm);
        }
    }

    let mut m = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for (k, col) in cols.iter().enumerate() {
        for (i, q) in col.iter().enumerate() {
            m[(2 * i, 2 * k)] = q.a;
            m[(2 * i, 2 * k + 1)] = q.b;
            m[(2 * i + 1, 2 * k)] = -q.b.conj();
            m[(2 * i + 1, 2 * k + 1)] = q.a.conj();
        }
    }
    m
}

impl Quat {
    fn addq(self, o: Quat) -> Quat {
        Quat { a: self.a + o.a, b: self.b + o.b }
    }
}

/// Eigenangles of a unitary matrix, signed in (−π, π].
///
/// Works through the Hermitian part H = (U+U†)/2: eigenvectors of H are
/// eigenvectors of U away from cos-degeneracies, and the eigenvalue of U is
/// recovered as the Rayleigh quotient v†Uv. Cos-degenerate clusters (a pair
/// e^{±iθ} in the same sample) are resolved by diagonalizing the small
/// restricted block exactly.
pub fn unitary_eigenangles(u: &DMatrix<Complex64>) -> Result<Vec<f64>, RmtError> {
    let n = u.nrows();
    let h = (u + u.adjoint()).map(|z| z * 0.5);
    let se = nalgebra::SymmetricEigen::new(h);
    let vecs = se.eigenvectors;
    let mut angles = Vec::with_capacity(n);
    let mut suspect: Vec<usize> = Vec::new();
    let mut rayleigh = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        let v = vecs.column(j);
        let uv = u * v;
        let lam: Complex64 = v.iter().zip(uv.iter()).map(|(a, b)| a.conj() * b).sum();
        rayleigh[j] = lam;
        if (lam.norm() - 1.0).abs() < 1e-7 {
            angles.push(lam.arg());
        } else {
            suspect.push(j);
            angles.push(f64::NAN);
        }
    }
    if !suspect.is_empty() {
        // group suspects by near-equal cos and re-diagonalize each block
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut sorted = suspect.clone();
        sorted.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
        for idx in sorted {
            match groups.last_mut() {
                Some(g) if (se.eigenvalues[*g.last().unwrap()] - se.eigenvalues[idx]).abs() < 1e-5 => {
                    g.push(idx)
                }
                _ => groups.push(vec![idx]),
            }
        }
        for g in groups {
            if g.len() == 2 {
                let (i, j) = (g[0], g[1]);
                let tr = rayleigh[i] + rayleigh[j];
                let vi = vecs.column(i);
                let vj = vecs.column(j);
                let uvj = u * vj;
                let uvi = u * vi;
                let m01: Complex64 = vi.iter().zip(uvj.iter()).map(|(a, b)| a.conj() * b).sum();
                let m10: Complex64 = vj.iter().zip(uvi.iter()).map(|(a, b)| a.conj() * b).sum();
                let det = rayleigh[i] * rayleigh[j] - m01 * m10;
                let disc = (tr * tr - det * 4.0).sqrt();
                let l1 = (tr + disc) * 0.5;
                let l2 = (tr - disc) * 0.5;
                for (slot, lam) in [(i, l1), (j, l2)] {
                    if (lam.norm() - 1.0).abs() > 1e-6 {
                        return Err(RmtError::EigenFailure(format!(
                            "restricted block eigenvalue off circle: |λ|−1 = {:e}",
                            lam.norm() - 1.0
                        )));
                    }
                    angles[slot] = lam.arg();
                }
            } else {
                return Err(RmtError::EigenFailure(format!(
                    "cos-degenerate cluster of size {} (condition report: eigenvalue spread {:e})",
                    g.len(),
                    g.iter()
                        .map(|&i| se.eigenvalues[i])
                        .fold((f64::MAX, f64::MIN), |(lo, hi), x| (lo.min(x), hi.max(x)))
                        .1
                )));
            }
        }
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(angles)
}

/// Nonnegative angle representatives of a paired (SO/USp) spectrum.
///
/// Eigen-cosines are computed from the Hermitian part, snapped to ±1 within
/// 1e-10 in cos (≈1e-5 in angle, far below sampling noise), the forced +1
/// eigenvalue of SO(odd) removed once, and the rest paired off.
fn paired_angles(sample: &HaarSample) -> Result<Vec<f64>, RmtError> {
    let u = &sample.matrix;
    let h = (u + u.adjoint()).map(|z| z * 0.5);
    let se = nalgebra::SymmetricEigen::new(h);
    let mut cos: Vec<f64> = se.eigenvalues.iter().copied().collect();
    cos.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if let HaarFamily::SoOdd(_) = sample.family {
        if (cos[0] - 1.0).abs() > 1e-10 {
            return Err(RmtError::EigenFailure(format!(
                "SO(odd) sample lacks the forced +1 eigenvalue: max cos = {}",
                cos[0]
            )));
        }
        cos.remove(0);
    }
    if cos.len() % 2 != 0 {
        return Err(RmtError::EigenFailure("odd count after forced-eigenvalue removal".into()));
    }
    let mut out = Vec::with_capacity(cos.len() / 2);
    for pair in cos.chunks(2) {
        if (pair[0] - pair[1]).abs() > 1e-6 {
            return Err(RmtError::EigenFailure(format!(
                "unpaired eigen-cosines {} vs {}",
                pair[0], pair[1]
            )));
        }
        let c = 0.5 * (pair[0] + pair[1]);
        let theta = if (c - 1.0).abs() <= 1e-10 {
            0.0
        } else if (c + 1.0).abs() <= 1e-10 {
            PI
        } else {
            c.clamp(-1.0, 1.0).acos()
        };
        out.push(theta);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// Eigenangles per family convention: SO/USp give the half-spectrum in
/// [0, π] (the forced zero angle of SO(odd) removed); Unitary gives the full
/// signed spectrum in (−π, π].
pub fn eigen_angles(sample: &HaarSample) -> Result<Vec<f64>, RmtError> {
    match sample.family {
        HaarFamily::Unitary(_) => unitary_eigenangles(&sample.matrix),
        _ => paired_angles(sample),
    }
}

/// The k smallest nonnegative eigenangles scaled by dim/(2π).
pub fn scaled_low_angles(sample: &HaarSample, k: usize) -> Result<ScaledAngles, RmtError> {
    let c = sample.family.scaling_constant();
    let (mut nonneg, removed) = match sample.family {
        HaarFamily::Unitary(_) => {
            let signed = unitary_eigenangles(&sample.matrix)?;
            (signed.into_iter().filter(|&t| t >= 0.0).collect::<Vec<_>>(), false)
        }
        HaarFamily::SoOdd(_) => (paired_angles(sample)?, true),
        _ => (paired_angles(sample)?, false),
    };
    if k > nonneg.len() {
        return Err(RmtError::TooManyAngles { requested: k, available: nonneg.len() });
    }
    nonneg.truncate(k);
    let values = nonneg.into_iter().map(|t| t * c).collect();
    Ok(ScaledAngles { values, scaling_constant: c, removed_forced_eigenvalue: removed })
}

/// Full scaled spectrum as signed ordinates, the form consumed by the
/// one-level density comparisons. SO/USp spectra are ± symmetric so the
/// half-spectrum is mirrored; zero angles (the SO(odd) forced eigenvalue is
/// already removed) appear once.
pub fn scaled_signed_angles(sample: &HaarSample) -> Result<Vec<f64>, RmtError> {
    let c = sample.family.scaling_constant();
    let mut out = Vec::new();
    match sample.family {
        HaarFamily::Unitary(_) => {
            for t in unitary_eigenangles(&sample.matrix)? {
                out.push(t * c);
            }
        }
        _ => {
            for t in paired_angles(sample)? {
                if t == 0.0 {
                    out.push(0.0);
                } else {
                    out.push(-t * c);
                    out.push(t * c);
                }
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(out)
}

/// Batch of samples, parallel over sample index, deterministic in `seed`.
pub fn sample_batch(family: HaarFamily, count: usize, seed: u64) -> Result<Vec<HaarSample>, RmtError> {
    use rayon::prelude::*;
    (0..count as u64)
        .into_par_iter()
        .map(|i| sample_haar_indexed(family, seed, i))
        .collect()
}

/// Max deviation from unitarity, ‖g†g − I‖∞.
pub fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let p = m.adjoint() * m;
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            worst = worst.max((p[(i, j)] - target).norm());
        }
    }
    worst
}

/// Max deviation from the symplectic relation g·J·gᵀ = J, with J the
/// block-diagonal [[0,1],[−1,0]] form.
pub fn symplectic_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut j = DMatrix::<Complex64>::zeros(n, n);
    for b in 0..n / 2 {
        j[(2 * b, 2 * b + 1)] = Complex64::new(1.0, 0.0);
        j[(2 * b + 1, 2 * b)] = Complex64::new(-1.0, 0.0);
    }
    let lhs = m * &j * m.transpose();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            worst = worst.max((lhs[(r, c)] - j[(r, c)]).norm());
        }
    }
    worst
}

//! Local conductors and L-factors of explicit Weil–Deligne data, plus
//! builders from elliptic-curve reduction types.
//!
//! A representation is carried as concrete matrix data: the Frobenius Φ,
//! the nilpotent N with Φ·N·Φ⁻¹ = q⁻¹·N (geometric-Frobenius convention,
//! pinned here once), a projection onto the inertia invariants, and the
//! upper-numbering fixed-dimension step function as break pairs (u, d)
//! with d non-decreasing to n. The step value holds on [u_i, u_{i+1}),
//! so a tame representation lists all its breaks at u = 0.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dirichlet::legendre_euler;
use crate::elliptic::{ap_single, ShortWeierstrassCurve};

#[derive(Debug, Error)]
pub enum WdError {
    #[error("step function malformed: {0}")]
    BadBreaks(String),
    #[error("nilpotency fails: ‖N^n‖ = {0:e}")]
    NotNilpotent(f64),
    #[error("twist relation ΦNΦ⁻¹ = q⁻¹N fails by {0:e}")]
    TwistRelation(f64),
    #[error("inertia projection is not idempotent (defect {0:e})")]
    BadProjection(f64),
    #[error("Frobenius is singular")]
    SingularFrobenius,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("builder needs p > 3, got {0}")]
    SmallPrime(u64),
    #[error(transparent)]
    Elliptic(#[from] crate::elliptic::EllipticError),
    #[error("serialization: {0}")]
    Serde(String),
}

#[derive(Clone, Debug)]
pub struct WeilDeligneRep {
    pub n: usize,
    pub q: u64,
    pub frobenius: DMatrix<Complex64>,
    /// (u_i, dim V^{I^u} on [u_i, u_{i+1})), u₀ = 0, last dim = n.
    pub breaks: Vec<(f64, usize)>,
    pub inertia_projection: DMatrix<Complex64>,
    pub nilpotent: DMatrix<Complex64>,
}

fn mat_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl WeilDeligneRep {
    pub fn validate(&self) -> Result<(), WdError> {
        let n = self.n;
        if self.frobenius.nrows() != n || self.inertia_projection.nrows() != n || self.nilpotent.nrows() != n {
            return Err(WdError::DimensionMismatch);
        }
        // N^n = 0
        let mut power = self.nilpotent.clone();
        for _ in 1..n {
            power = &power * &self.nilpotent;
        }
        let npow = mat_norm(&power);
        if npow > 1e-8 {
            return Err(WdError::NotNilpotent(npow));
        }
        // Φ N Φ⁻¹ = q⁻¹ N
        let inv = self.frobenius.clone().try_inverse().ok_or(WdError::SingularFrobenius)?;
        let lhs = &self.frobenius * &self.nilpotent * inv;
        let rhs = self.nilpotent.map(|z| z / self.q as f64);
        let defect = mat_norm(&(lhs - rhs));
        if defect > 1e-8 * (1.0 + mat_norm(&self.nilpotent)) {
            return Err(WdError::TwistRelation(defect));
        }
        // projection idempotent
        let p2 = &self.inertia_projection * &self.inertia_projection;
        let pd = mat_norm(&(p2 - &self.inertia_projection));
        if pd > 1e-8 {
            return Err(WdError::BadProjection(pd));
        }
        // breaks: u₀ = 0, u and d non-decreasing, final d = n
        if self.breaks.is_empty() {
            return Err(WdError::BadBreaks("empty".into()));
        }
        if self.breaks[0].0 != 0.0 {
            return Err(WdError::BadBreaks("first break must sit at u = 0".into()));
        }
        for w in self.breaks.windows(2) {
            if w[1].0 < w[0].0 || w[1].1 < w[0].1 {
                return Err(WdError::BadBreaks("breaks must be non-decreasing".into()));
            }
        }
        if self.breaks.last().unwrap().1 != n {
            return Err(WdError::BadBreaks("final dimension must equal n".into()));
        }
        Ok(())
    }

    /// dim V^I, the step value just above 0.
    pub fn inertia_fixed_dim(&self) -> usize {
        self.breaks[0].1
    }
}

/// Orthonormal basis of V^I ∩ ker N, by the null space of the stacked
/// constraints (P − I; N).
fn invariant_kernel_basis(rep: &WeilDeligneRep) -> DMatrix<Complex64> {
    let n = rep.n;
    let mut stacked = DMatrix::<Complex64>::zeros(2 * n, n);
    let pmi = &rep.inertia_projection - DMatrix::<Complex64>::identity(n, n);
    stacked.view_mut((0, 0), (n, n)).copy_from(&pmi);
    stacked.view_mut((n, 0), (n, n)).copy_from(&rep.nilpotent);
    let svd = stacked.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let mut cols: Vec<usize> = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s < 1e-8 {
            cols.push(i);
        }
    }
    // rows of vt beyond the rank also span the null space
    for i in svd.singular_values.len()..n {
        cols.push(i);
    }
    let mut basis = DMatrix::<Complex64>::zeros(n, cols.len());
    for (j, &i) in cols.iter().enumerate() {
        for k in 0..n {
            basis[(k, j)] = vt[(i, k)].conj();
        }
    }
    basis
}

/// Artin conductor f(V) = dim(V / V^I ∩ ker N) + ∫₀^∞ dim(V / V^{I^u}) du:
/// the tame term from the matrix data, the Swan term from the break
/// intervals, Σ (n − d_i)(u_{i+1} − u_i).
pub fn artin_conductor(rep: &WeilDeligneRep) -> Result<f64, WdError> {
    rep.validate()?;
    let fixed = invariant_kernel_basis(rep).ncols();
    let tame = (rep.n - fixed) as f64;
    let mut swan = 0.0;
    for w in rep.breaks.windows(2) {
        swan += (rep.n - w[0].1) as f64 * (w[1].0 - w[0].0);
    }
    Ok(tame + swan)
}

/// P(T) = det(1 − Φ·T | V^I ∩ ker N), so the local L-factor is
/// 1/P(q^{−s}). Coefficients within 1e-6 of an integer are snapped.
pub fn local_l_factor(rep: &WeilDeligneRep) -> Result<Vec<Complex64>, WdError> {
    rep.validate()?;
    let basis = invariant_kernel_basis(rep);
    let k = basis.ncols();
    if k == 0 {
        return Ok(vec![Complex64::new(1.0, 0.0)]);
    }
    let restricted = basis.adjoint() * &rep.frobenius * &basis;
    // det(1 − MT) by Newton's identities on power traces
    let mut powers = Vec::with_capacity(k);
    let mut cur = restricted.clone();
    for _ in 0..k {
        powers.push((0..k).map(|i| cur[(i, i)]).sum::<Complex64>());
        cur = &cur * &restricted;
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); k + 1];
    coeffs[0] = Complex64::new(1.0, 0.0);
    for j in 1..=k {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 1..=j {
            acc += powers[i - 1] * coeffs[j - i];
        }
        coeffs[j] = -acc / j as f64;
    }
    for c in coeffs.iter_mut() {
        let snap = |x: f64| if (x - x.round()).abs() < 1e-6 { x.round() } else { x };
        *c = Complex64::new(snap(c.re), snap(c.im));
    }
    Ok(coeffs)
}

/// Block direct sum; the step function of the sum is the sum of step
/// functions, realized on the merged break points.
pub fn direct_sum(a: &WeilDeligneRep, b: &WeilDeligneRep) -> Result<WeilDeligneRep, WdError> {
    if a.q != b.q {
        return Err(WdError::DimensionMismatch);
    }
    let n = a.n + b.n;
    let block = |ma: &DMatrix<Complex64>, mb: &DMatrix<Complex64>| {
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        m.view_mut((0, 0), (a.n, a.n)).copy_from(ma);
        m.view_mut((a.n, a.n), (b.n, b.n)).copy_from(mb);
        m
    };
    let mut us: Vec<f64> = a.breaks.iter().chain(b.breaks.iter()).map(|&(u, _)| u).collect();
    us.sort_by(|x, y| x.partial_cmp(y).unwrap());
    us.dedup();
    let dim_at = |breaks: &[(f64, usize)], u: f64| {
        breaks.iter().rev().find(|&&(ui, _)| ui <= u + 1e-12).map(|&(_, d)| d).unwrap_or(breaks[0].1)
    };
    let breaks = us
        .into_iter()
        .map(|u| (u, dim_at(&a.breaks, u) + dim_at(&b.breaks, u)))
        .collect();
    Ok(WeilDeligneRep {
        n,
        q: a.q,
        frobenius: block(&a.frobenius, &b.frobenius),
        breaks,
        inertia_projection: block(&a.inertia_projection, &b.inertia_projection),
        nilpotent: block(&a.nilpotent, &b.nilpotent),
    })
}

/// Reduction type of a short Weierstrass curve at p > 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionType {
    Good,
    MultiplicativeSplit,
    MultiplicativeNonsplit,
    AdditiveTame,
}

pub fn classify_reduction(curve: &ShortWeierstrassCurve, p: u64) -> Result<ReductionType, WdError> {
    if p <= 3 {
        return Err(WdError::SmallPrime(p));
    }
    let pi = p as i128;
    let disc = curve.disc_poly().rem_euclid(pi);
    if disc != 0 {
        return Ok(ReductionType::Good);
    }
    // c₄ = −48a; a node iff p ∤ c₄
    let a = (curve.a as i128).rem_euclid(pi);
    if (48 * a).rem_euclid(pi) == 0 {
        return Ok(ReductionType::AdditiveTame);
    }
    // node at e = −3b/(2a); tangent slopes lie in 𝔽_p iff 3e = −9b/(2a)
    // is a square, equivalently χ(−2ab) = 1
    let b = (curve.b as i128).rem_euclid(pi);
    let t = (-2 * a * b).rem_euclid(pi);
    if legendre_euler(t as i64, p) == 1 {
        Ok(ReductionType::MultiplicativeSplit)
    } else {
        Ok(ReductionType::MultiplicativeNonsplit)
    }
}

/// The Weil–Deligne representation attached to the reduction of a curve
/// at p > 3: good reduction gives the unramified rank-2 rep with
/// tr Φ = a_p and det Φ = p; multiplicative reduction the (possibly
/// quadratic-twisted) Steinberg; additive reduction the tame
/// inertia-fixed-point-free shape of conductor 2.
pub fn from_elliptic_reduction(
    curve: &ShortWeierstrassCurve,
    p: u64,
) -> Result<WeilDeligneRep, WdError> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let id = DMatrix::<Complex64>::identity(2, 2);
    let zero = DMatrix::<Complex64>::zeros(2, 2);
    let rep = match classify_reduction(curve, p)? {
        ReductionType::Good => {
            let ap = ap_single(curve, p)?;
            WeilDeligneRep {
                n: 2,
                q: p,
                frobenius: DMatrix::from_row_slice(2, 2, &[c(ap as f64), c(-(p as f64)), c(1.0), c(0.0)]),
                breaks: vec![(0.0, 2)],
                inertia_projection: id,
                nilpotent: zero,
            }
        }
        kind @ (ReductionType::MultiplicativeSplit | ReductionType::MultiplicativeNonsplit) => {
            let alpha = if kind == ReductionType::MultiplicativeSplit { 1.0 } else { -1.0 };
            WeilDeligneRep {
                n: 2,
                q: p,
                frobenius: DMatrix::from_row_slice(2, 2, &[c(alpha), c(0.0), c(0.0), c(alpha * p as f64)]),
                breaks: vec![(0.0, 2)],
                inertia_projection: id,
                nilpotent: DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]),
            }
        }
        ReductionType::AdditiveTame => WeilDeligneRep {
            n: 2,
            q: p,
            frobenius: DMatrix::from_row_slice(2, 2, &[c(0.0), c(-(p as f64)), c(1.0), c(0.0)]),
            breaks: vec![(0.0, 0), (0.0, 2)],
            inertia_projection: zero,
            nilpotent: DMatrix::zeros(2, 2),
        },
    };
    rep.validate()?;
    Ok(rep)
}

// --- JSON schema (wd-v1) ---

#[derive(Serialize, Deserialize)]
struct WdJson {
    version: String,
    n: usize,
    q: u64,
    frobenius: Vec<[f64; 2]>,
    breaks: Vec<(f64, usize)>,
    inertia_projection: Vec<[f64; 2]>,
    #[serde(rename = "N")]
    nilpotent: Vec<[f64; 2]>,
}

fn mat_to_list(m: &DMatrix<Complex64>) -> Vec<[f64; 2]> {
    let n = m.nrows();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push([m[(i, j)].re, m[(i, j)].im]);
        }
    }
    out
}

fn list_to_mat(v: &[[f64; 2]], n: usize) -> Result<DMatrix<Complex64>, WdError> {
    if v.len() != n * n {
        return Err(WdError::DimensionMismatch);
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let e = v[i * n + j];
        Complex64::new(e[0], e[1])
    }))
}

pub fn to_json(rep: &WeilDeligneRep) -> String {
    let j = WdJson {
        version: "wd-v1".into(),
        n: rep.n,
        q: rep.q,
        frobenius: mat_to_list(&rep.frobenius),
        breaks: rep.breaks.clone(),
        inertia_projection: mat_to_list(&rep.inertia_projection),
        nilpotent: mat_to_list(&rep.nilpotent),
    };
    serde_json::to_string_pretty(&j).expect("serializable")
}

pub fn from_json(s: &str) -> Result<WeilDeligneRep, WdError> {
    let j: WdJson = serde_json::from_str(s).map_err(|e| WdError::Serde(e.to_string()))?;
    if j.version != "wd-v1" {
        return Err(WdError::Serde(format!("unsupported version {}", j.version)));
    }
    let rep = WeilDeligneRep {
        n: j.n,
        q: j.q,
        frobenius: list_to_mat(&j.frobenius, j.n)?,
        breaks: j.breaks,
        inertia_projection: list_to_mat(&j.inertia_projection, j.n)?,
        nilpotent: list_to_mat(&j.nilpotent, j.n)?,
    };
    rep.validate()?;
    Ok(rep)
}

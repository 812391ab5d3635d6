//! The generic statistical layer: per-prime vertical averages t̂(p^k)
//! from coefficient data, log-weighted indicator sums, rank sums, and the
//! family report that names a symmetry type.
//!
//! Indicator sums consume prime-power POWER SUMS a(p^k) = Σ_i α_i^k (the
//! coefficients of −L'/L), not Dirichlet-series coefficients: with power
//! sums the vertical second-moment sum converges to the Frobenius–Schur
//! indicator, which is the identity these statistics are built on. A
//! snapshot tagged with the Dirichlet convention is rejected by the
//! indicator operations.

pub mod presets;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

use crate::measures::{decompose_indicators, IndicatorTriple, MassDecomposition};
use crate::util::primes::primes_up_to;
use crate::util::sum::{pairwise_sum, pairwise_sum_c};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("snapshot carries Dirichlet-series coefficients; indicator sums need power sums")]
    WrongConvention,
    #[error("prime {0} missing from the vertical series")]
    MissingPrime(u64),
    #[error("empty family window")]
    EmptyFamily,
    #[error("coefficient accessor range exceeded at n = {0}^{1}")]
    AccessorRange(u64, u32),
    #[error(transparent)]
    Measures(#[from] crate::measures::MeasureError),
}

/// Coefficient convention carried by a snapshot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffConvention {
    /// a(p^k) = Σ_i α_i^k — what the indicator sums require.
    PowerSum,
    /// Dirichlet-series coefficients λ(p^k); carried for completeness,
    /// rejected by indicator operations.
    Dirichlet,
}

/// Per-member local data: analytically normalized prime-power
/// coefficients, or None at ramified places (the trivial local factor
/// contributes a zero coefficient, and the member is tallied into the
/// skip fraction).
pub trait LocalCoefficients: Send + Sync {
    fn a(&self, p: u64, k: u32) -> Option<Complex64>;
    fn max_prime(&self) -> u64 {
        u64::MAX
    }
}

pub struct FamilyMember {
    pub conductor_gauge: f64,
    pub coeffs: Arc<dyn LocalCoefficients>,
}

/// A finite family window ordered by conductor gauge.
pub struct FamilySnapshot {
    pub family_id: String,
    pub cutoff: f64,
    pub members: Vec<FamilyMember>,
    pub convention: CoeffConvention,
}

impl FamilySnapshot {
    pub fn sorted_check(&self) -> bool {
        self.members.windows(2).all(|w| w[0].conductor_gauge <= w[1].conductor_gauge)
            && self.members.iter().all(|m| m.conductor_gauge < self.cutoff)
    }
}

/// A vertical average with its bookkeeping.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct THat {
    pub value_re: f64,
    pub value_im: f64,
    pub stderr: f64,
    pub skip_fraction: f64,
}

/// Mean of a(p^k) over the window: ramified members contribute zero and
/// are reported through the skip fraction.
pub fn t_hat(snapshot: &FamilySnapshot, p: u64, k: u32) -> Result<THat, StatsError> {
    if snapshot.members.is_empty() {
        return Err(StatsError::EmptyFamily);
    }
    for m in &snapshot.members {
        if p > m.coeffs.max_prime() {
            return Err(StatsError::AccessorRange(p, k));
        }
    }
    let mut vals = Vec::with_capacity(snapshot.members.len());
    let mut skipped = 0usize;
    for m in &snapshot.members {
        match m.coeffs.a(p, k) {
            Some(v) => vals.push(v),
            None => {
                vals.push(Complex64::new(0.0, 0.0));
                skipped += 1;
            }
        }
    }
    let n = vals.len() as f64;
    let mean = pairwise_sum_c(&vals) / n;
    let dev: Vec<f64> = vals.iter().map(|v| (v - mean).norm_sqr()).collect();
    let se = (pairwise_sum(&dev) / (n - 1.0).max(1.0) / n).sqrt();
    Ok(THat { value_re: mean.re, value_im: mean.im, stderr: se, skip_fraction: skipped as f64 / n })
}

/// Per-prime vertical data: t̂(p), t̂(p²), mean |a(p)|² and the skip
/// fractions, plus the rank-sum track −t̂(p)·√p (which geometric presets
/// fill with the full-fiber Nagao average so rank sums agree with the
/// sweep identity).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerticalSeries {
    pub family_id: String,
    pub primes: Vec<u64>,
    pub t1: Vec<Complex64>,
    pub t2: Vec<Complex64>,
    pub abs2: Vec<f64>,
    /// per-prime mean of a(p)² (complex in general; distinct from t2,
    /// which holds the power sums a(p²))
    pub sq: Vec<Complex64>,
    pub skip: Vec<f64>,
    /// −t̂(p)·√p per prime, the rank-sum integrand before log weighting.
    pub rank_track: Vec<f64>,
    pub convention: CoeffConvention,
}

impl VerticalSeries {
    fn check_complete(&self, x: u64) -> Result<(), StatsError> {
        let needed = primes_up_to(x.saturating_sub(1));
        let have: std::collections::HashSet<u64> = self.primes.iter().copied().collect();
        let p_min = self.primes.first().copied().unwrap_or(2);
        for p in needed.into_iter().filter(|&p| p >= p_min) {
            if !have.contains(&p) {
                return Err(StatsError::MissingPrime(p));
            }
        }
        Ok(())
    }

    fn require_power_sums(&self) -> Result<(), StatsError> {
        if self.convention != CoeffConvention::PowerSum {
            return Err(StatsError::WrongConvention);
        }
        Ok(())
    }
}

/// Builds the vertical series of a member-backed snapshot over the primes
/// p_min ≤ p < x.
pub fn build_vertical_series(
    snapshot: &FamilySnapshot,
    p_min: u64,
    x: u64,
) -> Result<VerticalSeries, StatsError> {
    let primes: Vec<u64> = primes_up_to(x - 1).into_iter().filter(|&p| p >= p_min).collect();
    let mut t1 = Vec::with_capacity(primes.len());
    let mut t2 = Vec::with_capacity(primes.len());
    let mut abs2 = Vec::with_capacity(primes.len());
    let mut sq = Vec::with_capacity(primes.len());
    let mut skip = Vec::with_capacity(primes.len());
    let mut rank_track = Vec::with_capacity(primes.len());
    for &p in &primes {
        let h1 = t_hat(snapshot, p, 1)?;
        let h2 = t_hat(snapshot, p, 2)?;
        let v1 = Complex64::new(h1.value_re, h1.value_im);
        t1.push(v1);
        t2.push(Complex64::new(h2.value_re, h2.value_im));
        let sqv: Vec<f64> = snapshot
            .members
            .iter()
            .map(|m| m.coeffs.a(p, 1).map(|v| v.norm_sqr()).unwrap_or(0.0))
            .collect();
        abs2.push(pairwise_sum(&sqv) / sqv.len() as f64);
        let sq_vals: Vec<Complex64> = snapshot
            .members
            .iter()
            .map(|m| m.coeffs.a(p, 1).map(|v| v * v).unwrap_or(Complex64::new(0.0, 0.0)))
            .collect();
        sq.push(pairwise_sum_c(&sq_vals) / sq_vals.len() as f64);
        skip.push(h1.skip_fraction);
        rank_track.push(-v1.re * (p as f64).sqrt());
    }
    Ok(VerticalSeries {
        family_id: snapshot.family_id.clone(),
        primes,
        t1,
        t2,
        abs2,
        sq,
        skip,
        rank_track,
        convention: snapshot.convention,
    })
}

/// (1/x) Σ_{p<x} t̂(p²) log p — the vertical route to the Frobenius–Schur
/// indicator i₃. Partial sums along the prime list are returned with it.
pub fn i3_sum(series: &VerticalSeries, x: u64) -> Result<(f64, Vec<(u64, f64)>), StatsError> {
    series.require_power_sums()?;
    series.check_complete(x)?;
    let terms: Vec<f64> = series
        .primes
        .iter()
        .zip(series.t2.iter())
        .filter(|(p, _)| **p < x)
        .map(|(p, t)| t.re * (*p as f64).ln())
        .collect();
    let mut partials = Vec::with_capacity(terms.len());
    let mut run = 0.0;
    for (i, (&p, _)) in series.primes.iter().zip(series.t2.iter()).enumerate().take(terms.len()) {
        run += terms[i];
        partials.push((p, run / p as f64));
    }
    Ok((pairwise_sum(&terms) / x as f64, partials))
}

/// (1/x) Σ_{p<x} t̂(p) log p; zero for essentially cuspidal families.
pub fn first_moment_sum(series: &VerticalSeries, x: u64) -> Result<f64, StatsError> {
    series.require_power_sums()?;
    series.check_complete(x)?;
    let terms: Vec<f64> = series
        .primes
        .iter()
        .zip(series.t1.iter())
        .filter(|(p, _)| **p < x)
        .map(|(p, t)| t.re * (*p as f64).ln())
        .collect();
    Ok(pairwise_sum(&terms) / x as f64)
}

/// (1/x) Σ_{p<x} mean|a(p)|² log p — the i₁ estimator.
pub fn i1_sum(series: &VerticalSeries, x: u64) -> Result<f64, StatsError> {
    series.require_power_sums()?;
    series.check_complete(x)?;
    let terms: Vec<f64> = series
        .primes
        .iter()
        .zip(series.abs2.iter())
        .filter(|(p, _)| **p < x)
        .map(|(p, v)| v * (*p as f64).ln())
        .collect();
    Ok(pairwise_sum(&terms) / x as f64)
}

/// (1/x) Σ_{p<x} −t̂(p) √p log p via the rank track.
pub fn rank_sum(series: &VerticalSeries, x: u64) -> Result<f64, StatsError> {
    series.require_power_sums()?;
    series.check_complete(x)?;
    let terms: Vec<f64> = series
        .primes
        .iter()
        .zip(series.rank_track.iter())
        .filter(|(p, _)| **p < x)
        .map(|(p, v)| v * (*p as f64).ln())
        .collect();
    Ok(pairwise_sum(&terms) / x as f64)
}

/// Symmetry-type verdict vocabulary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "U(inf)")]
    Unitary,
    #[serde(rename = "Sp(inf)")]
    Symplectic,
    #[serde(rename = "SO_even(inf)")]
    SoEven,
    #[serde(rename = "SO_odd(inf)")]
    SoOdd,
    #[serde(rename = "Symplectic: eps-split unknown")]
    SymplecticSplitUnknown,
    #[serde(rename = "mixed")]
    Mixed,
    #[serde(rename = "not essentially cuspidal")]
    NotEssentiallyCuspidal,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Provenance {
    pub preset: String,
    pub seed: u64,
    pub config_hash: String,
}

/// The family report: indicator estimates, mass decomposition, rank and
/// verdict. Serialized as the reporting JSON schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: String,
    pub x: u64,
    pub t_hat: std::collections::BTreeMap<String, f64>,
    pub i: [f64; 3],
    pub masses: [f64; 3],
    pub rank: f64,
    pub verdict: Verdict,
    pub provenance: Provenance,
}

/// Assembles indicators from the vertical sums, decomposes masses, and
/// names the symmetry type. `mean_root_number` splits a symplectic
/// verdict into SO_even/SO_odd; without it the split stays unknown.
pub fn indicator_report(
    series: &VerticalSeries,
    x: u64,
    mean_root_number: Option<f64>,
    cuspidality_tol: f64,
    provenance: Provenance,
) -> Result<FamilyReport, StatsError> {
    let i1 = i1_sum(series, x)?;
    let (i3, _) = i3_sum(series, x)?;
    // i₂ from mean a(p)² (complex-aware), same log weighting
    let sq_terms: Vec<Complex64> = series
        .primes
        .iter()
        .zip(series.sq.iter().copied())
        .filter(|(p, _)| **p < x)
        .map(|(p, v)| v * (*p as f64).ln())
        .collect();
    let i2c = pairwise_sum_c(&sq_terms) / x as f64;
    let rank = rank_sum(series, x)?;
    let triple = IndicatorTriple {
        i1,
        i2: i2c.re,
        i3,
        se1: 0.0,
        se2: 0.0,
        se3: 0.0,
        i2_im: i2c.im,
        i3_im: 0.0,
    };
    let (verdict, masses) = match decompose_indicators(&triple, cuspidality_tol) {
        Err(_) => (Verdict::NotEssentiallyCuspidal, [f64::NAN; 3]),
        Ok(MassDecomposition { mass_u, mass_o, mass_sp, .. }) => {
            let verdict = if mass_u > 0.9 {
                Verdict::Unitary
            } else if mass_o > 0.9 {
                Verdict::Symplectic
            } else if mass_sp > 0.9 {
                match mean_root_number {
                    Some(e) if e > 0.9 => Verdict::SoEven,
                    Some(e) if e < -0.9 => Verdict::SoOdd,
                    Some(_) => Verdict::Mixed,
                    None => Verdict::SymplecticSplitUnknown,
                }
            } else {
                Verdict::Mixed
            };
            (verdict, [mass_u, mass_o, mass_sp])
        }
    };
    let mut t_hat_map = std::collections::BTreeMap::new();
    for (i, &p) in series.primes.iter().take(8).enumerate() {
        t_hat_map.insert(format!("{p}"), series.t1[i].re);
        t_hat_map.insert(format!("{p}^2"), series.t2[i].re);
    }
    Ok(FamilyReport {
        family: series.family_id.clone(),
        x,
        t_hat: t_hat_map,
        i: [triple.i1, triple.i2, triple.i3],
        masses,
        rank,
        verdict,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family_stats::presets;

    #[test]
    fn singleton_family_reproduces_coefficients() {
        struct Fixed;
        impl LocalCoefficients for Fixed {
            fn a(&self, p: u64, k: u32) -> Option<Complex64> {
                Some(Complex64::new(1.0 / (p as f64 + k as f64), 0.0))
            }
        }
        let snap = FamilySnapshot {
            family_id: "singleton".into(),
            cutoff: 10.0,
            members: vec![FamilyMember { conductor_gauge: 1.0, coeffs: Arc::new(Fixed) }],
            convention: CoeffConvention::PowerSum,
        };
        let h = t_hat(&snap, 7, 2).unwrap();
        assert_eq!(h.value_re, 1.0 / 9.0);
        assert_eq!(h.skip_fraction, 0.0);
    }

    #[test]
    fn quadratic_family_vertical_limits() {
        let snap = presets::snapshot_f2(200_000.0).unwrap();
        let p = 101u64;
        let h2 = t_hat(&snap, p, 2).unwrap();
        let expect = p as f64 / (p as f64 + 1.0);
        assert!((h2.value_re - expect).abs() < 0.01, "t̂(p²) = {}", h2.value_re);
        let h1 = t_hat(&snap, p, 1).unwrap();
        assert!(h1.value_re.abs() < 0.01, "t̂(p) = {}", h1.value_re);
    }

    #[test]
    fn f2_indicator_sums() {
        let snap = presets::snapshot_f2(100_000.0).unwrap();
        let series = build_vertical_series(&snap, 3, 10_000).unwrap();
        let (i3, _) = i3_sum(&series, 10_000).unwrap();
        assert!((i3 - 1.0).abs() < 0.05, "i3 = {i3}");
        let m1 = first_moment_sum(&series, 10_000).unwrap();
        assert!(m1.abs() < 0.02, "first moment {m1}");
        let r = rank_sum(&series, 10_000).unwrap();
        assert!(r.abs() < 0.05, "rank {r}");
    }

    #[test]
    fn trivial_coefficient_leak_is_flagged() {
        // a(p) ≡ 1 mimics a non-cuspidal (trivial-character) leak: the
        // first-moment sum converges to 1 by the prime number theorem
        struct One;
        impl LocalCoefficients for One {
            fn a(&self, _p: u64, _k: u32) -> Option<Complex64> {
                Some(Complex64::new(1.0, 0.0))
            }
        }
        let snap = FamilySnapshot {
            family_id: "trivial-leak".into(),
            cutoff: 2.0,
            members: vec![FamilyMember { conductor_gauge: 1.0, coeffs: Arc::new(One) }],
            convention: CoeffConvention::PowerSum,
        };
        let series = build_vertical_series(&snap, 2, 20_000).unwrap();
        let m = first_moment_sum(&series, 20_000).unwrap();
        assert!((m - 1.0).abs() < 0.05, "PNT sum {m}");
    }

    #[test]
    fn zero_coefficients_give_zero_sums() {
        struct Zero;
        impl LocalCoefficients for Zero {
            fn a(&self, _p: u64, _k: u32) -> Option<Complex64> {
                Some(Complex64::new(0.0, 0.0))
            }
        }
        let snap = FamilySnapshot {
            family_id: "zero".into(),
            cutoff: 2.0,
            members: vec![FamilyMember { conductor_gauge: 1.0, coeffs: Arc::new(Zero) }],
            convention: CoeffConvention::PowerSum,
        };
        let series = build_vertical_series(&snap, 2, 1000).unwrap();
        assert_eq!(i3_sum(&series, 1000).unwrap().0, 0.0);
        assert_eq!(rank_sum(&series, 1000).unwrap(), 0.0);
    }

    #[test]
    fn dirichlet_convention_rejected() {
        let snap = presets::snapshot_f2(1000.0).unwrap();
        let mut series = build_vertical_series(&snap, 3, 500).unwrap();
        series.convention = CoeffConvention::Dirichlet;
        assert!(matches!(i3_sum(&series, 500), Err(StatsError::WrongConvention)));
    }

    #[test]
    fn report_names_sp_infinity_for_f2() {
        let snap = presets::snapshot_f2(100_000.0).unwrap();
        let series = build_vertical_series(&snap, 3, 10_000).unwrap();
        let report = indicator_report(
            &series,
            10_000,
            None,
            0.08,
            Provenance { preset: "f2".into(), seed: 0, config_hash: "test".into() },
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Symplectic, "report {report:?}");
        assert!((report.masses[1] - 1.0).abs() < 0.1);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("Sp(inf)"));
    }
}

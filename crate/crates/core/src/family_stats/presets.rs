//! Named family presets bridging the concrete families into the
//! statistics layer.
//!
//! Geometric presets fill the vertical series from full mod-p sweeps (the
//! per-prime average over all of 𝔽_p or 𝔽_p², which is what the vertical
//! measure is), so the rank track reproduces the Nagao sum identically.

use num_complex::Complex64;
use rayon::prelude::*;
use std::sync::Arc;

use super::{CoeffConvention, FamilyMember, FamilySnapshot, LocalCoefficients, StatsError, VerticalSeries};
use crate::dirichlet::{enumerate_fundamental, FundamentalDiscriminant};
use crate::elliptic::{ap_sweep, OneParamFamily};
use crate::util::primes::primes_up_to;
use crate::util::rng_for_index;

struct QuadraticCoeffs {
    d: FundamentalDiscriminant,
}

impl LocalCoefficients for QuadraticCoeffs {
    fn a(&self, p: u64, k: u32) -> Option<Complex64> {
        let chi = self.d.chi(p as i64);
        if chi == 0 {
            return None;
        }
        // single Satake parameter χ_d(p): power sum a(p^k) = χ_d(p)^k
        let v = if k % 2 == 0 { 1.0 } else { chi as f64 };
        Some(Complex64::new(v, 0.0))
    }
}

/// The quadratic family window |d| ≤ x as a member snapshot.
pub fn snapshot_f2(x: f64) -> Result<FamilySnapshot, StatsError> {
    let ds = enumerate_fundamental(x).map_err(|_| StatsError::EmptyFamily)?;
    let members = ds
        .into_iter()
        .map(|d| FamilyMember {
            conductor_gauge: d.conductor() as f64,
            coeffs: Arc::new(QuadraticCoeffs { d }) as Arc<dyn LocalCoefficients>,
        })
        .collect();
    Ok(FamilySnapshot {
        family_id: "f2".into(),
        cutoff: x + 1.0,
        members,
        convention: CoeffConvention::PowerSum,
    })
}

/// Vertical series of the two-parameter box family, computed from the
/// full 𝔽_p² sweeps. The rank track uses the all-fiber average, which
/// vanishes identically by the row-sum identity.
pub fn vertical_series_fell(p_min: u64, p_max: u64) -> Result<VerticalSeries, StatsError> {
    let primes: Vec<u64> =
        primes_up_to(p_max).into_iter().filter(|&p| p >= p_min.max(5)).collect();
    let rows: Vec<(Complex64, Complex64, f64, Complex64, f64, f64)> = primes
        .par_iter()
        .map(|&p| {
            let table = ap_sweep(p).expect("sweep within range");
            let pf = p as f64;
            let sqrt_p = pf.sqrt();
            let mut sum1 = 0.0f64;
            let mut sum2 = 0.0f64;
            let mut count = 0u64;
            let mut full_sum = 0i64;
            for idx in 0..(p * p) as usize {
                full_sum += table.ap[idx] as i64;
                if !table.singular[idx] {
                    let a = table.ap[idx] as f64;
                    sum1 += a;
                    sum2 += a * a;
                    count += 1;
                }
            }
            let total = (p * p) as f64;
            // ramified cells contribute zero coefficients to the means
            let t1 = sum1 / sqrt_p / total;
            let sq = sum2 / pf / total;
            let t2 = (sum2 / pf - 2.0 * count as f64) / total;
            let abs2 = sq;
            let skip = 1.0 - count as f64 / total;
            let rank = -(full_sum as f64) / total * sqrt_p; // exactly 0 by the row identity
            (
                Complex64::new(t1, 0.0),
                Complex64::new(t2, 0.0),
                abs2,
                Complex64::new(sq, 0.0),
                skip,
                rank,
            )
        })
        .collect();
    Ok(VerticalSeries {
        family_id: "fell".into(),
        primes,
        t1: rows.iter().map(|r| r.0).collect(),
        t2: rows.iter().map(|r| r.1).collect(),
        abs2: rows.iter().map(|r| r.2).collect(),
        sq: rows.iter().map(|r| r.3).collect(),
        skip: rows.iter().map(|r| r.4).collect(),
        rank_track: rows.iter().map(|r| r.5).collect(),
        convention: CoeffConvention::PowerSum,
    })
}

/// Vertical series of a one-parameter pencil from per-fiber sweeps; the
/// rank track carries the full Nagao fiber average −A_p·√p/√p·… i.e.
/// −A_p, matching `nagao_rank` term for term.
pub fn vertical_series_one_param(
    family: &OneParamFamily,
    p_min: u64,
    p_max: u64,
) -> Result<VerticalSeries, StatsError> {
    let primes: Vec<u64> =
        primes_up_to(p_max).into_iter().filter(|&p| p >= p_min.max(5)).collect();
    let rows: Vec<(Complex64, Complex64, f64, Complex64, f64, f64)> = primes
        .par_iter()
        .map(|&p| {
            let pf = p as f64;
            let sqrt_p = pf.sqrt();
            let chi = legendre_table_local(p);
            let mut sum1 = 0.0f64;
            let mut sum2 = 0.0f64;
            let mut good = 0u64;
            let mut full = 0.0f64;
            for w in 0..p {
                let a2 = family.c2.eval_mod(w, p);
                let a1 = family.c1.eval_mod(w, p);
                let a0 = family.c0.eval_mod(w, p);
                let mut s = 0i64;
                for x in 0..p {
                    let v = (((x + a2) % p * x + a1) % p * x + a0) % p;
                    s += chi[v as usize] as i64;
                }
                let ap = -s as f64;
                full += ap;
                if fiber_is_smooth(a2, a1, a0, p) {
                    sum1 += ap;
                    sum2 += ap * ap;
                    good += 1;
                }
            }
            let total = pf;
            let t1 = sum1 / sqrt_p / total;
            let sq = sum2 / pf / total;
            let t2 = (sum2 / pf - 2.0 * good as f64) / total;
            let skip = 1.0 - good as f64 / total;
            // Nagao track: −A_p with A_p the all-fiber average
            let rank = -full / total;
            (
                Complex64::new(t1, 0.0),
                Complex64::new(t2, 0.0),
                sq,
                Complex64::new(sq, 0.0),
                skip,
                rank,
            )
        })
        .collect();
    Ok(VerticalSeries {
        family_id: family.name.clone(),
        primes,
        t1: rows.iter().map(|r| r.0).collect(),
        t2: rows.iter().map(|r| r.1).collect(),
        abs2: rows.iter().map(|r| r.2).collect(),
        sq: rows.iter().map(|r| r.3).collect(),
        skip: rows.iter().map(|r| r.4).collect(),
        rank_track: rows.iter().map(|r| r.5).collect(),
        convention: CoeffConvention::PowerSum,
    })
}

fn legendre_table_local(p: u64) -> Vec<i8> {
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for x in 1..p {
        chi[(x * x % p) as usize] = 1;
    }
    chi
}

/// disc(x³ + a₂x² + a₁x + a₀) ≠ 0 mod p, via the (c₄, c₆) invariants.
fn fiber_is_smooth(a2: u64, a1: u64, a0: u64, p: u64) -> bool {
    let pi = p as i128;
    let b2 = 4 * a2 as i128;
    let b4 = 2 * a1 as i128;
    let b6 = 4 * a0 as i128;
    let c4 = (b2 * b2 - 24 * b4).rem_euclid(pi);
    let c6 = (-b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6).rem_euclid(pi);
    let disc1728 = (c4 * c4 % pi * c4 % pi - c6 * c6 % pi).rem_euclid(pi);
    disc1728 != 0
}

/// Synthetic non-self-dual data: members with unit-modulus coefficients
/// a(p) = e^{iφ}, a(p²) = e^{2iφ}, independent random phases per member
/// and prime. The indicator reading is (1, 0, 0), forcing all mass to
/// the unitary class.
pub fn snapshot_full_circle_twist(members: usize, seed: u64) -> FamilySnapshot {
    struct Phases {
        seed: u64,
        index: u64,
    }
    impl LocalCoefficients for Phases {
        fn a(&self, p: u64, k: u32) -> Option<Complex64> {
            use rand::Rng;
            let mut rng = rng_for_index(self.seed ^ p, self.index);
            let phi: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            Some(Complex64::from_polar(1.0, k as f64 * phi))
        }
    }
    let members = (0..members as u64)
        .map(|i| FamilyMember {
            conductor_gauge: i as f64 + 1.0,
            coeffs: Arc::new(Phases { seed, index: i }) as Arc<dyn LocalCoefficients>,
        })
        .collect();
    FamilySnapshot {
        family_id: "full-circle-twist".into(),
        cutoff: f64::INFINITY,
        members,
        convention: CoeffConvention::PowerSum,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family_stats::{i3_sum, rank_sum};

    #[test]
    fn fell_rank_track_is_exactly_zero() {
        let series = vertical_series_fell(5, 200).unwrap();
        for (&p, &r) in series.primes.iter().zip(series.rank_track.iter()) {
            assert_eq!(r, 0.0, "p = {p}");
        }
        assert_eq!(rank_sum(&series, 200).unwrap(), 0.0);
    }

    #[test]
    fn fell_i3_near_minus_one() {
        let series = vertical_series_fell(5, 2000).unwrap();
        let (i3, _) = i3_sum(&series, 2000).unwrap();
        assert!((i3 + 1.0).abs() < 0.1, "i3 = {i3}");
    }

    #[test]
    fn washington_rank_track_matches_nagao() {
        let fam = OneParamFamily::washington();
        let series = vertical_series_one_param(&fam, 5, 1000).unwrap();
        let from_series = rank_sum(&series, 1000).unwrap();
        let direct = crate::elliptic::nagao_rank(&fam, 1000).unwrap().estimate;
        assert!(
            (from_series - direct).abs() < 1e-12,
            "series {from_series} vs nagao {direct}"
        );
    }

    #[test]
    fn elliptic_t1_decays_like_inverse_p() {
        // |t̂(p)|·p stays bounded for the box family
        let series = vertical_series_fell(5, 500).unwrap();
        for (&p, t) in series.primes.iter().zip(series.t1.iter()) {
            assert!(
                t.re.abs() * p as f64 <= 3.0,
                "p = {p}: |t̂(p)|·p = {}",
                t.re.abs() * p as f64
            );
        }
    }

    #[test]
    fn full_circle_twist_is_unitary() {
        let snap = snapshot_full_circle_twist(400, 7);
        let series = crate::family_stats::build_vertical_series(&snap, 3, 2000).unwrap();
        let report = crate::family_stats::indicator_report(
            &series,
            2000,
            None,
            0.2,
            crate::family_stats::Provenance {
                preset: "full-circle-twist".into(),
                seed: 7,
                config_hash: String::new(),
            },
        )
        .unwrap();
        assert_eq!(report.verdict, crate::family_stats::Verdict::Unitary, "{report:?}");
    }
}

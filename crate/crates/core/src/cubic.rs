//! S₃ cubic fields through depressed integer cubics: enumeration by
//! polynomial discriminant, prime-splitting statistics, Frobenius traces
//! in the 2-dimensional representation, and pooled class proportions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::IndicatorTriple;
use crate::util::primes::primes_up_to;

#[derive(Debug, Error)]
pub enum CubicError {
    #[error("discriminant cutoff {0} exceeds the guard 1e8")]
    CutoffTooLarge(i64),
    #[error("p = {0} is not a good prime here")]
    BadPrime(u64),
    #[error("squarefree cubic mod good prime reported 2 roots (bad-prime leak at p = {0})")]
    TwoRoots(u64),
    #[error("under-sampled: {cubics} cubics, {primes} primes (need ≥ 1000 and ≥ 20)")]
    UnderSampled { cubics: usize, primes: usize },
}

/// f(x) = x³ + Ax + B with disc = −4A³ − 27B²; S₃-generic when
/// irreducible over ℚ with non-square discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DepressedCubic {
    pub a: i64,
    pub b: i64,
}

impl DepressedCubic {
    pub fn disc(&self) -> i64 {
        -4 * self.a * self.a * self.a - 27 * self.b * self.b
    }

    /// Irreducible over ℚ ⟺ no rational root; for a monic integer cubic
    /// any rational root is an integer dividing B.
    pub fn is_irreducible(&self) -> bool {
        if self.b == 0 {
            return false;
        }
        let eval = |x: i64| {
            (x as i128) * (x as i128) * (x as i128) + self.a as i128 * x as i128 + self.b as i128
        };
        let babs = self.b.unsigned_abs();
        let mut d = 1u64;
        while d * d <= babs {
            if babs % d == 0 {
                for r in [d as i64, -(d as i64), (babs / d) as i64, -((babs / d) as i64)] {
                    if eval(r) == 0 {
                        return false;
                    }
                }
            }
            d += 1;
        }
        true
    }

    pub fn is_s3_generic(&self) -> bool {
        let disc = self.disc();
        disc != 0 && !is_square(disc) && self.is_irreducible()
    }
}

fn is_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as f64).sqrt().round() as i64;
    for c in [r - 1, r, r + 1] {
        if c >= 0 && c * c == n {
            return true;
        }
    }
    false
}

/// All S₃-generic depressed cubics with |disc| ≤ X, sorted by |disc|.
/// Distinct (A, B) generating the same field are retained — this is the
/// parametric family with its natural multiplicity, not a field count.
///
/// For A < 0 the region |4|A|³ − 27B²| ≤ X is a thin strip extending past
/// the (X/4)^{1/3} box; the scan covers |A| ≤ 8(X/4)^{2/3}, beyond which
/// an integer point would need |4|A|³ − 27B²| ≪ |A|^{3/2} at a scale no
/// known cubic–square near-miss reaches.
pub fn enumerate_s3_cubics(x: i64) -> Result<Vec<DepressedCubic>, CubicError> {
    if x > 100_000_000 {
        return Err(CubicError::CutoffTooLarge(x));
    }
    let xf = x as f64;
    let mut out = Vec::new();
    // A ≥ 0: |disc| = 4A³ + 27B², a bounded box
    let a_pos_max = (xf / 4.0).cbrt() as i64 + 1;
    for a in 0..=a_pos_max {
        let rem = x - 4 * a * a * a;
        if rem < 0 {
            break;
        }
        let b_max = (rem as f64 / 27.0).sqrt() as i64 + 1;
        for b in -b_max..=b_max {
            let f = DepressedCubic { a, b };
            if f.disc().abs() <= x && f.is_s3_generic() {
                out.push(f);
            }
        }
    }
    // A < 0: scan the strip 27B² ∈ [4|A|³ − X, 4|A|³ + X]
    let a_neg_max = (2.0 * (xf / 4.0).cbrt()).max(8.0 * (xf / 4.0).powf(2.0 / 3.0)) as i64 + 1;
    for am in 1..=a_neg_max {
        let a = -am;
        let four_a3 = 4 * (am as i128).pow(3);
        let lo = (((four_a3 - x as i128).max(0)) as f64 / 27.0).sqrt() as i64 - 2;
        let hi = ((four_a3 + x as i128) as f64 / 27.0).sqrt() as i64 + 2;
        for babs in lo.max(0)..=hi {
            for b in [babs, -babs] {
                let f = DepressedCubic { a, b };
                let disc = -4 * (a as i128).pow(3) - 27 * (b as i128).pow(2);
                if disc.unsigned_abs() <= x as u128 && f.is_s3_generic() {
                    out.push(f);
                }
                if babs == 0 {
                    break;
                }
            }
        }
    }
    out.sort_by_key(|f| (f.disc().abs(), f.a, f.b));
    out.dedup();
    Ok(out)
}

/// Factorization shape of f mod p — the Frobenius class in S₃.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplittingType {
    /// three roots: identity class
    Split111,
    /// one root: transposition class
    Mixed12,
    /// no root: 3-cycle class
    Inert3,
    /// p divides the discriminant
    Ramified,
}

/// Root count of f mod p by direct evaluation (p ≤ 10⁴ scale). Ramified
/// primes short-circuit; a root count of 2 is impossible for a squarefree
/// cubic mod a good prime and trips the alarm.
pub fn splitting_type(f: &DepressedCubic, p: u64) -> Result<SplittingType, CubicError> {
    if p < 5 {
        return Err(CubicError::BadPrime(p));
    }
    if f.disc().rem_euclid(p as i64) == 0 {
        return Ok(SplittingType::Ramified);
    }
    let a = f.a.rem_euclid(p as i64) as u64;
    let b = f.b.rem_euclid(p as i64) as u64;
    let mut roots = 0u32;
    for x in 0..p {
        if (x * x % p * x + a * x + b) % p == 0 {
            roots += 1;
        }
    }
    match roots {
        3 => Ok(SplittingType::Split111),
        1 => Ok(SplittingType::Mixed12),
        0 => Ok(SplittingType::Inert3),
        _ => Err(CubicError::TwoRoots(p)),
    }
}

/// Root counts of x³ + ax + b for all (a, b) ∈ 𝔽_p², one O(p²) pass:
/// each (a, x) pair determines the b with f(x) ≡ 0. The outer loop owns
/// one table row (cache-resident) and the inner loop walks a·x mod p
/// incrementally, division-free.
fn root_count_table(p: u64) -> Vec<u8> {
    let pu = p as usize;
    let mut cubes = vec![0usize; pu];
    for x in 0..p {
        cubes[x as usize] = (x * x % p * x % p) as usize;
    }
    let mut table = vec![0u8; pu * pu];
    for a in 0..pu {
        let row = &mut table[a * pu..(a + 1) * pu];
        let mut ax = 0usize; // a·x mod p
        for x in 0..pu {
            let s = cubes[x] + ax;
            let s = if s >= pu { s - pu } else { s };
            let b = if s == 0 { 0 } else { pu - s };
            row[b] += 1;
            ax += a;
            if ax >= pu {
                ax -= pu;
            }
        }
    }
    table
}

/// Character value of Frobenius in the standard 2-dimensional
/// representation: identity ↦ 2, transposition ↦ 0, 3-cycle ↦ −1.
/// None for ramified primes (skipped in statistics).
pub fn frobenius_trace(t: SplittingType) -> Option<i32> {
    match t {
        SplittingType::Split111 => Some(2),
        SplittingType::Mixed12 => Some(0),
        SplittingType::Inert3 => Some(-1),
        SplittingType::Ramified => None,
    }
}

/// Pooled class statistics over (f, p) pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassProportions {
    pub split: f64,
    pub inert: f64,
    pub mixed: f64,
    pub ramified_skipped: u64,
    pub samples: u64,
    pub indicators: IndicatorTriple,
    pub mean_trace: f64,
}

/// Class frequencies pooled over cubics with |disc| ≤ X and primes in
/// (p_min, p_max], with trace indicators. i₁ and i₂ come from the mean
/// squared trace; i₃ from tr(Frob²) = tr(Frob)² − 2·det(Frob), det being
/// +1 on rotations and −1 on reflections.
pub fn family_class_proportions(
    x: i64,
    p_min: u64,
    p_max: u64,
) -> Result<ClassProportions, CubicError> {
    let cubics = enumerate_s3_cubics(x)?;
    let primes: Vec<u64> = primes_up_to(p_max).into_iter().filter(|&p| p > p_min.max(4)).collect();
    if cubics.len() < 1000 || primes.len() < 20 {
        return Err(CubicError::UnderSampled { cubics: cubics.len(), primes: primes.len() });
    }
    // per prime: one O(p²) pass tabulates the root count of every
    // residue pair, then each cubic costs a lookup
    let per_prime: Vec<[u64; 4]> = primes
        .par_iter()
        .map(|&p| {
            let table = root_count_table(p);
            let mut counts = [0u64; 4];
            for f in &cubics {
                if f.disc().rem_euclid(p as i64) == 0 {
                    counts[3] += 1;
                    continue;
                }
                let a = f.a.rem_euclid(p as i64) as u64;
                let b = f.b.rem_euclid(p as i64) as u64;
                match table[(a * p + b) as usize] {
                    3 => counts[0] += 1,
                    0 => counts[1] += 1,
                    1 => counts[2] += 1,
                    _ => panic!("two roots of a squarefree cubic mod good prime {p}"),
                }
            }
            counts
        })
        .collect();
    let mut counts = [0u64; 4];
    for c in per_prime {
        for i in 0..4 {
            counts[i] += c[i];
        }
    }
    let n = (counts[0] + counts[1] + counts[2]) as f64;
    let (split, inert, mixed) = (counts[0] as f64 / n, counts[1] as f64 / n, counts[2] as f64 / n);
    // traces 2, −1, 0; squared Frobenius lands on (id, 3-cycle, id) with
    // traces 2, −1, 2
    let i1 = split * 4.0 + inert * 1.0 + mixed * 0.0;
    let i3 = split * 2.0 + inert * -1.0 + mixed * 2.0;
    let mean_trace = split * 2.0 + inert * -1.0;
    let se = 1.0 / n.sqrt();
    let indicators =
        IndicatorTriple { i1, i2: i1, i3, se1: se, se2: se, se3: se, i2_im: 0.0, i3_im: 0.0 };
    Ok(ClassProportions {
        split,
        inert,
        mixed,
        ramified_skipped: counts[3],
        samples: counts[0] + counts[1] + counts[2],
        indicators,
        mean_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pinned_membership_examples() {
        // x³ − x + 1: disc = 4 − 27 = −23, irreducible, non-square
        assert!(DepressedCubic { a: -1, b: 1 }.is_s3_generic());
        // x³ + 1 has the root −1
        assert!(!DepressedCubic { a: 0, b: 1 }.is_s3_generic());
        // x³ − 3x + 1: disc = 108 − 27 = 81 = 9², the cyclic cubic
        assert!(!DepressedCubic { a: -3, b: 1 }.is_s3_generic());
        let cubics = enumerate_s3_cubics(30).unwrap();
        assert!(cubics.contains(&DepressedCubic { a: -1, b: 1 }));
        assert!(!cubics.contains(&DepressedCubic { a: -3, b: 1 }));
    }

    #[test]
    fn enumeration_agrees_with_rectangle_scan() {
        // the rectangle must reach B ~ √(4·Amax³/27) to cover the
        // negative-A strip
        let x = 4000i64;
        let fast: std::collections::HashSet<(i64, i64)> =
            enumerate_s3_cubics(x).unwrap().into_iter().map(|f| (f.a, f.b)).collect();
        let mut slow = std::collections::HashSet::new();
        for a in -810..=810i64 {
            for b in -8900..=8900i64 {
                let f = DepressedCubic { a, b };
                if f.disc().abs() <= x && f.is_s3_generic() {
                    slow.insert((a, b));
                }
            }
        }
        assert_eq!(fast, slow);
    }

    #[test]
    fn batched_table_matches_pointwise_splitting() {
        let p = 211u64;
        let table = root_count_table(p);
        for f in enumerate_s3_cubics(2000).unwrap().iter().take(300) {
            let expected = match splitting_type(f, p).unwrap() {
                SplittingType::Split111 => Some(3u8),
                SplittingType::Inert3 => Some(0),
                SplittingType::Mixed12 => Some(1),
                SplittingType::Ramified => None,
            };
            if let Some(e) = expected {
                let a = f.a.rem_euclid(p as i64) as u64;
                let b = f.b.rem_euclid(p as i64) as u64;
                assert_eq!(table[(a * p + b) as usize], e, "f = {f:?}");
            }
        }
    }

    #[test]
    fn splitting_pinned_cases() {
        let f = DepressedCubic { a: -1, b: 1 };
        // f mod 5 at x = 0..4: 1, 1, 7≡2, 25≡0, 61≡1 — one root ⇒ Mixed12
        assert_eq!(splitting_type(&f, 5).unwrap(), SplittingType::Mixed12);
        // 23 | disc
        assert_eq!(splitting_type(&f, 23).unwrap(), SplittingType::Ramified);
        // f mod 7 at x = 0..6: 1,1,0?,... f(2) = 7 ≡ 0 — count honestly
        let mut roots7 = 0;
        for xx in 0..7i64 {
            if (xx * xx * xx - xx + 1).rem_euclid(7) == 0 {
                roots7 += 1;
            }
        }
        let got = splitting_type(&f, 7).unwrap();
        match roots7 {
            0 => assert_eq!(got, SplittingType::Inert3),
            1 => assert_eq!(got, SplittingType::Mixed12),
            3 => assert_eq!(got, SplittingType::Split111),
            _ => panic!("impossible root count"),
        }
    }

    #[test]
    fn frobenius_traces() {
        assert_eq!(frobenius_trace(SplittingType::Split111), Some(2));
        assert_eq!(frobenius_trace(SplittingType::Mixed12), Some(0));
        assert_eq!(frobenius_trace(SplittingType::Inert3), Some(-1));
        assert_eq!(frobenius_trace(SplittingType::Ramified), None);
    }

    #[test]
    fn chebotarev_proportions_and_indicators() {
        // the identity class is under-represented at small primes (the
        // classical Chebotarev race), decaying like ~1/√p; primes up to
        // 10⁴ bring the pooled indicators inside the 0.02 band
        let stats = family_class_proportions(30_000, 3000, 8000).unwrap();
        assert!((stats.split - 1.0 / 6.0).abs() < 0.02, "split {}", stats.split);
        assert!((stats.inert - 1.0 / 3.0).abs() < 0.02, "inert {}", stats.inert);
        assert!((stats.mixed - 1.0 / 2.0).abs() < 0.02, "mixed {}", stats.mixed);
        assert!((stats.indicators.i1 - 1.0).abs() < 0.02);
        assert!((stats.indicators.i3 - 1.0).abs() < 0.02);
        assert!(stats.mean_trace.abs() < 0.02);
        // exact D₃ oracle from the measures side
        let d3 = crate::measures::indicators_exact(&crate::measures::GroupSpec::FiniteGroup(
            crate::measures::dihedral_d3(),
        ))
        .unwrap();
        assert!((stats.indicators.i1 - d3.i1).abs() < 0.02);
        assert!((stats.indicators.i3 - d3.i3).abs() < 0.02);
    }

    #[test]
    fn vertical_and_horizontal_runs_agree() {
        // one large prime across many f, vs many primes for one f
        let cubics = enumerate_s3_cubics(50_000).unwrap();
        let p = 1009u64;
        let mut v = [0u64; 3];
        for f in &cubics {
            match splitting_type(f, p).unwrap() {
                SplittingType::Split111 => v[0] += 1,
                SplittingType::Inert3 => v[1] += 1,
                SplittingType::Mixed12 => v[2] += 1,
                SplittingType::Ramified => {}
            }
        }
        let nv = (v[0] + v[1] + v[2]) as f64;
        let primes: Vec<u64> = primes_up_to(5000).into_iter().filter(|&q| q > 50).collect();
        let f0 = DepressedCubic { a: -1, b: 1 };
        let mut h = [0u64; 3];
        for &q in &primes {
            match splitting_type(&f0, q).unwrap() {
                SplittingType::Split111 => h[0] += 1,
                SplittingType::Inert3 => h[1] += 1,
                SplittingType::Mixed12 => h[2] += 1,
                SplittingType::Ramified => {}
            }
        }
        let nh = (h[0] + h[1] + h[2]) as f64;
        for i in 0..3 {
            let dv = v[i] as f64 / nv;
            let dh = h[i] as f64 / nh;
            assert!((dv - dh).abs() < 0.06, "class {i}: vertical {dv} vs horizontal {dh}");
        }
    }

    #[test]
    fn under_sampling_flagged() {
        assert!(matches!(family_class_proportions(100, 50, 500), Err(CubicError::UnderSampled { .. })));
    }
}

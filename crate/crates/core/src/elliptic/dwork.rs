//! The Hesse-form pencil x₀³ + x₁³ + x₂³ = 3w·x₀x₁x₂ (the n = 2 member
//! of the Dwork hypersurface tower), smooth away from w³ = 1 and p = 3.

use super::EllipticError;
use crate::measures::{TorusMeasure, TorusPoint};
use crate::util::primes::{is_prime, pow_mod};

fn mod_inv(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Points on the line at infinity x₂ = 0: solutions of u³ = −1.
fn points_at_infinity(p: u64) -> u64 {
    if p % 3 == 1 {
        3
    } else {
        1
    }
}

/// a_p of the fiber at w: p + 1 minus the projective point count.
pub fn dwork_hesse_ap(w: i64, p: u64) -> Result<i64, EllipticError> {
    if p <= 3 || !is_prime(p) {
        return Err(EllipticError::BadPrime(p));
    }
    let wm = w.rem_euclid(p as i64) as u64;
    if (wm * wm % p * wm + p - 1) % p == 0 {
        return Err(EllipticError::SingularFiber(w));
    }
    let mut affine = 0u64;
    for x in 0..p {
        let x3 = x * x % p * x % p;
        for y in 0..p {
            let y3 = y * y % p * y % p;
            let lhs = (x3 + y3 + 1) % p;
            let rhs = 3 * wm % p * x % p * y % p;
            if lhs == rhs {
                affine += 1;
            }
        }
    }
    let total = affine + points_at_infinity(p);
    Ok(p as i64 + 1 - total as i64)
}

/// a_p for every w ∈ 𝔽_p at once (None on the singular fibers w³ = 1).
/// One pass over (x, y): for xy ≠ 0 the incidence w = (x³+y³+1)/(3xy) is
/// unique, and the xy = 0 solutions are w-independent.
pub fn dwork_vertical_sweep(p: u64) -> Result<Vec<Option<i64>>, EllipticError> {
    if p <= 3 || !is_prime(p) {
        return Err(EllipticError::BadPrime(p));
    }
    let mut count = vec![0u64; p as usize];
    let mut base = 0u64; // solutions with xy = 0, counted for every w
    let inv3 = mod_inv(3, p);
    let mut cubes = vec![0u64; p as usize];
    for x in 0..p {
        cubes[x as usize] = x * x % p * x % p;
    }
    for x in 0..p {
        let x3 = cubes[x as usize];
        if x == 0 {
            for y in 0..p {
                if (cubes[y as usize] + 1) % p == 0 {
                    base += 1;
                }
            }
            continue;
        }
        for y in 0..p {
            if y == 0 {
                if (x3 + 1) % p == 0 {
                    base += 1;
                }
                continue;
            }
            let num = (x3 + cubes[y as usize] + 1) % p;
            let w = num * inv3 % p * mod_inv(x * y % p, p) % p;
            count[w as usize] += 1;
        }
    }
    let infinity = points_at_infinity(p);
    let out = (0..p)
        .map(|w| {
            if (cubes[w as usize] + p - 1) % p == 0 {
                None
            } else {
                Some(p as i64 + 1 - (count[w as usize] + base + infinity) as i64)
            }
        })
        .collect();
    Ok(out)
}

/// The vertical measure of the Dwork pencil at p: θ_w = arccos(a_p/2√p)
/// over smooth fibers, singular fibers as mass deficit.
pub fn dwork_vertical_measure(p: u64) -> Result<TorusMeasure, EllipticError> {
    let sweep = dwork_vertical_sweep(p)?;
    let sqrt_p = (p as f64).sqrt();
    let total = sweep.len() as f64;
    let mut counts: std::collections::BTreeMap<i64, u64> = std::collections::BTreeMap::new();
    for ap in sweep.into_iter().flatten() {
        *counts.entry(ap).or_insert(0) += 1;
    }
    let atoms = counts
        .into_iter()
        .map(|(ap, c)| {
            let theta = (ap as f64 / (2.0 * sqrt_p)).clamp(-1.0, 1.0).acos();
            (TorusPoint::new(vec![theta, -theta]), c as f64 / total)
        })
        .collect();
    Ok(TorusMeasure::atomic(atoms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supersingular_at_w_zero() {
        // cubing is a bijection when p ≡ 2 mod 3, so the w = 0 fiber has
        // p + 1 points; brute force at p = 5, 11
        for p in [5u64, 11, 17, 101] {
            assert_eq!(dwork_hesse_ap(0, p).unwrap(), 0, "p = {p}");
        }
    }

    #[test]
    fn sweep_matches_single_fiber_path() {
        for p in [5u64, 7, 11, 13, 31] {
            let sweep = dwork_vertical_sweep(p).unwrap();
            for w in 0..p {
                match &sweep[w as usize] {
                    Some(ap) => assert_eq!(*ap, dwork_hesse_ap(w as i64, p).unwrap(), "p={p}, w={w}"),
                    None => assert!(matches!(
                        dwork_hesse_ap(w as i64, p),
                        Err(EllipticError::SingularFiber(_))
                    )),
                }
            }
        }
    }

    #[test]
    fn hasse_bound_on_random_fibers() {
        let primes: Vec<u64> = crate::util::primes::primes_up_to(200).into_iter().filter(|&p| p > 3).collect();
        let mut state = 31u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut done = 0;
        while done < 1000 {
            let p = primes[(next() % primes.len() as u64) as usize];
            let w = (next() % p) as i64;
            match dwork_hesse_ap(w, p) {
                Ok(ap) => {
                    assert!((ap * ap) as f64 <= 4.0 * p as f64, "p={p}, w={w}: a_p={ap}");
                    done += 1;
                }
                Err(EllipticError::SingularFiber(_)) => continue,
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn singular_fiber_count() {
        // w³ = 1 has 3 roots for p ≡ 1 mod 3, else 1
        for (p, expect) in [(7u64, 3usize), (11, 1), (13, 3), (17, 1)] {
            let sweep = dwork_vertical_sweep(p).unwrap();
            assert_eq!(sweep.iter().filter(|v| v.is_none()).count(), expect, "p = {p}");
        }
    }

    #[test]
    fn vertical_histogram_approaches_sine_squared() {
        // p ≡ 2 mod 3 so that all p − 1 smooth fibers are distinct samples
        let mu = dwork_vertical_measure(1013).unwrap();
        let dist = crate::elliptic::cdf_distance_to_sine_squared(&mu);
        assert!(dist <= 0.05, "CDF distance {dist}");
    }

    #[test]
    fn cube_root_twist_collapses_fibers() {
        // for p ≡ 1 mod 3 the substitution x₀ ↦ ζx₀ identifies the fibers
        // at w and ζw, so a_p(w) = a_p(ζw) exactly and the effective
        // sample count drops to (p−1)/3
        let p = 103u64;
        let zeta = (2..p).find(|&z| z * z % p * z % p == 1).unwrap();
        let sweep = dwork_vertical_sweep(p).unwrap();
        for w in 1..p {
            let wz = w * zeta % p;
            assert_eq!(sweep[w as usize], sweep[wz as usize], "w = {w}");
        }
    }
}

//! Full a_p tables over 𝔽_p².
//!
//! The table is filled in O(p²) through the twist action
//! (a, b) ↦ (at², bt³), under which the raw character sum obeys
//! S(at², bt³) = χ(t)·S(a, b): one O(p) point count per orbit
//! representative (c, c), the j = 0 and j = 1728 lines from cube- and
//! square-class representatives, and an O(1) table write per cell.

use super::EllipticError;
use crate::util::primes::{is_prime, pow_mod};

/// a_p over all of 𝔽_p², row-major in (a, b); `ap[a*p+b]` holds the
/// negated raw character sum −Σ_x χ(x³+ax+b) for every cell, singular or
/// not, and `singular` marks 4a³ + 27b² ≡ 0.
pub struct SweepTable {
    pub p: u64,
    pub ap: Vec<i16>,
    pub singular: Vec<bool>,
}

impl SweepTable {
    pub fn lookup(&self, a: i64, b: i64) -> (i16, bool) {
        let p = self.p as i64;
        let idx = (a.rem_euclid(p) * p + b.rem_euclid(p)) as usize;
        (self.ap[idx], self.singular[idx])
    }

    /// Σ_b of the raw character sum along one a-row; zero for every a
    /// because Σ_b χ(v + b) runs over a full period.
    pub fn row_raw_sum(&self, a: u64) -> i64 {
        let p = self.p as usize;
        -(self.ap[a as usize * p..(a as usize + 1) * p].iter().map(|&v| v as i64).sum::<i64>())
    }
}

/// Legendre character table χ[0..p).
pub(crate) fn legendre_table(p: u64) -> Vec<i8> {
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for x in 1..p {
        chi[(x * x % p) as usize] = 1;
    }
    chi
}

fn raw_sum(chi: &[i8], p: u64, a: u64, b: u64) -> i64 {
    let mut s = 0i64;
    for x in 0..p {
        let v = (x * x % p * x + a * x + b) % p;
        s += chi[v as usize] as i64;
    }
    s
}

/// Builds the full table at a prime 3 < p ≤ 2000.
pub fn ap_sweep(p: u64) -> Result<SweepTable, EllipticError> {
    if p > 2000 {
        return Err(EllipticError::SweepTooLarge(p));
    }
    if p <= 3 || !is_prime(p) {
        return Err(EllipticError::BadPrime(p));
    }
    let chi = legendre_table(p);
    let n = (p * p) as usize;
    let mut ap = vec![0i16; n];
    let mut singular = vec![false; n];

    // orbits through (c, c) cover every cell with ab ≠ 0
    for c in 1..p {
        let s_cc = raw_sum(&chi, p, c, c);
        for t in 1..p {
            let t2 = t * t % p;
            let a = c * t2 % p;
            let b = c * t2 % p * t % p;
            let sign = chi[t as usize] as i64;
            ap[(a * p + b) as usize] = (-sign * s_cc) as i16;
        }
    }

    // j = 0 line (a = 0, b ≠ 0): cube-class representatives
    let cube_reps: Vec<u64> = if p % 3 == 2 {
        vec![1]
    } else {
        let g = (2..p).find(|&g| pow_mod(g, (p - 1) / 3, p) != 1).expect("non-cube exists");
        vec![1, g, g * g % p]
    };
    for &r in &cube_reps {
        let s0r = raw_sum(&chi, p, 0, r);
        for t in 1..p {
            let b = r * (t * t % p) % p * t % p;
            ap[b as usize] = (-(chi[t as usize] as i64) * s0r) as i16;
        }
    }

    // j = 1728 line (b = 0, a ≠ 0): square-class representatives
    let nonresidue = (2..p).find(|&n| chi[n as usize] == -1).expect("non-residue exists");
    for &r in &[1, nonresidue] {
        let sr0 = raw_sum(&chi, p, r, 0);
        for t in 1..p {
            let a = r * (t * t % p) % p;
            ap[(a * p) as usize] = (-(chi[t as usize] as i64) * sr0) as i16;
        }
    }

    // (0, 0): Σ χ(x³) = Σ χ(x) = 0
    ap[0] = 0;

    for a in 0..p {
        let a3 = a * a % p * a % p;
        for b in 0..p {
            let disc = (4 * a3 + 27 * (b * b % p)) % p;
            if disc == 0 {
                singular[(a * p + b) as usize] = true;
            }
        }
    }
    Ok(SweepTable { p, ap, singular })
}

const SWEEP_MAGIC: &[u8; 8] = b"DWSWEEP1";
const SINGULAR_SENTINEL: i16 = i16::MIN;

/// Binary cache: magic, p as u64 LE, then p² i16 LE a_p values row-major
/// with −32768 marking singular cells.
pub fn write_sweep(table: &SweepTable, w: &mut impl std::io::Write) -> std::io::Result<()> {
    w.write_all(SWEEP_MAGIC)?;
    w.write_all(&table.p.to_le_bytes())?;
    for idx in 0..table.ap.len() {
        let v = if table.singular[idx] { SINGULAR_SENTINEL } else { table.ap[idx] };
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_sweep(r: &mut impl std::io::Read) -> Result<SweepTable, EllipticError> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != SWEEP_MAGIC {
        return Err(EllipticError::CacheFormat("bad magic".into()));
    }
    let mut pb = [0u8; 8];
    r.read_exact(&mut pb)?;
    let p = u64::from_le_bytes(pb);
    if p > 2000 {
        return Err(EllipticError::CacheFormat(format!("p = {p} out of range")));
    }
    let n = (p * p) as usize;
    let mut ap = vec![0i16; n];
    let mut singular = vec![false; n];
    let mut buf = vec![0u8; 2 * n];
    r.read_exact(&mut buf)?;
    for i in 0..n {
        let v = i16::from_le_bytes([buf[2 * i], buf[2 * i + 1]]);
        if v == SINGULAR_SENTINEL {
            singular[i] = true;
        } else {
            ap[i] = v;
        }
    }
    Ok(SweepTable { p, ap, singular })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{ap_single, ShortWeierstrassCurve};

    #[test]
    fn full_cross_check_against_direct_sums_at_small_primes() {
        for p in [5u64, 7, 11, 13, 17] {
            let table = ap_sweep(p).unwrap();
            let chi = legendre_table(p);
            for a in 0..p {
                for b in 0..p {
                    let direct = -raw_sum(&chi, p, a, b);
                    let (got, _) = table.lookup(a as i64, b as i64);
                    assert_eq!(got as i64, direct, "p={p}, (a,b)=({a},{b})");
                }
            }
        }
    }

    #[test]
    fn agrees_with_independent_ap_path_on_random_cells() {
        let table = ap_sweep(499).unwrap();
        let mut state = 424242u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut done = 0;
        while done < 1000 {
            let a = (next() % 499) as i64;
            let b = (next() % 499) as i64;
            let (v, sing) = table.lookup(a, b);
            if sing {
                continue;
            }
            let e = match ShortWeierstrassCurve::new(a, b) {
                Ok(e) => e,
                Err(_) => continue,
            };
            if !e.has_good_reduction(499) {
                continue;
            }
            assert_eq!(v as i64, ap_single(&e, 499).unwrap(), "(a,b)=({a},{b})");
            done += 1;
        }
    }

    #[test]
    fn row_sums_vanish_exactly() {
        for p in [7u64, 101, 499] {
            let table = ap_sweep(p).unwrap();
            for a in 0..p {
                assert_eq!(table.row_raw_sum(a), 0, "p={p}, row a={a}");
            }
        }
    }

    #[test]
    fn singular_locus_size_is_about_p() {
        for p in [7u64, 11, 13, 101] {
            let table = ap_sweep(p).unwrap();
            let count = table.singular.iter().filter(|&&s| s).count() as i64;
            assert!((count - p as i64).abs() <= 1, "p={p}: {count} singular cells");
        }
    }

    #[test]
    fn hasse_bound_on_nonsingular_cells() {
        let p = 997u64;
        let table = ap_sweep(p).unwrap();
        let cap = 2.0 * (p as f64).sqrt();
        for idx in 0..table.ap.len() {
            if !table.singular[idx] {
                assert!((table.ap[idx] as f64).abs() <= cap);
            }
        }
    }

    #[test]
    fn second_moment_near_p_cubed() {
        // Birch: Σ a_p² over the nonsingular locus is p³(1 + O(1/p))
        for p in [101u64, 499] {
            let table = ap_sweep(p).unwrap();
            let sum: f64 = table
                .ap
                .iter()
                .zip(table.singular.iter())
                .filter(|(_, &s)| !s)
                .map(|(&v, _)| (v as f64) * (v as f64))
                .sum();
            let ratio = sum / (p as f64).powi(3);
            assert!((ratio - 1.0).abs() < 3.0 / p as f64, "p={p}: ratio {ratio}");
        }
    }

    #[test]
    fn cache_round_trip() {
        let table = ap_sweep(13).unwrap();
        let mut buf = Vec::new();
        write_sweep(&table, &mut buf).unwrap();
        let back = read_sweep(&mut &buf[..]).unwrap();
        assert_eq!(back.p, 13);
        assert_eq!(back.singular, table.singular);
        for i in 0..table.ap.len() {
            if !table.singular[i] {
                assert_eq!(back.ap[i], table.ap[i]);
            }
        }
    }

    #[test]
    fn sweep_rejects_bad_inputs() {
        assert!(matches!(ap_sweep(2001), Err(EllipticError::SweepTooLarge(_))));
        assert!(matches!(ap_sweep(15), Err(EllipticError::BadPrime(_))));
        assert!(matches!(ap_sweep(3), Err(EllipticError::BadPrime(_))));
    }
}

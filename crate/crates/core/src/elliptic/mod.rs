//! Geometric families of elliptic curves: height-box enumeration, a_p
//! engines and full mod-p sweeps, Nagao rank sums, quadratic-twist root
//! numbers, Möbius averages over polynomial values, and the Hesse-form
//! Dwork pencil at n = 2.

mod dwork;
mod moebius;
mod nagao;
mod sweep;

pub use dwork::{dwork_hesse_ap, dwork_vertical_measure, dwork_vertical_sweep};
pub use moebius::{moebius_poly_average, IntPoly, MoebiusAverage};
pub use nagao::{nagao_rank, two_param_fiber_sum, IntPoly1, NagaoRank, OneParamFamily};
pub use sweep::{ap_sweep, read_sweep, write_sweep, SweepTable};

use thiserror::Error;

use crate::dirichlet::{is_fundamental, kronecker};
use crate::measures::{TorusMeasure, TorusPoint};

#[derive(Debug, Error)]
pub enum EllipticError {
    #[error("singular curve: 4a³ + 27b² = 0")]
    SingularCurve,
    #[error("bad reduction at p = {0}")]
    BadReduction(u64),
    #[error("prime {0} outside supported range")]
    BadPrime(u64),
    #[error("height cutoff {0} exceeds the guard 1e12")]
    BoxTooLarge(f64),
    #[error("sweep table supports p ≤ 2000, got {0}")]
    SweepTooLarge(u64),
    #[error("isotrivial family: j-invariant is constant")]
    Isotrivial,
    #[error("twist discriminant {0} not fundamental (or 1)")]
    BadTwist(i64),
    #[error("gcd({0}, 2·{1}) ≠ 1")]
    TwistNotCoprime(i64, u64),
    #[error("polynomial: {0}")]
    BadPolynomial(String),
    #[error("sieve budget exceeded: |M(w)| reaches {0}, cap 1e9")]
    SieveBudget(u64),
    #[error("singular fiber at w = {0}")]
    SingularFiber(i64),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("sweep cache format: {0}")]
    CacheFormat(String),
}

/// y² = x³ + ax + b with integer coefficients; the discriminant gauge is
/// the polynomial discriminant Δ = 4a³ + 27b² (up to sign conventions).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ShortWeierstrassCurve {
    pub a: i64,
    pub b: i64,
}

impl ShortWeierstrassCurve {
    pub fn new(a: i64, b: i64) -> Result<Self, EllipticError> {
        let c = ShortWeierstrassCurve { a, b };
        if c.disc_poly() == 0 {
            return Err(EllipticError::SingularCurve);
        }
        Ok(c)
    }

    pub fn disc_poly(&self) -> i128 {
        4 * (self.a as i128).pow(3) + 27 * (self.b as i128).pow(2)
    }

    /// Height gauge max(4|a|³, 27b²).
    pub fn height(&self) -> i128 {
        (4 * (self.a as i128).abs().pow(3)).max(27 * (self.b as i128).pow(2))
    }

    /// No u ≥ 2 with u⁴ | a and u⁶ | b (u⁴ divides 0 for every u).
    pub fn is_quasi_minimal(&self) -> bool {
        let a = self.a.unsigned_abs();
        let b = self.b.unsigned_abs();
        let mut u: u64 = 2;
        loop {
            let u4 = u.saturating_pow(4);
            let u6 = u.saturating_pow(6);
            let a_in_range = a == 0 || u4 <= a;
            let b_in_range = b == 0 || u6 <= b;
            if !(a_in_range && b_in_range) {
                return true;
            }
            let div_a = a == 0 || a % u4 == 0;
            let div_b = b == 0 || b % u6 == 0;
            if div_a && div_b {
                return false;
            }
            u += 1;
        }
    }

    pub fn has_good_reduction(&self, p: u64) -> bool {
        p > 3 && self.disc_poly().rem_euclid(p as i128) != 0
    }
}

/// Every quasi-minimal curve with max(4|a|³, 27b²) < x and Δ ≠ 0,
/// ordered (a, b) lexicographically.
pub fn enumerate_box(x: f64) -> Result<Vec<ShortWeierstrassCurve>, EllipticError> {
    if x > 1e12 {
        return Err(EllipticError::BoxTooLarge(x));
    }
    let xi = x.ceil() as i128;
    let mut a_max = 0i64;
    while 4 * ((a_max + 1) as i128).pow(3) < xi {
        a_max += 1;
    }
    let mut b_max = 0i64;
    while 27 * ((b_max + 1) as i128).pow(2) < xi {
        b_max += 1;
    }
    let mut out = Vec::new();
    for a in -a_max..=a_max {
        for b in -b_max..=b_max {
            let c = ShortWeierstrassCurve { a, b };
            if c.height() < xi && c.disc_poly() != 0 && c.is_quasi_minimal() {
                out.push(c);
            }
        }
    }
    Ok(out)
}

/// Trace of Frobenius a_p = −Σ_x (x³+ax+b | p), by Euler's criterion —
/// deliberately independent of the sweep-table code path.
pub fn ap_single(curve: &ShortWeierstrassCurve, p: u64) -> Result<i64, EllipticError> {
    if p <= 3 {
        return Err(EllipticError::BadPrime(p));
    }
    if !curve.has_good_reduction(p) {
        return Err(EllipticError::BadReduction(p));
    }
    let a = (curve.a as i128).rem_euclid(p as i128) as u64;
    let b = (curve.b as i128).rem_euclid(p as i128) as u64;
    let mut sum = 0i64;
    for x in 0..p {
        let v = (x as u128 * x as u128 % p as u128 * x as u128
            + a as u128 * x as u128
            + b as u128)
            % p as u128;
        sum += crate::dirichlet::legendre_euler(v as i64, p) as i64;
    }
    Ok(-sum)
}

/// Empirical vertical measure at p from the full sweep: atoms at
/// θ = arccos(a_p/2√p) with multiplicity weights, and the singular locus
/// as mass deficit.
pub fn vertical_measure_elliptic(table: &SweepTable) -> TorusMeasure {
    let p = table.p;
    let sqrt_p = (p as f64).sqrt();
    let mut counts: std::collections::BTreeMap<i16, u64> = std::collections::BTreeMap::new();
    let mut singular = 0u64;
    for idx in 0..(p * p) as usize {
        if table.singular[idx] {
            singular += 1;
        } else {
            *counts.entry(table.ap[idx]).or_insert(0) += 1;
        }
    }
    let total = (p * p) as f64;
    let atoms = counts
        .into_iter()
        .map(|(ap, count)| {
            let cos = (ap as f64 / (2.0 * sqrt_p)).clamp(-1.0, 1.0);
            let theta = cos.acos();
            (TorusPoint::new(vec![theta, -theta]), count as f64 / total)
        })
        .collect();
    let _ = singular;
    TorusMeasure::atomic(atoms)
}

/// Sup-distance between the CDF of a rank-2 (θ, −θ) atomic measure and
/// the sin² law F(θ) = (θ − sin θ cos θ)/π. The measure is renormalized
/// to probability before comparing.
pub fn cdf_distance_to_sine_squared(mu: &TorusMeasure) -> f64 {
    let mut atoms: Vec<(f64, f64)> = mu
        .atoms()
        .expect("atomic measure")
        .into_iter()
        .map(|(pt, w)| (*pt.angles().last().unwrap(), w))
        .collect();
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mass: f64 = atoms.iter().map(|(_, w)| w).sum();
    let st_cdf = |t: f64| (t - t.sin() * t.cos()) / std::f64::consts::PI;
    let mut acc = 0.0;
    let mut worst: f64 = 0.0;
    for (theta, w) in atoms {
        let f = st_cdf(theta);
        worst = worst.max((acc / mass - f).abs());
        acc += w;
        worst = worst.max((acc / mass - f).abs());
    }
    worst
}

/// Root number of the quadratic twist E_d of a base curve with declared
/// sign ε₀ and conductor N₀: ε(E_d) = χ_d(−N₀)·ε₀, valid for
/// gcd(d, 2N₀) = 1. The base invariants are supplied, not computed.
pub fn twist_root_number(eps0: i32, n0: u64, d: i64) -> Result<i32, EllipticError> {
    if d == 1 {
        return Ok(eps0);
    }
    if !is_fundamental(d) {
        return Err(EllipticError::BadTwist(d));
    }
    if gcd_i(d.unsigned_abs(), 2 * n0) != 1 {
        return Err(EllipticError::TwistNotCoprime(d, n0));
    }
    Ok(kronecker(d, -(n0 as i64)) * eps0)
}

fn gcd_i(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_i(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_at_thirty() {
        let curves = enumerate_box(30.0).unwrap();
        let set: std::collections::HashSet<(i64, i64)> = curves.iter().map(|c| (c.a, c.b)).collect();
        for present in [(1, 1), (-1, 1), (1, -1), (-1, -1), (0, 1), (0, -1), (1, 0), (-1, 0)] {
            assert!(set.contains(&present), "{present:?} missing");
        }
        assert!(!set.contains(&(0, 0)));
        // 4·2³ = 32 ≥ 30 keeps |a| ≤ 1; 27·1² = 27 < 30 keeps |b| ≤ 1
        assert_eq!(set.len(), 8);
    }

    #[test]
    fn quasi_minimal_sieve() {
        assert!(!ShortWeierstrassCurve { a: 16, b: 64 }.is_quasi_minimal());
        assert!(ShortWeierstrassCurve { a: 16, b: 32 }.is_quasi_minimal());
        assert!(ShortWeierstrassCurve { a: 1, b: 1 }.is_quasi_minimal());
        // a = 0 demands a sixth-power-free b
        assert!(!ShortWeierstrassCurve { a: 0, b: 64 }.is_quasi_minimal());
        assert!(ShortWeierstrassCurve { a: 0, b: 32 }.is_quasi_minimal());
        assert!(!ShortWeierstrassCurve { a: 81 * 9, b: 0 }.is_quasi_minimal());
    }

    #[test]
    fn box_count_grows_like_five_sixths() {
        let x = 20_000.0;
        let n1 = enumerate_box(x).unwrap().len() as f64;
        let n2 = enumerate_box(64.0 * x).unwrap().len() as f64;
        let ratio = n2 / n1;
        // 64^{5/6} = 32
        assert!((ratio - 32.0).abs() < 5.0, "growth ratio {ratio}");
    }

    #[test]
    fn ap_pinned_small_curves() {
        // y² = x³ − x: supersingular at p = 3 is out of range (p > 3);
        // a₅ = −2 from the 8-point count
        let e = ShortWeierstrassCurve::new(-1, 0).unwrap();
        assert_eq!(ap_single(&e, 5).unwrap(), -2);
        // point-count oracle at p = 5, 7: a_p = p + 1 − #E(𝔽_p)
        for p in [5u64, 7, 11, 13] {
            let mut points = 1u64; // at infinity
            for x in 0..p {
                for y in 0..p {
                    if (y * y) % p == ((x * x % p) * x + p * p - x) % p {
                        points += 1;
                    }
                }
            }
            assert_eq!(ap_single(&e, p).unwrap(), p as i64 + 1 - points as i64, "p = {p}");
        }
    }

    #[test]
    fn ap_rejects_bad_reduction() {
        let e = ShortWeierstrassCurve::new(-1, 0).unwrap(); // Δ = −4
        assert!(matches!(ap_single(&e, 2), Err(EllipticError::BadPrime(2))));
        let e2 = ShortWeierstrassCurve::new(0, 7).unwrap(); // Δ = 27·49
        assert!(matches!(ap_single(&e2, 7), Err(EllipticError::BadReduction(7))));
    }

    #[test]
    fn hasse_bound_on_random_pairs() {
        let primes = crate::util::primes::primes_up_to(300);
        let mut state = 7u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut done = 0;
        while done < 2000 {
            let a = (next() % 41) as i64 - 20;
            let b = (next() % 41) as i64 - 20;
            let p = primes[(next() % (primes.len() as u64 - 2) + 2) as usize];
            let Ok(e) = ShortWeierstrassCurve::new(a, b) else { continue };
            if !e.has_good_reduction(p) {
                continue;
            }
            let ap = ap_single(&e, p).unwrap();
            assert!((ap * ap) as f64 <= 4.0 * p as f64, "Hasse fails: a_p = {ap}, p = {p}");
            done += 1;
        }
    }

    #[test]
    fn scaling_invariance_of_ap() {
        // (a, b) and (u⁴a, u⁶b) share a_p for p ∤ u
        for (a, b) in [(-1i64, 1i64), (2, 3), (-5, 7)] {
            let e = ShortWeierstrassCurve::new(a, b).unwrap();
            for u in [2i64, 3] {
                let scaled = ShortWeierstrassCurve::new(a * u.pow(4), b * u.pow(6)).unwrap();
                for p in [7u64, 11, 13, 101] {
                    if p as i64 == u || !e.has_good_reduction(p) {
                        continue;
                    }
                    assert_eq!(
                        ap_single(&e, p).unwrap(),
                        ap_single(&scaled, p).unwrap(),
                        "(a,b)=({a},{b}), u={u}, p={p}"
                    );
                }
            }
        }
    }

    #[test]
    fn twist_root_number_pinned() {
        // base y² = x³ − x: N₀ = 32, ε₀ = +1; d = 5 gives χ₅(−32) = −1
        assert_eq!(twist_root_number(1, 32, 5).unwrap(), -1);
        assert_eq!(twist_root_number(1, 32, 1).unwrap(), 1);
        assert!(matches!(twist_root_number(1, 32, 12), Err(EllipticError::TwistNotCoprime(_, _))));
        assert!(matches!(twist_root_number(1, 32, 9), Err(EllipticError::BadTwist(9))));
    }

    #[test]
    fn twist_average_vanishes() {
        // Kronecker-symbol equidistribution: the ε-average over
        // fundamental d coprime to 2N₀ is o(1)
        let ds = crate::dirichlet::enumerate_fundamental(100_000.0).unwrap();
        let mut sum = 0i64;
        let mut count = 0i64;
        for d in ds {
            match twist_root_number(1, 32, d.value()) {
                Ok(e) => {
                    sum += e as i64;
                    count += 1;
                }
                Err(_) => continue,
            }
        }
        let avg = sum as f64 / count as f64;
        assert!(avg.abs() < 0.02, "average root number {avg} over {count} twists");
    }
}

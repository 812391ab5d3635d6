//! Primitive Dirichlet characters: the quadratic family ordered by
//! conductor, Kronecker symbols, the universal GL(1) family, and
//! per-prime vertical measures.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::measures::{SpectralSample, TorusMeasure, TorusPoint};
use crate::util::primes::squarefree_table;

#[derive(Debug, Error)]
pub enum DirichletError {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("cutoff {0} below minimum 3")]
    CutoffTooSmall(f64),
    #[error("primes must be distinct")]
    EqualPrimes,
    #[error("enumeration cutoff {0} exceeds the memory guard {1}")]
    CutoffTooLarge(u64, u64),
    #[error("under-sampled: window x = {0} too small for prime {1}")]
    UnderSampled(f64, u64),
}

/// A fundamental discriminant: d ≡ 1 mod 4 squarefree, or d = 4m with
/// m ≡ 2, 3 mod 4 squarefree; d ≠ 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FundamentalDiscriminant(i64);

impl FundamentalDiscriminant {
    pub fn new(d: i64) -> Result<Self, DirichletError> {
        if is_fundamental(d) {
            Ok(FundamentalDiscriminant(d))
        } else {
            Err(DirichletError::NotFundamental(d))
        }
    }

    pub fn value(&self) -> i64 {
        self.0
    }

    /// The analytic conductor |d|.
    pub fn conductor(&self) -> u64 {
        self.0.unsigned_abs()
    }

    /// Parity of the associated character: 0 for even (d > 0), 1 for odd.
    pub fn parity(&self) -> u32 {
        if self.0 > 0 {
            0
        } else {
            1
        }
    }

    /// χ_d(n) as the Kronecker symbol (d|n).
    pub fn chi(&self, n: i64) -> i32 {
        kronecker(self.0, n)
    }
}

/// Definitional predicate for fundamental discriminants.
pub fn is_fundamental(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    let r4 = d.rem_euclid(4);
    if r4 == 1 {
        return is_squarefree_i64(d);
    }
    if r4 == 0 {
        let m = d / 4;
        let mr = m.rem_euclid(4);
        return (mr == 2 || mr == 3) && is_squarefree_i64(m);
    }
    false
}

fn is_squarefree_i64(n: i64) -> bool {
    let mut n = n.unsigned_abs();
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// All fundamental discriminants with |d| ≤ x, sorted by (|d|, d), via a
/// squarefree sieve up to x.
pub fn enumerate_fundamental(x: f64) -> Result<Vec<FundamentalDiscriminant>, DirichletError> {
    if x < 3.0 {
        return Err(DirichletError::CutoffTooSmall(x));
    }
    let limit = x.floor() as u64;
    let sf = squarefree_table(limit);
    let mut out = Vec::new();
    for a in 2..=limit {
        for d in [a as i64, -(a as i64)] {
            let r4 = d.rem_euclid(4);
            let fundamental = if r4 == 1 {
                sf[a as usize]
            } else if r4 == 0 {
                let m = d / 4;
                let mr = m.rem_euclid(4);
                (mr == 2 || mr == 3) && sf[m.unsigned_abs() as usize]
            } else {
                false
            };
            if fundamental {
                out.push(FundamentalDiscriminant(d));
            }
        }
    }
    out.sort_by_key(|d| (d.conductor(), d.value()));
    Ok(out)
}

/// Kronecker symbol (d|n), fully extended to all integers.
pub fn kronecker(d: i64, n: i64) -> i32 {
    let mut a = d;
    let mut n = n;
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut sign = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    let mut e = 0u32;
    while n % 2 == 0 {
        n /= 2;
        e += 1;
    }
    if e > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if e % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
    }
    // Jacobi symbol (a|n) for odd n > 0
    a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n.rem_euclid(8);
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            sign = -sign;
        }
        a = a.rem_euclid(n);
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// Legendre symbol by Euler's criterion; independent oracle for
/// [`kronecker`] at odd primes.
pub fn legendre_euler(a: i64, p: u64) -> i32 {
    let am = a.rem_euclid(p as i64) as u64;
    if am == 0 {
        return 0;
    }
    let r = crate::util::primes::pow_mod(am, (p - 1) / 2, p);
    if r == 1 {
        1
    } else {
        -1
    }
}

/// Tallies of χ_d(p) over the quadratic family window |d| ≤ x.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QuadraticVertical {
    pub plus: f64,
    pub minus: f64,
    pub ramified: f64,
    pub members: usize,
}

/// The vertical measure of the quadratic family at p: atoms at angle 0
/// (χ_d(p) = 1) and π (χ_d(p) = −1), with the ramified proportion as the
/// mass deficit.
pub fn vertical_measure_quadratic(
    p: u64,
    x: f64,
) -> Result<(TorusMeasure, QuadraticVertical), DirichletError> {
    if (p as f64) >= x {
        return Err(DirichletError::UnderSampled(x, p));
    }
    let ds = enumerate_fundamental(x)?;
    let mut counts = [0usize; 3];
    for d in &ds {
        match d.chi(p as i64) {
            1 => counts[0] += 1,
            -1 => counts[1] += 1,
            _ => counts[2] += 1,
        }
    }
    let n = ds.len() as f64;
    let stats = QuadraticVertical {
        plus: counts[0] as f64 / n,
        minus: counts[1] as f64 / n,
        ramified: counts[2] as f64 / n,
        members: ds.len(),
    };
    let mu = TorusMeasure::atomic(vec![
        (TorusPoint::new(vec![0.0]), stats.plus),
        (TorusPoint::new(vec![PI]), stats.minus),
    ]);
    Ok((mu, stats))
}

/// Same tallies as an empirical measure over the family members,
/// ramified members kept as deficit markers.
pub fn empirical_measure_quadratic(p: u64, x: f64) -> Result<TorusMeasure, DirichletError> {
    let ds = enumerate_fundamental(x)?;
    let samples = ds
        .iter()
        .map(|d| match d.chi(p as i64) {
            1 => SpectralSample::Unramified(TorusPoint::new(vec![0.0])),
            -1 => SpectralSample::Unramified(TorusPoint::new(vec![PI])),
            _ => SpectralSample::Ramified { conductor_exponent: 1 },
        })
        .collect();
    Ok(TorusMeasure::empirical(samples))
}

/// 3×3 joint contingency table over {+1, −1, ram}² for two primes,
/// with the independence defect max|joint − product of marginals|.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JointTable {
    pub freq: [[f64; 3]; 3],
    pub defect: f64,
    pub members: usize,
    pub under_sampled: bool,
}

pub fn joint_vertical_quadratic(p: u64, q: u64, x: f64) -> Result<JointTable, DirichletError> {
    if p == q {
        return Err(DirichletError::EqualPrimes);
    }
    let ds = enumerate_fundamental(x)?;
    let idx = |c: i32| match c {
        1 => 0usize,
        -1 => 1,
        _ => 2,
    };
    let mut counts = [[0usize; 3]; 3];
    for d in &ds {
        counts[idx(d.chi(p as i64))][idx(d.chi(q as i64))] += 1;
    }
    let n = ds.len() as f64;
    let mut freq = [[0.0; 3]; 3];
    let mut row = [0.0; 3];
    let mut col = [0.0; 3];
    for i in 0..3 {
        for j in 0..3 {
            freq[i][j] = counts[i][j] as f64 / n;
            row[i] += freq[i][j];
            col[j] += freq[i][j];
        }
    }
    let mut defect: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            defect = defect.max((freq[i][j] - row[i] * col[j]).abs());
        }
    }
    let under_sampled = ds.len() < 1000 || n / (p as f64 * q as f64) < 5.0;
    Ok(JointTable { freq, defect, members: ds.len(), under_sampled })
}

// --- primitive characters of general modulus ---

/// A local component: the character on (ℤ/p^k)^× with exponent `exp`
/// relative to the fixed generator convention (smallest primitive root
/// lifted to p^k for odd p; the (−1, 5) generator pair at p = 2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalComponent {
    pub p: u64,
    pub k: u32,
    /// Exponent of the cyclic generator; for p = 2, k ≥ 3 the exponent
    /// of 5.
    pub exp: u64,
    /// Exponent of −1 (p = 2, k ≥ 2 only).
    pub exp_minus: u8,
}

/// A primitive character of conductor q, stored by local components.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveCharacter {
    pub q: u64,
    pub components: Vec<LocalComponent>,
}

impl PrimitiveCharacter {
    /// χ(n): completely multiplicative on residues coprime to q, zero
    /// otherwise.
    pub fn eval(&self, n: u64, tables: &CharacterTables) -> num_complex::Complex64 {
        use num_complex::Complex64;
        let mut angle = 0.0f64;
        for c in &self.components {
            let pk = c.p.pow(c.k);
            let r = n % pk;
            if r % c.p == 0 {
                return Complex64::new(0.0, 0.0);
            }
            if c.p == 2 {
                let (s, t) = tables.dlog2(c.k, r);
                let ord = 1u64 << c.k.saturating_sub(2);
                angle += std::f64::consts::TAU
                    * ((c.exp_minus as u64 * s) as f64 / 2.0 + (c.exp as f64 * t as f64) / ord.max(1) as f64);
            } else {
                let t = tables.dlog_odd(c.p, c.k, r);
                let phi = pk / c.p * (c.p - 1);
                angle += std::f64::consts::TAU * (c.exp as f64 * t as f64) / phi as f64;
            }
        }
        Complex64::from_polar(1.0, angle)
    }
}

/// Discrete-log tables per prime power, built once per enumeration.
#[derive(Default)]
pub struct CharacterTables {
    odd: std::collections::HashMap<(u64, u32), Vec<u32>>,
    two: std::collections::HashMap<u32, Vec<(u8, u32)>>,
}

impl CharacterTables {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn prepare(&mut self, p: u64, k: u32) {
        if p == 2 {
            if k >= 2 {
                self.two.entry(k).or_insert_with(|| {
                    let pk = 2u64.pow(k);
                    let mut table = vec![(0u8, 0u32); pk as usize];
                    let ord = 1u64 << k.saturating_sub(2);
                    for s in 0..2u64 {
                        for t in 0..ord.max(1) {
                            let v = pow_mod_u(pk - 1, s, pk) * pow_mod_u(5 % pk, t, pk) % pk;
                            table[v as usize] = (s as u8, t as u32);
                        }
                    }
                    table
                });
            }
        } else {
            self.odd.entry((p, k)).or_insert_with(|| {
                let pk = p.pow(k);
                let g = primitive_root_pk(p);
                let phi = pk / p * (p - 1);
                let mut table = vec![0u32; pk as usize];
                let mut acc = 1u64;
                for t in 0..phi {
                    table[acc as usize] = t as u32;
                    acc = acc * (g % pk) % pk;
                }
                table
            });
        }
    }

    pub fn prepare_for(&mut self, chi: &PrimitiveCharacter) {
        for c in &chi.components {
            self.prepare(c.p, c.k);
        }
    }

    fn dlog_odd(&self, p: u64, k: u32, r: u64) -> u32 {
        self.odd[&(p, k)][r as usize]
    }

    fn dlog2(&self, k: u32, r: u64) -> (u64, u64) {
        if k == 1 {
            return (0, 0);
        }
        let (s, t) = self.two[&k][r as usize];
        (s as u64, t as u64)
    }
}

fn pow_mod_u(b: u64, e: u64, m: u64) -> u64 {
    crate::util::primes::pow_mod(b, e, m)
}

/// Smallest primitive root mod p, bumped by p when its order fails to
/// lift to p² (so the returned g generates (ℤ/p^k)^× for every k).
fn primitive_root_pk(p: u64) -> u64 {
    let phi = p - 1;
    let mut fac = Vec::new();
    let mut m = phi;
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            fac.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        fac.push(m);
    }
    'outer: for g in 2..p {
        for &f in &fac {
            if pow_mod_u(g, phi / f, p) == 1 {
                continue 'outer;
            }
        }
        if pow_mod_u(g, phi, p * p) == 1 {
            return g + p;
        }
        return g;
    }
    unreachable!("every prime has a primitive root")
}

/// Count of primitive characters of conductor exactly p^k.
pub fn primitive_count_local(p: u64, k: u32) -> u64 {
    if k == 0 {
        return 1;
    }
    if p == 2 {
        return match k {
            1 => 0,
            2 => 1,
            _ => 1u64 << (k - 2),
        };
    }
    let phi_k = p.pow(k - 1) * (p - 1);
    if k == 1 {
        phi_k - 1
    } else {
        phi_k - p.pow(k - 2) * (p - 1)
    }
}

/// Streams every primitive character of conductor 3 ≤ q ≤ x; the trivial
/// character (q = 1) is excluded. The guard bounds table memory.
pub fn enumerate_primitive(x: u64, guard: u64) -> Result<PrimitiveCharacterIter, DirichletError> {
    if x > guard {
        return Err(DirichletError::CutoffTooLarge(x, guard));
    }
    Ok(PrimitiveCharacterIter { x, q: 2, pending: Vec::new() })
}

pub struct PrimitiveCharacterIter {
    x: u64,
    q: u64,
    pending: Vec<PrimitiveCharacter>,
}

impl Iterator for PrimitiveCharacterIter {
    type Item = PrimitiveCharacter;

    fn next(&mut self) -> Option<PrimitiveCharacter> {
        loop {
            if let Some(c) = self.pending.pop() {
                return Some(c);
            }
            self.q += 1;
            if self.q > self.x {
                return None;
            }
            self.pending = primitive_characters_mod(self.q);
        }
    }
}

/// All primitive characters of conductor exactly q, as products of
/// primitive local components. Empty for q ≤ 2 (the trivial character is
/// excluded and no primitive character exists mod 2).
pub fn primitive_characters_mod(q: u64) -> Vec<PrimitiveCharacter> {
    if q <= 2 {
        return Vec::new();
    }
    let mut factors = Vec::new();
    let mut m = q;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut k = 0u32;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            factors.push((p, k));
        }
        p += 1;
    }
    if m > 1 {
        factors.push((m, 1));
    }
    let mut out: Vec<Vec<LocalComponent>> = vec![Vec::new()];
    for &(p, k) in &factors {
        let locals = primitive_local_components(p, k);
        if locals.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(out.len() * locals.len());
        for base in &out {
            for l in &locals {
                let mut case = base.clone();
                case.push(l.clone());
                next.push(case);
            }
        }
        out = next;
    }
    out.into_iter().map(|components| PrimitiveCharacter { q, components }).collect()
}

fn primitive_local_components(p: u64, k: u32) -> Vec<LocalComponent> {
    let mut out = Vec::new();
    if p == 2 {
        match k {
            1 => {}
            2 => out.push(LocalComponent { p, k, exp: 0, exp_minus: 1 }),
            _ => {
                // primitive iff the exponent of 5 is odd
                let ord = 1u64 << (k - 2);
                for exp_minus in 0..2u8 {
                    for exp in (1..ord).step_by(2) {
                        out.push(LocalComponent { p, k, exp, exp_minus });
                    }
                }
            }
        }
    } else {
        let phi = p.pow(k - 1) * (p - 1);
        for exp in 1..phi {
            // conductor drops to p^{k−1} exactly when p divides the exponent
            let primitive = if k == 1 { true } else { exp % p != 0 };
            if primitive {
                out.push(LocalComponent { p, k, exp, exp_minus: 0 });
            }
        }
    }
    out
}

/// Empirical conductor-stratum masses of the universal family at p.
/// Entry k holds (k, empirical share of characters with p^k ∥ q, model),
/// the model being a·c(p,k)·p^{−2k} with c(p,k) the primitive-character
/// count at level p^k and a = p³/((p−1)(p+1)²) the k = 0 value.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalProfile {
    pub p: u64,
    pub strata: Vec<(u32, f64, f64)>,
    pub total_characters: usize,
}

pub fn universal_local_profile(p: u64, x: u64) -> Result<LocalProfile, DirichletError> {
    let iter = enumerate_primitive(x, 10_000)?;
    let mut counts: Vec<usize> = Vec::new();
    let mut total = 0usize;
    for chi in iter {
        let mut k = 0u32;
        let mut q = chi.q;
        while q % p == 0 {
            q /= p;
            k += 1;
        }
        if counts.len() <= k as usize {
            counts.resize(k as usize + 1, 0);
        }
        counts[k as usize] += 1;
        total += 1;
    }
    let pf = p as f64;
    let a = pf * pf * pf / ((pf - 1.0) * (pf + 1.0) * (pf + 1.0));
    let strata = counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let model = a * primitive_count_local(p, k as u32) as f64 / pf.powi(2 * k as i32);
            (k as u32, c as f64 / total as f64, model)
        })
        .collect();
    Ok(LocalProfile { p, strata, total_characters: total })
}

/// Writes the fundamental-discriminant list as versioned CSV
/// (header `format=fd,v1`, one d per line).
pub fn write_fd_csv(ds: &[FundamentalDiscriminant], w: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(w, "format=fd,v1")?;
    for d in ds {
        writeln!(w, "{}", d.value())?;
    }
    Ok(())
}

pub fn read_fd_csv(r: &mut impl std::io::BufRead) -> std::io::Result<Vec<FundamentalDiscriminant>> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    if line.trim() != "format=fd,v1" {
        return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, "bad fd cache header"));
    }
    let mut out = Vec::new();
    let mut l = String::new();
    loop {
        l.clear();
        if r.read_line(&mut l)? == 0 {
            break;
        }
        if l.trim().is_empty() {
            continue;
        }
        let d: i64 = l
            .trim()
            .parse()
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{e}")))?;
        out.push(
            FundamentalDiscriminant::new(d)
                .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, format!("{e}")))?,
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_up_to_nine() {
        let ds = enumerate_fundamental(9.0).unwrap();
        let vals: Vec<i64> = ds.iter().map(|d| d.value()).collect();
        let mut expected = vec![-8, -7, -4, -3, 5, 8];
        expected.sort_by_key(|d: &i64| (d.unsigned_abs(), *d));
        assert_eq!(vals, expected);
    }

    #[test]
    fn nine_is_not_fundamental() {
        assert!(!is_fundamental(9)); // ≡ 1 mod 4 but 9 = 3²
        assert!(!is_fundamental(1));
        assert!(is_fundamental(-3));
        assert!(is_fundamental(-4));
        assert!(is_fundamental(8));
        assert!(!is_fundamental(48));
    }

    #[test]
    fn predicate_and_sieve_agree_exhaustively() {
        let ds = enumerate_fundamental(10_000.0).unwrap();
        let from_sieve: std::collections::HashSet<i64> = ds.iter().map(|d| d.value()).collect();
        for a in 2..=10_000i64 {
            for d in [a, -a] {
                assert_eq!(from_sieve.contains(&d), is_fundamental(d), "d = {d}");
            }
        }
    }

    #[test]
    fn fundamental_density_near_six_over_pi_squared() {
        let x = 1_000_000.0;
        let count = enumerate_fundamental(x).unwrap().len() as f64;
        // both signs combined give density 6/π²
        let density = count / x;
        let expect = 6.0 / (PI * PI);
        assert!((density - expect).abs() / expect < 0.005, "density {density} vs {expect}");
    }

    #[test]
    fn kronecker_pinned_values() {
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(5, 4), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(5, -32), -1);
        assert_eq!(kronecker(-8, 3), 1);
    }

    #[test]
    fn kronecker_completely_multiplicative() {
        let mut state = 0x12345u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..100_000 {
            let d = (next() % 2000) as i64 - 1000;
            let m = (next() % 500) as i64 - 250;
            let n = (next() % 500) as i64 - 250;
            assert_eq!(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n), "d={d} m={m} n={n}");
        }
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        let primes = crate::util::primes::primes_up_to(500);
        let mut state = 0x9876u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let mut checked = 0;
        while checked < 100_000 {
            let d = (next() % 4000) as i64 - 2000;
            let p = primes[(next() % (primes.len() as u64 - 1) + 1) as usize];
            if d == 0 || d % (p as i64) == 0 {
                continue;
            }
            assert_eq!(kronecker(d, p as i64), legendre_euler(d, p), "d={d}, p={p}");
            checked += 1;
        }
    }

    #[test]
    fn quadratic_vertical_masses_partition() {
        let (_mu, stats) = vertical_measure_quadratic(13, 50_000.0).unwrap();
        assert!((stats.plus + stats.minus + stats.ramified - 1.0).abs() < 1e-15);
        let p = 13.0;
        assert!((stats.plus - p / (2.0 * (p + 1.0))).abs() < 0.01);
        assert!((stats.minus - p / (2.0 * (p + 1.0))).abs() < 0.01);
        assert!((stats.ramified - 1.0 / (p + 1.0)).abs() < 0.005);
    }

    #[test]
    fn joint_independence_defect_small() {
        let t = joint_vertical_quadratic(13, 17, 200_000.0).unwrap();
        assert!(!t.under_sampled);
        assert!(t.defect <= 0.01, "defect {}", t.defect);
    }

    #[test]
    fn joint_rejects_equal_primes() {
        assert!(matches!(joint_vertical_quadratic(7, 7, 1000.0), Err(DirichletError::EqualPrimes)));
    }

    #[test]
    fn joint_flags_tiny_window() {
        let t = joint_vertical_quadratic(13, 17, 100.0).unwrap();
        assert!(t.under_sampled);
    }

    #[test]
    fn primitive_counts_small_moduli() {
        // five primitive characters with q ≤ 5: one mod 3, one mod 4,
        // three mod 5
        let n = enumerate_primitive(5, 10_000).unwrap().count();
        assert_eq!(n, 5);
        assert_eq!(primitive_characters_mod(1).len(), 0);
        assert_eq!(primitive_characters_mod(2).len(), 0);
        assert_eq!(primitive_characters_mod(8).len(), 2);
        assert_eq!(primitive_characters_mod(9).len(), 4);
        assert_eq!(primitive_characters_mod(12).len(), 1);
    }

    #[test]
    fn primitive_counts_match_moebius_phi_formula() {
        // independent oracle: #primitive mod q = Σ_{d|q} μ(q/d) φ(d)
        let mu = crate::util::primes::moebius_table(1000);
        let mut phi: Vec<u64> = (0..=1000u64).collect();
        for p in 2..=1000usize {
            if phi[p] == p as u64 {
                for m in (p..=1000).step_by(p) {
                    phi[m] -= phi[m] / p as u64;
                }
            }
        }
        for q in 2..=1000u64 {
            let direct: i64 = (1..=q)
                .filter(|d| q % d == 0)
                .map(|d| mu[(q / d) as usize] as i64 * phi[d as usize] as i64)
                .sum();
            assert_eq!(primitive_characters_mod(q).len() as i64, direct, "q = {q}");
        }
    }

    #[test]
    fn character_evaluation_is_multiplicative() {
        let mut tables = CharacterTables::new();
        for chi in primitive_characters_mod(45) {
            tables.prepare_for(&chi);
            for m in 1..45u64 {
                for n in 1..45u64 {
                    let lhs = chi.eval(m * n % 45, &tables);
                    let rhs = chi.eval(m, &tables) * chi.eval(n, &tables);
                    assert!((lhs - rhs).norm() < 1e-10, "χ mod 45 at ({m},{n})");
                }
            }
        }
    }

    #[test]
    fn character_conductor_is_exact() {
        // a primitive χ mod q must not be constant on any coprime
        // congruence class structure of a proper divisor: spot-check by
        // verifying χ is nontrivial on the kernel of reduction mod q/p.
        let mut tables = CharacterTables::new();
        for q in [8u64, 9, 16, 25, 27, 45] {
            for chi in primitive_characters_mod(q) {
                tables.prepare_for(&chi);
                for p in [2u64, 3, 5].iter().filter(|&&p| q % p == 0) {
                    let q0 = q / p;
                    let nontrivial = (1..q)
                        .filter(|n| n % q0 == 1 && gcd(*n, q) == 1)
                        .any(|n| (chi.eval(n, &tables) - num_complex::Complex64::new(1.0, 0.0)).norm() > 1e-9);
                    assert!(nontrivial, "χ mod {q} factors through {q0}");
                }
            }
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn quadratic_character_agrees_with_kronecker() {
        let mut tables = CharacterTables::new();
        let chis = primitive_characters_mod(5);
        let real: Vec<_> = chis
            .iter()
            .filter(|c| {
                let mut t = CharacterTables::new();
                t.prepare_for(c);
                (1..5).all(|n| c.eval(n, &t).im.abs() < 1e-12)
            })
            .collect();
        assert_eq!(real.len(), 1);
        tables.prepare_for(real[0]);
        for n in 0..10i64 {
            let v = real[0].eval(n as u64 % 5, &tables).re;
            assert!((v - kronecker(5, n) as f64).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn universal_profile_strata_sum_to_one() {
        let prof = universal_local_profile(2, 500).unwrap();
        let total: f64 = prof.strata.iter().map(|(_, m, _)| m).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fd_csv_round_trip() {
        let ds = enumerate_fundamental(100.0).unwrap();
        let mut buf = Vec::new();
        write_fd_csv(&ds, &mut buf).unwrap();
        let back = read_fd_csv(&mut std::io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(ds, back);
    }
}

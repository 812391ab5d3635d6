//! Rank of a one-parameter family by Nagao's prime sum
//! r̂(x) = (1/x) Σ_{p≤x} −A_p log p, with A_p the fiber-average of a_p
//! over w ∈ 𝔽_p. Singular fibers enter through the point count of the
//! singular cubic itself, which absorbs the node and cusp corrections.

use rayon::prelude::*;

use super::sweep::legendre_table;
use super::EllipticError;
use crate::util::primes::primes_up_to;
use crate::util::sum::pairwise_sum;

/// Integer polynomial in one variable, dense coefficients, constant first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly1(pub Vec<i64>);

impl IntPoly1 {
    pub fn constant(c: i64) -> Self {
        IntPoly1(vec![c])
    }

    pub fn eval_i128(&self, w: i128) -> i128 {
        let mut acc = 0i128;
        for &c in self.0.iter().rev() {
            acc = acc * w + c as i128;
        }
        acc
    }

    pub fn eval_mod(&self, w: u64, p: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.0.iter().rev() {
            acc = (acc * w + c.rem_euclid(p as i64) as u64) % p;
        }
        acc
    }
}

/// A pencil of plane cubics y² = x³ + c₂(w)x² + c₁(w)x + c₀(w).
#[derive(Clone, Debug)]
pub struct OneParamFamily {
    pub name: String,
    pub c2: IntPoly1,
    pub c1: IntPoly1,
    pub c0: IntPoly1,
}

impl OneParamFamily {
    /// Washington's family y² = x³ + wx² − (w+3)x + 1, of generic rank 1.
    pub fn washington() -> Self {
        OneParamFamily {
            name: "washington".into(),
            c2: IntPoly1(vec![0, 1]),
            c1: IntPoly1(vec![-3, -1]),
            c0: IntPoly1::constant(1),
        }
    }

    /// y² = x³ + wx + 2, a rank-0 pencil. (The tempting x³ + wx + 1
    /// carries the section (0, 1) on every fiber and is rank 1, which the
    /// partial-sum trend confirms — hence the constant 2 here.)
    pub fn generic_rank_zero() -> Self {
        OneParamFamily {
            name: "generic".into(),
            c2: IntPoly1::constant(0),
            c1: IntPoly1(vec![0, 1]),
            c0: IntPoly1::constant(2),
        }
    }

    /// y² = x³ + wx + 1, whose constant section (0, 1) has infinite order
    /// generically; kept as a rank-1 cross-check family.
    pub fn unit_section_rank_one() -> Self {
        OneParamFamily {
            name: "unit-section".into(),
            c2: IntPoly1::constant(0),
            c1: IntPoly1(vec![0, 1]),
            c0: IntPoly1::constant(1),
        }
    }

    /// (c4, c6) invariants at parameter w, in the standard normalization
    /// for a monic cubic in x.
    fn c4_c6(&self, w: i128) -> (i128, i128) {
        let a2 = self.c2.eval_i128(w);
        let a4 = self.c1.eval_i128(w);
        let a6 = self.c0.eval_i128(w);
        let b2 = 4 * a2;
        let b4 = 2 * a4;
        let b6 = 4 * a6;
        let c4 = b2 * b2 - 24 * b4;
        let c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
        (c4, c6)
    }

    /// Non-isotriviality check: the j-invariant is compared at three
    /// smooth parameter values by cross-multiplication.
    pub fn is_isotrivial(&self) -> bool {
        let mut samples: Vec<(i128, i128)> = Vec::new();
        let mut w = 0i128;
        while samples.len() < 3 && w < 100 {
            let (c4, c6) = self.c4_c6(w);
            let disc1728 = c4 * c4 * c4 - c6 * c6;
            if disc1728 != 0 {
                samples.push((c4 * c4 * c4, disc1728));
            }
            w += 1;
        }
        if samples.len() < 3 {
            return true;
        }
        let (n0, d0) = samples[0];
        samples.iter().all(|&(n, d)| n0 * d == n * d0)
    }

    /// A_p = (1/p) Σ_{w ∈ 𝔽_p} a_p(E_w), every fiber counted through the
    /// projective points of the (possibly singular) reduced cubic.
    pub fn fiber_average(&self, p: u64) -> f64 {
        let chi = legendre_table(p);
        let mut total = 0i64;
        for w in 0..p {
            let a2 = self.c2.eval_mod(w, p);
            let a1 = self.c1.eval_mod(w, p);
            let a0 = self.c0.eval_mod(w, p);
            // a_p(E_w) = −Σ_x χ(f_w(x)); the point at infinity is smooth on
            // the projective closure even over singular fibers
            let mut s = 0i64;
            for x in 0..p {
                let v = (((x + a2) % p * x + a1) % p * x + a0) % p;
                s += chi[v as usize] as i64;
            }
            total += -s;
        }
        total as f64 / p as f64
    }
}

/// Nagao's estimate with its log-weighted partial sums.
#[derive(Clone, Debug)]
pub struct NagaoRank {
    pub estimate: f64,
    /// (prime cutoff y, r̂(y)) along the prime list.
    pub partials: Vec<(u64, f64)>,
}

/// r̂(x) over odd primes 5 ≤ p ≤ x; parallel over primes, reduced in
/// fixed order.
pub fn nagao_rank(family: &OneParamFamily, x: u64) -> Result<NagaoRank, EllipticError> {
    if family.is_isotrivial() {
        return Err(EllipticError::Isotrivial);
    }
    let primes: Vec<u64> = primes_up_to(x).into_iter().filter(|&p| p >= 5).collect();
    let terms: Vec<f64> = primes
        .par_iter()
        .map(|&p| -family.fiber_average(p) * (p as f64).ln())
        .collect();
    let mut partials = Vec::with_capacity(primes.len());
    let mut run = 0.0;
    for (i, &p) in primes.iter().enumerate() {
        run += terms[i];
        partials.push((p, run / p as f64));
    }
    let estimate = pairwise_sum(&terms) / x as f64;
    Ok(NagaoRank { estimate, partials })
}

/// The fiber-average over the full two-parameter box family at p is zero
/// before removing singular fibers: every a-row of raw character sums
/// telescopes to a complete character sum. Returned exactly as an integer
/// for the caller to assert on.
pub fn two_param_fiber_sum(table: &super::SweepTable) -> i64 {
    let p = table.p;
    (0..p).map(|a| -table.row_raw_sum(a)).sum()
}

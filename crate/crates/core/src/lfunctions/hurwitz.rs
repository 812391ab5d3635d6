//! Hurwitz zeta by Euler–Maclaurin with a rigorous remainder bound.

use num_complex::Complex64;
use thiserror::Error;

use crate::util::sum::CompensatedC;

#[derive(Debug, Error)]
pub enum HurwitzError {
    #[error("pole at s = 1")]
    Pole,
    #[error("alpha = {0} outside (0, 1]")]
    BadAlpha(f64),
    #[error("correction order {0} exceeds 12")]
    OrderTooLarge(usize),
    #[error("need N ≥ |Im s| (N = {0}, |Im s| = {1})")]
    TooFewTerms(usize, f64),
}

/// B₂ⱼ/(2j)! for j = 1..=13.
pub(crate) const B2J_OVER_FACT: [f64; 13] = [
    8.333_333_333_333_333e-2,   // B2/2!
    -1.388_888_888_888_889e-3,  // B4/4!
    3.306_878_306_878_307e-5,   // B6/6!
    -8.267_195_767_195_768e-7,  // B8/8!
    2.087_675_698_786_81e-8,    // B10/10!
    -5.284_190_138_687_493e-10, // B12/12!
    1.338_253_653_068_468e-11,  // B14/14!
    -3.389_680_296_322_583e-13, // B16/16!
    8.586_062_056_277_845e-15,  // B18/18!
    -2.174_868_698_558_062e-16, // B20/20!
    5.509_002_828_360_23e-18,   // B22/22!
    -1.395_446_468_581_252e-19, // B24/24!
    3.534_707_039_629_467e-21,  // B26/26!
];

/// Rising factorial s(s+1)…(s+m−1).
fn rising(s: Complex64, m: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for j in 0..m {
        acc *= s + j as f64;
    }
    acc
}

/// Hurwitz zeta ζ(s, α) = Σ_{k≥0} (k+α)^{−s} continued by Euler–Maclaurin:
/// N explicit terms, the trapezoidal and pole corrections at N+α, and M
/// Bernoulli correction terms. Returns the value together with a bound on
/// the truncation error derived from the first omitted term.
pub fn hurwitz_zeta(
    s: Complex64,
    alpha: f64,
    terms: usize,
    correction_order: usize,
) -> Result<(Complex64, f64), HurwitzError> {
    if (s - Complex64::new(1.0, 0.0)).norm() == 0.0 {
        return Err(HurwitzError::Pole);
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(HurwitzError::BadAlpha(alpha));
    }
    if correction_order > 12 {
        return Err(HurwitzError::OrderTooLarge(correction_order));
    }
    if (terms as f64) < s.im.abs() {
        return Err(HurwitzError::TooFewTerms(terms, s.im.abs()));
    }
    let n = terms;
    let m = correction_order;

    let mut head = CompensatedC::new();
    for k in 0..n {
        head.add((-s * (k as f64 + alpha).ln()).exp());
    }
    let edge = n as f64 + alpha;
    let ln_edge = edge.ln();
    let w = (-s * ln_edge).exp(); // (N+α)^{−s}
    let mut acc = CompensatedC::new();
    acc.add(head.value());
    acc.add(w * edge / (s - 1.0)); // (N+α)^{1−s}/(s−1)
    acc.add(w * 0.5);

    // Bernoulli corrections: B2j/(2j)! · s(s+1)…(s+2j−2) · (N+α)^{−s−2j+1}
    let inv2 = 1.0 / (edge * edge);
    let mut pow = edge; // (N+α)^{1−2j}, starting at j = 0 ↦ edge
    let mut rise = Complex64::new(1.0, 0.0); // rising(s, 2j−1) built incrementally
    for (j, &b) in B2J_OVER_FACT.iter().enumerate().take(m) {
        pow *= inv2;
        let lo = if j == 0 { 0 } else { 2 * j - 1 };
        for i in lo..(2 * j + 1) {
            rise *= s + i as f64;
        }
        acc.add(w * rise * (b * pow));
    }

    // remainder bound from the first omitted term, inflated by the
    // standard |(s+2M+1)/(σ+2M+1)| factor
    let j = m; // index of the first omitted correction
    let omitted = B2J_OVER_FACT[j].abs() * (rising(s, 2 * j + 1).norm()) * w.norm() * pow.abs() * inv2;
    let denom = s.re + 2.0 * m as f64 + 1.0;
    let inflate = if denom > 0.0 { (s + 2.0 * m as f64 + 1.0).norm() / denom } else { f64::INFINITY };
    Ok((acc.value(), omitted * inflate))
}

//! Numerical evaluation of quadratic Dirichlet L-functions on the
//! critical line, zero location with a counting audit, and the scaled
//! one-level statistic.
//!
//! Values are assembled from Hurwitz zetas,
//! L(s, χ_d) = q^{−s} Σ_{r mod q} χ_d(r) ζ(s, r/q),
//! which keeps every truncation error explicitly bounded. A fixed-σ
//! evaluator caches the character table and logarithms so that scanning
//! the critical line costs one cosine per retained term.

pub mod gamma;
pub mod hurwitz;

pub use hurwitz::hurwitz_zeta;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use thiserror::Error;

use crate::dirichlet::FundamentalDiscriminant;
use crate::util::sum::CompensatedC;

#[derive(Debug, Error)]
pub enum LError {
    #[error(transparent)]
    Hurwitz(#[from] hurwitz::HurwitzError),
    #[error("conductor {0} above the evaluation envelope 1e5")]
    ConductorTooLarge(u64),
    #[error("|Im s| = {0} above the evaluation envelope")]
    HeightTooLarge(f64),
    #[error("tolerance {wanted:e} unreachable; bound {got:e} at the term budget")]
    ToleranceUnreachable { wanted: f64, got: f64 },
    #[error("completed value has |Im| = {0:e} beyond the realness check {1:e}")]
    ImaginaryLeak(f64, f64),
    #[error("zero-count audit: found {found}, main term {expected:.2}, window {window:.2} (q = {q}, T = {t})")]
    AuditAlarm { found: usize, expected: f64, window: f64, q: u64, t: f64 },
    #[error("scaled completeness reach {reach:.2} < 5; raise T for q = {q}")]
    ReachTooSmall { reach: f64, q: u64 },
    #[error("cache io: {0}")]
    CacheIo(#[from] std::io::Error),
    #[error("cache format: {0}")]
    CacheFormat(String),
}

/// The completed quadratic series Λ(s) = (q/π)^{(s+a)/2} Γ((s+a)/2) L(s, χ_d);
/// ε = +1 for every real primitive character, so Λ(s) = Λ(1−s) and Λ is
/// real on the critical line.
#[derive(Clone, Copy, Debug)]
pub struct QuadraticLSeries {
    pub d: FundamentalDiscriminant,
}

impl QuadraticLSeries {
    pub fn new(d: FundamentalDiscriminant) -> Self {
        QuadraticLSeries { d }
    }

    pub fn conductor(&self) -> u64 {
        self.d.conductor()
    }

    /// Gamma-factor parity: 0 for d > 0, 1 for d < 0.
    pub fn parity(&self) -> u32 {
        self.d.parity()
    }

    pub fn chi(&self, n: i64) -> i32 {
        self.d.chi(n)
    }
}

fn choose_terms(im: f64) -> usize {
    ((im.abs() * 0.75).ceil() as usize + 12).max(16)
}

/// L(s, χ_d) with propagated error ≤ tol (the Hurwitz bounds summed).
/// Near s = 1 the pole terms of the Hurwitz zetas cancel against
/// Σχ(r) = 0 and are resummed explicitly.
pub fn l_value(series: &QuadraticLSeries, s: Complex64, tol: f64) -> Result<Complex64, LError> {
    let q = series.conductor();
    if q > 100_000 {
        return Err(LError::ConductorTooLarge(q));
    }
    if s.im.abs() > 100.0 {
        return Err(LError::HeightTooLarge(s.im));
    }
    let mut n = choose_terms(s.im);
    loop {
        let (value, bound) = l_value_with_terms(series, s, n, 10)?;
        if bound <= tol {
            return Ok(value);
        }
        if (n as u64).saturating_mul(q) > 50_000_000 {
            return Err(LError::ToleranceUnreachable { wanted: tol, got: bound });
        }
        n *= 2;
    }
}

fn l_value_with_terms(
    series: &QuadraticLSeries,
    s: Complex64,
    n: usize,
    m: usize,
) -> Result<(Complex64, f64), LError> {
    let q = series.conductor();
    let qf = q as f64;
    let q_pow = (-s * qf.ln()).exp(); // q^{−s}
    let near_pole = (s - Complex64::new(1.0, 0.0)).norm() < 1e-2;
    let mut acc = CompensatedC::new();
    let mut err = 0.0f64;
    for r in 1..q {
        let chi = series.chi(r as i64);
        if chi == 0 {
            continue;
        }
        let alpha = r as f64 / qf;
        let (val, bound) = if near_pole {
            hurwitz_no_pole_part(s, alpha, n, m)?
        } else {
            hurwitz_zeta(s, alpha, n, m)?
        };
        acc.add(val * chi as f64);
        err += bound;
    }
    if near_pole {
        // Σ_r χ(r) (N+α)^{1−s}/(s−1), resummed with Σχ(r) = 0:
        // (N+α)^{1−s}/(s−1) = 1/(s−1) − Σ_{k≥1} (1−s)^{k−1} ln^k(N+α)/k!
        // and the 1/(s−1) drops out of the character sum.
        let u = Complex64::new(1.0, 0.0) - s;
        for r in 1..q {
            let chi = series.chi(r as i64);
            if chi == 0 {
                continue;
            }
            let edge = n as f64 + r as f64 / qf;
            let ll = edge.ln();
            let mut term = Complex64::new(0.0, 0.0);
            let mut u_pow = Complex64::new(1.0, 0.0); // u^{k−1}
            let mut ll_fac = ll; // ll^k / k!
            for k in 1..=8 {
                term += u_pow * ll_fac;
                u_pow *= u;
                ll_fac *= ll / (k as f64 + 1.0);
            }
            acc.add(-term * chi as f64);
        }
    }
    Ok((q_pow * acc.value(), q_pow.norm() * err))
}

/// Euler–Maclaurin pieces of ζ(s, α) excluding the (N+α)^{1−s}/(s−1)
/// term, which the caller resums across the character sum.
fn hurwitz_no_pole_part(
    s: Complex64,
    alpha: f64,
    n: usize,
    m: usize,
) -> Result<(Complex64, f64), LError> {
    // evaluate at a shifted point to reuse the bounded routine, then
    // subtract its pole term exactly
    let (full, bound) = if (s - Complex64::new(1.0, 0.0)).norm() == 0.0 {
        // pure limit: only the pole part is singular, all other pieces are
        // continuous; evaluate them directly at s = 1
        let mut head = CompensatedC::new();
        for k in 0..n {
            head.add(Complex64::new(1.0 / (k as f64 + alpha), 0.0));
        }
        let edge = n as f64 + alpha;
        let w = Complex64::new(1.0 / edge, 0.0);
        let mut acc = head.value() + w * 0.5;
        let s1 = Complex64::new(1.0, 0.0);
        let inv2 = 1.0 / (edge * edge);
        let mut pow = edge;
        let mut rise = Complex64::new(1.0, 0.0);
        for (j, &b) in hurwitz::B2J_OVER_FACT.iter().enumerate().take(m) {
            pow *= inv2;
            let lo = if j == 0 { 0 } else { 2 * j - 1 };
            for i in lo..(2 * j + 1) {
                rise *= s1 + i as f64;
            }
            acc += w * rise * (b * pow);
        }
        let omitted = hurwitz::B2J_OVER_FACT[m].abs()
            * (1..=(2 * m + 1)).map(|i| i as f64).product::<f64>()
            * w.norm()
            * pow.abs()
            * inv2;
        (acc, omitted)
    } else {
        let (v, b) = hurwitz_zeta(s, alpha, n, m)?;
        let edge = n as f64 + alpha;
        let pole = ((1.0 - s) * edge.ln()).exp() / (s - 1.0);
        (v - pole, b)
    };
    Ok((full, bound))
}

/// Λ(1/2 + it) as a real number; the imaginary part must stay below
/// 1e-8 of the local scale and is discarded after the check.
pub fn completed_lambda(series: &QuadraticLSeries, t: f64) -> Result<f64, LError> {
    if t.abs() > 60.0 {
        return Err(LError::HeightTooLarge(t));
    }
    let s = Complex64::new(0.5, t);
    let l = l_value(series, s, 1e-11)?;
    let lam = gamma_completion(series, s) * l;
    let scale = lam.norm().max(1e-30);
    if lam.im.abs() > 1e-8 * scale.max(1e-12) {
        return Err(LError::ImaginaryLeak(lam.im.abs(), 1e-8 * scale));
    }
    Ok(lam.re)
}

fn gamma_completion(series: &QuadraticLSeries, s: Complex64) -> Complex64 {
    let q = series.conductor() as f64;
    let a = series.parity() as f64;
    let half = (s + a) * 0.5;
    ((q / PI).ln() * half).exp() * gamma::gamma(half)
}

/// Fixed-σ = 1/2 evaluator for one discriminant: the character values,
/// coefficient logs and edge data are precomputed once, so each point of
/// the critical line costs one sin_cos per retained term.
pub struct LambdaEvaluator {
    series: QuadraticLSeries,
    // head: Σ_{n ≤ Nq} χ(n) n^{−s}
    ln_n: Vec<f64>,
    coef: Vec<f64>, // χ(n)/√n
    // tail per coprime residue: χ(r), ln(N+r/q), (N+r/q)^{−1/2}, N+r/q
    tail: Vec<(f64, f64, f64, f64)>,
    ln_q: f64,
    inv_sqrt_q: f64,
    order: usize,
    /// truncation bound for the L-value at the largest |t| this evaluator
    /// was built for
    pub l_error_bound: f64,
}

impl LambdaEvaluator {
    pub fn new(series: QuadraticLSeries, t_max: f64) -> Result<Self, LError> {
        let q = series.conductor();
        if q > 100_000 {
            return Err(LError::ConductorTooLarge(q));
        }
        let n = choose_terms(t_max);
        let m = 10usize;
        let qf = q as f64;
        let total = n as u64 * q;
        let mut ln_n = Vec::with_capacity(total as usize / 2 + 1);
        let mut coef = Vec::with_capacity(total as usize / 2 + 1);
        for nn in 1..=total {
            let chi = series.chi(nn as i64);
            if chi == 0 {
                continue;
            }
            ln_n.push((nn as f64).ln());
            coef.push(chi as f64 / (nn as f64).sqrt());
        }
        let mut tail = Vec::new();
        for r in 1..q {
            let chi = series.chi(r as i64);
            if chi == 0 {
                continue;
            }
            let edge = n as f64 + r as f64 / qf;
            tail.push((chi as f64, edge.ln(), 1.0 / edge.sqrt(), edge));
        }
        // worst-case Euler–Maclaurin remainder over the sweep, at |t| = t_max
        let s = Complex64::new(0.5, t_max);
        let mut rise = Complex64::new(1.0, 0.0);
        for i in 0..(2 * m + 1) {
            rise *= s + i as f64;
        }
        let edge_min = n as f64 + 1.0 / qf;
        let omitted = hurwitz::B2J_OVER_FACT[m].abs() * rise.norm() * edge_min.powf(-0.5 - 2.0 * m as f64 - 1.0);
        let l_error_bound = omitted * tail.len() as f64 / qf.sqrt() * 2.0;
        Ok(LambdaEvaluator {
            series,
            ln_n,
            coef,
            tail,
            ln_q: qf.ln(),
            inv_sqrt_q: 1.0 / qf.sqrt(),
            order: m,
            l_error_bound,
        })
    }

    /// L(1/2 + it, χ).
    pub fn l_on_line(&self, t: f64) -> Complex64 {
        let s = Complex64::new(0.5, t);
        // head
        let mut head = CompensatedC::new();
        for (&ln, &c) in self.ln_n.iter().zip(self.coef.iter()) {
            let (sin, cos) = (t * ln).sin_cos();
            head.add(Complex64::new(c * cos, -c * sin));
        }
        // Bernoulli coefficient polynomials, shared across residues
        let m = self.order;
        let mut coefs = [Complex64::new(0.0, 0.0); 16];
        let mut rise = Complex64::new(1.0, 0.0);
        for (j, &b) in hurwitz::B2J_OVER_FACT.iter().enumerate().take(m) {
            let lo = if j == 0 { 0 } else { 2 * j - 1 };
            for i in lo..(2 * j + 1) {
                rise *= s + i as f64;
            }
            coefs[j] = rise * b;
        }
        let s1inv = 1.0 / (s - 1.0);
        let mut tail = CompensatedC::new();
        for &(chi, ln_edge, rsqrt, edge) in &self.tail {
            let (sin, cos) = (t * ln_edge).sin_cos();
            let w = Complex64::new(rsqrt * cos, -rsqrt * sin); // (N+α)^{−s}
            let mut poly = edge * s1inv + 0.5;
            let inv2 = 1.0 / (edge * edge);
            let mut pow = edge;
            for c in coefs.iter().take(m) {
                pow *= inv2;
                poly += c * pow;
            }
            tail.add(w * poly * chi);
        }
        let (sin_q, cos_q) = (t * self.ln_q).sin_cos();
        let q_pow = Complex64::new(self.inv_sqrt_q * cos_q, -self.inv_sqrt_q * sin_q);
        head.value() + q_pow * tail.value()
    }

    /// Λ(1/2 + it) with its imaginary diagnostic.
    pub fn lambda(&self, t: f64) -> (f64, f64) {
        let s = Complex64::new(0.5, t);
        let lam = gamma_completion(&self.series, s) * self.l_on_line(t);
        (lam.re, lam.im)
    }
}

/// Verified sign-change ordinates 0 < γ₁ < γ₂ < … ≤ T.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZeroList {
    pub ordinates: Vec<f64>,
    pub completeness_bound: f64,
    pub q: u64,
}

/// Zero-counting main term for the full (both-signs) count up to T.
pub fn zero_count_main_term(q: u64, t: f64) -> f64 {
    (t / PI) * (q as f64 * t / (TAU * std::f64::consts::E)).ln()
}

/// Locates all zeros of Λ(1/2 + it, χ_d) with 0 < t ≤ T by scanning for
/// sign changes on a grid of spacing 0.05·2π/log(qT+10) and bisecting to
/// 1e-8. The count is audited against the main term; on alarm the grid is
/// refined ×4 and the scan retried once.
pub fn find_zeros(series: &QuadraticLSeries, t_cap: f64) -> Result<ZeroList, LError> {
    if t_cap > 60.0 {
        return Err(LError::HeightTooLarge(t_cap));
    }
    let q = series.conductor();
    let ev = LambdaEvaluator::new(*series, t_cap)?;
    let base_spacing = 0.05 * TAU / ((q as f64 * t_cap + 10.0).ln());
    for attempt in 0..2 {
        let spacing = base_spacing / if attempt == 0 { 1.0 } else { 4.0 };
        let ordinates = scan_for_zeros(&ev, t_cap, spacing);
        let expected_half = zero_count_main_term(q, t_cap) / 2.0;
        let window = 2.0 + (q as f64).ln();
        if (ordinates.len() as f64 - expected_half).abs() <= window {
            return Ok(ZeroList { ordinates, completeness_bound: t_cap, q });
        }
        if attempt == 1 {
            return Err(LError::AuditAlarm {
                found: ordinates.len(),
                expected: expected_half,
                window,
                q,
                t: t_cap,
            });
        }
    }
    unreachable!()
}

fn scan_for_zeros(ev: &LambdaEvaluator, t_cap: f64, spacing: f64) -> Vec<f64> {
    let steps = (t_cap / spacing).ceil() as usize;
    let mut out = Vec::new();
    let mut prev_t = 0.0f64;
    let mut prev_v = ev.lambda(0.0).0;
    for i in 1..=steps {
        let t = (i as f64 * spacing).min(t_cap);
        let v = ev.lambda(t).0;
        if prev_v == 0.0 {
            // grid point exactly on a zero: record and move on
            out.push(prev_t);
        } else if v != 0.0 && prev_v.signum() != v.signum() {
            out.push(bisect_zero(ev, prev_t, t, prev_v));
        }
        prev_t = t;
        prev_v = v;
    }
    out
}

/// Bracketed refinement to 1e-8: Illinois-damped regula falsi, with a
/// plain bisection step whenever the interpolant stalls.
fn bisect_zero(ev: &LambdaEvaluator, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    let mut f_hi = ev.lambda(hi).0;
    if f_hi == 0.0 {
        return hi;
    }
    let mut side = 0i8;
    for iter in 0..64 {
        if hi - lo <= 1e-8 {
            break;
        }
        let mut mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let margin = 0.01 * (hi - lo);
        if !(mid > lo + margin && mid < hi - margin) || iter % 4 == 3 {
            mid = 0.5 * (lo + hi);
        }
        let f_mid = ev.lambda(mid).0;
        if f_mid == 0.0 {
            return mid;
        }
        if f_lo.signum() != f_mid.signum() {
            hi = mid;
            f_hi = f_mid;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        } else {
            lo = mid;
            f_lo = f_mid;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (lo + hi)
}

/// Signed scaled ordinates ±γ·log q/(2π) (or log(q/π) behind the flag,
/// for sensitivity runs).
pub fn scale_zeros(zeros: &ZeroList, use_q_over_pi: bool) -> Vec<f64> {
    let q = zeros.q as f64;
    let scale = if use_q_over_pi { (q / PI).ln() } else { q.ln() } / TAU;
    let mut out = Vec::with_capacity(zeros.ordinates.len() * 2);
    for &g in &zeros.ordinates {
        out.push(-g * scale);
        out.push(g * scale);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// One-level statistic D(χ, Φ) = Σ_j Φ(γ̃_j) over signed ordinates.
/// The zero list must reach scaled height 5 so the Φ tail is negligible.
pub fn one_level_statistic(
    zeros: &ZeroList,
    phi: &crate::densities::TestFunction,
) -> Result<f64, LError> {
    let reach = zeros.completeness_bound * (zeros.q as f64).ln() / TAU;
    if reach < 5.0 - 1e-9 {
        return Err(LError::ReachTooSmall { reach, q: zeros.q });
    }
    let signed = scale_zeros(zeros, false);
    let terms: Vec<f64> = signed.iter().map(|&x| phi.eval(x)).collect();
    Ok(crate::util::sum::pairwise_sum(&terms))
}

/// The T needed for scaled completeness reach 5 at conductor q.
pub fn t_for_reach(q: u64, reach: f64) -> f64 {
    reach * TAU / (q as f64).ln()
}

// --- zero cache (one CSV per discriminant) ---

pub fn zeros_cache_path(dir: &std::path::Path, d: i64) -> std::path::PathBuf {
    dir.join(format!("zeros_d{d}.csv"))
}

pub fn write_zeros_csv(z: &ZeroList, d: i64, w: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(w, "format=zeros,v1,d={},T={}", d, z.completeness_bound)?;
    for g in &z.ordinates {
        writeln!(w, "{g:.10}")?;
    }
    Ok(())
}

pub fn read_zeros_csv(r: &mut impl std::io::BufRead, d: i64) -> Result<ZeroList, LError> {
    let mut header = String::new();
    r.read_line(&mut header)?;
    let header = header.trim();
    let parts: Vec<&str> = header.split(',').collect();
    if parts.len() != 4 || parts[0] != "format=zeros" || parts[1] != "v1" {
        return Err(LError::CacheFormat(format!("bad header: {header}")));
    }
    let dd: i64 = parts[2]
        .strip_prefix("d=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| LError::CacheFormat("bad d field".into()))?;
    if dd != d {
        return Err(LError::CacheFormat(format!("cache is for d = {dd}, wanted {d}")));
    }
    let t: f64 = parts[3]
        .strip_prefix("T=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| LError::CacheFormat("bad T field".into()))?;
    let mut ordinates = Vec::new();
    let mut line = String::new();
    loop {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            break;
        }
        if line.trim().is_empty() {
            continue;
        }
        ordinates.push(
            line.trim()
                .parse()
                .map_err(|e| LError::CacheFormat(format!("bad ordinate: {e}")))?,
        );
    }
    Ok(ZeroList { ordinates, completeness_bound: t, q: dd.unsigned_abs() })
}

/// Cached zero lookup: reads `zeros_d<d>.csv` when it covers T, computes
/// and rewrites otherwise. Pass `None` to always compute.
pub fn find_zeros_cached(
    series: &QuadraticLSeries,
    t_cap: f64,
    cache_dir: Option<&std::path::Path>,
) -> Result<ZeroList, LError> {
    let d = series.d.value();
    if let Some(dir) = cache_dir {
        let path = zeros_cache_path(dir, d);
        if let Ok(f) = std::fs::File::open(&path) {
            if let Ok(z) = read_zeros_csv(&mut std::io::BufReader::new(f), d) {
                if z.completeness_bound >= t_cap - 1e-12 {
                    let ordinates = z.ordinates.iter().copied().filter(|&g| g <= t_cap).collect();
                    return Ok(ZeroList { ordinates, completeness_bound: t_cap, q: z.q });
                }
            }
        }
    }
    let z = find_zeros(series, t_cap)?;
    if let Some(dir) = cache_dir {
        std::fs::create_dir_all(dir)?;
        let mut buf = Vec::new();
        write_zeros_csv(&z, d, &mut buf)?;
        // write-then-rename keeps the cache single-writer safe
        let path = zeros_cache_path(dir, d);
        let tmp = path.with_extension("csv.tmp");
        std::fs::write(&tmp, &buf)?;
        std::fs::rename(&tmp, &path)?;
    }
    Ok(z)
}

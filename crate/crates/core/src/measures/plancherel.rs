//! Unramified Plancherel density for PGL₂(ℚ_p) on the tempered arc.

use std::f64::consts::PI;
use std::sync::Arc;

use super::TorusMeasure;
use crate::util::quad::simpson_refined;

/// The density f_p(θ) = c_p · sin²θ / ((1 − 1/p)² + (4/p)·sin²θ) on
/// [0, π], with c_p fixed by ∫₀^π f_p = 1 to 1e-10. As p → ∞ the
/// denominator tends to 1 and f_p tends to the sin² law (2/π)·sin²θ.
pub fn plancherel_pgl2(p: u64) -> TorusMeasure {
    assert!(p >= 2, "p must be a prime ≥ 2");
    let pf = p as f64;
    let shape = move |t: f64| {
        let s = t.sin() * t.sin();
        s / ((1.0 - 1.0 / pf) * (1.0 - 1.0 / pf) + 4.0 / pf * s)
    };
    let (raw_mass, _) = simpson_refined(&shape, 0.0, PI, 1 << 14, 1e-10, 1 << 22);
    let c = 1.0 / raw_mass;
    TorusMeasure::Density { density: Arc::new(move |t| c * shape(t)), grid: 1 << 14 }
}

/// Integral of f against a rank-1 density measure.
pub fn density_integral<F: Fn(f64) -> f64>(mu: &TorusMeasure, f: F) -> Option<f64> {
    match mu {
        TorusMeasure::Density { density, grid } => {
            let g = |t: f64| density(t) * f(t);
            let (v, _) = simpson_refined(&g, 0.0, PI, *grid, 1e-10, 1 << 22);
            Some(v)
        }
        _ => None,
    }
}

/// Sup-distance on a uniform grid between a density measure and a
/// reference density.
pub fn density_sup_distance<F: Fn(f64) -> f64>(mu: &TorusMeasure, reference: F, grid: usize) -> Option<f64> {
    match mu {
        TorusMeasure::Density { density, .. } => {
            let mut worst: f64 = 0.0;
            for i in 0..=grid {
                let t = PI * i as f64 / grid as f64;
                worst = worst.max((density(t) - reference(t)).abs());
            }
            Some(worst)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mass_is_one() {
        for p in [2u64, 5, 101] {
            let mu = plancherel_pgl2(p);
            assert!((mu.total_mass() - 1.0).abs() < 1e-8, "p = {p}");
        }
    }

    #[test]
    fn odd_trace_moment_vanishes() {
        // f_p is symmetric under θ ↦ π−θ, so ∫ 2cosθ f_p dθ = 0.
        let mu = plancherel_pgl2(7);
        let m = density_integral(&mu, |t| 2.0 * t.cos()).unwrap();
        assert!(m.abs() < 1e-9, "first moment {m}");
    }

    #[test]
    fn converges_to_sine_squared_law() {
        let st = |t: f64| 2.0 / PI * t.sin() * t.sin();
        let d4 = density_sup_distance(&plancherel_pgl2(10_000), st, 4096).unwrap();
        assert!(d4 < 1e-2 * 2.0, "sup distance at p=10^4: {d4}");
        // decreasing along p
        let d1 = density_sup_distance(&plancherel_pgl2(11), st, 4096).unwrap();
        let d2 = density_sup_distance(&plancherel_pgl2(101), st, 4096).unwrap();
        let d3 = density_sup_distance(&plancherel_pgl2(1009), st, 4096).unwrap();
        assert!(d1 > d2 && d2 > d3, "{d1} > {d2} > {d3} fails");
    }
}

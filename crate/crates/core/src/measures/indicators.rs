//! Indicator triples: Monte Carlo estimation, exact finite enumeration,
//! and the (U, O, Sp) mass decomposition.

use num_complex::Complex64;

use super::sampling::validate_finite_group;
use super::{GroupSpec, IndicatorTriple, MeasureError, TorusMeasure, TorusPoint};
use crate::rmt;
use crate::util::sum::{mean_and_se, pairwise_sum};

fn triple_from_points(points: &[TorusPoint]) -> IndicatorTriple {
    let n = points.len();
    let v1: Vec<f64> = points.iter().map(|p| p.trace().norm_sqr()).collect();
    let tr2: Vec<Complex64> = points.iter().map(|p| { let t = p.trace(); t * t }).collect();
    let trsq: Vec<Complex64> = points.iter().map(|p| p.trace_of_square()).collect();

    let (i1, se1) = mean_and_se(&v1);
    let re2: Vec<f64> = tr2.iter().map(|z| z.re).collect();
    let im2: Vec<f64> = tr2.iter().map(|z| z.im).collect();
    let re3: Vec<f64> = trsq.iter().map(|z| z.re).collect();
    let im3: Vec<f64> = trsq.iter().map(|z| z.im).collect();
    let (i2, se2) = mean_and_se(&re2);
    let (i3, se3) = mean_and_se(&re3);
    IndicatorTriple {
        i1,
        i2,
        i3,
        se1,
        se2,
        se3,
        i2_im: pairwise_sum(&im2) / n as f64,
        i3_im: pairwise_sum(&im3) / n as f64,
    }
}

/// Monte Carlo estimate of (i₁, i₂, i₃) = (E|tr t|², E (tr t)², E tr(t²))
/// with standard errors.
pub fn indicators_monte_carlo(
    spec: &GroupSpec,
    count: usize,
    seed: u64,
) -> Result<IndicatorTriple, MeasureError> {
    if count < 1000 {
        return Err(MeasureError::TooFewSamples(1000));
    }
    let points = super::sample_group(spec, count, seed)?;
    Ok(triple_from_points(&points))
}

/// Exact indicator averages over a finite spec; standard errors are zero.
pub fn indicators_exact(spec: &GroupSpec) -> Result<IndicatorTriple, MeasureError> {
    match spec {
        GroupSpec::RootsOfUnity(m) => {
            // Σ_j ζ^{2j}/m is 1 when m | 2 and 0 otherwise, and tr(t²) for
            // rank 1 is the same sum.
            let two_div = if *m <= 2 { 1.0 } else { 0.0 };
            Ok(IndicatorTriple::exact(1.0, two_div, two_div))
        }
        GroupSpec::FiniteGroup(mats) => {
            validate_finite_group(mats)?;
            let points: Result<Vec<TorusPoint>, MeasureError> = mats
                .iter()
                .map(|m| Ok(TorusPoint::new(rmt::unitary_eigenangles(m)?)))
                .collect();
            let mut t = triple_from_points(&points?);
            t.se1 = 0.0;
            t.se2 = 0.0;
            t.se3 = 0.0;
            Ok(t)
        }
        _ => Err(MeasureError::NotFiniteSpec),
    }
}

/// Indicators of an atomic or empirical measure, with respect to its
/// mass-normalized form.
pub fn indicators_of_measure(mu: &TorusMeasure) -> Result<IndicatorTriple, MeasureError> {
    let atoms = mu.atoms()?;
    if atoms.is_empty() {
        return Err(MeasureError::Empty);
    }
    let mass: f64 = atoms.iter().map(|(_, w)| w).sum();
    let v1: Vec<f64> = atoms.iter().map(|(p, w)| w * p.trace().norm_sqr()).collect();
    let v2: Vec<Complex64> = atoms.iter().map(|(p, w)| { let t = p.trace(); t * t * *w }).collect();
    let v3: Vec<Complex64> = atoms.iter().map(|(p, w)| p.trace_of_square() * *w).collect();
    let i1 = pairwise_sum(&v1) / mass;
    let z2 = crate::util::sum::pairwise_sum_c(&v2) / mass;
    let z3 = crate::util::sum::pairwise_sum_c(&v3) / mass;
    Ok(IndicatorTriple {
        i1,
        i2: z2.re,
        i3: z3.re,
        se1: 0.0,
        se2: 0.0,
        se3: 0.0,
        i2_im: z2.im,
        i3_im: z3.im,
    })
}

/// The (U, O, Sp) mass split of an essentially cuspidal family.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct MassDecomposition {
    pub mass_u: f64,
    pub mass_o: f64,
    pub mass_sp: f64,
    /// Set when clamping to [0, 1] moved a mass by more than 3·se.
    pub clamp_flag: bool,
}

/// Solves the linear system U+O+Sp = 1, O+Sp = i₂, O−Sp = i₃.
/// Requires i₁ ≈ 1 within `tolerance` (default 0.05 via
/// [`decompose_indicators_default`]).
pub fn decompose_indicators(
    i: &IndicatorTriple,
    tolerance: f64,
) -> Result<MassDecomposition, MeasureError> {
    if (i.i1 - 1.0).abs() > tolerance {
        return Err(MeasureError::NotCuspidal(i.i1, tolerance));
    }
    let raw_u = 1.0 - i.i2;
    let raw_o = (i.i2 + i.i3) / 2.0;
    let raw_sp = (i.i2 - i.i3) / 2.0;
    let clamp = |x: f64| x.clamp(0.0, 1.0);
    let (u, o, sp) = (clamp(raw_u), clamp(raw_o), clamp(raw_sp));
    let budget = 3.0 * (i.se2 + i.se3);
    let clamp_flag = (u - raw_u).abs() > budget || (o - raw_o).abs() > budget || (sp - raw_sp).abs() > budget;
    Ok(MassDecomposition { mass_u: u, mass_o: o, mass_sp: sp, clamp_flag })
}

pub fn decompose_indicators_default(i: &IndicatorTriple) -> Result<MassDecomposition, MeasureError> {
    decompose_indicators(i, 0.05)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::sampling::dihedral_d3;

    #[test]
    fn roots_of_unity_exact_values() {
        let two = indicators_exact(&GroupSpec::RootsOfUnity(2)).unwrap();
        assert_eq!((two.i1, two.i2, two.i3), (1.0, 1.0, 1.0));
        let three = indicators_exact(&GroupSpec::RootsOfUnity(3)).unwrap();
        assert_eq!((three.i1, three.i2, three.i3), (1.0, 0.0, 0.0));
    }

    #[test]
    fn d3_is_orthogonal_with_unit_indicators() {
        let t = indicators_exact(&GroupSpec::FiniteGroup(dihedral_d3())).unwrap();
        assert!((t.i1 - 1.0).abs() < 1e-10, "i1 = {}", t.i1);
        assert!((t.i2 - 1.0).abs() < 1e-10, "i2 = {}", t.i2);
        assert!((t.i3 - 1.0).abs() < 1e-10, "i3 = {}", t.i3);
    }

    #[test]
    fn monte_carlo_agrees_with_exact_on_finite_specs() {
        for spec in [GroupSpec::RootsOfUnity(2), GroupSpec::RootsOfUnity(3), GroupSpec::FiniteGroup(dihedral_d3())] {
            let mc = indicators_monte_carlo(&spec, 20_000, 7).unwrap();
            let ex = indicators_exact(&spec).unwrap();
            for (m, e, se) in [(mc.i1, ex.i1, mc.se1), (mc.i2, ex.i2, mc.se2), (mc.i3, ex.i3, mc.se3)] {
                assert!((m - e).abs() <= 4.0 * se.max(1e-3), "{m} vs {e} (se {se})");
            }
        }
    }

    #[test]
    fn full_circle_has_unit_i1_and_vanishing_i2_i3() {
        let t = indicators_monte_carlo(&GroupSpec::FullCircle, 100_000, 3).unwrap();
        // |e^{iθ}|² = 1 for every sample, up to one rounding of cos²+sin²
        assert!((t.i1 - 1.0).abs() < 1e-15);
        assert!(t.se1 < 1e-16);
        assert!(t.i2.abs() < 4.0 * t.se2 + 0.01);
        assert!(t.i3.abs() < 4.0 * t.se3 + 0.01);
    }

    #[test]
    fn decomposition_pinned_examples() {
        let sp = decompose_indicators_default(&IndicatorTriple::exact(1.0, 1.0, -1.0)).unwrap();
        assert_eq!((sp.mass_u, sp.mass_o, sp.mass_sp), (0.0, 0.0, 1.0));
        let o = decompose_indicators_default(&IndicatorTriple::exact(1.0, 1.0, 1.0)).unwrap();
        assert_eq!((o.mass_u, o.mass_o, o.mass_sp), (0.0, 1.0, 0.0));
        let u = decompose_indicators_default(&IndicatorTriple::exact(1.0, 0.0, 0.0)).unwrap();
        assert_eq!((u.mass_u, u.mass_o, u.mass_sp), (1.0, 0.0, 0.0));
    }

    #[test]
    fn decomposition_rejects_non_cuspidal() {
        let t = IndicatorTriple::exact(1.3, 0.5, 0.0);
        assert!(decompose_indicators_default(&t).is_err());
    }

    #[test]
    fn su2_indicators_are_one_one_minus_one() {
        let t = indicators_monte_carlo(&GroupSpec::SU2Sym(1), 100_000, 13).unwrap();
        assert!((t.i1 - 1.0).abs() < 4.0 * t.se1.max(2e-3) + 0.01);
        assert!((t.i2 - 1.0).abs() < 4.0 * t.se2.max(2e-3) + 0.01);
        assert!((t.i3 + 1.0).abs() < 4.0 * t.se3.max(2e-3) + 0.01);
    }

    #[test]
    fn sym_k_frobenius_schur_alternates() {
        for k in 2..=4u32 {
            let t = indicators_monte_carlo(&GroupSpec::SU2Sym(k), 60_000, 17).unwrap();
            let expect = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((t.i3 - expect).abs() < 0.05, "k={k}: i3 = {}", t.i3);
        }
    }

    #[test]
    fn i3_multiplicative_under_tensor() {
        let pairs = [
            (GroupSpec::SU2Sym(1), GroupSpec::SU2Sym(2)),
            (GroupSpec::SU2Sym(1), GroupSpec::RootsOfUnity(2)),
            (GroupSpec::SU2Sym(2), GroupSpec::RootsOfUnity(2)),
        ];
        for (a, b) in pairs {
            let ia = indicators_monte_carlo(&a, 40_000, 23).unwrap();
            let ib = indicators_monte_carlo(&b, 40_000, 29).unwrap();
            let iab = indicators_monte_carlo(&GroupSpec::tensor(a.clone(), b.clone()), 40_000, 31).unwrap();
            let budget = 4.0 * (iab.se3 + ia.se3 + ib.se3).max(0.01);
            assert!(
                (iab.i3 - ia.i3 * ib.i3).abs() < budget,
                "tensor i3 {} vs product {}",
                iab.i3,
                ia.i3 * ib.i3
            );
        }
    }
}

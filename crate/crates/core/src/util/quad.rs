//! Composite Simpson quadrature with doubling refinement.

/// Composite Simpson on [a, b] with `n` panels (n even).
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 0 { n } else { n + 1 };
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        acc += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

/// Simpson starting at `n0` panels, doubling until successive values differ
/// by less than `tol` or the panel budget is exhausted. Returns the value
/// and the last observed difference.
pub fn simpson_refined<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    n0: usize,
    tol: f64,
    max_panels: usize,
) -> (f64, f64) {
    let mut n = n0.max(2);
    let mut prev = simpson(f, a, b, n);
    loop {
        n *= 2;
        let cur = simpson(f, a, b, n);
        let diff = (cur - prev).abs();
        if diff < tol || n >= max_panels {
            return (cur, diff);
        }
        prev = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn integrates_sin_squared() {
        let (v, _) = simpson_refined(&|x: f64| x.sin() * x.sin(), 0.0, PI, 64, 1e-12, 1 << 20);
        assert!((v - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn integrates_polynomial_exactly() {
        // Simpson is exact on cubics.
        let v = simpson(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 2);
        assert!((v - 0.0).abs() < 1e-13);
    }
}

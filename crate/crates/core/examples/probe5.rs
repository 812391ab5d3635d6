use famlab_core::dirichlet::enumerate_fundamental;
use famlab_core::experiments::*;
use famlab_core::lfunctions::*;
use famlab_core::densities::TestFunction;
use famlab_core::util::sum::mean_and_se;

fn main() {
    let cache = std::path::Path::new("/tmp/famlab-zero-cache");
    std::fs::create_dir_all(cache).unwrap();
    let x = 20_000.0;
    let t0 = std::time::Instant::now();
    let r = f2_one_level_density(x, 1.0, Some(cache), 0.0).unwrap();
    println!("logq scaling: n={} mean={:.4} gap={:.4} se={:.4} fails={} [{:?}]",
        r.family_size, r.empirical_mean, r.abs_gap, r.stderr, r.failures.len(), t0.elapsed());

    // re-analyze cached zeros under the log(q/pi) flag
    let phi = TestFunction::fejer(1.0);
    let ds = enumerate_fundamental(x).unwrap();
    let mut sums = Vec::new();
    for d in ds {
        let series = QuadraticLSeries::new(d);
        let t_cap = t_for_reach(d.conductor(), 5.0);
        let z = find_zeros_cached(&series, t_cap, Some(cache)).unwrap();
        let signed = scale_zeros(&z, true);
        let s: f64 = signed.iter().map(|&v| phi.eval(v)).sum();
        sums.push(s);
    }
    let (mean, se) = mean_and_se(&sums);
    println!("log(q/pi) scaling: mean={:.4} gap={:.4} se={:.4}", mean, (mean - 0.5f64).abs(), se);
}

//! Command-line front end: family presets, experiment orchestration,
//! caching, deterministic seeding, and CSV/JSON report emission.
//!
//! Every run writes a data CSV (`#`-prefixed metadata lines, then rows)
//! and a JSON summary stamped with the config hash. Exit codes: 0 on
//! success, 2 on validation errors, 3 on audit alarms.

mod config;
mod output;
mod poly;

use clap::{Parser, Subcommand};
use famlab_core::densities::TestFunction;
use famlab_core::dirichlet;
use famlab_core::elliptic;
use famlab_core::experiments;
use famlab_core::family_stats::{self, presets};
use famlab_core::lfunctions;
use famlab_core::measures::{self, GroupSpec};
use famlab_core::rmt::HaarFamily;
use famlab_core::weil_deligne;

use output::{OutputSink, RunSummary};

#[derive(Parser)]
#[command(name = "famlab", version, about = "statistics of families of L-functions")]
struct Cli {
    /// Flat key=value config file; flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    /// Worker threads (default: all cores). Results never depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Cache directory (or set FSL_CACHE_DIR).
    #[arg(long, global = true)]
    cache_dir: Option<std::path::PathBuf>,
    /// Output path prefix for the CSV and JSON artifacts.
    #[arg(long, global = true, default_value = "famlab_run")]
    out: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Indicator triple of a compact-group sampling spec.
    Indicators {
        /// su2sym1 … su2sym4, full-circle, roots-of-unity-<m>, d3
        #[arg(long, default_value = "su2sym1")]
        group: String,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// exact enumeration instead of Monte Carlo (finite specs only)
        #[arg(long)]
        exact: bool,
    },
    /// Vertical measure of a family preset at one prime.
    Vertical {
        #[arg(long, default_value = "f2")]
        preset: String,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        x: Option<f64>,
        /// restrict the f2 window to the shell shell-min < |d| <= x
        #[arg(long)]
        shell_min: Option<f64>,
    },
    /// Log-weighted average of vertical measures over p <= prime-max.
    StAverage {
        #[arg(long, default_value = "f2")]
        preset: String,
        #[arg(long)]
        prime_max: Option<u64>,
        #[arg(long)]
        x: Option<f64>,
    },
    /// Nagao rank sum of a one-parameter pencil.
    Rank {
        /// washington, generic, unit-section, fell
        #[arg(long, default_value = "washington")]
        family: String,
        #[arg(long)]
        x: Option<u64>,
    },
    /// Quadratic-twist root numbers eps(E_d) averaged over d.
    RootNumbers {
        #[arg(long, default_value_t = 1)]
        eps0: i32,
        #[arg(long, default_value_t = 32)]
        n0: u64,
        #[arg(long)]
        x: Option<f64>,
    },
    /// Möbius average of mu(M(w)) over a box.
    Moebius {
        /// e.g. "w1^3+2*w2^3" or "w" (variables w, w1, w2)
        #[arg(long)]
        poly: String,
        #[arg(long)]
        x: Option<u64>,
    },
    /// Zeros of one quadratic L-function with the counting audit.
    Zeros {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, short = 'T')]
        t: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// One-level density of the quadratic family vs the W- prediction.
    Density {
        #[arg(long, default_value = "f2")]
        preset: String,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        a: Option<f64>,
        /// confirm runs beyond x = 4000 (hours-scale single-core)
        #[arg(long)]
        heavy: bool,
    },
    /// Haar-sample scaled eigenangle histogram vs the kernel density.
    Rmt {
        /// usp, so-even, so-odd, unitary
        #[arg(long, default_value = "usp")]
        ensemble: String,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long)]
        range: Option<f64>,
    },
    /// Conductor strata of the universal GL(1) family at p.
    UniversalGl1 {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long)]
        x: Option<u64>,
    },
    /// Splitting statistics of the S3 cubic family.
    Cubic {
        #[arg(long)]
        disc_max: Option<i64>,
        #[arg(long)]
        prime_min: Option<u64>,
        #[arg(long)]
        prime_max: Option<u64>,
    },
    /// Conductor and L-factor of a Weil–Deligne representation.
    Wd {
        /// JSON file in the wd-v1 schema
        #[arg(long, conflicts_with_all = ["curve", "p"])]
        input: Option<std::path::PathBuf>,
        /// "a,b" short Weierstrass coefficients
        #[arg(long, requires = "p", allow_hyphen_values = true)]
        curve: Option<String>,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Full family report: indicators, masses, rank, verdict.
    Report {
        #[arg(long, default_value = "f2")]
        preset: String,
        #[arg(long)]
        x: Option<f64>,
        /// height cutoff for the fell-box preset (curves with
        /// max(4|a|³, 27b²) < box)
        #[arg(long = "box", value_name = "HEIGHT")]
        box_height: Option<f64>,
        #[arg(long)]
        prime_max: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() {
    let cli = Cli::parse();
    let cfg = match config::Config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            std::process::exit(2);
        }
    };
    if let Some(w) = cli.workers.or_else(|| cfg.get_usize("workers")) {
        if rayon::ThreadPoolBuilder::new().num_threads(w).build_global().is_err() {
            eprintln!("warning: worker pool already initialized");
        }
    }
    let cache_dir = cli
        .cache_dir
        .clone()
        .or_else(|| cfg.get_path("cache-dir"))
        .or_else(|| std::env::var_os("FSL_CACHE_DIR").map(std::path::PathBuf::from));
    let code = run(cli, cfg, cache_dir.as_deref());
    std::process::exit(code);
}

fn run(cli: Cli, cfg: config::Config, cache_dir: Option<&std::path::Path>) -> i32 {
    let sink = OutputSink::new(&cli.out);
    match dispatch(&cli.command, &cfg, cache_dir, &sink) {
        Ok(()) => 0,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Audit(msg)) => {
            eprintln!("audit alarm: {msg}");
            3
        }
        Err(CliError::Io(e)) => {
            eprintln!("io error: {e}");
            2
        }
    }
}

enum CliError {
    Validation(String),
    Audit(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn invalid<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Validation(e.to_string())
}

fn parse_group(name: &str) -> Result<GroupSpec, CliError> {
    if let Some(m) = name.strip_prefix("roots-of-unity-") {
        let m: u32 = m.parse().map_err(invalid)?;
        return Ok(GroupSpec::RootsOfUnity(m));
    }
    if let Some(k) = name.strip_prefix("su2sym") {
        let k: u32 = k.parse().map_err(invalid)?;
        return Ok(GroupSpec::SU2Sym(k));
    }
    match name {
        "su2" => Ok(GroupSpec::SU2Sym(1)),
        "full-circle" => Ok(GroupSpec::FullCircle),
        "d3" => Ok(GroupSpec::FiniteGroup(measures::dihedral_d3())),
        _ => Err(CliError::Validation(format!("unknown group spec '{name}'"))),
    }
}

fn dispatch(
    cmd: &Command,
    cfg: &config::Config,
    cache_dir: Option<&std::path::Path>,
    sink: &OutputSink,
) -> Result<(), CliError> {
    match cmd {
        Command::Indicators { group, samples, seed, exact } => {
            let samples = samples.or_else(|| cfg.get_usize("samples")).unwrap_or(1_000_000);
            let seed = seed.or_else(|| cfg.get_u64("seed")).unwrap_or(1);
            let spec = parse_group(group)?;
            let triple = if *exact {
                measures::indicators_exact(&spec).map_err(invalid)?
            } else {
                measures::indicators_monte_carlo(&spec, samples, seed).map_err(invalid)?
            };
            let masses = measures::decompose_indicators_default(&triple).ok();
            let mut summary = RunSummary::new(
                "indicators",
                cfg,
                &[("group", group.clone()), ("samples", samples.to_string()), ("seed", seed.to_string())],
            );
            summary.insert("indicators", serde_json::to_value(triple).unwrap());
            if let Some(m) = masses {
                summary.insert("masses", serde_json::to_value(m).unwrap());
            }
            sink.write_csv(
                &summary,
                &["statistic", "value", "stderr"],
                &[
                    vec!["i1".into(), triple.i1.to_string(), triple.se1.to_string()],
                    vec!["i2".into(), triple.i2.to_string(), triple.se2.to_string()],
                    vec!["i3".into(), triple.i3.to_string(), triple.se3.to_string()],
                ],
            )?;
            sink.write_json(&summary)?;
            println!(
                "i = ({:.6}, {:.6}, {:.6}) +- ({:.1e}, {:.1e}, {:.1e})",
                triple.i1, triple.i2, triple.i3, triple.se1, triple.se2, triple.se3
            );
            Ok(())
        }
        Command::Vertical { preset, p, x, shell_min } => {
            let x = x.or_else(|| cfg.get_f64("x")).unwrap_or(100_000.0);
            let shell = shell_min.or_else(|| cfg.get_f64("shell-min")).unwrap_or(0.0);
            let mut summary = RunSummary::new(
                "vertical",
                cfg,
                &[("preset", preset.clone()), ("p", p.to_string()), ("x", x.to_string()), ("shell-min", shell.to_string())],
            );
            let rows = match preset.as_str() {
                "f2" => {
                    let stats = quadratic_vertical_shell(*p, shell, x)?;
                    summary.insert("stats", serde_json::to_value(stats).unwrap());
                    vec![
                        vec!["plus".into(), stats.plus.to_string()],
                        vec!["minus".into(), stats.minus.to_string()],
                        vec!["ramified".into(), stats.ramified.to_string()],
                    ]
                }
                "fell" => {
                    let table = elliptic::ap_sweep(*p).map_err(invalid)?;
                    let mu = elliptic::vertical_measure_elliptic(&table);
                    vertical_atom_rows(&mu, &mut summary)
                }
                "dwork2" => {
                    let mu = elliptic::dwork_vertical_measure(*p).map_err(invalid)?;
                    vertical_atom_rows(&mu, &mut summary)
                }
                "washington" | "generic" | "cassels-schinzel" => {
                    let mu = one_param_vertical(preset, *p)?;
                    vertical_atom_rows(&mu, &mut summary)
                }
                other => return Err(CliError::Validation(format!("unknown preset '{other}'"))),
            };
            sink.write_csv(&summary, &["angle_or_class", "mass"], &rows)?;
            sink.write_json(&summary)?;
            Ok(())
        }
        Command::StAverage { preset, prime_max, x } => {
            let prime_max = prime_max.or_else(|| cfg.get_u64("prime-max")).unwrap_or(200);
            let x = x.or_else(|| cfg.get_f64("x")).unwrap_or(100_000.0);
            if preset != "f2" {
                return Err(CliError::Validation("st-average supports the f2 preset".into()));
            }
            let primes: Vec<u64> = famlab_core::util::primes::primes_up_to(prime_max)
                .into_iter()
                .filter(|&p| p > 2)
                .collect();
            let measures_list: Vec<(u64, measures::TorusMeasure)> = primes
                .iter()
                .map(|&p| dirichlet::empirical_measure_quadratic(p, x).map(|m| (p, m)))
                .collect::<Result<_, _>>()
                .map_err(invalid)?;
            let st = measures::st_average(&measures_list, prime_max as f64 + 1.0).map_err(invalid)?;
            let ind = measures::indicators_of_measure(&st.normalized).map_err(invalid)?;
            let mut summary = RunSummary::new(
                "st-average",
                cfg,
                &[("preset", preset.clone()), ("prime-max", prime_max.to_string()), ("x", x.to_string())],
            );
            summary.insert("raw_mass", serde_json::json!(st.raw_mass));
            summary.insert("indicators", serde_json::to_value(ind).unwrap());
            sink.write_csv(
                &summary,
                &["statistic", "value"],
                &[
                    vec!["raw_mass".into(), st.raw_mass.to_string()],
                    vec!["i1".into(), ind.i1.to_string()],
                    vec!["i2".into(), ind.i2.to_string()],
                    vec!["i3".into(), ind.i3.to_string()],
                ],
            )?;
            sink.write_json(&summary)?;
            Ok(())
        }
        Command::Rank { family, x } => {
            let x = x.or_else(|| cfg.get_u64("x")).unwrap_or(5000);
            let mut summary =
                RunSummary::new("rank", cfg, &[("family", family.clone()), ("x", x.to_string())]);
            let rows = if family == "fell" {
                // two-parameter sweep identity: the fiber sum vanishes
                // before singular-fiber removal
                let primes: Vec<u64> = famlab_core::util::primes::primes_up_to(x.min(499))
                    .into_iter()
                    .filter(|&p| p >= 5)
                    .collect();
                let mut rows = Vec::new();
                for &p in &primes {
                    let table = elliptic::ap_sweep(p).map_err(invalid)?;
                    let s = elliptic::two_param_fiber_sum(&table);
                    rows.push(vec![p.to_string(), s.to_string()]);
                }
                summary.insert("rank", serde_json::json!(0.0));
                summary.insert("identity", serde_json::json!("fiber sums are exactly zero"));
                rows
            } else {
                let fam = one_param_family(family)?;
                let r = elliptic::nagao_rank(&fam, x).map_err(invalid)?;
                summary.insert("rank", serde_json::json!(r.estimate));
                r.partials.iter().map(|(p, v)| vec![p.to_string(), v.to_string()]).collect()
            };
            sink.write_csv(&summary, &["prime", "partial_rank"], &rows)?;
            sink.write_json(&summary)?;
            Ok(())
        }
        Command::RootNumbers { eps0, n0, x } => {
            let x = x.or_else(|| cfg.get_f64("x")).unwrap_or(100_000.0);
            let ds = dirichlet::enumerate_fundamental(x).map_err(invalid)?;
            let mut sum = 0i64;
            let mut count = 0u64;
            let mut plus = 0u64;
            for d in &ds {
                if let Ok(e) = elliptic::twist_root_number(*eps0, *n0, d.value()) {
                    sum += e as i64;
                    count += 1;
                    if e > 0 {
                        plus += 1;
                    }
                }
            }
            let avg = sum as f64 / count as f64;
            let mut summary = RunSummary::new(
                "root-numbers",
                cfg,
                &[("eps0", eps0.to_string()), ("n0", n0.to_string()), ("x", x.to_string())],
            );
            summary.insert("average", serde_json::json!(avg));
            summary.insert("count", serde_json::json!(count));
            summary.insert("plus_fraction", serde_json::json!(plus as f64 / count as f64));
            sink.write_csv(
                &summary,
                &["statistic", "value"],
                &[vec!["average".into(), avg.to_string()], vec!["count".into(), count.to_string()]],
            )?;
            sink.write_json(&summary)?;
            println!("average root number over {count} admissible twists: {avg:+.5}");
            Ok(())
        }
        Command::Moebius { poly, x } => {
            let x = x.or_else(|| cfg.get_u64("x")).unwrap_or(200);
            let parsed = poly::parse_poly(poly).map_err(CliError::Validation)?;
            let mut rows = Vec::new();
            let mut last = None;
            for cut in [x / 4, x / 2, x] {
                if cut == 0 {
                    continue;
                }
                let r = elliptic::moebius_poly_average(&parsed, cut).map_err(invalid)?;
                rows.push(vec![cut.to_string(), r.average.to_string(), r.points.to_string()]);
                last = Some(r);
            }
            let last = last.ok_or_else(|| CliError::Validation("x too small".into()))?;
            let mut summary =
                RunSummary::new("moebius", cfg, &[("poly", poly.clone()), ("x", x.to_string())]);
            summary.insert("average", serde_json::json!(last.average));
            summary.insert("points", serde_json::json!(last.points));
            sink.write_csv(&summary, &["x", "average", "points"], &rows)?;
            sink.write_json(&summary)?;
            println!("mu-average at x={x}: {:+.6e} over {} points", last.average, last.points);
            Ok(())
        }
        Command::Zeros { d, t, tolerance } => {
            let t_cap = t.or_else(|| cfg.get_f64("T")).unwrap_or(30.0);
            let _ = tolerance.or_else(|| cfg.get_f64("tolerance"));
            let fd = dirichlet::FundamentalDiscriminant::new(*d).map_err(invalid)?;
            let series = lfunctions::QuadraticLSeries::new(fd);
            let zeros = match lfunctions::find_zeros_cached(&series, t_cap, cache_dir) {
                Ok(z) => z,
                Err(e @ lfunctions::LError::AuditAlarm { .. }) => {
                    return Err(CliError::Audit(e.to_string()));
                }
                Err(e) => return Err(invalid(e)),
            };
            let mut summary =
                RunSummary::new("zeros", cfg, &[("d", d.to_string()), ("T", t_cap.to_string())]);
            summary.insert("count", serde_json::json!(zeros.ordinates.len()));
            summary.insert(
                "main_term_half",
                serde_json::json!(lfunctions::zero_count_main_term(fd.conductor(), t_cap) / 2.0),
            );
            let rows: Vec<Vec<String>> =
                zeros.ordinates.iter().map(|g| vec![format!("{g:.10}")]).collect();
            sink.write_csv(&summary, &["gamma"], &rows)?;
            sink.write_json(&summary)?;
            println!("{} zeros of L(s, chi_{d}) with 0 < t <= {t_cap}", zeros.ordinates.len());
            Ok(())
        }
        Command::Density { preset, x, a, heavy } => {
            if preset != "f2" {
                return Err(CliError::Validation("density supports the f2 preset".into()));
            }
            let x = x.or_else(|| cfg.get_f64("x")).unwrap_or(2000.0);
            let a = a.or_else(|| cfg.get_f64("a")).unwrap_or(1.0);
            if x > 4000.0 && !heavy {
                return Err(CliError::Validation(format!(
                    "x = {x} runs for hours on one core; pass --heavy to confirm"
                )));
            }
            let phi_a = TestFunction::fejer(a);
            let _ = phi_a;
            let r = experiments::f2_one_level_density(x, a, cache_dir, 0.0).map_err(invalid)?;
            let mut summary = RunSummary::new(
                "density",
                cfg,
                &[("preset", preset.clone()), ("x", x.to_string()), ("a", a.to_string())],
            );
            summary.insert("result", serde_json::to_value(&r).unwrap());
            sink.write_csv(
                &summary,
                &["statistic", "value"],
                &[
                    vec!["empirical".into(), r.empirical_mean.to_string()],
                    vec!["predicted".into(), r.predicted.to_string()],
                    vec!["gap".into(), r.abs_gap.to_string()],
                    vec!["stderr".into(), r.stderr.to_string()],
                ],
            )?;
            sink.write_json(&summary)?;
            println!(
                "one-level density over {} members: empirical {:.4}, predicted {:.4}, gap {:.4} (se {:.4})",
                r.family_size, r.empirical_mean, r.predicted, r.abs_gap, r.stderr
            );
            if !r.failures.is_empty() {
                return Err(CliError::Audit(format!(
                    "{} members failed the zero audit",
                    r.failures.len()
                )));
            }
            Ok(())
        }
        Command::Rmt { ensemble, dim, samples, seed, bins, range } => {
            let dim = dim.or_else(|| cfg.get_usize("dim")).unwrap_or(100);
            let samples = samples.or_else(|| cfg.get_usize("samples")).unwrap_or(10_000);
            let seed = seed.or_else(|| cfg.get_u64("seed")).unwrap_or(1);
            let bins = bins.or_else(|| cfg.get_usize("bins")).unwrap_or(20);
            let range = range.or_else(|| cfg.get_f64("range")).unwrap_or(4.0);
            let family = match ensemble.as_str() {
                "usp" => HaarFamily::USp(dim),
                "so-even" => HaarFamily::SoEven(dim),
                "so-odd" => HaarFamily::SoOdd(if dim % 2 == 0 { dim + 1 } else { dim }),
                "unitary" => HaarFamily::Unitary(dim),
                other => return Err(CliError::Validation(format!("unknown ensemble '{other}'"))),
            };
            let r = experiments::rmt_scaled_histogram(family, samples, bins, range, seed)
                .map_err(invalid)?;
            let mut summary = RunSummary::new(
                "rmt",
                cfg,
                &[
                    ("ensemble", ensemble.clone()),
                    ("dim", dim.to_string()),
                    ("samples", samples.to_string()),
                    ("seed", seed.to_string()),
                ],
            );
            summary.insert("l_inf", serde_json::json!(r.l_inf));
            let rows: Vec<Vec<String>> = r
                .bins
                .iter()
                .zip(r.empirical.iter().zip(r.reference.iter()))
                .map(|(b, (e, w))| vec![b.to_string(), e.to_string(), w.to_string()])
                .collect();
            sink.write_csv(&summary, &["x", "empirical", "predicted"], &rows)?;
            sink.write_json(&summary)?;
            println!("L-infinity bin distance: {:.4}", r.l_inf);
            Ok(())
        }
        Command::UniversalGl1 { p, x } => {
            let x = x.or_else(|| cfg.get_u64("x")).unwrap_or(3000);
            let prof = dirichlet::universal_local_profile(*p, x).map_err(invalid)?;
            let mut summary =
                RunSummary::new("universal-gl1", cfg, &[("p", p.to_string()), ("x", x.to_string())]);
            summary.insert("profile", serde_json::to_value(&prof).unwrap());
            let rows: Vec<Vec<String>> = prof
                .strata
                .iter()
                .map(|(k, emp, model)| vec![k.to_string(), emp.to_string(), model.to_string()])
                .collect();
            sink.write_csv(&summary, &["k", "empirical_mass", "model_mass"], &rows)?;
            sink.write_json(&summary)?;
            Ok(())
        }
        Command::Cubic { disc_max, prime_min, prime_max } => {
            let disc_max = disc_max.or_else(|| cfg.get_i64("disc-max")).unwrap_or(30_000);
            let prime_min = prime_min.or_else(|| cfg.get_u64("prime-min")).unwrap_or(3000);
            let prime_max = prime_max.or_else(|| cfg.get_u64("prime-max")).unwrap_or(8000);
            let stats =
                famlab_core::cubic::family_class_proportions(disc_max, prime_min, prime_max)
                    .map_err(invalid)?;
            let mut summary = RunSummary::new(
                "cubic",
                cfg,
                &[
                    ("disc-max", disc_max.to_string()),
                    ("prime-min", prime_min.to_string()),
                    ("prime-max", prime_max.to_string()),
                ],
            );
            summary.insert("stats", serde_json::to_value(&stats).unwrap());
            sink.write_csv(
                &summary,
                &["class", "proportion"],
                &[
                    vec!["split111".into(), stats.split.to_string()],
                    vec!["inert3".into(), stats.inert.to_string()],
                    vec!["mixed12".into(), stats.mixed.to_string()],
                ],
            )?;
            sink.write_json(&summary)?;
            println!(
                "class proportions (split, inert, mixed) = ({:.4}, {:.4}, {:.4}); i = ({:.4}, {:.4}, {:.4})",
                stats.split, stats.inert, stats.mixed, stats.indicators.i1, stats.indicators.i2, stats.indicators.i3
            );
            Ok(())
        }
        Command::Wd { input, curve, p } => {
            let rep = if let Some(path) = input {
                let text = std::fs::read_to_string(path)?;
                weil_deligne::from_json(&text).map_err(invalid)?
            } else if let (Some(c), Some(p)) = (curve, p) {
                let parts: Vec<&str> = c.split(',').collect();
                if parts.len() != 2 {
                    return Err(CliError::Validation("curve must be 'a,b'".into()));
                }
                let a: i64 = parts[0].trim().parse().map_err(invalid)?;
                let b: i64 = parts[1].trim().parse().map_err(invalid)?;
                let e = elliptic::ShortWeierstrassCurve::new(a, b).map_err(invalid)?;
                weil_deligne::from_elliptic_reduction(&e, *p).map_err(invalid)?
            } else {
                return Err(CliError::Validation("pass --input FILE or --curve a,b --p P".into()));
            };
            let conductor = weil_deligne::artin_conductor(&rep).map_err(invalid)?;
            let lf = weil_deligne::local_l_factor(&rep).map_err(invalid)?;
            let mut summary =
                RunSummary::new("wd", cfg, &[("n", rep.n.to_string()), ("q", rep.q.to_string())]);
            summary.insert("conductor", serde_json::json!(conductor));
            summary.insert(
                "l_factor_coefficients",
                serde_json::json!(lf.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()),
            );
            summary.insert(
                "rep",
                serde_json::from_str::<serde_json::Value>(&weil_deligne::to_json(&rep)).unwrap(),
            );
            let rows: Vec<Vec<String>> = lf
                .iter()
                .enumerate()
                .map(|(i, z)| vec![i.to_string(), z.re.to_string(), z.im.to_string()])
                .collect();
            sink.write_csv(&summary, &["degree", "coeff_re", "coeff_im"], &rows)?;
            sink.write_json(&summary)?;
            println!("conductor exponent {conductor}; L-factor degree {}", lf.len() - 1);
            Ok(())
        }
        Command::Report { preset, x, box_height, prime_max, seed } => {
            let x = x.or_else(|| cfg.get_f64("x")).unwrap_or(100_000.0);
            let prime_max = prime_max.or_else(|| cfg.get_u64("prime-max")).unwrap_or(10_000);
            let seed = seed.or_else(|| cfg.get_u64("seed")).unwrap_or(0);
            let series = match preset.as_str() {
                "f2" => {
                    let snap = presets::snapshot_f2(x).map_err(invalid)?;
                    family_stats::build_vertical_series(&snap, 3, prime_max).map_err(invalid)?
                }
                "fell-box" => {
                    let height = box_height.or_else(|| cfg.get_f64("box")).unwrap_or(30_000.0);
                    let snap = box_family_snapshot(height, prime_max.min(500))?;
                    family_stats::build_vertical_series(&snap, 5, prime_max.min(500))
                        .map_err(invalid)?
                }
                "fell" => presets::vertical_series_fell(5, prime_max.min(2000)).map_err(invalid)?,
                "washington" | "generic" | "unit-section" => {
                    let fam = one_param_family(preset)?;
                    presets::vertical_series_one_param(&fam, 5, prime_max.min(5000))
                        .map_err(invalid)?
                }
                other => return Err(CliError::Validation(format!("unknown preset '{other}'"))),
            };
            let provenance = family_stats::Provenance {
                preset: preset.clone(),
                seed,
                config_hash: format!("{:016x}", cfg.hash()),
            };
            let report =
                family_stats::indicator_report(&series, prime_max, None, 0.08, provenance)
                    .map_err(invalid)?;
            let mut summary = RunSummary::new(
                "report",
                cfg,
                &[("preset", preset.clone()), ("x", x.to_string()), ("prime-max", prime_max.to_string())],
            );
            summary.insert("report", serde_json::to_value(&report).unwrap());
            let rows: Vec<Vec<String>> = series
                .primes
                .iter()
                .zip(series.t1.iter().zip(series.t2.iter()))
                .map(|(p, (t1, t2))| vec![p.to_string(), t1.re.to_string(), t2.re.to_string()])
                .collect();
            sink.write_csv(&summary, &["p", "t_hat_p", "t_hat_p2"], &rows)?;
            sink.write_json(&summary)?;
            println!(
                "verdict: {:?}; i = ({:.4}, {:.4}, {:.4}); rank = {:.4}",
                report.verdict, report.i[0], report.i[1], report.i[2], report.rank
            );
            Ok(())
        }
    }
}

fn one_param_family(name: &str) -> Result<elliptic::OneParamFamily, CliError> {
    match name {
        "washington" => Ok(elliptic::OneParamFamily::washington()),
        "generic" => Ok(elliptic::OneParamFamily::generic_rank_zero()),
        "unit-section" => Ok(elliptic::OneParamFamily::unit_section_rank_one()),
        "cassels-schinzel" => Err(CliError::Validation(
            "cassels-schinzel is isotrivial (vertical statistics only; use `vertical`)".into(),
        )),
        other => Err(CliError::Validation(format!("unknown family '{other}'"))),
    }
}

/// Vertical measure of a one-parameter preset at p, fibers grouped by
/// trace. The Cassels–Schinzel pencil (7+7w⁴)y² = x³−x enters as a
/// quartic twist of its fixed curve.
fn one_param_vertical(preset: &str, p: u64) -> Result<measures::TorusMeasure, CliError> {
    use famlab_core::measures::TorusPoint;
    if p <= 3 || !famlab_core::util::primes::is_prime(p) {
        return Err(CliError::Validation(format!("{p} is not an odd prime > 3")));
    }
    let sqrt_p = (p as f64).sqrt();
    let mut counts: std::collections::BTreeMap<i64, u64> = std::collections::BTreeMap::new();
    let mut total = 0u64;
    match preset {
        "cassels-schinzel" => {
            let base = elliptic::ShortWeierstrassCurve::new(-1, 0).unwrap();
            let ap0 = elliptic::ap_single(&base, p).map_err(invalid)?;
            for w in 0..p {
                let g = (7 + 7 * (w * w % p) * (w * w % p) % p) % p;
                if g == 0 {
                    continue;
                }
                let chi = dirichlet::legendre_euler(g as i64, p) as i64;
                *counts.entry(chi * ap0).or_insert(0) += 1;
                total += 1;
            }
        }
        "washington" | "generic" => {
            let fam = one_param_family(preset)?;
            for w in 0..p {
                let a2 = fam.c2.eval_mod(w, p);
                let a1 = fam.c1.eval_mod(w, p);
                let a0 = fam.c0.eval_mod(w, p);
                let mut s = 0i64;
                for x in 0..p {
                    let v = (((x + a2) % p * x + a1) % p * x + a0) % p;
                    s += dirichlet::legendre_euler(v as i64, p) as i64;
                }
                *counts.entry(-s).or_insert(0) += 1;
                total += 1;
            }
        }
        other => return Err(CliError::Validation(format!("unknown preset '{other}'"))),
    }
    let atoms = counts
        .into_iter()
        .map(|(ap, c)| {
            let theta = (ap as f64 / (2.0 * sqrt_p)).clamp(-1.0, 1.0).acos();
            (TorusPoint::new(vec![theta, -theta]), c as f64 / total.max(1) as f64)
        })
        .collect();
    Ok(measures::TorusMeasure::atomic(atoms))
}

/// Quadratic vertical tallies restricted to a conductor shell.
fn quadratic_vertical_shell(
    p: u64,
    shell_min: f64,
    x: f64,
) -> Result<dirichlet::QuadraticVertical, CliError> {
    if shell_min <= 0.0 {
        return dirichlet::vertical_measure_quadratic(p, x).map(|(_, s)| s).map_err(invalid);
    }
    let ds = dirichlet::enumerate_fundamental(x).map_err(invalid)?;
    let mut counts = [0usize; 3];
    for d in ds.iter().filter(|d| d.conductor() as f64 > shell_min) {
        match d.chi(p as i64) {
            1 => counts[0] += 1,
            -1 => counts[1] += 1,
            _ => counts[2] += 1,
        }
    }
    let n = (counts[0] + counts[1] + counts[2]).max(1) as f64;
    Ok(dirichlet::QuadraticVertical {
        plus: counts[0] as f64 / n,
        minus: counts[1] as f64 / n,
        ramified: counts[2] as f64 / n,
        members: n as usize,
    })
}

/// The horizontal (member-backed) window of the two-parameter box family:
/// curves enumerated by height, coefficients read off per prime with the
/// direct a_p engine.
fn box_family_snapshot(
    height: f64,
    prime_cap: u64,
) -> Result<family_stats::FamilySnapshot, CliError> {
    use famlab_core::family_stats::{CoeffConvention, FamilyMember, LocalCoefficients};
    use famlab_core::Complex64;
    struct CurveCoeffs {
        curve: elliptic::ShortWeierstrassCurve,
        cap: u64,
    }
    impl LocalCoefficients for CurveCoeffs {
        fn a(&self, p: u64, k: u32) -> Option<Complex64> {
            if !self.curve.has_good_reduction(p) {
                return None;
            }
            let ap = elliptic::ap_single(&self.curve, p).ok()? as f64;
            let t = ap / (p as f64).sqrt();
            // power sums of the Satake pair: a(p) = t, a(p²) = t² − 2
            let v = match k {
                1 => t,
                2 => t * t - 2.0,
                _ => return None,
            };
            Some(Complex64::new(v, 0.0))
        }
        fn max_prime(&self) -> u64 {
            self.cap
        }
    }
    let mut curves = elliptic::enumerate_box(height).map_err(invalid)?;
    curves.sort_by_key(|c| c.height());
    let members = curves
        .into_iter()
        .map(|curve| FamilyMember {
            conductor_gauge: curve.height() as f64,
            coeffs: std::sync::Arc::new(CurveCoeffs { curve, cap: prime_cap })
                as std::sync::Arc<dyn LocalCoefficients>,
        })
        .collect();
    Ok(family_stats::FamilySnapshot {
        family_id: "fell-box".into(),
        cutoff: height,
        members,
        convention: CoeffConvention::PowerSum,
    })
}

fn vertical_atom_rows(mu: &measures::TorusMeasure, summary: &mut RunSummary) -> Vec<Vec<String>> {
    let atoms = mu.atoms().unwrap_or_default();
    summary.insert("total_mass", serde_json::json!(mu.total_mass()));
    summary.insert("atoms", serde_json::json!(atoms.len()));
    atoms
        .iter()
        .map(|(pt, w)| vec![pt.angles().last().unwrap().to_string(), w.to_string()])
        .collect()
}

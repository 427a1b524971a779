//! fracclock: fractional and higher-order diffusion on bounded domains by
//! spectral series, clock quadrature, and Monte Carlo.

use clap::{Args, Parser, Subcommand};
use fracclock::config::{OrderConfig, RunConfig};
use fracclock::domain::DomainSpec;
use fracclock::mc::{
    sample_alpha_clock, sample_inverse_stable, sample_iterated_bm_clock, sample_stable_subordinator,
    ChaCha12Rng, RngStream,
};
use fracclock::report::format_float;
use fracclock::run::{build_domain, build_initial, run};
use fracclock::special::stable::{inverse_stable_density, stable_cdf};
use fracclock::spectral::per_mode_higher_order_residual;
use fracclock::subordinate::cauchy_clock_residual;
use fracclock::verify::{fractional_residual, ks_distribution_test, KsReference};

use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fracclock",
    about = "Time-fractional and higher-order Cauchy problems on bounded domains",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve with the selected methods and write CSV fields plus a
    /// cross-method comparison report.
    Solve(ProblemArgs),
    /// Run PDE residual checks for the configured order.
    Verify(VerifyArgs),
    /// Kolmogorov-Smirnov suite over the clock identities.
    DistTest(DistTestArgs),
    /// Dump eigenpairs of the configured domain.
    Eigen(EigenArgs),
}

/// Problem selection; flags override values from --config.
#[derive(Args, Clone)]
struct ProblemArgs {
    /// Configuration file (JSON or key=value); flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Domain kind: interval or box.
    #[arg(long)]
    domain: Option<String>,
    /// Interval length.
    #[arg(long)]
    length: Option<f64>,
    /// Box side lengths, comma separated.
    #[arg(long)]
    sides: Option<String>,
    /// Initial datum: sine, product-sine, bump, polynomial.
    #[arg(long)]
    initial: Option<String>,
    /// Fractional order in (0,1]; 1 is the heat baseline.
    #[arg(long)]
    beta: Option<f64>,
    /// Higher-order index m >= 2 (beta = 1/m).
    #[arg(long)]
    m: Option<u32>,
    /// Stable clock index in (0,2].
    #[arg(long)]
    alpha: Option<f64>,
    /// Iterated-Brownian depth k >= 1 (beta = 1/2^k).
    #[arg(long)]
    k: Option<u32>,
    /// Comma-separated evaluation times.
    #[arg(long)]
    times: Option<String>,
    /// Semicolon-separated points, coordinates comma separated.
    #[arg(long)]
    points: Option<String>,
    /// Comma-separated subset of spectral,quadrature,mc.
    #[arg(long)]
    methods: Option<String>,
    /// Monte Carlo replicates.
    #[arg(long)]
    mc_n: Option<u64>,
    /// Monte Carlo path step.
    #[arg(long)]
    mc_h: Option<f64>,
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Spectral doubling tolerance.
    #[arg(long)]
    tol_spectral: Option<f64>,
    /// Quadrature tolerance.
    #[arg(long)]
    tol_quadrature: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Output file prefix.
    #[arg(long)]
    prefix: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Uniform step for the Caputo (L1) time grid.
    #[arg(long, default_value_t = 1e-4)]
    tau: f64,
    /// Residual tolerance for the verdict.
    #[arg(long, default_value_t = 2e-3)]
    tolerance: f64,
    /// Finite-difference step for the Cauchy-clock residual.
    #[arg(long, default_value_t = 1e-3)]
    fd_step: f64,
}

#[derive(Args)]
struct DistTestArgs {
    /// Samples per test.
    #[arg(long, default_value_t = 50_000)]
    n: usize,
    /// RNG seed (fixed default keeps the suite deterministic).
    #[arg(long, default_value_t = 20_260_808)]
    seed: u64,
    /// Rejection level on the p-value.
    #[arg(long, default_value_t = 0.01)]
    level: f64,
}

#[derive(Args)]
struct EigenArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// How many modes to dump.
    #[arg(long, default_value_t = 10)]
    count: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Verify(args) => cmd_verify(args),
        Command::DistTest(args) => cmd_dist_test(args),
        Command::Eigen(args) => cmd_eigen(args),
    };
    match outcome {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Layer CLI flags over the config file by rendering them into the
/// key=value form and reparsing, so one validator covers both sources.
fn assemble_config(args: &ProblemArgs) -> Result<RunConfig, Box<dyn std::error::Error>> {
    let mut text = String::new();
    if let Some(path) = &args.config {
        text = std::fs::read_to_string(path)?;
        if text.trim_start().starts_with('{') {
            // Normalize JSON to the key=value layer by parsing and
            // re-rendering only when overrides are present.
            let base = fracclock::parse_config(&text)?;
            text = render_keyvalue(&base);
        }
    }
    let mut push = |k: &str, v: String| {
        text.push_str(&format!("{k} = {v}\n"));
    };
    if let Some(v) = &args.domain {
        push("domain", v.clone());
    }
    if let Some(v) = args.length {
        push("length", format!("{v}"));
    }
    if let Some(v) = &args.sides {
        push("sides", v.clone());
    }
    if let Some(v) = &args.initial {
        push("initial", v.clone());
    }
    if let Some(v) = args.beta {
        push("beta", format!("{v}"));
    }
    if let Some(v) = args.m {
        push("m", format!("{v}"));
    }
    if let Some(v) = args.alpha {
        push("alpha", format!("{v}"));
    }
    if let Some(v) = args.k {
        push("k", format!("{v}"));
    }
    if let Some(v) = &args.times {
        push("times", v.clone());
    }
    if let Some(v) = &args.points {
        push("points", v.clone());
    }
    if let Some(v) = &args.methods {
        push("methods", v.clone());
    }
    if let Some(v) = args.mc_n {
        push("mc.n", format!("{v}"));
    }
    if let Some(v) = args.mc_h {
        push("mc.h", format!("{v}"));
    }
    if let Some(v) = args.seed {
        push("mc.seed", format!("{v}"));
    }
    if let Some(v) = args.tol_spectral {
        push("tol.spectral", format!("{v}"));
    }
    if let Some(v) = args.tol_quadrature {
        push("tol.quadrature", format!("{v}"));
    }
    if let Some(v) = &args.out_dir {
        push("out.dir", v.display().to_string());
    }
    if let Some(v) = &args.prefix {
        push("out.prefix", v.clone());
    }
    Ok(fracclock::parse_config(&text)?)
}

/// Key=value rendering of a config; later lines override earlier ones when
/// flags are appended after this block.
fn render_keyvalue(cfg: &RunConfig) -> String {
    use fracclock::config::DomainConfig;
    let mut s = String::new();
    match &cfg.problem.domain {
        DomainConfig::Interval { length } => {
            s.push_str("domain = interval\n");
            s.push_str(&format!("length = {length}\n"));
        }
        DomainConfig::Box { sides } => {
            s.push_str("domain = box\n");
            let list: Vec<String> = sides.iter().map(|v| v.to_string()).collect();
            s.push_str(&format!("sides = {}\n", list.join(",")));
        }
    }
    s.push_str(&format!("initial = {}\n", cfg.problem.initial));
    match cfg.problem.order {
        OrderConfig::Beta(b) => s.push_str(&format!("beta = {b}\n")),
        OrderConfig::M(m) => s.push_str(&format!("m = {m}\n")),
        OrderConfig::Alpha(a) => s.push_str(&format!("alpha = {a}\n")),
        OrderConfig::K(k) => s.push_str(&format!("k = {k}\n")),
    }
    let times: Vec<String> = cfg.grid.times.iter().map(|v| v.to_string()).collect();
    s.push_str(&format!("times = {}\n", times.join(",")));
    let points: Vec<String> = cfg
        .grid
        .points
        .iter()
        .map(|p| p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        .collect();
    s.push_str(&format!("points = {}\n", points.join(";")));
    let methods: Vec<&str> = cfg.methods.iter().map(|m| m.as_str()).collect();
    s.push_str(&format!("methods = {}\n", methods.join(",")));
    if let Some(mc) = &cfg.mc {
        s.push_str(&format!("mc.n = {}\nmc.h = {}\nmc.seed = {}\n", mc.n, mc.h, mc.seed));
    }
    s.push_str(&format!(
        "tol.spectral = {}\ntol.quadrature = {}\n",
        cfg.tolerances.spectral, cfg.tolerances.quadrature
    ));
    s.push_str(&format!("out.dir = {}\n", cfg.output.dir.display()));
    s.push_str(&format!("out.prefix = {}\n", cfg.output.prefix));
    s
}

fn cmd_solve(args: ProblemArgs) -> Result<bool, Box<dyn std::error::Error>> {
    let cfg = assemble_config(&args)?;
    let summary = run(&cfg)?;
    for (method, path) in &summary.fields {
        println!("{}: {}", method.as_str(), path.display());
    }
    if let Some(path) = &summary.report_path {
        println!(
            "comparison: {} ({})",
            path.display(),
            if summary.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(summary.pass)
}

fn cmd_verify(args: VerifyArgs) -> Result<bool, Box<dyn std::error::Error>> {
    let cfg = assemble_config(&args.problem)?;
    let domain = build_domain(&cfg)?;
    let ic = build_initial(&cfg, &domain)?;
    let grid: Vec<(f64, Vec<f64>)> = cfg
        .grid
        .times
        .iter()
        .flat_map(|&t| cfg.grid.points.iter().map(move |p| (t, p.clone())))
        .collect();

    let mut pass = true;
    match cfg.problem.order {
        OrderConfig::Alpha(alpha) => {
            if (alpha - 1.0).abs() > 1e-12 {
                // Solution values exist for any rational alpha, but the
                // higher-order residual check is implemented only for the
                // Cauchy clock alpha = 1.
                return Err("verify: residual checks support alpha = 1 only; \
                            other alpha clocks are solve-only"
                    .into());
            }
            let r = cauchy_clock_residual(&domain, &ic, &grid, args.fd_step)?;
            pass &= r <= args.tolerance;
            println!(
                "cauchy-clock residual: max |u_tt + 2 Lap f/(pi t) + Lap^2 u| = {} ({})",
                format_float(r),
                verdict(r <= args.tolerance)
            );
        }
        order => {
            let beta = order.beta().expect("fractional order");
            if beta < 1.0 {
                let report = fractional_residual(&domain, &ic, beta, &grid, args.tau, args.tolerance)?;
                let ok = report.max_residual <= args.tolerance && !report.inconclusive;
                pass &= ok;
                println!(
                    "fractional residual (beta = {beta}): max |caputo(u) - lap u| = {}{} ({})",
                    format_float(report.max_residual),
                    if report.inconclusive { " [inconclusive truncation]" } else { "" },
                    verdict(ok)
                );
            } else {
                let report = fractional_residual(&domain, &ic, 1.0, &grid, args.tau, args.tolerance)?;
                let ok = report.max_residual <= args.tolerance;
                pass &= ok;
                println!(
                    "heat residual: max |du/dt - lap u| = {} ({})",
                    format_float(report.max_residual),
                    verdict(ok)
                );
            }
            if let OrderConfig::M(m) = order {
                let t_grid: Vec<f64> = (1..=20).map(|i| 0.1 * i as f64).collect();
                for mode in domain.eigenpairs(2)? {
                    let r = per_mode_higher_order_residual(mode.lambda, m, &t_grid)?;
                    let ok = r <= 1e-8;
                    pass &= ok;
                    println!(
                        "per-mode identity (m = {m}, lambda = {}): max residual {} ({})",
                        mode.lambda,
                        format_float(r),
                        verdict(ok)
                    );
                }
            }
        }
    }
    Ok(pass)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn cmd_dist_test(args: DistTestArgs) -> Result<bool, Box<dyn std::error::Error>> {
    if args.n < 1000 {
        return Err("dist-test: need --n >= 1000".into());
    }
    let stream = RngStream::new(args.seed);
    let draw = |stream_id: u64, f: &mut dyn FnMut(&mut ChaCha12Rng) -> f64| {
        let mut rng = stream.with_stream(stream_id).rng();
        (0..args.n).map(|_| f(&mut rng)).collect::<Vec<f64>>()
    };

    let mut pass = true;
    let mut report = |name: &str, d: f64, p: f64| {
        let ok = p > args.level;
        pass &= ok;
        println!("{name}: D = {d:.5}, p = {p:.4} ({})", verdict(ok));
    };

    // |I_1(1)| against the half-normal CDF erf(x/2).
    let i1 = draw(1, &mut |rng| {
        sample_iterated_bm_clock(1, 1.0, rng).unwrap().value
    });
    let (d, p) = ks_distribution_test(&i1, KsReference::Cdf(&|x: f64| fracclock::special::gamma::erf(x / 2.0)))?;
    report("|I_1(1)| vs half-normal(variance 2)", d, p);

    // |I_2(1)| against E^{1/4}(1) drawn through the subordinator.
    let i2 = draw(2, &mut |rng| {
        sample_iterated_bm_clock(2, 1.0, rng).unwrap().value
    });
    let e4 = draw(3, &mut |rng| {
        sample_inverse_stable(0.25, 1.0, rng).unwrap().value
    });
    let (d, p) = ks_distribution_test(&i2, KsReference::Samples(&e4))?;
    report("|I_2(1)| vs E^{1/4}(1)", d, p);

    // E^{1/2}(1) against the half-normal density (closed form reduction).
    let e2 = draw(4, &mut |rng| {
        sample_inverse_stable(0.5, 1.0, rng).unwrap().value
    });
    let (d, p) = ks_distribution_test(&e2, KsReference::Cdf(&|x: f64| fracclock::special::gamma::erf(x / 2.0)))?;
    report("E^{1/2}(1) vs half-normal(variance 2)", d, p);

    // D(1) at beta = 1/2 against its closed-form CDF.
    let d1 = draw(5, &mut |rng| sample_stable_subordinator(0.5, rng).unwrap());
    let (d, p) = ks_distribution_test(&d1, KsReference::Cdf(&|x: f64| {
        stable_cdf(0.5, x).unwrap_or(0.0)
    }))?;
    report("D(1), beta = 1/2, vs erfc CDF", d, p);

    // beta = 0.7 subordinator draws against the quadrature CDF of g_{0.7}.
    let d7 = draw(6, &mut |rng| sample_stable_subordinator(0.7, rng).unwrap());
    let (d, p) = ks_distribution_test(&d7, KsReference::Cdf(&|x: f64| {
        stable_cdf(0.7, x).unwrap_or(0.0)
    }))?;
    report("D(1), beta = 0.7, vs integral CDF", d, p);

    // |Y(1)| with alpha = 1 against the folded Cauchy CDF.
    let y1 = draw(7, &mut |rng| sample_alpha_clock(1.0, 1.0, rng).unwrap().value);
    let (d, p) = ks_distribution_test(&y1, KsReference::Cdf(&|x: f64| {
        (2.0 / std::f64::consts::PI) * x.atan()
    }))?;
    report("|Y(1)|, alpha = 1, vs folded Cauchy", d, p);

    // E^{1/4}(1) sampler against its analytic density.
    let (d, p) = ks_distribution_test(
        &e4,
        KsReference::Density {
            pdf: &|x: f64| {
                if x <= 0.0 {
                    0.0
                } else {
                    inverse_stable_density(0.25, 1.0, x).unwrap_or(0.0)
                }
            },
            support_lo: 0.0,
        },
    )?;
    report("E^{1/4}(1) vs analytic density", d, p);

    Ok(pass)
}

fn cmd_eigen(args: EigenArgs) -> Result<bool, Box<dyn std::error::Error>> {
    let cfg = assemble_config(&args.problem)?;
    let domain = build_domain(&cfg)?;
    let modes = domain.eigenpairs(args.count)?;
    println!("n,lambda,sup_norm");
    for m in &modes {
        println!("{},{},{}", m.index, format_float(m.lambda), format_float(m.sup_norm()));
    }
    let _ = DomainSpec::dim(&domain);
    Ok(true)
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use splinebem::assembly::{QuadratureSetup, Strategy};
use splinebem::bench::{
    convergence_svg, fitted_order, rule_entries, run_convergence_on, run_quad_bench, write_csv, SweepConfig,
};
use splinebem::geometry::CurveSpec;
use splinebem::problems::Problem;
use splinebem::splines::BasisSpec;
use splinebem::Error;

/// Spline Galerkin BEM solver and quadrature benchmark.
#[derive(Debug, Parser)]
#[command(name = "splinebem", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a model problem over a sweep of degrees and mesh sizes.
    Solve(SolveArgs),
    /// Accuracy of the log-weighted quadrature rules on test integrands.
    Quadbench(QuadArgs),
}

/// Every flag of `solve`, also readable from a JSON config file. Flags given
/// on the command line take precedence over the file.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveArgs {
    /// JSON file with any of the options below.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// parabola or closed-smooth.
    #[arg(long)]
    problem: Option<String>,
    /// Degrees: `2`, `2,3,5` or `2:5`.
    #[arg(long)]
    degree: Option<String>,
    /// Mesh sizes, e.g. `1/5,1/10` or `0.2`.
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    nref: Option<usize>,
    /// weighted or element.
    #[arg(long)]
    strategy: Option<String>,
    /// Gauss points per element of the element-by-element strategy.
    #[arg(long)]
    ng: Option<usize>,
    /// Gauss points per refined element for the double-layer term.
    #[arg(long)]
    b2_gauss: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Worker threads per run; 0 uses all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Average the weighted matrix with its transpose.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    symmetrize: Option<bool>,
    /// JSON curve replacing the problem's default geometry.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Also write convergence.svg.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    svg: Option<bool>,
    /// Write the quadrature weights of every cell.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    dump_rules: Option<bool>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuadArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Degrees: `2:5` or a list.
    #[arg(long)]
    degrees: Option<String>,
    /// Element counts, e.g. `10,20,40,80,100`.
    #[arg(long)]
    nh: Option<String>,
    #[arg(long)]
    nref: Option<usize>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    dump_rules: Option<bool>,
    #[arg(long)]
    out: Option<PathBuf>,
}

macro_rules! merge_fields {
    ($cli:expr, $file:expr, $($f:ident),*) => {
        $( if $cli.$f.is_none() { $cli.$f = $file.$f; } )*
    };
}

fn load_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn parse_list<T, F: Fn(&str) -> Option<T>>(text: &str, what: &str, item: F) -> Result<Vec<T>, Error> {
    let bad = || Error::Config(format!("cannot parse {what} '{text}'"));
    text.split(',').map(|p| item(p.trim()).ok_or_else(bad)).collect()
}

fn parse_degrees(text: &str) -> Result<Vec<usize>, Error> {
    if let Some((lo, hi)) = text.split_once(':') {
        let bad = || Error::Config(format!("cannot parse degree range '{text}'"));
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    parse_list(text, "degrees", |p| p.parse().ok())
}

fn parse_h(text: &str) -> Result<Vec<f64>, Error> {
    parse_list(text, "mesh sizes", |p| match p.split_once('/') {
        Some((n, d)) => Some(n.trim().parse::<f64>().ok()? / d.trim().parse::<f64>().ok()?),
        None => p.parse().ok(),
    })
}

fn parse_strategy(text: &str) -> Result<Strategy, Error> {
    match text {
        "weighted" => Ok(Strategy::Weighted),
        "element" => Ok(Strategy::Element),
        other => Err(Error::Config(format!("unknown strategy '{other}' (expected 'weighted' or 'element')"))),
    }
}

fn dump_rules(path: &Path, basis: &BasisSpec, nref: usize) -> Result<(), Error> {
    let setup = QuadratureSetup::build(basis, nref)?;
    write_csv(path, &rule_entries(&setup))
}

fn run_solve(mut args: SolveArgs) -> Result<(), Error> {
    if let Some(path) = args.config.clone() {
        let file: SolveArgs = load_config(&path)?;
        merge_fields!(
            args, file, problem, degree, h, nref, strategy, ng, b2_gauss, repeats, threads, symmetrize, curve, svg,
            dump_rules, out
        );
    }
    let name = args.problem.ok_or_else(|| Error::Config("--problem is required".into()))?;
    let degrees = parse_degrees(args.degree.as_deref().unwrap_or("2"))?;
    let h = parse_h(args.h.as_deref().ok_or_else(|| Error::Config("--h is required".into()))?)?;
    let strategy = parse_strategy(args.strategy.as_deref().unwrap_or("weighted"))?;
    let out = args.out.unwrap_or_else(|| PathBuf::from("."));

    let mut problem = Problem::by_name(&name)?;
    if let Some(path) = &args.curve {
        let spec = CurveSpec::from_json(&fs::read_to_string(path)?)?;
        problem = problem.with_curve(spec.build()?)?;
    }
    let mut sweep = SweepConfig::new(&name, degrees, h, args.nref.unwrap_or(1), strategy);
    if let Some(v) = args.ng {
        sweep.ng = v;
    }
    if let Some(v) = args.b2_gauss {
        sweep.b2_gauss = v;
    }
    if let Some(v) = args.repeats {
        sweep.repeats = v;
    }
    if let Some(v) = args.threads {
        sweep.threads = v;
    }
    sweep.symmetrize = args.symmetrize.unwrap_or(false);

    // validate every cell before spending time on any of them
    let cells = sweep.cells(&problem)?;
    fs::create_dir_all(&out)?;
    let rows = run_convergence_on(&problem, &sweep)?;
    write_csv(&out.join("runs.csv"), &rows)?;
    if args.svg.unwrap_or(false) {
        fs::write(out.join("convergence.svg"), convergence_svg(&rows))?;
    }
    if args.dump_rules.unwrap_or(false) {
        for cell in &cells {
            let basis = problem.discretization(cell.degree, cell.n_h)?;
            dump_rules(&out.join(format!("rules_d{}_nh{}.csv", cell.degree, cell.n_h)), &basis, cell.nref)?;
        }
    }

    println!("{:>3} {:>6} {:>6} {:>11} {:>11} {:>11} {:>10}", "d", "n_h", "dof", "cond", "E_R", "E_M", "assembly");
    for r in &rows {
        println!(
            "{:>3} {:>6} {:>6} {:>11.3e} {:>11.3e} {:>11.3e} {:>9.3}s",
            r.d, r.n_h, r.dof, r.cond, r.e_r, r.e_m, r.assembly_seconds
        );
    }
    for &d in &sweep.degrees {
        let (hs, es): (Vec<f64>, Vec<f64>) = rows.iter().filter(|r| r.d == d).map(|r| (r.h, r.e_r)).unzip();
        if let Some(order) = fitted_order(&hs, &es) {
            println!("d={d}: fitted order of E_R in h = {order:.2}");
        }
    }
    Ok(())
}

fn run_quadbench(mut args: QuadArgs) -> Result<(), Error> {
    if let Some(path) = args.config.clone() {
        let file: QuadArgs = load_config(&path)?;
        merge_fields!(args, file, degrees, nh, nref, dump_rules, out);
    }
    let degrees = parse_degrees(args.degrees.as_deref().unwrap_or("2:5"))?;
    let n_hs: Vec<usize> = parse_list(args.nh.as_deref().unwrap_or("10,20,40,80,100"), "element counts", |p| {
        p.parse().ok().filter(|&n: &usize| n > 0)
    })?;
    let nref = args.nref.unwrap_or(2);
    let out = args.out.unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out)?;

    let rows = run_quad_bench(&degrees, &n_hs, nref)?;
    write_csv(&out.join("quadbench.csv"), &rows)?;
    if args.dump_rules.unwrap_or(false) {
        for &d in &degrees {
            for &n in &n_hs {
                let basis = BasisSpec::clamped_uniform(d, -1.0, 1.0, n)?;
                dump_rules(&out.join(format!("rules_d{d}_nh{n}.csv")), &basis, nref)?;
            }
        }
    }
    println!("{:>3} {:>5} {:>14} {:>11} {:>11}", "d", "n_h", "family", "ERR", "sqrt(ERR)");
    for r in &rows {
        println!("{:>3} {:>5} {:>14} {:>11.3e} {:>11.3e}", r.d, r.n_h, r.family, r.err, r.err_rel);
    }
    Ok(())
}

#[derive(Serialize)]
struct ErrorRecord<'a> {
    kind: &'a str,
    message: String,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Quadbench(args) => run_quadbench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = ErrorRecord { kind: e.kind(), message: e.to_string() };
            eprintln!("{}", serde_json::json!({ "error": record }));
            ExitCode::FAILURE
        }
    }
}

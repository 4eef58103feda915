//! `dacdist` command line.
//!
//! Exit codes: 0 on success, 1 on I/O failure, 2 for usage and domain
//! errors, 3 when the solver hits its iteration cap (outputs are still
//! written). Without `--out`, files go to `$DACDIST_OUT_DIR` or the current
//! directory.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::{closed_form_sqrt2, sample_grid, GaussianApprox, PiecewisePolyApprox};
use crate::codec::OverlapSpec;
use crate::empirical::{cell_average, distance, sample_histogram, Metric, SampleConfig, SeqLen};
use crate::solver::{solve, SolverConfig};
use crate::table::{format_f, RunManifest, Table};

pub const OUT_DIR_ENV: &str = "DACDIST_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "dacdist",
    version,
    about = "Codeword distribution of distributed arithmetic coding (equiprobable binary sources)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Iterate the grid fixed-point equations to convergence.
    Solve(SolveArgs),
    /// Sample an analytic approximation on a uniform grid.
    Approx(ApproxArgs),
    /// Monte Carlo histogram of codeword values.
    Sample(SampleArgs),
    /// Distances between two distribution tables.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    q: f64,
    /// Number of grid cells N.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    /// Termination threshold on the successive MSE; defaults by rate band.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = SolverConfig::DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Poly,
    Gauss,
    Closed,
}

#[derive(Debug, Args)]
struct ApproxArgs {
    #[arg(value_enum)]
    method: Method,
    /// Required for `poly` and `gauss`; `closed` accepts only 1/sqrt(2).
    #[arg(long)]
    q: Option<f64>,
    /// Number of grid cells; `grid + 1` points are written.
    #[arg(long, default_value_t = 1000)]
    grid: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    q: f64,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 200)]
    bins: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Symbols per sequence; chosen from q when omitted.
    #[arg(long)]
    seq_len: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "l1,mse,linf")]
    metrics: Vec<Metric>,
    /// Average the finer table onto the coarser grid when sizes differ.
    #[arg(long)]
    downsample: bool,
}

struct Failure(i32, String);

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_IO, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, msg.into())
}

/// Parses `args` (including the program name) and runs the command, writing
/// reports to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = e.print();
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Approx(a) => cmd_approx(a, out),
        Command::Sample(a) => cmd_sample(a, out),
        Command::Compare(a) => cmd_compare(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            eprintln!("dacdist: {msg}");
            code
        }
    }
}

fn output_path(explicit: &Option<PathBuf>, default_name: String) -> PathBuf {
    match explicit {
        Some(p) => p.clone(),
        None => std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
            .join(default_name),
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn ensure_parent(path: &Path) -> std::io::Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => std::fs::create_dir_all(dir),
        _ => Ok(()),
    }
}

fn write_gnuplot(csv: &Path, title: &str) -> std::io::Result<PathBuf> {
    let script = sibling(csv, ".gp");
    let name = csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let text = format!(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'u'\nset ylabel 'f(u)'\nplot '{name}' using 1:2 with lines title '{title}'\n"
    );
    std::fs::write(&script, text)?;
    Ok(script)
}

/// Writes the table, optional plot script and manifest.
fn emit(
    table: &Table,
    path: &Path,
    output: &OutputArgs,
    mut manifest: RunManifest,
    extra: &[PathBuf],
    out: &mut dyn Write,
) -> Result<(), Failure> {
    ensure_parent(path)?;
    table.write(path)?;
    manifest.output(path);
    for p in extra {
        manifest.output(p);
    }
    if output.gnuplot {
        let gp = write_gnuplot(path, &manifest.command)?;
        manifest.output(&gp);
    }
    let manifest_path = sibling(path, ".manifest");
    manifest.write(&manifest_path)?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn cmd_solve(args: SolveArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let spec = OverlapSpec::from_q(args.q).map_err(|e| usage(format!("--q: {e}")))?;
    let delta = args.delta.unwrap_or_else(|| SolverConfig::default_delta(spec.q()));
    let config = SolverConfig::new(args.n, delta, args.max_iters).map_err(|e| usage(e.to_string()))?;
    let (dist, report) = solve(&spec, &config).map_err(|e| Failure(EXIT_IO, e.to_string()))?;

    let path = output_path(&args.output.out, format!("solve_q{}_n{}.csv", args.q, args.n));
    let trace_path = sibling(&path, ".mse.csv");
    let mut trace = String::from("iteration,mse\n");
    for (i, m) in report.mse_trace.iter().enumerate() {
        trace.push_str(&format!("{},{}\n", i + 1, format_f(*m)));
    }
    ensure_parent(&trace_path)?;
    std::fs::write(&trace_path, trace)?;

    let u: Vec<f64> = dist.grid().collect();
    let table = Table::new(u, dist.into_values()).map_err(|e| Failure(EXIT_IO, e.to_string()))?;
    let manifest = RunManifest::new("solve")
        .param("q", args.q)
        .param("n", args.n)
        .param("delta", delta)
        .param("max_iters", args.max_iters)
        .param("quadrature", format!("{:?}", config.quadrature))
        .param("iterations", report.iterations)
        .param("final_mse", report.final_mse)
        .param("converged", report.converged);
    emit(&table, &path, &args.output, manifest, &[trace_path], out)?;
    writeln!(
        out,
        "iterations={} final_mse={:e} converged={}",
        report.iterations, report.final_mse, report.converged
    )?;
    if report.converged {
        Ok(EXIT_OK)
    } else {
        eprintln!("dacdist: no convergence after {} iterations", report.iterations);
        Ok(EXIT_NOT_CONVERGED)
    }
}

fn cmd_approx(args: ApproxArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if args.grid < 2 {
        return Err(usage("--grid must be at least 2"));
    }
    let sqrt_half = std::f64::consts::FRAC_1_SQRT_2;
    let (q, (u, f)) = match args.method {
        Method::Closed => {
            let q = args.q.unwrap_or(sqrt_half);
            if (q - sqrt_half).abs() > 1e-6 {
                return Err(usage(format!(
                    "closed form exists only at q = 1/sqrt(2) = {sqrt_half:.9}, got {q}"
                )));
            }
            (q, sample_grid(args.grid, closed_form_sqrt2).map_err(|e| usage(e.to_string()))?)
        }
        Method::Poly => {
            let q = args.q.ok_or_else(|| usage("--q is required for poly"))?;
            let spec = OverlapSpec::from_q(q).map_err(|e| usage(format!("--q: {e}")))?;
            let approx = PiecewisePolyApprox::new(&spec).map_err(|e| {
                usage(format!("{e} (valid range: 1/sqrt(2) <= q <= 0.85)"))
            })?;
            writeln!(
                out,
                "case={} lambda={} c={} breakpoints={:?}",
                approx.case(),
                approx.lambda(),
                approx.c(),
                approx.breakpoints()
            )?;
            (q, sample_grid(args.grid, |x| approx.eval_full(x)).map_err(|e| usage(e.to_string()))?)
        }
        Method::Gauss => {
            let q = args.q.ok_or_else(|| usage("--q is required for gauss"))?;
            let approx = OverlapSpec::from_q(q)
                .and_then(|s| GaussianApprox::from_spec(&s))
                .map_err(|e| usage(format!("{e} (valid range: 0.5 < q < 1)")))?;
            writeln!(out, "sigma2={}", approx.sigma2())?;
            (q, sample_grid(args.grid, |x| Ok(approx.eval(x))).map_err(|e| usage(e.to_string()))?)
        }
    };
    let method = format!("{:?}", args.method).to_lowercase();
    let path = output_path(&args.output.out, format!("approx_{method}_q{q}_g{}.csv", args.grid));
    let table = Table::new(u, f).map_err(|e| Failure(EXIT_IO, e.to_string()))?;
    let (argmax, peak) = table
        .f
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |best, (i, &v)| if v > best.1 { (i, v) } else { best });
    let manifest = RunManifest::new("approx")
        .param("method", &method)
        .param("q", q)
        .param("grid", args.grid);
    emit(&table, &path, &args.output, manifest, &[], out)?;
    writeln!(out, "peak={} at u={}", peak, table.u[argmax])?;
    Ok(EXIT_OK)
}

fn cmd_sample(args: SampleArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let spec = OverlapSpec::from_q(args.q).map_err(|e| usage(format!("--q: {e}")))?;
    let seq_len = args.seq_len.map_or(SeqLen::Auto, SeqLen::Fixed);
    let config = SampleConfig::new(args.samples, args.bins, args.seed)
        .and_then(|c| c.with_seq_len(seq_len))
        .map_err(|e| usage(e.to_string()))?;
    let hist = sample_histogram(&spec, &config).map_err(|e| Failure(EXIT_IO, e.to_string()))?;
    let path = output_path(
        &args.output.out,
        format!("sample_q{}_s{}_b{}_seed{}.csv", args.q, args.samples, args.bins, args.seed),
    );
    let table = Table::new(hist.centers(), hist.density().to_vec())
        .map_err(|e| Failure(EXIT_IO, e.to_string()))?;
    let manifest = RunManifest::new("sample")
        .param("q", args.q)
        .param("samples", args.samples)
        .param("bins", args.bins)
        .param("seed", args.seed)
        .param(
            "seq_len",
            match seq_len {
                SeqLen::Auto => format!("auto({})", crate::empirical::auto_seq_len(&spec)),
                SeqLen::Fixed(n) => n.to_string(),
            },
        );
    emit(&table, &path, &args.output, manifest, &[], out)?;
    Ok(EXIT_OK)
}

fn same_grid(a: &Table, b: &Table) -> bool {
    a.len() == b.len() && a.u.iter().zip(&b.u).all(|(x, y)| (x - y).abs() <= 1e-9)
}

fn cmd_compare(args: CompareArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let a = Table::read(&args.a).map_err(|e| usage(e.to_string()))?;
    let b = Table::read(&args.b).map_err(|e| usage(e.to_string()))?;
    let (fa, fb) = if same_grid(&a, &b) {
        (a.f.clone(), b.f.clone())
    } else if args.downsample {
        let (fine, coarse, fine_is_a) = if a.len() >= b.len() { (&a, &b, true) } else { (&b, &a, false) };
        let averaged = cell_average(&fine.u, &fine.f, &coarse.u).map_err(|e| usage(e.to_string()))?;
        writeln!(
            out,
            "downsampled {} ({} points) onto {} points by cell averaging",
            if fine_is_a { args.a.display() } else { args.b.display() },
            fine.len(),
            coarse.len()
        )?;
        if fine_is_a {
            (averaged, coarse.f.clone())
        } else {
            (coarse.f.clone(), averaged)
        }
    } else {
        return Err(usage(format!(
            "grids differ ({} vs {} points); pass --downsample to bin-average the finer one",
            a.len(),
            b.len()
        )));
    };
    let peak = a.peak();
    for m in &args.metrics {
        let d = distance(&fa, &fb, *m).map_err(|e| usage(e.to_string()))?;
        writeln!(out, "{m}={d:e}")?;
        if *m == Metric::Linf && peak > 0.0 {
            writeln!(out, "linf/peak={:e}", d / peak)?;
        }
    }
    writeln!(out, "peak={peak:e}")?;
    Ok(EXIT_OK)
}

//! `fenchel`: builds surfaces from pants data and runs the length-spectrum
//! experiments. Exit status is 0 on success, 1 for invalid input and 2 when
//! a computation degenerates numerically.

mod run;

use clap::{Args, Parser, Subcommand};
use fenchel::closure::{closure_criterion, convergence_study, FnGenerator};
use fenchel::curves::{beta_curve, geodesic_length, random_out_and_back};
use fenchel::fn_map::{bilipschitz_probe, fn_forward, fn_inverse, FnVector};
use fenchel::generate::{graph_by_name, seeded_surface, LengthRule, TwistRule};
use fenchel::pants_surface::{CuffId, PantsSurface, Step};
use fenchel::spectrum::{default_family, dls_estimate, witness_family, CurveFamily};
use fenchel::twist_flow::{convexity_check, length_derivative};
use fenchel::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use run::Run;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "fenchel", version, about = "Hyperbolic surfaces from pants decompositions")]
struct Cli {
    /// Directory for reports and the run manifest.
    #[arg(long, global = true, default_value = "fenchel-out")]
    out: PathBuf,
    /// Seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance for pass/fail summaries.
    #[arg(long, global = true, default_value_t = 1e-5)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a surface spec (graph topologies) or a base/target pair
    /// (closure generators).
    Generate(GenerateArgs),
    /// Length-spectrum estimate between two surfaces.
    Spectrum {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        /// `default` or a comma-separated list of full twist counts.
        #[arg(long, default_value = "default")]
        family: String,
    },
    /// Normalized Fenchel-Nielsen coordinates.
    Fnmap {
        #[command(subcommand)]
        dir: FnmapCommand,
    },
    /// Ratios of the spectrum estimate to coordinate distance in a ball.
    Probe(ProbeArgs),
    /// Twist derivative and convexity checks.
    Twistflow {
        #[command(subcommand)]
        check: TwistflowCommand,
    },
    /// Closure criterion and truncation studies.
    Closure {
        #[command(subcommand)]
        task: ClosureCommand,
    },
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// chain, tree, genus2, torus, or a closure generator
    /// (sqrt, half, linear, loglog, const, mixed, flat).
    name: String,
    /// Pants in a chain, depth of a tree or of a generator sequence.
    #[arg(long)]
    n: Option<usize>,
    /// Constant cuff length.
    #[arg(long, conflicts_with_all = ["min_length", "max_length"])]
    cuff: Option<f64>,
    /// Log-uniform cuff lengths between these bounds.
    #[arg(long, requires = "max_length")]
    min_length: Option<f64>,
    #[arg(long, requires = "min_length")]
    max_length: Option<f64>,
    /// Constant twist on interior cuffs.
    #[arg(long, conflicts_with = "random_twists")]
    twist: Option<f64>,
    /// Uniform twists in [0, l) on interior cuffs.
    #[arg(long)]
    random_twists: bool,
    /// Length cap M0; defaults to the larger of 1 and the largest length.
    #[arg(long)]
    m0: Option<f64>,
    /// Constant of the closure generators that take one.
    #[arg(long)]
    c: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum FnmapCommand {
    /// Coordinates of `--x` relative to `--base`.
    Forward {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        x: PathBuf,
    },
    /// Surface with coordinates `--vector` relative to `--base`.
    Inverse {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        vector: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ProbeArgs {
    /// Base surface; defaults to a seeded chain with log-uniform lengths.
    #[arg(long)]
    base: Option<PathBuf>,
    /// Radius of the sup-ball around the base point, at most 0.5.
    #[arg(long, default_value_t = 0.5)]
    radius: f64,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Comma-separated full twist counts for the β curves.
    #[arg(long, default_value = "1,2")]
    family: String,
    /// Target crossing cosine of the witness curves.
    #[arg(long, default_value_t = 0.5)]
    eps0: f64,
    /// Pants in the default chain.
    #[arg(long, default_value_t = 50)]
    n: usize,
    /// Smallest length of the default chain.
    #[arg(long, default_value_t = 1e-6)]
    min_length: f64,
}

#[derive(Subcommand, Debug)]
enum TwistflowCommand {
    /// Exact twist derivative against a central difference.
    Derivcheck {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Pants in each random chain.
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 1e-3)]
        min_length: f64,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
    },
    /// Curve length along a twist grid `a:b:n` on one cuff.
    Convexity {
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Surface; defaults to a seeded four-pants chain.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Cuff id to twist; defaults to the first interior cuff.
        #[arg(long)]
        cuff: Option<i64>,
        /// Curve spec; defaults to the β curve of the cuff.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum ClosureCommand {
    /// Tail statistic of the twist offsets of `--spec` over `--base`.
    Verdict {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        base: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        window: f64,
    },
    /// Spectrum estimate between truncations and the full deformation.
    Study {
        #[arg(long)]
        gen: String,
        #[arg(long)]
        depth: usize,
        /// Truncation levels `a:b:n`.
        #[arg(long, allow_hyphen_values = true)]
        igrid: String,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long, default_value = "1")]
        family: String,
    },
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let mut run = Run::new(cli.out.clone(), argv[1..].to_vec(), cli.seed, cli.tol);
    match dispatch(&cli, &mut run).and_then(|_| run.finish()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}

fn dispatch(cli: &Cli, run: &mut Run) -> Result<()> {
    match &cli.command {
        Command::Generate(a) => generate(cli, run, a),
        Command::Spectrum { x, y, family } => {
            let (x, y) = (run.surface(x)?, run.surface(y)?);
            let fam = family_from(&x, family)?;
            run.manifest.family = Some(fam.description().to_string());
            let report = dls_estimate(&x, &y, &fam)?;
            let mut csv = Vec::new();
            report.write_csv(&mut csv)?;
            run.write("spectrum.csv", &csv)?;
            let summary = report.summary();
            run.write_json("spectrum.json", &summary)?;
            println!("dls {} argmax {}", summary.dls, summary.argmax.as_deref().unwrap_or("-"));
            Ok(())
        }
        Command::Fnmap { dir } => fnmap(run, dir),
        Command::Probe(a) => probe(cli, run, a),
        Command::Twistflow { check } => twistflow(cli, run, check),
        Command::Closure { task } => closure(run, task),
    }
}

/// `default` for the cuffs and once-twisted β curves, or explicit twist
/// counts.
fn family_from(s: &PantsSurface, spec: &str) -> Result<CurveFamily> {
    if spec == "default" {
        return Ok(default_family(s, &[1]));
    }
    Ok(default_family(s, &parse_ks(spec)?))
}

fn parse_ks(spec: &str) -> Result<Vec<i64>> {
    spec.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::InvalidArgument(format!("family entry `{t}` is not an integer")))
        })
        .collect()
}

/// `a:b:n` as `n` evenly spaced points from `a` to `b`.
fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("grid `{spec}` must look like a:b:n"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts[..] else { return Err(bad()) };
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() || (n > 1 && a == b) {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

fn generate(cli: &Cli, run: &mut Run, a: &GenerateArgs) -> Result<()> {
    if FnGenerator::NAMES.contains(&a.name.as_str()) {
        let gen = FnGenerator::from_name(&a.name, a.c)?;
        let (x0, x) = gen.realize(a.n.unwrap_or(10))?;
        run.write("base.json", x0.to_spec().to_json()?.as_bytes())?;
        run.write("surface.json", x.to_spec().to_json()?.as_bytes())?;
        println!("{}: {} cuffs", a.name, x.graph().num_cuffs());
        return Ok(());
    }
    let size = a.n.unwrap_or(match a.name.as_str() {
        "tree" => 2,
        _ => 4,
    });
    let graph = graph_by_name(&a.name, size)?;
    let (lengths, top) = match (a.cuff, a.min_length, a.max_length) {
        (Some(l), _, _) => (LengthRule::Constant(l), l),
        (None, Some(min), Some(max)) => (LengthRule::LogUniform { min, max }, max),
        _ => (LengthRule::Constant(1.0), 1.0),
    };
    let twists = if a.random_twists {
        TwistRule::Uniform
    } else {
        TwistRule::Constant(a.twist.unwrap_or(0.0))
    };
    let m0 = a.m0.unwrap_or(top.max(1.0));
    let s = seeded_surface(graph, lengths, twists, m0, cli.seed)?;
    let name = format!("{}.json", a.name);
    run.write(&name, s.to_spec().to_json()?.as_bytes())?;
    println!("{name}: {} pants, {} cuffs", s.graph().num_pants(), s.graph().num_cuffs());
    Ok(())
}

fn fnmap(run: &mut Run, dir: &FnmapCommand) -> Result<()> {
    match dir {
        FnmapCommand::Forward { base, x } => {
            let (x0, x) = (run.surface(base)?, run.surface(x)?);
            let v = fn_forward(&x0, &x)?;
            run.write_json("vector.json", &v.to_spec(x0.graph()))?;
            println!("sup norm {}", v.sup_norm());
        }
        FnmapCommand::Inverse { base, vector } => {
            let x0 = run.surface(base)?;
            let v = run.vector(vector)?.to_vector(x0.graph())?;
            let x = fn_inverse(&x0, &v)?;
            run.write("surface.json", x.to_spec().to_json()?.as_bytes())?;
            println!("surface.json: {} cuffs", x.graph().num_cuffs());
        }
    }
    Ok(())
}

fn probe(cli: &Cli, run: &mut Run, a: &ProbeArgs) -> Result<()> {
    if !(a.radius > 0.0 && a.radius <= 0.5) {
        return Err(Error::InvalidArgument(format!(
            "radius {} must lie in (0, 0.5]",
            a.radius
        )));
    }
    let x0 = match &a.base {
        Some(p) => run.surface(p)?,
        None => {
            let graph = graph_by_name("chain", a.n)?;
            let rule = LengthRule::LogUniform {
                min: a.min_length,
                max: 1.0,
            };
            seeded_surface(graph, rule, TwistRule::Uniform, 1.0, cli.seed)?
        }
    };
    let fam = witness_family(&x0, &parse_ks(&a.family)?, a.eps0)?;
    run.manifest.family = Some(fam.description().to_string());
    let center = FnVector::zero(x0.graph());
    let report = bilipschitz_probe(&x0, &center, a.radius, a.samples, &fam, cli.seed)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    run.write("probe.csv", &csv)?;
    let mut summary = serde_json::to_value(&report)?;
    if let Some(m) = summary.as_object_mut() {
        m.remove("rows");
    }
    run.write_json("probe.json", &summary)?;
    println!(
        "ratio range [{:.4}, {:.4}], distortion {:.4}",
        report.min_ratio, report.max_ratio, report.distortion
    );
    Ok(())
}

#[derive(Serialize)]
struct DerivRow {
    trial: usize,
    exact: f64,
    fd: f64,
    error: f64,
}

#[derive(Serialize)]
struct DerivSummary {
    trials: usize,
    step: f64,
    max_error: f64,
    tol: f64,
    pass: bool,
}

fn twistflow(cli: &Cli, run: &mut Run, check: &TwistflowCommand) -> Result<()> {
    match check {
        TwistflowCommand::Derivcheck {
            trials,
            n,
            min_length,
            step,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let mut rows = Vec::with_capacity(*trials);
            for trial in 0..*trials {
                let graph = graph_by_name("chain", *n)?;
                let rule = LengthRule::LogUniform {
                    min: *min_length,
                    max: 1.0,
                };
                let s = seeded_surface(graph, rule, TwistRule::Uniform, 1.0, rng.gen())?;
                let w = random_out_and_back(s.graph(), &mut rng, 3, 2)?;
                let crossed: Vec<CuffId> = w
                    .steps()
                    .iter()
                    .filter_map(|st| match st {
                        Step::Cross { cuff, .. } => Some(*cuff),
                        _ => None,
                    })
                    .collect();
                let cuff = crossed[rng.gen_range(0..crossed.len())];
                let at = |dt: f64| geodesic_length(&s.with_twist(cuff, s.twist(cuff) + dt)?, &w);
                let (exact, fd) = length_derivative(&s, &w, cuff)
                    .and_then(|d| Ok((d, (at(*step)? - at(-*step)?) / (2.0 * step))))
                    .map_err(|e| e.in_record(format!("trial {trial}")))?;
                rows.push(DerivRow {
                    trial,
                    exact,
                    fd,
                    error: (exact - fd).abs(),
                });
            }
            let max_error = rows.iter().map(|r| r.error).fold(0.0, f64::max);
            run.write_csv("derivcheck.csv", &["trial", "exact", "fd", "error"], &rows)?;
            let summary = DerivSummary {
                trials: *trials,
                step: *step,
                max_error,
                tol: cli.tol,
                pass: max_error <= cli.tol,
            };
            run.write_json("derivcheck.json", &summary)?;
            println!("max |exact - fd| {max_error:.3e} ({})", if summary.pass { "pass" } else { "fail" });
        }
        TwistflowCommand::Convexity {
            grid,
            spec,
            cuff,
            curve,
        } => {
            let grid = parse_grid(grid)?;
            let s = match spec {
                Some(p) => run.surface(p)?,
                None => {
                    let graph = graph_by_name("chain", 4)?;
                    let rule = LengthRule::LogUniform { min: 1e-3, max: 1.0 };
                    seeded_surface(graph, rule, TwistRule::Uniform, 1.0, cli.seed)?
                }
            };
            let g = s.graph();
            let c = match cuff {
                Some(id) => g
                    .cuff_index(*id)
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown cuff id {id}")))?,
                None => g
                    .interior_cuffs()
                    .next()
                    .ok_or_else(|| Error::BadGraph("no interior cuff".into()))?,
            };
            let (w, record) = match curve {
                Some(p) => (run.curve(p)?.to_word(g)?, format!("curve {}", p.display())),
                None => (beta_curve(g, c)?, format!("curve beta:{}", g.cuff_label(c))),
            };
            let report = convexity_check(&s, &w, c, &grid).map_err(|e| e.in_record(record))?;
            let rows: Vec<(f64, f64)> = grid.iter().copied().zip(report.lengths.iter().copied()).collect();
            run.write_csv("convexity.csv", &["t", "length"], &rows)?;
            run.write_json(
                "convexity.json",
                &serde_json::json!({
                    "cuff": g.cuff_label(c),
                    "convex": report.convex,
                    "min_second_difference": report.min_second_difference,
                }),
            )?;
            println!(
                "cuff {}: {} (min second difference {:.3e})",
                g.cuff_label(c),
                if report.convex { "convex" } else { "not convex" },
                report.min_second_difference
            );
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct StudyCsvRow<'a> {
    i: f64,
    dls: f64,
    argmax_curve: &'a str,
}

fn closure(run: &mut Run, task: &ClosureCommand) -> Result<()> {
    match task {
        ClosureCommand::Verdict { spec, base, window } => {
            let (x, x0) = (run.surface(spec)?, run.surface(base)?);
            let report = closure_criterion(&x0, &x, *window)?;
            run.write_json("verdict.json", &report)?;
            println!("{}", serde_json::to_string(&report.verdict)?);
        }
        ClosureCommand::Study {
            gen,
            depth,
            igrid,
            c,
            family,
        } => {
            let grid = parse_grid(igrid)?;
            if grid.iter().any(|&i| i < 0.0) {
                return Err(Error::InvalidArgument(format!("grid `{igrid}` has negative levels")));
            }
            let (x0, x) = FnGenerator::from_name(gen, *c)?.realize(*depth)?;
            let fam = family_from(&x0, family)?;
            run.manifest.family = Some(fam.description().to_string());
            let rows = convergence_study(&x0, &x, &grid, &fam)?;
            let csv_rows: Vec<StudyCsvRow> = rows
                .iter()
                .map(|r| StudyCsvRow {
                    i: r.i,
                    dls: r.dls,
                    argmax_curve: r.argmax.as_deref().unwrap_or(""),
                })
                .collect();
            run.write_csv("study.csv", &["i", "dls", "argmax_curve"], &csv_rows)?;
            if let Some(last) = rows.last() {
                println!("dls at i = {}: {}", last.i, last.dls);
            }
        }
    }
    Ok(())
}

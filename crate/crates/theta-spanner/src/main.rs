use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use theta_spanner::bounds::family_of;
use theta_spanner::geom::{validate_general_position, ConeSystem, EPS_GP};
use theta_spanner::io::{load_instance, render_svg, save_graph, save_instance, save_report};
use theta_spanner::theta::build_constrained_theta;
use theta_spanner::verify::{
    adversarial_search, random_instance, ratio_report_for, SearchParams, RATIO_SLACK,
};
use theta_spanner::visibility::{convex_chain, verify_chain};
use theta_spanner::{Error, Result};

#[derive(Parser)]
#[command(
    name = "theta-spanner",
    version,
    about = "Constrained theta-graphs and empirical spanning-ratio verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the general-position assumptions of an instance.
    Validate {
        instance: PathBuf,
        /// Cone counts to check, comma separated (default: 6 through 13).
        #[arg(long, value_delimiter = ',')]
        cones: Vec<usize>,
    },
    /// Build the constrained graph.
    Build {
        instance: PathBuf,
        #[arg(long, default_value_t = 6)]
        cones: usize,
        /// Write the graph as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Render the instance and graph as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Measure spanning ratios against the family bounds.
    Ratio {
        instance: PathBuf,
        #[arg(long, default_value_t = 6)]
        cones: usize,
        /// Print one line per visible pair.
        #[arg(long)]
        per_pair: bool,
        /// Write the full report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Report wall-clock timing (and include it in the report file).
        #[arg(long)]
        timing: bool,
    },
    /// Ratio summaries across several cone counts.
    Sweep {
        instance: PathBuf,
        /// Cone counts, comma separated (default: 6 through 13).
        #[arg(long, value_delimiter = ',')]
        cones: Vec<usize>,
    },
    /// Hill-climbing search for instances with large ratios.
    Search {
        #[arg(long, default_value_t = 6)]
        cones: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        iters: usize,
        #[arg(long, default_value_t = 8)]
        points: usize,
        #[arg(long, default_value_t = 2)]
        constraints: usize,
        /// Save the best instance found.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random general-position instance.
    Gen {
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 4)]
        constraints: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        out: PathBuf,
    },
    /// Convex chain between two vertices around an apex vertex.
    Chain {
        instance: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long)]
        apex: usize,
    },
}

fn main() -> ExitCode {
    if let Ok(s) = std::env::var("THETA_SPANNER_THREADS") {
        match s.trim().parse::<usize>() {
            Ok(0) => {}
            Ok(t) => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build_global();
            }
            Err(_) => {
                eprintln!("error: THETA_SPANNER_THREADS must be a non-negative integer");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        // A downstream consumer (e.g. `... | head`) closing stdout early is
        // normal usage, not an error.
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for usage, parse, and I/O problems; 1 for everything that amounts to a
/// failed verification.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::Parse(_)
        | Error::InvalidInstance(_)
        | Error::IndexOutOfRange { .. }
        | Error::UnsupportedConeCount { .. } => 2,
        _ => 1,
    }
}

fn cone_list(cones: Vec<usize>) -> Vec<usize> {
    if cones.is_empty() {
        (6..=13).collect()
    } else {
        cones
    }
}

fn run(command: Command) -> Result<u8> {
    let mut stdout = std::io::stdout().lock();
    match command {
        Command::Validate { instance, cones } => {
            let inst = load_instance(&instance)?;
            let mut dirty = false;
            for m in cone_list(cones) {
                let cs = ConeSystem::new(m)?;
                let violations = validate_general_position(inst.points(), cs, EPS_GP);
                if violations.is_empty() {
                    writeln!(stdout, "m = {m}: ok")?;
                } else {
                    dirty = true;
                    writeln!(stdout, "m = {m}: {} violations", violations.len())?;
                    for v in violations.iter().take(10) {
                        writeln!(stdout, "  {v:?}")?;
                    }
                }
            }
            Ok(if dirty { 1 } else { 0 })
        }
        Command::Build {
            instance,
            cones,
            out,
            svg,
        } => {
            let inst = load_instance(&instance)?;
            let spec = family_of(cones)?;
            let graph = build_constrained_theta(&inst, spec.cones)?;
            writeln!(
                stdout,
                "n = {}, constraints = {}, m = {}, edges = {}",
                inst.n(),
                inst.constraints().len(),
                cones,
                graph.edge_count()
            )?;
            if !graph.near_ray.is_empty() {
                writeln!(
                    stdout,
                    "warning: {} member assignments within tolerance of a splitting ray",
                    graph.near_ray.len()
                )?;
            }
            if let Some(path) = out {
                save_graph(&path, &graph)?;
            }
            if let Some(path) = svg {
                render_svg(&path, &inst, Some(&graph), None)?;
            }
            Ok(0)
        }
        Command::Ratio {
            instance,
            cones,
            per_pair,
            report,
            timing,
        } => {
            let inst = load_instance(&instance)?;
            let spec = family_of(cones)?;
            let start = std::time::Instant::now();
            let graph = build_constrained_theta(&inst, spec.cones)?;
            let rep = ratio_report_for(&inst, &graph, &spec)?;
            let elapsed = start.elapsed().as_millis();
            writeln!(
                stdout,
                "m = {} (k = {}, x = {}), spanning bound = {:.12}",
                rep.m, rep.k, rep.x, rep.spanning_bound
            )?;
            let at = rep
                .argmax
                .map(|(u, w)| format!(" at pair ({u}, {w})"))
                .unwrap_or_default();
            writeln!(stdout, "max ratio = {:.12}{at}", rep.max_ratio)?;
            writeln!(stdout, "vis stretch = {:.12}", rep.vis_stretch)?;
            if per_pair {
                for r in &rep.records {
                    writeln!(
                        stdout,
                        "{:>4} {:>4} delta={:.9} euclid={:.9} alpha={:.6} bound={:.9} ratio={:.9}{}",
                        r.u,
                        r.w,
                        r.delta,
                        r.euclid,
                        r.alpha,
                        r.bound,
                        r.ratio,
                        if r.violation { " VIOLATION" } else { "" }
                    )?;
                }
            }
            if timing {
                writeln!(stdout, "elapsed = {elapsed} ms")?;
            }
            if let Some(path) = report {
                save_report(&path, &rep, timing.then_some(elapsed))?;
            }
            if rep.violations.is_empty() {
                writeln!(stdout, "violations: none")?;
                Ok(0)
            } else {
                writeln!(stdout, "violations: {}", rep.violations.len())?;
                for v in &rep.violations {
                    writeln!(stdout, "  {v:?}")?;
                }
                Ok(1)
            }
        }
        Command::Sweep { instance, cones } => {
            let inst = load_instance(&instance)?;
            let mut code = 0;
            writeln!(
                stdout,
                "{:>3} {:>6} {:>18} {:>18} {:>18} {:>10}",
                "m", "edges", "bound", "max ratio", "vis stretch", "violations"
            )?;
            for m in cone_list(cones) {
                let spec = family_of(m)?;
                let graph = build_constrained_theta(&inst, spec.cones)?;
                let rep = ratio_report_for(&inst, &graph, &spec)?;
                writeln!(
                    stdout,
                    "{:>3} {:>6} {:>18.12} {:>18.12} {:>18.12} {:>10}",
                    m,
                    graph.edge_count(),
                    rep.spanning_bound,
                    rep.max_ratio,
                    rep.vis_stretch,
                    rep.violations.len()
                )?;
                if !rep.violations.is_empty() {
                    code = 1;
                }
            }
            Ok(code)
        }
        Command::Search {
            cones,
            seed,
            iters,
            points,
            constraints,
            out,
        } => {
            let spec = family_of(cones)?;
            let outcome = adversarial_search(
                &spec,
                &SearchParams {
                    seed,
                    iterations: iters,
                    points,
                    constraints,
                },
            )?;
            writeln!(
                stdout,
                "best ratio = {:.12} (bound {:.12}) after {} evaluations",
                outcome.ratio, outcome.bound, outcome.evaluations
            )?;
            if let Some(path) = out {
                let mut meta = BTreeMap::new();
                meta.insert("m".to_string(), cones.to_string());
                meta.insert("seed".to_string(), seed.to_string());
                meta.insert("iterations".to_string(), iters.to_string());
                meta.insert("ratio".to_string(), format!("{:.12}", outcome.ratio));
                save_instance(&path, &outcome.instance, &meta)?;
            }
            if outcome.ratio > outcome.bound * (1.0 + RATIO_SLACK) {
                writeln!(stdout, "ratio exceeds the bound")?;
                Ok(1)
            } else {
                Ok(0)
            }
        }
        Command::Gen {
            points,
            constraints,
            seed,
            out,
        } => {
            let ms: Vec<usize> = (6..=13).collect();
            let inst = random_instance(points, constraints, seed, &ms)?;
            let mut meta = BTreeMap::new();
            meta.insert("seed".to_string(), seed.to_string());
            save_instance(&out, &inst, &meta)?;
            writeln!(
                stdout,
                "wrote {} points, {} constraints to {}",
                inst.n(),
                inst.constraints().len(),
                out.display()
            )?;
            Ok(0)
        }
        Command::Chain {
            instance,
            from,
            to,
            apex,
        } => {
            let inst = load_instance(&instance)?;
            let chain = convex_chain(&inst, from, to, apex)?;
            println!("chain: {:?}", chain.vertices);
            if verify_chain(&inst, &chain) {
                println!("chain verifies");
                Ok(0)
            } else {
                println!("chain FAILS verification");
                Ok(1)
            }
        }
    }
}

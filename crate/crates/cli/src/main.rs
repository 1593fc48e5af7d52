use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use selcol_core::clique::max_clique;
use selcol_core::coloring::{brute_force_selcol, chromatic_number, DEFAULT_SELECTION_BUDGET};
use selcol_core::harness::{format_summary, run_experiment, write_csv, ExperimentConfig, InstanceSource, ResultRow, Sweep};
use selcol_core::io::{read_instance_file, write_instance, write_instance_file};
use selcol_core::perfect::{find_obstruction, Imperfection, DEFAULT_GUARD};
use selcol_core::perfectgen::{default_library, generate_partition, generate_perfect, GenConfig, DEFAULT_EPSILON};
use selcol_core::selcol::{solve, Method, SolveOptions, Subproblem, DEFAULT_TIME_LIMIT_SECS};
use selcol_core::theta::{theta_number, DEFAULT_TOL};
use selcol_core::{SelColInstance, VertexSet};

#[derive(Parser)]
#[command(name = "selcol", version, about = "Exact selective graph coloring on perfect graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with one method
    Solve(SolveArgs),
    /// Generate random perfect-graph instances
    Gen(GenArgs),
    /// Replace the clusters of an instance by a random partition
    Partition(PartitionArgs),
    /// Maximum clique of the instance graph
    Clique(InstanceArg),
    /// Chromatic number and an optimal coloring of the instance graph
    Color(InstanceArg),
    /// Theta number of the instance graph
    Theta(ThetaArgs),
    /// Structural checks on the instance graph
    Check(CheckArgs),
    /// Selective chromatic number by enumerating all selections
    Oracle(OracleArgs),
    /// Run every method over a set of instances and report a summary
    Bench(BenchArgs),
}

#[derive(Args)]
struct InstanceArg {
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ip,
    CutplanePerfect,
    CutplaneGeneral,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubproblemArg {
    Mcs,
    Sdp,
}

fn method_of(m: MethodArg, sub: SubproblemArg) -> Method {
    let sub = match sub {
        SubproblemArg::Mcs => Subproblem::Mcs,
        SubproblemArg::Sdp => Subproblem::Sdp,
    };
    match m {
        MethodArg::Ip => Method::Ip,
        MethodArg::CutplanePerfect => Method::CutplanePerfect(sub),
        MethodArg::CutplaneGeneral => Method::CutplaneGeneral,
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "cutplane-perfect")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "mcs")]
    subproblem: SubproblemArg,
    /// Wall-clock limit in seconds
    #[arg(long, default_value_t = DEFAULT_TIME_LIMIT_SECS as f64)]
    time_limit: f64,
    /// Accepted for interface stability; the solvers are deterministic
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Re-solve the master after every cut instead of adding cuts lazily
    #[arg(long)]
    outer_loop: bool,
    /// Write a one-row CSV report here
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    density: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    out: PathBuf,
    /// Smallest cluster size; without --min/--max every vertex is its own cluster
    #[arg(long, requires = "max")]
    min: Option<usize>,
    #[arg(long, requires = "min")]
    max: Option<usize>,
}

#[derive(Args)]
struct PartitionArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    min: usize,
    #[arg(long)]
    max: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThetaArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Test the graph for perfection and print an odd hole or antihole if any
    #[arg(long)]
    perfect: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Largest number of selections to enumerate
    #[arg(long, default_value_t = DEFAULT_SELECTION_BUDGET)]
    budget: u128,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files; when absent a generated sweep is used
    #[arg(long, num_args = 1..)]
    instances: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "20")]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.3,0.5,0.7")]
    density: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    replicates: usize,
    #[arg(long, default_value_t = 2)]
    min: usize,
    #[arg(long, default_value_t = 5)]
    max: usize,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ip,cutplane-perfect")]
    methods: Vec<MethodArg>,
    #[arg(long, value_enum, default_value = "mcs")]
    subproblem: SubproblemArg,
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to SELCOL_THREADS or 1
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(path: &Path) -> Result<SelColInstance> {
    read_instance_file(path).with_context(|| format!("reading {}", path.display()))
}

/// Vertex list printed with the 1-based ids of the file format.
fn one_based(vs: impl IntoIterator<Item = usize>) -> String {
    vs.into_iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    if !(a.time_limit > 0.0) {
        bail!("--time-limit must be positive");
    }
    let inst = load(&a.instance)?;
    let method = method_of(a.method, a.subproblem);
    let opts = SolveOptions {
        time_limit: Some(Duration::from_secs_f64(a.time_limit)),
        outer_loop: a.outer_loop,
    };
    let r = solve(&inst, method, &opts)?;
    let row = ResultRow::from_report(&instance_id(&a.instance), &inst, &r, a.time_limit);
    println!("method {} ({})", method.name(), method.subproblem_name());
    println!("status {}", r.status);
    println!("UB {}", r.upper_bound);
    println!("LB {}", r.lower_bound);
    println!("gap_percent {}", row.gap_percent);
    println!("seconds {:.3}", r.seconds);
    println!("cuts clique {} coloring {}", row.cuts_clique, row.cuts_coloring);
    if let (Some(sel), Some(col)) = (&r.selection, &r.coloring) {
        println!("selection {}", one_based(sel.vertices().iter()));
        for (c, class) in col.classes().iter().enumerate() {
            let members = class.iter().map(|k| sel.vertices().as_slice()[k]);
            println!("color {} {}", c + 1, one_based(members));
        }
    }
    if let Some(path) = a.report {
        write_csv(&path, &[row]).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn instance_id(p: &Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let lib = default_library();
    for i in 0..a.count {
        let seed = a.seed.wrapping_add(i as u64);
        let cfg = GenConfig {
            epsilon: a.epsilon,
            ..GenConfig::new(a.n, a.density, seed)
        };
        let g = generate_perfect(&cfg, lib)?;
        let clusters = match (a.min, a.max) {
            (Some(lo), Some(hi)) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                generate_partition(a.n, lo, hi, &mut rng)?
            }
            _ => (0..a.n).map(|v| VertexSet::new([v])).collect(),
        };
        let inst = SelColInstance::new(g, clusters)?;
        let path = a.out.join(format!("perfect-n{}-d{}-s{}.selcol", a.n, a.density, seed));
        write_instance_file(&path, &inst)?;
        println!("{} m={} density={:.4}", path.display(), inst.graph.m(), inst.graph.edge_density()?);
    }
    Ok(())
}

fn cmd_partition(a: PartitionArgs) -> Result<()> {
    let inst = load(&a.instance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let clusters = generate_partition(inst.graph.n(), a.min, a.max, &mut rng)?;
    let out = SelColInstance::new(inst.graph, clusters)?;
    match a.out {
        Some(p) => write_instance_file(&p, &out)?,
        None => print!("{}", write_instance(&out)),
    }
    Ok(())
}

fn cmd_clique(a: InstanceArg) -> Result<()> {
    let g = load(&a.instance)?.graph;
    let r = max_clique(&g, None, 0);
    println!("size {}", r.size);
    println!("members {}", one_based(r.clique.iter()));
    Ok(())
}

fn cmd_color(a: InstanceArg) -> Result<()> {
    let g = load(&a.instance)?.graph;
    let r = chromatic_number(&g, None);
    let chi = r.chromatic_number().context("chromatic search did not finish")?;
    println!("chromatic_number {chi}");
    for (c, class) in r.coloring.classes().iter().enumerate() {
        println!("color {} {}", c + 1, one_based(class.iter()));
    }
    Ok(())
}

fn cmd_theta(a: ThetaArgs) -> Result<()> {
    let g = load(&a.instance)?.graph;
    let r = theta_number(&g, a.tol)?;
    println!("theta {:.9}", r.theta);
    println!("iterations {}", r.iterations);
    println!("trace_gap {:.3e}", r.trace_gap);
    println!("edge_violation {:.3e}", r.edge_violation);
    println!("min_eigenvalue {:.3e}", r.min_eigenvalue);
    Ok(())
}

fn cmd_check(a: CheckArgs) -> Result<()> {
    let inst = load(&a.instance)?;
    let g = &inst.graph;
    println!("n {} m {} clusters {}", g.n(), g.m(), inst.num_clusters());
    if a.perfect {
        match find_obstruction(g, DEFAULT_GUARD)? {
            None => println!("perfect"),
            Some(Imperfection::OddHole(c)) => println!("not perfect: odd hole {}", one_based(c)),
            Some(Imperfection::OddAntihole(c)) => println!("not perfect: odd antihole {}", one_based(c)),
        }
    }
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> Result<()> {
    let inst = load(&a.instance)?;
    let (chi, sel) = brute_force_selcol(&inst, a.budget)?;
    println!("selective_chromatic_number {chi}");
    println!("selection {}", one_based(sel.vertices().iter()));
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let source = if a.instances.is_empty() {
        InstanceSource::Sweep(Sweep {
            ns: a.n,
            densities: a.density,
            replicates: a.replicates,
            cluster_min: a.min,
            cluster_max: a.max,
            epsilon: a.epsilon,
        })
    } else {
        InstanceSource::Files(a.instances)
    };
    let cfg = ExperimentConfig {
        source,
        methods: a.methods.iter().map(|&m| method_of(m, a.subproblem)).collect(),
        time_limit_secs: a.time_limit,
        seed: a.seed,
        output: a.out.clone(),
        workers: a.threads,
    };
    let out = run_experiment(&cfg)?;
    print!("{}", format_summary(&out.summary));
    if let Some(p) = a.out {
        println!("{} rows written to {}", out.rows.len(), p.display());
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve(a) => cmd_solve(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Partition(a) => cmd_partition(a),
        Command::Clique(a) => cmd_clique(a),
        Command::Color(a) => cmd_color(a),
        Command::Theta(a) => cmd_theta(a),
        Command::Check(a) => cmd_check(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

//! Batch experiments: runs every method on every instance and writes one CSV
//! row per run, plus a per-cell summary.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::SelColInstance;
use crate::io::read_instance_file;
use crate::lp::gap_percent;
use crate::perfectgen::{default_library, generate_instance, GenConfig, DEFAULT_EPSILON};
use crate::selcol::{solve, CutKind, Method, SolveOptions, SolveReport};

pub const CSV_HEADER: &str = "instance_id,n,m,density,P,method,subproblem,status,UB,LB,gap_percent,seconds,cuts_clique,cuts_coloring,subproblem_time_fraction";

/// Env var overriding the worker count.
pub const THREADS_ENV: &str = "SELCOL_THREADS";

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub ns: Vec<usize>,
    pub densities: Vec<f64>,
    pub replicates: usize,
    pub cluster_min: usize,
    pub cluster_max: usize,
    pub epsilon: f64,
}

#[derive(Clone, Debug)]
pub enum InstanceSource {
    Files(Vec<PathBuf>),
    Sweep(Sweep),
    /// Already loaded instances with their ids.
    Given(Vec<(String, SelColInstance)>),
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub source: InstanceSource,
    pub methods: Vec<Method>,
    pub time_limit_secs: f64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// `None` reads `SELCOL_THREADS`, falling back to one worker.
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.time_limit_secs > 0.0) {
            return Err(Error::InvalidInput("time limit must be positive".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidInput("no methods given".into()));
        }
        if let InstanceSource::Sweep(s) = &self.source {
            if s.replicates < 1 {
                return Err(Error::InvalidInput("replicates must be at least 1".into()));
            }
            if s.ns.is_empty() || s.densities.is_empty() {
                return Err(Error::InvalidInput("sweep needs at least one n and one density".into()));
            }
        }
        Ok(())
    }

    fn worker_count(&self) -> usize {
        self.workers
            .or_else(|| std::env::var(THREADS_ENV).ok()?.trim().parse().ok())
            .unwrap_or(1)
            .max(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance_id: String,
    pub n: usize,
    pub m: usize,
    pub density: f64,
    #[serde(rename = "P")]
    pub p: usize,
    pub method: String,
    pub subproblem: String,
    pub status: String,
    #[serde(rename = "UB")]
    pub ub: f64,
    #[serde(rename = "LB")]
    pub lb: f64,
    pub gap_percent: f64,
    pub seconds: f64,
    pub cuts_clique: usize,
    pub cuts_coloring: usize,
    pub subproblem_time_fraction: f64,
}

impl ResultRow {
    fn base(id: &str, inst: &SelColInstance, method: Method) -> ResultRow {
        let g = &inst.graph;
        ResultRow {
            instance_id: id.to_string(),
            n: g.n(),
            m: g.m(),
            density: g.edge_density().unwrap_or(0.0),
            p: inst.num_clusters(),
            method: method.name().to_string(),
            subproblem: method.subproblem_name().to_string(),
            status: String::new(),
            ub: f64::INFINITY,
            lb: f64::NEG_INFINITY,
            gap_percent: f64::INFINITY,
            seconds: 0.0,
            cuts_clique: 0,
            cuts_coloring: 0,
            subproblem_time_fraction: 0.0,
        }
    }

    /// Row for a finished run; timed-out runs report the limit as their time.
    pub fn from_report(id: &str, inst: &SelColInstance, report: &SolveReport, limit_secs: f64) -> ResultRow {
        let mut row = ResultRow::base(id, inst, report.method);
        row.status = report.status.as_str().to_string();
        row.ub = report.upper_bound;
        row.lb = report.lower_bound;
        row.gap_percent = gap_percent(row.ub, row.lb);
        row.seconds = if report.status.timed_out() { limit_secs } else { report.seconds };
        row.cuts_clique = report.cuts_of(CutKind::Clique);
        row.cuts_coloring = report.cuts_of(CutKind::Coloring);
        if report.method != Method::Ip {
            row.subproblem_time_fraction = report.subproblem_time_fraction();
        }
        row
    }

    pub fn failed(id: &str, inst: &SelColInstance, method: Method, err: &Error, seconds: f64) -> ResultRow {
        let mut row = ResultRow::base(id, inst, method);
        row.status = format!("error: {err}");
        row.seconds = seconds;
        row
    }

    pub fn is_optimal(&self) -> bool {
        self.status == "optimal"
    }

    pub fn timed_out(&self) -> bool {
        self.status == "feasible-timeout" || self.status == "timeout"
    }
}

/// Means over one (n, density, method) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub density: f64,
    pub method: String,
    pub subproblem: String,
    pub runs: usize,
    pub optimal: usize,
    /// Mean over runs with a finite gap; NaN when there are none.
    pub mean_gap: f64,
    pub mean_seconds: f64,
    pub mean_subproblem_fraction: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub summary: Vec<SummaryRow>,
}

fn cell_seed(master: u64, n: usize, density_idx: usize, rep: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((n as u64) << 32) | ((density_idx as u64) << 16) | rep as u64);
    rng.gen()
}

/// Instances named by id plus the target density used for grouping.
pub type Job = (String, SelColInstance, Option<f64>);

fn load_instances(cfg: &ExperimentConfig) -> Result<Vec<Job>> {
    let mut jobs = Vec::new();
    match &cfg.source {
        InstanceSource::Files(paths) => {
            for p in paths {
                let inst = read_instance_file(p)
                    .map_err(|e| Error::InvalidInput(format!("{}: {e}", p.display())))?;
                jobs.push((instance_id(p), inst, None));
            }
        }
        InstanceSource::Given(list) => {
            jobs.extend(list.iter().map(|(id, inst)| (id.clone(), inst.clone(), None)));
        }
        InstanceSource::Sweep(s) => {
            let lib = default_library();
            for &n in &s.ns {
                for (di, &rho) in s.densities.iter().enumerate() {
                    for rep in 0..s.replicates {
                        let cfg_gen = GenConfig {
                            epsilon: s.epsilon,
                            ..GenConfig::new(n, rho, cell_seed(cfg.seed, n, di, rep))
                        };
                        let inst = generate_instance(&cfg_gen, s.cluster_min, s.cluster_max, lib)?;
                        jobs.push((format!("n{n}-d{rho}-r{rep}"), inst, Some(rho)));
                    }
                }
            }
        }
    }
    Ok(jobs)
}

fn instance_id(p: &Path) -> String {
    p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

/// Runs one method on one instance, turning errors into a failed row.
pub fn run_one(id: &str, inst: &SelColInstance, method: Method, limit_secs: f64) -> ResultRow {
    let started = Instant::now();
    match solve(inst, method, &SolveOptions::with_time_limit(limit_secs)) {
        Ok(r) => ResultRow::from_report(id, inst, &r, limit_secs),
        Err(e) => ResultRow::failed(id, inst, method, &e, started.elapsed().as_secs_f64()),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let jobs = load_instances(cfg)?;
    let tasks: Vec<(usize, Method)> = (0..jobs.len())
        .flat_map(|i| cfg.methods.iter().map(move |&m| (i, m)))
        .collect();
    let results: Mutex<Vec<Option<ResultRow>>> = Mutex::new(vec![None; tasks.len()]);
    let next = AtomicUsize::new(0);
    let workers = cfg.worker_count().min(tasks.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::SeqCst);
                let Some(&(i, method)) = tasks.get(k) else { break };
                let (id, inst, _) = &jobs[i];
                let row = run_one(id, inst, method, cfg.time_limit_secs);
                results.lock().expect("no panics while holding the lock")[k] = Some(row);
            });
        }
    });
    let rows: Vec<ResultRow> = results
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every task ran"))
        .collect();

    let targets: Vec<Option<f64>> = tasks.iter().map(|&(i, _)| jobs[i].2).collect();
    let summary = summarize(&rows, &targets);
    if let Some(path) = &cfg.output {
        write_csv(path, &rows)?;
    }
    Ok(ExperimentOutput { rows, summary })
}

pub fn write_csv(path: impl AsRef<Path>, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Groups rows by (n, density, method); `targets[i]` replaces row `i`'s
/// measured density when present.
pub fn summarize(rows: &[ResultRow], targets: &[Option<f64>]) -> Vec<SummaryRow> {
    type Key = (usize, i64, String, String);
    let mut cells: BTreeMap<Key, Vec<&ResultRow>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        let d = targets.get(i).copied().flatten().unwrap_or(r.density);
        let key = (r.n, (d * 100.0).round() as i64, r.method.clone(), r.subproblem.clone());
        cells.entry(key).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((n, d, method, subproblem), rs)| {
            let runs = rs.len();
            let gaps: Vec<f64> = rs.iter().map(|r| r.gap_percent).filter(|g| g.is_finite()).collect();
            let mean = |f: &dyn Fn(&ResultRow) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / runs as f64;
            SummaryRow {
                n,
                density: d as f64 / 100.0,
                method,
                subproblem,
                runs,
                optimal: rs.iter().filter(|r| r.is_optimal()).count(),
                mean_gap: if gaps.is_empty() { f64::NAN } else { gaps.iter().sum::<f64>() / gaps.len() as f64 },
                mean_seconds: mean(&|r| r.seconds),
                mean_subproblem_fraction: mean(&|r| r.subproblem_time_fraction),
            }
        })
        .collect()
}

pub fn format_summary(summary: &[SummaryRow]) -> String {
    let mut out = format!(
        "{:>4} {:>7} {:<18} {:<5} {:>5} {:>9} {:>10} {:>12}\n",
        "n", "density", "method", "sub", "#opt", "avg gap%", "avg time", "avg % subpr"
    );
    for s in summary {
        out.push_str(&format!(
            "{:>4} {:>7.2} {:<18} {:<5} {:>2}/{:<2} {:>9.2} {:>10.3} {:>12.1}\n",
            s.n, s.density, s.method, s.subproblem, s.optimal, s.runs, s.mean_gap, s.mean_seconds,
            s.mean_subproblem_fraction
        ));
    }
    out
}

/// Default grid for quick desk runs.
pub fn default_sweep() -> Sweep {
    Sweep {
        ns: vec![20],
        densities: vec![0.1, 0.3, 0.5, 0.7],
        replicates: 5,
        cluster_min: 2,
        cluster_max: 5,
        epsilon: DEFAULT_EPSILON,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::selcol::{SolveStatus, Subproblem};

    fn given(k: usize) -> InstanceSource {
        let list = (0..k)
            .map(|i| (format!("i{i}"), SelColInstance::singletons(Graph::cycle(4 + i))))
            .collect();
        InstanceSource::Given(list)
    }

    fn config(source: InstanceSource, methods: Vec<Method>) -> ExperimentConfig {
        ExperimentConfig {
            source,
            methods,
            time_limit_secs: 30.0,
            seed: 1,
            output: None,
            workers: Some(1),
        }
    }

    #[test]
    fn rows_per_instance_and_method() {
        let cfg = config(given(2), vec![Method::Ip, Method::CutplaneGeneral]);
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.rows.len(), 4);
        for r in &out.rows {
            assert_eq!(r.status, "optimal");
            assert_eq!(r.gap_percent, 0.0);
        }
        assert_eq!(out.rows[0].subproblem_time_fraction, 0.0);
        assert_eq!(out.rows[2].ub, 3.0);
    }

    #[test]
    fn parallel_run_matches_serial_values() {
        let mut cfg = config(given(3), vec![Method::CutplanePerfect(Subproblem::Mcs), Method::Ip]);
        cfg.source = InstanceSource::Given(
            (0..3).map(|i| (format!("p{i}"), SelColInstance::singletons(Graph::path(5 + i)))).collect(),
        );
        let a = run_experiment(&cfg).unwrap();
        cfg.workers = Some(3);
        let b = run_experiment(&cfg).unwrap();
        let key = |r: &ResultRow| (r.instance_id.clone(), r.method.clone(), r.ub, r.status.clone());
        assert_eq!(a.rows.iter().map(key).collect::<Vec<_>>(), b.rows.iter().map(key).collect::<Vec<_>>());
    }

    #[test]
    fn failures_are_recorded_not_raised() {
        // Clique cuts alone cannot color the five-cycle.
        let cfg = config(
            InstanceSource::Given(vec![("c5".into(), SelColInstance::singletons(Graph::cycle(5)))]),
            vec![Method::CutplanePerfect(Subproblem::Mcs), Method::CutplaneGeneral],
        );
        let out = run_experiment(&cfg).unwrap();
        assert!(out.rows[0].status.starts_with("error"));
        assert_eq!(out.rows[1].ub, 3.0);
    }

    #[test]
    fn timeout_rows_report_the_limit() {
        let inst = SelColInstance::cube_example();
        let report = SolveReport {
            method: Method::Ip,
            status: SolveStatus::FeasibleTimeout,
            upper_bound: 3.0,
            lower_bound: 2.0,
            gap_percent: 0.0,
            selection: None,
            coloring: None,
            cuts: Vec::new(),
            events: Vec::new(),
            nodes: 1,
            seconds: 7.3,
            subproblem_seconds: 0.0,
            lb_trace: Vec::new(),
            incomplete_subproblem: false,
        };
        let row = ResultRow::from_report("x", &inst, &report, 5.0);
        assert_eq!(row.seconds, 5.0);
        assert!((row.gap_percent - 100.0 / 3.0).abs() < 1e-12);
        assert_eq!(row.status, "feasible-timeout");
    }

    #[test]
    fn csv_roundtrip_and_header() {
        let dir = tempdir();
        let path = dir.join("rows.csv");
        let mut cfg = config(given(1), vec![Method::Ip]);
        cfg.output = Some(path.clone());
        let out = run_experiment(&cfg).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert!(!text.contains('\r'));
        assert_eq!(read_csv(&path).unwrap(), out.rows);

        let mut row = out.rows[0].clone();
        row.ub = f64::INFINITY;
        row.lb = f64::NEG_INFINITY;
        row.gap_percent = f64::INFINITY;
        write_csv(&path, &[row.clone()]).unwrap();
        assert_eq!(read_csv(&path).unwrap(), vec![row]);
        std::fs::remove_dir_all(dir).unwrap();
    }

    fn tempdir() -> PathBuf {
        let d = std::env::temp_dir().join(format!("selcol-harness-{}-{:?}", std::process::id(), std::thread::current().id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn sweep_is_deterministic_and_summarized() {
        let sweep = Sweep {
            ns: vec![8],
            densities: vec![0.3, 0.7],
            replicates: 2,
            cluster_min: 2,
            cluster_max: 3,
            epsilon: DEFAULT_EPSILON,
        };
        let cfg = config(InstanceSource::Sweep(sweep), vec![Method::CutplaneGeneral]);
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.rows.len(), 4);
        let ubs = |o: &ExperimentOutput| o.rows.iter().map(|r| (r.m, r.ub)).collect::<Vec<_>>();
        assert_eq!(ubs(&a), ubs(&b));
        assert_eq!(a.summary.len(), 2);
        assert_eq!(a.summary[0].density, 0.3);
        assert_eq!(a.summary[0].runs, 2);
        assert!(format_summary(&a.summary).contains("cutplane-general"));
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = config(given(1), vec![Method::Ip]);
        cfg.time_limit_secs = 0.0;
        assert!(run_experiment(&cfg).is_err());
        let cfg = config(given(1), vec![]);
        assert!(run_experiment(&cfg).is_err());
    }
}

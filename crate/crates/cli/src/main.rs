use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hardsparse::experiments::{
    default_m_grid, default_s_grid, mean_sd, run_fd_study, run_mv_study, FdStudyConfig, MvSparsity,
    MvStudyConfig,
};
use hardsparse::io::{
    partition_from_tokens, read_fd_csv, read_mv_csv, write_fd_csv, write_labels, write_mv_csv,
    write_rows, write_weight_function, write_weights,
};
use hardsparse::simgen::{gen_fd, gen_mv, FdScenario, MvScenario};
use hardsparse::tuning::{tune_m_fd, tune_m_mv, GapCurve, GapOptions};
use hardsparse::{
    cer, soft_sparse_kmeans_mv, sparse_kmeans_fd, sparse_kmeans_mv, Error, KMeansConfig, Partition,
};

#[derive(Parser)]
#[command(
    name = "hardsparse",
    version,
    about = "Sparse K-means with hard-thresholded weights"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sparse K-means on a multivariate CSV
    Cluster(ClusterArgs),
    /// Sparse functional K-means on a curve CSV (first row = grid)
    Fcluster(FclusterArgs),
    /// Choose the sparsity level with the permutation gap statistic
    Tune(TuneArgs),
    /// Reproduce the simulation studies
    Simulate {
        #[command(subcommand)]
        table: SimCmd,
    },
}

#[derive(Args)]
struct Common {
    /// Number of clusters
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// K-means restarts per clustering step
    #[arg(long, default_value_t = 10)]
    n_init: usize,
    #[arg(long, default_value_t = 20)]
    max_iter: usize,
    /// Output directory (created if missing)
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl Common {
    fn config(&self) -> KMeansConfig {
        KMeansConfig {
            max_iter_outer: self.max_iter,
            ..KMeansConfig::new(self.k)
                .with_seed(self.seed)
                .with_n_init(self.n_init)
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Hard,
    Soft,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = Method::Hard)]
    method: Method,
    /// Number of zero weights (hard method)
    #[arg(long)]
    m: Option<usize>,
    /// l1 budget (soft method)
    #[arg(long)]
    s: Option<f64>,
    /// Label column (header name or 1-based index), excluded from the features
    #[arg(long)]
    truth_col: Option<String>,
}

#[derive(Args)]
struct FclusterArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Measure of the zero set of the weighting function
    #[arg(long)]
    m: f64,
    /// File with one reference label per curve
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Treat the input as curves (first row = grid)
    #[arg(long)]
    functional: bool,
    /// Comma-separated candidate values of m
    #[arg(long, value_delimiter = ',')]
    m_grid: Option<Vec<f64>>,
    #[arg(long, default_value_t = 20)]
    b_perms: usize,
    #[arg(long, default_value_t = 20)]
    n_subdomains: usize,
    /// Sparsest candidate within one sd of the best gap
    #[arg(long)]
    one_sd: bool,
    #[arg(long)]
    truth_col: Option<String>,
}

#[derive(Args)]
struct SimCommon {
    #[arg(long, default_value_t = 20)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    n_init: usize,
    /// Report the sd of a single run as NA instead of 0
    #[arg(long)]
    na_sd: bool,
    /// Also write every generated dataset
    #[arg(long)]
    dump_data: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum SimCmd {
    /// Gaussian scenario: std vs soft vs hard
    Tab1 {
        #[arg(long, default_value_t = 50)]
        p: usize,
        #[command(flatten)]
        sim: SimCommon,
        /// Fixed number of zero weights instead of gap tuning
        #[arg(long, requires = "s")]
        m: Option<usize>,
        /// Fixed l1 budget instead of gap tuning
        #[arg(long, requires = "m")]
        s: Option<f64>,
        #[arg(long, default_value_t = 10)]
        b_perms: usize,
    },
    /// Curve scenario: std vs sparse
    Tab2 {
        #[command(flatten)]
        sim: SimCommon,
        #[arg(long, default_value_t = 0.521)]
        m: f64,
        #[arg(long, default_value_t = 200)]
        grid_size: usize,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_input_error() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn prepare_out(dir: &Path) -> Res<()> {
    fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))
}

fn write_json(path: &Path, v: &Value) -> Res<()> {
    let text = serde_json::to_string_pretty(v).expect("json values serialize");
    fs::write(path, text + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn cer_field(truth: Option<&Partition>, est: &Partition) -> Res<Value> {
    Ok(match truth {
        Some(t) => json!(cer(t, est)?),
        None => Value::Null,
    })
}

fn cluster(a: &ClusterArgs) -> Res<()> {
    let input = read_mv_csv(&a.input, a.truth_col.as_deref())?;
    let d = &input.data;
    let cfg = a.common.config();
    let names: Vec<String> = match d.feature_names() {
        Some(n) => n.to_vec(),
        None => (1..=d.n_features()).map(|j| format!("x{j}")).collect(),
    };
    let (partition, weights, trace, iterations, converged, extra) = match (a.method, a.m, a.s) {
        (Method::Hard, Some(m), None) => {
            let r = sparse_kmeans_mv(d, m, &cfg)?;
            let extra = json!({ "method": "hard", "m": m, "zeros": r.weights.zeros() });
            (
                r.partition,
                r.weights.values,
                r.objective_trace,
                r.iterations,
                r.converged,
                extra,
            )
        }
        (Method::Soft, None, Some(s)) => {
            let r = soft_sparse_kmeans_mv(d, s, &cfg)?;
            let extra = json!({
                "method": "soft",
                "s": s,
                "l1": r.weights.l1(),
                "delta": r.weights.delta,
            });
            (
                r.partition,
                r.weights.values,
                r.objective_trace,
                r.iterations,
                r.converged,
                extra,
            )
        }
        (Method::Hard, _, _) => return Err(usage("the hard method needs --m and no --s")),
        (Method::Soft, _, _) => return Err(usage("the soft method needs --s and no --m")),
    };
    prepare_out(&a.common.out)?;
    write_labels(&a.common.out.join("labels.csv"), &partition)?;
    write_weights(&a.common.out.join("weights.csv"), &names, &weights)?;
    let mut summary = json!({
        "schema": 1,
        "k": cfg.k,
        "seed": cfg.seed,
        "objective_trace": trace,
        "iterations": iterations,
        "converged": converged,
        "cer": cer_field(input.truth.as_ref(), &partition)?,
    });
    merge(&mut summary, extra);
    write_json(&a.common.out.join("summary.json"), &summary)
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn read_truth_file(path: &Path) -> Res<Partition> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let tokens: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .collect();
    Ok(partition_from_tokens(&tokens)?)
}

fn fcluster(a: &FclusterArgs) -> Res<()> {
    let d = read_fd_csv(&a.input)?;
    let truth = a.truth.as_deref().map(read_truth_file).transpose()?;
    let cfg = a.common.config();
    let r = sparse_kmeans_fd(&d, a.m, &cfg)?;
    prepare_out(&a.common.out)?;
    write_labels(&a.common.out.join("labels.csv"), &r.partition)?;
    write_weight_function(
        &a.common.out.join("weight_function.csv"),
        d.grid(),
        &r.weights.values,
    )?;
    let intervals: Vec<[f64; 2]> = r
        .weights
        .support_intervals(d.grid())
        .into_iter()
        .map(|(lo, hi)| [lo, hi])
        .collect();
    let summary = json!({
        "schema": 1,
        "k": cfg.k,
        "seed": cfg.seed,
        "m": a.m,
        "level": r.weights.level,
        "zero_measure": r.weights.zero_measure(d.quad_weights()),
        "support_intervals": intervals,
        "objective_trace": r.objective_trace,
        "iterations": r.iterations,
        "converged": r.converged,
        "cer": cer_field(truth.as_ref(), &r.partition)?,
    });
    write_json(&a.common.out.join("summary.json"), &summary)
}

fn write_gap_curve(path: &Path, c: &GapCurve) -> Res<()> {
    let rows = (0..c.m_grid.len()).map(|i| {
        [
            c.m_grid[i],
            c.gap[i],
            c.obs_log_obj[i],
            c.perm_log_obj_mean[i],
            c.perm_log_obj_sd[i],
        ]
        .map(|v| {
            if v.is_nan() {
                "NA".to_string()
            } else {
                v.to_string()
            }
        })
    });
    Ok(write_rows(
        path,
        Some(&["m", "gap", "obs", "perm_mean", "perm_sd"]),
        rows,
    )?)
}

fn tune(a: &TuneArgs) -> Res<()> {
    let cfg = a.common.config();
    let opts = GapOptions {
        b_perms: a.b_perms,
        n_subdomains: a.n_subdomains,
        one_sd_rule: a.one_sd,
    };
    let (chosen, curve) = if a.functional {
        let d = read_fd_csv(&a.input)?;
        let grid = a.m_grid.clone().unwrap_or_else(|| {
            let mu = d.domain_measure();
            (1..10).map(|i| mu * i as f64 / 10.0).collect()
        });
        let (m, c) = tune_m_fd(&d, &grid, &opts, &cfg)?;
        (json!(m), c)
    } else {
        let input = read_mv_csv(&a.input, a.truth_col.as_deref())?;
        let p = input.data.n_features();
        let grid = match &a.m_grid {
            Some(g) => g
                .iter()
                .map(|&m| {
                    if m >= 0.0 && m.fract() == 0.0 {
                        Ok(m as usize)
                    } else {
                        Err(usage(format!("m = {m} is not a non-negative integer")))
                    }
                })
                .collect::<Res<Vec<_>>>()?,
            None => default_m_grid(p),
        };
        let (m, c) = tune_m_mv(&input.data, &grid, &opts, &cfg)?;
        (json!(m), c)
    };
    prepare_out(&a.common.out)?;
    write_gap_curve(&a.common.out.join("gap_curve.csv"), &curve)?;
    let excluded: Vec<f64> = curve
        .m_grid
        .iter()
        .zip(&curve.excluded)
        .filter(|(_, &e)| e)
        .map(|(&m, _)| m)
        .collect();
    let summary = json!({
        "schema": 1,
        "k": cfg.k,
        "seed": cfg.seed,
        "functional": a.functional,
        "b_perms": a.b_perms,
        "one_sd_rule": a.one_sd,
        "m": chosen,
        "excluded": excluded,
    });
    write_json(&a.common.out.join("summary.json"), &summary)
}

fn sd_text(sd: Option<f64>, na: bool) -> String {
    match sd {
        Some(v) => v.to_string(),
        None if na => "NA".into(),
        None => "0".into(),
    }
}

fn write_table(path: &Path, methods: &[(&str, Vec<f64>)], na: bool) -> Res<()> {
    let rows = methods.iter().map(|(name, xs)| {
        let (mean, sd) = mean_sd(xs);
        vec![name.to_string(), mean.to_string(), sd_text(sd, na)]
    });
    Ok(write_rows(
        path,
        Some(&["method", "mean_cer", "sd_cer"]),
        rows,
    )?)
}

fn check_runs(sim: &SimCommon) -> Res<()> {
    if sim.runs == 0 {
        return Err(usage("--runs must be at least 1"));
    }
    prepare_out(&sim.out)
}

fn simulate(t: &SimCmd) -> Res<()> {
    match t {
        SimCmd::Tab1 {
            p,
            sim,
            m,
            s,
            b_perms,
        } => {
            check_runs(sim)?;
            let sparsity = match (m, s) {
                (Some(m), Some(s)) => MvSparsity::Fixed { m: *m, s: *s },
                _ => MvSparsity::Gap {
                    m_grid: default_m_grid(*p),
                    s_grid: default_s_grid(*p),
                    opts: GapOptions {
                        b_perms: *b_perms,
                        ..GapOptions::default()
                    },
                },
            };
            let c = MvStudyConfig {
                p: *p,
                runs: sim.runs,
                seed: sim.seed,
                n_init: sim.n_init,
                sparsity,
            };
            let runs = run_mv_study(&c)?;
            let col =
                |f: fn(&hardsparse::experiments::MvStudyRun) -> f64| runs.iter().map(f).collect();
            write_table(
                &sim.out.join("tab1.csv"),
                &[
                    ("std", col(|r| r.cer_std)),
                    ("soft", col(|r| r.cer_soft)),
                    ("hard", col(|r| r.cer_hard)),
                ],
                sim.na_sd,
            )?;
            let log = runs.iter().enumerate().map(|(i, r)| {
                vec![
                    (i + 1).to_string(),
                    r.seed.to_string(),
                    r.cer_std.to_string(),
                    r.cer_soft.to_string(),
                    r.cer_hard.to_string(),
                    r.hard.weights.zeros().to_string(),
                    r.soft.weights.s.to_string(),
                ]
            });
            write_rows(
                &sim.out.join("tab1_runs.csv"),
                Some(&["run", "seed", "std", "soft", "hard", "m", "s"]),
                log,
            )?;
            if sim.dump_data {
                for (i, r) in runs.iter().enumerate() {
                    let (d, truth) = gen_mv(&MvScenario::new(*p, r.seed))?;
                    write_mv_csv(
                        &sim.out.join(format!("tab1_data_{}.csv", i + 1)),
                        &d,
                        Some(&truth),
                    )?;
                }
            }
            Ok(())
        }
        SimCmd::Tab2 { sim, m, grid_size } => {
            check_runs(sim)?;
            let c = FdStudyConfig {
                grid_size: *grid_size,
                n_init: sim.n_init,
                ..FdStudyConfig::new(sim.runs, sim.seed, *m)
            };
            let runs = run_fd_study(&c)?;
            write_table(
                &sim.out.join("tab2.csv"),
                &[
                    ("std", runs.iter().map(|r| r.cer_std).collect()),
                    ("sparse", runs.iter().map(|r| r.cer_sparse).collect()),
                ],
                sim.na_sd,
            )?;
            let log = runs.iter().enumerate().map(|(i, r)| {
                let lower = r
                    .sparse
                    .weights
                    .support_intervals(&r.grid)
                    .first()
                    .map_or(f64::NAN, |iv| iv.0);
                vec![
                    (i + 1).to_string(),
                    r.seed.to_string(),
                    r.cer_std.to_string(),
                    r.cer_sparse.to_string(),
                    lower.to_string(),
                ]
            });
            write_rows(
                &sim.out.join("tab2_runs.csv"),
                Some(&["run", "seed", "std", "sparse", "support_start"]),
                log,
            )?;
            if sim.dump_data {
                for (i, r) in runs.iter().enumerate() {
                    let s = FdScenario {
                        grid_size: *grid_size,
                        ..FdScenario::new(r.seed)
                    };
                    let (d, truth) = gen_fd(&s)?;
                    write_fd_csv(&sim.out.join(format!("tab2_data_{}.csv", i + 1)), &d)?;
                    write_labels(&sim.out.join(format!("tab2_truth_{}.csv", i + 1)), &truth)?;
                }
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Cluster(a) => cluster(a),
        Cmd::Fcluster(a) => fcluster(a),
        Cmd::Tune(a) => tune(a),
        Cmd::Simulate { table } => simulate(table),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

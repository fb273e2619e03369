use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use infosearch::channel::{
    capacity, duality_gap, gaussian_boolean_mi, is_quasi_symmetric, mutual_information,
    product_channel, DiscreteChannel,
};
use infosearch::policy::{
    optimize_sensor, optimize_suite, plan_joint_with, PlannerOptions, SensorModel,
};
use infosearch::sim::{
    exhaustive_mode_gain, expected_stage_reduction, run_replications, Aggregate, MseReport,
    Schedule, Trajectory, DEFAULT_OUTCOME_CAP,
};
use serde::Serialize;

use crate::config::ConfigFile;
use crate::format::{round9, sig9};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeReport {
    pub index: usize,
    pub cost: f64,
    pub u_star: Vec<f64>,
    pub phi_star: f64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityReport {
    pub sensor: String,
    pub method: String,
    pub u_star: Vec<f64>,
    pub phi_star: f64,
    pub iterations: usize,
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chosen_mode: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ModeReport>,
}

impl CapacityReport {
    pub fn render(&self) -> String {
        let u: Vec<String> = self.u_star.iter().map(|&x| sig9(x)).collect();
        let mut out = String::new();
        writeln!(out, "sensor: {}", self.sensor).unwrap();
        writeln!(out, "method: {}", self.method).unwrap();
        writeln!(out, "u*: ({})", u.join(", ")).unwrap();
        writeln!(out, "phi* (bits): {}", sig9(self.phi_star)).unwrap();
        writeln!(out, "iterations: {}", self.iterations).unwrap();
        match self.gap {
            Some(g) => writeln!(out, "gap: {}", sig9(g)).unwrap(),
            None => writeln!(out, "gap: n/a").unwrap(),
        }
        for m in &self.modes {
            writeln!(
                out,
                "mode {}: cost {}, phi* {}, gain {}{}",
                m.index,
                sig9(m.cost),
                sig9(m.phi_star),
                sig9(m.gain),
                if Some(m.index) == self.chosen_mode {
                    " (chosen)"
                } else {
                    ""
                }
            )
            .unwrap();
        }
        out
    }
}

struct Solved {
    method: &'static str,
    u: Vec<f64>,
    value: f64,
    iterations: usize,
    gap: Option<f64>,
}

fn solve_discrete(ch: &DiscreteChannel, opts: &PlannerOptions) -> Result<Solved, CliError> {
    if opts.symmetric_fast_path && is_quasi_symmetric(ch)?.is_some() {
        let u = vec![0.5, 0.5];
        return Ok(Solved {
            method: "quasi-symmetric",
            value: mutual_information(ch, &u)?,
            gap: Some(duality_gap(ch, &u)?),
            u,
            iterations: 0,
        });
    }
    let r = capacity(ch, opts.capacity)?;
    Ok(Solved {
        method: "blahut-arimoto",
        u: r.optimum.into_inner(),
        value: r.value,
        iterations: r.iterations,
        gap: Some(r.gap),
    })
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| round9(x)).collect()
}

/// Capacity and optimal operating point of one configured sensor.
pub fn capacity_report(cfg: &ConfigFile, sensor_name: &str) -> Result<CapacityReport, CliError> {
    let suite = cfg.suite()?;
    let opts = cfg.planner();
    let sensor = suite
        .sensors()
        .iter()
        .find(|s| s.name == sensor_name)
        .ok_or_else(|| CliError::Config(format!("no sensor named '{sensor_name}'")))?;
    let report = |s: Solved, chosen_mode, modes| CapacityReport {
        sensor: sensor.name.clone(),
        method: s.method.to_string(),
        u_star: rounded(&s.u),
        phi_star: round9(s.value),
        iterations: s.iterations,
        gap: s.gap.map(round9),
        chosen_mode,
        modes,
    };
    match &sensor.model {
        SensorModel::Discrete(ch) => Ok(report(solve_discrete(ch, &opts)?, None, Vec::new())),
        SensorModel::Gaussian(ch) => Ok(report(
            Solved {
                method: "gauss-hermite",
                u: vec![0.5, 0.5],
                value: gaussian_boolean_mi(ch, 0.5, opts.quad_points)?,
                iterations: 0,
                gap: None,
            },
            None,
            Vec::new(),
        )),
        SensorModel::Modes(set) => {
            let chosen = optimize_sensor(sensor, suite.gamma(), &opts)?
                .mode
                .expect("mode sensor");
            let mut modes = Vec::new();
            let mut chosen_solution = None;
            for (l, mode) in set.modes().iter().enumerate() {
                let s = solve_discrete(&mode.channel, &opts)?;
                modes.push(ModeReport {
                    index: l,
                    cost: round9(mode.cost),
                    u_star: rounded(&s.u),
                    phi_star: round9(s.value),
                    gain: round9(s.value - suite.gamma() * mode.cost),
                });
                if l == chosen {
                    chosen_solution = Some(s);
                }
            }
            Ok(report(
                chosen_solution.expect("chosen mode exists"),
                Some(chosen),
                modes,
            ))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub label: String,
    pub index: usize,
    pub interval: [f64; 2],
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensorPlanReport {
    pub name: String,
    pub u_star: f64,
    pub mode: Option<usize>,
    pub region: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanReport {
    pub phi_star: f64,
    pub g_star: f64,
    pub cells: Vec<CellReport>,
    pub sensors: Vec<SensorPlanReport>,
}

/// First-stage plan for the configured suite and prior.
pub fn plan_report(cfg: &ConfigFile) -> Result<PlanReport, CliError> {
    let suite = cfg.suite()?;
    let prior = cfg.prior();
    let optimum = optimize_suite(&suite, &cfg.planner())?;
    let plan = plan_joint_with(&prior, &optimum)?;
    let masses = plan.operating_point.as_slice();
    Ok(PlanReport {
        phi_star: round9(optimum.information()),
        g_star: round9(optimum.gain()),
        cells: plan
            .cells
            .iter()
            .map(|c| CellReport {
                label: c.bits.clone(),
                index: c.label,
                interval: [round9(c.start), round9(c.end)],
                mass: round9(masses[c.label]),
            })
            .collect(),
        sensors: suite
            .sensors()
            .iter()
            .zip(&optimum.sensors)
            .zip(&plan.sensor_regions)
            .map(|((s, o), r)| SensorPlanReport {
                name: s.name.clone(),
                u_star: round9(o.u_star),
                mode: o.mode,
                region: r
                    .intervals()
                    .iter()
                    .map(|iv| [round9(iv.start), round9(iv.end)])
                    .collect(),
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Default)]
pub struct SimulateOptions {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub schedule: Option<Schedule>,
    pub reps: Option<usize>,
    pub stages: Option<usize>,
    pub threads: Option<usize>,
}

impl SimulateOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        SimulateOptions {
            out: out.into(),
            ..Default::default()
        }
    }

    fn apply(&self, cfg: &ConfigFile) -> Result<ConfigFile, CliError> {
        let mut cfg = cfg.clone();
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.schedule = self.schedule.unwrap_or(cfg.schedule);
        cfg.replications = self.reps.unwrap_or(cfg.replications);
        cfg.stages = self.stages.unwrap_or(cfg.stages);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn with_threads<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}"))),
    }
}

fn run(cfg: &ConfigFile, threads: Option<usize>) -> Result<(Vec<Trajectory>, Aggregate), CliError> {
    let exp = cfg.experiment()?;
    let (optimum, trajectories) = with_threads(threads, || run_replications(&exp))??;
    let agg =
        Aggregate::from_trajectories(&trajectories, exp.schedule, exp.prior.entropy(), &optimum)?;
    Ok((trajectories, agg))
}

fn io_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

/// Writes `trajectories.csv` and `summary.csv` into `dir`.
pub fn write_csvs(
    dir: &Path,
    trajectories: &[Trajectory],
    agg: &Aggregate,
) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;

    let path = dir.join("trajectories.csv");
    let mut w = csv::Writer::from_path(&path).map_err(io_err(&path))?;
    w.write_record(["rep", "stage", "entropy_bits", "mean", "sq_error"])
        .map_err(io_err(&path))?;
    for t in trajectories {
        for s in &t.stages {
            w.write_record([
                t.rep.to_string(),
                s.stage.to_string(),
                sig9(s.entropy_bits),
                sig9(s.mean),
                sig9(s.sq_error),
            ])
            .map_err(io_err(&path))?;
        }
    }
    w.flush()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;

    let path = dir.join("summary.csv");
    let mut w = csv::Writer::from_path(&path).map_err(io_err(&path))?;
    w.write_record([
        "stage",
        "mean_entropy",
        "std_entropy",
        "mse",
        "mse_bound",
        "predicted_value",
    ])
    .map_err(io_err(&path))?;
    for s in &agg.stages {
        w.write_record([
            s.stage.to_string(),
            sig9(s.mean_entropy),
            sig9(s.std_entropy),
            sig9(s.mse),
            sig9(s.mse_bound),
            sig9(s.predicted_value),
        ])
        .map_err(io_err(&path))?;
    }
    w.flush()
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Runs the configured experiment, writes the CSVs and returns the
/// aggregate with a printable summary.
pub fn simulate(cfg: &ConfigFile, opts: &SimulateOptions) -> Result<(Aggregate, String), CliError> {
    let cfg = opts.apply(cfg)?;
    let (trajectories, agg) = run(&cfg, opts.threads)?;
    write_csvs(&opts.out, &trajectories, &agg)?;
    let mut out = String::new();
    writeln!(out, "schedule: {}", agg.schedule).unwrap();
    writeln!(out, "replications: {}", agg.replications).unwrap();
    writeln!(out, "stages: {}", cfg.stages).unwrap();
    writeln!(out, "phi* (bits/stage): {}", sig9(agg.phi_star)).unwrap();
    if agg.g_star != agg.phi_star {
        writeln!(out, "G* (per stage): {}", sig9(agg.g_star)).unwrap();
    }
    writeln!(out, "fitted slope: {}", sig9(agg.slope)).unwrap();
    writeln!(out, "predicted slope: {}", sig9(-agg.phi_star)).unwrap();
    writeln!(out, "wrote {}", opts.out.join("trajectories.csv").display()).unwrap();
    writeln!(out, "wrote {}", opts.out.join("summary.csv").display()).unwrap();
    Ok((agg, out))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn render(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{} {}: {}\n",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                )
            })
            .collect()
    }
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn within(name: &str, a: f64, b: f64, tol: f64) -> Check {
    let diff = (a - b).abs();
    check(
        name,
        diff <= tol,
        format!(
            "{} vs {}, |diff| {} (tol {})",
            sig9(a),
            sig9(b),
            sig9(diff),
            sig9(tol)
        ),
    )
}

fn skipped(name: &str, why: String) -> Check {
    check(name, true, format!("skipped: {why}"))
}

/// Runs the invariant checks for the configured suite.
pub fn verify(cfg: &ConfigFile) -> Result<VerifyReport, CliError> {
    let suite = cfg.suite()?;
    let opts = cfg.planner();
    let prior = cfg.prior();
    let optimum = optimize_suite(&suite, &opts)?;
    let mut checks = Vec::new();

    let discrete: Option<Vec<DiscreteChannel>> = optimum
        .channels()
        .iter()
        .map(|c| c.as_discrete().cloned())
        .collect();
    match discrete {
        None => {
            let why = "continuous observations cannot be enumerated".to_string();
            for name in ["one-step identity", "factorization", "joint vs sequential"] {
                checks.push(skipped(name, why.clone()));
            }
        }
        Some(chs) => {
            let product = product_channel(&chs)?;
            if product.num_outputs() > DEFAULT_OUTCOME_CAP {
                let why = format!("{} joint outcomes", product.num_outputs());
                for name in ["one-step identity", "factorization", "joint vs sequential"] {
                    checks.push(skipped(name, why.clone()));
                }
            } else {
                let plan = plan_joint_with(&prior, &optimum)?;
                let joint = expected_stage_reduction(
                    &prior,
                    &suite,
                    Schedule::Joint,
                    &opts,
                    DEFAULT_OUTCOME_CAP,
                )?;
                let phi = mutual_information(&product, plan.operating_point.as_slice())?;
                checks.push(within("one-step identity", joint, phi, 1e-10));

                let joint_capacity = match capacity(&product, opts.capacity) {
                    Ok(r) => r.value,
                    Err(infosearch::error::SearchError::ConvergenceFailure {
                        best: Some(r),
                        ..
                    }) => r.value,
                    Err(e) => return Err(e.into()),
                };
                checks.push(within(
                    "factorization",
                    joint_capacity,
                    optimum.information(),
                    1e-6,
                ));

                let seq = expected_stage_reduction(
                    &prior,
                    &suite,
                    Schedule::Sequential,
                    &opts,
                    DEFAULT_OUTCOME_CAP,
                )?;
                checks.push(within("joint vs sequential", joint, seq, 1e-9));
            }
        }
    }

    if suite
        .sensors()
        .iter()
        .any(|s| matches!(s.model, SensorModel::Modes(_)))
    {
        match exhaustive_mode_gain(&suite, &opts) {
            Ok(g) => checks.push(within("precision-mode decoupling", g, optimum.gain(), 1e-8)),
            Err(e) => checks.push(skipped("precision-mode decoupling", e.to_string())),
        }
    }

    let (_, agg) = run(cfg, None)?;
    let mse = MseReport::from(&agg);
    let worst = mse
        .stages
        .iter()
        .min_by(|a, b| (a.mse / a.bound).total_cmp(&(b.mse / b.bound)))
        .expect("stage 0 exists");
    checks.push(check(
        "mse bound",
        mse.holds(),
        format!(
            "min empirical/bound ratio {} at stage {} over {} replications",
            sig9(mse.min_ratio),
            worst.stage,
            agg.replications
        ),
    ));

    let last = agg.stages.last().expect("stage N exists");
    let se = last.std_entropy / (agg.replications as f64).sqrt();
    let diff = (last.mean_entropy - last.predicted_value).abs();
    let trend = if agg.phi_star == 0.0
        && agg
            .stages
            .iter()
            .all(|s| s.mean_entropy == agg.stages[0].mean_entropy)
    {
        "; entropy constant at every stage"
    } else {
        ""
    };
    checks.push(check(
        "entropy at horizon",
        diff <= 3.0 * se + 1e-9,
        format!(
            "mean H(p_N) {} vs predicted {}, |diff| {} (tol 3 SE = {}){trend}",
            sig9(last.mean_entropy),
            sig9(last.predicted_value),
            sig9(diff),
            sig9(3.0 * se)
        ),
    ));

    Ok(VerifyReport { checks })
}

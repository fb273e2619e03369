//! Monte Carlo experiments: N-stage adaptive searches under the optimal
//! plan, trajectory aggregation, and exact one-stage expectations.

mod rng;

use std::fmt;
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{Partition, PiecewiseDensity};
use crate::channel::{
    capacity, dyadic_bit, joint_output_digits, product_channel, DiscreteChannel, OperatingPoint,
};
use crate::error::{Result, SearchError};
use crate::policy::{
    mse_lower_bound, optimize_suite, plan_for_operating_point, plan_joint_with, ActiveChannel,
    Observation, PlannerOptions, SensorModel, SensorSuite, SuiteOptimum,
};

/// Largest outcome space enumerated by [`expected_stage_reduction`].
pub const DEFAULT_OUTCOME_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    /// All sensors query their regions at once; one batch update per stage.
    #[default]
    Joint,
    /// Sensors take turns within a stage, re-planning after each update.
    Sequential,
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Schedule::Joint => "joint",
            Schedule::Sequential => "sequential",
        })
    }
}

impl FromStr for Schedule {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "joint" => Ok(Schedule::Joint),
            "sequential" => Ok(Schedule::Sequential),
            other => Err(SearchError::invalid(format!(
                "unknown schedule '{other}', expected joint or sequential"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub suite: SensorSuite,
    pub stages: usize,
    pub replications: usize,
    pub seed: u64,
    pub schedule: Schedule,
    pub prior: PiecewiseDensity,
    pub planner: PlannerOptions,
}

impl ExperimentConfig {
    pub fn new(suite: SensorSuite, stages: usize, replications: usize, seed: u64) -> Result<Self> {
        let cfg = ExperimentConfig {
            suite,
            stages,
            replications,
            seed,
            schedule: Schedule::Joint,
            prior: PiecewiseDensity::uniform(),
            planner: PlannerOptions::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_prior(mut self, prior: PiecewiseDensity) -> Self {
        self.prior = prior;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.stages == 0 {
            return Err(SearchError::invalid("stages must be at least 1"));
        }
        if self.replications == 0 {
            return Err(SearchError::invalid("replications must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub entropy_bits: f64,
    pub mean: f64,
    pub sq_error: f64,
    /// One observation per sensor, in suite order. Empty at stage 0.
    pub observations: Vec<Observation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub rep: usize,
    pub truth: f64,
    /// Stages `0..=N`.
    pub stages: Vec<StageRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub stage: usize,
    pub mean_entropy: f64,
    /// Sample standard deviation across replications; zero when `R = 1`.
    pub std_entropy: f64,
    pub mse: f64,
    pub mse_bound: f64,
    /// `H(p_0) - n * phi*`.
    pub predicted_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub replications: usize,
    pub schedule: Schedule,
    /// Expected entropy reduction per stage under the optimal plan, bits.
    pub phi_star: f64,
    /// Per-stage gain including mode costs.
    pub g_star: f64,
    pub stages: Vec<StageSummary>,
    /// Least-squares slope of mean entropy against stage.
    pub slope: f64,
}

impl Aggregate {
    /// Reduces trajectories in the order given.
    pub fn from_trajectories(
        trajectories: &[Trajectory],
        schedule: Schedule,
        prior_entropy: f64,
        optimum: &SuiteOptimum,
    ) -> Result<Self> {
        let r = trajectories.len();
        if r == 0 {
            return Err(SearchError::invalid("no trajectories to aggregate"));
        }
        let n_stages = trajectories[0].stages.len();
        if trajectories.iter().any(|t| t.stages.len() != n_stages) {
            return Err(SearchError::invalid("trajectories differ in length"));
        }
        let phi_star = optimum.information();
        let rf = r as f64;
        let mut stages = Vec::with_capacity(n_stages);
        for n in 0..n_stages {
            let mean_entropy = trajectories
                .iter()
                .map(|t| t.stages[n].entropy_bits)
                .sum::<f64>()
                / rf;
            let std_entropy = if r > 1 {
                let ss: f64 = trajectories
                    .iter()
                    .map(|t| (t.stages[n].entropy_bits - mean_entropy).powi(2))
                    .sum();
                (ss / (rf - 1.0)).sqrt()
            } else {
                0.0
            };
            let mse = trajectories
                .iter()
                .map(|t| t.stages[n].sq_error)
                .sum::<f64>()
                / rf;
            stages.push(StageSummary {
                stage: n,
                mean_entropy,
                std_entropy,
                mse,
                mse_bound: mse_lower_bound(prior_entropy, n, phi_star, 1)?,
                predicted_value: prior_entropy - n as f64 * phi_star,
            });
        }
        let slope = ols_slope(&stages);
        Ok(Aggregate {
            replications: r,
            schedule,
            phi_star,
            g_star: optimum.gain(),
            stages,
            slope,
        })
    }
}

fn ols_slope(stages: &[StageSummary]) -> f64 {
    let n = stages.len() as f64;
    if stages.len() < 2 {
        return 0.0;
    }
    let xbar = stages.iter().map(|s| s.stage as f64).sum::<f64>() / n;
    let ybar = stages.iter().map(|s| s.mean_entropy).sum::<f64>() / n;
    let sxy: f64 = stages
        .iter()
        .map(|s| (s.stage as f64 - xbar) * (s.mean_entropy - ybar))
        .sum();
    let sxx: f64 = stages.iter().map(|s| (s.stage as f64 - xbar).powi(2)).sum();
    sxy / sxx
}

fn sample_observation<R: Rng>(ch: &ActiveChannel, z: usize, rng: &mut R) -> Result<Observation> {
    match ch {
        ActiveChannel::Discrete(d) => {
            let dist = WeightedIndex::new(d.row(z))
                .map_err(|e| SearchError::invalid(format!("cannot sample channel row {z}: {e}")))?;
            Ok(Observation::Symbol(dist.sample(rng)))
        }
        ActiveChannel::Gaussian(g) => Ok(Observation::Value(g.sample(z, rng))),
    }
}

fn record(
    stage: usize,
    p: &PiecewiseDensity,
    truth: f64,
    observations: Vec<Observation>,
) -> StageRecord {
    let mean = p.mean();
    StageRecord {
        stage,
        entropy_bits: p.entropy(),
        mean,
        sq_error: (truth - mean).powi(2),
        observations,
    }
}

/// Runs one replication with a precomputed suite optimum.
pub fn run_replication_with(
    cfg: &ExperimentConfig,
    optimum: &SuiteOptimum,
    rep: usize,
) -> Result<Trajectory> {
    let seed = cfg.seed;
    let rep_key = rep as u64;
    let truth = cfg
        .prior
        .quantile(rng::stream(seed, rep_key, 0, rng::TRUTH_SLOT).gen::<f64>());
    let mut p = cfg.prior.clone();
    let mut stages = Vec::with_capacity(cfg.stages + 1);
    stages.push(record(0, &p, truth, Vec::new()));
    let channels = optimum.channels();
    let m_count = channels.len();

    for n in 1..=cfg.stages {
        let mut obs = Vec::with_capacity(m_count);
        match cfg.schedule {
            Schedule::Joint => {
                let plan = plan_joint_with(&p, optimum)?;
                for (m, ch) in channels.iter().enumerate() {
                    let z = usize::from(plan.sensor_regions[m].contains(truth));
                    let mut r = rng::stream(seed, rep_key, n as u64, m as u64);
                    obs.push(sample_observation(ch, z, &mut r)?);
                }
                let ln_lik = (0..plan.partition.num_cells())
                    .map(|k| {
                        channels
                            .iter()
                            .zip(&obs)
                            .enumerate()
                            .try_fold(0.0, |acc, (m, (ch, &y))| {
                                Ok(acc + ch.ln_likelihood(dyadic_bit(k, m, m_count), y)?)
                            })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                p = p.update_with_log_likelihoods(&plan.partition, &ln_lik)?;
            }
            Schedule::Sequential => {
                for (m, (ch, s)) in channels.iter().zip(&optimum.sensors).enumerate() {
                    let plan = plan_for_operating_point(&p, &OperatingPoint::bernoulli(s.u_star)?)?;
                    let z = usize::from(plan.partition.cell(1).contains(truth));
                    let mut r = rng::stream(seed, rep_key, n as u64, m as u64);
                    let y = sample_observation(ch, z, &mut r)?;
                    let ln_lik = [ch.ln_likelihood(0, y)?, ch.ln_likelihood(1, y)?];
                    p = p.update_with_log_likelihoods(&plan.partition, &ln_lik)?;
                    obs.push(y);
                }
            }
        }
        stages.push(record(n, &p, truth, obs));
    }
    Ok(Trajectory { rep, truth, stages })
}

/// Runs replication `rep` of `cfg`.
pub fn run_replication(cfg: &ExperimentConfig, rep: usize) -> Result<Trajectory> {
    cfg.validate()?;
    let optimum = optimize_suite(&cfg.suite, &cfg.planner)?;
    run_replication_with(cfg, &optimum, rep)
}

/// All replications on the calling thread.
pub fn run_replications_serial(cfg: &ExperimentConfig) -> Result<(SuiteOptimum, Vec<Trajectory>)> {
    cfg.validate()?;
    let optimum = optimize_suite(&cfg.suite, &cfg.planner)?;
    let trajectories = (0..cfg.replications)
        .map(|rep| run_replication_with(cfg, &optimum, rep))
        .collect::<Result<Vec<_>>>()?;
    Ok((optimum, trajectories))
}

/// All replications, spread over the current rayon pool.
#[cfg(feature = "parallel")]
pub fn run_replications(cfg: &ExperimentConfig) -> Result<(SuiteOptimum, Vec<Trajectory>)> {
    use rayon::prelude::*;
    cfg.validate()?;
    let optimum = optimize_suite(&cfg.suite, &cfg.planner)?;
    let trajectories = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| run_replication_with(cfg, &optimum, rep))
        .collect::<Result<Vec<_>>>()?;
    Ok((optimum, trajectories))
}

#[cfg(not(feature = "parallel"))]
pub fn run_replications(cfg: &ExperimentConfig) -> Result<(SuiteOptimum, Vec<Trajectory>)> {
    run_replications_serial(cfg)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Aggregate> {
    let (optimum, trajectories) = run_replications(cfg)?;
    Aggregate::from_trajectories(&trajectories, cfg.schedule, cfg.prior.entropy(), &optimum)
}

pub fn run_experiment_serial(cfg: &ExperimentConfig) -> Result<Aggregate> {
    let (optimum, trajectories) = run_replications_serial(cfg)?;
    Aggregate::from_trajectories(&trajectories, cfg.schedule, cfg.prior.entropy(), &optimum)
}

/// Exact `H(p) - E[H(p | Y)]` for one query of `ch` with `partition`.
pub fn expected_reduction(
    p: &PiecewiseDensity,
    partition: &Partition,
    ch: &DiscreteChannel,
) -> Result<f64> {
    if partition.num_cells() != ch.num_inputs() {
        return Err(SearchError::invalid(format!(
            "partition has {} cells, channel has {} inputs",
            partition.num_cells(),
            ch.num_inputs()
        )));
    }
    let masses = p.cell_masses(partition);
    let h = p.entropy();
    let mut total = 0.0;
    for y in 0..ch.num_outputs() {
        let col = ch.column(y);
        let prob: f64 = masses.iter().zip(&col).map(|(u, f)| u * f).sum();
        if prob > 0.0 {
            total += prob * (h - p.update_with_likelihoods(partition, &col)?.entropy());
        }
    }
    Ok(total)
}

fn sequential_reduction(p: &PiecewiseDensity, sensors: &[(&DiscreteChannel, f64)]) -> Result<f64> {
    let Some(((ch, u), rest)) = sensors.split_first() else {
        return Ok(0.0);
    };
    let plan = plan_for_operating_point(p, &OperatingPoint::bernoulli(*u)?)?;
    let masses = p.cell_masses(&plan.partition);
    let h = p.entropy();
    let mut total = 0.0;
    for y in 0..ch.num_outputs() {
        let col = ch.column(y);
        let prob: f64 = masses.iter().zip(&col).map(|(u, f)| u * f).sum();
        if prob > 0.0 {
            let post = p.update_with_likelihoods(&plan.partition, &col)?;
            total += prob * (h - post.entropy() + sequential_reduction(&post, rest)?);
        }
    }
    Ok(total)
}

/// Exact expected entropy reduction over one stage of the optimal plan,
/// enumerating every outcome tuple (joint) or outcome path (sequential).
pub fn expected_stage_reduction(
    p: &PiecewiseDensity,
    suite: &SensorSuite,
    schedule: Schedule,
    opts: &PlannerOptions,
    outcome_cap: usize,
) -> Result<f64> {
    let optimum = optimize_suite(suite, opts)?;
    let channels = optimum
        .channels()
        .into_iter()
        .map(|c| {
            c.as_discrete().ok_or_else(|| {
                SearchError::Unsupported("exact enumeration needs discrete observations".into())
            })
        })
        .collect::<Result<Vec<_>>>()?;
    channels
        .iter()
        .try_fold(1usize, |acc, ch| acc.checked_mul(ch.num_outputs()))
        .filter(|&n| n <= outcome_cap)
        .ok_or_else(|| {
            SearchError::Unsupported(format!("outcome space exceeds the cap of {outcome_cap}"))
        })?;
    match schedule {
        Schedule::Joint => {
            let plan = plan_joint_with(p, &optimum)?;
            let owned: Vec<DiscreteChannel> = channels.iter().map(|c| (*c).clone()).collect();
            expected_reduction(p, &plan.partition, &product_channel(&owned)?)
        }
        Schedule::Sequential => {
            let pairs: Vec<(&DiscreteChannel, f64)> = channels
                .iter()
                .zip(&optimum.sensors)
                .map(|(c, s)| (*c, s.u_star))
                .collect();
            sequential_reduction(p, &pairs)
        }
    }
}

/// Best one-stage gain found by searching every combination of precision
/// modes jointly, running Blahut–Arimoto on each product channel.
pub fn exhaustive_mode_gain(suite: &SensorSuite, opts: &PlannerOptions) -> Result<f64> {
    let options: Vec<Vec<(&DiscreteChannel, f64)>> = suite
        .sensors()
        .iter()
        .map(|s| match &s.model {
            SensorModel::Discrete(ch) => Ok(vec![(ch, 0.0)]),
            SensorModel::Modes(set) => {
                Ok(set.modes().iter().map(|m| (&m.channel, m.cost)).collect())
            }
            SensorModel::Gaussian(_) => Err(SearchError::Unsupported(format!(
                "sensor '{}' has continuous observations",
                s.name
            ))),
        })
        .collect::<Result<_>>()?;
    let radices: Vec<usize> = options.iter().map(Vec::len).collect();
    let combos: usize = radices.iter().product();
    let mut best = f64::NEG_INFINITY;
    for index in 0..combos {
        let picks = joint_output_digits(index, &radices);
        let chosen: Vec<DiscreteChannel> = picks
            .iter()
            .zip(&options)
            .map(|(&l, o)| o[l].0.clone())
            .collect();
        let cost: f64 = picks.iter().zip(&options).map(|(&l, o)| o[l].1).sum();
        let value = match capacity(&product_channel(&chosen)?, opts.capacity) {
            Ok(r) => r.value,
            Err(SearchError::ConvergenceFailure { best: Some(r), .. }) => r.value,
            Err(e) => return Err(e),
        };
        best = best.max(value - suite.gamma() * cost);
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseStage {
    pub stage: usize,
    pub mse: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseReport {
    pub stages: Vec<MseStage>,
    /// Smallest ratio of empirical MSE to the bound.
    pub min_ratio: f64,
}

impl MseReport {
    pub fn holds(&self) -> bool {
        self.stages.iter().all(|s| s.mse >= s.bound)
    }
}

impl From<&Aggregate> for MseReport {
    fn from(agg: &Aggregate) -> Self {
        let stages: Vec<MseStage> = agg
            .stages
            .iter()
            .map(|s| MseStage {
                stage: s.stage,
                mse: s.mse,
                bound: s.mse_bound,
            })
            .collect();
        let min_ratio = stages
            .iter()
            .map(|s| s.mse / s.bound)
            .fold(f64::INFINITY, f64::min);
        MseReport { stages, min_ratio }
    }
}

/// Empirical per-stage MSE of the posterior mean against the lower bound.
pub fn verify_mse_bound(cfg: &ExperimentConfig) -> Result<MseReport> {
    Ok(MseReport::from(&run_experiment(cfg)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::GaussianBooleanChannel;
    use crate::policy::Sensor;
    use approx::assert_abs_diff_eq;

    fn bsc_suite(ps: &[f64]) -> SensorSuite {
        let sensors = ps
            .iter()
            .enumerate()
            .map(|(i, &p)| Sensor::discrete(format!("s{i}"), DiscreteChannel::bsc(p).unwrap()))
            .collect();
        SensorSuite::new(sensors, 0.0).unwrap()
    }

    fn noiseless() -> SensorSuite {
        let ch = DiscreteChannel::boolean(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap();
        SensorSuite::new(vec![Sensor::discrete("perfect", ch)], 0.0).unwrap()
    }

    fn dead() -> SensorSuite {
        let ch = DiscreteChannel::boolean(vec![0.4, 0.6], vec![0.4, 0.6]).unwrap();
        SensorSuite::new(vec![Sensor::discrete("dead", ch)], 0.0).unwrap()
    }

    #[test]
    fn trajectory_shape() {
        let cfg = ExperimentConfig::new(bsc_suite(&[0.2, 0.3]), 24, 1, 5).unwrap();
        let t = run_replication(&cfg, 0).unwrap();
        assert_eq!(t.stages.len(), 25);
        assert_eq!(t.stages[0].entropy_bits, 0.0);
        assert_eq!(t.stages[3].observations.len(), 2);
    }

    #[test]
    fn noiseless_bisection_loses_one_bit_per_stage() {
        for schedule in [Schedule::Joint, Schedule::Sequential] {
            let cfg = ExperimentConfig::new(noiseless(), 12, 1, 9)
                .unwrap()
                .with_schedule(schedule);
            let t = run_replication(&cfg, 0).unwrap();
            for s in &t.stages {
                assert_abs_diff_eq!(s.entropy_bits, -(s.stage as f64), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn zero_capacity_sensor_learns_nothing() {
        let cfg = ExperimentConfig::new(dead(), 10, 3, 1).unwrap();
        let agg = run_experiment(&cfg).unwrap();
        for s in &agg.stages {
            assert_abs_diff_eq!(s.mean_entropy, 0.0, epsilon = 1e-12);
            assert_eq!(
                s.mse_bound,
                1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::E)
            );
        }
        assert_abs_diff_eq!(agg.slope, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_replication_aggregate_is_the_trajectory() {
        let cfg = ExperimentConfig::new(bsc_suite(&[0.2]), 6, 1, 3).unwrap();
        let t = run_replication(&cfg, 0).unwrap();
        let agg = run_experiment(&cfg).unwrap();
        for (s, r) in agg.stages.iter().zip(&t.stages) {
            assert_eq!(s.mean_entropy, r.entropy_bits);
            assert_eq!(s.mse, r.sq_error);
            assert_eq!(s.std_entropy, 0.0);
        }
    }

    #[test]
    fn parallel_and_serial_agree() {
        let cfg = ExperimentConfig::new(bsc_suite(&[0.2, 0.3]), 8, 16, 11).unwrap();
        assert_eq!(
            run_experiment(&cfg).unwrap(),
            run_experiment_serial(&cfg).unwrap()
        );
    }

    #[test]
    fn gaussian_replication_runs() {
        let g = GaussianBooleanChannel::new(0.0, 1.0, 1.0).unwrap();
        let suite = SensorSuite::new(
            vec![Sensor::gaussian("a", g), Sensor::gaussian("b", g)],
            0.0,
        )
        .unwrap();
        let cfg = ExperimentConfig::new(suite, 5, 1, 2).unwrap();
        let t = run_replication(&cfg, 0).unwrap();
        assert!(matches!(t.stages[1].observations[0], Observation::Value(_)));
        assert!(t.stages[5].entropy_bits < 0.5);
    }

    #[test]
    fn exact_stage_reduction_examples() {
        let p = PiecewiseDensity::uniform();
        let opts = PlannerOptions::default();
        let suite = bsc_suite(&[0.2, 0.3]);
        let joint =
            expected_stage_reduction(&p, &suite, Schedule::Joint, &opts, DEFAULT_OUTCOME_CAP)
                .unwrap();
        let seq =
            expected_stage_reduction(&p, &suite, Schedule::Sequential, &opts, DEFAULT_OUTCOME_CAP)
                .unwrap();
        assert_abs_diff_eq!(joint, 0.396781, epsilon = 5e-7);
        assert_abs_diff_eq!(joint, seq, epsilon = 1e-9);
        let one = expected_stage_reduction(
            &p,
            &noiseless(),
            Schedule::Joint,
            &opts,
            DEFAULT_OUTCOME_CAP,
        )
        .unwrap();
        assert_abs_diff_eq!(one, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn outcome_cap_and_gaussian_are_unsupported() {
        let p = PiecewiseDensity::uniform();
        let opts = PlannerOptions::default();
        assert!(matches!(
            expected_stage_reduction(&p, &bsc_suite(&[0.1; 3]), Schedule::Joint, &opts, 4),
            Err(SearchError::Unsupported(_))
        ));
        let g = GaussianBooleanChannel::new(0.0, 1.0, 1.0).unwrap();
        let suite = SensorSuite::new(vec![Sensor::gaussian("a", g)], 0.0).unwrap();
        assert!(matches!(
            expected_stage_reduction(&p, &suite, Schedule::Joint, &opts, 10),
            Err(SearchError::Unsupported(_))
        ));
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::new(bsc_suite(&[0.2]), 0, 1, 0).is_err());
        assert!(ExperimentConfig::new(bsc_suite(&[0.2]), 1, 0, 0).is_err());
        assert_eq!(
            "sequential".parse::<Schedule>().unwrap(),
            Schedule::Sequential
        );
        assert!("both".parse::<Schedule>().is_err());
    }

    #[test]
    fn mse_report_at_stage_zero() {
        let cfg = ExperimentConfig::new(bsc_suite(&[0.2, 0.3]), 4, 200, 4).unwrap();
        let report = verify_mse_bound(&cfg).unwrap();
        assert!(report.stages[0].bound < 1.0 / 12.0);
        assert!(report.holds());
        assert!(report.min_ratio >= 1.0);
    }

    #[test]
    fn exhaustive_mode_search_matches_decoupled_choice() {
        use crate::policy::{choose_precision_modes, PrecisionMode, PrecisionModeSet};
        let set = |a: f64, b: f64, c: f64| {
            PrecisionModeSet::new(vec![
                PrecisionMode {
                    channel: DiscreteChannel::bsc(a).unwrap(),
                    cost: 0.0,
                },
                PrecisionMode {
                    channel: DiscreteChannel::binary_asymmetric(b, 0.9).unwrap(),
                    cost: c,
                },
            ])
            .unwrap()
        };
        let suite = SensorSuite::new(
            vec![
                Sensor::new("a", SensorModel::Modes(set(0.3, 0.95, 0.2))),
                Sensor::new("b", SensorModel::Modes(set(0.1, 0.8, 0.05))),
            ],
            0.7,
        )
        .unwrap();
        let opts = PlannerOptions::default();
        let exhaustive = exhaustive_mode_gain(&suite, &opts).unwrap();
        let decoupled = choose_precision_modes(&suite, &opts).unwrap().g_star;
        assert_abs_diff_eq!(exhaustive, decoupled, epsilon = 1e-8);
    }
}

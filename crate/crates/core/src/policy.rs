//! Optimal sensing plans.
//!
//! The expected entropy reduction of a stage depends on the posterior and
//! the chosen regions only through the cell masses they realize, so the
//! optimal policy is greedy: compute the capacity-achieving operating point
//! once, then at every stage cut the unit interval at posterior quantiles so
//! each cell receives its target mass. For independent Boolean sensors the
//! joint optimum is the product of per-sensor optima, and with precision
//! modes each sensor picks its best mode on its own.

use serde::{Deserialize, Serialize};

use crate::belief::{Partition, PiecewiseDensity, Region};
use crate::channel::{
    binary_input_capacity, capacity, dyadic_bit, dyadic_label, factorized_joint_optimum,
    gaussian_boolean_mi, is_quasi_symmetric, mutual_information, CapacityOptions, DiscreteChannel,
    GaussianBooleanChannel, OperatingPoint,
};
use crate::error::{Result, SearchError};

/// Ties in precision-mode gain closer than this go to the lower index.
const MODE_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionMode {
    pub channel: DiscreteChannel,
    pub cost: f64,
}

/// Selectable error models of one sensor, each with a usage cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionModeSet {
    modes: Vec<PrecisionMode>,
}

impl PrecisionModeSet {
    pub fn new(modes: Vec<PrecisionMode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(SearchError::invalid(
                "a precision-mode set needs at least one mode",
            ));
        }
        for (l, mode) in modes.iter().enumerate() {
            if !(mode.cost >= 0.0 && mode.cost.is_finite()) {
                return Err(SearchError::invalid(format!(
                    "mode {l} has invalid cost {}",
                    mode.cost
                )));
            }
            if !mode.channel.is_boolean() {
                return Err(SearchError::invalid(format!(
                    "mode {l} is not a Boolean channel"
                )));
            }
        }
        Ok(PrecisionModeSet { modes })
    }

    pub fn modes(&self) -> &[PrecisionMode] {
        &self.modes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SensorModel {
    Discrete(DiscreteChannel),
    Gaussian(GaussianBooleanChannel),
    Modes(PrecisionModeSet),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sensor {
    pub name: String,
    pub model: SensorModel,
}

impl Sensor {
    pub fn new(name: impl Into<String>, model: SensorModel) -> Self {
        Sensor {
            name: name.into(),
            model,
        }
    }

    pub fn discrete(name: impl Into<String>, channel: DiscreteChannel) -> Self {
        Sensor::new(name, SensorModel::Discrete(channel))
    }

    pub fn gaussian(name: impl Into<String>, channel: GaussianBooleanChannel) -> Self {
        Sensor::new(name, SensorModel::Gaussian(channel))
    }
}

/// Boolean sensors searched jointly, with the cost discount `gamma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorSuite {
    sensors: Vec<Sensor>,
    gamma: f64,
}

impl SensorSuite {
    pub fn new(sensors: Vec<Sensor>, gamma: f64) -> Result<Self> {
        if sensors.is_empty() {
            return Err(SearchError::invalid(
                "a sensor suite needs at least one sensor",
            ));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(SearchError::invalid(format!(
                "gamma must be nonnegative, got {gamma}"
            )));
        }
        for s in &sensors {
            if let SensorModel::Discrete(ch) = &s.model {
                if !ch.is_boolean() {
                    return Err(SearchError::invalid(format!(
                        "sensor '{}' has {} inputs; suite sensors must be Boolean",
                        s.name,
                        ch.num_inputs()
                    )));
                }
            }
        }
        Ok(SensorSuite { sensors, gamma })
    }

    pub fn sensors(&self) -> &[Sensor] {
        &self.sensors
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerOptions {
    pub capacity: CapacityOptions,
    /// Use `u* = 1/2` for quasi-symmetric sensors instead of running the
    /// capacity solver.
    pub symmetric_fast_path: bool,
    pub quad_points: usize,
}

impl Default for PlannerOptions {
    fn default() -> Self {
        PlannerOptions {
            capacity: CapacityOptions::default(),
            symmetric_fast_path: true,
            quad_points: 128,
        }
    }
}

/// Observation reported by one sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Observation {
    Symbol(usize),
    Value(f64),
}

/// Error model a sensor actually uses once any precision mode is fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum ActiveChannel {
    Discrete(DiscreteChannel),
    Gaussian(GaussianBooleanChannel),
}

impl ActiveChannel {
    /// Natural-log likelihood of `obs` given the region indicator `z`.
    pub fn ln_likelihood(&self, z: usize, obs: Observation) -> Result<f64> {
        match (self, obs) {
            (ActiveChannel::Discrete(ch), Observation::Symbol(y)) if y < ch.num_outputs() => {
                Ok(ch.likelihood(z, y).ln())
            }
            (ActiveChannel::Gaussian(ch), Observation::Value(y)) => Ok(ch.ln_density(z, y)),
            _ => Err(SearchError::invalid(format!(
                "observation {obs:?} does not match the sensor model"
            ))),
        }
    }

    pub fn as_discrete(&self) -> Option<&DiscreteChannel> {
        match self {
            ActiveChannel::Discrete(ch) => Some(ch),
            ActiveChannel::Gaussian(_) => None,
        }
    }
}

/// Best operating point for one sensor on its own.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorOptimum {
    /// Probability mass to place inside the sensor's region.
    pub u_star: f64,
    /// Expected entropy reduction at `u_star`, bits.
    pub information: f64,
    /// `information - gamma * cost`.
    pub gain: f64,
    pub cost: f64,
    pub mode: Option<usize>,
    pub channel: ActiveChannel,
}

/// Per-sensor optima and the joint operating point they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptimum {
    pub sensors: Vec<SensorOptimum>,
    pub joint: OperatingPoint,
}

impl SuiteOptimum {
    /// Expected entropy reduction per stage, `phi*`.
    pub fn information(&self) -> f64 {
        self.sensors.iter().map(|s| s.information).sum()
    }

    /// One-stage gain including discounted mode costs, `G*`.
    pub fn gain(&self) -> f64 {
        self.sensors.iter().map(|s| s.gain).sum()
    }

    pub fn channels(&self) -> Vec<&ActiveChannel> {
        self.sensors.iter().map(|s| &s.channel).collect()
    }

    pub fn modes(&self) -> Vec<Option<usize>> {
        self.sensors.iter().map(|s| s.mode).collect()
    }
}

fn boolean_optimum(ch: &DiscreteChannel, opts: &PlannerOptions) -> Result<(f64, f64)> {
    if opts.symmetric_fast_path && is_quasi_symmetric(ch)?.is_some() {
        return Ok((0.5, mutual_information(ch, &[0.5, 0.5])?));
    }
    let res = binary_input_capacity(ch)?;
    Ok((res.optimum.as_slice()[1], res.value))
}

/// Operating point and gain of one sensor, choosing its precision mode when
/// it has several.
pub fn optimize_sensor(
    sensor: &Sensor,
    gamma: f64,
    opts: &PlannerOptions,
) -> Result<SensorOptimum> {
    match &sensor.model {
        SensorModel::Discrete(ch) => {
            let (u_star, information) = boolean_optimum(ch, opts)?;
            Ok(SensorOptimum {
                u_star,
                information,
                gain: information,
                cost: 0.0,
                mode: None,
                channel: ActiveChannel::Discrete(ch.clone()),
            })
        }
        SensorModel::Gaussian(ch) => {
            let information = gaussian_boolean_mi(ch, 0.5, opts.quad_points)?;
            Ok(SensorOptimum {
                u_star: 0.5,
                information,
                gain: information,
                cost: 0.0,
                mode: None,
                channel: ActiveChannel::Gaussian(*ch),
            })
        }
        SensorModel::Modes(set) => {
            let mut best: Option<SensorOptimum> = None;
            for (l, mode) in set.modes().iter().enumerate() {
                let (u_star, information) = boolean_optimum(&mode.channel, opts)?;
                let gain = information - gamma * mode.cost;
                if best.as_ref().is_none_or(|b| gain > b.gain + MODE_TIE_TOL) {
                    best = Some(SensorOptimum {
                        u_star,
                        information,
                        gain,
                        cost: mode.cost,
                        mode: Some(l),
                        channel: ActiveChannel::Discrete(mode.channel.clone()),
                    });
                }
            }
            Ok(best.expect("mode sets are nonempty"))
        }
    }
}

/// Optimizes every sensor independently and forms the product joint
/// operating point.
pub fn optimize_suite(suite: &SensorSuite, opts: &PlannerOptions) -> Result<SuiteOptimum> {
    let sensors = suite
        .sensors()
        .iter()
        .map(|s| optimize_sensor(s, suite.gamma(), opts))
        .collect::<Result<Vec<_>>>()?;
    let u: Vec<f64> = sensors.iter().map(|s| s.u_star).collect();
    let joint = factorized_joint_optimum(&u)?;
    Ok(SuiteOptimum { sensors, joint })
}

/// Result of per-sensor precision-mode selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionChoice {
    pub modes: Vec<usize>,
    pub u_stars: Vec<f64>,
    pub g_star: f64,
}

/// Picks each sensor's precision mode by maximizing its own gain; the joint
/// gain is the sum.
pub fn choose_precision_modes(
    suite: &SensorSuite,
    opts: &PlannerOptions,
) -> Result<PrecisionChoice> {
    if let Some(s) = suite
        .sensors()
        .iter()
        .find(|s| !matches!(s.model, SensorModel::Modes(_)))
    {
        return Err(SearchError::invalid(format!(
            "sensor '{}' has no precision modes",
            s.name
        )));
    }
    let opt = optimize_suite(suite, opts)?;
    Ok(PrecisionChoice {
        modes: opt
            .sensors
            .iter()
            .map(|s| s.mode.expect("mode sensor"))
            .collect(),
        u_stars: opt.sensors.iter().map(|s| s.u_star).collect(),
        g_star: opt.gain(),
    })
}

/// One contiguous cell of a plan, in left-to-right order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanCell {
    /// Channel input index (dyadic index for joint plans).
    pub label: usize,
    /// Membership bits `i_1..i_M` for joint plans, the decimal label otherwise.
    pub bits: String,
    pub start: f64,
    pub end: f64,
}

/// Regions to query at one stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensingPlan {
    pub cells: Vec<PlanCell>,
    /// Cells indexed by label.
    pub partition: Partition,
    /// Region queried by each sensor. Empty for a single K-ary sensor with
    /// `K > 2`, whose query is the whole partition.
    pub sensor_regions: Vec<Region>,
    pub chosen_modes: Vec<Option<usize>>,
    /// Target cell masses, indexed by label.
    pub target: OperatingPoint,
    /// Cell masses the partition realizes under the planning density.
    pub operating_point: OperatingPoint,
}

/// Reflected Gray code sequence over `num_bits` bits.
pub fn gray_order(num_bits: usize) -> Vec<usize> {
    (0..1usize << num_bits).map(|i| i ^ (i >> 1)).collect()
}

/// `(label, start, end)` per interval, left to right.
type Spans = Vec<(usize, f64, f64)>;

/// Cuts `[0, 1]` into contiguous cells laid out in `order`, each receiving
/// its target mass under `p`.
fn cut_at_quantiles(
    p: &PiecewiseDensity,
    target: &[f64],
    order: &[usize],
) -> Result<(Spans, Partition)> {
    let mut cum = 0.0;
    let mut prev = 0.0;
    let mut spans = Vec::with_capacity(order.len());
    for (i, &label) in order.iter().enumerate() {
        cum += target[label];
        let end = if i + 1 == order.len() {
            1.0
        } else {
            p.quantile(cum).max(prev)
        };
        spans.push((label, prev, end));
        prev = end;
    }
    let mut cells = vec![Region::empty(); target.len()];
    for &(label, a, b) in &spans {
        cells[label] = Region::interval(a, b);
    }
    Ok((spans, Partition::new(cells)?))
}

/// K-region plan for a single sensor: cell `k` (input `k` of `ch`) gets
/// mass `u*_k`, cells laid out in index order.
pub fn plan_single_sensor_multi_region(
    p: &PiecewiseDensity,
    ch: &DiscreteChannel,
    opts: &PlannerOptions,
) -> Result<SensingPlan> {
    let target = if ch.is_boolean() && opts.symmetric_fast_path && is_quasi_symmetric(ch)?.is_some()
    {
        OperatingPoint::uniform(2)
    } else {
        capacity(ch, opts.capacity)?.optimum
    };
    plan_for_operating_point(p, &target)
}

/// Single-sensor plan for an explicit operating point.
pub fn plan_for_operating_point(
    p: &PiecewiseDensity,
    target: &OperatingPoint,
) -> Result<SensingPlan> {
    let order: Vec<usize> = (0..target.len()).collect();
    let (spans, partition) = cut_at_quantiles(p, target.as_slice(), &order)?;
    let cells = spans
        .iter()
        .map(|&(label, start, end)| PlanCell {
            label,
            bits: label.to_string(),
            start,
            end,
        })
        .collect();
    let sensor_regions = if target.len() == 2 {
        vec![partition.cell(1).clone()]
    } else {
        Vec::new()
    };
    let operating_point = OperatingPoint::from_raw(p.cell_masses(&partition));
    Ok(SensingPlan {
        cells,
        partition,
        sensor_regions,
        chosen_modes: vec![None; if target.len() == 2 { 1 } else { 0 }],
        target: target.clone(),
        operating_point,
    })
}

/// Joint plan for precomputed per-sensor optima. Cells follow the reflected
/// Gray code over `(i_1..i_M)`; sensor `m` queries the union of cells with
/// `i_m = 1`.
pub fn plan_joint_with(p: &PiecewiseDensity, optimum: &SuiteOptimum) -> Result<SensingPlan> {
    let m_count = optimum.sensors.len();
    let order = gray_order(m_count);
    let (spans, partition) = cut_at_quantiles(p, optimum.joint.as_slice(), &order)?;
    let cells = spans
        .iter()
        .map(|&(label, start, end)| PlanCell {
            label,
            bits: dyadic_label(label, m_count),
            start,
            end,
        })
        .collect();
    let sensor_regions = (0..m_count)
        .map(|m| {
            partition
                .cells()
                .iter()
                .enumerate()
                .filter(|(k, _)| dyadic_bit(*k, m, m_count) == 1)
                .fold(Region::empty(), |acc, (_, c)| acc.union(c))
        })
        .collect();
    let operating_point = OperatingPoint::from_raw(p.cell_masses(&partition));
    Ok(SensingPlan {
        cells,
        partition,
        sensor_regions,
        chosen_modes: optimum.modes(),
        target: optimum.joint.clone(),
        operating_point,
    })
}

/// Joint plan for a suite of Boolean sensors at posterior `p`.
pub fn plan_joint_boolean(
    p: &PiecewiseDensity,
    suite: &SensorSuite,
    opts: &PlannerOptions,
) -> Result<SensingPlan> {
    let optimum = optimize_suite(suite, opts)?;
    plan_joint_with(p, &optimum)
}

/// Optimal expected terminal cost from stage `n`: `H(p_n) - (N - n) * gain`.
pub fn predict_value(entropy: f64, n: usize, horizon: usize, per_stage_gain: f64) -> Result<f64> {
    if n > horizon {
        return Err(SearchError::invalid(format!(
            "stage {n} is past the horizon {horizon}"
        )));
    }
    Ok(entropy - (horizon - n) as f64 * per_stage_gain)
}

/// Lower bound on the mean-square error of the posterior-mean estimate
/// after `n` stages. Entropy and `phi_star` are given in bits and converted
/// to nats before exponentiation.
pub fn mse_lower_bound(prior_entropy: f64, n: usize, phi_star: f64, dim: usize) -> Result<f64> {
    if dim != 1 {
        return Err(SearchError::Unsupported(format!(
            "MSE bound implemented for one-dimensional search only, got d = {dim}"
        )));
    }
    let ln2 = std::f64::consts::LN_2;
    let d = dim as f64;
    let c0 = (2.0 * prior_entropy * ln2).exp();
    Ok(
        d * c0.powf(1.0 / d) / (2.0 * std::f64::consts::PI * std::f64::consts::E)
            * (-2.0 * n as f64 * phi_star * ln2 / d).exp(),
    )
}

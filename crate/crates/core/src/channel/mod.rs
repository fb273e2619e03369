//! Discrete memoryless channels between the error-free region indicator and
//! the noisy sensor output.
//!
//! A sensor that queries a partition of the search domain into `K` cells
//! behaves like a channel whose input is the index of the cell holding the
//! object and whose output is the observed symbol. The expected one-stage
//! reduction of posterior entropy is the mutual information of that channel
//! evaluated at the cell-mass vector (the *operating point*), so the best
//! achievable reduction per stage is the channel capacity.
//!
//! All information quantities are in bits.
//!
//! Multi-sensor inputs use a dyadic convention: joint cell `k` in
//! `0..2^M` carries the per-sensor membership bits `(i_1, .., i_M)` with
//! sensor 1 in the most significant bit. Joint output symbols use the same
//! mixed-radix order, sensor 1 most significant.

mod capacity;
mod gaussian;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SearchError};

pub use capacity::{binary_input_capacity, capacity, duality_gap, CapacityOptions, CapacityResult};
pub use gaussian::{gauss_hermite, gaussian_boolean_mi, GaussianBooleanChannel};

/// Row sums and probability vectors must hit 1 within this bound.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Tolerance used when matching likelihood values for quasi-symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// `-x log2 x` with the `0 log 0 = 0` convention.
#[inline]
pub(crate) fn neg_xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

/// Shannon entropy of a discrete distribution, in bits.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().map(|&x| neg_xlog2x(x)).sum()
}

fn check_probability_vector(what: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(SearchError::invalid(format!("{what} is empty")));
    }
    for (i, &x) in v.iter().enumerate() {
        if !(0.0..=1.0).contains(&x) {
            return Err(SearchError::invalid(format!(
                "{what}: entry {i} = {x} is outside [0, 1]"
            )));
        }
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOL {
        return Err(SearchError::invalid(format!(
            "{what} sums to {sum}, expected 1"
        )));
    }
    Ok(())
}

/// Row-stochastic likelihood table: `rows[k][y] = P(Y = y | Z = k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct DiscreteChannel {
    rows: Vec<Vec<f64>>,
}

impl DiscreteChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(SearchError::invalid(format!(
                "a channel needs at least 2 inputs, got {}",
                rows.len()
            )));
        }
        let width = rows[0].len();
        for (k, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(SearchError::invalid(format!(
                    "row {k} has {} outputs, row 0 has {width}",
                    row.len()
                )));
            }
            check_probability_vector(&format!("row {k}"), row)?;
        }
        Ok(DiscreteChannel { rows })
    }

    /// Boolean sensor: input 0 means the object is outside the queried
    /// region, input 1 inside.
    pub fn boolean(f0: Vec<f64>, f1: Vec<f64>) -> Result<Self> {
        Self::new(vec![f0, f1])
    }

    /// Binary symmetric channel with the given crossover probability.
    pub fn bsc(crossover: f64) -> Result<Self> {
        Self::boolean(
            vec![1.0 - crossover, crossover],
            vec![crossover, 1.0 - crossover],
        )
    }

    /// Binary asymmetric sensor with `P(Y=1 | Z=1) = alpha` and
    /// `P(Y=0 | Z=0) = rho`; outputs ordered `(y=0, y=1)`.
    pub fn binary_asymmetric(alpha: f64, rho: f64) -> Result<Self> {
        Self::boolean(vec![rho, 1.0 - rho], vec![1.0 - alpha, alpha])
    }

    pub fn num_inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.rows[k]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn likelihood(&self, k: usize, y: usize) -> f64 {
        self.rows[k][y]
    }

    /// Column `y`: the likelihood of observing `y` under each input.
    pub fn column(&self, y: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[y]).collect()
    }

    /// Distribution of the output when the input is drawn from `u`.
    pub fn output_marginal(&self, u: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.num_outputs()];
        for (row, &uk) in self.rows.iter().zip(u) {
            if uk == 0.0 {
                continue;
            }
            for (qy, &f) in q.iter_mut().zip(row) {
                *qy += uk * f;
            }
        }
        q
    }

    pub fn is_boolean(&self) -> bool {
        self.num_inputs() == 2
    }

    /// True when every row is the same distribution.
    pub fn is_degenerate(&self) -> bool {
        let first = &self.rows[0];
        self.rows[1..].iter().all(|r| {
            r.iter()
                .zip(first)
                .all(|(a, b)| (a - b).abs() <= SYMMETRY_TOL)
        })
    }
}

impl TryFrom<Vec<Vec<f64>>> for DiscreteChannel {
    type Error = SearchError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<DiscreteChannel> for Vec<Vec<f64>> {
    fn from(ch: DiscreteChannel) -> Self {
        ch.rows
    }
}

/// Probability vector over partition cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OperatingPoint(Vec<f64>);

impl OperatingPoint {
    pub fn new(cells: Vec<f64>) -> Result<Self> {
        for (i, &x) in cells.iter().enumerate() {
            if x.is_nan() || x < 0.0 {
                return Err(SearchError::invalid(format!(
                    "operating point entry {i} = {x} is negative"
                )));
            }
        }
        let sum: f64 = cells.iter().sum();
        if cells.is_empty() || (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(SearchError::invalid(format!(
                "operating point sums to {sum}, expected 1"
            )));
        }
        Ok(OperatingPoint(cells))
    }

    pub fn uniform(k: usize) -> Self {
        OperatingPoint(vec![1.0 / k as f64; k])
    }

    /// Boolean operating point `(1 - u, u)`, indexed by the indicator value.
    pub fn bernoulli(u: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&u) {
            return Err(SearchError::invalid(format!(
                "probability {u} outside [0, 1]"
            )));
        }
        Ok(OperatingPoint(vec![1.0 - u, u]))
    }

    pub(crate) fn from_raw(cells: Vec<f64>) -> Self {
        OperatingPoint(cells)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Expected entropy reduction `H(sum_k u_k f_k) - sum_k u_k H(f_k)`, in bits.
pub fn mutual_information(ch: &DiscreteChannel, u: &[f64]) -> Result<f64> {
    if u.len() != ch.num_inputs() {
        return Err(SearchError::invalid(format!(
            "operating point has {} cells, channel has {} inputs",
            u.len(),
            ch.num_inputs()
        )));
    }
    let marginal = ch.output_marginal(u);
    let conditional: f64 = ch
        .rows()
        .iter()
        .zip(u)
        .map(|(row, &uk)| uk * shannon_entropy(row))
        .sum();
    Ok((shannon_entropy(&marginal) - conditional).max(0.0))
}

/// Looks for an output permutation `chi` with `f1(y) = f0(chi(y))` and
/// `f0(y) = f1(chi(y))`. Returns `chi` as a lookup table (`chi[y]`).
///
/// Outputs can only be paired with outputs whose likelihood pair is the
/// swap of their own, so the search is a bipartite matching inside those
/// groups.
pub fn is_quasi_symmetric(ch: &DiscreteChannel) -> Result<Option<Vec<usize>>> {
    if !ch.is_boolean() {
        return Err(SearchError::invalid(format!(
            "quasi-symmetry is defined for Boolean sensors, channel has {} inputs",
            ch.num_inputs()
        )));
    }
    let n = ch.num_outputs();
    let (f0, f1) = (ch.row(0), ch.row(1));
    let close = |a: f64, b: f64| (a - b).abs() <= SYMMETRY_TOL;
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|y| {
            (0..n)
                .filter(|&z| close(f1[y], f0[z]) && close(f0[y], f1[z]))
                .collect()
        })
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }

    // Kuhn's augmenting paths; owner[z] is the y currently mapped onto z.
    fn augment(
        y: usize,
        candidates: &[Vec<usize>],
        seen: &mut [bool],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &z in &candidates[y] {
            if seen[z] {
                continue;
            }
            seen[z] = true;
            if owner[z].is_none_or(|other| augment(other, candidates, seen, owner)) {
                owner[z] = Some(y);
                return true;
            }
        }
        false
    }

    let mut owner: Vec<Option<usize>> = vec![None; n];
    for y in 0..n {
        let mut seen = vec![false; n];
        if !augment(y, &candidates, &mut seen, &mut owner) {
            return Ok(None);
        }
    }
    let mut chi = vec![0; n];
    for (z, y) in owner.into_iter().enumerate() {
        chi[y.expect("perfect matching")] = z;
    }
    Ok(Some(chi))
}

/// Closed-form capacity-achieving `P(Z = 1)` for the binary asymmetric
/// sensor with `P(Y=1 | Z=1) = alpha` and `P(Y=0 | Z=0) = rho`.
///
/// Returns `(u_star, k1)`.
pub fn asymmetric_binary_optimum(alpha: f64, rho: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0 && rho > 0.0 && rho < 1.0) {
        return Err(SearchError::invalid(format!(
            "alpha = {alpha} and rho = {rho} must both lie in (0, 1)"
        )));
    }
    let denom = alpha + rho - 1.0;
    if denom.abs() < 1e-12 {
        return Err(SearchError::invalid(
            "alpha + rho = 1 gives a zero-capacity sensor with no unique optimum",
        ));
    }
    let xlnx = |x: f64| x * x.ln() + (1.0 - x) * (1.0 - x).ln();
    let k1 = ((xlnx(alpha) - xlnx(rho)) / denom).exp();
    let u_star = (rho * (1.0 + k1) - 1.0) / (denom * (1.0 + k1));
    Ok((u_star, k1))
}

/// Membership bit of sensor `m` (0-based) in joint cell `k` of an
/// `num_sensors`-sensor partition.
#[inline]
pub fn dyadic_bit(k: usize, m: usize, num_sensors: usize) -> usize {
    (k >> (num_sensors - 1 - m)) & 1
}

/// Bit string of joint cell `k`, sensor 1 first.
pub fn dyadic_label(k: usize, num_sensors: usize) -> String {
    (0..num_sensors)
        .map(|m| {
            if dyadic_bit(k, m, num_sensors) == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Joint channel of independent Boolean sensors queried together.
pub fn product_channel(chs: &[DiscreteChannel]) -> Result<DiscreteChannel> {
    if chs.is_empty() {
        return Err(SearchError::invalid("product of an empty channel list"));
    }
    if let Some(i) = chs.iter().position(|c| !c.is_boolean()) {
        return Err(SearchError::invalid(format!(
            "channel {i} has {} inputs; joint sensing needs Boolean sensors",
            chs[i].num_inputs()
        )));
    }
    let m_count = chs.len();
    let outputs: Vec<usize> = chs.iter().map(|c| c.num_outputs()).collect();
    let total_out: usize = outputs.iter().product();
    let rows = (0..1usize << m_count)
        .map(|k| {
            (0..total_out)
                .map(|o| {
                    joint_output_digits(o, &outputs)
                        .iter()
                        .enumerate()
                        .map(|(m, &y)| chs[m].likelihood(dyadic_bit(k, m, m_count), y))
                        .product()
                })
                .collect()
        })
        .collect();
    Ok(DiscreteChannel { rows })
}

/// Splits a joint output index into per-sensor symbols, sensor 1 most
/// significant.
pub fn joint_output_digits(mut index: usize, radices: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; radices.len()];
    for m in (0..radices.len()).rev() {
        digits[m] = index % radices[m];
        index /= radices[m];
    }
    digits
}

/// Joint operating point formed by independent per-sensor Bernoulli
/// operating points.
pub fn factorized_joint_optimum(per_sensor: &[f64]) -> Result<OperatingPoint> {
    if per_sensor.is_empty() {
        return Err(SearchError::invalid("no sensors"));
    }
    if let Some(u) = per_sensor.iter().find(|u| !(0.0..=1.0).contains(*u)) {
        return Err(SearchError::invalid(format!(
            "probability {u} outside [0, 1]"
        )));
    }
    let m_count = per_sensor.len();
    let cells = (0..1usize << m_count)
        .map(|k| {
            per_sensor
                .iter()
                .enumerate()
                .map(|(m, &u)| {
                    if dyadic_bit(k, m, m_count) == 1 {
                        u
                    } else {
                        1.0 - u
                    }
                })
                .product()
        })
        .collect();
    Ok(OperatingPoint(cells))
}

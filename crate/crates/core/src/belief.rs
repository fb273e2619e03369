//! Exact piecewise-constant posterior over the unit interval.
//!
//! Bayes updates against sensing regions that are finite unions of
//! intervals multiply the density by a likelihood that is constant on each
//! region, so the posterior stays piecewise constant and every quantity
//! here (entropy, moments, quantiles) is computed in closed form.

use serde::{Deserialize, Serialize};

use crate::channel::DiscreteChannel;
use crate::channel::GaussianBooleanChannel;
use crate::error::{Result, SearchError};

/// Tolerance on total probability mass.
pub const MASS_TOL: f64 = 1e-10;
/// Adjacent pieces whose values agree to this relative precision are merged.
pub const COALESCE_TOL: f64 = 1e-14;
/// Cut points closer than this to an existing breakpoint snap onto it.
const SNAP_TOL: f64 = 1e-15;
/// Allowed disagreement between the normalizer computed piecewise and the
/// one computed from cell masses.
const DRIFT_TOL: f64 = 1e-9;

/// Half-open interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Self {
        Interval { start, end }
    }

    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, x: f64) -> bool {
        self.start <= x && x < self.end
    }
}

/// Finite union of disjoint half-open intervals, kept sorted and merged.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Region(Vec<Interval>);

impl Region {
    pub fn new(mut intervals: Vec<Interval>) -> Self {
        intervals.retain(|iv| !iv.is_empty());
        intervals.sort_by(|a, b| a.start.total_cmp(&b.start));
        let mut merged: Vec<Interval> = Vec::with_capacity(intervals.len());
        for iv in intervals {
            match merged.last_mut() {
                Some(last) if iv.start <= last.end => last.end = last.end.max(iv.end),
                _ => merged.push(iv),
            }
        }
        Region(merged)
    }

    pub fn empty() -> Self {
        Region(Vec::new())
    }

    pub fn interval(start: f64, end: f64) -> Self {
        Region::new(vec![Interval::new(start, end)])
    }

    pub fn unit() -> Self {
        Region::interval(0.0, 1.0)
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.0.iter().map(Interval::len).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.0.iter().any(|iv| iv.contains(x))
    }

    /// Complement inside `[0, 1)`.
    pub fn complement(&self) -> Region {
        let mut out = Vec::new();
        let mut cursor = 0.0;
        for iv in &self.0 {
            if iv.start > cursor {
                out.push(Interval::new(cursor, iv.start));
            }
            cursor = cursor.max(iv.end);
        }
        if cursor < 1.0 {
            out.push(Interval::new(cursor, 1.0));
        }
        Region::new(out)
    }

    pub fn union(&self, other: &Region) -> Region {
        Region::new(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &Region) -> Region {
        let mut out = Vec::new();
        for a in &self.0 {
            for b in &other.0 {
                let iv = Interval::new(a.start.max(b.start), a.end.min(b.end));
                if !iv.is_empty() {
                    out.push(iv);
                }
            }
        }
        Region::new(out)
    }
}

/// Ordered list of disjoint regions covering `[0, 1)`; cell `k` is the set
/// on which input `k` of the sensing channel is active.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    cells: Vec<Region>,
}

impl Partition {
    pub fn new(cells: Vec<Region>) -> Result<Self> {
        if cells.is_empty() {
            return Err(SearchError::invalid("partition has no cells"));
        }
        let mut flat: Vec<Interval> = cells.iter().flat_map(|c| c.0.iter().copied()).collect();
        flat.sort_by(|a, b| a.start.total_cmp(&b.start));
        if let (Some(first), Some(last)) = (flat.first(), flat.last()) {
            if first.start < 0.0 || last.end > 1.0 {
                return Err(SearchError::invalid("partition cells leave [0, 1]"));
            }
        }
        for pair in flat.windows(2) {
            if pair[1].start < pair[0].end - SNAP_TOL {
                return Err(SearchError::invalid(format!(
                    "partition cells overlap near {}",
                    pair[1].start
                )));
            }
        }
        let total: f64 = flat.iter().map(Interval::len).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(SearchError::invalid(format!(
                "partition cells cover measure {total}, expected 1"
            )));
        }
        Ok(Partition { cells })
    }

    /// Contiguous cells `[c_{k-1}, c_k)` for increasing cut points, with
    /// `c_{-1} = 0` and a final cut at 1.
    pub fn from_cuts(cuts: &[f64]) -> Result<Self> {
        let mut cells = Vec::with_capacity(cuts.len() + 1);
        let mut prev = 0.0;
        for &c in cuts.iter().chain(std::iter::once(&1.0)) {
            if c < prev {
                return Err(SearchError::invalid("cut points must be nondecreasing"));
            }
            cells.push(Region::interval(prev, c));
            prev = c;
        }
        Partition::new(cells)
    }

    /// Region and its complement, labeled `(0 = outside, 1 = inside)`.
    pub fn boolean(region: &Region) -> Self {
        Partition {
            cells: vec![region.complement(), region.clone()],
        }
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell(&self, k: usize) -> &Region {
        &self.cells[k]
    }

    pub fn cells(&self) -> &[Region] {
        &self.cells
    }

    /// Intervals of every cell tagged with the cell label, sorted by start.
    fn flat(&self) -> Vec<(Interval, usize)> {
        let mut flat: Vec<(Interval, usize)> = self
            .cells
            .iter()
            .enumerate()
            .flat_map(|(k, c)| c.0.iter().map(move |iv| (*iv, k)))
            .collect();
        flat.sort_by(|a, b| a.0.start.total_cmp(&b.0.start));
        flat
    }

    pub fn cell_of(&self, x: f64) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(x))
    }
}

#[derive(Deserialize)]
struct RawDensity {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawDensity> for PiecewiseDensity {
    type Error = SearchError;

    fn try_from(raw: RawDensity) -> Result<Self> {
        PiecewiseDensity::new(raw.breakpoints, raw.values)
    }
}

/// Probability density on `[0, 1]` that is constant between breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDensity")]
pub struct PiecewiseDensity {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseDensity {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(SearchError::invalid(format!(
                "{} breakpoints cannot bound {} pieces",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(SearchError::invalid(
                "breakpoints must start at 0 and end at 1",
            ));
        }
        if breakpoints
            .windows(2)
            .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater))
        {
            return Err(SearchError::invalid(
                "breakpoints must be strictly increasing",
            ));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(SearchError::invalid(format!(
                "density value {v} is not a finite nonnegative number"
            )));
        }
        let density = PiecewiseDensity {
            breakpoints,
            values,
        };
        let mass = density.total_mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(SearchError::invalid(format!(
                "density integrates to {mass}, expected 1"
            )));
        }
        Ok(density)
    }

    pub fn uniform() -> Self {
        PiecewiseDensity {
            breakpoints: vec![0.0, 1.0],
            values: vec![1.0],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_pieces(&self) -> usize {
        self.values.len()
    }

    /// `(start, end, value)` for every piece.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, &v)| (w[0], w[1], v))
    }

    fn total_mass(&self) -> f64 {
        self.pieces().map(|(a, b, v)| v * (b - a)).sum()
    }

    /// Density value at `x` (right-continuous; the last piece includes 1).
    pub fn value_at(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let j = self.breakpoints.partition_point(|&b| b <= x);
        self.values[j.saturating_sub(1).min(self.values.len() - 1)]
    }

    /// Differential entropy in bits; may be negative.
    pub fn entropy(&self) -> f64 {
        self.pieces()
            .filter(|&(_, _, v)| v > 0.0)
            .map(|(a, b, v)| -v * v.log2() * (b - a))
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.pieces()
            .map(|(a, b, v)| 0.5 * v * (b - a) * (a + b))
            .sum()
    }

    /// Variance, integrated piecewise around the mean.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.pieces()
            .map(|(a, b, v)| v * ((b - mu).powi(3) - (a - mu).powi(3)) / 3.0)
            .sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        let mut acc = 0.0;
        for (a, b, v) in self.pieces() {
            if x >= b {
                acc += v * (b - a);
            } else {
                acc += v * (x - a);
                break;
            }
        }
        acc.min(1.0)
    }

    /// Smallest `x` with `cdf(x) >= q`; `quantile(0) = 0`, `quantile(1) = 1`.
    pub fn quantile(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        if q >= 1.0 {
            return 1.0;
        }
        let mut acc = 0.0;
        let mut last_positive_end = 0.0;
        for (a, b, v) in self.pieces() {
            if v <= 0.0 {
                continue;
            }
            if acc >= q {
                return last_positive_end;
            }
            let mass = v * (b - a);
            if acc + mass >= q {
                return (a + (q - acc) / v).clamp(a, b);
            }
            acc += mass;
            last_positive_end = b;
        }
        last_positive_end
    }

    pub fn mass(&self, region: &Region) -> f64 {
        region
            .intervals()
            .iter()
            .map(|iv| self.cdf(iv.end) - self.cdf(iv.start))
            .sum()
    }

    /// Probability of each partition cell: the operating point the
    /// partition realizes under this density.
    pub fn cell_masses(&self, partition: &Partition) -> Vec<f64> {
        partition.cells().iter().map(|c| self.mass(c)).collect()
    }

    /// Splits pieces at every partition boundary and labels each resulting
    /// piece with the cell that contains it.
    fn refine(&self, partition: &Partition) -> (Vec<f64>, Vec<f64>, Vec<usize>) {
        let flat = partition.flat();
        let mut points: Vec<f64> = flat
            .iter()
            .flat_map(|(iv, _)| [iv.start, iv.end])
            .filter(|&p| p > 0.0 && p < 1.0)
            .collect();
        points.extend_from_slice(&self.breakpoints);
        points.sort_by(f64::total_cmp);
        let mut bps: Vec<f64> = Vec::with_capacity(points.len());
        for p in points {
            match bps.last() {
                Some(&last) if p - last <= SNAP_TOL => {}
                _ => bps.push(p),
            }
        }
        // the snap may have swallowed the final 1.0
        *bps.last_mut().unwrap() = 1.0;
        if bps.len() < 2 {
            bps = vec![0.0, 1.0];
        }

        let starts: Vec<f64> = flat.iter().map(|(iv, _)| iv.start).collect();
        let mut values = Vec::with_capacity(bps.len() - 1);
        let mut labels = Vec::with_capacity(bps.len() - 1);
        for w in bps.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            values.push(self.value_at(mid));
            let i = starts.partition_point(|&s| s <= mid).saturating_sub(1);
            let label = flat
                .get(i)
                .filter(|(iv, _)| iv.contains(mid))
                .map(|&(_, k)| k)
                .or_else(|| partition.cell_of(mid))
                .unwrap_or(0);
            labels.push(label);
        }
        (bps, values, labels)
    }

    /// Multiplies the density by `likelihoods[k]` on cell `k` and
    /// renormalizes. If the evidence has zero probability under the current
    /// density the density is returned unchanged.
    pub fn update_with_likelihoods(
        &self,
        partition: &Partition,
        likelihoods: &[f64],
    ) -> Result<Self> {
        if likelihoods.len() != partition.num_cells() {
            return Err(SearchError::invalid(format!(
                "{} likelihoods for {} cells",
                likelihoods.len(),
                partition.num_cells()
            )));
        }
        let (bps, mut values, labels) = self.refine(partition);
        for (v, &k) in values.iter_mut().zip(&labels) {
            *v *= likelihoods[k];
        }
        let eta: f64 = bps
            .windows(2)
            .zip(&values)
            .map(|(w, v)| v * (w[1] - w[0]))
            .sum();
        if eta.is_nan() || eta <= 0.0 {
            return Ok(self.clone());
        }
        if cfg!(debug_assertions) {
            let eta_cells: f64 = self
                .cell_masses(partition)
                .iter()
                .zip(likelihoods)
                .map(|(u, l)| u * l)
                .sum();
            assert!(
                (eta - eta_cells).abs() <= DRIFT_TOL * eta.max(eta_cells),
                "normalizer drift {eta} vs {eta_cells}"
            );
        }
        for v in values.iter_mut() {
            *v /= eta;
        }
        let mut out = PiecewiseDensity {
            breakpoints: bps,
            values,
        };
        out.coalesce();
        out.renormalize();
        Ok(out)
    }

    /// As [`update_with_likelihoods`](Self::update_with_likelihoods) with
    /// natural-log likelihoods, shifted by the largest value before
    /// exponentiation. `-inf` marks a zero likelihood.
    pub fn update_with_log_likelihoods(
        &self,
        partition: &Partition,
        ln_likelihoods: &[f64],
    ) -> Result<Self> {
        let masses = self.cell_masses(partition);
        let top = ln_likelihoods
            .iter()
            .zip(&masses)
            .filter(|&(_, &m)| m > 0.0)
            .map(|(&l, _)| l)
            .fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Ok(self.clone());
        }
        let weights: Vec<f64> = ln_likelihoods.iter().map(|l| (l - top).exp()).collect();
        self.update_with_likelihoods(partition, &weights)
    }

    /// Posterior after observing symbol `y` from `ch` queried with
    /// `partition` (cell `k` feeds input `k`).
    pub fn bayes_update(
        &self,
        partition: &Partition,
        ch: &DiscreteChannel,
        y: usize,
    ) -> Result<Self> {
        if partition.num_cells() != ch.num_inputs() {
            return Err(SearchError::invalid(format!(
                "partition has {} cells, channel has {} inputs",
                partition.num_cells(),
                ch.num_inputs()
            )));
        }
        if y >= ch.num_outputs() {
            return Err(SearchError::invalid(format!(
                "observation {y} out of range for {} outputs",
                ch.num_outputs()
            )));
        }
        self.update_with_likelihoods(partition, &ch.column(y))
    }

    /// Posterior after a Gaussian sensor querying `region` reports `y`.
    pub fn bayes_update_gaussian(
        &self,
        region: &Region,
        ch: &GaussianBooleanChannel,
        y: f64,
    ) -> Self {
        let partition = Partition::boolean(region);
        let ln = [ch.ln_density(0, y), ch.ln_density(1, y)];
        self.update_with_log_likelihoods(&partition, &ln)
            .expect("two likelihoods for a two-cell partition")
    }

    fn coalesce(&mut self) {
        let mut bps = Vec::with_capacity(self.breakpoints.len());
        let mut vals: Vec<f64> = Vec::with_capacity(self.values.len());
        bps.push(self.breakpoints[0]);
        for (a, b, v) in self.pieces() {
            if let Some(last) = vals.last_mut() {
                if (*last - v).abs() <= COALESCE_TOL * last.abs().max(v.abs()) {
                    let prev_start = bps[bps.len() - 2];
                    let start_len = a - prev_start;
                    *last = (*last * start_len + v * (b - a)) / (b - prev_start);
                    *bps.last_mut().unwrap() = b;
                    continue;
                }
            }
            vals.push(v);
            bps.push(b);
        }
        self.breakpoints = bps;
        self.values = vals;
    }

    fn renormalize(&mut self) {
        let mass = self.total_mass();
        if mass > 0.0 {
            for v in self.values.iter_mut() {
                *v /= mass;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_piece() -> PiecewiseDensity {
        PiecewiseDensity::new(vec![0.0, 0.5, 1.0], vec![1.6, 0.4]).unwrap()
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(PiecewiseDensity::uniform().entropy(), 0.0);
        let hand = -(0.8 * 1.6f64.log2() + 0.2 * 0.4f64.log2());
        assert_abs_diff_eq!(two_piece().entropy(), hand, epsilon = 1e-15);
        assert_abs_diff_eq!(two_piece().entropy(), -0.278072, epsilon = 5e-7);
        let half = PiecewiseDensity::new(vec![0.0, 0.5, 1.0], vec![2.0, 0.0]).unwrap();
        assert_eq!(half.entropy(), -1.0);
    }

    #[test]
    fn bsc_update_from_uniform() {
        let part = Partition::from_cuts(&[0.5]).unwrap();
        let ch = DiscreteChannel::bsc(0.2).unwrap();
        // cell 0 = [0, 0.5) is Z = 0; y = 0 favours it
        let post = PiecewiseDensity::uniform()
            .bayes_update(&part, &ch, 0)
            .unwrap();
        assert_eq!(post.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_abs_diff_eq!(post.values()[0], 1.6, epsilon = 1e-15);
        assert_abs_diff_eq!(post.values()[1], 0.4, epsilon = 1e-15);
    }

    #[test]
    fn noiseless_update_keeps_only_observed_cell() {
        let part = Partition::from_cuts(&[0.3]).unwrap();
        let ch = DiscreteChannel::boolean(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let post = PiecewiseDensity::uniform()
            .bayes_update(&part, &ch, 1)
            .unwrap();
        assert_eq!(post.value_at(0.1), 0.0);
        assert_abs_diff_eq!(post.value_at(0.5), 1.0 / 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(post.mass(&Region::interval(0.3, 1.0)), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn impossible_observation_leaves_density_unchanged() {
        let prior = PiecewiseDensity::new(vec![0.0, 0.5, 1.0], vec![2.0, 0.0]).unwrap();
        let part = Partition::from_cuts(&[0.5]).unwrap();
        // only cell 1 can emit y = 1, and it has no mass
        let ch = DiscreteChannel::boolean(vec![1.0, 0.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(prior.bayes_update(&part, &ch, 1).unwrap(), prior);
    }

    #[test]
    fn update_argument_checks() {
        let part = Partition::from_cuts(&[0.5]).unwrap();
        let ch = DiscreteChannel::bsc(0.2).unwrap();
        assert!(PiecewiseDensity::uniform()
            .bayes_update(&part, &ch, 2)
            .is_err());
        let part3 = Partition::from_cuts(&[0.2, 0.5]).unwrap();
        assert!(PiecewiseDensity::uniform()
            .bayes_update(&part3, &ch, 0)
            .is_err());
    }

    #[test]
    fn gaussian_update() {
        let ch = GaussianBooleanChannel::new(0.0, 1.0, 1.0).unwrap();
        let region = Region::interval(0.0, 0.5);
        let post = PiecewiseDensity::uniform().bayes_update_gaussian(&region, &ch, 10.0);
        // likelihood ratio e^{y - 1/2}
        let ratio = (10.0f64 - 0.5).exp();
        assert_abs_diff_eq!(post.mass(&region), ratio / (1.0 + ratio), epsilon = 1e-12);
        assert!(post.mass(&region) > 0.9999);

        let flat = PiecewiseDensity::uniform().bayes_update_gaussian(&region, &ch, 0.5);
        assert_eq!(flat, PiecewiseDensity::uniform());

        let same = GaussianBooleanChannel::new(0.2, 0.2, 1.0).unwrap();
        let prior = two_piece();
        let post = prior.bayes_update_gaussian(&Region::interval(0.1, 0.7), &same, -3.0);
        assert_eq!(post, prior);
    }

    #[test]
    fn extreme_gaussian_observation_does_not_underflow() {
        let ch = GaussianBooleanChannel::new(0.0, 1.0, 1.0).unwrap();
        let region = Region::interval(0.25, 0.75);
        let post = PiecewiseDensity::uniform().bayes_update_gaussian(&region, &ch, -1e3);
        assert!(post.values().iter().all(|v| v.is_finite()));
        assert_abs_diff_eq!(post.mass(&region.complement()), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(PiecewiseDensity::uniform().quantile(0.25), 0.25);
        let p = two_piece();
        assert_abs_diff_eq!(p.quantile(0.8), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.quantile(0.9), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(p.quantile(0.5), 0.3125, epsilon = 1e-15);
        assert_eq!(p.quantile(0.0), 0.0);
        assert_eq!(p.quantile(1.0), 1.0);
    }

    #[test]
    fn quantile_skips_zero_density_gaps() {
        let p = PiecewiseDensity::new(vec![0.0, 0.25, 0.75, 1.0], vec![2.0, 0.0, 2.0]).unwrap();
        assert_abs_diff_eq!(p.quantile(0.5), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(p.quantile(0.75), 0.875, epsilon = 1e-15);
    }

    #[test]
    fn moments() {
        let u = PiecewiseDensity::uniform();
        assert_abs_diff_eq!(u.mean(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(u.variance(), 1.0 / 12.0, epsilon = 1e-15);
        assert_abs_diff_eq!(two_piece().mean(), 0.35, epsilon = 1e-15);

        let w = 1e-6;
        let (a, b) = (0.3 - w / 2.0, 0.3 + w / 2.0);
        let spike =
            PiecewiseDensity::new(vec![0.0, a, b, 1.0], vec![0.0, 1.0 / (b - a), 0.0]).unwrap();
        assert_abs_diff_eq!(spike.mean(), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(spike.variance(), w * w / 12.0, epsilon = 1e-16);
    }

    #[test]
    fn density_validation() {
        assert!(PiecewiseDensity::new(vec![0.0, 1.0], vec![0.9]).is_err());
        assert!(PiecewiseDensity::new(vec![0.0, 0.5, 0.5, 1.0], vec![1.0, 1.0, 1.0]).is_err());
        assert!(PiecewiseDensity::new(vec![0.1, 1.0], vec![1.0 / 0.9]).is_err());
        assert!(PiecewiseDensity::new(vec![0.0, 0.5, 1.0], vec![2.5, -0.5]).is_err());
    }

    #[test]
    fn coalescing_merges_equal_neighbours() {
        let part = Partition::from_cuts(&[0.2, 0.4, 0.6]).unwrap();
        let ch = DiscreteChannel::new(vec![
            vec![0.5, 0.5],
            vec![0.5, 0.5],
            vec![0.9, 0.1],
            vec![0.9, 0.1],
        ])
        .unwrap();
        let post = PiecewiseDensity::uniform()
            .bayes_update(&part, &ch, 0)
            .unwrap();
        assert_eq!(post.breakpoints(), &[0.0, 0.4, 1.0]);
    }

    #[test]
    fn region_algebra() {
        let r = Region::new(vec![
            Interval::new(0.5, 0.75),
            Interval::new(0.0, 0.25),
            Interval::new(0.25, 0.3),
        ]);
        assert_eq!(r.intervals().len(), 2);
        assert_abs_diff_eq!(r.measure(), 0.55, epsilon = 1e-15);
        let c = r.complement();
        assert_eq!(
            c.intervals(),
            &[Interval::new(0.3, 0.5), Interval::new(0.75, 1.0)]
        );
        assert!(r.intersection(&c).is_empty());
        assert_abs_diff_eq!(r.union(&c).measure(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn partition_validation() {
        assert!(
            Partition::new(vec![Region::interval(0.0, 0.6), Region::interval(0.5, 1.0)]).is_err()
        );
        assert!(
            Partition::new(vec![Region::interval(0.0, 0.4), Region::interval(0.5, 1.0)]).is_err()
        );
        let p = Partition::new(vec![
            Region::new(vec![Interval::new(0.0, 0.2), Interval::new(0.7, 1.0)]),
            Region::interval(0.2, 0.7),
        ])
        .unwrap();
        assert_eq!(p.cell_of(0.8), Some(0));
        assert_eq!(p.cell_of(0.5), Some(1));
    }

    #[test]
    fn density_serde_round_trip_validates() {
        let raw = RawDensity {
            breakpoints: vec![0.0, 1.0],
            values: vec![2.0],
        };
        assert!(PiecewiseDensity::try_from(raw).is_err());
    }
}

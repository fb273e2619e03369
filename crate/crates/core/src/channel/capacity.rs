//! Blahut–Arimoto capacity solver.

use serde::{Deserialize, Serialize};

use super::{mutual_information, DiscreteChannel, OperatingPoint};
use crate::error::{Result, SearchError};

/// Largest exponent multiplier tried by the accelerated update.
const MAX_STEP: f64 = 1024.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityOptions {
    /// Upper minus lower capacity bound at which iteration stops (bits).
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        CapacityOptions {
            tol: 1e-10,
            max_iters: 100_000,
        }
    }
}

/// Capacity-achieving input distribution and the capacity itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub optimum: OperatingPoint,
    /// Mutual information at `optimum`, in bits.
    pub value: f64,
    pub iterations: usize,
    /// `max_k D(f_k || q) - sum_k u_k D(f_k || q)`; the true capacity lies
    /// in `[value, value + gap]`.
    pub gap: f64,
}

/// Per-input divergences `D(f_k || q)` in bits, where `q` is the output
/// marginal under `u`.
fn divergences(ch: &DiscreteChannel, u: &[f64]) -> Vec<f64> {
    let q = ch.output_marginal(u);
    ch.rows()
        .iter()
        .map(|row| {
            row.iter()
                .zip(&q)
                .filter(|(&f, _)| f > 0.0)
                .map(|(&f, &qy)| f * (f / qy).log2())
                .sum()
        })
        .collect()
}

/// `max_k D(f_k || q) - sum_k u_k D(f_k || q)` at input `u`. Zero exactly
/// at a capacity-achieving input.
pub fn duality_gap(ch: &DiscreteChannel, u: &[f64]) -> Result<f64> {
    if u.len() != ch.num_inputs() {
        return Err(SearchError::invalid(format!(
            "input distribution has {} entries, channel has {} inputs",
            u.len(),
            ch.num_inputs()
        )));
    }
    let d = divergences(ch, u);
    let lower: f64 = u.iter().zip(&d).map(|(a, b)| a * b).sum();
    let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((upper - lower).max(0.0))
}

/// Maximizes mutual information over the input simplex.
///
/// Blahut–Arimoto with an adaptive exponent: each iteration takes the
/// multiplicative update `u_k 2^{s D_k}` with the largest tried `s >= 1`
/// that beats the plain `s = 1` step, so no iteration does worse than the
/// classical algorithm. Starts from the uniform distribution, so every input keeps positive
/// weight. A channel with identical rows converges immediately and reports
/// the uniform distribution.
pub fn capacity(ch: &DiscreteChannel, opts: CapacityOptions) -> Result<CapacityResult> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(SearchError::invalid(format!(
            "capacity tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let k = ch.num_inputs();
    let mut u = vec![1.0 / k as f64; k];
    let mut iterations = 0;
    let mut step = 1.0_f64;
    loop {
        let d = divergences(ch, &u);
        let lower: f64 = u.iter().zip(&d).map(|(a, b)| a * b).sum();
        let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let gap = (upper - lower).max(0.0);
        if gap <= opts.tol || iterations >= opts.max_iters {
            let value = mutual_information(ch, &u)?;
            let result = CapacityResult {
                optimum: OperatingPoint::from_raw(u),
                value,
                iterations,
                gap,
            };
            if gap <= opts.tol {
                return Ok(result);
            }
            return Err(SearchError::ConvergenceFailure {
                message: format!(
                    "Blahut-Arimoto gap {gap:.3e} above tolerance {:.3e} after {iterations} iterations",
                    opts.tol
                ),
                best: Some(Box::new(result)),
            });
        }
        // u_k <- u_k 2^{s D_k} / Z. The plain update is s = 1; larger steps
        // are kept only while they beat it.
        let plain = reweight(&u, &d, upper, 1.0);
        let plain_value = mutual_information(ch, &plain)?;
        let mut next = None;
        for trial in [2.0 * step, step] {
            if trial <= 1.0 {
                break;
            }
            let candidate = reweight(&u, &d, upper, trial);
            if mutual_information(ch, &candidate)? > plain_value {
                next = Some((candidate, trial));
                break;
            }
        }
        (u, step) = next.unwrap_or((plain, 1.0));
        step = step.min(MAX_STEP);
        iterations += 1;
    }
}

fn reweight(u: &[f64], d: &[f64], upper: f64, step: f64) -> Vec<f64> {
    let mut next: Vec<f64> = u
        .iter()
        .zip(d)
        .map(|(uk, dk)| uk * (step * (dk - upper)).exp2())
        .collect();
    let norm: f64 = next.iter().sum();
    for x in next.iter_mut() {
        *x /= norm;
    }
    next
}

/// Capacity of a two-input channel by bisection on
/// `dI/du = D(f_1 || q) - D(f_0 || q)`, which decreases in `u = P(input 1)`.
/// Converges to machine precision even where Blahut–Arimoto crawls, as for
/// nearly useless sensors. Identical rows give `u = 1/2`.
pub fn binary_input_capacity(ch: &DiscreteChannel) -> Result<CapacityResult> {
    if ch.num_inputs() != 2 {
        return Err(SearchError::invalid(format!(
            "binary capacity needs 2 inputs, got {}",
            ch.num_inputs()
        )));
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut iterations = 0;
    if !ch.is_degenerate() {
        while hi - lo > f64::EPSILON && iterations < 200 {
            let mid = 0.5 * (lo + hi);
            let d = divergences(ch, &[1.0 - mid, mid]);
            if d[1] > d[0] {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
    }
    let u1 = 0.5 * (lo + hi);
    let u = vec![1.0 - u1, u1];
    let d = divergences(ch, &u);
    let lower = u[0] * d[0] + u[1] * d[1];
    let gap = (d[0].max(d[1]) - lower).max(0.0);
    Ok(CapacityResult {
        value: mutual_information(ch, &u)?,
        optimum: OperatingPoint::from_raw(u),
        iterations,
        gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{asymmetric_binary_optimum, is_quasi_symmetric, shannon_entropy};
    use approx::assert_abs_diff_eq;

    fn bsc_capacity(p: f64) -> f64 {
        1.0 - shannon_entropy(&[p, 1.0 - p])
    }

    #[test]
    fn bsc_capacities() {
        for p in [0.2, 0.05, 0.3] {
            let r = capacity(&DiscreteChannel::bsc(p).unwrap(), Default::default()).unwrap();
            assert_abs_diff_eq!(r.value, bsc_capacity(p), epsilon = 1e-12);
            assert_abs_diff_eq!(r.optimum.as_slice()[1], 0.5, epsilon = 1e-12);
        }
        let r = capacity(&DiscreteChannel::bsc(0.05).unwrap(), Default::default()).unwrap();
        assert_abs_diff_eq!(r.value, 0.713603, epsilon = 5e-7);
    }

    #[test]
    fn degenerate_channel_has_zero_capacity() {
        let ch = DiscreteChannel::boolean(vec![0.4, 0.6], vec![0.4, 0.6]).unwrap();
        let r = capacity(&ch, Default::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.optimum.as_slice(), &[0.5, 0.5]);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn asymmetric_channel_matches_closed_form() {
        for (a, r) in [(0.8, 0.9), (0.7, 0.6), (0.3, 0.9), (0.95, 0.55)] {
            let ch = DiscreteChannel::binary_asymmetric(a, r).unwrap();
            let res = capacity(
                &ch,
                CapacityOptions {
                    tol: 1e-14,
                    max_iters: 1_000_000,
                },
            )
            .unwrap();
            let (u, _) = asymmetric_binary_optimum(a, r).unwrap();
            assert_abs_diff_eq!(res.optimum.as_slice()[1], u, epsilon = 1e-6);
        }
    }

    #[test]
    fn ternary_symmetric_sensors_land_on_uniform() {
        let chs = [
            DiscreteChannel::boolean(vec![0.3, 0.5, 0.2], vec![0.2, 0.5, 0.3]).unwrap(),
            DiscreteChannel::boolean(vec![0.7, 0.2, 0.1], vec![0.2, 0.7, 0.1]).unwrap(),
            DiscreteChannel::boolean(vec![0.3, 0.1, 0.6], vec![0.3, 0.6, 0.1]).unwrap(),
        ];
        let expected = [0.014525, 0.212216, 0.285829];
        for (ch, want) in chs.iter().zip(expected) {
            assert!(is_quasi_symmetric(ch).unwrap().is_some());
            let r = capacity(ch, Default::default()).unwrap();
            assert_abs_diff_eq!(r.value, want, epsilon = 1e-6);
            assert_abs_diff_eq!(r.optimum.as_slice()[0], 0.5, epsilon = 1e-8);
        }
    }

    #[test]
    fn non_convergence_returns_best_iterate() {
        let ch = DiscreteChannel::binary_asymmetric(0.9, 0.6).unwrap();
        let err = capacity(
            &ch,
            CapacityOptions {
                tol: 1e-15,
                max_iters: 2,
            },
        )
        .unwrap_err();
        match err {
            SearchError::ConvergenceFailure {
                best: Some(best), ..
            } => {
                assert_eq!(best.iterations, 2);
                assert!(best.value > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        let ch = DiscreteChannel::bsc(0.1).unwrap();
        assert!(capacity(
            &ch,
            CapacityOptions {
                tol: 0.0,
                max_iters: 10
            }
        )
        .is_err());
    }

    #[test]
    fn binary_solver_matches_closed_form() {
        for (a, r) in [
            (0.8, 0.9),
            (0.7, 0.6),
            (0.3, 0.9),
            (0.95, 0.55),
            (0.51, 0.5),
        ] {
            let ch = DiscreteChannel::binary_asymmetric(a, r).unwrap();
            let res = binary_input_capacity(&ch).unwrap();
            let (u, _) = asymmetric_binary_optimum(a, r).unwrap();
            assert_abs_diff_eq!(res.optimum.as_slice()[1], u, epsilon = 1e-9);
            assert_abs_diff_eq!(
                res.value,
                mutual_information(&ch, &[1.0 - u, u]).unwrap(),
                epsilon = 1e-12
            );
            assert!(res.gap < 1e-12);
        }
        let dead = DiscreteChannel::boolean(vec![0.4, 0.6], vec![0.4, 0.6]).unwrap();
        assert_eq!(
            binary_input_capacity(&dead).unwrap().optimum.as_slice(),
            &[0.5, 0.5]
        );
    }

    #[test]
    fn binary_solver_handles_nearly_useless_sensor() {
        let ch = DiscreteChannel::boolean(vec![0.5, 0.3, 0.2], vec![0.497, 0.302, 0.201]).unwrap();
        assert!(capacity(
            &ch,
            CapacityOptions {
                tol: 1e-12,
                max_iters: 1000
            }
        )
        .is_err());
        let res = binary_input_capacity(&ch).unwrap();
        assert!(res.gap < 1e-12);
        assert!(res.value > 0.0);
    }
}

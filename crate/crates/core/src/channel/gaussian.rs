//! Boolean sensors with additive Gaussian noise: `Y = mean_Z + sigma * W`.

use std::f64::consts::{E, LN_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SearchError};

/// Agreement required between the `n`- and `2n`-point rules.
const QUAD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianBooleanChannel {
    pub mean0: f64,
    pub mean1: f64,
    pub sigma: f64,
}

impl GaussianBooleanChannel {
    pub fn new(mean0: f64, mean1: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) || !mean0.is_finite() || !mean1.is_finite() {
            return Err(SearchError::invalid(format!(
                "gaussian sensor needs finite means and sigma > 0 (got {mean0}, {mean1}, {sigma})"
            )));
        }
        Ok(GaussianBooleanChannel {
            mean0,
            mean1,
            sigma,
        })
    }

    pub fn mean(&self, z: usize) -> f64 {
        if z == 1 {
            self.mean1
        } else {
            self.mean0
        }
    }

    /// Natural log of the observation density given indicator `z`.
    pub fn ln_density(&self, z: usize, y: f64) -> f64 {
        let t = (y - self.mean(z)) / self.sigma;
        -0.5 * t * t - self.sigma.ln() - 0.5 * (2.0 * PI).ln()
    }

    pub fn sample<R: Rng + ?Sized>(&self, z: usize, rng: &mut R) -> f64 {
        let w: f64 = rng.sample(StandardNormal);
        self.mean(z) + self.sigma * w
    }

    /// Equal-variance Gaussians satisfy `f0(y) = f1(mean0 + mean1 - y)`, so
    /// the capacity-achieving input is always uniform.
    pub fn is_symmetric(&self) -> bool {
        true
    }

    /// Differential entropy of each conditional density, in bits.
    pub fn conditional_entropy(&self) -> f64 {
        0.5 * (2.0 * PI * E * self.sigma * self.sigma).log2()
    }
}

/// Number of eigenvalues of the Hermite Jacobi matrix below `x` (Sturm count).
fn eigenvalues_below(x: f64, n: usize) -> usize {
    let mut count = 0;
    let mut q = -x;
    for i in 0..n {
        if i > 0 {
            // off-diagonal b_i^2 = i / 2
            q = -x - (i as f64 / 2.0) / q;
        }
        if q == 0.0 {
            q = -f64::EPSILON;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Orthonormal Hermite recurrence at `z`; returns `(p_n(z), p_{n-1}(z))`.
fn hermite_pair(z: f64, n: usize) -> (f64, f64) {
    const PIM4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
    let (mut p1, mut p2) = (PIM4, 0.0);
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, p2)
}

/// Nodes and weights of the `n`-point Gauss–Hermite rule for the weight
/// `exp(-t^2)`, nodes in decreasing order.
///
/// Nodes are bracketed by Sturm-sequence bisection on the Jacobi matrix and
/// polished with Newton steps on the recurrence, which also yields the
/// weights.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let bound = 2.0 * ((n.max(2) - 1) as f64 / 2.0).sqrt() + 1.0;
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // i-th largest root has n - 1 - i roots below it
        let target = n - 1 - i;
        let mut lo = if n % 2 == 1 && i == n / 2 {
            -bound
        } else {
            0.0
        };
        let mut hi = bound;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if eigenvalues_below(mid, n) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut z = 0.5 * (lo + hi);
        let mut pp = 0.0;
        for _ in 0..3 {
            let (p1, p2) = hermite_pair(z, n);
            pp = (2.0 * nf).sqrt() * p2;
            z -= p1 / pp;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn mixture_entropy(ch: &GaussianBooleanChannel, u: f64, n: usize) -> f64 {
    let (t, w) = gauss_hermite(n);
    let weights = [1.0 - u, u];
    let ln_mix = |y: f64| {
        let terms: Vec<f64> = (0..2)
            .filter(|&z| weights[z] > 0.0)
            .map(|z| weights[z].ln() + ch.ln_density(z, y))
            .collect();
        let top = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        top + terms.iter().map(|a| (a - top).exp()).sum::<f64>().ln()
    };
    let scale = std::f64::consts::SQRT_2 * ch.sigma;
    let mut h = 0.0;
    for (z, &weight) in weights.iter().enumerate() {
        if weight == 0.0 {
            continue;
        }
        let expect: f64 = t
            .iter()
            .zip(&w)
            .map(|(&ti, &wi)| wi * ln_mix(ch.mean(z) + scale * ti))
            .sum::<f64>()
            / PI.sqrt();
        h -= weight * expect;
    }
    h / LN_2
}

/// `I(Z; Y)` in bits for `P(Z = 1) = u`, by Gauss–Hermite quadrature of the
/// output mixture entropy.
pub fn gaussian_boolean_mi(ch: &GaussianBooleanChannel, u: f64, quad_points: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(SearchError::invalid(format!(
            "probability {u} outside [0, 1]"
        )));
    }
    if quad_points < 32 {
        return Err(SearchError::invalid(format!(
            "at least 32 quadrature points required, got {quad_points}"
        )));
    }
    if ch.mean0 == ch.mean1 || u == 0.0 || u == 1.0 {
        return Ok(0.0);
    }
    let coarse = mixture_entropy(ch, u, quad_points);
    let fine = mixture_entropy(ch, u, 2 * quad_points);
    if (coarse - fine).abs() > QUAD_TOL {
        return Err(SearchError::ConvergenceFailure {
            message: format!(
                "Gauss-Hermite estimates with {quad_points} and {} points differ by {:.3e}",
                2 * quad_points,
                (coarse - fine).abs()
            ),
            best: None,
        });
    }
    Ok((coarse - ch.conditional_entropy()).max(0.0))
}

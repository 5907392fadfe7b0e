//! Finite-blocklength bounds and iid rate formulas.
//!
//! All rates are in base-K units per source symbol, K being the code
//! alphabet size of the cost function.

use libm::erfc;

use crate::cost_model::CostFunction;
use crate::error::{Error, Result};
use crate::numeric::log_base;
use crate::smooth_entropy::{block_h_delta, g_delta_exact, h_delta_exact, MethodHint};
use crate::source_model::{Distribution, IidSource};

/// Default slack added to `G` by the achievability bound.
pub const DEFAULT_GAMMA: f64 = 0.01;

fn check_block(dn: &Distribution, cf: &CostFunction, epsilon: f64, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("block length must be positive".into()));
    }
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} outside [0, 1)"
        )));
    }
    if dn.base() != cf.k() {
        return Err(Error::InvalidInput(format!(
            "distribution uses logarithm base {} but the code alphabet has K={}",
            dn.base(),
            cf.k()
        )));
    }
    Ok(())
}

/// `G_[eps](X^n) / (alpha n) + eps c_min / n`: no code with error `eps`
/// has a smaller average cost rate.
pub fn converse_bound(dn: &Distribution, cf: &CostFunction, epsilon: f64, n: usize) -> Result<f64> {
    check_block(dn, cf, epsilon, n)?;
    let g = g_delta_exact(dn, epsilon, MethodHint::Auto)?.value;
    Ok(converse_from_g(g, cf, epsilon, n))
}

fn converse_from_g(g: f64, cf: &CostFunction, epsilon: f64, n: usize) -> f64 {
    let nf = n as f64;
    g / (cf.alpha() * nf) + epsilon * cf.c_min() / nf
}

/// `G_[eps](X^n)/(alpha n) + (log_K 2 + gamma)/(alpha n) + (2 + eps) c_max / n`:
/// some code with error at most `eps` reaches this rate.
pub fn achievability_bound(
    dn: &Distribution,
    cf: &CostFunction,
    epsilon: f64,
    n: usize,
    gamma: f64,
) -> Result<f64> {
    check_block(dn, cf, epsilon, n)?;
    check_gamma(gamma)?;
    let g = g_delta_exact(dn, epsilon, MethodHint::Auto)?.value;
    Ok(achievability_from_g(g, cf, epsilon, n, gamma))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "gamma {gamma} must be positive"
        )))
    }
}

fn achievability_from_g(g: f64, cf: &CostFunction, epsilon: f64, n: usize, gamma: f64) -> f64 {
    let nf = n as f64;
    let a = cf.alpha();
    g / (a * nf) + (log_base(2.0, cf.k()) + gamma) / (a * nf) + (2.0 + epsilon) * cf.c_max() / nf
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub g_value: f64,
    pub h_value: f64,
    pub alpha: f64,
    pub converse: f64,
    pub achievability: f64,
    /// `(1 - eps) H / alpha` when an iid source is given.
    pub first_order: Option<f64>,
    pub second_order: Option<f64>,
}

/// Both bounds for a block distribution, plus the iid rates of `source`
/// when given.
pub fn bound_report(
    dn: &Distribution,
    cf: &CostFunction,
    epsilon: f64,
    n: usize,
    gamma: f64,
    source: Option<&IidSource>,
) -> Result<BoundReport> {
    check_block(dn, cf, epsilon, n)?;
    check_gamma(gamma)?;
    let g = g_delta_exact(dn, epsilon, MethodHint::Auto)?.value;
    let h = h_delta_exact(dn, epsilon, MethodHint::Auto)?.value;
    let (first_order, second_order) = match source {
        Some(s) => (
            Some(first_order_rate_iid(s, cf, epsilon)?),
            if epsilon > 0.0 {
                Some(second_order_rate_iid(s, cf, epsilon)?)
            } else {
                None
            },
        ),
        None => (None, None),
    };
    Ok(BoundReport {
        n,
        epsilon,
        gamma,
        g_value: g,
        h_value: h,
        alpha: cf.alpha(),
        converse: converse_from_g(g, cf, epsilon, n),
        achievability: achievability_from_g(g, cf, epsilon, n, gamma),
        first_order,
        second_order,
    })
}

fn check_source(s: &IidSource, cf: &CostFunction) -> Result<()> {
    if s.single_letter().base() != cf.k() {
        return Err(Error::InvalidInput(format!(
            "source uses logarithm base {} but the code alphabet has K={}",
            s.single_letter().base(),
            cf.k()
        )));
    }
    Ok(())
}

/// `(1 - eps) H(X) / alpha`.
pub fn first_order_rate_iid(s: &IidSource, cf: &CostFunction, epsilon: f64) -> Result<f64> {
    check_source(s, cf)?;
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} outside [0, 1)"
        )));
    }
    Ok((1.0 - epsilon) * s.entropy() / cf.alpha())
}

/// Upper tail of the standard normal distribution.
pub fn q_function(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

fn normal_density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Rational approximation of the standard normal quantile (relative error
/// about 1e-9), used as the Newton starting point.
fn normal_quantile_guess(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.38357751867269e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let low = 0.02425;
    if p < low {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - low {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// `z` with `Q(z) = eps`.
pub fn inverse_q(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} outside (0, 1)"
        )));
    }
    if epsilon == 0.5 {
        return Ok(0.0);
    }
    let mut z = -normal_quantile_guess(epsilon);
    for _ in 0..50 {
        let step = (q_function(z) - epsilon) / normal_density(z);
        if !step.is_finite() {
            break;
        }
        z += step;
        if step.abs() <= 1e-15 * z.abs().max(1.0) {
            break;
        }
    }
    if (q_function(z) - epsilon).abs() <= 1e-12 {
        return Ok(z);
    }
    // Q is decreasing; bisect on a bracket wide enough for any double above
    // the smallest positive normal.
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if q_function(mid) > epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `-(1/alpha) sqrt(V / 2 pi) exp(-Q^-1(eps)^2 / 2)`; exactly zero when the
/// varentropy is zero.
pub fn second_order_rate_iid(s: &IidSource, cf: &CostFunction, epsilon: f64) -> Result<f64> {
    check_source(s, cf)?;
    let z = inverse_q(epsilon)?;
    let v = s.varentropy();
    if v == 0.0 {
        return Ok(0.0);
    }
    Ok(-(v / (2.0 * std::f64::consts::PI)).sqrt() * (-0.5 * z * z).exp() / cf.alpha())
}

/// `(H_[eps](X^n) / alpha - n R) / sqrt(n)` for `n = 1..=n_max`, with
/// `R = (1 - eps) H / alpha`.
pub fn second_order_sequence(
    s: &IidSource,
    cf: &CostFunction,
    epsilon: f64,
    n_max: usize,
) -> Result<Vec<(usize, f64)>> {
    let r = first_order_rate_iid(s, cf, epsilon)?;
    (1..=n_max)
        .map(|n| {
            let h = block_h_delta(s, epsilon, n)?;
            let nf = n as f64;
            Ok((n, (h / cf.alpha() - nf * r) / nf.sqrt()))
        })
        .collect()
}

/// Closed-form iid rates for one source, cost function and error level.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub epsilon: f64,
    pub k: usize,
    pub alpha: f64,
    pub entropy: f64,
    pub varentropy: f64,
    pub first_order: f64,
    pub second_order: f64,
}

pub fn rate_report(s: &IidSource, cf: &CostFunction, epsilon: f64) -> Result<RateReport> {
    Ok(RateReport {
        epsilon,
        k: cf.k(),
        alpha: cf.alpha(),
        entropy: s.entropy(),
        varentropy: s.varentropy(),
        first_order: first_order_rate_iid(s, cf, epsilon)?,
        second_order: second_order_rate_iid(s, cf, epsilon)?,
    })
}

/// Differences of the capacity-scaled rates of two reports.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationCheck {
    pub first_order_diff: f64,
    pub second_order_diff: f64,
    pub holds: bool,
}

/// Tolerance on both scaled differences.
pub const RELATION_TOL: f64 = 1e-9;

/// `alpha R` and `alpha L` must not depend on the cost function.
pub fn cost_rate_relation_check(a: &RateReport, b: &RateReport) -> Result<RelationCheck> {
    if a.k != b.k {
        return Err(Error::Mismatch(format!(
            "cost functions over K={} and K={}",
            a.k, b.k
        )));
    }
    if a.epsilon != b.epsilon {
        return Err(Error::Mismatch(format!(
            "error levels {} and {}",
            a.epsilon, b.epsilon
        )));
    }
    if a.entropy != b.entropy || a.varentropy != b.varentropy {
        return Err(Error::Mismatch("reports describe different sources".into()));
    }
    let first_order_diff = a.alpha * a.first_order - b.alpha * b.first_order;
    let second_order_diff = a.alpha * a.second_order - b.alpha * b.second_order;
    Ok(RelationCheck {
        holds: first_order_diff.abs() <= RELATION_TOL && second_order_diff.abs() <= RELATION_TOL,
        first_order_diff,
        second_order_diff,
    })
}

//! Bounds a regulator can compute without knowing the platform's exact user
//! share: auxiliary share sequences, welfare sandwiches over a training
//! window, and verdicts on whether a scheme helps users.
//!
//! Offsets are counted from a training round `tau`: offset 0 is the training
//! round itself (gap 0) and offset `t` has gap `t`.

use crate::dynamics::step;
use crate::error::{EligibilityReason, Error, Result};
use crate::model::Instance;

/// Upper limit on `beta * L` for the contraction results.
pub const BETA_L_LIMIT: f64 = 16.0 / 7.0;

/// Largest estimate radius for which the share contraction is proven:
/// `(16 - 7 bL) / (14 bL e^{bL})`.
fn radius_threshold(bl: f64) -> f64 {
    (16.0 - 7.0 * bl) / (14.0 * bl * bl.exp())
}

/// `beta * L` for an instance that satisfies the contraction preconditions
/// other than the radius.
fn eligible_beta_l(instance: &Instance) -> Result<f64> {
    let Some(beta) = instance.sensitivity().finite() else {
        return Err(Error::Eligibility {
            reason: EligibilityReason::BetaLTooLarge,
            detail: "users with infinite sensitivity do not contract".into(),
        });
    };
    let bl = beta * instance.lipschitz_constant();
    if bl >= BETA_L_LIMIT {
        return Err(Error::Eligibility {
            reason: EligibilityReason::BetaLTooLarge,
            detail: format!("beta * L = {bl} is not below 16/7"),
        });
    }
    if !instance.network().vanishes_at_one() {
        return Err(Error::Eligibility {
            reason: EligibilityReason::NotLipschitzZeroAtOne,
            detail: format!("R^s(1) = {} is not zero", instance.rs(1.0)),
        });
    }
    Ok(bl)
}

/// Per-round factor by which the distance between two share trajectories
/// that start less than `eps` apart shrinks.
pub fn contraction_factor(instance: &Instance, eps: f64) -> Result<f64> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::Parameter(format!(
            "radius must be non-negative, got {eps}"
        )));
    }
    let bl = eligible_beta_l(instance)?;
    if bl == 0.0 {
        return Ok(0.0);
    }
    let threshold = radius_threshold(bl);
    if eps >= threshold {
        return Err(Error::Eligibility {
            reason: EligibilityReason::EpsTooLarge,
            detail: format!("radius {eps} is not below {threshold}"),
        });
    }
    let delta = threshold - eps;
    Ok(1.0 / (1.0 + 2.0 * bl.exp() * delta))
}

/// `q_0 = alpha`, `q_t = share(R^c(t-1), R^s(q_{t-1}))`: the share `t`
/// rounds after a training round whose share was `alpha`.
pub fn aux_sequence(instance: &Instance, alpha: f64, len: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Range(format!("seed {alpha} is outside [0,1]")));
    }
    if len == 0 {
        return Err(Error::Parameter(
            "sequence length must be at least 1".into(),
        ));
    }
    let mut out = Vec::with_capacity(len);
    out.push(alpha);
    for t in 1..len {
        out.push(step(instance, out[t - 1], t - 1));
    }
    Ok(out)
}

/// How a [`WelfareBounds`] was seeded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundMode {
    /// Seeds 0 and 1: valid for any share.
    Crude,
    /// Seeds `p_hat -+ eps`, clamped to `[0,1]`.
    Noisy { p_hat: f64, eps: f64 },
}

/// Lower and upper bounds on share and welfare at each offset of a window.
#[derive(Debug, Clone, PartialEq)]
pub struct WelfareBounds {
    pub delta: usize,
    pub mode: BoundMode,
    pub q_lo: Vec<f64>,
    pub q_hi: Vec<f64>,
    pub u_lo: Vec<f64>,
    pub u_hi: Vec<f64>,
    /// For noisy bounds: whether the radius is small enough for the
    /// per-offset closeness guarantee. Always true for crude bounds.
    pub guarantee: bool,
}

impl WelfareBounds {
    pub fn sum_lo(&self) -> f64 {
        self.u_lo.iter().sum()
    }

    pub fn sum_hi(&self) -> f64 {
        self.u_hi.iter().sum()
    }

    /// `delta * R^s(0)`: what users would get from the forum alone.
    pub fn forum_only(&self, instance: &Instance) -> f64 {
        self.delta as f64 * instance.rs(0.0)
    }
}

fn sandwich(
    instance: &Instance,
    lo_seed: f64,
    hi_seed: f64,
    delta: usize,
    mode: BoundMode,
    guarantee: bool,
) -> Result<WelfareBounds> {
    if delta == 0 {
        return Err(Error::Parameter("window length must be at least 1".into()));
    }
    let q_lo = aux_sequence(instance, lo_seed, delta)?;
    let q_hi = aux_sequence(instance, hi_seed, delta)?;
    let mut u_lo = Vec::with_capacity(delta);
    let mut u_hi = Vec::with_capacity(delta);
    for t in 0..delta {
        let rc = instance.rc(t);
        u_lo.push(q_lo[t] * rc + (1.0 - q_hi[t]) * instance.rs(q_hi[t]));
        u_hi.push(q_hi[t] * rc + (1.0 - q_lo[t]) * instance.rs(q_lo[t]));
    }
    Ok(WelfareBounds {
        delta,
        mode,
        q_lo,
        q_hi,
        u_lo,
        u_hi,
        guarantee,
    })
}

pub fn crude_welfare_bounds(instance: &Instance, delta: usize) -> Result<WelfareBounds> {
    sandwich(instance, 0.0, 1.0, delta, BoundMode::Crude, true)
}

/// If the lower welfare bound over every window of length `delta` beats the
/// forum-only welfare, schemes whose windows all have that length help users.
pub fn check_sufficient(instance: &Instance, delta: usize) -> Result<bool> {
    let b = crude_welfare_bounds(instance, delta)?;
    Ok(b.sum_lo() >= b.forum_only(instance))
}

/// Fails when even the upper welfare bound over a window of length `delta`
/// falls short of the forum-only welfare.
pub fn check_necessary(instance: &Instance, delta: usize) -> Result<bool> {
    let b = crude_welfare_bounds(instance, delta)?;
    Ok(b.sum_hi() >= b.forum_only(instance))
}

fn check_noisy_inputs(instance: &Instance, p_hat: f64, eps: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&p_hat) {
        return Err(Error::Range(format!(
            "share estimate {p_hat} is outside [0,1]"
        )));
    }
    contraction_factor(instance, eps)?;
    Ok(contraction_factor(instance, 2.0 * eps).is_ok())
}

/// Bounds seeded from an estimate `p_hat` of the training-round share known
/// to within `eps`.
pub fn noisy_welfare_bounds(
    instance: &Instance,
    p_hat: f64,
    eps: f64,
    delta: usize,
) -> Result<WelfareBounds> {
    let guarantee = check_noisy_inputs(instance, p_hat, eps)?;
    let lo = (p_hat - eps).clamp(0.0, 1.0);
    let hi = (p_hat + eps).clamp(0.0, 1.0);
    sandwich(
        instance,
        lo,
        hi,
        delta,
        BoundMode::Noisy { p_hat, eps },
        guarantee,
    )
}

/// Provable upper limit on `sum u_hi - sum u_lo` for noisy bounds:
/// `4 eps sum_{t < delta} gamma^t (R^c(t) + 2L)`.
pub fn bound_gap(instance: &Instance, eps: f64, delta: usize) -> Result<f64> {
    if delta == 0 {
        return Err(Error::Parameter("window length must be at least 1".into()));
    }
    let gamma = contraction_factor(instance, 2.0 * eps)?;
    let l = instance.lipschitz_constant();
    let sum: f64 = (0..delta)
        .map(|t| gamma.powi(t as i32) * (instance.rc(t) + 2.0 * l))
        .sum();
    Ok(4.0 * eps * sum)
}

pub fn check_sufficient_noisy(
    instance: &Instance,
    p_hat: f64,
    eps: f64,
    delta: usize,
) -> Result<bool> {
    let b = noisy_welfare_bounds(instance, p_hat, eps, delta)?;
    Ok(b.sum_lo() >= b.forum_only(instance))
}

pub fn check_necessary_noisy(
    instance: &Instance,
    p_hat: f64,
    eps: f64,
    delta: usize,
) -> Result<bool> {
    let b = noisy_welfare_bounds(instance, p_hat, eps, delta)?;
    Ok(b.sum_hi() >= b.forum_only(instance))
}

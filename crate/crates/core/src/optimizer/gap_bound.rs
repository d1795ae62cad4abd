use crate::cyclic::{alternating_scheme, cyclic_scheme};
use crate::dynamics::{simulate, softmax_share, step};
use crate::error::Result;
use crate::model::{Instance, Sensitivity, TrainingScheme};

/// Search limits for [`training_gap_bound_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GapBoundOptions {
    /// Rounds simulated while looking for the no-training revenue to turn
    /// negative for good.
    pub probe_rounds: usize,
    /// Extra horizons beyond `T_0` tried when looking for a break-even scheme
    /// from a zero starting share.
    pub witness_rounds: usize,
}

impl Default for GapBoundOptions {
    fn default() -> Self {
        GapBoundOptions {
            probe_rounds: 10_000,
            witness_rounds: 200,
        }
    }
}

/// Evidence that revenue-optimal schemes never leave more than `t0` rounds
/// between trainings.
#[derive(Debug, Clone, PartialEq)]
pub struct GapCertificate {
    /// Smallest horizon from which the cumulative revenue of never
    /// retraining, started at share 1, is negative for every longer horizon.
    pub t0: usize,
    /// First round after which the no-training share strictly decreases.
    pub decreasing_from: usize,
    /// Largest fixed point of the share map at the limiting GenAI utility;
    /// it lies below `c_m / r`.
    pub limit_proportion: f64,
    /// Horizon at which `witness` breaks even from a zero starting share.
    pub witness_horizon: usize,
    /// A scheme with non-negative total revenue from a zero starting share.
    pub witness: TrainingScheme,
    /// `sum v_t` of the witness.
    pub witness_revenue_sum: f64,
}

/// Largest solution of `p = share(inf R^c, R^s(p))` on `[0, 1]`.
pub(crate) fn limit_fixed_point(instance: &Instance) -> f64 {
    let floor_utility = instance.decay().infimum();
    let map = |p: f64| softmax_share(instance.sensitivity(), floor_utility, instance.rs(p));
    if let Sensitivity::Infinite = instance.sensitivity() {
        return [1.0, 0.5, 0.0]
            .into_iter()
            .find(|&c| map(c) == c)
            .unwrap_or(0.0);
    }
    // g(p) = map(p) - p is <= 0 at 1; walk down to the first sign change.
    let g = |p: f64| map(p) - p;
    if g(1.0) >= 0.0 {
        return 1.0;
    }
    let steps = 10_000;
    let mut hi = 1.0;
    for i in (0..steps).rev() {
        let lo = i as f64 / steps as f64;
        if g(lo) >= 0.0 {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if g(mid) >= 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return 0.5 * (a + b);
        }
        hi = lo;
    }
    0.0
}

pub fn training_gap_bound(instance: &Instance) -> Result<Option<GapCertificate>> {
    training_gap_bound_with(instance, GapBoundOptions::default())
}

/// Two-part certificate. First, never retraining from the most favourable
/// start (share 1) must eventually lose money for good; the horizon where
/// that happens is `T_0`. Second, some periodic scheme with period at most
/// `T_0` must break even when started from share 0, so an optimal platform
/// always prefers retraining to waiting longer than `T_0`.
pub fn training_gap_bound_with(
    instance: &Instance,
    opts: GapBoundOptions,
) -> Result<Option<GapCertificate>> {
    let r = instance.reward();
    let c_m = instance.maintenance_cost();
    let limit = limit_fixed_point(instance);
    if r == 0.0 || limit * r >= c_m {
        return Ok(None);
    }

    // (a) worst-start no-training revenue
    let mut p = 1.0;
    let mut cum = 0.0;
    let mut last_non_negative = 0usize;
    let mut decreasing_from = None;
    let mut losing_from = None;
    let mut t0 = None;
    for t in 1..=opts.probe_rounds {
        let v = p * r
            - c_m
            - if t == 1 {
                instance.training_cost()
            } else {
                0.0
            };
        cum += v;
        if cum >= 0.0 {
            last_non_negative = t;
        }
        let next = step(instance, p, t - 1);
        if decreasing_from.is_none() && next <= p {
            decreasing_from = Some(t);
        }
        if decreasing_from.is_some() && losing_from.is_none() && p * r - c_m < 0.0 {
            // shares only fall from here, so every later round loses money
            losing_from = Some(t);
        }
        if losing_from.is_some() && cum < 0.0 {
            t0 = Some(last_non_negative + 1);
            break;
        }
        p = next;
    }
    let (Some(t0), Some(decreasing_from)) = (t0, decreasing_from) else {
        return Ok(None);
    };

    // (b) a break-even periodic scheme from share 0
    let zero_start = instance.with_initial_proportion(0.0)?;
    for horizon in t0..=t0 + opts.witness_rounds {
        let inst = zero_start.with_horizon(horizon)?;
        let mut candidates = Vec::new();
        for k in 1..=t0 {
            candidates.push(cyclic_scheme(k, horizon)?);
        }
        for a1 in 1..=t0 {
            for a2 in 1..=t0 {
                if a1 != a2 {
                    candidates.push(alternating_scheme(a1, a2, horizon)?);
                }
            }
        }
        for scheme in candidates {
            let traj = simulate(&inst, &scheme)?;
            let total: f64 = traj.v.iter().sum();
            if total >= 0.0 {
                return Ok(Some(GapCertificate {
                    t0,
                    decreasing_from,
                    limit_proportion: limit,
                    witness_horizon: horizon,
                    witness: scheme,
                    witness_revenue_sum: total,
                }));
            }
        }
    }
    Ok(None)
}

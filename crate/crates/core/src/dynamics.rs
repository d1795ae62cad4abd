//! Round-by-round simulation of the user split between the two platforms.

use crate::error::{Error, Result};
use crate::model::{Instance, Sensitivity, TrainingScheme};

/// Full per-round record of a simulated run. Arrays are indexed by
/// `round - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub p: Vec<f64>,
    pub gamma: Vec<usize>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Cumulative welfare `sum u_t`.
    pub welfare: f64,
    /// Average revenue `(1/T) sum v_t`.
    pub revenue: f64,
    /// Welfare of a world without the GenAI platform, `T * R^s(0)`.
    pub counterfactual: f64,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.p.len()
    }

    /// Running sums of `u`.
    pub fn cumulative_welfare(&self) -> Vec<f64> {
        running_sum(&self.u)
    }

    /// Running sums of `v`, unnormalised.
    pub fn cumulative_revenue(&self) -> Vec<f64> {
        running_sum(&self.v)
    }
}

fn running_sum(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Share of users choosing GenAI next round, given the current share `p` and
/// the gap of the current round.
pub fn transition(instance: &Instance, p: f64, gap: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Range(format!("proportion {p} is outside [0,1]")));
    }
    Ok(step(instance, p, gap))
}

/// [`transition`] without the range check.
#[inline]
pub(crate) fn step(instance: &Instance, p: f64, gap: usize) -> f64 {
    softmax_share(instance.sensitivity(), instance.rc(gap), instance.rs(p))
}

/// `e^{b*genai} / (e^{b*genai} + e^{b*forum})`, written as a logistic in the
/// utility difference so large sensitivities cannot overflow.
#[inline]
pub(crate) fn softmax_share(sensitivity: Sensitivity, genai: f64, forum: f64) -> f64 {
    match sensitivity {
        Sensitivity::Finite(beta) => {
            if beta == 0.0 {
                0.5
            } else {
                1.0 / (1.0 + (beta * (forum - genai)).exp())
            }
        }
        Sensitivity::Infinite => {
            if genai > forum {
                1.0
            } else if genai < forum {
                0.0
            } else {
                0.5
            }
        }
    }
}

pub fn simulate(instance: &Instance, scheme: &TrainingScheme) -> Result<Trajectory> {
    let horizon = instance.horizon();
    if scheme.horizon() != horizon {
        return Err(Error::Shape(format!(
            "scheme has {} rounds but the instance horizon is {horizon}",
            scheme.horizon()
        )));
    }
    let gamma = scheme.gaps();
    let r = instance.reward();
    let c_m = instance.maintenance_cost();
    let c_train = instance.training_cost();

    let mut p = Vec::with_capacity(horizon);
    let mut u = Vec::with_capacity(horizon);
    let mut v = Vec::with_capacity(horizon);
    let mut share = instance.initial_proportion();
    for (i, &g) in gamma.iter().enumerate() {
        p.push(share);
        u.push(share * instance.rc(g) + (1.0 - share) * instance.rs(share));
        let train = if scheme.bits()[i] { c_train } else { 0.0 };
        v.push(share * r - c_m - train);
        share = step(instance, share, g);
    }
    let welfare = u.iter().sum();
    let revenue = v.iter().sum::<f64>() / horizon as f64;
    Ok(Trajectory {
        p,
        gamma,
        u,
        v,
        welfare,
        revenue,
        counterfactual: counterfactual_welfare(instance),
    })
}

pub fn counterfactual_welfare(instance: &Instance) -> f64 {
    instance.horizon() as f64 * instance.rs(0.0)
}

pub fn is_socially_beneficial(instance: &Instance, scheme: &TrainingScheme) -> Result<bool> {
    let traj = simulate(instance, scheme)?;
    Ok(traj.welfare >= traj.counterfactual)
}

/// Welfare accumulated over rounds `t..=t2` (1-indexed, inclusive).
pub fn welfare_between(
    instance: &Instance,
    scheme: &TrainingScheme,
    t: usize,
    t2: usize,
) -> Result<f64> {
    if t == 0 || t > t2 || t2 > instance.horizon() {
        return Err(Error::Range(format!(
            "round range {t}..={t2} is not within 1..={}",
            instance.horizon()
        )));
    }
    let traj = simulate(instance, scheme)?;
    Ok(traj.u[t - 1..t2].iter().sum())
}

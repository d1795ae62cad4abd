//! Domain types: utility functions, user sensitivity, problem instances and
//! training schemes.
//!
//! Rounds are 1-indexed throughout the public API: round `1` is the first
//! round and always a training round.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Rounds probed when checking that the decaying utility eventually drops
/// below the forum's best utility.
pub const MIN_PROBE_HORIZON: usize = 10_000;

/// Tolerance for treating `R^s(1)` as zero.
pub const ZERO_AT_ONE_TOL: f64 = 1e-12;

/// Utility of the GenAI platform as a function of rounds since its last
/// training (`R^c`). Non-increasing and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub enum DecayUtility {
    /// `a * b^t + c` with `a > 0`, `0 < b < 1`, `c >= 0`.
    ExpDecay { a: f64, b: f64, c: f64 },
    /// `values[t]` for `t < values.len()`, `tail` afterwards.
    Tabulated { values: Vec<f64>, tail: f64 },
}

impl DecayUtility {
    pub fn exp_decay(a: f64, b: f64, c: f64) -> Result<Self> {
        let u = DecayUtility::ExpDecay { a, b, c };
        u.validate()?;
        Ok(u)
    }

    pub fn tabulated(values: Vec<f64>, tail: f64) -> Result<Self> {
        let u = DecayUtility::Tabulated { values, tail };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DecayUtility::ExpDecay { a, b, c } => {
                if !(a.is_finite() && *a > 0.0) {
                    return Err(Error::InvalidInstance(format!(
                        "exp_decay: a must be positive, got {a}"
                    )));
                }
                if !(b.is_finite() && *b > 0.0 && *b < 1.0) {
                    return Err(Error::InvalidInstance(format!(
                        "exp_decay: b must lie in (0,1), got {b}"
                    )));
                }
                if !(c.is_finite() && *c >= 0.0) {
                    return Err(Error::InvalidInstance(format!(
                        "exp_decay: c must be non-negative, got {c}"
                    )));
                }
            }
            DecayUtility::Tabulated { values, tail } => {
                if values.is_empty() {
                    return Err(Error::InvalidInstance(
                        "tabulated decay utility needs at least one value".into(),
                    ));
                }
                if values
                    .iter()
                    .chain(std::iter::once(tail))
                    .any(|v| !v.is_finite() || *v < 0.0)
                {
                    return Err(Error::InvalidInstance(
                        "tabulated decay utility values must be finite and non-negative".into(),
                    ));
                }
                if values.windows(2).any(|w| w[1] > w[0]) {
                    return Err(Error::InvalidInstance(
                        "tabulated decay utility must be non-increasing".into(),
                    ));
                }
                if *tail > *values.last().unwrap() {
                    return Err(Error::InvalidInstance(
                        "tabulated decay utility tail exceeds the last value".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `R^c(t)`.
    pub fn eval(&self, t: usize) -> f64 {
        match self {
            DecayUtility::ExpDecay { a, b, c } => {
                let exp = i32::try_from(t).unwrap_or(i32::MAX);
                a * b.powi(exp) + c
            }
            DecayUtility::Tabulated { values, tail } => values.get(t).copied().unwrap_or(*tail),
        }
    }

    /// `inf_t R^c(t)`, exact for the supported families.
    pub fn infimum(&self) -> f64 {
        match self {
            DecayUtility::ExpDecay { c, .. } => *c,
            DecayUtility::Tabulated { tail, .. } => *tail,
        }
    }
}

/// Utility of the forum as a function of the GenAI user proportion (`R^s`).
/// Non-increasing on `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum NetworkUtility {
    /// `u0 - s * p`.
    Linear {
        u0: f64,
        s: f64,
        allow_negative: bool,
    },
    /// `1 / (1 + exp(-k (m - p)))`.
    Logistic { k: f64, m: f64 },
    /// Piecewise-linear interpolation through `(p, value)` points covering
    /// `[0,1]`.
    Tabulated { points: Vec<(f64, f64)> },
}

impl NetworkUtility {
    pub fn linear(u0: f64, s: f64) -> Result<Self> {
        let u = NetworkUtility::Linear {
            u0,
            s,
            allow_negative: false,
        };
        u.validate()?;
        Ok(u)
    }

    pub fn linear_allow_negative(u0: f64, s: f64) -> Result<Self> {
        let u = NetworkUtility::Linear {
            u0,
            s,
            allow_negative: true,
        };
        u.validate()?;
        Ok(u)
    }

    pub fn logistic(k: f64, m: f64) -> Result<Self> {
        let u = NetworkUtility::Logistic { k, m };
        u.validate()?;
        Ok(u)
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        let u = NetworkUtility::Tabulated { points };
        u.validate()?;
        Ok(u)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            NetworkUtility::Linear {
                u0,
                s,
                allow_negative,
            } => {
                if !u0.is_finite() || !(s.is_finite() && *s > 0.0) {
                    return Err(Error::InvalidInstance(format!(
                        "linear: need finite u0 and s > 0, got u0={u0}, s={s}"
                    )));
                }
                if !allow_negative && (*u0 < *s || *u0 < 0.0) {
                    return Err(Error::InvalidInstance(format!(
                        "linear: R^s(1) = {} is negative; set allow_negative to permit it",
                        u0 - s
                    )));
                }
            }
            NetworkUtility::Logistic { k, m } => {
                if !(k.is_finite() && *k > 0.0) {
                    return Err(Error::InvalidInstance(format!(
                        "logistic: slope k must be positive, got {k}"
                    )));
                }
                if !(0.0..=1.0).contains(m) {
                    return Err(Error::InvalidInstance(format!(
                        "logistic: midpoint m must lie in [0,1], got {m}"
                    )));
                }
            }
            NetworkUtility::Tabulated { points } => {
                if points.len() < 2 {
                    return Err(Error::InvalidInstance(
                        "tabulated network utility needs at least two points".into(),
                    ));
                }
                if points
                    .iter()
                    .any(|(p, v)| !p.is_finite() || !v.is_finite() || *v < 0.0)
                {
                    return Err(Error::InvalidInstance(
                        "tabulated network utility values must be finite and non-negative".into(),
                    ));
                }
                if points[0].0 != 0.0 || points[points.len() - 1].0 != 1.0 {
                    return Err(Error::InvalidInstance(
                        "tabulated network utility grid must start at p=0 and end at p=1".into(),
                    ));
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::InvalidInstance(
                        "tabulated network utility grid must be strictly increasing in p".into(),
                    ));
                }
                if points.windows(2).any(|w| w[1].1 > w[0].1) {
                    return Err(Error::InvalidInstance(
                        "tabulated network utility must be non-increasing".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `R^s(p)`; fails for `p` outside `[0,1]`.
    pub fn eval(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Range(format!("proportion {p} is outside [0,1]")));
        }
        Ok(self.value(p))
    }

    /// `R^s(p)` without the range check. `p` is clamped to `[0,1]`.
    pub fn value(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        match self {
            NetworkUtility::Linear { u0, s, .. } => u0 - s * p,
            NetworkUtility::Logistic { k, m } => 1.0 / (1.0 + (-k * (m - p)).exp()),
            NetworkUtility::Tabulated { points } => {
                let idx = points.partition_point(|(x, _)| *x <= p);
                if idx == 0 {
                    return points[0].1;
                }
                if idx >= points.len() {
                    return points[points.len() - 1].1;
                }
                let (x0, y0) = points[idx - 1];
                let (x1, y1) = points[idx];
                y0 + (y1 - y0) * (p - x0) / (x1 - x0)
            }
        }
    }

    /// Smallest `L` with `|R^s(p) - R^s(q)| <= L |p - q|` on `[0,1]`.
    pub fn lipschitz_constant(&self) -> f64 {
        match self {
            NetworkUtility::Linear { s, .. } => *s,
            NetworkUtility::Logistic { k, .. } => k / 4.0,
            NetworkUtility::Tabulated { points } => points
                .windows(2)
                .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                .fold(0.0, f64::max),
        }
    }

    pub fn vanishes_at_one(&self) -> bool {
        self.value(1.0).abs() <= ZERO_AT_ONE_TOL
    }
}

/// Decision sensitivity of users (inverse temperature of the softmax).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sensitivity {
    Finite(f64),
    /// Users best-respond to the previous round's utilities.
    Infinite,
}

impl Sensitivity {
    pub fn validate(self) -> Result<()> {
        match self {
            Sensitivity::Finite(b) if !(b.is_finite() && b >= 0.0) => Err(Error::InvalidInstance(
                format!("sensitivity must be a non-negative real or infinite, got {b}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Sensitivity::Finite(b) => Some(b),
            Sensitivity::Infinite => None,
        }
    }
}

/// Field bundle used to build an [`Instance`].
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceParams {
    pub reward: f64,
    pub maintenance_cost: f64,
    pub training_cost: f64,
    pub decay: DecayUtility,
    pub network: NetworkUtility,
    pub sensitivity: Sensitivity,
    pub initial_proportion: f64,
    pub horizon: usize,
}

/// A validated problem instance. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    params: InstanceParams,
}

impl Instance {
    pub fn new(params: InstanceParams) -> Result<Self> {
        let nonneg = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidInstance(format!(
                    "{name} must be a non-negative real, got {v}"
                )))
            }
        };
        nonneg("r", params.reward)?;
        nonneg("c_m", params.maintenance_cost)?;
        nonneg("c_train", params.training_cost)?;
        params.decay.validate()?;
        params.network.validate()?;
        params.sensitivity.validate()?;
        if !(0.0..=1.0).contains(&params.initial_proportion) {
            return Err(Error::InvalidInstance(format!(
                "p1 must lie in [0,1], got {}",
                params.initial_proportion
            )));
        }
        if params.horizon == 0 {
            return Err(Error::InvalidInstance("T must be at least 1".into()));
        }

        // R^c(t) < R^s(0) < R^c(0) for some t.
        let rs0 = params.network.value(0.0);
        let rc0 = params.decay.eval(0);
        if rs0 >= rc0 {
            return Err(Error::InvalidInstance(format!(
                "utility assumption violated: R^s(0) = {rs0} is not below R^c(0) = {rc0}"
            )));
        }
        let probe = params.horizon.max(MIN_PROBE_HORIZON);
        let witness = if params.decay.infimum() >= rs0 {
            None
        } else {
            (1..=probe).find(|&t| params.decay.eval(t) < rs0)
        };
        if witness.is_none() {
            return Err(Error::InvalidInstance(format!(
                "utility assumption violated: R^c(t) never drops below R^s(0) = {rs0} within {probe} rounds"
            )));
        }
        Ok(Instance { params })
    }

    pub fn params(&self) -> &InstanceParams {
        &self.params
    }

    pub fn reward(&self) -> f64 {
        self.params.reward
    }

    pub fn maintenance_cost(&self) -> f64 {
        self.params.maintenance_cost
    }

    pub fn training_cost(&self) -> f64 {
        self.params.training_cost
    }

    pub fn decay(&self) -> &DecayUtility {
        &self.params.decay
    }

    pub fn network(&self) -> &NetworkUtility {
        &self.params.network
    }

    pub fn sensitivity(&self) -> Sensitivity {
        self.params.sensitivity
    }

    pub fn initial_proportion(&self) -> f64 {
        self.params.initial_proportion
    }

    pub fn horizon(&self) -> usize {
        self.params.horizon
    }

    /// Shorthand for `R^c(t)`.
    pub fn rc(&self, t: usize) -> f64 {
        self.params.decay.eval(t)
    }

    /// Shorthand for `R^s(p)` with `p` clamped to `[0,1]`.
    pub fn rs(&self, p: f64) -> f64 {
        self.params.network.value(p)
    }

    pub fn lipschitz_constant(&self) -> f64 {
        self.params.network.lipschitz_constant()
    }

    pub fn with_initial_proportion(&self, p1: f64) -> Result<Self> {
        let mut params = self.params.clone();
        params.initial_proportion = p1;
        Instance::new(params)
    }

    pub fn with_horizon(&self, horizon: usize) -> Result<Self> {
        let mut params = self.params.clone();
        params.horizon = horizon;
        Instance::new(params)
    }

    pub fn with_training_cost(&self, c_train: f64) -> Result<Self> {
        let mut params = self.params.clone();
        params.training_cost = c_train;
        Instance::new(params)
    }
}

/// Binary training decisions for rounds `1..=T`. Round 1 always trains.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrainingScheme {
    bits: Vec<bool>,
}

impl TrainingScheme {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        match bits.first() {
            None => Err(Error::Parameter(
                "a training scheme needs at least one round".into(),
            )),
            Some(false) => Err(Error::Parameter(
                "a training scheme must train in round 1".into(),
            )),
            Some(true) => Ok(TrainingScheme { bits }),
        }
    }

    /// Scheme of length `horizon` training exactly at the given 1-indexed rounds
    /// (round 1 is added if missing).
    pub fn from_rounds(horizon: usize, rounds: &[usize]) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Parameter(
                "a training scheme needs at least one round".into(),
            ));
        }
        let mut bits = vec![false; horizon];
        bits[0] = true;
        for &t in rounds {
            if t == 0 || t > horizon {
                return Err(Error::Range(format!(
                    "training round {t} is outside 1..={horizon}"
                )));
            }
            bits[t - 1] = true;
        }
        Ok(TrainingScheme { bits })
    }

    pub fn all_ones(horizon: usize) -> Result<Self> {
        TrainingScheme::new(vec![true; horizon])
    }

    /// Trains in round 1 only.
    pub fn no_training(horizon: usize) -> Result<Self> {
        TrainingScheme::from_rounds(horizon, &[])
    }

    pub fn horizon(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Whether round `t` (1-indexed) trains. Out-of-range rounds return false.
    pub fn trains_at(&self, t: usize) -> bool {
        t >= 1 && self.bits.get(t - 1).copied().unwrap_or(false)
    }

    pub fn training_rounds(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i + 1))
            .collect()
    }

    pub fn training_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Rounds since the last training at or before round `t`.
    pub fn gap(&self, t: usize) -> Result<usize> {
        if t == 0 || t > self.bits.len() {
            return Err(Error::Range(format!(
                "round {t} is outside 1..={}",
                self.bits.len()
            )));
        }
        let last = self.bits[..t]
            .iter()
            .rposition(|&b| b)
            .expect("round 1 trains");
        Ok(t - 1 - last)
    }

    /// Gaps for every round, index `t-1` holding the gap of round `t`.
    pub fn gaps(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.bits.len());
        let mut g = 0usize;
        for (i, &b) in self.bits.iter().enumerate() {
            g = if b || i == 0 { 0 } else { g + 1 };
            out.push(g);
        }
        out
    }

    /// Longest distance between consecutive training rounds, with `T + 1`
    /// closing the last window.
    pub fn max_gap(&self) -> usize {
        let mut rounds = self.training_rounds();
        rounds.push(self.bits.len() + 1);
        rounds.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(1)
    }

    /// `(start, length)` of every window between consecutive trainings.
    pub fn windows(&self) -> Vec<(usize, usize)> {
        let mut rounds = self.training_rounds();
        rounds.push(self.bits.len() + 1);
        rounds.windows(2).map(|w| (w[0], w[1] - w[0])).collect()
    }
}

impl fmt::Display for TrainingScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for TrainingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                other => Err(Error::Parameter(format!(
                    "invalid scheme character {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        TrainingScheme::new(bits)
    }
}

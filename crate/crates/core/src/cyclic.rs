//! Periodic training schemes: construction, cycle fixed points with certified
//! error radii, and long-run average revenue.
//!
//! A periodic pattern is a list of segment lengths. Training happens at the
//! start of each segment and the segments repeat forever: `[k]` is the
//! k-cyclic scheme, `[a1, a2]` the alternating one.

use rayon::prelude::*;

use crate::dynamics::step;
use crate::error::{Error, Result};
use crate::interval::{Interval, OUTWARD};
use crate::model::{Instance, TrainingScheme};
use crate::regulator::contraction_factor;

/// Distance within which the closed-form per-step contraction factor is used.
pub const ANALYTIC_NEIGHBOURHOOD: f64 = 0.002;

/// Default largest cycle length compared by [`best_cycle`].
pub const DEFAULT_K_MAX: usize = 8;

/// Trains at every round `t` with `t mod k = 1`.
pub fn cyclic_scheme(k: usize, horizon: usize) -> Result<TrainingScheme> {
    if k == 0 {
        return Err(Error::Parameter("cycle length must be at least 1".into()));
    }
    periodic_scheme(&[k], horizon)
}

/// Trains at `1, 1 + a1, 1 + a1 + a2, 1 + 2 a1 + a2, ...` up to `horizon`.
pub fn alternating_scheme(a1: usize, a2: usize, horizon: usize) -> Result<TrainingScheme> {
    if a1 == 0 || a2 == 0 {
        return Err(Error::Parameter(
            "alternating segment lengths must be at least 1".into(),
        ));
    }
    periodic_scheme(&[a1, a2], horizon)
}

fn periodic_scheme(segments: &[usize], horizon: usize) -> Result<TrainingScheme> {
    let mut rounds = Vec::new();
    let mut t = 1;
    for &len in segments.iter().cycle() {
        if t > horizon {
            break;
        }
        rounds.push(t);
        t += len;
    }
    TrainingScheme::from_rounds(horizon, &rounds)
}

/// Applies the share map once per listed gap, in order.
pub fn transition_compose(instance: &Instance, gaps: &[usize], p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Range(format!("proportion {p} is outside [0,1]")));
    }
    Ok(compose(instance, gaps, p))
}

fn compose(instance: &Instance, gaps: &[usize], p: f64) -> f64 {
    gaps.iter().fold(p, |q, &g| step(instance, q, g))
}

/// Gap sequence of one period of the pattern.
fn period_gaps(segments: &[usize]) -> Vec<usize> {
    segments.iter().flat_map(|&len| 0..len).collect()
}

/// A value together with a bound on its distance to the true quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedValue {
    pub value: f64,
    pub radius: f64,
}

impl BoundedValue {
    pub fn interval(&self) -> Interval {
        Interval::around(self.value, self.radius)
    }
}

/// Where the per-cycle contraction factor came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// Closed-form factor, valid within [`ANALYTIC_NEIGHBOURHOOD`].
    Analytic,
    /// Largest recent ratio of successive iterate steps.
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleOptions {
    /// Target radius for the cycle-start share.
    pub tol: f64,
    /// Give up after this many cycles.
    pub max_cycles: usize,
    /// Give up after this many consecutive non-shrinking steps.
    pub stall_limit: usize,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions {
            tol: 1e-10,
            max_cycles: 100_000,
            stall_limit: 100,
        }
    }
}

/// Limiting within-period shares of a periodic scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleFixedPoint {
    pub segments: Vec<usize>,
    /// Limiting share at the start of each period.
    pub anchor: BoundedValue,
    /// Limiting share of every round in the period, starting with `anchor`.
    pub q_star: Vec<BoundedValue>,
    /// Enclosures of `q_star`.
    pub q_intervals: Vec<Interval>,
    /// Per-period contraction factor used for the radius.
    pub contraction_gamma: f64,
    pub certificate: Certificate,
    /// Index `i` of the iterate `a_i` the radius is centred on (`a_1 = p1`).
    pub anchor_index: usize,
    /// `|a_{i+1} - a_i|` at the stopping iterate.
    pub last_step: f64,
}

impl CycleFixedPoint {
    pub fn period(&self) -> usize {
        self.segments.iter().sum()
    }
}

pub fn cycle_fixed_point(instance: &Instance, k: usize, tol: f64) -> Result<CycleFixedPoint> {
    if k == 0 {
        return Err(Error::Parameter("cycle length must be at least 1".into()));
    }
    periodic_fixed_point(
        instance,
        &[k],
        CycleOptions {
            tol,
            ..CycleOptions::default()
        },
    )
}

/// Iterates the period map from the instance's starting share until the
/// distance to the fixed point is certified below `opts.tol`.
pub fn periodic_fixed_point(
    instance: &Instance,
    segments: &[usize],
    opts: CycleOptions,
) -> Result<CycleFixedPoint> {
    if segments.is_empty() || segments.contains(&0) {
        return Err(Error::Parameter("segment lengths must be positive".into()));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::Parameter(format!(
            "tolerance must be positive, got {}",
            opts.tol
        )));
    }
    let gaps = period_gaps(segments);
    let period = gaps.len();
    let analytic = contraction_factor(instance, ANALYTIC_NEIGHBOURHOOD)
        .ok()
        .map(|g| g.powi(period as i32));

    let mut a = instance.initial_proportion();
    let mut steps: Vec<f64> = Vec::new();
    let mut stalled = 0usize;
    for i in 1..=opts.max_cycles {
        let next = compose(instance, &gaps, a);
        let d = (next - a).abs();
        if let Some(&prev) = steps.last() {
            if d >= prev && d > 0.0 {
                stalled += 1;
                if stalled >= opts.stall_limit {
                    return Err(Error::Convergence(format!(
                        "period {segments:?}: iterate steps stopped shrinking for {stalled} cycles"
                    )));
                }
            } else {
                stalled = 0;
            }
        }
        steps.push(d);

        let factor = match analytic {
            Some(g) if d < ANALYTIC_NEIGHBOURHOOD => Some((g, Certificate::Analytic)),
            _ if steps.len() >= 4 => {
                let recent = &steps[steps.len() - 4..];
                let ratio = recent
                    .windows(2)
                    .map(|w| if w[0] == 0.0 { 0.0 } else { w[1] / w[0] })
                    .fold(0.0, f64::max);
                (ratio < 1.0).then_some((ratio, Certificate::Empirical))
            }
            _ if d == 0.0 => Some((0.0, Certificate::Empirical)),
            _ => None,
        };
        if let Some((gamma, certificate)) = factor {
            let radius = d / (1.0 - gamma);
            if radius <= opts.tol {
                return Ok(finish(
                    instance,
                    segments,
                    &gaps,
                    a,
                    radius,
                    gamma,
                    certificate,
                    i,
                    d,
                ));
            }
        }
        a = next;
    }
    Err(Error::Convergence(format!(
        "period {segments:?}: no certified fixed point within {} cycles",
        opts.max_cycles
    )))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    instance: &Instance,
    segments: &[usize],
    gaps: &[usize],
    anchor: f64,
    radius: f64,
    gamma: f64,
    certificate: Certificate,
    anchor_index: usize,
    last_step: f64,
) -> CycleFixedPoint {
    let lo0 = (anchor - radius - OUTWARD).max(0.0);
    let hi0 = (anchor + radius + OUTWARD).min(1.0);
    let mut q_star = Vec::with_capacity(gaps.len());
    let mut q_intervals = Vec::with_capacity(gaps.len());
    let (mut value, mut lo, mut hi) = (anchor, lo0, hi0);
    for (i, &g) in gaps.iter().enumerate() {
        // the composed map is increasing, so endpoint images enclose the range
        let slack = i as f64 * OUTWARD;
        let enclosure = Interval::new((lo - slack).max(0.0), (hi + slack).min(1.0))
            .expect("monotone images keep their order");
        q_star.push(BoundedValue {
            value,
            radius: (value - enclosure.lo()).max(enclosure.hi() - value),
        });
        q_intervals.push(enclosure);
        value = step(instance, value, g);
        lo = step(instance, lo, g);
        hi = step(instance, hi, g);
    }
    CycleFixedPoint {
        segments: segments.to_vec(),
        anchor: BoundedValue {
            value: anchor,
            radius,
        },
        q_star,
        q_intervals,
        contraction_gamma: gamma,
        certificate,
        anchor_index,
        last_step,
    }
}

/// Long-run average revenue of a periodic scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevenueInterval {
    /// Enclosure of the summed limiting shares over one period.
    pub proportion_sum: Interval,
    /// Enclosure of `lim_{T -> inf} V`.
    pub revenue: Interval,
    /// Maintenance cost of the instance, for reporting `lim V + c_m`.
    pub maintenance_cost: f64,
}

impl RevenueInterval {
    pub fn lower(&self) -> f64 {
        self.revenue.lo()
    }

    pub fn upper(&self) -> f64 {
        self.revenue.hi()
    }

    /// `lim V + c_m`, the quantity independent of the maintenance cost.
    pub fn gross(&self) -> Interval {
        self.revenue.shift(self.maintenance_cost)
    }
}

pub fn periodic_revenue(
    instance: &Instance,
    segments: &[usize],
    opts: CycleOptions,
) -> Result<RevenueInterval> {
    let fp = periodic_fixed_point(instance, segments, opts)?;
    let period = fp.period();
    let sum = fp
        .q_intervals
        .iter()
        .copied()
        .fold(Interval::point(0.0), |acc, q| acc + q)
        .widen(period as f64 * fp.anchor.radius);
    let trainings = segments.len() as f64;
    let revenue = sum
        .scale(instance.reward())
        .shift(-trainings * instance.training_cost())
        .scale(1.0 / period as f64)
        .shift(-instance.maintenance_cost());
    Ok(RevenueInterval {
        proportion_sum: sum,
        revenue,
        maintenance_cost: instance.maintenance_cost(),
    })
}

pub fn asymptotic_cycle_revenue(instance: &Instance, k: usize) -> Result<RevenueInterval> {
    if k == 0 {
        return Err(Error::Parameter("cycle length must be at least 1".into()));
    }
    periodic_revenue(instance, &[k], CycleOptions::default())
}

/// Long-run revenue of the alternating scheme; each period holds two
/// trainings.
pub fn asymptotic_alternating_revenue(
    instance: &Instance,
    a1: usize,
    a2: usize,
) -> Result<RevenueInterval> {
    if a1 == 0 || a2 == 0 {
        return Err(Error::Parameter(
            "alternating segment lengths must be at least 1".into(),
        ));
    }
    periodic_revenue(instance, &[a1, a2], CycleOptions::default())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestCycle {
    pub k: usize,
    pub revenue: RevenueInterval,
    /// The winner's interval overlaps another candidate's, so the ranking is
    /// not certified.
    pub undecided: bool,
}

fn cycle_revenues(instance: &Instance, k_max: usize) -> Result<Vec<RevenueInterval>> {
    if k_max == 0 {
        return Err(Error::Parameter("k_max must be at least 1".into()));
    }
    (1..=k_max)
        .into_par_iter()
        .map(|k| asymptotic_cycle_revenue(instance, k))
        .collect()
}

/// Cycle length in `1..=k_max` with the highest certified long-run revenue.
pub fn best_cycle(instance: &Instance, k_max: usize) -> Result<BestCycle> {
    let revenues = cycle_revenues(instance, k_max)?;
    let (idx, best) = revenues
        .iter()
        .enumerate()
        .fold(None::<(usize, &RevenueInterval)>, |acc, (i, r)| match acc {
            Some((_, b)) if b.lower() >= r.lower() => acc,
            _ => Some((i, r)),
        })
        .expect("k_max >= 1");
    let undecided = revenues
        .iter()
        .enumerate()
        .any(|(i, r)| i != idx && r.revenue.intersects(&best.revenue));
    Ok(BestCycle {
        k: idx + 1,
        revenue: *best,
        undecided,
    })
}

/// Certified lower bound on how much the alternating scheme out-earns every
/// cyclic scheme with `k <= k_max` in the long run. Positive means it wins.
pub fn noncyclic_beats_cyclic(
    instance: &Instance,
    a1: usize,
    a2: usize,
    k_max: usize,
) -> Result<f64> {
    let alt = asymptotic_alternating_revenue(instance, a1, a2)?;
    let best_upper = cycle_revenues(instance, k_max)?
        .iter()
        .map(RevenueInterval::upper)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(alt.lower() - best_upper)
}

/// One row of the long-run revenue table.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleTableRow {
    pub label: String,
    pub revenue: RevenueInterval,
}

/// Rows for every `k` in `1..=k_max` followed by the listed alternating pairs.
pub fn cycle_table(
    instance: &Instance,
    k_max: usize,
    pairs: &[(usize, usize)],
) -> Result<Vec<CycleTableRow>> {
    let mut rows: Vec<CycleTableRow> = cycle_revenues(instance, k_max)?
        .into_iter()
        .enumerate()
        .map(|(i, revenue)| CycleTableRow {
            label: format!("k={}", i + 1),
            revenue,
        })
        .collect();
    for &(a1, a2) in pairs {
        rows.push(CycleTableRow {
            label: format!("alt={a1}:{a2}"),
            revenue: asymptotic_alternating_revenue(instance, a1, a2)?,
        });
    }
    Ok(rows)
}

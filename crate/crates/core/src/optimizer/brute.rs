use rayon::prelude::*;

use super::{Optimality, OptimizationResult};
use crate::dynamics::{simulate, step};
use crate::error::{Error, Result};
use crate::model::{Instance, TrainingScheme};

/// Largest horizon enumerated by default (`2^23` schemes).
pub const DEFAULT_BRUTE_FORCE_CAP: usize = 24;

/// Hard limit imposed by the 64-bit scheme encoding.
const MAX_ENCODABLE: usize = 63;

/// Free rounds fixed per parallel work unit.
const PREFIX_DEPTH: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceOptions {
    pub cap: usize,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions {
            cap: DEFAULT_BRUTE_FORCE_CAP,
        }
    }
}

/// Relative tolerance for treating two objective sums as tied.
fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Running argmax in enumeration order. The first scheme seen among ties is
/// kept, which is the lexicographically smallest since enumeration visits
/// schemes in ascending order.
#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    mask: u64,
    ties: u64,
    /// Smallest secondary objective among the tied schemes.
    min_other: f64,
}

impl Best {
    const EMPTY: Best = Best {
        value: f64::NEG_INFINITY,
        mask: 0,
        ties: 0,
        min_other: f64::INFINITY,
    };

    #[inline]
    fn offer(&mut self, value: f64, other: f64, mask: u64) {
        if self.ties == 0 || (value > self.value && !tied(value, self.value)) {
            *self = Best {
                value,
                mask,
                ties: 1,
                min_other: other,
            };
        } else if tied(value, self.value) {
            self.ties += 1;
            self.min_other = self.min_other.min(other);
        }
    }

    /// Merge a later chunk into an earlier one.
    fn merge(self, later: Best) -> Best {
        if later.ties == 0 {
            return self;
        }
        if self.ties == 0 || (later.value > self.value && !tied(later.value, self.value)) {
            later
        } else if tied(later.value, self.value) {
            Best {
                ties: self.ties + later.ties,
                min_other: self.min_other.min(later.min_other),
                ..self
            }
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Both {
    revenue: Best,
    welfare: Best,
}

impl Both {
    const EMPTY: Both = Both {
        revenue: Best::EMPTY,
        welfare: Best::EMPTY,
    };

    fn merge(self, later: Both) -> Both {
        Both {
            revenue: self.revenue.merge(later.revenue),
            welfare: self.welfare.merge(later.welfare),
        }
    }
}

struct Search<'a> {
    instance: &'a Instance,
    rc: Vec<f64>,
    horizon: usize,
}

impl Search<'_> {
    /// Contribution of round `i` (0-indexed) at share `p` with the given gap
    /// and training decision: `(revenue, welfare, next share)`.
    #[inline]
    fn round(&self, p: f64, gap: usize, train: bool) -> (f64, f64, f64) {
        let inst = self.instance;
        let rev = p * inst.reward()
            - inst.maintenance_cost()
            - if train { inst.training_cost() } else { 0.0 };
        let wel = p * self.rc[gap] + (1.0 - p) * inst.rs(p);
        (rev, wel, step(inst, p, gap))
    }

    /// Visit every completion of the scheme from round index `i` on.
    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        i: usize,
        p: f64,
        prev_gap: usize,
        rev: f64,
        wel: f64,
        mask: u64,
        acc: &mut Both,
    ) {
        if i == self.horizon {
            acc.revenue.offer(rev, wel, mask);
            acc.welfare.offer(wel, rev, mask);
            return;
        }
        // skip first: ascending lexicographic order
        let g = prev_gap + 1;
        let (dr, dw, next) = self.round(p, g, false);
        self.descend(i + 1, next, g, rev + dr, wel + dw, mask, acc);
        let (dr, dw, next) = self.round(p, 0, true);
        self.descend(i + 1, next, 0, rev + dr, wel + dw, mask | (1 << i), acc);
    }

    fn run(&self) -> Both {
        let free = self.horizon - 1;
        let depth = free.min(PREFIX_DEPTH);
        let (rev0, wel0, p0) = self.round(self.instance.initial_proportion(), 0, true);
        (0u64..1 << depth)
            .into_par_iter()
            .map(|prefix| {
                let mut p = p0;
                let mut rev = rev0;
                let mut wel = wel0;
                let mut gap = 0usize;
                let mut mask = 1u64;
                for j in 0..depth {
                    let train = (prefix >> (depth - 1 - j)) & 1 == 1;
                    let g = if train { 0 } else { gap + 1 };
                    let (dr, dw, next) = self.round(p, g, train);
                    rev += dr;
                    wel += dw;
                    p = next;
                    gap = g;
                    if train {
                        mask |= 1 << (j + 1);
                    }
                }
                let mut acc = Both::EMPTY;
                self.descend(depth + 1, p, gap, rev, wel, mask, &mut acc);
                acc
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Both::EMPTY, Both::merge)
    }
}

fn enumerate(instance: &Instance, opts: BruteForceOptions) -> Result<Both> {
    let horizon = instance.horizon();
    if opts.cap > MAX_ENCODABLE {
        return Err(Error::Parameter(format!(
            "enumeration cap {} exceeds the supported maximum {MAX_ENCODABLE}",
            opts.cap
        )));
    }
    if horizon > opts.cap {
        return Err(Error::Capacity {
            horizon,
            cap: opts.cap,
        });
    }
    let rc = (0..=horizon).map(|t| instance.rc(t)).collect();
    Ok(Search {
        instance,
        rc,
        horizon,
    }
    .run())
}

fn decode(mask: u64, horizon: usize) -> TrainingScheme {
    TrainingScheme::new((0..horizon).map(|i| (mask >> i) & 1 == 1).collect())
        .expect("enumerated schemes train in round 1")
}

pub fn brute_force_revenue_opt(instance: &Instance) -> Result<OptimizationResult> {
    brute_force_revenue_opt_with(instance, BruteForceOptions::default())
}

pub fn brute_force_revenue_opt_with(
    instance: &Instance,
    opts: BruteForceOptions,
) -> Result<OptimizationResult> {
    let best = enumerate(instance, opts)?.revenue;
    let scheme = decode(best.mask, instance.horizon());
    let objective = simulate(instance, &scheme)?.revenue;
    Ok(OptimizationResult {
        scheme,
        objective,
        optimality: Optimality::Exact,
        ties: Some(best.ties),
    })
}

pub fn brute_force_welfare_opt(instance: &Instance) -> Result<OptimizationResult> {
    brute_force_welfare_opt_with(instance, BruteForceOptions::default())
}

pub fn brute_force_welfare_opt_with(
    instance: &Instance,
    opts: BruteForceOptions,
) -> Result<OptimizationResult> {
    let best = enumerate(instance, opts)?.welfare;
    let scheme = decode(best.mask, instance.horizon());
    let objective = simulate(instance, &scheme)?.welfare;
    Ok(OptimizationResult {
        scheme,
        objective,
        optimality: Optimality::Exact,
        ties: Some(best.ties),
    })
}

/// Best achievable welfare divided by the smallest welfare among all
/// revenue-maximising schemes. Infinite when that welfare is zero.
pub fn price_of_anarchy(instance: &Instance) -> Result<f64> {
    price_of_anarchy_with(instance, BruteForceOptions::default())
}

pub fn price_of_anarchy_with(instance: &Instance, opts: BruteForceOptions) -> Result<f64> {
    let both = enumerate(instance, opts)?;
    let numerator = both.welfare.value;
    let denominator = both.revenue.min_other;
    if denominator == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(numerator / denominator)
}

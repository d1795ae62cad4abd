use rayon::prelude::*;

use super::{Optimality, OptimizationResult};
use crate::dynamics::{simulate, softmax_share};
use crate::error::{Error, Result};
use crate::model::{Instance, TrainingScheme};

/// Decision stored for a dynamic-programming state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Skip,
    Train,
}

/// Backward-induction table over `(proportion cell, round, previous gap)`.
///
/// Rounds run over `1..=T+1`; the `T+1` layer is the all-zero terminal value.
/// The gap axis holds the gap of the *previous* round and has `T+1` entries.
/// Maintenance cost is left out of every value since all schemes pay it.
#[derive(Debug, Clone)]
pub struct DpTable {
    eps: f64,
    cells: usize,
    horizon: usize,
    /// `(skip value, train value)` per state.
    entries: Vec<(f64, f64)>,
}

impl DpTable {
    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Number of proportion cells: `floor(1/eps) + 1`, so both 0 and 1 have
    /// a cell.
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    fn entry(&self, cell: usize, round: usize, gap: usize) -> Result<(f64, f64)> {
        if cell >= self.cells || round == 0 || round > self.horizon + 1 || gap > self.horizon {
            return Err(Error::Range(format!(
                "state (cell {cell}, round {round}, gap {gap}) is outside the table"
            )));
        }
        let gaps = self.horizon + 1;
        Ok(self.entries[((round - 1) * self.cells + cell) * gaps + gap])
    }

    /// Values of both branches as `(skip, train)`.
    pub fn branch_values(&self, cell: usize, round: usize, gap: usize) -> Result<(f64, f64)> {
        self.entry(cell, round, gap)
    }

    /// Optimal continuation value. Round 1 must train.
    pub fn value(&self, cell: usize, round: usize, gap: usize) -> Result<f64> {
        let (skip, train) = self.entry(cell, round, gap)?;
        Ok(if round == 1 { train } else { skip.max(train) })
    }

    /// Optimal action; skip wins exact ties. Round 1 always trains.
    pub fn action(&self, cell: usize, round: usize, gap: usize) -> Result<Action> {
        let (skip, train) = self.entry(cell, round, gap)?;
        Ok(if round == 1 || train > skip {
            Action::Train
        } else {
            Action::Skip
        })
    }

    /// Grid value of a cell.
    pub fn proportion(&self, cell: usize) -> f64 {
        (cell as f64 * self.eps).min(1.0)
    }

    /// Cell holding `floor_eps(p)`.
    pub fn cell_of(&self, p: f64) -> usize {
        cell_of(p, self.eps, self.cells)
    }
}

/// `floor(p / eps)`, nudged so decimal grid points such as `0.3` with
/// `eps = 0.1` are not pushed one cell down by binary rounding.
fn cell_of(p: f64, eps: f64, cells: usize) -> usize {
    let raw = (p / eps + 1e-9).floor();
    (raw.max(0.0) as usize).min(cells - 1)
}

#[derive(Debug, Clone)]
pub struct ArmsSolution {
    pub result: OptimizationResult,
    pub table: DpTable,
    /// Whether the instance and step meet the conditions under which the
    /// extracted scheme is within `eps * r * T` of the best average revenue.
    pub guarantee: bool,
}

/// Largest step for which the approximation guarantee applies, or `None` when
/// the instance is outside the guaranteed class.
pub(crate) fn guarantee_threshold(instance: &Instance) -> Option<f64> {
    let beta = instance.sensitivity().finite()?;
    if !instance.network().vanishes_at_one() {
        return None;
    }
    let bl = beta * instance.lipschitz_constant();
    if bl >= 16.0 / 7.0 {
        return None;
    }
    if bl == 0.0 {
        return Some(f64::INFINITY);
    }
    Some((16.0 - 7.0 * bl) / (14.0 * bl * bl.exp() * instance.horizon() as f64))
}

pub fn arms(instance: &Instance, eps: f64) -> Result<OptimizationResult> {
    Ok(solve_arms(instance, eps)?.result)
}

pub fn solve_arms(instance: &Instance, eps: f64) -> Result<ArmsSolution> {
    if !(eps.is_finite() && eps > 0.0 && eps <= 1.0) {
        return Err(Error::Parameter(format!(
            "grid step must lie in (0, 1], got {eps}"
        )));
    }
    let horizon = instance.horizon();
    let cells = (1.0 / eps + 1e-9).floor() as usize + 1;
    let gaps = horizon + 1;
    let layer = cells * gaps;
    let r = instance.reward();
    let c_train = instance.training_cost();
    let beta = instance.sensitivity();
    let rc: Vec<f64> = (0..=horizon + 1).map(|t| instance.rc(t)).collect();
    let grid: Vec<f64> = (0..cells).map(|i| (i as f64 * eps).min(1.0)).collect();
    let forum: Vec<f64> = grid.iter().map(|&p| instance.rs(p)).collect();
    let next_cell =
        |cell: usize, gap: usize| cell_of(softmax_share(beta, rc[gap], forum[cell]), eps, cells);

    let mut entries: Vec<(f64, f64)> = vec![(0.0, 0.0); layer * (horizon + 1)];
    for round in (1..=horizon).rev() {
        let (head, tail) = entries.split_at_mut(round * layer);
        let next = &tail[..layer];
        let current = &mut head[(round - 1) * layer..];
        let best = |cell: usize, gap: usize| {
            let (skip, train) = next[cell * gaps + gap];
            skip.max(train)
        };
        current
            .par_chunks_mut(gaps)
            .enumerate()
            .for_each(|(cell, row)| {
                let gain = grid[cell] * r;
                let train = gain - c_train + best(next_cell(cell, 0), 0);
                for (prev_gap, slot) in row.iter_mut().enumerate() {
                    let gap = prev_gap + 1;
                    let skip = gain + best(next_cell(cell, gap), gap.min(horizon));
                    *slot = (skip, train);
                }
            });
    }
    let table = DpTable {
        eps,
        cells,
        horizon,
        entries,
    };

    // follow the table along the grid path
    let mut bits = Vec::with_capacity(horizon);
    let mut cell = table.cell_of(instance.initial_proportion());
    let mut prev_gap = 0usize;
    for round in 1..=horizon {
        let train = table.action(cell, round, prev_gap)? == Action::Train;
        bits.push(train);
        let gap = if train { 0 } else { prev_gap + 1 };
        cell = next_cell(cell, gap);
        prev_gap = gap;
    }
    let scheme = TrainingScheme::new(bits)?;
    let objective = simulate(instance, &scheme)?.revenue;
    let guarantee = guarantee_threshold(instance).is_some_and(|limit| eps < limit);
    Ok(ArmsSolution {
        result: OptimizationResult {
            scheme,
            objective,
            optimality: Optimality::ApproxEps(eps),
            ties: None,
        },
        table,
        guarantee,
    })
}

//! CSV and plain-text output.
//!
//! Floats are written with 12 significant digits in the style of C's `%.12g`
//! so every output is byte-for-byte reproducible for a fixed input.

use std::io::Write;

use crate::cyclic::CycleTableRow;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::optimizer::{Optimality, OptimizationResult};
use crate::regulator::{BoundMode, WelfareBounds};

/// `%.12g` formatting.
pub fn g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if !(-4..DIGITS).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parameter(format!("failed to write CSV: {e}"))
}

fn io_error(e: std::io::Error) -> Error {
    Error::Parameter(format!("failed to write output: {e}"))
}

/// Per-round trajectory table. `V_cum` is `(1/T) sum_{i<=t} v_i`, so its last
/// row equals the average revenue.
pub fn write_trajectory_csv<W: Write>(out: W, traj: &Trajectory) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "round",
        "p",
        "gamma",
        "u",
        "v",
        "U_cum",
        "V_cum",
        "counterfactual_cum",
    ])
    .map_err(csv_error)?;
    let horizon = traj.horizon() as f64;
    let per_round = traj.counterfactual / horizon;
    let welfare = traj.cumulative_welfare();
    let revenue = traj.cumulative_revenue();
    for t in 0..traj.horizon() {
        w.write_record([
            (t + 1).to_string(),
            g12(traj.p[t]),
            traj.gamma[t].to_string(),
            g12(traj.u[t]),
            g12(traj.v[t]),
            g12(welfare[t]),
            g12(revenue[t] / horizon),
            g12(per_round * (t + 1) as f64),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(io_error)
}

/// Cumulative welfare of never retraining, the revenue optimum and the
/// welfare optimum, next to the forum-only baseline.
pub fn write_welfare_comparison_csv<W: Write>(
    out: W,
    no_training: &Trajectory,
    revenue_opt: &Trajectory,
    welfare_opt: &Trajectory,
) -> Result<()> {
    let horizon = no_training.horizon();
    if revenue_opt.horizon() != horizon || welfare_opt.horizon() != horizon {
        return Err(Error::Shape("trajectories must share a horizon".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "round",
        "U_no_training",
        "U_revenue_opt",
        "U_welfare_opt",
        "counterfactual",
    ])
    .map_err(csv_error)?;
    let per_round = no_training.counterfactual / horizon as f64;
    let (a, b, c) = (
        no_training.cumulative_welfare(),
        revenue_opt.cumulative_welfare(),
        welfare_opt.cumulative_welfare(),
    );
    for t in 0..horizon {
        w.write_record([
            (t + 1).to_string(),
            g12(a[t]),
            g12(b[t]),
            g12(c[t]),
            g12(per_round * (t + 1) as f64),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(io_error)
}

/// Share per round for several starting shares, one column each.
pub fn write_share_paths_csv<W: Write>(out: W, starts: &[f64], paths: &[Trajectory]) -> Result<()> {
    if starts.len() != paths.len() || paths.is_empty() {
        return Err(Error::Shape(
            "need one trajectory per starting share".into(),
        ));
    }
    let horizon = paths[0].horizon();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["round".to_string()];
    header.extend(starts.iter().map(|p| format!("p1={}", g12(*p))));
    w.write_record(&header).map_err(csv_error)?;
    for t in 0..horizon {
        let mut row = vec![(t + 1).to_string()];
        row.extend(paths.iter().map(|tr| g12(tr.p[t])));
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(io_error)
}

/// Long-run revenue table: one row per periodic scheme.
pub fn write_cycle_table_csv<W: Write>(out: W, rows: &[CycleTableRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "scheme",
        "sum_lower",
        "sum_upper",
        "limV_plus_cm_lower",
        "limV_plus_cm_upper",
    ])
    .map_err(csv_error)?;
    for row in rows {
        let gross = row.revenue.gross();
        w.write_record([
            row.label.clone(),
            g12(row.revenue.proportion_sum.lo()),
            g12(row.revenue.proportion_sum.hi()),
            g12(gross.lo()),
            g12(gross.hi()),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(io_error)
}

/// `key = value` summary of an optimisation run.
pub fn write_optimization_report<W: Write>(
    mut out: W,
    result: &OptimizationResult,
    guarantee: Option<bool>,
) -> Result<()> {
    let rounds = result
        .scheme
        .training_rounds()
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let mut text = String::new();
    match result.optimality {
        Optimality::Exact => text.push_str("method = exact\n"),
        Optimality::ApproxEps(eps) => {
            text.push_str(&format!("method = arms\neps = {}\n", g12(eps)))
        }
    }
    text.push_str(&format!("scheme = {}\n", result.scheme));
    text.push_str(&format!("training_rounds = {rounds}\n"));
    text.push_str(&format!("objective = {}\n", g12(result.objective)));
    if let Some(ties) = result.ties {
        text.push_str(&format!("ties = {ties}\n"));
    }
    if let Some(g) = guarantee {
        text.push_str(&format!("guarantee = {g}\n"));
    }
    out.write_all(text.as_bytes()).map_err(io_error)
}

/// Regulator verdict followed by the per-offset bound table.
pub fn write_verdict_report<W: Write>(
    mut out: W,
    bounds: &WelfareBounds,
    forum_only: f64,
    gap: Option<f64>,
) -> Result<()> {
    let mut text = format!("delta = {}\n", bounds.delta);
    match bounds.mode {
        BoundMode::Crude => text.push_str("mode = crude\n"),
        BoundMode::Noisy { p_hat, eps } => {
            text.push_str(&format!(
                "mode = noisy\np_hat = {}\neps = {}\n",
                g12(p_hat),
                g12(eps)
            ));
            text.push_str(&format!("guarantee = {}\n", bounds.guarantee));
        }
    }
    text.push_str(&format!("forum_only_welfare = {}\n", g12(forum_only)));
    text.push_str(&format!(
        "sum_u_lo = {}\nsum_u_hi = {}\n",
        g12(bounds.sum_lo()),
        g12(bounds.sum_hi())
    ));
    text.push_str(&format!(
        "verdict_sufficient = {}\n",
        bounds.sum_lo() >= forum_only
    ));
    text.push_str(&format!(
        "verdict_necessary = {}\n",
        bounds.sum_hi() >= forum_only
    ));
    if let Some(g) = gap {
        text.push_str(&format!("bound_gap = {}\n", g12(g)));
    }
    text.push_str("\noffset,q_lo,q_hi,u_lo,u_hi\n");
    for t in 0..bounds.delta {
        text.push_str(&format!(
            "{t},{},{},{},{}\n",
            g12(bounds.q_lo[t]),
            g12(bounds.q_hi[t]),
            g12(bounds.u_lo[t]),
            g12(bounds.u_hi[t])
        ));
    }
    out.write_all(text.as_bytes()).map_err(io_error)
}

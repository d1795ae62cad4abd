//! Acceptance suite for the ecosystem toolkit.
//!
//! Runs ten numbered criteria against the reference instances and against
//! seeded random instances, prints one `PASS`/`FAIL` line per criterion
//! (followed by the individual checks behind it) and exits non-zero if any
//! criterion fails. Every tolerance is a named constant below.
//!
//! Two checks are known to fail, and they are kept as stated rather than
//! relaxed:
//! - criterion 6: the cycle-3 break-even witness from a zero starting share
//!   over 8 rounds has total revenue of about -0.689, not above 0.397;
//! - criterion 9: "a scheme that helps users passes the necessary window
//!   test at its longest gap" has counterexamples when a long harmful
//!   window is offset by short, high-welfare windows.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ecosim_core::cyclic::{alternating_scheme, cycle_table, cyclic_scheme, noncyclic_beats_cyclic};
use ecosim_core::dynamics::{counterfactual_welfare, simulate};
use ecosim_core::optimizer::{
    brute_force_revenue_opt, brute_force_welfare_opt, price_of_anarchy, solve_arms,
    training_gap_bound,
};
use ecosim_core::regulator::{
    aux_sequence, bound_gap, check_necessary, check_sufficient, contraction_factor,
    noisy_welfare_bounds, BETA_L_LIMIT,
};
use ecosim_core::{
    presets, DecayUtility, EligibilityReason, Instance, InstanceParams, NetworkUtility, Result,
    Sensitivity, TrainingScheme,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Pinned tolerances and budgets
// ---------------------------------------------------------------------------

/// First-round revenue of the reference ecosystem must match -0.104 this closely.
const FIRST_REVENUE_TOL: f64 = 1e-9;
/// Accepted ranges for the second and third round shares.
const SECOND_SHARE: (f64, f64) = (0.947, 0.958);
const THIRD_SHARE: (f64, f64) = (0.805, 0.815);
/// Runtime budget for one 20-round simulation.
const SIMULATE_BUDGET: Duration = Duration::from_millis(1);
/// Runtime budget for the single-threaded 20-round exhaustive search.
const BRUTE_BUDGET: Duration = Duration::from_secs(60);
/// Rounds within which the no-training welfare must first fall below the
/// forum-only baseline.
const CROSSING_WINDOW: (usize, usize) = (5, 8);
const CROSSING_LATEST: usize = 10;
/// Reference long-run revenue rows (`lim V + c_m`) and the widest accepted
/// enclosure.
const CYCLE_ROWS: [(usize, f64, f64); 3] = [
    (1, 0.4462, 0.4463),
    (3, 0.6241, 0.62413),
    (8, 0.4833, 0.4834),
];
const CYCLE_WIDTH_MAX: f64 = 1e-3;
const CYCLE_BUDGET: Duration = Duration::from_secs(1);
/// Certified margin by which the alternating 2/3 scheme must out-earn every
/// cycle with `k <= 8`.
const SEPARATION_MARGIN: f64 = 1e-5;
const SEPARATION_HORIZON: usize = 200;
/// Training-gap certificate targets.
const GAP_BOUND: usize = 8;
const LIMIT_SHARE: f64 = 0.34;
const LIMIT_SHARE_TOL: f64 = 0.005;
const ZERO_START_CYCLE3_TARGET: f64 = 0.397;
const CONTRACTION_EPS: f64 = 0.002;
const CONTRACTION_TARGET: f64 = 0.44;
const CONTRACTION_TOL: f64 = 0.005;
/// Welfare-ratio closed form agreement for the best-responding users.
const POA_TOL: f64 = 1e-6;
/// Approximate optimiser suite.
const ARMS_CASES: usize = 50;
const ARMS_MAX_HORIZON: usize = 18;
const ARMS_BUDGET: Duration = Duration::from_secs(300);
/// Property suites.
const PROPERTY_CASES: usize = 300;
const SOUNDNESS_INSTANCES: usize = 400;
const SOUNDNESS_SCHEMES_PER_INSTANCE: usize = 10;
/// Absolute slack for floating-point noise in the share and welfare bounds.
const FLOAT_NOISE: f64 = 1e-12;
/// Two trajectories started apart may coincide in floating point only once
/// their distance in the previous round was already below this.
const TIE_PREVIOUS_GAP: f64 = 1e-6;
/// Bistable instance: required separation and the rounds inspected.
const BISTABLE_SEPARATION: f64 = 0.9;
const BISTABLE_HORIZON: usize = 20;

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

struct Check {
    pass: bool,
    text: String,
}

fn check(pass: bool, text: impl Into<String>) -> Check {
    Check {
        pass,
        text: text.into(),
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn in_range(x: f64, (lo, hi): (f64, f64)) -> bool {
    (lo..=hi).contains(&x)
}

type CriterionFn = fn() -> Result<Vec<Check>>;

fn main() -> ExitCode {
    let criteria: [(u8, &str, CriterionFn); 10] = [
        (
            1,
            "per-round values of the reference ecosystem",
            round_values,
        ),
        (
            2,
            "exhaustive revenue optimum of the reference ecosystem",
            revenue_optimum,
        ),
        (
            3,
            "cumulative welfare ordering of the three schemes",
            welfare_ordering,
        ),
        (
            4,
            "long-run revenue enclosures of cyclic schemes",
            cycle_enclosures,
        ),
        (
            5,
            "alternating 2/3 scheme beats every short cycle",
            alternating_separation,
        ),
        (
            6,
            "training-gap certificate and contraction constant",
            gap_and_contraction,
        ),
        (
            7,
            "welfare ratio under best-responding users",
            welfare_ratio,
        ),
        (
            8,
            "approximate optimiser stays within its guarantee",
            arms_guarantee,
        ),
        (
            9,
            "randomised invariants of dynamics and regulator bounds",
            property_suites,
        ),
        (
            10,
            "bistable instance separates and is outside the contraction class",
            bistable,
        ),
    ];

    let mut failed = 0;
    for (id, title, run) in criteria {
        let started = Instant::now();
        let checks = run().unwrap_or_else(|e| vec![check(false, format!("library error: {e}"))]);
        let pass = checks.iter().all(|c| c.pass);
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {id:>2}: {title} ({:.2?})",
            if pass { "PASS" } else { "FAIL" },
            started.elapsed()
        );
        for c in &checks {
            println!("       [{}] {}", if c.pass { "ok" } else { "FAIL" }, c.text);
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

fn random_scheme(rng: &mut ChaCha8Rng, horizon: usize) -> TrainingScheme {
    let density: f64 = rng.gen();
    let bits = (0..horizon)
        .map(|t| t == 0 || rng.gen_bool(density))
        .collect();
    TrainingScheme::new(bits).expect("first round trains")
}

/// Exponentially decaying GenAI utility against a linear forum utility,
/// constructed so the utility assumption holds.
fn random_instance(rng: &mut ChaCha8Rng, beta_max: f64, horizon: usize) -> Instance {
    let u0 = rng.gen_range(0.1..3.0);
    let s = rng.gen_range(0.05..u0 * 1.5f64).min(u0);
    let c = rng.gen_range(0.0..u0);
    let a = rng.gen_range((u0 - c + 0.05)..(u0 - c + 4.0));
    let b = rng.gen_range(0.1..0.95);
    let beta = rng.gen_range(0.1..beta_max);
    Instance::new(InstanceParams {
        reward: 1.0,
        maintenance_cost: 0.3,
        training_cost: 0.2,
        decay: DecayUtility::exp_decay(a, b, c).unwrap(),
        network: NetworkUtility::linear(u0, s).unwrap(),
        sensitivity: Sensitivity::Finite(beta),
        initial_proportion: rng.gen(),
        horizon,
    })
    .expect("generated instance satisfies the utility assumption")
}

/// Instance inside the contraction class: `R^s(1) = 0` and
/// `beta * L < 16/7`. Costs are randomised too.
fn random_eligible_instance(rng: &mut ChaCha8Rng, horizon: usize) -> Instance {
    let u0 = rng.gen_range(0.2..2.0);
    let c = rng.gen_range(0.0..0.9 * u0);
    let a = rng.gen_range((u0 - c + 0.1)..(u0 - c + 3.0));
    let b = rng.gen_range(0.2..0.9);
    let beta_l = rng.gen_range(0.05..0.95 * BETA_L_LIMIT);
    let reward = rng.gen_range(0.5..2.0);
    Instance::new(InstanceParams {
        reward,
        maintenance_cost: rng.gen_range(0.0..reward),
        training_cost: rng.gen_range(0.0..1.0),
        decay: DecayUtility::exp_decay(a, b, c).unwrap(),
        network: NetworkUtility::linear(u0, u0).unwrap(),
        sensitivity: Sensitivity::Finite(beta_l / u0),
        initial_proportion: rng.gen(),
        horizon,
    })
    .expect("generated instance satisfies the utility assumption")
}

/// `(16 - 7 bL) / (14 bL e^{bL})`: the largest radius the contraction
/// result admits.
fn contraction_radius(instance: &Instance) -> f64 {
    let bl = instance.sensitivity().finite().unwrap() * instance.lipschitz_constant();
    (16.0 - 7.0 * bl) / (14.0 * bl * bl.exp())
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

fn round_values() -> Result<Vec<Check>> {
    let inst = presets::baseline();
    let scheme = TrainingScheme::no_training(inst.horizon())?;
    let started = Instant::now();
    let traj = simulate(&inst, &scheme)?;
    let elapsed = started.elapsed();
    Ok(vec![
        check(
            traj.u[0] == 3.0,
            format!("u_1 = 3 exactly (got {})", traj.u[0]),
        ),
        check(
            within(traj.v[0], -0.104, FIRST_REVENUE_TOL),
            format!("v_1 = -0.104 +- {FIRST_REVENUE_TOL:e} (got {})", traj.v[0]),
        ),
        check(
            in_range(traj.p[1], SECOND_SHARE),
            format!("p_2 in {SECOND_SHARE:?} (got {:.6})", traj.p[1]),
        ),
        check(
            in_range(traj.p[2], THIRD_SHARE),
            format!("p_3 in {THIRD_SHARE:?} (got {:.6})", traj.p[2]),
        ),
        check(
            elapsed < SIMULATE_BUDGET,
            format!("simulation under {SIMULATE_BUDGET:?} (took {elapsed:.2?})"),
        ),
    ])
}

fn revenue_optimum() -> Result<Vec<Check>> {
    let inst = presets::baseline();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("single-thread pool");
    let started = Instant::now();
    let best = pool.install(|| brute_force_revenue_opt(&inst))?;
    let elapsed = started.elapsed();
    let rounds = best.scheme.training_rounds();
    Ok(vec![
        check(
            rounds == [1, 4, 7, 9, 12, 14, 17],
            format!(
                "training rounds = {{1,4,7,9,12,14,17}} (got {rounds:?}, V = {:.10})",
                best.objective
            ),
        ),
        check(
            elapsed < BRUTE_BUDGET,
            format!("single-threaded search under {BRUTE_BUDGET:?} (took {elapsed:.2?})"),
        ),
    ])
}

fn welfare_ordering() -> Result<Vec<Check>> {
    let inst = presets::baseline();
    let horizon = inst.horizon();
    let none = simulate(&inst, &TrainingScheme::no_training(horizon)?)?;
    let rev = simulate(&inst, &brute_force_revenue_opt(&inst)?.scheme)?;
    let wel = simulate(&inst, &brute_force_welfare_opt(&inst)?.scheme)?;
    let cf = counterfactual_welfare(&inst);
    let per_round = inst.rs(0.0);
    let crossing = none
        .cumulative_welfare()
        .iter()
        .enumerate()
        .find(|(t, u)| **u < per_round * (t + 1) as f64)
        .map(|(t, _)| t + 1);
    let crossing_ok = crossing.is_some_and(|t| {
        t <= CROSSING_LATEST && (CROSSING_WINDOW.0..=CROSSING_WINDOW.1).contains(&t)
    });
    Ok(vec![
        check(
            wel.welfare > rev.welfare && rev.welfare > cf && cf > none.welfare,
            format!(
                "U(welfare opt) > U(revenue opt) > forum only > U(no training) at T={horizon} \
                 ({:.4} > {:.4} > {:.4} > {:.4})",
                wel.welfare, rev.welfare, cf, none.welfare
            ),
        ),
        check(
            crossing_ok,
            format!(
                "no-training welfare first falls below forum only at a round in {CROSSING_WINDOW:?}, \
                 at most {CROSSING_LATEST} (got {crossing:?})"
            ),
        ),
    ])
}

fn cycle_enclosures() -> Result<Vec<Check>> {
    let inst = presets::baseline();
    let started = Instant::now();
    let rows = cycle_table(&inst, 8, &[])?;
    let elapsed = started.elapsed();
    let mut checks = Vec::new();
    for (k, lo, hi) in CYCLE_ROWS {
        let gross = rows[k - 1].revenue.gross();
        checks.push(check(
            gross.hi() >= lo && gross.lo() <= hi,
            format!("k={k}: enclosure {gross} meets reference ({lo}, {hi})"),
        ));
    }
    let widest = rows
        .iter()
        .map(|r| r.revenue.gross().width())
        .fold(0.0, f64::max);
    checks.push(check(
        widest <= CYCLE_WIDTH_MAX,
        format!("every enclosure width <= {CYCLE_WIDTH_MAX:e} (widest {widest:.3e})"),
    ));
    checks.push(check(
        elapsed < CYCLE_BUDGET,
        format!("table for k=1..8 under {CYCLE_BUDGET:?} (took {elapsed:.2?})"),
    ));
    Ok(checks)
}

fn alternating_separation() -> Result<Vec<Check>> {
    let inst = presets::baseline();
    let margin = noncyclic_beats_cyclic(&inst, 2, 3, 8)?;
    let long = inst.with_horizon(SEPARATION_HORIZON)?;
    let alt = simulate(&long, &alternating_scheme(2, 3, SEPARATION_HORIZON)?)?.revenue;
    let mut best_cycle = (0, f64::NEG_INFINITY);
    for k in 1..=8 {
        let v = simulate(&long, &cyclic_scheme(k, SEPARATION_HORIZON)?)?.revenue;
        if v > best_cycle.1 {
            best_cycle = (k, v);
        }
    }
    Ok(vec![
        check(
            margin > SEPARATION_MARGIN,
            format!("certified long-run margin > {SEPARATION_MARGIN:e} (got {margin:.3e})"),
        ),
        check(
            alt > best_cycle.1,
            format!(
                "at T={SEPARATION_HORIZON}: V(alternating 2/3) = {alt:.8} > best cycle k={} V = {:.8}",
                best_cycle.0, best_cycle.1
            ),
        ),
    ])
}

fn gap_and_contraction() -> Result<Vec<Check>> {
    let inst = presets::baseline();
    let mut checks = Vec::new();
    match training_gap_bound(&inst)? {
        Some(cert) => {
            checks.push(check(
                cert.t0 == GAP_BOUND,
                format!("training-gap bound = {GAP_BOUND} (got {})", cert.t0),
            ));
            checks.push(check(
                within(cert.limit_proportion, LIMIT_SHARE, LIMIT_SHARE_TOL),
                format!(
                    "limiting share = {LIMIT_SHARE} +- {LIMIT_SHARE_TOL} (got {:.6})",
                    cert.limit_proportion
                ),
            ));
        }
        None => checks.push(check(false, "training-gap bound exists")),
    }
    // Cycle-3 training over the first 8 rounds from a zero starting share.
    let zero_start = inst.with_initial_proportion(0.0)?.with_horizon(GAP_BOUND)?;
    let traj = simulate(&zero_start, &cyclic_scheme(3, GAP_BOUND)?)?;
    let sum_v: f64 = traj.v.iter().sum();
    checks.push(check(
        sum_v > ZERO_START_CYCLE3_TARGET,
        format!(
            "zero-start cycle-3 revenue over {GAP_BOUND} rounds > {ZERO_START_CYCLE3_TARGET} (got {sum_v:.6}; \
             known unattainable for this model)"
        ),
    ));
    let gamma = contraction_factor(&inst, CONTRACTION_EPS)?;
    checks.push(check(
        within(gamma, CONTRACTION_TARGET, CONTRACTION_TOL),
        format!("contraction factor at eps={CONTRACTION_EPS} = {CONTRACTION_TARGET} +- {CONTRACTION_TOL} (got {gamma:.6})"),
    ));
    Ok(checks)
}

fn welfare_ratio() -> Result<Vec<Check>> {
    let closed_form = |inst: &Instance| {
        let horizon = inst.horizon();
        horizon as f64 * inst.rc(0) / (1..=horizon).map(|t| inst.rc(t - 1)).sum::<f64>()
    };
    let at20 = presets::strategic_users(20);
    let at24 = presets::strategic_users(24);
    let poa20 = price_of_anarchy(&at20)?;
    let poa24 = price_of_anarchy(&at24)?;
    let expected = closed_form(&at20);
    Ok(vec![
        check(
            within(poa20, expected, POA_TOL),
            format!("ratio at T=20 = closed form {expected:.9} +- {POA_TOL:e} (got {poa20:.9})"),
        ),
        check(
            poa24 > poa20,
            format!("ratio grows from T=20 to T=24 ({poa20:.9} -> {poa24:.9})"),
        ),
    ])
}

fn arms_guarantee() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let started = Instant::now();
    let mut violations = Vec::new();
    let mut flag_missing = 0;
    for case in 0..ARMS_CASES {
        let horizon = rng.gen_range(2..=ARMS_MAX_HORIZON);
        let inst = random_eligible_instance(&mut rng, horizon);
        let threshold = contraction_radius(&inst) / horizon as f64;
        let eps = threshold.min(0.05) * rng.gen_range(0.2..0.9);
        let approx = solve_arms(&inst, eps)?;
        let exact = brute_force_revenue_opt(&inst)?;
        if !approx.guarantee {
            flag_missing += 1;
        }
        let allowance = eps * inst.reward() * horizon as f64;
        if approx.result.objective < exact.objective - allowance {
            violations.push(format!(
                "case {case}: T={horizon} eps={eps:.3e} approx {:.9} < exact {:.9} - {allowance:.3e}",
                approx.result.objective, exact.objective
            ));
        }
    }
    let elapsed = started.elapsed();
    let mut checks = vec![
        check(
            violations.is_empty(),
            format!(
                "{ARMS_CASES} random instances (T <= {ARMS_MAX_HORIZON}): V(approx) >= V(exact) - eps*r*T \
                 ({} violations)",
                violations.len()
            ),
        ),
        check(flag_missing == 0, format!("guarantee flag set on every case ({flag_missing} missing)")),
        check(elapsed < ARMS_BUDGET, format!("suite under {ARMS_BUDGET:?} (took {elapsed:.2?})")),
    ];
    checks.extend(violations.into_iter().take(3).map(|v| check(false, v)));
    Ok(checks)
}

fn property_suites() -> Result<Vec<Check>> {
    Ok(vec![
        higher_start_stays_higher()?,
        sandwich_contains_trajectory()?,
        estimate_error_contracts()?,
        noisy_bounds_per_offset()?,
        noisy_bounds_aggregate()?,
        sufficient_test_is_sound()?,
        necessary_test_is_sound()?,
    ])
}

/// A higher starting share stays strictly higher under any scheme.
fn higher_start_stays_higher() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0901);
    let mut violations = 0;
    let mut ties = 0;
    for _ in 0..PROPERTY_CASES {
        let horizon = rng.gen_range(1..=30);
        let inst = random_instance(&mut rng, 3.0, horizon);
        let p1 = inst.initial_proportion();
        let d = rng.gen_range(0.01..=1.0f64).min(1.0 - p1);
        if d <= 0.0 {
            continue;
        }
        let scheme = random_scheme(&mut rng, horizon);
        let low = simulate(&inst, &scheme)?;
        let high = simulate(&inst.with_initial_proportion(p1 + d)?, &scheme)?;
        for t in 0..horizon {
            if high.p[t] > low.p[t] {
                continue;
            }
            let tie_explained =
                high.p[t] == low.p[t] && t > 0 && high.p[t - 1] - low.p[t - 1] < TIE_PREVIOUS_GAP;
            if tie_explained {
                ties += 1;
            } else {
                violations += 1;
            }
        }
    }
    Ok(check(
        violations == 0,
        format!(
            "higher starting share stays strictly higher: {PROPERTY_CASES} cases, {violations} violations \
             ({ties} rounding ties after a gap below {TIE_PREVIOUS_GAP:e})"
        ),
    ))
}

/// Every round of every window lies between the auxiliary sequences seeded
/// at 0 and 1.
fn sandwich_contains_trajectory() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0902);
    let mut violations = 0;
    for _ in 0..PROPERTY_CASES {
        let horizon = rng.gen_range(1..=30);
        let inst = random_instance(&mut rng, 20.0, horizon);
        let scheme = random_scheme(&mut rng, horizon);
        let traj = simulate(&inst, &scheme)?;
        for (start, len) in scheme.windows() {
            let q0 = aux_sequence(&inst, 0.0, len)?;
            let q1 = aux_sequence(&inst, 1.0, len)?;
            for t in 0..len {
                let p = traj.p[start - 1 + t];
                if p < q0[t] - FLOAT_NOISE || p > q1[t] + FLOAT_NOISE {
                    violations += 1;
                }
            }
        }
    }
    Ok(check(
        violations == 0,
        format!("window shares lie between the 0- and 1-seeded sequences: {PROPERTY_CASES} cases, {violations} violations"),
    ))
}

/// Picks a training round of a random scheme and its window length.
fn random_window(rng: &mut ChaCha8Rng, scheme: &TrainingScheme) -> (usize, usize) {
    let windows = scheme.windows();
    windows[rng.gen_range(0..windows.len())]
}

/// Starting an auxiliary sequence within `eps` of the true training-round
/// share keeps it within `eps * gamma^t` at offset `t`.
fn estimate_error_contracts() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0903);
    let mut violations = 0;
    for _ in 0..PROPERTY_CASES {
        let horizon = rng.gen_range(1..=30);
        let inst = random_eligible_instance(&mut rng, horizon);
        let eps = contraction_radius(&inst).min(0.5) * rng.gen_range(0.05..0.95);
        let gamma = contraction_factor(&inst, eps)?;
        let scheme = random_scheme(&mut rng, horizon);
        let traj = simulate(&inst, &scheme)?;
        let (start, len) = random_window(&mut rng, &scheme);
        let p_tau = traj.p[start - 1];
        let alpha = (p_tau + eps * rng.gen_range(-0.999..0.999)).clamp(0.0, 1.0);
        let q = aux_sequence(&inst, alpha, len)?;
        let window = &traj.p[start - 1..start - 1 + len];
        for (t, (p, q)) in window.iter().zip(&q).enumerate() {
            if (p - q).abs() >= eps * gamma.powi(t as i32) + FLOAT_NOISE {
                violations += 1;
            }
        }
    }
    Ok(check(
        violations == 0,
        format!("estimate error shrinks by the contraction factor: {PROPERTY_CASES} cases, {violations} violations"),
    ))
}

/// Noisy per-offset welfare bounds hold and are within
/// `2 eps gamma^t (R^c(t) + 2L)` of the true welfare.
fn noisy_bounds_per_offset() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0904);
    let mut violations = 0;
    for _ in 0..PROPERTY_CASES {
        let horizon = rng.gen_range(1..=30);
        let inst = random_eligible_instance(&mut rng, horizon);
        let eps = (contraction_radius(&inst) / 2.0).min(0.25) * rng.gen_range(0.05..0.95);
        let gamma = contraction_factor(&inst, 2.0 * eps)?;
        let l = inst.lipschitz_constant();
        let scheme = random_scheme(&mut rng, horizon);
        let traj = simulate(&inst, &scheme)?;
        let (start, len) = random_window(&mut rng, &scheme);
        let p_hat = (traj.p[start - 1] + eps * rng.gen_range(-1.0..=1.0)).clamp(0.0, 1.0);
        let bounds = noisy_welfare_bounds(&inst, p_hat, eps, len)?;
        if !bounds.guarantee {
            violations += 1;
        }
        for t in 0..len {
            let u = traj.u[start - 1 + t];
            let reach = 2.0 * eps * gamma.powi(t as i32) * (inst.rc(t) + 2.0 * l) + FLOAT_NOISE;
            let below = u - bounds.u_lo[t];
            let above = bounds.u_hi[t] - u;
            if below < -FLOAT_NOISE || below > reach || above < -FLOAT_NOISE || above > reach {
                violations += 1;
            }
        }
    }
    Ok(check(
        violations == 0,
        format!("noisy per-offset welfare bounds hold and are tight: {PROPERTY_CASES} cases, {violations} violations"),
    ))
}

/// The total width of the noisy bounds never exceeds the provable gap.
fn noisy_bounds_aggregate() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0905);
    let mut violations = 0;
    for _ in 0..PROPERTY_CASES {
        let inst = random_eligible_instance(&mut rng, 1);
        let eps = (contraction_radius(&inst) / 2.0).min(0.25) * rng.gen_range(0.05..0.95);
        let delta = rng.gen_range(1..=30);
        let p_hat: f64 = rng.gen();
        let bounds = noisy_welfare_bounds(&inst, p_hat, eps, delta)?;
        let gap = bound_gap(&inst, eps, delta)?;
        if bounds.sum_hi() - bounds.sum_lo() > gap + FLOAT_NOISE {
            violations += 1;
        }
    }
    Ok(check(
        violations == 0,
        format!("total noisy bound width within the provable gap: {PROPERTY_CASES} cases, {violations} violations"),
    ))
}

/// Samples schemes on random instances and returns, per scheme, the
/// instance, the scheme's longest gap and whether it helps users.
fn soundness_cases(seed: u64) -> Result<Vec<(Instance, TrainingScheme, bool)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for _ in 0..SOUNDNESS_INSTANCES {
        let horizon = rng.gen_range(1..=30);
        let beta_max = if rng.gen_bool(0.5) { 3.0 } else { 20.0 };
        let inst = random_instance(&mut rng, beta_max, horizon);
        for _ in 0..SOUNDNESS_SCHEMES_PER_INSTANCE {
            let scheme = random_scheme(&mut rng, horizon);
            let helps = simulate(&inst, &scheme)?.welfare >= counterfactual_welfare(&inst);
            cases.push((inst.clone(), scheme, helps));
        }
    }
    Ok(cases)
}

/// Passing the sufficient window test at some length at least the scheme's
/// longest gap means the scheme helps users.
fn sufficient_test_is_sound() -> Result<Check> {
    let cases = soundness_cases(0x5eed_0906)?;
    let mut violations = 0;
    let mut exercised = 0;
    for (inst, scheme, helps) in &cases {
        let longest = scheme.max_gap();
        let mut certified = false;
        for delta in longest..=inst.horizon().max(longest) {
            if check_sufficient(inst, delta)? {
                certified = true;
                break;
            }
        }
        if certified {
            exercised += 1;
            if !helps {
                violations += 1;
            }
        }
    }
    Ok(check(
        violations == 0,
        format!(
            "sufficient window test implies the scheme helps users: {} cases ({exercised} certified), \
             {violations} violations",
            cases.len()
        ),
    ))
}

/// A scheme that helps users passes the necessary window test at its
/// longest gap.
fn necessary_test_is_sound() -> Result<Check> {
    let cases = soundness_cases(0x5eed_0907)?;
    let mut violations = 0;
    let mut helping = 0;
    for (inst, scheme, helps) in &cases {
        if *helps {
            helping += 1;
            if !check_necessary(inst, scheme.max_gap())? {
                violations += 1;
            }
        }
    }
    Ok(check(
        violations == 0,
        format!(
            "helping users implies passing the necessary window test at the longest gap: {} cases \
             ({helping} helping), {violations} violations; known to fail when short high-welfare \
             windows offset a long harmful one",
            cases.len()
        ),
    ))
}

fn bistable() -> Result<Vec<Check>> {
    let low_starts = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7];
    let high_starts = [0.8, 0.9, 1.0];
    let paths = |starts: &[f64]| -> Result<Vec<Vec<f64>>> {
        starts
            .iter()
            .map(|&p1| {
                let inst = presets::bistable(p1).with_horizon(BISTABLE_HORIZON)?;
                Ok(simulate(&inst, &TrainingScheme::no_training(BISTABLE_HORIZON)?)?.p)
            })
            .collect()
    };
    let low = paths(&low_starts)?;
    let high = paths(&high_starts)?;
    let separation: Vec<f64> = (0..BISTABLE_HORIZON)
        .map(|t| {
            let low_max = low.iter().map(|p| p[t]).fold(f64::NEG_INFINITY, f64::max);
            let high_min = high.iter().map(|p| p[t]).fold(f64::INFINITY, f64::min);
            high_min - low_max
        })
        .collect();
    let separated: Vec<usize> = separation
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > BISTABLE_SEPARATION)
        .map(|(t, _)| t + 1)
        .collect();
    let best = separation.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let reason = contraction_factor(&presets::bistable(0.5), CONTRACTION_EPS)
        .err()
        .and_then(|e| e.eligibility_reason());
    Ok(vec![
        check(
            !separated.is_empty(),
            format!(
                "starts <= 0.7 and >= 0.8 differ by > {BISTABLE_SEPARATION} at some round <= {BISTABLE_HORIZON} \
                 (rounds {separated:?}, widest {best:.4})"
            ),
        ),
        check(
            reason == Some(EligibilityReason::BetaLTooLarge),
            format!("contraction factor rejected with BETA_L_TOO_LARGE (got {reason:?})"),
        ),
    ])
}

//! Ready-made instances used throughout the tests, the CLI and the docs.

use crate::model::{DecayUtility, Instance, InstanceParams, NetworkUtility, Sensitivity};

/// The reference ecosystem: `r = 1`, `c_m = 0.6`, `c_train = 0.504`,
/// `R^c(t) = 3 * 0.5^t`, `R^s(p) = 1 - p`, `beta = 1`, `p1 = 1`, `T = 20`.
pub fn baseline() -> Instance {
    Instance::new(InstanceParams {
        reward: 1.0,
        maintenance_cost: 0.6,
        training_cost: 0.504,
        decay: DecayUtility::ExpDecay {
            a: 3.0,
            b: 0.5,
            c: 0.0,
        },
        network: NetworkUtility::Linear {
            u0: 1.0,
            s: 1.0,
            allow_negative: false,
        },
        sensitivity: Sensitivity::Finite(1.0),
        initial_proportion: 1.0,
        horizon: 20,
    })
    .expect("baseline instance is valid")
}

/// Best-responding users with training priced out (`c_train = 2T`), so the
/// revenue-maximising platform never retrains while welfare wants it every
/// round. The welfare ratio between the two grows with `T`.
pub fn strategic_users(horizon: usize) -> Instance {
    Instance::new(InstanceParams {
        reward: 1.0,
        maintenance_cost: 0.6,
        training_cost: 2.0 * horizon as f64,
        decay: DecayUtility::ExpDecay {
            a: 3.0,
            b: 0.5,
            c: 0.0,
        },
        network: NetworkUtility::Linear {
            u0: 1.0,
            s: 1.0,
            allow_negative: false,
        },
        sensitivity: Sensitivity::Infinite,
        initial_proportion: 1.0,
        horizon,
    })
    .expect("strategic-users instance is valid")
}

/// A steep logistic network effect (`k = 100`, midpoint `0.8`) with
/// `R^c(t) = 1.1 * 0.8^t` and `beta = 10`: the long-run share depends on the
/// starting share. Costs match [`baseline`].
pub fn bistable(initial_proportion: f64) -> Instance {
    Instance::new(InstanceParams {
        reward: 1.0,
        maintenance_cost: 0.6,
        training_cost: 0.504,
        decay: DecayUtility::ExpDecay {
            a: 1.1,
            b: 0.8,
            c: 0.0,
        },
        network: NetworkUtility::Logistic { k: 100.0, m: 0.8 },
        sensitivity: Sensitivity::Finite(10.0),
        initial_proportion,
        horizon: 20,
    })
    .expect("bistable instance is valid")
}

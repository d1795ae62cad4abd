//! Flat `key = value` run configuration.
//!
//! ```text
//! # reference ecosystem
//! r = 1
//! c_m = 0.6
//! c_train = 0.504
//! rc = exp_decay(3, 0.5, 0)
//! rs = linear(1, 1)
//! beta = 1
//! p1 = 1
//! T = 20
//! scheme = optimal:brute
//! ```
//!
//! Function specs: `exp_decay(a, b, c)`, `tabulated(v0, v1, ...; tail=x)` for
//! `rc`; `linear(u0, s)`, `linear(u0, s, allow_negative)`, `logistic(k, m)`,
//! `tabulated(p0:v0, p1:v1, ...)` for `rs`. `beta` accepts `inf`. Everything
//! after `#` on a line is a comment.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use crate::cyclic::{alternating_scheme, cyclic_scheme, DEFAULT_K_MAX};
use crate::error::{Error, Result};
use crate::model::{
    DecayUtility, Instance, InstanceParams, NetworkUtility, Sensitivity, TrainingScheme,
};
use crate::optimizer::{
    arms, brute_force_revenue_opt_with, brute_force_welfare_opt_with, BruteForceOptions,
    DEFAULT_BRUTE_FORCE_CAP,
};

/// Distinct failure classes of [`parse_config`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigErrorCode {
    Syntax,
    UnknownKey,
    DuplicateKey,
    MissingKey,
    TypeMismatch,
    InvalidInstance,
}

impl ConfigErrorCode {
    pub fn code(self) -> &'static str {
        match self {
            ConfigErrorCode::Syntax => "SYNTAX",
            ConfigErrorCode::UnknownKey => "UNKNOWN_KEY",
            ConfigErrorCode::DuplicateKey => "DUPLICATE_KEY",
            ConfigErrorCode::MissingKey => "MISSING_KEY",
            ConfigErrorCode::TypeMismatch => "TYPE_MISMATCH",
            ConfigErrorCode::InvalidInstance => "INVALID_INSTANCE",
        }
    }
}

impl fmt::Display for ConfigErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{code}{}{}: {message}",
    line.map(|l| format!(" at line {l}")).unwrap_or_default(),
    field.as_ref().map(|f| format!(" ({f})")).unwrap_or_default())]
pub struct ConfigError {
    pub code: ConfigErrorCode,
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn new(
        code: ConfigErrorCode,
        line: Option<usize>,
        field: Option<&str>,
        message: impl Into<String>,
    ) -> Self {
        ConfigError {
            code,
            line,
            field: field.map(str::to_owned),
            message: message.into(),
        }
    }
}

/// Which training scheme a run uses.
#[derive(Debug, Clone, PartialEq)]
pub enum SchemeSpec {
    Bits(TrainingScheme),
    Cyclic(usize),
    Alternating(usize, usize),
    /// Exact revenue maximiser.
    OptimalBrute,
    /// Approximate revenue maximiser with the given grid step.
    OptimalArms(f64),
    /// Exact welfare maximiser.
    WelfareOpt,
    /// Train in round 1 only.
    NoTraining,
}

impl SchemeSpec {
    /// Materialise the scheme for an instance.
    pub fn resolve(&self, instance: &Instance, brute: BruteForceOptions) -> Result<TrainingScheme> {
        let horizon = instance.horizon();
        match self {
            SchemeSpec::Bits(s) => {
                if s.horizon() != horizon {
                    return Err(Error::Shape(format!(
                        "scheme has {} rounds but T = {horizon}",
                        s.horizon()
                    )));
                }
                Ok(s.clone())
            }
            SchemeSpec::Cyclic(k) => cyclic_scheme(*k, horizon),
            SchemeSpec::Alternating(a1, a2) => alternating_scheme(*a1, *a2, horizon),
            SchemeSpec::OptimalBrute => Ok(brute_force_revenue_opt_with(instance, brute)?.scheme),
            SchemeSpec::OptimalArms(eps) => Ok(arms(instance, *eps)?.scheme),
            SchemeSpec::WelfareOpt => Ok(brute_force_welfare_opt_with(instance, brute)?.scheme),
            SchemeSpec::NoTraining => TrainingScheme::no_training(horizon),
        }
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeSpec::Bits(s) => write!(f, "{s}"),
            SchemeSpec::Cyclic(k) => write!(f, "cyclic:{k}"),
            SchemeSpec::Alternating(a1, a2) => write!(f, "alternating:{a1}:{a2}"),
            SchemeSpec::OptimalBrute => f.write_str("optimal:brute"),
            SchemeSpec::OptimalArms(eps) => write!(f, "optimal:arms:{eps}"),
            SchemeSpec::WelfareOpt => f.write_str("welfare-opt"),
            SchemeSpec::NoTraining => f.write_str("none:x0"),
        }
    }
}

impl FromStr for SchemeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parts: Vec<&str> = s.split(':').collect();
        let count = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::Parameter(format!("expected a round count, got {v:?}")))
        };
        match parts.as_slice() {
            ["cyclic", k] => Ok(SchemeSpec::Cyclic(count(k)?)),
            ["alternating", a1, a2] => Ok(SchemeSpec::Alternating(count(a1)?, count(a2)?)),
            ["optimal", "brute"] => Ok(SchemeSpec::OptimalBrute),
            ["optimal", "arms", eps] => eps
                .parse::<f64>()
                .map(SchemeSpec::OptimalArms)
                .map_err(|_| Error::Parameter(format!("expected a grid step, got {eps:?}"))),
            ["welfare-opt"] => Ok(SchemeSpec::WelfareOpt),
            ["none", "x0"] | ["none"] => Ok(SchemeSpec::NoTraining),
            [bits] if !bits.is_empty() && bits.chars().all(|c| c == '0' || c == '1') => {
                Ok(SchemeSpec::Bits(bits.parse()?))
            }
            _ => Err(Error::Parameter(format!("unrecognised scheme spec {s:?}"))),
        }
    }
}

/// Options consumed by individual subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOptions {
    pub delta: Option<usize>,
    pub eps: Option<f64>,
    pub p_hat: Option<f64>,
    pub k_max: usize,
    pub brute_cap: usize,
    pub p1_values: Vec<f64>,
    pub out: Option<PathBuf>,
}

impl Default for CommandOptions {
    fn default() -> Self {
        CommandOptions {
            delta: None,
            eps: None,
            p_hat: None,
            k_max: DEFAULT_K_MAX,
            brute_cap: DEFAULT_BRUTE_FORCE_CAP,
            p1_values: Vec::new(),
            out: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub instance: Instance,
    pub scheme: Option<SchemeSpec>,
    pub options: CommandOptions,
}

const INSTANCE_KEYS: [&str; 8] = ["r", "c_m", "c_train", "rc", "rs", "beta", "p1", "T"];
const OPTION_KEYS: [&str; 8] = [
    "scheme",
    "delta",
    "eps",
    "p_hat",
    "k_max",
    "brute_cap",
    "p1_values",
    "out",
];

struct Entry<'a> {
    line: usize,
    value: &'a str,
}

fn mismatch(key: &str, line: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError::new(ConfigErrorCode::TypeMismatch, Some(line), Some(key), msg)
}

fn real(key: &str, e: &Entry) -> std::result::Result<f64, ConfigError> {
    e.value
        .parse::<f64>()
        .map_err(|_| mismatch(key, e.line, format!("expected a number, got {:?}", e.value)))
}

fn count(key: &str, e: &Entry) -> std::result::Result<usize, ConfigError> {
    e.value.parse::<usize>().map_err(|_| {
        mismatch(
            key,
            e.line,
            format!("expected a non-negative integer, got {:?}", e.value),
        )
    })
}

/// Split `name(args)` into the name and the argument text.
fn call<'a>(key: &str, e: &Entry<'a>) -> std::result::Result<(&'a str, &'a str), ConfigError> {
    let v = e.value;
    let open = v.find('(');
    match open {
        Some(i) if v.ends_with(')') => Ok((v[..i].trim(), &v[i + 1..v.len() - 1])),
        _ => Err(mismatch(
            key,
            e.line,
            format!("expected a function spec like name(args), got {v:?}"),
        )),
    }
}

fn numbers(key: &str, line: usize, text: &str) -> std::result::Result<Vec<f64>, ConfigError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|a| {
            let a = a.trim();
            a.parse::<f64>()
                .map_err(|_| mismatch(key, line, format!("expected a number, got {a:?}")))
        })
        .collect()
}

fn invalid(key: &str, line: usize, err: Error) -> ConfigError {
    ConfigError::new(
        ConfigErrorCode::InvalidInstance,
        Some(line),
        Some(key),
        err.to_string(),
    )
}

fn parse_decay(e: &Entry) -> std::result::Result<DecayUtility, ConfigError> {
    let (name, args) = call("rc", e)?;
    match name {
        "exp_decay" => {
            let v = numbers("rc", e.line, args)?;
            let [a, b, c] = v[..] else {
                return Err(mismatch(
                    "rc",
                    e.line,
                    "exp_decay takes three arguments (a, b, c)",
                ));
            };
            DecayUtility::exp_decay(a, b, c).map_err(|err| invalid("rc", e.line, err))
        }
        "tabulated" => {
            let (vals, tail) = args
                .split_once(';')
                .ok_or_else(|| mismatch("rc", e.line, "tabulated decay needs `; tail=x`"))?;
            let tail = tail
                .trim()
                .strip_prefix("tail")
                .and_then(|t| t.trim().strip_prefix('='))
                .ok_or_else(|| mismatch("rc", e.line, "tabulated decay needs `; tail=x`"))?
                .trim();
            let tail = tail
                .parse::<f64>()
                .map_err(|_| mismatch("rc", e.line, format!("expected a number, got {tail:?}")))?;
            let values = numbers("rc", e.line, vals)?;
            DecayUtility::tabulated(values, tail).map_err(|err| invalid("rc", e.line, err))
        }
        other => Err(mismatch(
            "rc",
            e.line,
            format!("unknown decay family {other:?}"),
        )),
    }
}

fn parse_network(e: &Entry) -> std::result::Result<NetworkUtility, ConfigError> {
    let (name, args) = call("rs", e)?;
    match name {
        "linear" => {
            let parts: Vec<&str> = args.split(',').map(str::trim).collect();
            let (nums, allow) = match parts.as_slice() {
                [u0, s] => ([*u0, *s], false),
                [u0, s, "allow_negative"] => ([*u0, *s], true),
                _ => {
                    return Err(mismatch(
                        "rs",
                        e.line,
                        "linear takes (u0, s) or (u0, s, allow_negative)",
                    ));
                }
            };
            let v = numbers("rs", e.line, &nums.join(","))?;
            let res = if allow {
                NetworkUtility::linear_allow_negative(v[0], v[1])
            } else {
                NetworkUtility::linear(v[0], v[1])
            };
            res.map_err(|err| invalid("rs", e.line, err))
        }
        "logistic" => {
            let v = numbers("rs", e.line, args)?;
            let [k, m] = v[..] else {
                return Err(mismatch(
                    "rs",
                    e.line,
                    "logistic takes two arguments (k, m)",
                ));
            };
            NetworkUtility::logistic(k, m).map_err(|err| invalid("rs", e.line, err))
        }
        "tabulated" => {
            let points = args
                .split(',')
                .map(|pair| {
                    let (p, v) = pair.split_once(':').ok_or_else(|| {
                        mismatch(
                            "rs",
                            e.line,
                            format!("expected p:value, got {:?}", pair.trim()),
                        )
                    })?;
                    let p = numbers("rs", e.line, p)?[0];
                    let v = numbers("rs", e.line, v)?[0];
                    Ok((p, v))
                })
                .collect::<std::result::Result<Vec<_>, ConfigError>>()?;
            NetworkUtility::tabulated(points).map_err(|err| invalid("rs", e.line, err))
        }
        other => Err(mismatch(
            "rs",
            e.line,
            format!("unknown network family {other:?}"),
        )),
    }
}

fn parse_sensitivity(e: &Entry) -> std::result::Result<Sensitivity, ConfigError> {
    match e.value.to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "+inf" => Ok(Sensitivity::Infinite),
        _ => Ok(Sensitivity::Finite(real("beta", e)?)),
    }
}

pub fn parse_config(text: &str) -> std::result::Result<RunConfig, ConfigError> {
    let mut entries: HashMap<&str, Entry> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            ConfigError::new(
                ConfigErrorCode::Syntax,
                Some(line),
                None,
                format!("expected `key = value`, got {content:?}"),
            )
        })?;
        let key = key.trim();
        let value = value.trim();
        if !INSTANCE_KEYS.contains(&key) && !OPTION_KEYS.contains(&key) {
            return Err(ConfigError::new(
                ConfigErrorCode::UnknownKey,
                Some(line),
                Some(key),
                "unknown key",
            ));
        }
        if let Some(prev) = entries.insert(key, Entry { line, value }) {
            return Err(ConfigError::new(
                ConfigErrorCode::DuplicateKey,
                Some(line),
                Some(key),
                format!("already set at line {}", prev.line),
            ));
        }
    }
    for key in INSTANCE_KEYS {
        if !entries.contains_key(key) {
            return Err(ConfigError::new(
                ConfigErrorCode::MissingKey,
                None,
                Some(key),
                "required key is missing",
            ));
        }
    }
    let get = |k: &str| &entries[k];
    let params = InstanceParams {
        reward: real("r", get("r"))?,
        maintenance_cost: real("c_m", get("c_m"))?,
        training_cost: real("c_train", get("c_train"))?,
        decay: parse_decay(get("rc"))?,
        network: parse_network(get("rs"))?,
        sensitivity: parse_sensitivity(get("beta"))?,
        initial_proportion: real("p1", get("p1"))?,
        horizon: count("T", get("T"))?,
    };
    let instance = Instance::new(params).map_err(|err| {
        ConfigError::new(
            ConfigErrorCode::InvalidInstance,
            None,
            None,
            err.to_string(),
        )
    })?;

    let mut options = CommandOptions::default();
    let mut scheme = None;
    if let Some(e) = entries.get("scheme") {
        scheme = Some(
            e.value
                .parse::<SchemeSpec>()
                .map_err(|err| mismatch("scheme", e.line, err.to_string()))?,
        );
    }
    if let Some(e) = entries.get("delta") {
        options.delta = Some(count("delta", e)?);
    }
    if let Some(e) = entries.get("eps") {
        options.eps = Some(real("eps", e)?);
    }
    if let Some(e) = entries.get("p_hat") {
        options.p_hat = Some(real("p_hat", e)?);
    }
    if let Some(e) = entries.get("k_max") {
        options.k_max = count("k_max", e)?;
    }
    if let Some(e) = entries.get("brute_cap") {
        options.brute_cap = count("brute_cap", e)?;
    }
    if let Some(e) = entries.get("p1_values") {
        options.p1_values = numbers("p1_values", e.line, e.value)?;
    }
    if let Some(e) = entries.get("out") {
        options.out = Some(PathBuf::from(e.value));
    }
    Ok(RunConfig {
        instance,
        scheme,
        options,
    })
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn emit_decay(d: &DecayUtility) -> String {
    match d {
        DecayUtility::ExpDecay { a, b, c } => format!("exp_decay({a}, {b}, {c})"),
        DecayUtility::Tabulated { values, tail } => {
            format!("tabulated({}; tail={tail})", join(values))
        }
    }
}

fn emit_network(n: &NetworkUtility) -> String {
    match n {
        NetworkUtility::Linear {
            u0,
            s,
            allow_negative: false,
        } => format!("linear({u0}, {s})"),
        NetworkUtility::Linear {
            u0,
            s,
            allow_negative: true,
        } => format!("linear({u0}, {s}, allow_negative)"),
        NetworkUtility::Logistic { k, m } => format!("logistic({k}, {m})"),
        NetworkUtility::Tabulated { points } => format!(
            "tabulated({})",
            points
                .iter()
                .map(|(p, v)| format!("{p}:{v}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

/// Canonical text form; `parse_config(&emit_config(c)) == Ok(c)`.
pub fn emit_config(cfg: &RunConfig) -> String {
    let p = cfg.instance.params();
    let beta = match p.sensitivity {
        Sensitivity::Finite(b) => b.to_string(),
        Sensitivity::Infinite => "inf".to_string(),
    };
    let mut out = format!(
        "r = {}\nc_m = {}\nc_train = {}\nrc = {}\nrs = {}\nbeta = {beta}\np1 = {}\nT = {}\n",
        p.reward,
        p.maintenance_cost,
        p.training_cost,
        emit_decay(&p.decay),
        emit_network(&p.network),
        p.initial_proportion,
        p.horizon,
    );
    if let Some(s) = &cfg.scheme {
        out.push_str(&format!("scheme = {s}\n"));
    }
    let o = &cfg.options;
    if let Some(d) = o.delta {
        out.push_str(&format!("delta = {d}\n"));
    }
    if let Some(e) = o.eps {
        out.push_str(&format!("eps = {e}\n"));
    }
    if let Some(p) = o.p_hat {
        out.push_str(&format!("p_hat = {p}\n"));
    }
    out.push_str(&format!(
        "k_max = {}\nbrute_cap = {}\n",
        o.k_max, o.brute_cap
    ));
    if !o.p1_values.is_empty() {
        out.push_str(&format!("p1_values = {}\n", join(&o.p1_values)));
    }
    if let Some(path) = &o.out {
        out.push_str(&format!("out = {}\n", path.display()));
    }
    out
}

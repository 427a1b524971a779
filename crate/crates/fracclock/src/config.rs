//! Run configuration: a small JSON schema and an equivalent key=value text
//! form, both validated into the same `RunConfig` with field-level
//! diagnostics.

use crate::spectral::MethodTag;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub grid: GridConfig,
    pub methods: Vec<MethodTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub domain: DomainConfig,
    /// Named initial datum: sine, product-sine, bump, or polynomial.
    pub initial: String,
    pub order: OrderConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainConfig {
    Interval { length: f64 },
    Box { sides: Vec<f64> },
}

/// Which problem family is being solved: a fractional order beta in (0,1]
/// (1 is the heat baseline), a higher-order integer m >= 2 (beta = 1/m), an
/// alpha-stable clock index in (0,2], or an iteration depth k >= 1
/// (beta = 1/2^k).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderConfig {
    Beta(f64),
    M(u32),
    Alpha(f64),
    K(u32),
}

impl OrderConfig {
    /// The effective fractional order for spectral/inverse-stable routes.
    pub fn beta(&self) -> Option<f64> {
        match *self {
            OrderConfig::Beta(b) => Some(b),
            OrderConfig::M(m) => Some(1.0 / m as f64),
            OrderConfig::K(k) => Some(0.5f64.powi(k as i32)),
            OrderConfig::Alpha(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub times: Vec<f64>,
    /// Spatial points; coordinate count must match the domain dimension.
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub n: u64,
    pub h: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_spectral_tol")]
    pub spectral: f64,
    #[serde(default = "default_quadrature_tol")]
    pub quadrature: f64,
}

fn default_spectral_tol() -> f64 {
    1e-10
}

fn default_quadrature_tol() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { spectral: default_spectral_tol(), quadrature: default_quadrature_tol() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_prefix")]
    pub prefix: String,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from(".")
}

fn default_prefix() -> String {
    "run".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: default_out_dir(), prefix: default_prefix() }
    }
}

/// One field-level diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    pub field: String,
    pub message: String,
}

/// All diagnostics for a rejected configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub issues: Vec<ConfigIssue>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration rejected:")?;
        for issue in &self.issues {
            write!(f, "\n  {}: {}", issue.field, issue.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    fn one(field: &str, message: impl Into<String>) -> Self {
        ConfigError {
            issues: vec![ConfigIssue { field: field.into(), message: message.into() }],
        }
    }
}

/// Parse a configuration from text: JSON when the first non-blank byte is
/// `{`, the key=value form otherwise. The result is fully validated.
pub fn parse_config(text: &str) -> std::result::Result<RunConfig, ConfigError> {
    let trimmed = text.trim_start();
    let config = if trimmed.starts_with('{') {
        serde_json::from_str::<RunConfig>(text)
            .map_err(|e| ConfigError::one("json", e.to_string()))?
    } else {
        parse_keyvalue(text)?
    };
    validate(&config)?;
    Ok(config)
}

fn parse_f64(field: &str, v: &str) -> std::result::Result<f64, ConfigIssue> {
    v.trim().parse::<f64>().map_err(|_| ConfigIssue {
        field: field.into(),
        message: format!("`{v}` is not a number"),
    })
}

fn parse_list(field: &str, v: &str) -> std::result::Result<Vec<f64>, ConfigIssue> {
    v.split(',')
        .map(|s| parse_f64(field, s))
        .collect::<std::result::Result<Vec<f64>, _>>()
}

fn parse_keyvalue(text: &str) -> std::result::Result<RunConfig, ConfigError> {
    let mut issues = Vec::new();

    let mut domain_kind: Option<String> = None;
    let mut length: Option<f64> = None;
    let mut sides: Option<Vec<f64>> = None;
    let mut initial: Option<String> = None;
    let mut order: Option<OrderConfig> = None;
    let mut times: Option<Vec<f64>> = None;
    let mut points: Option<Vec<Vec<f64>>> = None;
    let mut methods: Option<Vec<MethodTag>> = None;
    let mut mc_n: Option<u64> = None;
    let mut mc_h: Option<f64> = None;
    let mut mc_seed: Option<u64> = None;
    let mut tol = Tolerances::default();
    let mut out = OutputConfig::default();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            issues.push(ConfigIssue {
                field: format!("line {}", lineno + 1),
                message: format!("expected `key = value`, got `{line}`"),
            });
            continue;
        };
        let key = key.trim();
        let value = value.trim();
        let mut push_issue = |field: &str, message: String| {
            issues.push(ConfigIssue { field: field.into(), message });
        };
        match key {
            "domain" => domain_kind = Some(value.to_string()),
            "length" => match parse_f64(key, value) {
                Ok(v) => length = Some(v),
                Err(i) => issues.push(i),
            },
            "sides" => match parse_list(key, value) {
                Ok(v) => sides = Some(v),
                Err(i) => issues.push(i),
            },
            "initial" => initial = Some(value.to_string()),
            // Later lines override earlier ones (the CLI layers its flag
            // overrides after the file content).
            "beta" | "alpha" => match parse_f64(key, value) {
                Ok(v) => {
                    order = Some(if key == "beta" {
                        OrderConfig::Beta(v)
                    } else {
                        OrderConfig::Alpha(v)
                    });
                }
                Err(i) => issues.push(i),
            },
            "m" | "k" => match value.parse::<u32>() {
                Ok(v) => {
                    order = Some(if key == "m" { OrderConfig::M(v) } else { OrderConfig::K(v) });
                }
                Err(_) => push_issue(key, format!("`{value}` is not a positive integer")),
            },
            "times" => match parse_list(key, value) {
                Ok(v) => times = Some(v),
                Err(i) => issues.push(i),
            },
            "points" => {
                let mut parsed = Vec::new();
                let mut ok = true;
                for part in value.split(';') {
                    match parse_list(key, part) {
                        Ok(p) => parsed.push(p),
                        Err(i) => {
                            issues.push(i);
                            ok = false;
                        }
                    }
                }
                if ok {
                    points = Some(parsed);
                }
            }
            "methods" => {
                let mut parsed = Vec::new();
                let mut ok = true;
                for part in value.split(',') {
                    match part.trim().parse::<MethodTag>() {
                        Ok(m) => parsed.push(m),
                        Err(e) => {
                            push_issue(key, e.to_string());
                            ok = false;
                        }
                    }
                }
                if ok {
                    methods = Some(parsed);
                }
            }
            "mc.n" => match value.parse::<u64>() {
                Ok(v) => mc_n = Some(v),
                Err(_) => push_issue(key, format!("`{value}` is not a count")),
            },
            "mc.h" => match parse_f64(key, value) {
                Ok(v) => mc_h = Some(v),
                Err(i) => issues.push(i),
            },
            "mc.seed" => match value.parse::<u64>() {
                Ok(v) => mc_seed = Some(v),
                Err(_) => push_issue(key, format!("`{value}` is not a seed")),
            },
            "tol.spectral" => match parse_f64(key, value) {
                Ok(v) => tol.spectral = v,
                Err(i) => issues.push(i),
            },
            "tol.quadrature" => match parse_f64(key, value) {
                Ok(v) => tol.quadrature = v,
                Err(i) => issues.push(i),
            },
            "out.dir" => out.dir = PathBuf::from(value),
            "out.prefix" => out.prefix = value.to_string(),
            other => push_issue(other, format!("unknown key `{other}`")),
        }
    }

    let domain = match domain_kind.as_deref() {
        None | Some("interval") => {
            DomainConfig::Interval { length: length.unwrap_or(std::f64::consts::PI) }
        }
        Some("box") => match sides {
            Some(s) => DomainConfig::Box { sides: s },
            None => {
                issues.push(ConfigIssue {
                    field: "sides".into(),
                    message: "box domain needs `sides = l1,l2,...`".into(),
                });
                DomainConfig::Box { sides: vec![1.0] }
            }
        },
        Some(other) => {
            issues.push(ConfigIssue {
                field: "domain".into(),
                message: format!("unknown domain `{other}` (expected interval or box)"),
            });
            DomainConfig::Interval { length: 1.0 }
        }
    };

    if !issues.is_empty() {
        return Err(ConfigError { issues });
    }

    let mc = match (mc_n, mc_h, mc_seed) {
        (None, None, None) => None,
        (n, h, seed) => Some(McConfig {
            n: n.unwrap_or(0),
            h: h.unwrap_or(0.0),
            seed: seed.unwrap_or(u64::MAX),
        }),
    };

    // Default evaluation point: the domain center.
    let center: Vec<f64> = match &domain {
        DomainConfig::Interval { length } => vec![0.5 * length],
        DomainConfig::Box { sides } => sides.iter().map(|s| 0.5 * s).collect(),
    };

    Ok(RunConfig {
        problem: ProblemConfig {
            domain,
            initial: initial.unwrap_or_else(|| "sine".into()),
            order: order.unwrap_or(OrderConfig::Beta(0.5)),
        },
        grid: GridConfig {
            times: times.unwrap_or_else(|| vec![1.0]),
            points: points.unwrap_or_else(|| vec![center]),
        },
        methods: methods.unwrap_or_else(|| vec![MethodTag::Spectral]),
        mc,
        tolerances: tol,
        output: out,
    })
}

fn validate(config: &RunConfig) -> std::result::Result<(), ConfigError> {
    let mut issues = Vec::new();
    let mut issue = |field: &str, message: String| {
        issues.push(ConfigIssue { field: field.into(), message });
    };

    let dim = match &config.problem.domain {
        DomainConfig::Interval { length } => {
            if !(length.is_finite() && *length > 0.0) {
                issue("problem.domain.length", format!("must be positive, got {length}"));
            }
            1
        }
        DomainConfig::Box { sides } => {
            if sides.is_empty() {
                issue("problem.domain.sides", "box needs at least one side".into());
            }
            for s in sides {
                if !(s.is_finite() && *s > 0.0) {
                    issue("problem.domain.sides", format!("side lengths must be positive, got {s}"));
                }
            }
            sides.len().max(1)
        }
    };

    match config.problem.initial.as_str() {
        "sine" | "product-sine" | "bump" | "polynomial" => {}
        other => issue(
            "problem.initial",
            format!("unknown initial condition `{other}` (expected sine, product-sine, bump, or polynomial)"),
        ),
    }

    match config.problem.order {
        OrderConfig::Beta(b) => {
            if !(b.is_finite() && 0.0 < b && b <= 1.0) {
                issue(
                    "problem.order.beta",
                    format!("must satisfy 0 < beta < 1 (or beta = 1 for the heat baseline), got {b}"),
                );
            }
        }
        OrderConfig::M(m) => {
            if m < 2 {
                issue("problem.order.m", format!("must be an integer >= 2, got {m}"));
            }
        }
        OrderConfig::Alpha(a) => {
            if !(a.is_finite() && 0.0 < a && a <= 2.0) {
                issue("problem.order.alpha", format!("must satisfy 0 < alpha <= 2, got {a}"));
            }
            if config.methods.contains(&MethodTag::Spectral) {
                issue(
                    "methods",
                    "the spectral route covers fractional orders (beta, m, k); use quadrature or mc for alpha clocks".into(),
                );
            }
        }
        OrderConfig::K(k) => {
            if k == 0 || k > 30 {
                issue("problem.order.k", format!("must be an integer in 1..=30, got {k}"));
            }
        }
    }

    if config.methods.is_empty() {
        issue("methods", "select at least one of spectral, quadrature, mc".into());
    }
    if config.grid.times.is_empty() {
        issue("grid.times", "empty time grid".into());
    }
    if config.grid.points.is_empty() {
        issue("grid.points", "empty point grid".into());
    }
    let spectral_only = config.methods.iter().all(|m| *m == MethodTag::Spectral);
    for &t in &config.grid.times {
        if !t.is_finite() || t < 0.0 {
            issue("grid.times", format!("times must be >= 0, got {t}"));
        } else if t == 0.0 && !spectral_only {
            issue(
                "grid.times",
                "t = 0 is only evaluable by the spectral method (it returns the datum)".into(),
            );
        }
    }
    let bounds: Vec<f64> = match &config.problem.domain {
        DomainConfig::Interval { length } => vec![*length],
        DomainConfig::Box { sides } => sides.clone(),
    };
    for p in &config.grid.points {
        if p.len() != dim {
            issue(
                "grid.points",
                format!("point {p:?} has {} coordinates, domain has {dim}", p.len()),
            );
            continue;
        }
        for (i, &c) in p.iter().enumerate() {
            if !c.is_finite() || c < 0.0 || c > bounds[i] {
                issue("grid.points", format!("coordinate {c} outside [0, {}]", bounds[i]));
            }
        }
    }

    if config.methods.contains(&MethodTag::Mc) {
        match &config.mc {
            None => issue("mc", "the mc method requires n >= 100, h > 0, and a seed".into()),
            Some(mc) => {
                if mc.n < 100 {
                    issue("mc.n", format!("need at least 100 replicates, got {}", mc.n));
                }
                if !(mc.h.is_finite() && mc.h > 0.0) {
                    issue("mc.h", format!("step must be positive, got {}", mc.h));
                }
                if mc.seed == u64::MAX {
                    issue("mc.seed", "mc requires an explicit seed".into());
                }
            }
        }
    }

    if !config.tolerances.spectral.is_finite() || config.tolerances.spectral <= 0.0 {
        issue("tolerances.spectral", "must be positive".into());
    }
    if !config.tolerances.quadrature.is_finite() || config.tolerances.quadrature <= 0.0 {
        issue("tolerances.quadrature", "must be positive".into());
    }

    if issues.is_empty() {
        Ok(())
    } else {
        Err(ConfigError { issues })
    }
}

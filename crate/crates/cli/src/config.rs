//! Flag and config-file parsing into a validated [`JobConfig`].
//!
//! The config file is flat `key = value` text. Keys before any section header
//! apply to every command; keys under `[pdf]`, `[ruin]`, ... apply only to
//! that command. Flags override both.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use mixagg::MixingDistribution;

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "MIXAGG_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Pdf,
    Cdf,
    Survival,
    Var,
    Tvar,
    Moments,
    Tau,
    Rho,
    Simulate,
    Ruin,
    Compound,
    Asymptotic,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Pdf => "pdf",
            Command::Cdf => "cdf",
            Command::Survival => "survival",
            Command::Var => "var",
            Command::Tvar => "tvar",
            Command::Moments => "moments",
            Command::Tau => "tau",
            Command::Rho => "rho",
            Command::Simulate => "simulate",
            Command::Ruin => "ruin",
            Command::Compound => "compound",
            Command::Asymptotic => "asymptotic",
            Command::Verify => "verify",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exact distributions and risk measures for sums of frailty-dependent risks.
#[derive(Debug, Parser)]
#[command(name = "mixagg", version)]
pub struct Cli {
    pub command: Command,
    /// Config file (flat key = value, optional [command] sections).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// pareto | gamma-claims | weibull-half | weibull | ig | lindley
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<String>,
    /// Number of risks in the sum.
    #[arg(long, allow_hyphen_values = true)]
    pub n: Option<String>,
    /// min:max:points[:lin|log]
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Comma-separated probability levels in (0, 1).
    #[arg(long, allow_hyphen_values = true)]
    pub levels: Option<String>,
    /// Comma-separated moment orders (default 1,2).
    #[arg(long)]
    pub orders: Option<String>,
    /// csv | json (simulate also accepts bin)
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub output: Option<String>,
    /// Defaults to $MIXAGG_SEED, then 42.
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// Monte Carlo sample size for simulate and verify.
    #[arg(long)]
    pub samples: Option<String>,
    /// Claim-count law for compound: poisson | negative-binomial | geometric | logarithmic
    #[arg(long)]
    pub primary: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,
    /// Premium rate for ruin.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Single evaluation point for compound.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Index of the smallest-shape claim in the Pareto tail approximation.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
}

impl Cli {
    fn flags(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("model", &self.model),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
            ("lambda", &self.lambda),
            ("mu", &self.mu),
            ("n", &self.n),
            ("grid", &self.grid),
            ("levels", &self.levels),
            ("orders", &self.orders),
            ("format", &self.format),
            ("output", &self.output),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("primary", &self.primary),
            ("phi", &self.phi),
            ("c", &self.c),
            ("r", &self.r),
            ("p", &self.p),
            ("x", &self.x),
            ("m", &self.m),
        ]
    }
}

const KEYS: [&str; 20] = [
    "model", "alpha", "beta", "lambda", "mu", "n", "grid", "levels", "orders", "format", "output", "seed", "samples",
    "primary", "phi", "c", "r", "p", "x", "m",
];

/// Parses the flat config text, keeping the global keys and those of `command`.
pub fn parse_config_text(text: &str, command: Command) -> Result<BTreeMap<String, String>, Vec<String>> {
    let mut global = BTreeMap::new();
    let mut own = BTreeMap::new();
    let mut errors = Vec::new();
    let mut section: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let name = name.trim().to_ascii_lowercase();
            if Command::from_str(&name, true).is_err() {
                errors.push(format!("config line {}: unknown section [{name}]", i + 1));
            }
            section = Some(name);
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            errors.push(format!("config line {}: expected `key = value`, got `{line}`", i + 1));
            continue;
        };
        let k = k.trim().to_ascii_lowercase();
        if !KEYS.contains(&k.as_str()) {
            errors.push(format!("config line {}: unknown key `{k}`", i + 1));
            continue;
        }
        match section.as_deref() {
            None => {
                global.insert(k, v.trim().to_string());
            }
            Some(s) if s == command.name() => {
                own.insert(k, v.trim().to_string());
            }
            Some(_) => {}
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    // section values override global ones regardless of order
    global.extend(own);
    Ok(global)
}

/// Overlays flags on the file values. Returns the merged map and notes for
/// stderr about overridden file values.
pub fn merge(file: BTreeMap<String, String>, cli: &Cli) -> (BTreeMap<String, String>, Vec<String>) {
    let mut merged = file;
    let mut notes = Vec::new();
    for (k, v) in cli.flags() {
        if let Some(v) = v {
            if let Some(old) = merged.get(k) {
                if old != v {
                    notes.push(format!("note: --{k} {v} overrides config value {old}"));
                }
            }
            merged.insert(k.to_string(), v.clone());
        }
    }
    (merged, notes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                let (w0, w1) = (last - i as f64, i as f64);
                let v = match self.spacing {
                    Spacing::Linear => (self.min * w0 + self.max * w1) / last,
                    // interpolating decade exponents keeps powers of ten exact
                    Spacing::Log => 10f64.powf((self.min.log10() * w0 + self.max.log10() * w1) / last),
                };
                v.clamp(self.min, self.max)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Bin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelName {
    Pareto,
    GammaClaims,
    WeibullHalf,
    Weibull,
    Ig,
    Lindley,
}

impl ModelName {
    fn parse(s: &str) -> Option<Self> {
        Some(match s.to_ascii_lowercase().as_str() {
            "pareto" => ModelName::Pareto,
            "gamma-claims" | "gamma" => ModelName::GammaClaims,
            "weibull-half" => ModelName::WeibullHalf,
            "weibull" => ModelName::Weibull,
            "ig" | "inverse-gaussian" => ModelName::Ig,
            "lindley" => ModelName::Lindley,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelName::Pareto => "pareto",
            ModelName::GammaClaims => "gamma-claims",
            ModelName::WeibullHalf => "weibull-half",
            ModelName::Weibull => "weibull",
            ModelName::Ig => "ig",
            ModelName::Lindley => "lindley",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub name: ModelName,
    /// Parameters in flag order, as given.
    pub params: Vec<(&'static str, f64)>,
    pub mixing: MixingDistribution,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primary {
    Poisson { phi: f64 },
    NegativeBinomial { r: f64, p: f64 },
    Geometric { p: f64 },
    Logarithmic { phi: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Points {
    Grid(Grid),
    Single(f64),
}

impl Points {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Points::Grid(g) => g.values(),
            Points::Single(x) => vec![*x],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Grid {
        model: ModelSpec,
        n: usize,
        grid: Grid,
    },
    Risk {
        model: ModelSpec,
        n: usize,
        levels: Vec<f64>,
    },
    Moments {
        model: ModelSpec,
        n: usize,
        orders: Vec<u32>,
    },
    Pair {
        model: ModelSpec,
    },
    Simulate {
        model: ModelSpec,
        n: usize,
        samples: usize,
    },
    Ruin {
        lambda: f64,
        phi: f64,
        c: f64,
        grid: Grid,
    },
    Compound {
        primary: Primary,
        lambda: f64,
        points: Points,
    },
    Asymptotic {
        model: ModelSpec,
        beta: f64,
        m: u32,
        grid: Grid,
    },
    Verify {
        model: ModelSpec,
        n: usize,
        samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub command: Command,
    pub job: Job,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

/// Collects every violation instead of stopping at the first one.
struct Checker<'a> {
    values: &'a BTreeMap<String, String>,
    errors: Vec<String>,
    used: Vec<&'static str>,
}

impl<'a> Checker<'a> {
    fn raw(&mut self, key: &'static str) -> Option<&'a str> {
        self.used.push(key);
        self.values.get(key).map(String::as_str)
    }

    fn require(&mut self, key: &'static str, what: &str) -> Option<&'a str> {
        let v = self.raw(key);
        if v.is_none() {
            self.errors.push(format!("--{key} is required: {what}"));
        }
        v
    }

    fn number(&mut self, key: &'static str, what: &str) -> Option<f64> {
        let s = self.require(key, what)?;
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                self.errors
                    .push(format!("--{key}: expected a finite number, got `{s}`"));
                None
            }
        }
    }

    fn positive(&mut self, key: &'static str, what: &str) -> Option<f64> {
        let v = self.number(key, what)?;
        if v > 0.0 {
            Some(v)
        } else {
            self.errors.push(format!("--{key}: {what} must be positive, got {v}"));
            None
        }
    }

    fn unit_open(&mut self, key: &'static str, what: &str) -> Option<f64> {
        let v = self.number(key, what)?;
        if v > 0.0 && v < 1.0 {
            Some(v)
        } else {
            self.errors.push(format!("--{key}: {what} must lie in (0, 1), got {v}"));
            None
        }
    }

    fn unit_half_open(&mut self, key: &'static str, what: &str) -> Option<f64> {
        let v = self.number(key, what)?;
        if v > 0.0 && v <= 1.0 {
            Some(v)
        } else {
            self.errors.push(format!("--{key}: {what} must lie in (0, 1], got {v}"));
            None
        }
    }

    fn count(&mut self, key: &'static str, what: &str, min: u64, default: Option<u64>) -> Option<u64> {
        let s = match (self.raw(key), default) {
            (Some(s), _) => s,
            (None, Some(d)) => return Some(d),
            (None, None) => {
                self.errors.push(format!("--{key} is required: {what}"));
                return None;
            }
        };
        match s.parse::<u64>() {
            Ok(v) if v >= min => Some(v),
            _ => {
                self.errors
                    .push(format!("--{key}: {what} must be an integer >= {min}, got `{s}`"));
                None
            }
        }
    }

    fn grid(&mut self, what: &str) -> Option<Grid> {
        let s = self.require("grid", what)?;
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if !(3..=4).contains(&parts.len()) {
            self.errors
                .push(format!("--grid: expected min:max:points[:lin|log], got `{s}`"));
            return None;
        }
        let min = parts[0].parse::<f64>().ok().filter(|v| v.is_finite());
        let max = parts[1].parse::<f64>().ok().filter(|v| v.is_finite());
        let points = parts[2].parse::<usize>().ok();
        let spacing = match parts.get(3).map(|s| s.to_ascii_lowercase()) {
            None => Some(Spacing::Linear),
            Some(s) if s == "lin" || s == "linear" => Some(Spacing::Linear),
            Some(s) if s == "log" => Some(Spacing::Log),
            Some(_) => None,
        };
        let before = self.errors.len();
        if min.is_none() || max.is_none() {
            self.errors
                .push(format!("--grid: bounds must be finite numbers, got `{s}`"));
        }
        if spacing.is_none() {
            self.errors
                .push(format!("--grid: spacing must be lin or log, got `{}`", parts[3]));
        }
        match points {
            Some(p) if p >= 2 => {}
            _ => self
                .errors
                .push(format!("--grid: points must be an integer >= 2, got `{}`", parts[2])),
        }
        if let (Some(a), Some(b)) = (min, max) {
            if a >= b {
                self.errors.push(format!("--grid: min must be < max, got {a} and {b}"));
            }
            if a < 0.0 {
                self.errors.push(format!("--grid: min must be >= 0, got {a}"));
            }
            if spacing == Some(Spacing::Log) && a <= 0.0 {
                self.errors.push(format!("--grid: log spacing needs min > 0, got {a}"));
            }
        }
        if self.errors.len() > before {
            return None;
        }
        Some(Grid {
            min: min?,
            max: max?,
            points: points?,
            spacing: spacing?,
        })
    }

    fn list<T: std::str::FromStr>(&mut self, key: &'static str, s: &str, what: &str) -> Option<Vec<T>> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.parse::<T>() {
                Ok(v) => out.push(v),
                Err(_) => {
                    self.errors.push(format!("--{key}: {what}, got `{item}`"));
                    return None;
                }
            }
        }
        if out.is_empty() {
            self.errors.push(format!("--{key}: list is empty"));
            return None;
        }
        Some(out)
    }

    fn levels(&mut self) -> Option<Vec<f64>> {
        let s = self.require("levels", "risk commands need probability levels")?;
        let levels: Vec<f64> = self.list("levels", s, "levels must be numbers")?;
        let bad: Vec<String> = levels
            .iter()
            .filter(|l| !(**l > 0.0 && **l < 1.0))
            .map(|l| l.to_string())
            .collect();
        if !bad.is_empty() {
            self.errors.push(format!(
                "--levels: every level must lie in (0, 1), got {}",
                bad.join(", ")
            ));
            return None;
        }
        Some(levels)
    }

    fn model(&mut self, allowed: &[ModelName]) -> Option<ModelSpec> {
        let s = self.require("model", "this command evaluates a model")?;
        let Some(name) = ModelName::parse(s) else {
            self.errors.push(format!(
                "--model: unknown model `{s}` (expected pareto, gamma-claims, weibull-half, weibull, ig or lindley)"
            ));
            return None;
        };
        if !allowed.contains(&name) {
            let names: Vec<&str> = allowed.iter().map(|m| m.name()).collect();
            self.errors.push(format!(
                "--model: this command supports {}, got {}",
                names.join(", "),
                name.name()
            ));
            return None;
        }
        let before = self.errors.len();
        let params: Vec<(&'static str, Option<f64>)> = match name {
            ModelName::Pareto => vec![
                ("alpha", self.positive("alpha", "shape")),
                ("beta", self.positive("beta", "scale")),
            ],
            ModelName::GammaClaims => vec![
                ("alpha", self.unit_half_open("alpha", "gamma-claims shape")),
                ("lambda", self.positive("lambda", "rate")),
            ],
            ModelName::WeibullHalf => vec![("lambda", self.positive("lambda", "scale"))],
            ModelName::Weibull => vec![("alpha", self.unit_half_open("alpha", "Weibull shape"))],
            ModelName::Ig => vec![
                ("lambda", self.positive("lambda", "inverse Gaussian shape")),
                ("mu", self.positive("mu", "inverse Gaussian mean")),
            ],
            ModelName::Lindley => vec![("lambda", self.positive("lambda", "Lindley parameter"))],
        };
        if self.errors.len() > before {
            return None;
        }
        let p: Vec<(&'static str, f64)> = params.into_iter().map(|(k, v)| (k, v.unwrap())).collect();
        let v = |i: usize| p[i].1;
        let mixing = match name {
            ModelName::Pareto => MixingDistribution::gamma(v(0), v(1)),
            ModelName::GammaClaims => MixingDistribution::gleser_gamma(v(0), v(1)),
            ModelName::WeibullHalf => MixingDistribution::levy(v(0)),
            ModelName::Weibull => MixingDistribution::positive_stable(v(0)),
            ModelName::Ig => MixingDistribution::inverse_gaussian(v(0), v(1)),
            ModelName::Lindley => MixingDistribution::lindley(v(0)),
        };
        match mixing {
            Ok(mixing) => Some(ModelSpec {
                name,
                params: p,
                mixing,
            }),
            Err(e) => {
                self.errors.push(format!("--model: {e}"));
                None
            }
        }
    }

    /// Frailty for the Pareto tail: `pareto` means Gamma(alpha, lambda) here,
    /// since `--beta` is the claim precision.
    fn tail_model(&mut self) -> Option<ModelSpec> {
        let s = self.require("model", "asymptotic needs a frailty")?;
        let (name, params) = match ModelName::parse(s) {
            Some(ModelName::Pareto) => (
                ModelName::Pareto,
                vec![
                    ("alpha", self.positive("alpha", "shape")),
                    ("lambda", self.positive("lambda", "rate")),
                ],
            ),
            Some(ModelName::Ig) => (
                ModelName::Ig,
                vec![
                    ("lambda", self.positive("lambda", "inverse Gaussian shape")),
                    ("mu", self.positive("mu", "inverse Gaussian mean")),
                ],
            ),
            _ => {
                self.errors
                    .push(format!("--model: asymptotic supports pareto and ig, got `{s}`"));
                return None;
            }
        };
        let p: Vec<(&'static str, f64)> = params.into_iter().map(|(k, v)| Some((k, v?))).collect::<Option<_>>()?;
        let mixing = match name {
            ModelName::Pareto => MixingDistribution::gamma(p[0].1, p[1].1),
            _ => MixingDistribution::inverse_gaussian(p[0].1, p[1].1),
        };
        match mixing {
            Ok(mixing) => Some(ModelSpec {
                name,
                params: p,
                mixing,
            }),
            Err(e) => {
                self.errors.push(format!("--model: {e}"));
                None
            }
        }
    }

    fn n(&mut self) -> Option<usize> {
        self.count("n", "number of risks", 1, None).map(|v| v as usize)
    }
}

const ALL_MODELS: [ModelName; 6] = [
    ModelName::Pareto,
    ModelName::GammaClaims,
    ModelName::WeibullHalf,
    ModelName::Weibull,
    ModelName::Ig,
    ModelName::Lindley,
];

/// Validates the merged key map. Returns the config plus notes about unused
/// keys, or every violation found.
pub fn build_job(
    command: Command,
    values: &BTreeMap<String, String>,
    env_seed: Option<&str>,
) -> Result<(JobConfig, Vec<String>), Vec<String>> {
    let mut c = Checker {
        values,
        errors: Vec::new(),
        used: Vec::new(),
    };
    let format = match c.raw("format").map(str::to_ascii_lowercase).as_deref() {
        None | Some("csv") => Some(Format::Csv),
        Some("json") => Some(Format::Json),
        Some("bin") if command == Command::Simulate => Some(Format::Bin),
        Some(other) => {
            c.errors.push(format!("--format: expected csv or json, got `{other}`"));
            None
        }
    };
    let output = c.raw("output").map(PathBuf::from);
    if format == Some(Format::Bin) && output.is_none() {
        c.errors.push("--output is required with --format bin".into());
    }
    let seed = match c.raw("seed") {
        Some(s) => s
            .parse::<u64>()
            .map_err(|_| format!("--seed: expected a non-negative integer, got `{s}`")),
        None => match env_seed {
            Some(s) => s
                .parse::<u64>()
                .map_err(|_| format!("{SEED_ENV}: expected a non-negative integer, got `{s}`")),
            None => Ok(DEFAULT_SEED),
        },
    };
    let seed = seed.map_err(|e| c.errors.push(e)).ok();

    let job = match command {
        Command::Pdf | Command::Cdf | Command::Survival => {
            let model = c.model(&ALL_MODELS);
            let n = c.n();
            let grid = c.grid("grid commands need evaluation points");
            (|| {
                Some(Job::Grid {
                    model: model?,
                    n: n?,
                    grid: grid?,
                })
            })()
        }
        Command::Var | Command::Tvar => {
            let model = c.model(&ALL_MODELS);
            let n = c.n();
            let levels = c.levels();
            (|| {
                Some(Job::Risk {
                    model: model?,
                    n: n?,
                    levels: levels?,
                })
            })()
        }
        Command::Moments => {
            let model = c.model(&ALL_MODELS);
            let n = c.n();
            let orders = match c.raw("orders") {
                Some(s) => c.list::<u32>("orders", s, "orders must be non-negative integers"),
                None => Some(vec![1, 2]),
            };
            (|| {
                Some(Job::Moments {
                    model: model?,
                    n: n?,
                    orders: orders?,
                })
            })()
        }
        Command::Tau | Command::Rho => c.model(&ALL_MODELS).map(|model| Job::Pair { model }),
        Command::Simulate => {
            let model = c.model(&ALL_MODELS);
            let n = c.n();
            let samples = c.count("samples", "sample size", 1, Some(100_000));
            (|| {
                Some(Job::Simulate {
                    model: model?,
                    n: n?,
                    samples: samples? as usize,
                })
            })()
        }
        Command::Verify => {
            let model = c.model(&ALL_MODELS);
            let n = c.n();
            let samples = c.count("samples", "sample size", 2, Some(200_000));
            (|| {
                Some(Job::Verify {
                    model: model?,
                    n: n?,
                    samples: samples? as usize,
                })
            })()
        }
        Command::Ruin => {
            let lambda = c.positive("lambda", "Lindley parameter");
            let phi = c.positive("phi", "claim intensity");
            let cc = c.positive("c", "premium rate");
            let grid = c.grid("ruin needs a grid of initial capitals");
            (|| {
                Some(Job::Ruin {
                    lambda: lambda?,
                    phi: phi?,
                    c: cc?,
                    grid: grid?,
                })
            })()
        }
        Command::Compound => {
            let lambda = c.positive("lambda", "Lindley parameter");
            let primary = match c.require("primary", "the claim-count law").map(str::to_ascii_lowercase) {
                None => None,
                Some(p) => match p.as_str() {
                    "poisson" => c.positive("phi", "Poisson mean").map(|phi| Primary::Poisson { phi }),
                    "negative-binomial" | "nb" => {
                        let r = c.positive("r", "negative binomial size");
                        let p = c.unit_open("p", "negative binomial probability");
                        (|| Some(Primary::NegativeBinomial { r: r?, p: p? }))()
                    }
                    "geometric" => c
                        .unit_open("p", "geometric probability")
                        .map(|p| Primary::Geometric { p }),
                    "logarithmic" => c
                        .unit_open("phi", "logarithmic parameter")
                        .map(|phi| Primary::Logarithmic { phi }),
                    other => {
                        c.errors.push(format!(
                            "--primary: unknown law `{other}` (expected poisson, negative-binomial, geometric or logarithmic)"
                        ));
                        None
                    }
                },
            };
            let points = match (values.contains_key("x"), values.contains_key("grid")) {
                (true, true) => {
                    c.used.extend(["x", "grid"]);
                    c.errors.push("--x and --grid are mutually exclusive".into());
                    None
                }
                (true, false) => {
                    let x = c.number("x", "evaluation point");
                    match x {
                        Some(x) if x < 0.0 => {
                            c.errors.push(format!("--x: evaluation point must be >= 0, got {x}"));
                            None
                        }
                        other => other.map(Points::Single),
                    }
                }
                (false, _) => c.grid("compound needs --x or --grid").map(Points::Grid),
            };
            (|| {
                Some(Job::Compound {
                    primary: primary?,
                    lambda: lambda?,
                    points: points?,
                })
            })()
        }
        Command::Asymptotic => {
            let model = c.tail_model();
            let beta = c.positive("beta", "Pareto precision");
            let m = c.count("m", "claim index", 1, Some(1)).map(|v| v as u32);
            let grid = c.grid("asymptotic needs evaluation points");
            (|| {
                Some(Job::Asymptotic {
                    model: model?,
                    beta: beta?,
                    m: m?,
                    grid: grid?,
                })
            })()
        }
    };

    if !c.errors.is_empty() {
        return Err(c.errors);
    }
    let notes = values
        .keys()
        .filter(|k| !c.used.contains(&k.as_str()))
        .map(|k| format!("note: `{k}` is not used by {command}"))
        .collect();
    Ok((
        JobConfig {
            command,
            job: job.expect("no errors implies a job"),
            format: format.expect("checked"),
            output,
            seed: seed.expect("checked"),
        },
        notes,
    ))
}

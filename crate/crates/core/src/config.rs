//! Run configuration: command-line flags layered over an optional
//! `key = value` file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::flow::VelocityLaw;
use crate::grid::Splitting;
use crate::scenario::{CurveScenario, FieldScenario};

/// Every key accepted in a config file, in the order written to
/// `resolved.cfg`.
pub const KEYS: &[&str] = &[
    "command",
    "scenario",
    "init",
    "law",
    "scheme",
    "splitting",
    "N",
    "n",
    "dt",
    "h",
    "epsilon",
    "t_end",
    "steps",
    "delta",
    "seed",
    "stride",
    "r0",
    "resample_every",
    "out",
];

#[derive(Parser, Debug)]
#[command(name = "mcflow", version, about = "Mean curvature flow of planar interfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Subcommand, Debug)]
pub enum CommandArgs {
    /// Curve shortening of a polygonal curve.
    Csf(Params),
    /// Parametric flow with a selectable velocity law.
    Flow(Params),
    /// Threshold dynamics on the torus.
    Mbo(Params),
    /// Allen–Cahn phase field on the torus.
    Ac(Params),
    /// Minimizing movements for a disk.
    Atw(Params),
    /// Weak-solution functionals against the exact shrinking circle.
    Diag(Params),
}

#[derive(Args, Debug, Default, Clone)]
pub struct Params {
    /// key = value file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, short = 'o', allow_hyphen_values = true)]
    pub out: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub scenario: Option<String>,
    /// Same as `--scenario`.
    #[arg(long, allow_hyphen_values = true)]
    pub init: Option<String>,
    /// csf, curve_diffusion or willmore.
    #[arg(long, allow_hyphen_values = true)]
    pub law: Option<String>,
    /// Interface source for `diag`: mbo, ac or exact.
    #[arg(long, allow_hyphen_values = true)]
    pub scheme: Option<String>,
    /// lie or strang.
    #[arg(long, allow_hyphen_values = true)]
    pub splitting: Option<String>,
    /// Curve vertex count.
    #[arg(long = "N", allow_hyphen_values = true)]
    pub big_n: Option<String>,
    /// Grid size per side.
    #[arg(long = "n", allow_hyphen_values = true)]
    pub n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub dt: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<String>,
    #[arg(long = "t-end", allow_hyphen_values = true)]
    pub t_end: Option<String>,
    /// Grid schemes: step count, overriding `t-end`.
    #[arg(long, allow_hyphen_values = true)]
    pub steps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub seed: Option<String>,
    /// Output every `stride` steps.
    #[arg(long, allow_hyphen_values = true)]
    pub stride: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub r0: Option<String>,
    #[arg(long = "resample-every", allow_hyphen_values = true)]
    pub resample_every: Option<String>,
}

impl Params {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("out", &self.out),
            ("scenario", &self.scenario),
            ("init", &self.init),
            ("law", &self.law),
            ("scheme", &self.scheme),
            ("splitting", &self.splitting),
            ("N", &self.big_n),
            ("n", &self.n),
            ("dt", &self.dt),
            ("h", &self.h),
            ("epsilon", &self.epsilon),
            ("t_end", &self.t_end),
            ("steps", &self.steps),
            ("delta", &self.delta),
            ("seed", &self.seed),
            ("stride", &self.stride),
            ("r0", &self.r0),
            ("resample_every", &self.resample_every),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Csf,
    Flow,
    Mbo,
    Ac,
    Atw,
    Diag,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Csf => "csf",
            Command::Flow => "flow",
            Command::Mbo => "mbo",
            Command::Ac => "ac",
            Command::Atw => "atw",
            Command::Diag => "diag",
        }
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "csf" => Command::Csf,
            "flow" => Command::Flow,
            "mbo" => Command::Mbo,
            "ac" => Command::Ac,
            "atw" => Command::Atw,
            "diag" => Command::Diag,
            other => return Err(Error::config("command", format!("unknown subcommand {other:?}"))),
        })
    }
}

/// Interface source for `diag`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Mbo,
    AllenCahn,
    Exact,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Mbo => "mbo",
            Scheme::AllenCahn => "ac",
            Scheme::Exact => "exact",
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mbo" => Scheme::Mbo,
            "ac" | "allen_cahn" => Scheme::AllenCahn,
            "exact" | "exact_circle" => Scheme::Exact,
            other => {
                return Err(Error::config("scheme", format!("unknown scheme {other:?} (mbo, ac, exact)")))
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scenario {
    Curve(CurveScenario),
    Field(FieldScenario),
    /// The radial scheme has no spatial scenario.
    Radial,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Curve(c) => c.fmt(f),
            Scenario::Field(s) => s.fmt(f),
            Scenario::Radial => f.write_str("disk"),
        }
    }
}

/// Fully resolved parameters of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub scenario: Scenario,
    pub law: VelocityLaw,
    pub scheme: Scheme,
    pub splitting: Splitting,
    /// Curve vertex count.
    pub big_n: usize,
    /// Grid size per side.
    pub n: usize,
    pub dt: f64,
    pub h: f64,
    pub epsilon: f64,
    pub t_end: f64,
    /// Explicit step count of a grid scheme.
    pub steps: Option<usize>,
    /// Calibration band; `None` picks it from the reference radius.
    pub delta: Option<f64>,
    pub seed: u64,
    pub stride: usize,
    pub r0: f64,
    pub resample_every: usize,
    pub out: PathBuf,
}

/// Parses `argv` (program name first) and an optional config file named by
/// `--config`.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, ArgError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(ArgError::Clap)?;
    let (command, params) = match cli.command {
        CommandArgs::Csf(p) => (Command::Csf, p),
        CommandArgs::Flow(p) => (Command::Flow, p),
        CommandArgs::Mbo(p) => (Command::Mbo, p),
        CommandArgs::Ac(p) => (Command::Ac, p),
        CommandArgs::Atw(p) => (Command::Atw, p),
        CommandArgs::Diag(p) => (Command::Diag, p),
    };
    let file = match &params.config {
        Some(path) => Some(read_config_file(path).map_err(ArgError::Config)?),
        None => None,
    };
    parse_config(command, &params, file.as_ref()).map_err(ArgError::Config)
}

#[derive(Debug)]
pub enum ArgError {
    Clap(clap::Error),
    Config(Error),
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// `key = value` lines; `#` starts a comment. Unknown keys are rejected.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            reason: format!("expected key = value, got {line:?}"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(Error::config(k, "unknown key"));
        }
        map.insert(k.to_string(), v.to_string());
    }
    Ok(map)
}

/// Merges flags over file values and fills defaults for `command`.
pub fn parse_config(
    command: Command,
    params: &Params,
    file: Option<&BTreeMap<String, String>>,
) -> Result<RunConfig> {
    let mut raw: BTreeMap<String, String> = file.cloned().unwrap_or_default();
    if let Some(c) = raw.remove("command") {
        if c.parse::<Command>()? != command {
            return Err(Error::config(
                "command",
                format!("config file is for {c:?}, invoked as {:?}", command.name()),
            ));
        }
    }
    for (k, v) in params.pairs() {
        if let Some(v) = v {
            raw.insert(k.to_string(), v.clone());
        }
    }
    if let Some(init) = raw.remove("init") {
        match raw.get("scenario") {
            Some(s) if *s != init => {
                return Err(Error::config("init", format!("conflicts with scenario = {s}")))
            }
            _ => {
                raw.insert("scenario".into(), init);
            }
        }
    }
    let get = |k: &str| raw.get(k).map(String::as_str);

    let law = match get("law") {
        Some(s) => s.parse::<VelocityLaw>()?,
        None => VelocityLaw::Csf,
    };
    if command == Command::Csf && law != VelocityLaw::Csf {
        return Err(Error::config("law", "the csf command runs curve shortening only"));
    }
    let scenario = match (command, get("scenario")) {
        (Command::Atw, _) => Scenario::Radial,
        (Command::Csf | Command::Flow, s) => {
            let default = if law == VelocityLaw::Csf { "circle" } else { "perturbed" };
            Scenario::Curve(s.unwrap_or(default).parse()?)
        }
        (_, s) => {
            let seed = parse_num::<u64>("seed", get("seed").unwrap_or("0"))?;
            Scenario::Field(s.unwrap_or("disk").parse::<FieldScenario>()?.with_seed(seed))
        }
    };
    let default_big_n = match scenario {
        Scenario::Curve(CurveScenario::Spiral(_)) => 768,
        Scenario::Curve(CurveScenario::Perturbed { .. }) => 64,
        _ => 256,
    };
    let fourth_order = law != VelocityLaw::Csf;
    let n: usize = opt_num("n", get("n"), 256)?;
    if n < 8 || !n.is_power_of_two() {
        return Err(Error::config("n", format!("must be a power of two ≥ 8, got {n}")));
    }
    let h_default = if command == Command::Atw { 1e-3 } else { 1e-4 };
    let h: f64 = positive("h", opt_num("h", get("h"), h_default)?)?;
    let dt_default = match command {
        Command::Csf | Command::Flow if fourth_order => 1e-6,
        Command::Csf | Command::Flow => 1e-5,
        _ => 1e-4,
    };
    let dt: f64 = positive("dt", opt_num("dt", get("dt"), dt_default)?)?;
    let t_end_default = match command {
        Command::Csf | Command::Atw => 0.4,
        Command::Flow if fourth_order => 0.05,
        Command::Flow => 0.4,
        Command::Ac => 50.0 * dt,
        Command::Mbo | Command::Diag => 100.0 * h,
    };
    let mut t_end = positive("t_end", opt_num("t_end", get("t_end"), t_end_default)?)?;
    let steps = match get("steps") {
        None | Some("auto") => None,
        Some(s) => {
            let k: usize = parse_num("steps", s)?;
            if k == 0 {
                return Err(Error::config("steps", "must be at least 1"));
            }
            match command {
                Command::Mbo | Command::Diag => t_end = k as f64 * h,
                Command::Ac => t_end = k as f64 * dt,
                _ => return Err(Error::config("steps", "only grid schemes take a step count; use t_end")),
            }
            Some(k)
        }
    };
    let epsilon = positive("epsilon", opt_num("epsilon", get("epsilon"), 6.0 / n as f64)?)?;
    if epsilon < 2.0 / n as f64 {
        return Err(Error::config(
            "epsilon",
            format!("{epsilon} is below two grid spacings ({})", 2.0 / n as f64),
        ));
    }
    let delta = match get("delta") {
        None | Some("auto") => None,
        Some(s) => Some(positive("delta", parse_num("delta", s)?)?),
    };
    let stride_default = match command {
        Command::Csf | Command::Flow => 100,
        Command::Atw => 1,
        _ => 10,
    };
    let stride: usize = opt_num("stride", get("stride"), stride_default)?;
    if stride == 0 {
        return Err(Error::config("stride", "must be at least 1"));
    }
    let resample_every: usize = opt_num("resample_every", get("resample_every"), 10)?;
    if resample_every == 0 {
        return Err(Error::config("resample_every", "must be at least 1"));
    }
    let big_n: usize = opt_num("N", get("N"), default_big_n)?;
    if big_n < crate::curve::MIN_POINTS {
        return Err(Error::config("N", format!("must be at least 8, got {big_n}")));
    }
    let scheme = match get("scheme") {
        Some(s) => s.parse()?,
        None => Scheme::Mbo,
    };
    let splitting = match get("splitting") {
        None | Some("lie") => Splitting::Lie,
        Some("strang") => Splitting::Strang,
        Some(other) => {
            return Err(Error::config("splitting", format!("unknown splitting {other:?} (lie, strang)")))
        }
    };
    Ok(RunConfig {
        command,
        scenario,
        law,
        scheme,
        splitting,
        big_n,
        n,
        dt,
        h,
        epsilon,
        t_end,
        steps,
        delta,
        seed: opt_num("seed", get("seed"), 0)?,
        stride,
        r0: positive("r0", opt_num("r0", get("r0"), 1.0)?)?,
        resample_every,
        out: PathBuf::from(get("out").unwrap_or("mcflow-out")),
    })
}

fn parse_num<T: FromStr>(key: &str, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::config(key, format!("cannot parse {s:?} as a number of the expected kind")))
}

fn opt_num<T: FromStr>(key: &str, s: Option<&str>, default: T) -> Result<T> {
    s.map_or(Ok(default), |s| parse_num(key, s))
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(key, format!("must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    /// Text for `resolved.cfg`; feeding it back through `--config` gives the
    /// same configuration.
    pub fn to_cfg_text(&self) -> String {
        let splitting = match self.splitting {
            Splitting::Lie => "lie",
            Splitting::Strang => "strang",
        };
        let delta = self.delta.map_or_else(|| "auto".to_string(), |d| d.to_string());
        let values = [
            self.command.name().to_string(),
            self.scenario.to_string(),
            self.scenario.to_string(),
            self.law.name().to_string(),
            self.scheme.name().to_string(),
            splitting.to_string(),
            self.big_n.to_string(),
            self.n.to_string(),
            self.dt.to_string(),
            self.h.to_string(),
            self.epsilon.to_string(),
            self.t_end.to_string(),
            self.steps.map_or_else(|| "auto".to_string(), |k| k.to_string()),
            delta,
            self.seed.to_string(),
            self.stride.to_string(),
            self.r0.to_string(),
            self.resample_every.to_string(),
            self.out.display().to_string(),
        ];
        let mut out = String::from("# mcflow resolved configuration\n");
        for (k, v) in KEYS.iter().zip(values) {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

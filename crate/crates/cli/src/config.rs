//! Command-line flags, TOML config files and their merge into a
//! [`SuiteConfig`]. Precedence: flags, then the config file, then
//! `COMPLAB_TOL`, then built-in defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

pub const TOL_ENV: &str = "COMPLAB_TOL";
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(name = "complab", version, about = "Numerical checks of volume and hinge comparison")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite and emit its report.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ModelfnIdentities,
    Lemma21,
    Corollary27,
    Counterexamples,
    TheoremA,
    TheoremC,
    CorollaryB,
    BishopGromov,
    Toponogov,
    RelativeToponogov,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::ModelfnIdentities => "modelfn-identities",
            Suite::Lemma21 => "lemma21",
            Suite::Corollary27 => "corollary27",
            Suite::Counterexamples => "counterexamples",
            Suite::TheoremA => "theorem-a",
            Suite::TheoremC => "theorem-c",
            Suite::CorollaryB => "corollary-b",
            Suite::BishopGromov => "bishop-gromov",
            Suite::Toponogov => "toponogov",
            Suite::RelativeToponogov => "relative-toponogov",
            Suite::All => "all",
        }
    }

    pub fn members() -> [Suite; 10] {
        [
            Suite::ModelfnIdentities,
            Suite::Lemma21,
            Suite::Corollary27,
            Suite::Counterexamples,
            Suite::TheoremA,
            Suite::TheoremC,
            Suite::CorollaryB,
            Suite::BishopGromov,
            Suite::Toponogov,
            Suite::RelativeToponogov,
        ]
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// `LO:HI:N`, expanded to `N` uniform points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected LO:HI:N, got `{s}`"));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("`{v}` is not a number"));
        let (lo, hi) = (num(lo)?, num(hi)?);
        let count: usize = n.trim().parse().map_err(|_| format!("`{n}` is not a point count"))?;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("need LO < HI, got {lo} and {hi}"));
        }
        if count < 2 {
            return Err("need at least 2 points".into());
        }
        Ok(GridSpec { lo, hi, count })
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.count)
    }
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Comparison curvature.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<f64>,
    /// Curvature of the model function or of the actual hinge surface.
    #[arg(long, allow_hyphen_values = true)]
    pub kbar: Option<f64>,
    /// Dimension.
    #[arg(long)]
    pub n: Option<u32>,
    /// Exponent of the matching equation.
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Radius grid as LO:HI:N.
    #[arg(long = "r-grid", value_name = "LO:HI:N")]
    pub r_grid: Option<GridSpec>,
    /// euclidean, sphere:K, hyperbolic:C, rp2 or bump.
    #[arg(long, conflicts_with = "profile")]
    pub model: Option<String>,
    /// CSV of (ρ, K) samples describing a surface of revolution.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Cut radius for a profile surface.
    #[arg(long)]
    pub cut: Option<f64>,
    /// sn:K, sinh-counterexample, psi-counterexample, or a CSV path.
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Hinge side |pq|.
    #[arg(long)]
    pub a: Option<f64>,
    /// Hinge angle.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Angle of the comparison hinge.
    #[arg(long = "theta-bar")]
    pub theta_bar: Option<f64>,
    /// Length of the hinge geodesic.
    #[arg(long)]
    pub length: Option<f64>,
    /// TOML file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub suite: Option<Suite>,
    pub k: Option<f64>,
    pub kbar: Option<f64>,
    pub n: Option<u32>,
    pub m: Option<u32>,
    pub r: Option<f64>,
    pub r_grid: Option<GridSpec>,
    pub model: Option<String>,
    pub profile: Option<PathBuf>,
    pub cut: Option<f64>,
    pub f: Option<String>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub a: Option<f64>,
    pub theta: Option<f64>,
    pub theta_bar: Option<f64>,
    pub length: Option<f64>,
}

impl FileConfig {
    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::ConfigFile {
            path: path.to_path_buf(),
            message: e.to_string().trim_end().to_string(),
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::File {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }
}

/// Fully resolved parameters of one run. Unset options fall back to
/// per-suite defaults when the suite runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub k: Option<f64>,
    pub kbar: Option<f64>,
    pub n: Option<u32>,
    pub m: Option<u32>,
    pub r: Option<f64>,
    pub r_grid: Option<GridSpec>,
    pub model: Option<String>,
    pub profile: Option<PathBuf>,
    pub cut: Option<f64>,
    pub f: Option<String>,
    pub tol: f64,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub a: Option<f64>,
    pub theta: Option<f64>,
    pub theta_bar: Option<f64>,
    pub length: Option<f64>,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        SuiteConfig {
            suite,
            k: None,
            kbar: None,
            n: None,
            m: None,
            r: None,
            r_grid: None,
            model: None,
            profile: None,
            cut: None,
            f: None,
            tol: DEFAULT_TOL,
            seed: None,
            out: None,
            format: Format::Json,
            a: None,
            theta: None,
            theta_bar: None,
            length: None,
        }
    }

    /// Merges flags over the config file over the environment tolerance.
    pub fn resolve(args: VerifyArgs, file: Option<FileConfig>, env_tol: Option<&str>) -> CliResult<Self> {
        let file = file.unwrap_or_default();
        let env_tol = match env_tol {
            Some(v) => Some(
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::config(TOL_ENV, format!("`{v}` is not a number")))?,
            ),
            None => None,
        };
        let cfg = SuiteConfig {
            suite: args.suite,
            k: args.k.or(file.k),
            kbar: args.kbar.or(file.kbar),
            n: args.n.or(file.n),
            m: args.m.or(file.m),
            r: args.r.or(file.r),
            r_grid: args.r_grid.or(file.r_grid),
            model: args.model.or(file.model),
            profile: args.profile.or(file.profile),
            cut: args.cut.or(file.cut),
            f: args.f.or(file.f),
            tol: args.tol.or(file.tol).or(env_tol).unwrap_or(DEFAULT_TOL),
            seed: args.seed.or(file.seed),
            out: args.out.or(file.out),
            format: args.format.or(file.format).unwrap_or_default(),
            a: args.a.or(file.a),
            theta: args.theta.or(file.theta),
            theta_bar: args.theta_bar.or(file.theta_bar),
            length: args.length.or(file.length),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(CliError::config(
                "tol",
                format!("{} is not a nonnegative number", self.tol),
            ));
        }
        if let Some(n) = self.n {
            if n < 2 {
                return Err(CliError::config("n", "dimension must be at least 2"));
            }
        }
        if self.m == Some(0) {
            return Err(CliError::config("m", "exponent must be positive"));
        }
        if self.model.is_some() && self.profile.is_some() {
            return Err(CliError::config("model", "give either a model or a profile, not both"));
        }
        for (field, v) in [
            ("k", self.k),
            ("kbar", self.kbar),
            ("r", self.r),
            ("cut", self.cut),
            ("a", self.a),
            ("theta", self.theta),
            ("theta-bar", self.theta_bar),
            ("length", self.length),
        ] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return Err(CliError::config(field, format!("{v} is not finite")));
                }
            }
        }
        Ok(())
    }

    /// Options as strings, for the report header.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("suite".into(), self.suite.name().into());
        m.insert("tol".into(), format!("{:?}", self.tol));
        m.insert("format".into(), self.format.name().into());
        let mut put = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                m.insert(key.into(), v);
            }
        };
        let num = |v: Option<f64>| v.map(|v| format!("{v:?}"));
        put("k", num(self.k));
        put("kbar", num(self.kbar));
        put("n", self.n.map(|v| v.to_string()));
        put("m", self.m.map(|v| v.to_string()));
        put("r", num(self.r));
        put("r-grid", self.r_grid.map(|g| g.to_string()));
        put("model", self.model.clone());
        put("profile", self.profile.as_ref().map(|p| p.display().to_string()));
        put("cut", num(self.cut));
        put("f", self.f.clone());
        put("seed", self.seed.map(|v| v.to_string()));
        put("a", num(self.a));
        put("theta", num(self.theta));
        put("theta-bar", num(self.theta_bar));
        put("length", num(self.length));
        m
    }
}

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Seed,
    Construct,
    Verify,
    Gmap,
    Valence,
    Dimension,
    Becker,
    Dense,
    All,
}

/// Flags shared by every command. Anything left unset falls back to the
/// config file and then to the reference defaults.
#[derive(Debug, Default, Clone, Args)]
pub struct Flags {
    /// JSON config file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long = "N", global = true)]
    pub n: Option<u32>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true)]
    pub beta1: Option<f64>,
    #[arg(long, global = true)]
    pub gamma1: Option<f64>,
    /// `exp` or `user:<path>`
    #[arg(long, global = true)]
    pub seed_name: Option<String>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Samples per node for the bound suite
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub rng_seed: Option<u64>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Existing state JSON to use instead of building one
    #[arg(long, global = true)]
    pub state: Option<PathBuf>,
    /// Bi-Lipschitz pair count
    #[arg(long, global = true)]
    pub pairs: Option<usize>,
    /// Initial boundary discretization for winding counts
    #[arg(long, global = true)]
    pub boundary_points: Option<usize>,
    #[arg(long, global = true)]
    pub becker_samples: Option<usize>,
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    #[arg(long, global = true)]
    pub max_stage: Option<u32>,
    /// Worker threads; falls back to VALENCE_FORGE_THREADS
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write SVG plots
    #[arg(long, global = true)]
    pub svg: bool,
}

/// On-disk config; every field is optional.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<Command>,
    #[serde(rename = "N")]
    pub n: Option<u32>,
    pub eps: Option<f64>,
    pub beta1: Option<f64>,
    pub gamma1: Option<f64>,
    pub seed_name: Option<String>,
    pub depth: Option<usize>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub rng_seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub state: Option<PathBuf>,
    pub pairs: Option<usize>,
    pub boundary_points: Option<usize>,
    pub becker_samples: Option<usize>,
    pub tau: Option<f64>,
    pub max_stage: Option<u32>,
    pub threads: Option<usize>,
    pub svg: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedName {
    Exp,
    User(PathBuf),
}

impl SeedName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exp" => Ok(SeedName::Exp),
            _ => match s.strip_prefix("user:") {
                Some(p) if !p.is_empty() => Ok(SeedName::User(PathBuf::from(p))),
                _ => bail!("unknown seed {s:?}; expected `exp` or `user:<path>`"),
            },
        }
    }
}

/// Fully resolved settings. Serialized into the output directory, minus
/// the fields that do not affect results.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(rename = "N")]
    pub n: u32,
    pub eps: f64,
    pub beta1: f64,
    pub gamma1: f64,
    pub seed_name: String,
    pub depth: usize,
    pub tol: f64,
    pub samples: usize,
    pub rng_seed: u64,
    pub pairs: usize,
    pub boundary_points: usize,
    pub becker_samples: usize,
    pub tau: f64,
    pub max_stage: u32,
    #[serde(skip)]
    pub seed: SeedName,
    #[serde(skip)]
    pub out_dir: PathBuf,
    #[serde(skip)]
    pub state: Option<PathBuf>,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub svg: bool,
}

impl RunConfig {
    pub fn resolve(command: Option<Command>, flags: &Flags) -> Result<Self> {
        let file = match &flags.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let Some(command) = command.or(file.command) else {
            bail!("no command given on the command line or in the config file");
        };
        let eps = flags.eps.or(file.eps).unwrap_or(1.0 / 128.0);
        let beta1 = flags.beta1.or(file.beta1).unwrap_or(1.0 / 128.0);
        let seed_name = flags.seed_name.clone().or(file.seed_name).unwrap_or_else(|| "exp".into());
        let threads = match flags.threads.or(file.threads) {
            Some(t) => Some(t),
            None => match std::env::var("VALENCE_FORGE_THREADS") {
                Ok(v) => Some(v.trim().parse().with_context(|| format!("VALENCE_FORGE_THREADS={v:?} is not a thread count"))?),
                Err(_) => None,
            },
        };
        let cfg = RunConfig {
            command,
            n: flags.n.or(file.n).unwrap_or(5),
            eps,
            beta1,
            gamma1: flags.gamma1.or(file.gamma1).unwrap_or(eps * beta1 / 2.0),
            seed: SeedName::parse(&seed_name)?,
            seed_name,
            depth: flags.depth.or(file.depth).unwrap_or(3),
            tol: flags.tol.or(file.tol).unwrap_or(1e-12),
            samples: flags.samples.or(file.samples).unwrap_or(400),
            rng_seed: flags.rng_seed.or(file.rng_seed).unwrap_or(0),
            pairs: flags.pairs.or(file.pairs).unwrap_or(500),
            boundary_points: flags.boundary_points.or(file.boundary_points).unwrap_or(4096),
            becker_samples: flags.becker_samples.or(file.becker_samples).unwrap_or(1000),
            tau: flags.tau.or(file.tau).unwrap_or(1.0),
            max_stage: flags.max_stage.or(file.max_stage).unwrap_or(6),
            out_dir: flags.out_dir.clone().or(file.out_dir).unwrap_or_else(|| PathBuf::from("out")),
            state: flags.state.clone().or(file.state),
            threads,
            svg: flags.svg || file.svg.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 3 {
            bail!("N must be at least 3, got {}", self.n);
        }
        for (name, v) in [("eps", self.eps), ("beta1", self.beta1), ("gamma1", self.gamma1), ("tol", self.tol), ("tau", self.tau)] {
            if !(v > 0.0 && v.is_finite()) {
                bail!("{name} must be positive and finite, got {v}");
            }
        }
        if !(self.tol < 1e-3) {
            bail!("tol {} is too coarse", self.tol);
        }
        for (name, v) in [("depth", self.depth), ("samples", self.samples), ("pairs", self.pairs), ("becker_samples", self.becker_samples)] {
            if v == 0 {
                bail!("{name} must be positive");
            }
        }
        if self.boundary_points < 8 {
            bail!("boundary_points must be at least 8");
        }
        if self.max_stage < 3 {
            bail!("max_stage must be at least 3");
        }
        if self.threads == Some(0) {
            bail!("threads must be positive");
        }
        if let SeedName::User(p) = &self.seed {
            if !p.is_file() {
                bail!("seed file {} does not exist", p.display());
            }
        }
        if let Some(p) = &self.state {
            if !p.is_file() {
                bail!("state file {} does not exist", p.display());
            }
        }
        Ok(())
    }
}

//! Run configuration: defaults, `key = value` files and flag overrides.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use blfq_vqe::{
    BasisCutoffs, Encoding, Method, ModelParameters, OptimizerConfig, ReadoutNoiseModel, Sampling,
};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "BLFQ_VQE_OUT";
pub const DEFAULT_OUT: &str = "results";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
    Noisy,
}

impl FromStr for Mode {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "sampled" => Ok(Mode::Sampled),
            "noisy" => Ok(Mode::Noisy),
            _ => Err(CliError::Config(format!(
                "mode must be one of exact, sampled, noisy (got {s:?})"
            ))),
        }
    }
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
            Mode::Noisy => "noisy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: ModelParameters,
    pub cutoffs: BasisCutoffs,
    pub encoding: Encoding,
    pub mode: Mode,
    pub shots: u64,
    pub noise_p01: f64,
    pub noise_p10: f64,
    pub mitigate: bool,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
    /// Uniform Q² points between 0 and 100 b², besides the points near 0.
    pub q2_points: usize,
    pub pdf_points: usize,
    pub scaling_repeats: usize,
    /// Not part of the hashed configuration.
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    b_explicit: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParameters::default(),
            cutoffs: BasisCutoffs::default(),
            encoding: Encoding::Compact,
            mode: Mode::Exact,
            shots: 8192,
            noise_p01: 0.03,
            noise_p10: 0.03,
            mitigate: false,
            optimizer: OptimizerConfig::default(),
            seed: 0,
            q2_points: 60,
            pdf_points: 99,
            scaling_repeats: 200,
            out: None,
            b_explicit: false,
        }
    }
}

pub const KEYS: [&str; 25] = [
    "quark_mass",
    "antiquark_mass",
    "kappa",
    "b",
    "g_pi",
    "n_c",
    "n_max",
    "m_max",
    "l_max",
    "encoding",
    "mode",
    "shots",
    "noise_p01",
    "noise_p10",
    "mitigate",
    "seed",
    "optimizer",
    "max_iterations",
    "ftol",
    "xatol",
    "initial_step",
    "restarts",
    "q2_points",
    "pdf_points",
    "scaling_repeats",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        CliError::Config(format!(
            "{key} = {value:?} is not a valid {}",
            std::any::type_name::<T>()
        ))
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(CliError::Config(format!("{key} must be true or false (got {value:?})"))),
    }
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "quark_mass" => self.params.quark_mass = parse(key, value)?,
            "antiquark_mass" => self.params.antiquark_mass = parse(key, value)?,
            "kappa" => {
                self.params.kappa = parse(key, value)?;
                if !self.b_explicit {
                    self.params.b = self.params.kappa;
                }
            }
            "b" => {
                self.params.b = parse(key, value)?;
                self.b_explicit = true;
            }
            "g_pi" => self.params.g_pi = parse(key, value)?,
            "n_c" => self.params.n_c = parse(key, value)?,
            "n_max" => self.cutoffs.n_max = parse(key, value)?,
            "m_max" => self.cutoffs.m_max = parse(key, value)?,
            "l_max" => self.cutoffs.l_max = parse(key, value)?,
            "encoding" => {
                self.encoding = value.parse().map_err(|_| {
                    CliError::Config(format!("encoding must be one of direct, compact, bk (got {value:?})"))
                })?
            }
            "mode" => self.mode = value.parse()?,
            "shots" => self.shots = parse(key, value)?,
            "noise_p01" => self.noise_p01 = parse(key, value)?,
            "noise_p10" => self.noise_p10 = parse(key, value)?,
            "mitigate" => self.mitigate = parse_bool(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "optimizer" => {
                self.optimizer.method = value.parse().map_err(|_| {
                    CliError::Config(format!(
                        "optimizer must be simplex or linear-trust-region (got {value:?})"
                    ))
                })?
            }
            "max_iterations" => self.optimizer.max_iterations = parse(key, value)?,
            "ftol" => self.optimizer.ftol = parse(key, value)?,
            "xatol" => self.optimizer.xatol = parse(key, value)?,
            "initial_step" => self.optimizer.initial_step = parse(key, value)?,
            "restarts" => self.optimizer.restarts = parse(key, value)?,
            "q2_points" => self.q2_points = parse(key, value)?,
            "pdf_points" => self.pdf_points = parse(key, value)?,
            "scaling_repeats" => self.scaling_repeats = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => {
                return Err(CliError::Config(format!(
                    "unknown key {other:?}; valid keys are {} and out",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Applies a `KEY=VALUE` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected KEY=VALUE, got {pair:?}")))?;
        self.set(k, v)
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("{origin}:{}: expected `key = value`, got {raw:?}", no + 1))
            })?;
            self.set(k, v)
                .map_err(|e| CliError::Config(format!("{origin}:{}: {}", no + 1, strip(&e))))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.apply_text(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: blfq_vqe::Error| CliError::Config(e.to_string());
        self.params.validate().map_err(cfg)?;
        self.optimizer.validate().map_err(cfg)?;
        if !self.cutoffs.is_default() {
            return Err(CliError::Config(format!(
                "only the default cutoffs (n_max = 0, m_max = 2, l_max = 0) are supported, got {:?}",
                self.cutoffs
            )));
        }
        if self.shots == 0 {
            return Err(CliError::Config("shots must be at least 1".into()));
        }
        for (k, p) in [("noise_p01", self.noise_p01), ("noise_p10", self.noise_p10)] {
            if !(0.0..0.5).contains(&p) {
                return Err(CliError::Config(format!("{k} must lie in [0, 0.5), got {p}")));
            }
        }
        if self.mitigate && self.mode != Mode::Noisy {
            return Err(CliError::Config("--mitigate needs --mode noisy".into()));
        }
        if self.q2_points < 50 {
            return Err(CliError::Config(format!("q2_points must be at least 50, got {}", self.q2_points)));
        }
        if self.pdf_points == 0 || self.scaling_repeats == 0 {
            return Err(CliError::Config("pdf_points and scaling_repeats must be positive".into()));
        }
        Ok(())
    }

    pub fn sampling(&self) -> Result<Sampling> {
        Ok(match self.mode {
            Mode::Exact => Sampling::Exact,
            Mode::Sampled => Sampling::Shots {
                shots_per_term: self.shots,
                noise: None,
                mitigate: false,
            },
            Mode::Noisy => Sampling::Shots {
                shots_per_term: self.shots,
                noise: Some(ReadoutNoiseModel::uniform(
                    self.encoding.n_qubits(4),
                    self.noise_p01,
                    self.noise_p10,
                )?),
                mitigate: self.mitigate,
            },
        })
    }

    /// Canonical `key = value` text; loading it reproduces this configuration.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let o = &self.optimizer;
        let method = match o.method {
            Method::Simplex => "simplex",
            Method::LinearTrustRegion => "linear-trust-region",
        };
        let values: [String; 25] = [
            p.quark_mass.to_string(),
            p.antiquark_mass.to_string(),
            p.kappa.to_string(),
            p.b.to_string(),
            p.g_pi.to_string(),
            p.n_c.to_string(),
            self.cutoffs.n_max.to_string(),
            self.cutoffs.m_max.to_string(),
            self.cutoffs.l_max.to_string(),
            self.encoding.to_string(),
            self.mode.name().to_string(),
            self.shots.to_string(),
            self.noise_p01.to_string(),
            self.noise_p10.to_string(),
            self.mitigate.to_string(),
            self.seed.to_string(),
            method.to_string(),
            o.max_iterations.to_string(),
            o.ftol.to_string(),
            o.xatol.to_string(),
            o.initial_step.to_string(),
            o.restarts.to_string(),
            self.q2_points.to_string(),
            self.pdf_points.to_string(),
            self.scaling_repeats.to_string(),
        ];
        let mut s = String::new();
        for (k, v) in KEYS.iter().zip(values) {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// SHA-256 of [`RunConfig::to_text`], hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// `--out`, then the config file's `out`, then the environment, then `results`.
    pub fn out_dir(&self) -> PathBuf {
        self.out
            .clone()
            .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    }
}

fn strip(e: &CliError) -> String {
    match e {
        CliError::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

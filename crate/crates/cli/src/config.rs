use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 0x7472_6163_656c_6162;

#[derive(Debug, Parser)]
#[command(name = "tracelab", version, about = "Dixmier traces, zeta residues and Wodzicki residues")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// γ_k along the dyadic schedule, measurability bracket and slope fit
    Gamma,
    /// (s−1)·ζ(s) approach curve and its extrapolated residue at s = 1
    Zeta,
    /// Dixmier value, zeta residue and Wodzicki residue side by side
    Connes,
    /// Seeded property campaigns for the singular value inequalities
    MatrixProps,
    /// Ω_n, c(n), λ(n), g₀ for n = 1..8 and the diint identities
    Constants,
    /// (eigenvalue, singular value, multiplicity) shells or the first μ_k
    SpectrumDump,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Gamma => "gamma",
            Command::Zeta => "zeta",
            Command::Connes => "connes",
            Command::MatrixProps => "matrix-props",
            Command::Constants => "constants",
            Command::SpectrumDump => "spectrum-dump",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

/// Flags override config file keys.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// key=value file, keys like model.n or grid.G
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// torus, sphere, varilly, harmonic, geometric, perturbed, oscillating,
    /// alternating_dyadic, inverse_log, finite, or a record name from --defs
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// sequence definition file (JSON array or JSON lines)
    #[arg(long, global = true)]
    pub defs: Option<PathBuf>,
    /// dimension of torus or sphere models
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// spectral cutoff: torus radius, sphere degree
    #[arg(long = "R-max", global = true)]
    pub r_max: Option<f64>,
    /// asymptotic constant of harmonic and perturbed models
    #[arg(long = "L", global = true)]
    pub l: Option<f64>,
    /// perturbation amplitude
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    /// extra model parameters as a JSON object
    #[arg(long, global = true)]
    pub params: Option<String>,
    /// multiplies the operator (and the symbol)
    #[arg(long, global = true)]
    pub scale: Option<f64>,
    /// schedule 2, 4, …, 2^H
    #[arg(long = "H", global = true)]
    pub h: Option<u32>,
    /// zeta levels s_j = 1 + 2^-j, j = 2..J
    #[arg(long = "J", global = true)]
    pub levels: Option<u32>,
    /// width below which the measurability bracket counts as converged
    #[arg(long, global = true)]
    pub cauchy_tol: Option<f64>,
    #[arg(long, global = true)]
    pub window_ratio: Option<f64>,
    /// torus grid points per axis for the Wodzicki quadrature
    #[arg(long = "G", global = true)]
    pub g: Option<usize>,
    /// Gauss-Legendre order on the cosphere
    #[arg(long, global = true)]
    pub sphere_order: Option<usize>,
    /// sampled principal symbol (x_index,xi_index,re,im,…)
    #[arg(long, global = true)]
    pub symbol_csv: Option<PathBuf>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// largest matrix dimension in the campaigns
    #[arg(long, global = true)]
    pub max_dim: Option<usize>,
    /// rows printed by spectrum-dump
    #[arg(long, global = true)]
    pub limit: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// worker threads; falls back to TRACE_LAB_THREADS
    #[arg(long, global = true, env = "TRACE_LAB_THREADS")]
    pub threads: Option<usize>,
    /// csv writes the table and moves the JSON summary to stderr
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub name: String,
    pub n: u32,
    pub r_max: Option<f64>,
    pub l: Option<f64>,
    pub delta: Option<f64>,
    pub params: Option<String>,
    pub defs: Option<PathBuf>,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub model: ModelConfig,
    pub h: u32,
    pub cauchy_tol: f64,
    pub levels: u32,
    pub window_ratio: f64,
    pub g: usize,
    pub sphere_order: usize,
    pub symbol_csv: Option<PathBuf>,
    pub trials: usize,
    pub min_dim: usize,
    pub max_dim: usize,
    pub matrix_tol: f64,
    pub limit: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        Self {
            command,
            model: ModelConfig {
                name: "harmonic".into(),
                n: 2,
                r_max: None,
                l: None,
                delta: None,
                params: None,
                defs: None,
                scale: 1.0,
            },
            h: 20,
            cauchy_tol: 5e-3,
            levels: 12,
            window_ratio: 0.125,
            g: 8,
            sphere_order: 32,
            symbol_csv: None,
            trials: 1000,
            min_dim: 2,
            max_dim: 16,
            matrix_tol: 1e-9,
            limit: 100,
            seed: DEFAULT_SEED,
            format: Format::Json,
            out: None,
            threads: None,
        }
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(command: Command, flags: &Flags) -> Result<Self, CliError> {
        let mut cfg = Self::defaults(command);
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let base = path.parent().unwrap_or(Path::new("."));
            for (key, value) in parse_key_values(&text)? {
                cfg.set(&key, &value, base)?;
            }
        }
        cfg.apply_flags(flags);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_flags(&mut self, f: &Flags) {
        macro_rules! take {
            ($src:expr => $dst:expr) => {
                if let Some(v) = $src.clone() {
                    $dst = v;
                }
            };
        }
        take!(f.model => self.model.name);
        take!(f.n => self.model.n);
        take!(f.scale => self.model.scale);
        take!(f.h => self.h);
        take!(f.levels => self.levels);
        take!(f.cauchy_tol => self.cauchy_tol);
        take!(f.window_ratio => self.window_ratio);
        take!(f.g => self.g);
        take!(f.sphere_order => self.sphere_order);
        take!(f.trials => self.trials);
        take!(f.max_dim => self.max_dim);
        take!(f.limit => self.limit);
        take!(f.seed => self.seed);
        take!(f.format => self.format);
        if f.r_max.is_some() {
            self.model.r_max = f.r_max;
        }
        if f.l.is_some() {
            self.model.l = f.l;
        }
        if f.delta.is_some() {
            self.model.delta = f.delta;
        }
        if f.params.is_some() {
            self.model.params = f.params.clone();
        }
        if f.defs.is_some() {
            self.model.defs = f.defs.clone();
        }
        if f.symbol_csv.is_some() {
            self.symbol_csv = f.symbol_csv.clone();
        }
        if f.out.is_some() {
            self.out = f.out.clone();
        }
        if f.threads.is_some() {
            self.threads = f.threads;
        }
    }

    fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<(), CliError> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
            v.parse()
                .map_err(|_| CliError::Usage(format!("{key}: cannot parse {v:?}")))
        }
        let path = |v: &str| base.join(v);
        match normalize_key(key).as_str() {
            "model.name" => self.model.name = value.to_string(),
            "model.n" => self.model.n = num(key, value)?,
            "model.r_max" => self.model.r_max = Some(num(key, value)?),
            "model.l" => self.model.l = Some(num(key, value)?),
            "model.delta" => self.model.delta = Some(num(key, value)?),
            "model.params" => self.model.params = Some(value.to_string()),
            "model.defs" => self.model.defs = Some(path(value)),
            "model.scale" => self.model.scale = num(key, value)?,
            "estimator.h" => self.h = num(key, value)?,
            "estimator.j" | "estimator.levels" => self.levels = num(key, value)?,
            "estimator.cauchy_tol" => self.cauchy_tol = num(key, value)?,
            "estimator.window_ratio" => self.window_ratio = num(key, value)?,
            "grid.g" => self.g = num(key, value)?,
            "grid.sphere_order" => self.sphere_order = num(key, value)?,
            "symbol.csv" => self.symbol_csv = Some(path(value)),
            "matrix.trials" => self.trials = num(key, value)?,
            "matrix.min_dim" => self.min_dim = num(key, value)?,
            "matrix.max_dim" => self.max_dim = num(key, value)?,
            "matrix.tolerance" => self.matrix_tol = num(key, value)?,
            "dump.limit" => self.limit = num(key, value)?,
            "run.seed" => self.seed = num(key, value)?,
            "run.threads" => self.threads = Some(num(key, value)?),
            "run.out" => self.out = Some(path(value)),
            "run.format" => {
                self.format = Format::from_str(value, true)
                    .map_err(|_| CliError::Usage(format!("{key}: unknown format {value:?}")))?
            }
            _ => return Err(CliError::Usage(format!("unknown config key {key:?}"))),
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(2..=62).contains(&self.h) {
            return bad(format!("H must lie in 2..=62, got {}", self.h));
        }
        if !(3..=30).contains(&self.levels) {
            return bad(format!("J must lie in 3..=30, got {}", self.levels));
        }
        if !(self.cauchy_tol > 0.0) {
            return bad(format!("cauchy_tol must be positive, got {}", self.cauchy_tol));
        }
        if !(self.window_ratio > 0.0 && self.window_ratio < 1.0) {
            return bad(format!("window_ratio must lie in (0, 1), got {}", self.window_ratio));
        }
        if self.g == 0 || self.sphere_order == 0 {
            return bad("G and sphere_order must be positive".into());
        }
        if self.min_dim < 2 || self.max_dim < self.min_dim || self.max_dim > 64 {
            return bad(format!(
                "matrix dimensions must satisfy 2 <= min <= max <= 64, got {}..{}",
                self.min_dim, self.max_dim
            ));
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if !(self.model.scale > 0.0 && self.model.scale.is_finite()) {
            return bad(format!("scale must be positive, got {}", self.model.scale));
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        Ok(())
    }

    /// Everything that determines the result, as config file keys. Threads
    /// and the output path are left out.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        put("command", self.command.name().into());
        put("model.name", self.model.name.clone());
        put("model.n", self.model.n.to_string());
        put("model.scale", fmt(self.model.scale));
        if let Some(v) = self.model.r_max {
            put("model.r_max", fmt(v));
        }
        if let Some(v) = self.model.l {
            put("model.l", fmt(v));
        }
        if let Some(v) = self.model.delta {
            put("model.delta", fmt(v));
        }
        if let Some(v) = &self.model.params {
            put("model.params", v.clone());
        }
        if let Some(v) = &self.model.defs {
            put("model.defs", v.display().to_string());
        }
        put("estimator.h", self.h.to_string());
        put("estimator.levels", self.levels.to_string());
        put("estimator.cauchy_tol", fmt(self.cauchy_tol));
        put("estimator.window_ratio", fmt(self.window_ratio));
        put("grid.g", self.g.to_string());
        put("grid.sphere_order", self.sphere_order.to_string());
        if let Some(v) = &self.symbol_csv {
            put("symbol.csv", v.display().to_string());
        }
        put("matrix.trials", self.trials.to_string());
        put("matrix.min_dim", self.min_dim.to_string());
        put("matrix.max_dim", self.max_dim.to_string());
        put("matrix.tolerance", fmt(self.matrix_tol));
        put("dump.limit", self.limit.to_string());
        put("run.seed", self.seed.to_string());
        put("run.format", self.format.name().into());
        m
    }
}

fn fmt(x: f64) -> String {
    tracelab_core::numeric::format_f64(x)
}

/// Lowercase with `-` → `_`, so grid.G and model.R-max are accepted.
fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

/// `key = value` lines; `#` starts a comment line.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

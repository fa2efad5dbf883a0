//! Experiment configuration: built-in defaults, then a flat TOML file, then
//! command-line flags, each layer overriding the previous one.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use staircase::marking::MarkMode;
use staircase::modem::NoiseVariance;
use staircase::scc::CodeId;
use staircase::sim::{DecoderSpec, ExperimentSpec, StopRule, DEFAULT_TARGET_BER};

pub const OUT_DIR_ENV: &str = "STAIRCASE_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "staircase-results";

/// A user-facing configuration problem (exit code 2).
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<staircase::Error> for ConfigError {
    fn from(e: staircase::Error) -> Self {
        ConfigError(e.to_string())
    }
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// Keys accepted in a configuration file; the same names as the flags
/// with `-` replaced by `_`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub code: Option<String>,
    pub pam: Option<usize>,
    pub decoder: Option<String>,
    pub lk: Option<usize>,
    pub k: Option<usize>,
    pub delta: Option<String>,
    pub delta3: Option<f64>,
    pub snr: Option<String>,
    pub snr_range: Option<String>,
    pub seed: Option<u64>,
    pub shards: Option<usize>,
    pub chunk_blocks: Option<usize>,
    pub min_errors: Option<u64>,
    pub max_bits: Option<u64>,
    pub min_bits: Option<u64>,
    pub window: Option<usize>,
    pub iterations: Option<usize>,
    pub noise: Option<String>,
    pub noiseless: Option<bool>,
    pub target_ber: Option<f64>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| bad(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Default, Clone, Args)]
pub struct ExperimentArgs {
    /// Flat TOML file with any of the keys below; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Component code: C1, C2 or C3.
    #[arg(long)]
    pub code: Option<String>,
    /// PAM order M (2, 4, 8, …).
    #[arg(long)]
    pub pam: Option<usize>,
    /// standard or isabm.
    #[arg(long)]
    pub decoder: Option<String>,
    /// Number of marked blocks L − K.
    #[arg(long, conflicts_with = "k")]
    pub lk: Option<usize>,
    /// Number of plain-BDD groups K.
    #[arg(long)]
    pub k: Option<usize>,
    /// Two-threshold marking "delta1,delta2".
    #[arg(long, conflicts_with = "delta3")]
    pub delta: Option<String>,
    /// One-threshold marking.
    #[arg(long)]
    pub delta3: Option<f64>,
    /// SNR points in dB, comma separated.
    #[arg(long, visible_alias = "snr-list", allow_hyphen_values = true)]
    pub snr: Option<String>,
    /// SNR grid "start:stop:step" in dB.
    #[arg(long, conflicts_with = "snr", allow_hyphen_values = true)]
    pub snr_range: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub shards: Option<usize>,
    /// Blocks per shard between stop-rule checks.
    #[arg(long)]
    pub chunk_blocks: Option<usize>,
    /// Post-FEC bit errors that end a point.
    #[arg(long)]
    pub min_errors: Option<u64>,
    /// Information bits after which a point is censored.
    #[arg(long)]
    pub max_bits: Option<u64>,
    /// Information bits to count before the error target may end a point.
    #[arg(long)]
    pub min_bits: Option<u64>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Noise variance per real dimension: full-n0 (default) or half-n0.
    #[arg(long)]
    pub noise: Option<String>,
    /// Transmit without noise.
    #[arg(long)]
    pub noiseless: bool,
    /// BER at which the required SNR is read off.
    #[arg(long)]
    pub target_ber: Option<f64>,
    /// Output directory (default: $STAIRCASE_OUT_DIR, then ./staircase-results).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fully resolved experiment settings.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub spec: ExperimentSpec,
    pub target_ber: f64,
    pub out: PathBuf,
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| bad(format!("not a number: {t:?}"))))
        .collect()
}

/// "start:stop:step", inclusive of `stop` up to rounding.
pub fn parse_range(s: &str) -> Result<Vec<f64>, ConfigError> {
    let parts = parse_list(&s.replace(':', ","))?;
    let [a, b, step] = parts[..] else {
        return Err(bad(format!("range {s:?} must be start:stop:step")));
    };
    if !(step > 0.0) || b < a {
        return Err(bad(format!("range {s:?} needs step > 0 and stop ≥ start")));
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| ((a + i as f64 * step) * 1e9).round() / 1e9).collect())
}

/// Either a comma list or a range.
pub fn parse_list_or_range(s: &str) -> Result<Vec<f64>, ConfigError> {
    if s.contains(':') {
        parse_range(s)
    } else {
        parse_list(s)
    }
}

pub fn parse_noise(s: &str) -> Result<NoiseVariance, ConfigError> {
    match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
        "full-n0" | "full" => Ok(NoiseVariance::FullN0),
        "half-n0" | "half" => Ok(NoiseVariance::HalfN0),
        other => Err(bad(format!("noise must be full-n0 or half-n0, got {other:?}"))),
    }
}

fn parse_delta(s: &str) -> Result<(f64, f64), ConfigError> {
    match parse_list(s)?[..] {
        [d1, d2] => Ok((d1, d2)),
        _ => Err(bad(format!("--delta takes \"delta1,delta2\", got {s:?}"))),
    }
}

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

impl ExperimentArgs {
    /// Applies the file (if any) and then the flags on top of the defaults.
    /// `default_decoder` is used when neither layer names one.
    pub fn resolve(&self, default_decoder: &str) -> Result<Resolved, ConfigError> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        macro_rules! pick {
            ($field:ident) => {
                self.$field.clone().or(file.$field.clone())
            };
        }
        let code: CodeId = pick!(code).as_deref().unwrap_or("C1").parse()?;
        let pam = pick!(pam).unwrap_or(2);
        let window = pick!(window).unwrap_or(staircase::sim::DEFAULT_WINDOW);

        // K: flag layer first (either form), then file layer.
        let k = match (self.k, self.lk, file.k, file.lk) {
            (Some(k), _, _, _) => k,
            (None, Some(lk), _, _) | (None, None, None, Some(lk)) => {
                window.checked_sub(lk).ok_or_else(|| bad(format!("L − K = {lk} exceeds L = {window}")))?
            }
            (None, None, Some(k), _) => k,
            (None, None, None, None) => 2.min(window),
        };
        let mode = match (&self.delta, self.delta3, &file.delta, file.delta3) {
            (Some(d), _, _, _) => {
                let (d1, d2) = parse_delta(d)?;
                MarkMode::two(d1, d2)?
            }
            (None, Some(d3), _, _) => MarkMode::one(d3)?,
            (None, None, Some(d), _) => {
                let (d1, d2) = parse_delta(d)?;
                MarkMode::two(d1, d2)?
            }
            (None, None, None, Some(d3)) => MarkMode::one(d3)?,
            (None, None, None, None) => MarkMode::two(10.0, 2.5)?,
        };
        let decoder = match pick!(decoder).as_deref().unwrap_or(default_decoder).to_ascii_lowercase().as_str() {
            "standard" | "std" => DecoderSpec::Standard,
            "isabm" => DecoderSpec::Isabm { k, mode },
            other => return Err(bad(format!("decoder must be standard or isabm, got {other:?}"))),
        };

        let mut spec = ExperimentSpec::new(code, pam, decoder);
        spec.window = window;
        spec.iterations = pick!(iterations).unwrap_or(staircase::sim::DEFAULT_ITERATIONS);
        spec.snr_db = match (&self.snr, &self.snr_range) {
            (Some(s), _) => parse_list(s)?,
            (None, Some(r)) => parse_range(r)?,
            (None, None) => match (&file.snr, &file.snr_range) {
                (Some(s), _) => parse_list(s)?,
                (None, Some(r)) => parse_range(r)?,
                (None, None) => Vec::new(),
            },
        };
        let defaults = StopRule::default();
        spec.stop = StopRule {
            min_post_fec_bit_errors: pick!(min_errors).unwrap_or(defaults.min_post_fec_bit_errors),
            max_info_bits: pick!(max_bits).unwrap_or(defaults.max_info_bits),
            min_info_bits: pick!(min_bits).unwrap_or(defaults.min_info_bits),
        };
        spec.master_seed = pick!(seed).unwrap_or(1);
        spec.shard_count = pick!(shards).unwrap_or(1);
        spec.chunk_blocks = pick!(chunk_blocks).unwrap_or(spec.chunk_blocks);
        if let Some(n) = pick!(noise) {
            spec.noise = parse_noise(&n)?;
        }
        spec.noiseless = self.noiseless || file.noiseless.unwrap_or(false);
        spec.validate()?;

        let target_ber = pick!(target_ber).unwrap_or(DEFAULT_TARGET_BER);
        if !(target_ber > 0.0 && target_ber < 0.5) {
            return Err(bad(format!("target BER {target_ber} outside (0, 1/2)")));
        }
        let out = pick!(out).unwrap_or_else(default_out_dir);
        Ok(Resolved { spec, target_ber, out })
    }
}

//! Experiment specification: TOML config, validation, and the mapping onto
//! decoder/channel configurations.

use std::fmt;
use std::path::Path;

use mlgd::{DecoderConfig, ParityCheckMatrix, Variant};
use serde::{Deserialize, Serialize};

use crate::alist;
use crate::channel::{ChannelConfig, ChannelKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Master seed; every frame derives its stream from
    /// (seed, snr_index, frame_index).
    pub seed: u64,
    pub code: CodeSpec,
    #[serde(default)]
    pub channel: ChannelSpec,
    pub decode: DecodeSpec,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub stop: StopSpec,
    #[serde(default)]
    pub tx: TxSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum CodeSpec {
    /// Random (gamma, rho)-regular code.
    Generate {
        n: usize,
        col_weight: usize,
        row_weight: usize,
        field_bits: u32,
        #[serde(default)]
        code_seed: u64,
    },
    /// Parity-check matrix from a non-binary alist file.
    Alist { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub quant_bits: u32,
    pub quant_step: f64,
    pub noiseless: bool,
}

impl Default for ChannelSpec {
    fn default() -> Self {
        ChannelSpec {
            kind: ChannelKind::Awgn,
            quant_bits: 6,
            quant_step: 0.0625,
            noiseless: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeSpec {
    /// Variant names, lowercase, optionally "rs-" prefixed: "isrb", "ihrb",
    /// "eihrb", "iisrb", "ieihrb", "rs-iisrb", ...
    pub variants: Vec<String>,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: u32,
    // optional overrides of the per-column-weight defaults
    pub lambda: Option<i64>,
    pub lambda_hard: Option<i64>,
    pub xi1: Option<i64>,
    pub xi2: Option<i64>,
    pub c1: Option<i64>,
    pub c2: Option<i64>,
    pub c3: Option<i64>,
    pub zeta: Option<i64>,
    pub eta: Option<i64>,
    pub theta: Option<usize>,
}

fn default_max_iterations() -> u32 {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Eb/N0 grid in dB.
    pub snr_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopSpec {
    /// Keep simulating a point until at least this many block errors...
    pub min_block_errors: u64,
    /// ...or this many frames, whichever comes first.
    pub max_frames: u64,
}

impl Default for StopSpec {
    fn default() -> Self {
        StopSpec { min_block_errors: 100, max_frames: 10_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TxMode {
    /// Random message through the systematic encoder.
    #[default]
    Random,
    AllZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct TxSpec {
    pub mode: TxMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct OutputSpec {
    /// Output directory; CLI --out-dir wins over this.
    pub dir: Option<String>,
    /// Base name of the emitted files (default "results").
    pub stem: Option<String>,
}

#[derive(Debug)]
pub enum SpecError {
    Toml(toml::de::Error),
    Io(std::io::Error),
    Invalid(String),
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecError::Toml(e) => write!(f, "config parse error: {e}"),
            SpecError::Io(e) => write!(f, "config read error: {e}"),
            SpecError::Invalid(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl std::error::Error for SpecError {}

/// "rs-iisrb" -> (Iisrb, true); unprefixed names give reselection = false.
pub fn parse_variant(name: &str) -> Result<(Variant, bool), SpecError> {
    let lower = name.to_ascii_lowercase();
    let (rest, rs) = match lower.strip_prefix("rs-") {
        Some(rest) => (rest, true),
        None => (lower.as_str(), false),
    };
    let variant = match rest {
        "isrb" => Variant::Isrb,
        "ihrb" => Variant::Ihrb,
        "eihrb" => Variant::Eihrb,
        "iisrb" => Variant::Iisrb,
        "ieihrb" => Variant::Ieihrb,
        _ => {
            return Err(SpecError::Invalid(format!(
                "unknown variant {name:?}; expected [rs-]isrb|ihrb|eihrb|iisrb|ieihrb"
            )))
        }
    };
    Ok((variant, rs))
}

/// Canonical display name, e.g. "RS-IISRB".
pub fn variant_label(variant: Variant, reselection: bool) -> String {
    if reselection {
        format!("RS-{}", variant.base_name())
    } else {
        variant.base_name().to_string()
    }
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<ExperimentSpec, SpecError> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(SpecError::Toml)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<ExperimentSpec, SpecError> {
        let text = std::fs::read_to_string(path).map_err(SpecError::Io)?;
        ExperimentSpec::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.sweep.snr_db.is_empty() {
            return Err(SpecError::Invalid("sweep.snr_db must be nonempty".into()));
        }
        if self.decode.variants.is_empty() {
            return Err(SpecError::Invalid("decode.variants must be nonempty".into()));
        }
        for v in &self.decode.variants {
            parse_variant(v)?;
        }
        if self.stop.min_block_errors == 0 {
            return Err(SpecError::Invalid("stop.min_block_errors must be at least 1".into()));
        }
        if self.stop.max_frames == 0 {
            return Err(SpecError::Invalid("stop.max_frames must be at least 1".into()));
        }
        if self.channel.quant_bits < 1 || self.channel.quant_bits > 16 {
            return Err(SpecError::Invalid(format!(
                "channel.quant_bits {} outside 1..=16",
                self.channel.quant_bits
            )));
        }
        if !(self.channel.quant_step > 0.0) {
            return Err(SpecError::Invalid("channel.quant_step must be positive".into()));
        }
        if let CodeSpec::Generate { n, col_weight, row_weight, field_bits, .. } = &self.code {
            if *n == 0 || *col_weight == 0 || *row_weight == 0 {
                return Err(SpecError::Invalid("code dimensions must be positive".into()));
            }
            if (*n * *col_weight) % *row_weight != 0 {
                return Err(SpecError::Invalid(format!(
                    "n*col_weight = {} is not divisible by row_weight = {row_weight}",
                    n * col_weight
                )));
            }
            if !(1..=16).contains(field_bits) {
                return Err(SpecError::Invalid(format!("field_bits {field_bits} outside 1..=16")));
            }
        }
        Ok(())
    }

    /// Loads or generates the parity-check matrix.
    pub fn build_matrix(&self) -> Result<ParityCheckMatrix, SpecError> {
        match &self.code {
            CodeSpec::Generate { n, col_weight, row_weight, field_bits, code_seed } => {
                let field = mlgd::Field::new(*field_bits)
                    .map_err(|e| SpecError::Invalid(e.to_string()))?;
                mlgd::generate_regular(field, *n, *col_weight, *row_weight, *code_seed)
                    .map_err(|e| SpecError::Invalid(e.to_string()))
            }
            CodeSpec::Alist { path } => alist::load_alist(path).map_err(|e| match e {
                alist::AlistError::Io(io) => SpecError::Io(io),
                parse => SpecError::Invalid(parse.to_string()),
            }),
        }
    }

    /// Decoder configuration for one variant: per-column-weight defaults with
    /// the spec's explicit overrides applied on top.
    pub fn decoder_config(&self, variant: Variant, reselection: bool, gamma: usize) -> DecoderConfig {
        let mut cfg = DecoderConfig::recommended(variant, gamma);
        cfg.reselection = reselection;
        cfg.max_iterations = self.decode.max_iterations;
        let d = &self.decode;
        if let Some(v) = d.lambda {
            cfg.lambda = v;
        }
        if let Some(v) = d.lambda_hard {
            cfg.lambda_hard = v;
        }
        if let Some(v) = d.xi1 {
            cfg.xi1 = v;
        }
        if let Some(v) = d.xi2 {
            cfg.xi2 = v;
        }
        if let Some(v) = d.c1 {
            cfg.c1 = v;
        }
        if let Some(v) = d.c2 {
            cfg.c2 = v;
        }
        if let Some(v) = d.c3 {
            cfg.c3 = v;
        }
        if let Some(v) = d.zeta {
            cfg.zeta = v;
        }
        if let Some(v) = d.eta {
            cfg.eta = Some(v);
        }
        if let Some(v) = d.theta {
            cfg.theta = v;
        }
        cfg
    }

    /// Channel configuration at one sweep point for a code of the given rate.
    pub fn channel_config(&self, ebn0_db: f64, code_rate: f64) -> ChannelConfig {
        ChannelConfig {
            kind: self.channel.kind,
            ebn0_db,
            code_rate,
            quant_bits: self.channel.quant_bits,
            quant_step: self.channel.quant_step,
            noiseless: self.channel.noiseless,
        }
    }

    /// Parsed (variant, reselection, label) triples in spec order.
    pub fn variant_list(&self) -> Vec<(Variant, bool, String)> {
        self.decode
            .variants
            .iter()
            .map(|name| {
                let (v, rs) = parse_variant(name).expect("validated");
                let label = variant_label(v, rs);
                (v, rs, label)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
seed = 42

[code]
source = "generate"
n = 96
col_weight = 3
row_weight = 6
field_bits = 3
code_seed = 7

[channel]
kind = "awgn"

[decode]
variants = ["isrb", "rs-iisrb"]
max_iterations = 50
xi1 = 4

[sweep]
snr_db = [4.0, 4.5]

[stop]
min_block_errors = 50
max_frames = 100000
"#;

    #[test]
    fn parses_and_validates() {
        let spec = ExperimentSpec::from_toml_str(EXAMPLE).unwrap();
        assert_eq!(spec.seed, 42);
        assert_eq!(spec.decode.variants.len(), 2);
        assert_eq!(spec.stop.min_block_errors, 50);
        assert_eq!(spec.tx.mode, TxMode::Random);
        let variants = spec.variant_list();
        assert_eq!(variants[1].2, "RS-IISRB");
        assert!(variants[1].1);
    }

    #[test]
    fn toml_round_trip_is_equal() {
        let spec = ExperimentSpec::from_toml_str(EXAMPLE).unwrap();
        let text = toml::to_string(&spec).unwrap();
        let back = ExperimentSpec::from_toml_str(&text).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn json_round_trip_is_equal() {
        let spec = ExperimentSpec::from_toml_str(EXAMPLE).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        let back: ExperimentSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
    }

    #[test]
    fn rejects_bad_specs() {
        let empty_sweep = EXAMPLE.replace("snr_db = [4.0, 4.5]", "snr_db = []");
        assert!(matches!(
            ExperimentSpec::from_toml_str(&empty_sweep),
            Err(SpecError::Invalid(_))
        ));

        let bad_variant = EXAMPLE.replace("\"isrb\"", "\"minmax\"");
        assert!(ExperimentSpec::from_toml_str(&bad_variant).is_err());

        let bad_weights = EXAMPLE.replace("row_weight = 6", "row_weight = 7");
        assert!(ExperimentSpec::from_toml_str(&bad_weights).is_err());

        assert!(ExperimentSpec::from_toml_str("not toml at all [").is_err());
    }

    #[test]
    fn variant_parsing() {
        assert_eq!(parse_variant("IISRB").unwrap(), (Variant::Iisrb, false));
        assert_eq!(parse_variant("rs-ieihrb").unwrap(), (Variant::Ieihrb, true));
        assert_eq!(variant_label(Variant::Ieihrb, true), "RS-IEIHRB");
        assert!(parse_variant("fft-qspa").is_err());
    }

    #[test]
    fn overrides_apply() {
        let spec = ExperimentSpec::from_toml_str(EXAMPLE).unwrap();
        let cfg = spec.decoder_config(Variant::Iisrb, true, 3);
        assert_eq!(cfg.xi1, 4);
        assert!(cfg.reselection);
        assert_eq!(cfg.max_iterations, 50);
    }
}

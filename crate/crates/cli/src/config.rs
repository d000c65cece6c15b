//! TOML experiment file. Every table rejects unknown keys.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use pas_core::bundled::{ccdm_reference, hidm_reference};
use pas_core::ccdm::CcdmCodec;
use pas_core::fec::{bundled_code, DecoderVariant, LdpcCode};
use pas_core::pipeline::SimConfig;
use pas_core::{Composition, HidmFile, Matcher};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub seed: Option<u64>,
    pub design_composition: Option<DesignSection>,
    pub simulate: Option<SimulateSection>,
    pub insert_errors: Option<InsertSection>,
    pub bounds: Option<BoundsSection>,
    pub metrics: Option<MetricsSection>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        if cfg.schema_version != SCHEMA_VERSION {
            bail!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            );
        }
        Ok(cfg)
    }
}

/// Which distribution matcher to use. Paths are relative to the config file.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DmSpec {
    /// A tree file; the bundled 16-PAM reference tree when absent.
    Hidm { tree: Option<PathBuf> },
    /// Class counts; the bundled (318, 208, 89, 25) matcher when absent.
    Ccdm {
        composition: Option<Vec<u64>>,
        #[serde(default = "three")]
        amplitude_bits: u32,
        input_bits: Option<u64>,
    },
    /// Uniform signaling (128-point cross QAM in simulations).
    None,
}

fn three() -> u32 {
    3
}

impl DmSpec {
    pub fn build(&self, base: &Path) -> Result<Option<Matcher>> {
        Ok(match self {
            DmSpec::Hidm { tree: None } => Some(hidm_reference().into()),
            DmSpec::Hidm { tree: Some(p) } => {
                let path = base.join(p);
                let codec = HidmFile::load(&path)
                    .and_then(HidmFile::into_codec)
                    .with_context(|| format!("loading tree {}", path.display()))?;
                Some(codec.into())
            }
            DmSpec::Ccdm {
                composition: None, ..
            } => Some(ccdm_reference().into()),
            DmSpec::Ccdm {
                composition: Some(c),
                amplitude_bits,
                input_bits,
            } => Some(
                CcdmCodec::new(Composition::new(c.clone())?, *amplitude_bits, *input_bits)?.into(),
            ),
            DmSpec::None => None,
        })
    }
}

pub fn load_code(path: Option<&PathBuf>, base: &Path) -> Result<LdpcCode> {
    match path {
        None => Ok(bundled_code()),
        Some(p) => {
            let path = base.join(p);
            LdpcCode::load_alist(&path).with_context(|| format!("loading code {}", path.display()))
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSection {
    /// Target class PMF, one entry per amplitude class.
    pub target_pmf: Vec<f64>,
    pub word_len: u64,
    #[serde(default = "three")]
    pub amplitude_bits: u32,
    pub min_input_bits: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub dm: DmSpec,
    /// alist file; the bundled (2160, 1800) code when absent.
    pub code: Option<PathBuf>,
    pub snr_db: Vec<f64>,
    pub max_codewords: Option<u64>,
    pub target_bit_errors: Option<u64>,
    pub target_frame_errors: Option<u64>,
    pub max_iter: Option<u32>,
    pub decoder: Option<DecoderVariant>,
    pub demap_input_bits: Option<u32>,
    pub llr_bits: Option<u32>,
    pub otuc_n: Option<u32>,
    pub batch_groups: Option<usize>,
}

impl SimulateSection {
    pub fn sim_config(&self, seed: u64) -> SimConfig {
        let mut c = SimConfig::new(seed, self.snr_db.clone());
        c.target_bit_errors = self.target_bit_errors;
        c.target_frame_errors = self.target_frame_errors;
        if let Some(v) = self.max_codewords {
            c.max_codewords = v;
        }
        if let Some(v) = self.max_iter {
            c.max_iter = v;
        }
        if let Some(v) = self.decoder {
            c.decoder = v;
        }
        if let Some(v) = self.demap_input_bits {
            c.demap_input_bits = v;
        }
        if let Some(v) = self.llr_bits {
            c.llr_bits = v;
        }
        if let Some(v) = self.otuc_n {
            c.otuc_n = v;
        }
        if let Some(v) = self.batch_groups {
            c.batch_groups = v;
        }
        c
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InsertSection {
    pub dm: DmSpec,
    #[serde(default = "default_errors")]
    pub n_errors: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Enumerate every input and single error position instead (small
    /// matchers only; `n_errors` is ignored).
    #[serde(default)]
    pub exhaustive: bool,
}

fn default_errors() -> Vec<usize> {
    (1..=10).collect()
}

fn default_trials() -> u64 {
    1000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub dm: DmSpec,
    pub code: Option<PathBuf>,
    /// Measured with `alpha_trials` single-error trials when absent.
    pub alpha: Option<f64>,
    #[serde(default = "default_trials")]
    pub alpha_trials: u64,
    /// OTUC blocks per erroneous codeword; 32 (CCDM), 2 (HiDM), 1 (none) by default.
    pub theta: Option<f64>,
    /// Override the fractions computed from the frame geometry.
    pub gamma_in: Option<f64>,
    pub gamma_out: Option<f64>,
    #[serde(default = "default_ber_min")]
    pub ber_min: f64,
    #[serde(default = "default_ber_max")]
    pub ber_max: f64,
    #[serde(default = "default_ppd")]
    pub points_per_decade: u32,
    #[serde(default = "default_target")]
    pub target_post_invdm_ber: f64,
    #[serde(default = "one")]
    pub otuc_n: u32,
}

fn default_ber_min() -> f64 {
    1e-20
}

fn default_ber_max() -> f64 {
    1e-1
}

fn default_ppd() -> u32 {
    10
}

fn default_target() -> f64 {
    1e-15
}

fn one() -> u32 {
    1
}

/// Source of the amplitude PMF for `metrics`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ShapeSpec {
    Hidm {
        tree: Option<PathBuf>,
    },
    Ccdm {
        composition: Option<Vec<u64>>,
        #[serde(default = "three")]
        amplitude_bits: u32,
        input_bits: Option<u64>,
    },
    /// Maxwell-Boltzmann, given `lambda` or a target `entropy_2d`.
    Mb {
        lambda: Option<f64>,
        entropy_2d: Option<f64>,
        #[serde(default = "three")]
        amplitude_bits: u32,
    },
    Uniform {
        #[serde(default = "three")]
        amplitude_bits: u32,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsSection {
    pub shape: ShapeSpec,
    /// SNRs (Es/N0 per 2D, dB) for the BMD rate estimate.
    #[serde(default)]
    pub snr_db: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    100_000
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys_and_versions() {
        assert!(ExperimentConfig::parse("schema_version = 1\nbogus = 3").is_err());
        assert!(ExperimentConfig::parse("schema_version = 2").is_err());
        let bad =
            "schema_version = 1\n[simulate]\ndm = { kind = \"hidm\", depth = 2 }\nsnr_db = [1.0]";
        assert!(ExperimentConfig::parse(bad).is_err());
        let bad = "schema_version = 1\n[insert_errors]\ndm = { kind = \"ccdm\" }\ntrails = 3";
        assert!(ExperimentConfig::parse(bad).is_err());
    }

    #[test]
    fn sections_parse() {
        let text = r#"
schema_version = 1
seed = 7

[simulate]
dm = { kind = "ccdm", composition = [2, 1, 1, 0], amplitude_bits = 2 }
snr_db = [10.0, 11.0]
max_codewords = 64
decoder = { kind = "sum-product" }

[metrics]
shape = { kind = "mb", entropy_2d = 7.16875 }
"#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.seed, Some(7));
        let sim = cfg.simulate.unwrap();
        let sc = sim.sim_config(3);
        assert_eq!((sc.seed, sc.max_codewords, sc.max_iter), (3, 64, 20));
        assert_eq!(sc.decoder, DecoderVariant::SumProduct);
        assert!(matches!(
            cfg.metrics.unwrap().shape,
            ShapeSpec::Mb {
                amplitude_bits: 3,
                ..
            }
        ));
    }
}

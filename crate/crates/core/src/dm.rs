//! A distribution matcher of either kind behind one interface.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::ccdm::CcdmCodec;
use crate::constellation::Pmf;
use crate::error::Result;
use crate::hidm::HidmCodec;
use crate::metrics::constellation_gain_db;

/// HiDM or CCDM codec. Shaped output is `shaped_bits_per_symbol()` label
/// bits per PAM symbol, most significant level first.
#[derive(Debug, Clone)]
pub enum Matcher {
    Hidm(HidmCodec),
    Ccdm(CcdmCodec),
}

impl Matcher {
    pub fn name(&self) -> &'static str {
        match self {
            Matcher::Hidm(_) => "hidm",
            Matcher::Ccdm(_) => "ccdm",
        }
    }

    /// `N_u^sb`.
    pub fn input_bits(&self) -> usize {
        match self {
            Matcher::Hidm(c) => c.input_bits(),
            Matcher::Ccdm(c) => c.input_bits(),
        }
    }

    pub fn output_bits(&self) -> usize {
        match self {
            Matcher::Hidm(c) => c.output_bits(),
            Matcher::Ccdm(c) => c.output_bits(),
        }
    }

    /// PAM symbols per DM word.
    pub fn pam_symbols(&self) -> usize {
        match self {
            Matcher::Hidm(c) => c.pam_symbols(),
            Matcher::Ccdm(c) => c.word_len(),
        }
    }

    pub fn shaped_bits_per_symbol(&self) -> usize {
        self.output_bits() / self.pam_symbols()
    }

    pub fn amplitude_bits(&self) -> u32 {
        match self {
            Matcher::Hidm(c) => c.spec().amplitude_bits,
            Matcher::Ccdm(c) => c.amplitude_bits(),
        }
    }

    pub fn shaped_levels(&self) -> Vec<u32> {
        match self {
            Matcher::Hidm(c) => c.spec().shaped_levels.clone(),
            Matcher::Ccdm(c) => c.shaped_levels(),
        }
    }

    pub fn encode(&self, bits: &[u8]) -> Result<Vec<u8>> {
        match self {
            Matcher::Hidm(c) => c.encode(bits),
            Matcher::Ccdm(c) => c.encode_bits(bits),
        }
    }

    /// Never fails on corrupted words; only lengths are checked.
    pub fn decode(&self, shaped: &[u8]) -> Result<Vec<u8>> {
        match self {
            Matcher::Hidm(c) => c.decode(shaped),
            Matcher::Ccdm(c) => c.decode_bits(shaped),
        }
    }

    pub fn amplitude_pmf(&self) -> Result<Pmf<f64>> {
        Ok(match self {
            Matcher::Hidm(c) => c.amplitude_pmf()?.to_f64(),
            Matcher::Ccdm(c) => c.amplitude_pmf().to_f64(),
        })
    }

    /// `E[a^2]` per PAM symbol.
    pub fn energy_1d(&self) -> f64 {
        let e = match self {
            Matcher::Hidm(c) => c.expected_energy_1d(),
            Matcher::Ccdm(c) => c.expected_energy_1d(),
        };
        e.to_f64().unwrap_or(f64::NAN)
    }
}

/// Shaping figures of a matcher at code rate one, with uniform signs and
/// uniform unshaped amplitude levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatcherSummary {
    pub kind: &'static str,
    pub input_bits: usize,
    pub output_bits: usize,
    pub pam_symbols: usize,
    /// `(dm, invdm)` LUT storage in bits (HiDM only).
    pub storage_bits: Option<(u64, u64)>,
    pub amplitude_pmf: Vec<f64>,
    pub energy_2d: f64,
    pub entropy_2d: f64,
    /// Information rate per QAM symbol.
    pub beta: f64,
    pub rate_loss: f64,
    pub gain_db: f64,
}

impl Matcher {
    /// `beta = 2 (N_u^sb + N_s (1 + b - g)) / N_s`; rate loss `2H(X) - beta`.
    pub fn summary(&self) -> Result<MatcherSummary> {
        let pmf = self.amplitude_pmf()?;
        let ns = self.pam_symbols() as f64;
        let per_symbol = 1 + self.amplitude_bits() as usize - self.shaped_bits_per_symbol();
        let beta = 2.0 * (self.input_bits() as f64 + ns * per_symbol as f64) / ns;
        let energy_2d = 2.0 * self.energy_1d();
        let entropy_2d = pmf.entropy_2d();
        Ok(MatcherSummary {
            kind: self.name(),
            input_bits: self.input_bits(),
            output_bits: self.output_bits(),
            pam_symbols: self.pam_symbols(),
            storage_bits: match self {
                Matcher::Hidm(c) => Some(c.storage_bits()),
                Matcher::Ccdm(_) => None,
            },
            amplitude_pmf: pmf.probs().to_vec(),
            energy_2d,
            entropy_2d,
            beta,
            rate_loss: entropy_2d - beta,
            gain_db: constellation_gain_db(beta, energy_2d, 2.0),
        })
    }
}

impl From<HidmCodec> for Matcher {
    fn from(c: HidmCodec) -> Self {
        Matcher::Hidm(c)
    }
}

impl From<CcdmCodec> for Matcher {
    fn from(c: CcdmCodec) -> Self {
        Matcher::Ccdm(c)
    }
}

//! Positional framing of client bits, DM words and FEC codewords.
//!
//! PAS layouts view a codeword as `b + 1` blocks of `R` positions, one per
//! bit level of a PAM rail, least significant level first: codeword index
//! `i` is level `b + 1 - i / R` of rail `i % R`. Payload fills the low
//! indices, so the parity lands on the sign bits of the last rails.
//!
//! The BICM layout does the same over a whole group of codewords, with
//! codeword bits interleaved codeword-index-fastest.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layout {
    /// Every DM word is spread over all codewords of the group.
    CcdmParallel,
    /// DM words are packed one after another along the codewords.
    HidmSequential,
    /// No DM: uniform bits on a square or cross QAM.
    BicmUniform,
}

impl Layout {
    pub fn name(self) -> &'static str {
        match self {
            Layout::CcdmParallel => "ccdm-parallel",
            Layout::HidmSequential => "hidm-sequential",
            Layout::BicmUniform => "bicm-uniform",
        }
    }
}

/// Shape of the distribution matcher as seen by the framer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DmGeometry {
    /// `N_u^sb`.
    pub input_bits: usize,
    /// PAM symbols per DM word.
    pub pam_symbols: usize,
    /// Shaped label bits per PAM symbol (levels `2..=g+1`).
    pub shaped_bits: usize,
    /// Amplitude label bits per PAM symbol.
    pub amplitude_bits: usize,
}

/// Where a bit of the group lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub codeword: usize,
    /// Rail (PAS) or QAM symbol (BICM) within the group's signal.
    pub symbol: usize,
    /// Bit level, 1 = most significant.
    pub level: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramePlan {
    pub layout: Layout,
    pub n: usize,
    pub k: usize,
    /// Label bits per rail (PAS) or per QAM symbol (BICM).
    pub bits_per_symbol: usize,
    /// Rails per codeword (PAS). For BICM, the group average rounded down.
    pub symbols_per_codeword: usize,
    /// Rails (PAS) or QAM symbols (BICM) per group.
    pub group_symbols: usize,
    pub codewords_per_group: usize,
    pub dm_words_per_group: usize,
    pub dm: Option<DmGeometry>,
}

impl FramePlan {
    /// Plans a PAS group for a code of length `n` and dimension `k`.
    pub fn pas(layout: Layout, n: usize, k: usize, dm: DmGeometry) -> Result<Self> {
        let geo = |msg: String| Error::Geometry(msg);
        if layout == Layout::BicmUniform {
            return Err(geo("BICM has no DM; use FramePlan::bicm".into()));
        }
        let levels = dm.amplitude_bits + 1;
        if dm.shaped_bits == 0 || dm.shaped_bits > dm.amplitude_bits || dm.pam_symbols == 0 {
            return Err(geo(format!(
                "{} shaped bits out of {} amplitude bits",
                dm.shaped_bits, dm.amplitude_bits
            )));
        }
        if n % levels != 0 {
            return Err(geo(format!(
                "codeword length {n} is not a multiple of {levels} levels"
            )));
        }
        let rails = n / levels;
        if n - k > rails {
            return Err(geo(format!(
                "{} parity bits exceed the {rails} sign positions",
                n - k
            )));
        }
        if k < dm.amplitude_bits * rails {
            return Err(geo(format!(
                "payload {k} does not cover all {} amplitude bits",
                dm.amplitude_bits * rails
            )));
        }
        let span = rails.lcm(&dm.pam_symbols);
        Ok(Self {
            layout,
            n,
            k,
            bits_per_symbol: levels,
            symbols_per_codeword: rails,
            group_symbols: span,
            codewords_per_group: span / rails,
            dm_words_per_group: span / dm.pam_symbols,
            dm: Some(dm),
        })
    }

    /// Plans a BICM group for `bits_per_symbol` bits per QAM symbol.
    pub fn bicm(n: usize, k: usize, bits_per_symbol: usize) -> Result<Self> {
        if bits_per_symbol == 0 || k == 0 || k > n {
            return Err(Error::Geometry(format!(
                "invalid BICM geometry n={n} k={k} m={bits_per_symbol}"
            )));
        }
        let total = n.lcm(&bits_per_symbol);
        let codewords = total / n;
        let symbols = total / bits_per_symbol;
        if n - k > symbols * 2 {
            return Err(Error::Geometry("parity exceeds the two sign levels".into()));
        }
        Ok(Self {
            layout: Layout::BicmUniform,
            n,
            k,
            bits_per_symbol,
            symbols_per_codeword: symbols / codewords,
            group_symbols: symbols,
            codewords_per_group: codewords,
            dm_words_per_group: 0,
            dm: None,
        })
    }

    pub fn symbols_per_group(&self) -> usize {
        self.group_symbols
    }

    /// Client bits consumed by one group.
    pub fn client_bits_per_group(&self) -> usize {
        match self.dm {
            None => self.codewords_per_group * self.k,
            Some(dm) => {
                self.dm_words_per_group * dm.input_bits
                    + self.codewords_per_group * self.unshaped_payload_per_codeword()
            }
        }
    }

    /// Payload bits per codeword not produced by the DM.
    pub fn unshaped_payload_per_codeword(&self) -> usize {
        match self.dm {
            None => self.k,
            Some(dm) => self.k - dm.shaped_bits * self.symbols_per_codeword,
        }
    }

    /// `(codeword, rail)` carrying PAM symbol `r` of DM word `w`.
    pub fn dm_rail(&self, w: usize, r: usize) -> (usize, usize) {
        let dm = self.dm.expect("PAS plan");
        let j = w * dm.pam_symbols + r;
        match self.layout {
            Layout::CcdmParallel => (j % self.codewords_per_group, j / self.codewords_per_group),
            _ => (j / self.symbols_per_codeword, j % self.symbols_per_codeword),
        }
    }

    /// Inverse of [`Self::dm_rail`].
    pub fn rail_dm(&self, codeword: usize, rail: usize) -> (usize, usize) {
        let dm = self.dm.expect("PAS plan");
        let j = match self.layout {
            Layout::CcdmParallel => rail * self.codewords_per_group + codeword,
            _ => codeword * self.symbols_per_codeword + rail,
        };
        (j / dm.pam_symbols, j % dm.pam_symbols)
    }

    /// PAS: codeword index of `(rail, level)`.
    pub fn pas_index(&self, rail: usize, level: u32) -> usize {
        (self.bits_per_symbol - level as usize) * self.symbols_per_codeword + rail
    }

    /// PAS: `(rail, level)` of codeword index `i`.
    pub fn pas_position(&self, i: usize) -> (usize, u32) {
        let r = self.symbols_per_codeword;
        (i % r, (self.bits_per_symbol - i / r) as u32)
    }

    /// Is codeword index `i` payload that the DM does not produce?
    pub fn is_unshaped_payload(&self, i: usize) -> bool {
        if i >= self.k {
            return false;
        }
        match self.dm {
            None => true,
            Some(dm) => {
                let (_, level) = self.pas_position(i);
                level == 1 || level as usize > dm.shaped_bits + 1
            }
        }
    }

    /// Location of bit `i` of codeword `c`.
    pub fn slot(&self, c: usize, i: usize) -> Slot {
        match self.layout {
            Layout::BicmUniform => {
                let p = i * self.codewords_per_group + c;
                let s = self.symbols_per_group();
                Slot {
                    codeword: c,
                    symbol: p % s,
                    level: (self.bits_per_symbol - p / s) as u32,
                }
            }
            _ => {
                let (rail, level) = self.pas_position(i);
                Slot {
                    codeword: c,
                    symbol: c * self.symbols_per_codeword + rail,
                    level,
                }
            }
        }
    }

    /// Inverse of [`Self::slot`]: `(codeword, index)` of a group symbol and
    /// level.
    pub fn index_of(&self, symbol: usize, level: u32) -> (usize, usize) {
        match self.layout {
            Layout::BicmUniform => {
                let s = self.symbols_per_group();
                let p = (self.bits_per_symbol - level as usize) * s + symbol;
                (p % self.codewords_per_group, p / self.codewords_per_group)
            }
            _ => {
                let c = symbol / self.symbols_per_codeword;
                (c, self.pas_index(symbol % self.symbols_per_codeword, level))
            }
        }
    }
}

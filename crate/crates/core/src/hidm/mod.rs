//! Hierarchical distribution matcher (HiDM).
//!
//! A HiDM is a tree of small lookup tables. Layer `L` holds one LUT; each
//! LUT on layer `l + 1` feeds `t_l` LUTs on layer `l` with `r_l` constraint
//! bits each. Every LUT also consumes `s_l` fresh information bits. Layer 1
//! emits the shaped bits that select PAM amplitudes.
//!
//! Table contents are chosen by sorting candidate output words by their
//! expected symbol energy: layer 1 by the mean energy of the amplitudes it
//! selects, higher layers by the mean of the lower-layer table regions a
//! word constrains. Keeping the `2^v` cheapest words at each layer makes
//! low-energy amplitudes more likely without any arithmetic at run time.

mod codec;
mod format;
mod tables;

pub use codec::HidmCodec;
pub use format::{HidmFile, FORMAT_HEADER};
pub use tables::{HidmTables, LutEntry};

use crate::error::{Error, Result};

/// Parameters of one layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LayerSpec {
    /// Output bits per LUT.
    pub u: u32,
    /// Constraint input bits, taken from a LUT on the layer above.
    pub r: u32,
    /// Fresh information input bits.
    pub s: u32,
    /// LUTs on this layer fed by one LUT of the layer above (1 on the top layer).
    pub t: u32,
}

impl LayerSpec {
    pub fn new(u: u32, r: u32, s: u32, t: u32) -> Self {
        Self { u, r, s, t }
    }

    /// Input bits per LUT, `v = r + s`.
    pub fn v(&self) -> u32 {
        self.r + self.s
    }
}

/// Largest LUT word width accepted. The invDM table has `2^u` rows.
pub const MAX_LUT_BITS: u32 = 22;

/// Layer layout plus the PAM bit levels the tree drives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HidmTreeSpec {
    /// Layers, index 0 = layer 1 (the one emitting shaped bits).
    pub layers: Vec<LayerSpec>,
    /// Amplitude label width `b` of the PAM (without the sign bit).
    pub amplitude_bits: u32,
    /// PAM bit levels (1 = sign, 2..=b+1 amplitude, MSB first) driven by the
    /// DM. The remaining amplitude levels are uniform.
    pub shaped_levels: Vec<u32>,
    /// Optional `(dm, invdm)` storage limit in bits.
    pub storage_budget: Option<(u64, u64)>,
}

impl HidmTreeSpec {
    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Shaped bits carried by one PAM symbol.
    pub fn shaped_bits_per_symbol(&self) -> u32 {
        self.shaped_levels.len() as u32
    }

    /// LUT count `T_l` per layer (index 0 = layer 1).
    pub fn lut_counts(&self) -> Vec<u64> {
        let n = self.layers.len();
        let mut counts = vec![1u64; n];
        for l in (0..n.saturating_sub(1)).rev() {
            counts[l] = counts[l + 1] * self.layers[l].t as u64;
        }
        counts
    }

    /// `N_u^sb = sum_l T_l s_l`.
    pub fn input_bits(&self) -> usize {
        self.lut_counts()
            .iter()
            .zip(&self.layers)
            .map(|(&t, l)| t as usize * l.s as usize)
            .sum()
    }

    /// Shaped output bits `T_1 u_1`.
    pub fn output_bits(&self) -> usize {
        match self.layers.first() {
            Some(l1) => self.lut_counts()[0] as usize * l1.u as usize,
            None => 0,
        }
    }

    /// PAM symbols whose amplitudes one DM word selects.
    pub fn pam_symbols(&self) -> usize {
        let per = self.shaped_bits_per_symbol() as usize;
        if per == 0 {
            0
        } else {
            self.output_bits() / per
        }
    }

    /// Checks every structural invariant of the tree.
    pub fn validate(&self) -> Result<()> {
        let n = self.layers.len();
        if n == 0 {
            return Err(Error::TreeMismatch("tree has no layers".into()));
        }
        if !(1..=7).contains(&self.amplitude_bits) {
            return Err(Error::LabelWidth(self.amplitude_bits));
        }
        if self.shaped_levels.is_empty() {
            return Err(Error::TreeMismatch("no shaped levels".into()));
        }
        let mut prev = 1;
        for &lvl in &self.shaped_levels {
            if lvl < 2 || lvl > self.amplitude_bits + 1 || lvl <= prev {
                return Err(Error::TreeMismatch(format!(
                    "shaped level {lvl} must be an amplitude level in 2..={} listed in increasing order",
                    self.amplitude_bits + 1
                )));
            }
            prev = lvl;
        }
        for (i, l) in self.layers.iter().enumerate() {
            let layer = i + 1;
            let bad = |reason: String| Error::InvalidTree { layer, reason };
            if l.u == 0 || l.u > MAX_LUT_BITS {
                return Err(bad(format!("u = {} outside 1..={MAX_LUT_BITS}", l.u)));
            }
            if l.v() > l.u {
                return Err(bad(format!(
                    "v = r + s = {} exceeds u = {}; a LUT cannot have more distinct inputs than output words",
                    l.v(),
                    l.u
                )));
            }
            if l.t == 0 {
                return Err(bad("fan-out t must be at least 1".into()));
            }
            if i + 1 == n {
                if l.r != 0 {
                    return Err(bad(format!("top layer must have r = 0, got {}", l.r)));
                }
                if l.t != 1 {
                    return Err(bad(format!("top layer must have t = 1, got {}", l.t)));
                }
            } else {
                let above = &self.layers[i + 1];
                if above.u != l.t * l.r {
                    return Err(bad(format!(
                        "u of layer {} is {} but t * r = {} * {} = {}",
                        layer + 1,
                        above.u,
                        l.t,
                        l.r,
                        l.t * l.r
                    )));
                }
            }
        }
        if self.layers[0].u % self.shaped_bits_per_symbol() != 0 {
            return Err(Error::InvalidTree {
                layer: 1,
                reason: format!(
                    "u = {} is not a multiple of the {} shaped bits per PAM symbol",
                    self.layers[0].u,
                    self.shaped_bits_per_symbol()
                ),
            });
        }
        if let Some((dm, inv)) = self.storage_budget {
            let (s_dm, s_inv) = storage_bits(self);
            if s_dm > dm || s_inv > inv {
                return Err(Error::TreeMismatch(format!(
                    "storage ({s_dm}, {s_inv}) exceeds the declared budget ({dm}, {inv})"
                )));
            }
        }
        Ok(())
    }
}

/// Stored bits `(dm, invdm)` = `(sum T 2^v u, sum T 2^u v)`.
pub fn storage_bits(spec: &HidmTreeSpec) -> (u64, u64) {
    spec.lut_counts()
        .iter()
        .zip(&spec.layers)
        .fold((0, 0), |(dm, inv), (&t, l)| {
            (
                dm + t * (1u64 << l.v()) * l.u as u64,
                inv + t * (1u64 << l.u) * l.v() as u64,
            )
        })
}

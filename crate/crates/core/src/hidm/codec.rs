use num_rational::BigRational;
use num_traits::Zero;

use super::tables::{self, chunks, HidmTables};
use super::{storage_bits, HidmTreeSpec};
use crate::constellation::{AmplitudeLabeling, Pmf};
use crate::error::{Error, Result};

/// Matcher and dematcher for one HiDM tree.
///
/// Information bits are consumed top layer first, then every lower layer in
/// LUT order, each LUT taking its `s` fresh bits MSB first. The output is the
/// concatenation of all layer-1 words.
#[derive(Debug, Clone)]
pub struct HidmCodec {
    spec: HidmTreeSpec,
    tables: HidmTables,
    labeling: AmplitudeLabeling,
    // per layer: word -> LUT input of the nearest stored word
    inverse: Vec<Vec<u32>>,
    lut_counts: Vec<u64>,
}

impl HidmCodec {
    /// Builds the tables for `spec` by energy sorting.
    pub fn new(spec: HidmTreeSpec) -> Result<Self> {
        let labeling = AmplitudeLabeling::reflected_gray(spec.amplitude_bits)?;
        let tables = tables::build_tables(&spec, &labeling)?;
        Ok(Self::assemble(spec, tables, labeling))
    }

    /// Uses externally supplied tables after checking them against `spec`.
    pub fn with_tables(spec: HidmTreeSpec, tables: HidmTables) -> Result<Self> {
        spec.validate()?;
        let labeling = AmplitudeLabeling::reflected_gray(spec.amplitude_bits)?;
        tables::validate_tables(&spec, &tables, &labeling)?;
        Ok(Self::assemble(spec, tables, labeling))
    }

    fn assemble(spec: HidmTreeSpec, tables: HidmTables, labeling: AmplitudeLabeling) -> Self {
        let inverse = spec
            .layers
            .iter()
            .zip(&tables.layers)
            .map(|(l, rows)| nearest_inverse(l.u, rows.iter().map(|e| e.word)))
            .collect();
        let lut_counts = spec.lut_counts();
        Self {
            spec,
            tables,
            labeling,
            inverse,
            lut_counts,
        }
    }

    pub fn spec(&self) -> &HidmTreeSpec {
        &self.spec
    }

    pub fn tables(&self) -> &HidmTables {
        &self.tables
    }

    pub fn labeling(&self) -> &AmplitudeLabeling {
        &self.labeling
    }

    /// `N_u^sb`.
    pub fn input_bits(&self) -> usize {
        self.spec.input_bits()
    }

    /// Shaped bits per DM word.
    pub fn output_bits(&self) -> usize {
        self.spec.output_bits()
    }

    pub fn pam_symbols(&self) -> usize {
        self.spec.pam_symbols()
    }

    /// `(dm, invdm)` LUT storage in bits.
    pub fn storage_bits(&self) -> (u64, u64) {
        storage_bits(&self.spec)
    }

    /// Maps `input_bits()` information bits to one DM word.
    pub fn encode(&self, bits: &[u8]) -> Result<Vec<u8>> {
        if bits.len() != self.input_bits() {
            return Err(Error::InputLength {
                expected: self.input_bits(),
                actual: bits.len(),
            });
        }
        let n = self.spec.layers.len();
        let mut pos = 0usize;
        let mut take = |k: u32| -> u32 {
            let mut v = 0u32;
            for _ in 0..k {
                v = (v << 1) | (bits[pos] & 1) as u32;
                pos += 1;
            }
            v
        };
        // constraint value for every LUT of the current layer
        let mut constraints = vec![0u32];
        let mut words = Vec::new();
        for l in (0..n).rev() {
            let layer = self.spec.layers[l];
            let rows = &self.tables.layers[l];
            words = constraints
                .iter()
                .map(|&c| rows[((c << layer.s) | take(layer.s)) as usize].word)
                .collect();
            if l > 0 {
                let below = self.spec.layers[l - 1];
                constraints = words
                    .iter()
                    .flat_map(|&w| chunks(w, below.r, below.t))
                    .collect();
            }
        }
        let u = self.spec.layers[0].u;
        let mut out = Vec::with_capacity(self.output_bits());
        for w in words {
            out.extend((0..u).rev().map(|k| ((w >> k) & 1) as u8));
        }
        Ok(out)
    }

    /// Recovers information bits from a (possibly corrupted) DM word.
    ///
    /// Words absent from a table are replaced by the nearest stored word in
    /// Hamming distance, ties going to the lowest LUT input.
    pub fn decode(&self, shaped: &[u8]) -> Result<Vec<u8>> {
        if shaped.len() != self.output_bits() {
            return Err(Error::InputLength {
                expected: self.output_bits(),
                actual: shaped.len(),
            });
        }
        let n = self.spec.layers.len();
        let u1 = self.spec.layers[0].u as usize;
        let mut words: Vec<u32> = shaped
            .chunks(u1)
            .map(|c| c.iter().fold(0u32, |acc, &b| (acc << 1) | (b & 1) as u32))
            .collect();
        let mut fresh: Vec<Vec<u32>> = vec![Vec::new(); n];
        for l in 0..n {
            let layer = self.spec.layers[l];
            let inputs: Vec<u32> = words.iter().map(|&w| self.inverse[l][w as usize]).collect();
            let fresh_mask = (1u32 << layer.s) - 1;
            fresh[l] = inputs.iter().map(|&i| i & fresh_mask).collect();
            if l + 1 < n {
                words = inputs
                    .chunks(layer.t as usize)
                    .map(|group| {
                        group
                            .iter()
                            .fold(0u32, |acc, &i| (acc << layer.r) | (i >> layer.s))
                    })
                    .collect();
            }
        }
        debug_assert!(fresh
            .iter()
            .zip(&self.lut_counts)
            .all(|(f, &c)| f.len() as u64 == c));
        let mut out = Vec::with_capacity(self.input_bits());
        for l in (0..n).rev() {
            let s = self.spec.layers[l].s;
            for &v in &fresh[l] {
                out.extend((0..s).rev().map(|k| ((v >> k) & 1) as u8));
            }
        }
        Ok(out)
    }

    /// Exact amplitude PMF under uniform information bits.
    pub fn amplitude_pmf(&self) -> Result<Pmf<BigRational>> {
        tables::amplitude_pmf(&self.spec, &self.tables, &self.labeling)
    }

    /// Exact `P(bit = 1)` for each layer-1 output position.
    pub fn mark_ratios(&self) -> Result<Vec<BigRational>> {
        tables::mark_ratios(&self.spec, &self.tables)
    }

    /// Expected 1D symbol energy `E[a^2]` of the DM output.
    pub fn expected_energy_1d(&self) -> BigRational {
        let top = self.tables.layers.last().expect("validated tree");
        let sum = top
            .iter()
            .fold(BigRational::zero(), |acc, e| acc + &e.energy);
        sum / BigRational::from_integer((top.len() as u64).into())
    }
}

/// Inverse LUT over all `2^u` words. Stored words map to their own input;
/// others to the nearest stored word, the smallest input among equals.
fn nearest_inverse(u: u32, words: impl Iterator<Item = u32>) -> Vec<u32> {
    const UNSET: u32 = u32::MAX;
    let size = 1usize << u;
    let mut inv = vec![UNSET; size];
    let mut frontier = Vec::new();
    for (i, w) in words.enumerate() {
        inv[w as usize] = i as u32;
        frontier.push(w);
    }
    while !frontier.is_empty() {
        let mut next: Vec<u32> = Vec::new();
        let mut best: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
        for &w in &frontier {
            let label = inv[w as usize];
            for k in 0..u {
                let nb = w ^ (1 << k);
                if inv[nb as usize] != UNSET {
                    continue;
                }
                best.entry(nb)
                    .and_modify(|b| *b = (*b).min(label))
                    .or_insert_with(|| {
                        next.push(nb);
                        label
                    });
            }
        }
        for &w in &next {
            inv[w as usize] = best[&w];
        }
        frontier = next;
    }
    inv
}

//! LUT content construction and exact expected-value propagation.
//!
//! Expected energies at every layer share a common denominator, so they are
//! carried as integer numerators and sorted exactly. They are exported as
//! `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::HidmTreeSpec;
use crate::constellation::{AmplitudeLabeling, Pmf};
use crate::error::{Error, Result};

/// One LUT row: the output word and its expected 1D symbol energy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LutEntry {
    pub word: u32,
    pub energy: BigRational,
}

/// Contents of every layer's LUT; row index = LUT input value
/// (constraint bits in the high part, fresh bits in the low part).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HidmTables {
    pub layers: Vec<Vec<LutEntry>>,
}

/// Amplitude index histogram for each shaped bit pattern of one PAM symbol,
/// counting every setting of the unshaped amplitude levels once.
pub(crate) fn shaped_pattern_histograms(
    spec: &HidmTreeSpec,
    labeling: &AmplitudeLabeling,
) -> Vec<Vec<u64>> {
    let b = spec.amplitude_bits;
    let g = spec.shaped_bits_per_symbol();
    let mut hist = vec![vec![0u64; 1 << b]; 1 << g];
    for pattern in 0..(1u32 << b) {
        let mut key = 0u32;
        for &lvl in &spec.shaped_levels {
            key = (key << 1) | ((pattern >> (b + 1 - lvl)) & 1);
        }
        hist[key as usize][labeling.index_of(pattern)] += 1;
    }
    hist
}

/// Layer-1 word statistics: per word, summed over its PAM symbols.
struct LeafModel {
    symbols: u32,
    group_bits: u32,
    hist: Vec<Vec<u64>>,
    // sum of a^2 over the unshaped completions, per shaped pattern
    energy: Vec<u128>,
    // completions per shaped pattern
    completions: u128,
}

impl LeafModel {
    fn new(spec: &HidmTreeSpec, labeling: &AmplitudeLabeling) -> Self {
        let hist = shaped_pattern_histograms(spec, labeling);
        let energy = hist
            .iter()
            .map(|h| {
                h.iter()
                    .enumerate()
                    .map(|(i, &c)| c as u128 * ((2 * i + 1) * (2 * i + 1)) as u128)
                    .sum()
            })
            .collect();
        let completions = hist[0].iter().sum::<u64>() as u128;
        let group_bits = spec.shaped_bits_per_symbol();
        Self {
            symbols: spec.layers[0].u / group_bits,
            group_bits,
            hist,
            energy,
            completions,
        }
    }

    fn groups(&self, word: u32) -> impl Iterator<Item = usize> + '_ {
        let mask = (1u32 << self.group_bits) - 1;
        (0..self.symbols)
            .map(move |k| ((word >> ((self.symbols - 1 - k) * self.group_bits)) & mask) as usize)
    }

    /// Energy numerator; denominator is `symbols * completions`.
    fn word_energy(&self, word: u32) -> u128 {
        self.groups(word).map(|g| self.energy[g]).sum()
    }

    /// Energy rank of every shaped pattern (ties by pattern value).
    fn class_ranks(&self) -> Vec<u32> {
        let mut order: Vec<usize> = (0..self.energy.len()).collect();
        order.sort_by_key(|&g| (self.energy[g], g));
        let mut ranks = vec![0u32; order.len()];
        for (r, g) in order.into_iter().enumerate() {
            ranks[g] = r as u32;
        }
        ranks
    }

    fn denominator(&self) -> u128 {
        self.symbols as u128 * self.completions
    }
}

/// Splits a layer-`l+1` word into its `t` constraint chunks, MSB chunk first.
pub(crate) fn chunks(word: u32, r: u32, t: u32) -> impl Iterator<Item = u32> {
    let mask = if r == 0 { 0 } else { (1u32 << r) - 1 };
    (0..t).map(move |k| (word >> ((t - 1 - k) * r)) & mask)
}

fn to_rational(num: u128, den: u128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Mean of a table region `[c 2^s, (c + 1) 2^s)` as numerators over
/// `den * 2^s`.
fn region_sums(values: &[u128], s: u32) -> Vec<u128> {
    values.chunks(1 << s).map(|c| c.iter().sum()).collect()
}

fn checked_den(den: u128, factor: u128) -> Result<u128> {
    den.checked_mul(factor)
        .filter(|d| *d < 1u128 << 100)
        .ok_or_else(|| Error::TreeMismatch("expected-energy denominators overflow".into()))
}

/// Secondary sort key: the chunk ranks sorted ascending and packed MSB first,
/// so words that put the lowest-energy chunk into some position come first.
fn spread_key(ranks: impl Iterator<Item = u32>, width: u32) -> u32 {
    let mut v: Vec<u32> = ranks.collect();
    v.sort_unstable();
    v.into_iter().fold(0, |acc, r| (acc << width) | r)
}

/// Builds the LUT contents by energy sorting.
///
/// Equal energies are ordered by [`spread_key`], then by word value. This
/// reproduces the reference example tables row for row; plain numeric order
/// would select different words at the table boundary and change the PMF.
pub(crate) fn build_tables(
    spec: &HidmTreeSpec,
    labeling: &AmplitudeLabeling,
) -> Result<HidmTables> {
    spec.validate()?;
    let leaf = LeafModel::new(spec, labeling);
    let mut layers = Vec::with_capacity(spec.layers.len());

    let l1 = spec.layers[0];
    let mut den = leaf.denominator();
    let ranks = leaf.class_ranks();
    let mut cands: Vec<(u128, u32, u32)> = (0..(1u32 << l1.u))
        .map(|w| {
            let spread = spread_key(leaf.groups(w).map(|g| ranks[g]), leaf.group_bits);
            (leaf.word_energy(w), spread, w)
        })
        .collect();
    cands.sort_unstable();
    cands.truncate(1 << l1.v());
    let mut nums: Vec<u128> = cands.iter().map(|c| c.0).collect();
    layers.push(
        cands
            .iter()
            .map(|&(e, _, w)| LutEntry {
                word: w,
                energy: to_rational(e, den),
            })
            .collect::<Vec<_>>(),
    );

    for l in 1..spec.layers.len() {
        let below = spec.layers[l - 1];
        let this = spec.layers[l];
        let regions = region_sums(&nums, below.s);
        den = checked_den(den, (1u128 << below.s) * below.t as u128)?;
        let mut cands: Vec<(u128, u32, u32)> = (0..(1u32 << this.u))
            .map(|w| {
                let e = chunks(w, below.r, below.t)
                    .map(|c| regions[c as usize])
                    .sum();
                (e, spread_key(chunks(w, below.r, below.t), below.r), w)
            })
            .collect();
        cands.sort_unstable();
        cands.truncate(1 << this.v());
        nums = cands.iter().map(|c| c.0).collect();
        layers.push(
            cands
                .iter()
                .map(|&(e, _, w)| LutEntry {
                    word: w,
                    energy: to_rational(e, den),
                })
                .collect(),
        );
    }
    Ok(HidmTables { layers })
}

/// Propagates a linear per-layer-1-word statistic up the tree.
///
/// Returns, for every row of every layer, the expected statistic summed over
/// all layer-1 LUTs below that row (with uniform fresh bits), together with
/// the per-layer denominator that turns sums into means per layer-1 LUT.
fn propagate(
    spec: &HidmTreeSpec,
    tables: &HidmTables,
    width: usize,
    leaf_stat: impl Fn(u32) -> Vec<u128>,
    leaf_den: u128,
) -> Result<Vec<(Vec<Vec<u128>>, u128)>> {
    let mut out = Vec::with_capacity(spec.layers.len());
    let mut rows: Vec<Vec<u128>> = tables.layers[0].iter().map(|e| leaf_stat(e.word)).collect();
    let mut den = leaf_den;
    out.push((rows.clone(), den));
    for l in 1..spec.layers.len() {
        let below = spec.layers[l - 1];
        let regions: Vec<Vec<u128>> = rows
            .chunks(1 << below.s)
            .map(|c| {
                let mut acc = vec![0u128; width];
                for row in c {
                    for (a, v) in acc.iter_mut().zip(row) {
                        *a += v;
                    }
                }
                acc
            })
            .collect();
        den = checked_den(den, (1u128 << below.s) * below.t as u128)?;
        rows = tables.layers[l]
            .iter()
            .map(|e| {
                let mut acc = vec![0u128; width];
                for c in chunks(e.word, below.r, below.t) {
                    for (a, v) in acc.iter_mut().zip(&regions[c as usize]) {
                        *a += v;
                    }
                }
                acc
            })
            .collect();
        out.push((rows.clone(), den));
    }
    Ok(out)
}

/// Recomputes every row's expected energy from the table contents.
pub(crate) fn expected_energies(
    spec: &HidmTreeSpec,
    tables: &HidmTables,
    labeling: &AmplitudeLabeling,
) -> Result<Vec<Vec<BigRational>>> {
    let leaf = LeafModel::new(spec, labeling);
    let layers = propagate(
        spec,
        tables,
        1,
        |w| vec![leaf.word_energy(w)],
        leaf.denominator(),
    )?;
    Ok(layers
        .into_iter()
        .map(|(rows, den)| rows.into_iter().map(|r| to_rational(r[0], den)).collect())
        .collect())
}

/// Exact amplitude PMF of the DM output under uniform input bits.
pub(crate) fn amplitude_pmf(
    spec: &HidmTreeSpec,
    tables: &HidmTables,
    labeling: &AmplitudeLabeling,
) -> Result<Pmf<BigRational>> {
    let leaf = LeafModel::new(spec, labeling);
    let width = 1usize << spec.amplitude_bits;
    let stat = |w: u32| {
        let mut acc = vec![0u128; width];
        for g in leaf.groups(w) {
            for (a, &c) in acc.iter_mut().zip(&leaf.hist[g]) {
                *a += c as u128;
            }
        }
        acc
    };
    let layers = propagate(spec, tables, width, stat, leaf.denominator())?;
    let (rows, den) = layers.last().expect("at least one layer");
    let mut total = vec![0u128; width];
    for r in rows {
        for (a, v) in total.iter_mut().zip(r) {
            *a += v;
        }
    }
    let den = den * rows.len() as u128;
    Pmf::new(total.into_iter().map(|c| to_rational(c, den)).collect())
}

/// Exact probability that each layer-1 output bit is `1`, averaged over all
/// layer-1 LUTs.
pub(crate) fn mark_ratios(spec: &HidmTreeSpec, tables: &HidmTables) -> Result<Vec<BigRational>> {
    let u = spec.layers[0].u;
    let stat = |w: u32| {
        (0..u)
            .map(|k| ((w >> (u - 1 - k)) & 1) as u128)
            .collect::<Vec<_>>()
    };
    let layers = propagate(spec, tables, u as usize, stat, 1)?;
    let (rows, den) = layers.last().expect("at least one layer");
    let den = den * rows.len() as u128;
    Ok((0..u as usize)
        .map(|k| to_rational(rows.iter().map(|r| r[k]).sum(), den))
        .collect())
}

/// Checks sizes, word ranges, distinctness, energy order and the energy
/// values themselves against the lower layers.
pub(crate) fn validate_tables(
    spec: &HidmTreeSpec,
    tables: &HidmTables,
    labeling: &AmplitudeLabeling,
) -> Result<()> {
    if tables.layers.len() != spec.layers.len() {
        return Err(Error::TreeMismatch(format!(
            "{} tables for {} layers",
            tables.layers.len(),
            spec.layers.len()
        )));
    }
    for (i, (rows, l)) in tables.layers.iter().zip(&spec.layers).enumerate() {
        let layer = i + 1;
        let bad = |reason: String| Error::InvalidTree { layer, reason };
        if rows.len() != 1 << l.v() {
            return Err(bad(format!(
                "{} rows, expected 2^{} = {}",
                rows.len(),
                l.v(),
                1u64 << l.v()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for (k, e) in rows.iter().enumerate() {
            if e.word >= 1 << l.u {
                return Err(bad(format!("row {k}: word wider than {} bits", l.u)));
            }
            if !seen.insert(e.word) {
                return Err(bad(format!("row {k}: duplicate word")));
            }
        }
        if rows.windows(2).any(|w| w[1].energy < w[0].energy) {
            return Err(bad("rows are not sorted by expected energy".into()));
        }
    }
    let expected = expected_energies(spec, tables, labeling)?;
    for (i, (rows, exp)) in tables.layers.iter().zip(&expected).enumerate() {
        for (k, (e, x)) in rows.iter().zip(exp).enumerate() {
            if &e.energy != x {
                return Err(Error::InvalidTree {
                    layer: i + 1,
                    reason: format!(
                        "row {k}: stored energy {} but lower layers give {x}",
                        e.energy
                    ),
                });
            }
        }
    }
    Ok(())
}

//! Rate and shaping figures of merit, and their sample estimators.
//!
//! All rates are per QAM symbol (2D) unless a function name says otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::constellation::{AmplitudeLabeling, Pmf};
use crate::error::{Error, Result};
use crate::scalar::RealScalar;

/// Rate bookkeeping of one DM word inside a coded frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapingRates<T> {
    /// `H(X)` of the QAM symbol, bits per 2D.
    pub entropy_2d: T,
    /// FEC code rate in (0, 1].
    pub code_rate: T,
    /// Bits per QAM symbol.
    pub bits_per_qam: u32,
    /// DM input bits per DM word (shaped plus unshaped). May be a
    /// per-word average when DM words do not tile codewords exactly.
    pub dm_input_bits: T,
    /// PAM symbols per DM word.
    pub dm_word_pam_len: u32,
}

impl<T: RealScalar> ShapingRates<T> {
    pub fn new(
        entropy_2d: T,
        code_rate: T,
        bits_per_qam: u32,
        dm_input_bits: T,
        dm_word_pam_len: u32,
    ) -> Result<Self> {
        if !(code_rate > T::zero() && code_rate <= T::one()) {
            return Err(Error::InvalidRates("code rate outside (0, 1]".into()));
        }
        if dm_word_pam_len == 0 || dm_word_pam_len % 2 != 0 {
            return Err(Error::InvalidRates(format!(
                "DM word length {dm_word_pam_len} must be even and positive"
            )));
        }
        if dm_input_bits < T::zero() {
            return Err(Error::InvalidRates("negative input bit count".into()));
        }
        let payload = code_rate * T::c(bits_per_qam as f64) * T::c(dm_word_pam_len as f64 / 2.0);
        if dm_input_bits > payload + T::one() {
            return Err(Error::InvalidRates(format!(
                "{} input bits exceed the {} payload bits of a DM word",
                dm_input_bits.to_f64().unwrap_or(f64::NAN),
                payload.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self {
            entropy_2d,
            code_rate,
            bits_per_qam,
            dm_input_bits,
            dm_word_pam_len,
        })
    }

    fn parity_overhead(&self) -> T {
        (T::one() - self.code_rate) * T::c(self.bits_per_qam as f64)
    }

    fn raw_rate(&self) -> T {
        self.dm_input_bits / T::c(self.dm_word_pam_len as f64 / 2.0)
    }

    /// `R = N_u / (N_s / 2)`, checked against `H(X) - (1 - R_c) m`.
    pub fn information_rate(&self) -> Result<T> {
        self.rate_loss()?;
        Ok(self.raw_rate())
    }

    /// `R_loss = H(X) - (1 - R_c) m - N_u / (N_s / 2)`.
    pub fn rate_loss(&self) -> Result<T> {
        let loss = self.entropy_2d - self.parity_overhead() - self.raw_rate();
        if loss < T::c(-1e-9) {
            return Err(Error::NegativeRateLoss(loss.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(loss.max(T::zero()))
    }
}

/// Constellation gain `d_min^2 (2^beta - 1) / (6 E)` in dB.
///
/// `beta` is the rate in bits per 2D at code rate one and `energy_2d` the
/// mean QAM symbol energy.
pub fn constellation_gain_db<T: RealScalar>(beta: T, energy_2d: T, d_min: T) -> T {
    let g = d_min * d_min * (T::c(2.0).powf(beta) - T::one()) / (T::c(6.0) * energy_2d);
    T::c(10.0) * g.log10()
}

/// Full PAM label table: sign bit (level 1, `0` = positive) followed by the
/// amplitude label. Returns `(position, label)` per constellation point.
pub fn pam_points(labeling: &AmplitudeLabeling) -> Vec<(f64, u32)> {
    let b = labeling.bits();
    let n = 1usize << b;
    let mut points = Vec::with_capacity(2 * n);
    for sign in 0..2u32 {
        for idx in 0..n {
            let a = (2 * idx + 1) as f64;
            let pos = if sign == 0 { a } else { -a };
            points.push((pos, (sign << b) | labeling.pattern_of(idx)));
        }
    }
    points
}

/// Monte Carlo settings for [`air_bmd`].
#[derive(Debug, Clone, Copy)]
pub struct EstimatorConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 1,
        }
    }
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

/// Per-bit-level a-posteriori probability of the transmitted bit, for a
/// received sample `y` given the transmitted label.
fn bit_posteriors(
    points: &[(f64, u32)],
    log_prior: &[f64],
    noise_var: f64,
    y: f64,
    label_bits: u32,
    out: &mut [f64],
) {
    // log w_j = log P(j) - (y - x_j)^2 / (2 sigma^2)
    let logw: Vec<f64> = points
        .iter()
        .zip(log_prior)
        .map(|(&(x, _), &lp)| lp - (y - x) * (y - x) / (2.0 * noise_var))
        .collect();
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logw.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = w.iter().sum();
    for (i, o) in out.iter_mut().enumerate() {
        let shift = label_bits - 1 - i as u32;
        let ones: f64 = points
            .iter()
            .zip(&w)
            .filter(|((_, lab), _)| (lab >> shift) & 1 == 1)
            .map(|(_, wj)| wj)
            .sum();
        *o = ones / total;
    }
}

/// Bit-metric-decoding achievable rate `H(X) - sum_i H(B_i | Y)` of a
/// probabilistically shaped QAM built from two independent PAM rails with
/// uniform signs, over AWGN at `snr_db` (Es/N0 per 2D).
///
/// Estimated by Monte Carlo with matched a-posteriori bit probabilities.
pub fn air_bmd(
    pmf: &Pmf<f64>,
    labeling: &AmplitudeLabeling,
    snr_db: f64,
    config: EstimatorConfig,
) -> Result<Estimate> {
    if !snr_db.is_finite() {
        return Err(Error::NonFiniteSnr);
    }
    if pmf.len() != 1 << labeling.bits() {
        return Err(Error::InvalidPmf("PMF and labeling sizes differ".into()));
    }
    let alphabet = labeling.alphabet();
    let energy_2d = 2.0 * crate::constellation::pmf_energy(pmf, &alphabet);
    let noise_var = energy_2d / (2.0 * 10f64.powf(snr_db / 10.0));
    let points = pam_points(labeling);
    let n = pmf.len();
    let log_prior: Vec<f64> = (0..2 * n).map(|j| (0.5 * pmf.get(j % n)).ln()).collect();
    let label_bits = labeling.bits() + 1;

    // inverse-CDF sampling of the amplitude
    let mut cdf = Vec::with_capacity(n);
    let mut acc = 0.0;
    for p in pmf.probs() {
        acc += p;
        cdf.push(acc);
    }
    let sigma = noise_var.sqrt();
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    let mut post = vec![0.0; label_bits as usize];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..config.samples {
        let u: f64 = rng.random();
        let idx = cdf.iter().position(|&c| u < c).unwrap_or(n - 1);
        let sign = rng.random_bool(0.5) as usize;
        let j = sign * n + idx;
        let (x, label) = points[j];
        let noise: f64 = rng.sample(StandardNormal);
        let y = x + sigma * noise;
        bit_posteriors(&points, &log_prior, noise_var, y, label_bits, &mut post);
        let mut loss = 0.0;
        for (i, p1) in post.iter().enumerate() {
            let bit = (label >> (label_bits - 1 - i as u32)) & 1;
            let p = if bit == 1 { *p1 } else { 1.0 - p1 };
            loss -= p.max(f64::MIN_POSITIVE).log2();
        }
        sum += loss;
        sum_sq += loss * loss;
    }
    let ns = config.samples as f64;
    let mean = sum / ns;
    let var = (sum_sq / ns - mean * mean).max(0.0) * ns / (ns - 1.0).max(1.0);
    Ok(Estimate {
        value: pmf.entropy_2d() - 2.0 * mean,
        std_err: 2.0 * (var / ns).sqrt(),
    })
}

/// One observed coded bit and its pre-decoder L-value.
///
/// L-values follow `L = ln P(B=0|y) / P(B=1|y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LlrSample<T> {
    pub bit: u8,
    pub llr: T,
    /// Bit level in `1..=m`.
    pub level: u16,
}

impl<T: RealScalar> LlrSample<T> {
    /// Asymmetric L-value `(-1)^B L`.
    pub fn asymmetric(&self) -> T {
        if self.bit == 0 {
            self.llr
        } else {
            -self.llr
        }
    }
}

/// How L-values are turned into a discrete conditioning variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LlrAlphabet {
    /// L-values are real; use the matched metric `log2(1 + e^{-L_a})` for
    /// GMI and quantile binning of `|L|` for ASI.
    Continuous { quantile_bins: usize },
    /// L-values lie on a uniform grid with this step; conditional entropies
    /// are computed exactly over the grid points.
    Quantized { step: f64 },
}

impl Default for LlrAlphabet {
    fn default() -> Self {
        LlrAlphabet::Continuous { quantile_bins: 64 }
    }
}

/// NGMI with the GMI it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgmiEstimate {
    pub ngmi: f64,
    pub gmi: f64,
    pub std_err: f64,
}

fn split_levels<T: RealScalar>(samples: &[LlrSample<T>]) -> Result<Vec<Vec<LlrSample<T>>>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let m = samples.iter().map(|s| s.level).max().unwrap_or(0) as usize;
    if samples.iter().any(|s| s.level == 0) {
        return Err(Error::InvalidRates("bit level must be >= 1".into()));
    }
    let mut by_level = vec![Vec::new(); m];
    for s in samples {
        by_level[s.level as usize - 1].push(*s);
    }
    Ok(by_level.into_iter().filter(|v| !v.is_empty()).collect())
}

fn binary_entropy_counts(zeros: u64, ones: u64) -> f64 {
    let n = (zeros + ones) as f64;
    [zeros, ones]
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// `H(B | K)` from a list of (key, bit) counts. With `miller_madow` the
/// per-key plug-in entropy gets the `(c - 1) / (2 n ln 2)` correction.
fn conditional_entropy(
    counts: &std::collections::BTreeMap<i64, [u64; 2]>,
    miller_madow: bool,
) -> f64 {
    let total: u64 = counts.values().map(|c| c[0] + c[1]).sum();
    let mut h = 0.0;
    for c in counts.values() {
        let nk = c[0] + c[1];
        let mut hk = binary_entropy_counts(c[0], c[1]);
        if miller_madow {
            let nonzero = c.iter().filter(|&&x| x > 0).count() as f64;
            hk += (nonzero - 1.0) / (2.0 * nk as f64 * std::f64::consts::LN_2);
        }
        h += nk as f64 / total as f64 * hk;
    }
    h
}

fn grid_key<T: RealScalar>(llr: T, step: f64) -> i64 {
    (llr.to_f64().unwrap_or(0.0) / step).round() as i64
}

/// Per-level empirical `H(B_i | L_i)` with the chosen alphabet.
fn level_conditional_entropy<T: RealScalar>(level: &[LlrSample<T>], alphabet: LlrAlphabet) -> f64 {
    let mut counts: std::collections::BTreeMap<i64, [u64; 2]> = Default::default();
    match alphabet {
        LlrAlphabet::Quantized { step } => {
            for s in level {
                counts.entry(grid_key(s.llr, step)).or_default()[s.bit as usize & 1] += 1;
            }
            conditional_entropy(&counts, false)
        }
        LlrAlphabet::Continuous { quantile_bins } => {
            let mut mags: Vec<f64> = level
                .iter()
                .map(|s| s.llr.to_f64().unwrap_or(0.0).abs())
                .collect();
            mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let bins = quantile_bins.max(1);
            // upper edges of the first bins - 1 quantile cells
            let edges: Vec<f64> = (1..bins)
                .map(|b| mags[(b * mags.len() / bins).min(mags.len() - 1)])
                .collect();
            for s in level {
                let l = s.llr.to_f64().unwrap_or(0.0);
                let bin = edges.partition_point(|&e| e <= l.abs()) as i64;
                let sign = if l > 0.0 {
                    1
                } else if l < 0.0 {
                    -1
                } else {
                    0
                };
                counts.entry(sign * (bins as i64 + 1) + bin).or_default()[s.bit as usize & 1] += 1;
            }
            conditional_entropy(&counts, true)
        }
    }
}

/// NGMI `1 - (2H(X) - GMI) / m` from L-value samples.
///
/// With continuous L-values GMI uses the matched metric
/// `H(B_i|Y) ~ E[log2(1 + exp(-L_a))]`; with quantized L-values it uses
/// the exact empirical conditional entropy over the quantizer grid.
pub fn estimate_ngmi<T: RealScalar>(
    samples: &[LlrSample<T>],
    entropy_2d: f64,
    m: u32,
    alphabet: LlrAlphabet,
) -> Result<NgmiEstimate> {
    let levels = split_levels(samples)?;
    let mut total_h = 0.0;
    let mut var = 0.0;
    for level in &levels {
        match alphabet {
            LlrAlphabet::Continuous { .. } => {
                let n = level.len() as f64;
                let (mut s1, mut s2) = (0.0, 0.0);
                for s in level {
                    let la = s.asymmetric().to_f64().unwrap_or(0.0);
                    // log2(1 + e^{-la}), stable for both signs
                    let v = if la > 0.0 {
                        (-la).exp().ln_1p()
                    } else {
                        -la + la.exp().ln_1p()
                    } / std::f64::consts::LN_2;
                    s1 += v;
                    s2 += v * v;
                }
                let mean = s1 / n;
                total_h += mean;
                var += (s2 / n - mean * mean).max(0.0) / n;
            }
            LlrAlphabet::Quantized { .. } => {
                let h = level_conditional_entropy(level, alphabet);
                total_h += h;
                var += h * (1.0 - h).max(0.0) / level.len() as f64;
            }
        }
    }
    // Levels absent from the sample set are treated as perfectly known.
    let sum_h = total_h * m as f64 / levels.len() as f64;
    let gmi = entropy_2d - sum_h;
    let ngmi = 1.0 - (entropy_2d - gmi) / m as f64;
    Ok(NgmiEstimate {
        ngmi,
        gmi,
        std_err: var.sqrt() / levels.len() as f64,
    })
}

/// ASI `1 - (1/m) sum_i H(B_i | L_i)` estimated from L-value samples.
pub fn estimate_asi<T: RealScalar>(samples: &[LlrSample<T>], alphabet: LlrAlphabet) -> Result<f64> {
    let levels = split_levels(samples)?;
    let h: f64 = levels
        .iter()
        .map(|l| level_conditional_entropy(l, alphabet))
        .sum::<f64>()
        / levels.len() as f64;
    Ok((1.0 - h).clamp(0.0, 1.0))
}

/// Counts of `(level, integer L-value, bit)` for quantized L-values, plus
/// matched-metric costs of the unquantized L-values behind them.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LlrHistogram {
    counts: Vec<std::collections::BTreeMap<i64, [u64; 2]>>,
    // per level: (sum of log2(1 + e^{-L_a}), samples)
    costs: Vec<(f64, u64)>,
}

impl LlrHistogram {
    pub fn new(levels: usize) -> Self {
        Self {
            counts: vec![Default::default(); levels],
            costs: vec![(0.0, 0); levels],
        }
    }

    /// Records one bit at `level` (1-based) with quantized L-value `llr`
    /// and matched-metric cost `cost = log2(1 + e^{-L_a})`.
    pub fn add(&mut self, level: usize, llr: i64, bit: u8, cost: f64) {
        self.counts[level - 1].entry(llr).or_default()[bit as usize & 1] += 1;
        let c = &mut self.costs[level - 1];
        c.0 += cost;
        c.1 += 1;
    }

    pub fn merge(&mut self, other: &Self) {
        if self.counts.len() < other.counts.len() {
            self.counts.resize(other.counts.len(), Default::default());
            self.costs.resize(other.costs.len(), (0.0, 0));
        }
        for (mine, theirs) in self.counts.iter_mut().zip(&other.counts) {
            for (k, v) in theirs {
                let e = mine.entry(*k).or_default();
                e[0] += v[0];
                e[1] += v[1];
            }
        }
        for (mine, theirs) in self.costs.iter_mut().zip(&other.costs) {
            mine.0 += theirs.0;
            mine.1 += theirs.1;
        }
    }

    pub fn samples(&self) -> u64 {
        self.costs.iter().map(|c| c.1).sum()
    }

    /// ASI `1 - mean_i H(B_i | L_i)` over the quantized L-values.
    pub fn asi(&self) -> Option<f64> {
        let hs: Vec<f64> = self
            .counts
            .iter()
            .filter(|c| !c.is_empty())
            .map(|c| conditional_entropy(c, false))
            .collect();
        if hs.is_empty() {
            return None;
        }
        Some((1.0 - hs.iter().sum::<f64>() / hs.len() as f64).clamp(0.0, 1.0))
    }

    /// NGMI `1 - mean_i E[log2(1 + e^{-L_a})]` from the matched-metric
    /// costs; equal to `1 - (2H(X) - GMI) / m`.
    pub fn ngmi(&self) -> Option<f64> {
        let per: Vec<f64> = self
            .costs
            .iter()
            .filter(|c| c.1 > 0)
            .map(|c| c.0 / c.1 as f64)
            .collect();
        if per.is_empty() {
            return None;
        }
        Some(1.0 - per.iter().sum::<f64>() / per.len() as f64)
    }
}

/// `log2(1 + e^{-x})` without overflow.
pub fn log2_1p_exp_neg(x: f64) -> f64 {
    if x == f64::INFINITY {
        0.0
    } else if x > 0.0 {
        (-x).exp().ln_1p() / std::f64::consts::LN_2
    } else {
        (-x + x.exp().ln_1p()) / std::f64::consts::LN_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellation::{mb_pmf, AmplitudeAlphabet};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn information_rate_examples() {
        let n_u = 1014.0 + (5.0 / 6.0 * 8.0 - 4.0) * 320.0;
        let r = ShapingRates::new(7.214, 5.0 / 6.0, 8, n_u, 640).unwrap();
        assert!(close(r.information_rate().unwrap(), 5.83, 0.01));
        assert!(close(r.rate_loss().unwrap(), 0.045, 0.002));

        let example = ShapingRates::new(2.0 * 3.93, 1.0, 10, 15.0, 4).unwrap();
        assert!(close(example.information_rate().unwrap(), 7.5, 1e-12));
        assert!(close(example.rate_loss().unwrap(), 0.36, 0.01));

        let zero = ShapingRates::new(4.0, 1.0, 4, 0.0, 4).unwrap();
        assert_eq!(zero.information_rate().unwrap(), 0.0);
    }

    #[test]
    fn hidm_rate_loss_row() {
        let n_u = 507.0 + (5.0 / 6.0 * 8.0 - 4.0) * 160.0;
        let r = ShapingRates::new(7.252, 5.0 / 6.0, 8, n_u, 320).unwrap();
        assert!(close(r.rate_loss().unwrap(), 0.083, 0.002));
    }

    #[test]
    fn rates_reject_bad_input() {
        assert!(ShapingRates::new(7.0, 1.2, 8, 10.0, 640).is_err());
        assert!(ShapingRates::new(7.0, 0.5, 8, 10.0, 3).is_err());
        assert!(ShapingRates::new(7.0, 0.5, 8, 10_000.0, 640).is_err());
        let over = ShapingRates::new(6.0, 1.0, 8, 640.0, 160).unwrap();
        assert!(matches!(over.rate_loss(), Err(Error::NegativeRateLoss(_))));
    }

    #[test]
    fn gain_examples() {
        assert!(close(
            constellation_gain_db(7.16875, 72.5, 2.0),
            1.186,
            0.005
        ));
        assert!(close(constellation_gain_db(7.5, 114.0, 2.0), 0.22, 0.01));
        let beta = 6.0f64;
        let e = 4.0 * (2f64.powf(beta) - 1.0) / 6.0;
        assert!(constellation_gain_db(beta, e, 2.0).abs() < 1e-12);
    }

    #[test]
    fn gain_scale_invariant() {
        let g1 = constellation_gain_db(7.0, 70.0, 2.0);
        let g2 = constellation_gain_db(7.0, 70.0 * 9.0, 6.0);
        assert!(close(g1, g2, 1e-12));
    }

    #[test]
    fn air_noiseless_equals_entropy() {
        let lab = AmplitudeLabeling::reflected_gray(3).unwrap();
        let pmf = mb_pmf(0.02, &AmplitudeAlphabet::new(3).unwrap());
        let est = air_bmd(
            &pmf,
            &lab,
            300.0,
            EstimatorConfig {
                samples: 2000,
                seed: 3,
            },
        )
        .unwrap();
        assert!(close(est.value, pmf.entropy_2d(), 1e-9));
    }

    #[test]
    fn air_vanishes_at_low_snr() {
        let lab = AmplitudeLabeling::reflected_gray(3).unwrap();
        let pmf = Pmf::<f64>::uniform(8);
        let est = air_bmd(
            &pmf,
            &lab,
            -40.0,
            EstimatorConfig {
                samples: 20_000,
                seed: 5,
            },
        )
        .unwrap();
        assert!(est.value.abs() <= 3.0 * est.std_err + 1e-3, "{est:?}");
    }

    #[test]
    fn air_rejects_nan() {
        let lab = AmplitudeLabeling::reflected_gray(2).unwrap();
        let pmf = Pmf::<f64>::uniform(4);
        assert!(matches!(
            air_bmd(&pmf, &lab, f64::NAN, EstimatorConfig::default()),
            Err(Error::NonFiniteSnr)
        ));
    }

    #[test]
    fn air_monotone_in_snr() {
        let lab = AmplitudeLabeling::reflected_gray(3).unwrap();
        let pmf = mb_pmf(0.0137, &AmplitudeAlphabet::new(3).unwrap());
        let cfg = EstimatorConfig {
            samples: 20_000,
            seed: 9,
        };
        let vals: Vec<Estimate> = [10.0, 15.0, 20.0]
            .iter()
            .map(|&s| air_bmd(&pmf, &lab, s, cfg).unwrap())
            .collect();
        for w in vals.windows(2) {
            assert!(w[1].value + 3.0 * (w[0].std_err + w[1].std_err) >= w[0].value);
        }
    }

    fn perfect_samples(n: usize, m: u16, mag: f64) -> Vec<LlrSample<f64>> {
        (0..n)
            .map(|i| {
                let bit = ((i / m as usize) % 2) as u8;
                LlrSample {
                    bit,
                    llr: if bit == 0 { mag } else { -mag },
                    level: (i % m as usize) as u16 + 1,
                }
            })
            .collect()
    }

    #[test]
    fn ngmi_limits() {
        let perfect = perfect_samples(1000, 4, 1e6);
        let e = estimate_ngmi(&perfect, 4.0, 4, LlrAlphabet::default()).unwrap();
        assert!(close(e.ngmi, 1.0, 1e-9));
        let zero: Vec<_> = perfect
            .iter()
            .map(|s| LlrSample { llr: 0.0, ..*s })
            .collect();
        let e = estimate_ngmi(&zero, 4.0, 4, LlrAlphabet::default()).unwrap();
        assert!(close(e.ngmi, 0.0, 1e-12));
    }

    #[test]
    fn asi_limits() {
        let perfect = perfect_samples(1000, 4, 1e6);
        assert!(close(
            estimate_asi(&perfect, LlrAlphabet::default()).unwrap(),
            1.0,
            1e-12
        ));
        let zero: Vec<_> = perfect
            .iter()
            .map(|s| LlrSample { llr: 0.0, ..*s })
            .collect();
        assert!(close(
            estimate_asi(&zero, LlrAlphabet::default()).unwrap(),
            0.0,
            1e-12
        ));
        assert!(matches!(
            estimate_asi::<f64>(&[], LlrAlphabet::default()),
            Err(Error::EmptySamples)
        ));
    }

    #[test]
    fn asi_quantized_limits() {
        let perfect = perfect_samples(1000, 2, 7.0);
        let q = LlrAlphabet::Quantized { step: 1.0 };
        assert!(close(estimate_asi(&perfect, q).unwrap(), 1.0, 1e-12));
        let e = estimate_ngmi(&perfect, 2.0, 2, q).unwrap();
        assert!(close(e.ngmi, 1.0, 1e-12));
    }
}

//! PAM amplitude alphabets, reflected-Gray labelings and Maxwell–Boltzmann
//! distributions.
//!
//! Amplitudes are odd integers `1, 3, ..., 2^b - 1` (minimum distance 2);
//! any physical scaling happens in the channel.

use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};

/// Minimum distance between adjacent PAM levels.
pub const D_MIN: f64 = 2.0;

/// One-sided PAM amplitude set `{1, 3, ..., 2^bits - 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AmplitudeAlphabet {
    bits: u32,
}

impl AmplitudeAlphabet {
    pub fn new(bits: u32) -> Result<Self> {
        if !(1..=7).contains(&bits) {
            return Err(Error::LabelWidth(bits));
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        1 << self.bits
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Amplitude of the `index`-th level (`2 * index + 1`).
    pub fn amplitude(&self, index: usize) -> u32 {
        2 * index as u32 + 1
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.len()).map(|i| self.amplitude(i))
    }

    pub fn max_amplitude(&self) -> u32 {
        self.amplitude(self.len() - 1)
    }
}

/// Bijection between `bits`-wide patterns and amplitude indices.
///
/// Patterns are written most significant bit first, so bit level 1 of the
/// amplitude label is the leftmost character of [`pattern_string`].
///
/// [`pattern_string`]: AmplitudeLabeling::pattern_string
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplitudeLabeling {
    bits: u32,
    // pattern -> amplitude index
    to_index: Vec<u16>,
    // amplitude index -> pattern
    to_pattern: Vec<u16>,
}

impl AmplitudeLabeling {
    /// Binary-reflected Gray labeling: amplitude index `i` carries `i ^ (i >> 1)`.
    pub fn reflected_gray(bits: u32) -> Result<Self> {
        let alphabet = AmplitudeAlphabet::new(bits)?;
        let to_pattern: Vec<u16> = (0..alphabet.len()).map(|i| (i ^ (i >> 1)) as u16).collect();
        let mut to_index = vec![0u16; alphabet.len()];
        for (i, &p) in to_pattern.iter().enumerate() {
            to_index[p as usize] = i as u16;
        }
        Ok(Self {
            bits,
            to_index,
            to_pattern,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn alphabet(&self) -> AmplitudeAlphabet {
        AmplitudeAlphabet { bits: self.bits }
    }

    pub fn index_of(&self, pattern: u32) -> usize {
        self.to_index[pattern as usize] as usize
    }

    pub fn pattern_of(&self, index: usize) -> u32 {
        self.to_pattern[index] as u32
    }

    pub fn amplitude_of(&self, pattern: u32) -> u32 {
        2 * self.index_of(pattern) as u32 + 1
    }

    /// Pattern as a string of '0'/'1', most significant bit first.
    pub fn pattern_string(&self, pattern: u32) -> String {
        bit_string(pattern as u64, self.bits as usize)
    }

    /// Parses a '0'/'1' pattern and returns its amplitude.
    pub fn amplitude_of_str(&self, pattern: &str) -> Option<u32> {
        if pattern.len() != self.bits as usize {
            return None;
        }
        let p = u32::from_str_radix(pattern, 2).ok()?;
        Some(self.amplitude_of(p))
    }
}

pub(crate) fn bit_string(value: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|b| if (value >> b) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Probability mass function over an ordered alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<T> {
    probs: Vec<T>,
}

impl<T: Scalar> Pmf<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("empty".into()));
        }
        let zero = T::zero();
        if probs.iter().any(|p| *p < zero || p.to_f64_lossy().is_nan()) {
            return Err(Error::InvalidPmf("negative or NaN probability".into()));
        }
        let total = probs.iter().cloned().fold(T::zero(), |a, b| a + b);
        if (total.clone() - T::one()).magnitude() > T::mass_tolerance() {
            return Err(Error::InvalidPmf(format!(
                "mass sums to {}",
                total.to_f64_lossy()
            )));
        }
        Ok(Self { probs })
    }

    /// Builds a PMF from non-negative weights by normalizing them.
    pub fn from_weights(weights: Vec<T>) -> Result<Self> {
        let total = weights.iter().cloned().fold(T::zero(), |a, b| a + b);
        if total <= T::zero() {
            return Err(Error::InvalidPmf("weights sum to zero".into()));
        }
        Self::new(weights.into_iter().map(|w| w / total.clone()).collect())
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![T::ratio(1, n as u64); n],
        }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, i: usize) -> &T {
        &self.probs[i]
    }

    pub fn to_f64(&self) -> Pmf<f64> {
        Pmf {
            probs: self.probs.iter().map(Scalar::to_f64_lossy).collect(),
        }
    }

    /// Mean of `value(i)` under this PMF.
    pub fn expectation(&self, mut value: impl FnMut(usize) -> T) -> T {
        self.probs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, p)| acc + p.clone() * value(i))
    }
}

/// Mean one-dimensional symbol energy `sum P(a) a^2` over the amplitude alphabet.
///
/// The QAM (2D) energy is twice this value.
pub fn pmf_energy<T: Scalar>(pmf: &Pmf<T>, alphabet: &AmplitudeAlphabet) -> T {
    pmf.expectation(|i| {
        let a = alphabet.amplitude(i) as u64;
        T::from_u64_exact(a * a)
    })
}

impl<T: RealScalar> Pmf<T> {
    /// Entropy in bits.
    pub fn entropy(&self) -> T {
        self.probs
            .iter()
            .filter(|p| **p > T::zero())
            .fold(T::zero(), |acc, &p| acc - p * p.log2())
    }

    /// Entropy of a PAM symbol whose amplitude follows this PMF and whose
    /// sign is uniform: `H(|X|) + 1`.
    pub fn entropy_1d_signed(&self) -> T {
        self.entropy() + T::one()
    }

    /// Entropy of a QAM symbol built from two independent PAM rails: `2 H(X)`.
    pub fn entropy_2d(&self) -> T {
        T::c(2.0) * self.entropy_1d_signed()
    }
}

/// Maxwell–Boltzmann PMF `exp(-lambda a^2) / sum exp(-lambda xi^2)` over
/// the one-sided amplitudes.
pub fn mb_pmf<T: RealScalar>(lambda: T, alphabet: &AmplitudeAlphabet) -> Pmf<T> {
    assert!(lambda >= T::zero(), "lambda must be non-negative");
    // Shift exponents by the smallest energy so large lambda stays finite.
    let weights: Vec<T> = alphabet
        .amplitudes()
        .map(|a| {
            let e = T::c((a * a) as f64 - 1.0);
            (-lambda * e).exp()
        })
        .collect();
    Pmf::from_weights(weights).expect("MB weights are positive")
}

/// Which statistic the MB root-finder matches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MbTarget {
    /// Target `2 H(X)` in bits per QAM symbol.
    Entropy2d(f64),
    /// Target mean 1D energy.
    Energy1d(f64),
}

/// Solves for the MB parameter reaching `target` by bisection (tolerance
/// `1e-10` on the target statistic).
///
/// Both entropy and energy decrease monotonically in lambda, so the target
/// must lie between the uniform value and the single-point limit.
pub fn mb_lambda_for(target: MbTarget, alphabet: &AmplitudeAlphabet) -> Result<f64> {
    let stat = |lambda: f64| {
        let pmf = mb_pmf(lambda, alphabet);
        match target {
            MbTarget::Entropy2d(_) => pmf.entropy_2d(),
            MbTarget::Energy1d(_) => pmf_energy(&pmf, alphabet),
        }
    };
    let goal = match target {
        MbTarget::Entropy2d(v) | MbTarget::Energy1d(v) => v,
    };
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    if goal > stat(lo) + 1e-10 {
        return Err(Error::InvalidPmf(format!(
            "target {goal} exceeds the uniform value {}",
            stat(lo)
        )));
    }
    while stat(hi) > goal {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::InvalidPmf(format!("target {goal} unreachable")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = stat(mid);
        if (v - goal).abs() <= 1e-10 {
            return Ok(mid);
        }
        if v > goal {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

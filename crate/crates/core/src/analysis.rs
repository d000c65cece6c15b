//! Error insertion and the single-error bounds on post-invDM BER, BBER and
//! FEC frame error rate.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dm::Matcher;
use crate::error::{Error, Result};
use crate::pipeline::PointResult;

/// Outcome of an error-insertion run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InsertionResult {
    pub n_errors: usize,
    pub trials: u64,
    /// Total information-bit errors over all trials.
    pub bit_errors: u64,
    /// `N_u^sb`.
    pub input_bits: usize,
}

impl InsertionResult {
    /// Mean information-bit errors per trial.
    pub fn alpha(&self) -> f64 {
        self.bit_errors as f64 / self.trials as f64
    }

    /// Mean BER over the shaped information bits.
    pub fn ber(&self) -> f64 {
        self.alpha() / self.input_bits as f64
    }
}

fn flip_and_count(
    dm: &Matcher,
    info: &[u8],
    positions: impl IntoIterator<Item = usize>,
) -> Result<u64> {
    let mut shaped = dm.encode(info)?;
    for p in positions {
        shaped[p] ^= 1;
    }
    let back = dm.decode(&shaped)?;
    Ok(back.iter().zip(info).filter(|(a, b)| a != b).count() as u64)
}

/// Random info bits, `n_errors` distinct shaped-bit flips, dematch, count.
/// Trial `t` draws from a stream keyed by `(seed, t)`.
pub fn error_insertion_test(
    dm: &Matcher,
    n_errors: usize,
    trials: u64,
    seed: u64,
) -> Result<InsertionResult> {
    let word = dm.output_bits();
    if n_errors == 0 || n_errors > word {
        return Err(Error::TooManyErrors {
            n_errors,
            word_len: word,
        });
    }
    let nu = dm.input_bits();
    let bit_errors = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let info: Vec<u8> = (0..nu).map(|_| rng.random::<bool>() as u8).collect();
            let pos = sample(&mut rng, word, n_errors);
            flip_and_count(dm, &info, pos.into_iter())
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(InsertionResult {
        n_errors,
        trials,
        bit_errors,
        input_bits: nu,
    })
}

/// Every input word against every single-bit error position. Limited to
/// `N_u^sb <= 24`.
pub fn exhaustive_single_error(dm: &Matcher) -> Result<InsertionResult> {
    let nu = dm.input_bits();
    if nu > 24 {
        return Err(Error::Config(format!(
            "{nu} input bits is too many to enumerate"
        )));
    }
    let word = dm.output_bits();
    let bit_errors = (0..1u64 << nu)
        .into_par_iter()
        .map(|v| {
            let info: Vec<u8> = (0..nu).rev().map(|k| ((v >> k) & 1) as u8).collect();
            (0..word).try_fold(0u64, |acc, p| Ok(acc + flip_and_count(dm, &info, [p])?))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(InsertionResult {
        n_errors: 1,
        trials: (1u64 << nu) * word as u64,
        bit_errors,
        input_bits: nu,
    })
}

/// Frame quantities entering the bounds, per DM word.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// `N_u^sb`; 0 without a DM.
    pub shaped_input_bits: f64,
    /// `N_u`, shaped plus unshaped client bits per DM word.
    pub input_bits: f64,
    /// `m^sb`, shaped bits per QAM symbol.
    pub shaped_bits_per_qam: f64,
    /// `m`.
    pub bits_per_qam: f64,
    /// `R_c`.
    pub code_rate: f64,
    /// `N_s`, PAM symbols per DM word.
    pub pam_symbols: f64,
    /// FEC payload `k`.
    pub payload_bits: f64,
}

impl Geometry {
    /// PAS geometry; `N_u` follows from filling each QAM symbol with
    /// `R_c m` payload bits.
    pub fn pas(
        shaped_input_bits: usize,
        pam_symbols: usize,
        shaped_bits_per_qam: u32,
        bits_per_qam: u32,
        code_rate: f64,
        payload_bits: usize,
    ) -> Self {
        let (nsb, ns, msb, m) = (
            shaped_input_bits as f64,
            pam_symbols as f64,
            shaped_bits_per_qam as f64,
            bits_per_qam as f64,
        );
        Self {
            shaped_input_bits: nsb,
            input_bits: nsb + (code_rate * m - msb) * ns / 2.0,
            shaped_bits_per_qam: msb,
            bits_per_qam: m,
            code_rate,
            pam_symbols: ns,
            payload_bits: payload_bits as f64,
        }
    }

    /// Uniform signaling: no DM, `N_u = R_c m N_s / 2` for the bookkeeping.
    pub fn bicm(bits_per_qam: u32, code_rate: f64, payload_bits: usize) -> Self {
        let m = bits_per_qam as f64;
        Self {
            shaped_input_bits: 0.0,
            input_bits: code_rate * m,
            shaped_bits_per_qam: 0.0,
            bits_per_qam: m,
            code_rate,
            pam_symbols: 2.0,
            payload_bits: payload_bits as f64,
        }
    }

    /// `N_u / (R_c m N_s / 2)`.
    pub fn input_fraction(&self) -> f64 {
        self.input_bits / (self.code_rate * self.bits_per_qam * self.pam_symbols / 2.0)
    }
}

/// `(gamma_in, gamma_out) = (N_u^sb / N_u, m^sb / (R_c m))`.
pub fn compute_gammas(g: &Geometry) -> (f64, f64) {
    (
        g.shaped_input_bits / g.input_bits,
        g.shaped_bits_per_qam / (g.code_rate * g.bits_per_qam),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingleErrorParams {
    /// Mean invDM output errors per input error.
    pub alpha: f64,
    /// OTUC blocks hit by one erroneous FEC codeword.
    pub theta: f64,
    pub gamma_in: f64,
    pub gamma_out: f64,
}

impl SingleErrorParams {
    pub fn from_geometry(alpha: f64, theta: f64, g: &Geometry) -> Self {
        let (gamma_in, gamma_out) = compute_gammas(g);
        Self {
            alpha,
            theta,
            gamma_in,
            gamma_out,
        }
    }

    /// Reference values for the CCDM-based link.
    pub const CCDM_REFERENCE: Self = Self {
        alpha: 507.0,
        theta: 32.0,
        gamma_in: 0.543,
        gamma_out: 0.6,
    };
    /// Reference values for the HiDM-based link (`theta <= 2`).
    pub const HIDM_REFERENCE: Self = Self {
        alpha: 13.4,
        theta: 2.0,
        gamma_in: 0.543,
        gamma_out: 0.6,
    };
    pub const BICM: Self = Self {
        alpha: 0.0,
        theta: 1.0,
        gamma_in: 0.0,
        gamma_out: 0.0,
    };
}

/// `(sb, total)` post-invDM BER bounds for post-FEC BER `e`:
/// `sb = min(alpha (m^sb N_s / 2) / N_u^sb * e, 1/2)` and
/// `total = gamma_in sb + (1 - gamma_in) e`.
pub fn bound_post_invdm_ber(p: &SingleErrorParams, g: &Geometry, e: f64) -> (f64, f64) {
    let sb = if g.shaped_input_bits > 0.0 {
        (p.alpha * (g.shaped_bits_per_qam * g.pam_symbols / 2.0) / g.shaped_input_bits * e).min(0.5)
    } else {
        0.0
    };
    (sb, p.gamma_in * sb + (1.0 - p.gamma_in) * e)
}

/// `(bber, fer)` bounds: `fer = min(k e, 1)` and
/// `bber = min(N_block (gamma_out theta + 1 - gamma_out) / (k N_u / (R_c m N_s / 2)) fer, 1)`.
pub fn bound_bber(p: &SingleErrorParams, g: &Geometry, e: f64, block_bits: f64) -> (f64, f64) {
    let fer = (g.payload_bits * e).min(1.0);
    let blocks_per_error = p.gamma_out * p.theta + 1.0 - p.gamma_out;
    let bber =
        (block_bits * blocks_per_error / (g.payload_bits * g.input_fraction()) * fer).min(1.0);
    (bber, fer)
}

/// Post-FEC BER at which the total post-invDM bound reaches `target`.
pub fn required_post_fec_ber(p: &SingleErrorParams, g: &Geometry, target: f64) -> Option<f64> {
    if !(target > 0.0) || bound_post_invdm_ber(p, g, 1.0).1 < target {
        return None;
    }
    let (mut lo, mut hi) = (-60.0f64, 0.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bound_post_invdm_ber(p, g, 10f64.powf(mid)).1 < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(10f64.powf(hi))
}

/// Ratio `total / e` of the post-invDM bound in its linear region.
pub fn r_e1_bound(p: &SingleErrorParams, g: &Geometry) -> f64 {
    let e = 1e-20;
    bound_post_invdm_ber(p, g, e).1 / e
}

/// Measured `(r_E1, r_E2)`. For uniform signaling `r_E2` is relative to the
/// post-FEC BER.
pub fn error_ratios(point: &PointResult, shaped: bool) -> (Option<f64>, Option<f64>) {
    let post_fec = point.post_fec_ber().filter(|&b| b > 0.0);
    let post_inv = point.post_invdm_ber().filter(|&b| b > 0.0);
    let bber = point.bber();
    let r1 = post_fec.zip(post_inv).map(|(f, i)| i / f);
    let r2 = if shaped {
        bber.zip(post_inv).map(|(b, i)| b / i)
    } else {
        bber.zip(post_fec).map(|(b, f)| b / f)
    };
    (r1, r2)
}

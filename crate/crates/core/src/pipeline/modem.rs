//! Constellations, AWGN and quantized soft demapping.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::constellation::{AmplitudeLabeling, Pmf};
use crate::error::{Error, Result};
use crate::metrics::log2_1p_exp_neg;

/// A labeled constellation point with its prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<const D: usize> {
    pub coords: [f64; D],
    /// Label bits, level 1 in the most significant position.
    pub label: u32,
    pub prior: f64,
}

/// Labeled point set in `D` real dimensions with `levels` label bits.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation<const D: usize> {
    pub points: Vec<Point<D>>,
    pub levels: u32,
}

impl Constellation<1> {
    /// Signed PAM rail: level 1 is the sign (0 = positive), levels
    /// `2..=b+1` the amplitude label. `pmf` is over amplitudes.
    pub fn pam(labeling: &AmplitudeLabeling, pmf: &Pmf<f64>) -> Result<Self> {
        let b = labeling.bits();
        let n = 1usize << b;
        if pmf.len() != n {
            return Err(Error::InvalidPmf(format!(
                "{} amplitude probabilities for {n} amplitudes",
                pmf.len()
            )));
        }
        let points = (0..2u32)
            .flat_map(|sign| {
                (0..n).map(move |idx| {
                    let a = (2 * idx + 1) as f64;
                    Point {
                        coords: [if sign == 0 { a } else { -a }],
                        label: (sign << b) | labeling.pattern_of(idx),
                        prior: pmf.probs()[idx] / 2.0,
                    }
                })
            })
            .collect();
        Ok(Self {
            points,
            levels: b + 1,
        })
    }

    /// Rail value for a `b + 1`-bit label.
    pub fn pam_value(labeling: &AmplitudeLabeling, label: u32) -> f64 {
        let b = labeling.bits();
        let a = labeling.amplitude_of(label & ((1 << b) - 1)) as f64;
        if label >> b & 1 == 1 {
            -a
        } else {
            a
        }
    }
}

impl Constellation<2> {
    /// 128-point cross QAM with a Gray-like labeling.
    ///
    /// Starts from a 16 x 8 rectangle labeled `[sI, sQ, gray3(|I|), gray2(|Q|)]`
    /// and folds the outer columns `|I| in {13, 15}` onto the rows
    /// `|Q'| = |I| - 4`, with `|I'| = 8 - |Q|`, keeping both signs.
    pub fn cross128() -> Self {
        let g3 = AmplitudeLabeling::reflected_gray(3).expect("3 bits");
        let g2 = AmplitudeLabeling::reflected_gray(2).expect("2 bits");
        let mut points = Vec::with_capacity(128);
        for label in 0..128u32 {
            let (si, sq) = (label >> 6 & 1, label >> 5 & 1);
            let ai = g3.amplitude_of(label >> 2 & 7) as f64;
            let aq = g2.amplitude_of(label & 3) as f64;
            let (ai, aq) = if ai >= 13.0 {
                (8.0 - aq, ai - 4.0)
            } else {
                (ai, aq)
            };
            let sgn = |s: u32, v: f64| if s == 1 { -v } else { v };
            points.push(Point {
                coords: [sgn(si, ai), sgn(sq, aq)],
                label,
                prior: 1.0 / 128.0,
            });
        }
        Self { points, levels: 7 }
    }
}

impl<const D: usize> Constellation<D> {
    /// Mean energy `E[|x|^2]` under the priors.
    pub fn energy(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.prior * p.coords.iter().map(|c| c * c).sum::<f64>())
            .sum()
    }

    pub fn max_coordinate(&self) -> f64 {
        self.points
            .iter()
            .flat_map(|p| p.coords)
            .fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn point_for_label(&self, label: u32) -> Option<&Point<D>> {
        self.points.iter().find(|p| p.label == label)
    }

    /// Exact a-posteriori L-values `ln P(b=0|y)/P(b=1|y)` per level
    /// (level 1 first) for noise variance `sigma2` per dimension.
    pub fn llrs(&self, y: &[f64; D], sigma2: f64) -> Vec<f64> {
        let m = self.levels;
        if sigma2 <= 0.0 {
            let nearest = self
                .points
                .iter()
                .filter(|p| p.prior > 0.0)
                .min_by(|a, b| dist2(&a.coords, y).total_cmp(&dist2(&b.coords, y)))
                .expect("non-empty constellation");
            return (0..m)
                .map(|l| {
                    if nearest.label >> (m - 1 - l) & 1 == 0 {
                        f64::INFINITY
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect();
        }
        let metric: Vec<f64> = self
            .points
            .iter()
            .map(|p| {
                if p.prior > 0.0 {
                    p.prior.ln() - dist2(&p.coords, y) / (2.0 * sigma2)
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        (0..m)
            .map(|l| {
                let shift = m - 1 - l;
                let mut sets = [Vec::new(), Vec::new()];
                for (p, &d) in self.points.iter().zip(&metric) {
                    sets[(p.label >> shift & 1) as usize].push(d);
                }
                log_sum_exp(&sets[0]) - log_sum_exp(&sets[1])
            })
            .collect()
    }
}

fn dist2<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Noise standard deviation per real dimension for `Es/N0` in dB, where
/// `es_2d` is the mean energy per 2D symbol. Infinite SNR gives 0.
pub fn noise_sigma(es_2d: f64, snr_db: f64) -> Result<f64> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::NonFiniteSnr);
    }
    if snr_db == f64::INFINITY {
        return Ok(0.0);
    }
    Ok((es_2d / (2.0 * 10f64.powf(snr_db / 10.0))).sqrt())
}

/// Adds i.i.d. Gaussian noise of standard deviation `sigma`.
pub fn awgn<R: Rng + ?Sized>(samples: &mut [f64], sigma: f64, rng: &mut R) {
    if sigma == 0.0 {
        return;
    }
    for s in samples {
        let z: f64 = rng.sample(StandardNormal);
        *s += sigma * z;
    }
}

/// Rounds an L-value to the integers `-max..=max`.
pub fn quantize_llr(l: f64, max: i8) -> i8 {
    if l.is_nan() {
        return 0;
    }
    l.round().clamp(-(max as f64), max as f64) as i8
}

/// Uniform midrise quantizer over `[-range, range]` with `2^bits` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputQuantizer {
    pub cells: usize,
    pub range: f64,
}

impl InputQuantizer {
    pub fn new(bits: u32, range: f64) -> Result<Self> {
        if bits == 0 || bits > 12 || range.is_nan() || range <= 0.0 {
            return Err(Error::Config(format!(
                "input quantizer with {bits} bits over +-{range}"
            )));
        }
        Ok(Self {
            cells: 1 << bits,
            range,
        })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.range / self.cells as f64
    }

    pub fn cell(&self, y: f64) -> usize {
        let i = ((y + self.range) / self.step()).floor();
        if i.is_nan() {
            return self.cells / 2;
        }
        i.clamp(0.0, (self.cells - 1) as f64) as usize
    }

    pub fn center(&self, cell: usize) -> f64 {
        -self.range + (cell as f64 + 0.5) * self.step()
    }
}

/// Lookup-table demapper: quantized input per dimension, exact L-values at
/// the cell centers, integer output L-values.
#[derive(Debug, Clone)]
pub struct SoftDemapper<const D: usize> {
    quantizer: InputQuantizer,
    levels: usize,
    table: Vec<i8>,
    // matched-metric cost log2(1 + e^{-L_a}) of the unquantized L-value,
    // for bit 0 and bit 1
    costs: Vec<[f32; 2]>,
}

impl<const D: usize> SoftDemapper<D> {
    /// `input_bits` per real dimension over `+-(max coordinate + 4 sigma)`;
    /// output L-values are integers clipped to `+-(2^(llr_bits-1) - 1)`.
    pub fn new(
        constellation: &Constellation<D>,
        sigma: f64,
        input_bits: u32,
        llr_bits: u32,
    ) -> Result<Self> {
        if !(2..=8).contains(&llr_bits) {
            return Err(Error::Config(format!("{llr_bits}-bit L-values")));
        }
        let max = ((1i32 << (llr_bits - 1)) - 1) as i8;
        let quantizer =
            InputQuantizer::new(input_bits, constellation.max_coordinate() + 4.0 * sigma)?;
        let levels = constellation.levels as usize;
        let cells = quantizer.cells.pow(D as u32);
        let mut table = Vec::with_capacity(cells * levels);
        let mut costs = Vec::with_capacity(cells * levels);
        for flat in 0..cells {
            let mut y = [0.0; D];
            let mut rest = flat;
            for d in (0..D).rev() {
                y[d] = quantizer.center(rest % quantizer.cells);
                rest /= quantizer.cells;
            }
            for l in constellation.llrs(&y, sigma * sigma) {
                table.push(quantize_llr(l, max));
                costs.push([
                    log2_1p_exp_neg(l).min(64.0) as f32,
                    log2_1p_exp_neg(-l).min(64.0) as f32,
                ]);
            }
        }
        Ok(Self {
            quantizer,
            levels,
            table,
            costs,
        })
    }

    pub fn quantizer(&self) -> InputQuantizer {
        self.quantizer
    }

    /// Quantized L-values, level 1 first.
    pub fn demap(&self, y: &[f64; D]) -> &[i8] {
        let r = self.range_of(y);
        &self.table[r]
    }

    /// Quantized L-values and the matched-metric costs of the unquantized
    /// ones, indexed `[bit]`.
    pub fn demap_with_costs(&self, y: &[f64; D]) -> (&[i8], &[[f32; 2]]) {
        let r = self.range_of(y);
        (&self.table[r.clone()], &self.costs[r])
    }

    fn range_of(&self, y: &[f64; D]) -> std::ops::Range<usize> {
        let flat = y.iter().fold(0usize, |acc, &v| {
            acc * self.quantizer.cells + self.quantizer.cell(v)
        });
        flat * self.levels..(flat + 1) * self.levels
    }
}

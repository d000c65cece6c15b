//! Constant-composition distribution matcher.
//!
//! Every output word is an arrangement of a fixed multiset of amplitude
//! classes. Matching unranks the information bits (read as a big-endian
//! integer) into the lexicographically ordered set of arrangements;
//! dematching ranks. Both run in `O(n * classes)` big-integer steps with
//! single-limb multipliers.
//!
//! A class groups the amplitudes that share the shaped (most significant)
//! label bits. With `g` class bits and a `b`-bit amplitude label, class `k`
//! holds amplitude indices `k 2^(b-g) .. (k+1) 2^(b-g)` and is sent as the
//! reflected-Gray code of `k` on PAM levels `2..=g+1`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::constellation::Pmf;
use crate::error::{Error, Result};

/// Class counts of every output word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    counts: Vec<u64>,
}

impl Composition {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() || counts.iter().all(|&c| c == 0) {
            return Err(Error::InvalidComposition(
                "at least one class count must be positive".into(),
            ));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    /// Output word length in class symbols.
    pub fn word_len(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of distinct arrangements, `n! / prod(n_k!)`.
    pub fn num_sequences(&self) -> BigUint {
        multinomial(&self.counts)
    }

    /// `floor(log2(num_sequences))`.
    pub fn num_input_bits(&self) -> u64 {
        self.num_sequences().bits() - 1
    }

    /// Sequence with lexicographic index `index`.
    pub fn unrank(&self, index: &BigUint) -> Result<Vec<u32>> {
        let total = self.num_sequences();
        if *index >= total {
            return Err(Error::InvalidComposition(format!(
                "index {index} not below {total}"
            )));
        }
        Ok(unrank_from(&self.counts, total, index.clone()))
    }

    /// Lexicographic index of `seq`, which must have this composition.
    pub fn rank(&self, seq: &[u32]) -> Result<BigUint> {
        let mut rem = vec![0u64; self.counts.len()];
        for &c in seq {
            *rem.get_mut(c as usize).ok_or_else(|| {
                Error::InvalidComposition(format!("class {c} outside 0..{}", self.counts.len()))
            })? += 1;
        }
        if rem != self.counts {
            return Err(Error::InvalidComposition(
                "sequence has a different composition".into(),
            ));
        }
        Ok(rank_from(rem, self.num_sequences(), seq))
    }

    /// Class PMF `n_k / n`.
    pub fn pmf(&self) -> Pmf<BigRational> {
        let n = BigInt::from(self.word_len());
        Pmf::new(
            self.counts
                .iter()
                .map(|&c| BigRational::new(BigInt::from(c), n.clone()))
                .collect(),
        )
        .expect("counts sum to the word length")
    }
}

fn multinomial(counts: &[u64]) -> BigUint {
    let mut m = BigUint::one();
    let mut total = 0u64;
    for &c in counts {
        for j in 1..=c {
            total += 1;
            m *= total;
            m /= j;
        }
    }
    m
}

fn unrank_from(counts: &[u64], total: BigUint, mut index: BigUint) -> Vec<u32> {
    let mut rem = counts.to_vec();
    let mut left: u64 = rem.iter().sum();
    let mut m = total;
    let mut out = Vec::with_capacity(left as usize);
    while left > 0 {
        let mut below = 0u64;
        let mut chosen = None;
        for (c, &n) in rem.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let upto = &m * (below + n) / left;
            if index < upto {
                index -= &m * below / left;
                chosen = Some(c);
                break;
            }
            below += n;
        }
        let c = chosen.expect("index below the multinomial");
        m = &m * rem[c] / left;
        rem[c] -= 1;
        left -= 1;
        out.push(c as u32);
    }
    out
}

// `rem` holds the class counts of `seq`, `total` their multinomial.
fn rank_from(mut rem: Vec<u64>, total: BigUint, seq: &[u32]) -> BigUint {
    let mut m = total;
    let mut left = seq.len() as u64;
    let mut rank = BigUint::zero();
    for &c in seq {
        let c = c as usize;
        let below: u64 = rem[..c].iter().sum();
        if below > 0 {
            rank += &m * below / left;
        }
        m = &m * rem[c] / left;
        rem[c] -= 1;
        left -= 1;
    }
    rank
}

/// Sum of `a^2` over the amplitudes of each class.
pub fn class_energy_sums(amplitude_bits: u32, class_bits: u32) -> Result<Vec<u64>> {
    if !(1..=7).contains(&amplitude_bits) {
        return Err(Error::LabelWidth(amplitude_bits));
    }
    if class_bits > amplitude_bits {
        return Err(Error::InvalidComposition(format!(
            "{class_bits} class bits exceed the {amplitude_bits}-bit amplitude label"
        )));
    }
    let per = 1u64 << (amplitude_bits - class_bits);
    Ok((0..1u64 << class_bits)
        .map(|k| {
            (k * per..(k + 1) * per)
                .map(|i| (2 * i + 1) * (2 * i + 1))
                .sum()
        })
        .collect())
}

/// Rounds `target * word_len` to integer counts summing to `word_len`.
///
/// Among the roundings (each count is the floor or the ceiling of its
/// target), the one with the lowest energy is chosen; with `min_input_bits`
/// only roundings offering at least that many input bits qualify. Remaining
/// ties go to the rounding closest to the target.
pub fn design_composition(
    target: &Pmf<f64>,
    word_len: u64,
    amplitude_bits: u32,
    min_input_bits: Option<u64>,
) -> Result<Composition> {
    if word_len == 0 {
        return Err(Error::InvalidComposition(
            "word length must be at least 1".into(),
        ));
    }
    let classes = target.len();
    if !classes.is_power_of_two() {
        return Err(Error::InvalidComposition(format!(
            "{classes} classes is not a power of two"
        )));
    }
    let class_bits = classes.trailing_zeros();
    let energy = class_energy_sums(amplitude_bits, class_bits)?;
    let scaled: Vec<f64> = target.probs().iter().map(|p| p * word_len as f64).collect();
    let floors: Vec<u64> = scaled.iter().map(|x| x.floor() as u64).collect();
    let deficit = word_len
        .checked_sub(floors.iter().sum())
        .ok_or_else(|| Error::InvalidComposition("target mass exceeds one".into()))?
        as usize;
    // classes eligible for rounding up, largest remainder first
    let mut order: Vec<usize> = (0..classes).collect();
    order.sort_by(|&a, &b| {
        let fa = scaled[a] - floors[a] as f64;
        let fb = scaled[b] - floors[b] as f64;
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    let with_frac = order
        .iter()
        .filter(|&&k| scaled[k] > floors[k] as f64)
        .count()
        .max(deficit);
    let pool = &order[..with_frac.min(classes)];

    let score = |up: &[usize]| {
        let mut counts = floors.clone();
        for &k in up {
            counts[k] += 1;
        }
        let e: u64 = counts.iter().zip(&energy).map(|(c, e)| c * e).sum();
        let dist: f64 = counts
            .iter()
            .zip(&scaled)
            .map(|(&c, &x)| (c as f64 - x).abs())
            .sum();
        (counts, e, dist)
    };

    let mut best: Option<(Vec<u64>, u64, f64)> = None;
    let mut best_bits = 0u64;
    let mut consider = |up: &[usize]| {
        let (counts, e, dist) = score(up);
        if counts.iter().all(|&c| c == 0) {
            return;
        }
        let bits = multinomial(&counts).bits() - 1;
        best_bits = best_bits.max(bits);
        if min_input_bits.is_some_and(|m| bits < m) {
            return;
        }
        let better = match &best {
            None => true,
            Some((_, be, bd)) => e < *be || (e == *be && dist < *bd),
        };
        if better {
            best = Some((counts, e, dist));
        }
    };

    if binomial_at_most(pool.len(), deficit, 100_000) {
        for_each_subset(pool, deficit, &mut consider);
    } else {
        consider(&pool[..deficit]);
    }
    match best {
        Some((counts, _, _)) => Composition::new(counts),
        None => Err(Error::InfeasibleInputBits {
            requested: min_input_bits.unwrap_or(0),
            available: best_bits,
        }),
    }
}

fn binomial_at_most(n: usize, k: usize, limit: u64) -> bool {
    let mut c = 1u64;
    for i in 0..k.min(n - k.min(n)) {
        c = c * (n - i) as u64 / (i + 1) as u64;
        if c > limit {
            return false;
        }
    }
    true
}

fn for_each_subset(pool: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(
        pool: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i]);
            rec(pool, k, i + 1, cur, f);
            cur.pop();
        }
    }
    rec(pool, k, 0, &mut Vec::with_capacity(k), f)
}

/// CCDM matcher over `2^g` amplitude classes.
#[derive(Debug, Clone)]
pub struct CcdmCodec {
    composition: Composition,
    input_bits: u64,
    amplitude_bits: u32,
    class_bits: u32,
    total: BigUint,
    limit: BigUint,
}

impl CcdmCodec {
    /// `input_bits` defaults to `floor(log2 M)`; smaller values are allowed
    /// (the unused indices are never produced).
    pub fn new(
        composition: Composition,
        amplitude_bits: u32,
        input_bits: Option<u64>,
    ) -> Result<Self> {
        let classes = composition.num_classes();
        if !classes.is_power_of_two() {
            return Err(Error::InvalidComposition(format!(
                "{classes} classes is not a power of two"
            )));
        }
        let class_bits = classes.trailing_zeros();
        class_energy_sums(amplitude_bits, class_bits)?;
        let available = composition.num_input_bits();
        let input_bits = input_bits.unwrap_or(available);
        if input_bits > available {
            return Err(Error::InfeasibleInputBits {
                requested: input_bits,
                available,
            });
        }
        Ok(Self {
            total: composition.num_sequences(),
            limit: BigUint::one() << input_bits,
            composition,
            input_bits,
            amplitude_bits,
            class_bits,
        })
    }

    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    /// `N_u^sb`.
    pub fn input_bits(&self) -> usize {
        self.input_bits as usize
    }

    pub fn word_len(&self) -> usize {
        self.composition.word_len() as usize
    }

    pub fn class_bits(&self) -> u32 {
        self.class_bits
    }

    pub fn amplitude_bits(&self) -> u32 {
        self.amplitude_bits
    }

    /// Shaped bits per DM word.
    pub fn output_bits(&self) -> usize {
        self.word_len() * self.class_bits as usize
    }

    /// PAM levels carrying the class bits.
    pub fn shaped_levels(&self) -> Vec<u32> {
        (2..self.class_bits + 2).collect()
    }

    /// Information bits to class sequence.
    pub fn encode(&self, bits: &[u8]) -> Result<Vec<u32>> {
        if bits.len() != self.input_bits() {
            return Err(Error::InputLength {
                expected: self.input_bits(),
                actual: bits.len(),
            });
        }
        Ok(unrank_from(
            &self.composition.counts,
            self.total.clone(),
            bits_to_uint(bits),
        ))
    }

    /// Class sequence to information bits.
    ///
    /// Sequences outside the composition are ranked within the set of
    /// arrangements of their own class counts. Ranks that do not fit in
    /// `input_bits()` bits give the all-ones word.
    pub fn decode(&self, classes: &[u32]) -> Result<Vec<u8>> {
        if classes.len() != self.word_len() {
            return Err(Error::InputLength {
                expected: self.word_len(),
                actual: classes.len(),
            });
        }
        let k = self.composition.num_classes();
        let mut rem = vec![0u64; k];
        for &c in classes {
            let c = c as usize;
            if c >= k {
                return Err(Error::InvalidComposition(format!(
                    "class {c} outside 0..{k}"
                )));
            }
            rem[c] += 1;
        }
        let total = if rem == self.composition.counts {
            self.total.clone()
        } else {
            multinomial(&rem)
        };
        let rank = rank_from(rem, total, classes);
        if rank >= self.limit {
            return Ok(vec![1; self.input_bits()]);
        }
        Ok(uint_to_bits(&rank, self.input_bits()))
    }

    /// Information bits to shaped label bits (`class_bits` per symbol, MSB
    /// first).
    pub fn encode_bits(&self, bits: &[u8]) -> Result<Vec<u8>> {
        let g = self.class_bits;
        Ok(self
            .encode(bits)?
            .into_iter()
            .flat_map(|c| {
                let p = c ^ (c >> 1);
                (0..g).rev().map(move |k| ((p >> k) & 1) as u8)
            })
            .collect())
    }

    /// Shaped label bits back to information bits.
    pub fn decode_bits(&self, shaped: &[u8]) -> Result<Vec<u8>> {
        if shaped.len() != self.output_bits() {
            return Err(Error::InputLength {
                expected: self.output_bits(),
                actual: shaped.len(),
            });
        }
        let g = self.class_bits as usize;
        let classes: Vec<u32> = if g == 0 {
            vec![0; self.word_len()]
        } else {
            shaped
                .chunks(g)
                .map(|ch| {
                    let p = ch.iter().fold(0u32, |a, &b| (a << 1) | (b & 1) as u32);
                    gray_decode(p)
                })
                .collect()
        };
        self.decode(&classes)
    }

    /// Exact amplitude PMF: class mass split evenly over its amplitudes.
    pub fn amplitude_pmf(&self) -> Pmf<BigRational> {
        let per = 1usize << (self.amplitude_bits - self.class_bits);
        let n = BigInt::from(self.composition.word_len() * per as u64);
        Pmf::new(
            self.composition
                .counts
                .iter()
                .flat_map(|&c| {
                    std::iter::repeat_n(BigRational::new(BigInt::from(c), n.clone()), per)
                })
                .collect(),
        )
        .expect("valid composition")
    }

    /// `E[a^2]` per PAM symbol.
    pub fn expected_energy_1d(&self) -> BigRational {
        let sums = class_energy_sums(self.amplitude_bits, self.class_bits).expect("checked in new");
        let per = 1u64 << (self.amplitude_bits - self.class_bits);
        let num: u64 = sums
            .iter()
            .zip(&self.composition.counts)
            .map(|(e, c)| e * c)
            .sum();
        BigRational::new(
            BigInt::from(num),
            BigInt::from(per * self.composition.word_len()),
        )
    }
}

fn gray_decode(mut p: u32) -> u32 {
    let mut v = p;
    while p > 0 {
        p >>= 1;
        v ^= p;
    }
    v
}

fn bits_to_uint(bits: &[u8]) -> BigUint {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    let pad = bytes.len() * 8 - bits.len();
    for (i, &b) in bits.iter().enumerate() {
        if b & 1 == 1 {
            let pos = i + pad;
            bytes[pos / 8] |= 0x80 >> (pos % 8);
        }
    }
    BigUint::from_bytes_be(&bytes)
}

fn uint_to_bits(v: &BigUint, n: usize) -> Vec<u8> {
    (0..n).rev().map(|k| v.bit(k as u64) as u8).collect()
}

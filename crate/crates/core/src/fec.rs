//! Systematic binary LDPC codes: alist I/O, encoding and belief-propagation
//! decoding.
//!
//! Codewords are `[payload | parity]`. L-values are positive for bit 0.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn parse(line: usize, reason: impl Into<String>) -> Error {
    Error::parse(line, reason)
}

/// How parity bits are computed from the payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Encoder {
    /// Parity part is the accumulator: column `k + j` has ones in rows `j`
    /// and `j + 1`.
    DualDiagonal,
    /// Parity part is lower triangular with a unit diagonal.
    LowerTriangular,
    /// Full-rank parity part inverted by Gaussian elimination; rows of the
    /// inverse as packed bits.
    Dense(Vec<Vec<u64>>),
    /// The parity part is singular or too large to invert; decoding only.
    DecodeOnly(String),
}

/// Largest parity part inverted densely.
const DENSE_LIMIT: usize = 4096;

/// Sparse parity-check matrix with a systematic encoder.
#[derive(Debug, Clone)]
pub struct LdpcCode {
    n: usize,
    k: usize,
    /// Column adjacency (row indices, ascending).
    cols: Vec<Vec<u32>>,
    /// Row adjacency (column indices, ascending).
    rows: Vec<Vec<u32>>,
    encoder: Encoder,
}

impl LdpcCode {
    /// Builds a code from row adjacency lists over `n` columns. The last
    /// `rows.len()` columns are the parity part.
    pub fn from_rows(n: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 || m >= n {
            return Err(Error::Config(format!("{m} checks for {n} bits")));
        }
        let mut cols = vec![Vec::new(); n];
        let mut rows = rows;
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Config(format!("row {r} lists a column twice")));
            }
            for &c in row.iter() {
                let c = c as usize;
                if c >= n {
                    return Err(Error::Config(format!(
                        "row {r} references column {c} >= {n}"
                    )));
                }
                cols[c].push(r as u32);
            }
        }
        let k = n - m;
        let encoder = detect_encoder(k, &cols, &rows);
        Ok(Self {
            n,
            k,
            cols,
            rows,
            encoder,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.n - self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn can_encode(&self) -> bool {
        !matches!(self.encoder, Encoder::DecodeOnly(_))
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<u32>] {
        &self.cols
    }

    pub fn num_edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Parity checks violated by `word`.
    pub fn syndrome_weight(&self, word: &[u8]) -> usize {
        self.rows
            .iter()
            .filter(|row| row.iter().fold(0u8, |a, &c| a ^ word[c as usize]) & 1 == 1)
            .count()
    }

    pub fn is_codeword(&self, word: &[u8]) -> bool {
        word.len() == self.n && self.syndrome_weight(word) == 0
    }

    /// Systematic encoding: `payload` followed by `m` parity bits.
    pub fn encode(&self, payload: &[u8]) -> Result<Vec<u8>> {
        if payload.len() != self.k {
            return Err(Error::InputLength {
                expected: self.k,
                actual: payload.len(),
            });
        }
        let m = self.m();
        // s = A u, contribution of the payload to every check
        let mut s: Vec<u8> = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .take_while(|&&c| (c as usize) < self.k)
                    .fold(0u8, |a, &c| a ^ (payload[c as usize] & 1))
            })
            .collect();
        let parity: Vec<u8> = match &self.encoder {
            Encoder::DualDiagonal => {
                for j in 1..m {
                    s[j] ^= s[j - 1];
                }
                s
            }
            Encoder::LowerTriangular => {
                let mut p = vec![0u8; m];
                for j in 0..m {
                    let mut v = s[j];
                    for &c in &self.rows[j] {
                        let c = c as usize;
                        if c >= self.k && c - self.k < j {
                            v ^= p[c - self.k];
                        }
                    }
                    p[j] = v;
                }
                p
            }
            Encoder::Dense(inv) => {
                let packed = pack(&s);
                inv.iter()
                    .map(|row| {
                        (row.iter()
                            .zip(&packed)
                            .map(|(a, b)| (a & b).count_ones())
                            .sum::<u32>()
                            & 1) as u8
                    })
                    .collect()
            }
            Encoder::DecodeOnly(reason) => {
                return Err(Error::NotEncodable(reason.clone()));
            }
        };
        let mut word = payload.iter().map(|b| b & 1).collect::<Vec<u8>>();
        word.extend(parity);
        Ok(word)
    }

    /// Parses the alist format.
    pub fn from_alist(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next_nums = |what: &str| -> Result<(usize, Vec<usize>)> {
            let (no, l) = lines
                .next()
                .ok_or_else(|| parse(text.lines().count(), format!("file ends before {what}")))?;
            let v = l
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| parse(no, format!("'{t}' is not an integer")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((no, v))
        };
        let (no, head) = next_nums("the size line")?;
        let [n, m] = head[..] else {
            return Err(parse(no, "expected 'n m'"));
        };
        if n == 0 || m == 0 || m >= n {
            return Err(parse(no, format!("invalid size {n} x {m}")));
        }
        next_nums("the maximum degree line")?;
        let (no, col_deg) = next_nums("the column degrees")?;
        if col_deg.len() != n {
            return Err(parse(no, format!("expected {n} column degrees")));
        }
        let (no, row_deg) = next_nums("the row degrees")?;
        if row_deg.len() != m {
            return Err(parse(no, format!("expected {m} row degrees")));
        }
        let mut cols: Vec<Vec<u32>> = Vec::with_capacity(n);
        for (c, &d) in col_deg.iter().enumerate() {
            let (no, v) = next_nums(&format!("column {}", c + 1))?;
            let entries: Vec<u32> = v
                .into_iter()
                .filter(|&x| x != 0)
                .map(|x| x as u32 - 1)
                .collect();
            if entries.len() != d || entries.iter().any(|&r| r as usize >= m) {
                return Err(parse(
                    no,
                    format!("column {} does not match its degree {d}", c + 1),
                ));
            }
            cols.push(entries);
        }
        let mut rows: Vec<Vec<u32>> = Vec::with_capacity(m);
        for (r, &d) in row_deg.iter().enumerate() {
            let (no, v) = next_nums(&format!("row {}", r + 1))?;
            let entries: Vec<u32> = v
                .into_iter()
                .filter(|&x| x != 0)
                .map(|x| x as u32 - 1)
                .collect();
            if entries.len() != d || entries.iter().any(|&c| c as usize >= n) {
                return Err(parse(
                    no,
                    format!("row {} does not match its degree {d}", r + 1),
                ));
            }
            rows.push(entries);
        }
        let code = Self::from_rows(n, rows)?;
        let mut sorted = cols;
        for c in &mut sorted {
            c.sort_unstable();
        }
        if sorted != code.cols {
            return Err(Error::Config("alist column and row lists disagree".into()));
        }
        Ok(code)
    }

    pub fn to_alist(&self) -> String {
        let mut out = String::new();
        let max_c = self.cols.iter().map(Vec::len).max().unwrap_or(0);
        let max_r = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let _ = writeln!(out, "{} {}", self.n, self.m());
        let _ = writeln!(out, "{max_c} {max_r}");
        let join = |v: &mut dyn Iterator<Item = usize>| {
            v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        let _ = writeln!(out, "{}", join(&mut self.cols.iter().map(Vec::len)));
        let _ = writeln!(out, "{}", join(&mut self.rows.iter().map(Vec::len)));
        for c in &self.cols {
            let _ = writeln!(out, "{}", join(&mut c.iter().map(|&r| r as usize + 1)));
        }
        for r in &self.rows {
            let _ = writeln!(out, "{}", join(&mut r.iter().map(|&c| c as usize + 1)));
        }
        out
    }

    pub fn load_alist(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_alist(&text)
    }

    pub fn save_alist(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_alist()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn pack(bits: &[u8]) -> Vec<u64> {
    let mut out = vec![0u64; bits.len().div_ceil(64)];
    for (i, &b) in bits.iter().enumerate() {
        if b & 1 == 1 {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

fn detect_encoder(k: usize, cols: &[Vec<u32>], rows: &[Vec<u32>]) -> Encoder {
    let m = rows.len();
    let parity = &cols[k..];
    let dual = parity.iter().enumerate().all(|(j, c)| {
        if j + 1 < m {
            c[..] == [j as u32, j as u32 + 1]
        } else {
            c[..] == [j as u32]
        }
    });
    if dual {
        return Encoder::DualDiagonal;
    }
    let lower = rows.iter().enumerate().all(|(j, row)| {
        row.iter()
            .filter(|&&c| c as usize >= k)
            .all(|&c| c as usize - k <= j)
            && row.contains(&((k + j) as u32))
    });
    if lower {
        return Encoder::LowerTriangular;
    }
    if m > DENSE_LIMIT {
        return Encoder::DecodeOnly(format!(
            "parity part of {m} columns has no accumulator or triangular structure"
        ));
    }
    match invert_parity(k, rows) {
        Some(inv) => Encoder::Dense(inv),
        None => Encoder::DecodeOnly("parity columns are linearly dependent".into()),
    }
}

/// Inverse of the `m x m` parity part over GF(2), or `None` if singular.
fn invert_parity(k: usize, rows: &[Vec<u32>]) -> Option<Vec<Vec<u64>>> {
    let m = rows.len();
    let words = m.div_ceil(64);
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|row| {
            let mut v = vec![0u64; words];
            for &c in row {
                let c = c as usize;
                if c >= k {
                    v[(c - k) / 64] |= 1 << ((c - k) % 64);
                }
            }
            v
        })
        .collect();
    let mut inv: Vec<Vec<u64>> = (0..m)
        .map(|i| {
            let mut v = vec![0u64; words];
            v[i / 64] |= 1 << (i % 64);
            v
        })
        .collect();
    for col in 0..m {
        let (w, b) = (col / 64, 1u64 << (col % 64));
        let pivot = (col..m).find(|&r| a[r][w] & b != 0)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        for r in 0..m {
            if r != col && a[r][w] & b != 0 {
                let (src_a, src_i) = (a[col].clone(), inv[col].clone());
                for (x, y) in a[r].iter_mut().zip(&src_a) {
                    *x ^= y;
                }
                for (x, y) in inv[r].iter_mut().zip(&src_i) {
                    *x ^= y;
                }
            }
        }
    }
    Some(inv)
}

/// Check-node update rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DecoderVariant {
    /// Min-sum with the outgoing magnitude scaled by `factor`.
    NormalizedMinSum { factor: f32 },
    /// Exact tanh rule.
    SumProduct,
}

impl Default for DecoderVariant {
    fn default() -> Self {
        Self::NormalizedMinSum { factor: 0.75 }
    }
}

/// Result of one decoding attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    /// Hard decisions for the full codeword.
    pub bits: Vec<u8>,
    /// All checks satisfied.
    pub converged: bool,
    /// Message-passing iterations run (0 if the channel decisions already
    /// formed a codeword).
    pub iterations: u32,
}

impl Decoded {
    pub fn payload(&self, k: usize) -> &[u8] {
        &self.bits[..k]
    }
}

/// Flooding belief-propagation decoder with reusable working memory.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    code: &'a LdpcCode,
    variant: DecoderVariant,
    max_iter: u32,
    // edge e belongs to check edge_check[e] (edges grouped by check)
    edge_var: Vec<u32>,
    check_start: Vec<u32>,
    // edges of each variable, as indices into the check-ordered edge list
    var_edges: Vec<u32>,
    var_start: Vec<u32>,
    c2v: Vec<f32>,
    v2c: Vec<f32>,
}

const LLR_CLAMP: f32 = 1.0e4;

impl<'a> Decoder<'a> {
    pub fn new(code: &'a LdpcCode, variant: DecoderVariant, max_iter: u32) -> Self {
        let mut edge_var = Vec::with_capacity(code.num_edges());
        let mut check_start = Vec::with_capacity(code.m() + 1);
        for row in &code.rows {
            check_start.push(edge_var.len() as u32);
            edge_var.extend_from_slice(row);
        }
        check_start.push(edge_var.len() as u32);
        let mut per_var: Vec<Vec<u32>> = vec![Vec::new(); code.n];
        for (e, &v) in edge_var.iter().enumerate() {
            per_var[v as usize].push(e as u32);
        }
        let mut var_edges = Vec::with_capacity(edge_var.len());
        let mut var_start = Vec::with_capacity(code.n + 1);
        for v in per_var {
            var_start.push(var_edges.len() as u32);
            var_edges.extend(v);
        }
        var_start.push(var_edges.len() as u32);
        let e = edge_var.len();
        Self {
            code,
            variant,
            max_iter,
            edge_var,
            check_start,
            var_edges,
            var_start,
            c2v: vec![0.0; e],
            v2c: vec![0.0; e],
        }
    }

    pub fn code(&self) -> &LdpcCode {
        self.code
    }

    fn hard(&self, llr: &[f32], bits: &mut [u8]) {
        for v in 0..self.code.n {
            let mut total = llr[v];
            for &e in &self.var_edges[self.var_start[v] as usize..self.var_start[v + 1] as usize] {
                total += self.c2v[e as usize];
            }
            bits[v] = (total < 0.0) as u8;
        }
    }

    fn satisfied(&self, bits: &[u8]) -> bool {
        (0..self.code.m()).all(|c| {
            let edges = self.check_start[c] as usize..self.check_start[c + 1] as usize;
            self.edge_var[edges]
                .iter()
                .fold(0u8, |a, &v| a ^ bits[v as usize])
                == 0
        })
    }

    /// Decodes `n` channel L-values.
    pub fn decode(&mut self, llr: &[f32]) -> Result<Decoded> {
        let n = self.code.n;
        if llr.len() != n {
            return Err(Error::InputLength {
                expected: n,
                actual: llr.len(),
            });
        }
        self.c2v.fill(0.0);
        let mut bits = vec![0u8; n];
        self.hard(llr, &mut bits);
        if self.satisfied(&bits) {
            return Ok(Decoded {
                bits,
                converged: true,
                iterations: 0,
            });
        }
        for it in 1..=self.max_iter {
            // variable to check
            for v in 0..n {
                let edges =
                    &self.var_edges[self.var_start[v] as usize..self.var_start[v + 1] as usize];
                let mut total = llr[v];
                for &e in edges {
                    total += self.c2v[e as usize];
                }
                for &e in edges {
                    self.v2c[e as usize] =
                        (total - self.c2v[e as usize]).clamp(-LLR_CLAMP, LLR_CLAMP);
                }
            }
            // check to variable
            for c in 0..self.code.m() {
                let range = self.check_start[c] as usize..self.check_start[c + 1] as usize;
                match self.variant {
                    DecoderVariant::NormalizedMinSum { factor } => {
                        let (mut min1, mut min2, mut at) =
                            (f32::INFINITY, f32::INFINITY, usize::MAX);
                        let mut sign = false;
                        for e in range.clone() {
                            let x = self.v2c[e];
                            sign ^= x < 0.0;
                            let a = x.abs();
                            if a < min1 {
                                min2 = min1;
                                min1 = a;
                                at = e;
                            } else if a < min2 {
                                min2 = a;
                            }
                        }
                        for e in range {
                            let mag = if e == at { min2 } else { min1 } * factor;
                            let neg = sign ^ (self.v2c[e] < 0.0);
                            self.c2v[e] = if neg { -mag } else { mag };
                        }
                    }
                    DecoderVariant::SumProduct => {
                        let mut prod = 1.0f64;
                        let mut zeros = 0;
                        for e in range.clone() {
                            let t = (self.v2c[e] as f64 / 2.0).tanh();
                            if t == 0.0 {
                                zeros += 1;
                            } else {
                                prod *= t;
                            }
                        }
                        for e in range {
                            let t = (self.v2c[e] as f64 / 2.0).tanh();
                            let others = if t == 0.0 {
                                if zeros > 1 {
                                    0.0
                                } else {
                                    prod
                                }
                            } else if zeros > 0 {
                                0.0
                            } else {
                                prod / t
                            };
                            let o = others.clamp(-0.999_999_999_999, 0.999_999_999_999);
                            self.c2v[e] = (2.0 * o.atanh()) as f32;
                        }
                    }
                }
            }
            self.hard(llr, &mut bits);
            if self.satisfied(&bits) {
                return Ok(Decoded {
                    bits,
                    converged: true,
                    iterations: it,
                });
            }
        }
        Ok(Decoded {
            bits,
            converged: false,
            iterations: self.max_iter,
        })
    }
}

/// Parameters of the deterministic quasi-cyclic IRA construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IraParams {
    pub k: usize,
    pub m: usize,
    /// Circulant size: columns per information group.
    pub group: usize,
    /// `(number of groups, column degree)`, high degrees first.
    pub degrees: [(usize, usize); 2],
    pub seed: u64,
}

impl IraParams {
    /// Rate-5/6 code with the check degree and degree profile of the DVB-S2
    /// normal frame, scaled down 30 times.
    pub const BUNDLED: IraParams = IraParams {
        k: 1800,
        m: 360,
        group: 20,
        degrees: [(9, 13), (81, 3)],
        seed: 0x5eed_2160,
    };
}

/// Deterministic IRA code: an accumulator parity part plus information
/// columns in groups of `group`, column `j` of a group connecting to rows
/// `x + j q (mod m)` for its leader addresses `x`, with `q = m / group`.
///
/// Leader addresses are chosen greedily so that every check receives the
/// same number of information edges and no two columns share two checks.
pub fn construct_ira(p: IraParams) -> Result<LdpcCode> {
    let IraParams {
        k,
        m,
        group,
        degrees,
        seed,
    } = p;
    if group == 0 || m % group != 0 || k != group * (degrees[0].0 + degrees[1].0) {
        return Err(Error::Config("inconsistent IRA parameters".into()));
    }
    let q = m / group;
    let info_edges: usize = degrees.iter().map(|&(g, d)| g * d * group).sum();
    if info_edges % m != 0 {
        return Err(Error::Config(
            "information edges do not spread evenly over checks".into(),
        ));
    }
    let per_residue = info_edges / m;
    let n = k + m;
    'attempt: for attempt in 0..64u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt));
        let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); m];
        for j in 0..m {
            row_cols[j].push((k + j) as u32);
            if j + 1 < m {
                row_cols[j + 1].push((k + j) as u32);
            }
        }
        let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); n];
        for j in 0..m {
            col_rows[k + j].push(j as u32);
            if j + 1 < m {
                col_rows[k + j].push(j as u32 + 1);
            }
        }
        let mut residue_use = vec![0usize; q];
        let mut g_index = 0usize;
        for &(groups, deg) in &degrees {
            for _ in 0..groups {
                let first = g_index * group;
                for _ in 0..deg {
                    let mut candidates: Vec<usize> = (0..m).collect();
                    candidates.shuffle(&mut rng);
                    let pick = candidates.into_iter().find(|&x| {
                        residue_use[x % q] < per_residue
                            && try_place(&mut col_rows, &mut row_cols, first, group, x, q, m)
                    });
                    let Some(x) = pick else {
                        continue 'attempt;
                    };
                    residue_use[x % q] += 1;
                }
                g_index += 1;
            }
        }
        return LdpcCode::from_rows(n, row_cols);
    }
    Err(Error::Config(
        "IRA construction failed to avoid 4-cycles".into(),
    ))
}

/// Adds the edges of address `x` for every column of a group, or nothing if
/// one of them would close a 4-cycle.
fn try_place(
    col_rows: &mut [Vec<u32>],
    row_cols: &mut [Vec<u32>],
    first: usize,
    group: usize,
    x: usize,
    q: usize,
    m: usize,
) -> bool {
    for j in 0..group {
        let (col, r) = (first + j, (x + j * q) % m);
        if creates_short_cycle(col_rows, row_cols, col, r) {
            for i in 0..j {
                let (col, r) = (first + i, (x + i * q) % m);
                col_rows[col].pop();
                row_cols[r].pop();
            }
            return false;
        }
        col_rows[col].push(r as u32);
        row_cols[r].push(col as u32);
    }
    true
}

/// Would adding edge (col, row) close a cycle of length 4 (or duplicate an
/// edge)?
fn creates_short_cycle(
    col_rows: &[Vec<u32>],
    row_cols: &[Vec<u32>],
    col: usize,
    row: usize,
) -> bool {
    let existing = &col_rows[col];
    if existing.contains(&(row as u32)) {
        return true;
    }
    row_cols[row].iter().any(|&other| {
        other as usize != col
            && col_rows[other as usize]
                .iter()
                .any(|r| existing.contains(r))
    })
}

/// The bundled rate-5/6 code, parsed from the shipped alist file.
pub fn bundled_code() -> LdpcCode {
    LdpcCode::from_alist(crate::bundled::IRA_2160_1800_ALIST).expect("bundled alist is valid")
}

//! Plain-text tree file.
//!
//! ```text
//! # hidm tree v1
//! # free comment lines (kept on rewrite)
//! layers = 3
//! amplitude_bits = 4
//! shaped_levels = 2 3 4 5
//! labeling = reflected-gray
//! storage_budget = 480 816          (optional)
//! layer 1: u=4 r=3 s=1 t=2
//! layer 2: u=6 r=2 s=2 t=2
//! layer 3: u=4 r=0 s=3 t=1
//! table 3                           (optional, one per layer)
//! 000 | 00 00 | 21
//! ...
//! end
//! ```
//!
//! A table row is `input | output | energy`. The input is written as the
//! constraint bits, a space, then the fresh bits. The output is split into
//! the chunks consumed by the layer below (PAM symbols on layer 1). Energies
//! are exact rationals such as `21` or `145/4`.

use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{HidmCodec, HidmTables, HidmTreeSpec, LayerSpec, LutEntry};
use crate::constellation::bit_string;
use crate::error::{Error, Result};

fn parse(line: usize, reason: impl Into<String>) -> Error {
    Error::parse(line, reason)
}

/// First line of every tree file.
pub const FORMAT_HEADER: &str = "# hidm tree v1";

const LABELING: &str = "reflected-gray";

/// Parsed tree file: layout, optional table contents, leading comments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HidmFile {
    pub spec: HidmTreeSpec,
    pub tables: Option<HidmTables>,
    /// Comment lines after the header, without the leading `#`.
    pub comments: Vec<String>,
}

impl HidmFile {
    pub fn new(spec: HidmTreeSpec, tables: Option<HidmTables>) -> Self {
        Self {
            spec,
            tables,
            comments: Vec::new(),
        }
    }

    pub fn from_codec(codec: &HidmCodec) -> Self {
        Self::new(codec.spec().clone(), Some(codec.tables().clone()))
    }

    /// Builds a codec, using the stored tables when present.
    pub fn into_codec(self) -> Result<HidmCodec> {
        match self.tables {
            Some(t) => HidmCodec::with_tables(self.spec, t),
            None => HidmCodec::new(self.spec),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn render(&self) -> String {
        let s = &self.spec;
        let mut out = String::new();
        out.push_str(FORMAT_HEADER);
        out.push('\n');
        for c in &self.comments {
            let _ = writeln!(out, "#{c}");
        }
        let _ = writeln!(out, "layers = {}", s.layers.len());
        let _ = writeln!(out, "amplitude_bits = {}", s.amplitude_bits);
        let levels: Vec<String> = s.shaped_levels.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(out, "shaped_levels = {}", levels.join(" "));
        let _ = writeln!(out, "labeling = {LABELING}");
        if let Some((dm, inv)) = s.storage_budget {
            let _ = writeln!(out, "storage_budget = {dm} {inv}");
        }
        for (i, l) in s.layers.iter().enumerate() {
            let _ = writeln!(
                out,
                "layer {}: u={} r={} s={} t={}",
                i + 1,
                l.u,
                l.r,
                l.s,
                l.t
            );
        }
        if let Some(tables) = &self.tables {
            for (i, rows) in tables.layers.iter().enumerate().rev() {
                let l = s.layers[i];
                let chunk = output_chunk(s, i);
                let _ = writeln!(out, "table {}", i + 1);
                for (k, e) in rows.iter().enumerate() {
                    let input = split_bits(&bit_string(k as u64, l.v() as usize), &[l.r, l.s]);
                    let output = split_bits(
                        &bit_string(e.word as u64, l.u as usize),
                        &vec![chunk; (l.u / chunk) as usize],
                    );
                    let _ = writeln!(out, "{input} | {output} | {}", e.energy);
                }
                out.push_str("end\n");
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, h)) if h.trim_end() == FORMAT_HEADER => {}
            _ => return Err(parse(1, format!("expected header '{FORMAT_HEADER}'"))),
        }
        let mut comments = Vec::new();
        let mut n_layers: Option<usize> = None;
        let mut amplitude_bits = None;
        let mut shaped_levels = None;
        let mut storage_budget = None;
        let mut layers: Vec<Option<LayerSpec>> = Vec::new();
        let mut table_rows: Vec<Option<Vec<(usize, u32, u32, BigRational)>>> = Vec::new();
        let mut in_table: Option<usize> = None;
        let mut header_done = false;

        for (no, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                if !header_done && in_table.is_none() {
                    comments.push(c.to_string());
                }
                continue;
            }
            header_done = true;
            if let Some(t) = in_table {
                if line == "end" {
                    in_table = None;
                    continue;
                }
                let row = parse_row(no, line)?;
                table_rows[t].as_mut().expect("opened table").push(row);
                continue;
            }
            if let Some(rest) = line.strip_prefix("table ") {
                let idx = layer_index(no, rest.trim(), n_layers)?;
                if table_rows[idx].is_some() {
                    return Err(parse(no, format!("table {} given twice", idx + 1)));
                }
                table_rows[idx] = Some(Vec::new());
                in_table = Some(idx);
                continue;
            }
            if let Some(rest) = line.strip_prefix("layer ") {
                let (idx, params) = rest
                    .split_once(':')
                    .ok_or_else(|| parse(no, "expected 'layer N: u=.. r=.. s=.. t=..'"))?;
                let idx = layer_index(no, idx.trim(), n_layers)?;
                if layers[idx].is_some() {
                    return Err(parse(no, format!("layer {} given twice", idx + 1)));
                }
                layers[idx] = Some(parse_layer(no, params)?);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| parse(no, format!("unrecognised line '{line}'")))?;
            match key {
                "layers" => {
                    if n_layers.is_some() {
                        return Err(parse(no, "'layers' given twice"));
                    }
                    let n: usize = parse_num(no, value)?;
                    if n == 0 {
                        return Err(parse(no, "a tree needs at least one layer"));
                    }
                    n_layers = Some(n);
                    layers = vec![None; n];
                    table_rows = vec![None; n];
                }
                "amplitude_bits" => amplitude_bits = Some(parse_num::<u32>(no, value)?),
                "shaped_levels" => {
                    shaped_levels = Some(
                        value
                            .split_whitespace()
                            .map(|v| parse_num::<u32>(no, v))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                "labeling" => {
                    if value != LABELING {
                        return Err(parse(no, format!("unsupported labeling '{value}'")));
                    }
                }
                "storage_budget" => {
                    let v: Vec<u64> = value
                        .split_whitespace()
                        .map(|v| parse_num(no, v))
                        .collect::<Result<_>>()?;
                    if v.len() != 2 {
                        return Err(parse(no, "storage_budget takes '<dm bits> <invdm bits>'"));
                    }
                    storage_budget = Some((v[0], v[1]));
                }
                other => return Err(parse(no, format!("unknown key '{other}'"))),
            }
        }
        if in_table.is_some() {
            return Err(parse(text.lines().count(), "table not closed with 'end'"));
        }
        let end = text.lines().count();
        n_layers.ok_or_else(|| parse(end, "missing 'layers'"))?;
        let spec = HidmTreeSpec {
            layers: layers
                .into_iter()
                .enumerate()
                .map(|(i, l)| l.ok_or_else(|| parse(end, format!("missing 'layer {}'", i + 1))))
                .collect::<Result<_>>()?,
            amplitude_bits: amplitude_bits.ok_or_else(|| parse(end, "missing 'amplitude_bits'"))?,
            shaped_levels: shaped_levels.ok_or_else(|| parse(end, "missing 'shaped_levels'"))?,
            storage_budget,
        };
        spec.validate()?;

        let tables = if table_rows.iter().all(Option::is_none) {
            None
        } else {
            let mut out = Vec::with_capacity(spec.layers.len());
            for (i, rows) in table_rows.into_iter().enumerate() {
                let mut rows =
                    rows.ok_or_else(|| parse(end, format!("missing table {}", i + 1)))?;
                let l = spec.layers[i];
                let err = |reason: String| Error::InvalidTree {
                    layer: i + 1,
                    reason,
                };
                for (no, input, word, _) in &rows {
                    if *input >= 1 << l.v() || *word >= 1 << l.u {
                        return Err(parse(*no, "row bits do not fit the layer's v and u"));
                    }
                }
                rows.sort_by_key(|r| r.1);
                if rows.iter().enumerate().any(|(k, r)| r.1 != k as u32) {
                    return Err(err(format!(
                        "table must list every input 0..2^{} once",
                        l.v()
                    )));
                }
                out.push(
                    rows.into_iter()
                        .map(|(_, _, word, energy)| LutEntry { word, energy })
                        .collect(),
                );
            }
            Some(HidmTables { layers: out })
        };
        Ok(Self {
            spec,
            tables,
            comments,
        })
    }
}

/// Output chunk width of layer `i` (0-based) in the rendered table.
fn output_chunk(spec: &HidmTreeSpec, i: usize) -> u32 {
    if i == 0 {
        spec.shaped_bits_per_symbol()
    } else {
        spec.layers[i - 1].r
    }
}

fn split_bits(bits: &str, widths: &[u32]) -> String {
    let mut parts = Vec::new();
    let mut pos = 0;
    for &w in widths {
        if w > 0 {
            parts.push(&bits[pos..pos + w as usize]);
            pos += w as usize;
        }
    }
    parts.join(" ")
}

fn parse_num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse()
        .map_err(|_| parse(line, format!("'{s}' is not a valid number")))
}

fn layer_index(line: usize, s: &str, n: Option<usize>) -> Result<usize> {
    let n = n.ok_or_else(|| parse(line, "'layers = N' must come first"))?;
    let idx: usize = parse_num(line, s)?;
    if idx == 0 || idx > n {
        return Err(parse(line, format!("layer {idx} outside 1..={n}")));
    }
    Ok(idx - 1)
}

fn parse_layer(line: usize, s: &str) -> Result<LayerSpec> {
    let mut vals = [None; 4];
    for part in s.split_whitespace() {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| parse(line, format!("expected key=value, got '{part}'")))?;
        let slot = match k {
            "u" => 0,
            "r" => 1,
            "s" => 2,
            "t" => 3,
            _ => return Err(parse(line, format!("unknown layer key '{k}'"))),
        };
        vals[slot] = Some(parse_num::<u32>(line, v)?);
    }
    match vals {
        [Some(u), Some(r), Some(s), Some(t)] => Ok(LayerSpec::new(u, r, s, t)),
        _ => Err(parse(line, "layer needs u, r, s and t")),
    }
}

fn parse_bits(line: usize, s: &str) -> Result<u32> {
    let mut v = 0u32;
    let mut n = 0;
    for c in s.chars().filter(|c| !c.is_whitespace()) {
        let b = match c {
            '0' => 0,
            '1' => 1,
            _ => return Err(parse(line, format!("'{c}' is not a bit"))),
        };
        v = (v << 1) | b;
        n += 1;
    }
    if n == 0 || n > 31 {
        return Err(parse(line, "bit field must hold 1..=31 bits"));
    }
    Ok(v)
}

fn parse_rational(line: usize, s: &str) -> Result<BigRational> {
    let bad = || parse(line, format!("'{s}' is not a rational number"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            s.trim().parse().map_err(|_| bad())?,
        )),
    }
}

fn parse_row(line: usize, s: &str) -> Result<(usize, u32, u32, BigRational)> {
    let parts: Vec<&str> = s.split('|').collect();
    if parts.len() != 3 {
        return Err(parse(line, "table row must be 'input | output | energy'"));
    }
    Ok((
        line,
        parse_bits(line, parts[0])?,
        parse_bits(line, parts[1])?,
        parse_rational(line, parts[2].trim())?,
    ))
}

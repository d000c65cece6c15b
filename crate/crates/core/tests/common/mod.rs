#![allow(dead_code)]

use pas_core::HidmCodec;

pub fn bits_of(v: u64, n: usize) -> Vec<u8> {
    (0..n).rev().map(|k| ((v >> k) & 1) as u8).collect()
}

/// Dematcher by linear scan over every LUT: nearest stored word in Hamming
/// distance, lowest input on ties.
pub fn scan_decode(codec: &HidmCodec, shaped: &[u8]) -> Vec<u8> {
    let spec = codec.spec();
    let tables = codec.tables();
    let u1 = spec.layers[0].u as usize;
    let mut words: Vec<u32> = shaped
        .chunks(u1)
        .map(|c| c.iter().fold(0, |a, &b| (a << 1) | b as u32))
        .collect();
    let mut fresh = Vec::new();
    for (l, layer) in spec.layers.iter().enumerate() {
        let inputs: Vec<u32> = words
            .iter()
            .map(|&w| {
                (0..tables.layers[l].len())
                    .min_by_key(|&i| ((tables.layers[l][i].word ^ w).count_ones(), i))
                    .unwrap() as u32
            })
            .collect();
        fresh.push(
            inputs
                .iter()
                .map(|i| i & ((1 << layer.s) - 1))
                .collect::<Vec<_>>(),
        );
        words = inputs
            .chunks(layer.t as usize)
            .map(|g| g.iter().fold(0, |a, &i| (a << layer.r) | (i >> layer.s)))
            .collect();
    }
    let mut out = Vec::new();
    for (l, f) in fresh.iter().enumerate().rev() {
        let s = spec.layers[l].s as usize;
        for &v in f {
            out.extend(bits_of(v as u64, s));
        }
    }
    out
}

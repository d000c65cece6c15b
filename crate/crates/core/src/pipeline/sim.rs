//! End-to-end Monte Carlo link: client bits, DM, FEC, QAM, AWGN, soft
//! demapping, decoding, invDM and error counting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::frame::{DmGeometry, FramePlan, Layout};
use super::modem::{awgn, noise_sigma, Constellation, SoftDemapper};
use crate::constellation::AmplitudeLabeling;
use crate::dm::Matcher;
use crate::error::{Error, Result};
use crate::fec::{Decoder, DecoderVariant, LdpcCode};
use crate::metrics::LlrHistogram;

/// Client bits per OTUC1 block.
pub const OTUC_BLOCK_BITS: u64 = 130_560;

/// Simulation parameters shared by every SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// `Es/N0` per 2D symbol in dB.
    pub snr_db: Vec<f64>,
    pub seed: u64,
    #[serde(default = "defaults::max_codewords")]
    pub max_codewords: u64,
    /// Stop a point after this many post-FEC payload bit errors.
    #[serde(default)]
    pub target_bit_errors: Option<u64>,
    /// Stop a point after this many FEC frame errors.
    #[serde(default)]
    pub target_frame_errors: Option<u64>,
    #[serde(default = "defaults::max_iter")]
    pub max_iter: u32,
    #[serde(default)]
    pub decoder: DecoderVariant,
    #[serde(default = "defaults::demap_input_bits")]
    pub demap_input_bits: u32,
    #[serde(default = "defaults::llr_bits")]
    pub llr_bits: u32,
    /// Block size is `130560 * otuc_n` client bits.
    #[serde(default = "defaults::otuc_n")]
    pub otuc_n: u32,
    /// Groups simulated between stopping checks. Fixed so that results do
    /// not depend on the worker count.
    #[serde(default = "defaults::batch_groups")]
    pub batch_groups: usize,
}

mod defaults {
    pub fn max_codewords() -> u64 {
        1600
    }
    pub fn max_iter() -> u32 {
        20
    }
    pub fn demap_input_bits() -> u32 {
        7
    }
    pub fn llr_bits() -> u32 {
        4
    }
    pub fn otuc_n() -> u32 {
        1
    }
    pub fn batch_groups() -> usize {
        8
    }
}

impl SimConfig {
    pub fn new(seed: u64, snr_db: Vec<f64>) -> Self {
        Self {
            snr_db,
            seed,
            max_codewords: defaults::max_codewords(),
            target_bit_errors: None,
            target_frame_errors: None,
            max_iter: defaults::max_iter(),
            decoder: DecoderVariant::default(),
            demap_input_bits: defaults::demap_input_bits(),
            llr_bits: defaults::llr_bits(),
            otuc_n: defaults::otuc_n(),
            batch_groups: defaults::batch_groups(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.snr_db.iter().any(|s| s.is_nan()) {
            return bad("SNR list contains NaN");
        }
        if self.max_codewords == 0
            || self.batch_groups == 0
            || self.otuc_n == 0
            || self.max_iter == 0
        {
            return bad("max_codewords, batch_groups, otuc_n and max_iter must be positive");
        }
        if self.demap_input_bits == 0 || self.llr_bits < 2 {
            return bad("quantizer widths must be positive (L-values need at least 2 bits)");
        }
        Ok(())
    }

    pub fn block_bits(&self) -> u64 {
        OTUC_BLOCK_BITS * self.otuc_n as u64
    }
}

/// Counters for one SNR point.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub snr_db: f64,
    pub groups: u64,
    pub codewords: u64,
    pub coded_bits: u64,
    pub pre_fec_bit_errors: u64,
    pub payload_bits: u64,
    pub post_fec_bit_errors: u64,
    pub frame_errors: u64,
    pub unconverged: u64,
    pub decoder_iterations: u64,
    pub client_bits: u64,
    pub client_bit_errors: u64,
    /// Complete OTUC blocks among the client bits.
    pub blocks: u64,
    pub errored_blocks: u64,
    pub asi: Option<f64>,
    pub ngmi: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl PointResult {
    pub fn pre_fec_ber(&self) -> Option<f64> {
        ratio(self.pre_fec_bit_errors, self.coded_bits)
    }

    pub fn post_fec_ber(&self) -> Option<f64> {
        ratio(self.post_fec_bit_errors, self.payload_bits)
    }

    pub fn post_invdm_ber(&self) -> Option<f64> {
        ratio(self.client_bit_errors, self.client_bits)
    }

    pub fn fer(&self) -> Option<f64> {
        ratio(self.frame_errors, self.codewords)
    }

    pub fn bber(&self) -> Option<f64> {
        ratio(self.errored_blocks, self.blocks)
    }

    /// Upper end of the 95% Wilson interval of the post-FEC BER.
    pub fn post_fec_ber_upper95(&self) -> Option<f64> {
        let n = self.payload_bits as f64;
        let p = self.post_fec_ber()?;
        let z = 1.959_963_984_540_054f64;
        let den = 1.0 + z * z / n;
        let centre = p + z * z / (2.0 * n);
        let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
        Some(((centre + half) / den).min(1.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub layout: Layout,
    pub points: Vec<PointResult>,
}

/// Statistics of one group, merged in group order.
#[derive(Debug, Clone, Default)]
struct GroupStats {
    point: PointResult,
    hist: LlrHistogram,
    // client bit error positions within the group, ascending
    client_errors: Vec<u64>,
}

/// An assembled link: frame plan, code, optional DM and the constellation.
#[derive(Debug, Clone)]
pub struct Link {
    plan: FramePlan,
    code: LdpcCode,
    matcher: Option<Matcher>,
    modem: Modem,
}

#[derive(Debug, Clone)]
enum Modem {
    Pam {
        labeling: AmplitudeLabeling,
        rail: Constellation<1>,
    },
    Cross(Constellation<2>),
}

impl Link {
    /// PAS link: `matcher` shapes levels `2..=g+1` of each rail.
    pub fn pas(layout: Layout, code: LdpcCode, matcher: Matcher) -> Result<Self> {
        let levels = matcher.shaped_levels();
        let g = matcher.shaped_bits_per_symbol();
        if levels != (2..2 + g as u32).collect::<Vec<_>>() {
            return Err(Error::Geometry(format!(
                "PAS needs the shaped levels to be the top amplitude levels 2..={}, got {levels:?}",
                g + 1
            )));
        }
        let geometry = DmGeometry {
            input_bits: matcher.input_bits(),
            pam_symbols: matcher.pam_symbols(),
            shaped_bits: g,
            amplitude_bits: matcher.amplitude_bits() as usize,
        };
        let plan = FramePlan::pas(layout, code.n(), code.k(), geometry)?;
        if !code.can_encode() {
            return Err(Error::NotEncodable(
                "the link needs an encodable code".into(),
            ));
        }
        let labeling = AmplitudeLabeling::reflected_gray(matcher.amplitude_bits())?;
        let rail = Constellation::pam(&labeling, &matcher.amplitude_pmf()?)?;
        Ok(Self {
            plan,
            code,
            matcher: Some(matcher),
            modem: Modem::Pam { labeling, rail },
        })
    }

    /// Uniform BICM on the 128-point cross constellation.
    pub fn bicm128(code: LdpcCode) -> Result<Self> {
        if !code.can_encode() {
            return Err(Error::NotEncodable(
                "the link needs an encodable code".into(),
            ));
        }
        let plan = FramePlan::bicm(code.n(), code.k(), 7)?;
        Ok(Self {
            plan,
            code,
            matcher: None,
            modem: Modem::Cross(Constellation::cross128()),
        })
    }

    pub fn plan(&self) -> &FramePlan {
        &self.plan
    }

    pub fn code(&self) -> &LdpcCode {
        &self.code
    }

    pub fn matcher(&self) -> Option<&Matcher> {
        self.matcher.as_ref()
    }

    /// Mean energy per 2D symbol.
    pub fn es_2d(&self) -> f64 {
        match &self.modem {
            Modem::Pam { rail, .. } => 2.0 * rail.energy(),
            Modem::Cross(c) => c.energy(),
        }
    }

    /// Runs every SNR point of `cfg` on `workers` threads (0 = rayon default).
    pub fn run(&self, cfg: &SimConfig, workers: usize) -> Result<SimResult> {
        cfg.validate()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        let mut points = Vec::with_capacity(cfg.snr_db.len());
        for (idx, &snr) in cfg.snr_db.iter().enumerate() {
            points.push(pool.install(|| self.run_point(cfg, idx, snr))?);
        }
        Ok(SimResult {
            layout: self.plan.layout,
            points,
        })
    }

    fn run_point(&self, cfg: &SimConfig, snr_idx: usize, snr_db: f64) -> Result<PointResult> {
        let sigma = noise_sigma(self.es_2d(), snr_db)?;
        let demap = match &self.modem {
            Modem::Pam { rail, .. } => Demap::Rail(SoftDemapper::new(
                rail,
                sigma,
                cfg.demap_input_bits,
                cfg.llr_bits,
            )?),
            Modem::Cross(c) => Demap::Cross(SoftDemapper::new(
                c,
                sigma,
                cfg.demap_input_bits,
                cfg.llr_bits,
            )?),
        };
        let ctx = PointCtx {
            cfg,
            snr_idx,
            sigma,
            demap,
        };
        let mut total = PointResult {
            snr_db,
            ..Default::default()
        };
        let mut hist = LlrHistogram::new(self.plan.bits_per_symbol);
        let mut errored_blocks: Vec<u64> = Vec::new();
        let cbpg = self.plan.client_bits_per_group() as u64;
        let block = cfg.block_bits();
        let mut next_group = 0u64;
        loop {
            let batch: Vec<u64> = (next_group..next_group + cfg.batch_groups as u64).collect();
            let stats: Vec<GroupStats> = batch
                .par_iter()
                .map(|&g| self.run_group(&ctx, g))
                .collect::<Result<_>>()?;
            for (g, s) in batch.iter().zip(stats) {
                add_counts(&mut total, &s.point);
                hist.merge(&s.hist);
                for e in s.client_errors {
                    let b = (g * cbpg + e) / block;
                    if errored_blocks.last() != Some(&b) {
                        errored_blocks.push(b);
                    }
                }
            }
            next_group += cfg.batch_groups as u64;
            let done = total.codewords >= cfg.max_codewords
                || cfg
                    .target_bit_errors
                    .is_some_and(|t| total.post_fec_bit_errors >= t)
                || cfg
                    .target_frame_errors
                    .is_some_and(|t| total.frame_errors >= t);
            if done {
                break;
            }
        }
        total.groups = next_group;
        total.blocks = total.client_bits / block;
        total.errored_blocks = errored_blocks.iter().filter(|&&b| b < total.blocks).count() as u64;
        total.asi = hist.asi();
        total.ngmi = hist.ngmi();
        Ok(total)
    }

    /// Deterministic RNG of one group.
    fn group_rng(seed: u64, snr_idx: usize, group: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(((snr_idx as u64) << 40) ^ group);
        rng
    }

    fn run_group(&self, ctx: &PointCtx, group: u64) -> Result<GroupStats> {
        let plan = &self.plan;
        let (n, k) = (plan.n, plan.k);
        let cws = plan.codewords_per_group;
        let mut rng = Self::group_rng(ctx.cfg.seed, ctx.snr_idx, group);
        let client: Vec<u8> = (0..plan.client_bits_per_group())
            .map(|_| rng.random::<bool>() as u8)
            .collect();

        let codewords = self.frame(&client)?;

        // modulation, channel, demapping
        let mut llrs = vec![vec![0i8; n]; cws];
        let mut hist = LlrHistogram::new(plan.bits_per_symbol);
        let m = plan.bits_per_symbol as u32;
        let mut record =
            |c: usize, i: usize, level: u32, q: i8, cost: &[f32; 2], llrs: &mut Vec<Vec<i8>>| {
                let bit = codewords[c][i];
                llrs[c][i] = q;
                hist.add(level as usize, q as i64, bit, cost[bit as usize] as f64);
            };
        match (&self.modem, &ctx.demap) {
            (Modem::Pam { labeling, .. }, Demap::Rail(d)) => {
                let r = plan.symbols_per_codeword;
                let mut rail_values = vec![0.0f64; r];
                for c in 0..cws {
                    for (rail, v) in rail_values.iter_mut().enumerate() {
                        let label = (1..=m).fold(0u32, |acc, lvl| {
                            (acc << 1) | codewords[c][plan.pas_index(rail, lvl)] as u32
                        });
                        *v = Constellation::pam_value(labeling, label);
                    }
                    awgn(&mut rail_values, ctx.sigma, &mut rng);
                    for (rail, &y) in rail_values.iter().enumerate() {
                        let (q, cost) = d.demap_with_costs(&[y]);
                        for lvl in 1..=m {
                            let i = plan.pas_index(rail, lvl);
                            record(
                                c,
                                i,
                                lvl,
                                q[lvl as usize - 1],
                                &cost[lvl as usize - 1],
                                &mut llrs,
                            );
                        }
                    }
                }
            }
            (Modem::Cross(con), Demap::Cross(d)) => {
                let s = plan.symbols_per_group();
                let mut labels = vec![0u32; s];
                for (c, cw) in codewords.iter().enumerate() {
                    for (i, &b) in cw.iter().enumerate() {
                        let slot = plan.slot(c, i);
                        labels[slot.symbol] |= (b as u32) << (m - slot.level);
                    }
                }
                let mut coords: Vec<f64> = labels
                    .iter()
                    .flat_map(|&l| con.points[l as usize].coords)
                    .collect();
                awgn(&mut coords, ctx.sigma, &mut rng);
                for sym in 0..s {
                    let (q, cost) = d.demap_with_costs(&[coords[2 * sym], coords[2 * sym + 1]]);
                    for lvl in 1..=m {
                        let (c, i) = plan.index_of(sym, lvl);
                        record(
                            c,
                            i,
                            lvl,
                            q[lvl as usize - 1],
                            &cost[lvl as usize - 1],
                            &mut llrs,
                        );
                    }
                }
            }
            _ => unreachable!("demapper built for the link's modem"),
        }

        // decoding
        let mut point = PointResult::default();
        let mut decoder = Decoder::new(&self.code, ctx.cfg.decoder, ctx.cfg.max_iter);
        let mut decoded = Vec::with_capacity(cws);
        for c in 0..cws {
            let l: Vec<f32> = llrs[c].iter().map(|&q| q as f32).collect();
            point.pre_fec_bit_errors += llrs[c]
                .iter()
                .zip(&codewords[c])
                .filter(|(&q, &b)| (q < 0) != (b == 1))
                .count() as u64;
            let out = decoder.decode(&l)?;
            let errs = out.bits[..k]
                .iter()
                .zip(&codewords[c][..k])
                .filter(|(a, b)| a != b)
                .count() as u64;
            point.post_fec_bit_errors += errs;
            point.frame_errors += (errs > 0) as u64;
            point.unconverged += (!out.converged) as u64;
            point.decoder_iterations += out.iterations as u64;
            decoded.push(out.bits);
        }
        point.codewords = cws as u64;
        point.coded_bits = (cws * n) as u64;
        point.payload_bits = (cws * k) as u64;

        // invDM and deframing
        let client_hat = self.deframe(&decoded)?;
        point.client_bits = client.len() as u64;
        let client_errors: Vec<u64> = client
            .iter()
            .zip(&client_hat)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i as u64)
            .collect();
        point.client_bit_errors = client_errors.len() as u64;
        point.groups = 1;
        Ok(GroupStats {
            point,
            hist,
            client_errors,
        })
    }

    /// Codewords of one group carrying `client` (`client_bits_per_group()` bits).
    pub fn frame(&self, client: &[u8]) -> Result<Vec<Vec<u8>>> {
        let plan = &self.plan;
        if client.len() != plan.client_bits_per_group() {
            return Err(Error::InputLength {
                expected: plan.client_bits_per_group(),
                actual: client.len(),
            });
        }
        let (k, cws) = (plan.k, plan.codewords_per_group);
        let mut payloads = vec![vec![0u8; k]; cws];
        match (&self.matcher, plan.dm) {
            (Some(dm), Some(geo)) => {
                let nu = geo.input_bits;
                for w in 0..plan.dm_words_per_group {
                    let shaped = dm.encode(&client[w * nu..(w + 1) * nu])?;
                    self.scatter_shaped(w, &shaped, &mut payloads);
                }
                let mut ptr = plan.dm_words_per_group * nu;
                for p in payloads.iter_mut() {
                    for (i, bit) in p.iter_mut().enumerate() {
                        if plan.is_unshaped_payload(i) {
                            *bit = client[ptr];
                            ptr += 1;
                        }
                    }
                }
            }
            _ => {
                for (c, p) in payloads.iter_mut().enumerate() {
                    p.copy_from_slice(&client[c * k..(c + 1) * k]);
                }
            }
        }
        payloads.iter().map(|p| self.code.encode(p)).collect()
    }

    fn scatter_shaped(&self, w: usize, shaped: &[u8], payloads: &mut [Vec<u8>]) {
        let plan = &self.plan;
        let g = plan.dm.expect("PAS plan").shaped_bits;
        for (r, bits) in shaped.chunks(g).enumerate() {
            let (c, rail) = plan.dm_rail(w, r);
            for (s, &b) in bits.iter().enumerate() {
                payloads[c][plan.pas_index(rail, 2 + s as u32)] = b;
            }
        }
    }

    /// Client bits recovered from decoded codewords.
    pub fn deframe(&self, decoded: &[Vec<u8>]) -> Result<Vec<u8>> {
        let plan = &self.plan;
        let mut out = Vec::with_capacity(plan.client_bits_per_group());
        match (&self.matcher, plan.dm) {
            (Some(dm), Some(geo)) => {
                let g = geo.shaped_bits;
                for w in 0..plan.dm_words_per_group {
                    let mut shaped = Vec::with_capacity(geo.pam_symbols * g);
                    for r in 0..geo.pam_symbols {
                        let (c, rail) = plan.dm_rail(w, r);
                        for s in 0..g {
                            shaped.push(decoded[c][plan.pas_index(rail, 2 + s as u32)]);
                        }
                    }
                    out.extend(dm.decode(&shaped)?);
                }
                for cw in decoded {
                    out.extend(
                        (0..plan.k)
                            .filter(|&i| plan.is_unshaped_payload(i))
                            .map(|i| cw[i]),
                    );
                }
            }
            _ => {
                for cw in decoded {
                    out.extend_from_slice(&cw[..plan.k]);
                }
            }
        }
        Ok(out)
    }
}

struct PointCtx<'a> {
    cfg: &'a SimConfig,
    snr_idx: usize,
    sigma: f64,
    demap: Demap,
}

enum Demap {
    Rail(SoftDemapper<1>),
    Cross(SoftDemapper<2>),
}

fn add_counts(total: &mut PointResult, p: &PointResult) {
    total.groups += p.groups;
    total.codewords += p.codewords;
    total.coded_bits += p.coded_bits;
    total.pre_fec_bit_errors += p.pre_fec_bit_errors;
    total.payload_bits += p.payload_bits;
    total.post_fec_bit_errors += p.post_fec_bit_errors;
    total.frame_errors += p.frame_errors;
    total.unconverged += p.unconverged;
    total.decoder_iterations += p.decoder_iterations;
    total.client_bits += p.client_bits;
    total.client_bit_errors += p.client_bit_errors;
}

/// Block error rate of a client stream of `total_bits` bits with errors at
/// `positions`: blocks of `block_bits`, a block errored iff it holds an
/// error. Only complete blocks count.
pub fn count_bber(positions: &[u64], total_bits: u64, block_bits: u64) -> Option<f64> {
    let blocks = total_bits / block_bits;
    if blocks == 0 {
        return None;
    }
    let mut errored: Vec<u64> = positions
        .iter()
        .map(|p| p / block_bits)
        .filter(|&b| b < blocks)
        .collect();
    errored.sort_unstable();
    errored.dedup();
    Some(errored.len() as f64 / blocks as f64)
}

/// SNR at which `ber` crosses `target`, by linear interpolation of
/// `log10(ber)` between the bracketing points. Points with zero BER are
/// skipped.
pub fn required_snr(points: &[(f64, f64)], target: f64) -> Option<f64> {
    let usable: Vec<(f64, f64)> = points.iter().copied().filter(|&(_, b)| b > 0.0).collect();
    usable.windows(2).find_map(|w| {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        if (b0 >= target && b1 <= target) || (b0 <= target && b1 >= target) {
            let (l0, l1, lt) = (b0.log10(), b1.log10(), target.log10());
            if l0 == l1 {
                return Some(s0);
            }
            Some(s0 + (lt - l0) / (l1 - l0) * (s1 - s0))
        } else {
            None
        }
    })
}

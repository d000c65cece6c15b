//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use pas_core::analysis::{
    bound_post_invdm_ber, error_insertion_test, exhaustive_single_error, r_e1_bound,
    required_post_fec_ber, Geometry, SingleErrorParams,
};
use pas_core::bundled::{ccdm_reference, example_codec, hidm_reference, EXAMPLE_TREE};
use pas_core::ccdm::CcdmCodec;
use pas_core::constellation::{mb_lambda_for, mb_pmf, pmf_energy};
use pas_core::fec::{bundled_code, Decoder, DecoderVariant};
use pas_core::hidm::storage_bits;
use pas_core::metrics::{constellation_gain_db, ShapingRates};
use pas_core::pipeline::{
    required_snr, FramePlan, Layout, Link, PointResult, SimConfig, SimResult,
};
use pas_core::{
    AmplitudeAlphabet, BigRational, Composition, HidmCodec, HidmFile, HidmTreeSpec, LayerSpec,
    Matcher, MbTarget,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{bits_of, scan_decode};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    check(
        (got - want).abs() <= tol,
        format!("{name} = {got:.6}, want {want} +- {tol}"),
    )
}

fn in_time(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    check(t < limit, format!("took {t:.2?}, limit {limit:?}"))
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn f(x: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap()
}

fn sorted_rows(t: &pas_core::HidmTables) -> Vec<Vec<(u32, BigRational)>> {
    t.layers
        .iter()
        .map(|rows| {
            let mut v: Vec<_> = rows.iter().map(|e| (e.word, e.energy.clone())).collect();
            v.sort();
            v
        })
        .collect()
}

fn c1_example_tables() -> Outcome {
    let t0 = Instant::now();
    let file = HidmFile::parse(EXAMPLE_TREE).map_err(|e| e.to_string())?;
    let reference = file.tables.clone().ok_or("fixture has no tables")?;
    let built = HidmCodec::new(file.spec.clone()).map_err(|e| e.to_string())?;
    check(
        sorted_rows(built.tables()) == sorted_rows(&reference),
        "built (word, energy) multisets differ from the fixture",
    )?;
    check(
        file.render() == EXAMPLE_TREE,
        "fixture does not round-trip byte-exactly",
    )?;
    in_time(t0, Duration::from_secs(1))?;
    Ok(format!(
        "3 layers match exactly, fixture round-trips ({:.1?})",
        t0.elapsed()
    ))
}

fn c2_example_exhaustive() -> Outcome {
    let t0 = Instant::now();
    let codec = example_codec();
    let lab = codec.labeling().clone();
    let mut seen = HashSet::new();
    let mut counts = [0u64; 16];
    for v in 0..1u64 << 15 {
        let bits = bits_of(v, 15);
        let (dm_bits, signs) = bits.split_at(11);
        let word = codec.encode(dm_bits).map_err(|e| e.to_string())?;
        check(
            codec.decode(&word).map_err(|e| e.to_string())? == dm_bits,
            format!("input {v} not recovered"),
        )?;
        let symbols: Vec<(u8, usize)> = word
            .chunks(4)
            .zip(signs)
            .map(|(p, &s)| {
                (
                    s,
                    lab.index_of(p.iter().fold(0, |a, &b| (a << 1) | b as u32)),
                )
            })
            .collect();
        for &(_, a) in &symbols {
            counts[a] += 1;
        }
        check(seen.insert(symbols), format!("input {v} collides"))?;
    }
    let total = 4 * (1i64 << 15);
    let want = [
        q(23, 128),
        q(23, 128),
        q(11, 64),
        q(11, 64),
        q(3, 32),
        q(3, 32),
        q(3, 64),
        q(3, 64),
        q(1, 128),
        q(1, 128),
    ];
    for (i, &c) in counts.iter().enumerate() {
        let expect = want.get(i).cloned().unwrap_or_else(|| q(0, 1));
        check(
            q(c as i64, total) == expect,
            format!("P(index {i}) = {c}/{total}, want {expect}"),
        )?;
    }
    check(
        codec.amplitude_pmf().map_err(|e| e.to_string())?.probs()[..10] == want[..],
        "analytic PMF differs",
    )?;
    in_time(t0, Duration::from_secs(10))?;
    Ok(format!(
        "2^15 inputs bijective, PMF exact ({:.1?})",
        t0.elapsed()
    ))
}

fn c3_example_metrics() -> Outcome {
    let codec = example_codec();
    let e = codec.expected_energy_1d();
    check(e == q(57, 1), format!("E = {e}, want 57"))?;
    let pmf = codec.amplitude_pmf().map_err(|e| e.to_string())?.to_f64();
    let h = pmf.entropy_1d_signed();
    within("H per 1D", h, 3.93, 0.005)?;
    let rates = ShapingRates::new(2.0 * h, 1.0, 10, 15.0, 4).map_err(|e| e.to_string())?;
    let loss = rates.rate_loss().map_err(|e| e.to_string())? / 2.0;
    within("rate loss per 1D", loss, 0.18, 0.01)?;
    let g = constellation_gain_db(7.5, 2.0 * f(&e), 2.0);
    within("G", g, 0.22, 0.01)?;
    Ok(format!(
        "E = 57, H = {h:.4}, loss = {loss:.4} b/1D, G = {g:.4} dB"
    ))
}

fn c4_storage() -> Outcome {
    let spec = HidmFile::parse(EXAMPLE_TREE)
        .map_err(|e| e.to_string())?
        .spec;
    let single = HidmTreeSpec {
        layers: vec![LayerSpec::new(16, 0, 11, 1)],
        amplitude_bits: 4,
        shaped_levels: vec![2, 3, 4, 5],
        storage_budget: None,
    };
    let (a, b) = (storage_bits(&spec), storage_bits(&single));
    check(a == (480, 816), format!("tree storage {a:?}"))?;
    check(b == (32768, 720896), format!("single LUT storage {b:?}"))?;
    Ok(format!("tree {a:?}, single LUT {b:?}"))
}

const BETA: f64 = 2.0 * (1014.0 + 1280.0) / 640.0;

fn c5_shaping_statistics() -> Outcome {
    let t0 = Instant::now();
    let ccdm = ccdm_reference();
    let e2d = ccdm.expected_energy_1d() * q(2, 1);
    check(e2d == q(145, 2), format!("CCDM E2D = {e2d}"))?;
    let h2 = ccdm.amplitude_pmf().to_f64().entropy_2d();
    within("CCDM 2H(X)", h2, 7.214, 0.002)?;
    let n_u = 1014.0 + (5.0 / 6.0 * 8.0 - 4.0) * 320.0;
    let loss = ShapingRates::new(h2, 5.0 / 6.0, 8, n_u, 640)
        .and_then(|r| r.rate_loss())
        .map_err(|e| e.to_string())?;
    within("CCDM rate loss", loss, 0.045, 0.002)?;
    let g_ccdm = constellation_gain_db(BETA, 72.5, 2.0);
    within("CCDM G", g_ccdm, 1.186, 0.005)?;

    let alphabet = AmplitudeAlphabet::new(3).map_err(|e| e.to_string())?;
    let lambda = mb_lambda_for(MbTarget::Entropy2d(BETA), &alphabet).map_err(|e| e.to_string())?;
    let mb = mb_pmf(lambda, &alphabet);
    let column = [
        0.2628, 0.2355, 0.1891, 0.1360, 0.0877, 0.0506, 0.0262, 0.0121,
    ];
    let dev = mb
        .probs()
        .iter()
        .zip(column)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    check(dev <= 5e-4, format!("MB column deviation {dev:.5}"))?;
    let g_mb = constellation_gain_db(BETA, 2.0 * pmf_energy(&mb, &alphabet), 2.0);
    within("MB G", g_mb, 1.444, 0.005)?;

    let hidm = hidm_reference();
    let g_hidm = constellation_gain_db(BETA, 2.0 * f(&hidm.expected_energy_1d()), 2.0);
    within("HiDM G", g_hidm, 1.056, 0.02)?;
    in_time(t0, Duration::from_secs(60))?;
    Ok(format!(
        "CCDM 2H = {h2:.4}, loss = {loss:.4}, G = {g_ccdm:.4}; MB dev {dev:.1e}, G = {g_mb:.4}; HiDM G = {g_hidm:.4}"
    ))
}

fn c6_ccdm_combinatorics() -> Outcome {
    let t0 = Instant::now();
    let small = Composition::new(vec![2, 1, 1]).map_err(|e| e.to_string())?;
    check(small.num_input_bits() == 3, "(2,1,1) input bits")?;
    let mut all = Vec::new();
    for a in 0..3u32 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let s = vec![a, b, c, d];
                    let mut n = [0; 3];
                    s.iter().for_each(|&x| n[x as usize] += 1);
                    if n == [2, 1, 1] {
                        all.push(s);
                    }
                }
            }
        }
    }
    check(all.len() == 12, format!("{} arrangements", all.len()))?;
    for (i, s) in all.iter().enumerate() {
        let idx = BigUint::from(i);
        check(
            small.unrank(&idx).map_err(|e| e.to_string())? == *s,
            format!("unrank {i}"),
        )?;
        check(
            small.rank(s).map_err(|e| e.to_string())? == idx,
            format!("rank {i}"),
        )?;
    }
    check(
        small.unrank(&BigUint::from(12u32)).is_err(),
        "index 12 accepted",
    )?;
    let big = Composition::new(vec![318, 208, 89, 25]).map_err(|e| e.to_string())?;
    let bits = big.num_input_bits();
    check(bits >= 1014, format!("{bits} input bits"))?;
    let m = big.num_sequences();
    check(m.bits() - 1 == bits, "floor(log2 M) inconsistent")?;
    // exact multinomial by prime-free product of binomials
    let mut oracle = BigUint::from(1u32);
    let mut left = 640u64;
    for &c in big.counts() {
        let mut b = BigUint::from(1u32);
        for j in 0..c {
            b = b * (left - j) / (j + 1);
        }
        oracle *= b;
        left -= c;
    }
    check(oracle == m, "multinomial differs from binomial product")?;
    let codec = CcdmCodec::new(big, 3, Some(1014)).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let b: Vec<u8> = (0..1014).map(|_| rng.random::<bool>() as u8).collect();
        let s = codec.encode(&b).map_err(|e| e.to_string())?;
        check(
            codec.decode(&s).map_err(|e| e.to_string())? == b,
            "full-size round trip",
        )?;
    }
    in_time(t0, Duration::from_secs(10))?;
    Ok(format!(
        "12 arrangements inverse; (318,208,89,25) carries {bits} bits, frame uses 1014"
    ))
}

fn c7_error_insertion() -> Outcome {
    let ccdm = Matcher::from(ccdm_reference());
    let r = error_insertion_test(&ccdm, 1, 1000, 2024).map_err(|e| e.to_string())?;
    within("CCDM single-error BER", r.ber(), 0.5, 0.02)?;
    check(
        (r.alpha() / 507.0 - 1.0).abs() <= 0.05,
        format!("CCDM alpha = {:.1}, want 507 +- 5%", r.alpha()),
    )?;
    let codec = example_codec();
    let mut errors = 0u64;
    for v in 0..1u64 << 11 {
        let info = bits_of(v, 11);
        let word = codec.encode(&info).map_err(|e| e.to_string())?;
        for p in 0..16 {
            let mut bad = word.clone();
            bad[p] ^= 1;
            errors += scan_decode(&codec, &bad)
                .iter()
                .zip(&info)
                .filter(|(a, b)| a != b)
                .count() as u64;
        }
    }
    let ex = exhaustive_single_error(&Matcher::from(codec)).map_err(|e| e.to_string())?;
    check(
        ex.bit_errors == errors,
        format!("exhaustive {} vs oracle {errors}", ex.bit_errors),
    )?;
    Ok(format!(
        "CCDM BER {:.4}, alpha {:.1}; example tree alpha = {}/{} exact",
        r.ber(),
        r.alpha(),
        ex.bit_errors,
        ex.trials
    ))
}

fn ccdm_geometry() -> Geometry {
    Geometry::pas(1014, 640, 4, 8, 5.0 / 6.0, 1800)
}

fn hidm_geometry() -> Geometry {
    Geometry::pas(507, 320, 4, 8, 5.0 / 6.0, 1800)
}

fn c8_bound_identities() -> Outcome {
    let c = r_e1_bound(&SingleErrorParams::CCDM_REFERENCE, &ccdm_geometry());
    let h = r_e1_bound(&SingleErrorParams::HIDM_REFERENCE, &hidm_geometry());
    within("CCDM r_E1 bound", c, 348.0, 0.5)?;
    within("HiDM r_E1 bound", h, 9.7, 0.5)?;
    let ec = required_post_fec_ber(&SingleErrorParams::CCDM_REFERENCE, &ccdm_geometry(), 1e-15)
        .ok_or("no CCDM root")?;
    let eh = required_post_fec_ber(&SingleErrorParams::HIDM_REFERENCE, &hidm_geometry(), 1e-15)
        .ok_or("no HiDM root")?;
    check(
        (ec / 3e-18 - 1.0).abs() <= 0.2,
        format!("CCDM required BER {ec:.3e}"),
    )?;
    check(
        (eh / 1e-16 - 1.0).abs() <= 0.2,
        format!("HiDM required BER {eh:.3e}"),
    )?;
    Ok(format!(
        "r_E1 {c:.2} / {h:.2}; required post-FEC BER {ec:.3e} / {eh:.3e}"
    ))
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

fn sweep(link: &Link, snr: Vec<f64>) -> Result<SimResult, String> {
    let mut cfg = SimConfig::new(0xacce_97, snr);
    cfg.max_codewords = 6400;
    cfg.target_frame_errors = Some(400);
    link.run(&cfg, 0).map_err(|e| e.to_string())
}

fn crossing(r: &SimResult) -> Option<f64> {
    let pts: Vec<(f64, f64)> = r
        .points
        .iter()
        .filter_map(|p| p.post_fec_ber().filter(|&b| b > 0.0).map(|b| (p.snr_db, b)))
        .collect();
    required_snr(&pts, 1e-4)
}

/// Point whose post-FEC BER is nearest 1e-4 in log scale among those with
/// at least 100 post-FEC bit errors.
fn near_target(r: &SimResult) -> Option<&PointResult> {
    r.points
        .iter()
        .filter(|p| p.post_fec_bit_errors >= 100)
        .min_by(|a, b| {
            let d = |p: &PointResult| (p.post_fec_ber().unwrap().log10() + 4.0).abs();
            d(a).total_cmp(&d(b))
        })
}

fn c9_link_level() -> Outcome {
    let t0 = Instant::now();
    let ccdm = Matcher::from(ccdm_reference());
    let hidm = Matcher::from(hidm_reference());
    let alpha_c = error_insertion_test(&ccdm, 1, 2000, 1)
        .map_err(|e| e.to_string())?
        .alpha();
    let alpha_h = error_insertion_test(&hidm, 1, 20_000, 1)
        .map_err(|e| e.to_string())?
        .alpha();
    let links = [
        Link::pas(Layout::CcdmParallel, bundled_code(), ccdm).map_err(|e| e.to_string())?,
        Link::pas(Layout::HidmSequential, bundled_code(), hidm).map_err(|e| e.to_string())?,
        Link::bicm128(bundled_code()).map_err(|e| e.to_string())?,
    ];
    let grids = [
        grid(19.3, 19.9, 0.1),
        grid(19.5, 20.1, 0.1),
        grid(20.3, 21.1, 0.1),
    ];
    let mut results = Vec::new();
    for (link, g) in links.iter().zip(grids) {
        results.push(sweep(link, g)?);
    }
    let snr: Vec<f64> = results
        .iter()
        .zip(["CCDM", "HiDM", "BICM"])
        .map(|(r, n)| crossing(r).ok_or(format!("{n} does not cross 1e-4 on its grid")))
        .collect::<Result<_, _>>()?;
    let gap = snr[1] - snr[0];
    let bicm_gap = snr[2] - snr[1];
    within("HiDM - CCDM gap (dB)", gap, 0.13, 0.10)?;
    check(bicm_gap > 0.4, format!("BICM - HiDM = {bicm_gap:.3} dB"))?;

    // r_E1 against the single-error bound at every well-populated point
    let params = [
        (
            SingleErrorParams::from_geometry(alpha_c, 32.0, &ccdm_geometry()),
            ccdm_geometry(),
        ),
        (
            SingleErrorParams::from_geometry(alpha_h, 2.0, &hidm_geometry()),
            hidm_geometry(),
        ),
    ];
    for (r, (p, g)) in results.iter().zip(&params) {
        for pt in r.points.iter().filter(|pt| pt.post_fec_bit_errors >= 100) {
            let e = pt.post_fec_ber().unwrap();
            let measured = pt.post_invdm_ber().unwrap() / e;
            let bound = bound_post_invdm_ber(p, g, e).1 / e;
            check(
                measured <= bound,
                format!(
                    "{:?} at {} dB: r_E1 {measured:.2} above bound {bound:.2}",
                    r.layout, pt.snr_db
                ),
            )?;
        }
    }
    let near: Vec<&PointResult> = results
        .iter()
        .map(near_target)
        .collect::<Option<_>>()
        .ok_or("no point with 100 errors")?;
    let r1 = |p: &PointResult| p.post_invdm_ber().unwrap() / p.post_fec_ber().unwrap();
    let (r1c, r1h) = (r1(near[0]), r1(near[1]));
    check(r1c > r1h, format!("r_E1 CCDM {r1c:.2} <= HiDM {r1h:.2}"))?;
    let r2 = [
        near[0]
            .bber()
            .zip(near[0].post_invdm_ber())
            .map(|(b, i)| b / i),
        near[1]
            .bber()
            .zip(near[1].post_invdm_ber())
            .map(|(b, i)| b / i),
        near[2]
            .bber()
            .zip(near[2].post_fec_ber())
            .map(|(b, i)| b / i),
    ];
    let r2: Vec<f64> = r2
        .into_iter()
        .collect::<Option<_>>()
        .ok_or("r_E2 undefined")?;
    check(
        r2[0] < r2[1] && r2[1] < r2[2],
        format!("r_E2 ordering {r2:.1?}"),
    )?;
    for (r, n) in results.iter().zip(["CCDM", "HiDM", "BICM"]) {
        for p in &r.points {
            println!(
                "    {n} {:5.2} dB  post-FEC {:.3e}  post-invDM {:.3e}  FER {:.3e}  BBER {:.3e}  ({} cw)",
                p.snr_db,
                p.post_fec_ber().unwrap_or(0.0),
                p.post_invdm_ber().unwrap_or(0.0),
                p.fer().unwrap_or(0.0),
                p.bber().unwrap_or(f64::NAN),
                p.codewords
            );
        }
    }
    Ok(format!(
        "1e-4 at {:.3}/{:.3}/{:.3} dB: HiDM-CCDM {gap:.3} dB, BICM-HiDM {bicm_gap:.3} dB; \
         r_E1 {r1c:.1} > {r1h:.2}; r_E2 {:.1} < {:.1} < {:.1} ({:.0?})",
        snr[0],
        snr[1],
        snr[2],
        r2[0],
        r2[1],
        r2[2],
        t0.elapsed()
    ))
}

fn c10_properties() -> Outcome {
    let t0 = Instant::now();
    let links = [
        Link::pas(
            Layout::CcdmParallel,
            bundled_code(),
            Matcher::from(ccdm_reference()),
        )
        .map_err(|e| e.to_string())?,
        Link::pas(
            Layout::HidmSequential,
            bundled_code(),
            Matcher::from(hidm_reference()),
        )
        .map_err(|e| e.to_string())?,
        Link::bicm128(bundled_code()).map_err(|e| e.to_string())?,
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for link in &links {
        let plan = link.plan();
        for _ in 0..3 {
            let client: Vec<u8> = (0..plan.client_bits_per_group())
                .map(|_| rng.random::<bool>() as u8)
                .collect();
            let cws = link.frame(&client).map_err(|e| e.to_string())?;
            check(
                link.deframe(&cws).map_err(|e| e.to_string())? == client,
                format!("{:?} loopback", plan.layout),
            )?;
        }
        plan_bijective(plan)?;
    }
    for (rails, pam, seq) in [(7, 3, true), (12, 5, false), (30, 8, true)] {
        let geo = pas_core::pipeline::DmGeometry {
            input_bits: 1,
            pam_symbols: pam,
            shaped_bits: 2,
            amplitude_bits: 3,
        };
        let layout = if seq {
            Layout::HidmSequential
        } else {
            Layout::CcdmParallel
        };
        plan_bijective(
            &FramePlan::pas(layout, 4 * rails, 4 * rails - 2, geo).map_err(|e| e.to_string())?,
        )?;
    }
    let code = bundled_code();
    for variant in [DecoderVariant::default(), DecoderVariant::SumProduct] {
        let mut dec = Decoder::new(&code, variant, 20);
        for _ in 0..5 {
            let payload: Vec<u8> = (0..code.k()).map(|_| rng.random::<bool>() as u8).collect();
            let cw = code.encode(&payload).map_err(|e| e.to_string())?;
            let llr: Vec<f32> = cw
                .iter()
                .map(|&b| if b == 0 { 3.0 } else { -3.0 })
                .collect();
            let out = dec.decode(&llr).map_err(|e| e.to_string())?;
            check(out.converged && out.bits == cw, "noiseless decode")?;
        }
    }
    for (link, snr) in links.iter().zip([19.5, 19.6, 20.4]) {
        let mut cfg = SimConfig::new(99, vec![snr]);
        cfg.max_codewords = 60;
        cfg.batch_groups = 2;
        let a = link.run(&cfg, 1).map_err(|e| e.to_string())?;
        let b = link.run(&cfg, 2).map_err(|e| e.to_string())?;
        check(
            a == b,
            format!("{:?} differs across worker counts", link.plan().layout),
        )?;
    }
    in_time(t0, Duration::from_secs(600))?;
    Ok(format!(
        "loopback, plan bijectivity, noiseless decoding, worker-count reproducibility ({:.1?})",
        t0.elapsed()
    ))
}

fn plan_bijective(p: &FramePlan) -> Result<(), String> {
    let mut seen = HashSet::new();
    for c in 0..p.codewords_per_group {
        for i in 0..p.n {
            let s = p.slot(c, i);
            check(seen.insert((s.symbol, s.level)), "slot reused")?;
            check(
                p.index_of(s.symbol, s.level) == (c, i),
                "index_of does not invert slot",
            )?;
        }
    }
    check(
        seen.len() == p.group_symbols * p.bits_per_symbol,
        "slots not covered",
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("example tree tables", c1_example_tables),
        ("example tree exhaustive", c2_example_exhaustive),
        ("example tree metrics", c3_example_metrics),
        ("storage accounting", c4_storage),
        ("shaping statistics", c5_shaping_statistics),
        ("CCDM combinatorics", c6_ccdm_combinatorics),
        ("error insertion", c7_error_insertion),
        ("bound identities", c8_bound_identities),
        ("link-level relative performance", c9_link_level),
        ("property suites", c10_properties),
    ];
    let filter: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        match run() {
            Ok(detail) => println!("criterion {n:2} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n:2} FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

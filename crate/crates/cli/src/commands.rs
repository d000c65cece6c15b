use std::path::Path;

use anyhow::{bail, Context, Result};
use pas_core::analysis::{
    bound_bber, bound_post_invdm_ber, compute_gammas, error_insertion_test,
    exhaustive_single_error, r_e1_bound, required_post_fec_ber, Geometry, InsertionResult,
    SingleErrorParams,
};
use pas_core::ccdm::{design_composition, CcdmCodec};
use pas_core::constellation::{mb_lambda_for, mb_pmf, pmf_energy};
use pas_core::metrics::{air_bmd, constellation_gain_db, EstimatorConfig};
use pas_core::pipeline::{Layout, Link, OTUC_BLOCK_BITS};
use pas_core::{
    AmplitudeAlphabet, AmplitudeLabeling, HidmCodec, HidmFile, Matcher, MatcherSummary, MbTarget,
    Pmf,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{
    load_code, BoundsSection, DesignSection, DmSpec, InsertSection, MetricsSection, ShapeSpec,
    SimulateSection,
};
use crate::output::{out_path, write_csv, write_json, Header, Table};

fn print_summary(s: &MatcherSummary) {
    println!("matcher          {}", s.kind);
    println!("input bits       {}", s.input_bits);
    println!("output bits      {}", s.output_bits);
    println!("PAM symbols      {}", s.pam_symbols);
    if let Some((dm, inv)) = s.storage_bits {
        println!("storage bits     {dm} (DM) / {inv} (invDM)");
    }
    println!("E (2D)           {:.4}", s.energy_2d);
    println!("2H(X)            {:.4}", s.entropy_2d);
    println!("beta             {:.5}", s.beta);
    println!("rate loss        {:.4} bits/2D", s.rate_loss);
    println!("gain             {:.4} dB", s.gain_db);
    let pmf: Vec<String> = s.amplitude_pmf.iter().map(|p| format!("{p:.4}")).collect();
    println!("P(|X|)           {}", pmf.join(" "));
}

pub fn build_tree(spec: &Path, out: &Path, out_dir: &Path, header: &Header) -> Result<()> {
    let file = HidmFile::load(spec).with_context(|| format!("loading {}", spec.display()))?;
    let codec = HidmCodec::new(file.spec.clone())?;
    let mut built = HidmFile::from_codec(&codec);
    built.comments = file.comments;
    built.comments.push(format!(" {}", header.comment()));
    built.save(out)?;
    let summary = Matcher::from(codec).summary()?;
    print_summary(&summary);
    println!("wrote            {}", out.display());
    write_json(
        &out_path(out_dir, "build_tree.json")?,
        header,
        &summary,
        None,
    )
}

pub fn inspect_tree(tree: &Path, out_dir: &Path, header: &Header) -> Result<()> {
    let file = HidmFile::load(tree).with_context(|| format!("loading {}", tree.display()))?;
    let has_tables = file.tables.is_some();
    let spec = file.spec.clone();
    let codec = file.into_codec()?;
    for (i, l) in spec.layers.iter().enumerate() {
        println!(
            "layer {}          u={} r={} s={} t={}",
            i + 1,
            l.u,
            l.r,
            l.s,
            l.t
        );
    }
    println!("LUTs per layer   {:?}", spec.lut_counts());
    println!(
        "tables           {}",
        if has_tables {
            "stored, validated"
        } else {
            "built from layout"
        }
    );
    let summary = Matcher::from(codec).summary()?;
    print_summary(&summary);
    write_json(
        &out_path(out_dir, "inspect_tree.json")?,
        header,
        &summary,
        None,
    )
}

pub fn design(cfg: &DesignSection, out_dir: &Path, header: &Header) -> Result<()> {
    let target = Pmf::from_weights(cfg.target_pmf.clone())?;
    let comp = design_composition(
        &target,
        cfg.word_len,
        cfg.amplitude_bits,
        cfg.min_input_bits,
    )?;
    let available = comp.num_input_bits();
    let codec = CcdmCodec::new(comp.clone(), cfg.amplitude_bits, cfg.min_input_bits)?;
    let summary = Matcher::from(codec).summary()?;
    println!("composition      {:?}", comp.counts());
    println!("available bits   {available}");
    print_summary(&summary);
    let body = json!({
        "composition": comp.counts(),
        "available_input_bits": available,
        "summary": summary,
    });
    write_json(
        &out_path(out_dir, "design_composition.json")?,
        header,
        body,
        None,
    )
}

const SIM_COLUMNS: [&str; 23] = [
    "snr_db",
    "codewords",
    "coded_bits",
    "pre_fec_bit_errors",
    "pre_fec_ber",
    "payload_bits",
    "post_fec_bit_errors",
    "post_fec_ber",
    "post_fec_ber_upper95",
    "client_bits",
    "client_bit_errors",
    "post_invdm_ber",
    "frame_errors",
    "fer",
    "blocks",
    "errored_blocks",
    "bber",
    "unconverged",
    "mean_iterations",
    "asi",
    "ngmi",
    "r_e1",
    "r_e2",
];

pub fn simulate(
    cfg: &SimulateSection,
    base: &Path,
    seed: u64,
    workers: usize,
    out_dir: &Path,
    header: &Header,
) -> Result<()> {
    let code = load_code(cfg.code.as_ref(), base)?;
    let link = match cfg.dm.build(base)? {
        Some(m @ Matcher::Hidm(_)) => Link::pas(Layout::HidmSequential, code, m)?,
        Some(m @ Matcher::Ccdm(_)) => Link::pas(Layout::CcdmParallel, code, m)?,
        None => Link::bicm128(code)?,
    };
    let sim = cfg.sim_config(seed);
    let shaped = link.matcher().is_some();
    let result = link.run(&sim, workers)?;
    let mut table = Table::new(&SIM_COLUMNS);
    let n = |v: u64| Some(v as f64);
    println!(
        "{:>8} {:>11} {:>11} {:>11} {:>11} {:>11}",
        "snr_db", "pre-FEC", "post-FEC", "post-invDM", "FER", "BBER"
    );
    for p in &result.points {
        let (r1, r2) = pas_core::analysis::error_ratios(p, shaped);
        table.push(vec![
            Some(p.snr_db),
            n(p.codewords),
            n(p.coded_bits),
            n(p.pre_fec_bit_errors),
            p.pre_fec_ber(),
            n(p.payload_bits),
            n(p.post_fec_bit_errors),
            p.post_fec_ber(),
            p.post_fec_ber_upper95(),
            n(p.client_bits),
            n(p.client_bit_errors),
            p.post_invdm_ber(),
            n(p.frame_errors),
            p.fer(),
            n(p.blocks),
            n(p.errored_blocks),
            p.bber(),
            n(p.unconverged),
            (p.codewords > 0).then(|| p.decoder_iterations as f64 / p.codewords as f64),
            p.asi,
            p.ngmi,
            r1,
            r2,
        ]);
        let s = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3e}"));
        println!(
            "{:>8.3} {:>11} {:>11} {:>11} {:>11} {:>11}",
            p.snr_db,
            s(p.pre_fec_ber()),
            s(p.post_fec_ber()),
            s(p.post_invdm_ber()),
            s(p.fer()),
            s(p.bber())
        );
    }
    write_csv(&out_path(out_dir, "simulate.csv")?, header, &table)?;
    let body = json!({ "layout": result.layout, "es_2d": link.es_2d(), "config": sim });
    write_json(
        &out_path(out_dir, "simulate.json")?,
        header,
        body,
        Some(&table),
    )
}

fn need_matcher(dm: &DmSpec, base: &Path) -> Result<Matcher> {
    match dm.build(base)? {
        Some(m) => Ok(m),
        None => bail!("error insertion needs a distribution matcher"),
    }
}

pub fn insert_errors(
    cfg: &InsertSection,
    base: &Path,
    seed: u64,
    out_dir: &Path,
    header: &Header,
) -> Result<()> {
    let dm = need_matcher(&cfg.dm, base)?;
    let runs: Vec<InsertionResult> = if cfg.exhaustive {
        vec![exhaustive_single_error(&dm)?]
    } else {
        cfg.n_errors
            .iter()
            .map(|&k| error_insertion_test(&dm, k, cfg.trials, seed.wrapping_add(k as u64)))
            .collect::<pas_core::Result<_>>()?
    };
    let mut table = Table::new(&[
        "n_errors",
        "trials",
        "bit_errors",
        "input_bits",
        "ber",
        "alpha",
    ]);
    println!(
        "{:>8} {:>10} {:>10} {:>10}",
        "n_errors", "trials", "ber", "alpha"
    );
    for r in &runs {
        println!(
            "{:>8} {:>10} {:>10.5} {:>10.3}",
            r.n_errors,
            r.trials,
            r.ber(),
            r.alpha()
        );
        table.push(vec![
            Some(r.n_errors as f64),
            Some(r.trials as f64),
            Some(r.bit_errors as f64),
            Some(r.input_bits as f64),
            Some(r.ber()),
            Some(r.alpha()),
        ]);
    }
    write_csv(&out_path(out_dir, "insert_errors.csv")?, header, &table)?;
    let body = json!({ "matcher": dm.name(), "exhaustive": cfg.exhaustive });
    write_json(
        &out_path(out_dir, "insert_errors.json")?,
        header,
        body,
        Some(&table),
    )
}

#[derive(Serialize)]
struct BoundsReport {
    matcher: &'static str,
    alpha: f64,
    alpha_measured: bool,
    theta: f64,
    gamma_in: f64,
    gamma_out: f64,
    geometry: Geometry,
    r_e1_bound: f64,
    target_post_invdm_ber: f64,
    required_post_fec_ber: Option<f64>,
}

pub fn bounds(
    cfg: &BoundsSection,
    base: &Path,
    seed: u64,
    out_dir: &Path,
    header: &Header,
) -> Result<()> {
    if !(cfg.ber_min > 0.0 && cfg.ber_min < cfg.ber_max && cfg.ber_max <= 1.0)
        || cfg.points_per_decade == 0
    {
        bail!("need 0 < ber_min < ber_max <= 1 and points_per_decade > 0");
    }
    let code = load_code(cfg.code.as_ref(), base)?;
    let dm = cfg.dm.build(base)?;
    let (geometry, mut params, measured) = match &dm {
        Some(m) => {
            let g = Geometry::pas(
                m.input_bits(),
                m.pam_symbols(),
                2 * m.shaped_bits_per_symbol() as u32,
                2 * (m.amplitude_bits() + 1),
                code.rate(),
                code.k(),
            );
            let (alpha, measured) = match cfg.alpha {
                Some(a) => (a, false),
                None => (
                    error_insertion_test(m, 1, cfg.alpha_trials, seed)?.alpha(),
                    true,
                ),
            };
            let theta = match m {
                Matcher::Ccdm(_) => 32.0,
                Matcher::Hidm(_) => 2.0,
            };
            (
                g,
                SingleErrorParams::from_geometry(alpha, cfg.theta.unwrap_or(theta), &g),
                measured,
            )
        }
        None => {
            let g = Geometry::bicm(7, code.rate(), code.k());
            let mut p = SingleErrorParams::BICM;
            p.theta = cfg.theta.unwrap_or(1.0);
            (g, p, false)
        }
    };
    if let Some(v) = cfg.gamma_in {
        params.gamma_in = v;
    }
    if let Some(v) = cfg.gamma_out {
        params.gamma_out = v;
    }
    let block = (OTUC_BLOCK_BITS * cfg.otuc_n as u64) as f64;
    let mut table = Table::new(&[
        "post_fec_ber",
        "sb_post_invdm_ber",
        "post_invdm_ber",
        "fer",
        "bber",
    ]);
    let (lo, hi) = (cfg.ber_min.log10(), cfg.ber_max.log10());
    let steps = ((hi - lo) * cfg.points_per_decade as f64).round() as usize;
    for i in 0..=steps {
        let e = 10f64.powf(lo + (hi - lo) * i as f64 / steps.max(1) as f64);
        let (sb, total) = bound_post_invdm_ber(&params, &geometry, e);
        let (bber, fer) = bound_bber(&params, &geometry, e, block);
        table.push(vec![Some(e), Some(sb), Some(total), Some(fer), Some(bber)]);
    }
    let report = BoundsReport {
        matcher: dm.as_ref().map_or("none", |m| m.name()),
        alpha: params.alpha,
        alpha_measured: measured,
        theta: params.theta,
        gamma_in: params.gamma_in,
        gamma_out: params.gamma_out,
        geometry,
        r_e1_bound: r_e1_bound(&params, &geometry),
        target_post_invdm_ber: cfg.target_post_invdm_ber,
        required_post_fec_ber: required_post_fec_ber(&params, &geometry, cfg.target_post_invdm_ber),
    };
    let (gi, go) = compute_gammas(&geometry);
    println!("matcher          {}", report.matcher);
    println!(
        "alpha            {:.3}{}",
        report.alpha,
        if measured { " (measured)" } else { "" }
    );
    println!("theta            {}", report.theta);
    println!(
        "gamma_in/out     {:.4} / {:.4} (geometry {gi:.4} / {go:.4})",
        params.gamma_in, params.gamma_out
    );
    println!("r_E1 bound       {:.3}", report.r_e1_bound);
    match report.required_post_fec_ber {
        Some(e) => println!(
            "post-FEC BER for post-invDM {:.0e}: {e:.3e}",
            cfg.target_post_invdm_ber
        ),
        None => println!(
            "post-invDM target {:.0e} not reachable",
            cfg.target_post_invdm_ber
        ),
    }
    write_csv(&out_path(out_dir, "bounds.csv")?, header, &table)?;
    write_json(
        &out_path(out_dir, "bounds.json")?,
        header,
        &report,
        Some(&table),
    )
}

#[derive(Serialize)]
struct ShapeReport {
    kind: &'static str,
    amplitude_pmf: Vec<f64>,
    energy_2d: f64,
    entropy_2d: f64,
    beta: f64,
    rate_loss: f64,
    gain_db: f64,
    lambda: Option<f64>,
}

fn shape_report(shape: &ShapeSpec, base: &Path) -> Result<(ShapeReport, AmplitudeLabeling)> {
    let from_dm = |dm: DmSpec| -> Result<(ShapeReport, AmplitudeLabeling)> {
        let m = need_matcher(&dm, base)?;
        let s = m.summary()?;
        let lab = AmplitudeLabeling::reflected_gray(m.amplitude_bits())?;
        Ok((
            ShapeReport {
                kind: s.kind,
                amplitude_pmf: s.amplitude_pmf,
                energy_2d: s.energy_2d,
                entropy_2d: s.entropy_2d,
                beta: s.beta,
                rate_loss: s.rate_loss,
                gain_db: s.gain_db,
                lambda: None,
            },
            lab,
        ))
    };
    let unshaped = |kind: &'static str,
                    pmf: Pmf<f64>,
                    bits: u32,
                    lambda: Option<f64>|
     -> Result<(ShapeReport, AmplitudeLabeling)> {
        let alphabet = AmplitudeAlphabet::new(bits)?;
        let energy_2d = 2.0 * pmf_energy(&pmf, &alphabet);
        let entropy_2d = pmf.entropy_2d();
        Ok((
            ShapeReport {
                kind,
                amplitude_pmf: pmf.probs().to_vec(),
                energy_2d,
                entropy_2d,
                beta: entropy_2d,
                rate_loss: 0.0,
                gain_db: constellation_gain_db(entropy_2d, energy_2d, 2.0),
                lambda,
            },
            AmplitudeLabeling::reflected_gray(bits)?,
        ))
    };
    match shape.clone() {
        ShapeSpec::Hidm { tree } => from_dm(DmSpec::Hidm { tree }),
        ShapeSpec::Ccdm {
            composition,
            amplitude_bits,
            input_bits,
        } => from_dm(DmSpec::Ccdm {
            composition,
            amplitude_bits,
            input_bits,
        }),
        ShapeSpec::Mb {
            lambda,
            entropy_2d,
            amplitude_bits,
        } => {
            let alphabet = AmplitudeAlphabet::new(amplitude_bits)?;
            let lambda = match (lambda, entropy_2d) {
                (Some(l), None) => l,
                (None, Some(h)) => mb_lambda_for(MbTarget::Entropy2d(h), &alphabet)?,
                _ => bail!("MB shape needs exactly one of lambda and entropy_2d"),
            };
            if !(lambda >= 0.0) {
                bail!("lambda must be non-negative");
            }
            unshaped(
                "mb",
                mb_pmf(lambda, &alphabet),
                amplitude_bits,
                Some(lambda),
            )
        }
        ShapeSpec::Uniform { amplitude_bits } => unshaped(
            "uniform",
            Pmf::uniform(1 << amplitude_bits),
            amplitude_bits,
            None,
        ),
    }
}

pub fn metrics(
    cfg: &MetricsSection,
    base: &Path,
    seed: u64,
    out_dir: &Path,
    header: &Header,
) -> Result<()> {
    let (report, labeling) = shape_report(&cfg.shape, base)?;
    println!("shape            {}", report.kind);
    if let Some(l) = report.lambda {
        println!("lambda           {l:.6}");
    }
    println!("E (2D)           {:.4}", report.energy_2d);
    println!("2H(X)            {:.4}", report.entropy_2d);
    println!("beta             {:.5}", report.beta);
    println!("rate loss        {:.4} bits/2D", report.rate_loss);
    println!("gain             {:.4} dB", report.gain_db);
    let pmf = Pmf::new(report.amplitude_pmf.clone())?;
    let mut table = Table::new(&["snr_db", "air_bmd", "std_err"]);
    for &snr in &cfg.snr_db {
        let est = air_bmd(
            &pmf,
            &labeling,
            snr,
            EstimatorConfig {
                samples: cfg.samples,
                seed,
            },
        )?;
        println!(
            "AIR at {snr:6.2} dB  {:.4} +- {:.4}",
            est.value, est.std_err
        );
        table.push(vec![Some(snr), Some(est.value), Some(est.std_err)]);
    }
    write_csv(&out_path(out_dir, "metrics.csv")?, header, &table)?;
    write_json(
        &out_path(out_dir, "metrics.json")?,
        header,
        &report,
        Some(&table),
    )
}

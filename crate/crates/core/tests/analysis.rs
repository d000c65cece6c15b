use pas_core::analysis::*;
use pas_core::bundled::{ccdm_reference, example_codec, hidm_reference};
use pas_core::Matcher;
use proptest::prelude::*;

mod common;

use common::{bits_of, scan_decode};

#[test]
fn example_exhaustive_alpha_matches_scan_oracle() {
    let codec = example_codec();
    let mut errors = 0u64;
    for v in 0..1u64 << 11 {
        let info = bits_of(v, 11);
        let word = codec.encode(&info).unwrap();
        for p in 0..16 {
            let mut bad = word.clone();
            bad[p] ^= 1;
            let back = scan_decode(&codec, &bad);
            assert_eq!(back, codec.decode(&bad).unwrap(), "input {v} position {p}");
            errors += back.iter().zip(&info).filter(|(a, b)| a != b).count() as u64;
        }
    }
    let r = exhaustive_single_error(&Matcher::from(codec)).unwrap();
    assert_eq!(r.bit_errors, errors);
    assert_eq!(r.trials, 16 << 11);
    // repeated runs agree exactly
    assert_eq!(
        exhaustive_single_error(&Matcher::from(example_codec())).unwrap(),
        r
    );
}

#[test]
fn reference_tree_agrees_with_scan_oracle_on_random_errors() {
    let codec = hidm_reference();
    let dm = Matcher::from(codec.clone());
    for t in 0..20u64 {
        let info: Vec<u8> = (0..dm.input_bits())
            .map(|i| ((i as u64 * 7 + t * 13) % 3 == 0) as u8)
            .collect();
        let mut word = dm.encode(&info).unwrap();
        word[(t as usize * 37) % 640] ^= 1;
        word[(t as usize * 101 + 5) % 640] ^= 1;
        assert_eq!(scan_decode(&codec, &word), dm.decode(&word).unwrap());
    }
}

#[test]
fn ccdm_single_error_destroys_half_the_word() {
    let dm = Matcher::from(ccdm_reference());
    let r = error_insertion_test(&dm, 1, 1000, 11).unwrap();
    assert_eq!(r.input_bits, 1014);
    assert!((r.ber() - 0.5).abs() <= 0.02, "ber {}", r.ber());
    assert!(
        (r.alpha() / 507.0 - 1.0).abs() <= 0.05,
        "alpha {}",
        r.alpha()
    );
}

#[test]
fn ccdm_ber_flat_in_error_count() {
    let dm = Matcher::from(ccdm_reference());
    for n in (1..=10).filter(|&n| n != 2) {
        let r = error_insertion_test(&dm, n, 1000, 100 + n as u64).unwrap();
        assert!((r.ber() - 0.5).abs() <= 0.02, "n {n}: {}", r.ber());
    }
}

fn pattern_counts(shaped: &[u8]) -> [usize; 4] {
    let mut c = [0; 4];
    for p in shaped.chunks(2) {
        c[(p[0] * 2 + p[1]) as usize] += 1;
    }
    c
}

#[test]
fn ccdm_double_errors_split_by_composition() {
    // two flips can swap a pair of classes and land on a valid word, which
    // then differs only in the low-order rank bits
    use rand::{Rng, SeedableRng};
    let codec = ccdm_reference();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let (mut changed, mut kept) = ((0u64, 0u64), (0u64, 0u64));
    for _ in 0..2000 {
        let info: Vec<u8> = (0..1014).map(|_| rng.random::<bool>() as u8).collect();
        let word = codec.encode_bits(&info).unwrap();
        let mut bad = word.clone();
        let p = rand::seq::index::sample(&mut rng, 1280, 2);
        for i in p.iter() {
            bad[i] ^= 1;
        }
        let errs = codec
            .decode_bits(&bad)
            .unwrap()
            .iter()
            .zip(&info)
            .filter(|(a, b)| a != b)
            .count() as u64;
        let slot = if pattern_counts(&bad) == pattern_counts(&word) {
            &mut kept
        } else {
            &mut changed
        };
        slot.0 += errs;
        slot.1 += 1014;
    }
    let ber_changed = changed.0 as f64 / changed.1 as f64;
    let ber_kept = kept.0 as f64 / kept.1 as f64;
    assert!((ber_changed - 0.5).abs() <= 0.02, "{ber_changed}");
    assert!(kept.1 > 0 && ber_kept < 0.45, "{ber_kept}");
}

#[test]
fn reference_tree_error_spreading() {
    let dm = Matcher::from(hidm_reference());
    let r = error_insertion_test(&dm, 1, 20_000, 7).unwrap();
    // regression values for the bundled tree; the reference anchors are 0.027 / 13.4
    assert!((r.alpha() - 12.86).abs() < 0.4, "alpha {}", r.alpha());
    assert!((r.ber() - 0.0254).abs() < 0.001, "ber {}", r.ber());
    let mut last = r.ber();
    for n in [2, 5, 10] {
        let b = error_insertion_test(&dm, n, 5_000, 7).unwrap().ber();
        assert!(b > last, "n {n}: {b} <= {last}");
        last = b;
    }
    assert!(last < 0.5);
}

#[test]
fn insertion_is_reproducible_and_checks_error_count() {
    let dm = Matcher::from(example_codec());
    let a = error_insertion_test(&dm, 3, 500, 9).unwrap();
    assert_eq!(a, error_insertion_test(&dm, 3, 500, 9).unwrap());
    assert!(error_insertion_test(&dm, 16, 10, 0).is_ok());
    assert!(error_insertion_test(&dm, 17, 10, 0).is_err());
    assert!(error_insertion_test(&dm, 0, 10, 0).is_err());
}

fn ccdm_geometry() -> Geometry {
    Geometry::pas(1014, 640, 4, 8, 5.0 / 6.0, 54000)
}

fn hidm_geometry() -> Geometry {
    Geometry::pas(507, 320, 4, 8, 5.0 / 6.0, 54000)
}

/// Slope of the total bound in the linear region, written out by hand.
fn slope(alpha: f64, nsb: f64, ns: f64, gamma_in: f64) -> f64 {
    gamma_in * alpha * 4.0 * ns / 2.0 / nsb + 1.0 - gamma_in
}

#[test]
fn r_e1_bounds() {
    let c = r_e1_bound(&SingleErrorParams::CCDM_REFERENCE, &ccdm_geometry());
    let h = r_e1_bound(&SingleErrorParams::HIDM_REFERENCE, &hidm_geometry());
    assert!((c - slope(507.0, 1014.0, 640.0, 0.543)).abs() < 1e-9);
    assert!((h - slope(13.4, 507.0, 320.0, 0.543)).abs() < 1e-9);
    assert!((c - 348.0).abs() <= 0.5, "{c}");
    assert!((h - 9.7).abs() <= 0.5, "{h}");
}

#[test]
fn required_post_fec_ber_for_1e_minus_15() {
    let c =
        required_post_fec_ber(&SingleErrorParams::CCDM_REFERENCE, &ccdm_geometry(), 1e-15).unwrap();
    let h =
        required_post_fec_ber(&SingleErrorParams::HIDM_REFERENCE, &hidm_geometry(), 1e-15).unwrap();
    assert!((c / (1e-15 / slope(507.0, 1014.0, 640.0, 0.543)) - 1.0).abs() < 1e-9);
    assert!((c / 3e-18 - 1.0).abs() <= 0.2, "{c:e}");
    assert!((h / 1e-16 - 1.0).abs() <= 0.2, "{h:e}");
}

#[test]
fn bber_bound_ratio_between_matchers() {
    // ratio of the two linear-region BBER bounds follows from theta alone
    let e = 1e-12;
    let (c, _) = bound_bber(
        &SingleErrorParams::CCDM_REFERENCE,
        &ccdm_geometry(),
        e,
        130560.0,
    );
    let (h, _) = bound_bber(
        &SingleErrorParams::HIDM_REFERENCE,
        &hidm_geometry(),
        e,
        130560.0,
    );
    assert!((c / h - 12.25).abs() < 1e-9, "{}", c / h);
    let g = Geometry::bicm(7, 5.0 / 6.0, 54000);
    let (b, f) = bound_bber(&SingleErrorParams::BICM, &g, e, 130560.0);
    assert!((f - 54000.0 * e).abs() < 1e-20);
    assert!((b - 130560.0 / 54000.0 * f).abs() < 1e-18);
}

#[test]
fn gammas_from_measured_alpha() {
    let p = SingleErrorParams::from_geometry(12.86, 2.0, &hidm_geometry());
    assert!((p.gamma_in - 0.543).abs() < 5e-4);
    assert!((p.gamma_out - 0.6).abs() < 1e-12);
}

proptest! {
    #[test]
    fn bounds_are_monotone_and_bounded(
        alpha in 0.0f64..1000.0,
        theta in 1.0f64..40.0,
        a in -20.0f64..0.0,
        b in -20.0f64..0.0,
    ) {
        let g = ccdm_geometry();
        let p = SingleErrorParams::from_geometry(alpha, theta, &g);
        prop_assert!((0.0..=1.0).contains(&p.gamma_in) && (0.0..=1.0).contains(&p.gamma_out));
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (e0, e1) = (10f64.powf(lo), 10f64.powf(hi));
        let (s0, t0) = bound_post_invdm_ber(&p, &g, e0);
        let (s1, t1) = bound_post_invdm_ber(&p, &g, e1);
        prop_assert!(s0 <= s1 && t0 <= t1 && s1 <= 0.5 && t1 <= 1.0);
        let (b0, f0) = bound_bber(&p, &g, e0, 130560.0);
        let (b1, f1) = bound_bber(&p, &g, e1, 130560.0);
        prop_assert!(b0 <= b1 && f0 <= f1 && b1 <= 1.0 && f1 <= 1.0);
        prop_assert!(t0 >= e0 * (1.0 - p.gamma_in) - 1e-300);
    }
}

//! Data files compiled into the library.

use crate::ccdm::{CcdmCodec, Composition};
use crate::hidm::{HidmCodec, HidmFile};

/// The 3-layer 32-PAM example tree with its reference table contents.
pub const EXAMPLE_TREE: &str = include_str!("../data/pam32_example.tree");

/// The rate-5/6 (2160, 1800) IRA code.
pub const IRA_2160_1800_ALIST: &str = include_str!("../data/ira_2160_1800.alist");

/// The seven-layer 16-PAM reference tree (layout only).
pub const HIDM_REF_TREE: &str = include_str!("../data/hidm_ref.tree");

/// Codec for [`EXAMPLE_TREE`] using the shipped tables.
pub fn example_codec() -> HidmCodec {
    HidmFile::parse(EXAMPLE_TREE)
        .and_then(HidmFile::into_codec)
        .expect("bundled tree is valid")
}

/// Codec for [`HIDM_REF_TREE`].
pub fn hidm_reference() -> HidmCodec {
    HidmFile::parse(HIDM_REF_TREE)
        .and_then(HidmFile::into_codec)
        .expect("bundled tree is valid")
}

/// CCDM for 640 16-PAM symbols over the four amplitude pairs, with the
/// composition (318, 208, 89, 25) and 1014 input bits.
pub fn ccdm_reference() -> CcdmCodec {
    let comp = Composition::new(vec![318, 208, 89, 25]).expect("valid composition");
    CcdmCodec::new(comp, 3, Some(1014)).expect("1014 bits fit")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn reference_tree_dimensions() {
        let c = hidm_reference();
        assert_eq!(c.input_bits(), 507);
        assert_eq!(c.output_bits(), 640);
        assert_eq!(c.pam_symbols(), 320);
        assert_eq!(c.spec().lut_counts(), vec![64, 32, 16, 8, 4, 2, 1]);
        let (dm, inv) = c.storage_bits();
        assert!(dm <= 2_100_000 && inv <= 3_800_000);
    }

    #[test]
    fn reference_tree_energy() {
        let e = hidm_reference().expected_energy_1d().to_f64().unwrap() * 2.0;
        assert!((e - 74.70).abs() < 0.35, "E2D = {e}");
    }
}

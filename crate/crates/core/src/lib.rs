//! Reverse-concatenation probabilistic amplitude shaping.
//!
//! Distribution matchers ([`hidm`], [`ccdm`]) turn uniform bits into shaped
//! PAM amplitudes; [`fec`] and [`pipeline`] run them through an LDPC-coded
//! AWGN link; [`analysis`] estimates how single channel errors spread after
//! dematching.

pub mod analysis;
pub mod bundled;
pub mod ccdm;
pub mod constellation;
pub mod dm;
pub mod error;
pub mod fec;
pub mod hidm;
pub mod metrics;
pub mod pipeline;
pub mod scalar;

pub use ccdm::{CcdmCodec, Composition};
pub use constellation::{AmplitudeAlphabet, AmplitudeLabeling, MbTarget, Pmf};
pub use dm::{Matcher, MatcherSummary};
pub use error::{Error, Result};
pub use hidm::{HidmCodec, HidmFile, HidmTables, HidmTreeSpec, LayerSpec};
pub use scalar::{RealScalar, Scalar};

pub use num_rational::BigRational;

/// Double-precision PMF.
pub type Pmf64 = Pmf<f64>;
/// Single-precision PMF.
pub type Pmf32 = Pmf<f32>;
/// Exact PMF.
pub type RationalPmf = Pmf<BigRational>;
/// Double-precision rate bookkeeping.
pub type ShapingRates64 = metrics::ShapingRates<f64>;

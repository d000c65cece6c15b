//! Reverse-concatenation PAS link simulation.

pub mod frame;
pub mod modem;
pub mod sim;

pub use frame::{DmGeometry, FramePlan, Layout, Slot};
pub use modem::{awgn, noise_sigma, quantize_llr, Constellation, InputQuantizer, SoftDemapper};
pub use sim::{count_bber, required_snr, Link, PointResult, SimConfig, SimResult, OTUC_BLOCK_BITS};

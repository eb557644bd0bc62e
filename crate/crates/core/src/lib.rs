//! Simulation library for over-the-air timing transfer and factory-side
//! PTP distribution.
//!
//! The library models the full chain a wireless timing gateway sees:
//!
//! 1. [`nr`] — generation of the length-127 synchronization sequence, OFDM
//!    modulation onto a 4096-point grid and the matched-filter reference
//!    template, for sub-carrier spacings of 15/30/60 kHz.
//! 2. [`channel`] — propagation delay, tapped-delay-line multipath fading
//!    (bundled TDL-C profile from 3GPP TR 38.901), additive noise and a
//!    log-distance SNR model.
//! 3. [`estimator`] — arrival-delay estimation by cross-correlation peak
//!    detection, timing-error computation and failure classification.
//! 4. [`montecarlo`] — seeded trial ensembles, percentile statistics, SNR
//!    anchor calibration and the SCS×range result grid.
//! 5. [`ptp`] — a boundary-clock model of the gateway redistributing time
//!    to factory nodes link-by-link (in-band) or by direct broadcast
//!    (out-of-band).
//! 6. [`budget`] — standardized synchronicity requirements and end-to-end
//!    error evaluation against them.
//!
//! All randomness is explicit: every operation that draws random numbers
//! takes a seed, and ensemble results are bitwise reproducible for a fixed
//! master seed regardless of worker count.

pub mod budget;
pub mod channel;
pub mod estimator;
pub mod montecarlo;
pub mod nr;
pub mod ptp;

mod error;
mod fft;
mod rng;

pub use error::Error;
pub use rng::derive_seed;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

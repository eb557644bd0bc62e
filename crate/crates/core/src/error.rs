use thiserror::Error;

/// Errors surfaced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid N_ID2 {0}: must be 0, 1 or 2")]
    InvalidNId2(u32),

    #[error("invalid sub-carrier spacing {0} kHz: supported values are 15, 30 and 60")]
    InvalidScs(u32),

    #[error("distance must be nonnegative, got {0} m")]
    NegativeDistance(f64),

    #[error("distance must be positive, got {0} m")]
    NonPositiveDistance(f64),

    #[error("unknown tap profile \"{0}\"")]
    UnknownProfile(String),

    #[error("malformed tap profile \"{name}\": {reason}")]
    MalformedProfile { name: String, reason: String },

    #[error("received waveform ({rx} samples) is shorter than the template ({template} samples)")]
    RxShorterThanTemplate { rx: usize, template: usize },

    #[error("sample-rate mismatch: rx at {rx_hz} Hz, template at {template_hz} Hz")]
    SampleRateMismatch { rx_hz: f64, template_hz: f64 },

    #[error("delay must be nonnegative, got {0} s")]
    NegativeDelay(f64),

    #[error("unknown synchronicity accuracy level {0}: defined levels are 1-4")]
    UnknownBudgetLevel(u8),

    #[error("experiment needs at least one trial")]
    NoTrials,

    #[error("in-band distribution requires a nonempty chain")]
    EmptyChain,

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("bit streams must hold at least one bit")]
    EmptyStream,

    #[error("stream lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("select stream for {inputs} input bits must hold {expected} bits, got {got}")]
    SelectLength {
        inputs: usize,
        expected: usize,
        got: usize,
    },

    #[error("flip rate {0} is outside [0, 0.5]")]
    InvalidFlipRate(f64),

    #[error("shared-mask flips act on stream pairs; use inject_flips_pair")]
    SharedMaskNeedsPair,

    #[error("MUX works on three streams; use gate_mux")]
    MuxNeedsSelect,

    #[error("MUX prediction requires a select probability")]
    MissingSelectProbability,

    #[error("no closed-form MUX output when the select is correlated with the inputs")]
    CorrelatedMuxSelect,

    #[error("{name} must be {requirement}, got {value}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("no finite voltage maps to probability {0}; targets must lie strictly inside (0, 1)")]
    UnreachableTarget(f64),

    #[error("image must be at least 2x2 for edge detection, got {width}x{height}")]
    ImageTooSmall { width: usize, height: usize },

    #[error("image dimensions differ ({0}x{1} vs {2}x{3})")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("image dimensions must be positive, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },

    #[error("pixel buffer holds {got} bytes, expected {expected} for {width}x{height}")]
    PixelCount {
        width: usize,
        height: usize,
        expected: usize,
        got: usize,
    },

    #[error(
        "unsupported image format {magic:?} at byte {offset}; only P2 and P5 grayscale are read"
    )]
    UnsupportedFormat { offset: usize, magic: String },

    #[error("malformed PGM header at byte {offset}: {reason}")]
    MalformedHeader { offset: usize, reason: &'static str },

    #[error("unsupported maxval {maxval} at byte {offset}; only 255 is handled")]
    UnsupportedMaxval { offset: usize, maxval: u64 },

    #[error("pixel value {value} at byte {offset} exceeds 255")]
    PixelOutOfRange { offset: usize, value: u64 },

    #[error("image data ends early at byte {offset}")]
    TruncatedImage { offset: usize },

    #[error("malformed stream data at byte {offset}: {reason}")]
    MalformedStream { offset: usize, reason: &'static str },

    #[error("stream data ends early at byte {offset}")]
    TruncatedStream { offset: usize },

    #[error("frame sequence is empty")]
    EmptySequence,

    #[error("frame {index} is {width}x{height}, expected {expected_width}x{expected_height}")]
    FrameDimensionMismatch {
        index: usize,
        width: usize,
        height: usize,
        expected_width: usize,
        expected_height: usize,
    },

    #[error("frame {index}: {source}")]
    Frame {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable tag for each variant, used by callers that
    /// report errors as structured output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidProbability(_) => "invalid_probability",
            Error::EmptyStream => "empty_stream",
            Error::LengthMismatch { .. } => "length_mismatch",
            Error::SelectLength { .. } => "select_length",
            Error::InvalidFlipRate(_) => "invalid_flip_rate",
            Error::SharedMaskNeedsPair => "shared_mask_needs_pair",
            Error::MuxNeedsSelect => "mux_needs_select",
            Error::MissingSelectProbability => "missing_select_probability",
            Error::CorrelatedMuxSelect => "correlated_mux_select",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::UnreachableTarget(_) => "unreachable_target",
            Error::ImageTooSmall { .. } => "image_too_small",
            Error::DimensionMismatch(..) => "dimension_mismatch",
            Error::EmptyImage { .. } => "empty_image",
            Error::PixelCount { .. } => "pixel_count",
            Error::UnsupportedFormat { .. } => "unsupported_format",
            Error::MalformedHeader { .. } => "malformed_header",
            Error::UnsupportedMaxval { .. } => "unsupported_maxval",
            Error::PixelOutOfRange { .. } => "pixel_out_of_range",
            Error::TruncatedImage { .. } => "truncated_image",
            Error::MalformedStream { .. } => "malformed_stream",
            Error::TruncatedStream { .. } => "truncated_stream",
            Error::EmptySequence => "empty_sequence",
            Error::FrameDimensionMismatch { .. } => "frame_dimension_mismatch",
            Error::Frame { source, .. } => source.kind(),
            Error::Io(_) => "io",
        }
    }
}

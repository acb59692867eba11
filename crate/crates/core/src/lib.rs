//! Stochastic computing on correlation-controlled bitstreams, with a
//! memristor entropy-source model and an image-processing pipeline built
//! on top.
//!
//! The crate is organized bottom-up:
//!
//! * [`entropy`]: seeded, named randomness substreams (order-independent
//!   determinism for everything above);
//! * [`bitstream`]: packed unipolar streams, correlation-controlled pair
//!   generation, cross-correlation measurement, bit-flip fault injection;
//! * [`logic`]: stochastic AND/OR/XOR/MUX with closed-form output oracles
//!   per correlation mode;
//! * [`device`]: the memristor encoder model (fitted sigmoid transfers, a
//!   drifting switching threshold, hardware-flavored stream samplers);
//! * [`image`] / [`stream_io`]: PGM images and stream files;
//! * [`roberts`]: exact and stochastic Roberts cross edge detection;
//! * [`metrics`]: SSIM and PSNR against the exact result;
//! * [`sequence`]: frame-sequence runs and reproducible reports.

pub mod bitstream;
pub mod device;
pub mod entropy;
pub mod error;
pub mod image;
pub mod logic;
pub mod metrics;
pub mod roberts;
pub mod sequence;
pub mod stream_io;

pub use bitstream::{
    encode, encode_pair, inject_flips, inject_flips_pair, scc, BitStream, CorrelationMode,
    FlipMode, FlipSpec,
};
pub use device::{
    iid_trajectory, ou_step, ou_trajectory, p_negative, p_positive, p_uncorrelated,
    sne_sample_pair, sne_sample_uncorrelated, v_in_for, v_ref_for_positive, DeviceState,
    MemristorParams, SneMode, SneTransfer,
};
pub use entropy::EntropySource;
pub use error::{Error, Result};
pub use image::{pgm_from_bytes, pgm_to_bytes, read_pgm, write_pgm, GrayImage};
pub use logic::{
    gate_apply, gate_mux, oracle, verify_gate, verify_mux, GateKind, VerificationReport,
};
pub use metrics::{psnr, ssim, Psnr, SsimResult};
pub use roberts::{
    binary_reference_with_flips, gradient_to_image, normalize, reference_roberts,
    stochastic_roberts, stochastic_roberts_with, DetectorConfig, GradientMap, ProbabilityMap,
    StreamSource,
};
pub use sequence::{process_sequence, ConfigEcho, FrameMetrics, FrameSequence, RunReport};
pub use stream_io::{
    read_streams, streams_from_bytes, streams_to_bytes, write_streams, StreamFormat,
};

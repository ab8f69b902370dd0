//! Majority-logic decoding of non-binary LDPC codes over GF(2^r).
//!
//! The crate provides finite-field tables, a sparse parity-check matrix
//! model, systematic encoding, the iterative reliability-based decoder family
//! (accumulating and non-accumulating soft/hard updates plus re-selection),
//! and exact operation accounting with closed-form complexity predictions.
//!
//! Everything is `no_std` + `alloc`; channel modelling, file formats, and the
//! Monte-Carlo driver live in the companion `mlgd-sim` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod decoder;
pub mod encode;
pub mod gf;
pub mod matrix;
pub mod metrics;
pub mod reference;

pub use decoder::{
    channel_reliability, clip_row, extrinsic_sigma, hard_decisions_from_quantized, DecodeOutcome,
    DecodeStatus, Decoder, DecoderConfig, DecoderInput, StepResult, Variant,
};
pub use encode::{systematic_encode, SystematicEncoder};
pub use gf::{Field, FieldError, Gf};
pub use matrix::{generate_regular, MatrixError, ParityCheckMatrix};
pub use metrics::{
    classify_failure, predict, CodeDims, DistanceClass, FailureClass, OpCounters, OpCounts, Phase,
};

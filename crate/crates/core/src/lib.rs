//! Robust adaptive beamforming with shrinkage-based mismatch estimation.
//!
//! The crate provides:
//!
//! * a uniform-linear-array simulator with coherent and incoherent local
//!   scattering of the desired signal ([`array_model`]);
//! * oracle-approximating shrinkage of the sample correlation vector and the
//!   sample covariance matrix ([`shrinkage`]);
//! * the per-snapshot robust beamformer that combines both into a steering
//!   estimate and an interference-plus-noise covariance estimate
//!   ([`locsme`]), together with SMI and clairvoyant MVDR references
//!   ([`mvdr`]);
//! * a deterministic Monte-Carlo SINR harness ([`harness`]) and the
//!   configuration/output layer behind the `locsme` binary ([`config`],
//!   [`output`]).
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the common double-precision instantiations.

pub mod array_model;
pub mod config;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod locsme;
pub mod mvdr;
pub mod output;
pub mod scalar;
pub mod shrinkage;

pub use array_model::{
    generate_snapshots, realize_mismatch, sector_matrix, steering_vector, AngleDistribution,
    IncoherentPower, MismatchModel, RealizedSteering, Scattering, Scenario, SnapshotBatch,
    SnapshotSource, UlaGeometry,
};
pub use error::{Error, Result};
pub use harness::{output_sinr, run_trial, sweep, Algorithm, SinrCurve, SweepAxis, TrialResult};
pub use linalg::{CMat, CVec};
pub use locsme::{
    build_inc, estimate_power, estimate_steering, LocsmeBeamformer, LocsmeConfig, ProjectionOperator,
};
pub use mvdr::{mvdr_weights, optimal_weights, smi_weights};
pub use scalar::Real;
pub use shrinkage::{OasMatrixState, OasVectorState};

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;

pub type CVec64 = CVec<f64>;
pub type CMat64 = CMat<f64>;
pub type CVec32 = CVec<f32>;
pub type CMat32 = CMat<f32>;

pub type Locsme64 = LocsmeBeamformer<f64>;
pub type Locsme32 = LocsmeBeamformer<f32>;
pub type Projection64 = ProjectionOperator<f64>;
pub type OasVector64 = OasVectorState<f64>;
pub type OasMatrix64 = OasMatrixState<f64>;
pub type SnapshotBatch64 = SnapshotBatch<f64>;

//! Desk-scale simulator and mission planner for satellite optical quantum links.
//!
//! The crate is organised around the pieces of a space-to-ground quantum
//! communication mission:
//!
//! - [`geometry`] — satellite pass geometry over ground stations (elevation,
//!   slant range, angular dynamics, constellation pass statistics).
//! - [`link`] — free-space optical link budgets: Gaussian-beam diffraction,
//!   turbulence broadening, pointing jitter, parametric atmosphere, and the
//!   fiber-versus-free-space comparison.
//! - [`photonics`] — statistical models of weak-coherent-pulse and
//!   photon-pair sources, single-photon detectors, time synchronization, and
//!   coincidence counting.
//! - [`qkd`] — protocol simulation and key post-processing: decoy-state
//!   BB84, BBM92 sifting, decoy bounds, error correction, privacy
//!   amplification, one-time-pad encryption, and trusted-relay exchange.
//! - [`quantum`] — two-qubit density matrices, CHSH Bell tests, and the
//!   teleportation pipeline.
//! - [`gravity`] — the event-formalism gravitational decoherence model.
//! - [`mission`] — end-to-end scenario orchestration and canned mission
//!   presets.
//! - [`scenario`] / [`report`] — scenario-file parsing and report emission.
//!
//! Every stochastic path takes an explicit seed; identical seeds produce
//! byte-identical reports regardless of worker count.

pub mod consts;
pub mod geometry;
pub mod gravity;
pub mod link;
pub mod mission;
pub mod photonics;
pub mod qkd;
pub mod quantum;
pub mod report;
pub mod scenario;
pub mod util;

pub use geometry::{GroundStation, OrbitSpec, PassSample, PassTrack};
pub use link::{AtmosphereModel, BeamParams, LinkBudget, OpticalChain, PointingModel, TurbulenceModel};
pub use mission::{MissionKind, MissionReport, Scenario};
pub use photonics::{CountRecord, DetectorModel, SpdcSource, SyncModel, WcpSource};
pub use qkd::{DecoyStats, KeyMaterial, SecureKeyResult};
pub use quantum::TwoQubitState;



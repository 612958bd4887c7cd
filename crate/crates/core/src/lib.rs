//! Security analysis for hybrid challenge-response physical-layer
//! authentication (H-CRPLA).
//!
//! The crate computes the equivalent secret-key length of three
//! authentication mechanisms over a partially controllable channel:
//!
//! * channel-based challenge-response ([`chsec`]), where the verifier
//!   randomizes the channel amplitude frame by frame and checks the pilot
//!   estimates against it;
//! * coding-based authentication ([`cdsec`]), where a wiretap code hides a
//!   shared key from an eavesdropper with a weaker channel;
//! * the hybrid of the two ([`hybrid`]), with a grid optimizer over the pilot
//!   fraction and the lower amplitude bound.
//!
//! [`mc`] holds a seeded Monte Carlo harness that checks the analytic false
//! alarm and attack-success probabilities, and [`specfun`] the numerical
//! kernels everything above is built on.

pub mod cdsec;
pub mod chsec;
pub mod error;
pub mod hybrid;
pub mod mc;
pub mod params;
pub mod specfun;

pub use error::{Error, Result};
pub use params::{Mechanism, ParamsConfig, SecurityReport, SystemParams};

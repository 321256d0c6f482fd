//! Velocity-dependent uplink reliability and freshness for ground and
//! aerial users in Poisson cellular networks.
//!
//! The crate pairs a dominant-interferer analysis (meta distribution of the
//! conditional success probability, its joint law at two instants, the
//! correlation coefficient and the peak age of information) with a Monte
//! Carlo simulator that serves as the reference for every analytical curve.

pub mod aerial;
pub mod channel;
pub mod correlation;
pub mod distances;
pub mod error;
pub mod ground;
pub mod math;
pub mod paoi;
pub mod sim;

pub use aerial::{AerialSuccessContext, LinkPair};
pub use channel::{Environment, LinkGeometry, LinkKind, SystemParams};
pub use correlation::{Branch, JointGrid, JointModel, MobilityGrids};
pub use distances::ServingLaw;
pub use error::{Error, Result};
pub use ground::GroundSuccessContext;
pub use paoi::PaoiResult;
pub use sim::{SimConfig, Simulator, UserKind};

//! Two-parabolic-generator Möbius groups: region classification in the λ-plane,
//! explicit Schottky-type circle configurations, independent verification and
//! rendering.

pub mod builder;
pub mod classifier;
pub mod cli;
pub mod config;
pub mod error;
pub mod moebius;
pub mod nsdc;
pub mod render;
pub mod sphere;
pub mod verifier;
pub mod wire;

pub use config::{ConfigKind, SchottkyConfiguration};
pub use error::{Error, Result};
pub use moebius::{MoebiusMap, SpherePoint};
pub use sphere::GeneralizedCircle;

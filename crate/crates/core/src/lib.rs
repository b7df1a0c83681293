//! Wave packets bouncing off an infinite wall: spectral construction,
//! closed-form references, and momentum-space analysis.

pub mod acceptance;
pub mod analysis;
pub mod error;
pub mod expsum;
pub mod oracle;
pub mod quadrature;
pub mod scenario;
pub mod spectral;
pub mod types;

pub use error::{Error, Result};
pub use types::{Grid, MomentSet, PacketShape, PacketSpec, PhysicalParams, SampledField, Space};

//! Neighborhood-based swarm optimization with local and global phases.
//!
//! * [`geometry`]: vector math shared by the continuous swarm.
//! * [`optimizer`]: the continuous swarm optimizer.
//! * [`testbed`]: shifted and rotated benchmark functions and compositions.
//! * [`solar`]: PV array model and the discrete reconfiguration swarm.
//! * [`harness`]: experiment campaigns, statistics, configuration and CSV output.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod optimizer;
pub mod solar;
pub mod testbed;

pub use error::{Error, Result};

//! Energy-aware planning of big-data processing over bypass IP-over-WDM
//! core networks.

pub mod error;
pub mod model;
pub mod names;
pub mod power;
pub mod scenario;
pub mod solver;
pub mod topology;
pub mod workload;

pub use error::{Error, Result};

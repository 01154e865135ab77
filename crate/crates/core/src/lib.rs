//! Density-aware filtrations of point samples and the tools to read
//! topology off them: exact nearest-neighbor search, filtration functions
//! sampled on grids, cubical persistent homology, bottleneck distances,
//! bootstrap confidence radii and seeded synthetic datasets.

pub mod cubical;
pub mod diagrams;
pub mod error;
pub mod filtration;
pub mod inference;
pub mod io;
pub mod neighbors;
pub mod synthgen;

pub use error::{Error, ErrorClass, Result};

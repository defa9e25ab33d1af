//! Discrete-time anyonic quantum walks over random island backgrounds.
//!
//! The walker hops on a line of sites separated by islands of static anyons.
//! Abelian anyons imprint phases; Ising anyons act on a fusion space whose
//! trace is a link invariant of the pair of walker histories.

pub mod abelian;
pub mod distribution;
pub mod error;
pub mod gf2;
pub mod ising;
pub mod pathsum;
pub mod scattering;
pub mod seed;
pub mod stats;
pub mod topo;
pub mod walk;

pub use abelian::{AbelianStatistics, McAverage, TemporalNoise};
pub use distribution::{OccupationDistribution, SpatialDistribution};
pub use error::{Error, Result};
pub use stats::{FitResult, VariancePoint};
pub use topo::bracket::{BracketConvention, BracketMethod};
pub use topo::braid::{BraidWord, ClosedLink, Crossing};
pub use walk::{CoinHistory, IslandConfig, LinkingProfile, PathPair, WalkGeometry};

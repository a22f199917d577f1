//! Choice modeling with comparison-driven no-purchase behavior: exact chain
//! computations, rank-1 and rank-K closed forms, assortment optimization,
//! maximum-likelihood estimation and simulation, plus the CLI that ties them
//! together.

pub mod assortment;
pub mod chain;
pub mod cli;
pub mod error;
pub mod estimation;
pub mod features;
pub mod gmnl;
pub mod io;
pub mod lowrank;
pub mod math;
pub mod simulate;

pub use chain::{Assortment, ChoiceProbabilities, MarkovChainModel, StoppingRule};
pub use error::{ModelError, Result};
pub use features::FeatureMatrix;
pub use gmnl::GmnlModel;
pub use lowrank::LowRankModel;

//! Euclidean latent space item response model (LSIRM) for roll-call voting.
//!
//! Legislators and bills are embedded jointly in a low-dimensional Euclidean
//! space; the probability of a Yea vote follows a logistic model with a
//! legislator propensity, a bill popularity, and a penalty proportional to
//! the legislator-bill distance. Because the embedding uses a true metric,
//! the fitted positions support distance-based analysis (clustering,
//! dispersion, coalition geometry) that inner-product ideal point models do
//! not.
//!
//! The crate provides:
//!
//! * [`model`] — the data model and exact log-likelihood / log-prior /
//!   log-posterior of the model;
//! * [`sampler`] — a Metropolis-Hastings-within-Gibbs sampler with
//!   missing-vote imputation and a conjugate variance update;
//! * [`identify`] — post-processing that removes the rotational, reflective
//!   and translational indeterminacy of the embedding;
//! * [`simgen`] — seeded generators for the synthetic voting scenarios used
//!   in the evaluation suite;
//! * [`metrics`] — silhouette, classification accuracy, APRE, proximity
//!   strength summaries, and a triangle-inequality audit of alternative
//!   distance forms;
//! * [`birt`] — a two-dimensional Bayesian probit IRT baseline;
//! * [`io`] — ingestion of long-format vote records, lopsided-vote
//!   filtering, and all file artifacts (matrix CSV, chain CSV, aligned
//!   coordinates, reports, plots).

pub mod birt;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod identify;
pub mod io;
pub mod metrics;
pub mod model;
pub mod rng;
pub mod sampler;
pub mod simgen;

pub use data::{Vote, VoteMatrix};
pub use error::{Error, Result};
pub use model::{Hyperparams, ModelState, Positions};
pub use sampler::{ChainDraws, SamplerConfig};

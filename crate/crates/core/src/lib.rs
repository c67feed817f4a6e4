//! Topic modelling for short texts: preprocessing, collapsed Gibbs LDA with
//! a naive and a SparseLDA sampler, coherence-driven choice of k, topic
//! diagnostics and LDA-smoothed query-likelihood retrieval.

pub mod corpus;
pub mod diagnostics;
pub mod error;
pub mod retrieval;
pub mod sampler;
pub mod selection;

pub use error::{Error, Result};

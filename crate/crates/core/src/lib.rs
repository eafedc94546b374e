//! Continuous-time quantum walks on graphs.
//!
//! The walk on a graph with adjacency matrix `A` has transition matrix
//! `U(t) = exp(itA)`. Everything here is computed from the spectral
//! decomposition `A = Σ θ_r E_r`:
//!
//! - [`graph`]: weighted graphs, named families, edge-list I/O.
//! - [`spectra`]: distinct eigenvalues and spectral idempotents.
//! - [`walk`]: `U(t)`, the mixing matrix `M(t) = U(t) ∘ U(-t)`, fidelities.
//! - [`transfer`]: strong cospectrality and perfect state transfer.
//! - [`quotient`]: equitable and weighted partitions, quotient matrices.
//! - [`scheme`]: distance-regular graphs, eigenmatrices, uniform mixing.
//! - [`avgmix`]: average mixing matrices and their factorizations.

pub mod avgmix;
pub mod error;
pub mod graph;
mod search;
pub mod quotient;
pub mod scheme;
pub mod ser;
pub mod spectra;
pub mod transfer;
pub mod walk;

pub use error::{Error, Result};
pub use nalgebra;
pub use num_complex;
pub use graph::{Family, Graph, GraphStats, VertexId, Weight};
pub use spectra::{decompose, SpectralDecomposition};
pub use transfer::{PstResult, PstVerdict};

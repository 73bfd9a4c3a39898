//! Computable finite-dimensional C*-ternary rings.
//!
//! A C*-ternary ring is presented either as a direct sum of signed matrix
//! blocks (ternary rings of operators with triple product `xy*z`, and
//! anti-TROs with `−xy*z`) or by abstract structure constants. On top of
//! that the crate builds the standard embedding `𝒜(M)` with its linking and
//! anti-linking products, Jacobson radicals, ideals and quotients, and a
//! numeric Wedderburn isomorphism for anti-C*-algebras.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`.

pub mod embedding;
pub mod error;
pub mod ideals;
pub mod instances;
pub mod matkernel;
pub mod radical;
pub mod rng;
pub mod scalar;
pub mod ternary;
pub mod wedderburn;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type CMatrix = matkernel::Matrix<f64>;
pub type HermEigResult = matkernel::HermEigResult<f64>;
pub type TernarySpace = ternary::TernarySpace<f64>;
pub type TernaryElement = ternary::TernaryElement<f64>;
pub type SignedBlock = ternary::SignedBlock<f64>;
pub type StructureConstants = ternary::StructureConstants<f64>;
pub type StandardEmbedding = embedding::StandardEmbedding<f64>;
pub type EmbeddingElement = embedding::EmbeddingElement<f64>;
pub type AssocAlgebra = radical::AssocAlgebra<f64>;
pub type TernaryIdeal = ideals::TernaryIdeal<f64>;
pub type WedderburnSolution = wedderburn::WedderburnSolution<f64>;

pub type CMatrix32 = matkernel::Matrix<f32>;
pub type TernarySpace32 = ternary::TernarySpace<f32>;

//! Exact symbolic toolkit for free Lie algebras over the first homology of a
//! surface: symplectic expansions, tree Jacobi diagrams, Koszul homology of
//! free nilpotent Lie algebras, and the total Johnson map.

pub mod automorphism;
pub mod document;
pub mod error;
pub mod free_lie;
pub mod jacobi;
pub mod johnson;
pub mod koszul;
pub mod lincomb;
pub mod linalg;
pub mod suite;
pub mod symplectic;
pub mod tensor;

pub use error::{Error, Result};
pub use free_lie::{bch, bracket, lyndon_basis, witt_dim, Gen, GenKind, LieSeries, Word};
pub use lincomb::LinComb;
pub use linalg::{kernel_basis, rref, solve, LinearSystem, MatrixQ, Q};
pub use jacobi::{eta, eta_inverse, fission, HLieTensor, TreeCombo, TreeDiagram};
pub use johnson::{morita_mk, tau_truncated, LieAutomorphism};
pub use koszul::{boundary, capital_phi, homology_dims, HomologyClass, WedgeChain};
pub use symplectic::{construct_symplectic, verify_symplectic};
pub use tensor::{ExpansionMap, TensorSeries};

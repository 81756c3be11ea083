//! Exact computations with graph complexes decorated by the cohomology of a
//! genus g surface: the complexes themselves, hairy graphs, the Lie algebras
//! `t_(g)(n)`, the dg algebra `Mo_(g)` and the graded Lie algebras `Z_(g)`,
//! `B_(g)` and `R_(g)`.
//!
//! Every coefficient is an exact rational number.

pub mod linalg;
pub mod graph;
pub mod gc;
pub mod hairy;
pub mod lie;
pub mod mo;
pub mod grt;
pub mod cache;
pub mod report;
pub mod verify;

pub use linalg::Rational;

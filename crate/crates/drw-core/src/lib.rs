//! Exact computer algebra for truncated de Rham-Witt complexes of Laurent
//! towers over finite fields: normal forms, the pole-order filtration, the
//! Cartier operator, and Swan/refined-Swan conductors of
//! Artin-Schreier-Witt classes.

pub mod error;
pub mod field;
pub mod tower;
pub mod wittpoly;
pub mod witt;
pub mod forms;
pub mod derham;
pub mod fil;
pub mod cartier;
pub mod conductor;
pub mod laws;
pub mod json;

pub use error::{Error, Result};

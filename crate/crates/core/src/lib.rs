//! Abductive explanations of classifiers that are only known through a
//! sample of labelled instances.
//!
//! The crate is organised bottom-up: [`theory`] defines features, literals
//! and assignments; [`data`] holds datasets, classifiers and questions;
//! [`explainers`] computes weak and minimal explanations; [`coherence`]
//! deals with envelopes and irrefutable explanations; [`surrogate`] fits
//! ID3 trees; [`axioms`] checks explainers against the formal properties.

pub mod axioms;
pub mod coherence;
pub mod data;
pub mod error;
pub mod explainers;
pub mod surrogate;
pub mod theory;
pub mod zoo;

pub use error::{Error, Result};

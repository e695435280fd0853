//! Exact sl(3) Khovanov homology for oriented spatial webs.
//!
//! The pipeline runs from a diagram code ([`web::WebDiagram`]) through planar
//! resolutions ([`web::PlanarWeb`]), foam movies and their closed evaluation
//! ([`foam`]), movie-valued bases of state spaces ([`state`]), the cube of
//! resolutions ([`cube`]), and integer homology ([`homology`]). On top of that
//! sit the edge actions of the ring `R_Γ` ([`action`]) and pointed homology
//! with its Koszul comparison ([`pointed`]).

pub mod action;
pub mod cube;
pub mod foam;
pub mod homology;
pub mod invariance;
pub mod state;
pub mod matrix;
pub mod pointed;
pub mod web;

mod error;

pub use error::{Error, Result};

//! Giant-atom spectroscopy toolkit.
//!
//! An atom coupled to a one-dimensional bosonic field at several connection
//! points sees a frequency-dependent environment: the coupling factor
//! `A(ω) = g_j Σ_k g_k exp(iωx_k/v)` shapes both its relaxation rates and its
//! Lamb shifts. This crate computes those quantities ([`spectral`]), rebuilds
//! them from cascaded (S,L,H) networks ([`slh`]), integrates the resulting
//! master equation ([`dynamics`]) and inverts the map from layout to response
//! ([`design`]).
//!
//! Units: `ħ = k_B = 1`, frequencies in rad/time, temperatures as angular
//! frequencies.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod dynamics;
mod error;
pub mod model;
pub mod ops;
pub mod quadrature;
pub mod slh;
pub mod spectral;

pub use error::{Error, Result};
pub use model::{
    AtomSpec, CouplingLayout, DensityOfStates, Environment, LadderModel, MirrorSpec,
};

pub use num_complex::Complex64;

//! Numerical inverse-scattering toolkit for the "bad" Boussinesq equation
//!
//!     u_tt = u_xx + (u^2)_xx + u_xxxx.
//!
//! The crate computes reflection coefficients r1, r2 from decaying initial
//! data via a 3x3 Lax-pair Volterra solve, checks the exact algebraic
//! identities and inequalities those coefficients satisfy, evaluates the
//! long-time asymptotic formulas in the five sectors of the (x,t) quarter
//! plane, solves the Hastings-McLeod Painlevé II boundary-value problem that
//! governs the wave front, and runs a damped Fourier pseudo-spectral
//! simulation of the (linearly ill-posed) PDE for comparison.

pub mod asymptotics;
pub mod error;
pub mod io;
pub mod painleve;
pub mod scattering;
pub mod sim;
pub mod special;
pub mod spectral;
pub mod wmodel;

pub use error::{Error, Result};

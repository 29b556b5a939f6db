//! Desk-scale numerical toolkit for Alexandrov-Fenchel-type curvature
//! inequalities of hypersurfaces in hyperbolic space.
//!
//! The crate has four layers:
//!
//! - [`symfunc`]: elementary symmetric functions of principal-curvature
//!   vectors, Newton-MacLaurin gaps and their refined quartic/quintic
//!   combinations, cyclic-sum identities, the interlacing reduction, and
//!   seeded cone scans.
//! - [`hypersurface`]: discrete axisymmetric star-shaped hypersurfaces as
//!   graphs r(theta) over the polar angle, exact graph curvature, weighted
//!   curvature integrals, and the integral inequality checks.
//! - [`flow`]: explicit time integration of the inverse curvature flow
//!   with speed (n-4)/4 * sigma_3/sigma_4 in graph form, with monitors for
//!   every evolution identity and monotone quantity.
//! - [`conformal`]: conformal metrics w^2 g on the round sphere, Schouten
//!   eigenvalues, sigma_k curvature functionals, the generalized Sobolev
//!   gap, and the asymptotic identification of the flow limit.
//!
//! Inner loops that sweep over samples are data-parallel through rayon
//! when the default `parallel` feature is on; disabling it yields a
//! sequential build with bit-identical results.

pub mod conformal;
pub mod error;
pub mod flow;
pub mod hypersurface;
pub mod numerics;
pub mod symfunc;

pub use error::{Error, Result};

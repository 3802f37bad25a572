//! Geometry core: moving frames for analytic surface data, loop-group
//! splittings with a spectral parameter, and quadric Gauss maps.
//!
//! The pipeline starts from a coefficient pair `(b, p)` of closed-form
//! expressions on a rectangular grid ([`surface`]), derives the invariants
//! `k` and `P` and the residuals that decide whether the pair describes a
//! surface at all, assembles the 4x4 connection matrices and integrates them
//! to a frame field ([`frame`]), inserts the spectral parameter and works
//! with the twisted loop group ([`spectral`]), and finally maps frames to
//! quadrics and lines ([`quadric`], [`plucker`]). Shared 4x4 complex matrix
//! arithmetic lives in [`linalg`].
//!
//! # Conventions
//!
//! * All field data lives on the slice `zb = conj(z)`; `z = x + iy` with grid
//!   steps equal in both directions.
//! * Flatness of a connection pair `(U, V)` is measured as
//!   `R = U_zb - V_z - [U, V]`, where `[U, V] = UV - VU`.
//! * Small tolerances are named constants next to the checks they guard,
//!   each with the reason for its size.

pub mod frame;
pub mod linalg;
pub mod plucker;
pub mod quadric;
pub mod spectral;
pub mod surface;

//! Spectral construction of rotating spiral waves arising in the strong
//! segregation limit of planar competition-diffusion systems.
//!
//! The pipeline runs: special functions of complex order ([`specfun`]), the
//! single-mode ODE solutions on the universal cover of the punctured disk
//! ([`modes`]), the boundary-trace compatibility system that fixes the
//! scaling vector of the traces ([`compat`]), assembly of the series solution
//! on the half-plane with nodal-curve extraction ([`halfplane`]), conformal
//! reconstruction of the segregated densities on the disk ([`diskmap`]), the
//! resonant/entire/caloric single-mode families ([`special`]), and
//! independent eigenvalue and quadrature oracles ([`oracle`]).

pub mod quad;
pub mod compat;
pub mod halfplane;
pub mod modes;
pub mod specfun;

pub use num_complex::Complex64;

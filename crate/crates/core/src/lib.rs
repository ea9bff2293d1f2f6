//! Continuum models of gated and twisted bilayer graphene interfaces:
//! symbols, invariants, pseudo-spectral discretization, interface
//! conductivities, wavepacket transport and 1D scattering.

pub mod arrayio;
pub mod cmat;
pub mod model;
pub mod par;
pub mod bulkspectra;
pub mod invariants;
pub mod scatter1d;
pub mod fourier;
pub mod transport;
pub mod dynamics;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

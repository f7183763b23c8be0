//! Quadrature rules and special functions shared by the other modules.

mod integrate;
mod quadrature;
mod special;

pub use integrate::{integrate_adaptive, integrate_semi_infinite, Decay};
pub use quadrature::{clenshaw_curtis, repeated_panels, QuadratureRule};
pub use special::{erf, erfc, oscillator_eigenfunction, oscillator_eigenfunctions, sinc};

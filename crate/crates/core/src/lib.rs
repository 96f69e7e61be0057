//! Exact-arithmetic construction and audit of the inhomogeneous simultaneous
//! approximation sets A_q on the 2-torus and their coprimality-reduced
//! companions, together with the number-theoretic identities and empirical
//! limsup statistics that sit behind their measure theory.
//!
//! Everything measurable is computed in arbitrary-precision rationals; no
//! floating point touches any verified quantity.

pub mod montecarlo;
pub mod numtheory;
pub mod psi;
pub mod rational;
pub mod sets;
pub mod target;
pub mod torus;
pub mod util;
pub mod verify;

pub use numtheory::FactorProfile;
pub use psi::PsiFunction;
pub use rational::Rational;
pub use sets::{SetDescriptor, Variant};
pub use target::{ApproximantPair, Target};
pub use torus::{IntervalSet1D, TorusBox};
pub use verify::{LemmaId, LemmaReport};

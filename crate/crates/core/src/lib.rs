//! Exact computations in the ordered group `G = ⊕_Z Z[t, 1/t, 1/(1-t)]`:
//! positivity cones over closed subsets of `(0, 1)`, constructive Riesz
//! interpolation, the cokernel of `id - gamma_star`, trace functionals and
//! the inverse-temperature spectrum they determine.

pub mod error;
pub mod gen;
pub mod group;
pub mod k_theory;
pub mod param_set;
pub mod poly;
pub mod positivity;
pub mod report;
pub mod riesz;
pub mod rational;
pub mod ring;
pub mod sandwich;
pub mod serial;
pub mod sturm;
pub mod traces;
pub mod verify;

pub use error::{Error, Result};
pub use group::{embed_single, embed_triple, GroupElement};
pub use param_set::{KmsSpec, ParamSet};
pub use positivity::{is_positive_on, PositivityCertificate, Verdict};
pub use rational::Rational;
pub use ring::RingElement;

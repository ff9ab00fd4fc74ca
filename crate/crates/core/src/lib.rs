//! Relativistic particle dynamics in scalar backgrounds (spacetime-dependent
//! masses), their conformal symmetries, superintegrability certification and
//! exact Klein-Gordon solutions.
//!
//! Conventions: metric `(+,-,-,-)`, light-front coordinates `x+- = t +- z`,
//! lower-index momenta with `p_+- = (p_0 +- p_3)/2`. The Poisson bracket is
//! `{A, B} = dA/dq dB/dp - dA/dp dB/dq` and the flow is `dQ/dt = -{Q, H}`.
//!
//! The geometric layer ([`geometry`], [`conformal`], [`ode`]) is generic over
//! the scalar type through [`Real`]; the physics layers work in `f64`.

pub mod analytic;
pub mod backgrounds;
pub mod conformal;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod integrability;
pub mod kgverify;
pub mod ode;
pub mod quad;
pub mod real;
pub mod sampling;

pub use backgrounds::ScalarBackground;
pub use conformal::{ConformalGenerator, VectorFieldPoly};
pub use dynamics::{ConservedQuantity, Form, PhaseSpaceState, Trajectory};
pub use error::{Error, Result};
pub use geometry::{FourVector, LightFrontCoords};
pub use real::Real;

pub type FourVector64 = geometry::FourVector<f64>;
pub type FourVector32 = geometry::FourVector<f32>;
pub type Generator64 = conformal::ConformalGenerator<f64>;
pub type Generator32 = conformal::ConformalGenerator<f32>;
pub type OdeOptions64 = ode::OdeOptions<f64>;

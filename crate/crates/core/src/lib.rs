//! Implicit multiderivative Runge-Kutta (MDRK) integrators for stiff ODE systems.
//!
//! The crate is organised bottom-up: Butcher-type tableaux ([`tableau`]),
//! finite-difference stencils ([`stencil`]), model problems ([`odesys`]),
//! higher time derivatives ([`derivchain`]), a damped Newton solver
//! ([`newton`]) and the time integrator itself ([`mdrk`]).

pub mod derivchain;
pub mod error;
pub mod linalg;
pub mod mdrk;
pub mod newton;
pub mod odesys;
pub mod stencil;
pub mod tableau;

pub use derivchain::{CountingFlux, DerivStrategy, FluxSource, StrategyKind};
pub use error::{Error, Result};
pub use mdrk::{Coupling as StageCoupling, Formulation, Integration, MethodSpec, StepTrace};
pub use newton::{JacobianMode, NewtonConfig, NewtonReport};
pub use odesys::{FluxModel, Matrix, Provenance, State};
pub use stencil::StencilWeights;
pub use tableau::{builtin_tableau, Structure, Tableau};

//! Correlation sets of finite product probability spaces.
//!
//! Given marginals `p_1, …, p_n` on the factors of `Ω = Ω_1 × … × Ω_n`, the crate
//! builds the polytope `𝒫` of all joint distributions with those marginals,
//! enumerates its vertices, evaluates the lower-envelope capacity and Choquet
//! integrals, tests independence on collections of subspaces, and checks the
//! behavioural axioms of maxmin preferences over prior sets. All probabilities are
//! exact rationals; only entropy-based quantities use floating point.

pub mod capacity;
pub mod error;
pub mod independence;
pub mod info;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod preferences;
pub mod rational;
pub mod scenario;
pub mod scenarios;
pub mod space;

pub use capacity::Capacity;
pub use error::{Error, Result};
pub use polytope::{CorrelationSet, DimensionReport, KernelBasis, MarginalSystem};
pub use preferences::PriorSet;
pub use rational::Rational;
pub use space::{
    Act, Collection, Event, IndexSet, JointDistribution, Marginal, MultiIndex, ProductSpace,
};

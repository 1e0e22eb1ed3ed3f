//! Lyapunov functions, heteroclinic orbits and compactness bounds for the
//! planar family
//!
//! ```text
//! x' = y - x
//! y' = a(x) y - b(x) y^2
//! ```
//!
//! which describes integrated mass and density of self-gravitating matter in
//! logarithmic radius. For each supported coefficient law the crate locates
//! the stationary points, builds the Lyapunov function
//! `V = zB(x) - A(x) + y - z - z log(y/z)`, linearizes at both equilibria,
//! shoots the orbit from `(0, 0)` to `(z, z)` and evaluates the upper bound
//! `X` on its `x`-extent, which bounds the compactness `2GM/(Rc^2)`.
//!
//! ```
//! use compactness::{bounds, model::{make_model, ModelSpec}};
//!
//! let stiff = make_model(ModelSpec::stiff()).unwrap();
//! let report = bounds::bound_x(&stiff).unwrap();
//! assert!(report.x_numeric < 0.7);
//! ```
// `!(a > b)` guards are intentional: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod astro;
pub mod bounds;
pub mod error;
pub mod lambert;
pub mod lyapunov;
pub mod model;
pub mod ode;
pub mod par;
pub mod portrait;
pub mod roots;
pub mod stability;
pub mod trajectory;

pub use error::{Error, Result};
pub use model::{make_model, Family, ModelSpec, SystemModel};
pub use par::Strategy;

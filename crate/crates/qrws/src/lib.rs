//! Simulation and analysis of discrete-time quantum random walk search on the
//! hypercube with a generalized Householder coin.
//!
//! The crate is organized around four layers:
//!
//! * [`walk`] — the walk state, the conditional coin / shift operators and the
//!   standard and alternating search runners,
//! * [`coin`] — the Householder coin family and the phase-dependence laws
//!   `zeta(phi)`,
//! * [`neighborhood`] — Hamming-shell bookkeeping around the marked vertex and
//!   the success-probability aggregates `P_W`, `P_F`, `P_S`,
//! * [`robustness`] / [`hill`] — phase sweeps, stability windows and the Hill
//!   regression pipeline used to extrapolate those windows in the register
//!   size.
//!
//! All numeric kernels are generic over the scalar type through [`WalkFloat`];
//! the concrete aliases below fix `f64` (the default used by the CLI and all
//! reference values) and `f32`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub mod coin;
pub mod dense;
pub mod detrand;
pub mod error;
pub mod hill;
pub mod neighborhood;
pub mod robustness;
pub mod walk;

/// Scalar bound for every generic kernel in the crate.
///
/// Blanket-implemented, so `f32` and `f64` (and any future type satisfying the
/// bounds) work without explicit opt-in.
pub trait WalkFloat:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Send
    + Sync
    + Debug
    + Display
    + 'static
{
}

impl<T> WalkFloat for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum
        + Send
        + Sync
        + Debug
        + Display
        + 'static
{
}

/// Converts an `f64` constant into the working scalar type.
///
/// Panics only if the scalar type cannot represent ordinary literals, which no
/// supported type does.
pub(crate) fn cf<T: WalkFloat>(x: f64) -> T {
    T::from_f64(x).expect("literal constant must be representable")
}

/// Converts the working scalar into `f64` for reporting and serialization.
pub(crate) fn to_f64<T: WalkFloat>(x: T) -> f64 {
    num_traits::ToPrimitive::to_f64(&x).unwrap_or(f64::NAN)
}

pub use error::QrwsError;

/// Double-precision walk state (the default everywhere).
pub type WalkState64 = walk::WalkState<f64>;
/// Single-precision walk state.
pub type WalkState32 = walk::WalkState<f32>;
/// Double-precision Householder coin.
pub type HouseholderCoin64 = coin::HouseholderCoin<f64>;
/// Single-precision Householder coin.
pub type HouseholderCoin32 = coin::HouseholderCoin<f32>;

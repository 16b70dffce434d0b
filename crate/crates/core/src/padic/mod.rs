//! Scalar layer: Q_p numbers with the projective line and its balls.

mod ball;
mod number;
mod point;

pub use ball::PBall;
pub use number::{Padic, PadicContext};
pub use point::{cross_ratio, ProjPoint};

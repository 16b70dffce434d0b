use std::fmt;

use super::number::{Padic, PadicContext};
use crate::error::{Error, Result};

/// A point `(x : y)` of the projective line over Q_p.
///
/// Coordinates are kept scaled so that the smaller valuation is 0; scaling by
/// powers of p is exact, so normalization never costs precision.
#[derive(Debug, Clone, Copy)]
pub struct ProjPoint {
    x: Padic,
    y: Padic,
}

impl ProjPoint {
    pub fn new(x: Padic, y: Padic) -> Result<Self> {
        if x.is_zero() && y.is_zero() {
            return Err(Error::PrecisionExhausted(
                "both homogeneous coordinates vanish".into(),
            ));
        }
        let shift = x.valuation_bound().min(y.valuation_bound());
        Ok(ProjPoint {
            x: x.shift(-shift),
            y: y.shift(-shift),
        })
    }

    pub fn finite(x: Padic) -> Self {
        let one = Padic::one(x.ctx());
        Self::new(x, one).expect("(x : 1) is never degenerate")
    }

    pub fn infinity(ctx: PadicContext) -> Self {
        ProjPoint {
            x: Padic::one(ctx),
            y: Padic::zero(ctx),
        }
    }

    pub fn from_int(ctx: PadicContext, n: i64) -> Self {
        Self::finite(Padic::from_int(ctx, n))
    }

    pub fn ctx(&self) -> PadicContext {
        self.x.ctx()
    }

    pub fn coords(&self) -> (&Padic, &Padic) {
        (&self.x, &self.y)
    }

    pub fn is_infinity(&self) -> bool {
        self.y.is_zero()
    }

    /// The affine coordinate `x / y`, or `None` at infinity.
    pub fn affine(&self) -> Option<Padic> {
        if self.is_infinity() {
            None
        } else {
            self.x.checked_div(&self.y).ok()
        }
    }

    /// The determinant `x1*y2 - x2*y1`, the homogeneous form of `z - w`.
    pub fn bracket(&self, other: &Self) -> Padic {
        self.x * other.y - other.x * self.y
    }

    /// Projective equality to the known precision.
    pub fn coincides(&self, other: &Self) -> bool {
        self.bracket(other).is_zero()
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.affine() {
            None => write!(f, "inf"),
            Some(z) => write!(f, "{z}"),
        }
    }
}

/// The cross ratio `((z - a)(w - b)) / ((z - b)(w - a))` in homogeneous form.
///
/// Each point appears equally often above and below the bar, so the
/// result is independent of the homogeneous scaling and of whether any
/// argument is infinite.
pub fn cross_ratio(a: &ProjPoint, b: &ProjPoint, z: &ProjPoint, w: &ProjPoint) -> Result<Padic> {
    let za = z.bracket(a);
    let wb = w.bracket(b);
    let zb = z.bracket(b);
    let wa = w.bracket(a);
    if zb.is_zero() || wa.is_zero() || za.is_zero() || wb.is_zero() {
        return Err(Error::PoleHit(format!("cross ratio ({a}, {b}; {z}, {w})")));
    }
    (za * wb).checked_div(&(zb * wa))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_and_affine() {
        let ctx = PadicContext::new(5, 10).unwrap();
        let inf = ProjPoint::infinity(ctx);
        assert!(inf.is_infinity());
        let p = ProjPoint::new(ctx.int(25), ctx.int(5)).unwrap();
        assert!(p.affine().unwrap().agrees_with(&ctx.int(5)));
        assert!(p.coincides(&ProjPoint::from_int(ctx, 5)));
        let q = ProjPoint::new(ctx.int(5), ctx.zero()).unwrap();
        assert!(q.coincides(&inf));
    }

    #[test]
    fn cross_ratio_limits() {
        let ctx = PadicContext::new(5, 10).unwrap();
        let pt = |n| ProjPoint::from_int(ctx, n);
        let inf = ProjPoint::infinity(ctx);
        // (0, inf; z, w) -> z / w
        let r = cross_ratio(&pt(0), &inf, &pt(3), &pt(7)).unwrap();
        assert!(r.agrees_with(&Padic::from_ratio(ctx, 3, 7).unwrap()));
        let r = cross_ratio(&pt(1), &pt(-1), &pt(2), &pt(3)).unwrap();
        assert!(r.agrees_with(&Padic::from_ratio(ctx, 2, 3).unwrap()));
        assert!(cross_ratio(&pt(1), &pt(-1), &pt(1), &pt(3)).is_err());
    }
}

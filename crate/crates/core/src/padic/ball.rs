use std::fmt;

use super::number::Padic;
use super::point::ProjPoint;
use crate::error::{Error, Result};
use crate::moebius::MoebiusMap;

/// A closed ball of P^1(Q_p).
///
/// `Standard { c, r }` is `{z : v(z - c) >= r}`; `Complement { c, r }` is
/// `{z : v(z - c) <= r} ∪ {∞}`, the complement of `Standard { c, r + 1 }`.
#[derive(Debug, Clone, Copy)]
pub enum PBall {
    Standard { center: Padic, radius: i64 },
    Complement { center: Padic, radius: i64 },
}

impl PBall {
    pub fn standard(center: Padic, radius: i64) -> Self {
        PBall::Standard { center, radius }
    }

    pub fn complement_kind(center: Padic, radius: i64) -> Self {
        PBall::Complement { center, radius }
    }

    pub fn center(&self) -> &Padic {
        match self {
            PBall::Standard { center, .. } | PBall::Complement { center, .. } => center,
        }
    }

    pub fn radius(&self) -> i64 {
        match self {
            PBall::Standard { radius, .. } | PBall::Complement { radius, .. } => *radius,
        }
    }

    pub fn is_standard(&self) -> bool {
        matches!(self, PBall::Standard { .. })
    }

    /// The set-theoretic complement, again a ball.
    pub fn complement(&self) -> PBall {
        match *self {
            PBall::Standard { center, radius } => PBall::Complement {
                center,
                radius: radius - 1,
            },
            PBall::Complement { center, radius } => PBall::Standard {
                center,
                radius: radius + 1,
            },
        }
    }

    pub fn contains(&self, z: &ProjPoint) -> bool {
        let Some(z) = z.affine() else {
            return !self.is_standard();
        };
        let v = (z - *self.center()).valuation_bound();
        match self {
            PBall::Standard { radius, .. } => v >= *radius,
            PBall::Complement { radius, .. } => v <= *radius,
        }
    }

    /// `inner ⊆ self`.
    pub fn contains_ball(&self, inner: &PBall) -> bool {
        match (self, inner) {
            (
                PBall::Standard {
                    center: c,
                    radius: r,
                },
                PBall::Standard {
                    center: ci,
                    radius: ri,
                },
            ) => ri >= r && (*ci - *c).valuation_bound() >= *r,
            (PBall::Complement { .. }, PBall::Standard { .. }) => {
                inner.disjoint(&self.complement())
            }
            (PBall::Standard { .. }, PBall::Complement { .. }) => false,
            (PBall::Complement { .. }, PBall::Complement { .. }) => {
                inner.complement().contains_ball(&self.complement())
            }
        }
    }

    pub fn disjoint(&self, other: &PBall) -> bool {
        match (self, other) {
            (
                PBall::Standard {
                    center: c1,
                    radius: r1,
                },
                PBall::Standard {
                    center: c2,
                    radius: r2,
                },
            ) => (*c1 - *c2).valuation_bound() < *r1.min(r2),
            (PBall::Standard { .. }, PBall::Complement { .. }) => {
                other.complement().contains_ball(self)
            }
            (PBall::Complement { .. }, PBall::Standard { .. }) => {
                self.complement().contains_ball(other)
            }
            (PBall::Complement { .. }, PBall::Complement { .. }) => false,
        }
    }

    /// Image of the ball under a Möbius map (always a ball).
    pub fn moebius_image(&self, m: &MoebiusMap) -> Result<PBall> {
        match *self {
            PBall::Complement { .. } => Ok(self.complement().moebius_image(m)?.complement()),
            PBall::Standard { center, radius } => {
                let [[a, b], [c, d]] = *m.entries();
                let det = a * d - b * c;
                let vdet = det.valuation().ok_or_else(|| {
                    Error::DegenerateBall("determinant lost all precision".into())
                })?;
                let degenerate = || Error::DegenerateBall(format!("image of ball around {center}"));
                if c.is_zero() {
                    // affine map z -> (a z + b) / d
                    let scale = a.checked_div(&d).map_err(|_| degenerate())?;
                    let new_center = (a * center + b).checked_div(&d).map_err(|_| degenerate())?;
                    let vs = scale.valuation().ok_or_else(degenerate)?;
                    return Ok(PBall::Standard {
                        center: new_center,
                        radius: radius + vs,
                    });
                }
                let vc = c.valuation().ok_or_else(degenerate)?;
                let pole = (-d).checked_div(&c).map_err(|_| degenerate())?;
                let e = (pole - center).valuation_bound();
                if e >= radius {
                    // pole inside: the image is a neighbourhood of infinity
                    let far = a.checked_div(&c).map_err(|_| degenerate())?;
                    Ok(PBall::Complement {
                        center: far,
                        radius: vdet - 2 * vc - radius,
                    })
                } else {
                    let denom = c * center + d;
                    let new_center = (a * center + b)
                        .checked_div(&denom)
                        .map_err(|_| degenerate())?;
                    Ok(PBall::Standard {
                        center: new_center,
                        radius: radius + vdet - 2 * (vc + e),
                    })
                }
            }
        }
    }
}

impl fmt::Display for PBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PBall::Standard { center, radius } => write!(f, "{{v(z - {center}) >= {radius}}}"),
            PBall::Complement { center, radius } => {
                write!(f, "{{v(z - {center}) <= {radius}}} + inf")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicContext;

    #[test]
    fn inversion_sends_small_ball_to_neighbourhood_of_infinity() {
        let ctx = PadicContext::new(5, 10).unwrap();
        let inv = MoebiusMap::new([[ctx.zero(), ctx.one()], [ctx.one(), ctx.zero()]]).unwrap();
        let b = PBall::standard(ctx.zero(), 1);
        match b.moebius_image(&inv).unwrap() {
            PBall::Complement { center, radius } => {
                assert!(center.is_zero());
                assert_eq!(radius, -1);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn disjointness_and_membership() {
        let ctx = PadicContext::new(5, 10).unwrap();
        let b1 = PBall::standard(ctx.int(1), 1);
        let b2 = PBall::standard(ctx.int(2), 1);
        assert!(b1.disjoint(&b2));
        let b0 = PBall::standard(ctx.zero(), 1);
        assert!(b0.contains(&ProjPoint::from_int(ctx, 5)));
        assert!(!b0.contains(&ProjPoint::infinity(ctx)));
        let c = PBall::complement_kind(ctx.zero(), 0);
        assert!(c.contains(&ProjPoint::infinity(ctx)));
        assert!(c.disjoint(&b0));
        assert!(!c.disjoint(&PBall::standard(ctx.zero(), 0)));
        assert!(c.contains_ball(&PBall::complement_kind(ctx.zero(), -1)));
        assert!(!c.contains_ball(&PBall::complement_kind(ctx.zero(), 1)));
        assert!(PBall::standard(ctx.zero(), 0).contains_ball(&b1));
    }
}

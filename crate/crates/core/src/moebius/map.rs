use std::fmt;

use crate::error::{Error, Result};
use crate::padic::{Padic, PadicContext, ProjPoint};

/// An element of PGL(2, Q_p), stored as a 2×2 matrix up to scalars.
#[derive(Debug, Clone, Copy)]
pub struct MoebiusMap {
    m: [[Padic; 2]; 2],
}

impl MoebiusMap {
    pub fn new(m: [[Padic; 2]; 2]) -> Result<Self> {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.is_zero() {
            return Err(Error::PrecisionExhausted(
                "Möbius determinant vanishes".into(),
            ));
        }
        Ok(MoebiusMap { m })
    }

    pub fn identity(ctx: PadicContext) -> Self {
        MoebiusMap {
            m: [[ctx.one(), ctx.zero()], [ctx.zero(), ctx.one()]],
        }
    }

    pub fn entries(&self) -> &[[Padic; 2]; 2] {
        &self.m
    }

    pub fn det(&self) -> Padic {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &MoebiusMap) -> Result<MoebiusMap> {
        let a = &self.m;
        let b = &other.m;
        let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        MoebiusMap::new([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]).map(|m| m.normalized())
    }

    /// Inverse via the adjugate.
    pub fn inverse(&self) -> MoebiusMap {
        let [[a, b], [c, d]] = self.m;
        MoebiusMap {
            m: [[d, -b], [-c, a]],
        }
    }

    /// Rescales by a power of p so the smallest entry valuation is 0.
    fn normalized(self) -> MoebiusMap {
        let shift = self
            .m
            .iter()
            .flatten()
            .map(|x| x.valuation_bound())
            .min()
            .unwrap_or(0);
        MoebiusMap {
            m: self.m.map(|row| row.map(|x| x.shift(-shift))),
        }
    }

    pub fn apply(&self, z: &ProjPoint) -> Result<ProjPoint> {
        let (x, y) = z.coords();
        let [[a, b], [c, d]] = self.m;
        ProjPoint::new(a * *x + b * *y, c * *x + d * *y)
    }

    /// Equality in PGL(2): all 2×2 minors of the stacked entries vanish.
    pub fn projectively_equal(&self, other: &MoebiusMap) -> bool {
        let a: Vec<Padic> = self.m.iter().flatten().copied().collect();
        let b: Vec<Padic> = other.m.iter().flatten().copied().collect();
        (0..4).all(|i| (0..4).all(|j| (a[i] * b[j] - a[j] * b[i]).is_zero()))
    }

    pub fn is_identity(&self) -> bool {
        self.projectively_equal(&MoebiusMap::identity(self.m[0][0].ctx()))
    }

    /// The two fixed points of a loxodromic map, from the quadratic
    /// `c z^2 + (d - a) z - b = 0` in homogeneous form.
    pub fn fixed_points(&self) -> Result<(ProjPoint, ProjPoint)> {
        let [[a, b], [c, d]] = self.m;
        let ctx = a.ctx();
        let disc = (a - d) * (a - d) + ctx.int(4) * b * c;
        let root = disc.sqrt().map_err(|e| Error::NonSplit(e.to_string()))?;
        if root.is_zero() {
            return Err(Error::NonSplit(
                "parabolic element (double fixed point)".into(),
            ));
        }
        // homogeneous solutions (x : y) of c x^2 + (d - a) x y - b y^2 = 0
        let two_c = ctx.int(2) * c;
        if c.is_zero() {
            // z -> (a z + b) / d fixes infinity and b / (d - a)
            let other = ProjPoint::new(b, d - a)?;
            return Ok((ProjPoint::infinity(ctx), other));
        }
        let p1 = ProjPoint::new(a - d + root, two_c)?;
        let p2 = ProjPoint::new(a - d - root, two_c)?;
        Ok((p1, p2))
    }

    /// Multiplier `k` with `(m(z) - z1) / (m(z) - z2) = k (z - z1) / (z - z2)`.
    pub fn multiplier(&self) -> Result<Padic> {
        let (z1, z2) = self.fixed_points()?;
        let [[_, _], [c, d]] = self.m;
        // derivative at a finite fixed point
        let z = if z1.is_infinity() { z2 } else { z1 };
        let (x, y) = z.coords();
        let cz_d = c * *x + d * *y;
        let det = self.det();
        let denom = cz_d * cz_d;
        (det * *y * *y).checked_div(&denom)
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = &self.m;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

/// The involution with fixed points `a` and `b`:
/// `z ↦ ((a+b) z - 2ab) / (2z - (a+b))` in homogeneous form.
pub fn involution_from_fixed_points(a: &ProjPoint, b: &ProjPoint) -> Result<MoebiusMap> {
    if a.coincides(b) {
        return Err(Error::CoincidentFixedPoints);
    }
    let (a1, a2) = a.coords();
    let (b1, b2) = b.coords();
    let two = a1.ctx().int(2);
    let s = *a1 * *b2 + *a2 * *b1;
    MoebiusMap::new([[s, -(two * *a1 * *b1)], [two * *a2 * *b2, -s]]).map(|m| m.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PadicContext {
        PadicContext::new(5, 12).unwrap()
    }

    fn map(c: PadicContext, e: [[i64; 2]; 2]) -> MoebiusMap {
        MoebiusMap::new(e.map(|r| r.map(|x| c.int(x)))).unwrap()
    }

    #[test]
    fn involution_examples() {
        let c = ctx();
        let pt = |n| ProjPoint::from_int(c, n);
        let s = involution_from_fixed_points(&pt(1), &pt(-1)).unwrap();
        assert!(s.projectively_equal(&map(c, [[0, 1], [1, 0]])));
        let s = involution_from_fixed_points(&pt(0), &ProjPoint::infinity(c)).unwrap();
        assert!(s.projectively_equal(&map(c, [[-1, 0], [0, 1]])));
        let s = involution_from_fixed_points(&pt(5), &pt(-5)).unwrap();
        assert!(s.projectively_equal(&map(c, [[0, 25], [1, 0]])));
        assert_eq!(
            involution_from_fixed_points(&pt(3), &pt(3)).unwrap_err(),
            Error::CoincidentFixedPoints
        );
    }

    #[test]
    fn involution_has_order_two_and_fixes_its_points() {
        let c = ctx();
        let a = ProjPoint::finite(Padic::from_ratio(c, 7, 3).unwrap());
        let b = ProjPoint::from_int(c, 11);
        let s = involution_from_fixed_points(&a, &b).unwrap();
        assert!(s.compose(&s).unwrap().is_identity());
        assert!(s.apply(&a).unwrap().coincides(&a));
        assert!(s.apply(&b).unwrap().coincides(&b));
        assert!(!s
            .apply(&ProjPoint::from_int(c, 2))
            .unwrap()
            .coincides(&ProjPoint::from_int(c, 2)));
    }

    #[test]
    fn fixed_points_of_scaling() {
        let c = ctx();
        let m = map(c, [[25, 0], [0, 1]]);
        let (z1, z2) = m.fixed_points().unwrap();
        let zero = ProjPoint::from_int(c, 0);
        let inf = ProjPoint::infinity(c);
        assert!(
            (z1.coincides(&zero) && z2.coincides(&inf))
                || (z1.coincides(&inf) && z2.coincides(&zero))
        );
        let k = m.multiplier().unwrap();
        assert_eq!(k.valuation().map(i64::abs), Some(2));
    }
}

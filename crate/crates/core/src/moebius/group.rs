use std::fmt;

use super::map::{involution_from_fixed_points, MoebiusMap};
use crate::error::{Error, Result};
use crate::padic::{PBall, Padic, PadicContext, ProjPoint};

/// A reduced word in the involutions `s_0..s_g`: no letter repeats
/// consecutively since every generator has order 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Result<Self> {
        if letters.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Spec(format!("word {letters:?} is not reduced")));
        }
        Ok(Word(letters))
    }

    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Reduces an arbitrary letter sequence in the free product of Z/2's.
    pub fn reduce(letters: impl IntoIterator<Item = usize>) -> Self {
        let mut out: Vec<usize> = Vec::new();
        for l in letters {
            if out.last() == Some(&l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// The free generator `γ_i = s_i s_0` as a word.
    pub fn generator(i: usize) -> Self {
        Word(vec![i, 0])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Even words form the index-2 subgroup Γ.
    pub fn is_even(&self) -> bool {
        self.0.len().is_multiple_of(2)
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn then(&self, other: &Word) -> Self {
        Word::reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    /// `α γ α` for a single involution α.
    pub fn conjugate_by_letter(&self, alpha: usize) -> Self {
        Word::reduce(
            std::iter::once(alpha)
                .chain(self.0.iter().copied())
                .chain(std::iter::once(alpha)),
        )
    }

    pub fn power(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        (0..n.unsigned_abs()).fold(Word::identity(), |acc, _| acc.then(&base))
    }

    /// Exponent sums of the word in the abelianization of Γ: the coordinates
    /// `n` with `γ ≡ γ_1^{n_1} ⋯ γ_g^{n_g}` modulo commutators.
    pub fn abelianized(&self, genus: usize) -> Vec<i64> {
        assert!(self.is_even(), "only even words lie in Γ");
        // s_a s_b = γ_a γ_b^{-1} with γ_0 = 1
        let mut n = vec![0i64; genus];
        for pair in self.0.chunks(2) {
            if pair[0] > 0 {
                n[pair[0] - 1] += 1;
            }
            if pair[1] > 0 {
                n[pair[1] - 1] -= 1;
            }
        }
        n
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", parts.join(" "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    All,
    Even,
}

/// All reduced words over `letters` symbols of length `<= max_len`, ordered
/// by length then lexicographically.
pub fn enumerate_words(letters: usize, max_len: usize, parity: Parity) -> Vec<Word> {
    let mut out = vec![Word::identity()];
    let mut layer = vec![Word::identity()];
    for len in 1..=max_len {
        let mut next = Vec::with_capacity(layer.len() * letters);
        for w in &layer {
            for l in 0..letters {
                if w.0.last() != Some(&l) {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
        }
        if parity == Parity::All || len % 2 == 0 {
            out.extend(next.iter().cloned());
        }
        layer = next;
    }
    out
}

/// Outcome of the ping-pong test.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    pub passed: bool,
    pub violations: Vec<String>,
    /// Minimum over generators of how far `s_i(∁D_i)` sits inside `D_i`,
    /// in valuation steps; the per-letter contraction of nested orbits.
    pub contraction_gap: Option<i64>,
    pub balls: Vec<PBall>,
    /// The images `s_i(∁D_i)`; every nontrivial orbit point lands in one.
    pub inner_balls: Vec<PBall>,
}

impl CertificateReport {
    /// Whether `z` lies outside every inner ball.
    pub fn is_outside_inner(&self, z: &ProjPoint) -> bool {
        self.inner_balls.iter().all(|b| !b.contains(z))
    }
}

/// The Whittaker group generated by the involutions with the given fixed
/// point pairs; `Γ` is its even-length part, free on `γ_i = s_i s_0`.
#[derive(Debug, Clone)]
pub struct WhittakerGroup {
    ctx: PadicContext,
    pairs: Vec<(ProjPoint, ProjPoint)>,
    involutions: Vec<MoebiusMap>,
}

impl WhittakerGroup {
    pub fn new(ctx: PadicContext, pairs: Vec<(ProjPoint, ProjPoint)>) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(Error::Spec(format!(
                "need at least 2 fixed-point pairs, got {}",
                pairs.len()
            )));
        }
        let points: Vec<&ProjPoint> = pairs.iter().flat_map(|(a, b)| [a, b]).collect();
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i].coincides(points[j]) {
                    return Err(Error::Spec(format!("fixed points {i} and {j} coincide")));
                }
            }
        }
        let involutions = pairs
            .iter()
            .map(|(a, b)| involution_from_fixed_points(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(WhittakerGroup {
            ctx,
            pairs,
            involutions,
        })
    }

    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    pub fn genus(&self) -> usize {
        self.pairs.len() - 1
    }

    pub fn pairs(&self) -> &[(ProjPoint, ProjPoint)] {
        &self.pairs
    }

    pub fn involution(&self, i: usize) -> &MoebiusMap {
        &self.involutions[i]
    }

    pub fn involutions(&self) -> &[MoebiusMap] {
        &self.involutions
    }

    /// `γ_i = s_i ∘ s_0` for `i = 1..=g`.
    pub fn free_generator(&self, i: usize) -> Result<MoebiusMap> {
        assert!((1..=self.genus()).contains(&i));
        self.element_of(&Word::generator(i))
    }

    pub fn enumerate_words(&self, max_len: usize, parity: Parity) -> Vec<Word> {
        enumerate_words(self.genus() + 1, max_len, parity)
    }

    /// Left-to-right composition `s_{w_1} ∘ s_{w_2} ∘ ⋯`.
    pub fn element_of(&self, w: &Word) -> Result<MoebiusMap> {
        let mut m = MoebiusMap::identity(self.ctx);
        for &l in w.letters() {
            m = m.compose(&self.involutions[l])?;
        }
        Ok(m)
    }

    /// `w · z`, applying the rightmost letter first.
    pub fn act(&self, w: &Word, z: &ProjPoint) -> Result<ProjPoint> {
        let mut z = *z;
        for &l in w.letters().iter().rev() {
            z = self.involutions[l].apply(&z)?;
        }
        Ok(z)
    }

    /// Balls about the midpoints `(a_i + b_i)/2` of radius `v((a_i - b_i)/2)`;
    /// each involution is the inversion in its ball.
    pub fn default_balls(&self) -> Result<Vec<PBall>> {
        let half = Padic::from_ratio(self.ctx, 1, 2)?;
        self.pairs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let (Some(a), Some(b)) = (a.affine(), b.affine()) else {
                    return Err(Error::Spec(format!(
                        "pair {i} has a point at infinity; supply an explicit ball system"
                    )));
                };
                let r = ((a - b) * half)
                    .valuation()
                    .ok_or_else(|| Error::DegenerateBall(format!("pair {i} too close")))?;
                Ok(PBall::standard((a + b) * half, r))
            })
            .collect()
    }

    /// Ping-pong test: pairwise disjoint balls `D_i ∋ a_i, b_i` with
    /// `s_i(∁D_i)` strictly inside `D_i`.
    pub fn ping_pong_certify(&self, balls: &[PBall]) -> Result<CertificateReport> {
        if balls.len() != self.pairs.len() {
            return Err(Error::BallCountMismatch {
                expected: self.pairs.len(),
                got: balls.len(),
            });
        }
        let mut violations = Vec::new();
        let mut inner_balls = Vec::new();
        let mut gap: Option<i64> = None;
        for (i, ((a, b), d)) in self.pairs.iter().zip(balls).enumerate() {
            if !d.contains(a) || !d.contains(b) {
                violations.push(format!("fixed points of s_{i} not in D_{i} = {d}"));
            }
            let inner = d.complement().moebius_image(&self.involutions[i])?;
            let margin = if !d.contains_ball(&inner) {
                violations.push(format!(
                    "s_{i} does not map the complement of D_{i} into D_{i}"
                ));
                0
            } else {
                match (d, &inner) {
                    (PBall::Standard { radius: r, .. }, PBall::Standard { radius: ri, .. }) => {
                        ri - r
                    }
                    (PBall::Complement { radius: r, .. }, PBall::Complement { radius: ri, .. }) => {
                        r - ri
                    }
                    _ => 1,
                }
            };
            if margin < 1 {
                violations.push(format!("s_{i} has no contraction margin inside D_{i}"));
            }
            gap = Some(gap.map_or(margin, |g| g.min(margin)));
            inner_balls.push(inner);
        }
        for i in 0..balls.len() {
            for j in i + 1..balls.len() {
                if !balls[i].disjoint(&balls[j]) {
                    violations.push(format!("D_{i} and D_{j} overlap"));
                }
            }
        }
        let passed = violations.is_empty();
        Ok(CertificateReport {
            passed,
            violations,
            contraction_gap: if passed { gap } else { None },
            balls: balls.to_vec(),
            inner_balls,
        })
    }

    /// Small test points outside every inner ball and distinct from the
    /// fixed points, in a deterministic order.
    pub fn probe_points(&self, cert: &CertificateReport, count: usize) -> Vec<ProjPoint> {
        let p = self.ctx.prime() as i64;
        let mut candidates = vec![ProjPoint::infinity(self.ctx)];
        for k in 0..4 * p * p {
            let n = if k % 2 == 0 { k / 2 } else { -(k / 2) - 1 };
            candidates.push(ProjPoint::from_int(self.ctx, n));
            candidates.push(ProjPoint::finite(
                Padic::from_ratio(self.ctx, n as i128, p as i128).unwrap(),
            ));
        }
        candidates
            .into_iter()
            .filter(|z| cert.is_outside_inner(z))
            .filter(|z| {
                self.pairs
                    .iter()
                    .all(|(a, b)| !z.coincides(a) && !z.coincides(b))
            })
            .take(count)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PadicContext {
        PadicContext::new(5, 12).unwrap()
    }

    pub(crate) fn tate(c: PadicContext) -> WhittakerGroup {
        let pt = |n| ProjPoint::from_int(c, n);
        WhittakerGroup::new(c, vec![(pt(1), pt(-1)), (pt(5), pt(-5))]).unwrap()
    }

    fn genus2(c: PadicContext) -> WhittakerGroup {
        let pt = |n| ProjPoint::from_int(c, n);
        WhittakerGroup::new(c, vec![(pt(0), pt(10)), (pt(1), pt(6)), (pt(2), pt(7))]).unwrap()
    }

    #[test]
    fn word_enumeration_examples() {
        let w = enumerate_words(2, 2, Parity::All);
        let expect: Vec<Word> = vec![vec![], vec![0], vec![1], vec![0, 1], vec![1, 0]]
            .into_iter()
            .map(Word)
            .collect();
        assert_eq!(w, expect);
        assert_eq!(enumerate_words(3, 3, Parity::All).len(), 22);
        let even: Vec<Word> = enumerate_words(2, 4, Parity::Even);
        let expect: Vec<Word> = vec![
            vec![],
            vec![0, 1],
            vec![1, 0],
            vec![0, 1, 0, 1],
            vec![1, 0, 1, 0],
        ]
        .into_iter()
        .map(Word)
        .collect();
        assert_eq!(even, expect);
    }

    #[test]
    fn word_counts_match_formula() {
        for g in 1..4usize {
            for l in 0..7usize {
                let expect = 1
                    + (1..=l)
                        .map(|k| (g + 1) * g.pow(k as u32 - 1))
                        .sum::<usize>();
                assert_eq!(enumerate_words(g + 1, l, Parity::All).len(), expect);
            }
        }
    }

    #[test]
    fn tate_elements() {
        let c = ctx();
        let grp = tate(c);
        let scale = |k: i64, den: i64| {
            MoebiusMap::new([[c.int(k), c.zero()], [c.zero(), c.int(den)]]).unwrap()
        };
        assert!(grp
            .element_of(&Word(vec![1, 0]))
            .unwrap()
            .projectively_equal(&scale(25, 1)));
        assert!(grp
            .element_of(&Word(vec![0, 1]))
            .unwrap()
            .projectively_equal(&scale(1, 25)));
        assert!(grp.element_of(&Word::identity()).unwrap().is_identity());
    }

    #[test]
    fn involutions_square_to_identity() {
        let grp = genus2(ctx());
        for s in grp.involutions() {
            assert!(s.compose(s).unwrap().is_identity());
        }
        for (i, (a, b)) in grp.pairs().iter().enumerate() {
            assert!(grp.involution(i).apply(a).unwrap().coincides(a));
            assert!(grp.involution(i).apply(b).unwrap().coincides(b));
        }
    }

    #[test]
    fn tate_certificate_with_explicit_balls() {
        let c = ctx();
        let grp = tate(c);
        let balls = [
            PBall::complement_kind(c.zero(), 0),
            PBall::standard(c.zero(), 1),
        ];
        let rep = grp.ping_pong_certify(&balls).unwrap();
        assert!(rep.passed, "{:?}", rep.violations);
        assert_eq!(rep.contraction_gap, Some(1));
        // the midpoint balls of the Tate pairs are nested, not disjoint
        let rep = grp
            .ping_pong_certify(&grp.default_balls().unwrap())
            .unwrap();
        assert!(!rep.passed);
    }

    #[test]
    fn genus2_certificate_with_default_balls() {
        let grp = genus2(ctx());
        let balls = grp.default_balls().unwrap();
        for (b, center) in balls.iter().zip([(5, 1), (7, 2), (9, 2)]) {
            let expect = Padic::from_ratio(ctx(), center.0, center.1).unwrap();
            assert!(b.center().agrees_with(&expect));
            assert_eq!(b.radius(), 1);
        }
        let rep = grp.ping_pong_certify(&balls).unwrap();
        assert!(rep.passed, "{:?}", rep.violations);
        for w in grp
            .enumerate_words(2, Parity::Even)
            .iter()
            .filter(|w| !w.is_empty())
        {
            let m = grp.element_of(w).unwrap();
            let (z1, z2) = m.fixed_points().unwrap();
            assert!(!z1.coincides(&z2));
            assert_ne!(m.multiplier().unwrap().valuation(), Some(0));
        }
    }

    #[test]
    fn overlapping_balls_fail() {
        let c = ctx();
        let pt = |n| ProjPoint::from_int(c, n);
        let grp = WhittakerGroup::new(c, vec![(pt(0), pt(10)), (pt(5), pt(15))]).unwrap();
        let rep = grp
            .ping_pong_certify(&grp.default_balls().unwrap())
            .unwrap();
        assert!(!rep.passed);
        assert!(rep.violations.iter().any(|v| v.contains("overlap")));
        assert_eq!(
            grp.ping_pong_certify(&[]).unwrap_err(),
            Error::BallCountMismatch {
                expected: 2,
                got: 0
            }
        );
    }

    #[test]
    fn parity_matches_sign_character() {
        // in the Tate group even words are scalings z -> q^n z, odd words z -> c/z
        let grp = tate(ctx());
        for w in grp.enumerate_words(5, Parity::All) {
            let [[a, b], [c, d]] = *grp.element_of(&w).unwrap().entries();
            if w.is_even() {
                assert!(
                    b.is_zero() && c.is_zero() && !a.is_zero() && !d.is_zero(),
                    "{w}"
                );
            } else {
                assert!(a.is_zero() && d.is_zero(), "{w}");
            }
        }
    }
}

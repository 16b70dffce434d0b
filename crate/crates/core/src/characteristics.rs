//! Half-period characters of the branch points and the divisor
//! combinatorics used by the theta quotients.

use std::collections::BTreeSet;
use std::fmt;

use crate::automorphy::{Automorphy, Character};
use crate::error::{Error, Result};
use crate::padic::ProjPoint;
use crate::theta::{theta_half_period, Polarization, ThetaValue};

/// Branch point label: `2k` is `a_k`, `2k + 1` is `b_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchLabel(pub usize);

impl BranchLabel {
    pub fn a(k: usize) -> Self {
        BranchLabel(2 * k)
    }

    pub fn b(k: usize) -> Self {
        BranchLabel(2 * k + 1)
    }

    /// The involution index `k`.
    pub fn index(&self) -> usize {
        self.0 / 2
    }

    pub fn is_a(&self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn all(genus: usize) -> impl Iterator<Item = BranchLabel> {
        (0..2 * genus + 2).map(BranchLabel)
    }

    pub fn point(&self, pairs: &[(ProjPoint, ProjPoint)]) -> Result<ProjPoint> {
        let (a, b) = pairs
            .get(self.index())
            .ok_or_else(|| Error::Spec(format!("no branch point {self}")))?;
        Ok(if self.is_a() { *a } else { *b })
    }
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}_{}",
            if self.is_a() { 'a' } else { 'b' },
            self.index()
        )
    }
}

/// A set of branch labels.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BranchSubset(BTreeSet<BranchLabel>);

impl BranchSubset {
    pub fn new(labels: impl IntoIterator<Item = usize>) -> Self {
        BranchSubset(labels.into_iter().map(BranchLabel).collect())
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// `{b_1, ..., b_g}`.
    pub fn odd_set(genus: usize) -> Self {
        BranchSubset((1..=genus).map(BranchLabel::b).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, l: BranchLabel) -> bool {
        self.0.contains(&l)
    }

    pub fn labels(&self) -> impl Iterator<Item = BranchLabel> + '_ {
        self.0.iter().copied()
    }

    pub fn with(&self, l: BranchLabel) -> Self {
        let mut s = self.clone();
        s.0.insert(l);
        s
    }

    pub fn without(&self, l: BranchLabel) -> Self {
        let mut s = self.clone();
        s.0.remove(&l);
        s
    }

    pub fn union(&self, other: &Self) -> Self {
        BranchSubset(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        BranchSubset(self.0.intersection(&other.0).copied().collect())
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        BranchSubset(self.0.symmetric_difference(&other.0).copied().collect())
    }

    /// Every subset of the `2g + 2` labels.
    pub fn all_subsets(genus: usize) -> impl Iterator<Item = BranchSubset> {
        let n = 2 * genus + 2;
        (0u64..1 << n).map(move |mask| BranchSubset::new((0..n).filter(|i| mask >> i & 1 == 1)))
    }

    /// The `k`-element subsets of `pool`, in lexicographic order.
    pub fn choose(pool: &[BranchLabel], k: usize) -> Vec<BranchSubset> {
        fn go(
            pool: &[BranchLabel],
            k: usize,
            start: usize,
            cur: &mut Vec<BranchLabel>,
            out: &mut Vec<BranchSubset>,
        ) {
            if cur.len() == k {
                out.push(BranchSubset(cur.iter().copied().collect()));
                return;
            }
            for i in start..pool.len() {
                cur.push(pool[i]);
                go(pool, k, i + 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(pool, k, 0, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for BranchSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// The character `c_i = ε_i ∏_j p_ij^{m_j}`, kept symbolically so theta can
/// be evaluated with exact cancellation. Its square is the lattice
/// character of `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfPeriod {
    pub m: Vec<i64>,
    pub eps: Vec<i8>,
    pub provenance: String,
}

impl HalfPeriod {
    pub fn identity(genus: usize) -> Self {
        HalfPeriod {
            m: vec![0; genus],
            eps: vec![1; genus],
            provenance: "1".into(),
        }
    }

    pub fn genus(&self) -> usize {
        self.m.len()
    }

    pub fn mul(&self, other: &HalfPeriod) -> HalfPeriod {
        HalfPeriod {
            m: self.m.iter().zip(&other.m).map(|(a, b)| a + b).collect(),
            eps: self
                .eps
                .iter()
                .zip(&other.eps)
                .map(|(a, b)| a * b)
                .collect(),
            provenance: format!("{} * {}", self.provenance, other.provenance),
        }
    }

    pub fn inverse(&self) -> HalfPeriod {
        HalfPeriod {
            m: self.m.iter().map(|k| -k).collect(),
            eps: self.eps.clone(),
            provenance: format!("({})^-1", self.provenance),
        }
    }

    /// Multiplies by the lattice character of `n`.
    pub fn shifted(&self, n: &[i64]) -> HalfPeriod {
        HalfPeriod {
            m: self.m.iter().zip(n).map(|(a, k)| a + 2 * k).collect(),
            eps: self.eps.clone(),
            provenance: format!("{} * lattice{:?}", self.provenance, n),
        }
    }

    /// `n` with `c^2` equal to the lattice character of `n`.
    pub fn square_lattice(&self) -> &[i64] {
        &self.m
    }

    /// `∏_i ε_i^{x_i}`.
    pub fn sign_at(&self, x: &[i64]) -> i8 {
        let odd: i64 = self
            .eps
            .iter()
            .zip(x)
            .filter(|(&e, _)| e < 0)
            .map(|(_, k)| k)
            .sum();
        if odd.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// Same characteristic: equal `ε` and `m` modulo 2.
    pub fn same_class(&self, other: &HalfPeriod) -> bool {
        self.eps == other.eps
            && self
                .m
                .iter()
                .zip(&other.m)
                .all(|(a, b)| (a - b).rem_euclid(2) == 0)
    }

    pub fn character(&self, pol: &Polarization) -> Result<Character> {
        let c = pol.half_character(&self.m)?;
        Ok(Character(
            c.0.into_iter()
                .zip(&self.eps)
                .map(|(x, &e)| if e < 0 { -x } else { x })
                .collect(),
        ))
    }

    pub fn theta(&self, pol: &Polarization, radius: usize) -> Result<ThetaValue> {
        theta_half_period(&self.m, &self.eps, pol, radius)
    }
}

/// Closed-form image `t(P) = c_{P, a_0}` of a branch point.
///
/// `a_k` has `m = e_k` with `ε_j = -1` exactly for `j < k`: its entries
/// are `p_kj` on and above the diagonal and `-p_kj` below it. `b_k` is
/// `a_k` with the `k`-th sign flipped, `b_0` is `(-1, ..., -1)` and `a_0`
/// is the identity.
pub fn point_character(label: BranchLabel, genus: usize) -> Result<HalfPeriod> {
    let k = label.index();
    if k > genus {
        return Err(Error::Spec(format!(
            "label {} out of range for genus {genus}",
            label.0
        )));
    }
    let mut h = HalfPeriod::identity(genus);
    h.provenance = label.to_string();
    if k == 0 {
        if !label.is_a() {
            h.eps = vec![-1; genus];
        }
        return Ok(h);
    }
    h.m[k - 1] = 1;
    for j in 0..k - 1 {
        h.eps[j] = -1;
    }
    if !label.is_a() {
        h.eps[k - 1] = -1;
    }
    Ok(h)
}

/// Result of comparing a closed form with its truncated-product value.
#[derive(Debug, Clone)]
pub struct CrossCheck {
    pub label: BranchLabel,
    pub closed_form: Character,
    pub embedded: Character,
    /// Smallest `v(closed_i - embedded_i)`.
    pub agreement: i64,
}

pub fn cross_check_character(
    label: BranchLabel,
    aut: &Automorphy,
    pol: &Polarization,
) -> Result<CrossCheck> {
    let g = pol.genus();
    let pairs = aut.group().pairs();
    let closed_form = point_character(label, g)?.character(pol)?;
    let embedded = aut.embed_point(&label.point(pairs)?, &pairs[0].0)?;
    let agreement = closed_form
        .entries()
        .iter()
        .zip(embedded.entries())
        .map(|(a, b)| (*a - *b).valuation_bound())
        .min()
        .unwrap_or(i64::MAX);
    if !closed_form.agrees_with(&embedded) {
        return Err(Error::Mismatch(format!(
            "closed form {closed_form} of {label} disagrees with the product value {embedded}"
        )));
    }
    Ok(CrossCheck {
        label,
        closed_form,
        embedded,
        agreement,
    })
}

/// `K = t(b_1) ⋯ t(b_g)`.
pub fn riemann_constant(genus: usize) -> Result<HalfPeriod> {
    let mut k = subset_character(&BranchSubset::odd_set(genus), genus)?;
    k.provenance = "K".into();
    Ok(k)
}

/// `c_P = ∏_{x ∈ P} t(x)`.
pub fn subset_character(p: &BranchSubset, genus: usize) -> Result<HalfPeriod> {
    let mut acc = HalfPeriod::identity(genus);
    for l in p.labels() {
        acc = acc.mul(&point_character(l, genus)?);
    }
    acc.provenance = format!("c{p}");
    Ok(acc)
}

/// `c_{(P ∪ {s}) △ O}` with `O = {b_1, ..., b_g}`.
pub fn odd_set_character(p: &BranchSubset, s: BranchLabel, genus: usize) -> Result<HalfPeriod> {
    if p.contains(s) {
        return Err(Error::LabelCollision(s.0));
    }
    subset_character(
        &p.with(s)
            .symmetric_difference(&BranchSubset::odd_set(genus)),
        genus,
    )
}

/// The characteristic argument `c · c_P^{-1} · K`.
pub fn characteristic_shift(p: &BranchSubset, genus: usize) -> Result<HalfPeriod> {
    Ok(subset_character(p, genus)?
        .inverse()
        .mul(&riemann_constant(genus)?))
}

/// The value `s` attached to `U = 2(P_{i_1} + ... + P_{i_r}) + P_{j_1} + ... + P_{j_s}`
/// with `2s + r = g - 1`. It equals `i(U) - 1`, the dimension of the
/// linear system `|K_X - U|`.
pub fn specialty_index(r: usize, s: usize, genus: usize) -> Result<usize> {
    if genus == 0 || 2 * s + r != genus - 1 {
        return Err(Error::ConstraintViolated(format!(
            "2s + r = {} but g - 1 = {}",
            2 * s + r,
            genus as i64 - 1
        )));
    }
    Ok(s)
}

/// `D` has one point from each pair `(a_i, b_i)`, `i = 1..g`.
pub fn is_nonspecial(d: &BranchSubset, genus: usize) -> bool {
    let indices: BTreeSet<usize> = d.labels().map(|l| l.index()).collect();
    d.len() == genus && indices.len() == genus && indices.iter().all(|&i| (1..=genus).contains(&i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_characters() {
        let g = 2;
        assert_eq!(point_character(BranchLabel(0), g).unwrap().eps, vec![1, 1]);
        let b0 = point_character(BranchLabel(1), g).unwrap();
        assert_eq!((b0.m.clone(), b0.eps.clone()), (vec![0, 0], vec![-1, -1]));
        let b1 = point_character(BranchLabel(3), g).unwrap();
        assert_eq!((b1.m.clone(), b1.eps.clone()), (vec![1, 0], vec![-1, 1]));
        let a2 = point_character(BranchLabel(4), g).unwrap();
        assert_eq!((a2.m.clone(), a2.eps.clone()), (vec![0, 1], vec![-1, 1]));
        assert!(point_character(BranchLabel(6), g).is_err());
    }

    #[test]
    fn odd_set_examples() {
        let c = odd_set_character(&BranchSubset::empty(), BranchLabel(2), 1).unwrap();
        assert_eq!(c, subset_character(&BranchSubset::new([2, 3]), 1).unwrap());
        let c = odd_set_character(&BranchSubset::new([2]), BranchLabel(4), 2).unwrap();
        assert_eq!(
            c.m,
            subset_character(&BranchSubset::new([2, 3, 4, 5]), 2)
                .unwrap()
                .m
        );
        assert_eq!(
            odd_set_character(&BranchSubset::new([2]), BranchLabel(2), 2).unwrap_err(),
            Error::LabelCollision(2)
        );
    }

    #[test]
    fn specialty_examples() {
        assert_eq!(specialty_index(0, 1, 3), Ok(1));
        assert_eq!(specialty_index(0, 0, 1), Ok(0));
        assert!(matches!(
            specialty_index(1, 1, 2),
            Err(Error::ConstraintViolated(_))
        ));
        assert!(is_nonspecial(&BranchSubset::new([2, 5]), 2));
        assert!(!is_nonspecial(&BranchSubset::new([0, 3]), 2));
        assert!(!is_nonspecial(&BranchSubset::new([2]), 2));
        assert!(!is_nonspecial(&BranchSubset::new([2, 3]), 2));
    }
}

//! Theta-quotient cross ratios of the branch points and the normalized
//! coordinates `λ_i` of `y^2 = x(x-1) ∏ (x - λ_i)`.
//!
//! For a partition pair `P_1 = S + l`, `P_2 = S + m` the quotient
//! `G(z) = t(z)^{m_{P_2} - m_{P_1}} θ²(t(z) u_1) / θ²(t(z) u_2)`,
//! `u_j = c_{P_j}^{-1} K`, is invariant under Γ and has divisor
//! `2P_l - 2P_m`, so `G(P_h)/G(P_k)` is the cross ratio
//! `((λ_h - λ_l)(λ_k - λ_m)) / ((λ_h - λ_m)(λ_k - λ_l))`.

use std::collections::HashMap;

use crate::automorphy::{Automorphy, Character};
use crate::characteristics::{
    characteristic_shift, odd_set_character, point_character, BranchLabel, BranchSubset, HalfPeriod,
};
use crate::error::{Error, Result};
use crate::moebius::{MoebiusMap, Word};
use crate::padic::{Padic, PadicContext, ProjPoint};
use crate::theta::{theta_value, Polarization, ThetaValue};

/// Two `g`-subsets differing in one label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPair {
    pub p1: BranchSubset,
    pub p2: BranchSubset,
    /// The label of `P_1 \ P_2`.
    pub l: BranchLabel,
    /// The label of `P_2 \ P_1`.
    pub m: BranchLabel,
}

impl PartitionPair {
    pub fn new(p1: BranchSubset, p2: BranchSubset, genus: usize) -> Result<Self> {
        if p1.len() != genus || p2.len() != genus {
            return Err(Error::Spec(format!("partitions must have {genus} labels")));
        }
        let odd = BranchSubset::odd_set(genus);
        if p1 == odd || p2 == odd {
            return Err(Error::Spec(format!("partition equals {odd}")));
        }
        if let Some(bad) = p1.union(&p2).labels().find(|l| l.index() > genus) {
            return Err(Error::Spec(format!("label {} out of range", bad.0)));
        }
        let only1: Vec<BranchLabel> = p1.labels().filter(|x| !p2.contains(*x)).collect();
        let only2: Vec<BranchLabel> = p2.labels().filter(|x| !p1.contains(*x)).collect();
        match (&only1[..], &only2[..]) {
            ([l], [m]) => Ok(PartitionPair {
                l: *l,
                m: *m,
                p1,
                p2,
            }),
            _ => Err(Error::Spec(format!(
                "{p1} and {p2} must differ in exactly one label"
            ))),
        }
    }

    /// `P_1 = S + l`, `P_2 = S + m`.
    pub fn from_common(
        s: &BranchSubset,
        l: BranchLabel,
        m: BranchLabel,
        genus: usize,
    ) -> Result<Self> {
        Self::new(s.with(l), s.with(m), genus)
    }

    pub fn swapped(&self) -> Self {
        PartitionPair {
            p1: self.p2.clone(),
            p2: self.p1.clone(),
            l: self.m,
            m: self.l,
        }
    }

    fn shifts(&self, genus: usize) -> Result<(HalfPeriod, HalfPeriod, Vec<i64>)> {
        let u1 = characteristic_shift(&self.p1, genus)?;
        let u2 = characteristic_shift(&self.p2, genus)?;
        let x = u1.m.iter().zip(&u2.m).map(|(a, b)| a - b).collect();
        Ok((u1, u2, x))
    }
}

/// Evaluates theta at half periods, memoized by characteristic data.
#[derive(Debug)]
pub struct ThetaTable<'a> {
    pol: &'a Polarization,
    radius: usize,
    cache: HashMap<(Vec<i64>, Vec<i8>), ThetaValue>,
}

impl<'a> ThetaTable<'a> {
    pub fn new(pol: &'a Polarization, radius: usize) -> Self {
        ThetaTable {
            pol,
            radius,
            cache: HashMap::new(),
        }
    }

    pub fn polarization(&self) -> &Polarization {
        self.pol
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn theta(&mut self, h: &HalfPeriod) -> Result<ThetaValue> {
        let key = (h.m.clone(), h.eps.clone());
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let v = h.theta(self.pol, self.radius)?;
        self.cache.insert(key, v.clone());
        Ok(v)
    }

    fn theta_sq(&mut self, h: &HalfPeriod) -> Result<Padic> {
        let t = self.theta(h)?;
        Ok(if t.exact_zero {
            Padic::zero(self.pol.ctx())
        } else {
            t.value * t.value
        })
    }
}

fn nonzero(x: Padic, what: impl FnOnce() -> String) -> Result<Padic> {
    if x.is_zero() {
        Err(Error::ZeroDenominator(what()))
    } else {
        Ok(x)
    }
}

/// `G(P)` at a branch point, from closed-form characters only.
pub fn theta_ratio_at(
    pp: &PartitionPair,
    label: BranchLabel,
    table: &mut ThetaTable,
) -> Result<Padic> {
    let g = table.pol.genus();
    let (u1, u2, x) = pp.shifts(g)?;
    let c = point_character(label, g)?;
    let num = table.theta_sq(&c.mul(&u1))?;
    let den = nonzero(table.theta_sq(&c.mul(&u2))?, || {
        format!("θ_{} vanishes at {label}", pp.p2)
    })?;
    let pre = c.character(table.pol)?.eval(&x)?;
    (pre * num).checked_div(&den)
}

/// `G(z)` at an arbitrary character `t = t(z)`.
pub fn theta_ratio_general(
    pp: &PartitionPair,
    t: &Character,
    pol: &Polarization,
    radius: usize,
) -> Result<Padic> {
    let g = pol.genus();
    let (u1, u2, x) = pp.shifts(g)?;
    let th = |u: &HalfPeriod| -> Result<ThetaValue> {
        theta_value(&(t * &u.character(pol)?), pol, radius)
    };
    let n = th(&u1)?;
    let d = th(&u2)?;
    let den = nonzero(d.value * d.value, || {
        format!("θ_{} vanishes at the sample", pp.p2)
    })?;
    (t.eval(&x)? * n.value * n.value).checked_div(&den)
}

/// `CR(h,k; l,m) = G(P_h) / G(P_k)`.
pub fn cross_ratio(
    pp: &PartitionPair,
    h: BranchLabel,
    k: BranchLabel,
    table: &mut ThetaTable,
) -> Result<Padic> {
    if h == k {
        return Ok(table.pol.ctx().one());
    }
    check_auxiliary(pp, h, k)?;
    let gh = theta_ratio_at(pp, h, table)?;
    let gk = nonzero(theta_ratio_at(pp, k, table)?, || {
        format!("G vanishes at {k}")
    })?;
    gh.checked_div(&gk)
}

fn check_auxiliary(pp: &PartitionPair, h: BranchLabel, k: BranchLabel) -> Result<()> {
    for x in [h, k] {
        if pp.p1.contains(x) || pp.p2.contains(x) {
            return Err(Error::Spec(format!(
                "auxiliary label {x} lies in {} or {}",
                pp.p1, pp.p2
            )));
        }
    }
    Ok(())
}

/// The same cross ratio from the four odd-set thetas
/// `θ(c_{O_1h})² θ(c_{O_2k})² / (θ(c_{O_2h})² θ(c_{O_1k})²)`, each
/// normalized by `P(m,m)^{1/2}` so the value does not depend on the lattice
/// representative of the characteristic.
pub fn cross_ratio_odd_sets(
    pp: &PartitionPair,
    h: BranchLabel,
    k: BranchLabel,
    table: &mut ThetaTable,
) -> Result<Padic> {
    if h == k {
        return Ok(table.pol.ctx().one());
    }
    check_auxiliary(pp, h, k)?;
    let g = table.pol.genus();
    let o1h = odd_set_character(&pp.p1, h, g)?;
    let o2k = odd_set_character(&pp.p2, k, g)?;
    let o2h = odd_set_character(&pp.p2, h, g)?;
    let o1k = odd_set_character(&pp.p1, k, g)?;
    let mut e = vec![vec![0i64; g]; g];
    for (c, s) in [(&o1h, 1), (&o2k, 1), (&o2h, -1), (&o1k, -1)] {
        for i in 0..g {
            e[i][i] += s * c.m[i] * c.m[i];
            for j in i + 1..g {
                e[i][j] += s * 2 * c.m[i] * c.m[j];
            }
        }
    }
    for i in 0..g {
        if e[i][i] % 2 != 0 {
            return Err(Error::Mismatch(
                "normalization exponent is not integral".into(),
            ));
        }
        for j in i..g {
            e[i][j] /= 2;
        }
    }
    let norm = table.pol.monomial(&e)?;
    let (_, _, x) = pp.shifts(g)?;
    let sign = point_character(h, g)?.sign_at(&x) * point_character(k, g)?.sign_at(&x);
    let num = table.theta_sq(&o1h)? * table.theta_sq(&o2k)?;
    let den = nonzero(table.theta_sq(&o2h)? * table.theta_sq(&o1k)?, || {
        "odd-set theta vanishes".into()
    })?;
    let v = (norm * num).checked_div(&den)?;
    Ok(if sign < 0 { -v } else { v })
}

/// Which labels go to `∞`, `0` and `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Normalization {
    pub infinity: BranchLabel,
    pub zero: BranchLabel,
    pub one: BranchLabel,
}

impl Normalization {
    pub fn default_labels() -> Self {
        Normalization {
            infinity: BranchLabel(0),
            zero: BranchLabel(1),
            one: BranchLabel(2),
        }
    }

    fn labels(&self) -> [BranchLabel; 3] {
        [self.infinity, self.zero, self.one]
    }

    fn coordinate(&self, l: BranchLabel, ctx: PadicContext) -> ProjPoint {
        if l == self.infinity {
            ProjPoint::infinity(ctx)
        } else if l == self.zero {
            ProjPoint::from_int(ctx, 0)
        } else {
            ProjPoint::from_int(ctx, 1)
        }
    }
}

/// One derivation of a `λ`.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub partition: PartitionPair,
    pub h: BranchLabel,
    pub value: Padic,
}

#[derive(Debug, Clone)]
pub struct LambdaEntry {
    pub label: BranchLabel,
    pub value: Padic,
    pub derivations: Vec<Derivation>,
    /// `min v(λ - λ')` over pairs of derivations (`i64::MAX` for a single one).
    pub spread: i64,
}

#[derive(Debug, Clone)]
pub struct LambdaReport {
    pub normalization: Normalization,
    pub entries: Vec<LambdaEntry>,
    /// Worst spread over all labels.
    pub spread: i64,
}

/// Solves `cross_ratio(a, b, z, w) = r` for `w`.
fn solve_cross_ratio(a: &ProjPoint, b: &ProjPoint, z: &ProjPoint, r: &Padic) -> Result<ProjPoint> {
    let (a1, a2) = a.coords();
    let (b1, b2) = b.coords();
    // f(w) = (w - b) / (w - a)
    let f = MoebiusMap::new([[*b2, -*b1], [*a2, -*a1]])?;
    let fz = f.apply(z)?;
    let (s1, s2) = fz.coords();
    f.inverse().apply(&ProjPoint::new(*r * *s1, *s2)?)
}

/// All derivations of `λ_x` from partition pairs whose differing labels and
/// first auxiliary label are the three normalized points.
pub fn derive_lambda(
    x: BranchLabel,
    norm: Normalization,
    table: &mut ThetaTable,
) -> Result<Vec<Derivation>> {
    let g = table.pol.genus();
    let ctx = table.pol.ctx();
    let fixed = norm.labels();
    let pool: Vec<BranchLabel> = BranchLabel::all(g)
        .filter(|l| *l != x && !fixed.contains(l))
        .collect();
    let mut out = Vec::new();
    for (hi, li, mi) in [
        (0, 1, 2),
        (0, 2, 1),
        (1, 0, 2),
        (1, 2, 0),
        (2, 0, 1),
        (2, 1, 0),
    ] {
        let (h, l, m) = (fixed[hi], fixed[li], fixed[mi]);
        for s in BranchSubset::choose(&pool, g - 1) {
            let Ok(pp) = PartitionPair::from_common(&s, l, m, g) else {
                continue;
            };
            let cr = match cross_ratio(&pp, h, x, table) {
                Ok(v) => v,
                Err(Error::ZeroDenominator(_)) => continue,
                Err(e) => return Err(e),
            };
            let w = solve_cross_ratio(
                &norm.coordinate(l, ctx),
                &norm.coordinate(m, ctx),
                &norm.coordinate(h, ctx),
                &cr,
            )?;
            let value = w
                .affine()
                .ok_or_else(|| Error::PoleHit(format!("λ for {x} is infinite")))?;
            out.push(Derivation {
                partition: pp,
                h,
                value,
            });
        }
    }
    Ok(out)
}

pub fn recover_lambdas(
    table: &mut ThetaTable,
    norm: Normalization,
    tolerance: i64,
) -> Result<LambdaReport> {
    let g = table.pol.genus();
    let fixed = norm.labels();
    if fixed.iter().any(|l| l.index() > g)
        || fixed[0] == fixed[1]
        || fixed[1] == fixed[2]
        || fixed[0] == fixed[2]
    {
        return Err(Error::Spec(
            "normalization needs three distinct labels".into(),
        ));
    }
    let mut entries = Vec::new();
    for x in BranchLabel::all(g).filter(|l| !fixed.contains(l)) {
        let derivations = derive_lambda(x, norm, table)?;
        if derivations.len() < 2 {
            return Err(Error::InconsistentDerivations(format!(
                "only {} derivations for {x}",
                derivations.len()
            )));
        }
        let mut spread = i64::MAX;
        for i in 0..derivations.len() {
            for j in i + 1..derivations.len() {
                spread =
                    spread.min((derivations[i].value - derivations[j].value).valuation_bound());
            }
        }
        if spread < tolerance {
            return Err(Error::InconsistentDerivations(format!(
                "derivations of {x} agree only to valuation {spread}"
            )));
        }
        entries.push(LambdaEntry {
            label: x,
            value: derivations[0].value,
            derivations,
            spread,
        });
    }
    let spread = entries.iter().map(|e| e.spread).min().unwrap_or(i64::MAX);
    Ok(LambdaReport {
        normalization: norm,
        entries,
        spread,
    })
}

/// Invariance of `G` at one sample point.
#[derive(Debug, Clone)]
pub struct ProbeSample {
    pub point: ProjPoint,
    /// `v(G(γ_j z)/G(z) - 1)`, `j = 1..g`.
    pub gamma: Vec<i64>,
    /// `v(G(s_0 z)/G(z) - 1)`.
    pub s0: i64,
}

impl ProbeSample {
    pub fn worst(&self) -> i64 {
        self.gamma
            .iter()
            .copied()
            .chain([self.s0])
            .min()
            .unwrap_or(i64::MAX)
    }
}

/// Evaluates `G` through truncated embeddings at `z`, `γ_j z` and `s_0 z`.
pub fn invariance_probe(
    aut: &Automorphy,
    pol: &Polarization,
    pp: &PartitionPair,
    radius: usize,
    samples: &[ProjPoint],
) -> Result<Vec<ProbeSample>> {
    let grp = aut.group();
    let g = grp.genus();
    let base = grp.pairs()[0].0;
    let mut out = Vec::new();
    for z in samples {
        if grp
            .pairs()
            .iter()
            .any(|(a, b)| a.coincides(z) || b.coincides(z))
        {
            return Err(Error::PoleHit(format!("sample {z} is a branch point")));
        }
        let mut pts = vec![*z];
        for j in 1..=g {
            pts.push(grp.act(&Word::generator(j), z)?);
        }
        pts.push(grp.involution(0).apply(z)?);
        let ts = aut.embed_points(&pts, &base)?;
        let vals = ts
            .iter()
            .map(|t| theta_ratio_general(pp, t, pol, radius))
            .collect::<Result<Vec<_>>>()?;
        let rel = |w: &Padic| -> Result<i64> {
            Ok((w.checked_div(&vals[0])? - pol.ctx().one()).valuation_bound())
        };
        let gamma = (1..=g).map(|j| rel(&vals[j])).collect::<Result<Vec<_>>>()?;
        let s0 = rel(&vals[g + 1])?;
        out.push(ProbeSample {
            point: *z,
            gamma,
            s0,
        });
    }
    Ok(out)
}

//! Automorphy factors `c_{a,b}(γ)` with the period matrix and the embedding
//! `t(x) = c_{x, base}` built from them, evaluated as grouped products over Γ.
//!
//! The factor of `u_{a,b}` at `h ∈ Γ` is paired with the same factor at the
//! shifted argument, so every exported quantity is a product of cross ratios
//! `ρ(ha, hb; γz, z)`, which tend to 1 along the orbit. Convention:
//! `c_{a,b}(γ) = u_{a,b}(γz) / u_{a,b}(z)`.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::moebius::{CertificateReport, WhittakerGroup, Word};
use crate::padic::{cross_ratio, Padic, PadicContext, ProjPoint};

/// The grouped cross ratio `((z - a)(w - b)) / ((z - b)(w - a))`.
pub fn cross_factor(a: &ProjPoint, b: &ProjPoint, z: &ProjPoint, w: &ProjPoint) -> Result<Padic> {
    if a.coincides(b) || z.coincides(w) {
        return Ok(Padic::one(a.ctx()));
    }
    cross_ratio(a, b, z, w)
}

/// Truncation controls for the orbit products.
#[derive(Debug, Clone)]
pub struct TruncationParams {
    /// Maximal word length `L` in the involutions (even, `>= 2`).
    pub max_len: usize,
    /// Base points outside every inner certificate ball (at least two);
    /// each product uses the first two that avoid its own points.
    pub probes: Vec<ProjPoint>,
    /// Required relative precision of every product.
    pub tail_tolerance: i64,
}

/// An element of Hom(Γ, Q_p^*), given by its values on `γ_1..γ_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct Character(pub Vec<Padic>);

impl Character {
    pub fn identity(ctx: PadicContext, genus: usize) -> Self {
        Character(vec![ctx.one(); genus])
    }

    pub fn constant(value: Padic, genus: usize) -> Self {
        Character(vec![value; genus])
    }

    pub fn genus(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Padic] {
        &self.0
    }

    pub fn inverse(&self) -> Result<Self> {
        self.0
            .iter()
            .map(|x| x.inv())
            .collect::<Result<Vec<_>>>()
            .map(Character)
    }

    /// Value on `γ_1^{n_1} ⋯ γ_g^{n_g}`.
    pub fn eval(&self, n: &[i64]) -> Result<Padic> {
        let ctx = self.0[0].ctx();
        let mut acc = ctx.one();
        for (c, &k) in self.0.iter().zip(n) {
            if k != 0 {
                acc = acc * c.pow(k)?;
            }
        }
        Ok(acc)
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        self.0
            .iter()
            .map(|x| x.pow(k))
            .collect::<Result<Vec<_>>>()
            .map(Character)
    }

    /// Componentwise agreement to the known precision.
    pub fn agrees_with(&self, other: &Character) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.agrees_with(b))
    }

    /// Componentwise `v(self_i - other_i) >= tol`.
    pub fn eq_to_precision(&self, other: &Character, tol: i64) -> bool {
        self.0.len() == other.0.len()
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| a.eq_to_precision(b, tol))
    }

    /// Smallest absolute precision among the entries.
    pub fn absolute_precision(&self) -> i64 {
        self.0
            .iter()
            .map(Padic::absolute_precision)
            .min()
            .unwrap_or(i64::MAX)
    }
}

impl Mul for &Character {
    type Output = Character;
    fn mul(self, rhs: &Character) -> Character {
        Character(self.0.iter().zip(&rhs.0).map(|(a, b)| *a * *b).collect())
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// The matrix `Q_ij = c_{γ_i}(γ_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMatrix {
    pub entries: Vec<Vec<Padic>>,
    /// Relative tail bound shared by the entries.
    pub tail: i64,
}

impl PeriodMatrix {
    pub fn genus(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Padic {
        &self.entries[i][j]
    }

    /// Integer matrix of valuations `v(Q_ij)`.
    pub fn valuation_matrix(&self) -> Result<Vec<Vec<i64>>> {
        self.entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|q| {
                        q.valuation().ok_or_else(|| {
                            Error::PrecisionExhausted("period entry is zero to precision".into())
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// The lattice character of `n`: entry `i` is `∏_j Q_ij^{n_j}`.
    pub fn lattice_character(&self, n: &[i64]) -> Result<Character> {
        let g = self.genus();
        (0..g)
            .map(|i| {
                let mut acc = self.entries[0][0].ctx().one();
                for (j, &k) in n.iter().enumerate() {
                    if k != 0 {
                        acc = acc * self.entries[i][j].pow(k)?;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()
            .map(Character)
    }
}

/// Leading principal minors of an integer matrix, by fraction-free
/// elimination.
pub fn leading_minors(m: &[Vec<i64>]) -> Vec<i128> {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut minors = Vec::with_capacity(n);
    let mut prev = 1i128;
    for k in 0..n {
        minors.push(a[k][k]);
        if a[k][k] == 0 {
            minors.resize(n, 0);
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    minors
}

pub fn is_positive_definite(m: &[Vec<i64>]) -> bool {
    leading_minors(m).iter().all(|&d| d > 0)
}

struct Job {
    a: usize,
    b: usize,
    z: ProjPoint,
    w: ProjPoint,
}

struct OrbitProducts {
    values: Vec<Padic>,
    /// Lower bounds on `min v(ρ - 1)` per word length (index = length).
    min_term_valuation: Vec<Option<i64>>,
}

/// Evaluates `∏_{h ∈ Γ, |h| <= L} ρ(h·pts[a], h·pts[b]; z, w)` for each job,
/// walking the reduced words depth first by prepending letters.
fn orbit_products(
    group: &WhittakerGroup,
    points: &[ProjPoint],
    jobs: &[Job],
    max_len: usize,
) -> Result<OrbitProducts> {
    let ctx = group.ctx();
    let mut num = vec![ctx.one(); jobs.len()];
    let mut den = vec![ctx.one(); jobs.len()];
    let mut min_val: Vec<Option<i64>> = vec![None; max_len + 1];
    let zw: Vec<i64> = jobs
        .iter()
        .map(|j| j.z.bracket(&j.w).valuation_bound())
        .collect();

    struct Frame {
        images: Vec<ProjPoint>,
        first: Option<usize>,
        len: usize,
    }
    let mut stack = vec![Frame {
        images: points.to_vec(),
        first: None,
        len: 0,
    }];
    while let Some(frame) = stack.pop() {
        if frame.len % 2 == 0 {
            for (k, job) in jobs.iter().enumerate() {
                if job.z.coincides(&job.w) {
                    continue;
                }
                let ha = &frame.images[job.a];
                let hb = &frame.images[job.b];
                let za = job.z.bracket(ha);
                let zb = job.z.bracket(hb);
                let wa = job.w.bracket(ha);
                let wb = job.w.bracket(hb);
                if za.is_zero() || zb.is_zero() || wa.is_zero() || wb.is_zero() {
                    return Err(Error::PoleHit(format!(
                        "orbit point of word length {} meets a base point",
                        frame.len
                    )));
                }
                num[k] = num[k] * za * wb;
                den[k] = den[k] * zb * wa;
                let ab = ha.bracket(hb);
                if !ab.is_exact_zero() && frame.len > 0 {
                    // ρ - 1 = (ha - hb)(z - w) / ((z - hb)(w - ha))
                    let v =
                        ab.valuation_bound() + zw[k] - zb.valuation_bound() - wa.valuation_bound();
                    let slot = &mut min_val[frame.len];
                    *slot = Some(slot.map_or(v, |m| m.min(v)));
                }
            }
        }
        if frame.len < max_len {
            for l in (0..group.genus() + 1).rev() {
                if frame.first == Some(l) {
                    continue;
                }
                let s = group.involution(l);
                let images = frame
                    .images
                    .iter()
                    .map(|p| s.apply(p))
                    .collect::<Result<Vec<_>>>()?;
                stack.push(Frame {
                    images,
                    first: Some(l),
                    len: frame.len + 1,
                });
            }
        }
    }
    let values = num
        .iter()
        .zip(&den)
        .map(|(n, d)| n.checked_div(d))
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbitProducts {
        values,
        min_term_valuation: min_val,
    })
}

/// Linear tail model `v(ρ_h - 1) >= slope·|h| - offset` fitted to the
/// observed term valuations; returns the bound for all words longer than
/// `word_len` (the next even length).
fn fitted_tail(slope: i64, min_val: &[Option<i64>], word_len: usize) -> i64 {
    if word_len < 2 {
        return 0;
    }
    let offset = min_val
        .iter()
        .enumerate()
        .take(word_len + 1)
        .filter_map(|(l, v)| v.map(|v| slope * l as i64 - v))
        .max()
        .unwrap_or(0);
    let next = (word_len - word_len % 2 + 2) as i64;
    (slope * next - offset).max(0)
}

/// Automorphy computations for a certified Whittaker group.
#[derive(Debug, Clone)]
pub struct Automorphy<'a> {
    group: &'a WhittakerGroup,
    slope: i64,
    tp: TruncationParams,
}

impl<'a> Automorphy<'a> {
    pub fn new(
        group: &'a WhittakerGroup,
        cert: &CertificateReport,
        tp: TruncationParams,
    ) -> Result<Self> {
        if !cert.passed {
            return Err(Error::Spec("ping-pong certificate did not pass".into()));
        }
        if tp.max_len < 2 || !tp.max_len.is_multiple_of(2) {
            return Err(Error::Spec(format!(
                "word length {} must be even and >= 2",
                tp.max_len
            )));
        }
        if tp.probes.len() < 2 {
            return Err(Error::Spec("need at least two probe points".into()));
        }
        for z in &tp.probes {
            if !cert.is_outside_inner(z) {
                return Err(Error::Spec(format!(
                    "probe point {z} lies inside a certificate ball"
                )));
            }
        }
        let slope = cert.contraction_gap.unwrap_or(1).max(1);
        Ok(Automorphy { group, slope, tp })
    }

    pub fn group(&self) -> &WhittakerGroup {
        self.group
    }

    pub fn params(&self) -> &TruncationParams {
        &self.tp
    }

    pub fn ctx(&self) -> PadicContext {
        self.group.ctx()
    }

    /// Per-letter slope of the tail model (the certificate's contraction gap).
    pub fn slope(&self) -> i64 {
        self.slope
    }

    fn check_tail(&self, tail: i64, min_val: &[Option<i64>]) -> Result<()> {
        if tail >= self.tp.tail_tolerance {
            return Ok(());
        }
        let mut suggested = self.tp.max_len + 2;
        while fitted_tail(self.slope, min_val, suggested) < self.tp.tail_tolerance
            && suggested < 1000
        {
            suggested += 2;
        }
        Err(Error::TailBoundNotMet {
            achieved: tail,
            requested: self.tp.tail_tolerance,
            suggested_len: suggested,
        })
    }

    /// Two probes distinct from `pts` and from their images under one letter.
    fn probes_avoiding(&self, pts: &[ProjPoint]) -> Result<[ProjPoint; 2]> {
        let mut avoid = pts.to_vec();
        for p in pts {
            for s in self.group.involutions() {
                avoid.push(s.apply(p)?);
            }
        }
        let found: Vec<ProjPoint> = self
            .tp
            .probes
            .iter()
            .filter(|z| avoid.iter().all(|p| !p.coincides(z)))
            .take(2)
            .copied()
            .collect();
        match found[..] {
            [z0, z1] => Ok([z0, z1]),
            _ => Err(Error::PoleHit("no probe point avoids the orbit".into())),
        }
    }

    /// `c_{a,b}(γ)` for each word in `gammas`, computed at both probe points;
    /// the two evaluations must agree.
    pub fn c_factors(&self, a: &ProjPoint, b: &ProjPoint, gammas: &[Word]) -> Result<Vec<Padic>> {
        if let Some(w) = gammas.iter().find(|w| !w.is_even()) {
            return Err(Error::Spec(format!("word {w} is not in Γ")));
        }
        let probes = self.probes_avoiding(&[*a, *b])?;
        let mut jobs = Vec::new();
        for z in &probes {
            for w in gammas {
                jobs.push(Job {
                    a: 0,
                    b: 1,
                    z: self.group.act(w, z)?,
                    w: *z,
                });
            }
        }
        let out = orbit_products(self.group, &[*a, *b], &jobs, self.tp.max_len)?;
        let tail = fitted_tail(self.slope, &out.min_term_valuation, self.tp.max_len);
        self.check_tail(tail, &out.min_term_valuation)?;
        let n = gammas.len();
        let mut result = Vec::with_capacity(n);
        for k in 0..n {
            result.push(self.merge_probes(&out.values[k], &out.values[n + k], tail)?);
        }
        Ok(result)
    }

    pub fn c_factor(&self, a: &ProjPoint, b: &ProjPoint, gamma: &Word) -> Result<Padic> {
        Ok(self.c_factors(a, b, std::slice::from_ref(gamma))?.remove(0))
    }

    /// The character `c_{a,b}` on the free generators.
    pub fn c_character(&self, a: &ProjPoint, b: &ProjPoint) -> Result<Character> {
        let gens: Vec<Word> = (1..=self.group.genus()).map(Word::generator).collect();
        self.c_factors(a, b, &gens).map(Character)
    }

    /// `t(x) = c_{x, base}`.
    pub fn embed_point(&self, x: &ProjPoint, base: &ProjPoint) -> Result<Character> {
        self.c_character(x, base)
    }

    /// `t(x)` for several points in one pass over Γ.
    pub fn embed_points(&self, xs: &[ProjPoint], base: &ProjPoint) -> Result<Vec<Character>> {
        let g = self.group.genus();
        let mut points = vec![*base];
        points.extend_from_slice(xs);
        let probes = self.probes_avoiding(&points)?;
        let mut jobs = Vec::new();
        for z in &probes {
            for i in 0..xs.len() {
                for j in 1..=g {
                    jobs.push(Job {
                        a: i + 1,
                        b: 0,
                        z: self.group.act(&Word::generator(j), z)?,
                        w: *z,
                    });
                }
            }
        }
        let out = orbit_products(self.group, &points, &jobs, self.tp.max_len)?;
        let tail = fitted_tail(self.slope, &out.min_term_valuation, self.tp.max_len);
        self.check_tail(tail, &out.min_term_valuation)?;
        let half = jobs.len() / 2;
        let mut result = Vec::with_capacity(xs.len());
        for i in 0..xs.len() {
            let mut entries = Vec::with_capacity(g);
            for j in 0..g {
                let k = i * g + j;
                entries.push(self.merge_probes(&out.values[k], &out.values[half + k], tail)?);
            }
            result.push(Character(entries));
        }
        Ok(result)
    }

    fn merge_probes(&self, v0: &Padic, v1: &Padic, tail: i64) -> Result<Padic> {
        let v0 = v0.truncate_rel(tail as u32);
        let v1 = v1.truncate_rel(tail as u32);
        if !v0.agrees_with(&v1) {
            return Err(Error::Mismatch(format!(
                "c-factor depends on the base point: {v0} vs {v1}"
            )));
        }
        Ok(if v0.relative_precision() <= v1.relative_precision() {
            v0
        } else {
            v1
        })
    }

    /// `Q_ij = c_{γ_i x, x}(γ_j)` with `x = a_0`. This orientation makes the
    /// diagonal of the valuation matrix positive and satisfies
    /// `c_{a_i,a_0}^2 = c_{γ_i}`.
    pub fn period_matrix(&self) -> Result<PeriodMatrix> {
        let g = self.group.genus();
        let x = self.group.pairs()[0].0;
        let mut entries = Vec::with_capacity(g);
        let mut tail = i64::MAX;
        for i in 1..=g {
            let gx = self.group.act(&Word::generator(i), &x)?;
            let row = self.c_character(&gx, &x)?;
            tail = tail.min(
                row.0
                    .iter()
                    .map(|q| q.relative_precision() as i64)
                    .min()
                    .unwrap_or(0),
            );
            entries.push(row.0);
        }
        for i in 0..g {
            for j in 0..i {
                if !entries[i][j].agrees_with(&entries[j][i]) {
                    return Err(Error::Mismatch(format!(
                        "Q_{}{} != Q_{}{}",
                        i + 1,
                        j + 1,
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        let q = PeriodMatrix { entries, tail };
        if !is_positive_definite(&q.valuation_matrix()?) {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(q)
    }

    /// Relative tail bound after words of length `word_len`, fitted on the
    /// period-matrix products.
    pub fn tail_bound(&self, word_len: usize) -> Result<i64> {
        Ok(self.tail_profile(word_len)?.1)
    }

    /// Observed minimal term valuations per word length up to `word_len`,
    /// and the fitted tail bound.
    pub fn tail_profile(&self, word_len: usize) -> Result<(Vec<Option<i64>>, i64)> {
        if word_len == 0 {
            return Ok((vec![None], 0));
        }
        let x = self.group.pairs()[0].0;
        let points: Vec<ProjPoint> = std::iter::once(Ok(x))
            .chain((1..=self.group.genus()).map(|i| self.group.act(&Word::generator(i), &x)))
            .collect::<Result<_>>()?;
        let [z, _] = self.probes_avoiding(&points)?;
        let mut jobs = Vec::new();
        for i in 1..points.len() {
            for j in 1..=self.group.genus() {
                jobs.push(Job {
                    a: i,
                    b: 0,
                    z: self.group.act(&Word::generator(j), &z)?,
                    w: z,
                });
            }
        }
        let out = orbit_products(self.group, &points, &jobs, word_len)?;
        let t = fitted_tail(self.slope, &out.min_term_valuation, word_len);
        Ok((out.min_term_valuation, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PBall;

    fn ctx() -> PadicContext {
        PadicContext::new(5, 12).unwrap()
    }

    #[test]
    fn cross_factor_examples() {
        let c = ctx();
        let pt = |n| ProjPoint::from_int(c, n);
        assert_eq!(
            cross_factor(&pt(1), &pt(2), &pt(3), &pt(3)).unwrap(),
            c.one()
        );
        let r = cross_factor(&pt(1), &pt(-1), &pt(2), &pt(3)).unwrap();
        assert!(r.agrees_with(&Padic::from_ratio(c, 4, 6).unwrap()));
        let r = cross_factor(&pt(0), &ProjPoint::infinity(c), &pt(2), &pt(3)).unwrap();
        assert!(r.agrees_with(&Padic::from_ratio(c, 2, 3).unwrap()));
        assert!(matches!(
            cross_factor(&pt(1), &pt(2), &pt(1), &pt(3)),
            Err(Error::PoleHit(_))
        ));
    }

    #[test]
    fn minors() {
        assert_eq!(leading_minors(&[vec![2, 1], vec![1, 2]]), vec![2, 3]);
        assert!(is_positive_definite(&[
            vec![4, 1, 1],
            vec![1, 4, 1],
            vec![1, 1, 4]
        ]));
        assert!(!is_positive_definite(&[vec![1, 2], vec![2, 1]]));
        assert!(!is_positive_definite(&[vec![-2]]));
    }

    #[test]
    fn tate_telescoping() {
        let c = ctx();
        let pt = |n| ProjPoint::from_int(c, n);
        let grp = WhittakerGroup::new(c, vec![(pt(1), pt(-1)), (pt(5), pt(-5))]).unwrap();
        let cert = grp
            .ping_pong_certify(&[
                PBall::complement_kind(c.zero(), 0),
                PBall::standard(c.zero(), 1),
            ])
            .unwrap();
        let tp = TruncationParams {
            max_len: 14,
            probes: grp.probe_points(&cert, 6),
            tail_tolerance: 10,
        };
        let aut = Automorphy::new(&grp, &cert, tp).unwrap();
        let g1 = Word::generator(1);
        // c_{x, qx}(γ) = q^{-1}
        let x = pt(2);
        let qx = grp.act(&g1, &x).unwrap();
        let v = aut.c_factor(&x, &qx, &g1).unwrap();
        assert!(
            v.eq_to_precision(&Padic::from_ratio(c, 1, 25).unwrap(), 8),
            "{v}"
        );
        let q = aut.period_matrix().unwrap();
        assert!(q.get(0, 0).eq_to_precision(&c.int(25), 12));
        let m = aut.c_factor(&pt(1), &pt(-1), &g1).unwrap();
        assert!(m.eq_to_precision(&c.int(-1), 10), "{m}");
        let a1 = aut.c_factor(&pt(5), &pt(1), &g1).unwrap();
        assert!(a1.eq_to_precision(&c.int(5), 11), "{a1}");
    }
}

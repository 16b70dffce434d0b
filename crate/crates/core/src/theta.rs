//! Polarization and the theta series `θ(c) = Σ_n P(n,n) c^n` over `Z^g`.

use crate::automorphy::{leading_minors, Automorphy, Character, PeriodMatrix};
use crate::error::{Error, Result};
use crate::moebius::Word;
use crate::padic::{Padic, PadicContext};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Symmetric square root `p_ij` of the period matrix.
#[derive(Debug, Clone)]
pub struct Polarization {
    p: Vec<Vec<Padic>>,
    q: PeriodMatrix,
    valuations: Vec<Vec<i64>>,
    /// `canonical[i][j]`: the entry is the canonical square root of `Q_ij`.
    canonical: Vec<Vec<bool>>,
}

impl Polarization {
    /// Diagonal pinned to `diag`; off-diagonal entries from `upper` (row-major
    /// `i < j`) or the canonical root when `upper` is `None`.
    pub fn new(q: &PeriodMatrix, diag: &[Padic], upper: Option<&[Padic]>) -> Result<Self> {
        let g = q.genus();
        if diag.len() != g {
            return Err(Error::Spec(format!(
                "expected {g} diagonal entries, got {}",
                diag.len()
            )));
        }
        let valuations = q.valuation_matrix()?;
        let minors = leading_minors(&valuations);
        if minors.iter().any(|&d| d <= 0) {
            return Err(Error::NotPositiveDefinite);
        }
        let mut p = vec![vec![q.get(0, 0).ctx().zero(); g]; g];
        let mut canonical = vec![vec![false; g]; g];
        let mut k = 0;
        for i in 0..g {
            if !(diag[i] * diag[i]).agrees_with(q.get(i, i)) {
                return Err(Error::DiagMismatch { index: i });
            }
            p[i][i] = diag[i];
            canonical[i][i] = q
                .get(i, i)
                .sqrt()
                .map(|r| r.agrees_with(&diag[i]))
                .unwrap_or(false);
            for j in i + 1..g {
                let root = q.get(i, j).sqrt();
                let entry = match upper {
                    Some(u) => {
                        let e = *u
                            .get(k)
                            .ok_or_else(|| Error::Spec("too few off-diagonal entries".into()))?;
                        if !(e * e).agrees_with(q.get(i, j)) {
                            return Err(Error::Mismatch(format!(
                                "p_{}{}^2 != Q_{}{}",
                                i + 1,
                                j + 1,
                                i + 1,
                                j + 1
                            )));
                        }
                        e
                    }
                    None => root.clone()?,
                };
                k += 1;
                let is_canon = root.map(|r| r.agrees_with(&entry)).unwrap_or(false);
                p[i][j] = entry;
                p[j][i] = entry;
                canonical[i][j] = is_canon;
                canonical[j][i] = is_canon;
            }
        }
        Ok(Polarization {
            p,
            q: q.clone(),
            valuations,
            canonical,
        })
    }

    /// The polarization pinned to the computed factors `c_{a_i,a_0}(γ_j)`
    /// for `i <= j`.
    pub fn from_branch_points(q: &PeriodMatrix, aut: &Automorphy) -> Result<Self> {
        let g = q.genus();
        let grp = aut.group();
        let a0 = grp.pairs()[0].0;
        let mut diag = Vec::with_capacity(g);
        let mut upper = Vec::new();
        for i in 1..=g {
            let gens: Vec<Word> = (i..=g).map(Word::generator).collect();
            let row = aut.c_factors(&grp.pairs()[i].0, &a0, &gens)?;
            diag.push(row[0]);
            upper.extend_from_slice(&row[1..]);
        }
        Polarization::new(q, &diag, Some(&upper))
    }

    pub fn genus(&self) -> usize {
        self.p.len()
    }

    pub fn ctx(&self) -> PadicContext {
        self.p[0][0].ctx()
    }

    pub fn get(&self, i: usize, j: usize) -> &Padic {
        &self.p[i][j]
    }

    pub fn period_matrix(&self) -> &PeriodMatrix {
        &self.q
    }

    pub fn valuation_matrix(&self) -> &[Vec<i64>] {
        &self.valuations
    }

    pub fn is_canonical(&self, i: usize, j: usize) -> bool {
        self.canonical[i][j]
    }

    /// The same polarization with `p_ij = p_ji` negated (`i != j`).
    pub fn flipped(&self, i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::Spec("diagonal entries are pinned".into()));
        }
        let mut out = self.clone();
        out.p[i][j] = -out.p[i][j];
        out.p[j][i] = out.p[i][j];
        out.canonical[i][j] = !out.canonical[i][j];
        out.canonical[j][i] = out.canonical[i][j];
        Ok(out)
    }

    /// `∏_{i<=j} p_ij^{e_ij}` for an upper-triangular exponent table.
    pub fn monomial(&self, e: &[Vec<i64>]) -> Result<Padic> {
        let g = self.genus();
        let mut acc = self.ctx().one();
        for i in 0..g {
            for j in i..g {
                if e[i][j] != 0 {
                    acc = acc * self.p[i][j].pow(e[i][j])?;
                }
            }
        }
        Ok(acc)
    }

    /// `P(n,m) = ∏_{i,j} p_ij^{n_i m_j}`.
    pub fn bilinear(&self, n: &[i64], m: &[i64]) -> Result<Padic> {
        self.monomial(&bilinear_exponents(n, m))
    }

    /// The character `c_i = ∏_j p_ij^{m_j}`.
    pub fn half_character(&self, m: &[i64]) -> Result<Character> {
        let g = self.genus();
        (0..g)
            .map(|i| {
                let mut acc = self.ctx().one();
                for (j, &k) in m.iter().enumerate() {
                    if k != 0 {
                        acc = acc * self.p[i][j].pow(k)?;
                    }
                }
                Ok(acc)
            })
            .collect::<Result<Vec<_>>>()
            .map(Character)
    }

    fn valuation_matrix_f64(&self) -> DMatrix<f64> {
        let g = self.genus();
        DMatrix::from_fn(g, g, |i, j| self.valuations[i][j] as f64)
    }

    /// Lower bound for the smallest eigenvalue of `V`.
    fn eigen_floor(&self) -> f64 {
        let ev = SymmetricEigen::new(self.valuation_matrix_f64()).eigenvalues;
        ev.iter().copied().fold(f64::INFINITY, f64::min) * (1.0 - 1e-9) - 1e-9
    }

    /// Lower bound for `½ nᵀVn + w·n` over `|n|_∞ > r`.
    fn tail_floor(&self, w: &[f64], r: i64) -> Result<i64> {
        let mu = self.eigen_floor();
        if mu <= 0.0 {
            return Err(Error::Divergent(
                "valuation matrix is not positive definite".into(),
            ));
        }
        let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let t = ((r + 1) as f64).max(wn / mu);
        let plain = 0.5 * mu * t * t - wn * t;
        let wv = DVector::from_column_slice(w);
        let centered = match self.valuation_matrix_f64().cholesky() {
            Some(ch) => {
                let shift = ch.solve(&wv);
                let s = ((r + 1) as f64 - shift.amax()).max(0.0);
                0.5 * mu * s * s - 0.5 * wv.dot(&shift)
            }
            None => f64::NEG_INFINITY,
        };
        Ok((plain.max(centered) - 1e-6).floor() as i64)
    }

    /// Lower bound for `½ yᵀVy - mᵀVm/8` over `y = n + m/2` with some
    /// `|y_i| >= r + m_i/2 + 1`.
    fn half_tail_floor(&self, m: &[i64], r: i64) -> Result<i64> {
        let mu = self.eigen_floor();
        if mu <= 0.0 {
            return Err(Error::Divergent(
                "valuation matrix is not positive definite".into(),
            ));
        }
        let t = m
            .iter()
            .map(|&k| (r + 1) as f64 + k as f64 / 2.0)
            .fold(f64::INFINITY, f64::min);
        if t <= 0.0 {
            return Err(Error::Spec(format!(
                "theta radius {r} too small for characteristic {m:?}"
            )));
        }
        let mv = DVector::from_iterator(m.len(), m.iter().map(|&k| k as f64));
        let shift = (&mv.transpose() * self.valuation_matrix_f64() * &mv)[(0, 0)] / 8.0;
        Ok((0.5 * mu * t * t - shift - 1e-6).floor() as i64)
    }
}

/// Upper-triangular exponents of `P(n, m)`.
fn bilinear_exponents(n: &[i64], m: &[i64]) -> Vec<Vec<i64>> {
    let g = n.len();
    let mut e = vec![vec![0i64; g]; g];
    for i in 0..g {
        for j in 0..g {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            e[a][b] += n[i] * m[j];
        }
    }
    e
}

/// `Λ`-character of `n`: entries `∏_j Q_ij^{n_j}`.
pub fn lattice_character(n: &[i64], q: &PeriodMatrix) -> Result<Character> {
    q.lattice_character(n)
}

/// `ξ_n(c) = P(n,n) c^n`.
pub fn cocycle(n: &[i64], c: &Character, pol: &Polarization) -> Result<Padic> {
    Ok(pol.bilinear(n, n)? * c.eval(n)?)
}

/// A truncated theta value.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaValue {
    /// The sum, truncated to `error` absolute digits.
    pub value: Padic,
    /// Valuation bound of everything omitted.
    pub error: i64,
    /// The value vanishes identically by the `n ↔ -n-m` pairing.
    pub exact_zero: bool,
}

impl ThetaValue {
    pub fn is_zero(&self) -> bool {
        self.exact_zero || self.value.is_zero()
    }

    pub fn require(self, tolerance: i64, radius: usize) -> Result<Self> {
        if self.exact_zero || self.error >= tolerance {
            Ok(self)
        } else {
            Err(Error::TailBoundNotMet {
                achieved: self.error,
                requested: tolerance,
                suggested_len: radius + 2,
            })
        }
    }
}

/// Calls `f` on every point of `∏ [lo_i, hi_i]`.
fn for_box(lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64]) -> Result<()>) -> Result<()> {
    let g = lo.len();
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return Ok(());
    }
    let mut n = lo.to_vec();
    loop {
        f(&n)?;
        let mut k = 0;
        loop {
            if k == g {
                return Ok(());
            }
            if n[k] < hi[k] {
                n[k] += 1;
                break;
            }
            n[k] = lo[k];
            k += 1;
        }
    }
}

/// `θ(c)` summed over `|n|_∞ <= radius`.
pub fn theta_value(c: &Character, pol: &Polarization, radius: usize) -> Result<ThetaValue> {
    let g = pol.genus();
    if c.genus() != g {
        return Err(Error::Spec(format!(
            "character of genus {} for polarization of genus {g}",
            c.genus()
        )));
    }
    let r = radius as i64;
    let w: Vec<f64> = c
        .entries()
        .iter()
        .map(|x| {
            x.valuation()
                .map(|v| v as f64)
                .ok_or_else(|| Error::PrecisionExhausted("character entry is zero".into()))
        })
        .collect::<Result<_>>()?;
    let error = pol.tail_floor(&w, r)?;
    let mut sum = Padic::zero(pol.ctx());
    for_box(&vec![-r; g], &vec![r; g], |n| {
        sum = sum + cocycle(n, c, pol)?;
        Ok(())
    })?;
    Ok(ThetaValue {
        value: sum.truncate_abs(error),
        error,
        exact_zero: false,
    })
}

/// `θ` at the half-period `c_i = ε_i ∏_j p_ij^{m_j}`, summed over the box
/// `n_i ∈ [-radius - m_i, radius]`, which is stable under `n ↦ -n - m`.
/// Partner terms agree up to the sign `ε^m`; when it is `-1` the whole
/// series cancels.
pub fn theta_half_period(
    m: &[i64],
    eps: &[i8],
    pol: &Polarization,
    radius: usize,
) -> Result<ThetaValue> {
    let g = pol.genus();
    if m.len() != g || eps.len() != g {
        return Err(Error::Spec("half-period data of the wrong genus".into()));
    }
    let parity: i64 = m
        .iter()
        .zip(eps)
        .filter(|(_, &e)| e < 0)
        .map(|(k, _)| k)
        .sum();
    if parity.rem_euclid(2) == 1 {
        return Ok(ThetaValue {
            value: Padic::zero(pol.ctx()),
            error: i64::MAX,
            exact_zero: true,
        });
    }
    let r = radius as i64;
    let lo: Vec<i64> = m.iter().map(|k| -r - k).collect();
    let error = pol.half_tail_floor(m, r)?;
    let mut sum = Padic::zero(pol.ctx());
    for_box(&lo, &vec![r; g], |n| {
        let mut e = bilinear_exponents(n, n);
        let cross = bilinear_exponents(n, m);
        for i in 0..g {
            for j in i..g {
                e[i][j] += cross[i][j];
            }
        }
        let sign: i64 = n
            .iter()
            .zip(eps)
            .filter(|(_, &s)| s < 0)
            .map(|(k, _)| k)
            .sum();
        let term = pol.monomial(&e)?;
        sum = if sign.rem_euclid(2) == 0 {
            sum + term
        } else {
            sum - term
        };
        Ok(())
    })?;
    Ok(ThetaValue {
        value: sum.truncate_abs(error),
        error,
        exact_zero: false,
    })
}

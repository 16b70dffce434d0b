use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::characteristics::BranchLabel;
use crate::error::{Error, Result};
use crate::lambda::Normalization;
use crate::moebius::WhittakerGroup;
use crate::padic::{PBall, Padic, PadicContext, ProjPoint};

/// A ball `v(z - center) >= radius`, or its complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallSpec {
    pub center: String,
    pub radius: i64,
    #[serde(default)]
    pub complement: bool,
}

/// A curve and the truncation settings for one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    #[serde(default)]
    pub name: String,
    pub prime: u64,
    /// Digits kept in the report.
    pub precision: u32,
    /// Digits carried through the computation; defaults to
    /// `min(2 * precision, max)`.
    #[serde(default)]
    pub work_precision: Option<u32>,
    /// Fixed points of `s_0, ..., s_g` as exact rationals or `"inf"`.
    pub pairs: Vec<[String; 2]>,
    #[serde(default)]
    pub balls: Option<Vec<BallSpec>>,
    #[serde(default = "default_trunc")]
    pub trunc: usize,
    #[serde(default = "default_radius")]
    pub radius: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: i64,
    /// Off-diagonal polarization entries `(i, j)` (1-based) to negate.
    #[serde(default)]
    pub flips: Vec<[usize; 2]>,
    /// Labels sent to `∞`, `0`, `1`.
    #[serde(default = "default_normalization")]
    pub normalization: [usize; 3],
    /// Points used by the invariance probe.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_trunc() -> usize {
    14
}

fn default_radius() -> usize {
    8
}

fn default_tolerance() -> i64 {
    10
}

fn default_normalization() -> [usize; 3] {
    [0, 1, 2]
}

fn default_samples() -> usize {
    10
}

fn is_prime(p: u64) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// Parses `"a"`, `"a/b"` or `"inf"` into a point of `P^1(Q)`.
pub fn parse_point(ctx: PadicContext, s: &str) -> Result<ProjPoint> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s == "∞" {
        return Ok(ProjPoint::infinity(ctx));
    }
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (
            a.trim().parse::<i64>().map_err(|_| bad())?,
            b.trim().parse::<i64>().map_err(|_| bad())?,
        ),
        None => (s.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if den == 0 {
        return Err(bad());
    }
    ProjPoint::new(Padic::from_int(ctx, num), Padic::from_int(ctx, den))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
struct GroupKey<'a> {
    prime: u64,
    work_precision: u32,
    pairs: &'a [[String; 2]],
    balls: &'a Option<Vec<BallSpec>>,
}

impl CurveSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: CurveSpec = toml::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn genus(&self) -> usize {
        self.pairs.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.prime == 2 || !is_prime(self.prime) {
            return Err(Error::Spec(format!("{} is not an odd prime", self.prime)));
        }
        if self.pairs.len() < 2 {
            return Err(Error::Spec(
                "need at least two fixed-point pairs (genus >= 1)".into(),
            ));
        }
        if self.precision == 0 {
            return Err(Error::Spec("precision must be positive".into()));
        }
        let work = self.work_digits()?;
        if work < self.precision {
            return Err(Error::Spec(format!(
                "work precision {work} below report precision {}",
                self.precision
            )));
        }
        if self.trunc < 2 || self.trunc % 2 == 1 {
            return Err(Error::Spec(format!(
                "truncation {} must be even and at least 2",
                self.trunc
            )));
        }
        let g = self.genus();
        let n = self.normalization;
        if n.iter().any(|&l| l > 2 * g + 1) || n[0] == n[1] || n[1] == n[2] || n[0] == n[2] {
            return Err(Error::Spec(format!("bad normalization {n:?}")));
        }
        for [i, j] in &self.flips {
            if i == j || *i == 0 || *j == 0 || *i > g || *j > g {
                return Err(Error::Spec(format!("bad flip ({i}, {j})")));
            }
        }
        if let Some(b) = &self.balls {
            if b.len() != self.pairs.len() {
                return Err(Error::BallCountMismatch {
                    expected: self.pairs.len(),
                    got: b.len(),
                });
            }
        }
        Ok(())
    }

    pub fn work_digits(&self) -> Result<u32> {
        let max = PadicContext::max_digits(self.prime)?;
        Ok(self
            .work_precision
            .unwrap_or_else(|| (2 * self.precision).min(max)))
    }

    pub fn work_context(&self) -> Result<PadicContext> {
        PadicContext::new(self.prime, self.work_digits()?)
    }

    pub fn report_context(&self) -> Result<PadicContext> {
        PadicContext::new(self.prime, self.precision)
    }

    pub fn normalization(&self) -> Normalization {
        let [a, b, c] = self.normalization;
        Normalization {
            infinity: BranchLabel(a),
            zero: BranchLabel(b),
            one: BranchLabel(c),
        }
    }

    /// The group and its ball system (explicit, or the default one).
    pub fn group(&self) -> Result<(WhittakerGroup, Vec<PBall>)> {
        let ctx = self.work_context()?;
        let pairs = self
            .pairs
            .iter()
            .map(|[a, b]| Ok((parse_point(ctx, a)?, parse_point(ctx, b)?)))
            .collect::<Result<Vec<_>>>()?;
        let grp = WhittakerGroup::new(ctx, pairs)?;
        let balls = match &self.balls {
            Some(bs) => bs
                .iter()
                .map(|b| {
                    let c = parse_point(ctx, &b.center)?
                        .affine()
                        .ok_or_else(|| Error::Spec("ball centers must be finite".into()))?;
                    Ok(if b.complement {
                        PBall::complement_kind(c, b.radius)
                    } else {
                        PBall::standard(c, b.radius)
                    })
                })
                .collect::<Result<Vec<_>>>()?,
            None => grp.default_balls()?,
        };
        Ok((grp, balls))
    }

    /// SHA-256 of the TOML form.
    pub fn config_hash(&self) -> String {
        let text = toml::to_string(self).expect("specs always serialize");
        hex(&Sha256::digest(text.as_bytes()))
    }

    /// SHA-256 of the data the period matrix depends on, apart from `L`.
    pub fn group_hash(&self) -> Result<String> {
        let key = GroupKey {
            prime: self.prime,
            work_precision: self.work_digits()?,
            pairs: &self.pairs,
            balls: &self.balls,
        };
        let text = toml::to_string(&key).map_err(|e| Error::Spec(e.to_string()))?;
        Ok(hex(&Sha256::digest(text.as_bytes())))
    }
}

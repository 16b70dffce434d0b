//! Fixed-precision elements of Q_p with sound precision tracking.
//!
//! A nonzero value is `p^v * (u + O(p^k))` with `u` a unit known modulo
//! `p^k`, `k <= N`. A value whose known digits all vanish is a zero carrying
//! its absolute precision `O(p^a)`; the exact zero has `a = +inf`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Prime and working precision shared by every number of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicContext {
    prime: u64,
    digits: u32,
}

impl PadicContext {
    /// `prime` must be an odd prime and `p^digits` must fit in 63 bits so that
    /// products of two residues fit in a `u128`.
    pub fn new(prime: u64, digits: u32) -> Result<Self> {
        if prime < 3 || !is_prime(prime) {
            return Err(Error::InvalidContext(format!(
                "{prime} is not an odd prime"
            )));
        }
        if digits == 0 {
            return Err(Error::InvalidContext(
                "precision must be at least one digit".into(),
            ));
        }
        let mut m: u128 = 1;
        for _ in 0..digits {
            m *= prime as u128;
            if m >= 1 << 63 {
                return Err(Error::InvalidContext(format!(
                    "{prime}^{digits} exceeds the 63-bit residue range"
                )));
            }
        }
        Ok(PadicContext { prime, digits })
    }

    /// The largest precision [`PadicContext::new`] accepts for `prime`.
    pub fn max_digits(prime: u64) -> Result<u32> {
        let mut d = 1;
        while PadicContext::new(prime, d + 1).is_ok() {
            d += 1;
        }
        PadicContext::new(prime, d).map(|_| d)
    }

    pub fn with_digits(&self, digits: u32) -> Result<Self> {
        PadicContext::new(self.prime, digits)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// `p^k` for `k <= digits`.
    pub fn pow_p(&self, k: u32) -> u64 {
        debug_assert!(k <= self.digits);
        self.prime.pow(k)
    }

    pub fn zero(&self) -> Padic {
        Padic::zero(*self)
    }

    pub fn one(&self) -> Padic {
        Padic::from_int(*self, 1)
    }

    pub fn int(&self, n: i64) -> Padic {
        Padic::from_int(*self, n)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

const EXACT: i64 = i64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Repr {
    /// Zero to absolute precision `abs`; `EXACT` for the true zero.
    Zero {
        abs: i64,
    },
    Unit {
        val: i64,
        unit: u64,
        prec: u32,
    },
}

/// An element of Q_p to finite precision.
#[derive(Debug, Clone, Copy)]
pub struct Padic {
    ctx: PadicContext,
    repr: Repr,
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(m as i128) as u64
}

impl Padic {
    pub fn zero(ctx: PadicContext) -> Self {
        Padic {
            ctx,
            repr: Repr::Zero { abs: EXACT },
        }
    }

    /// Zero known only modulo `p^abs`.
    pub fn zero_to(ctx: PadicContext, abs: i64) -> Self {
        Padic {
            ctx,
            repr: Repr::Zero { abs },
        }
    }

    pub fn one(ctx: PadicContext) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: PadicContext, n: i64) -> Self {
        Self::from_i128(ctx, n as i128)
    }

    fn from_i128(ctx: PadicContext, n: i128) -> Self {
        if n == 0 {
            return Self::zero(ctx);
        }
        let p = ctx.prime as i128;
        let mut n = n;
        let mut val = 0i64;
        while n % p == 0 {
            n /= p;
            val += 1;
        }
        let m = ctx.pow_p(ctx.digits) as i128;
        let unit = n.rem_euclid(m) as u64;
        Padic {
            ctx,
            repr: Repr::Unit {
                val,
                unit,
                prec: ctx.digits,
            },
        }
    }

    /// The rational `num/den` to full working precision.
    pub fn from_ratio(ctx: PadicContext, num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Self::from_i128(ctx, num).checked_div(&Self::from_i128(ctx, den))
    }

    /// Builds `p^val * unit` with `unit` known modulo `p^prec`.
    pub fn from_parts(ctx: PadicContext, val: i64, unit: u64, prec: u32) -> Result<Self> {
        let prec = prec.min(ctx.digits);
        if prec == 0 {
            return Ok(Self::zero_to(ctx, val));
        }
        let m = ctx.pow_p(prec);
        let unit = unit % m;
        if unit.is_multiple_of(ctx.prime) {
            return Err(Error::Parse(format!("unit {unit} is divisible by p")));
        }
        Ok(Padic {
            ctx,
            repr: Repr::Unit { val, unit, prec },
        })
    }

    pub fn ctx(&self) -> PadicContext {
        self.ctx
    }

    /// True when every known digit vanishes (including the exact zero).
    pub fn is_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { .. })
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::Zero { abs: EXACT })
    }

    /// Valuation of a nonzero value; `None` for zero-to-precision.
    pub fn valuation(&self) -> Option<i64> {
        match self.repr {
            Repr::Unit { val, .. } => Some(val),
            Repr::Zero { .. } => None,
        }
    }

    /// The valuation, or for a zero the absolute precision (a lower bound).
    pub fn valuation_bound(&self) -> i64 {
        match self.repr {
            Repr::Unit { val, .. } => val,
            Repr::Zero { abs } => abs,
        }
    }

    /// Number of known unit digits; 0 for zeros.
    pub fn relative_precision(&self) -> u32 {
        match self.repr {
            Repr::Unit { prec, .. } => prec,
            Repr::Zero { .. } => 0,
        }
    }

    /// The exponent `a` in the error term `O(p^a)` (`i64::MAX` if exact).
    pub fn absolute_precision(&self) -> i64 {
        match self.repr {
            Repr::Unit { val, prec, .. } => val + prec as i64,
            Repr::Zero { abs } => abs,
        }
    }

    /// Unit part and its precision for nonzero values.
    pub fn unit(&self) -> Option<(u64, u32)> {
        match self.repr {
            Repr::Unit { unit, prec, .. } => Some((unit, prec)),
            Repr::Zero { .. } => None,
        }
    }

    /// Base-p digits of the unit, least significant first.
    pub fn unit_digits(&self) -> Vec<u64> {
        match self.repr {
            Repr::Unit { mut unit, prec, .. } => (0..prec)
                .map(|_| {
                    let d = unit % self.ctx.prime;
                    unit /= self.ctx.prime;
                    d
                })
                .collect(),
            Repr::Zero { .. } => Vec::new(),
        }
    }

    /// Forgets digits so the absolute precision is at most `abs`.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        match self.repr {
            Repr::Zero { abs: a } => Self::zero_to(self.ctx, a.min(abs)),
            Repr::Unit { val, unit, prec } => {
                if abs <= val {
                    return Self::zero_to(self.ctx, abs);
                }
                let new_prec = (abs.saturating_sub(val).min(prec as i64)) as u32;
                let unit = unit % self.ctx.pow_p(new_prec);
                Padic {
                    ctx: self.ctx,
                    repr: Repr::Unit {
                        val,
                        unit,
                        prec: new_prec,
                    },
                }
            }
        }
    }

    /// The same number in another context over the same prime, keeping at
    /// most `ctx.digits()` unit digits.
    pub fn to_context(&self, ctx: PadicContext) -> Result<Self> {
        if ctx.prime != self.ctx.prime {
            return Err(Error::InvalidContext(format!(
                "cannot move a {}-adic number to {}-adic context",
                self.ctx.prime, ctx.prime
            )));
        }
        Ok(match self.repr {
            Repr::Zero { abs } => Padic::zero_to(ctx, abs),
            Repr::Unit { val, unit, prec } => {
                let prec = prec.min(ctx.digits);
                Padic {
                    ctx,
                    repr: Repr::Unit {
                        val,
                        unit: unit % ctx.pow_p(prec),
                        prec,
                    },
                }
            }
        })
    }

    /// Forgets digits so at most `prec` unit digits remain.
    pub fn truncate_rel(&self, prec: u32) -> Self {
        match self.repr {
            Repr::Zero { .. } => *self,
            Repr::Unit { val, .. } => self.truncate_abs(val + prec as i64),
        }
    }

    fn check_ctx(&self, other: &Self) {
        assert_eq!(self.ctx, other.ctx, "mixed p-adic contexts");
    }

    fn add_impl(&self, other: &Self) -> Self {
        self.check_ctx(other);
        let ctx = self.ctx;
        match (self.repr, other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => Self::zero_to(ctx, a.min(b)),
            (Repr::Zero { abs }, Repr::Unit { .. }) => other.truncate_abs(abs),
            (Repr::Unit { .. }, Repr::Zero { abs }) => self.truncate_abs(abs),
            (
                Repr::Unit {
                    val: va,
                    unit: ua,
                    prec: pa,
                },
                Repr::Unit {
                    val: vb,
                    unit: ub,
                    prec: pb,
                },
            ) => {
                let vmin = va.min(vb);
                let abs = (va + pa as i64).min(vb + pb as i64);
                let k = (abs - vmin) as u32;
                let m = ctx.pow_p(k);
                let shifted = |u: u64, v: i64| -> u64 {
                    let s = v - vmin;
                    if s >= k as i64 {
                        0
                    } else {
                        mulmod(u % m, ctx.pow_p(s as u32), m)
                    }
                };
                let sum = ((shifted(ua, va) as u128 + shifted(ub, vb) as u128) % m as u128) as u64;
                if sum == 0 {
                    return Self::zero_to(ctx, abs);
                }
                let mut t = 0u32;
                let mut s = sum;
                while s.is_multiple_of(ctx.prime) {
                    s /= ctx.prime;
                    t += 1;
                }
                Padic {
                    ctx,
                    repr: Repr::Unit {
                        val: vmin + t as i64,
                        unit: s,
                        prec: k - t,
                    },
                }
            }
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        self.check_ctx(other);
        let ctx = self.ctx;
        match (self.repr, other.repr) {
            (Repr::Zero { abs: a }, Repr::Zero { abs: b }) => {
                Self::zero_to(ctx, a.saturating_add(b))
            }
            (Repr::Zero { abs }, Repr::Unit { val, .. })
            | (Repr::Unit { val, .. }, Repr::Zero { abs }) => {
                if abs == EXACT {
                    Self::zero(ctx)
                } else {
                    Self::zero_to(ctx, abs + val)
                }
            }
            (
                Repr::Unit {
                    val: va,
                    unit: ua,
                    prec: pa,
                },
                Repr::Unit {
                    val: vb,
                    unit: ub,
                    prec: pb,
                },
            ) => {
                let prec = pa.min(pb);
                let m = ctx.pow_p(prec);
                Padic {
                    ctx,
                    repr: Repr::Unit {
                        val: va + vb,
                        unit: mulmod(ua % m, ub % m, m),
                        prec,
                    },
                }
            }
        }
    }

    /// Multiplicative inverse; zero-to-precision values are not invertible.
    pub fn inv(&self) -> Result<Self> {
        match self.repr {
            Repr::Zero { abs: EXACT } => Err(Error::DivisionByZero),
            Repr::Zero { abs } => Err(Error::PrecisionExhausted(format!(
                "inverting a value known only to be O({}^{abs})",
                self.ctx.prime
            ))),
            Repr::Unit { val, unit, prec } => {
                let m = self.ctx.pow_p(prec);
                Ok(Padic {
                    ctx: self.ctx,
                    repr: Repr::Unit {
                        val: -val,
                        unit: inv_mod(unit, m),
                        prec,
                    },
                })
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other);
        if let Repr::Zero { abs } = self.repr {
            // 0 / y keeps the zero, shifted by v(y)
            return match other.repr {
                Repr::Unit { val, .. } => Ok(if abs == EXACT {
                    *self
                } else {
                    Self::zero_to(self.ctx, abs - val)
                }),
                Repr::Zero { .. } => Err(Error::DivisionByZero),
            };
        }
        Ok(self.mul_impl(&other.inv()?))
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut base = *self;
        let mut acc = Self::one(self.ctx);
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_impl(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_impl(&base);
            }
        }
        Ok(acc)
    }

    /// Square root on the canonical branch (first digit in `1..=(p-1)/2`).
    pub fn sqrt(&self) -> Result<Self> {
        let (val, unit, prec) = match self.repr {
            Repr::Zero { abs: EXACT } => return Ok(*self),
            Repr::Zero { .. } => {
                return Err(Error::PrecisionExhausted(
                    "square root of zero-to-precision".into(),
                ))
            }
            Repr::Unit { val, unit, prec } => (val, unit, prec),
        };
        let p = self.ctx.prime;
        if val % 2 != 0 {
            return Err(Error::NonSquare(format!("odd valuation {val}")));
        }
        let u0 = unit % p;
        let r0 = (1..=(p - 1) / 2)
            .find(|r| r * r % p == u0)
            .ok_or_else(|| Error::NonSquare(format!("{u0} is not a square mod {p}")))?;
        // Newton: r <- r - (r^2 - u) / (2r), doubling the known digits each step
        let m = self.ctx.pow_p(prec);
        let mut r = r0;
        let mut known = 1u32;
        while known < prec {
            known = (known * 2).min(prec);
            let mk = self.ctx.pow_p(known);
            let r2 = mulmod(r, r, mk);
            let diff = (r2 as i128 - (unit % mk) as i128).rem_euclid(mk as i128) as u64;
            let step = mulmod(diff, inv_mod(mulmod(2, r, mk), mk), mk);
            r = (r as i128 - step as i128).rem_euclid(mk as i128) as u64;
        }
        Ok(Padic {
            ctx: self.ctx,
            repr: Repr::Unit {
                val: val / 2,
                unit: r % m,
                prec,
            },
        })
    }

    /// Exact multiplication by `p^k`.
    pub fn shift(&self, k: i64) -> Self {
        match self.repr {
            Repr::Zero { abs: EXACT } => *self,
            Repr::Zero { abs } => Self::zero_to(self.ctx, abs + k),
            Repr::Unit { val, unit, prec } => Padic {
                ctx: self.ctx,
                repr: Repr::Unit {
                    val: val + k,
                    unit,
                    prec,
                },
            },
        }
    }

    /// Whether `x` is a square in Q_p (for nonzero values).
    pub fn is_square(&self) -> bool {
        self.sqrt().is_ok()
    }

    /// True iff `v(self - other) >= tol`, where a zero-to-precision
    /// difference counts with its absolute precision.
    pub fn eq_to_precision(&self, other: &Self, tol: i64) -> bool {
        (*self - *other).valuation_bound() >= tol
    }

    /// True when the two values agree on every digit both of them know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        (*self - *other).is_zero()
    }

    /// The signed representative of a value in `{+1, -1}` up to precision,
    /// if it is one.
    pub fn sign_if_unit_pm1(&self) -> Option<i8> {
        let one = Self::one(self.ctx);
        if self.agrees_with(&one) && self.absolute_precision() > 0 {
            Some(1)
        } else if self.agrees_with(&-one) && self.absolute_precision() > 0 {
            Some(-1)
        } else {
            None
        }
    }

    /// Parses the text form written by `Display`.
    pub fn parse(ctx: PadicContext, s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::Parse(format!("{why} in {s:?}"));
        if s == "0" {
            return Ok(Self::zero(ctx));
        }
        let parse_pow = |t: &str| -> Result<i64> {
            let t = t.trim();
            let (base, exp) = t.split_once('^').ok_or_else(|| bad("missing '^'"))?;
            if base.trim().parse::<u64>().map_err(|_| bad("bad prime"))? != ctx.prime {
                return Err(bad("prime mismatch"));
            }
            exp.trim().parse::<i64>().map_err(|_| bad("bad exponent"))
        };
        let parse_big_o = |t: &str| -> Result<i64> {
            let inner = t
                .trim()
                .strip_prefix("O(")
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| bad("missing O(...)"))?;
            parse_pow(inner)
        };
        if s.starts_with("O(") {
            return Ok(Self::zero_to(ctx, parse_big_o(s)?));
        }
        let (head, rest) = s.split_once(" * (").ok_or_else(|| bad("missing ' * ('"))?;
        let val = parse_pow(head)?;
        let (body, tail) = rest
            .split_once(") + ")
            .ok_or_else(|| bad("missing ') + '"))?;
        let abs = parse_big_o(tail)?;
        let mut unit: u128 = 0;
        let mut count = 0u32;
        for (i, term) in body.split(" + ").enumerate() {
            let term = term.trim();
            let digit_str = match i {
                0 => term,
                1 => term
                    .strip_suffix(&format!("*{}", ctx.prime))
                    .ok_or_else(|| bad("bad digit term"))?,
                _ => term
                    .strip_suffix(&format!("*{}^{i}", ctx.prime))
                    .ok_or_else(|| bad("bad digit term"))?,
            };
            let d: u64 = digit_str.parse().map_err(|_| bad("bad digit"))?;
            if d >= ctx.prime {
                return Err(bad("digit out of range"));
            }
            unit += d as u128 * (ctx.prime as u128).pow(i as u32);
            count += 1;
        }
        if abs - val != count as i64 || count > ctx.digits {
            return Err(bad("digit count does not match the error term"));
        }
        Self::from_parts(ctx, val, unit as u64, count)
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.ctx.prime;
        match self.repr {
            Repr::Zero { abs: EXACT } => write!(f, "0"),
            Repr::Zero { abs } => write!(f, "O({p}^{abs})"),
            Repr::Unit { val, prec, .. } => {
                write!(f, "{p}^{val} * (")?;
                for (i, d) in self.unit_digits().iter().enumerate() {
                    match i {
                        0 => write!(f, "{d}")?,
                        1 => write!(f, " + {d}*{p}")?,
                        _ => write!(f, " + {d}*{p}^{i}")?,
                    }
                }
                write!(f, ") + O({p}^{})", val + prec as i64)
            }
        }
    }
}

/// Structural equality: same digits and same precision.
impl PartialEq for Padic {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.repr == other.repr
    }
}

impl Eq for Padic {}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr for Padic {
            type Output = Padic;
            fn $m(self, rhs: Padic) -> Padic {
                self.$imp(&rhs)
            }
        }
        impl<'a> $tr<&'a Padic> for &'a Padic {
            type Output = Padic;
            fn $m(self, rhs: &'a Padic) -> Padic {
                self.$imp(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_impl);
forward_binop!(Mul, mul, mul_impl);

impl Padic {
    fn sub_impl(&self, other: &Self) -> Self {
        self.add_impl(&other.neg_impl())
    }

    fn neg_impl(&self) -> Self {
        match self.repr {
            Repr::Zero { .. } => *self,
            Repr::Unit { val, unit, prec } => {
                let m = self.ctx.pow_p(prec);
                Padic {
                    ctx: self.ctx,
                    repr: Repr::Unit {
                        val,
                        unit: m - unit,
                        prec,
                    },
                }
            }
        }
    }
}

forward_binop!(Sub, sub, sub_impl);

impl Neg for Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_impl()
    }
}

impl Neg for &Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_impl()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c5(n: u32) -> PadicContext {
        PadicContext::new(5, n).unwrap()
    }

    #[test]
    fn context_validation() {
        assert!(PadicContext::new(2, 10).is_err());
        assert!(PadicContext::new(9, 10).is_err());
        assert!(PadicContext::new(5, 0).is_err());
        assert!(PadicContext::new(5, 40).is_err());
        assert!(PadicContext::new(7, 12).is_ok());
    }

    #[test]
    fn two_plus_three_is_p() {
        let ctx = c5(8);
        let s = ctx.int(2) + ctx.int(3);
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.unit().unwrap().0, 1);
    }

    #[test]
    fn exact_zero_plus_negative_valuation() {
        let ctx = c5(8);
        let x = ctx.int(3).shift(-2);
        assert_eq!(Padic::zero(ctx) + x, x);
        assert_eq!(x + Padic::zero(ctx), x);
    }

    #[test]
    fn cancellation_loses_digits() {
        let ctx = c5(8);
        let d = ctx.int(6) - ctx.int(1);
        assert_eq!(d.valuation(), Some(1));
        assert_eq!(d.relative_precision(), 7);
        assert_eq!(d.unit().unwrap().0, 1);
    }

    #[test]
    fn valuations_add_under_multiplication() {
        let ctx = c5(8);
        let x = ctx.int(2 * 125);
        let y = Padic::from_ratio(ctx, 3, 5).unwrap();
        let z = x * y;
        assert_eq!(z.valuation(), Some(2));
        assert_eq!(z.unit().unwrap().0, 6);
    }

    #[test]
    fn division_by_zero() {
        let ctx = c5(8);
        assert_eq!(
            ctx.one().checked_div(&ctx.zero()),
            Err(Error::DivisionByZero)
        );
        let z = ctx.int(3) - ctx.int(3);
        assert!(matches!(
            ctx.one().checked_div(&z),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn square_roots() {
        let ctx = c5(10);
        assert_eq!(ctx.int(4).sqrt().unwrap(), ctx.int(2));
        let r = ctx.int(-1).sqrt().unwrap();
        assert_eq!(r.unit_digits()[..3], [2, 1, 2]);
        assert!((r * r).agrees_with(&ctx.int(-1)));
        assert!(matches!(ctx.int(5).sqrt(), Err(Error::NonSquare(_))));
        assert!(matches!(ctx.int(2).sqrt(), Err(Error::NonSquare(_))));
        let r = ctx.int(-25).sqrt().unwrap();
        assert_eq!(r.valuation(), Some(1));
    }

    #[test]
    fn eq_to_precision_examples() {
        let ctx = c5(12);
        let big = ctx.int(5i64.pow(10));
        assert!(ctx.one().eq_to_precision(&(ctx.one() + big), 8));
        assert!(!ctx.one().eq_to_precision(&ctx.int(2), 1));
        let ctx8 = c5(8);
        let z = Padic::zero_to(ctx8, 8);
        assert!(z.eq_to_precision(&ctx8.int(5i64.pow(9)), 8));
    }

    #[test]
    fn text_form() {
        let ctx = c5(4);
        let x = Padic::from_ratio(ctx, 3, 5).unwrap();
        assert_eq!(x.to_string(), "5^-1 * (3 + 0*5 + 0*5^2 + 0*5^3) + O(5^3)");
        assert_eq!(Padic::parse(ctx, &x.to_string()).unwrap(), x);
        assert_eq!(Padic::zero_to(ctx, 7).to_string(), "O(5^7)");
        assert_eq!(Padic::parse(ctx, "0").unwrap(), ctx.zero());
        assert!(Padic::parse(ctx, "7^0 * (1) + O(7^1)").is_err());
    }

    #[test]
    fn powers_and_inverse() {
        let ctx = c5(12);
        let x = Padic::from_ratio(ctx, 7, 25).unwrap();
        let y = x.pow(-3).unwrap() * x.pow(3).unwrap();
        assert!(y.agrees_with(&ctx.one()));
        assert_eq!(x.pow(0).unwrap(), ctx.one());
    }
}

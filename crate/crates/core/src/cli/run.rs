use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cache::{CachedPeriods, PeriodCache};
use super::report::RunReport;
use super::spec::CurveSpec;
use crate::automorphy::{Automorphy, Character, PeriodMatrix, TruncationParams};
use crate::characteristics::{
    characteristic_shift, cross_check_character, is_nonspecial, point_character, riemann_constant,
    BranchLabel, BranchSubset,
};
use crate::error::{Error, Result};
use crate::lambda::{
    cross_ratio, cross_ratio_odd_sets, invariance_probe, recover_lambdas, PartitionPair, ThetaTable,
};
use crate::padic::{Padic, PadicContext};
use crate::theta::{cocycle, lattice_character, theta_value, Polarization};

/// Probe points requested from the certificate.
const PROBE_POOL: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Certify,
    Periods,
    ThetaTable,
    Lambdas,
    Verify,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Certify => "certify",
            Command::Periods => "periods",
            Command::ThetaTable => "theta-table",
            Command::Lambdas => "lambdas",
            Command::Verify => "verify",
        })
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "certify" => Command::Certify,
            "periods" => Command::Periods,
            "theta-table" => Command::ThetaTable,
            "lambdas" => Command::Lambdas,
            "verify" => Command::Verify,
            _ => return Err(Error::Parse(format!("unknown command {s:?}"))),
        })
    }
}

/// Tolerances derived from the identity tolerance `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tolerances {
    /// Sign identities and the period matrix.
    pub identity: i64,
    /// Squares and products of factors.
    pub product: i64,
    /// Theta quotients and everything derived from them.
    pub quotient: i64,
}

impl Tolerances {
    pub fn from_identity(t: i64) -> Self {
        Tolerances {
            identity: t,
            product: t - 1,
            quotient: t - 4,
        }
    }
}

/// `v(a/b - 1)`, or `i64::MIN` when `b` vanishes.
pub fn relative_defect(a: &Padic, b: &Padic) -> i64 {
    match a.checked_div(b) {
        Ok(r) => (r - a.ctx().one()).valuation_bound(),
        Err(_) => i64::MIN,
    }
}

fn shown(x: &Padic, ctx: PadicContext) -> String {
    x.to_context(ctx)
        .map(|v| v.to_string())
        .unwrap_or_else(|e| format!("<{e}>"))
}

fn shown_char(c: &Character, ctx: PadicContext) -> String {
    let parts: Vec<String> = c.entries().iter().map(|x| shown(x, ctx)).collect();
    format!("[{}]", parts.join(", "))
}

fn worst(vals: impl IntoIterator<Item = i64>) -> i64 {
    vals.into_iter().min().unwrap_or(i64::MAX)
}

fn fmt_worst(v: i64) -> String {
    if v == i64::MAX {
        "exact".into()
    } else {
        v.to_string()
    }
}

/// Runs `command` on `spec`. With `out`, the period matrix is cached under
/// `out` and the report body is written to `out/<hash>-<command>.txt`.
pub fn run(command: Command, spec: &CurveSpec, out: Option<&Path>) -> Result<RunReport> {
    spec.validate()?;
    let mut rep = RunReport::new(command.to_string(), spec.config_hash());
    let shown_ctx = spec.report_context()?;
    let tol = Tolerances::from_identity(spec.tolerance);
    let g = spec.genus();
    rep.line("name", &spec.name);
    rep.line("prime", spec.prime);
    rep.line("genus", g);
    rep.line("precision", spec.precision);
    rep.line("work_precision", spec.work_digits()?);
    rep.line("trunc", spec.trunc);
    rep.line("radius", spec.radius);
    rep.line("tolerance", spec.tolerance);

    let t = Instant::now();
    let (group, balls) = spec.group().map_err(|e| e.at("certify"))?;
    let cert = group
        .ping_pong_certify(&balls)
        .map_err(|e| e.at("certify"))?;
    rep.time("certify", t.elapsed());
    for (i, b) in cert.balls.iter().enumerate() {
        rep.line(format!("ball.{i}"), b);
    }
    rep.line(
        "certificate.gap",
        cert.contraction_gap
            .map_or("none".into(), |v| v.to_string()),
    );
    let detail = if cert.passed {
        "all balls disjoint and contracting".into()
    } else {
        cert.violations.join("; ")
    };
    if !rep.check("certificate", cert.passed, detail) || command == Command::Certify {
        return finish(rep, out);
    }

    let t = Instant::now();
    let probes = group.probe_points(&cert, PROBE_POOL);
    let tp = TruncationParams {
        max_len: spec.trunc,
        probes: probes.clone(),
        tail_tolerance: spec.tolerance,
    };
    let aut = Automorphy::new(&group, &cert, tp).map_err(|e| e.at("periods"))?;
    let cache = out.map(PeriodCache::new);
    let key = spec.group_hash()?;
    let cached = match &cache {
        Some(c) => c.load(&key, spec.trunc, group.ctx())?,
        None => None,
    };
    rep.note(format!(
        "period cache {}",
        if cached.is_some() { "hit" } else { "miss" }
    ));
    let data = match cached {
        Some(d) => d,
        None => {
            let q = aut.period_matrix().map_err(|e| e.at("periods"))?;
            let pol = Polarization::from_branch_points(&q, &aut).map_err(|e| e.at("periods"))?;
            let diag = (0..g).map(|i| *pol.get(i, i)).collect();
            let upper = (0..g)
                .flat_map(|i| (i + 1..g).map(move |j| (i, j)))
                .map(|(i, j)| *pol.get(i, j))
                .collect();
            let d = CachedPeriods { q, diag, upper };
            if let Some(c) = &cache {
                c.store(&key, spec.trunc, &d)?;
            }
            d
        }
    };
    let q = data.q.clone();
    let mut pol =
        Polarization::new(&q, &data.diag, Some(&data.upper)).map_err(|e| e.at("periods"))?;
    for [i, j] in &spec.flips {
        pol = pol.flipped(i - 1, j - 1)?;
    }
    rep.time("periods", t.elapsed());
    rep.line("periods.tail", q.tail);
    let vals = q.valuation_matrix()?;
    for i in 0..g {
        for j in 0..g {
            rep.line(
                format!("Q.{}.{}", i + 1, j + 1),
                shown(q.get(i, j), shown_ctx),
            );
        }
    }
    for i in 0..g {
        rep.line(format!("vQ.{}", i + 1), format!("{:?}", vals[i]));
    }
    for i in 0..g {
        for j in i..g {
            rep.line(
                format!("p.{}.{}", i + 1, j + 1),
                shown(pol.get(i, j), shown_ctx),
            );
            rep.line(
                format!("p.{}.{}.canonical", i + 1, j + 1),
                pol.is_canonical(i, j),
            );
        }
    }
    rep.check(
        "period tail",
        q.tail >= tol.identity,
        format!("relative tail {} (need {})", q.tail, tol.identity),
    );
    if command == Command::Periods {
        return finish(rep, out);
    }

    let t = Instant::now();
    let mut table = ThetaTable::new(&pol, spec.radius);
    let k = riemann_constant(g)?;
    for l in BranchLabel::all(g) {
        let h = point_character(l, g)?;
        rep.line(format!("half.{l}.m"), format!("{:?}", h.m));
        rep.line(format!("half.{l}.eps"), format!("{:?}", h.eps));
        rep.line(
            format!("half.{l}.character"),
            shown_char(&h.character(&pol)?, shown_ctx),
        );
        let th = table.theta(&h)?;
        rep.line(
            format!("theta.{l}"),
            if th.exact_zero {
                "0 (paired)".into()
            } else {
                shown(&th.value, shown_ctx)
            },
        );
        let shifted = table.theta(&characteristic_shift(&BranchSubset::new([l.0]), g)?)?;
        rep.line(
            format!("theta.K/{l}"),
            if shifted.exact_zero {
                "0 (paired)".into()
            } else {
                shown(&shifted.value, shown_ctx)
            },
        );
    }
    let tk = table.theta(&k)?;
    rep.line(
        "theta.K",
        if tk.exact_zero {
            "0 (paired)".into()
        } else {
            shown(&tk.value, shown_ctx)
        },
    );
    rep.time("theta-table", t.elapsed());
    if command == Command::ThetaTable {
        return finish(rep, out);
    }

    let t = Instant::now();
    let lambdas =
        recover_lambdas(&mut table, spec.normalization(), i64::MIN).map_err(|e| e.at("lambdas"))?;
    rep.time("lambdas", t.elapsed());
    let n = lambdas.normalization;
    rep.line(
        "normalization",
        format!("{} -> inf, {} -> 0, {} -> 1", n.infinity, n.zero, n.one),
    );
    for e in &lambdas.entries {
        rep.line(format!("lambda.{}", e.label), shown(&e.value, shown_ctx));
        rep.line(
            format!("lambda.{}.derivations", e.label),
            e.derivations.len(),
        );
        rep.line(format!("lambda.{}.spread", e.label), fmt_worst(e.spread));
    }
    let distinct = lambdas.entries.iter().enumerate().all(|(i, a)| {
        let one = a.value.ctx().one();
        !a.value.is_zero()
            && !(a.value - one).is_zero()
            && lambdas.entries[i + 1..]
                .iter()
                .all(|b| !(a.value - b.value).is_zero())
    });
    rep.check(
        "lambda spread",
        lambdas.spread >= tol.quotient && lambdas.entries.iter().all(|e| e.derivations.len() >= 2),
        format!(
            "worst spread {} (need {})",
            fmt_worst(lambdas.spread),
            tol.quotient
        ),
    );
    rep.check(
        "lambda distinct",
        distinct,
        "λ values distinct and outside {0, 1}",
    );
    if command == Command::Lambdas {
        return finish(rep, out);
    }

    let t = Instant::now();
    verify_identities(&mut rep, &aut, &q, tol)?;
    verify_theta(&mut rep, &pol, &mut table, spec.radius, tol)?;
    verify_characters(&mut rep, &aut, &pol, tol);
    verify_cross_ratios(&mut rep, &mut table, g, tol)?;
    let samples: Vec<_> = probes.iter().skip(2).take(spec.samples).copied().collect();
    let pool: Vec<BranchLabel> = BranchLabel::all(g).skip(3).collect();
    let pp = PartitionPair::from_common(
        &BranchSubset::choose(&pool, g - 1)[0],
        BranchLabel(0),
        BranchLabel(1),
        g,
    )?;
    match invariance_probe(&aut, &pol, &pp, spec.radius, &samples) {
        Ok(s) => {
            let w = worst(s.iter().map(|x| x.worst()));
            let ok = s.len() == spec.samples && w >= tol.quotient;
            rep.check(
                "descent probe",
                ok,
                format!(
                    "{} samples, worst {} (need {})",
                    s.len(),
                    fmt_worst(w),
                    tol.quotient
                ),
            );
        }
        Err(e) => {
            rep.check("descent probe", false, e.to_string());
        }
    }
    rep.time("verify", t.elapsed());
    finish(rep, out)
}

fn finish(rep: RunReport, out: Option<&Path>) -> Result<RunReport> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join(format!("{}-{}.txt", &rep.config_hash[..16], rep.command));
        std::fs::write(&path, rep.body())
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(rep)
}

fn verify_identities(
    rep: &mut RunReport,
    aut: &Automorphy,
    q: &PeriodMatrix,
    tol: Tolerances,
) -> Result<()> {
    let grp = aut.group();
    let g = grp.genus();
    let pairs = grp.pairs();
    let (a0, b0) = pairs[0];
    let one = aut.ctx().one();
    let c = aut.c_character(&a0, &b0)?;
    let w = worst(c.entries().iter().map(|x| (*x + one).valuation_bound()));
    rep.check(
        "c(a0,b0) = -1",
        w >= tol.identity,
        format!("worst {} (need {})", fmt_worst(w), tol.identity),
    );

    let mut sign = i64::MAX;
    let mut square = i64::MAX;
    let mut product = i64::MAX;
    for i in 1..=g {
        let (ai, bi) = pairs[i];
        let cba = aut.c_character(&bi, &ai)?;
        for j in 0..g {
            let target = if j + 1 == i { -one } else { one };
            sign = sign.min((cba.entries()[j] - target).valuation_bound());
        }
        let ca0 = aut.c_character(&ai, &a0)?;
        let cb0 = aut.c_character(&bi, &a0)?;
        for j in 0..g {
            let qij = q.get(i - 1, j);
            square = square.min(relative_defect(&(ca0.entries()[j] * ca0.entries()[j]), qij));
            square = square.min(relative_defect(&(cb0.entries()[j] * cb0.entries()[j]), qij));
            product = product.min(relative_defect(
                &cb0.entries()[j],
                &(cba.entries()[j] * ca0.entries()[j]),
            ));
        }
    }
    rep.check(
        "c(b_i,a_i)(γ_j) = ±δ",
        sign >= tol.identity,
        format!("worst {} (need {})", fmt_worst(sign), tol.identity),
    );
    rep.check(
        "c(x_i,a0)^2 = Q_i",
        square >= tol.product,
        format!("worst {} (need {})", fmt_worst(square), tol.product),
    );
    rep.check(
        "c(b_i,a0) = c(b_i,a_i) c(a_i,a0)",
        product >= tol.product,
        format!("worst {} (need {})", fmt_worst(product), tol.product),
    );

    let mut sym = i64::MAX;
    for i in 0..g {
        for j in 0..i {
            sym = sym.min(relative_defect(q.get(i, j), q.get(j, i)));
        }
    }
    let vals = q.valuation_matrix()?;
    rep.check(
        "Q symmetric",
        sym >= tol.identity,
        format!("worst {} (need {})", fmt_worst(sym), tol.identity),
    );
    rep.check(
        "v(Q) positive definite",
        crate::automorphy::is_positive_definite(&vals),
        format!("{vals:?}"),
    );
    if g == 1 {
        let k = grp.free_generator(1)?.multiplier()?;
        let qq = if k.valuation_bound() > 0 { k } else { k.inv()? };
        let d = relative_defect(q.get(0, 0), &qq);
        rep.check(
            "Q_11 = multiplier",
            d >= tol.identity,
            format!("v(Q_11) = {}, defect {}", vals[0][0], fmt_worst(d)),
        );
    }
    Ok(())
}

fn random_character(rng: &mut ChaCha8Rng, ctx: PadicContext, g: usize) -> Character {
    let modulus = ctx.pow_p(ctx.digits()) as i64;
    let p = ctx.prime() as i64;
    Character(
        (0..g)
            .map(|_| {
                let mut u: i64 = rng.gen_range(1..modulus);
                if u % p == 0 {
                    u += 1;
                }
                Padic::from_int(ctx, u).shift(rng.gen_range(-2..=2))
            })
            .collect(),
    )
}

fn lattice_points(g: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..g {
        out = out
            .into_iter()
            .flat_map(|v| (-r..=r).map(move |k| [v.clone(), vec![k]].concat()))
            .collect();
    }
    out
}

fn verify_theta(
    rep: &mut RunReport,
    pol: &Polarization,
    table: &mut ThetaTable,
    radius: usize,
    tol: Tolerances,
) -> Result<()> {
    let g = pol.genus();
    let ctx = pol.ctx();
    let q = pol.period_matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e7a);
    let mut fe_ok = true;
    let mut even_ok = true;
    let mut digits = i64::MAX;
    for _ in 0..20 {
        let c = random_character(&mut rng, ctx, g);
        let base = theta_value(&c, pol, radius)?;
        let inv = theta_value(&c.inverse()?, pol, radius)?;
        let d = base.value - inv.value;
        even_ok &= d.is_zero();
        digits = digits.min(d.absolute_precision() - base.value.valuation_bound());
        for n in lattice_points(g, 2) {
            let shifted = theta_value(&(&c * &lattice_character(&n, q)?), pol, radius)?;
            let expect = base.value.checked_div(&cocycle(&n, &c, pol)?)?;
            let d = shifted.value - expect;
            fe_ok &= d.is_zero();
            digits = digits.min(d.absolute_precision() - expect.valuation_bound());
        }
    }
    let meaningful = digits >= tol.quotient;
    rep.check(
        "theta functional equation",
        fe_ok && meaningful,
        format!(
            "20 characters, |n| <= 2, worst compared digits {}",
            fmt_worst(digits)
        ),
    );
    rep.check("theta evenness", even_ok && meaningful, "θ(c) = θ(1/c)");

    let mut zeros = true;
    for k in 1..=g {
        zeros &= table
            .theta(&point_character(BranchLabel::b(k), g)?)?
            .exact_zero;
    }
    zeros &= table.theta(&riemann_constant(g)?)?.exact_zero;
    let b0 = point_character(BranchLabel::b(0), g)?;
    let others: Vec<BranchLabel> = BranchLabel::all(g)
        .filter(|l| *l != BranchLabel::b(0))
        .collect();
    for rest in BranchSubset::choose(&others, g - 1) {
        let d = rest.with(BranchLabel::b(0));
        zeros &= table
            .theta(&b0.mul(&characteristic_shift(&d, g)?))?
            .exact_zero;
    }
    rep.check(
        "theta zeros",
        zeros,
        "θ(t(b_k)) = 0, θ(K) = 0, θ_D(t(b_0)) = 0 for D ∋ b_0",
    );

    let mut wide = ThetaTable::new(pol, radius + 2);
    let mut nonzero = true;
    let mut count = 0;
    for d in BranchSubset::all_subsets(g).filter(|d| is_nonspecial(d, g)) {
        let h = characteristic_shift(&d, g)?;
        let a = table.theta(&h)?;
        let b = wide.theta(&h)?;
        nonzero &= !a.is_zero()
            && !b.is_zero()
            && a.value.valuation() == b.value.valuation()
            && a.value.agrees_with(&b.value);
        count += 1;
    }
    rep.check(
        "theta nonzero",
        nonzero && count > 0,
        format!("{count} non-special subsets, stable under R -> R+2"),
    );
    Ok(())
}

fn verify_characters(rep: &mut RunReport, aut: &Automorphy, pol: &Polarization, tol: Tolerances) {
    let g = pol.genus();
    let mut w = i64::MAX;
    let mut errors = Vec::new();
    for l in BranchLabel::all(g) {
        match cross_check_character(l, aut, pol) {
            Ok(cc) => w = w.min(cc.agreement),
            Err(e) => errors.push(format!("{l}: {e}")),
        }
    }
    let detail = if errors.is_empty() {
        format!("worst {} (need {})", fmt_worst(w), tol.identity)
    } else {
        errors.join("; ")
    };
    rep.check(
        "point characters",
        errors.is_empty() && w >= tol.identity,
        detail,
    );
}

/// All partition pairs `(S + l, S + m)` with `|S| = g - 1`.
pub fn partition_pairs(g: usize) -> Vec<PartitionPair> {
    let labels: Vec<BranchLabel> = BranchLabel::all(g).collect();
    let mut out = Vec::new();
    for s in BranchSubset::choose(&labels, g - 1) {
        for &l in &labels {
            for &m in &labels {
                if l != m && !s.contains(l) && !s.contains(m) {
                    if let Ok(pp) = PartitionPair::from_common(&s, l, m, g) {
                        out.push(pp);
                    }
                }
            }
        }
    }
    out
}

fn verify_cross_ratios(
    rep: &mut RunReport,
    table: &mut ThetaTable,
    g: usize,
    tol: Tolerances,
) -> Result<()> {
    let labels: Vec<BranchLabel> = BranchLabel::all(g).collect();
    let mut routes = (0, 0, i64::MAX);
    let mut symmetry = (0, 0, i64::MAX);
    for pp in partition_pairs(g) {
        let free: Vec<BranchLabel> = labels
            .iter()
            .copied()
            .filter(|x| !pp.p1.contains(*x) && !pp.p2.contains(*x))
            .collect();
        for &h in &free {
            for &k in &free {
                if h == k {
                    continue;
                }
                match (
                    cross_ratio(&pp, h, k, table),
                    cross_ratio_odd_sets(&pp, h, k, table),
                ) {
                    (Ok(a), Ok(b)) => {
                        routes.0 += 1;
                        let d = relative_defect(&a, &b);
                        routes.2 = routes.2.min(d);
                        if a.agrees_with(&b) && d >= tol.quotient {
                            routes.1 += 1;
                        }
                    }
                    (Err(Error::ZeroDenominator(_)), Err(Error::ZeroDenominator(_))) => {}
                    (Err(e), _) | (_, Err(e)) => {
                        routes.0 += 1;
                        rep.line(format!("routes.{}.{}.{h}.{k}", pp.p1, pp.p2), e);
                    }
                }
                let Ok(a) = cross_ratio(&pp, h, k, table) else {
                    continue;
                };
                if let Ok(r) = cross_ratio(&pp.swapped(), h, k, table) {
                    symmetry.0 += 1;
                    let d = (a * r - a.ctx().one()).valuation_bound();
                    symmetry.2 = symmetry.2.min(d);
                    if d >= tol.quotient {
                        symmetry.1 += 1;
                    }
                }
                for &j in &free {
                    if j == h || j == k {
                        continue;
                    }
                    let (Ok(b), Ok(c)) =
                        (cross_ratio(&pp, k, j, table), cross_ratio(&pp, h, j, table))
                    else {
                        continue;
                    };
                    symmetry.0 += 1;
                    let d = relative_defect(&(a * b), &c);
                    symmetry.2 = symmetry.2.min(d);
                    if d >= tol.quotient {
                        symmetry.1 += 1;
                    }
                }
            }
        }
    }
    rep.check(
        "cross ratio routes",
        routes.0 > 0 && routes.0 == routes.1,
        format!(
            "{}/{} agree, worst {}",
            routes.1,
            routes.0,
            fmt_worst(routes.2)
        ),
    );
    rep.check(
        "cross ratio symmetries",
        symmetry.0 > 0 && symmetry.0 == symmetry.1,
        format!(
            "{}/{} reciprocal and cocycle relations, worst {}",
            symmetry.1,
            symmetry.0,
            fmt_worst(symmetry.2)
        ),
    );
    Ok(())
}

#![allow(dead_code)]

use std::path::PathBuf;

use mumford_lambda::automorphy::{Automorphy, PeriodMatrix, TruncationParams};
use mumford_lambda::cli::CurveSpec;
use mumford_lambda::moebius::{CertificateReport, WhittakerGroup, Word};
use mumford_lambda::padic::{Padic, ProjPoint};
use mumford_lambda::theta::Polarization;

pub fn spec_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../specs")
        .join(format!("{name}.toml"))
}

pub fn load_spec(name: &str) -> CurveSpec {
    CurveSpec::load(&spec_path(name)).unwrap()
}

/// Everything up to the polarization for one example curve.
pub struct Fixture {
    pub spec: CurveSpec,
    pub group: &'static WhittakerGroup,
    pub cert: CertificateReport,
    pub aut: Automorphy<'static>,
    pub q: PeriodMatrix,
    pub pol: Polarization,
    pub probes: Vec<ProjPoint>,
}

impl Fixture {
    pub fn load(name: &str) -> Fixture {
        let spec = load_spec(name);
        let (group, balls) = spec.group().unwrap();
        let group: &'static WhittakerGroup = Box::leak(Box::new(group));
        let cert = group.ping_pong_certify(&balls).unwrap();
        assert!(cert.passed, "{:?}", cert.violations);
        let probes = group.probe_points(&cert, 40);
        let tp = TruncationParams {
            max_len: spec.trunc,
            probes: probes.clone(),
            tail_tolerance: spec.tolerance,
        };
        let aut = Automorphy::new(group, &cert, tp).unwrap();
        let q = aut.period_matrix().unwrap();
        let pol = Polarization::from_branch_points(&q, &aut).unwrap();
        Fixture {
            spec,
            group,
            cert,
            aut,
            q,
            pol,
            probes,
        }
    }

    pub fn genus(&self) -> usize {
        self.group.genus()
    }
}

/// `v(a/b - 1)`, or `i64::MIN` if `b` vanishes.
pub fn rel(a: &Padic, b: &Padic) -> i64 {
    match a.checked_div(b) {
        Ok(r) => (r - a.ctx().one()).valuation_bound(),
        Err(_) => i64::MIN,
    }
}

/// Brute-force `c_{a,b}(γ_j) = ∏ ρ(ha, hb; γ_j z, z)` over every reduced
/// even word `h` of length at most `max_len`, listed recursively.
pub fn naive_c(
    group: &WhittakerGroup,
    a: &ProjPoint,
    b: &ProjPoint,
    j: usize,
    z: &ProjPoint,
    max_len: usize,
) -> Padic {
    let ctx = group.ctx();
    let gz = group.act(&Word::generator(j), z).unwrap();
    let mut num = ctx.one();
    let mut den = ctx.one();
    let mut stack = vec![(*a, *b, usize::MAX, 0usize)];
    while let Some((ha, hb, last, len)) = stack.pop() {
        if len % 2 == 0 {
            num = num * gz.bracket(&ha) * z.bracket(&hb);
            den = den * gz.bracket(&hb) * z.bracket(&ha);
        }
        if len == max_len {
            continue;
        }
        for l in 0..=group.genus() {
            if l != last {
                let s = group.involution(l);
                stack.push((s.apply(&ha).unwrap(), s.apply(&hb).unwrap(), l, len + 1));
            }
        }
    }
    num.checked_div(&den).unwrap()
}

/// A probe point away from `pts`.
pub fn probe_avoiding(f: &Fixture, pts: &[ProjPoint]) -> ProjPoint {
    *f.probes
        .iter()
        .find(|z| pts.iter().all(|p| !p.coincides(z)))
        .unwrap()
}

/// All points of `[-r, r]^g`.
pub fn lattice_box(g: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..g {
        out = out
            .into_iter()
            .flat_map(|v| (-r..=r).map(move |k| [v.clone(), vec![k]].concat()))
            .collect();
    }
    out
}

/// `k`-element subsets of `0..n`.
pub fn choose(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = choose(n - 1, k);
    for mut s in choose(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

//! Runnable acceptance checks.
//!
//! Each criterion gathers named sub-checks and its wall-clock time; it
//! passes only if every check holds and the time stays within budget.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::binning::{self, exact_equivocation, Observer, RateConstraint, Scheme, SchemeRates, Schedule};
use crate::bounds::{
    self, check_condition, evaluate, search_region, AuxAssignment, AuxCards, BoundKind, BoundSpec,
    CandidateSource, Condition,
};
use crate::channel::{DiscreteCrc, GaussianCrc};
use crate::error::Result;
use crate::gaussian::{self, cor2_classify, cor3_point, psi, thm3_point, thm7_point, Cor2Class};
use crate::prob::{sample_joint, vars, JointPmf};
use crate::region::{contains_point, convexify_2d, inclusion_fraction, pareto_filter, project_region, Dims, RatePoint, Region};

/// Number of acceptance criteria.
pub const CRITERIA: u8 = 10;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub elapsed_s: f64,
    pub budget_s: f64,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    /// One-line summary, e.g. `PASS  4 mutual-information oracle (0.02 s)`.
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{verdict} {:>2} {} ({:.2} s of {:.0} s)",
            self.id, self.title, self.elapsed_s, self.budget_s
        );
        for c in self.checks.iter().filter(|c| !c.passed) {
            s.push_str(&format!("\n       failed: {}: {}", c.name, c.detail));
        }
        s
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

const SEED: u64 = 0x5eed_c0de;

fn title(id: u8) -> &'static str {
    match id {
        1 => "psi unit values",
        2 => "gaussian example trends",
        3 => "gaussian consistency",
        4 => "mutual-information oracle",
        5 => "orthogonal-channel corner",
        6 => "outer and semi-deterministic regions coincide",
        7 => "secrecy vanishes on the XOR channel",
        8 => "binning simulator",
        9 => "region geometry oracles",
        _ => "equivocation caps do not change rate frontiers",
    }
}

fn budget(id: u8) -> f64 {
    match id {
        1 => 1.0,
        2 | 3 => 5.0,
        4 | 9 => 10.0,
        6 => 300.0,
        8 => 120.0,
        _ => 60.0,
    }
}

/// Runs criterion `id` (1 through [`CRITERIA`]).
pub fn run_criterion(id: u8) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut c = Checks::default();
    match id {
        1 => c1(&mut c)?,
        2 => c2(&mut c)?,
        3 => c3(&mut c)?,
        4 => c4(&mut c)?,
        5 => c5(&mut c)?,
        6 => c6(&mut c)?,
        7 => c7(&mut c)?,
        8 => c8(&mut c)?,
        9 => c9(&mut c)?,
        10 => c10(&mut c)?,
        _ => {
            return Err(crate::error::Error::InvalidScheme(format!(
                "no criterion {id}; expected 1..={CRITERIA}"
            )))
        }
    }
    let elapsed_s = start.elapsed().as_secs_f64();
    let budget_s = budget(id);
    c.add("runtime", elapsed_s < budget_s, format!("{elapsed_s:.3} s, budget {budget_s} s"));
    Ok(CriterionResult {
        id,
        title: title(id),
        passed: c.0.iter().all(|k| k.passed),
        elapsed_s,
        budget_s,
        checks: c.0,
    })
}

pub fn run_all() -> Result<Vec<CriterionResult>> {
    (1..=CRITERIA).map(run_criterion).collect()
}

fn c1(c: &mut Checks) -> Result<()> {
    let (p0, p3, p20) = (psi(0.0)?, psi(3.0)?, psi(20.0)?);
    c.add("psi(0) = 0", p0 == 0.0, format!("{p0:e}"));
    c.add("psi(3) = 1", p3 == 1.0, format!("{p3:.17}"));
    c.add("psi(20)", (p20 - 2.196159).abs() <= 1e-6, format!("{p20:.12}"));
    Ok(())
}

fn c2(c: &mut Checks) -> Result<()> {
    let data = gaussian::figure2_dataset();
    let r2: Vec<f64> = data.iter().map(|(_, r)| r.max_coord(1)).collect();
    let re1: Vec<f64> = data.iter().map(|(_, r)| r.max_coord(2)).collect();
    c.add("max R2 nondecreasing in b", r2.windows(2).all(|w| w[0] <= w[1]), format!("{r2:?}"));
    c.add("max Re1 nonincreasing in b", re1.windows(2).all(|w| w[0] >= w[1]), format!("{re1:?}"));
    let (_, last) = data.last().expect("four curves");
    let zero = last.frontier.iter().all(|p| p.re1 == 0.0);
    c.add("Re1 = 0 at b = 1", zero, format!("{} frontier points", last.len()));
    Ok(())
}

fn c3(c: &mut Checks) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut worst_eq, mut worst_cor3) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let mag = rng.random_range(0.01..0.99);
        let b = if rng.random::<bool>() { mag } else { -mag };
        let g = GaussianCrc::new(1.0 / b, b, rng.random_range(0.01..100.0), rng.random_range(0.01..100.0))?;
        let alpha = rng.random::<f64>();
        let (p3, p7) = (thm3_point(&g, alpha)?, thm7_point(&g, alpha)?);
        for (x, y) in [
            (p3.r1_max, p7.r1_max),
            (p3.r2_max, p7.r2_max),
            (p3.re1_max, p7.re1_max),
            (p3.re2_max, p7.re2_max),
        ] {
            worst_eq = worst_eq.max((x - y).abs());
        }
        let g7 = GaussianCrc::new(rng.random_range(-5.0..5.0), rng.random_range(-1.0..=1.0), g.p1, g.p2)?;
        let (s1, s2) = cor3_point(&g7, alpha)?;
        let p = thm7_point(&g7, alpha)?;
        worst_cor3 = worst_cor3.max((s1 - p.re1_max).abs()).max((s2 - p.r2_max).abs());
    }
    c.add("thm3 equals thm7", worst_eq <= 1e-12, format!("max diff {worst_eq:e}"));
    c.add("cor3 slice equals thm7 (Re1, R2)", worst_cor3 <= 1e-12, format!("max diff {worst_cor3:e}"));
    let mut mismatches = Vec::new();
    let mags = [0.0, 0.25, 0.5, 0.999, 1.0, 1.001, 1.5, 2.0, 10.0];
    for &bm in &mags {
        for sign in [1.0, -1.0] {
            for &a in &[-4.0, -1.0, 0.5, 1.0, 2.0, 4.0] {
                let b = sign * bm;
                let g = GaussianCrc::new(a, b, 10.0, 10.0)?;
                let none = cor2_classify(&g) == Cor2Class::NoSecrecyForM1;
                if none != (b.abs() >= 1.0) {
                    mismatches.push((a, b));
                }
            }
        }
    }
    c.add("cor2 classification iff |b| >= 1", mismatches.is_empty(), format!("mismatches {mismatches:?}"));
    Ok(())
}

/// `sum p(a,b,c) log2( p(a,b,c) p(c) / (p(a,c) p(b,c)) )`.
fn cmi_direct_sum(p: &JointPmf) -> f64 {
    let q = |a: usize, b: usize, c: usize| p.prob(&[a, b, c]);
    let mut total = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            for cc in 0..2 {
                let pabc = q(a, b, cc);
                if pabc == 0.0 {
                    continue;
                }
                let pc: f64 = (0..2).flat_map(|x| (0..2).map(move |y| (x, y))).map(|(x, y)| q(x, y, cc)).sum();
                let pac: f64 = (0..2).map(|y| q(a, y, cc)).sum();
                let pbc: f64 = (0..2).map(|x| q(x, b, cc)).sum();
                total += pabc * (pabc * pc / (pac * pbc)).log2();
            }
        }
    }
    total
}

fn c4(c: &mut Checks) -> Result<()> {
    let mut worst = 0.0f64;
    for i in 0..1000u64 {
        let mut p = sample_joint([("A", 2), ("B", 2), ("C", 2)], crate::prob::derive_seed(SEED, i))?;
        if i % 10 == 0 {
            // sprinkle exact zeros
            let mut w = p.probs().to_vec();
            w[(i as usize / 10) % 8] = 0.0;
            p = JointPmf::from_weights([("A", 2), ("B", 2), ("C", 2)], w)?;
        }
        let fast = p.conditional_mutual_information(&["A"], &["B"], &["C"])?;
        worst = worst.max((fast - cmi_direct_sum(&p)).abs());
    }
    c.add("CMI matches direct sum", worst <= 1e-12, format!("max diff {worst:e}"));
    Ok(())
}

fn orthogonal_hand_aux() -> Result<JointPmf> {
    JointPmf::from_fn([(vars::U, 2), (vars::X1, 2), (vars::X2, 2)], |i| {
        if i[0] == i[1] {
            1.0
        } else {
            0.0
        }
    })
}

fn c5(c: &mut Checks) -> Result<()> {
    let ch = DiscreteCrc::orthogonal();
    let cards = AuxCards { q: 1, w: 1, v: 1, u: 2 };
    let inner = search_region(&ch, BoundSpec::new(BoundKind::Inner), cards, 2000, SEED)?;
    let target = RatePoint::new(0.95, 0.95, 0.95, 0.0);
    let hit = inner.region.frontier.iter().find(|p| bounds_dominates(p, &target));
    c.add(
        "inner search dominates (0.95, 0.95, 0.95, 0)",
        hit.is_some(),
        format!("{:?}", hit.map(|p| p.coords())),
    );
    let aux = AuxAssignment::new(&ch, &orthogonal_hand_aux()?)?;
    let v = bounds::inner_point(&ch, &aux)?;
    c.add(
        "hand aux evaluates to (1, 1, 1, 0)",
        v.iter().any(|p| p.coords() == [1.0, 1.0, 1.0, 0.0]),
        format!("{:?}", v.iter().map(|p| p.coords()).collect::<Vec<_>>()),
    );
    let outer = search_region(&ch, BoundSpec::new(BoundKind::Outer), AuxCards::default_for(&ch), 2000, SEED)?;
    let (m1, m2) = (outer.region.max_coord(0), outer.region.max_coord(1));
    c.add(
        "outer never exceeds 1 in R1 or R2",
        m1 <= 1.0 + 1e-9 && m2 <= 1.0 + 1e-9,
        format!("max R1 {m1}, max R2 {m2}"),
    );
    Ok(())
}

fn bounds_dominates(p: &RatePoint, q: &RatePoint) -> bool {
    crate::region::dominates(p, q, Dims::ALL)
}

fn c6(c: &mut Checks) -> Result<()> {
    let ch = DiscreteCrc::xor_identical();
    let report = check_condition(&ch, Condition::SemiDet, 2000, SEED, None, None)?;
    c.add(
        "semi-deterministic condition holds with zero gap",
        !report.violated && report.max_gap == 0.0,
        format!("max gap {:e}", report.max_gap),
    );
    let cards = AuxCards::default_for(&ch);
    let outer = search_region(&ch, BoundSpec::new(BoundKind::Outer), cards, 5000, SEED)?;
    let semidet = search_region(&ch, BoundSpec::new(BoundKind::SemiDet), cards, 5000, SEED ^ 1)?;
    let f = inclusion_fraction(&outer.region, &semidet.region, 0.02);
    c.add(
        "outer frontier inside semi-deterministic region",
        f >= 0.98,
        format!("fraction {f:.4} of {} points", outer.region.len()),
    );
    Ok(())
}

fn c7(c: &mut Checks) -> Result<()> {
    let ch = DiscreteCrc::xor_identical();
    let cards = AuxCards::default_for(&ch);
    for kind in [BoundKind::Inner, BoundKind::Outer, BoundKind::SemiDet] {
        let aux: Vec<(&str, usize)> = kind.aux_axes().iter().map(|&n| (n, cards.get(n))).collect();
        let source = CandidateSource::new(&ch, &aux, SEED)?;
        let total = source.structured_len() + 2000;
        let mut emitted = 0usize;
        let mut offenders = 0usize;
        for i in 0..total {
            let a = AuxAssignment::new(&ch, &source.get(i)?)?;
            for p in evaluate(&ch, &a, BoundSpec::new(kind))? {
                emitted += 1;
                if p.re1 != 0.0 || p.re2 != 0.0 {
                    offenders += 1;
                }
            }
        }
        c.add(
            format!("{} vertices have zero secrecy", kind.name()),
            offenders == 0,
            format!("{offenders} of {emitted} vertices nonzero"),
        );
    }
    Ok(())
}

/// `X1 = (U, V)` seen by `Y1`; `Y2 = (V, X2)`.
fn validation_fixture() -> Result<(DiscreteCrc, JointPmf)> {
    let ch = DiscreteCrc::deterministic((4, 2, 4, 4), |x1, _| x1, |x1, x2| (x1 % 2) * 2 + x2)?;
    let aux = JointPmf::from_fn([(vars::V, 2), (vars::U, 2), (vars::X1, 4), (vars::X2, 2)], |i| {
        let (v, u, x1) = (i[0], i[1], i[2]);
        if x1 != u * 2 + v {
            0.0
        } else if u == v {
            0.4
        } else {
            0.1
        }
    })?;
    Ok((ch, aux))
}

/// Rate bundle sitting `d` beyond (positive) or inside (negative) the
/// boundary of `target`, and inside every other constraint.
fn boundary_bundle(info: &binning::SchemeInfo, target: RateConstraint, d: f64) -> SchemeRates {
    let mut r = SchemeRates { r1: 0.3, r21: 0.3, r22: 0.3, l1: 0.3, l1b: 0.2, l21: 0.3, l21b: 0.2, eps: 0.0 };
    let set_d1 = |r: &mut SchemeRates, v: f64| r.l1b = v + r.r1 - r.l1;
    let set_d2 = |r: &mut SchemeRates, v: f64| r.l21b = v + r.r21 - r.l21;
    match target {
        RateConstraint::PrivateRate => {
            r.r1 = info.u_y1 - info.u_x2 + d;
            r.l1 = r.r1;
        }
        RateConstraint::SuperpositionRate => {
            r.r21 = info.v_y2_x2 + d;
            r.l21 = r.r21;
        }
        RateConstraint::CloudRate => r.r22 = info.x2_y2 + d,
        RateConstraint::SumRate => {
            r.r1 = 0.9;
            r.l1 = 0.9;
            r.r21 = info.u_y1 + info.v_y2_x2 - info.u_vx2 - r.r1 + d;
            r.l21 = r.r21;
        }
        RateConstraint::CoverU => {
            let total = r.r1 + info.u_x2 - d;
            r.l1 = total.min(r.r1);
            r.l1b = total - r.l1;
            set_d2(&mut r, info.u_vx2 + 0.2);
        }
        RateConstraint::CoverUV => {
            set_d1(&mut r, info.u_x2 + 0.1);
            set_d2(&mut r, info.u_vx2 - (info.u_x2 + 0.1) - d);
        }
        RateConstraint::Wiretap => {
            set_d1(&mut r, info.u_x2 + 0.1);
            set_d2(&mut r, info.v_y1u_x2 + d);
        }
    }
    r
}

fn c8(c: &mut Checks) -> Result<()> {
    let noise = binning::pure_noise_eavesdropper();
    let s = Scheme::new(&noise, &binning::orthogonal_aux())?;
    let r = s.rates(0.5, 0.0, 0.0, 0.2)?;
    let cb = binning::build_codebook(&s, &r, 8, SEED)?;
    let h = exact_equivocation(&cb, &noise, Observer::M1AtY2, r.eps, binning::DEFAULT_EXACT_BUDGET)?;
    let full = (cb.counts().m1 as f64).log2();
    c.add("pure-noise equivocation is log2 #M1", h == full, format!("{h} vs {full}"));

    let orth = DiscreteCrc::orthogonal();
    let s = Scheme::new(&orth, &binning::orthogonal_aux())?;
    let r = s.rates(0.5, 0.0, 0.5, 0.2)?;
    let rep = binning::run_trials(
        &s,
        &r,
        8,
        1000,
        SEED,
        Schedule::OneCodebook,
        binning::DEFAULT_EXACT_BUDGET,
        binning::DEFAULT_SYMBOL_BUDGET,
    )?;
    for (name, e) in [("cognitive", rep.decode1_error_rate), ("primary", rep.decode2_error_rate)] {
        c.add(
            format!("{name} decode error <= 0.1"),
            e.rate <= 0.1,
            format!("{} of {} (95% CI {:.3}..{:.3})", e.events, e.trials, e.ci_low, e.ci_high),
        );
    }
    let per_symbol = rep.exact_equivocation_m1_at_y2.map(|b| b / 8.0);
    c.add(
        "per-symbol equivocation within 0.1 of L1",
        per_symbol.is_some_and(|e| (e - r.l1).abs() <= 0.1),
        format!("{per_symbol:?} vs L1 = {}", r.l1),
    );

    let (ch, aux) = validation_fixture()?;
    let info = *Scheme::new(&ch, &aux)?.info();
    for target in RateConstraint::ALL {
        let outside = boundary_bundle(&info, target, 0.01);
        let rejected = matches!(
            binning::validate_rates(&info, &outside),
            Err(crate::error::Error::RateConstraint { ref constraint, .. }) if constraint == target.formula()
        );
        let inside = binning::validate_rates(&info, &boundary_bundle(&info, target, -0.01));
        c.add(
            format!("validation at {}", target.formula()),
            rejected && inside.is_ok(),
            format!("outside rejected: {rejected}, inside: {inside:?}"),
        );
    }
    Ok(())
}

fn brute_frontier(points: &[RatePoint], dims: Dims) -> BTreeSet<[u64; 4]> {
    let active: Vec<usize> = dims.active().collect();
    let key = |p: &RatePoint| {
        let c = p.coords();
        let mut k = [0u64; 4];
        for &i in &active {
            k[i] = c[i].to_bits();
        }
        k
    };
    points
        .iter()
        .filter(|p| {
            !points.iter().any(|q| {
                let (a, b) = (q.coords(), p.coords());
                active.iter().all(|&i| a[i] >= b[i]) && active.iter().any(|&i| a[i] > b[i])
            })
        })
        .map(key)
        .collect()
}

fn c9(c: &mut Checks) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let grid = |rng: &mut ChaCha8Rng| rng.random_range(0..9) as f64 * 0.125;
    let (mut pareto_bad, mut hull_bad) = (0usize, 0usize);
    for trial in 0..1000 {
        let dims = [Dims::ALL, Dims::NO_RE2, Dims::RATES][trial % 3];
        let n = rng.random_range(1..40);
        let pts: Vec<RatePoint> = (0..n)
            .map(|_| RatePoint::new(grid(&mut rng), grid(&mut rng), grid(&mut rng), grid(&mut rng)))
            .collect();
        let got: BTreeSet<[u64; 4]> = pareto_filter(pts.clone(), dims)
            .frontier
            .iter()
            .map(|p| p.coords().map(f64::to_bits))
            .collect();
        let projected: Vec<RatePoint> = pts
            .iter()
            .map(|p| {
                let mut k = p.coords();
                for (i, x) in k.iter_mut().enumerate() {
                    if !dims.0[i] {
                        *x = 0.0;
                    }
                }
                RatePoint::new(k[0], k[1], k[2], k[3])
            })
            .collect();
        if got != brute_frontier(&projected, dims) {
            pareto_bad += 1;
        }

        let planar = pareto_filter(pts.iter().map(|p| RatePoint::new(p.r1, p.r2, 0.0, 0.0)), Dims::RATES);
        if !hull_ok(&planar)? {
            hull_bad += 1;
        }
    }
    c.add("pareto filter matches brute force", pareto_bad == 0, format!("{pareto_bad} mismatching sets"));
    c.add("hulls are convex and cover their input", hull_bad == 0, format!("{hull_bad} bad hulls"));
    Ok(())
}

fn hull_ok(region: &Region) -> Result<bool> {
    let hull = convexify_2d(region)?;
    let mut v: Vec<(f64, f64)> = hull.frontier.iter().map(|p| (p.r1, p.r2)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let xmax = v.last().map_or(0.0, |p| p.0);
    let ymax = v.first().map_or(0.0, |p| p.1);
    let mut chain = vec![(0.0, ymax)];
    chain.extend(v.iter().copied());
    chain.push((xmax, 0.0));
    chain.dedup();
    let convex = chain.windows(3).all(|w| {
        let (o, a, b) = (w[0], w[1], w[2]);
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0) < 0.0
    });
    let covers = region.frontier.iter().all(|p| contains_point(&hull, p, 1e-12));
    let from_input = hull
        .frontier
        .iter()
        .all(|h| region.frontier.iter().any(|p| p.coords() == h.coords()));
    Ok(convex && covers && from_input)
}

fn frontiers_match(a: &Region, b: &Region, tol: f64) -> bool {
    let close = |x: &RatePoint, y: &RatePoint| {
        x.coords().iter().zip(y.coords()).all(|(p, q)| (p - q).abs() <= tol)
    };
    a.len() == b.len()
        && a.frontier.iter().all(|p| b.frontier.iter().any(|q| close(p, q)))
        && b.frontier.iter().all(|p| a.frontier.iter().any(|q| close(p, q)))
}

fn c10(c: &mut Checks) -> Result<()> {
    for (label, ch) in [("XOR", DiscreteCrc::xor_identical()), ("orthogonal", DiscreteCrc::orthogonal())] {
        let cards = AuxCards::default_for(&ch);
        for kind in [BoundKind::LessNoisy, BoundKind::SemiDetNoRe2] {
            let full = search_region(&ch, BoundSpec::new(kind), cards, 1000, SEED)?;
            let bare = search_region(&ch, BoundSpec::rates_only(kind), cards, 1000, SEED)?;
            let projected = project_region(&full.region, Dims::RATES);
            c.add(
                format!("{label} {}", kind.name()),
                frontiers_match(&projected, &bare.region, 1e-9),
                format!("{} vs {} frontier points", projected.len(), bare.region.len()),
            );
        }
    }
    Ok(())
}

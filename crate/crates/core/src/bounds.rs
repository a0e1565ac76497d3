//! Single-letter regions of the discrete channel and sampled searches over
//! auxiliary distributions.
//!
//! Every evaluator reduces one auxiliary distribution to five numbers: box
//! caps on `R1` and `R2`, a cap on `R1 + R2`, and equivocation caps `E1`,
//! `E2`. The corresponding 2-D polytope has at most five vertices, each
//! paired with `Re_i = min(R_i, E_i)`. A search merges the vertices of many
//! distributions into a Pareto frontier, which under-approximates the union.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{DiscreteCrc, SemiDetTag};
use crate::error::{Error, Result};
use crate::prob::{derive_seed, sample_joint, vars, Info, JointPmf};
use crate::region::{pareto_filter, Dims, PointMeta, RatePoint, Region};

/// Secrecy differences at or below this are rounding noise and read as 0.
pub const SECRECY_SNAP: f64 = 1e-12;

/// A condition gap above this is reported as a violation.
pub const CONDITION_TOL: f64 = 1e-9;

/// Entropy levels per input symbol in the structured input grid.
const ENTROPY_LEVELS: usize = 50;

const AUX_ORDER: [&str; 4] = [vars::Q, vars::W, vars::V, vars::U];
const CANONICAL: [&str; 6] = [vars::Q, vars::W, vars::V, vars::U, vars::X1, vars::X2];

/// An auxiliary distribution over `(Q, W, V, U, X1, X2)` together with the
/// channel outputs it induces.
#[derive(Clone, Debug)]
pub struct AuxAssignment {
    joint: JointPmf,
    extended: JointPmf,
}

impl AuxAssignment {
    /// Accepts any subset of the auxiliary axes; missing ones are added as
    /// constants. Axes are reordered to `(Q, W, V, U, X1, X2)`.
    pub fn new(ch: &DiscreteCrc, joint: &JointPmf) -> Result<Self> {
        if let Some(extra) = joint
            .axes()
            .iter()
            .find(|a| !CANONICAL.contains(&a.name.as_str()))
        {
            return Err(Error::UnknownVariable(extra.name.clone()));
        }
        let mut full = joint.clone();
        for name in AUX_ORDER {
            if !full.has_axis(name) {
                full = full.with_degenerate_axis(name)?;
            }
        }
        let joint = full.permute(&CANONICAL)?;
        let extended = ch.induce_joint(&joint)?;
        Ok(AuxAssignment { joint, extended })
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    /// The joint extended with `Y1`, `Y2`.
    pub fn extended(&self) -> &JointPmf {
        &self.extended
    }
}

/// Which single-letter region to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Achievable region of the binning scheme.
    Inner,
    /// Outer bound with auxiliaries `U`, `V`, `W`.
    Outer,
    /// Capacity-equivocation region of a less-noisy channel.
    LessNoisy,
    /// Capacity-equivocation region of a semi-deterministic channel.
    SemiDet,
    /// As [`BoundKind::SemiDet`] without a secrecy requirement on `M2`.
    SemiDetNoRe2,
}

impl BoundKind {
    pub const ALL: [BoundKind; 5] = [
        BoundKind::Inner,
        BoundKind::Outer,
        BoundKind::LessNoisy,
        BoundKind::SemiDet,
        BoundKind::SemiDetNoRe2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Inner => "inner",
            BoundKind::Outer => "outer",
            BoundKind::LessNoisy => "less-noisy",
            BoundKind::SemiDet => "semi-det",
            BoundKind::SemiDetNoRe2 => "semi-det-no-re2",
        }
    }

    pub fn parse(s: &str) -> Option<BoundKind> {
        BoundKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Auxiliary axes the region depends on, in canonical order.
    pub fn aux_axes(self) -> &'static [&'static str] {
        match self {
            BoundKind::Inner => &[vars::Q, vars::W, vars::V, vars::U],
            BoundKind::Outer => &[vars::W, vars::V, vars::U],
            BoundKind::LessNoisy => &[vars::V, vars::U],
            BoundKind::SemiDet | BoundKind::SemiDetNoRe2 => &[vars::V],
        }
    }

    fn dims(self) -> Dims {
        match self {
            BoundKind::SemiDetNoRe2 => Dims::NO_RE2,
            _ => Dims::ALL,
        }
    }
}

/// A region to evaluate, optionally with the equivocation caps dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub kind: BoundKind,
    #[serde(default)]
    pub rates_only: bool,
}

impl BoundSpec {
    pub fn new(kind: BoundKind) -> Self {
        BoundSpec {
            kind,
            rates_only: false,
        }
    }

    pub fn rates_only(kind: BoundKind) -> Self {
        BoundSpec {
            kind,
            rates_only: true,
        }
    }

    pub fn dims(&self) -> Dims {
        if self.rates_only {
            Dims::RATES
        } else {
            self.kind.dims()
        }
    }
}

/// Caps of the per-distribution polytope.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Caps {
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
    pub e1: f64,
    pub e2: f64,
}

fn secrecy(diff: f64) -> f64 {
    if diff <= SECRECY_SNAP {
        0.0
    } else {
        diff
    }
}

/// Evaluates the caps of `kind` on one auxiliary distribution.
pub fn caps(ch: &DiscreteCrc, aux: &AuxAssignment, kind: BoundKind) -> Result<Caps> {
    use vars::{Q, U, V, W, X2, Y1, Y2};
    let info = Info::new(aux.extended());
    match kind {
        BoundKind::Inner => {
            let iuy1 = info.cmi(&[U], &[Y1], &[Q])?;
            let iu_wx2 = info.cmi(&[U], &[W, X2], &[Q])?;
            let iu_vwx2 = info.cmi(&[U], &[V, W, X2], &[Q])?;
            let iv_y2 = info.cmi(&[V], &[Y2], &[W, X2, Q])?;
            let ivwx2_y2 = info.cmi(&[V, W, X2], &[Y2], &[Q])?;
            Ok(Caps {
                r1: (iuy1 - iu_wx2).min(iuy1 + iv_y2 - iu_vwx2),
                r2: ivwx2_y2,
                sum: iuy1 + ivwx2_y2 - iu_vwx2,
                e1: secrecy(iuy1 - info.cmi(&[U], &[Y2, V, W, X2], &[Q])?),
                e2: secrecy(iv_y2 - info.cmi(&[V], &[Y1, U], &[W, X2, Q])?),
            })
        }
        BoundKind::Outer | BoundKind::LessNoisy => {
            let iu_y1 = info.cmi(&[U], &[Y1], &[V, X2])?;
            let ivx2_y2 = info.mi(&[V, X2], &[Y2])?;
            let iuv_y1 = info.cmi(&[U, V], &[Y1], &[X2])?;
            let e1 = secrecy(iu_y1 - info.cmi(&[U], &[Y2], &[V, X2])?);
            let (r1, e2) = if kind == BoundKind::Outer {
                let iv_y2 = info.cmi(&[V], &[Y2], &[X2])?;
                let leak = info.cmi(&[V, X2], &[Y1], &[W])?;
                (
                    iuv_y1.min(iu_y1 + iv_y2),
                    secrecy(info.cmi(&[V, X2], &[Y2], &[W])? - leak),
                )
            } else {
                (iuv_y1, 0.0)
            };
            Ok(Caps {
                r1,
                r2: ivx2_y2,
                sum: iu_y1 + ivx2_y2,
                e1,
                e2,
            })
        }
        BoundKind::SemiDet | BoundKind::SemiDetNoRe2 => {
            require_semi_deterministic(ch)?;
            let h_y1_vx2 = info.cond_h(&[Y1], &[V, X2])?;
            let iv_y2 = info.cmi(&[V], &[Y2], &[X2])?;
            let ivx2_y2 = info.mi(&[V, X2], &[Y2])?;
            Ok(Caps {
                r1: info.cond_h(&[Y1], &[X2])?.min(h_y1_vx2 + iv_y2),
                r2: ivx2_y2,
                sum: h_y1_vx2 + ivx2_y2,
                e1: secrecy(info.cond_h(&[Y1], &[Y2, V, X2])?),
                e2: if kind == BoundKind::SemiDet {
                    secrecy(iv_y2 - info.cmi(&[V], &[Y1], &[X2])?)
                } else {
                    0.0
                },
            })
        }
    }
}

fn require_semi_deterministic(ch: &DiscreteCrc) -> Result<SemiDetTag> {
    ch.detect_semi_deterministic()
        .ok_or(Error::NotSemiDeterministic)
}

fn clamp_cap(x: f64) -> Option<f64> {
    if x >= 0.0 {
        Some(x)
    } else if x > -SECRECY_SNAP {
        Some(0.0)
    } else {
        None
    }
}

/// Vertices of `{0 <= R1 <= r1, 0 <= R2 <= r2, R1 + R2 <= sum}` with the
/// equivocation caps attached; empty when a rate cap is negative.
pub fn vertices(caps: &Caps, dims: Dims) -> Vec<RatePoint> {
    let (Some(ca), Some(cb), Some(s)) = (clamp_cap(caps.r1), clamp_cap(caps.r2), clamp_cap(caps.sum))
    else {
        return Vec::new();
    };
    let a = ca.min(s);
    let b = cb.min(s);
    let mut corners = vec![(0.0, 0.0), (a, 0.0), (0.0, b)];
    if a + b > s {
        corners.push((a, s - a));
        corners.push((s - b, b));
    } else {
        corners.push((a, b));
    }
    corners
        .into_iter()
        .map(|(r1, r2)| {
            let mut c = [r1, r2, r1.min(caps.e1), r2.min(caps.e2)];
            for (i, x) in c.iter_mut().enumerate() {
                if !dims.0[i] {
                    *x = 0.0;
                }
            }
            RatePoint::new(c[0], c[1], c[2], c[3])
        })
        .collect()
}

/// Polytope vertices of `spec` for one auxiliary distribution.
pub fn evaluate(ch: &DiscreteCrc, aux: &AuxAssignment, spec: BoundSpec) -> Result<Vec<RatePoint>> {
    Ok(vertices(&caps(ch, aux, spec.kind)?, spec.dims()))
}

pub fn inner_point(ch: &DiscreteCrc, aux: &AuxAssignment) -> Result<Vec<RatePoint>> {
    evaluate(ch, aux, BoundSpec::new(BoundKind::Inner))
}

pub fn outer_point(ch: &DiscreteCrc, aux: &AuxAssignment) -> Result<Vec<RatePoint>> {
    evaluate(ch, aux, BoundSpec::new(BoundKind::Outer))
}

pub fn lessnoisy_point(ch: &DiscreteCrc, aux: &AuxAssignment) -> Result<Vec<RatePoint>> {
    evaluate(ch, aux, BoundSpec::new(BoundKind::LessNoisy))
}

pub fn semidet_point(ch: &DiscreteCrc, aux: &AuxAssignment) -> Result<Vec<RatePoint>> {
    evaluate(ch, aux, BoundSpec::new(BoundKind::SemiDet))
}

pub fn thm6_point(ch: &DiscreteCrc, aux: &AuxAssignment) -> Result<Vec<RatePoint>> {
    evaluate(ch, aux, BoundSpec::new(BoundKind::SemiDetNoRe2))
}

/// Cardinalities of the auxiliary alphabets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxCards {
    pub q: usize,
    pub w: usize,
    pub v: usize,
    pub u: usize,
}

impl AuxCards {
    /// `|Q| = 1`, `|W| = 2`, `|V| = |U| = |X1||X2| + 1`.
    pub fn default_for(ch: &DiscreteCrc) -> Self {
        let (x1, x2, _, _) = ch.cards();
        AuxCards {
            q: 1,
            w: 2,
            v: x1 * x2 + 1,
            u: x1 * x2 + 1,
        }
    }

    pub fn get(&self, name: &str) -> usize {
        match name {
            vars::Q => self.q,
            vars::W => self.w,
            vars::V => self.v,
            vars::U => self.u,
            _ => 1,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, c) in [("Q", self.q), ("W", self.w), ("V", self.v), ("U", self.u)] {
            if c == 0 {
                return Err(Error::ZeroCardinality(name.into()));
            }
        }
        Ok(())
    }
}

/// Marginal `(1 - t) delta_s + t uniform` whose entropy is `frac * log2 k`.
fn skewed_marginal(k: usize, s: usize, frac: f64) -> Vec<f64> {
    let mix = |t: f64| -> Vec<f64> {
        (0..k)
            .map(|i| t / k as f64 + if i == s { 1.0 - t } else { 0.0 })
            .collect()
    };
    let entropy = |p: &[f64]| -> f64 {
        p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
    };
    let target = frac * (k as f64).log2();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if entropy(&mix(mid)) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mix(0.5 * (lo + hi))
}

fn point_mass(k: usize, s: usize) -> Vec<f64> {
    (0..k).map(|i| if i == s { 1.0 } else { 0.0 }).collect()
}

/// Input marginal pairs `(P_X1, P_X2, rich)`; rich pairs get every
/// combination of auxiliary maps.
fn input_grid(k1: usize, k2: usize) -> Vec<(Vec<f64>, Vec<f64>, bool)> {
    let uniform = |k: usize| vec![1.0 / k as f64; k];
    let mut out = vec![(uniform(k1), uniform(k2), true)];
    for s in 0..k1 {
        for t in 0..k2 {
            out.push((point_mass(k1, s), point_mass(k2, t), true));
        }
    }
    for s in 0..k1 {
        out.push((point_mass(k1, s), uniform(k2), true));
    }
    for t in 0..k2 {
        out.push((uniform(k1), point_mass(k2, t), true));
    }
    for level in 1..ENTROPY_LEVELS {
        let frac = level as f64 / ENTROPY_LEVELS as f64;
        if k1 > 1 {
            for s in 0..k1 {
                out.push((skewed_marginal(k1, s, frac), uniform(k2), false));
            }
        }
        if k2 > 1 {
            for t in 0..k2 {
                out.push((uniform(k1), skewed_marginal(k2, t, frac), false));
            }
        }
    }
    out
}

/// Deterministic auxiliary maps of `(x1, x2)`, as lookup tables reduced
/// modulo the auxiliary cardinality, deduplicated.
fn aux_maps(k1: usize, k2: usize, card: usize, semidet: Option<&SemiDetTag>) -> Vec<Vec<usize>> {
    let mut kinds: Vec<Box<dyn Fn(usize, usize) -> usize>> = vec![
        Box::new(|_, _| 0),
        Box::new(|a, _| a),
        Box::new(|_, b| b),
        Box::new(move |a, b| a * k2 + b),
        Box::new(|a, b| a + b),
    ];
    if let Some(tag) = semidet {
        let tag = tag.clone();
        kinds.push(Box::new(move |a, b| tag.output(a, b, k2)));
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for f in kinds {
        let table: Vec<usize> = (0..k1 * k2).map(|i| f(i / k2, i % k2) % card).collect();
        if seen.insert(table.clone()) {
            out.push(table);
        }
    }
    out
}

/// Structured distributions over `aux ++ (X1, X2)`: deterministic
/// auxiliaries over a grid of product inputs.
pub fn structured_candidates(
    ch: &DiscreteCrc,
    aux: &[(&str, usize)],
) -> Result<Vec<JointPmf>> {
    let (k1, k2, _, _) = ch.cards();
    let tag = ch.detect_semi_deterministic();
    let maps: Vec<Vec<Vec<usize>>> = aux
        .iter()
        .map(|&(name, card)| {
            if name == vars::Q {
                vec![vec![0; k1 * k2]]
            } else {
                aux_maps(k1, k2, card, tag.as_ref())
            }
        })
        .collect();
    let mut rich_combos: Vec<Vec<usize>> = vec![Vec::new()];
    for m in &maps {
        rich_combos = rich_combos
            .into_iter()
            .flat_map(|c| {
                (0..m.len()).map(move |j| {
                    let mut c = c.clone();
                    c.push(j);
                    c
                })
            })
            .collect();
    }
    // constant everywhere, or a single non-constant auxiliary
    let mut core_combos = vec![vec![0; maps.len()]];
    for (axis, m) in maps.iter().enumerate() {
        for j in 1..m.len() {
            let mut c = vec![0; maps.len()];
            c[axis] = j;
            core_combos.push(c);
        }
    }

    let mut axes: Vec<(String, usize)> = aux.iter().map(|&(n, c)| (n.to_string(), c)).collect();
    axes.push((vars::X1.into(), k1));
    axes.push((vars::X2.into(), k2));
    let mut out = Vec::new();
    for (p1, p2, rich) in input_grid(k1, k2) {
        let combos = if rich { &rich_combos } else { &core_combos };
        for combo in combos {
            let pmf = JointPmf::from_fn(axes.clone(), |idx| {
                let (a, b) = (idx[aux.len()], idx[aux.len() + 1]);
                let hit = combo
                    .iter()
                    .enumerate()
                    .all(|(axis, &j)| maps[axis][j][a * k2 + b] == idx[axis]);
                if hit {
                    p1[a] * p2[b]
                } else {
                    0.0
                }
            })?;
            out.push(pmf);
        }
    }
    Ok(out)
}

/// Candidate distributions of a search: structured ones first, then flat
/// Dirichlet draws with per-index seeds.
#[derive(Clone, Debug)]
pub struct CandidateSource {
    axes: Vec<(String, usize)>,
    structured: Vec<JointPmf>,
    seed: u64,
}

impl CandidateSource {
    pub fn new(ch: &DiscreteCrc, aux: &[(&str, usize)], seed: u64) -> Result<Self> {
        let (k1, k2, _, _) = ch.cards();
        let mut axes: Vec<(String, usize)> = aux.iter().map(|&(n, c)| (n.to_string(), c)).collect();
        axes.push((vars::X1.into(), k1));
        axes.push((vars::X2.into(), k2));
        Ok(CandidateSource {
            axes,
            structured: structured_candidates(ch, aux)?,
            seed,
        })
    }

    pub fn structured_len(&self) -> usize {
        self.structured.len()
    }

    /// Candidate `index`; indices past the structured set are random draws.
    pub fn get(&self, index: usize) -> Result<JointPmf> {
        match self.structured.get(index) {
            Some(p) => Ok(p.clone()),
            None => {
                let draw = (index - self.structured.len()) as u64;
                sample_joint(self.axes.clone(), derive_seed(self.seed, draw))
            }
        }
    }
}

/// Result of [`search_region`].
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub spec: BoundSpec,
    pub cards: AuxCards,
    pub region: Region,
    pub evaluated: usize,
    pub structured: usize,
    source: CandidateSource,
}

impl SearchOutcome {
    /// The achieving distribution of each frontier point, keyed by row.
    pub fn witnesses(&self) -> Result<Vec<(usize, u64, JointPmf)>> {
        self.region
            .frontier
            .iter()
            .enumerate()
            .filter_map(|(row, p)| match p.meta {
                Some(PointMeta::Candidate(i)) => Some((row, i)),
                _ => None,
            })
            .map(|(row, i)| Ok((row, i, self.source.get(i as usize)?)))
            .collect()
    }

    /// Sidecar document listing the witness of every frontier point.
    pub fn witness_json(&self) -> Result<serde_json::Value> {
        let points = self
            .witnesses()?
            .into_iter()
            .map(|(row, candidate, aux)| {
                serde_json::json!({ "row": row, "candidate": candidate, "aux": aux })
            })
            .collect::<Vec<_>>();
        Ok(serde_json::json!({
            "bound": self.spec.kind,
            "rates_only": self.spec.rates_only,
            "cards": self.cards,
            "structured": self.structured,
            "evaluated": self.evaluated,
            "points": points,
        }))
    }
}

/// Pareto frontier over the structured candidates plus `samples` random
/// auxiliary distributions.
pub fn search_region(
    ch: &DiscreteCrc,
    spec: BoundSpec,
    cards: AuxCards,
    samples: usize,
    seed: u64,
) -> Result<SearchOutcome> {
    cards.validate()?;
    if matches!(spec.kind, BoundKind::SemiDet | BoundKind::SemiDetNoRe2) {
        require_semi_deterministic(ch)?;
    }
    let aux: Vec<(&str, usize)> = spec
        .kind
        .aux_axes()
        .iter()
        .map(|&n| (n, cards.get(n)))
        .collect();
    let source = CandidateSource::new(ch, &aux, seed)?;
    let total = source.structured_len() + samples;
    let points = (0..total)
        .into_par_iter()
        .map(|i| {
            let joint = source.get(i)?;
            let assignment = AuxAssignment::new(ch, &joint)?;
            Ok(evaluate(ch, &assignment, spec)?
                .into_iter()
                .map(|p| p.with_meta(PointMeta::Candidate(i as u64)))
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SearchOutcome {
        spec,
        cards,
        region: pareto_filter(points.into_iter().flatten(), spec.dims()),
        evaluated: total,
        structured: source.structured_len(),
        source,
    })
}

/// Structural channel conditions checked by falsification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// `I(V,X2;Y2|W) <= I(V,X2;Y1|W)` for every `P_{W V X1 X2}`.
    LessNoisy,
    /// `H(Y2|W) - H(Y2|X2) <= H(Y1|W) - H(Y1|X2)` for every `P_{W X1 X2}`.
    SemiDet,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::LessNoisy => "less-noisy",
            Condition::SemiDet => "semi-det",
        }
    }

    pub fn parse(s: &str) -> Option<Condition> {
        [Condition::LessNoisy, Condition::SemiDet]
            .into_iter()
            .find(|c| c.name() == s)
    }
}

/// Outcome of a falsification search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    /// Largest `LHS - RHS` found; at most [`CONDITION_TOL`] means no violation.
    pub max_gap: f64,
    pub violated: bool,
    pub witness: Option<JointPmf>,
    pub witness_index: Option<u64>,
    pub samples: usize,
    pub structured: usize,
    pub tol: f64,
}

/// `LHS - RHS` of `cond` on a distribution over `(W, [V,] X1, X2)`.
pub fn condition_gap(ch: &DiscreteCrc, cond: Condition, joint: &JointPmf) -> Result<f64> {
    use vars::{V, W, X2, Y1, Y2};
    let ext = ch.induce_joint(joint)?;
    let info = Info::new(&ext);
    match cond {
        Condition::LessNoisy => {
            let lhs = info.h(&[Y2, W])? - info.h(&[W])? - info.h(&[Y2, V, X2, W])?
                + info.h(&[V, X2, W])?;
            let rhs = info.h(&[Y1, W])? - info.h(&[W])? - info.h(&[Y1, V, X2, W])?
                + info.h(&[V, X2, W])?;
            Ok(lhs - rhs)
        }
        Condition::SemiDet => {
            let lhs = (info.h(&[Y2, W])? - info.h(&[W])?) - (info.h(&[Y2, X2])? - info.h(&[X2])?);
            let rhs = (info.h(&[Y1, W])? - info.h(&[W])?) - (info.h(&[Y1, X2])? - info.h(&[X2])?);
            Ok(lhs - rhs)
        }
    }
}

/// Searches for a distribution violating `cond`. `w_card` and `v_card`
/// default to `|X1||X2|`.
pub fn check_condition(
    ch: &DiscreteCrc,
    cond: Condition,
    samples: usize,
    seed: u64,
    w_card: Option<usize>,
    v_card: Option<usize>,
) -> Result<ConditionReport> {
    let (k1, k2, _, _) = ch.cards();
    let w = w_card.unwrap_or(k1 * k2);
    let v = v_card.unwrap_or(k1 * k2);
    for (name, c) in [("W", w), ("V", v)] {
        if c == 0 {
            return Err(Error::ZeroCardinality(name.into()));
        }
    }
    let aux: Vec<(&str, usize)> = match cond {
        Condition::LessNoisy => vec![(vars::W, w), (vars::V, v)],
        Condition::SemiDet => vec![(vars::W, w)],
    };
    let source = CandidateSource::new(ch, &aux, seed)?;
    let total = source.structured_len() + samples;
    let gaps = (0..total)
        .into_par_iter()
        .map(|i| condition_gap(ch, cond, &source.get(i)?))
        .collect::<Result<Vec<f64>>>()?;
    let (best, max_gap) = gaps
        .iter()
        .copied()
        .enumerate()
        .fold((None, f64::NEG_INFINITY), |(bi, bg), (i, g)| {
            if g > bg {
                (Some(i), g)
            } else {
                (bi, bg)
            }
        });
    let witness = best.map(|i| source.get(i)).transpose()?;
    Ok(ConditionReport {
        condition: cond,
        max_gap,
        violated: max_gap > CONDITION_TOL,
        witness,
        witness_index: best.map(|i| i as u64),
        samples,
        structured: source.structured_len(),
        tol: CONDITION_TOL,
    })
}

/// `Y1 = X1 + X2` over `{0, 1, 2}`; `Y2` is `Y1` erased with probability
/// `erasure` (symbol 3).
pub fn erasure_example(erasure: f64) -> Result<DiscreteCrc> {
    DiscreteCrc::from_fn((2, 2, 3, 4), |a, b, c, d| {
        if c != a + b {
            0.0
        } else if d == c {
            1.0 - erasure
        } else if d == 3 {
            erasure
        } else {
            0.0
        }
    })
    .map(|ch| ch.named("sum-erasure"))
}

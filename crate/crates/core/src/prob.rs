//! Finite-alphabet probability tensors and information measures.
//!
//! A [`JointPmf`] is a dense row-major tensor over named axes (first axis
//! most significant). Every information quantity is computed in bits from
//! marginal entropies, with `0 log 0 = 0`.

use std::cell::RefCell;
use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Conventional variable names shared by every module.
pub mod vars {
    pub const Q: &str = "Q";
    pub const W: &str = "W";
    pub const V: &str = "V";
    pub const U: &str = "U";
    pub const X1: &str = "X1";
    pub const X2: &str = "X2";
    pub const Y1: &str = "Y1";
    pub const Y2: &str = "Y2";
}

/// Tolerance on the total mass of a [`JointPmf`].
pub const MASS_TOL: f64 = 1e-12;

/// Information values in `[-CLAMP_TOL, 0)` are rounding noise and read as 0.
pub const CLAMP_TOL: f64 = 1e-9;

/// A symbol sequence; every entry indexes into its variable's alphabet.
pub type Sequence = Vec<usize>;

/// `[x]+`.
pub fn positive_part(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// SplitMix64 mix of a master seed and a stream index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Axis {
    pub name: String,
    pub card: usize,
}

/// Joint probability mass function over named finite axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPmf", into = "RawPmf")]
pub struct JointPmf {
    axes: Vec<Axis>,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPmf {
    axes: Vec<(String, usize)>,
    probs: Vec<f64>,
}

impl TryFrom<RawPmf> for JointPmf {
    type Error = Error;

    fn try_from(raw: RawPmf) -> Result<Self> {
        JointPmf::new(raw.axes, raw.probs)
    }
}

impl From<JointPmf> for RawPmf {
    fn from(p: JointPmf) -> Self {
        RawPmf {
            axes: p.axes.into_iter().map(|a| (a.name, a.card)).collect(),
            probs: p.probs,
        }
    }
}

fn build_axes<S: Into<String>>(axes: impl IntoIterator<Item = (S, usize)>) -> Result<Vec<Axis>> {
    let mut out: Vec<Axis> = Vec::new();
    for (name, card) in axes {
        let name = name.into();
        if card == 0 {
            return Err(Error::ZeroCardinality(name));
        }
        if out.iter().any(|a| a.name == name) {
            return Err(Error::DuplicateAxis(name));
        }
        out.push(Axis { name, card });
    }
    Ok(out)
}

impl JointPmf {
    /// Validates and wraps a row-major tensor.
    pub fn new<S: Into<String>>(
        axes: impl IntoIterator<Item = (S, usize)>,
        probs: Vec<f64>,
    ) -> Result<Self> {
        let axes = build_axes(axes)?;
        let len: usize = axes.iter().map(|a| a.card).product();
        if probs.len() != len {
            return Err(Error::InvalidPmf(format!(
                "expected {len} entries, got {}",
                probs.len()
            )));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidPmf(format!("entry {i} is {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidPmf(format!("entries sum to {total}")));
        }
        Ok(JointPmf { axes, probs })
    }

    /// Normalizes nonnegative weights into a pmf.
    pub fn from_weights<S: Into<String>>(
        axes: impl IntoIterator<Item = (S, usize)>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if total.is_nan() || total <= 0.0 || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidPmf(
                "weights must be finite, nonnegative, with positive total".into(),
            ));
        }
        let probs = weights.into_iter().map(|w| w / total).collect();
        Self::new(axes, probs)
    }

    /// Builds a pmf from a weight function of the multi-index.
    pub fn from_fn<S: Into<String>>(
        axes: impl IntoIterator<Item = (S, usize)>,
        f: impl Fn(&[usize]) -> f64,
    ) -> Result<Self> {
        let axes = build_axes(axes)?;
        let cards: Vec<usize> = axes.iter().map(|a| a.card).collect();
        let mut weights = Vec::with_capacity(cards.iter().product());
        for_each_index(&cards, |idx| weights.push(f(idx)));
        Self::from_weights(axes.into_iter().map(|a| (a.name, a.card)), weights)
    }

    pub fn uniform<S: Into<String>>(axes: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        Self::from_fn(axes, |_| 1.0)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn cards(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.card).collect()
    }

    pub fn has_axis(&self, name: &str) -> bool {
        self.axes.iter().any(|a| a.name == name)
    }

    pub fn axis_index(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn card(&self, name: &str) -> Result<usize> {
        Ok(self.axes[self.axis_index(name)?].card)
    }

    /// Row-major flat offset of a multi-index given in axis order.
    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.axes.len());
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, a)| acc * a.card + i)
    }

    pub fn prob(&self, idx: &[usize]) -> f64 {
        self.probs[self.offset(idx)]
    }

    fn mask_of(&self, names: &[&str]) -> Result<u64> {
        names
            .iter()
            .try_fold(0u64, |m, n| Ok(m | (1u64 << self.axis_index(n)?)))
    }

    /// Marginal probabilities over the axes in `keep` (original order kept).
    fn marginal_by_mask(&self, mask: u64) -> Vec<f64> {
        let n = self.axes.len();
        let mut out_stride = vec![0usize; n];
        let mut size = 1usize;
        for a in (0..n).rev() {
            if mask & (1 << a) != 0 {
                out_stride[a] = size;
                size *= self.axes[a].card;
            }
        }
        let mut out = vec![0.0; size];
        if size == 1 {
            out[0] = self.probs.iter().sum();
            return out;
        }
        let mut idx = vec![0usize; n];
        let mut o = 0usize;
        for &p in &self.probs {
            out[o] += p;
            for a in (0..n).rev() {
                idx[a] += 1;
                o += out_stride[a];
                if idx[a] < self.axes[a].card {
                    break;
                }
                o -= out_stride[a] * self.axes[a].card;
                idx[a] = 0;
            }
        }
        out
    }

    /// Marginal over `keep`, with axes in the order given by `keep`.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        let positions: Vec<usize> = keep
            .iter()
            .map(|n| self.axis_index(n))
            .collect::<Result<_>>()?;
        let kept = build_axes(keep.iter().map(|n| (n.to_string(), self.card(n).unwrap_or(0))))?;
        let n = self.axes.len();
        let mut out_stride = vec![0usize; n];
        let mut size = 1usize;
        for &a in positions.iter().rev() {
            out_stride[a] = size;
            size *= self.axes[a].card;
        }
        let mut out = vec![0.0; size];
        let cards = self.cards();
        let mut flat = 0usize;
        for_each_index(&cards, |idx| {
            let o: usize = idx.iter().zip(&out_stride).map(|(i, s)| i * s).sum();
            out[o] += self.probs[flat];
            flat += 1;
        });
        Ok(JointPmf {
            axes: kept,
            probs: out,
        })
    }

    /// Reorders axes; `order` must be a permutation of the axis names.
    pub fn permute(&self, order: &[&str]) -> Result<JointPmf> {
        if order.len() != self.axes.len() {
            return Err(Error::InvalidPmf(format!(
                "permutation has {} names for {} axes",
                order.len(),
                self.axes.len()
            )));
        }
        self.marginalize(order)
    }

    /// Appends an independent factor with disjoint axes.
    pub fn product(&self, other: &JointPmf) -> Result<JointPmf> {
        let axes = build_axes(
            self.axes
                .iter()
                .chain(&other.axes)
                .map(|a| (a.name.clone(), a.card)),
        )?;
        let mut probs = Vec::with_capacity(self.len() * other.len());
        for &p in &self.probs {
            for &q in &other.probs {
                probs.push(p * q);
            }
        }
        Ok(JointPmf { axes, probs })
    }

    /// Merges two adjacent-or-not axes into one axis `name` with index `a * |b| + b`.
    pub fn merge_axes(&self, a: &str, b: &str, name: &str) -> Result<JointPmf> {
        let card_a = self.card(a)?;
        let card_b = self.card(b)?;
        let rest: Vec<&str> = self
            .axes
            .iter()
            .map(|x| x.name.as_str())
            .filter(|n| *n != a && *n != b)
            .collect();
        let mut order = rest.clone();
        order.push(a);
        order.push(b);
        let permuted = self.permute(&order)?;
        let mut axes: Vec<(String, usize)> = rest
            .iter()
            .map(|n| (n.to_string(), self.card(n).unwrap_or(1)))
            .collect();
        axes.push((name.to_string(), card_a * card_b));
        JointPmf::new(axes, permuted.probs)
    }

    /// Adds a cardinality-1 axis.
    pub fn with_degenerate_axis(&self, name: &str) -> Result<JointPmf> {
        let mut axes: Vec<(String, usize)> =
            self.axes.iter().map(|a| (a.name.clone(), a.card)).collect();
        axes.push((name.to_string(), 1));
        JointPmf::new(axes, self.probs.clone())
    }

    /// Entropy in bits of the listed variables.
    pub fn entropy(&self, vars: &[&str]) -> Result<f64> {
        if vars.is_empty() {
            return Err(Error::UnknownVariable("<empty set>".into()));
        }
        let mask = self.mask_of(vars)?;
        Ok(entropy_of(&self.marginal_by_mask(mask)))
    }

    /// `I(A; B | C)` in bits; `c` may be empty.
    pub fn conditional_mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        Info::new(self).cmi(a, b, c)
    }

    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        Info::new(self).cmi(a, b, &[])
    }
}

/// Visits every multi-index of a tensor with the given cardinalities in
/// row-major order.
pub fn for_each_index(cards: &[usize], mut f: impl FnMut(&[usize])) {
    if cards.contains(&0) {
        return;
    }
    let mut idx = vec![0usize; cards.len()];
    loop {
        f(&idx);
        let mut a = cards.len();
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < cards[a] {
                break;
            }
            idx[a] = 0;
        }
    }
}

fn entropy_of(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    positive_part(h)
}

/// Memoizing entropy evaluator over one joint pmf.
///
/// Each distinct variable subset is marginalized once; every mutual
/// information is assembled from the cached entropies.
pub struct Info<'a> {
    pmf: &'a JointPmf,
    cache: RefCell<HashMap<u64, f64>>,
}

impl<'a> Info<'a> {
    pub fn new(pmf: &'a JointPmf) -> Self {
        Info {
            pmf,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn pmf(&self) -> &JointPmf {
        self.pmf
    }

    fn h_mask(&self, mask: u64) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        if let Some(&h) = self.cache.borrow().get(&mask) {
            return h;
        }
        let h = entropy_of(&self.pmf.marginal_by_mask(mask));
        self.cache.borrow_mut().insert(mask, h);
        h
    }

    /// `H(A)`.
    pub fn h(&self, a: &[&str]) -> Result<f64> {
        Ok(self.h_mask(self.pmf.mask_of(a)?))
    }

    /// `H(A | C)`, clamped at 0.
    pub fn cond_h(&self, a: &[&str], c: &[&str]) -> Result<f64> {
        let ma = self.pmf.mask_of(a)?;
        let mc = self.pmf.mask_of(c)?;
        let v = self.h_mask(ma | mc) - self.h_mask(mc);
        clamp_info(v)
    }

    /// `I(A; B | C)`.
    pub fn cmi(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64> {
        let ma = self.pmf.mask_of(a)?;
        let mb = self.pmf.mask_of(b)?;
        let mc = self.pmf.mask_of(c)?;
        for (x, y) in [(ma, mb), (ma, mc), (mb, mc)] {
            let overlap = x & y;
            if overlap != 0 {
                let axis = overlap.trailing_zeros() as usize;
                return Err(Error::OverlappingVariables(
                    self.pmf.axes[axis].name.clone(),
                ));
            }
        }
        if ma == 0 || mb == 0 {
            return Ok(0.0);
        }
        let v = self.h_mask(ma | mc) + self.h_mask(mb | mc)
            - self.h_mask(ma | mb | mc)
            - self.h_mask(mc);
        clamp_info(v)
    }

    pub fn mi(&self, a: &[&str], b: &[&str]) -> Result<f64> {
        self.cmi(a, b, &[])
    }
}

fn clamp_info(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= -CLAMP_TOL {
        Ok(0.0)
    } else {
        Err(Error::NegativeInformation(v))
    }
}

/// Draws a pmf from the flat Dirichlet distribution over the tensor's cells.
pub fn sample_joint<S: Into<String>>(
    axes: impl IntoIterator<Item = (S, usize)>,
    seed: u64,
) -> Result<JointPmf> {
    let axes = build_axes(axes)?;
    let len: usize = axes.iter().map(|a| a.card).product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..len).map(|_| Exp1.sample(&mut rng)).collect();
    JointPmf::from_weights(axes.into_iter().map(|a| (a.name, a.card)), weights)
}

/// Strong typicality: every cell's empirical frequency is within `eps` of
/// its probability, and zero-probability cells never occur.
///
/// `seqs` must supply one sequence per axis of `p`; extra entries are ignored.
pub fn is_jointly_typical(seqs: &[(&str, &[usize])], p: &JointPmf, eps: f64) -> Result<bool> {
    let mut columns = Vec::with_capacity(p.axes.len());
    for axis in &p.axes {
        let (_, s) = seqs
            .iter()
            .find(|(name, _)| *name == axis.name)
            .ok_or_else(|| Error::UnknownVariable(axis.name.clone()))?;
        columns.push((axis, *s));
    }
    let n = columns.first().map(|(_, s)| s.len()).unwrap_or(0);
    if let Some((axis, s)) = columns.iter().find(|(_, s)| s.len() != n) {
        return Err(Error::LengthMismatch(format!(
            "`{}` has length {}, expected {n}",
            axis.name,
            s.len()
        )));
    }
    if n == 0 {
        return Err(Error::LengthMismatch("sequences are empty".into()));
    }
    let mut counts = vec![0usize; p.len()];
    for t in 0..n {
        let mut o = 0usize;
        for (axis, s) in &columns {
            let sym = s[t];
            if sym >= axis.card {
                return Err(Error::SymbolOutOfRange {
                    axis: axis.name.clone(),
                    symbol: sym,
                    card: axis.card,
                });
            }
            o = o * axis.card + sym;
        }
        counts[o] += 1;
    }
    let nf = n as f64;
    Ok(counts.iter().zip(&p.probs).all(|(&c, &q)| {
        if q == 0.0 {
            c == 0
        } else {
            (c as f64 / nf - q).abs() <= eps
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bsc_joint(flip: f64) -> JointPmf {
        JointPmf::from_fn([("X", 2), ("Y", 2)], |i| {
            0.5 * if i[0] == i[1] { 1.0 - flip } else { flip }
        })
        .unwrap()
    }

    #[test]
    fn entropy_examples() {
        let u = JointPmf::uniform([("X", 2)]).unwrap();
        assert_eq!(u.entropy(&["X"]).unwrap(), 1.0);
        let point = JointPmf::new([("X", 3)], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(point.entropy(&["X"]).unwrap(), 0.0);
        let bern = JointPmf::new([("X", 2)], vec![0.9, 0.1]).unwrap();
        // h2(0.1) at 30 digits: 0.468995593589281...
        assert!((bern.entropy(&["X"]).unwrap() - 0.468_995_593_589_281).abs() < 1e-12);
        assert!(matches!(
            bern.entropy(&["Z"]),
            Err(Error::UnknownVariable(_))
        ));
    }

    #[test]
    fn mutual_information_examples() {
        let indep = JointPmf::uniform([("X", 2), ("Y", 2)]).unwrap();
        assert_eq!(indep.mutual_information(&["X"], &["Y"]).unwrap(), 0.0);
        assert_eq!(bsc_joint(0.0).mutual_information(&["X"], &["Y"]).unwrap(), 1.0);
        let mi = bsc_joint(0.1).mutual_information(&["X"], &["Y"]).unwrap();
        assert!((mi - 0.531_004_406_410_718_8).abs() < 1e-12);
        assert!(matches!(
            indep.conditional_mutual_information(&["X"], &["Y"], &["X"]),
            Err(Error::OverlappingVariables(_))
        ));
    }

    #[test]
    fn marginalize_examples() {
        let u = JointPmf::uniform([("A", 2), ("B", 2)]).unwrap();
        assert_eq!(u.marginalize(&["A", "B"]).unwrap(), u);
        let fa = JointPmf::new([("A", 2)], vec![0.3, 0.7]).unwrap();
        let fb = JointPmf::new([("B", 3)], vec![0.2, 0.5, 0.3]).unwrap();
        let prod = fa.product(&fb).unwrap();
        let back = prod.marginalize(&["B"]).unwrap();
        for (x, y) in back.probs().iter().zip(fb.probs()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(prod.marginalize(&["C"]).is_err());
    }

    #[test]
    fn positive_part_examples() {
        assert_eq!(positive_part(0.3), 0.3);
        assert_eq!(positive_part(-0.3), 0.0);
        assert_eq!(positive_part(0.0), 0.0);
    }

    #[test]
    fn sample_joint_examples() {
        let p = sample_joint([("X", 2)], 7).unwrap();
        assert_eq!(p.len(), 2);
        assert!((p.probs().iter().sum::<f64>() - 1.0).abs() < MASS_TOL);
        assert_eq!(p, sample_joint([("X", 2)], 7).unwrap());
        assert!(matches!(
            sample_joint([("X", 0)], 1),
            Err(Error::ZeroCardinality(_))
        ));
        // Dirichlet(1,1) has mean 1/2 per coordinate.
        let mean = (0..10_000u64)
            .map(|s| sample_joint([("X", 2)], s).unwrap().probs()[0])
            .sum::<f64>()
            / 10_000.0;
        assert!((mean - 0.5).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn typicality_examples() {
        let p = JointPmf::uniform([("X", 2), ("Y", 2)]).unwrap();
        let x = [0, 0, 1, 1];
        let y = [0, 1, 0, 1];
        assert!(is_jointly_typical(&[("X", &x), ("Y", &y)], &p, 1e-9).unwrap());

        let diag = bsc_joint(0.0);
        let y_bad = [0, 0, 1, 0];
        assert!(!is_jointly_typical(&[("X", &x), ("Y", &y_bad)], &diag, 0.9).unwrap());

        let short = [0, 1];
        assert!(matches!(
            is_jointly_typical(&[("X", &x), ("Y", &short)], &p, 0.1),
            Err(Error::LengthMismatch(_))
        ));
    }

    /// Exact probability that n i.i.d. draws from a 4-cell uniform pmf have
    /// every cell count within n*(1/4 +- eps): sum of multinomial terms.
    fn exact_uniform4_acceptance(n: usize, eps: f64) -> f64 {
        let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        let ok = |c: usize| ((c as f64 / n as f64) - 0.25).abs() <= eps;
        let mut total = 0.0;
        for a in 0..=n {
            for b in 0..=n - a {
                for c in 0..=n - a - b {
                    let d = n - a - b - c;
                    if ok(a) && ok(b) && ok(c) && ok(d) {
                        total += fact(n) / (fact(a) * fact(b) * fact(c) * fact(d))
                            * 0.25f64.powi(n as i32);
                    }
                }
            }
        }
        total
    }

    #[test]
    fn typicality_acceptance_rate_matches_counting_oracle() {
        use rand::Rng;
        let exact = exact_uniform4_acceptance(8, 0.25);
        assert!(exact >= 0.5);
        let p = JointPmf::uniform([("X", 2), ("Y", 2)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 10_000;
        let mut hits = 0;
        for _ in 0..trials {
            let x: Vec<usize> = (0..8).map(|_| rng.random_range(0..2)).collect();
            let y: Vec<usize> = (0..8).map(|_| rng.random_range(0..2)).collect();
            if is_jointly_typical(&[("X", &x), ("Y", &y)], &p, 0.25).unwrap() {
                hits += 1;
            }
        }
        let rate = hits as f64 / trials as f64;
        assert!(rate >= 0.5);
        // 5 sigma of a Bernoulli mean over 10^4 draws
        assert!((rate - exact).abs() < 0.025, "rate {rate} exact {exact}");
    }

    /// Direct definition: sum p(a,b,c) log p(a,b,c) p(c) / (p(a,c) p(b,c)).
    fn cmi_direct(p: &JointPmf) -> f64 {
        let mut total = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let pabc = p.prob(&[a, b, c]);
                    if pabc == 0.0 {
                        continue;
                    }
                    let pc: f64 = (0..2)
                        .flat_map(|x| (0..2).map(move |y| (x, y)))
                        .map(|(x, y)| p.prob(&[x, y, c]))
                        .sum();
                    let pac: f64 = (0..2).map(|y| p.prob(&[a, y, c])).sum();
                    let pbc: f64 = (0..2).map(|x| p.prob(&[x, b, c])).sum();
                    total += pabc * (pabc * pc / (pac * pbc)).log2();
                }
            }
        }
        total
    }

    proptest! {
        #[test]
        fn chain_rule(seed in any::<u64>()) {
            let p = sample_joint([("A", 3), ("B", 2), ("C", 2)], seed).unwrap();
            let info = Info::new(&p);
            let lhs = info.h(&["A", "B"]).unwrap();
            let rhs = info.h(&["A"]).unwrap() + info.cond_h(&["B"], &["A"]).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn cmi_matches_direct_sum(seed in any::<u64>()) {
            let p = sample_joint([("A", 2), ("B", 2), ("C", 2)], seed).unwrap();
            let via_h = p.conditional_mutual_information(&["A"], &["B"], &["C"]).unwrap();
            prop_assert!((via_h - positive_part(cmi_direct(&p))).abs() < 1e-12);
        }

        #[test]
        fn mi_bounded_by_entropies(seed in any::<u64>()) {
            let p = sample_joint([("A", 3), ("B", 2)], seed).unwrap();
            let mi = p.mutual_information(&["A"], &["B"]).unwrap();
            prop_assert!(mi >= 0.0);
            prop_assert!(mi <= p.entropy(&["A"]).unwrap().min(p.entropy(&["B"]).unwrap()) + 1e-12);
        }

        #[test]
        fn marginals_keep_mass_and_compose(seed in any::<u64>()) {
            let p = sample_joint([("A", 2), ("B", 3), ("C", 2)], seed).unwrap();
            let ab = p.marginalize(&["A", "B"]).unwrap();
            prop_assert!((ab.probs().iter().sum::<f64>() - 1.0).abs() < MASS_TOL);
            let a_two_step = ab.marginalize(&["A"]).unwrap();
            let a_direct = p.marginalize(&["A"]).unwrap();
            for (x, y) in a_two_step.probs().iter().zip(a_direct.probs()) {
                prop_assert!((x - y).abs() < 1e-15);
            }
        }

        #[test]
        fn sampled_pmfs_are_valid(seed in any::<u64>(), c1 in 1usize..4, c2 in 1usize..4) {
            let p = sample_joint([("A", c1), ("B", c2)], seed).unwrap();
            prop_assert!(p.probs().iter().all(|&x| x >= 0.0));
            prop_assert!(JointPmf::new([("A", c1), ("B", c2)], p.probs().to_vec()).is_ok());
        }
    }
}

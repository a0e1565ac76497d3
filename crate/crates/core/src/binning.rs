//! Desk-scale simulator of the single-phase binning scheme.
//!
//! The primary message is split as `M2 = (M21, M22)`. `M22` picks an `X2`
//! codeword, `M21` a bin of `V` codewords superposed on it, and `M1` a bin
//! of `U` codewords. The cognitive encoder picks, uniformly at random, a
//! `(V, U)` pair from the two bins that is jointly typical with `X2`, and
//! transmits the `X1` codeword generated for that triple. Bin sizes are
//! chosen so that the same randomness serves covering and secrecy.
//!
//! `W` and `Q` are constant; an auxiliary `W` axis is folded into `X2`.

use std::path::{Path, PathBuf};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::channel::DiscreteCrc;
use crate::error::{Error, Result};
use crate::prob::{derive_seed, is_jointly_typical, positive_part, vars, Info, JointPmf, Sequence};

/// Slack granted to every rate constraint before it counts as violated.
pub const RATE_TOL: f64 = 1e-12;

/// Default limit on `|Y|^n` for exact equivocation.
pub const DEFAULT_EXACT_BUDGET: u64 = 1 << 16;

/// Default limit on stored codeword symbols.
pub const DEFAULT_SYMBOL_BUDGET: u64 = 1 << 26;

/// Information quantities of the scheme under one auxiliary distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeInfo {
    /// `I(U;Y1)`
    pub u_y1: f64,
    /// `I(U;X2)`
    pub u_x2: f64,
    /// `I(U;V,X2)`
    pub u_vx2: f64,
    /// `I(V;Y2|X2)`
    pub v_y2_x2: f64,
    /// `I(X2;Y2)`
    pub x2_y2: f64,
    /// `I(U;Y2,V,X2)`
    pub u_y2vx2: f64,
    /// `I(V;Y1,U|X2)`
    pub v_y1u_x2: f64,
}

/// Message rates, bin-rate parameters and typicality slack.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeRates {
    pub r1: f64,
    pub r21: f64,
    pub r22: f64,
    pub l1: f64,
    pub l1b: f64,
    pub l21: f64,
    pub l21b: f64,
    pub eps: f64,
}

impl SchemeRates {
    /// Bin rates from the information quantities, with slack `eps`.
    pub fn derive(info: &SchemeInfo, r1: f64, r21: f64, r22: f64, eps: f64) -> Self {
        SchemeRates {
            r1,
            r21,
            r22,
            l1: positive_part((info.u_y1 - info.u_y2vx2).min(r1)),
            l1b: positive_part(info.u_y2vx2 - eps),
            l21: positive_part((info.v_y2_x2 - info.v_y1u_x2).min(r21)),
            l21b: positive_part(info.v_y1u_x2 - eps),
            eps,
        }
    }

    pub fn r2(&self) -> f64 {
        self.r21 + self.r22
    }
}

/// The constraints a rate bundle must satisfy, in the order checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateConstraint {
    PrivateRate,
    SuperpositionRate,
    CloudRate,
    SumRate,
    CoverU,
    CoverUV,
    Wiretap,
}

impl RateConstraint {
    pub const ALL: [RateConstraint; 7] = [
        RateConstraint::PrivateRate,
        RateConstraint::SuperpositionRate,
        RateConstraint::CloudRate,
        RateConstraint::SumRate,
        RateConstraint::CoverU,
        RateConstraint::CoverUV,
        RateConstraint::Wiretap,
    ];

    pub fn formula(self) -> &'static str {
        match self {
            RateConstraint::PrivateRate => "R1 < I(U;Y1) - I(U;X2)",
            RateConstraint::SuperpositionRate => "R21 < I(V;Y2|X2)",
            RateConstraint::CloudRate => "R22 < I(X2;Y2)",
            RateConstraint::SumRate => "R1 + R21 < I(U;Y1) + I(V;Y2|X2) - I(U;V,X2)",
            RateConstraint::CoverU => "L1 + L1b - R1 > I(U;X2)",
            RateConstraint::CoverUV => "L1 + L1b - R1 + L21 + L21b - R21 > I(U;V,X2)",
            RateConstraint::Wiretap => "L21 + L21b - R21 <= I(V;Y1,U|X2)",
        }
    }

    /// Amount by which `rates` violate the constraint; `<= 0` when it holds.
    pub fn excess(self, info: &SchemeInfo, rates: &SchemeRates) -> f64 {
        let d1 = rates.l1 + rates.l1b - rates.r1;
        let d2 = rates.l21 + rates.l21b - rates.r21;
        match self {
            RateConstraint::PrivateRate => rates.r1 - (info.u_y1 - info.u_x2),
            RateConstraint::SuperpositionRate => rates.r21 - info.v_y2_x2,
            RateConstraint::CloudRate => rates.r22 - info.x2_y2,
            RateConstraint::SumRate => {
                rates.r1 + rates.r21 - (info.u_y1 + info.v_y2_x2 - info.u_vx2)
            }
            RateConstraint::CoverU => info.u_x2 - d1,
            RateConstraint::CoverUV => info.u_vx2 - (d1 + d2),
            RateConstraint::Wiretap => d2 - info.v_y1u_x2,
        }
    }
}

/// Checks every constraint; bin rates are taken as given.
pub fn validate_rates(info: &SchemeInfo, rates: &SchemeRates) -> Result<()> {
    let fields = [
        ("r1", rates.r1),
        ("r21", rates.r21),
        ("r22", rates.r22),
        ("l1", rates.l1),
        ("l1b", rates.l1b),
        ("l21", rates.l21),
        ("l21b", rates.l21b),
        ("eps", rates.eps),
    ];
    if let Some((name, v)) = fields.iter().find(|(_, v)| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidScheme(format!("{name} = {v} must be finite and nonnegative")));
    }
    for c in RateConstraint::ALL {
        let excess = c.excess(info, rates);
        if excess > RATE_TOL {
            return Err(Error::RateConstraint {
                constraint: c.formula().to_string(),
                excess,
            });
        }
    }
    Ok(())
}

/// Channel and auxiliary distribution over `(V, U, X1, X2)` prepared for
/// the scheme.
#[derive(Clone, Debug)]
pub struct Scheme {
    channel: DiscreteCrc,
    extended: JointPmf,
    info: SchemeInfo,
}

impl Scheme {
    /// Missing `V` or `U` axes are constant; a `W` axis is merged into `X2`
    /// as `w * |X2| + x2`.
    pub fn new(ch: &DiscreteCrc, aux: &JointPmf) -> Result<Self> {
        for a in aux.axes() {
            let known = [vars::W, vars::V, vars::U, vars::X1, vars::X2, vars::Q];
            if !known.contains(&a.name.as_str()) {
                return Err(Error::UnknownVariable(a.name.clone()));
            }
            if a.name == vars::Q && a.card > 1 {
                return Err(Error::InvalidScheme("time sharing is not simulated; Q must be constant".into()));
            }
        }
        let mut joint = aux.clone();
        if joint.has_axis(vars::Q) {
            joint = joint.marginalize(
                &joint
                    .axes()
                    .iter()
                    .map(|a| a.name.as_str())
                    .filter(|n| *n != vars::Q)
                    .collect::<Vec<_>>(),
            )?;
        }
        let mut channel = ch.clone();
        if joint.has_axis(vars::W) {
            let w = joint.card(vars::W)?;
            joint = joint.merge_axes(vars::W, vars::X2, vars::X2)?;
            channel = ch.with_merged_input(w)?;
        }
        for name in [vars::V, vars::U] {
            if !joint.has_axis(name) {
                joint = joint.with_degenerate_axis(name)?;
            }
        }
        let joint = joint.permute(&[vars::V, vars::U, vars::X1, vars::X2])?;
        let extended = channel.induce_joint(&joint)?;
        let info = {
            use vars::{U, V, X2, Y1, Y2};
            let i = Info::new(&extended);
            SchemeInfo {
                u_y1: i.mi(&[U], &[Y1])?,
                u_x2: i.mi(&[U], &[X2])?,
                u_vx2: i.mi(&[U], &[V, X2])?,
                v_y2_x2: i.cmi(&[V], &[Y2], &[X2])?,
                x2_y2: i.mi(&[X2], &[Y2])?,
                u_y2vx2: i.mi(&[U], &[Y2, V, X2])?,
                v_y1u_x2: i.cmi(&[V], &[Y1, U], &[X2])?,
            }
        };
        Ok(Scheme {
            channel,
            extended,
            info,
        })
    }

    pub fn info(&self) -> &SchemeInfo {
        &self.info
    }

    /// The channel after any `W` merge.
    pub fn channel(&self) -> &DiscreteCrc {
        &self.channel
    }

    /// Joint of `(V, U, X1, X2, Y1, Y2)`.
    pub fn extended(&self) -> &JointPmf {
        &self.extended
    }

    /// Derives the bin rates and validates the bundle.
    pub fn rates(&self, r1: f64, r21: f64, r22: f64, eps: f64) -> Result<SchemeRates> {
        let rates = SchemeRates::derive(&self.info, r1, r21, r22, eps);
        validate_rates(&self.info, &rates)?;
        Ok(rates)
    }
}

pub fn derive_scheme_rates(
    ch: &DiscreteCrc,
    aux: &JointPmf,
    r1: f64,
    r21: f64,
    r22: f64,
    eps: f64,
) -> Result<SchemeRates> {
    Scheme::new(ch, aux)?.rates(r1, r21, r22, eps)
}

/// Message and bin counts after rounding `2^(n rate)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodebookCounts {
    pub m1: usize,
    pub l1: usize,
    pub m21: usize,
    pub l21: usize,
    pub m22: usize,
}

fn count(n: usize, rate: f64, what: &'static str) -> Result<usize> {
    let exponent = n as f64 * rate;
    if exponent > 40.0 {
        return Err(Error::BudgetExceeded {
            what,
            needed: exponent.exp2().min(u128::MAX as f64) as u128,
            budget: 1 << 40,
        });
    }
    Ok((exponent.exp2().round() as usize).max(1))
}

impl CodebookCounts {
    pub fn new(n: usize, rates: &SchemeRates) -> Result<Self> {
        Ok(CodebookCounts {
            m1: count(n, rates.r1, "M1 messages")?,
            l1: count(n, rates.l1 + rates.l1b - rates.r1, "U bin")?,
            m21: count(n, rates.r21, "M21 messages")?,
            l21: count(n, rates.l21 + rates.l21b - rates.r21, "V bin")?,
            m22: count(n, rates.r22, "M22 messages")?,
        })
    }

    fn stored_symbols(&self, n: usize) -> u128 {
        let n = n as u128;
        let m22 = self.m22 as u128;
        n * (m22 + m22 * self.m21 as u128 * self.l21 as u128 + self.m1 as u128 * self.l1 as u128)
    }
}

/// Random nested codebook; `X1` codewords are regenerated on demand from a
/// per-tuple seed.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    n: usize,
    counts: CodebookCounts,
    x2_words: Vec<Sequence>,
    v_words: Vec<Sequence>,
    u_words: Vec<Sequence>,
    x1_seed: u64,
    x1_card: usize,
    /// `P(x1 | u, v, x2)` rows indexed by `(v * |U| + u) * |X2| + x2`.
    x1_rows: Vec<Vec<f64>>,
    cards: [usize; 4],
    p_x2vu: JointPmf,
    p_uy1: JointPmf,
    p_x2vy2: JointPmf,
}

fn draw(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    WeightedIndex::new(weights)
        .expect("conditional rows have positive mass")
        .sample(rng)
}

fn conditional_rows(joint: &JointPmf, child: &str, parents: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut order: Vec<&str> = parents.to_vec();
    order.push(child);
    let m = joint.marginalize(&order)?;
    let k = joint.card(child)?;
    Ok(m.probs().chunks(k).map(|c| c.to_vec()).collect())
}

pub fn build_codebook(scheme: &Scheme, rates: &SchemeRates, n: usize, seed: u64) -> Result<Codebook> {
    build_codebook_with_budget(scheme, rates, n, seed, DEFAULT_SYMBOL_BUDGET)
}

pub fn build_codebook_with_budget(
    scheme: &Scheme,
    rates: &SchemeRates,
    n: usize,
    seed: u64,
    symbol_budget: u64,
) -> Result<Codebook> {
    use vars::{U, V, X1, X2, Y1, Y2};
    if n == 0 {
        return Err(Error::InvalidScheme("block length must be positive".into()));
    }
    let counts = CodebookCounts::new(n, rates)?;
    let needed = counts.stored_symbols(n);
    if needed > symbol_budget as u128 {
        return Err(Error::BudgetExceeded {
            what: "codebook symbols",
            needed,
            budget: symbol_budget as u128,
        });
    }
    let ext = scheme.extended();
    let (vc, uc, x1c, x2c) = (ext.card(V)?, ext.card(U)?, ext.card(X1)?, ext.card(X2)?);

    let p_x2 = ext.marginalize(&[X2])?.probs().to_vec();
    let p_u = ext.marginalize(&[U])?.probs().to_vec();
    let v_given_x2 = conditional_rows(ext, V, &[X2])?;
    let x1_joint = conditional_rows(ext, X1, &[V, U, X2])?;
    let x1_given_x2 = conditional_rows(ext, X1, &[X2])?;
    let x1_marg = ext.marginalize(&[X1])?.probs().to_vec();
    let x1_rows = x1_joint
        .iter()
        .enumerate()
        .map(|(i, row)| {
            if row.iter().sum::<f64>() > 0.0 {
                row.clone()
            } else if x1_given_x2[i % x2c].iter().sum::<f64>() > 0.0 {
                x1_given_x2[i % x2c].clone()
            } else {
                x1_marg.clone()
            }
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x2_words: Vec<Sequence> = (0..counts.m22)
        .map(|_| (0..n).map(|_| draw(&mut rng, &p_x2)).collect())
        .collect();
    let mut v_words = Vec::with_capacity(counts.m22 * counts.m21 * counts.l21);
    for x2 in &x2_words {
        for _ in 0..counts.m21 * counts.l21 {
            v_words.push(x2.iter().map(|&s| draw(&mut rng, &v_given_x2[s])).collect());
        }
    }
    let u_words: Vec<Sequence> = (0..counts.m1 * counts.l1)
        .map(|_| (0..n).map(|_| draw(&mut rng, &p_u)).collect())
        .collect();
    Ok(Codebook {
        n,
        counts,
        x2_words,
        v_words,
        u_words,
        x1_seed: rng.random(),
        x1_card: x1c,
        x1_rows,
        cards: [vc, uc, x1c, x2c],
        p_x2vu: ext.marginalize(&[X2, V, U])?,
        p_uy1: ext.marginalize(&[U, Y1])?,
        p_x2vy2: ext.marginalize(&[X2, V, Y2])?,
    })
}

/// Messages `(m1, m21, m22)`.
pub type Messages = (usize, usize, usize);

/// Output of the cognitive encoder; `pair` is `None` on encoding failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Encoded {
    pub x1: Sequence,
    pub x2: Sequence,
    pub pair: Option<(usize, usize)>,
}

impl Encoded {
    pub fn failed(&self) -> bool {
        self.pair.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded<T> {
    Unique(T),
    NoCandidate,
    Ambiguous,
}

impl<T: PartialEq> Decoded<T> {
    pub fn is(&self, expected: &T) -> bool {
        matches!(self, Decoded::Unique(t) if t == expected)
    }
}

impl Codebook {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &CodebookCounts {
        &self.counts
    }

    pub fn x2_word(&self, m22: usize) -> &Sequence {
        &self.x2_words[m22]
    }

    pub fn v_word(&self, m22: usize, m21: usize, l21: usize) -> &Sequence {
        &self.v_words[(m22 * self.counts.m21 + m21) * self.counts.l21 + l21]
    }

    pub fn u_word(&self, m1: usize, l1: usize) -> &Sequence {
        &self.u_words[m1 * self.counts.l1 + l1]
    }

    /// The `X1` codeword of a full index tuple.
    pub fn x1_word(&self, (m1, m21, m22): Messages, (l21, l1): (usize, usize)) -> Sequence {
        let c = &self.counts;
        let tuple = (((m22 * c.m21 + m21) * c.l21 + l21) * c.m1 + m1) * c.l1 + l1;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.x1_seed, tuple as u64));
        let (u, v, x2) = (self.u_word(m1, l1), self.v_word(m22, m21, l21), self.x2_word(m22));
        let [_, uc, _, x2c] = self.cards;
        (0..self.n)
            .map(|t| {
                let row = &self.x1_rows[(v[t] * uc + u[t]) * x2c + x2[t]];
                if self.x1_card == 1 {
                    0
                } else {
                    draw(&mut rng, row)
                }
            })
            .collect()
    }

    fn check_messages(&self, (m1, m21, m22): Messages) -> Result<()> {
        let c = &self.counts;
        for (name, m, limit) in [("m1", m1, c.m1), ("m21", m21, c.m21), ("m22", m22, c.m22)] {
            if m >= limit {
                return Err(Error::MessageOutOfRange(format!("{name} = {m}, count is {limit}")));
            }
        }
        Ok(())
    }

    /// Bin pairs `(l21, l1)` whose codewords are jointly typical with `X2`.
    pub fn encoding_set(&self, msgs: Messages, eps: f64) -> Result<Vec<(usize, usize)>> {
        self.check_messages(msgs)?;
        let (m1, m21, m22) = msgs;
        let x2 = self.x2_word(m22);
        let mut out = Vec::new();
        for l21 in 0..self.counts.l21 {
            let v = self.v_word(m22, m21, l21);
            for l1 in 0..self.counts.l1 {
                let u = self.u_word(m1, l1);
                let seqs = [(vars::X2, &x2[..]), (vars::V, &v[..]), (vars::U, &u[..])];
                if is_jointly_typical(&seqs, &self.p_x2vu, eps)? {
                    out.push((l21, l1));
                }
            }
        }
        Ok(out)
    }

    /// Encodes with a uniform choice from the encoding set; on failure the
    /// codeword of bin pair `(0, 0)` is sent.
    pub fn encode(&self, msgs: Messages, eps: f64, rng: &mut impl Rng) -> Result<Encoded> {
        let set = self.encoding_set(msgs, eps)?;
        let pair = if set.is_empty() {
            None
        } else {
            Some(set[rng.random_range(0..set.len())])
        };
        Ok(Encoded {
            x1: self.x1_word(msgs, pair.unwrap_or((0, 0))),
            x2: self.x2_word(msgs.2).clone(),
            pair,
        })
    }

    /// Encoder output distribution: `(x1 word, probability)`.
    fn encoder_law(&self, msgs: Messages, eps: f64) -> Result<Vec<(Sequence, f64)>> {
        let set = self.encoding_set(msgs, eps)?;
        if set.is_empty() {
            return Ok(vec![(self.x1_word(msgs, (0, 0)), 1.0)]);
        }
        let w = 1.0 / set.len() as f64;
        Ok(set.into_iter().map(|pair| (self.x1_word(msgs, pair), w)).collect())
    }

    /// Finds the unique `(m1, l1)` whose `U` codeword is typical with `y1`.
    pub fn decode_cognitive(&self, y1: &[usize], eps: f64) -> Result<Decoded<usize>> {
        let mut found = None;
        for m1 in 0..self.counts.m1 {
            for l1 in 0..self.counts.l1 {
                let u = self.u_word(m1, l1);
                if is_jointly_typical(&[(vars::U, &u[..]), (vars::Y1, y1)], &self.p_uy1, eps)? {
                    if found.is_some() {
                        return Ok(Decoded::Ambiguous);
                    }
                    found = Some(m1);
                }
            }
        }
        Ok(found.map_or(Decoded::NoCandidate, Decoded::Unique))
    }

    /// Finds the unique `(m22, m21, l21)` typical with `y2`; returns `(m22, m21)`.
    pub fn decode_primary(&self, y2: &[usize], eps: f64) -> Result<Decoded<(usize, usize)>> {
        let mut found = None;
        for m22 in 0..self.counts.m22 {
            let x2 = self.x2_word(m22);
            for m21 in 0..self.counts.m21 {
                for l21 in 0..self.counts.l21 {
                    let v = self.v_word(m22, m21, l21);
                    let seqs = [(vars::X2, &x2[..]), (vars::V, &v[..]), (vars::Y2, y2)];
                    if is_jointly_typical(&seqs, &self.p_x2vy2, eps)? {
                        if found.is_some() {
                            return Ok(Decoded::Ambiguous);
                        }
                        found = Some((m22, m21));
                    }
                }
            }
        }
        Ok(found.map_or(Decoded::NoCandidate, Decoded::Unique))
    }
}

/// Which message is protected from which receiver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observer {
    /// `H(M1 | Y2^n)`
    M1AtY2,
    /// `H(M21, M22 | Y1^n)`
    M2AtY1,
}

fn posterior_entropy(likelihoods: &[f64]) -> f64 {
    let total: f64 = likelihoods.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    if likelihoods.iter().all(|&l| l == likelihoods[0]) {
        return (likelihoods.len() as f64).log2();
    }
    likelihoods
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| {
            let p = l / total;
            -p * p.log2()
        })
        .sum()
}

/// `H(M | Y^n)` in bits for a fixed codebook, enumerating every output
/// sequence and marginalizing the encoder's bin choice.
pub fn exact_equivocation(
    cb: &Codebook,
    ch: &DiscreteCrc,
    observer: Observer,
    eps: f64,
    budget: u64,
) -> Result<f64> {
    let (x1c, x2c, y1c, y2c) = ch.cards();
    let ycard = match observer {
        Observer::M1AtY2 => y2c,
        Observer::M2AtY1 => y1c,
    };
    let sequences = (ycard as f64).powi(cb.n as i32);
    if sequences > budget as f64 {
        return Err(Error::BudgetExceeded {
            what: "exact equivocation output sequences",
            needed: sequences.min(u128::MAX as f64) as u128,
            budget: budget as u128,
        });
    }
    let kernel: Vec<Vec<f64>> = (0..x1c * x2c)
        .map(|i| {
            (0..ycard)
                .map(|y| match observer {
                    Observer::M1AtY2 => ch.prob_y2(i / x2c, i % x2c, y),
                    Observer::M2AtY1 => ch.prob_y1(i / x2c, i % x2c, y),
                })
                .collect()
        })
        .collect();
    let c = cb.counts;
    let messages = match observer {
        Observer::M1AtY2 => c.m1,
        Observer::M2AtY1 => c.m21 * c.m22,
    };
    if messages <= 1 {
        return Ok(0.0);
    }
    if kernel.iter().all(|row| row == &kernel[0]) {
        return Ok((messages as f64).log2());
    }

    // per message: (x1 word, x2 word, weight) over the other messages and bin choices
    let mut laws: Vec<Vec<(Sequence, Sequence, f64)>> = vec![Vec::new(); messages];
    for m1 in 0..c.m1 {
        for m22 in 0..c.m22 {
            for m21 in 0..c.m21 {
                let (m, others) = match observer {
                    Observer::M1AtY2 => (m1, c.m21 * c.m22),
                    Observer::M2AtY1 => (m22 * c.m21 + m21, c.m1),
                };
                for (x1, w) in cb.encoder_law((m1, m21, m22), eps)? {
                    laws[m].push((x1, cb.x2_word(m22).clone(), w / others as f64));
                }
            }
        }
    }

    let n = cb.n;
    let mut y = vec![0usize; n];
    let mut entropies = Vec::new();
    let mut likelihoods = vec![0.0; messages];
    loop {
        for (m, law) in laws.iter().enumerate() {
            likelihoods[m] = law
                .iter()
                .map(|(x1, x2, w)| {
                    w * (0..n).map(|t| kernel[x1[t] * x2c + x2[t]][y[t]]).product::<f64>()
                })
                .sum();
        }
        let py: f64 = likelihoods.iter().sum::<f64>() / messages as f64;
        if py > 0.0 {
            entropies.push((py, posterior_entropy(&likelihoods)));
        }
        let mut t = n;
        loop {
            if t == 0 {
                let first = entropies[0].1;
                if entropies.iter().all(|&(_, h)| h == first) {
                    return Ok(first);
                }
                let total: f64 = entropies.iter().map(|&(p, _)| p).sum();
                let h = entropies.iter().map(|&(p, h)| p * h).sum::<f64>() / total;
                return Ok(h.clamp(0.0, (messages as f64).log2()));
            }
            t -= 1;
            y[t] += 1;
            if y[t] < ycard {
                break;
            }
            y[t] = 0;
        }
    }
}

/// Codebook schedule across trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    #[default]
    OneCodebook,
    PerTrial,
}

/// Empirical rate with an exact (Clopper-Pearson) 95% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub events: usize,
    pub trials: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Estimate {
    pub fn new(events: usize, trials: usize) -> Self {
        let (k, n) = (events as f64, trials as f64);
        let ci_low = if events == 0 {
            0.0
        } else {
            Beta::new(k, n - k + 1.0)
                .expect("positive shape")
                .inverse_cdf(0.025)
        };
        let ci_high = if events == trials {
            1.0
        } else {
            Beta::new(k + 1.0, n - k)
                .expect("positive shape")
                .inverse_cdf(0.975)
        };
        Estimate {
            events,
            trials,
            rate: if trials == 0 { 0.0 } else { k / n },
            ci_low,
            ci_high,
        }
    }
}

/// Simulation settings; also the on-disk config format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Channel JSON, relative to the config file's directory.
    pub channel: PathBuf,
    /// Distribution over `(V, U, X1, X2)`; optional `W` is merged into `X2`.
    pub aux: JointPmf,
    pub n: usize,
    pub r1: f64,
    pub r21: f64,
    pub r22: f64,
    pub eps: f64,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_exact_budget")]
    pub exact_budget: u64,
    #[serde(default = "default_symbol_budget")]
    pub symbol_budget: u64,
    #[serde(default)]
    pub schedule: Schedule,
}

fn default_exact_budget() -> u64 {
    DEFAULT_EXACT_BUDGET
}

fn default_symbol_budget() -> u64 {
    DEFAULT_SYMBOL_BUDGET
}

impl SimConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// Channel path resolved against `base`.
    pub fn channel_path(&self, base: impl AsRef<Path>) -> PathBuf {
        if self.channel.is_absolute() {
            self.channel.clone()
        } else {
            base.as_ref().join(&self.channel)
        }
    }
}

/// Outcome of [`run_trials`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub n: usize,
    pub rates: SchemeRates,
    pub info: SchemeInfo,
    /// Counts actually used after rounding `2^(n rate)`.
    pub counts: CodebookCounts,
    pub schedule: Schedule,
    pub seed: u64,
    pub encoding_failure_rate: Estimate,
    pub decode1_error_rate: Estimate,
    pub decode2_error_rate: Estimate,
    /// Bits; conditional on the first trial's codebook.
    pub exact_equivocation_m1_at_y2: Option<f64>,
    pub exact_equivocation_m2_at_y1: Option<f64>,
    pub equivocation_note: String,
}

impl SimReport {
    pub fn per_symbol(bits: Option<f64>, n: usize) -> Option<f64> {
        bits.map(|b| b / n as f64)
    }
}

fn sample_outputs(ch: &DiscreteCrc, x1: &[usize], x2: &[usize], rng: &mut ChaCha8Rng) -> (Sequence, Sequence) {
    let (_, _, _, y2c) = ch.cards();
    x1.iter()
        .zip(x2)
        .map(|(&a, &b)| {
            let start = (a * ch.cards().1 + b) * ch.cards().2 * y2c;
            let row = &ch.kernel()[start..start + ch.cards().2 * y2c];
            let k = draw(rng, row);
            (k / y2c, k % y2c)
        })
        .unzip()
}

const CODEBOOK_STREAM: u64 = u64::MAX;

/// Monte Carlo error rates plus exact equivocations (when within budget).
#[allow(clippy::too_many_arguments)]
pub fn run_trials(
    scheme: &Scheme,
    rates: &SchemeRates,
    n: usize,
    trials: usize,
    seed: u64,
    schedule: Schedule,
    exact_budget: u64,
    symbol_budget: u64,
) -> Result<SimReport> {
    if trials == 0 {
        return Err(Error::InvalidScheme("trials must be positive".into()));
    }
    let shared = build_codebook_with_budget(scheme, rates, n, derive_seed(seed, CODEBOOK_STREAM), symbol_budget)?;
    let ch = scheme.channel();
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<(bool, bool, bool)> {
            let own;
            let cb = match schedule {
                Schedule::OneCodebook => &shared,
                Schedule::PerTrial => {
                    let s = derive_seed(derive_seed(seed, CODEBOOK_STREAM), t as u64);
                    own = build_codebook_with_budget(scheme, rates, n, s, symbol_budget)?;
                    &own
                }
            };
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, t as u64));
            let c = cb.counts();
            let msgs = (
                rng.random_range(0..c.m1),
                rng.random_range(0..c.m21),
                rng.random_range(0..c.m22),
            );
            let enc = cb.encode(msgs, rates.eps, &mut rng)?;
            let (y1, y2) = sample_outputs(ch, &enc.x1, &enc.x2, &mut rng);
            let d1 = cb.decode_cognitive(&y1, rates.eps)?;
            let d2 = cb.decode_primary(&y2, rates.eps)?;
            Ok((enc.failed(), !d1.is(&msgs.0), !d2.is(&(msgs.2, msgs.1))))
        })
        .collect::<Result<Vec<_>>>()?;
    let tally = |f: fn(&(bool, bool, bool)) -> bool| outcomes.iter().filter(|o| f(o)).count();

    let exact = |obs| match exact_equivocation(&shared, ch, obs, rates.eps, exact_budget) {
        Ok(h) => Ok(Some(h)),
        Err(Error::BudgetExceeded { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    Ok(SimReport {
        n,
        rates: *rates,
        info: *scheme.info(),
        counts: shared.counts,
        schedule,
        seed,
        encoding_failure_rate: Estimate::new(tally(|o| o.0), trials),
        decode1_error_rate: Estimate::new(tally(|o| o.1), trials),
        decode2_error_rate: Estimate::new(tally(|o| o.2), trials),
        exact_equivocation_m1_at_y2: exact(Observer::M1AtY2)?,
        exact_equivocation_m2_at_y1: exact(Observer::M2AtY1)?,
        equivocation_note: "exact for one fixed codebook, not averaged over codebooks".into(),
    })
}

/// Runs a config whose channel path is resolved against `base`.
pub fn simulate(config: &SimConfig, base: impl AsRef<Path>) -> Result<SimReport> {
    let ch = crate::channel::load_channel(config.channel_path(base))?;
    simulate_with_channel(&ch, config)
}

pub fn simulate_with_channel(ch: &DiscreteCrc, config: &SimConfig) -> Result<SimReport> {
    let scheme = Scheme::new(ch, &config.aux)?;
    let rates = scheme.rates(config.r1, config.r21, config.r22, config.eps)?;
    run_trials(
        &scheme,
        &rates,
        config.n,
        config.trials,
        config.seed,
        config.schedule,
        config.exact_budget,
        config.symbol_budget,
    )
}

/// `U = X1` uniform, `V` constant, `X2` uniform and independent.
pub fn orthogonal_aux() -> JointPmf {
    JointPmf::from_fn([(vars::U, 2), (vars::X1, 2), (vars::X2, 2)], |i| {
        if i[0] == i[1] {
            1.0
        } else {
            0.0
        }
    })
    .expect("valid pmf")
}

/// `Y1 = X1`; `Y2` is a fair coin independent of both inputs.
pub fn pure_noise_eavesdropper() -> DiscreteCrc {
    DiscreteCrc::from_fn((2, 2, 2, 2), |a, _, c, _| if a == c { 0.5 } else { 0.0 })
        .expect("valid kernel")
        .named("pure-noise-eavesdropper")
}

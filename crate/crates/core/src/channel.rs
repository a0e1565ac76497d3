//! Discrete memoryless and Gaussian cognitive radio channels.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{vars, JointPmf};

/// Row-sum tolerance accepted when loading a kernel.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Rows off by more than this are rescaled to unit mass after loading.
const RENORMALIZE_TOL: f64 = 1e-14;

/// Discrete memoryless CRC with kernel `P(y1, y2 | x1, x2)` stored row-major
/// in index order `(x1, x2, y1, y2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteCrc {
    x1: usize,
    x2: usize,
    y1: usize,
    y2: usize,
    kernel: Vec<f64>,
    name: Option<String>,
}

/// On-disk channel format.
#[derive(Serialize, Deserialize)]
struct ChannelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    x1: usize,
    x2: usize,
    y1: usize,
    y2: usize,
    kernel: Vec<f64>,
}

/// `Y1 = f(X1, X2)`, indexed by `x1 * |X2| + x2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiDetTag {
    pub table: Vec<usize>,
}

impl SemiDetTag {
    pub fn output(&self, x1: usize, x2: usize, x2_card: usize) -> usize {
        self.table[x1 * x2_card + x2]
    }
}

impl DiscreteCrc {
    /// Validates the kernel; rows within [`ROW_SUM_TOL`] of 1 are rescaled.
    pub fn new(
        (x1, x2, y1, y2): (usize, usize, usize, usize),
        mut kernel: Vec<f64>,
    ) -> Result<Self> {
        for (axis, card) in [("x1", x1), ("x2", x2), ("y1", y1), ("y2", y2)] {
            if card == 0 {
                return Err(Error::ZeroCardinality(axis.into()));
            }
        }
        let expected = x1 * x2 * y1 * y2;
        if kernel.len() != expected {
            return Err(Error::ChannelFormat(format!(
                "kernel has {} entries, expected {expected}",
                kernel.len()
            )));
        }
        if let Some((index, &value)) = kernel
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::BadKernelEntry { index, value });
        }
        let row = y1 * y2;
        for (r, chunk) in kernel.chunks_mut(row).enumerate() {
            let sum: f64 = chunk.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::RowSum {
                    x1: r / x2,
                    x2: r % x2,
                    sum,
                });
            }
            if (sum - 1.0).abs() > RENORMALIZE_TOL {
                chunk.iter_mut().for_each(|v| *v /= sum);
            }
        }
        Ok(DiscreteCrc {
            x1,
            x2,
            y1,
            y2,
            kernel,
            name: None,
        })
    }

    /// Builds a kernel from `f(x1, x2, y1, y2)`.
    pub fn from_fn(
        cards: (usize, usize, usize, usize),
        f: impl Fn(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let (x1, x2, y1, y2) = cards;
        let mut kernel = Vec::with_capacity(x1 * x2 * y1 * y2);
        for a in 0..x1 {
            for b in 0..x2 {
                for c in 0..y1 {
                    for d in 0..y2 {
                        kernel.push(f(a, b, c, d));
                    }
                }
            }
        }
        Self::new(cards, kernel)
    }

    /// Channel with deterministic outputs `y1 = f1(x1, x2)`, `y2 = f2(x1, x2)`.
    pub fn deterministic(
        cards: (usize, usize, usize, usize),
        f1: impl Fn(usize, usize) -> usize,
        f2: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        Self::from_fn(cards, |a, b, c, d| {
            if f1(a, b) == c && f2(a, b) == d {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Binary `Y1 = X1`, `Y2 = X2`.
    pub fn orthogonal() -> Self {
        Self::deterministic((2, 2, 2, 2), |a, _| a, |_, b| b)
            .expect("valid kernel")
            .named("orthogonal")
    }

    /// Binary `Y1 = Y2 = X1 xor X2`.
    pub fn xor_identical() -> Self {
        Self::deterministic((2, 2, 2, 2), |a, b| a ^ b, |a, b| a ^ b)
            .expect("valid kernel")
            .named("xor-identical")
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// `(|X1|, |X2|, |Y1|, |Y2|)`.
    pub fn cards(&self) -> (usize, usize, usize, usize) {
        (self.x1, self.x2, self.y1, self.y2)
    }

    pub fn kernel(&self) -> &[f64] {
        &self.kernel
    }

    /// `P(y1, y2 | x1, x2)`.
    pub fn prob(&self, x1: usize, x2: usize, y1: usize, y2: usize) -> f64 {
        self.kernel[((x1 * self.x2 + x2) * self.y1 + y1) * self.y2 + y2]
    }

    /// `P(y1 | x1, x2)`.
    pub fn prob_y1(&self, x1: usize, x2: usize, y1: usize) -> f64 {
        (0..self.y2).map(|d| self.prob(x1, x2, y1, d)).sum()
    }

    /// `P(y2 | x1, x2)`.
    pub fn prob_y2(&self, x1: usize, x2: usize, y2: usize) -> f64 {
        (0..self.y1).map(|c| self.prob(x1, x2, c, y2)).sum()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ChannelFile = serde_json::from_str(text)?;
        let ch = Self::new((file.x1, file.x2, file.y1, file.y2), file.kernel)?;
        Ok(match file.name {
            Some(n) => ch.named(n),
            None => ch,
        })
    }

    pub fn to_json(&self) -> String {
        let file = ChannelFile {
            name: self.name.clone(),
            x1: self.x1,
            x2: self.x2,
            y1: self.y1,
            y2: self.y2,
            kernel: self.kernel.clone(),
        };
        serde_json::to_string_pretty(&file).expect("channel serializes")
    }

    /// Returns `Some` iff every `P(y1 | x1, x2)` is 0 or 1.
    pub fn detect_semi_deterministic(&self) -> Option<SemiDetTag> {
        let mut table = Vec::with_capacity(self.x1 * self.x2);
        for a in 0..self.x1 {
            for b in 0..self.x2 {
                let mut hit = None;
                for c in 0..self.y1 {
                    let p = self.prob_y1(a, b, c);
                    if p == 1.0 {
                        hit = Some(c);
                    } else if p != 0.0 {
                        return None;
                    }
                }
                table.push(hit?);
            }
        }
        Some(SemiDetTag { table })
    }

    /// Extends a pmf containing `X1`, `X2` with outputs `Y1`, `Y2` appended
    /// as the last two axes.
    pub fn induce_joint(&self, input: &JointPmf) -> Result<JointPmf> {
        let i1 = input.axis_index(vars::X1)?;
        let i2 = input.axis_index(vars::X2)?;
        for (axis, expected, found) in [
            (vars::X1, self.x1, input.axes()[i1].card),
            (vars::X2, self.x2, input.axes()[i2].card),
        ] {
            if expected != found {
                return Err(Error::CardinalityMismatch {
                    axis: axis.into(),
                    expected,
                    found,
                });
            }
        }
        let mut axes: Vec<(String, usize)> = input
            .axes()
            .iter()
            .map(|a| (a.name.clone(), a.card))
            .collect();
        axes.push((vars::Y1.into(), self.y1));
        axes.push((vars::Y2.into(), self.y2));
        let row = self.y1 * self.y2;
        let mut probs = Vec::with_capacity(input.len() * row);
        let cards = input.cards();
        let mut flat = 0usize;
        crate::prob::for_each_index(&cards, |idx| {
            let p = input.probs()[flat];
            flat += 1;
            let start = (idx[i1] * self.x2 + idx[i2]) * row;
            probs.extend(self.kernel[start..start + row].iter().map(|k| p * k));
        });
        JointPmf::new(axes, probs)
    }

    /// Channel whose second input is the pair `(w, x2)` encoded as
    /// `w * |X2| + x2`; the kernel ignores `w`.
    pub fn with_merged_input(&self, w_card: usize) -> Result<Self> {
        let ch = Self::from_fn(
            (self.x1, w_card * self.x2, self.y1, self.y2),
            |a, b, c, d| self.prob(a, b % self.x2, c, d),
        )?;
        Ok(match &self.name {
            Some(n) => ch.named(format!("{n}+W")),
            None => ch,
        })
    }
}

pub fn load_channel(path: impl AsRef<Path>) -> Result<DiscreteCrc> {
    let text = std::fs::read_to_string(path)?;
    DiscreteCrc::from_json(&text)
}

pub fn write_channel(ch: &DiscreteCrc, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, ch.to_json())?;
    Ok(())
}

/// Scalar Gaussian CRC: `Y1 = X1 + a X2 + Z1`, `Y2 = b X1 + X2 + Z2` with unit
/// noise variances and input powers `p1`, `p2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianCrc {
    pub a: f64,
    pub b: f64,
    pub p1: f64,
    pub p2: f64,
}

impl GaussianCrc {
    pub fn new(a: f64, b: f64, p1: f64, p2: f64) -> Result<Self> {
        GaussianCrc { a, b, p1, p2 }.validate()
    }

    pub fn validate(self) -> Result<Self> {
        if !self.a.is_finite() || !self.b.is_finite() {
            return Err(Error::InvalidGaussian(format!(
                "gains must be finite (a={}, b={})",
                self.a, self.b
            )));
        }
        if !(self.p1 > 0.0 && self.p1.is_finite()) || !(self.p2 > 0.0 && self.p2.is_finite()) {
            return Err(Error::InvalidGaussian(format!(
                "powers must be positive and finite (P1={}, P2={})",
                self.p1, self.p2
            )));
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{sample_joint, Info};
    use proptest::prelude::*;

    const ORTHOGONAL_JSON: &str = r#"{
        "name": "orthogonal",
        "x1": 2, "x2": 2, "y1": 2, "y2": 2,
        "kernel": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,1]
    }"#;

    #[test]
    fn load_orthogonal_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("orth.json");
        std::fs::write(&path, ORTHOGONAL_JSON).unwrap();
        let ch = load_channel(&path).unwrap();
        assert_eq!(ch.cards(), (2, 2, 2, 2));
        for row in ch.kernel().chunks(4) {
            assert_eq!(row.iter().sum::<f64>(), 1.0);
        }
        assert_eq!(ch.kernel(), DiscreteCrc::orthogonal().kernel());
    }

    #[test]
    fn row_sum_error_names_row() {
        let text = r#"{"x1":1,"x2":2,"y1":2,"y2":1,"kernel":[0.5,0.5,0.4,0.5]}"#;
        match DiscreteCrc::from_json(text) {
            Err(Error::RowSum { x1, x2, sum }) => {
                assert_eq!((x1, x2), (0, 1));
                assert!((sum - 0.9).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        let negative = r#"{"x1":1,"x2":1,"y1":2,"y2":1,"kernel":[1.5,-0.5]}"#;
        assert!(matches!(
            DiscreteCrc::from_json(negative),
            Err(Error::BadKernelEntry { index: 1, .. })
        ));
        assert!(matches!(
            DiscreteCrc::from_json("{not json"),
            Err(Error::Json(_))
        ));
    }

    #[test]
    fn xor_file_is_semi_deterministic() {
        let text = DiscreteCrc::xor_identical().to_json();
        let ch = DiscreteCrc::from_json(&text).unwrap();
        let tag = ch.detect_semi_deterministic().unwrap();
        assert_eq!(tag.table, vec![0, 1, 1, 0]);
    }

    #[test]
    fn semi_deterministic_detection() {
        let bsc = DiscreteCrc::from_fn((2, 2, 2, 2), |a, b, c, d| {
            let p1 = if a == c { 0.9 } else { 0.1 };
            let p2 = if b == d { 1.0 } else { 0.0 };
            p1 * p2
        })
        .unwrap();
        assert!(bsc.detect_semi_deterministic().is_none());

        let noisy_y2 = DiscreteCrc::from_fn((2, 2, 2, 2), |a, b, c, d| {
            let p1 = if (a ^ b) == c { 1.0 } else { 0.0 };
            let p2 = if b == d { 0.8 } else { 0.2 };
            p1 * p2
        })
        .unwrap();
        let tag = noisy_y2.detect_semi_deterministic().unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let from_table = if tag.output(a, b, 2) == c { 1.0 } else { 0.0 };
                    assert_eq!(from_table, noisy_y2.prob_y1(a, b, c));
                }
            }
        }
    }

    #[test]
    fn induced_joint_orthogonal() {
        let ch = DiscreteCrc::orthogonal();
        let input = JointPmf::uniform([(vars::X1, 2), (vars::X2, 2)]).unwrap();
        let joint = ch.induce_joint(&input).unwrap();
        let info = Info::new(&joint);
        assert_eq!(info.mi(&[vars::X1], &[vars::Y1]).unwrap(), 1.0);
        assert_eq!(info.mi(&[vars::X1], &[vars::Y2]).unwrap(), 0.0);
        let x1 = joint.marginalize(&[vars::X1]).unwrap();
        assert_eq!(x1.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn induced_joint_point_mass_and_xor() {
        let ch = DiscreteCrc::xor_identical();
        let point = JointPmf::new([(vars::X1, 2), (vars::X2, 2)], vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let joint = ch.induce_joint(&point).unwrap();
        let nonzero: Vec<usize> = joint
            .probs()
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, _)| i)
            .collect();
        // x1=0, x2=1 -> y1=y2=1
        assert_eq!(nonzero, vec![joint.offset(&[0, 1, 1, 1])]);

        let uniform = JointPmf::uniform([(vars::X1, 2), (vars::X2, 2)]).unwrap();
        let joint = ch.induce_joint(&uniform).unwrap();
        assert_eq!(joint.mutual_information(&[vars::X2], &[vars::Y2]).unwrap(), 0.0);
    }

    #[test]
    fn induce_joint_rejects_mismatch() {
        let ch = DiscreteCrc::orthogonal();
        let bad = JointPmf::uniform([(vars::X1, 3), (vars::X2, 2)]).unwrap();
        assert!(matches!(
            ch.induce_joint(&bad),
            Err(Error::CardinalityMismatch { .. })
        ));
        let missing = JointPmf::uniform([(vars::X1, 2)]).unwrap();
        assert!(ch.induce_joint(&missing).is_err());
    }

    #[test]
    fn gaussian_validation() {
        assert!(GaussianCrc::new(1.0, 0.5, 20.0, 20.0).is_ok());
        assert!(GaussianCrc::new(1.0, 0.5, 0.0, 20.0).is_err());
        assert!(GaussianCrc::new(1.0, f64::INFINITY, 20.0, 20.0).is_err());
    }

    #[test]
    fn hand_authored_rows_are_renormalized() {
        let text = r#"{"x1":1,"x2":1,"y1":3,"y2":1,"kernel":[0.3333333333,0.3333333333,0.3333333333]}"#;
        let ch = DiscreteCrc::from_json(text).unwrap();
        let sum: f64 = ch.kernel().iter().sum();
        assert!((sum - 1.0).abs() <= RENORMALIZE_TOL);
        let again = DiscreteCrc::from_json(&ch.to_json()).unwrap();
        assert_eq!(again.kernel(), ch.kernel());
    }

    proptest! {
        #[test]
        fn channel_file_round_trip(seed in any::<u64>()) {
            let weights = sample_joint([("k", 2 * 3 * 2 * 2)], seed).unwrap();
            let rows: Vec<f64> = weights.probs().chunks(4)
                .flat_map(|r| { let s: f64 = r.iter().sum(); r.iter().map(move |v| v / s) })
                .collect();
            let ch = DiscreteCrc::new((2, 3, 2, 2), rows).unwrap();
            let back = DiscreteCrc::from_json(&ch.to_json()).unwrap();
            prop_assert_eq!(back.kernel(), ch.kernel());
        }

        #[test]
        fn induced_joint_marginalizes_back(seed in any::<u64>()) {
            let ch = DiscreteCrc::from_fn((2, 2, 2, 3), |a, b, c, d| {
                let w = (1 + a + 2 * b + c * d) as f64;
                let total: f64 = (0..2).flat_map(|cc| (0..3).map(move |dd| (1 + a + 2 * b + cc * dd) as f64)).sum();
                w / total
            }).unwrap();
            let input = sample_joint([("V", 2), (vars::X1, 2), (vars::X2, 2)], seed).unwrap();
            let joint = ch.induce_joint(&input).unwrap();
            let back = joint.marginalize(&["V", vars::X1, vars::X2]).unwrap();
            for (x, y) in back.probs().iter().zip(input.probs()) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }
}

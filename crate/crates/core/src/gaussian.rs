//! Closed-form Gaussian capacity-equivocation regions.
//!
//! All rates are in bits. The power-split parameter `alpha` is the share of
//! the cognitive transmitter's power spent on its own message; the remaining
//! `1 - alpha` coherently relays the primary message.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::GaussianCrc;
use crate::error::{Error, Result};
use crate::prob::positive_part;
use crate::region::{pareto_filter, Dims, PointMeta, RatePoint, Region};

/// Absolute slack on the `ab = 1` and `|b| <= 1` hypotheses.
pub const HYPOTHESIS_TOL: f64 = 1e-9;

/// Default number of grid intervals in [`figure2_dataset`].
pub const FIGURE2_STEPS: usize = 400;

/// Cross-gain values of the reference figure.
pub const FIGURE2_B: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

/// Per-`alpha` corner of a Gaussian region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussPoint {
    pub alpha: f64,
    pub r1_max: f64,
    pub r2_max: f64,
    pub re1_max: f64,
    pub re2_max: f64,
}

impl GaussPoint {
    pub fn to_rate_point(&self) -> RatePoint {
        RatePoint::new(self.r1_max, self.r2_max, self.re1_max, self.re2_max)
            .with_meta(PointMeta::Alpha(self.alpha))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cor2Class {
    /// `|b| >= 1`: the primary receiver hears everything the cognitive one does.
    NoSecrecyForM1,
    /// `ab = 1`, `|b| <= 1 < |a|`: the cognitive receiver is less noisy.
    LessNoisyNoSecrecyForM2,
    Unclassified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Thm3,
    Thm7,
    Cor3,
}

impl SweepMode {
    pub fn dims(self) -> Dims {
        match self {
            SweepMode::Thm3 => Dims::ALL,
            SweepMode::Thm7 => Dims::NO_RE2,
            SweepMode::Cor3 => Dims::RATES,
        }
    }
}

/// `0.5 * log2(1 + x)`.
pub fn psi(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::NegativePsiArgument(x));
    }
    Ok(0.5 * x.ln_1p() / std::f64::consts::LN_2)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

/// `(psi(alpha P1), primary rate, psi(alpha P1) - psi(alpha b^2 P1))`.
fn corner(g: &GaussianCrc, alpha: f64) -> Result<(f64, f64, f64)> {
    check_alpha(alpha)?;
    let b2 = g.b * g.b;
    let own = psi(alpha * g.p1)?;
    let leak = psi(alpha * b2 * g.p1)?;
    let relay = 1.0 - alpha;
    let signal = relay * b2 * g.p1 + g.p2 + 2.0 * g.b.abs() * (relay * g.p1 * g.p2).sqrt();
    let r2 = psi(signal / (alpha * b2 * g.p1 + 1.0))?;
    Ok((own, r2, own - leak))
}

/// Corner of the region for a primary receiver that sees a weaker copy of
/// the cognitive signal (`|b| <= 1`).
pub fn thm7_point(g: &GaussianCrc, alpha: f64) -> Result<GaussPoint> {
    if g.b.abs() > 1.0 + HYPOTHESIS_TOL {
        return Err(Error::Hypothesis {
            result: "thm7",
            hypothesis: "|b| <= 1",
            detail: format!("b = {}", g.b),
        });
    }
    let (r1, r2, re1) = corner(g, alpha)?;
    Ok(GaussPoint {
        alpha,
        r1_max: r1,
        r2_max: r2,
        re1_max: positive_part(re1),
        re2_max: 0.0,
    })
}

/// Corner of the full four-rate region under `ab = 1`, `|b| <= 1 < |a|`.
pub fn thm3_point(g: &GaussianCrc, alpha: f64) -> Result<GaussPoint> {
    if (g.a * g.b - 1.0).abs() > HYPOTHESIS_TOL
        || g.b.abs() > 1.0 + HYPOTHESIS_TOL
        || g.a.abs() <= 1.0
    {
        return Err(Error::Hypothesis {
            result: "thm3",
            hypothesis: "ab = 1 and |b| <= 1 < |a|",
            detail: format!("a = {}, b = {}", g.a, g.b),
        });
    }
    thm7_point(g, alpha)
}

pub fn cor2_classify(g: &GaussianCrc) -> Cor2Class {
    if g.b.abs() >= 1.0 {
        Cor2Class::NoSecrecyForM1
    } else if (g.a * g.b - 1.0).abs() <= HYPOTHESIS_TOL && g.a.abs() > 1.0 {
        Cor2Class::LessNoisyNoSecrecyForM2
    } else {
        Cor2Class::Unclassified
    }
}

/// Perfect-secrecy corner `(R1, R2)` for any cross gain.
pub fn cor3_point(g: &GaussianCrc, alpha: f64) -> Result<(f64, f64)> {
    let (_, r2, re1) = corner(g, alpha)?;
    Ok((positive_part(re1), r2))
}

fn mode_point(g: &GaussianCrc, mode: SweepMode, alpha: f64) -> Result<RatePoint> {
    Ok(match mode {
        SweepMode::Thm3 => thm3_point(g, alpha)?.to_rate_point(),
        SweepMode::Thm7 => thm7_point(g, alpha)?.to_rate_point(),
        SweepMode::Cor3 => {
            let (r1, r2) = cor3_point(g, alpha)?;
            RatePoint::new(r1, r2, 0.0, 0.0).with_meta(PointMeta::Alpha(alpha))
        }
    })
}

/// Pareto frontier of the union over the grid `{0, 1/steps, ..., 1}`.
pub fn sweep_region(g: &GaussianCrc, mode: SweepMode, steps: usize) -> Result<Region> {
    if steps == 0 {
        return Err(Error::InvalidGaussian("steps must be positive".into()));
    }
    let points = (0..=steps)
        .into_par_iter()
        .map(|i| mode_point(g, mode, i as f64 / steps as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(pareto_filter(points, mode.dims()))
}

/// Weak-cross-link sweeps at `a = 1`, `P1 = P2 = 20` for each `b` in [`FIGURE2_B`].
pub fn figure2_dataset() -> Vec<(f64, Region)> {
    figure2_with_steps(FIGURE2_STEPS).expect("figure parameters satisfy the hypothesis")
}

pub fn figure2_with_steps(steps: usize) -> Result<Vec<(f64, Region)>> {
    FIGURE2_B
        .iter()
        .map(|&b| {
            let g = GaussianCrc::new(1.0, b, 20.0, 20.0)?;
            Ok((b, sweep_region(&g, SweepMode::Thm7, steps)?))
        })
        .collect()
}

fn alpha_of(p: &RatePoint) -> f64 {
    match p.meta {
        Some(PointMeta::Alpha(a)) => a,
        _ => f64::NAN,
    }
}

/// `alpha,R1,R2,Re1` rows ordered by increasing `alpha`.
pub fn alpha_csv(region: &Region) -> String {
    let mut rows: Vec<&RatePoint> = region.frontier.iter().collect();
    rows.sort_by(|a, b| alpha_of(a).total_cmp(&alpha_of(b)));
    let mut out = String::from("alpha,R1,R2,Re1\n");
    for p in rows {
        let _ = writeln!(
            out,
            "{:.9},{:.9},{:.9},{:.9}",
            alpha_of(p),
            p.r1,
            p.r2,
            p.re1
        );
    }
    out
}

pub fn figure2_file_name(b: f64) -> String {
    format!("fig2_b{b:?}.csv")
}

/// Writes one CSV per `b` into `dir`, returning the paths written.
pub fn write_figure2(dataset: &[(f64, Region)], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    dataset
        .iter()
        .map(|(b, region)| {
            let path = dir.join(figure2_file_name(*b));
            std::fs::write(&path, alpha_csv(region))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PSI_20: f64 = 2.196_158_711_389_38;

    fn gauss(a: f64, b: f64) -> GaussianCrc {
        GaussianCrc::new(a, b, 20.0, 20.0).unwrap()
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi(0.0).unwrap(), 0.0);
        assert!((psi(3.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((psi(20.0).unwrap() - PSI_20).abs() < 1e-12);
        assert!(matches!(psi(-0.1), Err(Error::NegativePsiArgument(_))));
    }

    #[test]
    fn psi_increasing_and_concave_on_grid() {
        let grid: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.05).collect();
        let vals: Vec<f64> = grid.iter().map(|&x| psi(x).unwrap()).collect();
        for w in vals.windows(3) {
            assert!(w[1] > w[0]);
            assert!(w[2] - w[1] <= w[1] - w[0] + 1e-15);
        }
    }

    #[test]
    fn thm7_reference_point() {
        let p = thm7_point(&gauss(1.0, 0.5), 1.0).unwrap();
        assert!((p.r1_max - PSI_20).abs() < 1e-9);
        assert!((p.re1_max - 0.903_677_461_028_802).abs() < 1e-9);
        assert!((p.r2_max - 1.057_738_608_709_97).abs() < 1e-9);
        assert_eq!(p.re2_max, 0.0);
    }

    #[test]
    fn thm7_unit_cross_gain_has_no_secrecy() {
        let g = gauss(1.0, 1.0);
        for i in 0..=50 {
            assert_eq!(thm7_point(&g, i as f64 / 50.0).unwrap().re1_max, 0.0);
        }
    }

    #[test]
    fn thm7_zero_alpha_and_errors() {
        let p = thm7_point(&gauss(1.0, 0.5), 0.0).unwrap();
        assert_eq!((p.r1_max, p.re1_max), (0.0, 0.0));
        assert!(matches!(
            thm7_point(&gauss(1.0, 1.5), 0.5),
            Err(Error::Hypothesis { .. })
        ));
        assert!(matches!(
            thm7_point(&gauss(1.0, 0.5), 1.5),
            Err(Error::AlphaOutOfRange(_))
        ));
    }

    #[test]
    fn thm3_reference_point() {
        let g = gauss(2.0, 0.5);
        let p = thm3_point(&g, 0.5).unwrap();
        assert!((p.r1_max - 1.729_715_809_318_65).abs() < 1e-9);
        assert!((p.re1_max - 0.826_038_348_289_847).abs() < 1e-9);
        assert!((p.r2_max - 1.759_845_272_590_33).abs() < 1e-9);
        assert_eq!(thm3_point(&g, 0.0).unwrap().r1_max, 0.0);
        assert!(thm3_point(&gauss(1.0, 0.5), 0.5).is_err());
        assert!(thm3_point(&gauss(0.5, 2.0), 0.5).is_err());
    }

    #[test]
    fn thm3_agrees_with_thm7() {
        let g = gauss(2.0, 0.5);
        for i in 0..=100 {
            let alpha = i as f64 / 100.0;
            let a = thm3_point(&g, alpha).unwrap();
            let b = thm7_point(&g, alpha).unwrap();
            assert!((a.r1_max - b.r1_max).abs() <= 1e-12);
            assert!((a.r2_max - b.r2_max).abs() <= 1e-12);
            assert!((a.re1_max - b.re1_max).abs() <= 1e-12);
        }
    }

    #[test]
    fn classification() {
        assert_eq!(cor2_classify(&gauss(1.0, 2.0)), Cor2Class::NoSecrecyForM1);
        assert_eq!(
            cor2_classify(&gauss(2.0, 0.5)),
            Cor2Class::LessNoisyNoSecrecyForM2
        );
        assert_eq!(cor2_classify(&gauss(1.0, 0.5)), Cor2Class::Unclassified);
        assert_eq!(cor2_classify(&gauss(1.0, 1.0)), Cor2Class::NoSecrecyForM1);
    }

    #[test]
    fn cor3_reference_points() {
        let (r1, r2) = cor3_point(&gauss(1.0, 2.0), 0.0).unwrap();
        assert_eq!(r1, 0.0);
        assert!((r2 - 3.749_922_943_541_60).abs() < 1e-9);
        for i in 1..=20 {
            assert_eq!(cor3_point(&gauss(1.0, 2.0), i as f64 / 20.0).unwrap().0, 0.0);
        }
        let (r1, r2) = cor3_point(&gauss(1.0, 0.5), 1.0).unwrap();
        assert!((r1 - 0.903_677_461_028_802).abs() < 1e-9);
        assert!((r2 - 1.057_738_608_709_97).abs() < 1e-9);
    }

    #[test]
    fn sweep_single_step_keeps_endpoints() {
        let r = sweep_region(&gauss(1.0, 0.5), SweepMode::Thm7, 1).unwrap();
        assert_eq!(r.len(), 2);
        let mut alphas: Vec<f64> = r.frontier.iter().map(alpha_of).collect();
        alphas.sort_by(f64::total_cmp);
        assert_eq!(alphas, vec![0.0, 1.0]);
    }

    #[test]
    fn sweep_unit_cross_gain_has_zero_equivocation() {
        let r = sweep_region(&gauss(1.0, 1.0), SweepMode::Thm7, 100).unwrap();
        assert!(r.frontier.iter().all(|p| p.re1 == 0.0));
    }

    #[test]
    fn sweep_trends_in_cross_gain() {
        let regions = figure2_with_steps(200).unwrap();
        for w in regions.windows(2) {
            assert!(w[1].1.max_coord(1) >= w[0].1.max_coord(1) - 1e-12);
            assert!(w[1].1.max_coord(2) <= w[0].1.max_coord(2) + 1e-12);
        }
    }

    #[test]
    fn figure2_shape() {
        let data = figure2_dataset();
        let keys: Vec<f64> = data.iter().map(|(b, _)| *b).collect();
        assert_eq!(keys, vec![0.25, 0.5, 0.75, 1.0]);
        assert!(data[3].1.frontier.iter().all(|p| p.re1 == 0.0));
        assert!((data[0].1.max_coord(0) - PSI_20).abs() < 1e-9);
    }

    #[test]
    fn figure2_files() {
        let dir = tempfile::tempdir().unwrap();
        let data = figure2_with_steps(10).unwrap();
        let paths = write_figure2(&data, dir.path()).unwrap();
        let names: Vec<String> = paths
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(
            names,
            ["fig2_b0.25.csv", "fig2_b0.5.csv", "fig2_b0.75.csv", "fig2_b1.0.csv"]
        );
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("alpha,R1,R2,Re1"));
        assert!(lines.next().unwrap().starts_with("0.000000000,0.000000000,"));
    }

    proptest! {
        #[test]
        fn equivocation_bounded_by_rate(
            a in -5.0f64..5.0, b in -1.0f64..1.0,
            p1 in 0.01f64..100.0, p2 in 0.01f64..100.0, alpha in 0.0f64..=1.0,
        ) {
            let g = GaussianCrc::new(a, b, p1, p2).unwrap();
            let p = thm7_point(&g, alpha).unwrap();
            prop_assert!(p.re1_max >= 0.0);
            prop_assert!(p.re1_max <= p.r1_max + 1e-12);
            let (c1, c2) = cor3_point(&g, alpha).unwrap();
            prop_assert!((c1 - p.re1_max).abs() <= 1e-12);
            prop_assert!((c2 - p.r2_max).abs() <= 1e-12);
        }

        #[test]
        fn monotone_in_alpha(
            b in -1.0f64..1.0, p1 in 0.01f64..100.0, p2 in 0.01f64..100.0, steps in 1usize..60,
        ) {
            let g = GaussianCrc::new(1.0, b, p1, p2).unwrap();
            let pts: Vec<GaussPoint> = (0..=steps)
                .map(|i| thm7_point(&g, i as f64 / steps as f64).unwrap())
                .collect();
            for w in pts.windows(2) {
                prop_assert!(w[1].r1_max >= w[0].r1_max - 1e-12);
                prop_assert!(w[1].r2_max <= w[0].r2_max + 1e-12);
            }
        }

        #[test]
        fn cor3_clamps_strong_cross_gain(b in 1.0f64..10.0, alpha in 0.0f64..=1.0) {
            let g = GaussianCrc::new(1.0, b, 20.0, 20.0).unwrap();
            prop_assert_eq!(cor3_point(&g, alpha).unwrap().0, 0.0);
        }
    }
}

//! Fixtures shared by the benchmarks.

use cogsec_core::binning::{build_codebook, orthogonal_aux, Codebook, Scheme, SchemeRates};
use cogsec_core::prob::sample_joint;
use cogsec_core::{DiscreteCrc, JointPmf, RatePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random joint over six binary axes.
pub fn joint6(seed: u64) -> JointPmf {
    sample_joint([("A", 2), ("B", 2), ("C", 2), ("D", 2), ("E", 2), ("F", 2)], seed)
        .expect("valid axes")
}

/// `n` points with coordinates uniform in `[0, 1)`.
pub fn random_points(n: usize, seed: u64) -> Vec<RatePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| RatePoint::new(rng.random(), rng.random(), rng.random(), rng.random()))
        .collect()
}

/// Orthogonal benchmark codebook at block length `n`.
pub fn orthogonal_codebook(n: usize) -> (Scheme, SchemeRates, Codebook) {
    let scheme = Scheme::new(&DiscreteCrc::orthogonal(), &orthogonal_aux()).expect("valid aux");
    let rates = scheme.rates(0.5, 0.0, 0.5, 0.2).expect("valid rates");
    let cb = build_codebook(&scheme, &rates, n, 1).expect("within budget");
    (scheme, rates, cb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert_eq!(joint6(0).len(), 64);
        assert_eq!(random_points(5, 0).len(), 5);
        assert_eq!(orthogonal_codebook(8).2.counts().m1, 16);
    }
}

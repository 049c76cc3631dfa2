//! Counter-based random streams and samplers.
//!
//! Every draw is a pure function of `(seed, index)`: stream `index` of a
//! ChaCha8 generator keyed by `seed`. Parallel loops therefore produce the
//! same samples regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::geometry::{normalize, HomogeneousPoint, C64};

/// Independent generator for sample `index` under `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derive a sub-seed so different experiments under one seed do not share streams.
pub fn subseed(seed: u64, tag: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Uniform direction on the unit sphere of C^m = R^{2m}.
pub fn sphere_direction<R: Rng + ?Sized>(rng: &mut R, m: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..m).map(|_| complex_gaussian(rng)).collect();
        let norm = crate::geometry::norm_sq(&v).sqrt();
        if norm > 1e-300 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// One FS-uniform point: the class of a standard complex Gaussian in C^{n+1}.
pub fn fs_uniform_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HomogeneousPoint {
    loop {
        let v: Vec<C64> = (0..=n).map(|_| complex_gaussian(rng)).collect();
        if let Ok(p) = normalize(&v) {
            return p;
        }
    }
}

/// `count` FS-uniform points of P^n; sample `i` depends only on `(seed, i)`.
pub fn sample_fs_uniform(seed: u64, count: usize, n: usize) -> Vec<HomogeneousPoint> {
    crate::reduce::par_map(count, |i| fs_uniform_point(&mut stream(seed, i as u64), n))
}

//! Deterministic sampling: low-discrepancy base points, seeded RNG, and
//! uniform fibre sampling.

use nalgebra::{Vector3, Vector4};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Van der Corput radical inverse in the given base.
fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let mut inv = 0.0;
    let mut denom = 1.0;
    while n > 0 {
        denom *= base as f64;
        inv += (n % base) as f64 / denom;
        n /= base;
    }
    inv
}

/// Halton points inside the domain box, shrunk by `margin` (as a fraction
/// of each axis length) plus the chart's stencil needs handled by callers.
pub fn box_points(domain: &[[f64; 2]; 4], margin: f64, count: usize, offset: u64) -> Vec<[f64; 4]> {
    const BASES: [u64; 4] = [2, 3, 5, 7];
    (0..count)
        .map(|i| {
            std::array::from_fn(|axis| {
                let u = radical_inverse(offset + 1 + i as u64, BASES[axis]);
                let lo = domain[axis][0];
                let hi = domain[axis][1];
                let len = hi - lo;
                lo + len * margin + u * len * (1.0 - 2.0 * margin)
            })
        })
        .collect()
}

/// Uniform point on the unit 2-sphere.
pub fn unit_sphere(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn random_vec3(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    Vector3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

pub fn random_vec4(rng: &mut ChaCha8Rng) -> Vector4<f64> {
    Vector4::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

pub fn random_unit4(rng: &mut ChaCha8Rng) -> Vector4<f64> {
    loop {
        let v = random_vec4(rng);
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Two orthonormal coordinate-component vectors spanning a random plane
/// (orthonormal for the Euclidean inner product; callers re-orthonormalize
/// against a metric as needed).
pub fn random_plane(rng: &mut ChaCha8Rng) -> (Vector4<f64>, Vector4<f64>) {
    let u = random_unit4(rng);
    loop {
        let mut v = random_unit4(rng);
        v -= u * u.dot(&v);
        let n = v.norm();
        if n > 1e-3 {
            return (u, v / n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_points_respect_margins() {
        let domain = [[-1.0, 1.0], [0.0, 2.0], [-3.0, -1.0], [0.5, 1.5]];
        for p in box_points(&domain, 0.1, 64, 0) {
            for axis in 0..4 {
                let len = domain[axis][1] - domain[axis][0];
                assert!(p[axis] >= domain[axis][0] + 0.1 * len - 1e-12);
                assert!(p[axis] <= domain[axis][1] - 0.1 * len + 1e-12);
            }
        }
    }

    #[test]
    fn sphere_samples_are_unit_and_deterministic() {
        let mut r1 = rng(42);
        let mut r2 = rng(42);
        for _ in 0..16 {
            let a = unit_sphere(&mut r1);
            let b = unit_sphere(&mut r2);
            assert_eq!(a, b);
            assert!((a.norm() - 1.0).abs() < 1e-12);
        }
    }
}

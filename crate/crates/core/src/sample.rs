//! Deterministic sample-point generation for numeric identity checks.
//!
//! The flag and forms modules verify identities (flag condition,
//! integrating factors, closedness) at pseudo-random complex points.
//! Results must be reproducible byte-for-byte, so the generator is a
//! fixed splitmix64 stream rather than an OS-seeded RNG.

use alloc::vec::Vec;

use crate::C64;

/// Splitmix64 stream; small, seedable, good enough for sample points.
#[derive(Clone, Debug)]
pub struct SampleStream {
    state: u64,
}

impl SampleStream {
    pub fn new(seed: u64) -> Self {
        SampleStream { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// A complex number with modulus in [r_min, r_max], uniform angle.
    pub fn next_complex_in_annulus(&mut self, r_min: f64, r_max: f64) -> C64 {
        let r = r_min + (r_max - r_min) * self.next_f64();
        let theta = core::f64::consts::TAU * self.next_f64();
        C64::new(r * libm::cos(theta), r * libm::sin(theta))
    }

    /// A point with each coordinate in the annulus r_min <= |z_i| <= r_max.
    ///
    /// Keeping coordinates away from 0 avoids the poles and branch cuts of
    /// the corpus integrands, whose singularities in scope sit on the
    /// coordinate hyperplanes or far outside the unit polydisc.
    pub fn next_point(&mut self, n: usize, r_min: f64, r_max: f64) -> Vec<C64> {
        (0..n).map(|_| self.next_complex_in_annulus(r_min, r_max)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_stream() {
        let mut a = SampleStream::new(42);
        let mut b = SampleStream::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn annulus_bounds() {
        let mut s = SampleStream::new(7);
        for _ in 0..1000 {
            let z = s.next_complex_in_annulus(0.25, 0.75);
            let r = z.norm();
            assert!((0.25..=0.7500001).contains(&r), "r = {r}");
        }
    }
}

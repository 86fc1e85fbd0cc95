//! Seeded standard-normal stream.
//!
//! ChaCha8 supplies 64-bit words; each uniform in [0, 1) is the top 53 bits
//! scaled by 2^-53, and normals come from the Marsaglia polar method, which
//! yields pairs. The second value of a pair is kept for the next call.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct GaussianStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let m = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * m);
                return u * m;
            }
        }
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for x in out {
            *x = self.next_gaussian();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments() {
        let mut g = GaussianStream::new(7);
        let n = 200_000;
        let v: Vec<f64> = (0..n).map(|_| g.next_gaussian()).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "{mean}");
        assert!((var - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn seeded() {
        let a: Vec<f64> = {
            let mut g = GaussianStream::new(42);
            (0..9).map(|_| g.next_gaussian()).collect()
        };
        let mut g = GaussianStream::new(42);
        let b: Vec<f64> = (0..9).map(|_| g.next_gaussian()).collect();
        assert_eq!(a, b);
        let mut h = GaussianStream::new(43);
        assert_ne!(a[0], h.next_gaussian());
    }

    #[test]
    fn uniform_range() {
        let mut g = GaussianStream::new(1);
        for _ in 0..10_000 {
            let u = g.uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }
}

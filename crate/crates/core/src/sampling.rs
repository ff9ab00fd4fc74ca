//! Seeded uniform sampling in boxes, with rejection.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::FourVector;

/// `n` vectors uniform in `[lo, hi]` accepted by `accept`; gives up after
/// `100 n` draws.
pub fn uniform_vectors(
    seed: u64,
    n: usize,
    lo: &[f64],
    hi: &[f64],
    accept: impl Fn(&[f64]) -> bool,
) -> Result<Vec<Vec<f64>>> {
    if lo.len() != hi.len() || lo.iter().zip(hi).any(|(a, b)| !(a <= b)) {
        return Err(Error::InvalidParameter("sampling box bounds must satisfy lo <= hi".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n {
        tries += 1;
        if tries > 100 * n.max(1) {
            return Err(Error::DegenerateSamples);
        }
        let v: Vec<f64> = lo
            .iter()
            .zip(hi)
            .map(|(&a, &b)| if a == b { a } else { rng.gen_range(a..b) })
            .collect();
        if accept(&v) {
            out.push(v);
        }
    }
    Ok(out)
}

/// Spacetime points uniform in a Cartesian box.
pub fn uniform_points(
    seed: u64,
    n: usize,
    lo: [f64; 4],
    hi: [f64; 4],
    accept: impl Fn(&FourVector) -> bool,
) -> Result<Vec<FourVector>> {
    let v = uniform_vectors(seed, n, &lo, &hi, |v| accept(&FourVector::new(v[0], v[1], v[2], v[3])))?;
    Ok(v.into_iter().map(|v| FourVector::new(v[0], v[1], v[2], v[3])).collect())
}

//! Definite integrals of smooth functions.
//!
//! Thin wrapper around the double-exponential rule of the `quadrature`
//! crate; intervals whose error estimate misses the tolerance are bisected.

const MAX_DEPTH: u32 = 16;

/// `int_a^b f` to absolute tolerance `tol` (signed, so `b < a` is allowed).
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    adaptive(&f, a, b, tol, 0)
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let out = quadrature::integrate(f, a, b, tol);
    // the second test stops refinement once the estimate is at rounding level
    if out.error_estimate <= tol
        || out.error_estimate <= 64.0 * f64::EPSILON * out.integral.abs()
        || depth >= MAX_DEPTH
    {
        return out.integral;
    }
    let mid = 0.5 * (a + b);
    adaptive(f, a, mid, 0.5 * tol, depth + 1) + adaptive(f, mid, b, 0.5 * tol, depth + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_reversed_limits() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-13);
        assert!((v - 9.0).abs() < 1e-12);
        let w = integrate(|x| x * x, 3.0, 0.0, 1e-13);
        assert!((w + 9.0).abs() < 1e-12);
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-12), 0.0);
    }

    #[test]
    fn narrow_peak_on_long_interval() {
        // int exp(-100 x^2) over [-20, 20] = sqrt(pi)/10
        let v = integrate(|x| (-100.0 * x * x).exp(), -20.0, 20.0, 1e-13);
        assert!((v - std::f64::consts::PI.sqrt() / 10.0).abs() < 1e-12);
    }
}

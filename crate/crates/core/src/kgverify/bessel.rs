//! Gamma and Bessel functions of complex order at real positive argument.
//!
//! `I_nu` by its power series, `K_nu` by the trapezoid rule on
//! `int_0^inf exp(-z cosh t) cosh(nu t) dt`, which converges geometrically
//! for analytic integrands. `J` and `Y` at negative imaginary argument follow
//! from
//!
//! ```text
//! J_nu(-i z) = e^{-i nu pi/2} I_nu(z)
//! Y_nu(-i z) = -i e^{-i nu pi/2} I_nu(z) - (2/pi) e^{i nu pi/2} K_nu(z)
//! ```
//!
//! on the principal branch (cut along the negative real axis of `z`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Complex Gamma function (Lanczos, `g = 7`), with reflection for
/// `Re z < 1/2`.
pub fn gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = (Complex64::from(PI) * z).sin();
        return Complex64::from(PI) / (s * gamma(Complex64::new(1.0, 0.0) - z));
    }
    let z = z - 1.0;
    let mut x = Complex64::from(LANCZOS[0]);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

fn check(v: Complex64, what: &str, z: f64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{what} overflow at argument {z}")))
    }
}

/// Modified Bessel function of the first kind, `z > 0`.
pub fn bessel_i(nu: Complex64, z: f64) -> Result<Complex64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("bessel_i needs z > 0, got {z}")));
    }
    let half = 0.5 * z;
    let q = half * half;
    let mut term = Complex64::from(half).powc(nu) / gamma(nu + 1.0);
    let mut sum = term;
    for k in 1..2000 {
        term *= q / (k as f64 * (nu + k as f64));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    check(sum, "bessel_i", z)
}

/// Modified Bessel function of the second kind, `z > 0`.
pub fn bessel_k(nu: Complex64, z: f64) -> Result<Complex64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("bessel_k needs z > 0, got {z}")));
    }
    let h = 0.05;
    let f = |t: f64| (-z * t.cosh()).exp() * (nu * t).cosh();
    let mut sum = 0.5 * f(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        sum += f(t);
        // integrand relative to e^{-z} below e^{-42}
        if z * (t.cosh() - 1.0) - nu.re.abs() * t > 42.0 {
            break;
        }
        k += 1;
        if k > 100_000 {
            return Err(Error::Domain(format!("bessel_k did not converge at {z}")));
        }
    }
    check(sum * h, "bessel_k", z)
}

/// `J_nu(-i z)` for `z > 0`.
pub fn bessel_j_neg_imag(nu: Complex64, z: f64) -> Result<Complex64> {
    let ph = (Complex64::new(0.0, -0.5 * PI) * nu).exp();
    Ok(ph * bessel_i(nu, z)?)
}

/// `Y_nu(-i z)` for `z > 0`.
pub fn bessel_y_neg_imag(nu: Complex64, z: f64) -> Result<Complex64> {
    let i = Complex64::i();
    let em = (-i * 0.5 * PI * nu).exp();
    let ep = (i * 0.5 * PI * nu).exp();
    Ok(-i * em * bessel_i(nu, z)? - 2.0 / PI * ep * bessel_k(nu, z)?)
}

//! Exact Klein-Gordon wavefunctions and their finite-difference checks.
//!
//! The operator is `(d^2 + m^2) phi` with `d^2 = d_t^2 - d_x^2 - d_y^2 - d_z^2`,
//! evaluated by central differences in Cartesian coordinates. Convergence is
//! judged by h-halving ratios rather than absolute thresholds.

pub mod bessel;

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::PlaneWaveOrbit;
use crate::backgrounds::{Family, NullArgument, Profile, ScalarBackground};
use crate::conformal::{divergence, killing_vector, symmetry_defect, ConformalGenerator};
use crate::dynamics::export::fmt_f64;
use crate::error::{Error, Result};
use crate::geometry::{from_lightfront, to_lightfront, FourVector, LightFrontCoords};

pub use bessel::{bessel_i, bessel_j_neg_imag, bessel_k, bessel_y_neg_imag, gamma};

/// Default finite-difference step.
pub const DEFAULT_H: f64 = 1e-3;
/// Accepted band for the h-halving ratio of an O(h^2) quantity.
pub const RATIO_BAND: (f64, f64) = (3.5, 4.5);
/// Floor of the normalization `max(|phi|, eps)`.
pub const NORM_FLOOR: f64 = 1e-300;

type EvalFn = Arc<dyn Fn(&FourVector) -> Result<Complex64> + Send + Sync>;
type DomainFn = Arc<dyn Fn(&FourVector) -> bool + Send + Sync>;

/// Eigenvalues and constants a wavefunction was built from.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct WaveParams {
    pub q_perp: [f64; 2],
    pub q_minus: Option<f64>,
    pub q3: Option<f64>,
    pub c2: Option<f64>,
    /// `alpha = sqrt(c^2 - Q3^2)` as `[re, im]`
    pub alpha: Option<[f64; 2]>,
    /// `c1, c2` as `[re, im]`
    pub coeffs: Option<[[f64; 2]; 2]>,
}

#[derive(Clone)]
pub struct Wavefunction {
    pub name: String,
    pub params: WaveParams,
    eval: EvalFn,
    domain: DomainFn,
}

impl fmt::Debug for Wavefunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Wavefunction")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish()
    }
}

impl Wavefunction {
    pub fn new(
        name: impl Into<String>,
        params: WaveParams,
        eval: impl Fn(&FourVector) -> Result<Complex64> + Send + Sync + 'static,
        domain: impl Fn(&FourVector) -> bool + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            params,
            eval: Arc::new(eval),
            domain: Arc::new(domain),
        }
    }

    pub fn in_domain(&self, x: &FourVector) -> bool {
        (self.domain)(x)
    }

    pub fn eval(&self, x: &FourVector) -> Result<Complex64> {
        if !self.in_domain(x) {
            return Err(Error::Domain(format!("{} evaluated outside its domain at {:?}", self.name, x.0)));
        }
        let v = (self.eval)(x)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite(if v.re.is_finite() { v.im } else { v.re }))
        }
    }

    /// Same wavefunction times a constant.
    pub fn scaled(&self, s: Complex64) -> Self {
        let inner = self.eval.clone();
        Self {
            name: self.name.clone(),
            params: self.params.clone(),
            eval: Arc::new(move |x| Ok(s * inner(x)?)),
            domain: self.domain.clone(),
        }
    }
}

/// `exp(-i p.x)` with lower-index `p`.
pub fn free_mode(p: FourVector) -> Wavefunction {
    let (_, pm) = crate::geometry::lightfront_momenta(&p);
    Wavefunction::new(
        "free",
        WaveParams {
            q_perp: [p[1], p[2]],
            q_minus: Some(pm),
            ..Default::default()
        },
        move |x| Ok((-Complex64::i() * p.contract(x)).exp()),
        |_| true,
    )
}

fn nonzero(name: &str, v: f64) -> Result<()> {
    if v == 0.0 || !v.is_finite() {
        Err(Error::InvalidParameter(format!("{name} must be finite and non-zero")))
    } else {
        Ok(())
    }
}

/// Plane-wave solution
/// `exp(-i Q_perp x^perp - i Q_- x- - i int_0^{x+} (Q_perp^2 + m^2(s))/(4 Q_-) ds)`.
pub fn make_planewave_solution(q_perp: [f64; 2], q_minus: f64, bg: &ScalarBackground) -> Result<Wavefunction> {
    nonzero("Q_-", q_minus)?;
    let profile: Arc<dyn Profile> = match bg.family() {
        Family::PlaneWave {
            profile,
            argument: NullArgument::Plus,
        } => profile.clone(),
        Family::Constant { m0sq } => Arc::new(crate::backgrounds::ConstantProfile(*m0sq)),
        _ => return Err(Error::InvalidParameter("plane-wave solution needs m^2(x+)".into())),
    };
    let qq = q_perp[0] * q_perp[0] + q_perp[1] * q_perp[1];
    Ok(Wavefunction::new(
        "plane-wave",
        WaveParams {
            q_perp,
            q_minus: Some(q_minus),
            ..Default::default()
        },
        move |x| {
            let lf = to_lightfront(x);
            let phase = q_perp[0] * lf.x1
                + q_perp[1] * lf.x2
                + q_minus * lf.xminus
                + (qq * lf.xplus + profile.antiderivative(lf.xplus)) / (4.0 * q_minus);
            Ok((-Complex64::i() * phase).exp())
        },
        |_| true,
    ))
}

/// Special-conformal solution, defined for `x+ > 0`:
/// `(1/x+) exp(-i (Q3 + Q_perp x^perp)/x+ + i int_0^u (Q_perp^2 + f(s))/(4 Q3) ds)`.
pub fn make_conformal_solution(q_perp: [f64; 2], q3: f64, f: Arc<dyn Profile>) -> Result<Wavefunction> {
    nonzero("Q3", q3)?;
    let qq = q_perp[0] * q_perp[0] + q_perp[1] * q_perp[1];
    Ok(Wavefunction::new(
        "special-conformal",
        WaveParams {
            q_perp,
            q3: Some(q3),
            ..Default::default()
        },
        move |x| {
            let lf = to_lightfront(x);
            let u = lf.xminus - lf.transverse_sq() / lf.xplus;
            let g = (qq * u + f.antiderivative(u) - f.antiderivative(0.0)) / (4.0 * q3);
            let phase = -(q3 + q_perp[0] * lf.x1 + q_perp[1] * lf.x2) / lf.xplus + g;
            Ok((Complex64::i() * phase).exp() / lf.xplus)
        },
        |x| to_lightfront(x).xplus > 0.0,
    ))
}

/// Dilation solution for `m^2 = c^2/x.x`, defined for `x+ > 0`, `x.x > 0`:
/// `(x+)^{-(1 + i Q3)} v^{-i Q3} exp(-i Q_perp x^perp / x+) y(v)` with
/// `v = sqrt(x.x)/x+` and `y = c1 J_a(-i |Q_perp| v) + c2 Y_a(-i |Q_perp| v)`,
/// `a = sqrt(c^2 - Q3^2)` (principal root, imaginary when `c^2 < Q3^2`).
/// For `Q_perp = 0` the Bessel equation degenerates to the Euler equation and
/// `y = c1 v^a + c2 v^{-a}`.
pub fn make_dilation_solution(q_perp: [f64; 2], q3: f64, c2: f64, coeffs: [Complex64; 2]) -> Result<Wavefunction> {
    if !(c2 >= 0.0) || !q3.is_finite() {
        return Err(Error::InvalidParameter("dilation solution needs c^2 >= 0 and finite Q3".into()));
    }
    let alpha = Complex64::new(c2 - q3 * q3, 0.0).sqrt();
    let qabs = q_perp[0].hypot(q_perp[1]);
    let [a1, a2] = coeffs;
    let i = Complex64::i();
    Ok(Wavefunction::new(
        "dilation",
        WaveParams {
            q_perp,
            q3: Some(q3),
            c2: Some(c2),
            alpha: Some([alpha.re, alpha.im]),
            coeffs: Some([[a1.re, a1.im], [a2.re, a2.im]]),
            ..Default::default()
        },
        move |x| {
            let lf = to_lightfront(x);
            let v = lf.square().sqrt() / lf.xplus;
            let y = if qabs == 0.0 {
                let vc = Complex64::from(v);
                a1 * vc.powc(alpha) + a2 * vc.powc(-alpha)
            } else {
                let z = qabs * v;
                let mut y = Complex64::from(0.0);
                if a1 != Complex64::from(0.0) {
                    y += a1 * bessel_j_neg_imag(alpha, z)?;
                }
                if a2 != Complex64::from(0.0) {
                    y += a2 * bessel_y_neg_imag(alpha, z)?;
                }
                y
            };
            let pre = (-(1.0 + i * q3) * lf.xplus.ln()).exp() * (-i * q3 * v.ln()).exp();
            let ph = (-i * (q_perp[0] * lf.x1 + q_perp[1] * lf.x2) / lf.xplus).exp();
            Ok(pre * ph * y)
        },
        |x| {
            let lf = to_lightfront(x);
            lf.xplus > 0.0 && lf.square() > 0.0
        },
    ))
}

/// Finite-difference stencil for second derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    /// three points, O(h^2)
    #[default]
    Second,
    /// five points, O(h^4)
    Fourth,
}

fn shifted(x: &FourVector, mu: usize, d: f64) -> FourVector {
    let mut y = *x;
    y[mu] += d;
    y
}

type Field<'a> = &'a dyn Fn(&FourVector) -> Result<Complex64>;

fn d2_axis(f: Field, x: &FourVector, mu: usize, h: f64, st: Stencil, f0: Complex64) -> Result<Complex64> {
    Ok(match st {
        Stencil::Second => (f(&shifted(x, mu, h))? - 2.0 * f0 + f(&shifted(x, mu, -h))?) / (h * h),
        Stencil::Fourth => {
            let (p1, m1) = (f(&shifted(x, mu, h))?, f(&shifted(x, mu, -h))?);
            let (p2, m2) = (f(&shifted(x, mu, 2.0 * h))?, f(&shifted(x, mu, -2.0 * h))?);
            (-(p2 + m2) + 16.0 * (p1 + m1) - 30.0 * f0) / (12.0 * h * h)
        }
    })
}

fn d1_axis(f: Field, x: &FourVector, mu: usize, h: f64) -> Result<Complex64> {
    Ok((f(&shifted(x, mu, h))? - f(&shifted(x, mu, -h))?) / (2.0 * h))
}

fn box_fd(f: Field, x: &FourVector, h: f64, st: Stencil) -> Result<Complex64> {
    let f0 = f(x)?;
    let mut out = d2_axis(f, x, 0, h, st, f0)?;
    for mu in 1..4 {
        out -= d2_axis(f, x, mu, h, st, f0)?;
    }
    Ok(out)
}

fn check_margin(phi: &Wavefunction, bg: &ScalarBackground, x: &FourVector, h: f64, reach: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
    }
    for mu in 0..4 {
        for k in [-reach, -1.0, 1.0, reach] {
            let y = shifted(x, mu, k * h);
            if !phi.in_domain(&y) || !bg.in_domain(&y) {
                return Err(Error::Domain(format!(
                    "point {:?} is closer than {}h to the domain boundary",
                    x.0, reach
                )));
            }
        }
    }
    Ok(())
}

/// `(d^2 + m^2(x)) phi(x)`.
pub fn kg_residual(phi: &Wavefunction, bg: &ScalarBackground, x: &FourVector, h: f64) -> Result<Complex64> {
    kg_residual_with(phi, bg, x, h, Stencil::Second)
}

pub fn kg_residual_with(
    phi: &Wavefunction,
    bg: &ScalarBackground,
    x: &FourVector,
    h: f64,
    st: Stencil,
) -> Result<Complex64> {
    check_margin(phi, bg, x, h, 2.0)?;
    let f = |y: &FourVector| phi.eval(y);
    Ok(box_fd(&f, x, h, st)? + bg.m2(x)? * phi.eval(x)?)
}

/// `|kg_residual| / max(|phi|, eps)`.
pub fn kg_residual_normalized(phi: &Wavefunction, bg: &ScalarBackground, x: &FourVector, h: f64) -> Result<f64> {
    let r = kg_residual(phi, bg, x, h)?;
    Ok(r.norm() / phi.eval(x)?.norm().max(NORM_FLOOR))
}

fn apply_symmetry(g: &ConformalGenerator, f: Field, x: &FourVector, h: f64) -> Result<Complex64> {
    let xi = killing_vector(g, x);
    let mut out = 0.25 * divergence(g, x) * f(x)?;
    for mu in 0..4 {
        if xi[mu] != 0.0 {
            out += xi[mu] * d1_axis(f, x, mu, h)?;
        }
    }
    Ok(out)
}

/// `xi.d phi + (d.xi / 4) phi`, derivatives by central differences.
pub fn symmetry_apply(g: &ConformalGenerator, phi: &Wavefunction, x: &FourVector, h: f64) -> Result<Complex64> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
    }
    for mu in 0..4 {
        for k in [-2.0, 2.0] {
            if !phi.in_domain(&shifted(x, mu, k * h)) {
                return Err(Error::Domain(format!("point {:?} is closer than 2h to the domain boundary", x.0)));
            }
        }
    }
    apply_symmetry(g, &|y| phi.eval(y), x, h)
}

/// `max |L phi + i Q phi| / max |phi|` over the points.
pub fn eigen_defect(
    g: &ConformalGenerator,
    phi: &Wavefunction,
    q: Complex64,
    points: &[FourVector],
    h: f64,
) -> Result<f64> {
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for x in points {
        let v = phi.eval(x)?;
        num = num.max((symmetry_apply(g, phi, x, h)? + Complex64::i() * q * v).norm());
        den = den.max(v.norm());
    }
    Ok(num / den.max(NORM_FLOOR))
}

/// `max_u |4 i Q3 g'(u) + (Q_perp^2 + f(u)) g(u)| / max |g|`.
pub fn ode_residual_conformal(
    g: &dyn Fn(f64) -> Result<Complex64>,
    q_perp: [f64; 2],
    q3: f64,
    f: &dyn Profile,
    grid: &[f64],
    h: f64,
) -> Result<f64> {
    let qq = q_perp[0] * q_perp[0] + q_perp[1] * q_perp[1];
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for &u in grid {
        let gu = g(u)?;
        let dg = (g(u + h)? - g(u - h)?) / (2.0 * h);
        num = num.max((4.0 * Complex64::i() * q3 * dg + (qq + f.value(u)) * gu).norm());
        den = den.max(gu.norm());
    }
    Ok(num / den.max(NORM_FLOOR))
}

/// `max |4 i Q_- chi'(x+) - (Q_perp^2 + m^2(x+)) chi| / max |chi|`.
pub fn ode_residual_planewave(
    chi: &dyn Fn(f64) -> Result<Complex64>,
    q_perp: [f64; 2],
    q_minus: f64,
    profile: &dyn Profile,
    grid: &[f64],
    h: f64,
) -> Result<f64> {
    let qq = q_perp[0] * q_perp[0] + q_perp[1] * q_perp[1];
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for &s in grid {
        let c = chi(s)?;
        let dc = (chi(s + h)? - chi(s - h)?) / (2.0 * h);
        num = num.max((4.0 * Complex64::i() * q_minus * dc - (qq + profile.value(s)) * c).norm());
        den = den.max(c.norm());
    }
    Ok(num / den.max(NORM_FLOOR))
}

/// `g(u) = x+ exp(i (Q3 + Q_perp x^perp)/x+) phi` on the slice of fixed
/// `x+, x^perp`, with `x- = u + x^perp x^perp / x+`.
pub fn conformal_reduced(
    phi: &Wavefunction,
    q_perp: [f64; 2],
    q3: f64,
    xplus: f64,
    xperp: [f64; 2],
) -> impl Fn(f64) -> Result<Complex64> + '_ {
    move |u| {
        let tsq = xperp[0] * xperp[0] + xperp[1] * xperp[1];
        let x = from_lightfront(&LightFrontCoords::new(xplus, u + tsq / xplus, xperp[0], xperp[1]));
        let ph = (q3 + q_perp[0] * xperp[0] + q_perp[1] * xperp[1]) / xplus;
        Ok(xplus * (Complex64::i() * ph).exp() * phi.eval(&x)?)
    }
}

/// `chi(x+) = exp(i Q_perp x^perp + i Q_- x-) phi` at fixed `x-, x^perp`.
pub fn planewave_reduced(
    phi: &Wavefunction,
    q_perp: [f64; 2],
    q_minus: f64,
    xminus: f64,
    xperp: [f64; 2],
) -> impl Fn(f64) -> Result<Complex64> + '_ {
    move |xp| {
        let x = from_lightfront(&LightFrontCoords::new(xp, xminus, xperp[0], xperp[1]));
        let ph = q_perp[0] * xperp[0] + q_perp[1] * xperp[1] + q_minus * xminus;
        Ok((Complex64::i() * ph).exp() * phi.eval(&x)?)
    }
}

/// Largest difference between `d_mu S`, `S = i ln phi`, differentiated in
/// light-front coordinates at orbit points, and the orbit's canonical
/// `(p_+, p_-, p_1, p_2)`. The wavefunction is built from the orbit's
/// conserved `p_perp, p_-`.
pub fn hamilton_jacobi_defect(orbit: &PlaneWaveOrbit, bg: &ScalarBackground, xplus: &[f64], h: f64) -> Result<f64> {
    let [p1, p2, pm, ..] = orbit.q;
    let phi = make_planewave_solution([p1, p2], pm, bg)?;
    let mut worst: f64 = 0.0;
    for &xp in xplus {
        let s = crate::analytic::ClosedFormOrbit::state_at(orbit, xp)?;
        let lf = [s.q[0], s.q[1], s.q[2], s.q[3]];
        let at = |d: [f64; 4]| {
            from_lightfront(&LightFrontCoords::new(lf[0] + d[0], lf[1] + d[1], lf[2] + d[2], lf[3] + d[3]))
        };
        let v = phi.eval(&at([0.0; 4]))?;
        for a in 0..4 {
            let mut e = [0.0; 4];
            e[a] = h;
            let fwd = phi.eval(&at(e))?;
            e[a] = -h;
            let bwd = phi.eval(&at(e))?;
            let ds = Complex64::i() * (fwd - bwd) / (2.0 * h * v);
            worst = worst.max((ds - s.p[a]).norm());
        }
    }
    Ok(worst)
}

/// Defect of the commutator identity
/// `[d^2 + m^2, L] phi = (d.xi/2)(d^2 + m^2) phi - (xi.dm^2 + (d.xi/2) m^2) phi`
/// with `L = xi.d + d.xi/4`, both sides by nested central differences.
/// Returned relative to `max(|phi|, eps)`.
pub fn operator_identity_defect(
    g: &ConformalGenerator,
    phi: &Wavefunction,
    bg: &ScalarBackground,
    x: &FourVector,
    h: f64,
) -> Result<f64> {
    check_margin(phi, bg, x, h, 3.0)?;
    let st = Stencil::Second;
    let p = |y: &FourVector| phi.eval(y);
    let lphi = |y: &FourVector| apply_symmetry(g, &p, y, h);
    let kg = |y: &FourVector| Ok(box_fd(&p, y, h, st)? + bg.m2(y)? * phi.eval(y)?);
    let kg_of_l = box_fd(&lphi, x, h, st)? + bg.m2(x)? * lphi(x)?;
    let l_of_kg = apply_symmetry(g, &kg, x, h)?;
    let lhs = kg_of_l - l_of_kg;
    let rhs = 0.5 * divergence(g, x) * kg(x)? - symmetry_defect(g, bg, x)? * phi.eval(x)?;
    Ok((lhs - rhs).norm() / phi.eval(x)?.norm().max(NORM_FLOOR))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub point: usize,
    pub x: [f64; 4],
    pub h: f64,
    pub residual: f64,
    /// `residual(2h) / residual(h)`
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub label: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Runs `quantity(x, h)` at `h0, h0/2, ...` (`levels` steps) for each point.
    pub fn build(
        label: impl Into<String>,
        points: &[FourVector],
        h0: f64,
        levels: usize,
        quantity: impl Fn(&FourVector, f64) -> Result<f64>,
    ) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, x) in points.iter().enumerate() {
            let mut prev: Option<f64> = None;
            let mut h = h0;
            for _ in 0..levels.max(2) {
                let r = quantity(x, h)?;
                rows.push(ConvergenceRow {
                    point: i,
                    x: x.0,
                    h,
                    residual: r,
                    ratio: prev.map(|p| p / r),
                });
                prev = Some(r);
                h *= 0.5;
            }
        }
        Ok(Self {
            label: label.into(),
            rows,
        })
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.ratio).collect()
    }

    pub fn all_ratios_within(&self, lo: f64, hi: f64) -> bool {
        let r = self.ratios();
        !r.is_empty() && r.iter().all(|&v| v >= lo && v <= hi)
    }

    pub fn passes(&self) -> bool {
        self.all_ratios_within(RATIO_BAND.0, RATIO_BAND.1)
    }

    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    /// Columns `point, t, x, y, z, h, residual, ratio`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["point", "t", "x", "y", "z", "h", "residual", "ratio"])?;
        for r in &self.rows {
            let mut rec = vec![r.point.to_string()];
            rec.extend(r.x.iter().map(|v| fmt_f64(*v)));
            rec.push(fmt_f64(r.h));
            rec.push(fmt_f64(r.residual));
            rec.push(r.ratio.map(fmt_f64).unwrap_or_default());
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }
}

pub fn residual_convergence(
    phi: &Wavefunction,
    bg: &ScalarBackground,
    points: &[FourVector],
    h0: f64,
    levels: usize,
) -> Result<ConvergenceTable> {
    ConvergenceTable::build(format!("kg:{}", phi.name), points, h0, levels, |x, h| {
        kg_residual_normalized(phi, bg, x, h)
    })
}

pub fn eigen_convergence(
    g: &ConformalGenerator,
    phi: &Wavefunction,
    q: Complex64,
    points: &[FourVector],
    h0: f64,
    levels: usize,
) -> Result<ConvergenceTable> {
    ConvergenceTable::build(format!("eigen:{}", phi.name), points, h0, levels, |x, h| {
        eigen_defect(g, phi, q, std::slice::from_ref(x), h)
    })
}

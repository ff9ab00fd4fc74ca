//! Explicit Runge-Kutta integration with event location.
//!
//! The default method is the embedded Dormand-Prince 5(4) pair with the
//! usual mixed absolute/relative error norm; a fixed-step classical RK4 is
//! available for convergence studies. Events are zero crossings of
//! user-supplied functions `g(t, y)`: once an accepted step changes the sign of
//! `g`, the crossing is located by bisecting the step length (each trial is a
//! fresh single step from the last accepted point) down to `event_tol` in `t`.
//! The integration then either terminates or restarts just past the crossing,
//! which keeps the method from stepping across a kink in the right-hand side.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method<T> {
    DormandPrince54,
    Rk4 { h: T },
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions<T> {
    pub method: Method<T>,
    pub abs_tol: T,
    pub rel_tol: T,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<T>,
    pub h_max: Option<T>,
    pub h_min: T,
    pub max_steps: usize,
    pub event_tol: T,
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self {
            method: Method::DormandPrince54,
            abs_tol: T::lit(1e-10),
            rel_tol: T::lit(1e-10),
            h_init: None,
            h_max: None,
            h_min: T::lit(1e-14),
            max_steps: 1_000_000,
            event_tol: T::lit(1e-12),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventAction {
    Restart,
    Terminate,
}

pub struct Event<'a, T> {
    pub name: String,
    pub action: EventAction,
    pub g: Box<dyn Fn(T, &[T]) -> T + 'a>,
}

impl<'a, T> Event<'a, T> {
    pub fn new(name: impl Into<String>, action: EventAction, g: impl Fn(T, &[T]) -> T + 'a) -> Self {
        Self {
            name: name.into(),
            action,
            g: Box::new(g),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OdeStats {
    pub steps: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// `(event name, time)` of every located crossing.
    pub events: Vec<(String, f64)>,
    pub terminated_by: Option<String>,
}

/// Final time and state.
#[derive(Debug, Clone)]
pub struct OdeOutcome<T> {
    pub t: T,
    pub y: Vec<T>,
    pub stats: OdeStats,
}

// Dormand-Prince tableau
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct StepResult<T> {
    y: Vec<T>,
    /// derivative at the end point when the method provides it (FSAL)
    f_end: Option<Vec<T>>,
    err: Vec<T>,
}

struct Stepper<'r, T, F> {
    rhs: &'r mut F,
    method: Method<T>,
    evals: usize,
}

impl<'r, T, F> Stepper<'r, T, F>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]) -> Result<()>,
{
    fn eval(&mut self, t: T, y: &[T], out: &mut [T]) -> Result<()> {
        self.evals += 1;
        (self.rhs)(t, y, out)
    }

    fn step(&mut self, t: T, y: &[T], f0: &[T], h: T) -> Result<StepResult<T>> {
        match self.method {
            Method::DormandPrince54 => self.dopri(t, y, f0, h),
            Method::Rk4 { .. } => self.rk4(t, y, f0, h),
        }
    }

    fn dopri(&mut self, t: T, y: &[T], f0: &[T], h: T) -> Result<StepResult<T>> {
        let n = y.len();
        let mut k: Vec<Vec<T>> = Vec::with_capacity(7);
        k.push(f0.to_vec());
        let mut tmp = vec![T::zero(); n];
        for s in 1..7 {
            for i in 0..n {
                let mut acc = T::zero();
                for (j, kj) in k.iter().enumerate() {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc = acc + T::lit(a) * kj[i];
                    }
                }
                tmp[i] = y[i] + h * acc;
            }
            let mut ks = vec![T::zero(); n];
            self.eval(t + T::lit(C[s]) * h, &tmp, &mut ks)?;
            k.push(ks);
        }
        // the 7th stage is evaluated at the 5th-order solution
        let y_new = tmp;
        let mut err = vec![T::zero(); n];
        for i in 0..n {
            let mut acc = T::zero();
            for (s, ks) in k.iter().enumerate() {
                if E[s] != 0.0 {
                    acc = acc + T::lit(E[s]) * ks[i];
                }
            }
            err[i] = h * acc;
        }
        Ok(StepResult {
            y: y_new,
            f_end: k.pop(),
            err,
        })
    }

    fn rk4(&mut self, t: T, y: &[T], f0: &[T], h: T) -> Result<StepResult<T>> {
        let n = y.len();
        let half = T::lit(0.5);
        let mut k2 = vec![T::zero(); n];
        let mut k3 = vec![T::zero(); n];
        let mut k4 = vec![T::zero(); n];
        let y1: Vec<T> = (0..n).map(|i| y[i] + half * h * f0[i]).collect();
        self.eval(t + half * h, &y1, &mut k2)?;
        let y2: Vec<T> = (0..n).map(|i| y[i] + half * h * k2[i]).collect();
        self.eval(t + half * h, &y2, &mut k3)?;
        let y3: Vec<T> = (0..n).map(|i| y[i] + h * k3[i]).collect();
        self.eval(t + h, &y3, &mut k4)?;
        let sixth = T::lit(1.0 / 6.0);
        let two = T::lit(2.0);
        let y_new = (0..n)
            .map(|i| y[i] + h * sixth * (f0[i] + two * k2[i] + two * k3[i] + k4[i]))
            .collect();
        Ok(StepResult {
            y: y_new,
            f_end: None,
            err: vec![T::zero(); n],
        })
    }
}

fn error_norm<T: Real>(err: &[T], y0: &[T], y1: &[T], atol: T, rtol: T) -> T {
    let n = T::from_usize(err.len().max(1)).unwrap();
    let sum: T = err
        .iter()
        .zip(y0.iter().zip(y1.iter()))
        .map(|(&e, (&a, &b))| {
            let sc = atol + rtol * a.abs().max(b.abs());
            let r = e / sc;
            r * r
        })
        .sum();
    (sum / n).sqrt()
}

fn all_finite<T: Real>(v: &[T]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end` (either direction).
///
/// With an empty `t_eval`, `observer` is called with the initial point,
/// after every accepted step and at every located event. Otherwise it is
/// called only at the requested times (sorted in the direction of
/// integration), each reached by a single step from the last accepted point.
#[allow(clippy::too_many_arguments)]
pub fn solve<T, F, O>(
    mut rhs: F,
    t0: T,
    y0: &[T],
    t_end: T,
    opts: &OdeOptions<T>,
    events: &[Event<'_, T>],
    t_eval: &[T],
    mut observer: O,
) -> Result<OdeOutcome<T>>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]) -> Result<()>,
    O: FnMut(T, &[T]),
{
    let n = y0.len();
    let dir = if t_end >= t0 { T::one() } else { -T::one() };
    let mut stepper = Stepper {
        rhs: &mut rhs,
        method: opts.method,
        evals: 0,
    };
    let mut stats = OdeStats::default();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut f = vec![T::zero(); n];
    stepper.eval(t, &y, &mut f)?;
    let dense = !t_eval.is_empty();
    let mut next_eval = 0usize;
    // requested times behind the start are dropped
    while next_eval < t_eval.len() && (t_eval[next_eval] - t) * dir < T::zero() {
        next_eval += 1;
    }
    if !dense {
        observer(t, &y);
    } else if next_eval < t_eval.len() && t_eval[next_eval] == t {
        observer(t, &y);
        next_eval += 1;
    }
    if t == t_end {
        stats.rhs_evals = stepper.evals;
        return Ok(OdeOutcome { t, y, stats });
    }

    let span = (t_end - t0).abs();
    let h_max = opts.h_max.unwrap_or(span).min(span);
    let fixed = matches!(opts.method, Method::Rk4 { .. });
    let mut h = match opts.method {
        Method::Rk4 { h } => h.abs(),
        Method::DormandPrince54 => match opts.h_init {
            Some(h) => h.abs(),
            None => initial_step(&mut stepper, t, &y, &f, dir, opts)?,
        },
    }
    .min(h_max);

    let mut g_old: Vec<T> = events.iter().map(|e| (e.g)(t, &y)).collect();
    let safety = T::lit(0.9);
    let fac_min = T::lit(0.2);
    let fac_max = T::lit(5.0);
    let mut last_rejected = false;

    loop {
        if stats.steps + stats.rejected >= opts.max_steps {
            return Err(Error::TooManySteps(opts.max_steps));
        }
        let remaining = (t_end - t).abs();
        let mut h_try = h.min(remaining);
        let hits_end = h_try >= remaining;
        if hits_end {
            h_try = remaining;
        }
        if h_try < opts.h_min && !hits_end {
            return Err(Error::StepUnderflow {
                t: t.to_f64_lossy(),
                h: h_try.to_f64_lossy(),
            });
        }
        let res = stepper.step(t, &y, &f, dir * h_try);
        let res = match res {
            Ok(r) if all_finite(&r.y) => r,
            Ok(_) | Err(_) if !fixed && h_try > opts.h_min => {
                // treat a failed or non-finite trial like a rejected step
                if let Err(e) = res {
                    if !e.is_runtime_singularity() {
                        return Err(e);
                    }
                }
                stats.rejected += 1;
                h = h_try * fac_min;
                last_rejected = true;
                continue;
            }
            Ok(_) => return Err(Error::NonFinite(t.to_f64_lossy())),
            Err(e) => return Err(e),
        };

        let err = if fixed {
            T::zero()
        } else {
            error_norm(&res.err, &y, &res.y, opts.abs_tol, opts.rel_tol)
        };
        if !fixed && err > T::one() {
            stats.rejected += 1;
            let fac = (safety * err.powf(T::lit(-0.2))).max(fac_min);
            h = h_try * fac;
            last_rejected = true;
            continue;
        }

        let t_new = if hits_end { t_end } else { t + dir * h_try };
        let y_new = res.y;

        // event detection on the accepted step
        let g_new: Vec<T> = events.iter().map(|e| (e.g)(t_new, &y_new)).collect();
        let crossed: Vec<usize> = (0..events.len())
            .filter(|&i| {
                let (a, b) = (g_old[i], g_new[i]);
                (a * b < T::zero()) || (a != T::zero() && b == T::zero())
            })
            .collect();

        if !crossed.is_empty() {
            let mut best: Option<(usize, T)> = None;
            for &i in &crossed {
                let frac = locate_crossing(&mut stepper, &events[i], t, &y, &f, dir * h_try, g_old[i], opts.event_tol)?;
                if best.map_or(true, |(_, b)| frac < b) {
                    best = Some((i, frac));
                }
            }
            let (idx, frac) = best.expect("at least one crossing");
            let h_ev = dir * h_try * frac;
            let r = stepper.step(t, &y, &f, h_ev)?;
            let t_ev = t + h_ev;
            if dense {
                emit_dense(&mut stepper, t, &y, &f, t_ev, &r.y, dir, t_eval, &mut next_eval, &mut observer)?;
            }
            t = t_ev;
            y = r.y;
            stats.steps += 1;
            stats.events.push((events[idx].name.clone(), t.to_f64_lossy()));
            if !dense {
                observer(t, &y);
            }
            if events[idx].action == EventAction::Terminate {
                stats.terminated_by = Some(events[idx].name.clone());
                stats.rhs_evals = stepper.evals;
                return Ok(OdeOutcome { t, y, stats });
            }
            stepper.eval(t, &y, &mut f)?;
            g_old = events.iter().map(|e| (e.g)(t, &y)).collect();
            last_rejected = false;
            if (t_end - t) * dir <= T::zero() {
                break;
            }
            continue;
        }

        if dense {
            emit_dense(&mut stepper, t, &y, &f, t_new, &y_new, dir, t_eval, &mut next_eval, &mut observer)?;
        }
        t = t_new;
        y = y_new;
        match res.f_end {
            Some(fe) => f = fe,
            None => stepper.eval(t, &y, &mut f)?,
        }
        g_old = g_new;
        stats.steps += 1;
        if !dense {
            observer(t, &y);
        }
        if hits_end {
            break;
        }
        if !fixed {
            let mut fac = if err == T::zero() {
                fac_max
            } else {
                (safety * err.powf(T::lit(-0.2))).min(fac_max).max(fac_min)
            };
            if last_rejected {
                fac = fac.min(T::one());
            }
            h = (h_try * fac).min(h_max);
        }
        last_rejected = false;
    }
    stats.rhs_evals = stepper.evals;
    Ok(OdeOutcome { t, y, stats })
}

// Reports every requested time in (t, t_new] of the step just taken.
#[allow(clippy::too_many_arguments)]
fn emit_dense<T, F, O>(
    stepper: &mut Stepper<'_, T, F>,
    t: T,
    y: &[T],
    f: &[T],
    t_new: T,
    y_new: &[T],
    dir: T,
    t_eval: &[T],
    next: &mut usize,
    observer: &mut O,
) -> Result<()>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]) -> Result<()>,
    O: FnMut(T, &[T]),
{
    while *next < t_eval.len() && (t_eval[*next] - t_new) * dir <= T::zero() {
        let te = t_eval[*next];
        if te == t_new {
            observer(te, y_new);
        } else {
            let r = stepper.step(t, y, f, te - t)?;
            observer(te, &r.y);
        }
        *next += 1;
    }
    Ok(())
}

/// Bisects the fraction of the step `h` at which `event` changes sign.
/// Returns the smallest bracketing fraction on the far side of the crossing.
#[allow(clippy::too_many_arguments)]
fn locate_crossing<T, F>(
    stepper: &mut Stepper<'_, T, F>,
    event: &Event<'_, T>,
    t: T,
    y: &[T],
    f: &[T],
    h: T,
    g0: T,
    tol: T,
) -> Result<T>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]) -> Result<()>,
{
    let mut lo = T::zero();
    let mut hi = T::one();
    let half = T::lit(0.5);
    let same_side = |g: T| (g0 > T::zero() && g > T::zero()) || (g0 < T::zero() && g < T::zero());
    while (hi - lo) * h.abs() > tol {
        let mid = (lo + hi) * half;
        let r = stepper.step(t, y, f, h * mid)?;
        let g = (event.g)(t + h * mid, &r.y);
        if same_side(g) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= T::epsilon() {
            break;
        }
    }
    Ok(hi)
}

fn initial_step<T, F>(
    stepper: &mut Stepper<'_, T, F>,
    t: T,
    y: &[T],
    f: &[T],
    dir: T,
    opts: &OdeOptions<T>,
) -> Result<T>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]) -> Result<()>,
{
    // Hairer, Norsett & Wanner, "Solving ODEs I", II.4
    let n = T::from_usize(y.len().max(1)).unwrap();
    let sc: Vec<T> = y.iter().map(|v| opts.abs_tol + opts.rel_tol * v.abs()).collect();
    let norm = |v: &[T]| -> T {
        (v.iter().zip(sc.iter()).map(|(a, s)| (*a / *s) * (*a / *s)).sum::<T>() / n).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f);
    let small = T::lit(1e-5);
    let h0 = if d0 < small || d1 < small {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    };
    let y1: Vec<T> = y.iter().zip(f.iter()).map(|(a, b)| *a + dir * h0 * *b).collect();
    let mut f1 = vec![T::zero(); y.len()];
    stepper.eval(t + dir * h0, &y1, &mut f1)?;
    let diff: Vec<T> = f1.iter().zip(f.iter()).map(|(a, b)| *a - *b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= T::lit(1e-15) {
        (h0 * T::lit(1e-3)).max(T::lit(1e-6))
    } else {
        (T::lit(0.01) / d1.max(d2)).powf(T::lit(0.2))
    };
    Ok((T::lit(100.0) * h0).min(h1))
}

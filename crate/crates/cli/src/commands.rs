//! The four subcommands. Each returns its summary and the outcome that sets
//! the exit code.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use sfdyn::analytic::{
    ClosedFormOrbit, ConformalOrbit, GaussianConformalUnits, PlaneWaveOrbit, SpacelikeOrbit, TimelikeOrbit,
};
use sfdyn::backgrounds::{ConstantProfile, Family};
use sfdyn::dynamics::export::{fmt_f64, save_csv, save_json};
use sfdyn::dynamics::{evolve, evolve_nonrel, DriftReport, Sample, Trajectory};
use sfdyn::integrability::{classify, independence_rank, involution_table, INVOLUTION_TOL, RANK_TAU};
use sfdyn::kgverify::{
    eigen_convergence, free_mode, make_conformal_solution, make_dilation_solution, make_planewave_solution,
    residual_convergence, ConvergenceTable, Wavefunction,
};
use sfdyn::ode::OdeStats;
use sfdyn::sampling::{uniform_points, uniform_vectors};
use sfdyn::{ConformalGenerator, ConservedQuantity, Form, FourVector, PhaseSpaceState, ScalarBackground};

use crate::failure::Failure;
use crate::settings::Settings;
use crate::setup::{self, FormSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, Failure> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Failure::Config(format!("unknown output format {s:?}"))),
        }
    }

    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

pub struct Output {
    pub dir: PathBuf,
    pub format: Format,
}

impl Output {
    pub fn from_settings(s: &Settings) -> Result<Self, Failure> {
        let dir = PathBuf::from(s.str_or("output.dir", "out"));
        fs::create_dir_all(&dir).map_err(|e| Failure::io(e, &format!("cannot create {}", dir.display())))?;
        Ok(Self {
            dir,
            format: Format::parse(s.str_or("output.format", "csv"))?,
        })
    }

    fn path(&self, stem: &str) -> PathBuf {
        self.dir.join(format!("{stem}.{}", self.format.ext()))
    }

    fn write_trajectory(&self, traj: &Trajectory, stem: &str) -> Result<PathBuf, Failure> {
        let path = self.path(stem);
        match self.format {
            Format::Csv => save_csv(traj, &path),
            Format::Json => save_json(traj, &path),
        }
        .map_err(Failure::runtime)?;
        Ok(path)
    }

    fn write_table(&self, t: &ConvergenceTable, stem: &str) -> Result<PathBuf, Failure> {
        let path = self.path(stem);
        match self.format {
            Format::Csv => {
                let f = fs::File::create(&path).map_err(|e| Failure::io(e, "cannot write table"))?;
                t.write_csv(std::io::BufWriter::new(f)).map_err(Failure::runtime)?;
            }
            Format::Json => write_json(&path, &serde_json::to_value(t).expect("tables serialize"))?,
        }
        Ok(path)
    }

    /// Two-column numeric table.
    fn write_columns(&self, stem: &str, names: [&str; 2], rows: &[(f64, f64)]) -> Result<PathBuf, Failure> {
        let path = self.path(stem);
        match self.format {
            Format::Csv => {
                let mut text = format!("{},{}\n", names[0], names[1]);
                for (a, b) in rows {
                    text.push_str(&format!("{},{}\n", fmt_f64(*a), fmt_f64(*b)));
                }
                fs::write(&path, text).map_err(|e| Failure::io(e, "cannot write table"))?;
            }
            Format::Json => {
                let v: Vec<Value> = rows.iter().map(|(a, b)| json!({names[0]: a, names[1]: b})).collect();
                write_json(&path, &json!(v))?;
            }
        }
        Ok(path)
    }
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(v).expect("json values serialize");
    text.push('\n');
    fs::write(path, text).map_err(|e| Failure::io(e, &format!("cannot write {}", path.display())))
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn drift_json(d: &DriftReport) -> Value {
    json!({
        "tolerance": d.tolerance,
        "entries": d.entries,
        "max_drift": d.max_drift(),
        "all_within": d.all_within(),
    })
}

/// The closed form that describes an orbit of `bg` through `st`, if the
/// family has one.
pub fn closed_form(bg: &ScalarBackground, st: &PhaseSpaceState) -> Result<Option<Box<dyn ClosedFormOrbit>>, Failure> {
    let orbit: Box<dyn ClosedFormOrbit> = match bg.family() {
        Family::LinearZ { m0sq, b, switched } => {
            let s = st.convert(Form::Instant, bg).map_err(Failure::setup)?;
            Box::new(SpacelikeOrbit::new(*b, *m0sq, &s, *switched).map_err(Failure::setup)?)
        }
        Family::Constant { m0sq } => {
            let s = st.convert(Form::Instant, bg).map_err(Failure::setup)?;
            if s.time != 0.0 {
                return Ok(None);
            }
            Box::new(TimelikeOrbit::new(*m0sq, Arc::new(ConstantProfile(0.0)), &s).map_err(Failure::setup)?)
        }
        Family::Timelike { m0sq, e, switched: false } => {
            let s = st.convert(Form::Instant, bg).map_err(Failure::setup)?;
            if s.time != 0.0 {
                return Ok(None);
            }
            Box::new(TimelikeOrbit::new(*m0sq, e.clone(), &s).map_err(Failure::setup)?)
        }
        Family::PlaneWave { .. } => Box::new(PlaneWaveOrbit::new(st, bg).map_err(Failure::setup)?),
        Family::SpecialConformal { .. } => Box::new(ConformalOrbit::new(st, bg).map_err(Failure::setup)?),
        _ => return Ok(None),
    };
    Ok(Some(orbit))
}

fn orbit_time(form: Form, x: &FourVector) -> f64 {
    match form {
        Form::Instant => x.t(),
        _ => x.t() + x.z(),
    }
}

/// Largest Cartesian position gap between samples and the closed form,
/// over samples inside the closed form's window.
fn closed_form_gap(orbit: &dyn ClosedFormOrbit, traj: &Trajectory) -> Result<Option<f64>, Failure> {
    let (lo, hi) = orbit.window();
    let mut gap: Option<f64> = None;
    for s in traj.states() {
        let x = s.position();
        let t = orbit_time(orbit.form(), &x);
        if t < lo || t > hi {
            continue;
        }
        let y = orbit.state_at(t).map_err(Failure::runtime)?.position();
        let d = (x - y).max_abs();
        gap = Some(gap.map_or(d, |g: f64| g.max(d)));
    }
    Ok(gap)
}

fn fig2_report(s: &Settings, traj: &Trajectory) -> Result<Value, Failure> {
    let units = setup::gaussian_units(s)?;
    let kappa = s.f64("initial.kappa")?;
    let mut worst: f64 = 0.0;
    let mut last = (f64::NAN, f64::NAN);
    for x in traj.positions() {
        let lf = x.to_lightfront();
        if lf.xplus < units.l {
            continue;
        }
        let (xp, xm) = units.to_dimensionless(lf.xplus, lf.xminus);
        worst = worst.max(GaussianConformalUnits::relation_residual(kappa, xp, xm).abs());
        last = (xp, xm);
    }
    Ok(json!({
        "kappa": kappa,
        "p_minus": units.pminus_for_kappa(kappa),
        "max_relation_residual": worst,
        "final_xplus": last.0,
        "final_xminus": last.1,
        "asymptote": GaussianConformalUnits::asymptote(kappa),
    }))
}

fn simulate_one(index: usize, sweep: Option<&str>, s: &Settings, out: &Output) -> Result<(Value, bool), Failure> {
    let bg = setup::background(s)?;
    let spec = setup::parse_form(s.str_or("dynamics.form", "instant"))?;
    let st = setup::initial_state(s, &bg, spec.form)?;
    let qs = setup::quantities(s, &bg, spec)?;
    let t_end = s.f64("dynamics.t_end")?;
    if !(t_end > st.time) {
        return Err(Failure::Config(format!("dynamics.t_end = {t_end} must exceed the initial time {}", st.time)));
    }
    let opts = setup::evolve_options(s, spec, st.time, t_end)?;
    let closed = if spec.nonrel || spec.form == Form::Covariant {
        None
    } else {
        closed_form(&bg, &st).ok().flatten()
    };
    let traj = if spec.nonrel {
        evolve_nonrel(&st, &bg, t_end, &opts, &qs)
    } else {
        evolve(&st, &bg, t_end, &opts, &qs)
    }
    .map_err(Failure::runtime)?;
    let path = out.write_trajectory(&traj, &format!("traj_{index:03}"))?;
    let ok = traj.drift.all_within();
    let mut v = json!({
        "index": index,
        "sweep_value": sweep,
        "file": file_name(&path),
        "form": if spec.nonrel { "nonrel" } else { spec.form.name() },
        "background": traj.background,
        "samples": traj.samples.len(),
        "initial_time": st.time,
        "final_time": traj.last().time,
        "steps": traj.stats.steps,
        "events": traj.stats.events,
        "terminated_by": traj.stats.terminated_by,
        "drift": drift_json(&traj.drift),
        "within_tolerance": ok,
    });
    if let Some(orbit) = closed {
        v["closed_form"] = json!({
            "family": orbit.family(),
            "max_position_gap": closed_form_gap(orbit.as_ref(), &traj)?,
        });
    }
    if s.has("initial.kappa") {
        v["fig2"] = fig2_report(s, &traj)?;
    }
    Ok((v, ok))
}

/// Runs every sweep entry in parallel; one trajectory file per entry and
/// `summary.json`. Fails with a check failure if any drift exceeds the
/// tolerance.
pub fn simulate(s: &Settings) -> Result<Value, Failure> {
    let runs = s.expand_sweep()?;
    let out = Output::from_settings(s)?;
    let results: Vec<Result<(Value, bool), Failure>> = runs
        .par_iter()
        .enumerate()
        .map(|(i, (label, rs))| simulate_one(i, label.as_deref(), rs, &out))
        .collect();
    let mut entries = Vec::new();
    let mut first_err = None;
    let mut all_ok = true;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((v, ok)) => {
                all_ok &= ok;
                entries.push(v);
            }
            Err(e) => {
                entries.push(json!({"index": i, "error": e.to_string(), "exit_code": e.code()}));
                first_err.get_or_insert(e);
            }
        }
    }
    let summary = json!({
        "command": "simulate",
        "runs": entries,
        "all_within_tolerance": all_ok && first_err.is_none(),
    });
    write_json(&out.dir.join("summary.json"), &summary)?;
    if let Some(e) = first_err {
        return Err(e);
    }
    if !all_ok {
        return Err(Failure::Check("drift above tolerance".into()));
    }
    Ok(summary)
}

fn certify_states(
    s: &Settings,
    bg: &ScalarBackground,
    form: Form,
    qs: &[ConservedQuantity],
    n: usize,
    seed: u64,
) -> Result<Vec<PhaseSpaceState>, Failure> {
    let timed = form != Form::Instant;
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    if timed {
        lo.push(s.f64("certify.time_lo")?);
        hi.push(s.f64("certify.time_hi")?);
    }
    lo.extend(s.vec("certify.q_lo", 3)?);
    hi.extend(s.vec("certify.q_hi", 3)?);
    lo.extend(s.vec("certify.p_lo", 3)?);
    hi.extend(s.vec("certify.p_hi", 3)?);
    let build = |v: &[f64]| -> Option<PhaseSpaceState> {
        let raw = if timed {
            PhaseSpaceState::front(v[0], [v[1], v[2], v[3]], [v[4], v[5], v[6]])
        } else {
            PhaseSpaceState::instant(0.0, [v[0], v[1], v[2]], [v[3], v[4], v[5]])
        };
        raw.validate(bg).ok()?;
        let st = raw.convert(form, bg).ok()?;
        st.validate(bg).ok()?;
        qs.iter().all(|q| q.eval(&st).is_ok_and(f64::is_finite)).then_some(st)
    };
    let vs = uniform_vectors(seed, n, &lo, &hi, |v| build(v).is_some()).map_err(Failure::runtime)?;
    Ok(vs.iter().filter_map(|v| build(v)).collect())
}

/// Rank and involution report with the classification label, written to
/// `certificate.json`.
pub fn certify(s: &Settings) -> Result<Value, Failure> {
    let bg = setup::background(s)?;
    let form_name = s.str("certify.form").unwrap_or(s.str_or("dynamics.form", "instant"));
    let spec = setup::parse_form(form_name)?;
    if spec.form == Form::Covariant || spec.nonrel {
        return Err(Failure::Config("certification needs a canonical form".into()));
    }
    let spec = FormSpec { nonrel: false, ..spec };
    let qs = setup::quantities(s, &bg, spec)?;
    if qs.is_empty() {
        return Err(Failure::Config("quantities.list is empty".into()));
    }
    let n = s.usize_or("certify.samples", 24)?;
    let seed = s.u64_or("run.seed", 1)?;
    let tau = s.f64_or("certify.tau", RANK_TAU)?;
    let tol = s.f64_or("certify.bracket_tol", INVOLUTION_TOL)?;
    let out = Output::from_settings(s)?;
    let states = certify_states(s, &bg, spec.form, &qs, n, seed)?;
    let report = independence_rank(&qs, &states, tau).map_err(Failure::runtime)?;
    let table = involution_table(&qs, &states, tol).map_err(Failure::runtime)?;
    let cert = classify(spec.form.dof(), &report, &table);
    let v = json!({
        "command": "certify",
        "form": spec.form.name(),
        "dof": spec.form.dof(),
        "seed": seed,
        "samples": states.len(),
        "labels": report.labels,
        "tau": tau,
        "rank": report.rank,
        "rank_votes": report.votes,
        "degenerate_samples": report.degenerate_samples,
        "involution": table,
        "certificate": cert,
        "label": cert.label.to_string(),
    });
    write_json(&out.dir.join("certificate.json"), &v)?;
    Ok(v)
}

/// Wavefunction, its background and the generator/eigenvalue pairs it is
/// stated to satisfy.
type KgSetup = (Wavefunction, ScalarBackground, Vec<(&'static str, ConformalGenerator, f64)>);

fn kg_setup(s: &Settings) -> Result<KgSetup, Failure> {
    let q_perp = || -> Result<[f64; 2], Failure> {
        let v = s.vec("kg.q_perp", 2)?;
        Ok([v[0], v[1]])
    };
    let solution = s.require("kg.solution")?;
    let out = match solution {
        "plane-wave" => {
            let bg = setup::background(s)?;
            let qp = q_perp()?;
            let qm = s.f64("kg.q_minus")?;
            let phi = make_planewave_solution(qp, qm, &bg).map_err(Failure::setup)?;
            let pairs = vec![
                ("dx", ConformalGenerator::translation(FourVector::basis(1)), qp[0]),
                ("dy", ConformalGenerator::translation(FourVector::basis(2)), qp[1]),
                ("dminus", ConformalGenerator::translation_minus(), qm),
            ];
            (phi, bg, pairs)
        }
        "conformal" => {
            let bg = setup::background(s)?;
            let f = match bg.family() {
                Family::SpecialConformal { f, switch: None } => f.clone(),
                _ => return Err(Failure::Config("kg.solution = conformal needs an unswitched special-conformal background".into())),
            };
            let qp = q_perp()?;
            let q3 = s.f64("kg.q3")?;
            let phi = make_conformal_solution(qp, q3, f).map_err(Failure::setup)?;
            let pairs = vec![
                ("C", ConformalGenerator::special_conformal_null(), q3),
                ("T1", ConformalGenerator::null_rotation_t(1), qp[0]),
                ("T2", ConformalGenerator::null_rotation_t(2), qp[1]),
            ];
            (phi, bg, pairs)
        }
        "dilation" => {
            let bg = setup::background(s)?;
            let c2 = match bg.family() {
                Family::Dilation { c2 } => *c2,
                _ => return Err(Failure::Config("kg.solution = dilation needs a dilation background".into())),
            };
            let qp = q_perp()?;
            let q3 = s.f64("kg.q3")?;
            let c = s.vec_or("kg.coeffs", &[1.0, 0.0, 0.0, 0.0])?;
            let coeffs = [Complex64::new(c[0], c[1]), Complex64::new(c[2], c[3])];
            let phi = make_dilation_solution(qp, q3, c2, coeffs).map_err(Failure::setup)?;
            let pairs = vec![
                ("T1", ConformalGenerator::null_rotation_t(1), qp[0]),
                ("T2", ConformalGenerator::null_rotation_t(2), qp[1]),
                ("D", ConformalGenerator::dilation(1.0), q3),
            ];
            (phi, bg, pairs)
        }
        "free" => {
            let bg = setup::background(s)?;
            (free_mode(setup::four_vector(s, "kg.p")?), bg, Vec::new())
        }
        "off-shell" => {
            let m0sq = s.f64_or("background.m0sq", 1.0)?;
            let bg = ScalarBackground::constant(m0sq).map_err(Failure::setup)?;
            let factor = s.f64_or("kg.offshell_factor", 2.0)?;
            if !(factor > 0.0) || factor == 1.0 {
                return Err(Failure::Config("kg.offshell_factor must be positive and not 1".into()));
            }
            let p = FourVector::new((factor * m0sq).sqrt(), 0.0, 0.0, 0.0);
            (free_mode(p), bg, Vec::new())
        }
        other => return Err(Failure::Config(format!("unknown kg.solution {other:?}"))),
    };
    Ok(out)
}

fn ratio_range(t: &ConvergenceTable) -> (f64, f64) {
    let r = t.ratios();
    (
        r.iter().copied().fold(f64::INFINITY, f64::min),
        r.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

/// Residual and eigen-defect convergence tables; fails unless every
/// h-halving ratio lies in the accepted band.
pub fn kg(s: &Settings) -> Result<Value, Failure> {
    let (phi, bg, pairs) = kg_setup(s)?;
    let seed = s.u64_or("run.seed", 1)?;
    let n = s.usize_or("kg.points", 50)?;
    let lo = s.vec_or("kg.lo", &[-1.0; 4])?;
    let hi = s.vec_or("kg.hi", &[1.0; 4])?;
    let min_xplus = s.opt_f64("kg.min_xplus")?;
    let min_interval = s.opt_f64("kg.min_interval")?;
    let h0 = s.f64_or("kg.h0", 1e-2)?;
    let levels = s.usize_or("kg.levels", 2)?;
    if !(h0 > 0.0) || levels < 2 {
        return Err(Failure::Config("kg.h0 must be positive and kg.levels at least 2".into()));
    }
    let out = Output::from_settings(s)?;
    let accept = |x: &FourVector| {
        let lf = x.to_lightfront();
        phi.in_domain(x)
            && bg.in_domain(x)
            && min_xplus.map_or(true, |m| lf.xplus > m)
            && min_interval.map_or(true, |m| x.square() > m)
    };
    let points = uniform_points(seed, n, [lo[0], lo[1], lo[2], lo[3]], [hi[0], hi[1], hi[2], hi[3]], accept)
        .map_err(Failure::runtime)?;
    let eigen_points = s.usize_or("kg.eigen_points", 10)?.min(points.len());
    let pairs = if s.bool_or("kg.eigen", true)? { pairs } else { Vec::new() };

    let mut jobs: Vec<(String, Option<(ConformalGenerator, f64)>)> = vec![("kg_residual".into(), None)];
    jobs.extend(pairs.iter().map(|(tag, g, q)| (format!("kg_eigen_{tag}"), Some((g.clone(), *q)))));
    let tables: Vec<Result<Value, Failure>> = jobs
        .par_iter()
        .map(|(stem, job)| {
            let t = match job {
                None => residual_convergence(&phi, &bg, &points, h0, levels).map_err(Failure::runtime)?,
                Some((g, q)) => eigen_convergence(g, &phi, Complex64::new(*q, 0.0), &points[..eigen_points], h0, levels)
                    .map_err(Failure::runtime)?,
            };
            let path = out.write_table(&t, stem)?;
            let (rmin, rmax) = ratio_range(&t);
            Ok(json!({
                "label": stem,
                "eigenvalue": job.as_ref().map(|j| j.1),
                "file": file_name(&path),
                "ratio_min": rmin,
                "ratio_max": rmax,
                "max_residual": t.max_residual(),
                "pass": t.passes(),
            }))
        })
        .collect();
    let tables = tables.into_iter().collect::<Result<Vec<_>, _>>()?;
    let pass = tables.iter().all(|t| t["pass"] == json!(true));
    let v = json!({
        "command": "kg",
        "solution": s.require("kg.solution")?,
        "wavefunction": phi.name,
        "seed": seed,
        "points": points.len(),
        "h0": h0,
        "levels": levels,
        "ratio_band": sfdyn::kgverify::RATIO_BAND,
        "tables": tables,
        "pass": pass,
    });
    write_json(&out.dir.join("kg_summary.json"), &v)?;
    if !pass {
        return Err(Failure::Check("h-halving ratios outside the accepted band".into()));
    }
    Ok(v)
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn fig2_curves(s: &Settings, out: &Output) -> Result<Value, Failure> {
    let kappas = s.list("orbit.kappa")?;
    let xmax = s.f64_or("orbit.xminus_max", 4.0)?;
    let n = s.usize_or("orbit.samples", 401)?;
    let mut curves = Vec::new();
    for (i, &kappa) in kappas.iter().enumerate() {
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(Failure::Config(format!("kappa must lie in (0, 1), got {kappa}")));
        }
        let rows: Vec<(f64, f64)> = grid(0.0, xmax, n)
            .into_iter()
            .map(|xm| (xm, GaussianConformalUnits::xplus_on_curve(kappa, xm)))
            .collect();
        let path = out.write_columns(&format!("fig2_curve_{i:03}"), ["X-", "X+"], &rows)?;
        curves.push(json!({
            "kappa": kappa,
            "file": file_name(&path),
            "asymptote": GaussianConformalUnits::asymptote(kappa),
        }));
    }
    Ok(json!({"command": "orbit", "family": "fig2", "curves": curves}))
}

fn orbit_one(index: usize, sweep: Option<&str>, s: &Settings, out: &Output) -> Result<Value, Failure> {
    let family = s.require("orbit.family")?;
    let bg = setup::background(s)?;
    let raw = setup::raw_initial(s)?;
    raw.validate(&bg).map_err(Failure::setup)?;
    let orbit = closed_form(&bg, &raw)?
        .ok_or_else(|| Failure::Config("no closed form for this background and initial state".into()))?;
    let expected = match family {
        "spacelike" => "spacelike",
        "timelike" => "timelike",
        "plane-wave" => "plane-wave",
        "conformal" => "special-conformal",
        other => return Err(Failure::Config(format!("unknown orbit.family {other:?}"))),
    };
    if orbit.family() != expected {
        return Err(Failure::Config(format!(
            "orbit.family = {family} does not match the background (closed form {})",
            orbit.family()
        )));
    }
    let (wlo, whi) = orbit.window();
    let from = s.f64_or("orbit.from", wlo)?;
    let to = match s.opt_f64("orbit.to")? {
        Some(t) => t,
        None if whi.is_finite() => whi,
        None => return Err(Failure::Config("orbit.to is required for an unbounded window".into())),
    };
    if !(from.is_finite() && from >= wlo && to <= whi && to > from) {
        return Err(Failure::Config(format!("orbit interval [{from}, {to}] must lie in the window [{wlo}, {whi}]")));
    }
    // states are written in the dynamical form when one is configured
    let form = match s.str("dynamics.form") {
        Some(name) => {
            let spec = setup::parse_form(name)?;
            if spec.form == Form::Covariant {
                return Err(Failure::Config("closed-form orbits are canonical; use another dynamics.form".into()));
            }
            spec.form
        }
        None => orbit.form(),
    };
    let spec = FormSpec { form, nonrel: false };
    let qs: Vec<ConservedQuantity> = if s.has("quantities.list") {
        setup::quantities(s, &bg, spec)?
    } else {
        Vec::new()
    };
    let mut samples = Vec::new();
    for t in grid(from, to, s.usize_or("orbit.samples", 101)?) {
        let state = orbit
            .state_at(t)
            .and_then(|st| st.convert(form, &bg))
            .map_err(Failure::runtime)?;
        let values = qs
            .iter()
            .map(|q| q.eval(&state))
            .collect::<Result<Vec<_>, _>>()
            .map_err(Failure::runtime)?;
        samples.push(Sample { state, values });
    }
    let labels: Vec<String> = qs.iter().map(|q| q.label.clone()).collect();
    let rows: Vec<Vec<f64>> = samples.iter().map(|x| x.values.clone()).collect();
    let traj = Trajectory {
        form,
        background: bg.label().to_string(),
        drift: DriftReport::from_values(&labels, &rows, s.f64_or("tolerance.drift", 1e-8)?),
        labels,
        samples,
        stats: OdeStats::default(),
    };
    let path = out.write_trajectory(&traj, &format!("orbit_{index:03}"))?;
    Ok(json!({
        "index": index,
        "sweep_value": sweep,
        "family": orbit.family(),
        "form": form.name(),
        "file": file_name(&path),
        "window": [wlo, whi],
        "from": from,
        "to": to,
        "samples": traj.samples.len(),
        "drift": drift_json(&traj.drift),
    }))
}

/// Samples closed-form orbits, one file per sweep entry; `orbit.family =
/// fig2` writes the Fig. 2 curves instead.
pub fn orbit(s: &Settings) -> Result<Value, Failure> {
    let out = Output::from_settings(s)?;
    let v = if s.require("orbit.family")? == "fig2" {
        fig2_curves(s, &out)?
    } else {
        let runs = s.expand_sweep()?;
        let orbits = runs
            .par_iter()
            .enumerate()
            .map(|(i, (label, rs))| orbit_one(i, label.as_deref(), rs, &out))
            .collect::<Vec<_>>()
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        json!({"command": "orbit", "orbits": orbits})
    };
    write_json(&out.dir.join("orbit_summary.json"), &v)?;
    Ok(v)
}

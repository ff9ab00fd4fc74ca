//! Flat `section.key = value` settings: presets, INI files and `--set`
//! overrides, with typed getters.

use std::collections::BTreeMap;
use std::path::Path;

use ini::Ini;

use crate::failure::Failure;

/// Every accepted key. `profile.*` configures the one-variable profile of
/// plane-wave, time-dependent and special-conformal backgrounds.
pub const KNOWN_KEYS: &[&str] = &[
    "background.family",
    "background.m0sq",
    "background.b",
    "background.switched",
    "background.c2",
    "background.l",
    "background.k",
    "background.argument",
    "background.profile",
    "profile.amplitude",
    "profile.k",
    "profile.center",
    "profile.scale",
    "profile.slope",
    "profile.offset",
    "profile.value",
    "dynamics.form",
    "dynamics.t_end",
    "dynamics.samples",
    "dynamics.switch_events",
    "dynamics.stop_axis",
    "dynamics.stop_value",
    "dynamics.stop_q",
    "dynamics.stop_q_value",
    "dynamics.max_steps",
    "tolerance.abs",
    "tolerance.rel",
    "tolerance.drift",
    "initial.form",
    "initial.time",
    "initial.q",
    "initial.p",
    "initial.kappa",
    "initial.start",
    "quantities.list",
    "sweep.key",
    "sweep.values",
    "certify.form",
    "certify.samples",
    "certify.tau",
    "certify.bracket_tol",
    "certify.time_lo",
    "certify.time_hi",
    "certify.q_lo",
    "certify.q_hi",
    "certify.p_lo",
    "certify.p_hi",
    "kg.solution",
    "kg.q_perp",
    "kg.q_minus",
    "kg.q3",
    "kg.coeffs",
    "kg.p",
    "kg.offshell_factor",
    "kg.points",
    "kg.lo",
    "kg.hi",
    "kg.min_xplus",
    "kg.min_interval",
    "kg.h0",
    "kg.levels",
    "kg.eigen",
    "kg.eigen_points",
    "orbit.family",
    "orbit.from",
    "orbit.to",
    "orbit.samples",
    "orbit.kappa",
    "orbit.xminus_max",
    "output.dir",
    "output.format",
    "run.seed",
];

pub const PRESET_NAMES: &[&str] = &["fig1", "fig2", "planewave", "dilation", "free", "spacelike", "conformal"];

pub fn preset(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig1" => FIG1,
        "fig2" => FIG2,
        "planewave" => PLANEWAVE,
        "dilation" => DILATION,
        "free" => FREE,
        "spacelike" => SPACELIKE,
        "conformal" => CONFORMAL,
        _ => return None,
    })
}

const FIG1: &str = "
[background]
family = linear-z
m0sq = 1
b = 1
switched = true

[dynamics]
form = instant
t_end = 8
samples = 801
stop_axis = 3
stop_value = 0

[tolerance]
abs = 1e-13
rel = 1e-13

[initial]
q = 0, 0, 0
p = 0, 0, -0.25

[quantities]
list = spacelike

[sweep]
key = initial.p
values = 0,0,-0.25 | 0,0,-0.3333333333333333 | 0,0,-0.4 | 0,0,-0.5 | 0,0,-0.6

[orbit]
family = spacelike
samples = 201
";

const FIG2: &str = "
[background]
family = conformal-gaussian
m0sq = 1
l = 1
k = 1

[dynamics]
form = extended-front
t_end = 60
samples = 0
stop_q = 1
stop_q_value = 4

[tolerance]
abs = 1e-16
rel = 1e-12

[initial]
kappa = 0.3
start = 1

[quantities]
list = conformal

[sweep]
key = initial.kappa
values = 0.3 | 0.5 | 0.7 | 0.9

[orbit]
family = fig2
kappa = 0.3, 0.5, 0.7, 0.9
xminus_max = 4
samples = 401
";

const PLANEWAVE: &str = "
[background]
family = plane-wave
profile = sin2
argument = plus

[profile]
scale = 1

[dynamics]
form = extended-front
t_end = 6
samples = 301

[initial]
form = front
time = 0
q = 0, 0, 0
p = 0.6, 0.4, -0.3

[quantities]
list = planewave

[certify]
form = extended-front
time_lo = -1
time_hi = 1
q_lo = -1, -1, -1
q_hi = 1, 1, 1
p_lo = 0.3, -0.5, -0.5
p_hi = 1, 0.5, 0.5

[kg]
solution = plane-wave
q_perp = 0.4, -0.3
q_minus = 0.6
points = 50
lo = -1, -1, -1, -1
hi = 1, 1, 1, 1

[orbit]
family = plane-wave
from = 0
to = 6
samples = 301
";

const DILATION: &str = "
[background]
family = dilation
c2 = 2

[dynamics]
form = instant
t_end = 4
samples = 201

[initial]
time = 2
q = 0.3, 0, 0.2
p = 0.1, 0, -0.2

[quantities]
list = D, Lx, Ly, Lz, Kx, Ky, Kz

[kg]
solution = dilation
q_perp = 0.5, 0.3
q3 = 0.7
coeffs = 1, 0, 0, 0.5
points = 50
lo = 1, -0.5, -0.5, -0.5
hi = 2.5, 0.5, 0.5, 0.5
min_xplus = 0.5
min_interval = 0.3
";

const FREE: &str = "
[background]
family = constant
m0sq = 1

[dynamics]
form = instant
t_end = 5
samples = 51

[initial]
q = 0, 0, 0
p = 0.3, -0.2, 0.1

[quantities]
list = poincare

[kg]
solution = free
p = 1.224744871391589, 0.3, -0.4, 0.5
points = 20
lo = -1, -1, -1, -1
hi = 1, 1, 1, 1

[orbit]
family = timelike
from = 0
to = 5
samples = 51
";

const SPACELIKE: &str = "
[background]
family = linear-z
m0sq = 1
b = 1
switched = false

[dynamics]
form = instant
t_end = 1
samples = 101

[initial]
q = 0.1, 0, 0.2
p = 0.2, -0.1, 0.05

[quantities]
list = spacelike

[certify]
samples = 24
q_lo = -0.4, -0.4, -0.4
q_hi = 0.4, 0.4, 0.4
p_lo = -0.5, -0.5, -0.5
p_hi = 0.5, 0.5, 0.5

[orbit]
family = spacelike
from = 0
to = 1
samples = 101
";

const CONFORMAL: &str = "
[background]
family = special-conformal
profile = gaussian

[profile]
amplitude = 1
k = 1
center = 0

[dynamics]
form = extended-front
t_end = 3
samples = 201

[initial]
form = front
time = 1
q = 0.1, 0.2, -0.1
p = 0.6, 0.1, -0.2

[quantities]
list = conformal

[certify]
samples = 24
time_lo = 0.5
time_hi = 1.5
q_lo = -0.5, -0.5, -0.5
q_hi = 0.5, 0.5, 0.5
p_lo = 0.3, -0.5, -0.5
p_hi = 1, 0.5, 0.5

[kg]
solution = conformal
q_perp = 0.3, -0.2
q3 = 0.7
points = 50
lo = 0.3, -1, -1, -0.3
hi = 1.5, 1, 1, 0.8
min_xplus = 0.5

[orbit]
family = conformal
from = 1
to = 3
samples = 201
";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    map: BTreeMap<String, String>,
}

fn bad(key: &str, value: &str, what: &str) -> Failure {
    Failure::Config(format!("{key} = {value:?}: {what}"))
}

impl Settings {
    pub fn from_ini_str(text: &str) -> Result<Self, Failure> {
        let ini = Ini::load_from_str(text).map_err(|e| Failure::Config(format!("config: {e}")))?;
        let mut s = Self::default();
        for (section, props) in ini.iter() {
            for (k, v) in props.iter() {
                let key = match section {
                    Some(sec) => format!("{sec}.{k}"),
                    None => k.to_string(),
                };
                s.set(&key, v)?;
            }
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_ini_str(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), Failure> {
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            return Err(Failure::Config(format!("unknown key {key:?}")));
        }
        self.map.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    /// Parses `section.key=value`.
    pub fn set_assignment(&mut self, kv: &str) -> Result<(), Failure> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--set expects key=value, got {kv:?}")))?;
        self.set(k, v)
    }

    pub fn merge(&mut self, other: &Settings) {
        for (k, v) in &other.map {
            self.map.insert(k.clone(), v.clone());
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.str(key).unwrap_or(default)
    }

    pub fn require(&self, key: &str) -> Result<&str, Failure> {
        self.str(key).ok_or_else(|| Failure::Config(format!("missing key {key}")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, Failure> {
        let v = self.require(key)?;
        let x: f64 = v.parse().map_err(|_| bad(key, v, "not a number"))?;
        if !x.is_finite() {
            return Err(bad(key, v, "not finite"));
        }
        Ok(x)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, Failure> {
        if self.has(key) {
            self.f64(key)
        } else {
            Ok(default)
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, Failure> {
        if self.has(key) {
            self.f64(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, Failure> {
        match self.str(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| bad(key, v, "not a non-negative integer")),
        }
    }

    pub fn opt_usize(&self, key: &str) -> Result<Option<usize>, Failure> {
        if self.has(key) {
            self.usize_or(key, 0).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, Failure> {
        match self.str(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| bad(key, v, "not a non-negative integer")),
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, Failure> {
        match self.str(key) {
            None => Ok(default),
            Some("true" | "yes" | "1" | "on") => Ok(true),
            Some("false" | "no" | "0" | "off") => Ok(false),
            Some(v) => Err(bad(key, v, "not a boolean")),
        }
    }

    /// Comma-separated numbers of length `n`.
    pub fn vec(&self, key: &str, n: usize) -> Result<Vec<f64>, Failure> {
        let v = self.require(key)?;
        let out = v
            .split(',')
            .map(|t| t.trim().parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad(key, v, "not a list of numbers"))?;
        if out.len() != n {
            return Err(bad(key, v, &format!("expected {n} values")));
        }
        Ok(out)
    }

    pub fn vec_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, Failure> {
        if self.has(key) {
            self.vec(key, default.len())
        } else {
            Ok(default.to_vec())
        }
    }

    /// Comma-separated numbers of any length.
    pub fn list(&self, key: &str) -> Result<Vec<f64>, Failure> {
        let v = self.require(key)?;
        let n = v.split(',').count();
        self.vec(key, n)
    }

    /// Copies with the sweep value applied, one per entry of `sweep.values`.
    pub fn expand_sweep(&self) -> Result<Vec<(Option<String>, Settings)>, Failure> {
        match (self.str("sweep.key"), self.str("sweep.values")) {
            (None, None) => Ok(vec![(None, self.clone())]),
            (Some(key), Some(values)) => {
                if key.starts_with("sweep.") {
                    return Err(Failure::Config("sweep.key cannot name a sweep key".into()));
                }
                values
                    .split('|')
                    .map(|v| {
                        let mut s = self.clone();
                        s.set(key, v)?;
                        Ok((Some(v.trim().to_string()), s))
                    })
                    .collect()
            }
            _ => Err(Failure::Config("sweep.key and sweep.values go together".into())),
        }
    }
}

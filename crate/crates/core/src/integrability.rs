//! Functional independence and involution of conserved quantities.
//!
//! Independence is the numerical rank of the Jacobian of the quantities with
//! respect to all phase-space variables, taken by SVD with a relative
//! threshold and majority-voted over many sample states. The Jacobian is
//! built by central differences so that black-box quantities are treated the
//! same as closed-form ones.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::{poisson_bracket, ConservedQuantity, PhaseSpaceState};
use crate::error::{Error, Result};

/// Default relative singular-value threshold.
pub const RANK_TAU: f64 = 1e-8;
/// Default bracket tolerance for involution flags.
pub const INVOLUTION_TOL: f64 = 1e-9;
/// Relative step of the Jacobian differences.
pub const JACOBIAN_REL_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRank {
    pub state: PhaseSpaceState,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// rows: quantities, columns: `(q, p)`
    pub jacobian: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub labels: Vec<String>,
    pub tau: f64,
    pub points: Vec<PointRank>,
    /// rank -> number of samples
    pub votes: BTreeMap<usize, usize>,
    pub rank: usize,
    pub degenerate_samples: usize,
}

/// Jacobian by central differences, `h = 1e-6 max(1, |v|)` per variable.
pub fn jacobian_fd(qs: &[ConservedQuantity], s: &PhaseSpaceState) -> Result<Vec<Vec<f64>>> {
    let n = s.dim();
    let mut jac = vec![vec![0.0; 2 * n]; qs.len()];
    for col in 0..2 * n {
        let (is_q, idx) = if col < n { (true, col) } else { (false, col - n) };
        let v = if is_q { s.q[idx] } else { s.p[idx] };
        let h = JACOBIAN_REL_STEP * v.abs().max(1.0);
        let mut a = s.clone();
        let mut b = s.clone();
        if is_q {
            a.q[idx] += h;
            b.q[idx] -= h;
        } else {
            a.p[idx] += h;
            b.p[idx] -= h;
        }
        for (row, q) in qs.iter().enumerate() {
            jac[row][col] = (q.eval(&a)? - q.eval(&b)?) / (2.0 * h);
        }
    }
    Ok(jac)
}

/// Singular values (descending) and the count above `tau * sigma_max`.
pub fn numerical_rank(rows: &[Vec<f64>], tau: f64) -> (usize, Vec<f64>) {
    if rows.is_empty() || rows[0].is_empty() {
        return (0, Vec::new());
    }
    let m = DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = if smax > 0.0 { sv.iter().filter(|&&s| s > tau * smax).count() } else { 0 };
    (rank, sv)
}

fn majority(votes: &BTreeMap<usize, usize>) -> usize {
    // ties go to the smaller rank
    let mut best = (0usize, 0usize);
    for (&r, &c) in votes {
        if c > best.1 {
            best = (r, c);
        }
    }
    best.0
}

pub fn independence_rank(qs: &[ConservedQuantity], states: &[PhaseSpaceState], tau: f64) -> Result<IndependenceReport> {
    let mut points = Vec::new();
    let mut votes = BTreeMap::new();
    let mut degenerate = 0;
    for s in states {
        let jac = match jacobian_fd(qs, s) {
            Ok(j) if j.iter().flatten().all(|v| v.is_finite()) => j,
            _ => {
                degenerate += 1;
                continue;
            }
        };
        let (rank, sv) = numerical_rank(&jac, tau);
        if rank == 0 {
            degenerate += 1;
            continue;
        }
        *votes.entry(rank).or_insert(0) += 1;
        points.push(PointRank {
            state: s.clone(),
            singular_values: sv,
            rank,
            jacobian: jac,
        });
    }
    if points.is_empty() {
        return Err(Error::DegenerateSamples);
    }
    Ok(IndependenceReport {
        labels: qs.iter().map(|q| q.label.clone()).collect(),
        tau,
        rank: majority(&votes),
        votes,
        points,
        degenerate_samples: degenerate,
    })
}

impl IndependenceReport {
    /// Majority-voted rank of the sub-list `rows` at the stored samples.
    pub fn subset_rank(&self, rows: &[usize]) -> usize {
        let mut votes = BTreeMap::new();
        for p in &self.points {
            let sub: Vec<Vec<f64>> = rows.iter().map(|&r| p.jacobian[r].clone()).collect();
            *votes.entry(numerical_rank(&sub, self.tau).0).or_insert(0) += 1;
        }
        majority(&votes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvolutionTable {
    pub labels: Vec<String>,
    pub tolerance: f64,
    /// `max |{Q_i, Q_j}|` over the samples
    pub max_abs: Vec<Vec<f64>>,
    pub involutive: Vec<Vec<bool>>,
}

impl InvolutionTable {
    pub fn in_involution(&self, set: &[usize]) -> bool {
        set.iter().all(|&i| set.iter().all(|&j| self.involutive[i][j]))
    }
}

pub fn involution_table(qs: &[ConservedQuantity], states: &[PhaseSpaceState], tol: f64) -> Result<InvolutionTable> {
    let n = qs.len();
    let mut max_abs = vec![vec![0.0; n]; n];
    for s in states {
        for i in 0..n {
            for j in i + 1..n {
                let b = poisson_bracket(&qs[i], &qs[j], s)?.abs();
                if !(b <= max_abs[i][j]) {
                    max_abs[i][j] = b;
                    max_abs[j][i] = b;
                }
            }
        }
    }
    let involutive = max_abs.iter().map(|r| r.iter().map(|&v| v <= tol).collect()).collect();
    Ok(InvolutionTable {
        labels: qs.iter().map(|q| q.label.clone()).collect(),
        tolerance: tol,
        max_abs,
        involutive,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    NotCertified,
    Integrable,
    MinimallySuperintegrable,
    MaximallySuperintegrable,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::NotCertified => "not certified",
            Classification::Integrable => "integrable",
            Classification::MinimallySuperintegrable => "minimally superintegrable",
            Classification::MaximallySuperintegrable => "maximally superintegrable",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub dof: usize,
    pub rank: usize,
    /// Labels of the independent involutive subset found, if any.
    pub involutive_subset: Vec<String>,
    /// Number of independent quantities beyond `dof`.
    pub k: Option<usize>,
    pub label: Classification,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Needs `dof` independent quantities in involution; then with `dof + k`
/// independent quantities in total the system is integrable (`k = 0`),
/// maximally superintegrable (`k = dof - 1`) or minimally superintegrable
/// (`1 <= k < dof - 1`).
pub fn classify(dof: usize, report: &IndependenceReport, table: &InvolutionTable) -> Certificate {
    let n = report.labels.len();
    let subset = if dof <= n {
        combinations(n, dof)
            .into_iter()
            .find(|c| table.in_involution(c) && report.subset_rank(c) == dof)
    } else {
        None
    };
    match subset {
        None => Certificate {
            dof,
            rank: report.rank,
            involutive_subset: Vec::new(),
            k: None,
            label: Classification::NotCertified,
        },
        Some(c) => {
            let k = report.rank.saturating_sub(dof);
            let label = if k == 0 {
                Classification::Integrable
            } else if k + 1 >= dof {
                Classification::MaximallySuperintegrable
            } else {
                Classification::MinimallySuperintegrable
            };
            Certificate {
                dof,
                rank: report.rank,
                involutive_subset: c.iter().map(|&i| report.labels[i].clone()).collect(),
                k: Some(k),
                label,
            }
        }
    }
}

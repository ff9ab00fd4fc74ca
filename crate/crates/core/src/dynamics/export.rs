//! CSV and JSON trajectory export.
//!
//! CSV columns: time, coordinates, momenta, then one column per monitored
//! quantity. Floats are written with 17 significant digits. The JSON schema
//! is `{form, samples: [{t, q, p, Q: {label: value}}], drift: {label: value}}`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use super::evolve::Trajectory;
use crate::error::Result;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_header(traj: &Trajectory) -> Vec<String> {
    let mut h = vec![traj.form.time_label().to_string()];
    h.extend(traj.form.coordinate_labels().iter().map(|s| s.to_string()));
    h.extend(traj.form.momentum_labels().iter().map(|s| s.to_string()));
    h.extend(traj.labels.iter().cloned());
    h
}

pub fn write_csv<W: Write>(traj: &Trajectory, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(csv_header(traj))?;
    for s in &traj.samples {
        let mut row = vec![fmt_f64(s.state.time)];
        row.extend(s.state.q.iter().map(|v| fmt_f64(*v)));
        row.extend(s.state.p.iter().map(|v| fmt_f64(*v)));
        row.extend(s.values.iter().map(|v| fmt_f64(*v)));
        wr.write_record(&row)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn to_json(traj: &Trajectory) -> Value {
    let samples: Vec<Value> = traj
        .samples
        .iter()
        .map(|s| {
            let mut q = Map::new();
            for (l, v) in traj.labels.iter().zip(s.values.iter()) {
                q.insert(l.clone(), json!(v));
            }
            json!({"t": s.state.time, "q": s.state.q, "p": s.state.p, "Q": q})
        })
        .collect();
    let mut drift = Map::new();
    for e in &traj.drift.entries {
        drift.insert(e.label.clone(), json!(e.max_drift));
    }
    json!({
        "form": traj.form.name(),
        "samples": samples,
        "drift": drift,
    })
}

pub fn write_json<W: Write>(traj: &Trajectory, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, &to_json(traj))?;
    writeln!(w)?;
    Ok(())
}

pub fn save_csv(traj: &Trajectory, path: impl AsRef<Path>) -> Result<()> {
    write_csv(traj, BufWriter::new(File::create(path)?))
}

pub fn save_json(traj: &Trajectory, path: impl AsRef<Path>) -> Result<()> {
    write_json(traj, BufWriter::new(File::create(path)?))
}

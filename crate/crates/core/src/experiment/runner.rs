use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{write_config, ExperimentConfig, ExperimentKind, SweepCell};
use crate::analysis::{position_distribution, stats, symmetry_experiment};
use crate::error::{Error, Result};
use crate::quantumness::{qmid, qmid_with_distance, QmidReport};
use crate::walk::{Geometry, WalkSetup, WalkState};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Flag(bool),
}

impl Value {
    /// Floats carry 17 significant digits, so they round-trip exactly.
    pub fn render(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(x) => format!("{x:.16e}"),
            Value::Flag(b) => u8::from(*b).to_string(),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Value::Int(i) => i as f64,
            Value::Float(x) => x,
            Value::Flag(b) => f64::from(u8::from(b)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub digest: String,
    pub experiment: ExperimentKind,
    pub table: Table,
    pub wall_time_s: f64,
    pub version: String,
}

#[derive(Serialize)]
struct RecordMeta<'a> {
    digest: &'a str,
    experiment: &'a str,
    version: &'a str,
    wall_time_s: f64,
    cells: usize,
    rows: usize,
    columns: &'a [String],
    csv: String,
}

fn output_columns(cfg: &ExperimentConfig) -> Vec<&'static str> {
    let qmid_cols = |v: &mut Vec<&'static str>| {
        v.extend(["I_total", "I_classical", "Q", "degenerate_flag"]);
        if cfg.report_distance {
            v.push("disturbance_distance");
        }
    };
    let mut v = Vec::new();
    match cfg.experiment {
        ExperimentKind::Distribution => v.extend(["x", "p"]),
        ExperimentKind::StdDevVsR => v.extend(["t", "mean", "std_dev"]),
        ExperimentKind::SymmetryKd => v.extend(["t", "kd_alpha_on_vs_off"]),
        ExperimentKind::QmidVsR | ExperimentKind::QmidVsTime => {
            v.push("t");
            qmid_cols(&mut v);
        }
        ExperimentKind::LineVsCycle => {
            v.extend(["t", "tau", "Q_line", "Q_cycle", "degenerate_line", "degenerate_cycle"]);
            if cfg.report_distance {
                v.extend(["distance_line", "distance_cycle"]);
            }
        }
    }
    v
}

/// Rows of one cell, each tagged with its ordering key (time step or site).
type KeyedRows = Vec<(usize, Vec<Value>)>;

fn report(rho: &WalkState, with_distance: bool) -> Result<QmidReport> {
    if with_distance {
        qmid_with_distance(rho.rho())
    } else {
        qmid(rho.rho())
    }
}

fn qmid_values(r: &QmidReport, with_distance: bool) -> Vec<Value> {
    let mut v = vec![
        Value::Float(r.i_total),
        Value::Float(r.i_classical),
        Value::Float(r.q),
        Value::Flag(r.degenerate_marginals),
    ];
    if with_distance {
        v.push(Value::Float(r.disturbance_distance.unwrap_or(f64::NAN)));
    }
    v
}

fn qmid_series(setup: &WalkSetup, steps: usize, with_distance: bool) -> Result<Vec<QmidReport>> {
    let mut out = Vec::with_capacity(steps);
    setup.run(steps, |s| {
        out.push(report(s, with_distance)?);
        Ok(())
    })?;
    Ok(out)
}

fn run_cell(cfg: &ExperimentConfig) -> Result<KeyedRows> {
    let setup = cfg.walk_setup()?;
    let steps = cfg.steps;
    let dist = cfg.report_distance;
    let rows = match cfg.experiment {
        ExperimentKind::Distribution => {
            let last = setup.run(steps, |_| Ok(()))?;
            position_distribution(&last)
                .iter()
                .enumerate()
                .map(|(i, (x, p))| (i, vec![Value::Int(x), Value::Float(p)]))
                .collect()
        }
        ExperimentKind::StdDevVsR => {
            let mut rows = Vec::with_capacity(steps);
            setup.run(steps, |s| {
                let st = stats(&position_distribution(s));
                rows.push((
                    s.t(),
                    vec![Value::Int(s.t() as i64), Value::Float(st.mean), Value::Float(st.std_dev)],
                ));
                Ok(())
            })?;
            rows
        }
        ExperimentKind::SymmetryKd => {
            let alpha = cfg.phase_alpha.expect("validated");
            symmetry_experiment(&setup, steps, alpha)?
                .kd
                .into_iter()
                .enumerate()
                .map(|(i, kd)| (i + 1, vec![Value::Int(i as i64 + 1), Value::Float(kd)]))
                .collect()
        }
        ExperimentKind::QmidVsR => {
            let last = setup.run(steps, |_| Ok(()))?;
            let r = report(&last, dist)?;
            let mut row = vec![Value::Int(steps as i64)];
            row.extend(qmid_values(&r, dist));
            vec![(0, row)]
        }
        ExperimentKind::QmidVsTime => qmid_series(&setup, steps, dist)?
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = vec![Value::Int(i as i64 + 1)];
                row.extend(qmid_values(r, dist));
                (i + 1, row)
            })
            .collect(),
        ExperimentKind::LineVsCycle => {
            let line = WalkSetup {
                geometry: Geometry::line(steps)?,
                ..setup.clone()
            };
            let (on_line, on_cycle) = rayon::join(
                || qmid_series(&line, steps, dist),
                || qmid_series(&setup, steps, dist),
            );
            let (on_line, on_cycle) = (on_line?, on_cycle?);
            on_line
                .iter()
                .zip(&on_cycle)
                .enumerate()
                .map(|(i, (l, c))| {
                    let t = i + 1;
                    let mut row = vec![
                        Value::Int(t as i64),
                        Value::Float(setup.geometry.turns(t).unwrap_or(f64::NAN)),
                        Value::Float(l.q),
                        Value::Float(c.q),
                        Value::Flag(l.degenerate_marginals),
                        Value::Flag(c.degenerate_marginals),
                    ];
                    if dist {
                        row.push(Value::Float(l.disturbance_distance.unwrap_or(f64::NAN)));
                        row.push(Value::Float(c.disturbance_distance.unwrap_or(f64::NAN)));
                    }
                    (t, row)
                })
                .collect()
        }
    };
    Ok(rows)
}

fn run_cell_tagged(cell: &SweepCell) -> Result<KeyedRows> {
    run_cell(&cell.config).map_err(|e| Error::SweepCell {
        cell: cell.index,
        assignment: cell.describe(),
        source: Box::new(e),
    })
}

fn assemble(cfg: &ExperimentConfig, cells: &[SweepCell], results: Vec<KeyedRows>, started: Instant) -> RunRecord {
    let mut columns: Vec<String> = cfg.sweep.iter().map(|a| a.parameter.name().to_string()).collect();
    columns.extend(output_columns(cfg).into_iter().map(String::from));

    // time-major, then sweep cell
    let mut keyed: Vec<(usize, usize, Vec<Value>)> = Vec::new();
    for (cell, rows) in cells.iter().zip(results) {
        for (key, row) in rows {
            let mut full: Vec<Value> = cell
                .assignment
                .iter()
                .map(|(p, v)| match p {
                    super::SweepParameter::Sites | super::SweepParameter::Steps => Value::Int(*v as i64),
                    _ => Value::Float(*v),
                })
                .collect();
            full.extend(row);
            keyed.push((key, cell.index, full));
        }
    }
    keyed.sort_by_key(|(key, cell, _)| (*key, *cell));

    RunRecord {
        digest: cfg.digest(),
        experiment: cfg.experiment,
        table: Table {
            columns,
            rows: keyed.into_iter().map(|(_, _, r)| r).collect(),
        },
        wall_time_s: started.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

/// Runs every sweep cell in parallel.
pub fn run(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let started = Instant::now();
    cfg.validate()?;
    let cells = cfg.cells()?;
    let results = cells.par_iter().map(run_cell_tagged).collect::<Result<Vec<_>>>()?;
    Ok(assemble(cfg, &cells, results, started))
}

/// Same as [`run`] on the calling thread only.
pub fn run_serial(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let started = Instant::now();
    cfg.validate()?;
    let cells = cfg.cells()?;
    let results = cells.iter().map(run_cell_tagged).collect::<Result<Vec<_>>>()?;
    Ok(assemble(cfg, &cells, results, started))
}

pub fn emit_csv(record: &RunRecord, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::io(path, e))?;
    write_table(&mut w, &record.table).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn csv_string(table: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_table(&mut w, table).expect("in-memory writes cannot fail");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

fn write_table<W: std::io::Write>(w: &mut csv::Writer<W>, table: &Table) -> csv::Result<()> {
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Value::render))?;
    }
    Ok(())
}

/// Writes `config.toml`, `<experiment>.csv` and `record.json` under
/// `<root>/<digest>/` and returns that directory.
pub fn save_run(cfg: &ExperimentConfig, record: &RunRecord, root: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = root.as_ref().join(&record.digest);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;

    let config_path = dir.join("config.toml");
    std::fs::write(&config_path, write_config(cfg)).map_err(|e| Error::io(&config_path, e))?;

    let csv_name = format!("{}.csv", record.experiment.name());
    emit_csv(record, dir.join(&csv_name))?;

    let meta = RecordMeta {
        digest: &record.digest,
        experiment: record.experiment.name(),
        version: &record.version,
        wall_time_s: record.wall_time_s,
        cells: cfg.cells()?.len(),
        rows: record.table.rows.len(),
        columns: &record.table.columns,
        csv: csv_name,
    };
    let json_path = dir.join("record.json");
    let json = serde_json::to_string_pretty(&meta).expect("record serializes");
    std::fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;
    Ok(dir)
}

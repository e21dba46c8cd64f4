//! Run orchestration: stepping to `t_end` with scheduled output.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::analysis::{analyze, CrackMetrics};
use super::geometry::{generate, CrackFrame, Model};
use super::output::{snapshot_rows, write_snapshot_csv, write_snapshot_vtk};
use super::spec::ScenarioSpec;
use super::ScenarioError;
use crate::bonds::{write_crack_row, CrackRecord, CrackSegment, CRACK_CSV_HEADER};
use crate::dynamics::{Simulation, AUDIT_CSV_HEADER};

/// Everything needed to interpret a run directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub version: String,
    pub particles: usize,
    pub bonds: usize,
    pub threads: usize,
    pub deterministic: bool,
    pub frame: CrackFrame,
    pub spec: ScenarioSpec,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self, ScenarioError> {
        let path = dir.join("manifest.toml");
        let text = fs::read_to_string(&path).map_err(|source| ScenarioError::Io { path: path.clone(), source })?;
        toml::from_str(&text).map_err(|e| ScenarioError::Config(format!("{}: {e}", path.display())))
    }

    /// Output sample times `k · t_end / snapshots`.
    pub fn sample_times(&self) -> Vec<f64> {
        sample_times(&self.spec)
    }
}

pub fn sample_times(spec: &ScenarioSpec) -> Vec<f64> {
    (0..=spec.snapshots)
        .map(|k| spec.t_end * k as f64 / spec.snapshots as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub steps: usize,
    pub t: f64,
    pub metrics: CrackMetrics,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    pub deterministic: bool,
    /// Write CSV and VTK snapshots at each sample time.
    pub snapshots: bool,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ScenarioError + '_ {
    move |source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Generates the scenario and runs it to `t_end`, writing into `out`.
pub fn run(spec: &ScenarioSpec, out: &Path) -> Result<RunSummary, ScenarioError> {
    run_with(
        spec,
        out,
        RunOptions {
            deterministic: true,
            snapshots: true,
        },
    )
}

pub fn run_with(spec: &ScenarioSpec, out: &Path, options: RunOptions) -> Result<RunSummary, ScenarioError> {
    let setup = generate(spec)?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        particles: setup.model.n_real(),
        bonds: setup.model.n_bonds(),
        threads: rayon::current_num_threads(),
        deterministic: options.deterministic,
        frame: setup.frame.clone(),
        spec: spec.clone(),
    };
    let path = out.join("manifest.toml");
    let text = toml::to_string_pretty(&manifest).map_err(|e| ScenarioError::Config(e.to_string()))?;
    fs::write(&path, text).map_err(io_err(&path))?;
    log::info!(
        "{}: {} particles, {} bonds, t_end = {:e} s",
        spec.scenario,
        manifest.particles,
        manifest.bonds,
        spec.t_end
    );
    match setup.model {
        Model::Planar(sim) => Runner::new(sim, spec, &setup.frame, out, options)?.run(),
        Model::Solid(sim) => Runner::new(sim, spec, &setup.frame, out, options)?.run(),
    }
}

struct Runner<'a, const D: usize> {
    sim: Simulation<f64, D>,
    spec: &'a ScenarioSpec,
    frame: &'a CrackFrame,
    out: &'a Path,
    options: RunOptions,
    audit: BufWriter<File>,
    crack: BufWriter<File>,
    records: Vec<CrackRecord<f64, 3>>,
}

fn pad<const D: usize>(r: &CrackRecord<f64, D>) -> CrackRecord<f64, 3> {
    let m = &r.segment.midpoint;
    let d = &r.segment.direction;
    let get = |v: &nalgebra::SVector<f64, D>, k: usize| if k < D { v[k] } else { 0.0 };
    CrackRecord {
        time: r.time,
        segment: CrackSegment {
            bond: r.segment.bond,
            midpoint: Vector3::new(get(m, 0), get(m, 1), get(m, 2)),
            direction: Vector3::new(get(d, 0), get(d, 1), get(d, 2)),
        },
    }
}

impl<'a, const D: usize> Runner<'a, D> {
    fn new(
        sim: Simulation<f64, D>,
        spec: &'a ScenarioSpec,
        frame: &'a CrackFrame,
        out: &'a Path,
        options: RunOptions,
    ) -> Result<Self, ScenarioError> {
        let open = |name: &str, header: &str| -> Result<BufWriter<File>, ScenarioError> {
            let path = out.join(name);
            let mut w = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
            writeln!(w, "{header}").map_err(io_err(&path))?;
            Ok(w)
        };
        Ok(Self {
            audit: open("audit.csv", AUDIT_CSV_HEADER)?,
            crack: open("crack.csv", CRACK_CSV_HEADER)?,
            sim,
            spec,
            frame,
            out,
            options,
            records: Vec::new(),
        })
    }

    fn snapshot(&self, name: &str) -> Result<(), ScenarioError> {
        let rows = snapshot_rows(&self.sim);
        let csv = self.out.join(format!("{name}.csv"));
        write_snapshot_csv(&csv, &rows).map_err(io_err(&csv))?;
        let vtk = self.out.join(format!("{name}.vtk"));
        let title = format!("{} t={:e}", self.spec.scenario, self.sim.state.t);
        write_snapshot_vtk(&vtk, &rows, &title).map_err(io_err(&vtk))
    }

    fn flush(&mut self) -> Result<(), ScenarioError> {
        let a = self.out.join("audit.csv");
        self.audit.flush().map_err(io_err(&a))?;
        let c = self.out.join("crack.csv");
        self.crack.flush().map_err(io_err(&c))
    }

    fn write_audit(&mut self) -> Result<(), ScenarioError> {
        let row = self.sim.audit();
        let path = self.out.join("audit.csv");
        row.write_row(&mut self.audit).map_err(io_err(&path))
    }

    fn finish_metrics(&self, times: &[f64]) -> Result<CrackMetrics, ScenarioError> {
        let rows = snapshot_rows(&self.sim);
        let metrics = analyze(&self.records, self.frame, times, Some(&rows));
        let path = self.out.join("metrics.toml");
        let text = toml::to_string_pretty(&metrics).map_err(|e| ScenarioError::Config(e.to_string()))?;
        fs::write(&path, text).map_err(io_err(&path))?;
        let path = self.out.join("tip.csv");
        let mut tip = String::from("time,tip,speed\n");
        for [t, x, v] in &metrics.tip_history {
            tip.push_str(&format!("{t:e},{x:e},{v:e}\n"));
        }
        fs::write(&path, tip).map_err(io_err(&path))?;
        Ok(metrics)
    }

    fn run(mut self) -> Result<RunSummary, ScenarioError> {
        let start = Instant::now();
        let times = sample_times(self.spec);
        let t_end = self.spec.t_end;
        self.write_audit()?;
        if self.options.snapshots {
            self.snapshot("snapshot_0000")?;
        }
        let mut next = 1;
        while next < times.len() {
            let target = times[next];
            let dt = self.sim.cfl_timestep().min(target - self.sim.state.t);
            let report = match self.sim.step_with(dt) {
                Ok(r) => r,
                Err(e) => {
                    log::error!("{e}");
                    self.flush()?;
                    self.snapshot("abort_state")?;
                    let done: Vec<f64> = times.iter().copied().filter(|&t| t <= self.sim.state.t).collect();
                    self.finish_metrics(&done)?;
                    return Err(ScenarioError::Aborted(e));
                }
            };
            let crack_path = self.out.join("crack.csv");
            for r in &report.newly_broken {
                let padded = pad(r);
                write_crack_row(&mut self.crack, &padded).map_err(io_err(&crack_path))?;
                self.records.push(padded);
            }
            self.write_audit()?;
            if self.sim.state.t >= target * (1.0 - 1e-12) {
                // snap onto the schedule so sample times are exact
                self.sim.state.t = target;
                if self.options.snapshots {
                    self.snapshot(&format!("snapshot_{next:04}"))?;
                }
                self.flush()?;
                log::info!(
                    "t = {:.3e} s ({next}/{}), step {}, broken bonds {}",
                    target,
                    times.len() - 1,
                    self.sim.state.step,
                    self.records.len()
                );
                next += 1;
            }
        }
        self.flush()?;
        let metrics = self.finish_metrics(&times)?;
        Ok(RunSummary {
            dir: self.out.to_path_buf(),
            steps: self.sim.state.step,
            t: t_end,
            metrics,
            wall_seconds: start.elapsed().as_secs_f64(),
        })
    }
}

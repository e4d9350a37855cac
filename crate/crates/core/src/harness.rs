//! Run loop, CSV output, and the convergence and robustness drivers.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use thiserror::Error;

use crate::basis::{Basis, BasisError};
use crate::config::RunConfig;
use crate::mesh::{CartesianMesh, StateField};
use crate::physics::{Model, VolumeFlux};
use crate::problems::{ErrorNorms, ProblemError, ProblemSetup};
use crate::stepper::{admissibility_monitor, compute_dt, Crash, SetupError, Solver};
use crate::tableau::{standard_tableau, TableauError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Setup(#[from] SetupError),
    #[error(transparent)]
    Basis(#[from] BasisError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("order_variable {index} out of range for {nvars} variables")]
    OrderVariable { index: usize, nvars: usize },
    #[error("run with nx = {nx} crashed: {crash}")]
    Crashed { nx: usize, crash: Crash },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One line of `diagnostics.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub dt: f64,
    pub totals: Vec<f64>,
    pub entropy: f64,
    pub kinetic_energy: f64,
}

impl DiagnosticsRow {
    fn measure(field: &StateField, dt: f64, mesh: &CartesianMesh, basis: &Basis, model: &dyn Model) -> Self {
        let m = field.layout.nvars;
        let mut totals = vec![0.0; m];
        let mut entropy = 0.0;
        let mut kinetic_energy = 0.0;
        field.integrate(mesh, basis, |u, w| {
            for k in 0..m {
                totals[k] += w * u[k];
            }
            entropy += w * model.entropy(u);
            kinetic_energy += w * model.kinetic_energy(u);
        });
        DiagnosticsRow {
            t: field.t,
            dt,
            totals,
            entropy,
            kinetic_energy,
        }
    }
}

/// Outcome of one run. A crash is part of the outcome, not an error.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub rows: Vec<DiagnosticsRow>,
    pub crash: Option<Crash>,
    /// Last accepted state.
    pub state: StateField,
    /// Errors against the exact solution, when there is one and the run
    /// completed.
    pub errors: Option<ErrorNorms>,
    pub dof: usize,
    pub var_names: Vec<String>,
}

impl RunReport {
    /// Crash time, or the final time of a completed run.
    pub fn end_time(&self) -> f64 {
        self.crash.as_ref().map_or(self.state.t, |c| c.t)
    }
}

#[inline]
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Builds the solver and initial state for a configuration.
pub fn build(config: &RunConfig) -> Result<(ProblemSetup, Solver, StateField), HarnessError> {
    let setup = ProblemSetup::new(config.problem, config.nx, config.ny, config.params())?;
    let basis = Basis::new(config.degree)?;
    let tableau = standard_tableau(&config.tableau)?;
    let mut solver = Solver::new(setup.model.clone(), basis, setup.mesh.clone(), tableau, config.scheme())?;
    if let Some(src) = &setup.source {
        solver = solver.with_source(src.clone());
    }
    if let Some(ghost) = &setup.ghost {
        solver = solver.with_ghost(ghost.clone());
    }
    let state = setup.initial_state(solver.basis());
    Ok((setup, solver, state))
}

/// Runs without writing files.
pub fn simulate(config: &RunConfig) -> Result<RunReport, HarnessError> {
    drive(config, None)
}

/// Runs and writes diagnostics, snapshots, provenance and a summary
/// into `config.out_dir`.
pub fn run(config: &RunConfig) -> Result<RunReport, HarnessError> {
    drive(config, Some(&config.out_dir))
}

struct Output {
    dir: PathBuf,
    diagnostics: BufWriter<File>,
    snapshots: usize,
    index: String,
}

impl Output {
    fn create(dir: &Path, config: &RunConfig, var_names: &[String]) -> Result<Self, HarnessError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let prov = dir.join("provenance.txt");
        let text = format!(
            "# crkfr {} (rev {})\n{}",
            env!("CARGO_PKG_VERSION"),
            option_env!("CRKFR_GIT_REV").unwrap_or("unknown"),
            config.to_text()
        );
        fs::write(&prov, text).map_err(io_err(&prov))?;
        let path = dir.join("diagnostics.csv");
        let mut diagnostics = BufWriter::new(File::create(&path).map_err(io_err(&path))?);
        let mut header = String::from("t,dt");
        for v in var_names {
            let _ = write!(header, ",total_{v}");
        }
        header.push_str(",total_entropy,total_kinetic_energy");
        writeln!(diagnostics, "{header}").map_err(io_err(&path))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            diagnostics,
            snapshots: 0,
            index: String::from("index,t,file\n"),
        })
    }

    fn row(&mut self, row: &DiagnosticsRow) -> Result<(), HarnessError> {
        let mut line = format!("{},{}", fmt_float(row.t), fmt_float(row.dt));
        for v in &row.totals {
            line.push(',');
            line.push_str(&fmt_float(*v));
        }
        let _ = write!(line, ",{},{}", fmt_float(row.entropy), fmt_float(row.kinetic_energy));
        let path = self.dir.join("diagnostics.csv");
        writeln!(self.diagnostics, "{line}").map_err(io_err(&path))
    }

    fn snapshot(&mut self, field: &StateField, mesh: &CartesianMesh, basis: &Basis, var_names: &[String]) -> Result<(), HarnessError> {
        let name = format!("snapshot_t{:04}.csv", self.snapshots);
        let path = self.dir.join(&name);
        write_snapshot(&path, field, mesh, basis, var_names)?;
        let _ = writeln!(self.index, "{},{},{}", self.snapshots, fmt_float(field.t), name);
        self.snapshots += 1;
        Ok(())
    }

    fn finish(mut self, report: &RunReport) -> Result<(), HarnessError> {
        let path = self.dir.join("diagnostics.csv");
        self.diagnostics.flush().map_err(io_err(&path))?;
        let path = self.dir.join("snapshots.csv");
        fs::write(&path, &self.index).map_err(io_err(&path))?;

        let mut s = String::new();
        match &report.crash {
            Some(c) => {
                let _ = writeln!(s, "status = crashed");
                let _ = writeln!(s, "crash_time = {}", c.t);
                let _ = writeln!(s, "crash_stage = {}", c.stage.map_or("final".to_string(), |i| (i + 1).to_string()));
                let _ = writeln!(s, "crash_location = {}", c.location);
                let _ = writeln!(s, "crash_reason = {}", c.reason);
            }
            None => {
                let _ = writeln!(s, "status = completed");
            }
        }
        let _ = writeln!(s, "t_end = {}", report.state.t);
        let _ = writeln!(s, "steps = {}", report.state.step);
        if let Some(e) = &report.errors {
            for (k, name) in report.var_names.iter().enumerate() {
                let _ = writeln!(s, "l2_{name} = {:.16e}", e.l2[k]);
            }
        }
        let path = self.dir.join("summary.txt");
        fs::write(&path, s).map_err(io_err(&path))
    }
}

/// Writes nodal values with coordinates, one solution point per line.
pub fn write_snapshot(path: &Path, field: &StateField, mesh: &CartesianMesh, basis: &Basis, var_names: &[String]) -> Result<(), HarnessError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    let l = field.layout;
    let mut out = String::from(if l.dim == 2 { "x,y" } else { "x" });
    for v in var_names {
        out.push(',');
        out.push_str(v);
    }
    out.push('\n');
    for e in 0..l.nelem {
        for node in 0..l.nodes_per_element() {
            let x = mesh.node_position(basis, e, node);
            out.push_str(&fmt_float(x[0]));
            if l.dim == 2 {
                out.push(',');
                out.push_str(&fmt_float(x[1]));
            }
            for v in field.node(e, node) {
                out.push(',');
                out.push_str(&fmt_float(*v));
            }
            out.push('\n');
        }
        if out.len() > 1 << 16 {
            w.write_all(out.as_bytes()).map_err(io_err(path))?;
            out.clear();
        }
    }
    w.write_all(out.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

fn drive(config: &RunConfig, out_dir: Option<&Path>) -> Result<RunReport, HarnessError> {
    let (setup, mut solver, mut state) = build(config)?;
    let model = setup.model.clone();
    let basis = solver.basis().clone();
    let mesh = solver.mesh().clone();
    let var_names: Vec<String> = model.var_names().iter().map(|s| s.to_string()).collect();
    let mut output = match out_dir {
        Some(dir) => Some(Output::create(dir, config, &var_names)?),
        None => None,
    };
    info!(
        "{}: {} elements, N = {}, {} with {} volume flux",
        config.problem,
        mesh.num_elements(),
        config.degree,
        config.stepper.as_str(),
        config.volume_flux
    );

    let mut rows = Vec::new();
    let first = DiagnosticsRow::measure(&state, 0.0, &mesh, &basis, &*model);
    if let Some(o) = output.as_mut() {
        o.row(&first)?;
        o.snapshot(&state, &mesh, &basis, &var_names)?;
    }
    rows.push(first);

    let mut crash = admissibility_monitor(&state, &*model).err();
    let t_final = config.t_final;
    let eps = 1e-12 * t_final.max(1.0);
    let mut last_dt = 0.0;
    while crash.is_none() && state.t < t_final - eps {
        let remaining = t_final - state.t;
        let dt = match config.dt {
            Some(dt) => dt.min(remaining),
            None => compute_dt(&state, &basis, &mesh, &*model, config.cfl, config.dt_max).min(remaining),
        };
        if let Err(c) = solver.step(config.stepper, &mut state, dt) {
            warn!("{c}");
            crash = Some(c);
            break;
        }
        if (state.t - t_final).abs() <= eps {
            state.t = t_final;
        }
        last_dt = dt;
        let done = state.t >= t_final - eps;
        if state.step % config.diagnostics_interval as u64 == 0 || done {
            let row = DiagnosticsRow::measure(&state, dt, &mesh, &basis, &*model);
            if let Some(o) = output.as_mut() {
                o.row(&row)?;
            }
            rows.push(row);
        }
        if config.snapshot_interval > 0 && state.step % config.snapshot_interval as u64 == 0 && !done {
            if let Some(o) = output.as_mut() {
                o.snapshot(&state, &mesh, &basis, &var_names)?;
            }
        }
    }
    if crash.is_some() && rows.last().is_none_or(|r| r.t < state.t) {
        let row = DiagnosticsRow::measure(&state, last_dt, &mesh, &basis, &*model);
        if let Some(o) = output.as_mut() {
            o.row(&row)?;
        }
        rows.push(row);
    }
    if let Some(o) = output.as_mut() {
        if state.step > 0 {
            o.snapshot(&state, &mesh, &basis, &var_names)?;
        }
    }

    let errors = match (&crash, &setup.exact) {
        (None, Some(_)) => Some(setup.error_norms(&state, &basis)?),
        _ => None,
    };
    let dof = mesh.num_elements() * state.layout.nodes_per_element();
    let report = RunReport {
        rows,
        crash,
        state,
        errors,
        dof,
        var_names,
    };
    if let Some(o) = output {
        o.finish(&report)?;
    }
    Ok(report)
}

/// One line of `errors.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub nx: usize,
    pub dof: usize,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub order_l2: Option<f64>,
}

/// Runs `base` at each resolution and tabulates errors of variable
/// `base.order_variable`. Orders are reported only for doubling sequences.
pub fn convergence_study(base: &RunConfig, resolutions: &[usize], out_dir: Option<&Path>) -> Result<Vec<ConvergenceRow>, HarnessError> {
    let doubling = resolutions.windows(2).all(|w| w[1] == 2 * w[0]);
    if !doubling {
        warn!("resolutions {resolutions:?} do not double; observed orders omitted");
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(resolutions.len());
    for &nx in resolutions {
        let mut config = base.clone();
        config.nx = nx;
        config.ny = (base.ny * nx / base.nx).max(1);
        let report = match out_dir {
            Some(dir) => {
                config.out_dir = dir.join(format!("nx{nx}"));
                run(&config)?
            }
            None => simulate(&config)?,
        };
        if let Some(crash) = report.crash {
            return Err(HarnessError::Crashed { nx, crash });
        }
        let errors = report.errors.ok_or(ProblemError::NoExactSolution(config.problem))?;
        let k = config.order_variable;
        if k >= errors.l2.len() {
            return Err(HarnessError::OrderVariable {
                index: k,
                nvars: errors.l2.len(),
            });
        }
        let order_l2 = match rows.last() {
            Some(prev) if doubling => Some((prev.l2 / errors.l2[k]).log2()),
            _ => None,
        };
        info!("nx = {nx}: l2 = {:.3e}{}", errors.l2[k], order_l2.map(|o| format!(", order {o:.2}")).unwrap_or_default());
        rows.push(ConvergenceRow {
            nx,
            dof: report.dof,
            l1: errors.l1[k],
            l2: errors.l2[k],
            linf: errors.linf[k],
            order_l2,
        });
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut s = String::from("nx,dof,l1,l2,linf,order_l2\n");
        for r in &rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.nx,
                r.dof,
                fmt_float(r.l1),
                fmt_float(r.l2),
                fmt_float(r.linf),
                r.order_l2.map(fmt_float).unwrap_or_default()
            );
        }
        let path = dir.join("errors.csv");
        fs::write(&path, s).map_err(io_err(&path))?;
    }
    Ok(rows)
}

/// One line of `robustness.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessRow {
    pub volume_flux: VolumeFlux,
    pub crashed: bool,
    /// Crash time, or `t_final` when the run survived.
    pub crash_time: f64,
    pub steps: u64,
    pub reason: String,
}

/// Identical runs that differ only in the volume flux.
pub fn robustness_compare(base: &RunConfig, kinds: &[VolumeFlux], out_dir: Option<&Path>) -> Result<(Vec<RobustnessRow>, String), HarnessError> {
    let mut rows = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let mut config = base.clone();
        config.volume_flux = kind;
        let report = match out_dir {
            Some(dir) => {
                config.out_dir = dir.join(kind.as_str());
                run(&config)?
            }
            None => simulate(&config)?,
        };
        info!("{kind}: end time {}", report.end_time());
        rows.push(RobustnessRow {
            volume_flux: kind,
            crashed: report.crash.is_some(),
            crash_time: report.end_time(),
            steps: report.state.step,
            reason: report.crash.map(|c| c.to_string()).unwrap_or_default(),
        });
    }
    let summary = ordering_summary(&rows);
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut s = String::from("volume_flux,crashed,crash_time,steps,reason\n");
        for r in &rows {
            let _ = writeln!(
                s,
                "{},{},{},{},\"{}\"",
                r.volume_flux,
                r.crashed,
                fmt_float(r.crash_time),
                r.steps,
                r.reason.replace('"', "'")
            );
        }
        let path = dir.join("robustness.csv");
        fs::write(&path, s).map_err(io_err(&path))?;
        let path = dir.join("robustness_summary.txt");
        fs::write(&path, &summary).map_err(io_err(&path))?;
    }
    Ok((rows, summary))
}

/// Kinds sorted by survival time, then a comparison of every kind against
/// the central flux when it is part of the list.
pub fn ordering_summary(rows: &[RobustnessRow]) -> String {
    if rows.len() < 2 {
        return String::from("single volume flux; no comparison\n");
    }
    let mut sorted: Vec<&RobustnessRow> = rows.iter().collect();
    sorted.sort_by(|a, b| b.crash_time.total_cmp(&a.crash_time));
    let mut s = String::from("ordering:");
    for (i, r) in sorted.iter().enumerate() {
        let sep = if i == 0 { " " } else { " >= " };
        let _ = write!(s, "{sep}{} ({}{})", r.volume_flux, r.crash_time, if r.crashed { "" } else { ", survived" });
    }
    s.push('\n');
    if let Some(central) = rows.iter().find(|r| r.volume_flux == VolumeFlux::Central) {
        for r in rows.iter().filter(|r| r.volume_flux != VolumeFlux::Central) {
            let _ = writeln!(
                s,
                "crash_time({}) >= crash_time(central): {}",
                r.volume_flux,
                r.crash_time >= central.crash_time
            );
        }
    }
    s
}

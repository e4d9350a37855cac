use super::{Crash, Discretization, NonconsInterface, Solver};
use crate::kernels::FaceSide;
use crate::mesh::StateField;
use crate::physics::{Model, Vars, MAX_VARS};

/// `b`-weighted time averages of one cRKFR step.
#[derive(Debug, Clone)]
pub struct TimeAverages {
    /// `Σ_j b_j (V(u^(j)) - S(u^(j)))`: time-averaged volume flux
    /// derivative plus non-conservative volume term minus source.
    pub volume: Vec<f64>,
    /// Per trace pair (`[ξ = 0, ξ = 1]`): `u` holds the trace of `u^n`,
    /// `avg_u` is `U±`, `flux` is `F±`, `noncons` is `F_nc±`.
    pub traces: Vec<[FaceSide; 2]>,
    /// Stage traces `u^(j)±`, only filled for stage-averaged
    /// non-conservative interface terms.
    pub stage_traces: Vec<Vars>,
}

impl TimeAverages {
    pub(crate) fn new(len: usize, pairs: usize, stages: usize) -> Self {
        TimeAverages {
            volume: vec![0.0; len],
            traces: vec![[FaceSide::default(); 2]; pairs],
            stage_traces: vec![[0.0; MAX_VARS]; pairs * 2 * stages],
        }
    }
}

/// Nodal time-averaged flux `F = Σ_j b_j f(u^(j))` in direction `dir`.
pub fn time_averaged_flux(model: &dyn Model, stages: &[&[f64]], b: &[f64], dir: usize) -> Vec<f64> {
    let m = model.nvars();
    let len = stages.first().map_or(0, |s| s.len());
    let mut out = vec![0.0; len];
    let mut f: Vars = [0.0; MAX_VARS];
    for (stage, &bj) in stages.iter().zip(b) {
        for (u, o) in stage.chunks_exact(m).zip(out.chunks_exact_mut(m)) {
            model.flux(u, dir, &mut f[..m]);
            for k in 0..m {
                o[k] += bj * f[k];
            }
        }
    }
    out
}

impl Discretization {
    /// `out = un - dt Σ_{j<i} a_ij r_j`.
    pub(super) fn stage_state(&self, un: &[f64], residuals: &[Vec<f64>], i: usize, dt: f64, out: &mut [f64]) {
        out.copy_from_slice(un);
        for (j, r) in residuals.iter().enumerate().take(i) {
            let a = self.tableau.a(i, j);
            if a != 0.0 {
                let w = dt * a;
                for (o, rj) in out.iter_mut().zip(r) {
                    *o -= w * rj;
                }
            }
        }
    }

    /// Adds `weight` times the traces of field `u` into `traces`; also
    /// writes the plain traces to `u` when `set_u` and to `stage_traces`.
    pub(super) fn accumulate_traces(
        &self,
        u: &[f64],
        weight: f64,
        set_u: bool,
        traces: &mut [[FaceSide; 2]],
        stage_slot: Option<(usize, &mut [Vars])>,
    ) {
        let l = self.layout;
        let s = self.tableau.stages();
        let mut stage_slot = stage_slot;
        for dir in 0..l.dim {
            for e in 0..l.nelem {
                for j in 0..l.lines() {
                    let ti = self.trace_index(dir, e, j);
                    let inst = self.line_traces(u, e, dir, j);
                    for side in 0..2 {
                        traces[ti][side].add_scaled(&inst[side], weight);
                        if set_u {
                            traces[ti][side].u = inst[side].u;
                        }
                        if let Some((i, st)) = stage_slot.as_mut() {
                            st[(ti * 2 + side) * s + *i] = inst[side].u;
                        }
                    }
                }
            }
        }
    }
}

impl Solver {
    /// Evolves the inner stages `u^(i) = u^n - Δt Σ_{j<i} a_ij V(u^(j))`
    /// with element-local operators only and stores their residuals.
    pub fn crk_inner_stages(&mut self, state: &StateField, dt: f64) -> Result<&[Vec<f64>], Crash> {
        let disc = &self.disc;
        let sc = &mut self.scratch;
        sc.un.copy_from_slice(&state.data);
        let c = disc.tableau.c();
        for i in 0..disc.tableau.stages() {
            disc.stage_state(&sc.un, &sc.residuals, i, dt, &mut sc.stages[i]);
            if i > 0 {
                disc.check_field(&sc.stages[i], state.t, Some(i))?;
            }
            disc.volume_residual(&sc.stages[i], state.t + c[i] * dt, &mut sc.residuals[i]);
        }
        Ok(&self.scratch.stages)
    }

    /// Forms the time averages from the stages of the last
    /// [`Solver::crk_inner_stages`] call.
    pub fn compute_time_averages(&mut self) -> &TimeAverages {
        let disc = &self.disc;
        let sc = &mut self.scratch;
        let b = disc.tableau.b();
        let avg = &mut sc.averages;
        avg.volume.fill(0.0);
        for (r, &bj) in sc.residuals.iter().zip(b) {
            for (v, x) in avg.volume.iter_mut().zip(r) {
                *v += bj * x;
            }
        }
        for pair in avg.traces.iter_mut() {
            *pair = [FaceSide::default(); 2];
        }
        let keep_stages = disc.scheme.noncons_interface == NonconsInterface::StageAveraged && disc.model.has_noncons();
        for (i, stage) in sc.stages.iter().enumerate() {
            let slot = if keep_stages {
                Some((i, avg.stage_traces.as_mut_slice()))
            } else {
                None
            };
            disc.accumulate_traces(stage, b[i], i == 0, &mut avg.traces, slot);
        }
        &self.scratch.averages
    }

    /// Averages of the last [`Solver::compute_time_averages`] call.
    pub fn time_averages(&self) -> &TimeAverages {
        &self.scratch.averages
    }

    /// One compact step: local inner stages, time averages, a single
    /// trace exchange, and the update
    /// `u^{n+1} = u^n - Δt (Σ_j b_j V(u^(j)) + surface correction)`.
    pub fn crkfr_step(&mut self, state: &mut StateField, dt: f64) -> Result<(), Crash> {
        self.check_ready();
        self.crk_inner_stages(state, dt)?;
        self.compute_time_averages();
        self.exchange_faces(state.t, dt, None)?;

        let mut buf = std::mem::take(&mut self.scratch.residuals[0]);
        buf.fill(0.0);
        self.add_surface_correction(&mut buf);
        for ((o, u), v) in buf.iter_mut().zip(&state.data).zip(&self.scratch.averages.volume) {
            *o = u - dt * (*o + v);
        }
        let checked = self.disc.check_field(&buf, state.t, None);
        if checked.is_ok() {
            std::mem::swap(&mut state.data, &mut buf);
            state.t += dt;
            state.step += 1;
        }
        self.scratch.residuals[0] = buf;
        checked
    }
}

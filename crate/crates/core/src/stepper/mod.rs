//! Fully discrete time stepping: the multi-stage RKFR reference scheme and
//! the compact single-exchange cRKFR scheme.
//!
//! Both schemes share the volume kernels, the trace assembly and the
//! interface flux. The difference is where inter-element terms enter: RKFR
//! exchanges traces after every stage, cRKFR evolves the inner stages with
//! element-local operators only and exchanges time-averaged traces once.

mod crkfr;
mod rkfr;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::basis::Basis;
use crate::kernels::{self, FaceSide};
use crate::mesh::{CartesianMesh, Layout, StateField};
use crate::physics::{
    add_rusanov_dissipation, interface_wave_speed, Model, SurfaceFlux, Vars, VolumeFlux, MAX_VARS,
};
use crate::basis::MAX_NODES;
use crate::tableau::ButcherTableau;

pub use crkfr::{time_averaged_flux, TimeAverages};

/// Pointwise source `S(u, x, t)` on the right-hand side of the system.
pub type SourceFn = Arc<dyn Fn(&[f64], [f64; 2], f64, &mut [f64]) + Send + Sync>;

/// Outer state `u(x, t)` at non-periodic boundaries.
pub type GhostFn = Arc<dyn Fn([f64; 2], f64, &mut [f64]) + Send + Sync>;

/// Which interface treatment the non-conservative term gets in cRKFR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonconsInterface {
    /// `B(u^n±) g_avg(U)`: needs only the traces exchanged anyway.
    Reduced,
    /// `Σ_j b_j B(u^(j)±) g_avg(u^(j))`: needs every stage trace.
    StageAveraged,
}

impl NonconsInterface {
    pub fn as_str(self) -> &'static str {
        match self {
            NonconsInterface::Reduced => "reduced",
            NonconsInterface::StageAveraged => "stage_averaged",
        }
    }
}

impl FromStr for NonconsInterface {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "reduced" => Ok(NonconsInterface::Reduced),
            "stage_averaged" => Ok(NonconsInterface::StageAveraged),
            _ => Err(format!("unknown noncons_interface `{s}` (expected reduced or stage_averaged)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepperKind {
    Rkfr,
    Crkfr,
}

impl StepperKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepperKind::Rkfr => "rkfr",
            StepperKind::Crkfr => "crkfr",
        }
    }
}

impl FromStr for StepperKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rkfr" => Ok(StepperKind::Rkfr),
            "crkfr" => Ok(StepperKind::Crkfr),
            _ => Err(format!("unknown stepper `{s}` (expected rkfr or crkfr)")),
        }
    }
}

/// Flux choices of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scheme {
    pub volume: VolumeFlux,
    pub surface: SurfaceFlux,
    pub noncons_interface: NonconsInterface,
}

impl Default for Scheme {
    fn default() -> Self {
        Scheme {
            volume: VolumeFlux::Central,
            surface: SurfaceFlux::Rusanov,
            noncons_interface: NonconsInterface::Reduced,
        }
    }
}

impl Scheme {
    pub fn with_volume(volume: VolumeFlux) -> Self {
        Scheme {
            volume,
            ..Scheme::default()
        }
    }
}

/// Where an inadmissible state was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Node { element: usize, node: usize },
    Face { element: usize, dir: usize, line: usize, side: usize },
}

impl Location {
    pub fn element(&self) -> usize {
        match *self {
            Location::Node { element, .. } | Location::Face { element, .. } => element,
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Node { element, node } => write!(f, "element {element} node {node}"),
            Location::Face { element, dir, line, side } => {
                write!(f, "element {element} face (dir {dir}, line {line}, side {side})")
            }
        }
    }
}

/// A step produced an inadmissible state. `t` is the time of the last
/// accepted state.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("inadmissible {reason} at t = {t} ({location}{}): {values:?}", stage.map(|s| format!(", stage {}", s + 1)).unwrap_or_default())]
pub struct Crash {
    pub t: f64,
    pub stage: Option<usize>,
    pub location: Location,
    pub reason: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SetupError {
    #[error("{model} does not provide a {kind} volume flux")]
    UnsupportedVolumeFlux { model: &'static str, kind: VolumeFlux },
    #[error("{model} does not provide an entropy-conservative surface flux")]
    UnsupportedSurfaceFlux { model: &'static str },
    #[error("model is {model}-dimensional but the mesh is {mesh}-dimensional")]
    Dimension { model: usize, mesh: usize },
    #[error("non-periodic boundaries need a ghost state")]
    MissingGhost,
}

/// Everything that stays fixed during a run.
pub(crate) struct Discretization {
    pub model: Arc<dyn Model>,
    pub basis: Basis,
    pub mesh: CartesianMesh,
    pub tableau: ButcherTableau,
    pub scheme: Scheme,
    pub source: Option<SourceFn>,
    pub ghost: Option<GhostFn>,
    pub layout: Layout,
}

const LINE: usize = MAX_NODES * MAX_VARS;

impl Discretization {
    /// Index of the trace pair of line `line` of element `e` along `dir`.
    #[inline]
    fn trace_index(&self, dir: usize, e: usize, line: usize) -> usize {
        (dir * self.layout.nelem + e) * self.layout.lines() + line
    }

    fn num_trace_pairs(&self) -> usize {
        self.layout.dim * self.layout.nelem * self.layout.lines()
    }

    #[inline]
    fn gather_line(&self, elem: &[f64], dir: usize, line: usize, buf: &mut [f64]) {
        let m = self.layout.nvars;
        for k in 0..self.layout.n1 {
            let node = self.layout.line_node(dir, line, k);
            buf[k * m..(k + 1) * m].copy_from_slice(&elem[node * m..(node + 1) * m]);
        }
    }

    #[inline]
    fn scatter_add_line(&self, buf: &[f64], dir: usize, line: usize, elem: &mut [f64]) {
        let m = self.layout.nvars;
        for k in 0..self.layout.n1 {
            let node = self.layout.line_node(dir, line, k);
            for v in 0..m {
                elem[node * m + v] += buf[k * m + v];
            }
        }
    }

    /// Element-local residual `V(u) - S(u)` of the whole field: volume
    /// flux terms and non-conservative terms, without interface terms.
    fn volume_residual(&self, u: &[f64], t: f64, out: &mut [f64]) {
        let l = self.layout;
        let m = l.nvars;
        let len = l.element_len();
        let mut line = [0.0; LINE];
        let mut lout = [0.0; LINE];
        let model = &*self.model;
        for e in 0..l.nelem {
            let ue = &u[e * len..(e + 1) * len];
            let oe = &mut out[e * len..(e + 1) * len];
            oe.fill(0.0);
            for dir in 0..l.dim {
                let h = self.mesh.h(dir);
                for j in 0..l.lines() {
                    self.gather_line(ue, dir, j, &mut line);
                    lout[..l.n1 * m].fill(0.0);
                    kernels::volume_terms(&self.basis, h, &line[..l.n1 * m], model, self.scheme.volume, dir, &mut lout[..l.n1 * m]);
                    self.scatter_add_line(&lout, dir, j, oe);
                }
            }
            if let Some(src) = &self.source {
                let mut s: Vars = [0.0; MAX_VARS];
                for node in 0..l.nodes_per_element() {
                    let x = self.mesh.node_position(&self.basis, e, node);
                    src(&ue[node * m..(node + 1) * m], x, t, &mut s[..m]);
                    for k in 0..m {
                        oe[node * m + k] -= s[k];
                    }
                }
            }
        }
    }

    /// Instantaneous traces of every line of `u`.
    fn line_traces(&self, u: &[f64], e: usize, dir: usize, j: usize) -> [FaceSide; 2] {
        let m = self.layout.nvars;
        let len = self.layout.element_len();
        let mut line = [0.0; LINE];
        self.gather_line(&u[e * len..(e + 1) * len], dir, j, &mut line);
        kernels::assemble_face_totals(&self.basis, &line[..self.layout.n1 * m], &*self.model, dir)
    }

    /// Physical position of the face point of line `j` of element `e`.
    fn face_position(&self, e: usize, dir: usize, j: usize, side: usize) -> [f64; 2] {
        let c = self.mesh.element_coords(e);
        let nodes = self.basis.nodes();
        let mut x = [0.0; 2];
        for d in 0..self.layout.dim {
            x[d] = if d == dir {
                self.mesh.coordinate(d, c[d], side as f64)
            } else {
                self.mesh.coordinate(d, c[d], nodes[j])
            };
        }
        x
    }

    /// Ghost trace with the given `(time, weight)` averaging and the
    /// instantaneous state taken at `t_inst`.
    fn ghost_side(&self, x: [f64; 2], dir: usize, t_inst: f64, samples: &[(f64, f64)]) -> FaceSide {
        let ghost = self.ghost.as_ref().expect("ghost state checked at setup");
        let model = &*self.model;
        let m = self.layout.nvars;
        let mut side = FaceSide::default();
        ghost(x, t_inst, &mut side.u[..m]);
        let mut g: Vars = [0.0; MAX_VARS];
        let mut f: Vars = [0.0; MAX_VARS];
        let mut ng: Vars = [0.0; MAX_VARS];
        let mut bg: Vars = [0.0; MAX_VARS];
        for &(t, w) in samples {
            ghost(x, t, &mut g[..m]);
            model.flux(&g[..m], dir, &mut f[..m]);
            if model.has_noncons() {
                model.noncons_g(&g[..m], &mut ng[..m]);
                model.apply_noncons_b(&g[..m], dir, &ng[..m], &mut bg[..m]);
            }
            for k in 0..m {
                side.avg_u[k] += w * g[k];
                side.flux[k] += w * f[k];
                side.noncons[k] += w * bg[k];
            }
        }
        side
    }

    fn check_field(&self, u: &[f64], t: f64, stage: Option<usize>) -> Result<(), Crash> {
        let l = self.layout;
        let m = l.nvars;
        for (i, node) in u.chunks_exact(m).enumerate() {
            if let Err(err) = self.model.check_admissible(node) {
                let npe = l.nodes_per_element();
                return Err(Crash {
                    t,
                    stage,
                    location: Location::Node {
                        element: i / npe,
                        node: i % npe,
                    },
                    reason: err.reason.to_string(),
                    values: err.values,
                });
            }
        }
        Ok(())
    }
}

impl FaceSide {
    pub(crate) fn add_scaled(&mut self, other: &FaceSide, w: f64) {
        for k in 0..MAX_VARS {
            self.avg_u[k] += w * other.avg_u[k];
            self.flux[k] += w * other.flux[k];
            self.noncons[k] += w * other.noncons[k];
        }
    }
}

/// Conservative interface flux from two traces: Rusanov on the `flux`
/// fields with dissipation `λ/2 (avg_u⁺ - avg_u⁻)` and λ evaluated at the
/// `avg_u` states, or the dissipation-free EC flux for [`SurfaceFlux::EcTest`].
pub fn conservative_interface_flux<M: Model + ?Sized>(
    model: &M,
    minus: &FaceSide,
    plus: &FaceSide,
    dir: usize,
    surface: SurfaceFlux,
) -> Vars {
    let m = model.nvars();
    let mut num: Vars = [0.0; MAX_VARS];
    match surface {
        SurfaceFlux::Rusanov => {
            for k in 0..m {
                num[k] = 0.5 * (minus.flux[k] + plus.flux[k]);
            }
            let lambda = interface_wave_speed(model, &minus.avg_u[..m], &plus.avg_u[..m], dir);
            add_rusanov_dissipation(model, lambda, &minus.avg_u[..m], &plus.avg_u[..m], &mut num[..m]);
        }
        SurfaceFlux::EcTest => {
            model.two_point_flux(VolumeFlux::Ec, &minus.avg_u[..m], &plus.avg_u[..m], dir, &mut num[..m]);
        }
    }
    num
}

/// Adds `B(u_b) ½(g(a) + g(c))` to `out`.
#[inline]
fn add_noncons_average<M: Model + ?Sized>(model: &M, ub: &[f64], a: &[f64], c: &[f64], dir: usize, w: f64, out: &mut [f64]) {
    let m = model.nvars();
    let mut ga: Vars = [0.0; MAX_VARS];
    let mut gc: Vars = [0.0; MAX_VARS];
    let mut bg: Vars = [0.0; MAX_VARS];
    model.noncons_g(a, &mut ga[..m]);
    model.noncons_g(c, &mut gc[..m]);
    for k in 0..m {
        ga[k] = 0.5 * (ga[k] + gc[k]);
    }
    model.apply_noncons_b(ub, dir, &ga[..m], &mut bg[..m]);
    for k in 0..m {
        out[k] += w * bg[k];
    }
}

/// Two one-sided interface fluxes `(F^num⁻, F^num⁺)`: the conservative
/// part plus `B(u^±) ½(g(U⁻) + g(U⁺))` with `u^±` the `u` traces.
pub fn crkfr_interface_flux<M: Model + ?Sized>(
    model: &M,
    minus: &FaceSide,
    plus: &FaceSide,
    dir: usize,
    surface: SurfaceFlux,
) -> (Vars, Vars) {
    let m = model.nvars();
    let num = conservative_interface_flux(model, minus, plus, dir, surface);
    let (mut nm, mut np) = (num, num);
    if model.has_noncons() {
        add_noncons_average(model, &minus.u[..m], &minus.avg_u[..m], &plus.avg_u[..m], dir, 1.0, &mut nm[..m]);
        add_noncons_average(model, &plus.u[..m], &minus.avg_u[..m], &plus.avg_u[..m], dir, 1.0, &mut np[..m]);
    }
    (nm, np)
}

/// Time step `cfl / ((2N + 1) max_e Σ_d λ_d / h_d)`, capped by `dt_max`.
pub fn compute_dt(field: &StateField, basis: &Basis, mesh: &CartesianMesh, model: &dyn Model, cfl: f64, dt_max: f64) -> f64 {
    let l = field.layout;
    let m = l.nvars;
    let mut rate: f64 = 0.0;
    for e in 0..l.nelem {
        let mut lam = [0.0f64; 2];
        for node in field.element(e).chunks_exact(m) {
            for (d, lam_d) in lam.iter_mut().enumerate().take(l.dim) {
                *lam_d = lam_d.max(model.max_wave_speed(node, d));
            }
        }
        let r: f64 = (0..l.dim).map(|d| lam[d] / mesh.h(d)).sum();
        rate = rate.max(r);
    }
    let dt = cfl / (rate * (2 * basis.degree() + 1) as f64);
    if dt.is_finite() {
        dt.min(dt_max)
    } else {
        dt_max
    }
}

/// Checks finiteness and admissibility at every node; reports the first
/// violation in element order.
pub fn admissibility_monitor(field: &StateField, model: &dyn Model) -> Result<(), Crash> {
    let m = field.layout.nvars;
    let npe = field.layout.nodes_per_element();
    for (i, node) in field.data.chunks_exact(m).enumerate() {
        if let Err(err) = model.check_admissible(node) {
            return Err(Crash {
                t: field.t,
                stage: None,
                location: Location::Node {
                    element: i / npe,
                    node: i % npe,
                },
                reason: err.reason.to_string(),
                values: err.values,
            });
        }
    }
    Ok(())
}

/// Preallocated work arrays.
struct Scratch {
    un: Vec<f64>,
    stages: Vec<Vec<f64>>,
    residuals: Vec<Vec<f64>>,
    averages: TimeAverages,
    /// Per trace pair: numerical flux seen by the left and right end.
    face_num: Vec<[Vars; 2]>,
    ghost_samples: Vec<(f64, f64)>,
}

/// Time integrator for one discretization.
pub struct Solver {
    disc: Discretization,
    scratch: Scratch,
    exchanges: u64,
}

impl Solver {
    pub fn new(
        model: Arc<dyn Model>,
        basis: Basis,
        mesh: CartesianMesh,
        tableau: ButcherTableau,
        scheme: Scheme,
    ) -> Result<Self, SetupError> {
        if model.ndims() != mesh.dim() {
            return Err(SetupError::Dimension {
                model: model.ndims(),
                mesh: mesh.dim(),
            });
        }
        if !model.supports(scheme.volume) {
            return Err(SetupError::UnsupportedVolumeFlux {
                model: model.name(),
                kind: scheme.volume,
            });
        }
        if scheme.surface == SurfaceFlux::EcTest && !model.supports(VolumeFlux::Ec) {
            return Err(SetupError::UnsupportedSurfaceFlux { model: model.name() });
        }
        let layout = Layout {
            dim: mesh.dim(),
            nelem: mesh.num_elements(),
            n1: basis.len(),
            nvars: model.nvars(),
        };
        let s = tableau.stages();
        let disc = Discretization {
            model,
            basis,
            mesh,
            tableau,
            scheme,
            source: None,
            ghost: None,
            layout,
        };
        let pairs = disc.num_trace_pairs();
        let scratch = Scratch {
            un: vec![0.0; layout.len()],
            stages: vec![vec![0.0; layout.len()]; s],
            residuals: vec![vec![0.0; layout.len()]; s],
            averages: TimeAverages::new(layout.len(), pairs, s),
            face_num: vec![[[0.0; MAX_VARS]; 2]; pairs],
            ghost_samples: Vec::with_capacity(s),
        };
        Ok(Solver {
            disc,
            scratch,
            exchanges: 0,
        })
    }

    pub fn with_source(mut self, source: SourceFn) -> Self {
        self.disc.source = Some(source);
        self
    }

    pub fn with_ghost(mut self, ghost: GhostFn) -> Self {
        self.disc.ghost = Some(ghost);
        self
    }

    pub fn model(&self) -> &dyn Model {
        &*self.disc.model
    }

    pub fn basis(&self) -> &Basis {
        &self.disc.basis
    }

    pub fn mesh(&self) -> &CartesianMesh {
        &self.disc.mesh
    }

    pub fn tableau(&self) -> &ButcherTableau {
        &self.disc.tableau
    }

    pub fn scheme(&self) -> Scheme {
        self.disc.scheme
    }

    pub fn layout(&self) -> Layout {
        self.disc.layout
    }

    /// Number of face-trace exchanges performed so far.
    pub fn exchanges(&self) -> u64 {
        self.exchanges
    }

    /// Samples an initial condition on this solver's mesh and basis.
    pub fn project(&self, init: impl FnMut([f64; 2], &mut [f64])) -> StateField {
        StateField::from_fn(&self.disc.mesh, &self.disc.basis, self.disc.layout.nvars, init)
    }

    pub fn step(&mut self, kind: StepperKind, state: &mut StateField, dt: f64) -> Result<(), Crash> {
        match kind {
            StepperKind::Rkfr => self.rkfr_step(state, dt),
            StepperKind::Crkfr => self.crkfr_step(state, dt),
        }
    }

    fn check_ready(&self) {
        let periodic = (0..self.disc.layout.dim).all(|d| self.disc.mesh.is_periodic(d));
        assert!(
            periodic || self.disc.ghost.is_some(),
            "{}",
            SetupError::MissingGhost
        );
    }

    /// Computes the interface fluxes of every trace pair from
    /// `averages.traces`; this is the single inter-element communication.
    fn exchange_faces(&mut self, t: f64, dt: f64, stage: Option<usize>) -> Result<(), Crash> {
        self.exchanges += 1;
        let disc = &self.disc;
        let l = disc.layout;
        let m = l.nvars;
        let model = &*disc.model;
        let surface = disc.scheme.surface;
        let traces = &self.scratch.averages.traces;
        let stage_traces = &self.scratch.averages.stage_traces;
        let s = disc.tableau.stages();
        let stage_avg = disc.scheme.noncons_interface == NonconsInterface::StageAveraged
            && stage.is_none()
            && model.has_noncons();
        let b = disc.tableau.b();
        let c = disc.tableau.c();

        // Times and weights at which ghost states are sampled.
        let samples = &mut self.scratch.ghost_samples;
        samples.clear();
        match stage {
            Some(i) => samples.push((t + c[i] * dt, 1.0)),
            None => samples.extend((0..s).map(|i| (t + c[i] * dt, b[i]))),
        }
        let samples = &*samples;
        let t_inst = match stage {
            Some(i) => t + c[i] * dt,
            None => t,
        };

        let check = |side: &FaceSide, e: usize, dir: usize, line: usize, sd: usize| -> Result<(), Crash> {
            model.check_admissible(&side.avg_u[..m]).map_err(|err| Crash {
                t,
                stage,
                location: Location::Face { element: e, dir, line, side: sd },
                reason: err.reason.to_string(),
                values: err.values,
            })
        };

        let face_num = &mut self.scratch.face_num;
        for dir in 0..l.dim {
            for e in 0..l.nelem {
                for j in 0..l.lines() {
                    let ti = disc.trace_index(dir, e, j);
                    let minus = traces[ti][1];
                    check(&minus, e, dir, j, 1)?;
                    let (plus, plus_ti) = match disc.mesh.right_neighbor(e, dir) {
                        Some(nb) => {
                            let pi = disc.trace_index(dir, nb, j);
                            (traces[pi][0], Some(pi))
                        }
                        None => (disc.ghost_side(disc.face_position(e, dir, j, 1), dir, t_inst, samples), None),
                    };
                    let (mut nm, mut np) = crkfr_interface_flux(model, &minus, &plus, dir, surface);
                    if stage_avg {
                        let cons = conservative_interface_flux(model, &minus, &plus, dir, surface);
                        nm = cons;
                        np = cons;
                        for i in 0..s {
                            let um = &stage_traces[(ti * 2 + 1) * s + i];
                            let up = match plus_ti {
                                Some(pi) => stage_traces[(pi * 2) * s + i],
                                None => {
                                    let mut g: Vars = [0.0; MAX_VARS];
                                    (disc.ghost.as_ref().unwrap())(disc.face_position(e, dir, j, 1), t + c[i] * dt, &mut g[..m]);
                                    g
                                }
                            };
                            add_noncons_average(model, &um[..m], &um[..m], &up[..m], dir, b[i], &mut nm[..m]);
                            add_noncons_average(model, &up[..m], &um[..m], &up[..m], dir, b[i], &mut np[..m]);
                        }
                    }
                    face_num[ti][1] = nm;
                    if let Some(pi) = plus_ti {
                        face_num[pi][0] = np;
                    }
                    if disc.mesh.left_neighbor(e, dir).is_none() {
                        let plus = traces[ti][0];
                        check(&plus, e, dir, j, 0)?;
                        let ghost = disc.ghost_side(disc.face_position(e, dir, j, 0), dir, t_inst, samples);
                        let (_, np) = crkfr_interface_flux(model, &ghost, &plus, dir, surface);
                        face_num[ti][0] = np;
                    }
                }
            }
        }
        Ok(())
    }

    /// Adds the FR surface correction of every element to `out`.
    fn add_surface_correction(&self, out: &mut [f64]) {
        let disc = &self.disc;
        let l = disc.layout;
        let m = l.nvars;
        let len = l.element_len();
        let traces = &self.scratch.averages.traces;
        let mut lout = [0.0; LINE];
        for e in 0..l.nelem {
            let oe = &mut out[e * len..(e + 1) * len];
            for dir in 0..l.dim {
                let h = disc.mesh.h(dir);
                for j in 0..l.lines() {
                    let ti = disc.trace_index(dir, e, j);
                    let [left, right] = &traces[ti];
                    let [num_l, num_r] = &self.scratch.face_num[ti];
                    lout[..l.n1 * m].fill(0.0);
                    kernels::surface_correction(
                        &disc.basis,
                        h,
                        m,
                        &num_l[..m],
                        &left.total()[..m],
                        &num_r[..m],
                        &right.total()[..m],
                        &mut lout[..l.n1 * m],
                    );
                    disc.scatter_add_line(&lout, dir, j, oe);
                }
            }
        }
    }
}

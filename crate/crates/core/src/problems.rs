//! Initial conditions, exact and manufactured solutions, and error norms.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::basis::Basis;
use crate::mesh::{CartesianMesh, MeshError, StateField};
use crate::physics::{Burgers, Euler1d, Euler2d, Model, ShallowWater};
use crate::stepper::{GhostFn, SourceFn};

pub type InitFn = Arc<dyn Fn([f64; 2], &mut [f64]) + Send + Sync>;
pub type ExactFn = Arc<dyn Fn([f64; 2], f64, &mut [f64]) + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("unknown problem `{0}` (available: {})", ProblemId::ALL.map(|p| p.as_str()).join(", "))]
    Unknown(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("problem {0} has no exact solution")]
    NoExactSolution(ProblemId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemId {
    DensityWave,
    IsentropicVortex,
    KhiEuler,
    RichtmyerMeshkov,
    LakeAtRest,
    SwManufactured,
    BurgersSmooth,
}

impl ProblemId {
    pub const ALL: [ProblemId; 7] = [
        ProblemId::DensityWave,
        ProblemId::IsentropicVortex,
        ProblemId::KhiEuler,
        ProblemId::RichtmyerMeshkov,
        ProblemId::LakeAtRest,
        ProblemId::SwManufactured,
        ProblemId::BurgersSmooth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemId::DensityWave => "density_wave",
            ProblemId::IsentropicVortex => "isentropic_vortex",
            ProblemId::KhiEuler => "khi_euler",
            ProblemId::RichtmyerMeshkov => "richtmyer_meshkov",
            ProblemId::LakeAtRest => "lake_at_rest",
            ProblemId::SwManufactured => "sw_manufactured",
            ProblemId::BurgersSmooth => "burgers_smooth",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ProblemId::IsentropicVortex | ProblemId::KhiEuler | ProblemId::RichtmyerMeshkov => 2,
            _ => 1,
        }
    }

    /// Default element count along y given `nx`: square elements.
    pub fn default_ny(self, nx: usize) -> usize {
        match self {
            ProblemId::RichtmyerMeshkov => 3 * nx,
            _ => nx,
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemId {
    type Err = ProblemError;

    fn from_str(s: &str) -> Result<Self, ProblemError> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| ProblemError::Unknown(s.to_string()))
    }
}

/// Physical parameters shared by all problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub gamma: f64,
    pub gravity: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            gamma: 1.4,
            gravity: 9.812,
        }
    }
}

/// A fully specified test case on a given mesh resolution.
pub struct ProblemSetup {
    pub id: ProblemId,
    pub model: Arc<dyn Model>,
    pub mesh: CartesianMesh,
    pub initial: InitFn,
    pub exact: Option<ExactFn>,
    pub source: Option<SourceFn>,
    /// Outer state at non-periodic boundaries.
    pub ghost: Option<GhostFn>,
}

impl ProblemSetup {
    pub fn new(id: ProblemId, nx: usize, ny: usize, params: Params) -> Result<Self, ProblemError> {
        let gamma = params.gamma;
        let g = params.gravity;
        let setup = match id {
            ProblemId::DensityWave => {
                let exact: ExactFn = Arc::new(move |x, t, u| density_wave(gamma, x[0], t, u));
                ProblemSetup {
                    id,
                    model: Arc::new(Euler1d::new(gamma)),
                    mesh: CartesianMesh::interval(nx, (0.0, 2.0), true)?,
                    initial: Arc::new(move |x, u| density_wave(gamma, x[0], 0.0, u)),
                    exact: Some(exact),
                    source: None,
                    ghost: None,
                }
            }
            ProblemId::IsentropicVortex => ProblemSetup {
                id,
                model: Arc::new(Euler2d::new(gamma)),
                mesh: CartesianMesh::rectangle((nx, ny), (-5.0, 5.0), (-5.0, 5.0), [true; 2])?,
                initial: Arc::new(move |x, u| isentropic_vortex(gamma, x, 0.0, u)),
                exact: Some(Arc::new(move |x, t, u| isentropic_vortex(gamma, x, t, u))),
                source: None,
                ghost: None,
            },
            ProblemId::KhiEuler => ProblemSetup {
                id,
                model: Arc::new(Euler2d::new(gamma)),
                mesh: CartesianMesh::rectangle((nx, ny), (-1.0, 1.0), (-1.0, 1.0), [true; 2])?,
                initial: Arc::new(move |x, u| khi_euler(gamma, x, u)),
                exact: None,
                source: None,
                ghost: None,
            },
            ProblemId::RichtmyerMeshkov => ProblemSetup {
                id,
                model: Arc::new(Euler2d::new(gamma)),
                mesh: CartesianMesh::rectangle((nx, ny), (0.0, 40.0 / 3.0), (0.0, 40.0), [true, false])?,
                initial: Arc::new(move |x, u| richtmyer_meshkov(gamma, x, u)),
                exact: None,
                source: None,
                ghost: Some(Arc::new(move |x, _t, u| richtmyer_meshkov(gamma, x, u))),
            },
            ProblemId::LakeAtRest => {
                let exact: ExactFn = Arc::new(|x, _t, u| lake_at_rest(x[0], u));
                ProblemSetup {
                    id,
                    model: Arc::new(ShallowWater::new(g)),
                    mesh: CartesianMesh::interval(nx, (0.0, 1.0), true)?,
                    initial: Arc::new(|x, u| lake_at_rest(x[0], u)),
                    exact: Some(exact),
                    source: None,
                    ghost: None,
                }
            }
            ProblemId::SwManufactured => ProblemSetup {
                id,
                model: Arc::new(ShallowWater::new(g)),
                mesh: CartesianMesh::interval(nx, (0.0, 1.0), true)?,
                initial: Arc::new(|x, u| sw_manufactured(x[0], 0.0, u)),
                exact: Some(Arc::new(|x, t, u| sw_manufactured(x[0], t, u))),
                source: Some(Arc::new(move |_u, x, t, s| sw_manufactured_source(g, x[0], t, s))),
                ghost: None,
            },
            ProblemId::BurgersSmooth => ProblemSetup {
                id,
                model: Arc::new(Burgers),
                mesh: CartesianMesh::interval(nx, (0.0, 2.0), true)?,
                initial: Arc::new(|x, u| u[0] = burgers_initial(x[0])),
                exact: Some(Arc::new(|x, t, u| u[0] = burgers_exact(x[0], t))),
                source: None,
                ghost: None,
            },
        };
        Ok(setup)
    }

    pub fn initial_state(&self, basis: &Basis) -> StateField {
        let init = &self.initial;
        StateField::from_fn(&self.mesh, basis, self.model.nvars(), |x, u| init(x, u))
    }

    pub fn error_norms(&self, field: &StateField, basis: &Basis) -> Result<ErrorNorms, ProblemError> {
        let exact = self.exact.as_ref().ok_or(ProblemError::NoExactSolution(self.id))?;
        Ok(error_norms(field, &self.mesh, basis, |x, u| exact(x, field.t, u)))
    }
}

/// ρ = 1 + ½ sin(π(x - t)), v = 1, p = 1.
pub fn density_wave(gamma: f64, x: f64, t: f64, u: &mut [f64]) {
    let rho = 1.0 + 0.5 * (PI * (x - t)).sin();
    u[0] = rho;
    u[1] = rho;
    u[2] = 1.0 / (gamma - 1.0) + 0.5 * rho;
}

/// Vortex of strength 5 centered at the origin, advected with velocity
/// (1, 1) through the periodic box [-5, 5]²; the nearest periodic image
/// of the center is used.
pub fn isentropic_vortex(gamma: f64, x: [f64; 2], t: f64, u: &mut [f64]) {
    const BETA: f64 = 5.0;
    const L: f64 = 10.0;
    let wrap = |d: f64| d - L * (d / L).round();
    let dx = wrap(x[0] - t);
    let dy = wrap(x[1] - t);
    let r2 = dx * dx + dy * dy;
    let dv = BETA / (2.0 * PI) * (0.5 * (1.0 - r2)).exp();
    let temp = 1.0 - (gamma - 1.0) * BETA * BETA / (8.0 * gamma * PI * PI) * (1.0 - r2).exp();
    let rho = temp.powf(1.0 / (gamma - 1.0));
    let p = rho * temp;
    let v1 = 1.0 - dv * dy;
    let v2 = 1.0 + dv * dx;
    u[0] = rho;
    u[1] = rho * v1;
    u[2] = rho * v2;
    u[3] = p / (gamma - 1.0) + 0.5 * rho * (v1 * v1 + v2 * v2);
}

/// Kelvin-Helmholtz shear layers on [-1, 1]².
pub fn khi_euler(gamma: f64, x: [f64; 2], u: &mut [f64]) {
    let b = (15.0 * x[1] + 7.5).tanh() - (15.0 * x[1] - 7.5).tanh();
    let rho = 0.25 + 0.75 * b;
    let v1 = 0.5 * (b - 1.0);
    let v2 = 0.1 * (2.0 * PI * x[0]).sin();
    let p = 1.0;
    u[0] = rho;
    u[1] = rho * v1;
    u[2] = rho * v2;
    u[3] = p / (gamma - 1.0) + 0.5 * rho * (v1 * v1 + v2 * v2);
}

/// Smooth step from `a` to `b` at 0 with slope 2.
fn smooth_step(a: f64, b: f64, x: f64) -> f64 {
    a + (1.0 + (2.0 * x).tanh()) * (b - a) / 2.0
}

/// Stratified fluid at rest on [0, 40/3] × [0, 40] with a shock band
/// around y = 4.
pub fn richtmyer_meshkov(gamma: f64, x: [f64; 2], u: &mut [f64]) {
    const L: f64 = 40.0;
    let (px, py) = (x[0], x[1]);
    let band = (py - 4.0).abs() - 2.0;
    let rho = smooth_step(1.0, 0.25, py - (18.0 + 2.0 * (6.0 * PI * px / L).cos())) + smooth_step(3.22, 0.0, band);
    let p = smooth_step(4.9, 1.0, band);
    u[0] = rho;
    u[1] = 0.0;
    u[2] = 0.0;
    u[3] = p / (gamma - 1.0);
}

/// Bottom topography of the shallow water tests.
pub fn bottom(x: f64) -> f64 {
    0.1 + 0.05 * (2.0 * PI * x).sin()
}

pub fn lake_at_rest(x: f64, u: &mut [f64]) {
    let b = bottom(x);
    u[0] = 1.0 - b;
    u[1] = 0.0;
    u[2] = b;
}

/// Target h = 2 + 0.1 cos(2π(x - t)), v = ½.
pub fn sw_manufactured(x: f64, t: f64, u: &mut [f64]) {
    let h = 2.0 + 0.1 * (2.0 * PI * (x - t)).cos();
    u[0] = h;
    u[1] = 0.5 * h;
    u[2] = bottom(x);
}

/// Source that makes [`sw_manufactured`] an exact solution.
pub fn sw_manufactured_source(g: f64, x: f64, t: f64, s: &mut [f64]) {
    let arg = 2.0 * PI * (x - t);
    let (sn, cs) = arg.sin_cos();
    let h = 2.0 + 0.1 * cs;
    s[0] = 0.1 * PI * sn;
    s[1] = 0.05 * PI * sn - 0.2 * PI * g * h * sn + 0.1 * PI * g * h * (2.0 * PI * x).cos();
    s[2] = 0.0;
}

pub fn burgers_initial(x: f64) -> f64 {
    1.0 + 0.5 * (PI * x).sin()
}

/// Characteristic solution `u = u0(ξ)`, `ξ + t u0(ξ) = x`, valid before
/// the shock forms at t = 2/π.
pub fn burgers_exact(x: f64, t: f64) -> f64 {
    // The foot ξ lies in [x - 1.5t, x - 0.5t] and F is increasing there.
    let f = |xi: f64| xi + t * burgers_initial(xi) - x;
    let (mut lo, mut hi) = (x - 1.5 * t, x - 0.5 * t);
    if t == 0.0 {
        return burgers_initial(x);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    burgers_initial(0.5 * (lo + hi))
}

/// L1, L2 and L∞ errors per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorNorms {
    pub l1: Vec<f64>,
    pub l2: Vec<f64>,
    pub linf: Vec<f64>,
}

/// Quadrature-weighted error norms against `exact(x, out)`.
pub fn error_norms(
    field: &StateField,
    mesh: &CartesianMesh,
    basis: &Basis,
    exact: impl Fn([f64; 2], &mut [f64]),
) -> ErrorNorms {
    let l = field.layout;
    let m = l.nvars;
    let vol = mesh.cell_volume();
    let w = basis.weights();
    let mut norms = ErrorNorms {
        l1: vec![0.0; m],
        l2: vec![0.0; m],
        linf: vec![0.0; m],
    };
    let mut ue = vec![0.0; m];
    for e in 0..l.nelem {
        for node in 0..l.nodes_per_element() {
            let wq = vol * if l.dim == 2 { w[node % l.n1] * w[node / l.n1] } else { w[node] };
            exact(mesh.node_position(basis, e, node), &mut ue);
            for (k, (a, b)) in field.node(e, node).iter().zip(&ue).enumerate() {
                let d = (a - b).abs();
                norms.l1[k] += wq * d;
                norms.l2[k] += wq * d * d;
                norms.linf[k] = norms.linf[k].max(d);
            }
        }
    }
    for v in norms.l2.iter_mut() {
        *v = v.sqrt();
    }
    norms
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for p in ProblemId::ALL {
            assert_eq!(p.as_str().parse::<ProblemId>().unwrap(), p);
        }
        let err = "vortex".parse::<ProblemId>().unwrap_err().to_string();
        assert!(err.contains("density_wave"));
    }

    #[test]
    fn density_wave_values() {
        let mut u = [0.0; 3];
        density_wave(1.4, 0.0, 0.0, &mut u);
        assert_eq!(u[0], 1.0);
        let mut v = [0.0; 3];
        density_wave(1.4, 0.3, 2.0, &mut v);
        density_wave(1.4, 0.3, 0.0, &mut u);
        for (a, b) in u.iter().zip(&v) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn vortex_far_field_and_core() {
        let e = Euler2d::new(1.4);
        let mut u = [0.0; 4];
        isentropic_vortex(1.4, [4.99, 4.99], 0.0, &mut u);
        let far = e.to_primitive(&u);
        for (a, b) in far.iter().zip([1.0, 1.0, 1.0, 1.0]) {
            assert!((a - b).abs() < 1e-8);
        }
        isentropic_vortex(1.4, [0.0, 0.0], 0.0, &mut u);
        assert!(e.pressure(&u) < 1.0);
        let mut w = [0.0; 4];
        isentropic_vortex(1.4, [1.3, -0.7], 10.0, &mut w);
        isentropic_vortex(1.4, [1.3, -0.7], 0.0, &mut u);
        for (a, b) in u.iter().zip(&w) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn khi_values() {
        let e = Euler2d::new(1.4);
        let mut u = [0.0; 4];
        khi_euler(1.4, [0.0, 0.0], &mut u);
        let q = e.to_primitive(&u);
        assert!((q[0] - 1.75).abs() < 1e-5);
        assert!((q[1] - 0.5).abs() < 1e-5);
        khi_euler(1.4, [0.25, 1.0], &mut u);
        let q = e.to_primitive(&u);
        assert!((q[0] - 0.25).abs() < 1e-5);
        assert!((q[1] + 0.5).abs() < 1e-5);
        assert!((q[2] - 0.1).abs() < 1e-14);
        assert!((q[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn richtmyer_meshkov_admissible() {
        let e = Euler2d::new(1.4);
        let mut u = [0.0; 4];
        for i in 0..=20 {
            for j in 0..=60 {
                richtmyer_meshkov(1.4, [i as f64 * 2.0 / 3.0, j as f64 * 2.0 / 3.0], &mut u);
                assert!(e.check_admissible(&u).is_ok());
            }
        }
        richtmyer_meshkov(1.4, [0.0, 4.0], &mut u);
        assert!(e.pressure(&u) > 4.8);
    }

    #[test]
    fn lake_and_manufactured_values() {
        let mut u = [0.0; 3];
        for i in 0..50 {
            lake_at_rest(i as f64 / 50.0, &mut u);
            assert!((u[0] + u[2] - 1.0).abs() < 1e-15);
            assert!(u[0] >= 0.85 - 1e-15);
        }
        sw_manufactured(0.0, 0.0, &mut u);
        assert!((u[0] - 2.1).abs() < 1e-15);
    }

    /// Central differences of the target solution in the PDE
    /// `u_t + f(u)_x + B(u) g(u)_x = S`.
    #[test]
    fn manufactured_source_cancels_residual() {
        let g = 9.812;
        let sw = ShallowWater::new(g);
        let eps = 1e-5;
        for &(x, t) in &[(0.1, 0.0), (0.37, 0.2), (0.81, 0.9), (0.5, 0.45)] {
            let mut up = [0.0; 3];
            let mut um = [0.0; 3];
            let mut u = [0.0; 3];
            sw_manufactured(x, t, &mut u);
            sw_manufactured(x, t + eps, &mut up);
            sw_manufactured(x, t - eps, &mut um);
            let ut: Vec<f64> = (0..3).map(|k| (up[k] - um[k]) / (2.0 * eps)).collect();
            sw_manufactured(x + eps, t, &mut up);
            sw_manufactured(x - eps, t, &mut um);
            let mut fp = [0.0; 3];
            let mut fm = [0.0; 3];
            sw.flux(&up, 0, &mut fp);
            sw.flux(&um, 0, &mut fm);
            let gx: Vec<f64> = (0..3).map(|k| (up[k] - um[k]) / (2.0 * eps)).collect();
            let mut bg = [0.0; 3];
            sw.apply_noncons_b(&u, 0, &gx, &mut bg);
            let mut s = [0.0; 3];
            sw_manufactured_source(g, x, t, &mut s);
            for k in 0..3 {
                let res = ut[k] + (fp[k] - fm[k]) / (2.0 * eps) + bg[k] - s[k];
                assert!(res.abs() < 1e-7, "var {k} at ({x}, {t}): {res}");
            }
        }
    }

    #[test]
    fn burgers_exact_satisfies_characteristics() {
        for &t in &[0.0, 0.2, 0.5, 0.6] {
            for i in 0..20 {
                let x = i as f64 * 0.1;
                let u = burgers_exact(x, t);
                let xi = x - u * t;
                assert!((u - burgers_initial(xi)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn norms_examples() {
        let basis = Basis::new(3).unwrap();
        let mesh = CartesianMesh::interval(1, (0.0, 1.0), true).unwrap();
        let field = StateField::from_fn(&mesh, &basis, 1, |x, u| u[0] = x[0]);
        let n = error_norms(&field, &mesh, &basis, |_, u| u[0] = 0.0);
        assert!((n.l2[0] - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
        let same = error_norms(&field, &mesh, &basis, |x, u| u[0] = x[0]);
        assert_eq!(same.l1[0], 0.0);
        let mesh4 = CartesianMesh::interval(4, (0.0, 1.0), true).unwrap();
        let f4 = StateField::from_fn(&mesh4, &basis, 1, |_, u| u[0] = 0.25);
        let n4 = error_norms(&f4, &mesh4, &basis, |_, u| u[0] = 0.0);
        assert!((n4.l1[0] - 0.25).abs() < 1e-15);
        assert!((n4.l2[0] - 0.25).abs() < 1e-15);
        assert_eq!(n4.linf[0], 0.25);
    }

    #[test]
    fn initial_states_admissible() {
        let basis = Basis::new(3).unwrap();
        for p in ProblemId::ALL {
            let setup = ProblemSetup::new(p, 8, p.default_ny(8), Params::default()).unwrap();
            let field = setup.initial_state(&basis);
            for node in field.data.chunks_exact(field.layout.nvars) {
                assert!(setup.model.check_admissible(node).is_ok(), "{p}");
            }
        }
    }
}

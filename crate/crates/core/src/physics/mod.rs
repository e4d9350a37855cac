//! Equation systems of the form `u_t + f(u)_x + B(u) g(u)_x = 0`.
//!
//! Models expose unchecked pointwise kernels (fluxes, non-conservative
//! products, wave speeds, two-point fluxes) for the element loops, plus an
//! admissibility predicate. The free functions in this module are the
//! checked entry points.

mod burgers;
mod euler;
mod shallow_water;
mod advection;

pub use advection::LinearAdvection;
pub use burgers::Burgers;
pub use euler::{Euler, Euler1d, Euler2d};
pub use shallow_water::ShallowWater;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Upper bound on the number of variables of any model.
pub const MAX_VARS: usize = 4;

/// Stack storage for one state or flux vector.
pub type Vars = [f64; MAX_VARS];

/// A state that violates the model's admissibility set.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("inadmissible state ({reason}): {values:?}")]
pub struct Inadmissible {
    pub reason: &'static str,
    pub values: Vec<f64>,
}

impl Inadmissible {
    pub fn new(reason: &'static str, u: &[f64]) -> Self {
        Inadmissible {
            reason,
            values: u.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhysicsError {
    #[error(transparent)]
    Inadmissible(#[from] Inadmissible),
    #[error("logarithmic mean needs positive arguments (got {0}, {1})")]
    LogMeanDomain(f64, f64),
    #[error("{model} has no {kind} two-point flux")]
    Unsupported { model: &'static str, kind: VolumeFlux },
}

/// Two-point flux used in the element volume terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VolumeFlux {
    /// Arithmetic mean of the physical fluxes; flux differencing with it is
    /// the plain collocated derivative.
    Central,
    /// Entropy-conservative flux.
    Ec,
    /// Kinetic-energy-preserving flux built from arithmetic means.
    Kep,
}

impl VolumeFlux {
    pub const ALL: [VolumeFlux; 3] = [VolumeFlux::Central, VolumeFlux::Ec, VolumeFlux::Kep];

    pub fn as_str(self) -> &'static str {
        match self {
            VolumeFlux::Central => "central",
            VolumeFlux::Ec => "ec",
            VolumeFlux::Kep => "kep",
        }
    }
}

impl fmt::Display for VolumeFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VolumeFlux {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "central" => Ok(VolumeFlux::Central),
            "ec" => Ok(VolumeFlux::Ec),
            "kep" => Ok(VolumeFlux::Kep),
            _ => Err(format!("unknown volume_flux `{s}` (expected central, ec or kep)")),
        }
    }
}

/// Numerical flux at element interfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceFlux {
    Rusanov,
    /// Entropy-conservative two-point flux without dissipation. Only meant
    /// for entropy-drift measurements.
    EcTest,
}

impl SurfaceFlux {
    pub fn as_str(self) -> &'static str {
        match self {
            SurfaceFlux::Rusanov => "rusanov",
            SurfaceFlux::EcTest => "ec_test",
        }
    }
}

impl FromStr for SurfaceFlux {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rusanov" => Ok(SurfaceFlux::Rusanov),
            "ec_test" => Ok(SurfaceFlux::EcTest),
            _ => Err(format!("unknown surface_flux `{s}` (expected rusanov or ec_test)")),
        }
    }
}

/// A hyperbolic system `u_t + Σ_d f_d(u)_{x_d} + Σ_d B_d(u) g(u)_{x_d} = 0`.
///
/// All slices have length [`Model::nvars`]; kernels assume admissible input.
pub trait Model: Send + Sync {
    fn name(&self) -> &'static str;

    fn nvars(&self) -> usize;

    fn ndims(&self) -> usize;

    fn var_names(&self) -> &'static [&'static str];

    fn check_admissible(&self, u: &[f64]) -> Result<(), Inadmissible>;

    fn flux(&self, u: &[f64], dir: usize, out: &mut [f64]);

    /// Spectral radius of `f'(u) + B(u) g'(u)` in direction `dir`.
    fn max_wave_speed(&self, u: &[f64], dir: usize) -> f64;

    fn has_noncons(&self) -> bool {
        false
    }

    /// The non-conservative argument `g(u)`.
    fn noncons_g(&self, u: &[f64], out: &mut [f64]) {
        out.copy_from_slice(u);
    }

    /// `out = B_dir(u) v`.
    fn apply_noncons_b(&self, _u: &[f64], _dir: usize, _v: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    /// Non-symmetric two-point non-conservative term `(B g)_NS(u_p, u_q)`.
    /// The default pairing is `B(u_p) g(u_q)`.
    fn noncons_two_point(&self, up: &[f64], uq: &[f64], dir: usize, out: &mut [f64]) {
        let mut g = [0.0; MAX_VARS];
        let m = self.nvars();
        self.noncons_g(uq, &mut g[..m]);
        self.apply_noncons_b(up, dir, &g[..m], out);
    }

    fn supports(&self, kind: VolumeFlux) -> bool {
        kind == VolumeFlux::Central
    }

    /// Symmetric two-point flux of the given kind. Callers check
    /// [`Model::supports`] first; unsupported kinds fall back to central.
    fn two_point_flux(&self, kind: VolumeFlux, ul: &[f64], ur: &[f64], dir: usize, out: &mut [f64]) {
        let _ = kind;
        central_flux(self, ul, ur, dir, out);
    }

    /// Variables excluded from interface dissipation (static coefficients).
    fn is_static(&self, _var: usize) -> bool {
        false
    }

    fn entropy(&self, u: &[f64]) -> f64;

    fn entropy_variables(&self, u: &[f64], out: &mut [f64]);

    /// Entropy flux potential `ψ = w·f - q` in direction `dir`.
    fn entropy_potential(&self, u: &[f64], dir: usize) -> f64;

    fn kinetic_energy(&self, u: &[f64]) -> f64;
}

/// Arithmetic mean of the physical fluxes.
pub fn central_flux<M: Model + ?Sized>(model: &M, ul: &[f64], ur: &[f64], dir: usize, out: &mut [f64]) {
    let m = model.nvars();
    let mut fr = [0.0; MAX_VARS];
    model.flux(ul, dir, out);
    model.flux(ur, dir, &mut fr[..m]);
    for (o, r) in out.iter_mut().zip(&fr[..m]) {
        *o = 0.5 * (*o + r);
    }
}

/// Logarithmic mean `(b - a) / ln(b / a)` without the checks of [`log_mean`].
#[inline]
pub fn ln_mean(a: f64, b: f64) -> f64 {
    let s = a + b;
    let d = b - a;
    let zeta = d * d / (s * s);
    if zeta < 1e-4 {
        // Series of atanh: L = (a + b) / (2 (1 + ζ/3 + ζ²/5 + ζ³/7)).
        s / (2.0 + zeta * (2.0 / 3.0 + zeta * (2.0 / 5.0 + zeta * (2.0 / 7.0))))
    } else {
        d / (b / a).ln()
    }
}

pub fn log_mean(a: f64, b: f64) -> Result<f64, PhysicsError> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(PhysicsError::LogMeanDomain(a, b));
    }
    Ok(ln_mean(a, b))
}

/// Physical flux with an admissibility check.
pub fn physical_flux(model: &dyn Model, u: &[f64], dir: usize) -> Result<Vec<f64>, PhysicsError> {
    model.check_admissible(u)?;
    let mut out = vec![0.0; model.nvars()];
    model.flux(u, dir, &mut out);
    Ok(out)
}

/// Two-point volume flux with admissibility and availability checks.
pub fn two_point_flux(
    model: &dyn Model,
    kind: VolumeFlux,
    ul: &[f64],
    ur: &[f64],
    dir: usize,
) -> Result<Vec<f64>, PhysicsError> {
    if !model.supports(kind) {
        return Err(PhysicsError::Unsupported {
            model: model.name(),
            kind,
        });
    }
    model.check_admissible(ul)?;
    model.check_admissible(ur)?;
    let mut out = vec![0.0; model.nvars()];
    model.two_point_flux(kind, ul, ur, dir, &mut out);
    Ok(out)
}

/// Interface wave-speed estimate: the larger spectral radius of the two states.
#[inline]
pub fn interface_wave_speed<M: Model + ?Sized>(model: &M, ul: &[f64], ur: &[f64], dir: usize) -> f64 {
    model.max_wave_speed(ul, dir).max(model.max_wave_speed(ur, dir))
}

/// Adds `-λ/2 (ur - ul)` to `out`, skipping static variables.
#[inline]
pub fn add_rusanov_dissipation<M: Model + ?Sized>(model: &M, lambda: f64, ul: &[f64], ur: &[f64], out: &mut [f64]) {
    for (k, o) in out.iter_mut().enumerate() {
        if !model.is_static(k) {
            *o -= 0.5 * lambda * (ur[k] - ul[k]);
        }
    }
}

/// Rusanov flux `½(f(ul) + f(ur)) - λ/2 (ur - ul)` (conservative part only).
pub fn rusanov_surface_flux(model: &dyn Model, ul: &[f64], ur: &[f64], dir: usize) -> Result<Vec<f64>, PhysicsError> {
    model.check_admissible(ul)?;
    model.check_admissible(ur)?;
    let mut out = vec![0.0; model.nvars()];
    central_flux(model, ul, ur, dir, &mut out);
    let lambda = interface_wave_speed(model, ul, ur, dir);
    add_rusanov_dissipation(model, lambda, ul, ur, &mut out);
    Ok(out)
}

/// Entropy, entropy variables and flux potential of an admissible state.
pub fn entropy_pair(model: &dyn Model, u: &[f64], dir: usize) -> Result<(f64, Vec<f64>, f64), PhysicsError> {
    model.check_admissible(u)?;
    let mut w = vec![0.0; model.nvars()];
    model.entropy_variables(u, &mut w);
    Ok((model.entropy(u), w, model.entropy_potential(u, dir)))
}

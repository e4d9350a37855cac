//! One-dimensional shallow water equations with bottom topography.
//!
//! The state is augmented to `(h, hv, b)`; the bottom `b` has zero flux and
//! enters the momentum equation only through the non-conservative product
//! `g h b_x`, i.e. `B(u)` has the single entry `g h` in the momentum row and
//! bottom column, and `g(u) = u`.

use super::{central_flux, Inadmissible, Model, VolumeFlux};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShallowWater {
    pub gravity: f64,
}

impl ShallowWater {
    pub fn new(gravity: f64) -> Self {
        ShallowWater { gravity }
    }

    /// Entropy-conservative flux of the conservative part (zero bottom flux).
    #[inline]
    fn ec_flux(&self, ul: &[f64], ur: &[f64], out: &mut [f64]) {
        let vl = ul[1] / ul[0];
        let vr = ur[1] / ur[0];
        let q_avg = 0.5 * (ul[1] + ur[1]);
        out[0] = q_avg;
        out[1] = q_avg * 0.5 * (vl + vr) + 0.5 * self.gravity * ul[0] * ur[0];
        out[2] = 0.0;
    }
}

impl Model for ShallowWater {
    fn name(&self) -> &'static str {
        "shallow_water"
    }

    fn nvars(&self) -> usize {
        3
    }

    fn ndims(&self) -> usize {
        1
    }

    fn var_names(&self) -> &'static [&'static str] {
        &["h", "hv", "b"]
    }

    fn check_admissible(&self, u: &[f64]) -> Result<(), Inadmissible> {
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Inadmissible::new("non-finite", u));
        }
        if u[0] <= 0.0 {
            return Err(Inadmissible::new("water height", u));
        }
        Ok(())
    }

    #[inline]
    fn flux(&self, u: &[f64], _dir: usize, out: &mut [f64]) {
        let v = u[1] / u[0];
        out[0] = u[1];
        out[1] = u[1] * v + 0.5 * self.gravity * u[0] * u[0];
        out[2] = 0.0;
    }

    #[inline]
    fn max_wave_speed(&self, u: &[f64], _dir: usize) -> f64 {
        (u[1] / u[0]).abs() + (self.gravity * u[0]).sqrt()
    }

    fn has_noncons(&self) -> bool {
        true
    }

    #[inline]
    fn apply_noncons_b(&self, u: &[f64], _dir: usize, v: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = self.gravity * u[0] * v[2];
        out[2] = 0.0;
    }

    #[inline]
    fn noncons_two_point(&self, up: &[f64], uq: &[f64], _dir: usize, out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = self.gravity * up[0] * uq[2];
        out[2] = 0.0;
    }

    fn supports(&self, kind: VolumeFlux) -> bool {
        kind != VolumeFlux::Kep
    }

    #[inline]
    fn two_point_flux(&self, kind: VolumeFlux, ul: &[f64], ur: &[f64], dir: usize, out: &mut [f64]) {
        match kind {
            VolumeFlux::Ec => self.ec_flux(ul, ur, out),
            _ => central_flux(self, ul, ur, dir, out),
        }
    }

    fn is_static(&self, var: usize) -> bool {
        var == 2
    }

    fn entropy(&self, u: &[f64]) -> f64 {
        let (h, b) = (u[0], u[2]);
        let v = u[1] / h;
        0.5 * h * v * v + 0.5 * self.gravity * h * h + self.gravity * h * b
    }

    fn entropy_variables(&self, u: &[f64], out: &mut [f64]) {
        let (h, b) = (u[0], u[2]);
        let v = u[1] / h;
        out[0] = self.gravity * (h + b) - 0.5 * v * v;
        out[1] = v;
        out[2] = self.gravity * h;
    }

    fn entropy_potential(&self, u: &[f64], _dir: usize) -> f64 {
        let v = u[1] / u[0];
        0.5 * self.gravity * u[0] * u[0] * v
    }

    fn kinetic_energy(&self, u: &[f64]) -> f64 {
        0.5 * u[1] * u[1] / u[0]
    }
}

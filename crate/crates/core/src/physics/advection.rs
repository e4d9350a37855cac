use super::{central_flux, Inadmissible, Model, VolumeFlux};

/// Scalar linear advection `u_t + (a u)_x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearAdvection {
    pub speed: f64,
}

impl Model for LinearAdvection {
    fn name(&self) -> &'static str {
        "advection"
    }

    fn nvars(&self) -> usize {
        1
    }

    fn ndims(&self) -> usize {
        1
    }

    fn var_names(&self) -> &'static [&'static str] {
        &["u"]
    }

    fn check_admissible(&self, u: &[f64]) -> Result<(), Inadmissible> {
        if u[0].is_finite() {
            Ok(())
        } else {
            Err(Inadmissible::new("non-finite", u))
        }
    }

    fn flux(&self, u: &[f64], _dir: usize, out: &mut [f64]) {
        out[0] = self.speed * u[0];
    }

    fn max_wave_speed(&self, _u: &[f64], _dir: usize) -> f64 {
        self.speed.abs()
    }

    // The central flux is entropy conservative for η = u²/2.
    fn supports(&self, kind: VolumeFlux) -> bool {
        kind != VolumeFlux::Kep
    }

    fn two_point_flux(&self, _kind: VolumeFlux, ul: &[f64], ur: &[f64], dir: usize, out: &mut [f64]) {
        central_flux(self, ul, ur, dir, out);
    }

    fn entropy(&self, u: &[f64]) -> f64 {
        0.5 * u[0] * u[0]
    }

    fn entropy_variables(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }

    fn entropy_potential(&self, u: &[f64], _dir: usize) -> f64 {
        0.5 * self.speed * u[0] * u[0]
    }

    fn kinetic_energy(&self, u: &[f64]) -> f64 {
        0.5 * u[0] * u[0]
    }
}

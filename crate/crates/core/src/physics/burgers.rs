use super::{central_flux, Inadmissible, Model, VolumeFlux};

/// Inviscid Burgers' equation `u_t + (u²/2)_x = 0`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Burgers;

impl Burgers {
    /// Tadmor's entropy-conservative flux for η = u²/2.
    #[inline]
    pub fn ec_flux(ul: f64, ur: f64) -> f64 {
        (ul * ul + ul * ur + ur * ur) / 6.0
    }
}

impl Model for Burgers {
    fn name(&self) -> &'static str {
        "burgers"
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

    #[inline]
    fn flux(&self, u: &[f64], _dir: usize, out: &mut [f64]) {
        out[0] = 0.5 * u[0] * u[0];
    }

    #[inline]
    fn max_wave_speed(&self, u: &[f64], _dir: usize) -> f64 {
        u[0].abs()
    }

    fn supports(&self, kind: VolumeFlux) -> bool {
        kind != VolumeFlux::Kep
    }

    fn two_point_flux(&self, kind: VolumeFlux, ul: &[f64], ur: &[f64], dir: usize, out: &mut [f64]) {
        match kind {
            VolumeFlux::Ec => out[0] = Self::ec_flux(ul[0], ur[0]),
            _ => central_flux(self, ul, ur, dir, out),
        }
    }

    fn entropy(&self, u: &[f64]) -> f64 {
        0.5 * u[0] * u[0]
    }

    fn entropy_variables(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }

    fn entropy_potential(&self, u: &[f64], _dir: usize) -> f64 {
        // w f - q with q = u³/3
        u[0] * u[0] * u[0] / 6.0
    }

    fn kinetic_energy(&self, u: &[f64]) -> f64 {
        0.5 * u[0] * u[0]
    }
}

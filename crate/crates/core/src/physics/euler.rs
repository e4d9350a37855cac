//! Compressible Euler equations for an ideal gas.
//!
//! Conserved variables are `(ρ, ρv_1, .., ρv_D, E)`.

use super::{central_flux, ln_mean, Inadmissible, Model, VolumeFlux};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euler<const D: usize> {
    pub gamma: f64,
}

pub type Euler1d = Euler<1>;
pub type Euler2d = Euler<2>;

struct Primitive<const D: usize> {
    rho: f64,
    v: [f64; D],
    p: f64,
}

impl<const D: usize> Euler<D> {
    pub fn new(gamma: f64) -> Self {
        Euler { gamma }
    }

    /// Conserved state from `(ρ, v_1, .., v_D, p)`.
    pub fn from_primitive(&self, prim: &[f64]) -> Vec<f64> {
        let rho = prim[0];
        let p = prim[D + 1];
        let mut u = vec![0.0; D + 2];
        u[0] = rho;
        let mut v2 = 0.0;
        for i in 0..D {
            u[1 + i] = rho * prim[1 + i];
            v2 += prim[1 + i] * prim[1 + i];
        }
        u[D + 1] = p / (self.gamma - 1.0) + 0.5 * rho * v2;
        u
    }

    /// `(ρ, v_1, .., v_D, p)` from a conserved state.
    pub fn to_primitive(&self, u: &[f64]) -> Vec<f64> {
        let q = self.primitive(u);
        let mut out = Vec::with_capacity(D + 2);
        out.push(q.rho);
        out.extend_from_slice(&q.v);
        out.push(q.p);
        out
    }

    pub fn pressure(&self, u: &[f64]) -> f64 {
        self.primitive(u).p
    }

    #[inline]
    fn primitive(&self, u: &[f64]) -> Primitive<D> {
        let rho = u[0];
        let mut v = [0.0; D];
        let mut v2 = 0.0;
        for i in 0..D {
            v[i] = u[1 + i] / rho;
            v2 += v[i] * v[i];
        }
        let p = (self.gamma - 1.0) * (u[D + 1] - 0.5 * rho * v2);
        Primitive { rho, v, p }
    }

    /// Ranocha's entropy-conservative and kinetic-energy-preserving flux.
    #[inline]
    fn ranocha_flux(&self, ul: &[f64], ur: &[f64], dir: usize, out: &mut [f64]) {
        let l = self.primitive(ul);
        let r = self.primitive(ur);
        let rho_mean = ln_mean(l.rho, r.rho);
        // 1 / logmean(ρ/p), written without the divisions.
        let inv_rho_p_mean = l.p * r.p / ln_mean(l.rho * r.p, r.rho * l.p);
        let p_avg = 0.5 * (l.p + r.p);
        let mut vel_prod = 0.0;
        for i in 0..D {
            vel_prod += l.v[i] * r.v[i];
        }
        let vn_avg = 0.5 * (l.v[dir] + r.v[dir]);
        let mass = rho_mean * vn_avg;
        out[0] = mass;
        for i in 0..D {
            out[1 + i] = mass * 0.5 * (l.v[i] + r.v[i]);
        }
        out[1 + dir] += p_avg;
        out[D + 1] = mass * (0.5 * vel_prod + inv_rho_p_mean / (self.gamma - 1.0))
            + 0.5 * (l.p * r.v[dir] + r.p * l.v[dir]);
    }

    /// Kennedy-Gruber flux: arithmetic means of ρ, v, p and E/ρ.
    #[inline]
    fn kennedy_gruber_flux(&self, ul: &[f64], ur: &[f64], dir: usize, out: &mut [f64]) {
        let l = self.primitive(ul);
        let r = self.primitive(ur);
        let rho_avg = 0.5 * (l.rho + r.rho);
        let p_avg = 0.5 * (l.p + r.p);
        let e_avg = 0.5 * (ul[D + 1] / l.rho + ur[D + 1] / r.rho);
        let vn_avg = 0.5 * (l.v[dir] + r.v[dir]);
        let mass = rho_avg * vn_avg;
        out[0] = mass;
        for i in 0..D {
            out[1 + i] = mass * 0.5 * (l.v[i] + r.v[i]);
        }
        out[1 + dir] += p_avg;
        out[D + 1] = (rho_avg * e_avg + p_avg) * vn_avg;
    }
}

const NAMES_1D: &[&str] = &["rho", "rho_v1", "E"];
const NAMES_2D: &[&str] = &["rho", "rho_v1", "rho_v2", "E"];

impl<const D: usize> Model for Euler<D> {
    fn name(&self) -> &'static str {
        if D == 1 {
            "euler1d"
        } else {
            "euler2d"
        }
    }

    fn nvars(&self) -> usize {
        D + 2
    }

    fn ndims(&self) -> usize {
        D
    }

    fn var_names(&self) -> &'static [&'static str] {
        if D == 1 {
            NAMES_1D
        } else {
            NAMES_2D
        }
    }

    fn check_admissible(&self, u: &[f64]) -> Result<(), Inadmissible> {
        if u.iter().any(|x| !x.is_finite()) {
            return Err(Inadmissible::new("non-finite", u));
        }
        if u[0] <= 0.0 {
            return Err(Inadmissible::new("density", u));
        }
        if self.primitive(u).p <= 0.0 {
            return Err(Inadmissible::new("pressure", u));
        }
        Ok(())
    }

    #[inline]
    fn flux(&self, u: &[f64], dir: usize, out: &mut [f64]) {
        let q = self.primitive(u);
        let vn = q.v[dir];
        out[0] = u[0] * vn;
        for i in 0..D {
            out[1 + i] = u[1 + i] * vn;
        }
        out[1 + dir] += q.p;
        out[D + 1] = (u[D + 1] + q.p) * vn;
    }

    #[inline]
    fn max_wave_speed(&self, u: &[f64], dir: usize) -> f64 {
        let q = self.primitive(u);
        q.v[dir].abs() + (self.gamma * q.p / q.rho).sqrt()
    }

    fn supports(&self, _kind: VolumeFlux) -> bool {
        true
    }

    #[inline]
    fn two_point_flux(&self, kind: VolumeFlux, ul: &[f64], ur: &[f64], dir: usize, out: &mut [f64]) {
        match kind {
            VolumeFlux::Central => central_flux(self, ul, ur, dir, out),
            VolumeFlux::Ec => self.ranocha_flux(ul, ur, dir, out),
            VolumeFlux::Kep => self.kennedy_gruber_flux(ul, ur, dir, out),
        }
    }

    fn entropy(&self, u: &[f64]) -> f64 {
        let q = self.primitive(u);
        let s = q.p.ln() - self.gamma * q.rho.ln();
        -q.rho * s / (self.gamma - 1.0)
    }

    fn entropy_variables(&self, u: &[f64], out: &mut [f64]) {
        let q = self.primitive(u);
        let s = q.p.ln() - self.gamma * q.rho.ln();
        let v2: f64 = q.v.iter().map(|v| v * v).sum();
        let beta = q.rho / q.p;
        out[0] = (self.gamma - s) / (self.gamma - 1.0) - 0.5 * beta * v2;
        for i in 0..D {
            out[1 + i] = beta * q.v[i];
        }
        out[D + 1] = -beta;
    }

    fn entropy_potential(&self, u: &[f64], dir: usize) -> f64 {
        u[1 + dir]
    }

    fn kinetic_energy(&self, u: &[f64]) -> f64 {
        let m2: f64 = u[1..=D].iter().map(|m| m * m).sum();
        0.5 * m2 / u[0]
    }
}

#![allow(dead_code)]

//! Independent oracles shared by the integration tests and the
//! acceptance suite.

use crkfr::tableau::ButcherTableau;

/// Rusanov flux for Burgers.
pub fn burgers_rusanov(ul: f64, ur: f64) -> f64 {
    let lam = ul.abs().max(ur.abs());
    0.25 * (ul * ul + ur * ur) - 0.5 * lam * (ur - ul)
}

/// `du/dt` of first-order periodic FV for Burgers.
pub fn fv_burgers_rhs(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    let flux: Vec<f64> = (0..n).map(|i| burgers_rusanov(u[i], u[(i + 1) % n])).collect();
    (0..n).map(|i| -(flux[i] - flux[(i + n - 1) % n]) / dx).collect()
}

/// `d/dt (h, hv, b)` of first-order periodic FV for shallow water with the
/// two-sided non-conservative fluxes `B(u_i) ½ (g(u_i) + g(u_{i±1}))`.
pub fn fv_shallow_water_rhs(u: &[[f64; 3]], dx: f64, g: f64) -> Vec<[f64; 3]> {
    let n = u.len();
    let phys = |s: &[f64; 3]| {
        let v = s[1] / s[0];
        [s[1], s[1] * v + 0.5 * g * s[0] * s[0]]
    };
    let speed = |s: &[f64; 3]| (s[1] / s[0]).abs() + (g * s[0]).sqrt();
    let flux: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let (l, r) = (&u[i], &u[(i + 1) % n]);
            let (fl, fr) = (phys(l), phys(r));
            let lam = speed(l).max(speed(r));
            [
                0.5 * (fl[0] + fr[0]) - 0.5 * lam * (r[0] - l[0]),
                0.5 * (fl[1] + fr[1]) - 0.5 * lam * (r[1] - l[1]),
            ]
        })
        .collect();
    (0..n)
        .map(|i| {
            let im = (i + n - 1) % n;
            let ip = (i + 1) % n;
            let bterm = g * u[i][0] * 0.5 * (u[ip][2] - u[im][2]);
            [
                -(flux[i][0] - flux[im][0]) / dx,
                -(flux[i][1] - flux[im][1] + bterm) / dx,
                0.0,
            ]
        })
        .collect()
}

/// Explicit Runge-Kutta step of `du/dt = rhs(u)` on flat vectors.
pub fn rk_step(tab: &ButcherTableau, u: &[f64], dt: f64, rhs: impl Fn(&[f64]) -> Vec<f64>) -> Vec<f64> {
    let s = tab.stages();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(s);
    for i in 0..s {
        let mut ui = u.to_vec();
        for (j, kj) in k.iter().enumerate() {
            let a = tab.a(i, j);
            for (x, d) in ui.iter_mut().zip(kj) {
                *x += dt * a * d;
            }
        }
        k.push(rhs(&ui));
    }
    let mut out = u.to_vec();
    for (kj, &bj) in k.iter().zip(tab.b()) {
        for (x, d) in out.iter_mut().zip(kj) {
            *x += dt * bj * d;
        }
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn flatten3(u: &[[f64; 3]]) -> Vec<f64> {
    u.iter().flat_map(|s| s.iter().copied()).collect()
}

pub fn unflatten3(u: &[f64]) -> Vec<[f64; 3]> {
    u.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect()
}

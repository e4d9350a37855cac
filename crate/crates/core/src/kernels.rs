//! Element-local operators along one coordinate line of solution points.
//!
//! A line holds `n = N + 1` nodal states stored node-major (`nvars` values
//! per node). Volume and surface operators accumulate into `out` (same
//! layout) in physical units, i.e. scaled by `1 / dx`.

use crate::basis::{Basis, Side, MAX_NODES};
use crate::physics::{Model, VolumeFlux, Vars, MAX_VARS};

const LINE: usize = MAX_NODES * MAX_VARS;

/// Collocated flux derivative `(1/dx) Σ_q D_pq f(u_q)`.
pub fn local_flux_derivative<M: Model + ?Sized>(
    basis: &Basis,
    dx: f64,
    line: &[f64],
    model: &M,
    dir: usize,
    out: &mut [f64],
) {
    let m = model.nvars();
    let n = basis.len();
    let mut f = [0.0; LINE];
    for q in 0..n {
        model.flux(&line[q * m..(q + 1) * m], dir, &mut f[q * m..(q + 1) * m]);
    }
    apply_derivative(basis, 1.0 / dx, &f[..n * m], m, out);
}

/// `out_p += scale Σ_q D_pq v_q`.
fn apply_derivative(basis: &Basis, scale: f64, values: &[f64], m: usize, out: &mut [f64]) {
    let d = basis.diff();
    for p in 0..basis.len() {
        let row = d.row(p);
        let o = &mut out[p * m..(p + 1) * m];
        for (q, &dpq) in row.iter().enumerate() {
            let v = &values[q * m..(q + 1) * m];
            for k in 0..m {
                o[k] += scale * dpq * v[k];
            }
        }
    }
}

/// Flux-differencing volume term `(1/dx) Σ_q 2 D_pq f_S(u_p, u_q)` for a
/// symmetric two-point flux; each pair is evaluated once.
pub fn fluxdiff_volume<M: Model + ?Sized>(
    basis: &Basis,
    dx: f64,
    line: &[f64],
    model: &M,
    kind: VolumeFlux,
    dir: usize,
    out: &mut [f64],
) {
    let m = model.nvars();
    let n = basis.len();
    let d = basis.diff();
    let scale = 2.0 / dx;
    let mut fs: Vars = [0.0; MAX_VARS];
    for p in 0..n {
        let up = &line[p * m..(p + 1) * m];
        // f_S(u, u) = f(u)
        model.flux(up, dir, &mut fs[..m]);
        let dpp = scale * d[(p, p)];
        for k in 0..m {
            out[p * m + k] += dpp * fs[k];
        }
        for q in p + 1..n {
            let uq = &line[q * m..(q + 1) * m];
            model.two_point_flux(kind, up, uq, dir, &mut fs[..m]);
            let dpq = scale * d[(p, q)];
            let dqp = scale * d[(q, p)];
            for k in 0..m {
                out[p * m + k] += dpq * fs[k];
                out[q * m + k] += dqp * fs[k];
            }
        }
    }
}

/// `B(u_p) (1/dx) Σ_q D_pq g(u_q)`.
pub fn noncons_local_derivative<M: Model + ?Sized>(
    basis: &Basis,
    dx: f64,
    line: &[f64],
    model: &M,
    dir: usize,
    out: &mut [f64],
) {
    let m = model.nvars();
    let n = basis.len();
    let mut g = [0.0; LINE];
    for q in 0..n {
        model.noncons_g(&line[q * m..(q + 1) * m], &mut g[q * m..(q + 1) * m]);
    }
    let mut dg = [0.0; LINE];
    apply_derivative(basis, 1.0 / dx, &g[..n * m], m, &mut dg[..n * m]);
    let mut bdg: Vars = [0.0; MAX_VARS];
    for p in 0..n {
        model.apply_noncons_b(&line[p * m..(p + 1) * m], dir, &dg[p * m..(p + 1) * m], &mut bdg[..m]);
        for k in 0..m {
            out[p * m + k] += bdg[k];
        }
    }
}

/// Non-conservative flux differencing `(1/dx) Σ_q D_pq (B g)_NS(u_p, u_q)`.
pub fn fluxdiff_noncons_volume<M: Model + ?Sized>(
    basis: &Basis,
    dx: f64,
    line: &[f64],
    model: &M,
    dir: usize,
    out: &mut [f64],
) {
    let m = model.nvars();
    let n = basis.len();
    let d = basis.diff();
    let mut ns: Vars = [0.0; MAX_VARS];
    for p in 0..n {
        let up = &line[p * m..(p + 1) * m];
        for q in 0..n {
            let dpq = d[(p, q)] / dx;
            if dpq == 0.0 {
                continue;
            }
            model.noncons_two_point(up, &line[q * m..(q + 1) * m], dir, &mut ns[..m]);
            for k in 0..m {
                out[p * m + k] += dpq * ns[k];
            }
        }
    }
}

/// Volume residual of one line for the configured two-point flux: the
/// collocated derivative for [`VolumeFlux::Central`], flux differencing
/// otherwise, plus the matching non-conservative term.
pub fn volume_terms<M: Model + ?Sized>(
    basis: &Basis,
    dx: f64,
    line: &[f64],
    model: &M,
    kind: VolumeFlux,
    dir: usize,
    out: &mut [f64],
) {
    match kind {
        VolumeFlux::Central => local_flux_derivative(basis, dx, line, model, dir, out),
        _ => fluxdiff_volume(basis, dx, line, model, kind, dir, out),
    }
    if model.has_noncons() {
        match kind {
            VolumeFlux::Central => noncons_local_derivative(basis, dx, line, model, dir, out),
            _ => fluxdiff_noncons_volume(basis, dx, line, model, dir, out),
        }
    }
}

/// FR correction from both faces of a line:
/// `(1/dx) ([num⁻ - tot⁻]_right dgR_p + [num⁺ - tot⁺]_left dgL_p)`.
///
/// `left_*` belong to the element's left face (the `+` side of x_{e-1/2}),
/// `right_*` to its right face (the `-` side of x_{e+1/2}).
#[allow(clippy::too_many_arguments)]
pub fn surface_correction(
    basis: &Basis,
    dx: f64,
    nvars: usize,
    left_num: &[f64],
    left_total: &[f64],
    right_num: &[f64],
    right_total: &[f64],
    out: &mut [f64],
) {
    let m = nvars;
    let mut jl: Vars = [0.0; MAX_VARS];
    let mut jr: Vars = [0.0; MAX_VARS];
    for k in 0..m {
        jl[k] = (left_num[k] - left_total[k]) / dx;
        jr[k] = (right_num[k] - right_total[k]) / dx;
    }
    for (p, (&gl, &gr)) in basis.dg_left().iter().zip(basis.dg_right()).enumerate() {
        if gl == 0.0 && gr == 0.0 {
            continue;
        }
        for k in 0..m {
            out[p * m + k] += gl * jl[k] + gr * jr[k];
        }
    }
}

/// Trace data of one element line end.
///
/// For the multi-stage scheme all fields describe the current stage. For the
/// compact scheme `avg_u`, `flux` and `noncons` are `b`-weighted time
/// averages while `u` stays the trace at t^n.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FaceSide {
    /// Solution trace entering `B(u)` of the interface non-conservative flux.
    pub u: Vars,
    /// Solution trace used in the dissipation and in `g`-averages.
    pub avg_u: Vars,
    /// Extrapolated conservative flux polynomial.
    pub flux: Vars,
    /// Extrapolated non-conservative term `B(u±) g(u±)`.
    pub noncons: Vars,
}

impl FaceSide {
    /// `f^tot = flux + noncons`.
    pub fn total(&self) -> Vars {
        let mut t = self.flux;
        for (a, b) in t.iter_mut().zip(&self.noncons) {
            *a += b;
        }
        t
    }
}

/// Adds `weight` times the traces of one line (state, flux polynomial and
/// `B(u±) g(u±)`) into `sides[0]` (ξ = 0) and `sides[1]` (ξ = 1).
pub fn add_face_traces<M: Model + ?Sized>(
    basis: &Basis,
    line: &[f64],
    model: &M,
    dir: usize,
    weight: f64,
    sides: &mut [FaceSide; 2],
) {
    let m = model.nvars();
    let mut f: Vars = [0.0; MAX_VARS];
    let mut g: Vars = [0.0; MAX_VARS];
    let mut bg: Vars = [0.0; MAX_VARS];
    for (side, fs) in [Side::Left, Side::Right].into_iter().zip(sides.iter_mut()) {
        let mut trace: Vars = [0.0; MAX_VARS];
        for (q, &l) in basis.extrapolation(side).iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            let uq = &line[q * m..(q + 1) * m];
            model.flux(uq, dir, &mut f[..m]);
            for k in 0..m {
                trace[k] += l * uq[k];
                fs.flux[k] += weight * l * f[k];
            }
        }
        for k in 0..m {
            fs.avg_u[k] += weight * trace[k];
        }
        if model.has_noncons() {
            model.noncons_g(&trace[..m], &mut g[..m]);
            model.apply_noncons_b(&trace[..m], dir, &g[..m], &mut bg[..m]);
            for k in 0..m {
                fs.noncons[k] += weight * bg[k];
            }
        }
    }
}

/// Instantaneous face data of one line: traces, extrapolated flux and
/// totals `f^tot± = f± + B(u±) g(u±)`.
pub fn assemble_face_totals<M: Model + ?Sized>(basis: &Basis, line: &[f64], model: &M, dir: usize) -> [FaceSide; 2] {
    let mut sides = [FaceSide::default(); 2];
    add_face_traces(basis, line, model, dir, 1.0, &mut sides);
    for s in sides.iter_mut() {
        s.u = s.avg_u;
    }
    sides
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{Burgers, LinearAdvection, ShallowWater};

    #[test]
    fn burgers_local_derivative_n1() {
        let b = Basis::new(1).unwrap();
        let mut out = [0.0; 2];
        local_flux_derivative(&b, 1.0, &[0.0, 1.0], &Burgers, 0, &mut out);
        assert_eq!(out, [0.5, 0.5]);
    }

    #[test]
    fn linear_flux_of_nodes_is_one() {
        let b = Basis::new(4).unwrap();
        let mut out = vec![0.0; 5];
        local_flux_derivative(&b, 1.0, b.nodes(), &LinearAdvection { speed: 1.0 }, 0, &mut out);
        assert!(out.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn burgers_ec_double_loop() {
        let b = Basis::new(2).unwrap();
        let u = [1.0, 2.0, 3.0];
        let mut out = [0.0; 3];
        fluxdiff_volume(&b, 1.0, &u, &Burgers, VolumeFlux::Ec, 0, &mut out);
        // D for nodes (0, 1/2, 1): rows (-3, 4, -1), (-1, 0, 1), (1, -4, 3).
        let d = [[-3.0, 4.0, -1.0], [-1.0, 0.0, 1.0], [1.0, -4.0, 3.0]];
        for p in 0..3 {
            let expected: f64 = (0..3).map(|q| 2.0 * d[p][q] * Burgers::ec_flux(u[p], u[q])).sum();
            assert!((out[p] - expected).abs() < 1e-13, "p={p}");
        }
        // Node 0: 2(-3·1/2 + 4·7/6 - 13/6) = 2.
        assert!((out[0] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn surface_correction_right_jump() {
        let b = Basis::new(1).unwrap();
        let mut out = [0.0; 6];
        surface_correction(&b, 1.0, 3, &[0.0; 3], &[0.0; 3], &[1.0, 0.0, 0.0], &[0.0; 3], &mut out);
        assert_eq!(out, [0.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
    }

    #[test]
    fn surface_correction_sparsity() {
        let b = Basis::new(2).unwrap();
        let mut out = [0.0; 3];
        surface_correction(&b, 0.5, 1, &[1.0], &[0.25], &[-1.0], &[0.5], &mut out);
        assert!(out[0] != 0.0 && out[1] == 0.0 && out[2] != 0.0);
        let mut zero = [0.0; 3];
        surface_correction(&b, 0.5, 1, &[1.0], &[1.0], &[2.0], &[2.0], &mut zero);
        assert_eq!(zero, [0.0; 3]);
    }

    #[test]
    fn face_totals_shallow_water() {
        let sw = ShallowWater::new(9.812);
        let b = Basis::new(2).unwrap();
        let line = [1.0, 0.1, 0.2, 1.1, 0.2, 0.1, 0.9, -0.1, 0.3];
        let sides = assemble_face_totals(&b, &line, &sw, 0);
        let last = &line[6..9];
        let mut f = [0.0; 3];
        sw.flux(last, 0, &mut f);
        let tot = sides[1].total();
        assert!((tot[0] - f[0]).abs() < 1e-15);
        assert!((tot[1] - (f[1] + 9.812 * 0.9 * 0.3)).abs() < 1e-14);
        assert_eq!(tot[2], 0.0);
        assert_eq!(&sides[0].u[..3], &line[..3]);
    }

    #[test]
    fn face_totals_without_noncons() {
        let b = Basis::new(3).unwrap();
        let line = [0.5, 1.0, -0.25, 2.0];
        let sides = assemble_face_totals(&b, &line, &Burgers, 0);
        assert_eq!(sides[0].total()[0], 0.125);
        assert_eq!(sides[1].flux[0], 2.0);
        assert_eq!(sides[1].noncons[0], 0.0);
    }
}

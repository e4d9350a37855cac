use proptest::prelude::*;

use crkfr::basis::{lagrange_values, Basis};
use crkfr::config::RunConfig;
use crkfr::kernels::{
    fluxdiff_noncons_volume, fluxdiff_volume, local_flux_derivative, noncons_local_derivative, volume_terms,
};
use crkfr::physics::{
    add_rusanov_dissipation, interface_wave_speed, ln_mean, Burgers, Euler1d, Euler2d, Model, ShallowWater,
    VolumeFlux,
};

fn euler1d_state() -> impl Strategy<Value = Vec<f64>> {
    (0.1..10.0f64, -2.0..2.0f64, 0.1..10.0f64).prop_map(|(r, v, p)| Euler1d::new(1.4).from_primitive(&[r, v, p]))
}

fn euler2d_state() -> impl Strategy<Value = Vec<f64>> {
    (0.1..10.0f64, -2.0..2.0f64, -2.0..2.0f64, 0.1..10.0f64)
        .prop_map(|(r, v1, v2, p)| Euler2d::new(1.4).from_primitive(&[r, v1, v2, p]))
}

fn sw_state() -> impl Strategy<Value = Vec<f64>> {
    (0.1..5.0f64, -3.0..3.0f64, -1.0..1.0f64).prop_map(|(h, v, b)| vec![h, h * v, b])
}

fn eval(model: &dyn Model, kind: VolumeFlux, a: &[f64], b: &[f64], dir: usize) -> Vec<f64> {
    let mut out = vec![0.0; model.nvars()];
    model.two_point_flux(kind, a, b, dir, &mut out);
    out
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = a.iter().chain(b).fold(1.0f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

fn tadmor_residual(model: &dyn Model, a: &[f64], b: &[f64], dir: usize) -> f64 {
    let f = eval(model, VolumeFlux::Ec, a, b, dir);
    let m = model.nvars();
    let (mut wa, mut wb) = (vec![0.0; m], vec![0.0; m]);
    model.entropy_variables(a, &mut wa);
    model.entropy_variables(b, &mut wb);
    let dw: f64 = (0..m).map(|k| (wb[k] - wa[k]) * f[k]).sum();
    dw - (model.entropy_potential(b, dir) - model.entropy_potential(a, dir))
}

/// Largest deviation from `momentum = v̄ mass + p̄` over all momentum rows.
fn kep_defect<const D: usize>(model: &crkfr::physics::Euler<D>, kind: VolumeFlux, a: &[f64], b: &[f64], dir: usize) -> f64 {
    let f = eval(model, kind, a, b, dir);
    let (pa, pb) = (model.to_primitive(a), model.to_primitive(b));
    let p_avg = 0.5 * (pa[D + 1] + pb[D + 1]);
    (0..D)
        .map(|i| {
            let v_avg = 0.5 * (pa[1 + i] + pb[1 + i]);
            let p = if i == dir { p_avg } else { 0.0 };
            (f[1 + i] - v_avg * f[0] - p).abs()
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn euler1d_two_point_fluxes(a in euler1d_state(), b in euler1d_state()) {
        let e = Euler1d::new(1.4);
        for kind in VolumeFlux::ALL {
            prop_assert!(rel_close(&eval(&e, kind, &a, &b, 0), &eval(&e, kind, &b, &a, 0), 1e-14));
            let mut f = vec![0.0; 3];
            e.flux(&a, 0, &mut f);
            prop_assert!(rel_close(&eval(&e, kind, &a, &a, 0), &f, 1e-13));
        }
        prop_assert!(tadmor_residual(&e, &a, &b, 0).abs() <= 1e-11);
        prop_assert!(kep_defect(&e, VolumeFlux::Ec, &a, &b, 0) <= 1e-13);
        prop_assert!(kep_defect(&e, VolumeFlux::Kep, &a, &b, 0) <= 1e-13);
    }

    #[test]
    fn euler2d_two_point_fluxes(a in euler2d_state(), b in euler2d_state(), dir in 0..2usize) {
        let e = Euler2d::new(1.4);
        for kind in VolumeFlux::ALL {
            prop_assert!(rel_close(&eval(&e, kind, &a, &b, dir), &eval(&e, kind, &b, &a, dir), 1e-14));
            let mut f = vec![0.0; 4];
            e.flux(&a, dir, &mut f);
            prop_assert!(rel_close(&eval(&e, kind, &a, &a, dir), &f, 1e-13));
        }
        prop_assert!(tadmor_residual(&e, &a, &b, dir).abs() <= 1e-11);
        prop_assert!(kep_defect(&e, VolumeFlux::Ec, &a, &b, dir) <= 1e-13);
        prop_assert!(kep_defect(&e, VolumeFlux::Kep, &a, &b, dir) <= 1e-13);
    }

    #[test]
    fn burgers_ec_flux(a in -10.0..10.0f64, b in -10.0..10.0f64) {
        let m = Burgers;
        prop_assert!(rel_close(&[Burgers::ec_flux(a, b)], &[Burgers::ec_flux(b, a)], 1e-14));
        prop_assert!((Burgers::ec_flux(a, a) - 0.5 * a * a).abs() <= 1e-13 * a * a);
        prop_assert!(tadmor_residual(&m, &[a], &[b], 0).abs() <= 1e-11);
    }

    #[test]
    fn shallow_water_pairs(a in sw_state(), b in sw_state()) {
        let sw = ShallowWater::new(9.812);
        prop_assert!(rel_close(&eval(&sw, VolumeFlux::Ec, &a, &b, 0), &eval(&sw, VolumeFlux::Ec, &b, &a, 0), 1e-14));
        let mut f = vec![0.0; 3];
        sw.flux(&a, 0, &mut f);
        prop_assert!(rel_close(&eval(&sw, VolumeFlux::Ec, &a, &a, 0), &f, 1e-13));
        let (mut ns, mut bg) = (vec![0.0; 3], vec![0.0; 3]);
        sw.noncons_two_point(&a, &a, 0, &mut ns);
        sw.apply_noncons_b(&a, 0, &a, &mut bg);
        prop_assert!(rel_close(&ns, &bg, 1e-13));
    }

    #[test]
    fn rusanov_dissipation_is_entropy_dissipative(a in euler1d_state(), b in euler1d_state()) {
        let e = Euler1d::new(1.4);
        let lam = interface_wave_speed(&e, &a, &b, 0);
        let mut d = vec![0.0; 3];
        add_rusanov_dissipation(&e, lam, &a, &b, &mut d);
        let (mut wa, mut wb) = (vec![0.0; 3], vec![0.0; 3]);
        e.entropy_variables(&a, &mut wa);
        e.entropy_variables(&b, &mut wb);
        let prod: f64 = (0..3).map(|k| (wb[k] - wa[k]) * d[k]).sum();
        prop_assert!(prod <= 1e-12);
    }

    #[test]
    fn entropy_variables_are_entropy_gradient(u in euler2d_state()) {
        let e = Euler2d::new(1.4);
        let mut w = vec![0.0; 4];
        e.entropy_variables(&u, &mut w);
        for k in 0..4 {
            let h = 1e-6 * u[k].abs().max(1.0);
            let (mut up, mut um) = (u.clone(), u.clone());
            up[k] += h;
            um[k] -= h;
            let fd = (e.entropy(&up) - e.entropy(&um)) / (2.0 * h);
            prop_assert!((fd - w[k]).abs() <= 1e-6 * w[k].abs().max(1.0), "k={} fd={} w={}", k, fd, w[k]);
        }
    }

    #[test]
    fn ln_mean_matches_direct_formula(a in 0.01..100.0f64, r in 1.0001..3.0f64) {
        let b = a * r;
        let d = b - a;
        let direct = d / (d / a).ln_1p();
        prop_assert!((ln_mean(a, b) - direct).abs() <= 1e-13 * direct);
        prop_assert!(ln_mean(a, b) >= a && ln_mean(a, b) <= b);
    }

    #[test]
    fn lagrange_partition_of_unity(degree in 1..=8usize, x in 0.0..1.0f64) {
        let basis = Basis::new(degree).unwrap();
        let s: f64 = lagrange_values(basis.nodes(), x).iter().sum();
        prop_assert!((s - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn central_flux_differencing_is_local_derivative(
        degree in 1..=4usize,
        seeds in prop::collection::vec(euler1d_state(), 5),
        dx in 0.01..1.0f64,
    ) {
        let e = Euler1d::new(1.4);
        let basis = Basis::new(degree).unwrap();
        let line: Vec<f64> = seeds[..=degree].concat();
        let (mut a, mut b) = (vec![0.0; line.len()], vec![0.0; line.len()]);
        fluxdiff_volume(&basis, dx, &line, &e, VolumeFlux::Central, 0, &mut a);
        local_flux_derivative(&basis, dx, &line, &e, 0, &mut b);
        prop_assert!(rel_close(&a, &b, 1e-13));
    }

    #[test]
    fn default_noncons_pairing_is_local_derivative(
        degree in 1..=4usize,
        seeds in prop::collection::vec(sw_state(), 5),
        dx in 0.01..1.0f64,
    ) {
        let sw = ShallowWater::new(9.812);
        let basis = Basis::new(degree).unwrap();
        let line: Vec<f64> = seeds[..=degree].concat();
        let (mut a, mut b) = (vec![0.0; line.len()], vec![0.0; line.len()]);
        fluxdiff_noncons_volume(&basis, dx, &line, &sw, 0, &mut a);
        noncons_local_derivative(&basis, dx, &line, &sw, 0, &mut b);
        prop_assert!(rel_close(&a, &b, 1e-13));
    }

    #[test]
    fn constant_line_has_no_volume_residual(degree in 0..=6usize, u in euler1d_state(), kind_ix in 0..3usize) {
        let e = Euler1d::new(1.4);
        let basis = Basis::new(degree).unwrap();
        let line: Vec<f64> = (0..=degree).flat_map(|_| u.iter().copied()).collect();
        let mut out = vec![0.0; line.len()];
        volume_terms(&basis, 0.1, &line, &e, VolumeFlux::ALL[kind_ix], 0, &mut out);
        let scale = u.iter().fold(1.0f64, |m, x| m.max(x.abs())) / 0.1;
        prop_assert!(out.iter().all(|x| x.abs() <= 1e-13 * scale), "{:?}", out);
    }

    #[test]
    fn config_text_round_trips(
        nx in 1..200usize,
        degree in 0..=6usize,
        cfl in 0.01..1.0f64,
        t_final in 0.0..10.0f64,
        problem_ix in 0..7usize,
        dt in prop::option::of(1e-4..1e-1f64),
    ) {
        let problem = crkfr::problems::ProblemId::ALL[problem_ix];
        let mut text = format!("problem = {problem}\nnx = {nx}\ndegree = {degree}\nt_final = {t_final:e}\ncfl = {cfl:e}\n");
        if let Some(dt) = dt {
            text.push_str(&format!("dt = {dt:e}\n"));
        }
        let config: RunConfig = text.parse().unwrap();
        let again: RunConfig = config.to_text().parse().unwrap();
        prop_assert_eq!(config, again);
    }
}

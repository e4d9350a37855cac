//! Nodal polynomial basis on the reference interval [0, 1].
//!
//! Gauss-Lobatto-Legendre solution points and weights, Lagrange
//! interpolation, the collocation differentiation matrix and the nodal
//! derivatives of the g2 correction functions.

use std::ops::Index;

use thiserror::Error;

/// Largest supported polynomial degree.
pub const MAX_DEGREE: usize = 15;

/// Largest number of solution points per direction.
pub const MAX_NODES: usize = MAX_DEGREE + 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BasisError {
    #[error("Gauss-Lobatto-Legendre points need degree >= 1 (got {0})")]
    DegreeTooLow(usize),
    #[error("degree {0} exceeds the supported maximum {MAX_DEGREE}")]
    DegreeTooHigh(usize),
    #[error("solution points {0} and {1} coincide")]
    DuplicateNodes(usize, usize),
    #[error("g2 correction derivatives require nodes including both interval endpoints")]
    NotLobatto,
    #[error("node and weight vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

/// Dense square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DiffMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, p: usize) -> &[f64] {
        &self.data[p * self.n..(p + 1) * self.n]
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|p| self.row(p).iter().zip(v).map(|(d, x)| d * x).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for DiffMatrix {
    type Output = f64;

    fn index(&self, (p, q): (usize, usize)) -> &f64 {
        &self.data[p * self.n + q]
    }
}

/// Legendre polynomial P_n and its derivative at `x` in [-1, 1].
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        // P_n'(±1) = (±1)^(n+1) n(n+1)/2
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (p0 - x * p1) / (1.0 - x * x)
    };
    (p1, dp)
}

/// Gauss-Lobatto-Legendre nodes and weights mapped to [0, 1].
///
/// Interior nodes are roots of P_N'; they are found by Newton iteration on
/// `(1 - x^2) P_N'(x)` in the form `P_{N-1} - P_{N+1}` starting from the
/// Chebyshev-Gauss-Lobatto points.
pub fn gll_nodes_weights(degree: usize) -> Result<(Vec<f64>, Vec<f64>), BasisError> {
    if degree == 0 {
        return Err(BasisError::DegreeTooLow(degree));
    }
    if degree > MAX_DEGREE {
        return Err(BasisError::DegreeTooHigh(degree));
    }
    let n = degree;
    let nf = n as f64;
    let mut x = vec![0.0; n + 1];
    for (i, xi) in x.iter_mut().enumerate() {
        *xi = -(std::f64::consts::PI * i as f64 / nf).cos();
    }
    for xi in x.iter_mut().take(n).skip(1) {
        for _ in 0..100 {
            // Newton on q(x) = P_{N+1} - P_{N-1}, whose interior roots are the GLL points.
            let (pp, dpp) = legendre(n + 1, *xi);
            let (pm, dpm) = legendre(n - 1, *xi);
            let q = pp - pm;
            let dq = dpp - dpm;
            let dx = q / dq;
            *xi -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
    }
    // Symmetrize to remove round-off asymmetry.
    for i in 0..=n / 2 {
        let s = 0.5 * (x[n - i] - x[i]);
        x[i] = -s;
        x[n - i] = s;
    }
    if n.is_multiple_of(2) {
        x[n / 2] = 0.0;
    }
    let nodes: Vec<f64> = x.iter().map(|xi| 0.5 * (xi + 1.0)).collect();
    let weights: Vec<f64> = x
        .iter()
        .map(|&xi| {
            let (p, _) = legendre(n, xi);
            // Halved for the unit interval.
            1.0 / (nf * (nf + 1.0) * p * p)
        })
        .collect();
    Ok((nodes, weights))
}

fn barycentric_weights(nodes: &[f64]) -> Result<Vec<f64>, BasisError> {
    let n = nodes.len();
    let mut w = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                let d = nodes[j] - nodes[k];
                if d == 0.0 {
                    return Err(BasisError::DuplicateNodes(j.min(k), j.max(k)));
                }
                w[j] /= d;
            }
        }
    }
    Ok(w)
}

/// Collocation differentiation matrix `D[p][q] = l_q'(x_p)`.
///
/// Off-diagonal entries come from barycentric weights; the diagonal is the
/// negative row sum so that constants are differentiated to zero.
pub fn diff_matrix(nodes: &[f64]) -> Result<DiffMatrix, BasisError> {
    let n = nodes.len();
    let w = barycentric_weights(nodes)?;
    let mut data = vec![0.0; n * n];
    for p in 0..n {
        let mut diag = 0.0;
        for q in 0..n {
            if p != q {
                let d = (w[q] / w[p]) / (nodes[p] - nodes[q]);
                data[p * n + q] = d;
                diag -= d;
            }
        }
        data[p * n + p] = diag;
    }
    Ok(DiffMatrix { n, data })
}

/// Values of all Lagrange cardinal polynomials of `nodes` at `x`.
pub fn lagrange_values(nodes: &[f64], x: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|q| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != q)
                .map(|(_, &xk)| (x - xk) / (nodes[q] - xk))
                .product()
        })
        .collect()
}

/// Nodal derivatives of the g2 correction functions, `(dgL, dgR)`.
///
/// With GLL collocation the derivative of g_L interpolates to
/// `-l_0 / w_0`, so only the boundary nodes carry a value.
pub fn g2_correction_derivatives(
    nodes: &[f64],
    weights: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), BasisError> {
    if nodes.len() != weights.len() {
        return Err(BasisError::LengthMismatch(nodes.len(), weights.len()));
    }
    let n = nodes.len();
    if n < 2 || nodes[0].abs() > 1e-14 || (nodes[n - 1] - 1.0).abs() > 1e-14 {
        return Err(BasisError::NotLobatto);
    }
    let mut dgl = vec![0.0; n];
    let mut dgr = vec![0.0; n];
    dgl[0] = -1.0 / weights[0];
    dgr[n - 1] = 1.0 / weights[n - 1];
    Ok((dgl, dgr))
}

/// Solution-point basis on [0, 1] with everything the element kernels need.
#[derive(Debug, Clone)]
pub struct Basis {
    degree: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    diff: DiffMatrix,
    dg_left: Vec<f64>,
    dg_right: Vec<f64>,
    extrap_left: Vec<f64>,
    extrap_right: Vec<f64>,
}

impl Basis {
    /// GLL basis of the given degree. Degree 0 is the single midpoint node,
    /// which turns the scheme into a first-order finite volume method.
    pub fn new(degree: usize) -> Result<Self, BasisError> {
        if degree == 0 {
            return Ok(Basis {
                degree,
                nodes: vec![0.5],
                weights: vec![1.0],
                diff: DiffMatrix {
                    n: 1,
                    data: vec![0.0],
                },
                dg_left: vec![-1.0],
                dg_right: vec![1.0],
                extrap_left: vec![1.0],
                extrap_right: vec![1.0],
            });
        }
        let (nodes, weights) = gll_nodes_weights(degree)?;
        let diff = diff_matrix(&nodes)?;
        let (dg_left, dg_right) = g2_correction_derivatives(&nodes, &weights)?;
        let extrap_left = lagrange_values(&nodes, 0.0);
        let extrap_right = lagrange_values(&nodes, 1.0);
        Ok(Basis {
            degree,
            nodes,
            weights,
            diff,
            dg_left,
            dg_right,
            extrap_left,
            extrap_right,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of solution points per direction, N + 1.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn diff(&self) -> &DiffMatrix {
        &self.diff
    }

    pub fn dg_left(&self) -> &[f64] {
        &self.dg_left
    }

    pub fn dg_right(&self) -> &[f64] {
        &self.dg_right
    }

    /// Lagrange values at ξ = 0 (left) or ξ = 1 (right).
    pub fn extrapolation(&self, side: Side) -> &[f64] {
        match side {
            Side::Left => &self.extrap_left,
            Side::Right => &self.extrap_right,
        }
    }

    /// Evaluates the interpolant of nodal vectors (`nvars` per node,
    /// node-major) at one face, accumulating `scale * value` into `out`.
    pub fn extrapolate_into(&self, values: &[f64], nvars: usize, side: Side, scale: f64, out: &mut [f64]) {
        for (q, &l) in self.extrapolation(side).iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            let v = &values[q * nvars..(q + 1) * nvars];
            for (o, x) in out.iter_mut().zip(v) {
                *o += scale * l * x;
            }
        }
    }

    /// Left and right face values of the interpolant of nodal vectors.
    pub fn extrapolate_to_faces(&self, values: &[f64], nvars: usize) -> (Vec<f64>, Vec<f64>) {
        let mut left = vec![0.0; nvars];
        let mut right = vec![0.0; nvars];
        self.extrapolate_into(values, nvars, Side::Left, 1.0, &mut left);
        self.extrapolate_into(values, nvars, Side::Right, 1.0, &mut right);
        (left, right)
    }
}

/// Face of an element along one coordinate direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left = 0,
    Right = 1,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gll_low_degrees() {
        let (x, w) = gll_nodes_weights(1).unwrap();
        assert_eq!(x, vec![0.0, 1.0]);
        assert!(close(w[0], 0.5, 1e-15) && close(w[1], 0.5, 1e-15));

        let (x, w) = gll_nodes_weights(2).unwrap();
        for (a, b) in x.iter().zip([0.0, 0.5, 1.0]) {
            assert!(close(*a, b, 1e-15));
        }
        for (a, b) in w.iter().zip([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]) {
            assert!(close(*a, b, 1e-15));
        }

        let (x, w) = gll_nodes_weights(3).unwrap();
        let s = 1.0 / 5f64.sqrt();
        for (a, b) in x.iter().zip([0.0, 0.5 * (1.0 - s), 0.5 * (1.0 + s), 1.0]) {
            assert!(close(*a, b, 1e-15));
        }
        for (a, b) in w.iter().zip([1.0 / 12.0, 5.0 / 12.0, 5.0 / 12.0, 1.0 / 12.0]) {
            assert!(close(*a, b, 1e-15));
        }
    }

    #[test]
    fn gll_rejects_degree_zero() {
        assert_eq!(gll_nodes_weights(0), Err(BasisError::DegreeTooLow(0)));
    }

    #[test]
    fn quadrature_exactness() {
        for n in 1..=10 {
            let (x, w) = gll_nodes_weights(n).unwrap();
            assert!(close(w.iter().sum::<f64>(), 1.0, 1e-14));
            assert!(w.iter().all(|&wi| wi > 0.0));
            assert!(x.windows(2).all(|p| p[0] < p[1]));
            for k in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
                assert!(close(q, 1.0 / (k as f64 + 1.0), 1e-13), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn diff_matrix_linear() {
        let d = diff_matrix(&[0.0, 1.0]).unwrap();
        assert_eq!(d.row(0), &[-1.0, 1.0]);
        assert_eq!(d.row(1), &[-1.0, 1.0]);
    }

    #[test]
    fn diff_matrix_quadratic_n3() {
        let b = Basis::new(3).unwrap();
        let sq: Vec<f64> = b.nodes().iter().map(|x| x * x).collect();
        let d = b.diff().apply(&sq);
        for (dp, x) in d.iter().zip(b.nodes()) {
            assert!(close(*dp, 2.0 * x, 1e-13));
        }
    }

    #[test]
    fn diff_matrix_duplicates() {
        assert!(matches!(diff_matrix(&[0.0, 0.3, 0.3]), Err(BasisError::DuplicateNodes(1, 2))));
    }

    #[test]
    fn diff_matrix_rows_and_monomials() {
        for n in 1..=8 {
            let b = Basis::new(n).unwrap();
            let d = b.diff();
            for p in 0..=n {
                assert!(d.row(p).iter().sum::<f64>().abs() < 10.0 * f64::EPSILON * (n * n) as f64);
            }
            let ones = d.apply(b.nodes());
            assert!(ones.iter().all(|v| close(*v, 1.0, 1e-12)));
        }
    }

    #[test]
    fn g2_values() {
        let b = Basis::new(1).unwrap();
        assert_eq!(b.dg_left(), &[-2.0, 0.0]);
        assert_eq!(b.dg_right(), &[0.0, 2.0]);
        let b = Basis::new(2).unwrap();
        assert!(close(b.dg_left()[0], -6.0, 1e-12) && b.dg_left()[1..].iter().all(|v| *v == 0.0));
        assert!(close(b.dg_right()[2], 6.0, 1e-12));
        for n in 1..=6 {
            let b = Basis::new(n).unwrap();
            let sl: f64 = b.weights().iter().zip(b.dg_left()).map(|(w, g)| w * g).sum();
            let sr: f64 = b.weights().iter().zip(b.dg_right()).map(|(w, g)| w * g).sum();
            assert!(close(sl, -1.0, 1e-14) && close(sr, 1.0, 1e-14));
        }
    }

    #[test]
    fn g2_rejects_interior_points() {
        let r = g2_correction_derivatives(&[0.2, 0.8], &[0.5, 0.5]);
        assert_eq!(r, Err(BasisError::NotLobatto));
    }

    /// Builds g_L explicitly as the degree N+1 polynomial with g_L(0) = 1,
    /// g_L(1) = 0 whose derivative is the interpolant of the closed-form
    /// nodal values, i.e. g_L(ξ) = 1 + ∫_0^ξ (-l_0/w_0), and checks the
    /// boundary values by exact quadrature of the derivative.
    #[test]
    fn g2_explicit_polynomial() {
        for n in 1..=6 {
            let b = Basis::new(n).unwrap();
            // g_L(1) - g_L(0) = ∫ (-l_0 / w_0) = -1 computed with a finer GLL rule.
            let (xf, wf) = gll_nodes_weights(n + 4).unwrap();
            let integral: f64 = xf
                .iter()
                .zip(&wf)
                .map(|(&x, &w)| w * lagrange_values(b.nodes(), x)[0] * b.dg_left()[0])
                .sum();
            assert!(close(integral, -1.0, 1e-13), "n={n}");
        }
    }

    #[test]
    fn sbp_identity() {
        for n in 1..=6 {
            let b = Basis::new(n).unwrap();
            let d = b.diff();
            let w = b.weights();
            for p in 0..=n {
                for q in 0..=n {
                    let s = w[p] * d[(p, q)] + w[q] * d[(q, p)];
                    let expected = if p == 0 && q == 0 {
                        -1.0
                    } else if p == n && q == n {
                        1.0
                    } else {
                        0.0
                    };
                    assert!(close(s, expected, 1e-12), "n={n} p={p} q={q}: {s}");
                }
            }
        }
    }

    #[test]
    fn extrapolation() {
        let b = Basis::new(2).unwrap();
        let sq: Vec<f64> = b.nodes().iter().map(|x| x * x).collect();
        let (l, r) = b.extrapolate_to_faces(&sq, 1);
        assert!(close(l[0], 0.0, 1e-15) && close(r[0], 1.0, 1e-15));
        let (l, r) = b.extrapolate_to_faces(&[3.0, 7.0, 2.0, 5.0, 1.0, 4.0], 2);
        assert_eq!((l, r), (vec![3.0, 7.0], vec![1.0, 4.0]));
        let b0 = Basis::new(0).unwrap();
        assert_eq!(b0.extrapolate_to_faces(&[2.5], 1), (vec![2.5], vec![2.5]));
    }

    #[test]
    fn extrapolation_generic_nodes() {
        // Interior (non-Lobatto) points still extrapolate polynomials exactly.
        let nodes = [0.2, 0.5, 0.9];
        let l0 = lagrange_values(&nodes, 0.0);
        let l1 = lagrange_values(&nodes, 1.0);
        let f = |x: f64| 1.0 + 2.0 * x - x * x;
        let v: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        let e0: f64 = l0.iter().zip(&v).map(|(a, b)| a * b).sum();
        let e1: f64 = l1.iter().zip(&v).map(|(a, b)| a * b).sum();
        assert!(close(e0, f(0.0), 1e-14) && close(e1, f(1.0), 1e-14));
    }
}

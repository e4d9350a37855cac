//! Uniform Cartesian meshes and nodal state storage.

use thiserror::Error;

use crate::basis::Basis;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("element count must be at least 1")]
    NoElements,
    #[error("domain bounds must satisfy min < max (got [{0}, {1}])")]
    BadBounds(f64, f64),
}

/// Uniform mesh of an interval or a box. Elements are numbered with x
/// fastest: `e = ey * nx + ex`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianMesh {
    counts: [usize; 2],
    lo: [f64; 2],
    hi: [f64; 2],
    periodic: [bool; 2],
    dim: usize,
}

impl CartesianMesh {
    pub fn interval(nx: usize, x: (f64, f64), periodic: bool) -> Result<Self, MeshError> {
        check(nx, x)?;
        Ok(CartesianMesh {
            counts: [nx, 1],
            lo: [x.0, 0.0],
            hi: [x.1, 1.0],
            periodic: [periodic, true],
            dim: 1,
        })
    }

    pub fn rectangle(
        (nx, ny): (usize, usize),
        x: (f64, f64),
        y: (f64, f64),
        periodic: [bool; 2],
    ) -> Result<Self, MeshError> {
        check(nx, x)?;
        check(ny, y)?;
        Ok(CartesianMesh {
            counts: [nx, ny],
            lo: [x.0, y.0],
            hi: [x.1, y.1],
            periodic,
            dim: 2,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Elements along direction `dir`.
    pub fn count(&self, dir: usize) -> usize {
        self.counts[dir]
    }

    pub fn num_elements(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    /// Element width along `dir`.
    pub fn h(&self, dir: usize) -> f64 {
        (self.hi[dir] - self.lo[dir]) / self.counts[dir] as f64
    }

    pub fn bounds(&self, dir: usize) -> (f64, f64) {
        (self.lo[dir], self.hi[dir])
    }

    pub fn is_periodic(&self, dir: usize) -> bool {
        self.periodic[dir]
    }

    /// Cell volume (length in 1D, area in 2D).
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|d| self.h(d)).product()
    }

    /// `(ex, ey)` of element `e`.
    pub fn element_coords(&self, e: usize) -> [usize; 2] {
        [e % self.counts[0], e / self.counts[0]]
    }

    pub fn element_index(&self, ex: usize, ey: usize) -> usize {
        ey * self.counts[0] + ex
    }

    /// Neighbor across the right (`+`) face in `dir`, wrapping if periodic.
    pub fn right_neighbor(&self, e: usize, dir: usize) -> Option<usize> {
        let mut c = self.element_coords(e);
        if c[dir] + 1 < self.counts[dir] {
            c[dir] += 1;
        } else if self.periodic[dir] {
            c[dir] = 0;
        } else {
            return None;
        }
        Some(self.element_index(c[0], c[1]))
    }

    /// Neighbor across the left (`-`) face in `dir`, wrapping if periodic.
    pub fn left_neighbor(&self, e: usize, dir: usize) -> Option<usize> {
        let mut c = self.element_coords(e);
        if c[dir] > 0 {
            c[dir] -= 1;
        } else if self.periodic[dir] {
            c[dir] = self.counts[dir] - 1;
        } else {
            return None;
        }
        Some(self.element_index(c[0], c[1]))
    }

    /// Physical coordinate of reference position `xi` inside element index
    /// `i` along `dir`. Computed as `lo + (i + xi) h` so shared faces of
    /// neighboring elements map to bit-identical coordinates.
    pub fn coordinate(&self, dir: usize, i: usize, xi: f64) -> f64 {
        self.lo[dir] + (i as f64 + xi) * self.h(dir)
    }

    /// Physical coordinates of local node `node` of element `e`.
    pub fn node_position(&self, basis: &Basis, e: usize, node: usize) -> [f64; 2] {
        let n1 = basis.len();
        let c = self.element_coords(e);
        let x = self.coordinate(0, c[0], basis.nodes()[node % n1]);
        let y = if self.dim == 2 {
            self.coordinate(1, c[1], basis.nodes()[node / n1])
        } else {
            0.0
        };
        [x, y]
    }
}

fn check(n: usize, (lo, hi): (f64, f64)) -> Result<(), MeshError> {
    if n == 0 {
        return Err(MeshError::NoElements);
    }
    if !(lo < hi) {
        return Err(MeshError::BadBounds(lo, hi));
    }
    Ok(())
}

/// Shape of the nodal arrays: elements × nodes per element × variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub dim: usize,
    pub nelem: usize,
    /// Nodes per direction, N + 1.
    pub n1: usize,
    pub nvars: usize,
}

impl Layout {
    pub fn nodes_per_element(&self) -> usize {
        self.n1.pow(self.dim as u32)
    }

    pub fn element_len(&self) -> usize {
        self.nodes_per_element() * self.nvars
    }

    pub fn len(&self) -> usize {
        self.nelem * self.element_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinate lines per element and direction.
    pub fn lines(&self) -> usize {
        self.n1.pow(self.dim as u32 - 1)
    }

    /// Local node index of point `k` on line `line` running along `dir`.
    /// Nodes are numbered `py * n1 + px`.
    #[inline]
    pub fn line_node(&self, dir: usize, line: usize, k: usize) -> usize {
        if dir == 0 {
            line * self.n1 + k
        } else {
            k * self.n1 + line
        }
    }

    /// Flat index of variable `m` at node `node` of element `e`.
    #[inline]
    pub fn index(&self, e: usize, node: usize, m: usize) -> usize {
        (e * self.nodes_per_element() + node) * self.nvars + m
    }
}

/// The piecewise-polynomial solution: nodal values, time and step count.
#[derive(Debug, Clone, PartialEq)]
pub struct StateField {
    pub layout: Layout,
    pub data: Vec<f64>,
    pub t: f64,
    pub step: u64,
}

impl StateField {
    pub fn zeros(layout: Layout) -> Self {
        StateField {
            layout,
            data: vec![0.0; layout.len()],
            t: 0.0,
            step: 0,
        }
    }

    /// Samples `init(x, out)` at every solution point.
    pub fn from_fn(mesh: &CartesianMesh, basis: &Basis, nvars: usize, mut init: impl FnMut([f64; 2], &mut [f64])) -> Self {
        let layout = Layout {
            dim: mesh.dim(),
            nelem: mesh.num_elements(),
            n1: basis.len(),
            nvars,
        };
        let mut field = StateField::zeros(layout);
        let npe = layout.nodes_per_element();
        for e in 0..layout.nelem {
            for node in 0..npe {
                let x = mesh.node_position(basis, e, node);
                let i = layout.index(e, node, 0);
                init(x, &mut field.data[i..i + nvars]);
            }
        }
        field
    }

    pub fn element(&self, e: usize) -> &[f64] {
        let len = self.layout.element_len();
        &self.data[e * len..(e + 1) * len]
    }

    pub fn node(&self, e: usize, node: usize) -> &[f64] {
        let i = self.layout.index(e, node, 0);
        &self.data[i..i + self.layout.nvars]
    }

    pub fn node_mut(&mut self, e: usize, node: usize) -> &mut [f64] {
        let i = self.layout.index(e, node, 0);
        let m = self.layout.nvars;
        &mut self.data[i..i + m]
    }

    /// Quadrature-weighted integral of each variable, summed in element order.
    pub fn totals(&self, mesh: &CartesianMesh, basis: &Basis) -> Vec<f64> {
        let m = self.layout.nvars;
        let mut totals = vec![0.0; m];
        self.integrate(mesh, basis, |u, w| {
            for k in 0..m {
                totals[k] += w * u[k];
            }
        });
        totals
    }

    /// Calls `f(u, weight)` for every node with its quadrature weight
    /// (cell volume times tensor GLL weight), in element order.
    pub fn integrate(&self, mesh: &CartesianMesh, basis: &Basis, mut f: impl FnMut(&[f64], f64)) {
        let l = self.layout;
        let vol = mesh.cell_volume();
        let w = basis.weights();
        for e in 0..l.nelem {
            for node in 0..l.nodes_per_element() {
                let wq = if l.dim == 2 { w[node % l.n1] * w[node / l.n1] } else { w[node] };
                f(self.node(e, node), vol * wq);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighbors_wrap() {
        let m = CartesianMesh::rectangle((3, 2), (0.0, 3.0), (0.0, 1.0), [true, false]).unwrap();
        assert_eq!(m.right_neighbor(2, 0), Some(0));
        assert_eq!(m.left_neighbor(3, 0), Some(5));
        assert_eq!(m.right_neighbor(4, 1), None);
        assert_eq!(m.left_neighbor(4, 1), Some(1));
        assert_eq!(m.h(0), 1.0);
        assert_eq!(m.h(1), 0.5);
    }

    #[test]
    fn bad_meshes() {
        assert_eq!(CartesianMesh::interval(0, (0.0, 1.0), true), Err(MeshError::NoElements));
        assert!(CartesianMesh::interval(4, (1.0, 1.0), true).is_err());
    }

    #[test]
    fn shared_faces_bitwise_equal() {
        let m = CartesianMesh::interval(7, (-0.3, 1.1), true).unwrap();
        for i in 0..6 {
            assert_eq!(m.coordinate(0, i, 1.0), m.coordinate(0, i + 1, 0.0));
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let basis = Basis::new(2).unwrap();
        let mesh = CartesianMesh::rectangle((4, 3), (-1.0, 1.0), (0.0, 3.0), [true, true]).unwrap();
        let field = StateField::from_fn(&mesh, &basis, 2, |x, u| {
            u[0] = x[0];
            u[1] = x[1];
        });
        for e in 0..mesh.num_elements() {
            let [ex, ey] = mesh.element_coords(e);
            assert_eq!(mesh.element_index(ex, ey), e);
            for node in 0..9 {
                let u = field.node(e, node);
                let (px, py) = (node % 3, node / 3);
                // Recover element and node from the written coordinates.
                let fx = (u[0] + 1.0) / mesh.h(0);
                let fy = u[1] / mesh.h(1);
                let rx = (fx - basis.nodes()[px]).round() as usize;
                let ry = (fy - basis.nodes()[py]).round() as usize;
                assert_eq!((rx, ry), (ex, ey));
            }
        }
        // Right face of an x-line equals the left face of the neighbor's line.
        let l = field.layout;
        let e = mesh.element_index(1, 2);
        let nb = mesh.right_neighbor(e, 0).unwrap();
        for line in 0..3 {
            let a = field.node(e, l.line_node(0, line, 2));
            let b = field.node(nb, l.line_node(0, line, 0));
            assert_eq!(a[0], b[0]);
            assert_eq!(a[1], b[1]);
        }
    }

    #[test]
    fn totals_of_constant() {
        let basis = Basis::new(3).unwrap();
        let mesh = CartesianMesh::interval(5, (0.0, 2.0), true).unwrap();
        let f = StateField::from_fn(&mesh, &basis, 1, |_, u| u[0] = 1.5);
        assert!((f.totals(&mesh, &basis)[0] - 3.0).abs() < 1e-14);
    }
}

//! Explicit Runge-Kutta methods in Butcher form.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableauError {
    #[error("unknown tableau `{name}` (available: {})", AVAILABLE.join(", "))]
    Unknown { name: String },
    #[error("tableau shape mismatch: A is {rows}x{cols}, b has {b}, c has {c}")]
    Shape { rows: usize, cols: usize, b: usize, c: usize },
    #[error("A[{0}][{1}] is nonzero on or above the diagonal")]
    NotExplicit(usize, usize),
    #[error("c[{0}] does not match the row sum of A")]
    Abscissa(usize),
    #[error("weights sum to {0}, expected 1")]
    Inconsistent(f64),
    #[error("tableau needs at least one stage")]
    Empty,
}

/// Names accepted by [`standard_tableau`].
pub const AVAILABLE: &[&str] = &["rk4", "ssprk33", "forward_euler"];

#[derive(Debug, Clone, PartialEq)]
pub struct ButcherTableau {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl ButcherTableau {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<Self, TableauError> {
        let s = b.len();
        if s == 0 {
            return Err(TableauError::Empty);
        }
        if a.len() != s || c.len() != s || a.iter().any(|row| row.len() != s) {
            return Err(TableauError::Shape {
                rows: a.len(),
                cols: a.first().map_or(0, Vec::len),
                b: s,
                c: c.len(),
            });
        }
        for (i, row) in a.iter().enumerate() {
            if let Some(j) = (i..s).find(|&j| row[j] != 0.0) {
                return Err(TableauError::NotExplicit(i, j));
            }
            if (row.iter().sum::<f64>() - c[i]).abs() > 1e-14 {
                return Err(TableauError::Abscissa(i));
            }
        }
        let sum: f64 = b.iter().sum();
        if (sum - 1.0).abs() > 1e-14 {
            return Err(TableauError::Inconsistent(sum));
        }
        Ok(ButcherTableau { a, b, c })
    }

    pub fn forward_euler() -> Self {
        ButcherTableau {
            a: vec![vec![0.0]],
            b: vec![1.0],
            c: vec![0.0],
        }
    }

    pub fn rk4() -> Self {
        ButcherTableau {
            a: vec![
                vec![0.0, 0.0, 0.0, 0.0],
                vec![0.5, 0.0, 0.0, 0.0],
                vec![0.0, 0.5, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            b: vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            c: vec![0.0, 0.5, 0.5, 1.0],
        }
    }

    /// Three-stage third-order SSP method of Shu and Osher.
    pub fn ssprk33() -> Self {
        ButcherTableau {
            a: vec![
                vec![0.0, 0.0, 0.0],
                vec![1.0, 0.0, 0.0],
                vec![0.25, 0.25, 0.0],
            ],
            b: vec![1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0],
            c: vec![0.0, 1.0, 0.5],
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }
}

pub fn standard_tableau(name: &str) -> Result<ButcherTableau, TableauError> {
    match name {
        "rk4" => Ok(ButcherTableau::rk4()),
        "ssprk33" => Ok(ButcherTableau::ssprk33()),
        "forward_euler" => Ok(ButcherTableau::forward_euler()),
        _ => Err(TableauError::Unknown { name: name.to_string() }),
    }
}

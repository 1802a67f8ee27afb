//! Cell-local matrices of the discrete weak operators.
//!
//! Local weak scalar dofs are ordered `[w0 (dim P_k), w_b on edge 0 (s+1),
//! w_b on edge 1, ...]`, local weak vector dofs `[q0_x, q0_y, q_b on edge 0,
//! ...]`, with edges in the cell's counterclockwise order and each `q_b`
//! measured along the cell's outward normal.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::polybasis::{cell_dim, spd_solve, LocalElement};

/// Offsets of the edge blocks after an interior block of size `interior`.
pub fn edge_offsets(interior: usize, n_edges: usize, s: usize) -> Vec<usize> {
    (0..n_edges).map(|e| interior + e * (s + 1)).collect()
}

/// Block-diagonal `diag(m, m)`.
pub fn vector_block(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, 0), (n, n)).copy_from(m);
    out.view_mut((n, n), (n, n)).copy_from(m);
    out
}

/// `(grad_w w, v)_T = -(w0, div v)_T + <w_b, v.n>_{dT}` for `v` in `[P_r]^2`.
#[derive(Debug, Clone)]
pub struct WeakGradient {
    pub k: usize,
    pub s: usize,
    pub r: usize,
    /// Right-hand side of the defining identity; rows are vector test
    /// functions `[(phi_i, 0)..., (0, phi_i)...]`, columns local scalar dofs.
    pub rhs: DMatrix<f64>,
    /// Maps local dofs to stacked coefficients of the weak gradient.
    pub matrix: DMatrix<f64>,
    /// Unweighted vector mass matrix of `[P_r]^2`.
    pub mass: DMatrix<f64>,
}

impl WeakGradient {
    pub fn new(el: &LocalElement, k: usize, s: usize, r: usize) -> Result<Self> {
        let (nk, nr) = (cell_dim(k), cell_dim(r));
        let offsets = edge_offsets(nk, el.edges.len(), s);
        let ncols = nk + el.edges.len() * (s + 1);
        let mut rhs = DMatrix::zeros(2 * nr, ncols);

        let (bk, br) = (el.basis(k), el.basis(r));
        for (&p, &w) in el.rule.points.iter().zip(&el.rule.weights) {
            let phi = bk.eval(p);
            let grad = br.eval_grad(p);
            for i in 0..nr {
                for j in 0..nk {
                    rhs[(i, j)] -= w * phi[j] * grad[i].x;
                    rhs[(nr + i, j)] -= w * phi[j] * grad[i].y;
                }
            }
        }
        for (le, edge) in el.edges.iter().enumerate() {
            let eb = el.edge_basis(le, s);
            for ((&p, &t), &w) in edge.rule.points.iter().zip(&edge.rule.params).zip(&edge.rule.weights) {
                let psi = eb.eval(t);
                let v = br.eval(p);
                for i in 0..nr {
                    for l in 0..=s {
                        rhs[(i, offsets[le] + l)] += w * psi[l] * v[i] * edge.normal.x;
                        rhs[(nr + i, offsets[le] + l)] += w * psi[l] * v[i] * edge.normal.y;
                    }
                }
            }
        }
        let mass = vector_block(&el.mass(r));
        let matrix = spd_solve(&mass, rhs.clone(), el.cell)?;
        Ok(Self { k, s, r, rhs, matrix, mass })
    }

    /// Stacked coefficients of the weak gradient of a local dof vector.
    pub fn apply(&self, dofs: &[f64]) -> Vec<f64> {
        (&self.matrix * nalgebra::DVector::from_column_slice(dofs)).iter().copied().collect()
    }
}

/// `(div_w q, phi)_T = -(q0, grad phi)_T + <q_b, phi>_{dT}` for `phi` in `P_r`.
#[derive(Debug, Clone)]
pub struct WeakDivergence {
    pub k: usize,
    pub s: usize,
    pub r: usize,
    /// Rows are scalar test functions of `P_r`, columns local vector dofs.
    pub rhs: DMatrix<f64>,
    pub matrix: DMatrix<f64>,
    pub mass: DMatrix<f64>,
}

impl WeakDivergence {
    pub fn new(el: &LocalElement, k: usize, s: usize, r: usize) -> Result<Self> {
        let (nk, nr) = (cell_dim(k), cell_dim(r));
        let offsets = edge_offsets(2 * nk, el.edges.len(), s);
        let ncols = 2 * nk + el.edges.len() * (s + 1);
        let mut rhs = DMatrix::zeros(nr, ncols);

        let (bk, br) = (el.basis(k), el.basis(r));
        for (&p, &w) in el.rule.points.iter().zip(&el.rule.weights) {
            let v = bk.eval(p);
            let grad = br.eval_grad(p);
            for i in 0..nr {
                for j in 0..nk {
                    rhs[(i, j)] -= w * v[j] * grad[i].x;
                    rhs[(i, nk + j)] -= w * v[j] * grad[i].y;
                }
            }
        }
        for (le, edge) in el.edges.iter().enumerate() {
            let eb = el.edge_basis(le, s);
            for ((&p, &t), &w) in edge.rule.points.iter().zip(&edge.rule.params).zip(&edge.rule.weights) {
                let psi = eb.eval(t);
                let phi = br.eval(p);
                for i in 0..nr {
                    for l in 0..=s {
                        rhs[(i, offsets[le] + l)] += w * psi[l] * phi[i];
                    }
                }
            }
        }
        let mass = el.mass(r);
        let matrix = spd_solve(&mass, rhs.clone(), el.cell)?;
        Ok(Self { k, s, r, rhs, matrix, mass })
    }

    pub fn apply(&self, dofs: &[f64]) -> Vec<f64> {
        (&self.matrix * nalgebra::DVector::from_column_slice(dofs)).iter().copied().collect()
    }
}

/// Which scaling of the stabilizer is in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilizerKind {
    /// `rho h_T^-1 <Q_b w0 - w_b, Q_b phi0 - phi_b>`
    Primal,
    /// `rho h_T^alpha <Q_b(q0.n) - q_b, Q_b(v0.n) - v_b>`
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizerSpec {
    pub rho: f64,
    pub alpha: f64,
    pub kind: StabilizerKind,
}

impl StabilizerSpec {
    pub fn primal(rho: f64) -> Self {
        Self { rho, alpha: -1.0, kind: StabilizerKind::Primal }
    }

    pub fn mixed(rho: f64, alpha: f64) -> Self {
        Self { rho, alpha, kind: StabilizerKind::Mixed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return crate::error::invalid(format!("stabilizer parameter rho must be positive, got {}", self.rho));
        }
        if !self.alpha.is_finite() {
            return crate::error::invalid("stabilizer exponent alpha must be finite");
        }
        Ok(())
    }

    /// Cell weight `rho h^-1` or `rho h^alpha`.
    pub fn weight(&self, h: f64) -> f64 {
        match self.kind {
            StabilizerKind::Primal => self.rho / h,
            StabilizerKind::Mixed => self.rho * h.powf(self.alpha),
        }
    }
}

/// Maps local dofs to the jump `Q_b(interior trace) - boundary value` on
/// each edge, in orthonormal edge coefficients. For vector dofs the interior
/// trace is the normal component.
pub fn jump_operator(el: &LocalElement, k: usize, s: usize, vector: bool) -> DMatrix<f64> {
    let nk = cell_dim(k);
    let interior = if vector { 2 * nk } else { nk };
    let offsets = edge_offsets(interior, el.edges.len(), s);
    let ncols = interior + el.edges.len() * (s + 1);
    let mut j = DMatrix::zeros(el.edges.len() * (s + 1), ncols);
    for (le, edge) in el.edges.iter().enumerate() {
        let p = el.trace_projection(le, k, s);
        let row = le * (s + 1);
        if vector {
            j.view_mut((row, 0), (s + 1, nk)).copy_from(&(&p * edge.normal.x));
            j.view_mut((row, nk), (s + 1, nk)).copy_from(&(&p * edge.normal.y));
        } else {
            j.view_mut((row, 0), (s + 1, nk)).copy_from(&p);
        }
        for l in 0..=s {
            j[(row + l, offsets[le] + l)] = -1.0;
        }
    }
    j
}

/// Local stabilizer matrix; scalar dofs for [`StabilizerKind::Primal`],
/// vector dofs for [`StabilizerKind::Mixed`].
pub fn stabilizer_matrix(el: &LocalElement, k: usize, s: usize, spec: &StabilizerSpec) -> DMatrix<f64> {
    let vector = spec.kind == StabilizerKind::Mixed;
    let j = jump_operator(el, k, s, vector);
    j.transpose() * j * spec.weight(el.diameter)
}

//! Discrete weak gradient and divergence, weak functions, and stabilizers.

mod operators;

pub use operators::{
    edge_offsets, jump_operator, stabilizer_matrix, vector_block, StabilizerKind, StabilizerSpec, WeakDivergence,
    WeakGradient,
};

use nalgebra::DVector;

use crate::error::{invalid, Result};
use crate::mesh::{Point, PolygonalMesh};
use crate::polybasis::{
    cell_dim, project_cell_scalar, project_edge, CellPolynomial, LocalElement, VectorCellPolynomial,
};

/// `{w0, w_b}` with `w0` in `P_k` per cell and a single-valued `w_b` in
/// `P_s` per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakScalarFunction {
    pub k: usize,
    pub s: usize,
    /// Scaled monomial coefficients per cell.
    pub interior: Vec<Vec<f64>>,
    /// Orthonormal Legendre coefficients per edge.
    pub boundary: Vec<Vec<f64>>,
    /// `w_b` vanishes on the domain boundary.
    pub homogeneous: bool,
}

impl WeakScalarFunction {
    pub fn zeros(mesh: &PolygonalMesh, k: usize, s: usize) -> Self {
        Self {
            k,
            s,
            interior: vec![vec![0.0; cell_dim(k)]; mesh.num_cells()],
            boundary: vec![vec![0.0; s + 1]; mesh.num_edges()],
            homogeneous: true,
        }
    }

    /// `{Q_0 f, Q_b f}`.
    pub fn project(mesh: &PolygonalMesh, f: impl Fn(Point) -> f64 + Sync, k: usize, s: usize, order: usize) -> Result<Self> {
        let interior = (0..mesh.num_cells())
            .map(|c| project_cell_scalar(mesh, c, &f, k, order).map(|p| p.coeffs))
            .collect::<Result<Vec<_>>>()?;
        let boundary = (0..mesh.num_edges())
            .map(|e| project_edge(mesh, e, &f, s, order).map(|p| p.coeffs))
            .collect::<Result<Vec<_>>>()?;
        let homogeneous = mesh
            .edges()
            .iter()
            .zip(&boundary)
            .all(|(e, b)| !e.is_boundary() || b.iter().all(|&v| v == 0.0));
        Ok(Self { k, s, interior, boundary, homogeneous })
    }

    /// Zeroes `w_b` on boundary edges, moving the function into `W_h^0`.
    pub fn clear_boundary(&mut self, mesh: &PolygonalMesh) {
        for (e, b) in mesh.edges().iter().zip(self.boundary.iter_mut()) {
            if e.is_boundary() {
                b.iter_mut().for_each(|v| *v = 0.0);
            }
        }
        self.homogeneous = true;
    }

    pub fn check_homogeneous(&self, mesh: &PolygonalMesh) -> Result<()> {
        if self.homogeneous {
            for (e, b) in mesh.edges().iter().zip(&self.boundary) {
                if e.is_boundary() && b.iter().any(|&v| v != 0.0) {
                    return invalid("homogeneous weak function has nonzero boundary trace");
                }
            }
        }
        Ok(())
    }

    /// Local dofs `[w0, w_b on each edge of the cell]`.
    pub fn local_dofs(&self, mesh: &PolygonalMesh, cell: usize) -> Vec<f64> {
        let mut out = self.interior[cell].clone();
        for &e in &mesh.cell(cell).edges {
            out.extend_from_slice(&self.boundary[e]);
        }
        out
    }

    pub fn interior_poly(&self, el: &LocalElement) -> CellPolynomial {
        CellPolynomial { basis: el.basis(self.k), coeffs: self.interior[el.cell].clone() }
    }
}

/// Storage of the normal flux component `q_b`.
#[derive(Debug, Clone, PartialEq)]
pub enum FluxTrace {
    /// One coefficient set per edge, along the edge's stored normal (`Z_h`).
    SingleValued(Vec<Vec<f64>>),
    /// Independent coefficients per cell and local edge, along the cell's
    /// outward normal (the hybridized space).
    PerCell(Vec<Vec<Vec<f64>>>),
}

/// `{q0, q_b n_T}` with `q0` in `[P_k]^2` and `q_b` in `P_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeakVectorField {
    pub k: usize,
    pub s: usize,
    /// Stacked `[x, y]` coefficients per cell.
    pub interior: Vec<Vec<f64>>,
    pub flux: FluxTrace,
}

impl WeakVectorField {
    pub fn zeros(mesh: &PolygonalMesh, k: usize, s: usize, per_cell: bool) -> Self {
        let flux = if per_cell {
            FluxTrace::PerCell(mesh.cells().iter().map(|c| vec![vec![0.0; s + 1]; c.edges.len()]).collect())
        } else {
            FluxTrace::SingleValued(vec![vec![0.0; s + 1]; mesh.num_edges()])
        };
        Self { k, s, interior: vec![vec![0.0; 2 * cell_dim(k)]; mesh.num_cells()], flux }
    }

    /// `{Q_0 q, Q_b(q.n)}`, single-valued.
    pub fn project(mesh: &PolygonalMesh, q: impl Fn(Point) -> Point + Sync, k: usize, s: usize, order: usize) -> Result<Self> {
        let interior = (0..mesh.num_cells())
            .map(|c| {
                let x = project_cell_scalar(mesh, c, |p| q(p).x, k, order)?;
                let y = project_cell_scalar(mesh, c, |p| q(p).y, k, order)?;
                Ok(x.coeffs.into_iter().chain(y.coeffs).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        let flux = (0..mesh.num_edges())
            .map(|e| {
                let n = mesh.edge(e).normal;
                project_edge(mesh, e, |p| q(p).dot(&n), s, order).map(|p| p.coeffs)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { k, s, interior, flux: FluxTrace::SingleValued(flux) })
    }

    /// `q_b` on local edge `le` of `cell` along that cell's outward normal.
    pub fn local_flux(&self, mesh: &PolygonalMesh, cell: usize, le: usize) -> Vec<f64> {
        match &self.flux {
            FluxTrace::SingleValued(f) => {
                let e = mesh.cell(cell).edges[le];
                let sign = mesh.edge(e).orientation(cell);
                f[e].iter().map(|v| v * sign).collect()
            }
            FluxTrace::PerCell(f) => f[cell][le].clone(),
        }
    }

    pub fn local_dofs(&self, mesh: &PolygonalMesh, cell: usize) -> Vec<f64> {
        let mut out = self.interior[cell].clone();
        for le in 0..mesh.cell(cell).edges.len() {
            out.extend(self.local_flux(mesh, cell, le));
        }
        out
    }

    pub fn interior_poly(&self, el: &LocalElement) -> VectorCellPolynomial {
        VectorCellPolynomial::from_stacked(el.basis(self.k), &self.interior[el.cell])
    }
}

/// Piecewise polynomials on the edges (`Lambda_h`, `M_h`).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFunction {
    pub s: usize,
    pub coeffs: Vec<Vec<f64>>,
    /// Coefficients vanish on boundary edges (`Lambda_h^0`, `M_h^0`).
    pub boundary_zero: bool,
}

impl TraceFunction {
    pub fn zeros(mesh: &PolygonalMesh, s: usize) -> Self {
        Self { s, coeffs: vec![vec![0.0; s + 1]; mesh.num_edges()], boundary_zero: true }
    }

    pub fn check(&self, mesh: &PolygonalMesh) -> Result<()> {
        if self.boundary_zero {
            for (e, c) in mesh.edges().iter().zip(&self.coeffs) {
                if e.is_boundary() && c.iter().any(|&v| v != 0.0) {
                    return invalid("trace in the zero-boundary space is nonzero on the boundary");
                }
            }
        }
        Ok(())
    }
}

/// Weak gradient of `w` on `cell`, in `[P_r]^2`.
pub fn weak_gradient(mesh: &PolygonalMesh, w: &WeakScalarFunction, cell: usize, r: usize, order: usize) -> Result<VectorCellPolynomial> {
    let el = LocalElement::new(mesh, cell, order);
    let op = WeakGradient::new(&el, w.k, w.s, r)?;
    Ok(VectorCellPolynomial::from_stacked(el.basis(r), &op.apply(&w.local_dofs(mesh, cell))))
}

/// Weak divergence of `q` on `cell`, in `P_r`.
pub fn weak_divergence(mesh: &PolygonalMesh, q: &WeakVectorField, cell: usize, r: usize, order: usize) -> Result<CellPolynomial> {
    let el = LocalElement::new(mesh, cell, order);
    let op = WeakDivergence::new(&el, q.k, q.s, r)?;
    Ok(CellPolynomial { basis: el.basis(r), coeffs: op.apply(&q.local_dofs(mesh, cell)) })
}

fn bilinear(m: &nalgebra::DMatrix<f64>, a: &[f64], b: &[f64]) -> f64 {
    DVector::from_column_slice(a).dot(&(m * DVector::from_column_slice(b)))
}

/// `s_p(w, phi)` summed over all cells.
pub fn stabilizer_primal(
    mesh: &PolygonalMesh,
    w: &WeakScalarFunction,
    phi: &WeakScalarFunction,
    spec: &StabilizerSpec,
    order: usize,
) -> Result<f64> {
    spec.validate()?;
    if spec.kind != StabilizerKind::Primal {
        return invalid("stabilizer_primal needs a primal stabilizer spec");
    }
    if (w.k, w.s) != (phi.k, phi.s) {
        return invalid(format!("weak functions live in different spaces: ({}, {}) vs ({}, {})", w.k, w.s, phi.k, phi.s));
    }
    let mut total = 0.0;
    for c in 0..mesh.num_cells() {
        let el = LocalElement::new(mesh, c, order);
        let s = stabilizer_matrix(&el, w.k, w.s, spec);
        total += bilinear(&s, &w.local_dofs(mesh, c), &phi.local_dofs(mesh, c));
    }
    Ok(total)
}

/// `s_m(q, v)` summed over all cells.
pub fn stabilizer_mixed(
    mesh: &PolygonalMesh,
    q: &WeakVectorField,
    v: &WeakVectorField,
    spec: &StabilizerSpec,
    order: usize,
) -> Result<f64> {
    spec.validate()?;
    if spec.kind != StabilizerKind::Mixed {
        return invalid("stabilizer_mixed needs a mixed stabilizer spec");
    }
    if (q.k, q.s) != (v.k, v.s) {
        return invalid(format!("weak fields live in different spaces: ({}, {}) vs ({}, {})", q.k, q.s, v.k, v.s));
    }
    let mut total = 0.0;
    for c in 0..mesh.num_cells() {
        let el = LocalElement::new(mesh, c, order);
        let s = stabilizer_matrix(&el, q.k, q.s, spec);
        total += bilinear(&s, &q.local_dofs(mesh, c), &v.local_dofs(mesh, c));
    }
    Ok(total)
}

#[cfg(test)]
mod tests;

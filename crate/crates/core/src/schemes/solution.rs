use super::system::{AssembledSystem, Field};
use super::{Scheme, SchemeConfig};
use crate::mesh::{Point, PolygonalMesh};
use crate::polybasis::{cell_dim, CellPolynomial, LocalElement, VectorCellPolynomial};
use crate::weakcalc::{FluxTrace, TraceFunction, WeakScalarFunction, WeakVectorField};

/// Solution of one scheme, split into its fields.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub config: SchemeConfig,
    /// Degree of the interior scalar `u0` / `u_h`.
    pub u_degree: usize,
    pub u: Vec<Vec<f64>>,
    /// `u_b` or the HDG trace (zero on the boundary).
    pub trace: Option<TraceFunction>,
    /// Degree of the interior flux.
    pub q_degree: usize,
    /// Interior flux: `q_h`, `q0` or the HDG flux; stacked `[x, y]`.
    pub q: Option<Vec<Vec<f64>>>,
    pub q_b: Option<FluxTrace>,
    /// HDG stabilization per cell.
    pub tau: Option<Vec<f64>>,
    pub total_dofs: usize,
    /// Size of the global system after static condensation.
    pub trace_dofs: usize,
}

impl DiscreteSolution {
    pub(crate) fn unpack(
        mesh: &PolygonalMesh,
        config: &SchemeConfig,
        system: &AssembledSystem,
        x: &[f64],
        trace_dofs: usize,
    ) -> Self {
        let (u_degree, q_degree) = match config.scheme {
            Scheme::PrimalWg => (config.k, config.r),
            Scheme::PrimalMixedWg => (config.k, config.m),
            _ => (config.r, config.k),
        };
        let ns = config.s + 1;
        let nc = mesh.num_cells();
        let has = |f: Field| system.dofs.labels.iter().any(|l| l.field == f);
        let mut u = vec![vec![0.0; cell_dim(u_degree)]; nc];
        let mut q = has(Field::Q).then(|| vec![vec![0.0; 2 * cell_dim(q_degree)]; nc]);
        let mut trace = has(Field::Trace).then(|| TraceFunction::zeros(mesh, config.s));
        let per_cell = system.dofs.labels.iter().any(|l| l.field == Field::Qb && l.cell.is_some());
        let mut q_b = has(Field::Qb).then(|| {
            if per_cell {
                FluxTrace::PerCell(mesh.cells().iter().map(|c| vec![vec![0.0; ns]; c.edges.len()]).collect())
            } else {
                FluxTrace::SingleValued(vec![vec![0.0; ns]; mesh.num_edges()])
            }
        });
        for (l, &v) in system.dofs.labels.iter().zip(x) {
            match (l.field, l.cell, l.edge) {
                (Field::U, Some(c), _) => u[c][l.index] = v,
                (Field::Q, Some(c), _) => q.as_mut().unwrap()[c][l.index] = v,
                (Field::Trace, _, Some(e)) => trace.as_mut().unwrap().coeffs[e][l.index] = v,
                (Field::Qb, cell, Some(e)) => match q_b.as_mut().unwrap() {
                    FluxTrace::PerCell(f) => {
                        let c = cell.unwrap();
                        let le = mesh.cell(c).edges.iter().position(|&x| x == e).unwrap();
                        f[c][le][l.index] = v;
                    }
                    FluxTrace::SingleValued(f) => f[e][l.index] = v,
                },
                _ => unreachable!("inconsistent dof label {l:?}"),
            }
        }
        let tau = config
            .scheme
            .is_hdg()
            .then(|| mesh.cells().iter().map(|c| config.tau_for(c.diameter)).collect());
        Self {
            config: config.clone(),
            u_degree,
            u,
            trace,
            q_degree,
            q,
            q_b,
            tau,
            total_dofs: system.dofs.len(),
            trace_dofs,
        }
    }

    pub fn u_poly(&self, el: &LocalElement) -> CellPolynomial {
        CellPolynomial { basis: el.basis(self.u_degree), coeffs: self.u[el.cell].clone() }
    }

    pub fn q_poly(&self, el: &LocalElement) -> Option<VectorCellPolynomial> {
        self.q.as_ref().map(|q| VectorCellPolynomial::from_stacked(el.basis(self.q_degree), &q[el.cell]))
    }

    /// `{u, trace}` as a weak function in `W_h^0`.
    pub fn weak_u(&self) -> Option<WeakScalarFunction> {
        let trace = self.trace.as_ref()?;
        Some(WeakScalarFunction {
            k: self.u_degree,
            s: trace.s,
            interior: self.u.clone(),
            boundary: trace.coeffs.clone(),
            homogeneous: true,
        })
    }

    /// `{q0, q_b}` for the mixed schemes.
    pub fn weak_q(&self) -> Option<WeakVectorField> {
        Some(WeakVectorField {
            k: self.q_degree,
            s: self.config.s,
            interior: self.q.clone()?,
            flux: self.q_b.clone()?,
        })
    }

    /// HDG numerical flux `q.n + tau (u - trace)` at a point of local edge
    /// `le`; not a polynomial, so it is evaluated pointwise.
    pub fn hdg_normal_flux(&self, mesh: &PolygonalMesh, el: &LocalElement, le: usize, x: Point) -> Option<f64> {
        let tau = self.tau.as_ref()?[el.cell];
        let q = self.q_poly(el)?;
        let e = mesh.cell(el.cell).edges[le];
        let (p0, p1) = mesh.edge_points(e);
        let d = p1 - p0;
        let t = 2.0 * (x - p0).dot(&d) / d.norm_squared() - 1.0;
        let eb = el.edge_basis(le, self.config.s);
        let trace: f64 = self.trace.as_ref()?.coeffs[e].iter().zip(eb.eval(t)).map(|(c, v)| c * v).sum();
        Some(q.eval(x).dot(&el.edges[le].normal) + tau * (self.u_poly(el).eval(x) - trace))
    }
}

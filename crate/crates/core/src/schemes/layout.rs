//! Global numbering of the unknowns of each scheme.

use super::system::{DofMap, Field};
use crate::mesh::PolygonalMesh;

pub(crate) type Map = Vec<Option<(usize, f64)>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FluxDofs {
    None,
    /// One `q_b` per edge, signed by the stored edge normal.
    SingleValued,
    /// One `q_b` per cell and local edge.
    PerCell,
}

/// Cell blocks `[q, q_b per local edge, u]` first, then edge blocks
/// (`q_b` on every edge, trace on interior edges).
pub(crate) struct Layout {
    pub dofs: DofMap,
    nq: usize,
    nu: usize,
    ns: usize,
    q: Vec<usize>,
    qb_cell: Vec<Vec<usize>>,
    qb_edge: Vec<Option<usize>>,
    u: Vec<usize>,
    trace: Vec<Option<usize>>,
}

impl Layout {
    pub fn new(mesh: &PolygonalMesh, nq: usize, flux: FluxDofs, nu: usize, s: usize, trace: bool) -> Self {
        let ns = s + 1;
        let mut dofs = DofMap::default();
        let (mut q, mut qb_cell, mut u) = (Vec::new(), Vec::new(), Vec::new());
        for (c, cell) in mesh.cells().iter().enumerate() {
            q.push(dofs.push_block(Field::Q, Some(c), None, nq));
            qb_cell.push(if flux == FluxDofs::PerCell {
                cell.edges.iter().map(|&e| dofs.push_block(Field::Qb, Some(c), Some(e), ns)).collect()
            } else {
                Vec::new()
            });
            u.push(dofs.push_block(Field::U, Some(c), None, nu));
        }
        let qb_edge = (0..mesh.num_edges())
            .map(|e| (flux == FluxDofs::SingleValued).then(|| dofs.push_block(Field::Qb, None, Some(e), ns)))
            .collect();
        let trace = mesh
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| (trace && !edge.is_boundary()).then(|| dofs.push_block(Field::Trace, None, Some(e), ns)))
            .collect();
        Self { dofs, nq, nu, ns, q, qb_cell, qb_edge, u, trace }
    }

    fn block(start: usize, n: usize) -> impl Iterator<Item = Option<(usize, f64)>> {
        (start..start + n).map(|g| Some((g, 1.0)))
    }

    pub fn q(&self, c: usize) -> Map {
        Self::block(self.q[c], self.nq).collect()
    }

    pub fn u(&self, c: usize) -> Map {
        Self::block(self.u[c], self.nu).collect()
    }

    pub fn qb(&self, mesh: &PolygonalMesh, c: usize) -> Map {
        let mut out = Vec::new();
        for (le, &e) in mesh.cell(c).edges.iter().enumerate() {
            if let Some(&start) = self.qb_cell.get(c).and_then(|v| v.get(le)) {
                out.extend(Self::block(start, self.ns));
            } else {
                let start = self.qb_edge[e].expect("layout has no flux trace");
                let sign = mesh.edge(e).orientation(c);
                out.extend((start..start + self.ns).map(|g| Some((g, sign))));
            }
        }
        out
    }

    /// Trace dofs of the cell's edges; boundary edges map to `None`.
    pub fn trace(&self, mesh: &PolygonalMesh, c: usize) -> Map {
        let mut out = Vec::new();
        for &e in &mesh.cell(c).edges {
            match self.trace[e] {
                Some(start) => out.extend(Self::block(start, self.ns)),
                None => out.extend(std::iter::repeat_n(None, self.ns)),
            }
        }
        out
    }
}

//! Polynomial spaces on cells and edges, quadrature, and L2 projections.

mod basis;
mod coefficient;
mod quadrature;

pub use basis::{cell_dim, legendre, CellBasis, EdgeBasis};
pub use coefficient::Coefficient;
pub use quadrature::{gauss_legendre, EdgeRule, QuadRule};

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::mesh::{Point, PolygonalMesh};

/// Integration order used when an integrand involves a coefficient that is
/// not constant (in particular `c = 1/a`, which is rational for affine `a`).
/// Such integrals are approximations; the order is chosen so that the
/// rational integrands used here converge to round-off.
pub const GENERIC_QUAD_ORDER: usize = 16;

/// Quadrature order for a problem whose polynomial degrees are at most
/// `max_degree`.
pub fn default_quad_order(max_degree: usize, coeff: &Coefficient) -> usize {
    let exact = 2 * max_degree + 2;
    if coeff.is_constant() {
        exact
    } else {
        exact.max(GENERIC_QUAD_ORDER)
    }
}

/// A polynomial in the scaled monomial basis of one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPolynomial {
    pub basis: CellBasis,
    pub coeffs: Vec<f64>,
}

impl CellPolynomial {
    pub fn zero(basis: CellBasis) -> Self {
        Self { basis, coeffs: vec![0.0; basis.dim()] }
    }

    pub fn eval(&self, x: Point) -> f64 {
        self.basis.eval(x).iter().zip(&self.coeffs).map(|(b, c)| b * c).sum()
    }

    pub fn grad(&self, x: Point) -> Point {
        self.basis.eval_grad(x).iter().zip(&self.coeffs).map(|(g, &c)| g * c).sum()
    }
}

/// Two cell polynomials sharing a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorCellPolynomial {
    pub x: CellPolynomial,
    pub y: CellPolynomial,
}

impl VectorCellPolynomial {
    /// Coefficients laid out as `[x..., y...]`.
    pub fn from_stacked(basis: CellBasis, stacked: &[f64]) -> Self {
        let n = basis.dim();
        Self {
            x: CellPolynomial { basis, coeffs: stacked[..n].to_vec() },
            y: CellPolynomial { basis, coeffs: stacked[n..2 * n].to_vec() },
        }
    }

    pub fn stacked(&self) -> Vec<f64> {
        self.x.coeffs.iter().chain(&self.y.coeffs).copied().collect()
    }

    pub fn eval(&self, p: Point) -> Point {
        Point::new(self.x.eval(p), self.y.eval(p))
    }

    pub fn divergence(&self, p: Point) -> f64 {
        self.x.grad(p).x + self.y.grad(p).y
    }
}

/// A polynomial on a segment in the orthonormal Legendre basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePolynomial {
    pub basis: EdgeBasis,
    pub start: Point,
    pub end: Point,
    pub coeffs: Vec<f64>,
}

impl EdgePolynomial {
    pub fn eval_param(&self, t: f64) -> f64 {
        self.basis.eval(t).iter().zip(&self.coeffs).map(|(b, c)| b * c).sum()
    }

    /// Evaluates at the orthogonal projection of `x` onto the segment line.
    pub fn eval(&self, x: Point) -> f64 {
        let d = self.end - self.start;
        let t = 2.0 * (x - self.start).dot(&d) / d.norm_squared() - 1.0;
        self.eval_param(t)
    }
}

/// One boundary edge of a cell as seen from that cell.
#[derive(Debug, Clone)]
pub struct LocalEdge {
    pub edge: usize,
    /// Outward normal of the owning cell.
    pub normal: Point,
    pub length: f64,
    pub boundary: bool,
    /// Nodes in the edge's stored orientation.
    pub rule: EdgeRule,
}

/// Quadrature and geometry of one cell and its edges.
#[derive(Debug, Clone)]
pub struct LocalElement {
    pub cell: usize,
    pub area: f64,
    pub centroid: Point,
    pub diameter: f64,
    pub order: usize,
    pub rule: QuadRule,
    pub edges: Vec<LocalEdge>,
}

impl LocalElement {
    pub fn new(mesh: &PolygonalMesh, cell: usize, order: usize) -> Self {
        let c = mesh.cell(cell);
        let edges = c
            .edges
            .iter()
            .map(|&e| {
                let edge = mesh.edge(e);
                let (p, q) = mesh.edge_points(e);
                LocalEdge {
                    edge: e,
                    normal: edge.normal_for(cell),
                    length: edge.length,
                    boundary: edge.is_boundary(),
                    rule: EdgeRule::new(p, q, order),
                }
            })
            .collect();
        Self {
            cell,
            area: c.area,
            centroid: c.centroid,
            diameter: c.diameter,
            order,
            rule: QuadRule::cell(mesh, cell, order),
            edges,
        }
    }

    pub fn basis(&self, degree: usize) -> CellBasis {
        CellBasis::new(degree, self.centroid, self.diameter)
    }

    pub fn edge_basis(&self, local: usize, degree: usize) -> EdgeBasis {
        EdgeBasis::new(degree, self.edges[local].length)
    }

    /// `(w phi_i, phi_j)_T` for the scaled monomials of `degree`.
    pub fn weighted_mass(&self, degree: usize, weight: impl Fn(Point) -> f64) -> DMatrix<f64> {
        let basis = self.basis(degree);
        let n = basis.dim();
        let mut m = DMatrix::zeros(n, n);
        for (&p, &w) in self.rule.points.iter().zip(&self.rule.weights) {
            let v = basis.eval(p);
            let wp = w * weight(p);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += wp * v[i] * v[j];
                }
            }
        }
        m
    }

    pub fn mass(&self, degree: usize) -> DMatrix<f64> {
        self.weighted_mass(degree, |_| 1.0)
    }

    /// `(w phi_i, psi_j)_T` between scaled monomials of two degrees.
    pub fn cross_mass(&self, rows: usize, cols: usize, weight: impl Fn(Point) -> f64) -> DMatrix<f64> {
        let (br, bc) = (self.basis(rows), self.basis(cols));
        let mut m = DMatrix::zeros(br.dim(), bc.dim());
        for (&p, &w) in self.rule.points.iter().zip(&self.rule.weights) {
            let (vr, vc) = (br.eval(p), bc.eval(p));
            let wp = w * weight(p);
            for i in 0..vr.len() {
                for j in 0..vc.len() {
                    m[(i, j)] += wp * vr[i] * vc[j];
                }
            }
        }
        m
    }

    /// `<phi_j, psi_l>_e`: row `l` gives the coefficient of `Q_b phi_j` along
    /// the orthonormal edge basis function `psi_l`.
    pub fn trace_projection(&self, local: usize, cell_degree: usize, edge_degree: usize) -> DMatrix<f64> {
        let basis = self.basis(cell_degree);
        let ebasis = self.edge_basis(local, edge_degree);
        let rule = &self.edges[local].rule;
        let mut m = DMatrix::zeros(ebasis.dim(), basis.dim());
        for ((&p, &t), &w) in rule.points.iter().zip(&rule.params).zip(&rule.weights) {
            let (v, psi) = (basis.eval(p), ebasis.eval(t));
            for l in 0..psi.len() {
                for j in 0..v.len() {
                    m[(l, j)] += w * psi[l] * v[j];
                }
            }
        }
        m
    }
}

/// Solves `m x = b` through a Cholesky factorization.
pub(crate) fn spd_solve(m: &DMatrix<f64>, b: DMatrix<f64>, cell: usize) -> Result<DMatrix<f64>> {
    let chol = m.clone().cholesky().ok_or(Error::SingularLocal { cell })?;
    Ok(chol.solve(&b))
}

fn check_order(order: usize) -> Result<()> {
    if order > 60 {
        return invalid(format!("quadrature order {order} is unreasonably large"));
    }
    Ok(())
}

/// L2 projection onto `P_s` of a segment: `Q_b`.
pub fn project_segment(p: Point, q: Point, f: impl Fn(Point) -> f64, s: usize, order: usize) -> Result<EdgePolynomial> {
    check_order(order)?;
    let length = (q - p).norm();
    if !(length > 0.0) {
        return invalid("cannot project onto a zero-length edge");
    }
    let basis = EdgeBasis::new(s, length);
    let rule = EdgeRule::new(p, q, order);
    let mut coeffs = vec![0.0; basis.dim()];
    for ((&x, &t), &w) in rule.points.iter().zip(&rule.params).zip(&rule.weights) {
        let fx = f(x);
        for (c, psi) in coeffs.iter_mut().zip(basis.eval(t)) {
            *c += w * fx * psi;
        }
    }
    Ok(EdgePolynomial { basis, start: p, end: q, coeffs })
}

/// `Q_b f` on mesh edge `e`, in the edge's stored orientation.
pub fn project_edge(mesh: &PolygonalMesh, e: usize, f: impl Fn(Point) -> f64, s: usize, order: usize) -> Result<EdgePolynomial> {
    let (p, q) = mesh.edge_points(e);
    project_segment(p, q, f, s, order)
}

/// L2 projection onto `P_k` of a polygon given by its counterclockwise
/// vertices, in the scaled monomial basis centred at the polygon centroid.
pub fn project_polygon(pts: &[Point], f: impl Fn(Point) -> f64, k: usize, order: usize) -> Result<CellPolynomial> {
    check_order(order)?;
    let n = pts.len();
    let mut area = 0.0;
    let mut m = Point::zeros();
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let cr = a.x * b.y - b.x * a.y;
        area += 0.5 * cr;
        m += (a + b) * cr;
    }
    if n < 3 || !(area > 0.0) {
        return invalid(format!("polygon has non-positive area {area}"));
    }
    let centroid = m / (6.0 * area);
    let mut diameter: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            diameter = diameter.max((pts[i] - pts[j]).norm());
        }
    }
    let basis = CellBasis::new(k, centroid, diameter);
    project_onto(basis, &QuadRule::polygon(pts, centroid, order), f, 0)
}

fn project_onto(basis: CellBasis, rule: &QuadRule, f: impl Fn(Point) -> f64, cell: usize) -> Result<CellPolynomial> {
    let dim = basis.dim();
    let mut mass = DMatrix::zeros(dim, dim);
    let mut rhs = DMatrix::zeros(dim, 1);
    for (&x, &w) in rule.points.iter().zip(&rule.weights) {
        let v = basis.eval(x);
        let fx = f(x);
        for i in 0..dim {
            rhs[(i, 0)] += w * fx * v[i];
            for j in 0..dim {
                mass[(i, j)] += w * v[i] * v[j];
            }
        }
    }
    let coeffs = spd_solve(&mass, rhs, cell)?;
    Ok(CellPolynomial { basis, coeffs: coeffs.column(0).iter().copied().collect() })
}

/// `Q_0 f` on cell `c`.
pub fn project_cell_scalar(mesh: &PolygonalMesh, c: usize, f: impl Fn(Point) -> f64, k: usize, order: usize) -> Result<CellPolynomial> {
    check_order(order)?;
    let el = LocalElement::new(mesh, c, order);
    project_onto(el.basis(k), &el.rule, f, c)
}

/// Componentwise `Q_0` of a vector field: the projection written `Q_h` on
/// vector spaces.
pub fn project_cell_vector(
    mesh: &PolygonalMesh,
    c: usize,
    f: impl Fn(Point) -> Point,
    k: usize,
    order: usize,
) -> Result<VectorCellPolynomial> {
    Ok(VectorCellPolynomial {
        x: project_cell_scalar(mesh, c, |p| f(p).x, k, order)?,
        y: project_cell_scalar(mesh, c, |p| f(p).y, k, order)?,
    })
}

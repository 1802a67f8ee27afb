use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::mesh::{Point, PolygonalMesh};

/// Gauss-Legendre nodes and weights on `[-1, 1]` exact for degree `order`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(order / 2 + 1).expect("at least one node");
    GaussLegendre::new(n).as_node_weight_pairs().to_vec()
}

/// Points and weights in physical coordinates.
#[derive(Debug, Clone, Default)]
pub struct QuadRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    /// Appends a collapsed-square (Duffy) rule on triangle `abc`.
    ///
    /// The weights carry the signed area, so fans over non-star-shaped
    /// polygons still integrate polynomials exactly.
    fn push_triangle(&mut self, a: Point, b: Point, c: Point, order: usize) {
        let twice_area = (b - a).x * (c - a).y - (b - a).y * (c - a).x;
        // the collapsed map adds one degree in the radial direction
        let radial = gauss_legendre(order + 1);
        let angular = gauss_legendre(order);
        for &(u, wu) in &radial {
            let u = 0.5 * (u + 1.0);
            for &(v, wv) in &angular {
                let v = 0.5 * (v + 1.0);
                let p = a + (b - a) * u + (c - b) * (u * v);
                self.points.push(p);
                self.weights.push(0.25 * wu * wv * u * twice_area);
            }
        }
    }

    /// Fan of triangles from the cell centroid.
    pub fn cell(mesh: &PolygonalMesh, cell: usize, order: usize) -> Self {
        Self::polygon(&mesh.cell_points(cell), mesh.cell(cell).centroid, order)
    }

    /// Fan of triangles from `apex` over a closed vertex loop.
    pub fn polygon(pts: &[Point], apex: Point, order: usize) -> Self {
        let mut rule = Self::default();
        for i in 0..pts.len() {
            rule.push_triangle(apex, pts[i], pts[(i + 1) % pts.len()], order);
        }
        rule
    }

    pub fn triangle(a: Point, b: Point, c: Point, order: usize) -> Self {
        let mut rule = Self::default();
        rule.push_triangle(a, b, c, order);
        rule
    }
}

/// Gauss rule on a segment, with the reference coordinate of each node.
#[derive(Debug, Clone)]
pub struct EdgeRule {
    pub points: Vec<Point>,
    /// Arc-length weights.
    pub weights: Vec<f64>,
    /// Node positions in `[-1, 1]` measured from `p` to `q`.
    pub params: Vec<f64>,
}

impl EdgeRule {
    pub fn new(p: Point, q: Point, order: usize) -> Self {
        let half = 0.5 * (q - p).norm();
        let nodes = gauss_legendre(order);
        Self {
            points: nodes.iter().map(|&(t, _)| p + (q - p) * (0.5 * (t + 1.0))).collect(),
            weights: nodes.iter().map(|&(_, w)| w * half).collect(),
            params: nodes.iter().map(|&(t, _)| t).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;

    fn monomial_integral_unit_square(a: i32, b: i32) -> f64 {
        1.0 / ((a + 1) as f64 * (b + 1) as f64)
    }

    #[test]
    fn cell_rule_exact_for_monomials() {
        let mesh = PolygonalMesh::generate_grid(1, 1, Rect::unit()).unwrap();
        for order in 0..=12 {
            let rule = QuadRule::cell(&mesh, 0, order);
            for a in 0..=order as i32 {
                for b in 0..=(order as i32 - a) {
                    let exact = monomial_integral_unit_square(a, b);
                    let got = rule.integrate(|p| p.x.powi(a) * p.y.powi(b));
                    assert!((got - exact).abs() <= 1e-13 * exact, "order {order} x^{a} y^{b}: {got} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn triangle_rule_exact_on_reference() {
        // int over the unit simplex of x^a y^b = a! b! / (a + b + 2)!
        let fact = |n: i32| (1..=n).map(|k| k as f64).product::<f64>();
        let rule = QuadRule::triangle(Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0), 9);
        for a in 0..=9 {
            for b in 0..=(9 - a) {
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                let got = rule.integrate(|p| p.x.powi(a) * p.y.powi(b));
                assert!((got - exact).abs() <= 1e-13 * exact);
            }
        }
    }

    #[test]
    fn edge_rule_exact() {
        let rule = EdgeRule::new(Point::new(0.0, 0.0), Point::new(3.0, 4.0), 7);
        // int_0^5 s^7 ds along the segment
        let got = rule.integrate(|p| p.norm().powi(7));
        let exact = 5f64.powi(8) / 8.0;
        assert!((got - exact).abs() <= 1e-13 * exact);
    }
}

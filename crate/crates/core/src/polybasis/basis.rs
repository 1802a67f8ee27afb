use crate::mesh::{Point, PolygonalMesh};

/// Number of bivariate monomials of total degree at most `k`.
pub fn cell_dim(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Scaled monomials `((x - x_c) / h)^a ((y - y_c) / h)^b`, `a + b <= k`,
/// ordered by total degree then by decreasing power of x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellBasis {
    pub degree: usize,
    pub center: Point,
    pub scale: f64,
}

impl CellBasis {
    pub fn new(degree: usize, center: Point, scale: f64) -> Self {
        Self { degree, center, scale }
    }

    pub fn on_cell(mesh: &PolygonalMesh, cell: usize, degree: usize) -> Self {
        let c = mesh.cell(cell);
        Self::new(degree, c.centroid, c.diameter)
    }

    pub fn dim(&self) -> usize {
        cell_dim(self.degree)
    }

    pub fn exponents(&self) -> impl Iterator<Item = (usize, usize)> {
        (0..=self.degree).flat_map(|d| (0..=d).map(move |b| (d - b, b)))
    }

    fn local(&self, x: Point) -> (f64, f64) {
        ((x.x - self.center.x) / self.scale, (x.y - self.center.y) / self.scale)
    }

    fn powers(&self, t: f64) -> Vec<f64> {
        let mut p = vec![1.0; self.degree + 1];
        for i in 1..=self.degree {
            p[i] = p[i - 1] * t;
        }
        p
    }

    pub fn eval(&self, x: Point) -> Vec<f64> {
        let (s, t) = self.local(x);
        let (ps, pt) = (self.powers(s), self.powers(t));
        self.exponents().map(|(a, b)| ps[a] * pt[b]).collect()
    }

    /// Gradients in physical coordinates.
    pub fn eval_grad(&self, x: Point) -> Vec<Point> {
        let (s, t) = self.local(x);
        let (ps, pt) = (self.powers(s), self.powers(t));
        let inv = 1.0 / self.scale;
        self.exponents()
            .map(|(a, b)| {
                let dx = if a > 0 { a as f64 * ps[a - 1] * pt[b] } else { 0.0 };
                let dy = if b > 0 { b as f64 * ps[a] * pt[b - 1] } else { 0.0 };
                Point::new(dx * inv, dy * inv)
            })
            .collect()
    }
}

/// Legendre polynomials `P_0..=P_n` at `t`.
pub fn legendre(n: usize, t: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n >= 1 {
        p.push(t);
    }
    for l in 1..n {
        let lf = l as f64;
        p.push(((2.0 * lf + 1.0) * t * p[l] - lf * p[l - 1]) / (lf + 1.0));
    }
    p
}

/// Legendre polynomials on an edge, scaled to be orthonormal in `L^2(e)`.
///
/// The reference coordinate runs from the edge's first stored vertex
/// (`t = -1`) to its second (`t = 1`), so both owners share coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeBasis {
    pub degree: usize,
    pub length: f64,
}

impl EdgeBasis {
    pub fn new(degree: usize, length: f64) -> Self {
        Self { degree, length }
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        legendre(self.degree, t)
            .into_iter()
            .enumerate()
            .map(|(l, p)| p * ((2 * l + 1) as f64 / self.length).sqrt())
            .collect()
    }
}

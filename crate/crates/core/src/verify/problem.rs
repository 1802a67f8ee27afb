use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::mesh::Point;
use crate::polybasis::Coefficient;

type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;

/// Exact solution, coefficient and the matching source `f = -div(a grad u)`.
#[derive(Clone)]
pub struct ManufacturedProblem {
    pub name: String,
    pub coeff: Coefficient,
    u: ScalarFn,
    grad: VectorFn,
    laplacian: ScalarFn,
}

impl fmt::Debug for ManufacturedProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManufacturedProblem").field("name", &self.name).field("coeff", &self.coeff).finish()
    }
}

impl ManufacturedProblem {
    pub const BUILTIN: [&'static str; 3] = ["sinsin", "quad", "zero"];

    /// `u`, its gradient and Laplacian; `coeff` must be constant or affine
    /// so that `f` has a closed form.
    pub fn new(
        name: impl Into<String>,
        coeff: Coefficient,
        u: impl Fn(Point) -> f64 + Send + Sync + 'static,
        grad: impl Fn(Point) -> Point + Send + Sync + 'static,
        laplacian: impl Fn(Point) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if coeff.gradient(Point::zeros()).is_none() {
            return invalid("manufactured problems need a constant or affine coefficient");
        }
        Ok(Self { name: name.into(), coeff, u: Arc::new(u), grad: Arc::new(grad), laplacian: Arc::new(laplacian) })
    }

    pub fn builtin(name: &str, coeff: Coefficient) -> Result<Self> {
        match name {
            "sinsin" => Self::new(
                name,
                coeff,
                |p| (PI * p.x).sin() * (PI * p.y).sin(),
                |p| PI * Point::new((PI * p.x).cos() * (PI * p.y).sin(), (PI * p.x).sin() * (PI * p.y).cos()),
                |p| -2.0 * PI * PI * (PI * p.x).sin() * (PI * p.y).sin(),
            ),
            "quad" => Self::new(
                name,
                coeff,
                |p| p.x * (1.0 - p.x) * p.y * (1.0 - p.y),
                |p| Point::new((1.0 - 2.0 * p.x) * p.y * (1.0 - p.y), p.x * (1.0 - p.x) * (1.0 - 2.0 * p.y)),
                |p| -2.0 * (p.y * (1.0 - p.y) + p.x * (1.0 - p.x)),
            ),
            "zero" => Self::new(name, coeff, |_| 0.0, |_| Point::zeros(), |_| 0.0),
            _ => Err(Error::InvalidArgument(format!(
                "unknown problem '{name}', expected one of {}",
                Self::BUILTIN.join(", ")
            ))),
        }
    }

    pub fn u(&self, p: Point) -> f64 {
        (self.u)(p)
    }

    pub fn grad_u(&self, p: Point) -> Point {
        (self.grad)(p)
    }

    /// `q = -a grad u`.
    pub fn flux(&self, p: Point) -> Point {
        -self.grad_u(p) * self.coeff.eval(p)
    }

    /// `f = -a lap u - grad a . grad u`.
    pub fn source(&self, p: Point) -> f64 {
        let ga = self.coeff.gradient(p).unwrap_or_else(Point::zeros);
        -self.coeff.eval(p) * (self.laplacian)(p) - ga.dot(&self.grad_u(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{PolygonalMesh, Rect};
    use crate::polybasis::{EdgeRule, QuadRule};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn problems() -> Vec<ManufacturedProblem> {
        let mut out = Vec::new();
        for coeff in [Coefficient::one(), Coefficient::Affine { a0: 1.0, ax: 1.0, ay: 0.0 }] {
            for name in ["sinsin", "quad"] {
                out.push(ManufacturedProblem::builtin(name, coeff.clone()).unwrap());
            }
        }
        out
    }

    #[test]
    fn source_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = 1e-4;
        for prob in problems() {
            // flux q = -a grad u through centered differences, then div q
            let q = |p: Point| {
                let ux = (prob.u(p + Point::new(h, 0.0)) - prob.u(p - Point::new(h, 0.0))) / (2.0 * h);
                let uy = (prob.u(p + Point::new(0.0, h)) - prob.u(p - Point::new(0.0, h))) / (2.0 * h);
                -Point::new(ux, uy) * prob.coeff.eval(p)
            };
            for _ in 0..20 {
                let p = Point::new(rng.random_range(0.1..0.9), rng.random_range(0.1..0.9));
                let div = (q(p + Point::new(h, 0.0)).x - q(p - Point::new(h, 0.0)).x) / (2.0 * h)
                    + (q(p + Point::new(0.0, h)).y - q(p - Point::new(0.0, h)).y) / (2.0 * h);
                assert!((div - prob.source(p)).abs() < 1e-6, "{}: {div} vs {}", prob.name, prob.source(p));
            }
        }
    }

    #[test]
    fn vanishes_on_boundary() {
        for prob in problems() {
            for t in [0.0, 0.3, 0.77, 1.0] {
                for p in [Point::new(t, 0.0), Point::new(t, 1.0), Point::new(0.0, t), Point::new(1.0, t)] {
                    assert!(prob.u(p).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn divergence_theorem() {
        let mesh = PolygonalMesh::generate_grid(1, 1, Rect::unit()).unwrap();
        for prob in problems() {
            let volume = QuadRule::cell(&mesh, 0, 24).integrate(|p| prob.source(p));
            let mut boundary = 0.0;
            for &e in &mesh.cell(0).edges {
                let (p, q) = mesh.edge_points(e);
                let n = mesh.edge(e).normal_for(0);
                boundary += EdgeRule::new(p, q, 24).integrate(|x| prob.flux(x).dot(&n));
            }
            assert!((volume - boundary).abs() < 1e-8, "{}", prob.name);
        }
    }

    #[test]
    fn unknown_names_and_coefficients() {
        let err = ManufacturedProblem::builtin("bump", Coefficient::one()).unwrap_err().to_string();
        assert!(err.contains("sinsin"));
        assert!(ManufacturedProblem::builtin("sinsin", Coefficient::generic(|p| 1.0 + p.x)).is_err());
    }
}

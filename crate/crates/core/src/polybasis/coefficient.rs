use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::Point;

/// Scalar diffusion coefficient `a(x)`; `c(x) = 1 / a(x)` is always taken
/// pointwise.
///
/// Tensor-valued coefficients would enter through [`Coefficient::eval`]
/// returning a 2x2 matrix; no scheme needs them yet.
#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    /// `a0 + ax * x + ay * y`
    Affine { a0: f64, ax: f64, ay: f64 },
    Generic(Arc<dyn Fn(Point) -> f64 + Send + Sync>),
}

impl Coefficient {
    pub fn one() -> Self {
        Self::Constant(1.0)
    }

    pub fn generic(f: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        Self::Generic(Arc::new(f))
    }

    pub fn eval(&self, x: Point) -> f64 {
        match self {
            Self::Constant(v) => *v,
            Self::Affine { a0, ax, ay } => a0 + ax * x.x + ay * x.y,
            Self::Generic(f) => f(x),
        }
    }

    pub fn inverse(&self, x: Point) -> f64 {
        1.0 / self.eval(x)
    }

    pub fn gradient(&self, x: Point) -> Option<Point> {
        match self {
            Self::Constant(_) => Some(Point::zeros()),
            Self::Affine { ax, ay, .. } => Some(Point::new(*ax, *ay)),
            Self::Generic(_) => {
                let _ = x;
                None
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }

    /// Fails on the first point where `a(x) <= 0` or is not finite.
    pub fn check_positive<'a>(&self, points: impl IntoIterator<Item = &'a Point>) -> Result<()> {
        for p in points {
            let value = self.eval(*p);
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveCoefficient { value, x: p.x, y: p.y });
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(v) => write!(f, "const:{v}"),
            Self::Affine { a0, ax, ay } => write!(f, "affine:{a0},{ax},{ay}"),
            Self::Generic(_) => write!(f, "generic"),
        }
    }
}

impl FromStr for Coefficient {
    type Err = Error;

    /// Accepts `const:<v>` and `affine:<a0>,<ax>,<ay>`.
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: &str| Error::Parse { what: format!("coefficient '{s}'"), reason: reason.into() };
        let (kind, args) = s.split_once(':').ok_or_else(|| parse_err("expected const:<v> or affine:<a0>,<ax>,<ay>"))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| parse_err(&e.to_string()))?;
        match (kind, nums.as_slice()) {
            ("const", [v]) => Ok(Self::Constant(*v)),
            ("affine", [a0, ax, ay]) => Ok(Self::Affine { a0: *a0, ax: *ax, ay: *ay }),
            ("const", _) => Err(parse_err("const takes one value")),
            ("affine", _) => Err(parse_err("affine takes three values")),
            _ => Err(parse_err("unknown coefficient kind")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_descriptors() {
        let a: Coefficient = "affine:1,1,0".parse().unwrap();
        assert_eq!(a.eval(Point::new(0.5, 7.0)), 1.5);
        assert_eq!(a.to_string(), "affine:1,1,0");
        let c: Coefficient = "const:2.5".parse().unwrap();
        assert!(c.is_constant());
        assert_eq!(c.inverse(Point::zeros()), 0.4);
        assert!("affine:1,2".parse::<Coefficient>().is_err());
        assert!("tensor:1".parse::<Coefficient>().is_err());
    }

    #[test]
    fn non_positive_detected() {
        let a = Coefficient::Affine { a0: 1.0, ax: -2.0, ay: 0.0 };
        let pts = [Point::new(0.1, 0.0), Point::new(0.9, 0.0)];
        assert!(matches!(a.check_positive(&pts), Err(Error::NonPositiveCoefficient { .. })));
    }
}

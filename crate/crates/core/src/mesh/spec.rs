use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::{PolygonalMesh, Rect};
use crate::error::{Error, Result};

/// Textual mesh descriptor: `grid:N`, `grid:NxM`, `poly:N`, `brick:N` or
/// `file:<path>`. Generated meshes cover the unit square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeshSpec {
    Grid(usize, usize),
    Polygonal(usize),
    Brick(usize),
    File(PathBuf),
}

impl MeshSpec {
    pub const FORMS: &'static str = "grid:N, grid:NxM, poly:N, brick:N, file:<path>";

    pub fn build(&self) -> Result<PolygonalMesh> {
        match self {
            Self::Grid(nx, ny) => PolygonalMesh::generate_grid(*nx, *ny, Rect::unit()),
            Self::Polygonal(n) => PolygonalMesh::generate_polygonal(*n, Rect::unit()),
            Self::Brick(n) => PolygonalMesh::generate_brick(*n, *n, Rect::unit()),
            Self::File(p) => PolygonalMesh::load(p),
        }
    }

    /// Parses a comma-separated list.
    pub fn parse_list(s: &str) -> Result<Vec<Self>> {
        s.split(',').filter(|x| !x.trim().is_empty()).map(|x| x.trim().parse()).collect()
    }
}

impl fmt::Display for MeshSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Grid(nx, ny) if nx == ny => write!(f, "grid:{nx}"),
            Self::Grid(nx, ny) => write!(f, "grid:{nx}x{ny}"),
            Self::Polygonal(n) => write!(f, "poly:{n}"),
            Self::Brick(n) => write!(f, "brick:{n}"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for MeshSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fail = |reason: &str| Error::Parse {
            what: format!("mesh descriptor '{s}'"),
            reason: format!("{reason}; expected one of {}", Self::FORMS),
        };
        let (kind, arg) = s.split_once(':').ok_or_else(|| fail("missing ':'"))?;
        let count = |t: &str| t.parse::<usize>().map_err(|_| fail("bad subdivision count"));
        match kind {
            "grid" => match arg.split_once('x') {
                Some((a, b)) => Ok(Self::Grid(count(a)?, count(b)?)),
                None => {
                    let n = count(arg)?;
                    Ok(Self::Grid(n, n))
                }
            },
            "poly" => Ok(Self::Polygonal(count(arg)?)),
            "brick" => Ok(Self::Brick(count(arg)?)),
            "file" if !arg.is_empty() => Ok(Self::File(PathBuf::from(arg))),
            _ => Err(fail("unknown mesh kind")),
        }
    }
}

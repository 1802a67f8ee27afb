use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PolygonalMesh;
use crate::error::{Error, Result};

/// On-disk mesh layout. Edges are always rederived.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshFile {
    pub vertices: Vec<[f64; 2]>,
    pub cells: Vec<Vec<usize>>,
}

impl PolygonalMesh {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: MeshFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "mesh JSON".into(),
            reason: e.to_string(),
        })?;
        Self::new(file.vertices, file.cells)
    }

    pub fn to_json(&self) -> String {
        let (vertices, cells) = self.to_raw();
        serde_json::to_string(&MeshFile { vertices, cells }).expect("mesh serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.json");
        let mesh = PolygonalMesh::generate_grid(2, 2, Rect::unit()).unwrap();
        mesh.save(&path).unwrap();
        let back = PolygonalMesh::load(&path).unwrap();
        assert_eq!(mesh.to_raw(), back.to_raw());
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let err = PolygonalMesh::from_json(r#"{"vertices": [[0,0]], "cells": "no"}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn clockwise_file_accepted() {
        let mesh = PolygonalMesh::from_json(
            r#"{"vertices": [[0,0],[1,0],[1,1],[0,1]], "cells": [[0,3,2,1]]}"#,
        )
        .unwrap();
        assert_eq!(mesh.cell(0).vertices, vec![1, 2, 3, 0]);
        assert!(mesh.cell(0).area > 0.0);
    }
}

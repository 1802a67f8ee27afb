//! Polygonal partitions of a planar domain.
//!
//! A [`PolygonalMesh`] stores counterclockwise cells and the derived edge
//! partition. Edges are the segments between consecutive boundary vertices of
//! a cell; a vertex of one cell lying in the interior of another cell's side
//! is inserted into that side, so a flat side may be split into several edges
//! without any hanging-node treatment.

mod generate;
mod io;
mod spec;

pub use generate::Rect;
pub use spec::MeshSpec;

use nalgebra::Vector2;

use crate::error::{Error, Result};

pub type Point = Vector2<f64>;

/// Relative tolerance for geometric coincidence tests.
const GEOM_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Cell {
    /// Vertex indices, counterclockwise.
    pub vertices: Vec<usize>,
    /// `edges[i]` is the segment from `vertices[i]` to `vertices[i + 1]`.
    pub edges: Vec<usize>,
    pub area: f64,
    pub centroid: Point,
    /// Largest distance between two vertices.
    pub diameter: f64,
}

#[derive(Debug, Clone)]
pub struct Edge {
    /// Endpoints in the order traversed by `owners[0]`.
    pub vertices: [usize; 2],
    /// One owner for boundary edges, two for interior edges.
    pub owners: Vec<usize>,
    /// Unit normal pointing out of `owners[0]`.
    pub normal: Point,
    pub length: f64,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.owners.len() == 1
    }

    /// Outward unit normal of `cell` on this edge.
    ///
    /// The second owner gets the stored vector negated, so the two normals of
    /// an interior edge are exact opposites.
    pub fn normal_for(&self, cell: usize) -> Point {
        self.normal * self.orientation(cell)
    }

    /// `+1.0` for the first owner, `-1.0` for the second.
    pub fn orientation(&self, cell: usize) -> f64 {
        if self.owners[0] == cell {
            1.0
        } else {
            debug_assert_eq!(self.owners.get(1), Some(&cell));
            -1.0
        }
    }
}

#[derive(Debug, Clone)]
pub struct PolygonalMesh {
    vertices: Vec<Point>,
    cells: Vec<Cell>,
    edges: Vec<Edge>,
}

impl PolygonalMesh {
    /// Builds a mesh from raw vertex coordinates and vertex loops.
    ///
    /// Clockwise loops are reoriented. Vertices lying strictly inside a side
    /// of some cell are spliced into that side.
    pub fn new(vertices: Vec<[f64; 2]>, cells: Vec<Vec<usize>>) -> Result<Self> {
        let vertices: Vec<Point> = vertices.iter().map(|p| Point::new(p[0], p[1])).collect();
        if vertices.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidMesh("non-finite vertex coordinate".into()));
        }
        if cells.is_empty() {
            return Err(Error::InvalidMesh("mesh has no cells".into()));
        }

        let mut loops = Vec::with_capacity(cells.len());
        for (c, cell) in cells.into_iter().enumerate() {
            if cell.len() < 3 {
                return Err(Error::InvalidMesh(format!(
                    "cell {c} has {} vertices, need at least 3",
                    cell.len()
                )));
            }
            for &v in &cell {
                if v >= vertices.len() {
                    return Err(Error::InvalidMesh(format!(
                        "cell {c} references vertex {v}, only {} vertices",
                        vertices.len()
                    )));
                }
            }
            let mut sorted = cell.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidMesh(format!("cell {c} repeats a vertex index")));
            }
            let mut cell = cell;
            let area = signed_area(&vertices, &cell);
            if area.abs() <= GEOM_TOL * bbox_scale(&vertices, &cell).powi(2) {
                return Err(Error::InvalidMesh(format!("cell {c} has zero area")));
            }
            if area < 0.0 {
                cell.reverse();
            }
            loops.push(cell);
        }

        splice_t_junctions(&vertices, &mut loops);

        for (c, cell) in loops.iter().enumerate() {
            if !is_simple(&vertices, cell) {
                return Err(Error::InvalidMesh(format!("cell {c} is self-intersecting")));
            }
        }

        let mut edges: Vec<Edge> = Vec::new();
        let mut lookup = std::collections::HashMap::new();
        let mut cells = Vec::with_capacity(loops.len());
        for (c, cell) in loops.into_iter().enumerate() {
            let n = cell.len();
            let mut cell_edges = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (cell[i], cell[(i + 1) % n]);
                let key = (a.min(b), a.max(b));
                let id = match lookup.get(&key) {
                    Some(&id) => {
                        let edge: &mut Edge = &mut edges[id];
                        if edge.owners.len() >= 2 {
                            return Err(Error::InvalidMesh(format!(
                                "edge ({a}, {b}) is shared by more than two cells"
                            )));
                        }
                        if edge.owners[0] == c {
                            return Err(Error::InvalidMesh(format!(
                                "cell {c} traverses edge ({a}, {b}) twice"
                            )));
                        }
                        if edge.vertices != [b, a] {
                            return Err(Error::InvalidMesh(format!(
                                "cells {} and {c} overlap along edge ({a}, {b})",
                                edge.owners[0]
                            )));
                        }
                        edge.owners.push(c);
                        id
                    }
                    None => {
                        let d = vertices[b] - vertices[a];
                        let length = d.norm();
                        edges.push(Edge {
                            vertices: [a, b],
                            owners: vec![c],
                            normal: Point::new(d.y, -d.x) / length,
                            length,
                        });
                        lookup.insert(key, edges.len() - 1);
                        edges.len() - 1
                    }
                };
                cell_edges.push(id);
            }
            let (area, centroid) = area_centroid(&vertices, &cell);
            let diameter = diameter(&vertices, &cell);
            cells.push(Cell { vertices: cell, edges: cell_edges, area, centroid, diameter });
        }

        Ok(Self { vertices, cells, edges })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn cell(&self, c: usize) -> &Cell {
        &self.cells[c]
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_interior_edges(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_boundary()).count()
    }

    /// Largest cell diameter.
    pub fn h_max(&self) -> f64 {
        self.cells.iter().map(|c| c.diameter).fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.area).sum()
    }

    /// Endpoints of edge `e` in its stored orientation.
    pub fn edge_points(&self, e: usize) -> (Point, Point) {
        let [a, b] = self.edges[e].vertices;
        (self.vertices[a], self.vertices[b])
    }

    /// Cell vertex coordinates, counterclockwise.
    pub fn cell_points(&self, c: usize) -> Vec<Point> {
        self.cells[c].vertices.iter().map(|&v| self.vertices[v]).collect()
    }

    /// Raw vertex coordinates and cell loops, as stored in mesh files.
    pub fn to_raw(&self) -> (Vec<[f64; 2]>, Vec<Vec<usize>>) {
        (
            self.vertices.iter().map(|p| [p.x, p.y]).collect(),
            self.cells.iter().map(|c| c.vertices.clone()).collect(),
        )
    }
}

fn signed_area(vertices: &[Point], cell: &[usize]) -> f64 {
    let n = cell.len();
    (0..n)
        .map(|i| {
            let p = vertices[cell[i]];
            let q = vertices[cell[(i + 1) % n]];
            p.x * q.y - q.x * p.y
        })
        .sum::<f64>()
        * 0.5
}

fn area_centroid(vertices: &[Point], cell: &[usize]) -> (f64, Point) {
    let n = cell.len();
    // shift to the first vertex for accuracy on small cells far from the origin
    let o = vertices[cell[0]];
    let mut area = 0.0;
    let mut m = Point::zeros();
    for i in 0..n {
        let p = vertices[cell[i]] - o;
        let q = vertices[cell[(i + 1) % n]] - o;
        let cross = p.x * q.y - q.x * p.y;
        area += cross;
        m += (p + q) * cross;
    }
    area *= 0.5;
    (area, o + m / (6.0 * area))
}

fn diameter(vertices: &[Point], cell: &[usize]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, &a) in cell.iter().enumerate() {
        for &b in &cell[i + 1..] {
            d = d.max((vertices[a] - vertices[b]).norm());
        }
    }
    d
}

fn bbox_scale(vertices: &[Point], cell: &[usize]) -> f64 {
    diameter(vertices, cell).max(f64::MIN_POSITIVE)
}

fn cross(a: Point, b: Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Inserts every mesh vertex that lies strictly inside a cell side.
fn splice_t_junctions(vertices: &[Point], loops: &mut [Vec<usize>]) {
    for cell in loops.iter_mut() {
        let n = cell.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (cell[i], cell[(i + 1) % n]);
            out.push(a);
            let (p, q) = (vertices[a], vertices[b]);
            let d = q - p;
            let len2 = d.norm_squared();
            let (lo, hi) = (p.inf(&q), p.sup(&q));
            let pad = GEOM_TOL * len2.sqrt();
            let mut inside: Vec<(f64, usize)> = vertices
                .iter()
                .enumerate()
                .filter(|&(v, x)| {
                    v != a
                        && v != b
                        && x.x >= lo.x - pad
                        && x.x <= hi.x + pad
                        && x.y >= lo.y - pad
                        && x.y <= hi.y + pad
                })
                .filter_map(|(v, x)| {
                    let t = (x - p).dot(&d) / len2;
                    let off = cross(d, x - p).abs() / len2.sqrt();
                    (t > GEOM_TOL && t < 1.0 - GEOM_TOL && off <= pad).then_some((t, v))
                })
                .collect();
            inside.sort_by(|x, y| x.0.total_cmp(&y.0));
            out.extend(inside.into_iter().map(|(_, v)| v));
        }
        *cell = out;
    }
}

fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(p2 - p1, q1 - p1);
    let d2 = cross(p2 - p1, q2 - p1);
    let d3 = cross(q2 - q1, p1 - q1);
    let d4 = cross(q2 - q1, p2 - q1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: Point, b: Point, x: Point, d: f64| {
        d == 0.0 && x.x >= a.x.min(b.x) && x.x <= a.x.max(b.x) && x.y >= a.y.min(b.y) && x.y <= a.y.max(b.y)
    };
    on(p1, p2, q1, d1) || on(p1, p2, q2, d2) || on(q1, q2, p1, d3) || on(q1, q2, p2, d4)
}

fn is_simple(vertices: &[Point], cell: &[usize]) -> bool {
    let n = cell.len();
    let seg = |i: usize| (vertices[cell[i]], vertices[cell[(i + 1) % n]]);
    for i in 0..n {
        for j in i + 1..n {
            // adjacent sides share an endpoint by construction
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (p1, p2) = seg(i);
            let (q1, q2) = seg(j);
            if segments_cross(p1, p2, q1, q2) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_square() -> PolygonalMesh {
        PolygonalMesh::generate_grid(1, 1, Rect::unit()).unwrap()
    }

    #[test]
    fn single_cell_geometry() {
        let mesh = unit_square();
        assert_eq!(mesh.num_cells(), 1);
        assert_eq!(mesh.num_edges(), 4);
        let cell = mesh.cell(0);
        assert_relative_eq!(cell.diameter, 2f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(cell.area, 1.0, epsilon = 1e-15);
        assert_relative_eq!(cell.centroid.x, 0.5, epsilon = 1e-15);
        assert_relative_eq!(cell.centroid.y, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn two_by_two_counts() {
        let mesh = PolygonalMesh::generate_grid(2, 2, Rect::unit()).unwrap();
        assert_eq!(mesh.num_cells(), 4);
        assert_eq!(mesh.num_edges(), 12);
        assert_eq!(mesh.num_interior_edges(), 4);
    }

    #[test]
    fn clockwise_cell_is_reoriented() {
        let mesh = PolygonalMesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![vec![0, 3, 2, 1]],
        )
        .unwrap();
        assert!(signed_area(mesh.vertices(), &mesh.cell(0).vertices) > 0.0);
        assert_relative_eq!(mesh.cell(0).area, 1.0);
    }

    #[test]
    fn repeated_vertex_rejected() {
        let err = PolygonalMesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]],
            vec![vec![0, 1, 1, 2]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidMesh(_)), "{err}");
    }

    #[test]
    fn edge_with_three_owners_rejected() {
        // three triangles hanging off the same segment 0-1
        let verts = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, -1.0], [0.5, 2.0]];
        let err = PolygonalMesh::new(verts, vec![vec![0, 1, 2], vec![1, 0, 3], vec![0, 1, 4]]).unwrap_err();
        assert!(matches!(err, Error::InvalidMesh(_)), "{err}");
    }

    #[test]
    fn bowtie_rejected() {
        let err = PolygonalMesh::new(
            vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]],
            vec![vec![0, 2, 3, 1]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidMesh(_)), "{err}");
    }

    #[test]
    fn hanging_vertex_is_spliced() {
        // a unit square on the left, two half squares on the right
        let verts = vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [0.0, 1.0],
            [2.0, 0.0],
            [2.0, 0.5],
            [1.0, 0.5],
            [2.0, 1.0],
        ];
        let cells = vec![vec![0, 1, 2, 3], vec![1, 4, 5, 6], vec![6, 5, 7, 2]];
        let mesh = PolygonalMesh::new(verts, cells).unwrap();
        assert_eq!(mesh.cell(0).vertices, vec![0, 1, 6, 2, 3]);
        assert_eq!(mesh.num_interior_edges(), 3);
        for e in mesh.edges() {
            if !e.is_boundary() {
                assert_eq!(e.normal_for(e.owners[1]), -e.normal);
            }
        }
    }

    #[test]
    fn boundary_normal_integral_vanishes() {
        for mesh in [
            PolygonalMesh::generate_grid(3, 2, Rect::unit()).unwrap(),
            PolygonalMesh::generate_polygonal(2, Rect::unit()).unwrap(),
            PolygonalMesh::generate_brick(3, 3, Rect::unit()).unwrap(),
        ] {
            for (c, cell) in mesh.cells().iter().enumerate() {
                let mut s = Point::zeros();
                for &e in &cell.edges {
                    let edge = mesh.edge(e);
                    s += edge.normal_for(c) * edge.length;
                }
                assert!(s.norm() < 1e-12, "cell {c}: {s:?}");
            }
            assert_relative_eq!(mesh.total_area(), 1.0, max_relative = 1e-12);
        }
    }
}

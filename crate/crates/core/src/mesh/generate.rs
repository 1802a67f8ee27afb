use std::collections::HashMap;

use super::{Point, PolygonalMesh};
use crate::error::{invalid, Result};

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn unit() -> Self {
        Self::new(0.0, 1.0, 0.0, 1.0)
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    fn check(&self) -> Result<()> {
        let ok = [self.x0, self.x1, self.y0, self.y1].iter().all(|v| v.is_finite())
            && self.x1 > self.x0
            && self.y1 > self.y0;
        if ok {
            Ok(())
        } else {
            invalid(format!("rectangle {self:?} has no positive area"))
        }
    }

    fn point(&self, fx: f64, fy: f64) -> [f64; 2] {
        [self.x0 + fx * (self.x1 - self.x0), self.y0 + fy * (self.y1 - self.y0)]
    }
}

impl PolygonalMesh {
    /// Uniform `nx` by `ny` rectangular grid.
    pub fn generate_grid(nx: usize, ny: usize, domain: Rect) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return invalid(format!("grid needs at least one subdivision, got {nx}x{ny}"));
        }
        domain.check()?;
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push(domain.point(i as f64 / nx as f64, j as f64 / ny as f64));
            }
        }
        let mut cells = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Self::new(vertices, cells)
    }

    /// Centroid dual of a structured triangulation with `2n` squares per side.
    ///
    /// Interior cells are hexagons; cells along the boundary are pentagons
    /// and quadrilaterals.
    pub fn generate_polygonal(n: usize, domain: Rect) -> Result<Self> {
        if n == 0 {
            return invalid("polygonal generator needs n >= 1");
        }
        domain.check()?;
        let m = 2 * n;
        let lattice = |i: usize, j: usize| {
            let p = domain.point(i as f64 / m as f64, j as f64 / m as f64);
            Point::new(p[0], p[1])
        };
        // each square split along its (i,j)-(i+1,j+1) diagonal
        let mut triangles = Vec::with_capacity(2 * m * m);
        for j in 0..m {
            for i in 0..m {
                triangles.push([(i, j), (i + 1, j), (i + 1, j + 1)]);
                triangles.push([(i, j), (i + 1, j + 1), (i, j + 1)]);
            }
        }

        let mut points: Vec<[f64; 2]> = Vec::new();
        let mut index: HashMap<(i64, i64), usize> = HashMap::new();
        // shared points are deduplicated by integer key so neighbours agree exactly
        let mut add = |key: (i64, i64), p: Point, points: &mut Vec<[f64; 2]>| {
            *index.entry(key).or_insert_with(|| {
                points.push([p.x, p.y]);
                points.len() - 1
            })
        };

        let mut incident: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                incident.entry(v).or_default().push(t);
            }
        }
        // boundary lattice edge: both ends on the same side of the rectangle
        let boundary_edge = |v: (usize, usize), w: (usize, usize)| {
            (v.0 == w.0 && (v.0 == 0 || v.0 == m)) || (v.1 == w.1 && (v.1 == 0 || v.1 == m))
        };
        let mut cells = Vec::with_capacity((m + 1) * (m + 1));
        for j in 0..=m {
            for i in 0..=m {
                let v = (i, j);
                let center = lattice(i, j);
                // ring points keyed by six times their lattice coordinates
                let mut ring: Vec<(Point, (i64, i64))> = Vec::new();
                for &t in &incident[&v] {
                    let tri = triangles[t];
                    let key = tri
                        .iter()
                        .fold((0, 0), |k, &(a, b)| (k.0 + 2 * a as i64, k.1 + 2 * b as i64));
                    let c = tri.iter().fold(Point::zeros(), |s, &(a, b)| s + lattice(a, b)) / 3.0;
                    ring.push((c, key));
                    for &w in &tri {
                        if w != v && boundary_edge(v, w) {
                            let key = (3 * (v.0 + w.0) as i64, 3 * (v.1 + w.1) as i64);
                            if !ring.iter().any(|r| r.1 == key) {
                                ring.push(((center + lattice(w.0, w.1)) * 0.5, key));
                            }
                        }
                    }
                }
                let inward = domain_inward(v, m);
                let angle = |p: Point| {
                    let d = p - center;
                    match inward {
                        Some(n) => (n.x * d.y - n.y * d.x).atan2(n.dot(&d)),
                        None => d.y.atan2(d.x),
                    }
                };
                ring.sort_by(|a, b| angle(a.0).total_cmp(&angle(b.0)));
                let mut loop_ids = Vec::with_capacity(ring.len() + 1);
                if inward.is_some() {
                    loop_ids.push(add((6 * i as i64, 6 * j as i64), center, &mut points));
                }
                for (p, key) in ring {
                    loop_ids.push(add(key, p, &mut points));
                }
                cells.push(loop_ids);
            }
        }
        Self::new(points, cells)
    }

    /// Brick-wall pattern: odd rows are shifted by half a cell, so every
    /// interior cell has two extra vertices on its long sides and each flat
    /// side is split into two edges.
    pub fn generate_brick(nx: usize, ny: usize, domain: Rect) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return invalid(format!("brick generator needs at least one subdivision, got {nx}x{ny}"));
        }
        domain.check()?;
        // half-step lattice in x
        let cols = 2 * nx;
        let id = |i: usize, j: usize| j * (cols + 1) + i;
        let mut vertices = Vec::with_capacity((cols + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=cols {
                vertices.push(domain.point(i as f64 / cols as f64, j as f64 / ny as f64));
            }
        }
        let mut cells = Vec::new();
        for j in 0..ny {
            let mut breaks: Vec<usize> = (0..=nx).map(|i| 2 * i).collect();
            if j % 2 == 1 {
                breaks = std::iter::once(0).chain((0..nx).map(|i| 2 * i + 1)).chain(std::iter::once(cols)).collect();
            }
            for w in breaks.windows(2) {
                let (a, b) = (w[0], w[1]);
                // corners only; the constructor splices the midside vertices
                cells.push(vec![id(a, j), id(b, j), id(b, j + 1), id(a, j + 1)]);
            }
        }
        // drop lattice points no cell touches; they would otherwise be spliced
        // into boundary sides
        let mut used = vec![false; vertices.len()];
        for c in &cells {
            for &v in c {
                used[v] = true;
            }
        }
        let mut remap = vec![usize::MAX; vertices.len()];
        let mut kept = Vec::new();
        for (v, p) in vertices.into_iter().enumerate() {
            if used[v] {
                remap[v] = kept.len();
                kept.push(p);
            }
        }
        let cells = cells.into_iter().map(|c| c.into_iter().map(|v| remap[v]).collect()).collect();
        Self::new(kept, cells)
    }
}

fn domain_inward((i, j): (usize, usize), m: usize) -> Option<Point> {
    let mut n = Point::zeros();
    if i == 0 {
        n.x += 1.0;
    }
    if i == m {
        n.x -= 1.0;
    }
    if j == 0 {
        n.y += 1.0;
    }
    if j == m {
        n.y -= 1.0;
    }
    (n.norm() > 0.0).then(|| n.normalize())
}

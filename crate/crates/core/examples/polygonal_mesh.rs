//! Generated meshes, their edge partition and the JSON mesh format.

use wgfem::mesh::{PolygonalMesh, Rect};

fn describe(name: &str, mesh: &PolygonalMesh) {
    let mut sides = std::collections::BTreeMap::new();
    for c in mesh.cells() {
        *sides.entry(c.edges.len()).or_insert(0) += 1;
    }
    println!(
        "{name}: {} cells, {} edges ({} interior), h = {:.4}, area = {:.12}, cells by edge count {sides:?}",
        mesh.num_cells(),
        mesh.num_edges(),
        mesh.num_interior_edges(),
        mesh.h_max(),
        mesh.total_area()
    );
}

fn main() -> wgfem::Result<()> {
    describe("grid 4x2", &PolygonalMesh::generate_grid(4, 2, Rect::unit())?);
    describe("polygonal 3", &PolygonalMesh::generate_polygonal(3, Rect::unit())?);
    describe("brick 3", &PolygonalMesh::generate_brick(3, 3, Rect::new(0.0, 2.0, 0.0, 1.0))?);

    // an L-shaped hexagon next to a square whose corner splits its side
    let mesh = PolygonalMesh::new(
        vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0], [2.0, 2.0]],
        vec![vec![0, 1, 2, 3, 4, 5], vec![3, 2, 6, 4]],
    )?;
    describe("custom", &mesh);
    let json = mesh.to_json();
    println!("{json}");
    describe("round trip", &PolygonalMesh::from_json(&json)?);
    Ok(())
}

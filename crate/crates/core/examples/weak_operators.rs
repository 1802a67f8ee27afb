//! Weak gradient, weak divergence and stabilizers of projected functions.

use wgfem::mesh::{Point, PolygonalMesh, Rect};
use wgfem::weakcalc::{
    stabilizer_primal, weak_divergence, weak_gradient, StabilizerSpec, WeakScalarFunction, WeakVectorField,
};

fn main() -> wgfem::Result<()> {
    let mesh = PolygonalMesh::generate_polygonal(1, Rect::unit())?;
    let order = 10;
    let cell = (0..mesh.num_cells()).max_by_key(|&c| mesh.cell(c).edges.len()).unwrap();
    let center = mesh.cell(cell).centroid;

    let u = |p: Point| p.x * p.x + 3.0 * p.x * p.y;
    let w = WeakScalarFunction::project(&mesh, u, 2, 2, order)?;
    let g = weak_gradient(&mesh, &w, cell, 1, order)?.eval(center);
    println!("cell {cell} ({} edges): weak gradient {:?}, exact {:?}", mesh.cell(cell).edges.len(), g, [2.0 * center.x + 3.0 * center.y, 3.0 * center.x]);

    let q = WeakVectorField::project(&mesh, |p| Point::new(p.x * p.y, p.y * p.y), 1, 1, order)?;
    let d = weak_divergence(&mesh, &q, cell, 1, order)?.eval(center);
    println!("weak divergence {d:.6}, exact {:.6}", 3.0 * center.y);

    let spec = StabilizerSpec::primal(1.0);
    println!("s_p of a projected quadratic (k = s = 2): {:.3e}", stabilizer_primal(&mesh, &w, &w, &spec, order)?);
    let mut rough = w.clone();
    rough.boundary.iter_mut().for_each(|b| b[0] += 0.1);
    println!("s_p after shifting every trace: {:.3e}", stabilizer_primal(&mesh, &rough, &rough, &spec, order)?);
    Ok(())
}

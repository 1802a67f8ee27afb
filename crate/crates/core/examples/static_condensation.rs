//! Hybridized schemes reduced to their trace unknowns.

use wgfem::mesh::{PolygonalMesh, Rect};
use wgfem::polybasis::Coefficient;
use wgfem::schemes::{assemble, condense, solve_system, Scheme, SchemeConfig, SolveMode, Tau};

fn main() -> wgfem::Result<()> {
    let mesh = PolygonalMesh::generate_polygonal(4, Rect::unit())?;
    let coeff = Coefficient::Affine { a0: 1.0, ax: 1.0, ay: 0.0 };
    let f = |p: wgfem::mesh::Point| (p.x * 7.0).sin() + p.y;
    for scheme in [Scheme::PrimalWg, Scheme::HybridMixedWg, Scheme::Hdg, Scheme::HdgV2] {
        let mut cfg = SchemeConfig::new(scheme, 1).with_degrees(1, 1, if scheme == Scheme::PrimalWg { 0 } else { 1 });
        cfg.tau = Tau::MatchMixed;
        let system = assemble(&mesh, &cfg, &coeff, &f)?;
        let reduced = condense(&system)?;
        let direct = solve_system(&mesh, &cfg, &system, SolveMode::Direct)?;
        let via = solve_system(&mesh, &cfg, &system, SolveMode::Condensed)?;
        let diff = direct.u.iter().flatten().zip(via.u.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!(
            "{scheme:>16}: {} unknowns -> {} trace unknowns ({} nonzeros), max difference {diff:.2e}",
            system.dofs.len(),
            reduced.system.dofs.len(),
            reduced.system.matrix.nnz()
        );
    }
    Ok(())
}

//! Which pairs of schemes produce the same discrete solution.

use wgfem::mesh::{PolygonalMesh, Rect};
use wgfem::polybasis::Coefficient;
use wgfem::schemes::{Scheme, SchemeConfig, Tau};
use wgfem::verify::{check_equivalence, ManufacturedProblem};

fn config(scheme: Scheme, (k, s, r): (usize, usize, usize), tau: Tau) -> SchemeConfig {
    let mut c = SchemeConfig::new(scheme, k).with_degrees(k, s, r);
    c.tau = tau;
    c
}

fn main() -> wgfem::Result<()> {
    let mesh = PolygonalMesh::generate_polygonal(2, Rect::unit())?;
    let problem = ManufacturedProblem::builtin("sinsin", Coefficient::Affine { a0: 1.0, ax: 1.0, ay: 0.0 })?;
    let cases = [
        (Scheme::MixedWg, Scheme::HybridMixedWg, (1, 1, 1), Tau::MatchMixed),
        (Scheme::Hdg, Scheme::HybridMixedWg, (1, 1, 1), Tau::MatchMixed),
        (Scheme::Hdg, Scheme::HybridMixedWg, (1, 0, 1), Tau::MatchMixed),
        (Scheme::Hdg, Scheme::HdgV2, (1, 0, 1), Tau::Constant(1.0)),
    ];
    for (a, b, degrees, tau) in cases {
        let r = check_equivalence(&mesh, &problem, &config(a, degrees, tau), &config(b, degrees, tau))?;
        println!("(k,s,r)={degrees:?} {r}");
    }

    // primal WG against HDG with V = [P0]^2, W = M = P1
    for coeff in [Coefficient::one(), Coefficient::Affine { a0: 1.0, ax: 1.0, ay: 0.0 }] {
        let problem = ManufacturedProblem::builtin("sinsin", coeff)?;
        let wg = config(Scheme::PrimalWg, (1, 1, 0), Tau::Constant(1.0));
        let hdg = config(Scheme::Hdg, (0, 1, 1), Tau::MatchPrimal);
        println!("a = {}: {}", problem.coeff, check_equivalence(&mesh, &problem, &wg, &hdg)?);
    }
    Ok(())
}

//! Convergence of primal WG on square and polygonal meshes, printed as CSV.

use wgfem::mesh::MeshSpec;
use wgfem::polybasis::Coefficient;
use wgfem::schemes::{Scheme, SchemeConfig};
use wgfem::verify::{run_convergence, ManufacturedProblem};

fn main() -> wgfem::Result<()> {
    let problem = ManufacturedProblem::builtin("sinsin", Coefficient::Affine { a0: 1.0, ax: 1.0, ay: 0.0 })?;
    for (label, list) in [("squares", "grid:4,grid:8,grid:16"), ("polygons", "poly:2,poly:4,poly:8")] {
        let meshes = MeshSpec::parse_list(list)?.iter().map(MeshSpec::build).collect::<wgfem::Result<Vec<_>>>()?;
        for k in [1, 2] {
            let cfg = SchemeConfig::new(Scheme::PrimalWg, k);
            let report = run_convergence(&meshes, &cfg, &problem)?;
            println!("# primal-wg k={k} on {label}: fitted L2 rate {:.3}", report.fitted.l2_u.unwrap_or(f64::NAN));
            report.write_csv(std::io::stdout())?;
        }
    }
    Ok(())
}

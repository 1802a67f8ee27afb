use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::mesh::{PolygonalMesh, Rect};
use crate::polybasis::{
    cell_dim, default_quad_order, project_cell_scalar, project_cell_vector, project_edge, CellPolynomial, Coefficient,
    LocalElement, VectorCellPolynomial,
};
use crate::schemes::{element_matrix, lift_flux, Scheme, SchemeConfig};
use crate::weakcalc::stabilizer_matrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Example8 {
    /// `(c q, q) / (q.q)` for the lifted constant flux `q`.
    pub hdg_value: f64,
    /// `(a Q_h(c q), Q_h(c q)) / (q.q)`.
    pub wg_value: f64,
    pub equal: bool,
}

/// The single-cell counterexample on `[0,1]^2` with `a = 1 + x`.
pub fn paper_example_8() -> Example8 {
    let coeff = Coefficient::Affine { a0: 1.0, ax: 1.0, ay: 0.0 };
    let order = default_quad_order(1, &coeff);
    example8_with(&coeff, order).expect("the unit square example is well posed")
}

/// Values of the HDG and WG flux forms on the unit square for a constant
/// lifted flux, from `w = x` with trace `x`, `V = [P_0]^2`, `W = M = P_1`.
pub fn example8_with(coeff: &Coefficient, order: usize) -> Result<Example8> {
    let mesh = PolygonalMesh::generate_grid(1, 1, Rect::unit())?;
    let w = project_cell_scalar(&mesh, 0, |p| p.x, 1, order)?;
    let mu = mesh
        .cell(0)
        .edges
        .iter()
        .map(|&e| project_edge(&mesh, e, |p| p.x, 1, order).map(|p| p.coeffs))
        .collect::<Result<Vec<_>>>()?;
    let q = lift_flux(&mesh, 0, &w, &mu, 0, coeff, order)?;
    let el = LocalElement::new(&mesh, 0, order);
    let qq = q.eval(el.centroid).norm_squared();
    let hdg = el.rule.integrate(|p| coeff.inverse(p) * q.eval(p).norm_squared()) / qq;
    let cq = project_cell_vector(&mesh, 0, |p| q.eval(p) * coeff.inverse(p), 0, order)?;
    let wg = el.rule.integrate(|p| coeff.eval(p) * cq.eval(p).norm_squared()) / qq;
    let equal = (hdg - wg).abs() <= 1e-10 * hdg.abs().max(1.0);
    Ok(Example8 { hdg_value: hdg, wg_value: wg, equal })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RewriteReport {
    pub cells: usize,
    /// Largest entrywise difference between the two element matrices.
    pub max_diff: f64,
    pub max_entry: f64,
}

/// Assembles each primal WG element matrix twice: from the weak gradient,
/// and from `(a Q_h(c q_u), Q_h(c q_v)) + s(u, v)` with `q_u` the lifted
/// flux of the local basis function `u`.
pub fn check_wg_rewrite(mesh: &PolygonalMesh, cfg: &SchemeConfig, coeff: &Coefficient) -> Result<RewriteReport> {
    if cfg.scheme != Scheme::PrimalWg {
        return invalid("the rewrite check applies to primal-wg");
    }
    if cfg.s < cfg.k {
        return invalid(format!("the rewrite check needs s >= k, got s={} k={}", cfg.s, cfg.k));
    }
    let order = cfg.quad_order(coeff);
    let (k, s, r) = (cfg.k, cfg.s, cfg.r);
    let (mut max_diff, mut max_entry) = (0.0f64, 0.0f64);
    for c in 0..mesh.num_cells() {
        let direct = element_matrix(mesh, cfg, coeff, c)?;
        let el = LocalElement::new(mesh, c, order);
        let (nk, ne) = (cell_dim(k), el.edges.len());
        let n = nk + ne * (s + 1);
        let lifted = (0..n)
            .map(|j| {
                let mut dofs = vec![0.0; n];
                dofs[j] = 1.0;
                let w = CellPolynomial { basis: el.basis(k), coeffs: dofs[..nk].to_vec() };
                let mu: Vec<Vec<f64>> = dofs[nk..].chunks(s + 1).map(<[f64]>::to_vec).collect();
                let q = lift_flux(mesh, c, &w, &mu, r, coeff, order)?;
                project_cell_vector(mesh, c, |p| q.eval(p) * coeff.inverse(p), r, order)
            })
            .collect::<Result<Vec<VectorCellPolynomial>>>()?;
        let mut m = stabilizer_matrix(&el, k, s, &cfg.primal_stabilizer());
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += el.rule.integrate(|p| coeff.eval(p) * lifted[i].eval(p).dot(&lifted[j].eval(p)));
            }
        }
        let d: DMatrix<f64> = &direct - &m;
        max_diff = max_diff.max(d.amax());
        max_entry = max_entry.max(direct.amax());
    }
    Ok(RewriteReport { cells: mesh.num_cells(), max_diff, max_entry })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn counterexample_values() {
        let e = paper_example_8();
        assert!((e.hdg_value - LN_2).abs() < 1e-10);
        assert!((e.wg_value - 1.5 * LN_2 * LN_2).abs() < 1e-10);
        assert!(!e.equal);
    }

    #[test]
    fn constant_coefficient_values_coincide() {
        let e = example8_with(&Coefficient::one(), 4).unwrap();
        assert!((e.hdg_value - 1.0).abs() < 1e-13 && (e.wg_value - 1.0).abs() < 1e-13);
        assert!(e.equal);
    }

    #[test]
    fn values_plateau_in_quadrature_order() {
        let coeff = Coefficient::Affine { a0: 1.0, ax: 1.0, ay: 0.0 };
        let reference = example8_with(&coeff, 30).unwrap();
        let mut last = f64::INFINITY;
        for order in [6, 10, 14, 18, 22] {
            let e = example8_with(&coeff, order).unwrap();
            let err = (e.hdg_value - reference.hdg_value).abs().max((e.wg_value - reference.wg_value).abs());
            assert!(err <= last.max(1e-15));
            last = err;
        }
        assert!(last < 1e-13);
    }

    #[test]
    fn rewrite_matches_direct_assembly() {
        let mesh = PolygonalMesh::generate_grid(2, 2, Rect::unit()).unwrap();
        let cfg = SchemeConfig::new(Scheme::PrimalWg, 1).with_degrees(1, 1, 0);
        for coeff in [Coefficient::one(), Coefficient::Affine { a0: 1.0, ax: 1.0, ay: 0.0 }] {
            let r = check_wg_rewrite(&mesh, &cfg, &coeff).unwrap();
            assert!(r.max_diff <= 1e-12, "{r:?}");
        }
        let bad = SchemeConfig::new(Scheme::PrimalWg, 2).with_degrees(2, 1, 1);
        assert!(check_wg_rewrite(&mesh, &bad, &Coefficient::one()).is_err());
    }
}

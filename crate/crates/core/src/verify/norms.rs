use nalgebra::DVector;
use serde::Serialize;

use super::ManufacturedProblem;
use crate::error::Result;
use crate::mesh::{Point, PolygonalMesh};
use crate::polybasis::{LocalElement, VectorCellPolynomial};
use crate::schemes::{DiscreteSolution, Scheme};
use crate::weakcalc::{stabilizer_matrix, vector_block, WeakGradient, WeakScalarFunction};

/// Errors of one discrete solution against the exact one. Norms that do not
/// apply to a scheme are NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub l2_u: f64,
    pub energy: f64,
    pub l2_q: f64,
}

fn error_order(sol: &DiscreteSolution) -> usize {
    (2 * sol.config.max_degree() + 8).max(sol.config.quad_order.unwrap_or(0))
}

pub fn error_norms(mesh: &PolygonalMesh, sol: &DiscreteSolution, problem: &ManufacturedProblem) -> Result<ErrorNorms> {
    let order = error_order(sol);
    let cfg = &sol.config;
    let primal = matches!(cfg.scheme, Scheme::PrimalWg | Scheme::PrimalMixedWg);
    let projected = if primal {
        let mut p = WeakScalarFunction::project(mesh, |x| problem.u(x), cfg.k, cfg.s, order)?;
        p.clear_boundary(mesh);
        Some(p)
    } else {
        None
    };
    let weak = sol.weak_u();

    let (mut l2_u, mut energy, mut l2_q) = (0.0, 0.0, 0.0);
    for c in 0..mesh.num_cells() {
        let el = LocalElement::new(mesh, c, order);
        let u = sol.u_poly(&el);
        l2_u += el.rule.integrate(|p| (u.eval(p) - problem.u(p)).powi(2));

        let mut wg_flux: Option<VectorCellPolynomial> = None;
        if let (Some(proj), Some(w)) = (&projected, &weak) {
            let g = WeakGradient::new(&el, cfg.k, cfg.s, cfg.r)?;
            let e = DVector::from_iterator(
                g.matrix.ncols(),
                w.local_dofs(mesh, c).iter().zip(proj.local_dofs(mesh, c)).map(|(a, b)| a - b),
            );
            let ge = &g.matrix * &e;
            let ma = vector_block(&el.weighted_mass(cfg.r, |p| problem.coeff.eval(p)));
            let s = stabilizer_matrix(&el, cfg.k, cfg.s, &cfg.primal_stabilizer());
            energy += ge.dot(&(ma * &ge)) + e.dot(&(s * &e));
            if cfg.scheme == Scheme::PrimalWg {
                let gu = g.apply(&w.local_dofs(mesh, c));
                wg_flux = Some(VectorCellPolynomial::from_stacked(el.basis(cfg.r), &gu));
            }
        }

        let qh: Option<Box<dyn Fn(Point) -> Point>> = match (wg_flux, sol.q_poly(&el)) {
            (Some(g), _) => {
                let coeff = problem.coeff.clone();
                Some(Box::new(move |p| -g.eval(p) * coeff.eval(p)))
            }
            (None, Some(q)) => Some(Box::new(move |p| q.eval(p))),
            _ => None,
        };
        match qh {
            Some(qh) => l2_q += el.rule.integrate(|p| (qh(p) - problem.flux(p)).norm_squared()),
            None => l2_q = f64::NAN,
        }
    }
    let energy = if projected.is_some() { energy.max(0.0).sqrt() } else { f64::NAN };
    Ok(ErrorNorms { l2_u: l2_u.sqrt(), energy, l2_q: l2_q.sqrt() })
}

/// `||u_a - u_b||` and `max(||u_a||, ||u_b||)` over the interior scalars.
pub(crate) fn l2_difference(mesh: &PolygonalMesh, a: &DiscreteSolution, b: &DiscreteSolution) -> (f64, f64) {
    let order = error_order(a).max(error_order(b));
    let (mut d, mut na, mut nb) = (0.0, 0.0, 0.0);
    for c in 0..mesh.num_cells() {
        let el = LocalElement::new(mesh, c, order);
        let (ua, ub) = (a.u_poly(&el), b.u_poly(&el));
        d += el.rule.integrate(|p| (ua.eval(p) - ub.eval(p)).powi(2));
        na += el.rule.integrate(|p| ua.eval(p).powi(2));
        nb += el.rule.integrate(|p| ub.eval(p).powi(2));
    }
    (d.sqrt(), na.max(nb).sqrt())
}

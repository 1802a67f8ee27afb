use std::fmt;

use nalgebra::DVector;
use serde::Serialize;

use super::{norms::l2_difference, ManufacturedProblem};
use crate::error::{Error, Result};
use crate::mesh::PolygonalMesh;
use crate::polybasis::LocalElement;
use crate::schemes::{self, DiscreteSolution, Scheme, SchemeConfig};

pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Equivalent => "EQUIVALENT",
            Self::NotEquivalent => "NOT EQUIVALENT",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub scheme_a: String,
    pub scheme_b: String,
    /// Largest coefficient difference over the shared fields.
    pub max_diff: f64,
    /// Largest coefficient magnitude of either solution.
    pub solution_norm: f64,
    pub fields: Vec<String>,
    /// `||u_a - u_b|| / max(||u_a||, ||u_b||)`.
    pub relative_l2_u: f64,
    pub verdict: Verdict,
    /// `(sum_T sum_i <u_h - Q_b u_h, v_i.n>^2)^(1/2)` over a basis of the
    /// interior flux space.
    pub error_eqn1: Option<f64>,
    /// `(sum_T ||(I - Q_b)(q0.n) + tau (I - Q_b) u_h||^2_{dT})^(1/2)`.
    pub error_eqn4: Option<f64>,
}

fn max_abs(v: &[Vec<f64>]) -> f64 {
    v.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
}

fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Whether two schemes solve for comparable unknowns.
fn comparable(a: Scheme, b: Scheme) -> bool {
    use Scheme::*;
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    matches!(
        (a, b),
        (PrimalWg, PrimalMixedWg)
            | (PrimalWg, Hdg)
            | (PrimalWg, HdgV2)
            | (MixedWg, HybridMixedWg)
            | (HybridMixedWg, Hdg)
            | (HybridMixedWg, HdgV2)
            | (Hdg, HdgV2)
    ) || a == b
}

/// Diagnostic magnitudes on a solution with an interior flux, a trace and a
/// stabilization `tau` per cell.
pub fn equation_residuals(mesh: &PolygonalMesh, sol: &DiscreteSolution) -> Option<(f64, f64)> {
    let cfg = &sol.config;
    let (q, _) = (sol.q.as_ref()?, sol.trace.as_ref()?);
    if !(cfg.scheme.is_hdg() || cfg.scheme == Scheme::HybridMixedWg) {
        return None;
    }
    let order = 2 * cfg.max_degree() + 4;
    let (mut e1, mut e4) = (0.0, 0.0);
    for c in 0..mesh.num_cells() {
        let el = LocalElement::new(mesh, c, order);
        let tau = match &sol.tau {
            Some(t) => t[c],
            None => cfg.rho.recip() * el.diameter.powf(-cfg.alpha),
        };
        let (bu, bq) = (el.basis(sol.u_degree), el.basis(sol.q_degree));
        let nq = bq.dim();
        let u = DVector::from_column_slice(&sol.u[c]);
        let (qx, qy) = (DVector::from_column_slice(&q[c][..nq]), DVector::from_column_slice(&q[c][nq..]));
        let mut moments = DVector::<f64>::zeros(2 * nq);
        for (le, edge) in el.edges.iter().enumerate() {
            let eb = el.edge_basis(le, cfg.s);
            let qbu = el.trace_projection(le, sol.u_degree, cfg.s) * &u;
            let pq = el.trace_projection(le, sol.q_degree, cfg.s);
            let qbq = &pq * &qx * edge.normal.x + &pq * &qy * edge.normal.y;
            for ((&p, &t), &w) in edge.rule.points.iter().zip(&edge.rule.params).zip(&edge.rule.weights) {
                let psi = DVector::from_vec(eb.eval(t));
                let phi_u = DVector::from_vec(bu.eval(p));
                let phi_q = DVector::from_vec(bq.eval(p));
                let du = phi_u.dot(&u) - psi.dot(&qbu);
                let qn = phi_q.dot(&qx) * edge.normal.x + phi_q.dot(&qy) * edge.normal.y;
                let dq = qn - psi.dot(&qbq);
                for i in 0..nq {
                    moments[i] += w * du * phi_q[i] * edge.normal.x;
                    moments[nq + i] += w * du * phi_q[i] * edge.normal.y;
                }
                e4 += w * (dq + tau * du).powi(2);
            }
        }
        e1 += moments.norm_squared();
    }
    Some((e1.sqrt(), e4.sqrt()))
}

/// Compares two solutions on the same mesh.
pub fn compare_solutions(mesh: &PolygonalMesh, a: &DiscreteSolution, b: &DiscreteSolution) -> Result<EquivalenceReport> {
    let (sa, sb) = (a.config.scheme, b.config.scheme);
    if !comparable(sa, sb) {
        return Err(Error::Incomparable(format!("{sa} and {sb} do not share unknowns")));
    }
    if a.u_degree != b.u_degree || a.u.len() != b.u.len() {
        return Err(Error::Incomparable(format!(
            "scalar degrees differ: {} for {sa}, {} for {sb}",
            a.u_degree, b.u_degree
        )));
    }
    let mut fields = vec!["u".to_string()];
    let mut diff = max_diff(&a.u, &b.u);
    let mut norm = max_abs(&a.u).max(max_abs(&b.u));
    if let (Some(ta), Some(tb)) = (&a.trace, &b.trace) {
        if ta.s == tb.s {
            fields.push("trace".into());
            diff = diff.max(max_diff(&ta.coeffs, &tb.coeffs));
            norm = norm.max(max_abs(&ta.coeffs)).max(max_abs(&tb.coeffs));
        }
    }
    if let (Some(qa), Some(qb)) = (&a.q, &b.q) {
        if a.q_degree == b.q_degree {
            fields.push("q".into());
            diff = diff.max(max_diff(qa, qb));
            norm = norm.max(max_abs(qa)).max(max_abs(qb));
        }
    }
    if let (Some(wa), Some(wb)) = (a.weak_q(), b.weak_q()) {
        if wa.s == wb.s {
            fields.push("q_b".into());
            for c in 0..mesh.num_cells() {
                for le in 0..mesh.cell(c).edges.len() {
                    let (x, y) = (wa.local_flux(mesh, c, le), wb.local_flux(mesh, c, le));
                    for (x, y) in x.iter().zip(&y) {
                        diff = diff.max((x - y).abs());
                        norm = norm.max(x.abs()).max(y.abs());
                    }
                }
            }
        }
    }
    let (d, n) = l2_difference(mesh, a, b);
    let relative_l2_u = if n > 0.0 { d / n } else { d };
    let verdict = if diff <= EQUIVALENCE_TOL * (1.0 + norm) { Verdict::Equivalent } else { Verdict::NotEquivalent };
    // prefer the hybridized mixed solution for the diagnostics
    let diag = [a, b]
        .into_iter()
        .filter(|s| s.config.scheme == Scheme::HybridMixedWg)
        .chain([a, b].into_iter().filter(|s| s.config.scheme.is_hdg()))
        .find_map(|s| equation_residuals(mesh, s));
    Ok(EquivalenceReport {
        scheme_a: sa.to_string(),
        scheme_b: sb.to_string(),
        max_diff: diff,
        solution_norm: norm,
        fields,
        relative_l2_u,
        verdict,
        error_eqn1: diag.map(|d| d.0),
        error_eqn4: diag.map(|d| d.1),
    })
}

/// Solves `problem` with both configurations and compares the solutions.
pub fn check_equivalence(
    mesh: &PolygonalMesh,
    problem: &ManufacturedProblem,
    a: &SchemeConfig,
    b: &SchemeConfig,
) -> Result<EquivalenceReport> {
    if !comparable(a.scheme, b.scheme) {
        return Err(Error::Incomparable(format!("{} and {} do not share unknowns", a.scheme, b.scheme)));
    }
    let f = |p| problem.source(p);
    let sa = schemes::solve(mesh, a, &problem.coeff, &f)?;
    let sb = schemes::solve(mesh, b, &problem.coeff, &f)?;
    compare_solutions(mesh, &sa, &sb)
}

impl fmt::Display for EquivalenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3e}"));
        write!(
            f,
            "{} vs {}: {} (max_diff={:.3e}, rel_l2_u={:.3e}, fields={}, error_eqn1={}, error_eqn4={})",
            self.scheme_a,
            self.scheme_b,
            self.verdict,
            self.max_diff,
            self.relative_l2_u,
            self.fields.join("+"),
            opt(self.error_eqn1),
            opt(self.error_eqn4)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;
    use crate::polybasis::Coefficient;
    use crate::schemes::Tau;

    fn setup() -> (PolygonalMesh, ManufacturedProblem) {
        (
            PolygonalMesh::generate_grid(2, 2, Rect::unit()).unwrap(),
            ManufacturedProblem::builtin("sinsin", Coefficient::Affine { a0: 1.0, ax: 1.0, ay: 0.0 }).unwrap(),
        )
    }

    fn cfg(scheme: Scheme, k: usize, s: usize, r: usize) -> SchemeConfig {
        let mut c = SchemeConfig::new(scheme, k).with_degrees(k, s, r);
        c.tau = Tau::MatchMixed;
        c
    }

    #[test]
    fn mixed_and_hybrid() {
        let (mesh, p) = setup();
        let r = check_equivalence(&mesh, &p, &cfg(Scheme::MixedWg, 1, 1, 1), &cfg(Scheme::HybridMixedWg, 1, 1, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::Equivalent);
        assert!(r.fields.contains(&"q_b".to_string()));
    }

    #[test]
    fn hdg_and_hybrid() {
        let (mesh, p) = setup();
        let r = check_equivalence(&mesh, &p, &cfg(Scheme::Hdg, 1, 1, 1), &cfg(Scheme::HybridMixedWg, 1, 1, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::Equivalent);
        assert!(r.error_eqn1.unwrap() < 1e-12 && r.error_eqn4.unwrap() < 1e-12);
        let r = check_equivalence(&mesh, &p, &cfg(Scheme::Hdg, 1, 0, 1), &cfg(Scheme::HybridMixedWg, 1, 0, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::NotEquivalent);
        assert!(r.error_eqn4.unwrap() > 1e-8);
    }

    #[test]
    fn symmetric_in_arguments() {
        let (mesh, p) = setup();
        let (a, b) = (cfg(Scheme::Hdg, 1, 0, 1), cfg(Scheme::HybridMixedWg, 1, 0, 1));
        let ab = check_equivalence(&mesh, &p, &a, &b).unwrap();
        let ba = check_equivalence(&mesh, &p, &b, &a).unwrap();
        assert_eq!(ab.verdict, ba.verdict);
        assert_eq!(ab.max_diff, ba.max_diff);
        assert_eq!(ab.relative_l2_u, ba.relative_l2_u);
    }

    #[test]
    fn incomparable_pairs() {
        let (mesh, p) = setup();
        let err = check_equivalence(&mesh, &p, &cfg(Scheme::PrimalWg, 1, 1, 0), &cfg(Scheme::MixedWg, 1, 1, 1)).unwrap_err();
        assert!(matches!(err, Error::Incomparable(_)));
        let err = check_equivalence(&mesh, &p, &cfg(Scheme::Hdg, 1, 1, 0), &cfg(Scheme::HybridMixedWg, 1, 1, 1)).unwrap_err();
        assert!(matches!(err, Error::Incomparable(_)));
    }
}

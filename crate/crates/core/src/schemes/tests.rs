use super::*;
use crate::mesh::Rect;
use std::f64::consts::PI;

fn sinsin_source(coeff: &Coefficient) -> impl Fn(Point) -> f64 + Sync + '_ {
    // -div(a grad u) for u = sin(pi x) sin(pi y) and affine a
    move |p: Point| {
        let (sx, sy, cx, cy) = ((PI * p.x).sin(), (PI * p.y).sin(), (PI * p.x).cos(), (PI * p.y).cos());
        let g = coeff.gradient(p).unwrap();
        2.0 * PI * PI * coeff.eval(p) * sx * sy - PI * (g.x * cx * sy + g.y * sx * cy)
    }
}

fn affine() -> Coefficient {
    Coefficient::Affine { a0: 1.0, ax: 1.0, ay: 0.0 }
}

fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn cfg(scheme: Scheme, k: usize, s: usize, r: usize) -> SchemeConfig {
    SchemeConfig::new(scheme, k).with_degrees(k, s, r)
}

#[test]
fn zero_source_gives_zero_solution() {
    let mesh = PolygonalMesh::generate_grid(2, 2, Rect::unit()).unwrap();
    for scheme in Scheme::ALL {
        let c = cfg(scheme, 1, 1, if scheme == Scheme::PrimalWg || scheme == Scheme::PrimalMixedWg { 0 } else { 1 });
        let sol = solve(&mesh, &c, &affine(), &|_| 0.0).unwrap();
        assert!(sol.u.iter().flatten().all(|&v| v == 0.0), "{scheme}");
    }
}

#[test]
fn single_cell_primal_dof_count() {
    let mesh = PolygonalMesh::generate_grid(1, 1, Rect::unit()).unwrap();
    let system = assemble(&mesh, &SchemeConfig::new(Scheme::PrimalWg, 1), &Coefficient::one(), &|_| 1.0).unwrap();
    assert_eq!(system.dofs.len(), 3);
}

#[test]
fn symmetric_schemes_are_symmetric() {
    let mesh = PolygonalMesh::generate_grid(4, 4, Rect::unit()).unwrap();
    let f = |_: Point| 1.0;
    for (scheme, k, s, r) in [
        (Scheme::PrimalWg, 2, 2, 1),
        (Scheme::PrimalMixedWg, 2, 2, 1),
        (Scheme::MixedWg, 2, 2, 1),
        (Scheme::HybridMixedWg, 2, 2, 1),
        (Scheme::Hdg, 2, 2, 1),
        (Scheme::HdgV2, 2, 2, 1),
    ] {
        let system = assemble(&mesh, &cfg(scheme, k, s, r), &affine(), &f).unwrap();
        assert!(system.matrix.max_asymmetry() <= 1e-12 * system.matrix.max_abs(), "{scheme}");
    }
}

#[test]
fn primal_condensation_matches_direct_solve() {
    let mesh = PolygonalMesh::generate_polygonal(2, Rect::unit()).unwrap();
    let coeff = affine();
    let f = sinsin_source(&coeff);
    let c = cfg(Scheme::PrimalWg, 2, 2, 1);
    let system = assemble(&mesh, &c, &coeff, &f).unwrap();
    let direct = solve_system(&mesh, &c, &system, SolveMode::Direct).unwrap();
    let cond = solve_system(&mesh, &c, &system, SolveMode::Condensed).unwrap();
    assert!(max_diff(&direct.u, &cond.u) < 1e-10);
    assert_eq!(cond.trace_dofs, mesh.num_interior_edges() * 3);
}

#[test]
fn mixed_equals_hybrid() {
    let mesh = PolygonalMesh::generate_grid(3, 3, Rect::unit()).unwrap();
    let coeff = affine();
    let f = sinsin_source(&coeff);
    for (k, s, r) in [(0, 0, 0), (1, 1, 1), (2, 2, 1)] {
        let m = solve(&mesh, &cfg(Scheme::MixedWg, k, s, r), &coeff, &f).unwrap();
        let h = solve(&mesh, &cfg(Scheme::HybridMixedWg, k, s, r), &coeff, &f).unwrap();
        assert!(max_diff(&m.u, &h.u) < 1e-9);
        assert!(max_diff(m.q.as_ref().unwrap(), h.q.as_ref().unwrap()) < 1e-9);
        let wq = h.weak_q().unwrap();
        let mq = m.weak_q().unwrap();
        for c in 0..mesh.num_cells() {
            for le in 0..mesh.cell(c).edges.len() {
                let (a, b) = (mq.local_flux(&mesh, c, le), wq.local_flux(&mesh, c, le));
                assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9));
            }
        }
    }
}

#[test]
fn hybrid_rewrite_and_flux_recovery() {
    let mesh = PolygonalMesh::generate_polygonal(1, Rect::unit()).unwrap();
    let coeff = affine();
    let f = sinsin_source(&coeff);
    let c = cfg(Scheme::HybridMixedWg, 1, 1, 1);
    let h = solve(&mesh, &c, &coeff, &f).unwrap();
    let v2 = assemble_hybrid_mixed_v2(&mesh, &c, &coeff, &f).unwrap();
    let h2 = solve_system(&mesh, &c, &v2, SolveMode::Direct).unwrap();
    assert!(max_diff(&h.u, &h2.u) < 1e-9);
    assert!(max_diff(&h.trace.as_ref().unwrap().coeffs, &h2.trace.as_ref().unwrap().coeffs) < 1e-9);
    let (FluxTrace::PerCell(a), FluxTrace::PerCell(b)) = (recover_wg_flux(&mesh, &h).unwrap(), h.q_b.clone().unwrap()) else {
        panic!("expected per-cell flux");
    };
    for (x, y) in a.iter().zip(&b) {
        assert!(max_diff(x, y) < 1e-9);
    }
}

fn hdg_vs_hybrid(k: usize, s: usize, r: usize) -> (f64, f64) {
    let mesh = PolygonalMesh::generate_grid(2, 2, Rect::unit()).unwrap();
    let coeff = affine();
    let f = sinsin_source(&coeff);
    let mut hc = cfg(Scheme::Hdg, k, s, r);
    hc.tau = Tau::MatchMixed;
    let hdg = solve(&mesh, &hc, &coeff, &f).unwrap();
    let hyb = solve(&mesh, &cfg(Scheme::HybridMixedWg, k, s, r), &coeff, &f).unwrap();
    let du = max_diff(&hdg.u, &hyb.u);
    let dt = max_diff(&hdg.trace.unwrap().coeffs, &hyb.trace.unwrap().coeffs);
    let dq = max_diff(hdg.q.as_ref().unwrap(), hyb.q.as_ref().unwrap());
    (du.max(dq), dt)
}

#[test]
fn hdg_equals_hybrid_when_trace_degree_dominates() {
    for (k, s, r) in [(0, 0, 0), (1, 1, 1), (1, 2, 2), (2, 2, 1)] {
        let (d, t) = hdg_vs_hybrid(k, s, r);
        assert!(d < 1e-9 && t < 1e-9, "({k},{s},{r}): {d} {t}");
    }
    let (d, _) = hdg_vs_hybrid(1, 0, 1);
    assert!(d > 1e-6);
}

#[test]
fn hdg_versions_agree() {
    let mesh = PolygonalMesh::generate_polygonal(2, Rect::unit()).unwrap();
    let coeff = affine();
    let f = sinsin_source(&coeff);
    for (k, s, r) in [(0, 1, 1), (1, 1, 1), (1, 0, 1), (2, 1, 2)] {
        let a = solve(&mesh, &cfg(Scheme::Hdg, k, s, r), &coeff, &f).unwrap();
        let b = solve(&mesh, &cfg(Scheme::HdgV2, k, s, r), &coeff, &f).unwrap();
        assert!(max_diff(&a.u, &b.u) < 1e-9);
        assert!(max_diff(&a.trace.unwrap().coeffs, &b.trace.unwrap().coeffs) < 1e-9);
    }
}

#[test]
fn primal_wg_matches_hdg_for_constant_coefficient() {
    let mesh = PolygonalMesh::generate_grid(4, 4, Rect::unit()).unwrap();
    let run = |coeff: Coefficient| {
        let f = sinsin_source(&coeff);
        let wg = solve(&mesh, &cfg(Scheme::PrimalWg, 1, 1, 0), &coeff, &f).unwrap();
        let mut hc = cfg(Scheme::Hdg, 0, 1, 1);
        hc.tau = Tau::MatchPrimal;
        let hdg = solve(&mesh, &hc, &coeff, &f).unwrap();
        max_diff(&wg.u, &hdg.u).max(max_diff(&wg.trace.unwrap().coeffs, &hdg.trace.unwrap().coeffs))
    };
    assert!(run(Coefficient::Constant(2.0)) < 1e-9);
    assert!(run(affine()) > 1e-6);
}

#[test]
fn primal_mixed_condenses_to_primal() {
    let mesh = PolygonalMesh::generate_grid(3, 3, Rect::unit()).unwrap();
    let coeff = Coefficient::Constant(1.5);
    let f = sinsin_source(&coeff);
    let a = solve(&mesh, &cfg(Scheme::PrimalWg, 2, 2, 1), &coeff, &f).unwrap();
    let mut pc = cfg(Scheme::PrimalMixedWg, 2, 2, 1);
    pc.m = 1;
    let b = solve(&mesh, &pc, &coeff, &f).unwrap();
    assert!(max_diff(&a.u, &b.u) < 1e-9);
}

#[test]
fn lift_of_linear_function() {
    let mesh = PolygonalMesh::generate_grid(1, 1, Rect::unit()).unwrap();
    let order = 16;
    let el = LocalElement::new(&mesh, 0, order);
    let w = crate::polybasis::project_cell_scalar(&mesh, 0, |p| p.x, 1, order).unwrap();
    let mu: Vec<Vec<f64>> = mesh.cell(0).edges.iter().map(|&e| crate::polybasis::project_edge(&mesh, e, |p| p.x, 1, order).unwrap().coeffs).collect();
    let q = lift_flux(&mesh, 0, &w, &mu, 0, &affine(), order).unwrap();
    let v = q.eval(el.centroid);
    assert!((v.x + 1.0 / 2f64.ln()).abs() < 1e-12);
    assert!(v.y.abs() < 1e-12);
}

#[test]
fn invalid_inputs() {
    let mesh = PolygonalMesh::generate_grid(2, 2, Rect::unit()).unwrap();
    let bad = Coefficient::Affine { a0: -0.5, ax: 1.0, ay: 0.0 };
    let err = solve(&mesh, &SchemeConfig::new(Scheme::PrimalWg, 1), &bad, &|_| 1.0).unwrap_err();
    assert!(matches!(err, Error::NonPositiveCoefficient { .. }));
    let mut hc = SchemeConfig::new(Scheme::Hdg, 1);
    hc.tau = Tau::Constant(-1.0);
    assert!(matches!(solve(&mesh, &hc, &Coefficient::one(), &|_| 1.0), Err(Error::InvalidArgument(_))));
}

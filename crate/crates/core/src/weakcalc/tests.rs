use super::*;
use crate::mesh::Rect;
use approx::assert_relative_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit() -> PolygonalMesh {
    PolygonalMesh::generate_grid(1, 1, Rect::unit()).unwrap()
}

const ORDER: usize = 10;

#[test]
fn gradient_of_constant_weak_function_vanishes() {
    let mesh = unit();
    for r in 0..3 {
        let w = WeakScalarFunction::project(&mesh, |_| 1.0, 1, 1, ORDER).unwrap();
        let g = weak_gradient(&mesh, &w, 0, r, ORDER).unwrap();
        assert!(g.stacked().iter().all(|v| v.abs() < 1e-12), "{:?}", g.stacked());
    }
}

#[test]
fn gradient_of_trace_compatible_x() {
    let mesh = unit();
    let w = WeakScalarFunction::project(&mesh, |p| p.x, 1, 1, ORDER).unwrap();
    let g = weak_gradient(&mesh, &w, 0, 0, ORDER).unwrap();
    let v = g.eval(Point::new(0.4, 0.8));
    assert_relative_eq!(v.x, 1.0, epsilon = 1e-13);
    assert_relative_eq!(v.y, 0.0, epsilon = 1e-13);
}

#[test]
fn gradient_from_right_edge_only() {
    let mesh = unit();
    let mut w = WeakScalarFunction::zeros(&mesh, 0, 0);
    let right = (0..mesh.num_edges())
        .find(|&e| {
            let (p, q) = mesh.edge_points(e);
            p.x == 1.0 && q.x == 1.0
        })
        .unwrap();
    // constant 1 in the orthonormal basis of a unit edge
    w.boundary[right] = vec![1.0];
    let g = weak_gradient(&mesh, &w, 0, 0, ORDER).unwrap();
    let v = g.eval(Point::new(0.5, 0.5));
    assert_relative_eq!(v.x, 1.0, epsilon = 1e-13);
    assert_relative_eq!(v.y, 0.0, epsilon = 1e-13);
}

#[test]
fn divergence_of_constant_field_vanishes() {
    let mesh = unit();
    let q = WeakVectorField::project(&mesh, |_| Point::new(1.5, -0.25), 1, 1, ORDER).unwrap();
    for r in 0..3 {
        let d = weak_divergence(&mesh, &q, 0, r, ORDER).unwrap();
        assert!(d.coeffs.iter().all(|v| v.abs() < 1e-12));
    }
}

#[test]
fn divergence_of_trace_compatible_linear_field() {
    let mesh = unit();
    let q = WeakVectorField::project(&mesh, |p| Point::new(p.x, 0.0), 1, 1, ORDER).unwrap();
    let d = weak_divergence(&mesh, &q, 0, 0, ORDER).unwrap();
    assert_relative_eq!(d.coeffs[0], 1.0, epsilon = 1e-13);
}

#[test]
fn divergence_without_flux_trace() {
    // (div_w q, 1) = -(q0, grad 1) + 0 = 0
    let mesh = unit();
    let mut q = WeakVectorField::project(&mesh, |p| Point::new(p.x, 0.0), 1, 1, ORDER).unwrap();
    q.flux = FluxTrace::SingleValued(vec![vec![0.0; 2]; mesh.num_edges()]);
    let d = weak_divergence(&mesh, &q, 0, 0, ORDER).unwrap();
    assert!(d.coeffs[0].abs() < 1e-14);
}

#[test]
fn primal_stabilizer_values() {
    let mesh = unit();
    let spec = StabilizerSpec::primal(1.0);
    let compatible = WeakScalarFunction::project(&mesh, |p| p.x * p.y, 2, 2, ORDER).unwrap();
    assert!(stabilizer_primal(&mesh, &compatible, &compatible, &spec, ORDER).unwrap().abs() < 1e-14);

    let mut w = WeakScalarFunction::zeros(&mesh, 1, 0);
    w.homogeneous = false;
    for b in w.boundary.iter_mut() {
        b[0] = 1.0; // unit edges: orthonormal constant is 1
    }
    let v = stabilizer_primal(&mesh, &w, &w, &spec, ORDER).unwrap();
    assert_relative_eq!(v, 4.0 / 2f64.sqrt(), epsilon = 1e-13);
}

#[test]
fn primal_stabilizer_nonnegative_on_random_functions() {
    let mesh = PolygonalMesh::generate_polygonal(1, Rect::unit()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let spec = StabilizerSpec::primal(2.0);
    for _ in 0..100 {
        let mut w = WeakScalarFunction::zeros(&mesh, 2, 1);
        w.interior.iter_mut().flatten().for_each(|v| *v = rng.random_range(-1.0..1.0));
        w.boundary.iter_mut().flatten().for_each(|v| *v = rng.random_range(-1.0..1.0));
        assert!(stabilizer_primal(&mesh, &w, &w, &spec, 6).unwrap() >= 0.0);
    }
}

#[test]
fn mixed_stabilizer_values() {
    let mesh = unit();
    let spec = StabilizerSpec::mixed(1.0, 1.0);
    let compatible = WeakVectorField::project(&mesh, |p| Point::new(p.y, p.x * p.x), 2, 2, ORDER).unwrap();
    assert!(stabilizer_mixed(&mesh, &compatible, &compatible, &spec, ORDER).unwrap().abs() < 1e-14);

    let mut q = WeakVectorField::zeros(&mesh, 1, 0, false);
    if let FluxTrace::SingleValued(f) = &mut q.flux {
        f.iter_mut().for_each(|b| b[0] = 1.0);
    }
    let v = stabilizer_mixed(&mesh, &q, &q, &spec, ORDER).unwrap();
    assert_relative_eq!(v, 4.0 * 2f64.sqrt(), epsilon = 1e-13);

    let mut q2 = q.clone();
    q2.interior[0][0] = 0.3;
    let a = stabilizer_mixed(&mesh, &q2, &q, &spec, ORDER).unwrap();
    for c in [-2.0, 0.5, 3.0] {
        let mut scaled = q2.clone();
        scaled.interior.iter_mut().flatten().for_each(|x| *x *= c);
        if let FluxTrace::SingleValued(f) = &mut scaled.flux {
            f.iter_mut().flatten().for_each(|x| *x *= c);
        }
        let b = stabilizer_mixed(&mesh, &scaled, &q, &spec, ORDER).unwrap();
        assert_relative_eq!(b, c * a, epsilon = 1e-12);
    }
}

#[test]
fn mismatched_spaces_rejected() {
    let mesh = unit();
    let a = WeakScalarFunction::zeros(&mesh, 1, 1);
    let b = WeakScalarFunction::zeros(&mesh, 1, 0);
    assert!(stabilizer_primal(&mesh, &a, &b, &StabilizerSpec::primal(1.0), ORDER).is_err());
    assert!(stabilizer_primal(&mesh, &a, &a, &StabilizerSpec::primal(0.0), ORDER).is_err());
}

#[test]
fn homogeneous_flag_checked() {
    let mesh = unit();
    let mut w = WeakScalarFunction::zeros(&mesh, 1, 1);
    w.boundary[0][0] = 1.0;
    assert!(w.check_homogeneous(&mesh).is_err());
    w.clear_boundary(&mesh);
    assert!(w.check_homogeneous(&mesh).is_ok());
}

#[test]
fn single_valued_flux_is_antisymmetric() {
    let mesh = PolygonalMesh::generate_grid(2, 2, Rect::unit()).unwrap();
    let q = WeakVectorField::project(&mesh, |p| Point::new(p.x + p.y, p.x * p.y), 1, 1, ORDER).unwrap();
    for (e, edge) in mesh.edges().iter().enumerate() {
        if edge.is_boundary() {
            continue;
        }
        let side = |c: usize| {
            let le = mesh.cell(c).edges.iter().position(|&x| x == e).unwrap();
            q.local_flux(&mesh, c, le)
        };
        let (a, b) = (side(edge.owners[0]), side(edge.owners[1]));
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(*x, -*y);
        }
    }
}

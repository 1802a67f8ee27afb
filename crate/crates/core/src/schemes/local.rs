//! Element matrices of every scheme.

use nalgebra::{DMatrix, DVector};

use super::SchemeConfig;
use crate::error::Result;
use crate::mesh::Point;
use crate::polybasis::{cell_dim, Coefficient, LocalElement};
use crate::weakcalc::{jump_operator, stabilizer_matrix, vector_block, WeakDivergence, WeakGradient};

/// `(f, phi_j)_T` over `P_k`.
pub(crate) fn load(el: &LocalElement, k: usize, f: &(dyn Fn(Point) -> f64 + Sync)) -> DVector<f64> {
    let basis = el.basis(k);
    let mut out = DVector::zeros(basis.dim());
    for (&p, &w) in el.rule.points.iter().zip(&el.rule.weights) {
        let fp = w * f(p);
        for (o, v) in out.iter_mut().zip(basis.eval(p)) {
            *o += fp * v;
        }
    }
    out
}

/// Places `blocks[(i, j)]` at the given row/column offsets.
fn stitch(sizes: &[usize], blocks: &[(usize, usize, DMatrix<f64>)]) -> DMatrix<f64> {
    let offsets: Vec<usize> = sizes.iter().scan(0, |acc, &n| {
        let o = *acc;
        *acc += n;
        Some(o)
    }).collect();
    let n: usize = sizes.iter().sum();
    let mut m = DMatrix::zeros(n, n);
    for (i, j, b) in blocks {
        let mut view = m.view_mut((offsets[*i], offsets[*j]), (b.nrows(), b.ncols()));
        view += b;
    }
    m
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn rhs_at(n: usize, offset: usize, v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(n);
    out.rows_mut(offset, v.len()).copy_from(v);
    out
}

/// `c`-weighted vector mass matrix of `[P_k]^2`.
pub(crate) fn flux_mass(el: &LocalElement, k: usize, coeff: &Coefficient) -> DMatrix<f64> {
    vector_block(&el.weighted_mass(k, |p| coeff.inverse(p)))
}

/// `sum_e <phi_i, phi_j>_e` over `P_r`.
pub(crate) fn boundary_mass(el: &LocalElement, r: usize) -> DMatrix<f64> {
    let basis = el.basis(r);
    let mut m = DMatrix::zeros(basis.dim(), basis.dim());
    for edge in &el.edges {
        for (&p, &w) in edge.rule.points.iter().zip(&edge.rule.weights) {
            let v = basis.eval(p);
            for i in 0..v.len() {
                for j in 0..v.len() {
                    m[(i, j)] += w * v[i] * v[j];
                }
            }
        }
    }
    m
}

/// Primal WG on `[u0, u_b]`: `G^T M_a G + S`.
pub(crate) fn primal_wg(el: &LocalElement, cfg: &SchemeConfig, coeff: &Coefficient, f: &(dyn Fn(Point) -> f64 + Sync)) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let (k, s, r) = (cfg.k, cfg.s, cfg.r);
    let g = WeakGradient::new(el, k, s, r)?;
    let ma = vector_block(&el.weighted_mass(r, |p| coeff.eval(p)));
    let m = g.matrix.transpose() * ma * &g.matrix + stabilizer_matrix(el, k, s, &cfg.primal_stabilizer());
    let n = m.nrows();
    Ok((symmetrize(m), rhs_at(n, 0, &load(el, k, f))))
}

/// Primal-mixed WG on `[q, u0, u_b]`.
pub(crate) fn primal_mixed(el: &LocalElement, cfg: &SchemeConfig, coeff: &Coefficient, f: &(dyn Fn(Point) -> f64 + Sync)) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let (k, s, r, m) = (cfg.k, cfg.s, cfg.r, cfg.m);
    let g = WeakGradient::new(el, k, s, r)?;
    let mc = flux_mass(el, m, coeff);
    let c = vector_block(&el.cross_mass(m, r, |_| 1.0)) * &g.matrix;
    let st = stabilizer_matrix(el, k, s, &cfg.primal_stabilizer());
    let (nq, nu) = (mc.nrows(), st.nrows());
    let ct = c.transpose();
    let mat = stitch(&[nq, nu], &[(0, 0, mc), (0, 1, c), (1, 0, ct), (1, 1, -symmetrize(st))]);
    Ok((mat, rhs_at(nq + nu, nq, &-load(el, k, f))))
}

/// `A = s_m + (c q0, v0)` on local vector dofs.
fn mixed_flux_block(el: &LocalElement, cfg: &SchemeConfig, coeff: &Coefficient) -> DMatrix<f64> {
    let mut a = stabilizer_matrix(el, cfg.k, cfg.s, &cfg.mixed_stabilizer());
    let mc = flux_mass(el, cfg.k, coeff);
    let nq0 = mc.nrows();
    let mut view = a.view_mut((0, 0), (nq0, nq0));
    view += mc;
    symmetrize(a)
}

/// Mixed WG on `[q0, q_b, u]`.
pub(crate) fn mixed_wg(el: &LocalElement, cfg: &SchemeConfig, coeff: &Coefficient, f: &(dyn Fn(Point) -> f64 + Sync)) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let a = mixed_flux_block(el, cfg, coeff);
    let b = WeakDivergence::new(el, cfg.k, cfg.s, cfg.r)?.rhs;
    let (nq, nu) = (a.nrows(), b.nrows());
    let bt = b.transpose();
    let mat = stitch(&[nq, nu], &[(0, 0, a), (0, 1, -bt), (1, 0, -b)]);
    Ok((mat, rhs_at(nq + nu, nq, &-load(el, cfg.r, f))))
}

/// Hybridized mixed WG on `[q0, q_b, u, u_b]`.
pub(crate) fn hybrid_mixed(el: &LocalElement, cfg: &SchemeConfig, coeff: &Coefficient, f: &(dyn Fn(Point) -> f64 + Sync)) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let a = mixed_flux_block(el, cfg, coeff);
    let b = WeakDivergence::new(el, cfg.k, cfg.s, cfg.r)?.rhs;
    let nq0 = 2 * cell_dim(cfg.k);
    let (nq, nu) = (a.nrows(), b.nrows());
    let nt = nq - nq0;
    let mut l = DMatrix::zeros(nt, nq);
    l.view_mut((0, nq0), (nt, nt)).fill_with_identity();
    let (bt, lt) = (b.transpose(), l.transpose());
    let mat = stitch(&[nq, nu, nt], &[(0, 0, a), (0, 1, -bt), (1, 0, -b), (0, 2, lt), (2, 0, l)]);
    Ok((mat, rhs_at(nq + nu + nt, nq, &-load(el, cfg.r, f))))
}

/// Hybridized mixed WG written with the flux trace eliminated from the
/// first equation; not symmetric.
pub(crate) fn hybrid_mixed_v2(el: &LocalElement, cfg: &SchemeConfig, coeff: &Coefficient, f: &(dyn Fn(Point) -> f64 + Sync)) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let (k, s, r) = (cfg.k, cfg.s, cfg.r);
    let tau = cfg.rho.recip() * el.diameter.powf(-cfg.alpha);
    let nq0 = 2 * cell_dim(k);
    let nr = cell_dim(r);
    let nt = el.edges.len() * (s + 1);

    let grad = WeakGradient::new(el, r, s, k)?.rhs;
    let d = -grad.columns(0, nr);
    let n = grad.columns(nr, nt).into_owned();
    let p = jump_operator(el, r, s, false).columns(0, nr).into_owned();
    let pn = jump_operator(el, k, s, true).columns(0, nq0).into_owned();
    // sum_e <phi_j, v_i.n>_e
    let (bk, br) = (el.basis(k), el.basis(r));
    let nk = bk.dim();
    let mut trace_flux = DMatrix::zeros(nq0, nr);
    for edge in &el.edges {
        for (&x, &w) in edge.rule.points.iter().zip(&edge.rule.weights) {
            let (v, phi) = (bk.eval(x), br.eval(x));
            for i in 0..nk {
                for j in 0..nr {
                    trace_flux[(i, j)] += w * v[i] * phi[j] * edge.normal.x;
                    trace_flux[(nk + i, j)] += w * v[i] * phi[j] * edge.normal.y;
                }
            }
        }
    }
    let y = trace_flux - &n * &p;
    let div = WeakDivergence::new(el, k, s, r)?.rhs;
    let eye = DMatrix::<f64>::identity(nt, nt);

    let mat = stitch(
        &[nq0, nt, nr, nt],
        &[
            (0, 0, flux_mass(el, k, coeff)),
            (0, 2, y - d),
            (0, 3, n),
            (2, 0, div.columns(0, nq0).into_owned()),
            (2, 1, div.columns(nq0, nt).into_owned()),
            (3, 1, eye.clone()),
            (1, 0, -pn),
            (1, 1, eye.clone()),
            (1, 2, -&p * tau),
            (1, 3, eye * tau),
        ],
    );
    Ok((mat, rhs_at(nq0 + 2 * nt + nr, nq0 + nt, &load(el, r, f))))
}

/// `tau [[U, -P^T], [-P, I]]` on `[u, trace]`.
fn hdg_stabilizer(el: &LocalElement, r: usize, s: usize, tau: f64) -> DMatrix<f64> {
    let nr = cell_dim(r);
    let p = jump_operator(el, r, s, false).columns(0, nr).into_owned();
    let nt = p.nrows();
    let pt = p.transpose();
    stitch(&[nr, nt], &[(0, 0, boundary_mass(el, r)), (0, 1, -pt), (1, 0, -p), (1, 1, DMatrix::identity(nt, nt))]) * tau
}

/// HDG on `[q, u, trace]`, with the numerical flux substituted.
pub(crate) fn hdg(el: &LocalElement, cfg: &SchemeConfig, coeff: &Coefficient, f: &(dyn Fn(Point) -> f64 + Sync)) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let tau = cfg.tau_for(el.diameter);
    let grad = WeakGradient::new(el, cfg.r, cfg.s, cfg.k)?.rhs;
    let mc = flux_mass(el, cfg.k, coeff);
    let nq = mc.nrows();
    let nw = grad.ncols();
    let gt = grad.transpose();
    let mat = stitch(&[nq, nw], &[(0, 0, -mc), (0, 1, -grad), (1, 0, -gt), (1, 1, hdg_stabilizer(el, cfg.r, cfg.s, tau))]);
    Ok((symmetrize(mat), rhs_at(nq + nw, nq, &load(el, cfg.r, f))))
}

/// HDG on `[u, trace]` through the local flux lifting.
pub(crate) fn hdg_v2(el: &LocalElement, cfg: &SchemeConfig, coeff: &Coefficient, f: &(dyn Fn(Point) -> f64 + Sync)) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let tau = cfg.tau_for(el.diameter);
    let grad = WeakGradient::new(el, cfg.r, cfg.s, cfg.k)?.rhs;
    let mc = flux_mass(el, cfg.k, coeff);
    let lift = crate::polybasis::spd_solve(&mc, grad.clone(), el.cell)?;
    let m = grad.transpose() * lift + hdg_stabilizer(el, cfg.r, cfg.s, tau);
    let n = m.nrows();
    Ok((symmetrize(m), rhs_at(n, 0, &load(el, cfg.r, f))))
}

//! Assembly and solution of the weak Galerkin and HDG schemes for
//! `-div(a grad u) = f` with homogeneous Dirichlet data.
//!
//! Fluxes follow `q = -a grad u`, so `c q + grad u = 0` with `c = 1/a` and
//! `div q = f`.

mod config;
mod layout;
mod local;
mod solution;
pub mod system;

pub use config::{Scheme, SchemeConfig, Tau, DEFAULT_ALPHA, DEFAULT_K, DEFAULT_RHO, DEFAULT_TAU};
pub use solution::DiscreteSolution;
pub use system::{condense, AssembledSystem, Condensed, DofLabel, DofMap, Factorization, Field, SparseMatrix};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::mesh::{Point, PolygonalMesh};
use crate::polybasis::{cell_dim, CellPolynomial, Coefficient, LocalElement, VectorCellPolynomial};
use crate::weakcalc::{jump_operator, FluxTrace, WeakGradient};
use layout::{FluxDofs, Layout, Map};
use system::{scatter, LocalContribution};

pub type Source<'a> = &'a (dyn Fn(Point) -> f64 + Sync);

type LocalFn = fn(&LocalElement, &SchemeConfig, &Coefficient, Source) -> Result<(DMatrix<f64>, DVector<f64>)>;

fn concat(parts: Vec<Map>) -> Map {
    parts.into_iter().flatten().collect()
}

fn layout_for(mesh: &PolygonalMesh, cfg: &SchemeConfig) -> Layout {
    let (k, s, r) = (cfg.k, cfg.s, cfg.r);
    match cfg.scheme {
        Scheme::PrimalWg => Layout::new(mesh, 0, FluxDofs::None, cell_dim(k), s, true),
        Scheme::PrimalMixedWg => Layout::new(mesh, 2 * cell_dim(cfg.m), FluxDofs::None, cell_dim(k), s, true),
        Scheme::MixedWg => Layout::new(mesh, 2 * cell_dim(k), FluxDofs::SingleValued, cell_dim(r), s, false),
        Scheme::HybridMixedWg => Layout::new(mesh, 2 * cell_dim(k), FluxDofs::PerCell, cell_dim(r), s, true),
        Scheme::Hdg => Layout::new(mesh, 2 * cell_dim(k), FluxDofs::None, cell_dim(r), s, true),
        Scheme::HdgV2 => Layout::new(mesh, 0, FluxDofs::None, cell_dim(r), s, true),
    }
}

fn local_map(mesh: &PolygonalMesh, layout: &Layout, scheme: Scheme, c: usize) -> Map {
    match scheme {
        Scheme::PrimalWg | Scheme::HdgV2 => concat(vec![layout.u(c), layout.trace(mesh, c)]),
        Scheme::PrimalMixedWg | Scheme::Hdg => concat(vec![layout.q(c), layout.u(c), layout.trace(mesh, c)]),
        Scheme::MixedWg => concat(vec![layout.q(c), layout.qb(mesh, c), layout.u(c)]),
        Scheme::HybridMixedWg => {
            concat(vec![layout.q(c), layout.qb(mesh, c), layout.u(c), layout.trace(mesh, c)])
        }
    }
}

fn assemble_generic(
    mesh: &PolygonalMesh,
    cfg: &SchemeConfig,
    coeff: &Coefficient,
    f: Source,
    local: LocalFn,
    symmetric: bool,
) -> Result<AssembledSystem> {
    cfg.validate()?;
    let order = cfg.quad_order(coeff);
    let layout = layout_for(mesh, cfg);
    let locals = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let el = LocalElement::new(mesh, c, order);
            coeff.check_positive(&el.rule.points)?;
            let (matrix, rhs) = local(&el, cfg, coeff, f)?;
            let map = local_map(mesh, &layout, cfg.scheme, c);
            debug_assert_eq!(map.len(), matrix.nrows());
            Ok(LocalContribution { map, matrix, rhs })
        })
        .collect::<Result<Vec<_>>>()?;
    let (matrix, rhs) = scatter(layout.dofs.len(), &locals);
    Ok(AssembledSystem {
        scheme: cfg.scheme,
        matrix,
        rhs,
        dofs: layout.dofs,
        symmetric,
        saddle_point: !matches!(cfg.scheme, Scheme::PrimalWg | Scheme::HdgV2),
    })
}

fn local_fn(scheme: Scheme) -> LocalFn {
    match scheme {
        Scheme::PrimalWg => local::primal_wg,
        Scheme::PrimalMixedWg => local::primal_mixed,
        Scheme::MixedWg => local::mixed_wg,
        Scheme::HybridMixedWg => local::hybrid_mixed,
        Scheme::Hdg => local::hdg,
        Scheme::HdgV2 => local::hdg_v2,
    }
}

/// Global system of `cfg.scheme`.
pub fn assemble(mesh: &PolygonalMesh, cfg: &SchemeConfig, coeff: &Coefficient, f: Source) -> Result<AssembledSystem> {
    assemble_generic(mesh, cfg, coeff, f, local_fn(cfg.scheme), true)
}

/// Element matrix of `cfg.scheme` on one cell, in the local dof order of
/// that scheme.
pub fn element_matrix(mesh: &PolygonalMesh, cfg: &SchemeConfig, coeff: &Coefficient, cell: usize) -> Result<DMatrix<f64>> {
    cfg.validate()?;
    let el = LocalElement::new(mesh, cell, cfg.quad_order(coeff));
    coeff.check_positive(&el.rule.points)?;
    Ok(local_fn(cfg.scheme)(&el, cfg, coeff, &|_| 0.0)?.0)
}

/// The hybridized mixed scheme written with `q_b` expressed through
/// `q0`, `u_h` and `u_b`. Nonsymmetric; same unknowns as
/// [`Scheme::HybridMixedWg`].
pub fn assemble_hybrid_mixed_v2(mesh: &PolygonalMesh, cfg: &SchemeConfig, coeff: &Coefficient, f: Source) -> Result<AssembledSystem> {
    if cfg.scheme != Scheme::HybridMixedWg {
        return invalid("the rewritten hybrid system needs scheme hybrid-mixed-wg");
    }
    assemble_generic(mesh, cfg, coeff, f, local::hybrid_mixed_v2, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMode {
    /// Condense the hybridized schemes, solve the others directly.
    #[default]
    Auto,
    Direct,
    Condensed,
}

/// Solves an assembled system and splits the result into fields.
pub fn solve_system(mesh: &PolygonalMesh, cfg: &SchemeConfig, system: &AssembledSystem, mode: SolveMode) -> Result<DiscreteSolution> {
    let condensed = match mode {
        SolveMode::Direct => false,
        SolveMode::Condensed => true,
        SolveMode::Auto => matches!(cfg.scheme, Scheme::HybridMixedWg | Scheme::Hdg | Scheme::HdgV2),
    };
    let (x, trace) = if condensed {
        let c = condense(system)?;
        (c.solve()?, c.system.dofs.len())
    } else {
        (system.solve()?, system.dofs.global_count())
    };
    Ok(DiscreteSolution::unpack(mesh, cfg, system, &x, trace))
}

pub fn solve(mesh: &PolygonalMesh, cfg: &SchemeConfig, coeff: &Coefficient, f: Source) -> Result<DiscreteSolution> {
    let system = assemble(mesh, cfg, coeff, f)?;
    solve_system(mesh, cfg, &system, SolveMode::Auto)
}

/// Local flux lifting: `q` in `[P_k]^2` with
/// `(c q, v)_T = (w, div v)_T - <mu, v.n>_{dT}` for all `v` in `[P_k]^2`.
///
/// `w` must be expressed in the scaled monomial basis of `cell`; `mu` holds
/// orthonormal coefficients per local edge.
pub fn lift_flux(
    mesh: &PolygonalMesh,
    cell: usize,
    w: &CellPolynomial,
    mu: &[Vec<f64>],
    k: usize,
    coeff: &Coefficient,
    order: usize,
) -> Result<VectorCellPolynomial> {
    let el = LocalElement::new(mesh, cell, order);
    let basis = el.basis(w.basis.degree);
    if basis != w.basis || w.coeffs.len() != basis.dim() {
        return invalid(format!("scalar argument is not in the basis of cell {cell}"));
    }
    if mu.len() != el.edges.len() {
        return invalid(format!("cell {cell} has {} edges, got {} trace blocks", el.edges.len(), mu.len()));
    }
    let s = mu[0].len().checked_sub(1).ok_or_else(|| Error::InvalidArgument("empty trace block".into()))?;
    if mu.iter().any(|m| m.len() != s + 1) {
        return invalid("trace blocks have different degrees");
    }
    coeff.check_positive(&el.rule.points)?;
    let grad = WeakGradient::new(&el, w.basis.degree, s, k)?;
    let dofs: Vec<f64> = w.coeffs.iter().chain(mu.iter().flatten()).copied().collect();
    let rhs = -(&grad.rhs * DVector::from_column_slice(&dofs));
    let mc = local::flux_mass(&el, k, coeff);
    let q = crate::polybasis::spd_solve(&mc, DMatrix::from_column_slice(rhs.len(), 1, rhs.as_slice()), cell)?;
    Ok(VectorCellPolynomial::from_stacked(el.basis(k), q.as_slice()))
}

/// `q_b = Q_b(q0.n) + rho^-1 h^-alpha (Q_b u_h - u_b)` per cell and edge,
/// from a hybridized mixed solution.
pub fn recover_wg_flux(mesh: &PolygonalMesh, sol: &DiscreteSolution) -> Result<FluxTrace> {
    let cfg = &sol.config;
    if cfg.scheme != Scheme::HybridMixedWg {
        return invalid("flux recovery needs a hybrid-mixed-wg solution");
    }
    let (q, trace) = match (&sol.q, &sol.trace) {
        (Some(q), Some(t)) => (q, t),
        _ => return invalid("solution lacks q0 or u_b"),
    };
    let order = cfg.quad_order(&Coefficient::one());
    let (k, s, r) = (cfg.k, cfg.s, cfg.r);
    let nq0 = 2 * cell_dim(k);
    let out = (0..mesh.num_cells())
        .map(|c| {
            let el = LocalElement::new(mesh, c, order);
            let tau = cfg.rho.recip() * el.diameter.powf(-cfg.alpha);
            let pn = jump_operator(&el, k, s, true).columns(0, nq0).into_owned();
            let pu = jump_operator(&el, r, s, false).columns(0, cell_dim(r)).into_owned();
            let a = pn * DVector::from_column_slice(&q[c]);
            let b = pu * DVector::from_column_slice(&sol.u[c]);
            mesh.cell(c)
                .edges
                .iter()
                .enumerate()
                .map(|(le, &e)| (0..=s).map(|l| a[le * (s + 1) + l] + tau * (b[le * (s + 1) + l] - trace.coeffs[e][l])).collect())
                .collect()
        })
        .collect();
    Ok(FluxTrace::PerCell(out))
}

#[cfg(test)]
mod tests;

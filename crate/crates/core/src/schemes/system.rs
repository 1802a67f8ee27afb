//! Sparse global systems, direct solves and static condensation.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Side};
use nalgebra::{DMatrix, DVector};

use super::Scheme;
use crate::error::{Error, Result};

const RESIDUAL_TOL: f64 = 1e-10;
const REFINEMENT_STEPS: usize = 3;

/// Compressed sparse row matrix with summed duplicate entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last = None;
        for (i, j, v) in triplets {
            debug_assert!(i < nrows && j < ncols);
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { nrows, ncols, row_ptr, col_idx, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&j) {
            Ok(p) => self.values[r.start + p],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.nrows).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max |A_ij - A_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    fn to_faer(&self, lower_only: bool) -> Result<SparseColMat<usize, f64>> {
        let mut t = Vec::with_capacity(self.nnz());
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                if !lower_only || j <= i {
                    t.push(Triplet::new(i, j, v));
                }
            }
        }
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &t)
            .map_err(|e| Error::Solver(format!("cannot build sparse matrix: {e:?}")))
    }
}

/// Which unknown a global dof belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    /// Interior scalar `u0` or `u_h`.
    U,
    /// Interior flux `q0`, `q_h` or the HDG flux.
    Q,
    /// Normal flux trace `q_b`.
    Qb,
    /// Scalar trace `u_b` or the HDG trace.
    Trace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofLabel {
    pub field: Field,
    /// Set for dofs local to one cell; these can be condensed.
    pub cell: Option<usize>,
    pub edge: Option<usize>,
    /// Component index inside the cell or edge block.
    pub index: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DofMap {
    pub labels: Vec<DofLabel>,
}

impl DofMap {
    pub fn push(&mut self, field: Field, cell: Option<usize>, edge: Option<usize>, index: usize) -> usize {
        self.labels.push(DofLabel { field, cell, edge, index });
        self.labels.len() - 1
    }

    /// Pushes `n` consecutive dofs and returns the first index.
    pub fn push_block(&mut self, field: Field, cell: Option<usize>, edge: Option<usize>, n: usize) -> usize {
        let start = self.labels.len();
        for i in 0..n {
            self.push(field, cell, edge, i);
        }
        start
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn count(&self, field: Field) -> usize {
        self.labels.iter().filter(|l| l.field == field).count()
    }

    /// Dofs not attached to a single cell.
    pub fn global_count(&self) -> usize {
        self.labels.iter().filter(|l| l.cell.is_none()).count()
    }
}

#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub scheme: Scheme,
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub dofs: DofMap,
    pub symmetric: bool,
    pub saddle_point: bool,
}

/// Local contribution: signed global indices (None for eliminated boundary
/// dofs), a dense matrix and a load vector.
pub(crate) struct LocalContribution {
    pub map: Vec<Option<(usize, f64)>>,
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

pub(crate) fn scatter(n: usize, locals: &[LocalContribution]) -> (SparseMatrix, Vec<f64>) {
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; n];
    for lc in locals {
        for (i, gi) in lc.map.iter().enumerate() {
            let Some((gi, si)) = *gi else { continue };
            rhs[gi] += si * lc.rhs[i];
            for (j, gj) in lc.map.iter().enumerate() {
                let Some((gj, sj)) = *gj else { continue };
                let v = lc.matrix[(i, j)];
                if v != 0.0 {
                    triplets.push((gi, gj, si * sj * v));
                }
            }
        }
    }
    (SparseMatrix::from_triplets(n, n, triplets), rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factorization {
    Cholesky,
    Lu,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `|b - A x| / |b|` (absolute when `b = 0`).
pub fn relative_residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, y)| b - y).collect();
    let nb = norm(b);
    if nb == 0.0 {
        norm(&r)
    } else {
        norm(&r) / nb
    }
}

/// Direct sparse solve with residual check and iterative refinement.
pub fn solve_sparse(a: &SparseMatrix, b: &[f64], method: Factorization) -> Result<Vec<f64>> {
    if a.nrows != a.ncols || a.nrows != b.len() {
        return Err(Error::Solver(format!("shape mismatch: {}x{} matrix, rhs {}", a.nrows, a.ncols, b.len())));
    }
    let n = b.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if b.iter().all(|&v| v == 0.0) {
        return Ok(vec![0.0; n]);
    }
    let solver: Box<dyn Fn(&[f64]) -> Vec<f64>> = match method {
        Factorization::Cholesky => {
            let m = a.to_faer(true)?;
            let chol = m
                .sp_cholesky(Side::Lower)
                .map_err(|e| Error::Solver(format!("Cholesky factorization failed (matrix not SPD?): {e:?}")))?;
            Box::new(move |r: &[f64]| {
                let x = chol.solve(Col::from_fn(r.len(), |i| r[i]));
                (0..x.nrows()).map(|i| x[i]).collect()
            })
        }
        Factorization::Lu => {
            let m = a.to_faer(false)?;
            let lu = m.sp_lu().map_err(|e| Error::Solver(format!("LU factorization failed: {e:?}")))?;
            Box::new(move |r: &[f64]| {
                let x = lu.solve(Col::from_fn(r.len(), |i| r[i]));
                (0..x.nrows()).map(|i| x[i]).collect()
            })
        }
    };
    let mut x = solver(b);
    let mut res = relative_residual(a, &x, b);
    for _ in 0..REFINEMENT_STEPS {
        if res <= RESIDUAL_TOL || !res.is_finite() {
            break;
        }
        let ax = a.mul_vec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, y)| b - y).collect();
        let dx = solver(&r);
        x.iter_mut().zip(&dx).for_each(|(x, d)| *x += d);
        res = relative_residual(a, &x, b);
    }
    if !(res <= RESIDUAL_TOL) {
        return Err(Error::Solver(format!(
            "relative residual {res:.3e} exceeds {RESIDUAL_TOL:e} for a {n}x{n} system (singular or ill-conditioned)"
        )));
    }
    Ok(x)
}

impl AssembledSystem {
    pub fn default_factorization(&self) -> Factorization {
        if self.symmetric && !self.saddle_point {
            Factorization::Cholesky
        } else {
            Factorization::Lu
        }
    }

    pub fn solve(&self) -> Result<Vec<f64>> {
        solve_sparse(&self.matrix, &self.rhs, self.default_factorization())
    }
}

struct LocalBlock {
    local: Vec<usize>,
    trace: Vec<usize>,
    /// `K_ll^-1 [K_lt, b_l]`
    solved: DMatrix<f64>,
}

/// A system reduced to its cell-independent dofs by eliminating each cell's
/// local unknowns.
pub struct Condensed {
    pub system: AssembledSystem,
    /// Global index of each condensed dof.
    pub trace_dofs: Vec<usize>,
    blocks: Vec<LocalBlock>,
    full_len: usize,
}

/// Eliminates the cell-local dofs of `system`. Local blocks of different
/// cells must not couple to each other.
pub fn condense(system: &AssembledSystem) -> Result<Condensed> {
    let n = system.dofs.len();
    let a = &system.matrix;
    let trace_dofs: Vec<usize> = (0..n).filter(|&i| system.dofs.labels[i].cell.is_none()).collect();
    let mut trace_pos = vec![usize::MAX; n];
    for (p, &g) in trace_dofs.iter().enumerate() {
        trace_pos[g] = p;
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (i, l) in system.dofs.labels.iter().enumerate() {
        if let Some(c) = l.cell {
            groups.entry(c).or_default().push(i);
        }
    }

    let nt = trace_dofs.len();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut rhs: Vec<f64> = trace_dofs.iter().map(|&g| system.rhs[g]).collect();
    for &g in &trace_dofs {
        for (j, v) in a.row(g) {
            if trace_pos[j] != usize::MAX {
                triplets.push((trace_pos[g], trace_pos[j], v));
            }
        }
    }

    let mut blocks = Vec::with_capacity(groups.len());
    for (cell, local) in groups {
        let mut pos = std::collections::HashMap::new();
        for (p, &g) in local.iter().enumerate() {
            pos.insert(g, p);
        }
        let mut trace: Vec<usize> = Vec::new();
        for &g in &local {
            for (j, _) in a.row(g) {
                if trace_pos[j] != usize::MAX {
                    trace.push(j);
                } else if !pos.contains_key(&j) {
                    return Err(Error::Solver(format!("cell {cell} couples to local dofs of another cell")));
                }
            }
        }
        trace.sort_unstable();
        trace.dedup();
        let (nl, ntl) = (local.len(), trace.len());
        let tpos: std::collections::HashMap<usize, usize> = trace.iter().enumerate().map(|(p, &g)| (g, p)).collect();
        let mut kll = DMatrix::zeros(nl, nl);
        let mut rhs_block = DMatrix::zeros(nl, ntl + 1);
        for (p, &g) in local.iter().enumerate() {
            for (j, v) in a.row(g) {
                if let Some(&q) = pos.get(&j) {
                    kll[(p, q)] = v;
                } else {
                    rhs_block[(p, tpos[&j])] = v;
                }
            }
            rhs_block[(p, ntl)] = system.rhs[g];
        }
        let lu = kll.full_piv_lu();
        if !lu.is_invertible() {
            return Err(Error::SingularLocal { cell });
        }
        let solved = lu.solve(&rhs_block).ok_or(Error::SingularLocal { cell })?;
        if solved.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularLocal { cell });
        }
        // K_tt - K_tl K_ll^-1 K_lt and b_t - K_tl K_ll^-1 b_l
        let mut ktl = DMatrix::zeros(ntl, nl);
        for (p, &g) in trace.iter().enumerate() {
            for (j, v) in a.row(g) {
                if let Some(&q) = pos.get(&j) {
                    ktl[(p, q)] = v;
                }
            }
        }
        let update = &ktl * &solved;
        for p in 0..ntl {
            let gp = trace_pos[trace[p]];
            for q in 0..ntl {
                let v = update[(p, q)];
                if v != 0.0 {
                    triplets.push((gp, trace_pos[trace[q]], -v));
                }
            }
            rhs[gp] -= update[(p, ntl)];
        }
        blocks.push(LocalBlock { local, trace, solved });
    }

    let mut dofs = DofMap::default();
    for &g in &trace_dofs {
        dofs.labels.push(system.dofs.labels[g]);
    }
    Ok(Condensed {
        system: AssembledSystem {
            scheme: system.scheme,
            matrix: SparseMatrix::from_triplets(nt, nt, triplets),
            rhs,
            dofs,
            symmetric: system.symmetric,
            saddle_point: false,
        },
        trace_dofs,
        blocks,
        full_len: n,
    })
}

impl Condensed {
    /// Full solution from the condensed unknowns by local back-substitution.
    pub fn recover(&self, trace: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.full_len];
        for (&g, &v) in self.trace_dofs.iter().zip(trace) {
            full[g] = v;
        }
        for b in &self.blocks {
            let nt = b.trace.len();
            for (p, &g) in b.local.iter().enumerate() {
                let mut v = b.solved[(p, nt)];
                for (q, &t) in b.trace.iter().enumerate() {
                    v -= b.solved[(p, q)] * full[t];
                }
                full[g] = v;
            }
        }
        full
    }

    /// Solves the condensed system and recovers all unknowns.
    pub fn solve(&self) -> Result<Vec<f64>> {
        let method = if self.system.symmetric { Factorization::Cholesky } else { Factorization::Lu };
        let trace = match solve_sparse(&self.system.matrix, &self.system.rhs, method) {
            Ok(x) => x,
            // Condensed saddle-point systems can be symmetric but indefinite.
            Err(_) if method == Factorization::Cholesky => {
                solve_sparse(&self.system.matrix, &self.system.rhs, Factorization::Lu)?
            }
            Err(e) => return Err(e),
        };
        Ok(self.recover(&trace))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_to_sparse(m: &DMatrix<f64>) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != 0.0 {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        SparseMatrix::from_triplets(m.nrows(), m.ncols(), t)
    }

    #[test]
    fn duplicates_are_summed() {
        let m = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 0, 2.0), (0, 0, 3.0)]);
        assert_eq!(m.get(0, 0), 4.0);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.get(1, 1), 0.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let m = SparseMatrix::from_triplets(3, 3, (0..3).map(|i| (i, i, 2.0)).collect());
        assert_eq!(solve_sparse(&m, &[0.0; 3], Factorization::Cholesky).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn identity_solve() {
        let m = SparseMatrix::from_triplets(4, 4, (0..4).map(|i| (i, i, 1.0)).collect());
        let b = [1.0, -2.0, 3.5, 0.25];
        for f in [Factorization::Cholesky, Factorization::Lu] {
            assert_eq!(solve_sparse(&m, &b, f).unwrap(), b.to_vec());
        }
    }

    #[test]
    fn random_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 50;
        let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let a = &g * g.transpose() + DMatrix::identity(n, n) * n as f64;
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let sa = dense_to_sparse(&a);
        let x = solve_sparse(&sa, &b, Factorization::Cholesky).unwrap();
        assert!(relative_residual(&sa, &x, &b) <= 1e-10);
        let y = solve_sparse(&sa, &b, Factorization::Lu).unwrap();
        let diff = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn singular_matrix_reported() {
        let m = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]);
        assert!(matches!(solve_sparse(&m, &[1.0, 0.0], Factorization::Lu), Err(Error::Solver(_))));
    }

    #[test]
    fn condensation_matches_direct_solve() {
        // two local blocks of size 2 coupled through one shared dof
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 5;
        let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let mut a = &g * g.transpose() + DMatrix::identity(n, n) * 5.0;
        for (i, j) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
            a[(i, j)] = 0.0;
            a[(j, i)] = 0.0;
        }
        let mut dofs = DofMap::default();
        dofs.push_block(Field::U, Some(0), None, 2);
        dofs.push_block(Field::U, Some(1), None, 2);
        dofs.push(Field::Trace, None, Some(0), 0);
        let system = AssembledSystem {
            scheme: Scheme::PrimalWg,
            matrix: dense_to_sparse(&a),
            rhs: vec![1.0, 2.0, -1.0, 0.5, 3.0],
            dofs,
            symmetric: true,
            saddle_point: false,
        };
        let direct = system.solve().unwrap();
        let cond = condense(&system).unwrap();
        assert_eq!(cond.system.matrix.nrows, 1);
        let via = cond.solve().unwrap();
        for (x, y) in direct.iter().zip(&via) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_local_block_names_cell() {
        let mut dofs = DofMap::default();
        dofs.push(Field::U, Some(7), None, 0);
        dofs.push(Field::Trace, None, Some(0), 0);
        let system = AssembledSystem {
            scheme: Scheme::PrimalWg,
            matrix: SparseMatrix::from_triplets(2, 2, vec![(0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)]),
            rhs: vec![0.0, 1.0],
            dofs,
            symmetric: true,
            saddle_point: false,
        };
        assert!(matches!(condense(&system), Err(Error::SingularLocal { cell: 7 })));
    }
}

//! Stabilizer computation and decomposition of subalgebras of su(2)^n.
//!
//! The stabilizer K of a state is the right nullspace of the 3n-column
//! matrix whose columns are the vectorized brackets [E, rho] over the
//! elementary generators. All rank decisions go through one SVD gate: values
//! below rank_rel * sigma_max count as zero, and the ratio between the last
//! retained and first discarded singular value must exceed rank_gap, else
//! the computation aborts rather than guessing a dimension.
//!
//! decompose_algebra splits a bracket-closed subalgebra into its su(2)
//! blocks, abelian summand, and untouched qubits: the center of K (nullspace
//! of the stacked structure constants) is the abelian part, its
//! orthocomplement is the semisimple part, and the ideal through a qubit q
//! is the orthocomplement of the elements with vanishing q-part.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::pauli::{PauliIndex, PauliOperator};
use crate::su2::{ad_action, su2_from_rotation, LocalAlgebraElement, LocalUnitary, Su2, Unitary2};
use crate::{Tolerances, MAX_QUBITS};

/// Qubits land in the same block when their ideal projectors differ by less
/// than this (Frobenius); ideals either coincide or are orthogonal, so the
/// decision is far from marginal.
const BLOCK_MATCH_TOL: f64 = 1e-6;

/// Orthonormal basis of a subspace of su(2)^n under the global inner product.
#[derive(Clone, Debug)]
pub struct AlgebraBasis {
    n: usize,
    elements: Vec<LocalAlgebraElement>,
}

impl AlgebraBasis {
    pub fn empty(n: usize) -> Self {
        AlgebraBasis { n, elements: Vec::new() }
    }

    /// Wraps the elements after validating orthonormality within tol.orth.
    pub fn from_elements(
        n: usize,
        elements: Vec<LocalAlgebraElement>,
        tol: &Tolerances,
    ) -> Result<Self> {
        for e in &elements {
            if e.n() != n {
                return Err(Error::DimensionMismatch { expected: n, got: e.n() });
            }
        }
        let basis = AlgebraBasis { n, elements };
        let defect = basis.orthonormality_defect();
        if defect > tol.orth {
            return Err(Error::ParamOutOfRange(format!(
                "basis orthonormality defect {defect:.3e} exceeds {:.1e}",
                tol.orth
            )));
        }
        Ok(basis)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, i: usize) -> &LocalAlgebraElement {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[LocalAlgebraElement] {
        &self.elements
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let mut defect: f64 = 0.0;
        for i in 0..self.elements.len() {
            for j in i..self.elements.len() {
                let d = self.elements[i].global_dot(&self.elements[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((d - target).abs());
            }
        }
        defect
    }

    /// Coefficients of m against the basis (orthonormal projection).
    pub fn project_coeffs(&self, m: &LocalAlgebraElement) -> Vec<f64> {
        self.elements.iter().map(|e| e.global_dot(m)).collect()
    }

    /// Combination sum_i coeffs[i] * E_i.
    pub fn combine(&self, coeffs: &[f64]) -> LocalAlgebraElement {
        debug_assert_eq!(coeffs.len(), self.dim());
        let mut out = LocalAlgebraElement::zero(self.n);
        for (c, e) in coeffs.iter().zip(self.elements.iter()) {
            out = out.add_scaled(*c, e);
        }
        out
    }
}

/// SVD bookkeeping behind a rank decision.
#[derive(Clone, Debug)]
pub struct RankDiagnostics {
    pub singular_values: Vec<f64>,
    pub tau: f64,
    pub rank: usize,
    /// Ratio last-retained / first-discarded; None when nothing was discarded
    /// or the discarded value is an exact zero.
    pub gap: Option<f64>,
    /// Largest bracket residual of the returned basis, coefficient 2-norm.
    pub max_residual: f64,
}

/// Rank of a singular spectrum under the tau / gap contract. The floor is
/// an absolute scale below which values are plain noise; matrices built
/// from orthonormal algebra elements use tol.orth, the state-sized
/// constraint matrix uses no floor so its rank stays purely relative.
fn numerical_rank(svals: &[f64], tol: &Tolerances, floor: f64) -> Result<(usize, f64, Option<f64>)> {
    let sigma_max = svals.first().copied().unwrap_or(0.0);
    if sigma_max <= floor || sigma_max <= 0.0 {
        return Ok((0, floor, None));
    }
    let tau = (tol.rank_rel * sigma_max).max(floor);
    let rank = svals.iter().filter(|&&s| s > tau).count();
    if rank == svals.len() {
        return Ok((rank, tau, None));
    }
    let discarded = svals[rank];
    if discarded < 1e-300 || discarded <= floor {
        return Ok((rank, tau, None));
    }
    let retained = if rank == 0 { sigma_max } else { svals[rank - 1] };
    let gap = retained / discarded;
    if gap < tol.rank_gap {
        return Err(Error::IllConditioned { gap, required: tol.rank_gap });
    }
    Ok((rank, tau, Some(gap)))
}

fn svd_sorted(mat: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let svd = mat.svd(false, true);
    let svals: Vec<f64> = svd.singular_values.iter().copied().collect();
    (svals, svd.v_t.expect("V^T requested"))
}

/// Orthonormal basis of K(rho) = { M : [M, rho] = 0 }, with the SVD
/// diagnostics of the rank decision.
pub fn stabilizer_basis(
    rho: &PauliOperator,
    tol: &Tolerances,
) -> Result<(AlgebraBasis, RankDiagnostics)> {
    let n = rho.n();
    if n > MAX_QUBITS {
        return Err(Error::ResourceLimit { n, max: MAX_QUBITS });
    }
    let axes = [Su2::axis_a(), Su2::axis_b(), Su2::axis_c()];
    let mut columns = Vec::with_capacity(3 * n);
    let mut support: BTreeSet<PauliIndex> = BTreeSet::new();
    for k in 0..n {
        for axis in axes {
            let col = ad_action(&LocalAlgebraElement::single(n, k, axis), rho)?;
            for (idx, _) in col.terms() {
                support.insert(*idx);
            }
            columns.push(col);
        }
    }
    let rows: Vec<PauliIndex> = support.into_iter().collect();
    // Zero rows pad the matrix so the thin SVD still carries a full V.
    let nrows = rows.len().max(3 * n);
    let mut mat = DMatrix::<f64>::zeros(nrows, 3 * n);
    for (j, col) in columns.iter().enumerate() {
        for (r, idx) in rows.iter().enumerate() {
            let v = col.coeff(idx);
            if v != 0.0 {
                mat[(r, j)] = v;
            }
        }
    }
    let (svals, v_t) = svd_sorted(mat);
    let (rank, tau, gap) = numerical_rank(&svals, tol, 0.0)?;
    let mut elements = Vec::with_capacity(3 * n - rank);
    let mut max_residual: f64 = 0.0;
    for r in rank..v_t.nrows() {
        let coords: Vec<f64> = (0..3 * n).map(|c| v_t[(r, c)] * 0.5).collect();
        let m = LocalAlgebraElement::from_coords(&coords);
        max_residual = max_residual.max(ad_action(&m, rho)?.coeff_l2());
        elements.push(m);
    }
    // A null direction's singular value bounds its bracket residual; a
    // violation means the SVD answer cannot be trusted.
    if max_residual > 2.0 * tau + 1e-13 {
        return Err(Error::IllConditioned {
            gap: gap.unwrap_or(f64::INFINITY),
            required: tol.rank_gap,
        });
    }
    let basis = AlgebraBasis { n, elements };
    debug_assert!(basis.orthonormality_defect() < tol.orth);
    let diag = RankDiagnostics { singular_values: svals, tau, rank, gap, max_residual };
    Ok((basis, diag))
}

/// Rank of the i-th parts of the basis: 0, 1, or 3 for a bracket-closed
/// algebra. Rank 2 is impossible for closed algebras and reported as an
/// integrity error.
pub fn projection_dim(k: &AlgebraBasis, qubit: usize, tol: &Tolerances) -> Result<usize> {
    let rank = part_rank(k.elements(), qubit, tol)?;
    if rank == 2 {
        return Err(Error::Rank2Anomaly { qubit });
    }
    Ok(rank)
}

fn part_rank(elements: &[LocalAlgebraElement], qubit: usize, tol: &Tolerances) -> Result<usize> {
    if elements.is_empty() {
        return Ok(0);
    }
    let mut mat = DMatrix::<f64>::zeros(3.max(elements.len()), 3);
    for (r, e) in elements.iter().enumerate() {
        let p = e.part(qubit);
        mat[(r, 0)] = p.a;
        mat[(r, 1)] = p.b;
        mat[(r, 2)] = p.c;
    }
    let (svals, _) = svd_sorted(mat);
    let (rank, _, _) = numerical_rank(&svals, tol, tol.orth)?;
    Ok(rank)
}

/// Number of qubits where M has a nonzero part, at the sparse threshold.
pub fn weight(m: &LocalAlgebraElement, tol: &Tolerances) -> usize {
    m.weight(tol.sparse)
}

/// One su(2) block: its qubits and a generator triple with [U,V] = W,
/// [V,W] = U, [W,U] = V.
#[derive(Clone, Debug)]
pub struct Block {
    pub qubits: Vec<usize>,
    pub u: LocalAlgebraElement,
    pub v: LocalAlgebraElement,
    pub w: LocalAlgebraElement,
}

/// Theorem-1 shape of a bracket-closed subalgebra.
#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub n: usize,
    pub blocks: Vec<Block>,
    pub s_qubits: Vec<usize>,
    pub s_basis: Vec<LocalAlgebraElement>,
    pub r_qubits: Vec<usize>,
    /// Carries every block onto its standard orientation: U -> (A,..,A),
    /// V -> (B,..,B), W -> (C,..,C) on the block's qubits.
    pub aligner: LocalUnitary,
}

/// Splits K into su(2) blocks, the abelian summand, and untouched qubits.
pub fn decompose_algebra(k: &AlgebraBasis, tol: &Tolerances) -> Result<BlockDecomposition> {
    let n = k.n();
    let d = k.dim();
    if d == 0 {
        return Ok(BlockDecomposition {
            n,
            blocks: Vec::new(),
            s_qubits: Vec::new(),
            s_basis: Vec::new(),
            r_qubits: (0..n).collect(),
            aligner: LocalUnitary::identity(n),
        });
    }

    // Closure check and structure constants c[t][i][j] = <E_t, [E_i, E_j]>.
    let mut structure = vec![vec![vec![0.0f64; d]; d]; d];
    #[allow(clippy::needless_range_loop)]
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let br = k.element(i).bracket(k.element(j));
            let coeffs = k.project_coeffs(&br);
            let residual = br.sub(&k.combine(&coeffs)).global_norm();
            if residual > tol.num * (1.0 + br.global_norm()) {
                return Err(Error::NotClosed { residual });
            }
            for t in 0..d {
                structure[t][i][j] = coeffs[t];
            }
        }
    }

    // Center: x with sum_i x_i [E_i, E_j] = 0 for all j.
    let mut ad_mat = DMatrix::<f64>::zeros((d * d).max(d), d);
    for t in 0..d {
        for j in 0..d {
            for i in 0..d {
                ad_mat[(t * d + j, i)] = structure[t][i][j];
            }
        }
    }
    let (svals, v_t) = svd_sorted(ad_mat);
    let (rank, _, _) = numerical_rank(&svals, tol, tol.orth)?;
    let center_dim = d - rank;

    let center: Vec<LocalAlgebraElement> = (rank..d)
        .map(|r| k.combine(&(0..d).map(|c| v_t[(r, c)]).collect::<Vec<_>>()))
        .collect();
    let derived: Vec<LocalAlgebraElement> = (0..rank)
        .map(|r| k.combine(&(0..d).map(|c| v_t[(r, c)]).collect::<Vec<_>>()))
        .collect();

    // Abelian summand: per qubit at most one direction.
    let mut s_qubits = Vec::new();
    for q in 0..n {
        match part_rank(&center, q, tol)? {
            0 => {}
            1 => s_qubits.push(q),
            _ => return Err(Error::Rank2Anomaly { qubit: q }),
        }
    }
    let _ = center_dim;

    // Semisimple part: per-qubit projection is everything or nothing.
    let dd = derived.len();
    let mut block_qubits = Vec::new();
    for q in 0..n {
        match part_rank(&derived, q, tol)? {
            0 => {}
            3 => block_qubits.push(q),
            _ => return Err(Error::Rank2Anomaly { qubit: q }),
        }
    }
    for q in &block_qubits {
        if s_qubits.contains(q) {
            return Err(Error::Rank2Anomaly { qubit: *q });
        }
    }

    // Ideal through q: orthocomplement (inside the derived coordinates) of
    // the elements whose q-part vanishes.
    let mut block_groups: Vec<(Vec<usize>, Vec<Vec<f64>>)> = Vec::new();
    for &q in &block_qubits {
        let mut pq = DMatrix::<f64>::zeros(3.max(dd), dd);
        for (c, e) in derived.iter().enumerate() {
            let p = e.part(q);
            pq[(0, c)] = p.a;
            pq[(1, c)] = p.b;
            pq[(2, c)] = p.c;
        }
        let (svals, v_t) = svd_sorted(pq);
        let (rank_q, _, _) = numerical_rank(&svals, tol, tol.orth)?;
        if rank_q != 3 {
            return Err(Error::Rank2Anomaly { qubit: q });
        }
        let ideal: Vec<Vec<f64>> =
            (0..3).map(|r| (0..dd).map(|c| v_t[(r, c)]).collect()).collect();
        // Projector distance to known ideals decides membership.
        let mut placed = false;
        for (qs, basis) in block_groups.iter_mut() {
            if projector_distance(basis, &ideal) < BLOCK_MATCH_TOL {
                qs.push(q);
                placed = true;
                break;
            }
        }
        if !placed {
            block_groups.push((vec![q], ideal));
        }
    }

    // Generator triples per block, Prop-1 recipe at the smallest qubit.
    let mut blocks = Vec::new();
    for (qubits, ideal_coords) in &block_groups {
        let gens: Vec<LocalAlgebraElement> = ideal_coords
            .iter()
            .map(|x| {
                let mut m = LocalAlgebraElement::zero(n);
                for (c, e) in derived.iter().enumerate() {
                    m = m.add_scaled(x[c], e);
                }
                m
            })
            .collect();
        let i0 = qubits[0];
        let (u, v, w) = generator_triple(&gens, i0)?;
        blocks.push(Block { qubits: qubits.clone(), u, v, w });
    }
    blocks.sort_by_key(|b| b.qubits[0]);

    // Aligner: rotate each block qubit's (U,V,W) frame onto (A,B,C).
    let mut factors = vec![Unitary2::identity(); n];
    for block in &blocks {
        for &q in &block.qubits {
            factors[q] = frame_aligner(block.u.part(q), block.v.part(q), tol)?;
        }
    }

    let mut r_qubits = Vec::new();
    for q in 0..n {
        if !s_qubits.contains(&q) && !blocks.iter().any(|b| b.qubits.contains(&q)) {
            r_qubits.push(q);
        }
    }

    Ok(BlockDecomposition {
        n,
        blocks,
        s_qubits,
        s_basis: center,
        r_qubits,
        aligner: LocalUnitary::from_factors(factors),
    })
}

/// Frobenius distance between the projectors spanned by two orthonormal
/// coordinate sets.
fn projector_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let dim = a[0].len();
    let proj = |basis: &[Vec<f64>]| {
        let mut p = DMatrix::<f64>::zeros(dim, dim);
        for v in basis {
            for r in 0..dim {
                for c in 0..dim {
                    p[(r, c)] += v[r] * v[c];
                }
            }
        }
        p
    };
    (proj(a) - proj(b)).norm()
}

/// The Prop-1 recipe: V = P/|P_i|, W = [U', V]/|[U',V]_i|, U = [V, W], with
/// P the generator with the largest i-part and U' the one most orthogonal
/// to it at qubit i.
fn generator_triple(
    gens: &[LocalAlgebraElement],
    i: usize,
) -> Result<(LocalAlgebraElement, LocalAlgebraElement, LocalAlgebraElement)> {
    let norm_i = |m: &LocalAlgebraElement| m.part(i).coord_norm();
    let p_idx = (0..gens.len())
        .max_by(|&a, &b| norm_i(&gens[a]).total_cmp(&norm_i(&gens[b])))
        .expect("nonempty generator set");
    let p = &gens[p_idx];
    let pi = *p.part(i);
    if pi.coord_norm() <= 0.0 {
        return Err(Error::Rank2Anomaly { qubit: i });
    }
    let v = p.scale(1.0 / pi.hs_norm());
    let u_prime = (0..gens.len())
        .filter(|&t| t != p_idx)
        .min_by(|&a, &b| {
            let cos = |t: usize| {
                let q = gens[t].part(i);
                (q.dot(&pi) / (q.coord_norm() * pi.coord_norm()).max(1e-300)).abs()
            };
            cos(a).total_cmp(&cos(b))
        })
        .ok_or(Error::Rank2Anomaly { qubit: i })?;
    let bw = gens[u_prime].bracket(&v);
    let bw_i = bw.part(i).hs_norm();
    if bw_i <= 0.0 {
        return Err(Error::Rank2Anomaly { qubit: i });
    }
    let w = bw.scale(1.0 / bw_i);
    let u = v.bracket(&w);
    Ok((u, v, w))
}

/// Per-qubit rotation taking the (u, v, [u,v]) frame onto (A, B, C).
///
/// Pauli vectors of an orthonormal triple form a left-handed frame, as does
/// the target (z, y, x), so the transfer matrix is a proper rotation.
fn frame_aligner(u: &Su2, v: &Su2, tol: &Tolerances) -> Result<Unitary2> {
    let pu = u.pauli_vec();
    let pv = v.pauli_vec();
    let mut e1 = nalgebra::Vector3::new(pu[0], pu[1], pu[2]);
    if e1.norm() <= 0.0 {
        return Err(Error::NotRotation { defect: 1.0, det: 0.0 });
    }
    e1 /= e1.norm();
    let mut e2 = nalgebra::Vector3::new(pv[0], pv[1], pv[2]);
    e2 -= e1 * e1.dot(&e2);
    if e2.norm() <= 0.0 {
        return Err(Error::NotRotation { defect: 1.0, det: 0.0 });
    }
    e2 /= e2.norm();
    let e3 = -e1.cross(&e2);
    // Source columns (e1, e2, e3), target columns (z, y, x): R = T S^T.
    let s = nalgebra::Matrix3::from_columns(&[e1, e2, e3]);
    let t = nalgebra::Matrix3::new(0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0);
    su2_from_rotation(&(t * s.transpose()), tol)
}

/// Residuals of the su(2) relations and per-qubit frame orthonormality.
#[derive(Clone, Debug)]
pub struct BlockRelations {
    /// Norms of [U,V]-W, [V,W]-U, [W,U]-V.
    pub bracket_residuals: [f64; 3],
    /// Largest per-qubit deviation of (U_q, V_q, W_q) from an equal-norm
    /// orthogonal frame of coordinate norm 1/2.
    pub frame_defect: f64,
}

#[derive(Clone, Debug)]
pub struct BlockRelationReport {
    pub per_block: Vec<BlockRelations>,
    pub max_residual: f64,
}

pub fn verify_block_relations(d: &BlockDecomposition) -> BlockRelationReport {
    let mut per_block = Vec::new();
    let mut max_residual: f64 = 0.0;
    for block in &d.blocks {
        let r1 = block.u.bracket(&block.v).sub(&block.w).global_norm();
        let r2 = block.v.bracket(&block.w).sub(&block.u).global_norm();
        let r3 = block.w.bracket(&block.u).sub(&block.v).global_norm();
        let mut frame: f64 = 0.0;
        for &q in &block.qubits {
            let (u, v, w) = (block.u.part(q), block.v.part(q), block.w.part(q));
            for m in [u, v, w] {
                frame = frame.max((m.coord_norm() - 0.5).abs());
            }
            frame = frame.max(u.dot(v).abs()).max(v.dot(w).abs()).max(w.dot(u).abs());
        }
        max_residual = max_residual.max(r1).max(r2).max(r3).max(frame);
        per_block.push(BlockRelations { bracket_residuals: [r1, r2, r3], frame_defect: frame });
    }
    BlockRelationReport { per_block, max_residual }
}

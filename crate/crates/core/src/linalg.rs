//! Dense complex linear algebra with tolerance-aware rank decisions.
//!
//! Matrices are `nalgebra` dense matrices of `Complex64`. The heavy
//! decompositions (SVD, QR, non-Hermitian eigenproblems) are delegated to
//! `faer`, whose complex Schur solver converges on the permutation-like
//! superoperators that show up constantly in channel analysis.
//!
//! faer's divide-and-conquer SVD and Hermitian eigensolver (used above 128
//! columns by default) can return a wrong factorization on the heavily
//! clustered spectra of superoperator powers, so both are always run in
//! their QR-iteration mode here.
//!
//! Operators on `C^d` are vectorized column-major: `vec(x)[i + d*j] = x[(i, j)]`.
//! Under that convention `vec(a x b) = (bᵀ ⊗ a) vec(x)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Numerical thresholds used for every rank and equality decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Singular values at or below `rank_rel * sigma_max` count as zero.
    pub rank_rel: f64,
    /// Absolute Frobenius distance between orthogonal projectors for subspace equality.
    pub subspace_abs: f64,
    /// Distance from the unit circle (and between eigenvalues) for spectral clustering.
    pub spectral_cluster: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_rel: 1e-9,
            subspace_abs: 1e-7,
            spectral_cluster: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(rank_rel: f64, subspace_abs: f64, spectral_cluster: f64) -> Result<Self> {
        let tol = Tolerance {
            rank_rel,
            subspace_abs,
            spectral_cluster,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("rank_rel", self.rank_rel),
            ("subspace_abs", self.subspace_abs),
            ("spectral_cluster", self.spectral_cluster),
        ] {
            if !(v > 0.0 && v < 1e-2) {
                return Err(Error::InvalidParameter(format!(
                    "tolerance {name} = {v} must lie in (0, 1e-2)"
                )));
            }
        }
        Ok(())
    }
}

/// An eigenvalue with a unit-norm eigenvector.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: C64,
    pub vector: ComplexVector,
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Column-major vectorization.
pub fn vectorize(x: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(x.as_slice())
}

/// Inverse of [`vectorize`] for a `d x d` operator.
pub fn unvectorize(v: &ComplexVector, d: usize) -> ComplexMatrix {
    assert_eq!(v.len(), d * d, "vector length is not d^2");
    ComplexMatrix::from_column_slice(d, d, v.as_slice())
}

/// Hilbert–Schmidt inner product `Tr(a b*)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

/// Largest entry modulus.
pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_finite(a: &ComplexMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn to_faer(a: &ComplexMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

pub(crate) fn from_faer(a: faer::MatRef<'_, C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Rotates `v` so that its largest-modulus entry is real and positive.
pub fn fix_phase(v: &mut ComplexVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    // First entry within rounding of the maximum, so ties resolve by position.
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-10))
        .unwrap_or(0);
    let phase = v[pivot] / v[pivot].norm();
    let rot = phase.conj();
    for z in v.iter_mut() {
        *z *= rot;
    }
}

/// SVD without divide-and-conquer: descending singular values and, if asked,
/// the thin right factor `V`.
fn svd_qr_iteration(a: faer::MatRef<'_, C64>, want_v: bool) -> Result<(Vec<f64>, Option<faer::Mat<C64>>)> {
    use faer::dyn_stack::{MemBuffer, MemStack};
    use faer::linalg::svd::{self, ComputeSvdVectors, SvdParams};

    let (m, n) = a.shape();
    let k = m.min(n);
    let params = faer::Spec::new(SvdParams {
        recursion_threshold: usize::MAX,
        ..faer::Auto::<C64>::auto()
    });
    let compute_v = if want_v { ComputeSvdVectors::Thin } else { ComputeSvdVectors::No };
    let mut buf = MemBuffer::new(svd::svd_scratch::<C64>(m, n, ComputeSvdVectors::No, compute_v, faer::Par::Seq, params));
    let mut s = faer::Mat::<C64>::zeros(k, 1);
    let mut v = want_v.then(|| faer::Mat::<C64>::zeros(n, k));
    svd::svd(
        a,
        s.as_mut().col_mut(0).as_diagonal_mut(),
        None,
        v.as_mut().map(|v| v.as_mut()),
        faer::Par::Seq,
        MemStack::new(&mut buf),
        params,
    )
    .map_err(|e| Error::Decomposition(format!("svd: {e:?}")))?;
    Ok(((0..k).map(|i| s[(i, 0)].re).collect(), v))
}

pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    Ok(svd_qr_iteration(to_faer(a).as_ref(), false)?.0)
}

/// Orthonormal basis of the right null space of `a`.
///
/// Tall inputs are first compressed to their `n x n` triangular QR factor,
/// which has the same singular values and null space.
pub fn nullspace(a: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<ComplexVector>> {
    nullspace_with_scale(a, 0.0, tol)
}

/// As [`nullspace`], but singular values are judged against
/// `rank_rel * max(σ_max, scale)`.
///
/// Constraint systems such as `S − 1` or `g x − x g` have an intrinsic O(1)
/// scale; without the floor, a system that is zero up to rounding would have
/// its noise promoted to full rank.
pub fn nullspace_with_scale(a: &ComplexMatrix, scale: f64, tol: &Tolerance) -> Result<Vec<ComplexVector>> {
    let (m, n) = a.shape();
    if n == 0 {
        return Ok(Vec::new());
    }
    let full = || -> Vec<ComplexVector> {
        (0..n)
            .map(|i| {
                let mut e = ComplexVector::zeros(n);
                e[i] = ONE;
                e
            })
            .collect()
    };
    if m == 0 || max_abs(a) == 0.0 {
        return Ok(full());
    }
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }

    let fa = to_faer(a);
    let reduced = if m > n {
        let qr = fa.qr();
        qr.thin_R().to_owned()
    } else {
        fa
    };
    // A wide input needs the full right factor; padding it square with zero
    // rows keeps a thin SVD sufficient.
    let reduced = if reduced.nrows() < n {
        let r = reduced.nrows();
        faer::Mat::from_fn(n, n, |i, j| if i < r { reduced[(i, j)] } else { ZERO })
    } else {
        reduced
    };
    let (s, v) = svd_qr_iteration(reduced.as_ref(), true)?;
    let v = v.expect("requested V");
    let cutoff = tol.rank_rel * s[0].max(scale);
    let rank = s.iter().filter(|&&x| x > cutoff).count();
    Ok((rank..n)
        .map(|j| {
            let mut col = ComplexVector::from_fn(n, |i, _| v[(i, j)]);
            col.normalize_mut();
            fix_phase(&mut col);
            col
        })
        .collect())
}

/// Joint null space of a family of blocks sharing a column count `n`.
///
/// The blocks are taken to be O(1)-scaled constraints: the rank cutoff is
/// `rank_rel * max(σ_max, 1)`.
///
/// Blocks are folded into a running `n x n` triangular factor, so memory stays
/// bounded no matter how many constraints are stacked.
pub fn joint_nullspace<I>(n: usize, blocks: I, tol: &Tolerance) -> Result<Vec<ComplexVector>>
where
    I: IntoIterator<Item = ComplexMatrix>,
{
    let mut acc: Option<ComplexMatrix> = None;
    let mut pending: Vec<ComplexMatrix> = Vec::new();
    let mut pending_rows = 0;
    let flush = |acc: &mut Option<ComplexMatrix>, pending: &mut Vec<ComplexMatrix>| {
        let mut parts = Vec::with_capacity(pending.len() + 1);
        if let Some(r) = acc.take() {
            parts.push(r);
        }
        parts.append(pending);
        let stacked = vstack(&parts);
        *acc = Some(if stacked.nrows() > n {
            from_faer(to_faer(&stacked).qr().thin_R())
        } else {
            stacked
        });
    };
    for b in blocks {
        assert_eq!(b.ncols(), n, "joint_nullspace column mismatch");
        pending_rows += b.nrows();
        pending.push(b);
        if pending_rows >= 4 * n.max(1) {
            flush(&mut acc, &mut pending);
            pending_rows = 0;
        }
    }
    if !pending.is_empty() {
        flush(&mut acc, &mut pending);
    }
    match acc {
        Some(r) => nullspace_with_scale(&r, 1.0, tol),
        None => nullspace(&ComplexMatrix::zeros(0, n), tol),
    }
}

/// Appends to `basis` the part of each candidate not already spanned.
///
/// `basis` must already be orthonormal. A candidate is discarded when its
/// residual after projection is at most `rank_rel * max(1, |v|)`. Two passes of
/// modified Gram–Schmidt keep the result orthonormal to working precision.
pub fn extend_orthonormal<'a, I>(basis: &mut Vec<ComplexVector>, candidates: I, tol: &Tolerance)
where
    I: IntoIterator<Item = &'a ComplexVector>,
{
    for cand in candidates {
        let norm0 = cand.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut r = cand.clone();
        for _ in 0..2 {
            for q in basis.iter() {
                let c = q.dotc(&r);
                r.axpy(-c, q, ONE);
            }
        }
        let res = r.norm();
        if res > tol.rank_rel * norm0.max(1.0) {
            r.unscale_mut(res);
            basis.push(r);
        }
    }
}

/// Orthonormal spanning set of the input span, phase-fixed.
pub fn orthonormalize(vectors: &[ComplexVector], tol: &Tolerance) -> Vec<ComplexVector> {
    let mut basis = Vec::new();
    extend_orthonormal(&mut basis, vectors.iter(), tol);
    for v in basis.iter_mut() {
        fix_phase(v);
    }
    basis
}

/// Canonical angle in `[0, 2π)`.
pub fn angle(z: C64) -> f64 {
    let a = z.arg();
    let tau = std::f64::consts::TAU;
    let a = if a < 0.0 { a + tau } else { a };
    // Values like -1 - 1e-17i would otherwise sort at the far end.
    if tau - a < 1e-12 {
        0.0
    } else {
        a
    }
}

fn spectral_sort_key(z: C64) -> (i64, i64) {
    (-(z.norm() * 1e9).round() as i64, (angle(z) * 1e9).round() as i64)
}

/// Eigenvalues of a general square matrix, sorted by decreasing modulus then angle.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    check_square(a)?;
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut ev = to_faer(a)
        .eigenvalues()
        .map_err(|e| Error::Decomposition(format!("eigenvalues: {e:?}")))?;
    ev.sort_by_key(|z| spectral_sort_key(*z));
    Ok(ev)
}

/// Eigenpairs of a general complex matrix, sorted like [`eigenvalues`].
pub fn eig_general(a: &ComplexMatrix) -> Result<Vec<EigenPair>> {
    check_square(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let evd = to_faer(a)
        .eigen()
        .map_err(|e| Error::Decomposition(format!("eigen: {e:?}")))?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|j| {
            let mut v = ComplexVector::from_fn(n, |i, _| u[(i, j)]);
            v.normalize_mut();
            fix_phase(&mut v);
            EigenPair { value: s[j], vector: v }
        })
        .collect();
    pairs.sort_by_key(|p| spectral_sort_key(p.value));
    Ok(pairs)
}

/// Spectral decomposition of a Hermitian matrix: ascending real eigenvalues
/// and the matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    check_square(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), ComplexMatrix::zeros(0, 0)));
    }
    // Symmetrize so rounding in the input cannot leak into the solver.
    let h = (a + a.adjoint()).unscale(2.0);
    use faer::dyn_stack::{MemBuffer, MemStack};
    use faer::linalg::evd::{self, ComputeEigenvectors, SelfAdjointEvdParams};

    let params = faer::Spec::new(SelfAdjointEvdParams {
        recursion_threshold: usize::MAX,
        ..faer::Auto::<C64>::auto()
    });
    let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<C64>(
        n,
        ComputeEigenvectors::Yes,
        faer::Par::Seq,
        params,
    ));
    let mut s = faer::Mat::<C64>::zeros(n, 1);
    let mut u = faer::Mat::<C64>::zeros(n, n);
    evd::self_adjoint_evd(
        to_faer(&h).as_ref(),
        s.as_mut().col_mut(0).as_diagonal_mut(),
        Some(u.as_mut()),
        faer::Par::Seq,
        MemStack::new(&mut buf),
        params,
    )
    .map_err(|e| Error::Decomposition(format!("hermitian eigen: {e:?}")))?;
    let values = (0..n).map(|i| s[(i, 0)].re).collect();
    Ok((values, from_faer(u.as_ref())))
}

fn check_square(a: &ComplexMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(())
}

/// Stacks matrices with equal column counts on top of each other.
pub fn vstack(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut offset = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack column mismatch");
        out.view_mut((offset, 0), (b.nrows(), cols)).copy_from(b);
        offset += b.nrows();
    }
    out
}

/// Matrix whose columns are the given vectors.
pub fn columns_to_matrix(rows: usize, cols: &[ComplexVector]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

//! Subspaces of `M_d` and the *-algebra operations on them.
//!
//! An [`OperatorSubspace`] keeps a Hilbert–Schmidt orthonormal basis as the
//! columns of a `d² x n` frame (column-major vectorization). All comparisons
//! go through orthogonal projectors, never through basis vectors directly.

mod wedderburn;

pub use wedderburn::{
    embed_type, wedderburn, Block, WedderburnBlock, WedderburnDecomposition, WedderburnType,
};

use crate::error::{Error, Result};
use crate::linalg::{
    columns_to_matrix, extend_orthonormal, fix_phase, identity, joint_nullspace, kron,
    orthonormalize, unvectorize, vectorize, ComplexMatrix, ComplexVector, Tolerance, C64,
};

#[derive(Clone, Debug)]
pub struct OperatorSubspace {
    ambient_dim: usize,
    frame: ComplexMatrix,
}

impl OperatorSubspace {
    /// Span of arbitrary `d x d` matrices.
    pub fn from_matrices(d: usize, mats: &[ComplexMatrix], tol: &Tolerance) -> Result<Self> {
        for m in mats {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: m.nrows().max(m.ncols()),
                });
            }
        }
        let vecs: Vec<ComplexVector> = mats.iter().map(vectorize).collect();
        Ok(Self::from_vectors(d, &vecs, tol))
    }

    /// Span of vectorized operators.
    pub fn from_vectors(d: usize, vecs: &[ComplexVector], tol: &Tolerance) -> Self {
        let basis = orthonormalize(vecs, tol);
        Self::from_orthonormal(d, basis)
    }

    pub(crate) fn from_orthonormal(d: usize, basis: Vec<ComplexVector>) -> Self {
        OperatorSubspace {
            ambient_dim: d,
            frame: columns_to_matrix(d * d, &basis),
        }
    }

    pub fn zero(d: usize) -> Self {
        OperatorSubspace {
            ambient_dim: d,
            frame: ComplexMatrix::zeros(d * d, 0),
        }
    }

    /// `C·1`.
    pub fn scalars(d: usize) -> Self {
        let v = vectorize(&identity(d)).unscale((d as f64).sqrt());
        Self::from_orthonormal(d, vec![v])
    }

    /// All of `M_d`.
    pub fn full(d: usize) -> Self {
        OperatorSubspace {
            ambient_dim: d,
            frame: identity(d * d),
        }
    }

    /// Diagonal matrices.
    pub fn diagonals(d: usize) -> Self {
        let basis = (0..d)
            .map(|i| {
                let mut v = ComplexVector::zeros(d * d);
                v[i + d * i] = C64::new(1.0, 0.0);
                v
            })
            .collect();
        Self::from_orthonormal(d, basis)
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Orthonormal columns, one vectorized basis operator per column.
    pub fn frame(&self) -> &ComplexMatrix {
        &self.frame
    }

    pub fn basis_vectors(&self) -> Vec<ComplexVector> {
        self.frame.column_iter().map(|c| c.into_owned()).collect()
    }

    pub fn basis(&self) -> Vec<ComplexMatrix> {
        self.frame
            .column_iter()
            .map(|c| unvectorize(&c.into_owned(), self.ambient_dim))
            .collect()
    }

    /// Orthogonal projector onto the subspace, acting on vectorized operators.
    pub fn projector(&self) -> ComplexMatrix {
        &self.frame * self.frame.adjoint()
    }

    pub fn project(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let v = vectorize(x);
        let coeffs = self.frame.adjoint() * &v;
        unvectorize(&(&self.frame * coeffs), self.ambient_dim)
    }

    /// `|x − P x|_F`.
    pub fn residual(&self, x: &ComplexMatrix) -> f64 {
        (x - self.project(x)).norm()
    }

    /// Membership up to `subspace_abs`, relative to `max(1, |x|_F)`.
    pub fn contains_matrix(&self, x: &ComplexMatrix, tol: &Tolerance) -> bool {
        self.residual(x) <= tol.subspace_abs * x.norm().max(1.0)
    }

    /// Columns of `(I − P) other` for every column of `other`.
    fn complement_residual(&self, other: &ComplexMatrix) -> ComplexMatrix {
        other - &self.frame * (self.frame.adjoint() * other)
    }

    /// Max-entry deviation of the basis Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let g = self.frame.adjoint() * &self.frame - identity(self.dim());
        g.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `{u x u* : x ∈ self}`.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Self {
        let d = self.ambient_dim;
        let basis = self
            .basis()
            .iter()
            .map(|b| vectorize(&(u * b * u.adjoint())))
            .collect();
        Self::from_orthonormal(d, basis)
    }

    /// Phase-fixed copy with the same span; used for reproducible output.
    pub fn normalized_phases(&self) -> Self {
        let mut basis = self.basis_vectors();
        for v in basis.iter_mut() {
            fix_phase(v);
        }
        Self::from_orthonormal(self.ambient_dim, basis)
    }
}

fn check_ambient(a: &OperatorSubspace, b: &OperatorSubspace) -> Result<()> {
    if a.ambient_dim != b.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: a.ambient_dim,
            found: b.ambient_dim,
        });
    }
    Ok(())
}

/// Frobenius distance `|P_a − P_b|_F` between the orthogonal projectors.
///
/// Evaluated as `sqrt(|(I−P_a)Q_b|² + |(I−P_b)Q_a|²)`, which avoids the
/// cancellation of the `n_a + n_b − 2|Q_a* Q_b|²` form.
pub fn projector_distance(a: &OperatorSubspace, b: &OperatorSubspace) -> Result<f64> {
    check_ambient(a, b)?;
    let ra = a.complement_residual(&b.frame).norm_squared();
    let rb = b.complement_residual(&a.frame).norm_squared();
    Ok((ra + rb).sqrt())
}

pub fn equal(a: &OperatorSubspace, b: &OperatorSubspace, tol: &Tolerance) -> Result<bool> {
    Ok(projector_distance(a, b)? <= tol.subspace_abs)
}

/// `b ⊆ a`, decided by `|P_a P_b − P_b|_F`.
pub fn contains(a: &OperatorSubspace, b: &OperatorSubspace, tol: &Tolerance) -> Result<bool> {
    check_ambient(a, b)?;
    Ok(a.complement_residual(&b.frame).norm() <= tol.subspace_abs)
}

/// Smallest subspace containing the generators (and `1` if asked) that is
/// closed under adjoints and products.
///
/// Each round multiplies every element against the ones added in the previous
/// round, so work is not repeated; the dimension strictly grows until the
/// fixed point, hence at most `d²` rounds.
pub fn star_algebra_closure(
    d: usize,
    generators: &[ComplexMatrix],
    include_identity: bool,
    tol: &Tolerance,
) -> Result<OperatorSubspace> {
    for g in generators {
        if g.nrows() != d || g.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: g.nrows().max(g.ncols()),
            });
        }
    }
    let mut seeds: Vec<ComplexVector> = Vec::new();
    if include_identity {
        seeds.push(vectorize(&identity(d)));
    }
    for g in generators {
        seeds.push(vectorize(g));
        seeds.push(vectorize(&g.adjoint()));
    }
    let mut basis: Vec<ComplexVector> = Vec::new();
    extend_orthonormal(&mut basis, seeds.iter(), tol);
    let mut mats: Vec<ComplexMatrix> = basis.iter().map(|v| unvectorize(v, d)).collect();

    let mut fresh_from = 0;
    for _ in 0..=d * d {
        if basis.len() == d * d {
            break;
        }
        let before = basis.len();
        let mut candidates = Vec::new();
        for (j, new) in mats.iter().enumerate().skip(fresh_from) {
            candidates.push(vectorize(&new.adjoint()));
            for old in mats.iter().take(j + 1) {
                candidates.push(vectorize(&(old * new)));
                candidates.push(vectorize(&(new * old)));
            }
        }
        extend_orthonormal(&mut basis, candidates.iter(), tol);
        if basis.len() == before {
            let mut basis = basis;
            for v in basis.iter_mut() {
                fix_phase(v);
            }
            return Ok(OperatorSubspace::from_orthonormal(d, basis));
        }
        mats.extend(basis[before..].iter().map(|v| unvectorize(v, d)));
        fresh_from = before;
    }
    if basis.len() == d * d {
        return Ok(OperatorSubspace::full(d));
    }
    Err(Error::IllConditioned(format!(
        "*-algebra closure did not stabilize within {} rounds",
        d * d + 1
    )))
}

/// Matrices commuting with every basis element of `sub`.
///
/// The constraint `g x − x g = 0` reads `(1 ⊗ g − gᵀ ⊗ 1) vec(x) = 0` in the
/// column-major convention; all constraints are solved as one joint null space.
pub fn commutant(sub: &OperatorSubspace, tol: &Tolerance) -> Result<OperatorSubspace> {
    let d = sub.ambient_dim;
    if sub.dim() == 0 {
        return Ok(OperatorSubspace::full(d));
    }
    let id = identity(d);
    let blocks = sub
        .basis()
        .into_iter()
        .map(|g| kron(&id, &g) - kron(&g.transpose(), &id));
    let ns = joint_nullspace(d * d, blocks, tol)?;
    Ok(OperatorSubspace::from_orthonormal(d, ns))
}

/// Commutant of an arbitrary set of matrices (equivalently of the *-algebra
/// they generate, when the set is closed under adjoints).
pub fn commutant_of(d: usize, mats: &[ComplexMatrix], tol: &Tolerance) -> Result<OperatorSubspace> {
    commutant(&OperatorSubspace::from_matrices(d, mats, tol)?, tol)
}

/// Span of `{x ⊗ y}` over the two bases.
pub fn tensor_subspace(a: &OperatorSubspace, b: &OperatorSubspace) -> OperatorSubspace {
    let d = a.ambient_dim * b.ambient_dim;
    let bb = b.basis();
    let basis = a
        .basis()
        .iter()
        .flat_map(|x| bb.iter().map(move |y| vectorize(&kron(x, y))))
        .collect();
    OperatorSubspace::from_orthonormal(d, basis)
}

/// `a ∩ b`, the joint null space of the complementary projectors.
pub fn intersect(a: &OperatorSubspace, b: &OperatorSubspace, tol: &Tolerance) -> Result<OperatorSubspace> {
    check_ambient(a, b)?;
    intersect_all(&[a, b], tol)
}

pub fn intersect_all(subs: &[&OperatorSubspace], tol: &Tolerance) -> Result<OperatorSubspace> {
    let first = subs
        .first()
        .ok_or_else(|| Error::InvalidParameter("intersection of an empty family".into()))?;
    let d = first.ambient_dim;
    for s in subs {
        check_ambient(first, s)?;
    }
    let n = d * d;
    let blocks = subs.iter().map(|s| identity(n) - s.projector());
    let ns = joint_nullspace(n, blocks, tol)?;
    Ok(OperatorSubspace::from_orthonormal(d, ns))
}

/// Verifies closure under adjoints and products.
pub fn check_star_algebra(a: &OperatorSubspace, tol: &Tolerance) -> Result<()> {
    let basis = a.basis();
    let d = a.ambient_dim;
    for (i, b) in basis.iter().enumerate() {
        let r = a.residual(&b.adjoint());
        if r > tol.subspace_abs {
            return Err(Error::NotAnAlgebra(format!(
                "adjoint of basis element {i} leaves the subspace (residual {r:.3e})"
            )));
        }
    }
    // Batched per row of the product table.
    for (i, x) in basis.iter().enumerate() {
        let cols: Vec<ComplexVector> = basis.iter().map(|y| vectorize(&(x * y))).collect();
        let block = columns_to_matrix(d * d, &cols);
        let res = a.complement_residual(&block);
        for (j, col) in res.column_iter().enumerate() {
            let r = col.norm();
            if r > tol.subspace_abs {
                return Err(Error::NotAnAlgebra(format!(
                    "product of basis elements {i},{j} leaves the subspace (residual {r:.3e})"
                )));
            }
        }
    }
    Ok(())
}

/// As [`check_star_algebra`], and additionally requires `1 ∈ a`.
pub fn check_unital_star_algebra(a: &OperatorSubspace, tol: &Tolerance) -> Result<()> {
    let id = identity(a.ambient_dim);
    if !a.contains_matrix(&id, tol) {
        return Err(Error::NotAnAlgebra("identity is not in the subspace".into()));
    }
    check_star_algebra(a, tol)
}

/// `a ∩ a'` for a *-algebra `a`.
pub fn center(a: &OperatorSubspace, tol: &Tolerance) -> Result<OperatorSubspace> {
    check_star_algebra(a, tol)?;
    center_unchecked(a, tol)
}

pub(crate) fn center_unchecked(a: &OperatorSubspace, tol: &Tolerance) -> Result<OperatorSubspace> {
    let comm = commutant(a, tol)?;
    intersect(a, &comm, tol)
}

/// `a = C·1`.
pub fn is_trivial(a: &OperatorSubspace, tol: &Tolerance) -> bool {
    a.dim() == 1 && a.contains_matrix(&identity(a.ambient_dim), tol)
}

//! Independent oracles for the integration tests.
//!
//! Everything here works in row-major vectorization on the real embedding
//! `[[Re, −Im], [Im, Re]]`, with a one-sided Jacobi SVD, so it shares neither
//! the vec convention nor the decomposition backend with the library.
//! (nalgebra's own SVD returns wrong factors on some rank-deficient inputs.)

#![allow(dead_code)]

use mdomain::algebra::OperatorSubspace;
use mdomain::channel::Channel;
use mdomain::linalg::{ComplexMatrix, ComplexVector, C64};
use nalgebra::DMatrix;

pub const ORACLE_RANK: f64 = 1e-8;

/// `vec_r(x)` with `x[(i, j)]` at position `i·d + j`.
pub fn vec_r(x: &ComplexMatrix) -> ComplexVector {
    let (r, c) = x.shape();
    ComplexVector::from_fn(r * c, |k, _| x[(k / c, k % c)])
}

pub fn unvec_r(v: &ComplexVector, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

/// Row-major superoperator `Σ a ⊗ conj(a)`.
pub fn superop_r(ch: &Channel) -> ComplexMatrix {
    let d = ch.dim();
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for a in ch.kraus() {
        s += a.kronecker(&a.map(|z| z.conj()));
    }
    s
}

/// `[[Re m, −Im m], [Im m, Re m]]`. nalgebra's complex SVD is not reliable
/// on rank-deficient input, its real SVD is.
pub fn realify(m: &ComplexMatrix) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// One-sided (Hestenes) Jacobi SVD: returns `(σ, A·V, V)`, where column `j`
/// of `A·V` has norm `σ_j`.
pub fn jacobi_svd(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, DMatrix<f64>) {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let mut norms: Vec<f64> = (0..n).map(|j| w.column(j).norm_squared()).collect();
    // Two columns of a column-major buffer, as disjoint slices.
    fn pair(buf: &mut [f64], rows: usize, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
        let (lo, hi) = buf.split_at_mut(q * rows);
        (&mut lo[p * rows..(p + 1) * rows], &mut hi[..rows])
    }
    fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
        for (a, b) in x.iter_mut().zip(y.iter_mut()) {
            let (xa, yb) = (*a, *b);
            *a = c * xa - s * yb;
            *b = s * xa + c * yb;
        }
    }
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta) = (norms[p], norms[q]);
                let (wp, wq) = pair(w.as_mut_slice(), m, p, q);
                let gamma: f64 = wp.iter().zip(wq.iter()).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(wp, wq, c, s);
                let (vp, vq) = pair(v.as_mut_slice(), n, p, q);
                rotate(vp, vq, c, s);
                norms[p] = alpha - t * gamma;
                norms[q] = beta + t * gamma;
            }
        }
        if !rotated {
            break;
        }
        // Refresh the running norms against drift.
        for (j, nj) in norms.iter_mut().enumerate() {
            *nj = w.column(j).norm_squared();
        }
    }
    let sigma = (0..n).map(|j| w.column(j).norm()).collect();
    (sigma, w, v)
}

/// Complex orthonormal basis for the complex span of real-embedded vectors
/// `[Re v; Im v]`, by pivoted Gram–Schmidt.
///
/// The inputs span a complex subspace of dimension `r` as `2r` real
/// directions; while fewer than `r` vectors are taken the largest squared
/// residual is at least `1/r`, afterwards it is rounding noise.
fn complexify(real: &[nalgebra::DVector<f64>], len: usize) -> Vec<ComplexVector> {
    let mut cands: Vec<ComplexVector> = real
        .iter()
        .map(|w| ComplexVector::from_fn(len, |i, _| C64::new(w[i], w[i + len])))
        .collect();
    let mut basis: Vec<ComplexVector> = Vec::new();
    loop {
        let best = cands
            .iter()
            .enumerate()
            .map(|(k, c)| (k, c.norm_squared()))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        let Some((k, n2)) = best else { break };
        if n2 < 1e-6 {
            break;
        }
        let mut q = cands.swap_remove(k);
        for _ in 0..2 {
            for b in &basis {
                q -= b * b.dotc(&q);
            }
        }
        let q = q.unscale(q.norm());
        for c in cands.iter_mut() {
            let proj = &q * q.dotc(c);
            *c -= proj;
        }
        basis.push(q);
    }
    basis
}

/// Null space via QR then Jacobi SVD of the real embedding.
pub fn null_r(m: &ComplexMatrix) -> Vec<ComplexVector> {
    let n = m.ncols();
    let real = realify(m);
    let r = if real.nrows() > real.ncols() {
        real.qr().r()
    } else {
        real
    };
    let (sigma, _, v) = jacobi_svd(&r);
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let cut = ORACLE_RANK * smax.max(1.0);
    let null: Vec<_> = (0..2 * n)
        .filter(|&i| sigma[i] <= cut)
        .map(|i| v.column(i).into_owned())
        .collect();
    complexify(&null, n)
}

/// Orthonormal basis (as columns) of the span of the given vectors.
pub fn span_r(vecs: &[ComplexVector], len: usize) -> ComplexMatrix {
    if vecs.is_empty() {
        return ComplexMatrix::zeros(len, 0);
    }
    let mut m = ComplexMatrix::zeros(len, vecs.len());
    for (j, v) in vecs.iter().enumerate() {
        m.set_column(j, v);
    }
    let (sigma, w, _) = jacobi_svd(&realify(&m));
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let real: Vec<_> = (0..sigma.len())
        .filter(|&i| sigma[i] > ORACLE_RANK * smax.max(1.0))
        .map(|i| w.column(i).unscale(sigma[i]))
        .collect();
    let basis = complexify(&real, len);
    ComplexMatrix::from_fn(len, basis.len(), |i, j| basis[j][i])
}

pub fn projector_of_frame(q: &ComplexMatrix) -> ComplexMatrix {
    q * q.adjoint()
}

/// Projector, in row-major coordinates, onto the span of matrices.
pub fn projector_of_mats(mats: &[ComplexMatrix], d: usize) -> ComplexMatrix {
    let vecs: Vec<_> = mats.iter().map(vec_r).collect();
    projector_of_frame(&span_r(&vecs, d * d))
}

/// Projector, in row-major coordinates, onto a library subspace.
pub fn projector_of(sub: &OperatorSubspace) -> ComplexMatrix {
    projector_of_mats(&sub.basis(), sub.ambient_dim())
}

pub fn rank_of_projector(p: &ComplexMatrix) -> usize {
    p.trace().re.round() as usize
}

pub fn dist(p: &ComplexMatrix, q: &ComplexMatrix) -> f64 {
    (p - q).norm()
}

/// `{x : g x = x g for all g}` as a row-major projector.
///
/// The solution space is narrowed one generator at a time, so each SVD only
/// sees the directions that survived the previous constraints.
pub fn commutant_r(d: usize, gens: &[ComplexMatrix]) -> ComplexMatrix {
    let id = DMatrix::<C64>::identity(d, d);
    let n = d * d;
    let mut frame = DMatrix::<C64>::identity(n, n);
    for g in gens {
        if frame.ncols() == 0 {
            break;
        }
        // vec_r(g x − x g) = (g ⊗ 1 − 1 ⊗ gᵀ) vec_r(x)
        let block = g.kronecker(&id) - id.kronecker(&g.transpose());
        let coeffs = null_r(&(block * &frame));
        let mut next = ComplexMatrix::zeros(n, coeffs.len());
        for (k, c) in coeffs.iter().enumerate() {
            next.set_column(k, &(&frame * c));
        }
        frame = next;
    }
    projector_of_frame(&frame)
}

/// Multiplicative domain as the commutant of `{a_i* a_j}`.
pub fn oracle_md(ch: &Channel) -> ComplexMatrix {
    let ks = ch.kraus();
    let gens: Vec<ComplexMatrix> = ks
        .iter()
        .flat_map(|a| ks.iter().map(move |b| a.adjoint() * b))
        .collect();
    // Compress the generator list to a basis of its span first.
    let d = ch.dim();
    let frame = span_r(&gens.iter().map(vec_r).collect::<Vec<_>>(), d * d);
    let basis: Vec<ComplexMatrix> = frame.column_iter().map(|c| unvec_r(&c.into_owned(), d)).collect();
    commutant_r(d, &basis)
}

/// `Fix((E^k)* E^k)` from the row-major superoperator.
pub fn oracle_md_power(ch: &Channel, k: usize) -> ComplexMatrix {
    let s = superop_r(ch);
    let n = s.nrows();
    let mut p = DMatrix::<C64>::identity(n, n);
    for _ in 0..k {
        p = &p * &s;
    }
    let a = p.adjoint() * &p - DMatrix::<C64>::identity(n, n);
    projector_of_frame(&span_r(&null_r(&a), n))
}

/// `{x : E(x) = λ x}` from the row-major superoperator.
pub fn oracle_eigenspace(ch: &Channel, lambda: C64) -> ComplexMatrix {
    let s = superop_r(ch);
    let n = s.nrows();
    let a = s - DMatrix::<C64>::identity(n, n) * lambda;
    projector_of_frame(&span_r(&null_r(&a), n))
}

/// Row-major projector onto `span{x ⊗ y}` for the two projectors' ranges.
pub fn tensor_projector(pa: &ComplexMatrix, da: usize, pb: &ComplexMatrix, db: usize) -> ComplexMatrix {
    let qa = span_r(&pa.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>(), da * da);
    let qb = span_r(&pb.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>(), db * db);
    let mut mats = Vec::new();
    for x in qa.column_iter() {
        let x = unvec_r(&x.into_owned(), da);
        for y in qb.column_iter() {
            let y = unvec_r(&y.into_owned(), db);
            mats.push(x.kronecker(&y));
        }
    }
    projector_of_mats(&mats, da * db)
}

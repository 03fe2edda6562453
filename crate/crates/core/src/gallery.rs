//! Constructors for the channel families used throughout: unital
//! entanglement-breaking channels with a prescribed index, Schur-cycle
//! channels, dephasing shifts, the ω pair and random unital channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::analysis::md_chain;
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg::{identity, ComplexMatrix, ComplexVector, Tolerance, C64, ONE, ZERO};

/// Largest family size [`non_comparable`] will brute-force.
pub const NON_COMPARABLE_MAX: usize = 14;

/// Normalized DFT matrix, `Δ_ij = ω^{ij} / √d` with `ω = e^{2πi/d}`.
pub fn dft_matrix(d: usize) -> ComplexMatrix {
    let scale = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |i, j| {
        let k = (i * j) % d;
        C64::from_polar(scale, std::f64::consts::TAU * k as f64 / d as f64)
    })
}

/// An ordered family of unit vectors in `C^d`.
#[derive(Clone, Debug)]
pub struct VectorFamily {
    dim: usize,
    vectors: Vec<ComplexVector>,
}

impl VectorFamily {
    pub fn new(dim: usize, vectors: Vec<ComplexVector>) -> Result<Self> {
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if (v.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "vector {i} has norm {}, expected 1",
                    v.norm()
                )));
            }
        }
        Ok(VectorFamily { dim, vectors })
    }

    pub fn canonical(d: usize) -> Self {
        VectorFamily {
            dim: d,
            vectors: (0..d).map(|i| unit_vector(d, i)).collect(),
        }
    }

    /// The columns of `u`.
    pub fn columns(u: &ComplexMatrix) -> Result<Self> {
        Self::new(u.nrows(), u.column_iter().map(|c| c.into_owned()).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    pub fn truncate(&self, n: usize) -> Self {
        VectorFamily {
            dim: self.dim,
            vectors: self.vectors[..n.min(self.len())].to_vec(),
        }
    }

    pub fn is_orthonormal(&self, tol: f64) -> bool {
        self.vectors.iter().enumerate().all(|(i, a)| {
            self.vectors.iter().enumerate().all(|(j, b)| {
                let expected = if i == j { 1.0 } else { 0.0 };
                (a.dotc(b) - C64::new(expected, 0.0)).norm() <= tol
            })
        })
    }

    /// `Σ_{k ∈ subset} v_k v_k*`.
    pub fn projection(&self, subset: &[usize]) -> ComplexMatrix {
        let mut p = ComplexMatrix::zeros(self.dim, self.dim);
        for &k in subset {
            let v = &self.vectors[k];
            p += v * v.adjoint();
        }
        p
    }
}

fn unit_vector(d: usize, i: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(d);
    v[i] = ONE;
    v
}

/// A witness of comparability: nonempty proper index sets `K₁` of `phi` and
/// `K₂` of `zeta` whose rank-one projections sum to the same projection.
pub fn comparability_witness(
    phi: &VectorFamily,
    zeta: &VectorFamily,
    tol: &Tolerance,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    if phi.dim() != zeta.dim() {
        return Err(Error::DimensionMismatch {
            expected: phi.dim(),
            found: zeta.dim(),
        });
    }
    let (n, m) = (phi.len(), zeta.len());
    if n > NON_COMPARABLE_MAX || m > NON_COMPARABLE_MAX {
        return Err(Error::InvalidParameter(format!(
            "families of size {n} and {m} exceed the brute-force cap of {NON_COMPARABLE_MAX}"
        )));
    }
    if !phi.is_orthonormal(1e-9) || !zeta.is_orthonormal(1e-9) {
        return Err(Error::InvalidParameter("families must be orthonormal".into()));
    }
    for mask in 1u32..(1 << n) - 1 {
        let k1: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let p = phi.projection(&k1);
        // Only ζ_k with ⟨ζ_k, p ζ_k⟩ = 1 can appear in a matching sum.
        let k2: Vec<usize> = (0..m)
            .filter(|&k| {
                let z = &zeta.vectors[k];
                z.dotc(&(&p * z)).re > 0.5
            })
            .collect();
        if k2.is_empty() || k2.len() == m {
            continue;
        }
        if (zeta.projection(&k2) - &p).norm() <= tol.subspace_abs {
            return Ok(Some((k1, k2)));
        }
    }
    Ok(None)
}

/// No nonempty proper subsets have equal projection sums.
pub fn non_comparable(phi: &VectorFamily, zeta: &VectorFamily, tol: &Tolerance) -> Result<bool> {
    Ok(comparability_witness(phi, zeta, tol)?.is_none())
}

/// Unital entanglement-breaking channel on `M_d` with multiplicative index `r`.
///
/// `r = 1` gives `{ζ_i ζ_i*}`. For `r ≥ 2`, with `m = d − r + 2`, the vectors
/// `φ_i` are the `m`-point DFT applied to `ζ_1..ζ_m` (and `φ_i = ζ_i` beyond),
/// and the Kraus operators are `φ_i ζ_{i−1}*` with `ζ_0 = ζ_d`. The result is
/// checked for non-comparability and for `κ = r` before it is returned.
pub fn etb_channel(d: usize, r: usize, zeta: Option<&VectorFamily>, tol: &Tolerance) -> Result<Channel> {
    if d == 0 || r == 0 || r > d {
        return Err(Error::InvalidParameter(format!("need 1 ≤ r ≤ d, got d = {d}, r = {r}")));
    }
    let canonical;
    let zeta = match zeta {
        Some(z) => z,
        None => {
            canonical = VectorFamily::canonical(d);
            &canonical
        }
    };
    if zeta.dim() != d || zeta.len() != d || !zeta.is_orthonormal(1e-9) {
        return Err(Error::InvalidParameter(format!(
            "ζ must be an orthonormal basis of C^{d}"
        )));
    }
    let z = zeta.vectors();
    let label = format!("etb(d={d},r={r})");
    if r == 1 {
        let kraus = z.iter().map(|v| v * v.adjoint()).collect();
        return Channel::new(kraus, label);
    }

    let m = d - r + 2;
    let dft = dft_matrix(m);
    let phi: Vec<ComplexVector> = (0..d)
        .map(|i| {
            if i < m {
                (0..m).fold(ComplexVector::zeros(d), |acc, j| acc + &z[j] * dft[(j, i)])
            } else {
                z[i].clone()
            }
        })
        .collect();
    let phi_family = VectorFamily::new(d, phi.clone())?;
    if !non_comparable(&phi_family.truncate(m), &zeta.truncate(m), tol)? {
        return Err(Error::Construction(format!(
            "DFT family of size {m} is comparable to ζ"
        )));
    }
    let kraus = (0..d)
        .map(|i| &phi[i] * z[(i + d - 1) % d].adjoint())
        .collect();
    let ch = Channel::new(kraus, label)?;
    let kappa = md_chain(&ch, tol)?.kappa;
    if kappa != r {
        return Err(Error::Construction(format!(
            "constructed channel has index {kappa}, expected {r}"
        )));
    }
    Ok(ch)
}

/// The cyclic shift `u e_i = e_{i+1}` (indices mod `d`).
pub fn cyclic_shift(d: usize) -> ComplexMatrix {
    let mut u = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        u[((i + 1) % d, i)] = ONE;
    }
    u
}

/// `x ↦ u (b ∘ x) u*` with `b = J_{d−1} ⊕ 1` and `u` the cyclic shift.
///
/// `b = v v* + e_d e_d*` with `v` the indicator of the first `d − 1`
/// coordinates, so the Schur map has Kraus operators `diag(v)` and
/// `diag(e_d)`; composing with `u` gives the two Kraus operators here.
pub fn schur_cycle_channel(d: usize) -> Result<Channel> {
    if d < 3 {
        return Err(Error::InvalidParameter(format!("Schur-cycle channel needs d ≥ 3, got {d}")));
    }
    let u = cyclic_shift(d);
    let mut head = ComplexMatrix::zeros(d, d);
    for i in 0..d - 1 {
        head[(i, i)] = ONE;
    }
    let mut tail = ComplexMatrix::zeros(d, d);
    tail[(d - 1, d - 1)] = ONE;
    Channel::new(vec![&u * head, &u * tail], format!("schur-cycle(d={d})"))
}

/// The Schur multiplier `b = J_{d−1} ⊕ 1`.
pub fn schur_cycle_multiplier(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if (i < d - 1 && j < d - 1) || (i == d - 1 && j == d - 1) {
            ONE
        } else {
            ZERO
        }
    })
}

/// Kraus `{e_{i+1} e_i*}`: dephase, then shift.
pub fn dephasing_shift_channel(d: usize) -> Result<Channel> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dephasing shift needs d ≥ 2, got {d}")));
    }
    let kraus = (0..d)
        .map(|i| {
            let mut k = ComplexMatrix::zeros(d, d);
            k[((i + 1) % d, i)] = ONE;
            k
        })
        .collect();
    Channel::new(kraus, format!("dephasing-shift(d={d})"))
}

/// Kraus `{e_i e_i*}`.
pub fn complete_dephasing(d: usize) -> Channel {
    let kraus = (0..d)
        .map(|i| {
            let mut k = ComplexMatrix::zeros(d, d);
            k[(i, i)] = ONE;
            k
        })
        .collect();
    Channel::new(kraus, format!("dephasing(d={d})")).expect("well-formed Kraus set")
}

/// The two unitary channels on `M_3` whose even mixture has index 2.
///
/// `E₁ = Ad_{u₁}` with `u₁ = (1/√3)[[1,1,1],[ω,1,ω²],[ω²,1,ω]]`, and
/// `E₂ = Ad_{u₂}` with `u₂` the cyclic permutation `[[0,1,0],[0,0,1],[1,0,0]]`.
pub fn omega_pair() -> (Channel, Channel) {
    let w = C64::from_polar(1.0, std::f64::consts::TAU / 3.0);
    let w2 = w * w;
    let s = 1.0 / 3f64.sqrt();
    #[rustfmt::skip]
    let u1 = ComplexMatrix::from_row_slice(3, 3, &[
        ONE, ONE, ONE,
        w,   ONE, w2,
        w2,  ONE, w,
    ]) * C64::new(s, 0.0);
    #[rustfmt::skip]
    let u2 = ComplexMatrix::from_row_slice(3, 3, &[
        ZERO, ONE,  ZERO,
        ZERO, ZERO, ONE,
        ONE,  ZERO, ZERO,
    ]);
    (
        Channel::unitary(u1, "omega-1").expect("unitary"),
        Channel::unitary(u2, "omega-2").expect("unitary"),
    )
}

/// The index-3 channel on `M_3` with Kraus operators `f₁e₃*, f₂e₁*, f₃e₂*`,
/// where `f₁, f₂` are the 2-point DFT of `e₁, e₂` and `f₃ = e₃`.
pub fn m3_example() -> Channel {
    let h = 1.0 / 2f64.sqrt();
    let r = |x: f64| C64::new(x, 0.0);
    #[rustfmt::skip]
    let k1 = ComplexMatrix::from_row_slice(3, 3, &[
        ZERO, ZERO, r(h),
        ZERO, ZERO, r(h),
        ZERO, ZERO, ZERO,
    ]);
    #[rustfmt::skip]
    let k2 = ComplexMatrix::from_row_slice(3, 3, &[
        r(h),  ZERO, ZERO,
        r(-h), ZERO, ZERO,
        ZERO,  ZERO, ZERO,
    ]);
    #[rustfmt::skip]
    let k3 = ComplexMatrix::from_row_slice(3, 3, &[
        ZERO, ZERO, ZERO,
        ZERO, ZERO, ZERO,
        ZERO, ONE,  ZERO,
    ]);
    Channel::new(vec![k1, k2, k3], "m3-example").expect("well-formed Kraus set")
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { ONE };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

fn dirichlet_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// `Σ λ_i Ad_{u_i}` with Haar unitaries and flat-Dirichlet weights.
pub fn random_mixed_unitary(d: usize, n: usize, seed: u64) -> Result<Channel> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParameter("need d ≥ 1 and n ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = dirichlet_weights(n, &mut rng);
    let kraus = weights
        .iter()
        .map(|w| random_unitary(d, &mut rng) * C64::new(w.sqrt(), 0.0))
        .collect();
    Channel::new(kraus, format!("mixed-unitary(d={d},n={n},seed={seed})"))
}

/// Mixed unitary whose unitaries share a random block-diagonal pattern,
/// so the block projections survive in the multiplicative domain.
pub fn random_block_mixed_unitary(d: usize, n: usize, seed: u64) -> Result<Channel> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParameter("need d ≥ 1 and n ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sizes = Vec::new();
    let mut left = d;
    while left > 0 {
        let s = rng.gen_range(1..=left);
        sizes.push(s);
        left -= s;
    }
    let weights = dirichlet_weights(n, &mut rng);
    let kraus = weights
        .iter()
        .map(|w| {
            let mut u = ComplexMatrix::zeros(d, d);
            let mut off = 0;
            for &s in &sizes {
                u.view_mut((off, off), (s, s))
                    .copy_from(&random_unitary(s, &mut rng));
                off += s;
            }
            u * C64::new(w.sqrt(), 0.0)
        })
        .collect();
    Channel::new(kraus, format!("block-mixed-unitary(d={d},n={n},seed={seed})"))
}

/// `x ↦ u E(u* x u) u*`.
pub fn conjugate_channel(ch: &Channel, u: &ComplexMatrix) -> Result<Channel> {
    let kraus = ch.kraus().iter().map(|a| u * a * u.adjoint()).collect();
    Channel::new(kraus, format!("conj({})", ch.label()))
}

/// A seeded unital channel drawn from a mix of families: generic mixed
/// unitaries, block-structured mixed unitaries, and dephasing shifts or
/// complete dephasing in a random basis.
pub fn random_unital(d: usize, seed: u64) -> Result<Channel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_cafe);
    let n = rng.gen_range(1..=3);
    match seed % 4 {
        0 => random_mixed_unitary(d, n, seed),
        1 => random_block_mixed_unitary(d, n, seed),
        2 if d >= 2 => conjugate_channel(&dephasing_shift_channel(d)?, &random_unitary(d, &mut rng)),
        _ => conjugate_channel(&complete_dephasing(d), &random_unitary(d, &mut rng)),
    }
}

/// Whether `u` is unitary to within `tol` in max-entry norm.
pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> bool {
    u.is_square()
        && (u.adjoint() * u - identity(u.nrows()))
            .iter()
            .all(|z| z.norm() <= tol)
}

//! Certificates for the structural laws: tensor splitting, index laws,
//! convex combinations, composition and adjoints.

use serde::Serialize;

use super::{
    angular_distance, eigenspace, fixed_space, md_chain, md_of_superoperator, multiplicative_domain,
    peripheral_of_superoperator, require_unital_channel, ANGLE_MERGE,
};
use crate::algebra::{
    intersect_all, is_trivial, projector_distance, tensor_subspace, OperatorSubspace,
};
use crate::channel::{adjoint, compose, convex_combine, superoperator, tensor, Channel, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::{identity, joint_nullspace, orthonormalize, Tolerance, C64};

/// Two subspaces that a law says must coincide.
#[derive(Clone, Debug)]
pub struct SplittingCertificate {
    pub lhs: OperatorSubspace,
    pub rhs: OperatorSubspace,
    pub distance: f64,
    pub equal: bool,
}

impl SplittingCertificate {
    fn new(lhs: OperatorSubspace, rhs: OperatorSubspace, tol: &Tolerance) -> Result<Self> {
        let distance = projector_distance(&lhs, &rhs)?;
        Ok(SplittingCertificate {
            lhs,
            rhs,
            distance,
            equal: distance <= tol.subspace_abs,
        })
    }
}

/// `M_{a⊗b}` against `M_a ⊗ M_b`.
pub fn check_md_splitting(a: &Channel, b: &Channel, tol: &Tolerance) -> Result<SplittingCertificate> {
    let lhs = multiplicative_domain(&tensor(a, b), tol)?;
    let rhs = tensor_subspace(&multiplicative_domain(a, tol)?, &multiplicative_domain(b, tol)?);
    SplittingCertificate::new(lhs, rhs, tol)
}

/// `M_{(a⊗b)^∞}` against `M_{a^∞} ⊗ M_{b^∞}`.
pub fn check_stabilized_splitting(
    a: &Channel,
    b: &Channel,
    tol: &Tolerance,
) -> Result<SplittingCertificate> {
    let lhs = md_chain(&tensor(a, b), tol)?.stabilized;
    let rhs = tensor_subspace(&md_chain(a, tol)?.stabilized, &md_chain(b, tol)?.stabilized);
    SplittingCertificate::new(lhs, rhs, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaTensorCertificate {
    pub kappa_a: usize,
    pub kappa_b: usize,
    pub kappa_product: usize,
    pub kappa_max: usize,
    pub equal: bool,
}

/// `κ(a⊗b)` against `max(κ(a), κ(b))`.
pub fn kappa_tensor_check(a: &Channel, b: &Channel, tol: &Tolerance) -> Result<KappaTensorCertificate> {
    let kappa_a = md_chain(a, tol)?.kappa;
    let kappa_b = md_chain(b, tol)?.kappa;
    let kappa_product = md_chain(&tensor(a, b), tol)?.kappa;
    let kappa_max = kappa_a.max(kappa_b);
    Ok(KappaTensorCertificate {
        kappa_a,
        kappa_b,
        kappa_product,
        kappa_max,
        equal: kappa_product == kappa_max,
    })
}

#[derive(Clone, Debug)]
pub struct PeripheralCertificate {
    pub lambda: C64,
    /// Eigenspace of the product channel at `lambda`.
    pub actual: OperatorSubspace,
    /// Span of `x ⊗ y` over peripheral pairs with `μν = lambda`.
    pub predicted: OperatorSubspace,
    /// The contributing `(μ, ν)` pairs.
    pub pairs: Vec<(C64, C64)>,
    pub distance: f64,
    pub equal: bool,
}

/// Eigenspace of `a ⊗ b` at a unimodular `λ` against the span of products
/// of peripheral eigen-operators whose eigenvalues multiply to `λ`.
pub fn tensor_peripheral_check(
    a: &Channel,
    b: &Channel,
    lambda: C64,
    tol: &Tolerance,
) -> Result<PeripheralCertificate> {
    require_unital_channel(a, tol)?;
    require_unital_channel(b, tol)?;
    if (lambda.norm() - 1.0).abs() > tol.spectral_cluster {
        return Err(Error::InvalidParameter(format!(
            "|λ| = {} is not on the unit circle",
            lambda.norm()
        )));
    }
    let lambda = lambda / lambda.norm();
    let pa = peripheral_of_superoperator(&superoperator(a), tol)?;
    let pb = peripheral_of_superoperator(&superoperator(b), tol)?;
    let d = a.dim() * b.dim();

    let mut pairs = Vec::new();
    let mut vecs = Vec::new();
    for x in &pa {
        for y in &pb {
            if angular_distance(x.eigenvalue * y.eigenvalue, lambda) <= ANGLE_MERGE {
                pairs.push((x.eigenvalue, y.eigenvalue));
                vecs.extend(tensor_subspace(&x.eigenspace, &y.eigenspace).basis_vectors());
            }
        }
    }
    let predicted = OperatorSubspace::from_orthonormal(d, orthonormalize(&vecs, tol));
    let actual = eigenspace(&superoperator(&tensor(a, b)), lambda, tol)?;
    let distance = projector_distance(&actual, &predicted)?;
    Ok(PeripheralCertificate {
        lambda,
        actual,
        predicted,
        pairs,
        distance,
        equal: distance <= tol.subspace_abs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FixSplittingCertificate {
    /// `Fix(a⊗b) = Fix(a) ⊗ Fix(b)`.
    pub splits: bool,
    /// No peripheral pair `μ ≠ 1`, `ν` has `μν = 1`.
    pub predicted: bool,
    pub fix_product_dim: usize,
    pub fix_split_dim: usize,
    pub distance: f64,
}

pub fn fix_splitting_check(a: &Channel, b: &Channel, tol: &Tolerance) -> Result<FixSplittingCertificate> {
    require_unital_channel(a, tol)?;
    require_unital_channel(b, tol)?;
    let sa = superoperator(a);
    let sb = superoperator(b);
    let product = fixed_space(&superoperator(&tensor(a, b)), tol)?;
    let split = tensor_subspace(&fixed_space(&sa, tol)?, &fixed_space(&sb, tol)?);
    let distance = projector_distance(&product, &split)?;

    let one = C64::new(1.0, 0.0);
    let pa = peripheral_of_superoperator(&sa, tol)?;
    let pb = peripheral_of_superoperator(&sb, tol)?;
    let extra = pa.iter().any(|x| {
        angular_distance(x.eigenvalue, one) > ANGLE_MERGE
            && pb
                .iter()
                .any(|y| angular_distance(x.eigenvalue * y.eigenvalue, one) <= ANGLE_MERGE)
    });
    Ok(FixSplittingCertificate {
        splits: distance <= tol.subspace_abs,
        predicted: !extra,
        fix_product_dim: product.dim(),
        fix_split_dim: split.dim(),
        distance,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationVerdict {
    pub kappa: usize,
    pub threshold: usize,
    /// `false` when `κ ≥ d − 1`: the channel cannot be a tensor product of
    /// channels on smaller factors. `true` is only a necessary condition.
    pub factorable_possible: bool,
    /// Whether `d` is composite, i.e. whether the question is non-vacuous.
    pub composite: bool,
}

pub fn factorization_obstruction(ch: &Channel, tol: &Tolerance) -> Result<FactorizationVerdict> {
    let kappa = md_chain(ch, tol)?.kappa;
    Ok(verdict_for(ch.dim(), kappa))
}

pub(crate) fn verdict_for(d: usize, kappa: usize) -> FactorizationVerdict {
    let threshold = d.saturating_sub(1);
    FactorizationVerdict {
        kappa,
        threshold,
        factorable_possible: kappa < threshold,
        composite: d >= 4 && (2..d).any(|p| d.is_multiple_of(p)),
    }
}

#[derive(Clone, Debug)]
pub struct ConvexCertificate {
    pub k: usize,
    /// `M_{E^k}` for `E = λa + (1−λ)b`.
    pub direct: OperatorSubspace,
    /// `M_{a^k} ∩ M_{b^k} ∩ {x : aⁿ(x) = bⁿ(x), 1 ≤ n ≤ k}`.
    pub formula: OperatorSubspace,
    pub distance: f64,
    pub equal: bool,
}

/// The multiplicative domain of a power of a convex combination against the
/// intersection formula.
pub fn convex_md_check(
    a: &Channel,
    b: &Channel,
    lambda: f64,
    k: usize,
    tol: &Tolerance,
) -> Result<ConvexCertificate> {
    require_unital_channel(a, tol)?;
    require_unital_channel(b, tol)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter(format!("weight {lambda} must lie in (0, 1)")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("power must be at least 1".into()));
    }
    let mix = convex_combine(&[(lambda, a), (1.0 - lambda, b)])?;
    let direct = md_of_superoperator(&superoperator(&mix).pow(k), tol)?;

    let sa = superoperator(a);
    let sb = superoperator(b);
    let d = a.dim();
    let ma = md_of_superoperator(&sa.pow(k), tol)?;
    let mb = md_of_superoperator(&sb.pow(k), tol)?;
    let agreement = agreement_set(&sa, &sb, k, tol)?;
    let formula = intersect_all(&[&ma, &mb, &agreement], tol)?;
    debug_assert_eq!(formula.ambient_dim(), d);
    let distance = projector_distance(&direct, &formula)?;
    Ok(ConvexCertificate {
        k,
        direct,
        formula,
        distance,
        equal: distance <= tol.subspace_abs,
    })
}

/// `{x : aⁿ(x) = bⁿ(x) for 1 ≤ n ≤ k}`.
fn agreement_set(sa: &Superoperator, sb: &Superoperator, k: usize, tol: &Tolerance) -> Result<OperatorSubspace> {
    let n = sa.matrix().nrows();
    let mut pa = sa.clone();
    let mut pb = sb.clone();
    let mut blocks = Vec::with_capacity(k);
    for i in 1..=k {
        if i > 1 {
            pa = pa.compose(sa);
            pb = pb.compose(sb);
        }
        blocks.push(pa.matrix() - pb.matrix());
    }
    let ns = joint_nullspace(n, blocks, tol)?;
    Ok(OperatorSubspace::from_orthonormal(sa.dim(), ns))
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparableBound {
    /// Some first factor has a trivial stabilized domain.
    pub applicable: bool,
    pub kappa: usize,
    pub bound: usize,
    pub ok: bool,
}

/// `κ(Σ λᵢ aᵢ ⊗ bᵢ) ≤ max(2d − 2, 2c − 2)` when some `aᵢ` has trivial
/// stabilized multiplicative domain.
pub fn separable_bound_check(terms: &[(f64, Channel, Channel)], tol: &Tolerance) -> Result<SeparableBound> {
    let first = terms
        .first()
        .ok_or_else(|| Error::InvalidParameter("no terms".into()))?;
    let (d, c) = (first.1.dim(), first.2.dim());
    let mut applicable = false;
    let mut products = Vec::with_capacity(terms.len());
    for (w, a, b) in terms {
        require_unital_channel(a, tol)?;
        require_unital_channel(b, tol)?;
        if !applicable && is_trivial(&md_chain(a, tol)?.stabilized, tol) {
            applicable = true;
        }
        products.push((*w, tensor(a, b)));
    }
    let refs: Vec<(f64, &Channel)> = products.iter().map(|(w, ch)| (*w, ch)).collect();
    let kappa = md_chain(&convex_combine(&refs)?, tol)?.kappa;
    let bound = (2 * d).max(2 * c).saturating_sub(2);
    Ok(SeparableBound {
        applicable,
        kappa,
        bound,
        ok: kappa <= bound,
    })
}

/// The algebra of the largest unitarily correctable code, which for a
/// unital channel is its multiplicative domain.
pub fn ucc_algebra(ch: &Channel, tol: &Tolerance) -> Result<OperatorSubspace> {
    multiplicative_domain(ch, tol)
}

/// `UCC(a⊗b)` against `UCC(a) ⊗ UCC(b)`.
pub fn ucc_tensor_check(a: &Channel, b: &Channel, tol: &Tolerance) -> Result<SplittingCertificate> {
    let lhs = ucc_algebra(&tensor(a, b), tol)?;
    let rhs = tensor_subspace(&ucc_algebra(a, tol)?, &ucc_algebra(b, tol)?);
    SplittingCertificate::new(lhs, rhs, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjointIndexCertificate {
    pub kappa: usize,
    pub kappa_adjoint: usize,
    pub equal: bool,
}

pub fn adjoint_index_check(ch: &Channel, tol: &Tolerance) -> Result<AdjointIndexCertificate> {
    let kappa = md_chain(ch, tol)?.kappa;
    let kappa_adjoint = md_chain(&adjoint(ch), tol)?.kappa;
    Ok(AdjointIndexCertificate {
        kappa,
        kappa_adjoint,
        equal: kappa == kappa_adjoint,
    })
}

/// Whether `M_E = C·1`.
///
/// Triviality of the multiplicative domain is necessary for strict
/// contractivity, not sufficient; a `true` here certifies nothing further.
pub fn md_triviality_probe(ch: &Channel, tol: &Tolerance) -> Result<bool> {
    Ok(is_trivial(&multiplicative_domain(ch, tol)?, tol))
}

#[derive(Clone, Debug)]
pub struct CompositionCertificate {
    /// `M_{outer ∘ inner}` computed directly.
    pub direct: OperatorSubspace,
    /// `{x ∈ M_inner : inner(x) ∈ M_outer}`.
    pub formula: OperatorSubspace,
    pub distance: f64,
    pub equal: bool,
}

/// The multiplicative domain of a composition against the pull-back formula.
pub fn composition_law_check(
    outer: &Channel,
    inner: &Channel,
    tol: &Tolerance,
) -> Result<CompositionCertificate> {
    let direct = multiplicative_domain(&compose(outer, inner)?, tol)?;
    let m_inner = multiplicative_domain(inner, tol)?;
    let m_outer = multiplicative_domain(outer, tol)?;
    let n = inner.dim() * inner.dim();
    let s_inner = superoperator(inner);
    let blocks = [
        identity(n) - m_inner.projector(),
        (identity(n) - m_outer.projector()) * s_inner.matrix(),
    ];
    let ns = joint_nullspace(n, blocks, tol)?;
    let formula = OperatorSubspace::from_orthonormal(inner.dim(), ns);
    let distance = projector_distance(&direct, &formula)?;
    Ok(CompositionCertificate {
        direct,
        formula,
        distance,
        equal: distance <= tol.subspace_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, ONE};

    fn unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, j)] = ONE;
        m
    }

    fn shift(d: usize) -> Channel {
        Channel::new((0..d).map(|i| unit(d, (i + 1) % d, i)).collect(), "shift").unwrap()
    }

    fn cycle(d: usize) -> Channel {
        let mut u = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            u[((i + 1) % d, i)] = ONE;
        }
        Channel::unitary(u, "cycle").unwrap()
    }

    #[test]
    fn fix_splitting_follows_gcd() {
        let tol = Tolerance::default();
        let c = fix_splitting_check(&shift(2), &shift(3), &tol).unwrap();
        assert!(c.splits && c.predicted);
        assert_eq!(c.fix_product_dim, 1);
        let c = fix_splitting_check(&shift(2), &shift(2), &tol).unwrap();
        assert!(!c.splits && !c.predicted);
        assert_eq!((c.fix_product_dim, c.fix_split_dim), (2, 1));
        let c = fix_splitting_check(&cycle(3), &cycle(3), &tol).unwrap();
        assert!(!c.splits && !c.predicted);
        assert_eq!((c.fix_product_dim, c.fix_split_dim), (27, 9));
    }

    #[test]
    fn peripheral_products() {
        let tol = Tolerance::default();
        let one = C64::new(1.0, 0.0);
        let c = tensor_peripheral_check(&shift(2), &shift(2), one, &tol).unwrap();
        assert!(c.equal);
        assert_eq!(c.actual.dim(), 2);
        let w = C64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        let c = tensor_peripheral_check(&shift(3), &shift(3), w, &tol).unwrap();
        assert!(c.equal);
        assert_eq!(c.actual.dim(), 3);
        assert_eq!(c.pairs.len(), 3);
        assert!(tensor_peripheral_check(&shift(2), &shift(2), C64::new(0.5, 0.0), &tol).is_err());
    }

    #[test]
    fn splitting_and_ucc_on_small_channels() {
        let tol = Tolerance::default();
        let c = check_md_splitting(&shift(2), &cycle(3), &tol).unwrap();
        assert!(c.equal);
        assert_eq!(c.lhs.dim(), 2 * 9);
        assert!(ucc_tensor_check(&shift(3), &shift(2), &tol).unwrap().equal);
        assert!(check_stabilized_splitting(&shift(2), &shift(3), &tol).unwrap().equal);
    }

    #[test]
    fn convex_with_itself_degenerates() {
        let tol = Tolerance::default();
        let c = convex_md_check(&shift(3), &shift(3), 0.3, 2, &tol).unwrap();
        assert!(c.equal);
        assert_eq!(c.direct.dim(), 3);
        assert!(convex_md_check(&shift(3), &shift(3), 1.0, 2, &tol).is_err());
    }

    #[test]
    fn composition_law_on_shift_and_cycle() {
        let tol = Tolerance::default();
        let c = composition_law_check(&shift(3), &cycle(3), &tol).unwrap();
        assert!(c.equal);
        let c = composition_law_check(&cycle(3), &shift(3), &tol).unwrap();
        assert!(c.equal);
    }

    #[test]
    fn factorization_verdicts() {
        let v = verdict_for(4, 1);
        assert!(v.factorable_possible && v.composite);
        let v = verdict_for(4, 3);
        assert!(!v.factorable_possible);
        assert!(!verdict_for(5, 1).composite);
    }

    #[test]
    fn adjoint_index_and_probe() {
        let tol = Tolerance::default();
        let c = adjoint_index_check(&cycle(3), &tol).unwrap();
        assert!(c.equal && c.kappa == 1);
        assert!(!md_triviality_probe(&cycle(3), &tol).unwrap());
        assert!(!md_triviality_probe(&shift(3), &tol).unwrap());
    }
}

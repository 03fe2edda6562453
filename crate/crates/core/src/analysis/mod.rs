//! Multiplicative domains, the multiplicative index and peripheral structure
//! of unital channels.
//!
//! Every domain is computed from superoperator powers: for a unital channel
//! `M_{E^k} = Fix((E^k)* ∘ E^k)`, which is the null space of `(S^k)^H S^k − 1`.
//! Kraus operators of powers are never materialized.

mod checks;
mod report;

pub use checks::{
    adjoint_index_check, check_md_splitting, check_stabilized_splitting, composition_law_check,
    convex_md_check, factorization_obstruction, fix_splitting_check, kappa_tensor_check,
    md_triviality_probe, separable_bound_check, tensor_peripheral_check, ucc_algebra,
    ucc_tensor_check, AdjointIndexCertificate, CompositionCertificate, ConvexCertificate,
    FactorizationVerdict, FixSplittingCertificate, KappaTensorCertificate, PeripheralCertificate,
    SeparableBound, SplittingCertificate,
};
pub use report::{analyze, AnalysisReport, DomainSummary, PeripheralSummary};

use crate::algebra::{
    check_star_algebra, commutant_of, contains, equal, projector_distance, OperatorSubspace,
};
use crate::channel::{superoperator, Channel, Superoperator};
use crate::error::{Error, Result};
use crate::linalg::{angle, eigenvalues, identity, nullspace_with_scale, orthonormalize, Tolerance, C64};

/// Angular merge radius used when clustering unit-circle eigenvalues.
pub const ANGLE_MERGE: f64 = 1e-6;

/// `max(1, 2d − 2)`, the largest multiplicative index a unital channel on
/// `M_d` can have.
pub fn kappa_cap(d: usize) -> usize {
    (2 * d).saturating_sub(2).max(1)
}

/// A peripheral eigenvalue and its eigenspace.
#[derive(Clone, Debug)]
pub struct PeripheralDatum {
    pub eigenvalue: C64,
    pub eigenspace: OperatorSubspace,
}

/// The decreasing chain `M_E ⊇ M_{E²} ⊇ …` up to stabilization.
#[derive(Clone, Debug)]
pub struct IndexChain {
    pub domains: Vec<OperatorSubspace>,
    pub kappa: usize,
    pub stabilized: OperatorSubspace,
}

impl IndexChain {
    pub fn dims(&self) -> Vec<usize> {
        self.domains.iter().map(OperatorSubspace::dim).collect()
    }
}

fn require_unital_channel(ch: &Channel, tol: &Tolerance) -> Result<()> {
    ch.require_trace_preserving(tol)?;
    ch.require_unital(tol)
}

/// `{x : S x = x}`.
pub fn fixed_space(s: &Superoperator, tol: &Tolerance) -> Result<OperatorSubspace> {
    let n = s.matrix().nrows();
    let ns = nullspace_with_scale(&(s.matrix() - identity(n)), 1.0, tol)?;
    Ok(OperatorSubspace::from_vectors(s.dim(), &ns, tol))
}

/// `{x : S x = λ x}`.
pub fn eigenspace(s: &Superoperator, lambda: C64, tol: &Tolerance) -> Result<OperatorSubspace> {
    let n = s.matrix().nrows();
    let shifted = s.matrix() - identity(n) * lambda;
    let ns = nullspace_with_scale(&shifted, 1.0, tol)?;
    Ok(OperatorSubspace::from_vectors(s.dim(), &ns, tol))
}

/// Fixed points of a trace-preserving channel; for unital input the result
/// is additionally checked to be a *-algebra.
pub fn fixed_points(ch: &Channel, tol: &Tolerance) -> Result<OperatorSubspace> {
    ch.require_trace_preserving(tol)?;
    let fix = fixed_space(&superoperator(ch), tol)?;
    if ch.require_unital(tol).is_ok() {
        check_star_algebra(&fix, tol).map_err(|e| {
            Error::IllConditioned(format!("fixed points of a unital channel: {e}"))
        })?;
    }
    Ok(fix)
}

/// `M_T = Fix(T* ∘ T)` for the superoperator `T` of a unital channel.
pub fn md_of_superoperator(t: &Superoperator, tol: &Tolerance) -> Result<OperatorSubspace> {
    fixed_space(&t.adjoint().compose(t), tol)
}

/// `M_{E^k}` from the `k`-th superoperator power.
pub fn md_power_domain(ch: &Channel, k: usize, tol: &Tolerance) -> Result<OperatorSubspace> {
    require_unital_channel(ch, tol)?;
    if k == 0 {
        return Err(Error::InvalidParameter("power must be at least 1".into()));
    }
    md_of_superoperator(&superoperator(ch).pow(k), tol)
}

/// The multiplicative domain, cross-checked against the commutant of the
/// *-algebra generated by `{a_i* a_j}`.
pub fn multiplicative_domain(ch: &Channel, tol: &Tolerance) -> Result<OperatorSubspace> {
    require_unital_channel(ch, tol)?;
    let direct = md_of_superoperator(&superoperator(ch), tol)?;
    let via = multiplicative_domain_via_commutant(ch, tol)?;
    let dist = projector_distance(&direct, &via)?;
    if dist > tol.subspace_abs {
        return Err(Error::IllConditioned(format!(
            "multiplicative domain disagrees with the commutant characterization \
             (dims {} vs {}, distance {dist:.3e})",
            direct.dim(),
            via.dim()
        )));
    }
    Ok(direct)
}

/// Commutant of `{a_i* a_j}`; the set is closed under adjoints, so this is
/// the commutant of the *-algebra it generates.
pub fn multiplicative_domain_via_commutant(ch: &Channel, tol: &Tolerance) -> Result<OperatorSubspace> {
    let kraus = ch.kraus();
    let products: Vec<_> = kraus
        .iter()
        .flat_map(|a| kraus.iter().map(move |b| a.adjoint() * b))
        .collect();
    commutant_of(ch.dim(), &products, tol)
}

/// Peripheral eigenvalues of `S`, clustered by angle and sorted by angle in
/// `[0, 2π)`, each with its eigenspace.
pub fn peripheral_of_superoperator(s: &Superoperator, tol: &Tolerance) -> Result<Vec<PeripheralDatum>> {
    let mut on_circle: Vec<C64> = eigenvalues(s.matrix())?
        .into_iter()
        .filter(|z| (z.norm() - 1.0).abs() <= tol.spectral_cluster)
        .collect();
    on_circle.sort_by(|a, b| angle(*a).total_cmp(&angle(*b)));

    let mut clusters: Vec<Vec<C64>> = Vec::new();
    for z in on_circle {
        match clusters.last_mut() {
            Some(c) if angular_distance(*c.last().unwrap(), z) <= ANGLE_MERGE => c.push(z),
            _ => clusters.push(vec![z]),
        }
    }
    if clusters.len() > 1 {
        let first = clusters[0][0];
        let last = *clusters.last().unwrap().last().unwrap();
        if angular_distance(first, last) <= ANGLE_MERGE {
            let tail = clusters.pop().unwrap();
            clusters[0].extend(tail);
        }
    }

    let mut data = Vec::with_capacity(clusters.len());
    for c in clusters {
        let mean: C64 = c.iter().map(|z| z / z.norm()).sum::<C64>() / c.len() as f64;
        let lambda = mean / mean.norm();
        let space = eigenspace(s, lambda, tol)?;
        // Peripheral eigenvalues of a unital channel are semisimple.
        if space.dim() != c.len() {
            return Err(Error::IllConditioned(format!(
                "peripheral eigenvalue at angle {:.6} has algebraic multiplicity {} \
                 but an eigenspace of dimension {}",
                angle(lambda),
                c.len(),
                space.dim()
            )));
        }
        data.push(PeripheralDatum {
            eigenvalue: lambda,
            eigenspace: space,
        });
    }
    Ok(data)
}

pub fn angular_distance(a: C64, b: C64) -> f64 {
    let diff = (angle(a) - angle(b)).abs();
    diff.min(std::f64::consts::TAU - diff)
}

pub fn peripheral_spectrum(ch: &Channel, tol: &Tolerance) -> Result<Vec<PeripheralDatum>> {
    require_unital_channel(ch, tol)?;
    peripheral_of_superoperator(&superoperator(ch), tol)
}

fn span_of(d: usize, data: &[PeripheralDatum], tol: &Tolerance) -> OperatorSubspace {
    let vecs: Vec<_> = data.iter().flat_map(|p| p.eigenspace.basis_vectors()).collect();
    OperatorSubspace::from_orthonormal(d, orthonormalize(&vecs, tol))
}

/// `M_{E^∞}` as the span of all peripheral eigen-operators.
pub fn stabilized_md_via_spectrum(ch: &Channel, tol: &Tolerance) -> Result<OperatorSubspace> {
    let data = peripheral_spectrum(ch, tol)?;
    Ok(span_of(ch.dim(), &data, tol))
}

/// Computes `M_{E^k}` for `k = 1, 2, …` until it reaches the spectral
/// stabilized domain, which must happen by `k = max(1, 2d − 2)`.
///
/// Stabilization is decided by projector distance, never by dimension. A
/// chain that stalls before reaching the spectral answer, fails to be
/// nested, or runs past the cap is reported as ill-conditioned.
pub fn md_chain(ch: &Channel, tol: &Tolerance) -> Result<IndexChain> {
    require_unital_channel(ch, tol)?;
    let d = ch.dim();
    let s = superoperator(ch);
    let spectral = span_of(d, &peripheral_of_superoperator(&s, tol)?, tol);
    let cap = kappa_cap(d);

    let mut domains: Vec<OperatorSubspace> = Vec::new();
    let mut power = s.clone();
    for k in 1..=cap {
        if k > 1 {
            power = power.compose(&s);
        }
        let m = md_of_superoperator(&power, tol)?;
        if let Some(prev) = domains.last() {
            if !contains(prev, &m, tol)? {
                return Err(Error::IllConditioned(format!(
                    "domain of power {k} is not contained in the previous one"
                )));
            }
            if equal(prev, &m, tol)? && !equal(&m, &spectral, tol)? {
                return Err(Error::IllConditioned(format!(
                    "chain stalled at power {} (dim {}) away from the peripheral span (dim {})",
                    k - 1,
                    m.dim(),
                    spectral.dim()
                )));
            }
        }
        let reached = equal(&m, &spectral, tol)?;
        domains.push(m);
        if reached {
            return Ok(IndexChain {
                domains,
                kappa: k,
                stabilized: spectral,
            });
        }
    }
    Err(Error::IllConditioned(format!(
        "chain did not reach the peripheral span within {cap} powers"
    )))
}

pub fn multiplicative_index(ch: &Channel, tol: &Tolerance) -> Result<usize> {
    Ok(md_chain(ch, tol)?.kappa)
}

/// Irreducible ⇔ `Fix(E) = C·1` (for unital trace-preserving maps).
pub fn is_irreducible(ch: &Channel, tol: &Tolerance) -> Result<bool> {
    require_unital_channel(ch, tol)?;
    Ok(crate::algebra::is_trivial(&fixed_points(ch, tol)?, tol))
}

/// Irreducible with peripheral spectrum `{1}`.
pub fn is_primitive(ch: &Channel, tol: &Tolerance) -> Result<bool> {
    if !is_irreducible(ch, tol)? {
        return Ok(false);
    }
    let p = peripheral_spectrum(ch, tol)?;
    Ok(p.len() == 1 && angular_distance(p[0].eigenvalue, C64::new(1.0, 0.0)) <= ANGLE_MERGE)
}

/// A non-trivial projection `p` with `E(p) = p`, if one exists.
///
/// Searched among spectral projections of the Hermitian parts of a basis of
/// `Fix(E)`; for a unital channel those lie in `Fix(E)` and reduce `E`.
pub fn reducing_projection(
    ch: &Channel,
    tol: &Tolerance,
) -> Result<Option<crate::linalg::ComplexMatrix>> {
    let d = ch.dim();
    let fix = fixed_points(ch, tol)?;
    let s = superoperator(ch);
    for b in fix.basis() {
        for h in [&b + b.adjoint(), (&b - b.adjoint()) * C64::new(0.0, 1.0)] {
            let (values, vectors) = crate::linalg::hermitian_eigen(&h)?;
            let spread = values[d - 1] - values[0];
            if spread <= tol.subspace_abs {
                continue;
            }
            let cut = values
                .iter()
                .take_while(|v| **v - values[0] <= 0.5 * spread)
                .count();
            let cols = vectors.columns(0, cut);
            let p = cols * cols.adjoint();
            if (s.apply(&p) - &p).norm() <= tol.subspace_abs * d as f64 {
                return Ok(Some(p));
            }
        }
    }
    Ok(None)
}

/// Whether the given unit-circle values are exactly the `n`-th roots of
/// unity for `n` = their count, up to the angular merge radius.
pub fn is_cyclic_group(values: &[C64]) -> bool {
    let n = values.len();
    if n == 0 {
        return false;
    }
    let mut angles: Vec<f64> = values.iter().map(|z| angle(*z)).collect();
    angles.sort_by(f64::total_cmp);
    angles.iter().enumerate().all(|(k, a)| {
        let expected = std::f64::consts::TAU * k as f64 / n as f64;
        (a - expected).abs() <= ANGLE_MERGE
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ComplexMatrix, ONE};

    fn cycle(d: usize) -> ComplexMatrix {
        let mut u = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            u[((i + 1) % d, i)] = ONE;
        }
        u
    }

    fn unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, j)] = ONE;
        m
    }

    fn dephasing_shift(d: usize) -> Channel {
        Channel::new((0..d).map(|i| unit(d, (i + 1) % d, i)).collect(), "shift").unwrap()
    }

    #[test]
    fn fixed_points_examples() {
        let tol = Tolerance::default();
        assert_eq!(fixed_points(&Channel::identity(3), &tol).unwrap().dim(), 9);
        let u = Channel::unitary(cycle(4), "cycle").unwrap();
        let fix = fixed_points(&u, &tol).unwrap();
        let oracle = commutant_of(4, &[cycle(4)], &tol).unwrap();
        assert_eq!(fix.dim(), 4);
        assert!(equal(&fix, &oracle, &tol).unwrap());
        let fix = fixed_points(&dephasing_shift(3), &tol).unwrap();
        assert!(crate::algebra::is_trivial(&fix, &tol));
    }

    #[test]
    fn rejects_non_unital() {
        let tol = Tolerance::default();
        let damp = Channel::new(vec![unit(2, 0, 0), unit(2, 0, 1)], "damp").unwrap();
        assert!(matches!(
            multiplicative_domain(&damp, &tol),
            Err(Error::NotUnital { .. })
        ));
        assert!(fixed_points(&damp, &tol).is_ok());
    }

    #[test]
    fn unitary_chain_is_trivial() {
        let tol = Tolerance::default();
        let u = Channel::unitary(cycle(3), "cycle").unwrap();
        let chain = md_chain(&u, &tol).unwrap();
        assert_eq!(chain.kappa, 1);
        assert_eq!(chain.dims(), vec![9]);
        assert_eq!(stabilized_md_via_spectrum(&u, &tol).unwrap().dim(), 9);
    }

    #[test]
    fn dephasing_shift_structure() {
        let tol = Tolerance::default();
        for d in [2, 3, 4] {
            let ch = dephasing_shift(d);
            let p = peripheral_spectrum(&ch, &tol).unwrap();
            assert_eq!(p.len(), d);
            assert!(p.iter().all(|x| x.eigenspace.dim() == 1));
            assert!(is_cyclic_group(&p.iter().map(|x| x.eigenvalue).collect::<Vec<_>>()));
            assert!(is_irreducible(&ch, &tol).unwrap());
            assert!(!is_primitive(&ch, &tol).unwrap());
            let md = multiplicative_domain(&ch, &tol).unwrap();
            assert!(equal(&md, &OperatorSubspace::diagonals(d), &tol).unwrap());
            assert_eq!(md_chain(&ch, &tol).unwrap().kappa, 1);
        }
    }

    #[test]
    fn cycle_unitary_peripheral_multiplicities() {
        let tol = Tolerance::default();
        let u = Channel::unitary(cycle(3), "cycle").unwrap();
        let p = peripheral_spectrum(&u, &tol).unwrap();
        assert_eq!(p.len(), 3);
        assert!(p.iter().all(|x| x.eigenspace.dim() == 3));
        assert!(angular_distance(p[0].eigenvalue, C64::new(1.0, 0.0)) < 1e-9);
    }

    #[test]
    fn reducing_projection_found_for_reducible() {
        let tol = Tolerance::default();
        let u = Channel::unitary(cycle(3), "cycle").unwrap();
        let p = reducing_projection(&u, &tol).unwrap().unwrap();
        assert!((&p * &p - &p).norm() < 1e-9);
        let r = p.trace().re;
        assert!(r > 0.5 && r < 2.5);
        assert!(reducing_projection(&dephasing_shift(3), &tol).unwrap().is_none());
    }

    #[test]
    fn cyclic_group_detection() {
        let w = |k: f64, n: f64| C64::from_polar(1.0, std::f64::consts::TAU * k / n);
        assert!(is_cyclic_group(&[w(0.0, 3.0), w(1.0, 3.0), w(2.0, 3.0)]));
        assert!(!is_cyclic_group(&[w(0.0, 3.0), w(1.0, 3.0)]));
        assert!(is_cyclic_group(&[C64::new(1.0, 0.0)]));
    }

    #[test]
    fn kappa_cap_values() {
        assert_eq!(kappa_cap(1), 1);
        assert_eq!(kappa_cap(2), 2);
        assert_eq!(kappa_cap(4), 6);
    }

    #[test]
    fn chain_beyond_128_superoperator_columns() {
        use crate::channel::tensor;
        use crate::gallery::{etb_channel, random_unitary};
        use rand::SeedableRng;

        let tol = Tolerance::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let _ = random_unitary(2, &mut rng);
        let u = Channel::unitary(random_unitary(3, &mut rng), "u").unwrap();
        let e = etb_channel(4, 4, None, &tol).unwrap();
        let chain = md_chain(&tensor(&u, &e), &tol).unwrap();
        assert_eq!(chain.dims(), vec![36, 27, 18, 9]);
    }
}

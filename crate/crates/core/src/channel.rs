//! Channels in Kraus form and their superoperator matrices.
//!
//! A [`Channel`] is just a list of Kraus operators; nothing about the list is
//! canonical. Two channels are the same map exactly when their
//! [`Superoperator`]s agree, and that is how equality is tested throughout.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    identity, is_finite, kron, max_abs, unvectorize, vectorize, ComplexMatrix, Tolerance, C64,
};

/// Kraus materialization limit for [`power`].
pub const MAX_KRAUS: usize = 10_000;

#[derive(Clone, Debug)]
pub struct Channel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
    label: String,
}

/// Result of [`validate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelFlags {
    pub trace_preserving: bool,
    pub unital: bool,
}

impl Channel {
    /// Builds a channel from Kraus operators. Only the shape is checked here;
    /// trace preservation and unitality are reported by [`validate`].
    pub fn new(kraus: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let dim = first.nrows();
        for k in &kraus {
            if k.nrows() != k.ncols() {
                return Err(Error::NotSquare {
                    rows: k.nrows(),
                    cols: k.ncols(),
                });
            }
            if k.nrows() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.nrows(),
                });
            }
            if !is_finite(k) {
                return Err(Error::NonFinite);
            }
        }
        Ok(Channel {
            dim,
            kraus,
            label: label.into(),
        })
    }

    /// Single-Kraus channel `x ↦ u x u*`.
    pub fn unitary(u: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        Channel::new(vec![u], label)
    }

    pub fn identity(dim: usize) -> Self {
        Channel {
            dim,
            kraus: vec![identity(dim)],
            label: format!("identity({dim})"),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Max-entry residual of `Σ a*a − 1`.
    pub fn trace_preservation_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            sum += a.adjoint() * a;
        }
        max_abs(&(sum - identity(self.dim)))
    }

    /// Max-entry residual of `Σ a a* − 1`.
    pub fn unitality_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            sum += a * a.adjoint();
        }
        max_abs(&(sum - identity(self.dim)))
    }

    /// Errors unless the channel is trace preserving within `rank_rel`.
    pub fn require_trace_preserving(&self, tol: &Tolerance) -> Result<()> {
        let residual = self.trace_preservation_residual();
        if residual > tol.rank_rel {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(())
    }

    /// Errors unless the channel is trace preserving and unital.
    pub fn require_unital(&self, tol: &Tolerance) -> Result<()> {
        self.require_trace_preserving(tol)?;
        let residual = self.unitality_residual();
        if residual > tol.rank_rel {
            return Err(Error::NotUnital { residual });
        }
        Ok(())
    }
}

pub fn validate(ch: &Channel, tol: &Tolerance) -> ChannelFlags {
    ChannelFlags {
        trace_preserving: ch.trace_preservation_residual() <= tol.rank_rel,
        unital: ch.unitality_residual() <= tol.rank_rel,
    }
}

/// `Σ a x a*`.
pub fn apply(ch: &Channel, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if x.nrows() != ch.dim || x.ncols() != ch.dim {
        return Err(Error::DimensionMismatch {
            expected: ch.dim,
            found: x.nrows().max(x.ncols()),
        });
    }
    let mut out = ComplexMatrix::zeros(ch.dim, ch.dim);
    for a in &ch.kraus {
        out += a * x * a.adjoint();
    }
    Ok(out)
}

/// Hilbert–Schmidt adjoint, Kraus operators `{a*}`.
pub fn adjoint(ch: &Channel) -> Channel {
    Channel {
        dim: ch.dim,
        kraus: ch.kraus.iter().map(|a| a.adjoint()).collect(),
        label: format!("adjoint({})", ch.label),
    }
}

/// `outer ∘ inner`, Kraus operators `{b a}`.
pub fn compose(outer: &Channel, inner: &Channel) -> Result<Channel> {
    if outer.dim != inner.dim {
        return Err(Error::DimensionMismatch {
            expected: outer.dim,
            found: inner.dim,
        });
    }
    let kraus = outer
        .kraus
        .iter()
        .flat_map(|b| inner.kraus.iter().map(move |a| b * a))
        .collect();
    Ok(Channel {
        dim: outer.dim,
        kraus,
        label: format!("{}∘{}", outer.label, inner.label),
    })
}

/// `a ⊗ b`, Kraus operators `{aᵢ ⊗ bⱼ}`.
pub fn tensor(a: &Channel, b: &Channel) -> Channel {
    let kraus = a
        .kraus
        .iter()
        .flat_map(|x| b.kraus.iter().map(move |y| kron(x, y)))
        .collect();
    Channel {
        dim: a.dim * b.dim,
        kraus,
        label: format!("({})⊗({})", a.label, b.label),
    }
}

/// Convex combination `Σ λᵢ Eᵢ` realized as the Kraus union `{√λᵢ a}`.
pub fn convex_combine(terms: &[(f64, &Channel)]) -> Result<Channel> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| Error::InvalidParameter("convex combination needs at least one term".into()))?;
    let dim = first.dim;
    let mut total = 0.0;
    for (w, ch) in terms {
        if !(w.is_finite() && *w >= 0.0) {
            return Err(Error::InvalidParameter(format!("weight {w} is not a probability")));
        }
        if ch.dim != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: ch.dim,
            });
        }
        total += w;
    }
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "weights sum to {total}, not 1"
        )));
    }
    let mut kraus = Vec::new();
    let mut labels = Vec::new();
    for (w, ch) in terms {
        if *w == 0.0 {
            continue;
        }
        let s = C64::new(w.sqrt(), 0.0);
        kraus.extend(ch.kraus.iter().map(|a| a * s));
        labels.push(format!("{w}·{}", ch.label));
    }
    Ok(Channel {
        dim,
        kraus,
        label: labels.join(" + "),
    })
}

/// `k`-fold composition with materialized Kraus operators.
///
/// Kraus counts grow as `nᵏ`, so this refuses to build more than
/// [`MAX_KRAUS`] operators. Analysis code uses [`Superoperator::pow`] instead.
pub fn power(ch: &Channel, k: usize) -> Result<Channel> {
    if k == 0 {
        return Err(Error::InvalidParameter("channel power must be at least 1".into()));
    }
    let n = ch.kraus.len() as f64;
    if n.powi(k as i32) > MAX_KRAUS as f64 {
        return Err(Error::InvalidParameter(format!(
            "power {k} would materialize {}^{k} Kraus operators (limit {MAX_KRAUS}); use the superoperator",
            ch.kraus.len()
        )));
    }
    let mut out = ch.clone();
    for _ in 1..k {
        out = compose(ch, &out)?;
    }
    out.label = format!("({})^{k}", ch.label);
    Ok(out)
}

/// Matrix of a channel acting on column-major vectorized operators.
#[derive(Clone, Debug)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

/// `Σ conj(a) ⊗ a`, the column-major representation of `x ↦ Σ a x a*`.
pub fn superoperator(ch: &Channel) -> Superoperator {
    let n = ch.dim * ch.dim;
    let mut matrix = ComplexMatrix::zeros(n, n);
    for a in &ch.kraus {
        matrix += kron(&a.map(|z| z.conj()), a);
    }
    Superoperator {
        dim: ch.dim,
        matrix,
    }
}

impl Superoperator {
    pub fn from_matrix(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: matrix.nrows(),
            });
        }
        Ok(Superoperator { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Superoperator {
            dim,
            matrix: identity(dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        unvectorize(&(&self.matrix * vectorize(x)), self.dim)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Superoperator) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: &self.matrix * &inner.matrix,
        }
    }

    /// Superoperator of the Hilbert–Schmidt adjoint channel.
    pub fn adjoint(&self) -> Superoperator {
        Superoperator {
            dim: self.dim,
            matrix: self.matrix.adjoint(),
        }
    }

    /// `k`-th power by repeated squaring; `k = 0` gives the identity map.
    pub fn pow(&self, k: usize) -> Superoperator {
        let mut result = identity(self.matrix.nrows());
        let mut base = self.matrix.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Superoperator {
            dim: self.dim,
            matrix: result,
        }
    }

    /// Frobenius distance between the two matrices.
    pub fn distance(&self, other: &Superoperator) -> f64 {
        (&self.matrix - &other.matrix).norm()
    }
}

/// On-disk channel format: `{"dim": d, "label": ..., "kraus": [[[re, im], ...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChannelFile {
    pub dim: usize,
    pub label: String,
    pub kraus: Vec<Vec<Vec<[f64; 2]>>>,
}

impl From<&Channel> for ChannelFile {
    fn from(ch: &Channel) -> Self {
        ChannelFile {
            dim: ch.dim,
            label: ch.label.clone(),
            kraus: ch
                .kraus
                .iter()
                .map(|a| {
                    (0..a.nrows())
                        .map(|i| (0..a.ncols()).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<ChannelFile> for Channel {
    type Error = Error;

    fn try_from(file: ChannelFile) -> Result<Channel> {
        let mut kraus = Vec::with_capacity(file.kraus.len());
        for rows in &file.kraus {
            if rows.len() != file.dim {
                return Err(Error::DimensionMismatch {
                    expected: file.dim,
                    found: rows.len(),
                });
            }
            let mut m = ComplexMatrix::zeros(file.dim, file.dim);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != file.dim {
                    return Err(Error::DimensionMismatch {
                        expected: file.dim,
                        found: row.len(),
                    });
                }
                for (j, [re, im]) in row.iter().enumerate() {
                    m[(i, j)] = C64::new(*re, *im);
                }
            }
            kraus.push(m);
        }
        Channel::new(kraus, file.label)
    }
}

impl Channel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ChannelFile::from(self))?)
    }

    pub fn to_json_pretty(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ChannelFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Channel> {
        let file: ChannelFile = serde_json::from_str(text)?;
        Channel::try_from(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};

    fn basis_op(d: usize, i: usize, j: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, j)] = ONE;
        m
    }

    fn cycle(d: usize) -> ComplexMatrix {
        let mut u = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            u[((i + 1) % d, i)] = ONE;
        }
        u
    }

    fn probe(d: usize, seed: u64) -> ComplexMatrix {
        // Small deterministic LCG keeps these unit tests free of RNG plumbing.
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ComplexMatrix::from_fn(d, d, |_, _| {
            let mut next = || {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            };
            C64::new(next(), next())
        })
    }

    #[test]
    fn validate_examples() {
        let tol = Tolerance::default();
        let u = cycle(3);
        let flags = validate(&Channel::unitary(u, "u").unwrap(), &tol);
        assert!(flags.trace_preserving && flags.unital);

        let damp = Channel::new(vec![basis_op(2, 0, 0), basis_op(2, 0, 1)], "damp").unwrap();
        let flags = validate(&damp, &tol);
        assert!(flags.trace_preserving);
        assert!(!flags.unital);
    }

    #[test]
    fn constructor_rejects_bad_shapes() {
        assert!(matches!(Channel::new(vec![], "x"), Err(Error::EmptyKraus)));
        let r = Channel::new(vec![identity(2), identity(3)], "x");
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
        let r = Channel::new(vec![ComplexMatrix::zeros(2, 3)], "x");
        assert!(matches!(r, Err(Error::NotSquare { .. })));
    }

    #[test]
    fn apply_examples() {
        let x = probe(3, 1);
        let id = Channel::identity(3);
        assert!((apply(&id, &x).unwrap() - &x).norm() < 1e-15);

        let dephase = Channel::new((0..3).map(|i| basis_op(3, i, i)).collect(), "deph").unwrap();
        let y = apply(&dephase, &x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { x[(i, i)] } else { ZERO };
                assert!((y[(i, j)] - expected).norm() < 1e-15);
            }
        }
        assert!(apply(&id, &identity(2)).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let u = cycle(3);
        let ad = adjoint(&Channel::unitary(u.clone(), "u").unwrap());
        let expected = Channel::unitary(u.adjoint(), "u*").unwrap();
        assert!(superoperator(&ad).distance(&superoperator(&expected)) < 1e-14);

        let dephase = Channel::new((0..3).map(|i| basis_op(3, i, i)).collect(), "deph").unwrap();
        assert!(superoperator(&adjoint(&dephase)).distance(&superoperator(&dephase)) < 1e-14);
    }

    #[test]
    fn compose_and_power_examples() {
        let u = cycle(4);
        let v = probe(4, 9);
        let q = v.qr().q();
        let cu = Channel::unitary(u.clone(), "u").unwrap();
        let cq = Channel::unitary(q.clone(), "q").unwrap();
        let composed = compose(&cu, &cq).unwrap();
        let direct = Channel::unitary(&u * &q, "uq").unwrap();
        assert!(superoperator(&composed).distance(&superoperator(&direct)) < 1e-12);

        let id = Channel::identity(4);
        assert!(superoperator(&compose(&id, &cq).unwrap()).distance(&superoperator(&cq)) < 1e-14);

        assert!(superoperator(&power(&cu, 1).unwrap()).distance(&superoperator(&cu)) < 1e-15);
        let p4 = power(&cu, 4).unwrap();
        assert!(superoperator(&p4).distance(&Superoperator::identity(4)) < 1e-14);
        assert!(superoperator(&cu).pow(4).distance(&Superoperator::identity(4)) < 1e-14);
        assert!(power(&cu, 0).is_err());
    }

    #[test]
    fn power_caps_kraus_materialization() {
        let four = Channel::new(
            (0..4).map(|_| identity(2).scale(0.5)).map(|m| m.map(|z| z)).collect(),
            "x",
        )
        .unwrap();
        assert!(power(&four, 6).is_ok()); // 4096
        assert!(power(&four, 7).is_err()); // 16384
    }

    #[test]
    fn superoperator_matches_apply() {
        let ch = Channel::new(vec![probe(3, 3), probe(3, 4)], "generic").unwrap();
        let s = superoperator(&ch);
        for seed in 10..15 {
            let x = probe(3, seed);
            assert!((s.apply(&x) - apply(&ch, &x).unwrap()).norm() < 1e-12);
        }
        assert!(superoperator(&Channel::identity(3)).distance(&Superoperator::identity(3)) < 1e-15);
        let dephase = Channel::new((0..5).map(|i| basis_op(5, i, i)).collect(), "deph").unwrap();
        assert!((superoperator(&dephase).matrix().trace() - C64::new(5.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn convex_combine_checks_weights() {
        let a = Channel::identity(2);
        let b = Channel::unitary(cycle(2), "x").unwrap();
        assert!(convex_combine(&[(0.5, &a), (0.4, &b)]).is_err());
        assert!(convex_combine(&[(-0.5, &a), (1.5, &b)]).is_err());
        assert!(convex_combine(&[(0.5, &a), (0.5, &Channel::identity(3))]).is_err());
        let one = convex_combine(&[(1.0, &b)]).unwrap();
        assert!(superoperator(&one).distance(&superoperator(&b)) < 1e-15);
        let mix = convex_combine(&[(0.25, &a), (0.75, &b)]).unwrap();
        let expected = superoperator(&a).matrix().scale(0.25) + superoperator(&b).matrix().scale(0.75);
        assert!((superoperator(&mix).into_matrix() - expected).norm() < 1e-14);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let ch = Channel::new(vec![probe(3, 21).scale(0.3), probe(3, 22)], "probe").unwrap();
        let text = ch.to_json().unwrap();
        let back = Channel::from_json(&text).unwrap();
        assert_eq!(back.kraus(), ch.kraus());
        assert_eq!(back.to_json().unwrap(), text);
        assert!(text.starts_with("{\"dim\":3,\"label\":\"probe\",\"kraus\":"));
    }

    #[test]
    fn json_rejects_ragged_matrices() {
        let bad = r#"{"dim":2,"label":"x","kraus":[[[[1,0],[0,0]],[[0,0]]]]}"#;
        assert!(Channel::from_json(bad).is_err());
    }
}

//! Wedderburn types and the decomposition of a unital *-subalgebra of `M_d`
//! into `⊕ M_n ⊗ 1_k` blocks.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{center_unchecked, check_unital_star_algebra, OperatorSubspace};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, orthonormalize, vectorize, ComplexMatrix, Tolerance, C64, ONE};

/// One summand `M_size ⊗ 1_multiplicity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    pub size: usize,
    pub multiplicity: usize,
}

/// Isomorphism class of a *-subalgebra: a multiset of blocks, kept sorted in
/// descending `(size, multiplicity)` order so equality is isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WedderburnType {
    blocks: Vec<Block>,
}

impl WedderburnType {
    pub fn new(blocks: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut blocks: Vec<Block> = blocks
            .into_iter()
            .map(|(size, multiplicity)| Block { size, multiplicity })
            .collect();
        if blocks.is_empty() {
            return Err(Error::InvalidParameter("a type needs at least one block".into()));
        }
        if blocks.iter().any(|b| b.size == 0 || b.multiplicity == 0) {
            return Err(Error::InvalidParameter(
                "block sizes and multiplicities must be positive".into(),
            ));
        }
        blocks.sort_by(|a, b| b.cmp(a));
        Ok(WedderburnType { blocks })
    }

    /// `M_d` itself.
    pub fn full(d: usize) -> Self {
        WedderburnType {
            blocks: vec![Block {
                size: d,
                multiplicity: 1,
            }],
        }
    }

    /// `C·1_d`.
    pub fn scalars(d: usize) -> Self {
        WedderburnType {
            blocks: vec![Block {
                size: 1,
                multiplicity: d,
            }],
        }
    }

    /// The diagonal algebra, `d` copies of `M_1`.
    pub fn diagonal(d: usize) -> Self {
        WedderburnType {
            blocks: vec![
                Block {
                    size: 1,
                    multiplicity: 1,
                };
                d
            ],
        }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.size, b.multiplicity)).collect()
    }

    /// `Σ n·k`, the size of the identity the algebra lives in.
    pub fn unital_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size * b.multiplicity).sum()
    }

    /// Vector-space dimension `Σ n²`.
    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.size * b.size).sum()
    }

    /// `Σ (2n − 1)`, the chain-length potential of the algebra.
    pub fn chi(&self) -> usize {
        self.blocks.iter().map(|b| 2 * b.size - 1).sum()
    }
}

impl fmt::Display for WedderburnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("⊕")?;
            }
            write!(f, "M{}", b.size)?;
            if b.multiplicity > 1 {
                write!(f, "⊗1_{}", b.multiplicity)?;
            }
        }
        Ok(())
    }
}

impl FromStr for WedderburnType {
    type Err = Error;

    /// Parses the [`Display`] form, e.g. `M2⊕M1⊗1_2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse type {s:?}"));
        let mut blocks = Vec::new();
        for part in s.split('⊕') {
            let part = part.trim().strip_prefix('M').ok_or_else(bad)?;
            let (n, k) = match part.split_once("⊗1_") {
                Some((n, k)) => (n, k),
                None => (part, "1"),
            };
            blocks.push((
                n.parse().map_err(|_| bad())?,
                k.parse().map_err(|_| bad())?,
            ));
        }
        WedderburnType::new(blocks)
    }
}

/// One block of a concrete decomposition with its minimal central projection.
#[derive(Clone, Debug)]
pub struct WedderburnBlock {
    pub size: usize,
    pub multiplicity: usize,
    pub projection: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub struct WedderburnDecomposition {
    pub ty: WedderburnType,
    pub blocks: Vec<WedderburnBlock>,
}

const MAX_RESAMPLES: usize = 8;
const MIN_RELATIVE_GAP: f64 = 1e-6;

/// Decomposes a unital *-subalgebra into its Wedderburn blocks.
///
/// Minimal central projections are read off as spectral projections of a
/// random Hermitian element of the center; `seed` drives that draw and the
/// element is redrawn whenever two of its eigenvalue clusters come closer than
/// `1e-6` of the spectral spread.
pub fn wedderburn(a: &OperatorSubspace, tol: &Tolerance, seed: u64) -> Result<WedderburnDecomposition> {
    check_unital_star_algebra(a, tol)?;
    let d = a.ambient_dim();
    let center = center_unchecked(a, tol)?;
    let m = center.dim();
    if m == 0 {
        return Err(Error::IllConditioned("center of a unital algebra came out empty".into()));
    }

    let projections = if m == 1 {
        vec![ComplexMatrix::identity(d, d)]
    } else {
        central_projections(&center, m, tol, seed)?
    };

    let basis = a.basis();
    let mut blocks = Vec::with_capacity(projections.len());
    for p in projections {
        let rank = p.trace().re.round() as usize;
        let compressed: Vec<_> = basis.iter().map(|b| vectorize(&(&p * b * &p))).collect();
        let dim = orthonormalize(&compressed, tol).len();
        let size = (dim as f64).sqrt().round() as usize;
        if size == 0 || (size * size).abs_diff(dim) as f64 > 1e-6 * dim as f64 {
            return Err(Error::IllConditioned(format!(
                "compressed block has dimension {dim}, which is not a perfect square"
            )));
        }
        if !rank.is_multiple_of(size) {
            return Err(Error::IllConditioned(format!(
                "central projection of rank {rank} is not a multiple of block size {size}"
            )));
        }
        blocks.push(WedderburnBlock {
            size,
            multiplicity: rank / size,
            projection: p,
        });
    }
    blocks.sort_by_key(|b| std::cmp::Reverse((b.size, b.multiplicity)));
    let ty = WedderburnType::new(blocks.iter().map(|b| (b.size, b.multiplicity)))?;
    if ty.unital_dim() != d {
        return Err(Error::IllConditioned(format!(
            "blocks {ty} do not fill the identity of M_{d}"
        )));
    }
    Ok(WedderburnDecomposition { ty, blocks })
}

fn central_projections(
    center: &OperatorSubspace,
    m: usize,
    tol: &Tolerance,
    seed: u64,
) -> Result<Vec<ComplexMatrix>> {
    let d = center.ambient_dim();
    let i = C64::new(0.0, 1.0);
    let mut hermitian = Vec::with_capacity(2 * m);
    for c in center.basis() {
        let adj = c.adjoint();
        hermitian.push((&c + &adj).unscale(2.0));
        hermitian.push((&c - &adj) * (-i * 0.5));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RESAMPLES {
        let mut h = ComplexMatrix::zeros(d, d);
        for x in &hermitian {
            let r: f64 = StandardNormal.sample(&mut rng);
            h += x * C64::new(r, 0.0);
        }
        let (values, vectors) = hermitian_eigen(&h)?;
        let spread = values[d - 1] - values[0];
        if spread <= 0.0 {
            continue;
        }
        // Split at the m − 1 widest gaps.
        let mut gaps: Vec<(f64, usize)> = values.windows(2).enumerate().map(|(i, w)| (w[1] - w[0], i + 1)).collect();
        gaps.sort_by(|x, y| y.0.total_cmp(&x.0));
        let (chosen, rest) = gaps.split_at(m - 1);
        let min_chosen = chosen.iter().map(|g| g.0).fold(f64::INFINITY, f64::min);
        let max_rest = rest.iter().map(|g| g.0).fold(0.0, f64::max);
        if min_chosen < MIN_RELATIVE_GAP * spread || max_rest > tol.subspace_abs * spread {
            continue;
        }
        let mut cuts: Vec<usize> = chosen.iter().map(|g| g.1).collect();
        cuts.push(0);
        cuts.push(d);
        cuts.sort_unstable();
        let projections = cuts
            .windows(2)
            .map(|w| {
                let cols = vectors.columns(w[0], w[1] - w[0]);
                cols * cols.adjoint()
            })
            .collect();
        return Ok(projections);
    }
    Err(Error::IllConditioned(format!(
        "could not separate {m} central projections after {MAX_RESAMPLES} draws"
    )))
}

/// Standard block-diagonal embedding of a type into `M_{Σnk}`: block
/// `(n, k)` contributes `{E_ab ⊗ 1_k}`.
pub fn embed_type(ty: &WedderburnType) -> OperatorSubspace {
    let d = ty.unital_dim();
    let mut basis = Vec::with_capacity(ty.algebra_dim());
    let mut offset = 0;
    for b in ty.blocks() {
        let k = b.multiplicity;
        for r in 0..b.size {
            for c in 0..b.size {
                let mut m = ComplexMatrix::zeros(d, d);
                for t in 0..k {
                    m[(offset + r * k + t, offset + c * k + t)] = ONE;
                }
                basis.push(vectorize(&m).unscale((k as f64).sqrt()));
            }
        }
        offset += b.size * k;
    }
    OperatorSubspace::from_orthonormal(d, basis)
}

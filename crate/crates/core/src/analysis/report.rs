use serde::Serialize;

use super::checks::{verdict_for, FactorizationVerdict};
use super::{
    angular_distance, fixed_points, kappa_cap, md_chain, peripheral_of_superoperator,
    require_unital_channel, IndexChain, PeripheralDatum, ANGLE_MERGE,
};
use crate::algebra::{is_trivial, wedderburn, OperatorSubspace};
use crate::channel::{superoperator, validate, Channel, ChannelFlags};
use crate::error::Result;
use crate::linalg::{Tolerance, C64};

/// A subspace reported by its Wedderburn type and dimension.
#[derive(Clone, Debug, Serialize)]
pub struct DomainSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "type")]
    pub ty: String,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeripheralSummary {
    pub re: f64,
    pub im: f64,
    pub dim: usize,
}

/// Everything [`analyze`] learns about a unital channel.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub label: String,
    pub dim: usize,
    pub validation: ChannelFlags,
    pub fixed_points: DomainSummary,
    pub md_chain: Vec<DomainSummary>,
    pub kappa: usize,
    pub kappa_bound: usize,
    pub stabilized: DomainSummary,
    pub peripheral: Vec<PeripheralSummary>,
    pub irreducible: bool,
    pub primitive: bool,
    pub md_trivial: bool,
    pub factorable_possible: bool,
    pub factorization: FactorizationVerdict,
    #[serde(skip)]
    pub fix_space: OperatorSubspace,
    #[serde(skip)]
    pub chain: IndexChain,
    #[serde(skip)]
    pub peripheral_data: Vec<PeripheralDatum>,
}

fn summarize(k: Option<usize>, sub: &OperatorSubspace, tol: &Tolerance, seed: u64) -> Result<DomainSummary> {
    let ty = wedderburn(sub, tol, seed)?.ty.to_string();
    Ok(DomainSummary { k, ty, dim: sub.dim() })
}

/// Full structural analysis of a unital channel. `seed` drives the random
/// central elements used for the Wedderburn types.
pub fn analyze(ch: &Channel, tol: &Tolerance, seed: u64) -> Result<AnalysisReport> {
    require_unital_channel(ch, tol)?;
    let d = ch.dim();
    let validation = validate(ch, tol);
    let fix = fixed_points(ch, tol)?;
    let chain = md_chain(ch, tol)?;
    let peripheral_data = peripheral_of_superoperator(&superoperator(ch), tol)?;

    let fixed_summary = summarize(None, &fix, tol, seed)?;
    let md_summaries = chain
        .domains
        .iter()
        .enumerate()
        .map(|(i, m)| summarize(Some(i + 1), m, tol, seed))
        .collect::<Result<Vec<_>>>()?;
    let stabilized = summarize(None, &chain.stabilized, tol, seed)?;

    let irreducible = is_trivial(&fix, tol);
    let one = C64::new(1.0, 0.0);
    let primitive = irreducible
        && peripheral_data.len() == 1
        && angular_distance(peripheral_data[0].eigenvalue, one) <= ANGLE_MERGE;
    let md_trivial = is_trivial(&chain.domains[0], tol);
    let factorization = verdict_for(d, chain.kappa);

    Ok(AnalysisReport {
        label: ch.label().to_string(),
        dim: d,
        validation,
        fixed_points: fixed_summary,
        md_chain: md_summaries,
        kappa: chain.kappa,
        kappa_bound: kappa_cap(d),
        stabilized,
        peripheral: peripheral_data
            .iter()
            .map(|p| PeripheralSummary {
                re: p.eigenvalue.re,
                im: p.eigenvalue.im,
                dim: p.eigenspace.dim(),
            })
            .collect(),
        irreducible,
        primitive,
        md_trivial,
        factorable_possible: factorization.factorable_possible,
        factorization,
        fix_space: fix,
        chain,
        peripheral_data,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_report() {
        let tol = Tolerance::default();
        let r = analyze(&Channel::identity(3), &tol, 0).unwrap();
        assert_eq!(r.kappa, 1);
        assert_eq!(r.md_chain.len(), 1);
        assert_eq!(r.md_chain[0].ty, "M3");
        assert_eq!(r.fixed_points.dim, 9);
        assert!(!r.irreducible && !r.primitive);
        assert_eq!(r.peripheral.len(), 1);
        assert_eq!(r.peripheral[0].dim, 9);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["md_chain"][0]["type"], "M3");
        assert_eq!(json["kappa"], 1);
    }
}

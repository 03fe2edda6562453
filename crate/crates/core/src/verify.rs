//! Property suites over seeded random and gallery channels, one verdict per
//! case.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{
    adjoint_index_check, check_md_splitting, check_stabilized_splitting, convex_md_check,
    fix_splitting_check, kappa_cap, kappa_tensor_check, md_chain, ucc_tensor_check,
};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::gallery::{
    dephasing_shift_channel, etb_channel, random_unital, schur_cycle_channel,
};
use crate::linalg::Tolerance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    MdSplitting,
    KappaBound,
    KappaTensor,
    FixSplitting,
    ConvexFormula,
    AdjointIndex,
    Ucc,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::MdSplitting,
        Suite::KappaBound,
        Suite::KappaTensor,
        Suite::FixSplitting,
        Suite::ConvexFormula,
        Suite::AdjointIndex,
        Suite::Ucc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::MdSplitting => "md-splitting",
            Suite::KappaBound => "kappa-bound",
            Suite::KappaTensor => "kappa-tensor",
            Suite::FixSplitting => "fix-splitting",
            Suite::ConvexFormula => "convex-formula",
            Suite::AdjointIndex => "adjoint-index",
            Suite::Ucc => "ucc",
        }
    }

    fn default_dims(self) -> &'static str {
        match self {
            Suite::KappaBound | Suite::AdjointIndex => "2..6",
            Suite::ConvexFormula => "2,3",
            _ => "2x2,2x3,3x3",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Random cases per dimension entry.
    pub seeds: usize,
    /// `2x3,3x3`, `2..6` or `2,3,4`; `None` uses the suite default.
    pub dims: Option<String>,
    /// Largest power for the convex-formula suite.
    pub k: usize,
    pub base_seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seeds: 5,
            dims: None,
            k: 3,
            base_seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub suite: Suite,
    pub case: String,
    pub pass: bool,
    pub detail: String,
}

/// Parses a dimension list into entries of one or two dimensions.
pub fn parse_dims(spec: &str) -> Result<Vec<Vec<usize>>> {
    let bad = |s: &str| Error::InvalidParameter(format!("cannot parse dimension entry {s:?}"));
    let num = |s: &str| -> Result<usize> {
        let v: usize = s.trim().parse().map_err(|_| bad(s))?;
        if v == 0 {
            return Err(bad(s));
        }
        Ok(v)
    };
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = item.split_once("..") {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(bad(item));
            }
            out.extend((a..=b).map(|d| vec![d]));
        } else if let Some((a, b)) = item.split_once('x') {
            out.push(vec![num(a)?, num(b)?]);
        } else {
            out.push(vec![num(item)?]);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter("empty dimension list".into()));
    }
    Ok(out)
}

fn pairs(entries: &[Vec<usize>]) -> Vec<(usize, usize)> {
    entries
        .iter()
        .map(|e| (e[0], *e.get(1).unwrap_or(&e[0])))
        .collect()
}

fn singles(entries: &[Vec<usize>]) -> Vec<usize> {
    let mut out: Vec<usize> = entries.iter().flatten().copied().collect();
    out.dedup();
    out
}

/// Gallery channels on `M_d` with the index each one is built to have.
pub fn gallery_at(d: usize, tol: &Tolerance) -> Result<Vec<(Channel, Option<usize>)>> {
    let mut out = Vec::new();
    for r in 1..=d {
        out.push((etb_channel(d, r, None, tol)?, Some(r)));
    }
    if d >= 3 {
        out.push((schur_cycle_channel(d)?, Some(d - 1)));
    }
    if d >= 2 {
        out.push((dephasing_shift_channel(d)?, Some(1)));
    }
    Ok(out)
}

struct Runner {
    suite: Suite,
    results: Vec<CaseResult>,
}

impl Runner {
    fn record(&mut self, case: String, outcome: Result<(bool, String)>) {
        let (pass, detail) = match outcome {
            Ok(x) => x,
            Err(e) => (false, format!("error: {e}")),
        };
        self.results.push(CaseResult {
            suite: self.suite,
            case,
            pass,
            detail,
        });
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions, tol: &Tolerance) -> Result<Vec<CaseResult>> {
    let entries = parse_dims(opts.dims.as_deref().unwrap_or(suite.default_dims()))?;
    let mut run = Runner {
        suite,
        results: Vec::new(),
    };
    let seeds = |i: usize| (0..opts.seeds as u64).map(move |s| opts.base_seed + 1000 * i as u64 + s);

    match suite {
        Suite::MdSplitting | Suite::Ucc => {
            for (i, (d1, d2)) in pairs(&entries).into_iter().enumerate() {
                for s in seeds(i) {
                    let case = format!("{d1}x{d2} seed={s}");
                    let outcome = (|| {
                        let a = random_unital(d1, s)?;
                        let b = random_unital(d2, s.wrapping_mul(31).wrapping_add(7))?;
                        if suite == Suite::Ucc {
                            let c = ucc_tensor_check(&a, &b, tol)?;
                            return Ok((c.equal, format!("distance={:.2e}", c.distance)));
                        }
                        let c = check_md_splitting(&a, &b, tol)?;
                        let st = check_stabilized_splitting(&a, &b, tol)?;
                        Ok((
                            c.equal && st.equal,
                            format!(
                                "dim={} distance={:.2e} stabilized_distance={:.2e}",
                                c.lhs.dim(),
                                c.distance,
                                st.distance
                            ),
                        ))
                    })();
                    run.record(case, outcome);
                }
            }
        }
        Suite::KappaBound => {
            for (i, d) in singles(&entries).into_iter().enumerate() {
                let cap = kappa_cap(d);
                let gallery = gallery_at(d, tol);
                match gallery {
                    Ok(list) => {
                        for (ch, promised) in list {
                            let outcome = md_chain(&ch, tol).map(|c| {
                                let etb_ok = !ch.label().starts_with("etb") || c.kappa <= d;
                                let promise_ok = promised.is_none_or(|p| p == c.kappa);
                                (
                                    c.kappa <= cap && etb_ok && promise_ok,
                                    format!("kappa={} bound={cap}", c.kappa),
                                )
                            });
                            run.record(ch.label().to_string(), outcome);
                        }
                    }
                    Err(e) => run.record(format!("gallery d={d}"), Err(e)),
                }
                for s in seeds(i) {
                    let outcome = random_unital(d, s).and_then(|ch| md_chain(&ch, tol)).map(|c| {
                        (c.kappa <= cap, format!("kappa={} bound={cap}", c.kappa))
                    });
                    run.record(format!("random d={d} seed={s}"), outcome);
                }
            }
        }
        Suite::KappaTensor => {
            for (i, (d1, d2)) in pairs(&entries).into_iter().enumerate() {
                let gallery = (|| Ok::<_, Error>((gallery_at(d1, tol)?, gallery_at(d2, tol)?)))();
                match gallery {
                    Ok((ga, gb)) => {
                        // The channels of highest index on each side, plus identity pairings.
                        let pick = |g: &[(Channel, Option<usize>)]| -> Vec<Channel> {
                            let mut v: Vec<Channel> = g.iter().map(|x| x.0.clone()).collect();
                            v.sort_by_key(|c| std::cmp::Reverse(md_chain(c, tol).map(|x| x.kappa).unwrap_or(0)));
                            v.truncate(2);
                            v
                        };
                        for a in pick(&ga) {
                            for b in pick(&gb) {
                                let outcome = kappa_tensor_check(&a, &b, tol).map(|c| {
                                    (c.equal, format!("kappa={} max={}", c.kappa_product, c.kappa_max))
                                });
                                run.record(format!("{} ⊗ {}", a.label(), b.label()), outcome);
                            }
                        }
                    }
                    Err(e) => run.record(format!("gallery {d1}x{d2}"), Err(e)),
                }
                for s in seeds(i) {
                    let outcome = (|| {
                        let a = random_unital(d1, s)?;
                        let b = random_unital(d2, s + 17)?;
                        let c = kappa_tensor_check(&a, &b, tol)?;
                        Ok((c.equal, format!("kappa={} max={}", c.kappa_product, c.kappa_max)))
                    })();
                    run.record(format!("random {d1}x{d2} seed={s}"), outcome);
                }
            }
        }
        Suite::FixSplitting => {
            for (i, (d1, d2)) in pairs(&entries).into_iter().enumerate() {
                let outcome = (|| {
                    let c = fix_splitting_check(
                        &dephasing_shift_channel(d1)?,
                        &dephasing_shift_channel(d2)?,
                        tol,
                    )?;
                    let gcd_one = gcd(d1, d2) == 1;
                    Ok((
                        c.splits == c.predicted && c.splits == gcd_one,
                        format!("splits={} predicted={} gcd_one={gcd_one}", c.splits, c.predicted),
                    ))
                })();
                run.record(format!("dephasing-shift {d1}x{d2}"), outcome);
                for s in seeds(i) {
                    let outcome = (|| {
                        let c = fix_splitting_check(&random_unital(d1, s)?, &random_unital(d2, s + 5)?, tol)?;
                        Ok((c.splits == c.predicted, format!("splits={} predicted={}", c.splits, c.predicted)))
                    })();
                    run.record(format!("random {d1}x{d2} seed={s}"), outcome);
                }
            }
        }
        Suite::ConvexFormula => {
            for (i, d) in singles(&entries).into_iter().enumerate() {
                for s in seeds(i) {
                    let mut rng = ChaCha8Rng::seed_from_u64(s);
                    let lambda = rng.gen_range(0.1..0.9);
                    for k in 1..=opts.k.max(1) {
                        let outcome = (|| {
                            let a = random_unital(d, s)?;
                            let b = random_unital(d, s + 101)?;
                            let c = convex_md_check(&a, &b, lambda, k, tol)?;
                            Ok((c.equal, format!("dim={} distance={:.2e}", c.direct.dim(), c.distance)))
                        })();
                        run.record(format!("d={d} seed={s} k={k}"), outcome);
                    }
                }
            }
        }
        Suite::AdjointIndex => {
            for (i, d) in singles(&entries).into_iter().enumerate() {
                match gallery_at(d, tol) {
                    Ok(list) => {
                        for (ch, _) in list {
                            let outcome = adjoint_index_check(&ch, tol)
                                .map(|c| (c.equal, format!("kappa={} adjoint={}", c.kappa, c.kappa_adjoint)));
                            run.record(ch.label().to_string(), outcome);
                        }
                    }
                    Err(e) => run.record(format!("gallery d={d}"), Err(e)),
                }
                for s in seeds(i) {
                    let outcome = random_unital(d, s)
                        .and_then(|ch| adjoint_index_check(&ch, tol))
                        .map(|c| (c.equal, format!("kappa={} adjoint={}", c.kappa, c.kappa_adjoint)));
                    run.record(format!("random d={d} seed={s}"), outcome);
                }
            }
        }
    }
    Ok(run.results)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_parse() {
        assert_eq!(parse_dims("2x2,2x3").unwrap(), vec![vec![2, 2], vec![2, 3]]);
        assert_eq!(parse_dims("2..4").unwrap(), vec![vec![2], vec![3], vec![4]]);
        assert_eq!(parse_dims("3").unwrap(), vec![vec![3]]);
        assert!(parse_dims("x").is_err());
        assert!(parse_dims("4..2").is_err());
        assert!(parse_dims("0").is_err());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_suites_pass() {
        let tol = Tolerance::default();
        let opts = VerifyOptions {
            seeds: 2,
            dims: Some("2x2".into()),
            k: 2,
            base_seed: 0,
        };
        for suite in [Suite::MdSplitting, Suite::FixSplitting, Suite::Ucc] {
            let res = run_suite(suite, &opts, &tol).unwrap();
            assert!(!res.is_empty());
            assert!(res.iter().all(|r| r.pass), "{suite}: {res:?}");
        }
    }
}

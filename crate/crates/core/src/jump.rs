//! Jumps, nonjumps, degeneracy, and supersaturation constants.

use std::fmt;
use std::ops::ControlFlow;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GdhError, Result};
use crate::extremal::{extremal_number, SearchConfig};
use crate::graph::{binomial, for_each_embedding, Family, Theory};
use crate::lagrangian::{blowup_density, single_edge_blowup, LagrangianConfig};

fn ratio_string(num: u128, den: u128) -> String {
    let q = Ratio::new(num, den);
    format!("{}/{}", q.numer(), q.denom())
}

/// `r^r`, which stays small for every supported arity.
fn arity_power(theory: &Theory) -> u128 {
    let r = theory.arity() as u128;
    r.pow(r as u32)
}

/// `[0, m/r^r)`: every density in it is a jump.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpInterval {
    pub lower: f64,
    pub upper: f64,
    pub upper_exact: String,
    /// For `r = 2` every density in `[0, 1)` is a jump.
    pub whole_unit_interval: bool,
}

impl fmt::Display for JumpInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}) = [0, {})", self.lower, self.upper, self.upper_exact)
    }
}

pub fn jump_interval(theory: &Theory) -> JumpInterval {
    let m = theory.order() as u128;
    let rr = arity_power(theory);
    JumpInterval {
        lower: 0.0,
        upper: m as f64 / rr as f64,
        upper_exact: ratio_string(m, rr),
        whole_unit_interval: theory.arity() == 2,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonjumpEntry {
    pub k: usize,
    pub value: f64,
    pub exact: String,
}

/// `5·m·k / (2·r^r)` for `k = 1..=r!/m`; known nonjumps when `r ≥ 3`.
pub fn nonjump_catalog(theory: &Theory) -> Result<Vec<NonjumpEntry>> {
    if theory.arity() < 3 {
        return Err(GdhError::InvalidArgument(
            "no nonjump catalog below arity 3: every density in [0, 1) is a jump".into(),
        ));
    }
    let m = theory.order() as u128;
    let den = 2 * arity_power(theory);
    Ok((1..=theory.edges_per_set())
        .map(|k| {
            let num = 5 * m * k as u128;
            NonjumpEntry {
                k,
                value: num as f64 / den as f64,
                exact: ratio_string(num, den),
            }
        })
        .collect())
}

/// `c = (ε/2) / C(l, k)`.
pub fn supersaturation_constant(epsilon: f64, l: u64, k: u64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(GdhError::InvalidArgument(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    if k == 0 || l < k {
        return Err(GdhError::InvalidArgument(format!(
            "need l >= k >= 1, got l = {l}, k = {k}"
        )));
    }
    Ok(epsilon / 2.0 / binomial(l, k) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GapClass {
    AtMostAlpha,
    AtLeastAlphaPlusC,
    /// An upper bound inside `(α, α + c)` says nothing.
    BoundInGap,
    /// An exact density inside `(α, α + c)` rules out the pair.
    Refutation,
}

impl fmt::Display for GapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapClass::AtMostAlpha => "<= alpha",
            GapClass::AtLeastAlphaPlusC => ">= alpha + c",
            GapClass::BoundInGap => "bound in gap (alpha, alpha + c): inconclusive",
            GapClass::Refutation => "inside forbidden gap (alpha, alpha + c): refutes the jump pair",
        })
    }
}

/// Place a density against the gap `(α, α + c)`. `exact` marks `density` as
/// the true Turán density rather than an upper bound.
pub fn gap_check(alpha: f64, c: f64, density: f64, exact: bool) -> GapClass {
    if density <= alpha {
        GapClass::AtMostAlpha
    } else if density >= alpha + c {
        GapClass::AtLeastAlphaPlusC
    } else if exact {
        GapClass::Refutation
    } else {
        GapClass::BoundInGap
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerateWitness {
    pub member: usize,
    /// Per-position clone counts actually used by the embedding.
    pub blowup: Vec<usize>,
}

/// First member that embeds into a balanced blowup of a single edge, trying
/// `t = 1, 2, ..` up to `min(|V_F|, t_cap)`.
pub fn degenerate_witness(fam: &Family, t_cap: usize) -> Result<Option<DegenerateWitness>> {
    if t_cap == 0 {
        return Err(GdhError::InvalidArgument("t_cap must be at least 1".into()));
    }
    let theory = fam.theory();
    let r = theory.arity();
    for (i, f) in fam.members().iter().enumerate() {
        for t in 1..=f.vertex_count().min(t_cap) {
            let host = single_edge_blowup(theory, t)?;
            let mut found = None;
            let _ = for_each_embedding(f, &host, |psi| {
                let mut used = vec![0usize; r];
                for &v in psi {
                    used[v / t] += 1;
                }
                found = Some(used.into_iter().map(|u| u.max(1)).collect());
                ControlFlow::Break(())
            })?;
            if let Some(blowup) = found {
                return Ok(Some(DegenerateWitness { member: i, blowup }));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpCertificate {
    pub alpha: f64,
    pub family: Family,
    pub n_used: usize,
    /// Exact extremal density at `n_used`, or 1 when the search was cut short.
    pub pi_upper: f64,
    pub exhaustive: bool,
    pub member_blowup_lbs: Vec<f64>,
    pub valid: bool,
    pub reason: String,
}

/// Try to certify `alpha` as a jump with `fam`: the extremal density at
/// `n_used` must be at most `alpha` and every member's blowup density above it.
pub fn certify_jump(
    alpha: f64,
    fam: &Family,
    n_used: usize,
    search: &SearchConfig,
    lagrangian: &LagrangianConfig,
) -> Result<JumpCertificate> {
    if fam.is_empty() {
        return Err(GdhError::InvalidArgument("family must be nonempty".into()));
    }
    let res = extremal_number(fam.theory(), n_used, fam, search)?;
    let member_blowup_lbs: Vec<f64> = fam
        .members()
        .par_iter()
        .map(|f| blowup_density(f, lagrangian).map(|r| r.value))
        .collect::<Result<_>>()?;
    let pi_upper = if res.exhaustive { res.density_bound } else { 1.0 };
    let low = member_blowup_lbs
        .iter()
        .position(|&b| b <= alpha);
    let (valid, reason) = if !res.exhaustive {
        (false, format!("search at n = {n_used} exhausted its budget"))
    } else if pi_upper > alpha {
        (false, format!("extremal density {pi_upper} at n = {n_used} exceeds alpha"))
    } else if let Some(i) = low {
        (
            false,
            format!("member {i} has blowup density {} <= alpha", member_blowup_lbs[i]),
        )
    } else {
        (true, "extremal density <= alpha < every member blowup density".into())
    };
    Ok(JumpCertificate {
        alpha,
        family: fam.clone(),
        n_used,
        pi_upper,
        exhaustive: res.exhaustive,
        member_blowup_lbs,
        valid,
        reason,
    })
}

//! Bounds derived from the three-phase argument.
//!
//! Asymptotically every core vertex carries 31/5 + 18·(1/2) against a final 21/5. For a
//! finite core the cap below charges each vertex the most the accounting can leave on it:
//! 21/5 when every tile within reach is complete, otherwise the larger of what it keeps as
//! an I-vertex and what it can collect (plus the 3/10 a T3 takes, spread over at most
//! half a share) as a non-I vertex.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::{q, verify_discharge, DischargeContext, DischargeReport, Q, CORE_WEIGHT, SPINDLE_WEIGHT, TARGET};
use crate::error::Result;
use crate::indsets::{max_weight_is, CoreSets};
use crate::par::Exec;
use crate::udgraph::UDGraph;

pub const ASYMPTOTIC_BOUND: (i64, i64) = (76, 21);

pub(super) fn vertex_caps(g: &UDGraph, full: &[bool], deep: &[bool], degree: &[usize]) -> Vec<Q> {
    (0..full.len())
        .map(|v| {
            let target = q(TARGET.0, TARGET.1);
            if deep[v] {
                return target;
            }
            let kept = q(CORE_WEIGHT.0, CORE_WEIGHT.1) - q(degree[v] as i64, 3);
            // A full non-I vertex has k ∈ {1,2,3} I-neighbors and 2k flanked partners:
            // k/3 + 4k·(1/4) + (12 − 4k)·(1/2), largest at k = 1.
            let collected = if full[v] {
                q(16, 3)
            } else {
                q(degree[v].min(3) as i64, 3) + q(g.incident_spindles(v).len() as i64, 2)
            };
            target.max(kept).max(collected + q(3, 5))
        })
        .collect()
}

/// Sum of the per-vertex caps of G'_d.
pub fn finite_cap(ctx: &DischargeContext) -> Q {
    ctx.total_cap
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub d: u32,
    #[serde(serialize_with = "crate::json::exact")]
    pub total_weight: Q,
    #[serde(serialize_with = "crate::json::exact")]
    pub cap: Q,
    /// `total_weight / cap`, present only when every run passed.
    #[serde(serialize_with = "crate::json::exact")]
    pub finite_bound: Option<Q>,
    #[serde(serialize_with = "crate::json::exact")]
    pub asymptotic: Q,
    /// `31/5 + 18·(1/2)` per core vertex.
    #[serde(serialize_with = "crate::json::exact")]
    pub numerator_per_vertex: Q,
    #[serde(serialize_with = "crate::json::exact")]
    pub denominator_per_vertex: Q,
    pub deep_vertices: usize,
    pub core_vertices: usize,
    pub verification: DischargeReport,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.verification.passed() && self.finite_bound.is_some()
    }
}

/// Verifies the three phases on the requested sets, then reports both bounds. A failed run
/// withholds the finite bound.
pub fn compute_bound(ctx: &DischargeContext, sets: CoreSets, exec: Exec) -> BoundReport {
    let verification = verify_discharge(ctx, sets, exec);
    let numerator = q(CORE_WEIGHT.0, CORE_WEIGHT.1) + q(SPINDLE_WEIGHT.0, SPINDLE_WEIGHT.1) * 18;
    let denominator = q(TARGET.0, TARGET.1);
    BoundReport {
        d: ctx.d,
        total_weight: ctx.total_weight,
        cap: ctx.total_cap,
        finite_bound: verification.passed().then(|| ctx.total_weight / ctx.total_cap),
        asymptotic: numerator / denominator,
        numerator_per_vertex: numerator,
        denominator_per_vertex: denominator,
        deep_vertices: ctx.deep.iter().filter(|&&x| x).count(),
        core_vertices: ctx.core_count,
        verification,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub d: u32,
    /// Maximum weight of an independent set of G'_d under weights 31/5 and 1/2.
    #[serde(serialize_with = "crate::json::exact")]
    pub alpha: BigRational,
    #[serde(serialize_with = "crate::json::exact")]
    pub cap: BigRational,
    /// `W / alpha`: the weight LP value at this fixed weighting, a lower bound on the LP optimum.
    #[serde(serialize_with = "crate::json::exact")]
    pub fixed_weight_bound: BigRational,
    #[serde(serialize_with = "crate::json::exact")]
    pub finite_bound: BigRational,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.alpha <= self.cap && self.fixed_weight_bound >= self.finite_bound
    }
}

fn big(x: Q) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

/// Exact maximum-weight independent set of G'_d, compared with the cap.
pub fn mwis_oracle(ctx: &DischargeContext) -> Result<OracleReport> {
    let g = &ctx.graph;
    let weights: Vec<BigRational> = (0..g.n())
        .map(|v| {
            if g.is_core(v) {
                big(q(CORE_WEIGHT.0, CORE_WEIGHT.1))
            } else {
                big(q(SPINDLE_WEIGHT.0, SPINDLE_WEIGHT.1) * g.vertex(v).multiplicity as i64)
            }
        })
        .collect();
    let (_, alpha) = max_weight_is(g, &weights)?;
    let total = weights.iter().fold(BigRational::zero(), |a, w| a + w);
    debug_assert_eq!(total, big(ctx.total_weight));
    Ok(OracleReport {
        d: ctx.d,
        fixed_weight_bound: &total / &alpha,
        finite_bound: big(ctx.total_weight / ctx.total_cap),
        cap: big(ctx.total_cap),
        alpha,
    })
}

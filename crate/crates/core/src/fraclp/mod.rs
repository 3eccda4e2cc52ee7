//! Exact LPs over maximal independent sets: fractional chromatic numbers and weight-LP
//! lower bounds with orbit reduction.

mod export;
mod orbits;
mod simplex;

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::indsets::{max_weight_is, BitGraph, IndependentSet, Scope};
use crate::par::{self, Exec};
use crate::udgraph::UDGraph;

pub use export::{to_json, to_lp_text};
pub use orbits::{geometric_orbits, OrbitPartition, Symmetry};
pub use simplex::{simplex_solve, verify_solution, LpSolution, PackingLp, RationalLP, Row, Sense};

/// Maximal-set cap used by `fractional_chromatic` when the caller passes none.
pub const DEFAULT_MIS_CAP: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    /// One row per distinct orbit-count vector of a maximal independent set.
    Enumerate { cap: usize },
    /// Row generation through the exact maximum-weight independent set oracle.
    CuttingPlane,
    /// Enumeration up to the default cap, then cutting planes.
    Auto,
}

/// A constraint row class: orbit multiplicities of one maximal set, plus that set.
#[derive(Clone, Debug, Serialize)]
pub struct RowClass {
    pub counts: Vec<(usize, u32)>,
    pub witness: Vec<usize>,
    #[serde(serialize_with = "crate::json::rational")]
    pub dual: BigRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub strategy: Strategy,
    /// Rows with nonzero dual multiplier. `Σ dual·counts ≥ orbit size` for every orbit and
    /// `Σ dual = bound` certify optimality.
    pub rows: Vec<RowClass>,
    pub rows_generated: usize,
    pub pivots: usize,
    /// Heaviest independent set under the returned weights; its weight is at most 1.
    pub max_set: Vec<usize>,
    #[serde(serialize_with = "crate::json::rational")]
    pub max_set_weight: BigRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightLp {
    #[serde(serialize_with = "crate::json::rational")]
    pub bound: BigRational,
    /// Per-vertex weights.
    #[serde(serialize_with = "crate::json::rationals")]
    pub weights: Vec<BigRational>,
    #[serde(serialize_with = "crate::json::rationals")]
    pub orbit_weights: Vec<BigRational>,
    pub certificate: Certificate,
}

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn counts_of(orbits: &OrbitPartition, set: &[usize]) -> Vec<(usize, u32)> {
    let mut m: BTreeMap<usize, u32> = BTreeMap::new();
    for &v in set {
        *m.entry(orbits.orbit_of(v)).or_default() += 1;
    }
    m.into_iter().collect()
}

fn row_coeffs(counts: &[(usize, u32)]) -> Vec<(usize, BigRational)> {
    counts.iter().map(|&(o, c)| (o, int(c as usize))).collect()
}

/// Distinct orbit-count vectors over all maximal independent sets, with one witness each.
/// Fails once more than `cap` maximal sets have been seen.
fn enumerate_rows(
    g: &UDGraph,
    orbits: &OrbitPartition,
    cap: usize,
    exec: Exec,
) -> Result<BTreeMap<Vec<(usize, u32)>, Vec<usize>>> {
    let bg = BitGraph::new(g, Scope::WholeGraph);
    let tasks = bg.mis_tasks(if exec.effective() == Exec::Parallel { 3 } else { 0 });
    let seen = AtomicUsize::new(0);
    let parts = par::map(exec, &tasks, |t| {
        let mut rows: BTreeMap<Vec<(usize, u32)>, Vec<usize>> = BTreeMap::new();
        let mut global = Vec::new();
        bg.run_task(t, |r| {
            if seen.fetch_add(1, Ordering::Relaxed) >= cap {
                return ControlFlow::Break(());
            }
            global.clear();
            global.extend(r.iter().map(|&v| bg.map[v]));
            global.sort_unstable();
            rows.entry(counts_of(orbits, &global)).or_insert_with(|| global.clone());
            ControlFlow::Continue(())
        });
        rows
    });
    let count = seen.load(Ordering::Relaxed);
    if count > cap {
        return Err(Error::RowCap { count, cap });
    }
    let mut all = BTreeMap::new();
    for p in parts {
        for (k, w) in p {
            all.entry(k).or_insert(w);
        }
    }
    Ok(all)
}

/// Greedy maximal extension of an independent set, lowest ids first.
fn extend_to_maximal(g: &UDGraph, set: &[usize]) -> Vec<usize> {
    let mut blocked = vec![false; g.n()];
    let mut out = set.to_vec();
    for &v in set {
        blocked[v] = true;
        for &u in g.neighbors(v) {
            blocked[u] = true;
        }
    }
    for v in 0..g.n() {
        if !blocked[v] {
            out.push(v);
            blocked[v] = true;
            for &u in g.neighbors(v) {
                blocked[u] = true;
            }
        }
    }
    out.sort_unstable();
    out
}

fn expand(orbits: &OrbitPartition, x: &[BigRational]) -> Vec<BigRational> {
    (0..orbits.vertex_count()).map(|v| x[orbits.orbit_of(v)].clone()).collect()
}

fn finish(
    g: &UDGraph,
    orbits: &OrbitPartition,
    strategy: Strategy,
    witnesses: &[(Vec<(usize, u32)>, Vec<usize>)],
    sol: LpSolution,
) -> Result<WeightLp> {
    let weights = expand(orbits, &sol.x);
    let (max_set, max_set_weight) = max_weight_is(g, &weights)?;
    if max_set_weight > BigRational::one() {
        return Err(Error::Invalid("weight LP solution violates an independent set".into()));
    }
    let rows = witnesses
        .iter()
        .zip(&sol.duals)
        .filter(|(_, y)| !y.is_zero())
        .map(|((counts, witness), y)| RowClass {
            counts: counts.clone(),
            witness: witness.clone(),
            dual: y.clone(),
        })
        .collect();
    let out = WeightLp {
        bound: sol.value,
        weights,
        orbit_weights: sol.x,
        certificate: Certificate {
            strategy,
            rows,
            rows_generated: witnesses.len(),
            pivots: sol.pivots,
            max_set: max_set.vertices,
            max_set_weight,
        },
    };
    verify_weight_lp(g, orbits, &out)?;
    Ok(out)
}

/// Maximizes total weight subject to every maximal independent set weighing at most 1, with
/// weights constant on each orbit.
pub fn weight_lp_bound(g: &UDGraph, orbits: &OrbitPartition, strategy: Strategy) -> Result<WeightLp> {
    weight_lp_bound_with(g, orbits, strategy, Exec::default())
}

pub fn weight_lp_bound_with(g: &UDGraph, orbits: &OrbitPartition, strategy: Strategy, exec: Exec) -> Result<WeightLp> {
    if orbits.vertex_count() != g.n() {
        return Err(Error::Invalid("orbit partition does not match the graph".into()));
    }
    orbits.check_group()?;
    match strategy {
        Strategy::Enumerate { cap } => {
            let rows: Vec<_> = enumerate_rows(g, orbits, cap, exec)?.into_iter().collect();
            let mut lp = PackingLp::new(orbits.blocks().iter().map(|b| int(b.len())).collect());
            for (counts, _) in &rows {
                lp.add_row(row_coeffs(counts));
            }
            let sol = lp.solve()?;
            finish(g, orbits, strategy, &rows, sol)
        }
        Strategy::CuttingPlane => cutting_plane(g, orbits),
        Strategy::Auto => match weight_lp_bound_with(g, orbits, Strategy::Enumerate { cap: DEFAULT_MIS_CAP }, exec) {
            Err(Error::RowCap { .. }) => cutting_plane(g, orbits),
            r => r,
        },
    }
}

/// The enumerated weight LP itself (one row per distinct orbit-count vector), for export.
pub fn weight_lp_model(g: &UDGraph, orbits: &OrbitPartition, cap: usize, exec: Exec) -> Result<RationalLP> {
    if orbits.vertex_count() != g.n() {
        return Err(Error::Invalid("orbit partition does not match the graph".into()));
    }
    let mut lp = PackingLp::new(orbits.blocks().iter().map(|b| int(b.len())).collect());
    for (counts, _) in enumerate_rows(g, orbits, cap, exec)? {
        lp.add_row(row_coeffs(&counts));
    }
    Ok(lp.as_lp())
}

fn cutting_plane(g: &UDGraph, orbits: &OrbitPartition) -> Result<WeightLp> {
    let mut lp = PackingLp::new(orbits.blocks().iter().map(|b| int(b.len())).collect());
    let mut rows: Vec<(Vec<(usize, u32)>, Vec<usize>)> = Vec::new();
    let mut have = std::collections::BTreeSet::new();
    let mut add = |lp: &mut PackingLp, rows: &mut Vec<_>, set: Vec<usize>| -> bool {
        let counts = counts_of(orbits, &set);
        if !have.insert(counts.clone()) {
            return false;
        }
        lp.add_row(row_coeffs(&counts));
        rows.push((counts, set));
        true
    };
    // One maximal set through each orbit keeps every variable bounded from the start.
    for b in orbits.blocks() {
        let set = extend_to_maximal(g, &[b[0]]);
        add(&mut lp, &mut rows, set);
    }
    loop {
        let sol = lp.solve()?;
        let weights = expand(orbits, &sol.x);
        let (set, w) = max_weight_is(g, &weights)?;
        if w <= BigRational::one() {
            return finish(g, orbits, Strategy::CuttingPlane, &rows, sol);
        }
        let set = extend_to_maximal(g, &set.vertices);
        if !add(&mut lp, &mut rows, set) {
            return Err(Error::Invalid("separation returned an existing row".into()));
        }
    }
}

/// Re-checks a weight-LP result: the weights respect every independent set (through the
/// exact maximum-weight oracle) and the dual rows certify that no larger total exists.
pub fn verify_weight_lp(g: &UDGraph, orbits: &OrbitPartition, r: &WeightLp) -> Result<()> {
    let bad = |m: &str| Err(Error::Invalid(format!("weight LP certificate: {m}")));
    if r.weights.iter().any(|w| w.is_negative()) {
        return bad("negative weight");
    }
    let total = r.weights.iter().fold(BigRational::zero(), |a, w| a + w);
    if total != r.bound {
        return bad("weights do not sum to the bound");
    }
    let (_, mw) = max_weight_is(g, &r.weights)?;
    if mw != r.certificate.max_set_weight || mw > BigRational::one() {
        return bad("an independent set weighs more than 1");
    }
    let mut cover = vec![BigRational::zero(); orbits.len()];
    let mut ysum = BigRational::zero();
    for row in &r.certificate.rows {
        if row.dual.is_negative() {
            return bad("negative dual");
        }
        let is = IndependentSet::new(row.witness.clone(), Scope::WholeGraph);
        if is.check(g, true).is_err() || counts_of(orbits, &row.witness) != row.counts {
            return bad("witness is not a maximal independent set with the stated counts");
        }
        ysum += &row.dual;
        for &(o, c) in &row.counts {
            cover[o] += &row.dual * int(c as usize);
        }
    }
    if ysum != r.bound {
        return bad("dual total differs from the bound");
    }
    for (o, b) in orbits.blocks().iter().enumerate() {
        if cover[o] < int(b.len()) {
            return bad("dual rows do not cover an orbit");
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverSet {
    pub set: Vec<usize>,
    #[serde(serialize_with = "crate::json::rational")]
    pub weight: BigRational,
}

#[derive(Clone, Debug, Serialize)]
pub struct FractionalChromatic {
    #[serde(serialize_with = "crate::json::rational")]
    pub value: BigRational,
    /// Fractional coloring: maximal independent sets with weights covering every vertex.
    pub cover: Vec<CoverSet>,
    /// Optimal vertex weights of the dual packing problem.
    #[serde(serialize_with = "crate::json::rationals")]
    pub weights: Vec<BigRational>,
}

/// Exact χ_f by enumerating maximal independent sets (at most `cap`, default
/// `DEFAULT_MIS_CAP`).
pub fn fractional_chromatic(g: &UDGraph, cap: Option<usize>) -> Result<FractionalChromatic> {
    let cap = cap.unwrap_or(DEFAULT_MIS_CAP);
    let trivial = OrbitPartition::trivial(g.n());
    let r = weight_lp_bound_with(g, &trivial, Strategy::Enumerate { cap }, Exec::Sequential)?;
    let cover: Vec<_> = r
        .certificate
        .rows
        .iter()
        .map(|row| CoverSet {
            set: row.witness.clone(),
            weight: row.dual.clone(),
        })
        .collect();
    // Covering LP feasibility: every vertex lies in sets of total weight ≥ 1.
    let mut c = vec![BigRational::zero(); g.n()];
    for cs in &cover {
        for &v in &cs.set {
            c[v] += &cs.weight;
        }
    }
    if c.iter().any(|x| *x < BigRational::one()) {
        return Err(Error::Invalid("fractional coloring leaves a vertex uncovered".into()));
    }
    Ok(FractionalChromatic {
        value: r.bound,
        cover,
        weights: r.weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::udgraph::{build_fisher_ullman, build_golomb, build_moser_spindle, build_spindled, Role, SpindleMode};
    use crate::exactnum::{Point, QuadExt};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn small_fractional_chromatic() {
        assert_eq!(fractional_chromatic(&build_moser_spindle(), None).unwrap().value, r(7, 2));
        assert_eq!(fractional_chromatic(&build_golomb(), None).unwrap().value, r(10, 3));
        let k3 = UDGraph::from_points(
            vec![
                Point::origin(),
                Point::new(QuadExt::one(), QuadExt::zero()),
                Point::new(QuadExt::from_ratio(1, 2), QuadExt::from_parts([0, 1, 0, 0], 2)),
            ],
            Role::Core,
        );
        assert_eq!(fractional_chromatic(&k3, None).unwrap().value, r(3, 1));
    }

    #[test]
    fn cap_is_enforced() {
        let g = build_spindled(2, SpindleMode::SixDirections);
        assert!(matches!(fractional_chromatic(&g, Some(10)), Err(Error::RowCap { .. })));
    }

    #[test]
    fn fisher_ullman_orbit_lp_matches_trivial() {
        let g = build_fisher_ullman();
        let orb = weight_lp_bound(&g, &geometric_orbits(&g), Strategy::CuttingPlane).unwrap();
        let triv = weight_lp_bound(&g, &OrbitPartition::trivial(g.n()), Strategy::CuttingPlane).unwrap();
        assert_eq!(orb.bound, triv.bound);
        assert!(orb.bound >= r(32, 9));
    }

    #[test]
    fn strategies_agree_on_golomb() {
        let g = build_golomb();
        let o = geometric_orbits(&g);
        let a = weight_lp_bound(&g, &o, Strategy::Enumerate { cap: 1000 }).unwrap();
        let b = weight_lp_bound(&g, &o, Strategy::CuttingPlane).unwrap();
        assert_eq!(a.bound, b.bound);
        assert_eq!(a.bound, r(10, 3));
    }
}

//! Maximal independent set enumeration, exact weighted maximum independent set,
//! and maximal independent subsets of a lattice core.

use std::ops::ControlFlow;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::udgraph::UDGraph;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    WholeGraph,
    CoreOnly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependentSet {
    /// Sorted vertex ids of the parent graph.
    pub vertices: Vec<usize>,
    pub scope: Scope,
    #[serde(serialize_with = "crate::json::opt_rational")]
    pub weight: Option<BigRational>,
}

impl IndependentSet {
    pub fn new(mut vertices: Vec<usize>, scope: Scope) -> Self {
        vertices.sort_unstable();
        IndependentSet {
            vertices,
            scope,
            weight: None,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Re-checks independence and, if asked, maximality within the scope.
    pub fn check(&self, g: &UDGraph, maximal: bool) -> std::result::Result<(), String> {
        let in_scope = |v: usize| self.scope == Scope::WholeGraph || g.is_core(v);
        let mut member = vec![false; g.n()];
        for &v in &self.vertices {
            if !in_scope(v) {
                return Err(format!("vertex {v} is outside the scope"));
            }
            member[v] = true;
        }
        for &v in &self.vertices {
            if let Some(&u) = g.neighbors(v).iter().find(|&&u| member[u]) {
                return Err(format!("{v} and {u} are adjacent"));
            }
        }
        if maximal {
            for v in (0..g.n()).filter(|&v| in_scope(v) && !member[v]) {
                if !g.neighbors(v).iter().any(|&u| member[u] && in_scope(u)) {
                    return Err(format!("{v} could be added"));
                }
            }
        }
        Ok(())
    }
}

/// Adjacency bitsets on a vertex subset, with local-to-global id map.
#[derive(Clone, Debug)]
pub struct BitGraph {
    pub map: Vec<usize>,
    pub nbrs: Vec<FixedBitSet>,
}

impl BitGraph {
    pub fn new(g: &UDGraph, scope: Scope) -> Self {
        let map: Vec<usize> = match scope {
            Scope::WholeGraph => (0..g.n()).collect(),
            Scope::CoreOnly => g.core_ids().collect(),
        };
        let mut local = vec![usize::MAX; g.n()];
        for (i, &v) in map.iter().enumerate() {
            local[v] = i;
        }
        let nbrs = map
            .iter()
            .map(|&v| {
                let mut b = FixedBitSet::with_capacity(map.len());
                for &u in g.neighbors(v) {
                    if local[u] != usize::MAX {
                        b.insert(local[u]);
                    }
                }
                b
            })
            .collect();
        BitGraph { map, nbrs }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut nbrs = vec![FixedBitSet::with_capacity(n); n];
        for &(u, v) in edges {
            nbrs[u].insert(v);
            nbrs[v].insert(u);
        }
        BitGraph {
            map: (0..n).collect(),
            nbrs,
        }
    }

    pub fn n(&self) -> usize {
        self.map.len()
    }

    fn closed(&self, v: usize) -> FixedBitSet {
        let mut b = self.nbrs[v].clone();
        b.insert(v);
        b
    }
}

/// One subtree of the Bron–Kerbosch recursion.
#[derive(Clone, Debug)]
pub struct MisTask {
    r: Vec<usize>,
    p: FixedBitSet,
    x: FixedBitSet,
}

fn bk(
    g: &BitGraph,
    r: &mut Vec<usize>,
    mut p: FixedBitSet,
    mut x: FixedBitSet,
    emit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if p.is_clear() {
        if x.is_clear() {
            return emit(r);
        }
        return ControlFlow::Continue(());
    }
    let pivot = p
        .ones()
        .chain(x.ones())
        .min_by_key(|&u| p.intersection_count(&g.nbrs[u]) + usize::from(p.contains(u)))
        .expect("P is nonempty");
    let mut branch = g.closed(pivot);
    branch.intersect_with(&p);
    for v in branch.ones() {
        let nv = g.closed(v);
        let mut p2 = p.clone();
        p2.difference_with(&nv);
        let mut x2 = x.clone();
        x2.difference_with(&nv);
        r.push(v);
        bk(g, r, p2, x2, emit)?;
        r.pop();
        p.set(v, false);
        x.insert(v);
    }
    ControlFlow::Continue(())
}

impl BitGraph {
    /// Streams every maximal independent set (local ids, in recursion order).
    pub fn for_each_mis(&self, mut emit: impl FnMut(&[usize]) -> ControlFlow<()>) {
        let mut p = FixedBitSet::with_capacity(self.n());
        p.insert_range(..);
        let x = FixedBitSet::with_capacity(self.n());
        let _ = bk(self, &mut Vec::new(), p, x, &mut emit);
    }

    /// Splits the recursion into independent subtrees, in emission order.
    pub fn mis_tasks(&self, depth: usize) -> Vec<MisTask> {
        let mut p = FixedBitSet::with_capacity(self.n());
        p.insert_range(..);
        let root = MisTask {
            r: Vec::new(),
            p,
            x: FixedBitSet::with_capacity(self.n()),
        };
        let mut level = vec![root];
        for _ in 0..depth {
            let mut next = Vec::new();
            for t in level {
                if t.p.is_clear() {
                    next.push(t);
                    continue;
                }
                let MisTask { r, mut p, mut x } = t;
                let pivot = p
                    .ones()
                    .chain(x.ones())
                    .min_by_key(|&u| p.intersection_count(&self.nbrs[u]) + usize::from(p.contains(u)))
                    .unwrap();
                let mut branch = self.closed(pivot);
                branch.intersect_with(&p);
                for v in branch.ones() {
                    let nv = self.closed(v);
                    let mut p2 = p.clone();
                    p2.difference_with(&nv);
                    let mut x2 = x.clone();
                    x2.difference_with(&nv);
                    let mut r2 = r.clone();
                    r2.push(v);
                    next.push(MisTask { r: r2, p: p2, x: x2 });
                    p.set(v, false);
                    x.insert(v);
                }
            }
            level = next;
        }
        level
    }

    pub fn run_task(&self, t: &MisTask, mut emit: impl FnMut(&[usize]) -> ControlFlow<()>) {
        let mut r = t.r.clone();
        let _ = bk(self, &mut r, t.p.clone(), t.x.clone(), &mut emit);
    }
}

/// Streams maximal independent sets of the scoped graph as sorted global ids.
pub fn enumerate_mis(g: &UDGraph, scope: Scope, mut emit: impl FnMut(IndependentSet) -> ControlFlow<()>) {
    let bg = BitGraph::new(g, scope);
    bg.for_each_mis(|r| emit(IndependentSet::new(r.iter().map(|&i| bg.map[i]).collect(), scope)));
}

pub fn count_mis(g: &UDGraph, scope: Scope, exec: Exec) -> u64 {
    fold_mis(g, scope, exec, 0u64, |acc, _| acc + 1, |a, b| a + b)
}

/// Parallel fold over all maximal independent sets; `combine` must be associative.
pub fn fold_mis<T, F, C>(g: &UDGraph, scope: Scope, exec: Exec, identity: T, fold: F, combine: C) -> T
where
    T: Send + Sync + Clone,
    F: Fn(T, &[usize]) -> T + Sync + Send,
    C: Fn(T, T) -> T + Sync + Send,
{
    let bg = BitGraph::new(g, scope);
    let tasks = bg.mis_tasks(if exec.effective() == Exec::Parallel { 3 } else { 0 });
    par::map_reduce(
        exec,
        tasks.len(),
        identity.clone(),
        |i| {
            let mut acc = Some(identity.clone());
            let mut global = Vec::new();
            bg.run_task(&tasks[i], |r| {
                global.clear();
                global.extend(r.iter().map(|&v| bg.map[v]));
                global.sort_unstable();
                acc = Some(fold(acc.take().unwrap(), &global));
                ControlFlow::Continue(())
            });
            acc.unwrap()
        },
        &combine,
    )
}

/// Scales nonnegative rational weights to integers sharing one denominator.
pub fn scale_weights(weights: &[BigRational]) -> Result<(Vec<u64>, BigInt)> {
    let mut den = BigInt::one();
    for w in weights {
        if w.is_negative() {
            return Err(Error::Invalid("negative weight".into()));
        }
        den = den.lcm(w.denom());
    }
    let ints = weights
        .iter()
        .map(|w| (w.numer() * (&den / w.denom())).to_u64().ok_or(Error::WeightOverflow))
        .collect::<Result<Vec<u64>>>()?;
    if ints.iter().map(|&w| w as u128).sum::<u128>() > u64::MAX as u128 {
        return Err(Error::WeightOverflow);
    }
    Ok((ints, den))
}

struct Mwis<'a> {
    g: &'a BitGraph,
    w: &'a [u64],
}

impl Mwis<'_> {
    /// Greedy clique partition of `p`; each clique contributes its heaviest weight.
    fn cover_bound(&self, p: &FixedBitSet) -> u64 {
        let mut left = p.clone();
        let mut total = 0;
        while let Some(v) = left.ones().max_by_key(|&v| (self.w[v], std::cmp::Reverse(v))) {
            left.set(v, false);
            total += self.w[v];
            let mut cand = self.g.nbrs[v].clone();
            cand.intersect_with(&left);
            while let Some(u) = cand.minimum() {
                left.set(u, false);
                cand.intersect_with(&self.g.nbrs[u]);
            }
        }
        total
    }

    fn components(&self, p: &FixedBitSet) -> Vec<FixedBitSet> {
        let mut left = p.clone();
        let mut out = Vec::new();
        while let Some(s) = left.minimum() {
            let mut comp = FixedBitSet::with_capacity(p.len());
            let mut frontier = comp.clone();
            frontier.insert(s);
            while !frontier.is_clear() {
                comp.union_with(&frontier);
                left.difference_with(&frontier);
                let mut next = FixedBitSet::with_capacity(p.len());
                for v in frontier.ones() {
                    next.union_with(&self.g.nbrs[v]);
                }
                next.intersect_with(&left);
                frontier = next;
            }
            out.push(comp);
        }
        out
    }

    /// Optimum on `p` if it exceeds `lb` (always, when `lb` is `None`).
    fn solve(&self, mut p: FixedBitSet, lb: Option<u64>) -> Option<(u64, Vec<usize>)> {
        let mut base = 0;
        let mut set = Vec::new();
        let free: Vec<usize> = p.ones().filter(|&v| self.g.nbrs[v].is_disjoint(&p)).collect();
        for v in free {
            p.set(v, false);
            base += self.w[v];
            set.push(v);
        }
        // Residual bound for `p` once `have` is already collected; `None` asks for the exact optimum.
        let residual = |lb: Option<u64>, have: u64| lb.and_then(|l| l.checked_sub(have));
        let exceeds = |x: u64, lb: Option<u64>| lb.map_or(true, |l| x > l);
        let lb = residual(lb, base);
        let done = |x: u64, s: Vec<usize>, mut set: Vec<usize>| {
            set.extend(s);
            Some((base + x, set))
        };
        if p.is_clear() {
            return if exceeds(0, lb) { done(0, Vec::new(), set) } else { None };
        }
        if !exceeds(self.cover_bound(&p), lb) {
            return None;
        }
        let comps = self.components(&p);
        if comps.len() > 1 {
            let ubs: Vec<u64> = comps.iter().map(|c| self.cover_bound(c)).collect();
            let mut rest: u64 = ubs.iter().sum();
            let mut total = 0;
            let mut chosen = Vec::new();
            for (c, ub) in comps.into_iter().zip(ubs) {
                rest -= ub;
                // What this component must beat for the whole to beat `lb`.
                let (x, s) = self.solve(c, residual(lb, total + rest))?;
                total += x;
                chosen.extend(s);
            }
            return if exceeds(total, lb) { done(total, chosen, set) } else { None };
        }
        let v = p
            .ones()
            .max_by_key(|&v| {
                let mut n = self.g.nbrs[v].clone();
                n.intersect_with(&p);
                (self.w[v], n.count_ones(..), std::cmp::Reverse(v))
            })
            .unwrap();
        let mut best: Option<(u64, Vec<usize>)> = None;
        let mut with = p.clone();
        with.difference_with(&self.g.nbrs[v]);
        with.set(v, false);
        if let Some((x, mut s)) = self.solve(with, residual(lb, self.w[v])) {
            s.push(v);
            best = Some((x + self.w[v], s));
        }
        let lb2 = match &best {
            Some((x, _)) => Some(lb.map_or(*x, |l| l.max(*x))),
            None => lb,
        };
        p.set(v, false);
        if let Some(r) = self.solve(p, lb2) {
            best = Some(r);
        }
        let (x, s) = best?;
        done(x, s, set)
    }
}

impl BitGraph {
    /// Exact maximum-weight independent set for integer weights (local ids).
    pub fn max_weight_is_int(&self, w: &[u64]) -> (Vec<usize>, u64) {
        let s = Mwis { g: self, w };
        let mut p = FixedBitSet::with_capacity(self.n());
        p.insert_range(..);
        let (best, mut set) = s.solve(p, None).unwrap_or_default();
        set.sort_unstable();
        (set, best)
    }
}

/// Exact maximum-weight independent set of the whole graph.
pub fn max_weight_is(g: &UDGraph, weights: &[BigRational]) -> Result<(IndependentSet, BigRational)> {
    let bg = BitGraph::new(g, Scope::WholeGraph);
    let (ints, den) = scale_weights(weights)?;
    let (set, best) = bg.max_weight_is_int(&ints);
    let value = BigRational::new(BigInt::from(best), den);
    let mut is = IndependentSet::new(set.iter().map(|&i| bg.map[i]).collect(), Scope::WholeGraph);
    is.weight = Some(value.clone());
    Ok((is, value))
}

/// How to draw maximal core sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoreSets {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

/// Randomized greedy completion of the empty set over the core; reproducible per `(seed, index)`.
pub fn sample_maximal_core_set(g: &UDGraph, seed: u64, index: u64) -> Vec<usize> {
    let mut rng = sample_rng(seed, index);
    let mut order: Vec<usize> = g.core_ids().collect();
    order.shuffle(&mut rng);
    let mut blocked = vec![false; g.n()];
    let mut set = Vec::new();
    for v in order {
        if blocked[v] {
            continue;
        }
        set.push(v);
        blocked[v] = true;
        for &u in g.neighbors(v) {
            blocked[u] = true;
        }
    }
    set.sort_unstable();
    set
}

/// Independent RNG stream for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Adds `v` (with no core neighbor in `set`) and drops its spindle neighbors.
pub fn swap_in_core_vertex(g: &UDGraph, set: &[usize], v: usize) -> Vec<usize> {
    let mut out: Vec<usize> = set.iter().copied().filter(|&u| !g.adjacent(u, v)).collect();
    out.push(v);
    out.sort_unstable();
    out
}

pub fn set_weight(g: &UDGraph, set: &[usize]) -> BigRational {
    set.iter().fold(BigRational::zero(), |acc, &v| acc + &g.vertex(v).weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::udgraph::{build_core, build_golomb, build_moser_spindle, UDGraph};
    use crate::exactnum::{Point, QuadExt};
    use crate::udgraph::Role;

    fn brute_mis_count(bg: &BitGraph) -> usize {
        let n = bg.n();
        let adj: Vec<u64> = bg.nbrs.iter().map(|b| b.ones().fold(0u64, |m, i| m | 1 << i)).collect();
        (0u64..1 << n)
            .filter(|&s| {
                (0..n).all(|v| s >> v & 1 == 0 || adj[v] & s == 0)
                    && (0..n).all(|v| s >> v & 1 == 1 || adj[v] & s != 0)
            })
            .count()
    }

    #[test]
    fn triangle() {
        let bg = BitGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let mut out = Vec::new();
        bg.for_each_mis(|r| {
            out.push(r.to_vec());
            ControlFlow::Continue(())
        });
        out.sort();
        assert_eq!(out, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn counts_match_brute_force() {
        for g in [build_core(1), build_core(2), build_moser_spindle(), build_golomb()] {
            let bg = BitGraph::new(&g, Scope::WholeGraph);
            let mut n = 0;
            bg.for_each_mis(|_| {
                n += 1;
                ControlFlow::Continue(())
            });
            assert_eq!(n, brute_mis_count(&bg));
            assert_eq!(count_mis(&g, Scope::WholeGraph, Exec::Parallel), n as u64);
        }
        assert_eq!(count_mis(&build_core(2), Scope::CoreOnly, Exec::Sequential), 139);
    }

    #[test]
    fn independence_numbers() {
        let ones = |g: &UDGraph| vec![BigRational::one(); g.n()];
        let m = build_moser_spindle();
        assert_eq!(max_weight_is(&m, &ones(&m)).unwrap().1, BigRational::from_integer(2.into()));
        // {h1, h3, h5, t0} is independent in the standard embedding.
        let g = build_golomb();
        assert_eq!(max_weight_is(&g, &ones(&g)).unwrap().1, BigRational::from_integer(4.into()));
        let zeros = vec![BigRational::zero(); g.n()];
        assert_eq!(max_weight_is(&g, &zeros).unwrap().1, BigRational::zero());
    }

    #[test]
    fn sampler_is_reproducible_and_maximal() {
        let g = build_core(5);
        let a = sample_maximal_core_set(&g, 9, 3);
        assert_eq!(a, sample_maximal_core_set(&g, 9, 3));
        IndependentSet::new(a, Scope::CoreOnly).check(&g, true).unwrap();
    }

    #[test]
    fn empty_graph_has_one_mis() {
        let g = UDGraph::from_points(vec![Point::new(QuadExt::zero(), QuadExt::zero())], Role::Core);
        assert_eq!(count_mis(&g, Scope::WholeGraph, Exec::Sequential), 1);
    }
}

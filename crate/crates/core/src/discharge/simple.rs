//! The one-phase argument on G_d: core weight 12, spindle-vertex weight 1.
//!
//! (R1) each core vertex in I gives 1 to each core neighbor; (R2) each spindle vertex in I
//! splits its weight over the endpoints of its spindle that are not in I. Every full core
//! vertex must end at most 6, and each falls in one of five cases by how many core
//! neighbors it has in I.

use num_traits::Zero;
use serde::Serialize;

use super::{q, Q};
use crate::indsets::{sample_maximal_core_set, sample_rng, BitGraph, CoreSets, Scope};
use crate::lattice::{LatticePoint, SQRT3, UNIT};
use crate::par::{self, Exec};
use crate::udgraph::{build_spindled, SpindleMode, UDGraph};

/// The five cases, their per-rule arithmetic `(base, core receipts, flanked-spindle
/// receipts, other-spindle receipts)`, and the total each line evaluates to.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SimpleCase {
    pub label: &'static str,
    /// I-neighbors (`None` for a vertex in I).
    pub neighbors_in_i: Option<usize>,
    pub line: &'static str,
}

pub const CASE_LINES: [SimpleCase; 5] = [
    SimpleCase { label: "in I", neighbors_in_i: None, line: "12 - 6(1) + 0" },
    SimpleCase { label: "three I-neighbors", neighbors_in_i: Some(3), line: "0 + 3(1) + 6(1/2)" },
    SimpleCase { label: "two I-neighbors", neighbors_in_i: Some(2), line: "0 + 2(1) + 4(1/2) + 2(1)" },
    SimpleCase { label: "one I-neighbor", neighbors_in_i: Some(1), line: "0 + 1(1) + 2(1/2) + 4(1)" },
    SimpleCase { label: "no I-neighbor", neighbors_in_i: Some(0), line: "0 + 0(1) + 0(1/2) + 6(1)" },
];

impl SimpleCase {
    /// Value of the case line: a vertex with `k` I-neighbors has `2k` spindles flanking
    /// them, each worth at most 1/2, and `6 − 2k` others worth at most 1.
    pub fn total(&self) -> Q {
        match self.neighbors_in_i {
            None => q(12, 1) - q(6, 1),
            Some(k) => {
                let k = k as i64;
                q(k, 1) + q(2 * k, 2) + q(6 - 2 * k, 1)
            }
        }
    }

    fn index(k: Option<usize>) -> usize {
        match k {
            None => 0,
            Some(k) => 4 - k.min(3),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SimpleOutcome {
    /// Full vertices per case.
    pub count: [u64; 5],
    #[serde(serialize_with = "crate::json::exact")]
    pub max_final: [Option<Q>; 5],
    pub violations: Vec<String>,
    /// Largest final charge on any core vertex, full or not.
    #[serde(serialize_with = "crate::json::exact")]
    pub max_any: Option<Q>,
}

impl SimpleOutcome {
    fn merge(mut self, o: SimpleOutcome) -> SimpleOutcome {
        for c in 0..5 {
            self.count[c] += o.count[c];
            self.max_final[c] = super::max_opt(self.max_final[c], o.max_final[c]);
        }
        self.max_any = super::max_opt(self.max_any, o.max_any);
        for v in o.violations {
            if self.violations.len() < 16 {
                self.violations.push(v);
            }
        }
        self
    }
}

/// Spindle on the diamond from `p` toward `p + SQRT3[m]` in G_d.
fn diamond_spindle(g: &UDGraph, p: LatticePoint, m: usize) -> Option<usize> {
    g.spindle_at(p, m).or_else(|| g.spindle_at(p + SQRT3[m], (m + 3) % 6))
}

/// Applies R1 and R2 for the membership vector `in_i` and checks every full core vertex.
pub fn simple_discharge(g: &UDGraph, in_i: &[bool]) -> SimpleOutcome {
    let n = g.n();
    let mut charge = vec![Q::zero(); n];
    let mut out = SimpleOutcome::default();
    for v in 0..n {
        if in_i[v] {
            charge[v] = if g.is_core(v) { q(12, 1) } else { q(g.vertex(v).multiplicity as i64, 1) };
        }
    }
    let initial: Q = charge.iter().fold(Q::zero(), |a, &x| a + x);
    // R1
    for v in g.core_ids() {
        if in_i[v] {
            for &u in g.neighbors(v) {
                if g.is_core(u) {
                    charge[v] -= q(1, 1);
                    charge[u] += q(1, 1);
                }
            }
        }
    }
    // R2, recorded per spindle so receipts can be traced.
    let mut sent = vec![Q::zero(); g.spindles().len()];
    for v in 0..n {
        if g.is_core(v) || !in_i[v] {
            continue;
        }
        for &(s, _) in g.memberships(v) {
            let sp = &g.spindles()[s];
            let ends: Vec<usize> = [sp.bottom, sp.top].into_iter().filter(|&e| !in_i[e]).collect();
            if ends.is_empty() {
                out.violations.push(format!("spindle vertex {v} in I with both diamond ends in I"));
                continue;
            }
            let each = q(1, ends.len() as i64);
            charge[v] -= q(1, 1);
            for e in ends {
                charge[e] += each;
            }
            sent[s] += each;
        }
    }
    let total: Q = charge.iter().fold(Q::zero(), |a, &x| a + x);
    if total != initial {
        out.violations.push(format!("charge not conserved: {initial} -> {total}"));
    }
    for v in 0..n {
        if !g.is_core(v) && !charge[v].is_zero() {
            out.violations.push(format!("spindle vertex {v} keeps {}", charge[v]));
        }
    }
    for v in g.core_ids() {
        out.max_any = super::max_opt(out.max_any, Some(charge[v]));
        let p = g.vertex(v).lattice.unwrap();
        let id = |x: LatticePoint| g.lattice_vertex(x);
        let full = (0..6).all(|k| id(p + UNIT[k]).is_some() && id(p + SQRT3[k]).is_some());
        if !full {
            continue;
        }
        let k = if in_i[v] {
            None
        } else {
            Some((0..6).filter(|&j| in_i[id(p + UNIT[j]).unwrap()]).count())
        };
        let c = SimpleCase::index(k);
        out.count[c] += 1;
        out.max_final[c] = super::max_opt(out.max_final[c], Some(charge[v]));
        let line = CASE_LINES[c].total();
        if charge[v] > line {
            out.violations.push(format!("vertex {:?} ({}) ends with {} > {line}", p, CASE_LINES[c].label, charge[v]));
        }
        if let Some(k) = k {
            // Flanked partners: the two √3-partners next to each I-neighbor.
            let flanked: Vec<usize> = (0..6)
                .filter(|&m| in_i[id(p + UNIT[m]).unwrap()] || in_i[id(p + UNIT[(m + 1) % 6]).unwrap()])
                .collect();
            if flanked.len() != 2 * k.min(3) {
                out.violations.push(format!("vertex {:?}: {} flanked spindles for {k} I-neighbors", p, flanked.len()));
            }
            for m in 0..6 {
                let Some(s) = diamond_spindle(g, p, m) else { continue };
                let w = id(p + SQRT3[m]).unwrap();
                let limit = if flanked.contains(&m) { q(1, 2) } else { q(1, 1) };
                if flanked.contains(&m) && in_i[w] {
                    out.violations.push(format!("vertex {:?}: flanked partner {m} is in I", p));
                }
                // A spindle has at most one vertex in I, so what it sent one end is what v got.
                let got = sent[s];
                if got > limit {
                    out.violations.push(format!("vertex {:?}: spindle {m} gave {got} > {limit}", p));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SimpleReport {
    pub d: u32,
    pub exhaustive: bool,
    pub seed: Option<u64>,
    pub runs: u64,
    pub outcome: SimpleOutcome,
    /// Totals of the five case lines.
    #[serde(serialize_with = "crate::json::exact")]
    pub case_totals: [Q; 5],
    /// `(12 + 9·1) / 6`: per core vertex, 12 on the core and 9 spindle vertices, against 6.
    #[serde(serialize_with = "crate::json::exact")]
    pub bound: Q,
}

impl SimpleReport {
    pub fn passed(&self) -> bool {
        self.runs > 0 && self.outcome.violations.is_empty() && self.case_totals.iter().all(|&t| t == q(6, 1))
    }
}

/// Runs the one-phase argument over all maximal core sets of G_d (or a seeded sample), each
/// completed greedily by spindle vertices.
pub fn verify_simple(d: u32, sets: CoreSets, exec: Exec) -> SimpleReport {
    let g = build_spindled(d, SpindleMode::ThreeDirections);
    let nc = g.core_count();
    let spindle_vertices: Vec<usize> = (0..g.n()).filter(|&v| !g.is_core(v)).collect();
    let seed = match sets {
        CoreSets::Sampled { seed, .. } => seed,
        CoreSets::Exhaustive => 0,
    };
    let run = |set: &[usize], index: u64| -> SimpleOutcome {
        use rand::seq::SliceRandom;
        let mut in_i = vec![false; g.n()];
        let mut blocked = vec![false; g.n()];
        let mut order = spindle_vertices.clone();
        order.shuffle(&mut sample_rng(seed, index.wrapping_add(1 << 40)));
        for &v in set.iter().chain(order.iter()) {
            if !blocked[v] && !in_i[v] {
                in_i[v] = true;
                g.neighbors(v).iter().for_each(|&u| blocked[u] = true);
            }
        }
        debug_assert!((0..nc).all(|v| in_i[v] == set.contains(&v)));
        simple_discharge(&g, &in_i)
    };
    let (runs, outcome) = match sets {
        CoreSets::Exhaustive => {
            let bg = BitGraph::new(&g, Scope::CoreOnly);
            let tasks = bg.mis_tasks(if exec.effective() == Exec::Parallel { 3 } else { 0 });
            par::map_reduce(
                exec,
                tasks.len(),
                (0u64, SimpleOutcome::default()),
                |t| {
                    let mut acc = (0u64, SimpleOutcome::default());
                    bg.run_task(&tasks[t], |r| {
                        let set: Vec<usize> = r.iter().map(|&i| bg.map[i]).collect();
                        let index = super::mix(0, &set);
                        acc = (acc.0 + 1, std::mem::take(&mut acc.1).merge(run(&set, index)));
                        std::ops::ControlFlow::Continue(())
                    });
                    acc
                },
                |a, b| (a.0 + b.0, a.1.merge(b.1)),
            )
        }
        CoreSets::Sampled { samples, seed } => par::map_reduce(
            exec,
            samples,
            (0u64, SimpleOutcome::default()),
            |i| (1, run(&sample_maximal_core_set(&g, seed, i as u64), i as u64)),
            |a, b| (a.0 + b.0, a.1.merge(b.1)),
        ),
    };
    SimpleReport {
        d,
        exhaustive: sets == CoreSets::Exhaustive,
        seed: match sets {
            CoreSets::Sampled { seed, .. } => Some(seed),
            CoreSets::Exhaustive => None,
        },
        runs,
        outcome,
        case_totals: CASE_LINES.map(|c| c.total()),
        bound: (q(12, 1) + q(9, 1)) / q(6, 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_lines_total_six() {
        for c in CASE_LINES {
            assert_eq!(c.total(), q(6, 1), "{}", c.label);
        }
        assert_eq!(SimpleCase::index(None), 0);
        assert_eq!(SimpleCase::index(Some(3)), 1);
        assert_eq!(SimpleCase::index(Some(0)), 4);
    }

    #[test]
    fn small_core_sample() {
        let r = verify_simple(4, CoreSets::Sampled { samples: 50, seed: 1 }, Exec::Sequential);
        assert!(r.passed(), "{:?}", r.outcome.violations);
        assert_eq!(r.bound, q(7, 2));
        assert!(r.outcome.count[0] > 0);
        assert_eq!(r.outcome.max_final[0], Some(q(6, 1)));
    }
}

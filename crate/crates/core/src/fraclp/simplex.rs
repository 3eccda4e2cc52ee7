//! Dense exact simplex with Bland's rule.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub coeffs: Vec<(usize, BigRational)>,
    pub sense: Sense,
    pub rhs: BigRational,
}

/// `maximize objective·x` subject to `rows`, `0 ≤ x ≤ upper`.
#[derive(Clone, Debug, Default)]
pub struct RationalLP {
    pub names: Vec<String>,
    pub objective: Vec<BigRational>,
    pub upper: Vec<Option<BigRational>>,
    pub rows: Vec<Row>,
}

impl RationalLP {
    pub fn new(objective: Vec<BigRational>) -> Self {
        let n = objective.len();
        RationalLP {
            names: (0..n).map(|i| format!("x{i}")).collect(),
            objective,
            upper: vec![None; n],
            rows: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, BigRational)>, sense: Sense, rhs: BigRational) {
        assert!(coeffs.iter().all(|&(j, _)| j < self.n()));
        self.rows.push(Row { coeffs, sense, rhs });
    }

    /// Rows plus upper bounds as `≤` rows.
    fn all_rows(&self) -> Vec<Row> {
        let mut rows = self.rows.clone();
        for (j, u) in self.upper.iter().enumerate() {
            if let Some(u) = u {
                rows.push(Row {
                    coeffs: vec![(j, BigRational::one())],
                    sense: Sense::Le,
                    rhs: u.clone(),
                });
            }
        }
        rows
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: BigRational,
    pub x: Vec<BigRational>,
    /// One multiplier per row, then one per finite upper bound.
    pub duals: Vec<BigRational>,
    pub pivots: usize,
}

/// Degenerate pivots in a row before pricing falls back to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

/// A fraction-free row: actual entries are `num[j] / den` and `rhs / den`, with `den > 0`.
#[derive(Clone, Debug)]
pub(crate) struct IRow {
    num: Vec<BigInt>,
    rhs: BigInt,
    den: BigInt,
}

impl IRow {
    fn from_rationals(vals: &[BigRational], rhs: &BigRational) -> IRow {
        let den = vals
            .iter()
            .chain(std::iter::once(rhs))
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let scale = |v: &BigRational| v.numer() * (&den / v.denom());
        IRow {
            num: vals.iter().map(scale).collect(),
            rhs: scale(rhs),
            den,
        }
    }

    fn get(&self, j: usize) -> BigRational {
        BigRational::new(self.num[j].clone(), self.den.clone())
    }

    fn rhs(&self) -> BigRational {
        BigRational::new(self.rhs.clone(), self.den.clone())
    }

    fn reduce(&mut self) {
        let mut g = self.den.gcd(&self.rhs);
        for v in &self.num {
            if g.is_one() {
                return;
            }
            if !v.is_zero() {
                g = g.gcd(v);
            }
        }
        if g.is_one() {
            return;
        }
        for v in self.num.iter_mut().filter(|v| !v.is_zero()) {
            *v /= &g;
        }
        self.rhs /= &g;
        self.den /= &g;
    }

    /// Subtracts `self[c]` times `src`, where `src` has actual entry 1 in column `c`.
    fn eliminate(&mut self, src: &IRow, c: usize, src_nz: &[usize]) {
        let f = self.num[c].clone();
        if f.is_zero() {
            return;
        }
        let p = &src.den;
        if !p.is_one() {
            for v in self.num.iter_mut().filter(|v| !v.is_zero()) {
                *v *= p;
            }
            self.rhs *= p;
            self.den *= p;
        }
        for &j in src_nz {
            self.num[j] -= &f * &src.num[j];
        }
        self.rhs -= &f * &src.rhs;
        self.reduce();
    }
}

/// `a/b < c/d` for positive `b` and `d`.
fn frac_lt(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> bool {
    a * d < c * b
}

/// Dense simplex tableau over fraction-free rows. The objective row holds reduced costs
/// `d_j` and, in its right-hand side, minus the current objective value.
#[derive(Clone, Debug)]
pub(crate) struct Tableau {
    rows: Vec<IRow>,
    obj: IRow,
    pub basis: Vec<usize>,
    pub cost: Vec<BigRational>,
    pub allowed: Vec<bool>,
    pub pivots: usize,
}

impl Tableau {
    fn new(rows: Vec<IRow>, basis: Vec<usize>, cost: Vec<BigRational>) -> Self {
        let cols = cost.len();
        let mut t = Tableau {
            rows,
            obj: IRow {
                num: vec![BigInt::zero(); cols],
                rhs: BigInt::zero(),
                den: BigInt::one(),
            },
            basis,
            allowed: vec![true; cols],
            cost,
            pivots: 0,
        };
        t.price();
        t
    }

    pub fn cols(&self) -> usize {
        self.cost.len()
    }

    pub fn d(&self, j: usize) -> BigRational {
        self.obj.get(j)
    }

    /// Recomputes reduced costs for the current `cost`.
    pub fn price(&mut self) {
        let mut d = self.cost.clone();
        let mut z = BigRational::zero();
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            let cb = &self.cost[bv];
            if cb.is_zero() {
                continue;
            }
            for (j, dj) in d.iter_mut().enumerate() {
                if !row.num[j].is_zero() {
                    *dj -= cb * row.get(j);
                }
            }
            z -= cb * row.rhs();
        }
        self.obj = IRow::from_rationals(&d, &z);
    }

    pub fn objective(&self) -> BigRational {
        -self.obj.rhs()
    }

    pub fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        {
            let row = &mut self.rows[r];
            let mut p = row.num[c].clone();
            if p.is_negative() {
                for v in row.num.iter_mut() {
                    *v = -&*v;
                }
                row.rhs = -&row.rhs;
                p = -p;
            }
            row.den = p;
            row.reduce();
        }
        let src = self.rows[r].clone();
        let nz: Vec<usize> = (0..src.num.len()).filter(|&j| !src.num[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                row.eliminate(&src, c, &nz);
            }
        }
        self.obj.eliminate(&src, c, &nz);
        self.basis[r] = c;
    }

    /// Primal simplex to optimality; `Err(Unbounded)` if the objective is unbounded.
    ///
    /// Prices by largest reduced cost and switches to Bland's rule after a run of
    /// degenerate pivots, which rules out cycling.
    pub fn primal(&mut self) -> Result<()> {
        let mut degenerate = 0usize;
        loop {
            let bland = degenerate >= DEGENERATE_STREAK;
            let d = &self.obj.num;
            let candidates = (0..self.cols()).filter(|&j| self.allowed[j] && d[j].is_positive());
            let c = if bland {
                candidates.min()
            } else {
                candidates.max_by(|&i, &j| d[i].cmp(&d[j]).then(j.cmp(&i)))
            };
            let Some(c) = c else {
                return Ok(());
            };
            // Row denominators cancel in the ratio rhs_i / a_ic.
            let mut best: Option<usize> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row.num[c].is_positive() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(b) => {
                        let o = &self.rows[b];
                        let lhs = &row.rhs * &o.num[c];
                        let rhs = &o.rhs * &row.num[c];
                        lhs < rhs || (lhs == rhs && self.basis[i] < self.basis[b])
                    }
                };
                if better {
                    best = Some(i);
                }
            }
            let Some(r) = best else {
                return Err(Error::Unbounded);
            };
            degenerate = if self.rows[r].rhs.is_zero() { degenerate + 1 } else { 0 };
            self.pivot(r, c);
        }
    }

    /// Dual simplex from a dual-feasible basis; `Err(Infeasible)` if no feasible point exists.
    pub fn dual(&mut self) -> Result<()> {
        let mut degenerate = 0usize;
        loop {
            let bland = degenerate >= DEGENERATE_STREAK;
            let neg = (0..self.rows.len()).filter(|&i| self.rows[i].rhs.is_negative());
            let r = if bland {
                neg.min_by_key(|&i| self.basis[i])
            } else {
                neg.min_by(|&i, &k| {
                    let (a, b) = (&self.rows[i], &self.rows[k]);
                    (&a.rhs * &b.den).cmp(&(&b.rhs * &a.den)).then(self.basis[i].cmp(&self.basis[k]))
                })
            };
            let Some(r) = r else {
                return Ok(());
            };
            // Minimize d_j / a_rj over a_rj < 0; both denominators are common to all j.
            let row = &self.rows[r];
            let mut best: Option<usize> = None;
            for j in 0..self.cols() {
                if !self.allowed[j] || !row.num[j].is_negative() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some(b) => {
                        let (nj, nb) = (-&row.num[j], -&row.num[b]);
                        frac_lt(&-&self.obj.num[j], &nj, &-&self.obj.num[b], &nb)
                    }
                };
                if better {
                    best = Some(j);
                }
            }
            let Some(c) = best else {
                return Err(Error::Infeasible);
            };
            degenerate = if self.obj.num[c].is_zero() { degenerate + 1 } else { 0 };
            self.pivot(r, c);
        }
    }

    pub fn primal_values(&self, n: usize) -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); n];
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            if bv < n {
                x[bv] = row.rhs();
            }
        }
        x
    }

    /// Appends a column of zeros with cost 0.
    fn push_column(&mut self) {
        for row in &mut self.rows {
            row.num.push(BigInt::zero());
        }
        self.obj.num.push(BigInt::zero());
        self.cost.push(BigRational::zero());
        self.allowed.push(true);
    }

    /// Appends a row given in original coordinates, with basic variable `basic`.
    fn push_row(&mut self, vals: &[BigRational], rhs: &BigRational, basic: usize) {
        let mut row = IRow::from_rationals(vals, rhs);
        for (i, &bv) in self.basis.iter().enumerate() {
            let src = &self.rows[i];
            if row.num[bv].is_zero() {
                continue;
            }
            let nz: Vec<usize> = (0..src.num.len()).filter(|&j| !src.num[j].is_zero()).collect();
            row.eliminate(src, bv, &nz);
        }
        self.rows.push(row);
        self.basis.push(basic);
    }

    fn any_negative_rhs(&self) -> bool {
        self.rows.iter().any(|r| r.rhs.is_negative())
    }

    fn nonzero(&self, i: usize, j: usize) -> bool {
        !self.rows[i].num[j].is_zero()
    }
}

/// Two-phase simplex; the result is re-verified exactly (primal and dual feasibility, equal objectives).
pub fn simplex_solve(lp: &RationalLP) -> Result<LpSolution> {
    let n = lp.n();
    let rows = lp.all_rows();
    let m = rows.len();
    // Normalize to nonnegative right-hand sides.
    let mut flip = vec![false; m];
    let mut senses = Vec::with_capacity(m);
    for (i, r) in rows.iter().enumerate() {
        flip[i] = r.rhs.is_negative();
        senses.push(match (r.sense, flip[i]) {
            (Sense::Le, true) => Sense::Ge,
            (Sense::Ge, true) => Sense::Le,
            (s, _) => s,
        });
    }
    let slack_of: Vec<Option<usize>> = {
        let mut next = n;
        senses
            .iter()
            .map(|s| {
                (*s != Sense::Eq).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let n_slack = slack_of.iter().flatten().count();
    let art_of: Vec<Option<usize>> = {
        let mut next = n + n_slack;
        senses
            .iter()
            .map(|s| {
                (*s != Sense::Le).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let cols = n + n_slack + art_of.iter().flatten().count();
    let mut trows = Vec::with_capacity(m);
    let mut basis = vec![0; m];
    for (i, r) in rows.iter().enumerate() {
        let s = if flip[i] { -BigRational::one() } else { BigRational::one() };
        let mut a = vec![BigRational::zero(); cols];
        for (j, v) in &r.coeffs {
            a[*j] += v * &s;
        }
        if let Some(sc) = slack_of[i] {
            a[sc] = if senses[i] == Sense::Le { BigRational::one() } else { -BigRational::one() };
        }
        if let Some(ac) = art_of[i] {
            a[ac] = BigRational::one();
            basis[i] = ac;
        } else {
            basis[i] = slack_of[i].unwrap();
        }
        trows.push(IRow::from_rationals(&a, &(&r.rhs * &s)));
    }
    let is_art = |j: usize| j >= n + n_slack;
    let mut t = Tableau::new(
        trows,
        basis,
        (0..cols)
            .map(|j| if is_art(j) { -BigRational::one() } else { BigRational::zero() })
            .collect(),
    );
    if cols > n + n_slack {
        t.primal()?;
        if t.objective().is_negative() {
            return Err(Error::Infeasible);
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if is_art(t.basis[i]) {
                if let Some(c) = (0..n + n_slack).find(|&j| t.nonzero(i, j)) {
                    t.pivot(i, c);
                }
            }
        }
        for j in n + n_slack..cols {
            t.allowed[j] = false;
        }
    }
    t.cost = (0..cols)
        .map(|j| if j < n { lp.objective[j].clone() } else { BigRational::zero() })
        .collect();
    t.price();
    t.primal()?;
    let x = t.primal_values(n);
    // The normalized row i has identity column slack (≤) or artificial; its reduced cost is −y.
    let duals: Vec<BigRational> = (0..m)
        .map(|i| {
            let id = if senses[i] == Sense::Le { slack_of[i].unwrap() } else { art_of[i].unwrap() };
            let y = -t.d(id);
            if flip[i] {
                -y
            } else {
                y
            }
        })
        .collect();
    let value = t.objective();
    let sol = LpSolution {
        value,
        x,
        duals,
        pivots: t.pivots,
    };
    verify_solution(lp, &sol)?;
    Ok(sol)
}

/// Exact primal feasibility, dual feasibility, and strong duality.
pub fn verify_solution(lp: &RationalLP, sol: &LpSolution) -> Result<()> {
    let rows = lp.all_rows();
    let bad = |what: &str| Err(Error::Invalid(format!("simplex certificate check failed: {what}")));
    if sol.x.iter().any(|v| v.is_negative()) {
        return bad("negative primal value");
    }
    for r in &rows {
        let lhs = r.coeffs.iter().fold(BigRational::zero(), |acc, (j, v)| acc + v * &sol.x[*j]);
        let ok = match r.sense {
            Sense::Le => lhs <= r.rhs,
            Sense::Ge => lhs >= r.rhs,
            Sense::Eq => lhs == r.rhs,
        };
        if !ok {
            return bad("primal row violated");
        }
    }
    let mut aty = vec![BigRational::zero(); lp.n()];
    for (r, y) in rows.iter().zip(&sol.duals) {
        let sign_ok = match r.sense {
            Sense::Le => !y.is_negative(),
            Sense::Ge => !y.is_positive(),
            Sense::Eq => true,
        };
        if !sign_ok {
            return bad("dual sign");
        }
        for (j, v) in &r.coeffs {
            aty[*j] += v * y;
        }
    }
    if aty.iter().zip(&lp.objective).any(|(l, c)| l < c) {
        return bad("dual row violated");
    }
    let primal = lp.objective.iter().zip(&sol.x).fold(BigRational::zero(), |acc, (c, x)| acc + c * x);
    let dual = rows.iter().zip(&sol.duals).fold(BigRational::zero(), |acc, (r, y)| acc + &r.rhs * y);
    if primal != dual || primal != sol.value {
        return bad("duality gap");
    }
    Ok(())
}

/// `max c·x, A x ≤ 1, x ≥ 0` with rows added over time and dual-simplex reoptimization.
#[derive(Clone, Debug)]
pub struct PackingLp {
    n: usize,
    t: Tableau,
    rows: Vec<Vec<(usize, BigRational)>>,
    objective: Vec<BigRational>,
}

impl PackingLp {
    pub fn new(objective: Vec<BigRational>) -> Self {
        let n = objective.len();
        PackingLp {
            n,
            t: Tableau::new(Vec::new(), Vec::new(), objective.clone()),
            rows: Vec::new(),
            objective,
        }
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> usize {
        self.t.pivots
    }

    /// Appends `coeffs·x ≤ 1` expressed in the current basis.
    pub fn add_row(&mut self, coeffs: Vec<(usize, BigRational)>) {
        let slack = self.t.cols();
        self.t.push_column();
        let mut row = vec![BigRational::zero(); slack + 1];
        for (j, v) in &coeffs {
            row[*j] += v;
        }
        row[slack] = BigRational::one();
        self.t.push_row(&row, &BigRational::one(), slack);
        self.rows.push(coeffs);
    }

    /// Reoptimizes. The first call runs the primal method; later calls the dual one.
    pub fn solve(&mut self) -> Result<LpSolution> {
        if self.t.any_negative_rhs() {
            self.t.dual()?;
        }
        self.t.primal()?;
        let x = self.t.primal_values(self.n);
        let duals: Vec<BigRational> = (0..self.rows.len()).map(|i| -self.t.d(self.n + i)).collect();
        let value = self.t.objective();
        let sol = LpSolution {
            value,
            x,
            duals,
            pivots: self.t.pivots,
        };
        verify_solution(&self.as_lp(), &sol)?;
        Ok(sol)
    }

    pub fn as_lp(&self) -> RationalLP {
        let mut lp = RationalLP::new(self.objective.clone());
        for r in &self.rows {
            lp.add_row(r.clone(), Sense::Le, BigRational::one());
        }
        lp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn single_bound() {
        let mut lp = RationalLP::new(vec![r(1, 1)]);
        lp.add_row(vec![(0, r(1, 1))], Sense::Le, r(3, 2));
        assert_eq!(simplex_solve(&lp).unwrap().value, r(3, 2));
    }

    #[test]
    fn mixed_senses() {
        // max x + y, x + 2y ≤ 4, x − y ≥ −1, x = 2 → y = 1, value 3.
        let mut lp = RationalLP::new(vec![r(1, 1), r(1, 1)]);
        lp.add_row(vec![(0, r(1, 1)), (1, r(2, 1))], Sense::Le, r(4, 1));
        lp.add_row(vec![(0, r(1, 1)), (1, r(-1, 1))], Sense::Ge, r(-1, 1));
        lp.add_row(vec![(0, r(1, 1))], Sense::Eq, r(2, 1));
        let s = simplex_solve(&lp).unwrap();
        assert_eq!(s.value, r(3, 1));
        assert_eq!(s.x, vec![r(2, 1), r(1, 1)]);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = RationalLP::new(vec![r(1, 1)]);
        lp.add_row(vec![(0, r(1, 1))], Sense::Ge, r(2, 1));
        assert!(matches!(simplex_solve(&lp), Err(Error::Unbounded)));
        lp.add_row(vec![(0, r(1, 1))], Sense::Le, r(1, 1));
        assert!(matches!(simplex_solve(&lp), Err(Error::Infeasible)));
    }

    #[test]
    fn degenerate_redundant_rows_terminate() {
        let mut lp = RationalLP::new(vec![r(1, 1), r(1, 1), r(1, 1)]);
        for _ in 0..3 {
            lp.add_row(vec![(0, r(1, 1)), (1, r(1, 1))], Sense::Le, r(0, 1));
            lp.add_row(vec![(1, r(1, 1)), (2, r(1, 1))], Sense::Le, r(1, 1));
        }
        lp.add_row(vec![(0, r(1, 1)), (2, r(1, 1))], Sense::Eq, r(1, 1));
        assert_eq!(simplex_solve(&lp).unwrap().value, r(1, 1));
    }

    #[test]
    fn packing_matches_two_phase() {
        let rows = [vec![2, 3], vec![0, 1], vec![1, 2], vec![0, 2]];
        let mut p = PackingLp::new(vec![r(1, 1); 4]);
        let mut lp = RationalLP::new(vec![r(1, 1); 4]);
        for (k, row) in rows.iter().enumerate() {
            let coeffs: Vec<_> = row.iter().map(|&j| (j, r(1, 1))).collect();
            p.add_row(coeffs.clone());
            lp.add_row(coeffs, Sense::Le, r(1, 1));
            if k >= 1 {
                assert_eq!(p.solve().unwrap().value, simplex_solve(&lp).unwrap().value);
            }
        }
    }
}

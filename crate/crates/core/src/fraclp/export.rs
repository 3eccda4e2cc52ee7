use std::fmt::Write;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::simplex::{RationalLP, Sense};
use super::WeightLp;
use crate::json::rat_value;

fn coeff(v: &BigRational, first: bool) -> String {
    let sign = if v.is_negative() {
        "- "
    } else if first {
        ""
    } else {
        "+ "
    };
    let a = v.abs();
    if a.is_one() {
        sign.to_string()
    } else {
        format!("{sign}{a} ")
    }
}

fn linear(terms: &[(usize, BigRational)], names: &[String]) -> String {
    let mut s = String::new();
    let mut first = true;
    for (j, v) in terms.iter().filter(|(_, v)| !v.is_zero()) {
        if !first {
            s.push(' ');
        }
        write!(s, "{}{}", coeff(v, first), names[*j]).unwrap();
        first = false;
    }
    if first {
        s.push('0');
    }
    s
}

/// CPLEX-style LP text. Coefficients are written as exact fractions `p/q`.
pub fn to_lp_text(lp: &RationalLP) -> String {
    let mut s = String::new();
    let obj: Vec<(usize, BigRational)> = lp.objective.iter().cloned().enumerate().collect();
    writeln!(s, "Maximize").unwrap();
    writeln!(s, " obj: {}", linear(&obj, &lp.names)).unwrap();
    writeln!(s, "Subject To").unwrap();
    for (i, r) in lp.rows.iter().enumerate() {
        let op = match r.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        writeln!(s, " c{i}: {} {op} {}", linear(&r.coeffs, &lp.names), r.rhs).unwrap();
    }
    writeln!(s, "Bounds").unwrap();
    for (j, u) in lp.upper.iter().enumerate() {
        match u {
            Some(u) => writeln!(s, " 0 <= {} <= {u}", lp.names[j]).unwrap(),
            None => writeln!(s, " {} >= 0", lp.names[j]).unwrap(),
        }
    }
    writeln!(s, "End").unwrap();
    s
}

/// `{bound: {num, den}, weights: [...], certificate: {...}}`.
pub fn to_json(r: &WeightLp) -> Value {
    json!({
        "bound": rat_value(&r.bound),
        "weights": r.weights.iter().map(rat_value).collect::<Vec<_>>(),
        "certificate": serde_json::to_value(&r.certificate).expect("certificate serializes"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_text_shape() {
        let h = BigRational::new(1.into(), 2.into());
        let mut lp = RationalLP::new(vec![BigRational::one(), h.clone()]);
        lp.add_row(vec![(0, BigRational::one()), (1, -h.clone())], Sense::Le, h);
        let t = to_lp_text(&lp);
        assert!(t.contains(" obj: x0 + 1/2 x1"));
        assert!(t.contains(" c0: x0 - 1/2 x1 <= 1/2"));
        assert!(t.ends_with("End\n"));
    }
}

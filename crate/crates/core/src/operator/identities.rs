//! Exact identity checks over the symbolic operator family.

use serde::Serialize;

use super::display;
use super::SymbolicOperators;
use crate::symbolic::{sym, Base, ExprMatrix, RationalExpr, Symbol};
use crate::tuple_ops::{external_det, plain_symbols, ExternalDet, TupleFamily};

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    /// 1-based `(row, col)` entries or row indices that failed.
    pub offending: Vec<String>,
}

impl IdentityCheck {
    fn from_mismatches(name: &str, bad: Vec<String>) -> Self {
        IdentityCheck {
            name: name.to_string(),
            passed: bad.is_empty(),
            offending: bad,
        }
    }
}

fn matrix_check(name: &str, got: &ExprMatrix, want: &ExprMatrix) -> IdentityCheck {
    let bad = got
        .mismatches(want)
        .into_iter()
        .map(|(i, j)| format!("({},{})", i + 1, j + 1))
        .collect();
    IdentityCheck::from_mismatches(name, bad)
}

fn vector_check(name: &str, m: &ExprMatrix, x: &[RationalExpr], y: &[RationalExpr]) -> IdentityCheck {
    let mx = m.mul(&ExprMatrix::column(x.to_vec()));
    let bad = (0..y.len())
        .filter(|&i| !mx.get(i, 0).equals(&y[i]))
        .map(|i| format!("row {}", i + 1))
        .collect();
    IdentityCheck::from_mismatches(name, bad)
}

/// `(u, s*v)` scaled by `(a, b)` blockwise.
fn uv(a: i64, b: i64) -> Vec<RationalExpr> {
    Base::ALL
        .iter()
        .enumerate()
        .map(|(i, &base)| &RationalExpr::int(if i < 3 { a } else { b }) * &sym(base))
        .collect()
}

/// The seven symbolic checks of the verification report.
pub fn symbolic_suite(ops: &SymbolicOperators) -> Vec<IdentityCheck> {
    let omega1 = uv(1, -1);
    let mut out = vec![
        vector_check("H(u,-v) = (u,v)", &ops.h, &omega1, &uv(1, 1)),
        vector_check("H^2(u,-v) = 5(u,-v)", &ops.h_squared, &omega1, &uv(5, -5)),
        vector_check("H(u,v) = (5u,-5v)", &ops.h, &uv(1, 1), &uv(5, -5)),
        vector_check("H^2(u,v) = 5(u,v)", &ops.h_squared, &uv(1, 1), &uv(5, 5)),
    ];
    let h2_shown = display::matrix(&display::H_SQUARED).expect("display parses");
    out.push(matrix_check("H*H = displayed H^2", &ops.h_squared, &h2_shown));
    let hp_shown = display::matrix(&display::H_PRIME).expect("display parses");
    out.push(matrix_check("dH/dt = displayed H'", &ops.h_prime, &hp_shown));
    out.push(gradient_check(ops));
    out
}

/// `grad det(D) = u2 u3 v1 v3 H`, compared entrywise against `ops.h`, plus
/// agreement of `ops.h` with the displayed `H`.
pub fn gradient_check(ops: &SymbolicOperators) -> IdentityCheck {
    let d = external_det(&TupleFamily::symbolic_pair(), 1)
        .expect("two symbolic triples")
        .vector;
    let grad = ExprMatrix::jacobian(&d, &plain_symbols());
    let scaled = ops.h.scale(&ExternalDet::factor());
    let mut check = matrix_check("grad det(D) = u2u3v1v3 H", &grad, &scaled);
    let shown = display::matrix(&display::H).expect("display parses");
    for (i, j) in ops.h.mismatches(&shown) {
        let tag = format!("({},{})", i + 1, j + 1);
        if !check.offending.contains(&tag) {
            check.offending.push(tag);
        }
    }
    check.passed = check.offending.is_empty();
    check
}

/// Replaces first derivatives by `(a u, b v)`.
fn on_jet(m: &ExprMatrix, a: i64, b: i64) -> ExprMatrix {
    let map = move |s: Symbol| {
        (s.order == 1).then(|| {
            let k = if s.base.index() < 3 { a } else { b };
            &RationalExpr::int(k) * &sym(s.base)
        })
    };
    m.try_map(|e| e.substitute(&map))
        .expect("substitution keeps denominators nonzero")
}

/// Identities along the two exponential solution families, where the
/// derivative split `w'' = (H' + H^2) w` becomes an exact eigen-relation.
pub fn jet_identities(ops: &SymbolicOperators) -> Vec<IdentityCheck> {
    let omega1 = uv(1, -1);
    let omega2 = uv(1, 1);
    let hp1 = on_jet(&ops.h_prime, 1, -1);
    let hp5 = on_jet(&ops.h_prime, 5, -5);
    vec![
        vector_check("on u'=u, v'=-v: H'(u,-v) = -4(u,-v)", &hp1, &omega1, &uv(-4, 4)),
        vector_check(
            "on u'=u, v'=-v: (H'+H^2)(u,-v) = (u,-v)",
            &hp1.add(&ops.h_squared),
            &omega1,
            &omega1,
        ),
        vector_check("on u'=5u, v'=-5v: H'(u,v) = 20(u,v)", &hp5, &omega2, &uv(20, 20)),
        vector_check(
            "on u'=5u, v'=-5v: (H'+H^2)(u,v) = 25(u,v)",
            &hp5.add(&ops.h_squared),
            &omega2,
            &uv(25, 25),
        ),
    ]
}

/// `det(D) = u2 u3 v1 v3 (u, -v)`.
pub fn external_det_factorization() -> IdentityCheck {
    let d = external_det(&TupleFamily::symbolic_pair(), 1).expect("two symbolic triples");
    let ok = d
        .ratio_to(&ExternalDet::omega1())
        .is_some_and(|g| g.equals(&ExternalDet::factor()));
    IdentityCheck {
        name: "det(D) = u2u3v1v3 (u,-v)".into(),
        passed: ok,
        offending: vec![],
    }
}

/// Passes when the typeset entry (5,2) of `H'` disagrees with `d/dt H`.
pub fn printed_h_prime_erratum(ops: &SymbolicOperators) -> IdentityCheck {
    let printed = crate::symbolic::parse_expr(display::H_PRIME_PRINTED_5_2).expect("parses");
    let differs = !printed.equals(ops.h_prime.get(4, 1));
    IdentityCheck {
        name: "printed H'(5,2) differs from d/dt H".into(),
        passed: differs,
        offending: if differs { vec!["(5,2)".into()] } else { vec![] },
    }
}

/// Exact eigen-residual of each displayed `H^2` eigenvector column.
pub fn h_squared_eigenvector_columns(ops: &SymbolicOperators) -> Vec<bool> {
    let v = display::matrix(&display::V_H_SQUARED).expect("display parses");
    (0..6)
        .map(|j| {
            let col: Vec<RationalExpr> = (0..6).map(|i| v.get(i, j).clone()).collect();
            let lam = RationalExpr::int(display::V_H_SQUARED_EIGENVALUES[j]);
            let want: Vec<RationalExpr> = col.iter().map(|e| &lam * e).collect();
            vector_check("", &ops.h_squared, &col, &want).passed
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::shared;

    #[test]
    fn symbolic_suite_passes() {
        for c in symbolic_suite(shared()) {
            assert!(c.passed, "{}: {:?}", c.name, c.offending);
        }
    }

    #[test]
    fn jet_identities_pass() {
        for c in jet_identities(shared()) {
            assert!(c.passed, "{}: {:?}", c.name, c.offending);
        }
    }

    #[test]
    fn factorization_and_erratum() {
        assert!(external_det_factorization().passed);
        assert!(printed_h_prime_erratum(shared()).passed);
    }

    #[test]
    fn displayed_h_squared_eigenvectors_hold() {
        assert_eq!(h_squared_eigenvector_columns(shared()), vec![true; 6]);
    }

    #[test]
    fn tampering_names_the_entry() {
        let bad = shared().tampered(1, 2, RationalExpr::int(7)).unwrap();
        let g = gradient_check(&bad);
        assert!(!g.passed);
        assert_eq!(g.offending, vec!["(2,3)".to_string()]);
    }
}

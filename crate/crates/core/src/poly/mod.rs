//! Exact sparse polynomial arithmetic over the rationals and prime fields.
//!
//! A single [`Poly`] type covers ordinary and Laurent polynomials; exponents
//! are signed and [`Poly::clear_denominators`] turns a Laurent polynomial into
//! an ordinary numerator together with its monomial multiplier.

mod field;
mod matrix;
mod monomial;
mod polynomial;

pub use field::{is_prime, Field, FieldTag, PrimeField, Rationals, DEFAULT_PRIME};
pub use matrix::PolyMatrix;
pub use monomial::{Monomial, MAX_VARS};
pub use polynomial::{Poly, Vars};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("coefficient fields differ: {0} vs {1}")]
    FieldMismatch(FieldTag, FieldTag),
    #[error("operands live in different variable lists")]
    VariableMismatch,
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("variable {0:?} listed twice")]
    DuplicateVariable(String),
    #[error("{0} variables exceed the supported maximum")]
    TooManyVariables(usize),
    #[error("expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows} rows, a row of {cols} entries)")]
    NotSquare { rows: usize, cols: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn vars() -> Vars {
        Vars::new(&["lambda", "z1", "z2"]).unwrap()
    }

    fn p(s: &str) -> Poly<Rationals> {
        Poly::parse(&vars(), s).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(&p("z1 + 1") * &p("z1 - 1"), p("z1^2 - 1"));
    }

    #[test]
    fn additive_inverse_is_empty() {
        let a = p("3*z1^2*z2 - 1/2*lambda + 7");
        let s = &a + &(-&a);
        assert!(s.is_zero());
        assert_eq!(s.terms().len(), 0);
    }

    #[test]
    fn laurent_clearing_by_multiplication() {
        assert_eq!(&p("z1^-1 + 1") * &p("z1"), p("1 + z1"));
    }

    #[test]
    fn partial_derivatives() {
        assert_eq!(p("z1^2*z2").partial("z1").unwrap(), p("2*z1*z2"));
        assert_eq!(p("z1^-1").partial("z1").unwrap(), p("-z1^-2"));
        // d/dlambda (lambda^2 - lambda*T + D) with T = z1, D = z2.
        assert_eq!(
            p("lambda^2 - lambda*z1 + z2").partial("lambda").unwrap(),
            p("2*lambda - z1")
        );
        assert!(matches!(
            p("z1").partial("w"),
            Err(PolyError::UnknownVariable(_))
        ));
    }

    #[test]
    fn clear_denominators_examples() {
        let (num, m) = p("z1^-1 + z2^-1 + 1").clear_denominators();
        assert_eq!(num, p("z2 + z1 + z1*z2"));
        assert_eq!(m, Monomial::from_exps(&[0, 1, 1]));
        let ordinary = p("lambda^2 + z1");
        let (num, m) = ordinary.clear_denominators();
        assert_eq!(num, ordinary);
        assert!(m.is_one());
    }

    #[test]
    fn determinants() {
        let v = vars();
        let f = Rationals;
        let id = PolyMatrix::from_rows(
            f,
            v.clone(),
            vec![vec![p("1"), p("0")], vec![p("0"), p("1")]],
        )
        .unwrap();
        assert_eq!(id.det(), p("1"));
        let anti = PolyMatrix::from_rows(
            f,
            v.clone(),
            vec![vec![p("0"), p("z1 + 2")], vec![p("z2"), p("0")]],
        )
        .unwrap();
        assert_eq!(anti.det(), -(&p("z1 + 2") * &p("z2")));
        let bad = PolyMatrix::from_rows(f, v, vec![vec![p("1"), p("0")]]);
        assert!(matches!(bad, Err(PolyError::NotSquare { .. })));
    }

    #[test]
    fn three_by_three_det_matches_rule_of_sarrus() {
        let rows: Vec<Vec<Poly<Rationals>>> = [
            ["z1", "2", "lambda"],
            ["1", "z2", "3"],
            ["z1*z2", "0", "1"],
        ]
        .iter()
        .map(|r| r.iter().map(|s| p(s)).collect())
        .collect();
        let m = PolyMatrix::from_rows(Rationals, vars(), rows).unwrap();
        // Sarrus: aei + bfg + cdh - ceg - bdi - afh
        let expected = p("z1*z2*1 + 2*3*z1*z2 + lambda*1*0 - lambda*z2*z1*z2 - 2*1*1 - z1*3*0");
        assert_eq!(m.det(), expected);
    }

    #[test]
    fn specialize_examples() {
        let v = Vars::new(&["z1", "a1", "a2"]).unwrap();
        let f = Poly::parse(&v, "a1*z1 + a2").unwrap();
        let g = f.specialize(&[("a1", q(0))]).unwrap();
        assert_eq!(g.vars().names(), &["z1".to_string(), "a2".to_string()]);
        assert_eq!(g, Poly::parse(g.vars(), "a2").unwrap());
        assert_eq!(f.specialize(&[]).unwrap(), f);
    }

    #[test]
    fn mismatched_rings_are_errors() {
        let a = p("z1");
        let b = Poly::parse(&Vars::new(&["x"]).unwrap(), "x").unwrap();
        assert_eq!(a.checked_add(&b), Err(PolyError::VariableMismatch));
        let c = a.reduce_mod(PrimeField::new(7)).unwrap();
        let d = a.reduce_mod(PrimeField::new(11)).unwrap();
        assert!(matches!(c.checked_mul(&d), Err(PolyError::FieldMismatch(..))));
    }

    #[test]
    fn render_is_canonical() {
        let a = p("1 + z1^-1 - 3*lambda^2*z2 + 1/2*z2");
        assert_eq!(a.render(), "-3*lambda^2*z2 + 1/2*z2 + 1 + z1^-1");
        assert_eq!(Poly::parse(&vars(), &a.render()).unwrap(), a);
        assert_eq!(p("0").render(), "0");
    }

    fn arb_poly() -> impl Strategy<Value = Poly<Rationals>> {
        prop::collection::vec(((-2i16..3, -2i16..3, 0i16..3), -5i64..6), 0..6).prop_map(|ts| {
            let v = vars();
            let terms: Vec<(Vec<i16>, i64)> = ts
                .into_iter()
                .map(|((a, b, c), k)| (vec![c, a, b], k))
                .collect();
            let refs: Vec<(&[i16], i64)> = terms.iter().map(|(e, k)| (e.as_slice(), *k)).collect();
            Poly::from_i64_terms(&v, &refs)
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn leibniz_rule(a in arb_poly(), b in arb_poly()) {
            for v in ["lambda", "z1", "z2"] {
                let lhs = (&a * &b).partial(v).unwrap();
                let rhs = &(&a.partial(v).unwrap() * &b) + &(&a * &b.partial(v).unwrap());
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn clearing_round_trips(a in arb_poly()) {
            let (num, m) = a.clear_denominators();
            prop_assert!(num.is_polynomial());
            let inv = Monomial::one().div_unchecked(&m);
            prop_assert_eq!(num.mul_monomial(&inv), a);
        }

        #[test]
        fn reduction_mod_p_commutes(a in arb_poly(), b in arb_poly()) {
            let fp = PrimeField::new(DEFAULT_PRIME);
            let lhs = (&a * &b).reduce_mod(fp).unwrap();
            let rhs = &a.reduce_mod(fp).unwrap() * &b.reduce_mod(fp).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}

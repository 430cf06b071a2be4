use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use bloch_core::groebner::{GroebnerBasis, Ideal};
use bloch_core::poly::{Monomial, PrimeField, DEFAULT_PRIME};
use bloch_core::*;

fn vars() -> Vars {
    Vars::new(&["x", "y", "z"]).unwrap()
}

fn arb_poly() -> impl Strategy<Value = Poly<Rationals>> {
    prop::collection::vec((prop::array::uniform3(0i16..3), -4i64..5), 1..5).prop_map(|terms| {
        let terms = terms
            .into_iter()
            .map(|(e, c)| (Monomial::from_exps(&e), BigRational::from_integer(BigInt::from(c))))
            .collect();
        Poly::from_terms(Rationals, vars(), terms)
    })
}

fn arb_ideal() -> impl Strategy<Value = Vec<Poly<Rationals>>> {
    prop::collection::vec(arb_poly(), 1..4).prop_filter("zero", |g| g.iter().any(|p| !p.is_zero()))
}

fn basis<F: groebner::GroebnerField>(field: F, gens: Vec<Poly<F>>) -> GroebnerBasis<F> {
    GroebnerBasis::compute(&Ideal::new(field, vars(), gens).unwrap(), GroebnerOptions::default()).unwrap()
}

/// Full reduction by repeated division, written against the public
/// polynomial API only.
fn naive_reduce(mut p: Poly<Rationals>, basis: &[Poly<Rationals>]) -> Poly<Rationals> {
    let mut rest = Poly::zero(Rationals, p.vars().clone());
    while let Some((m, c)) = p.leading_term().cloned() {
        let divisor = basis.iter().find_map(|g| {
            let (lm, lc) = g.leading_term()?;
            m.div(lm).map(|q| (g, q, &c / lc))
        });
        match divisor {
            Some((g, q, k)) => p = &p - &g.mul_monomial(&q).scale(&k),
            None => {
                let lead = Poly::from_terms(Rationals, p.vars().clone(), vec![(m, c)]);
                p = &p - &lead;
                rest = &rest + &lead;
            }
        }
    }
    rest
}

fn naive_s_pairs_vanish(basis: &[Poly<Rationals>]) -> bool {
    for (i, f) in basis.iter().enumerate() {
        for g in &basis[i + 1..] {
            let (mf, cf) = f.leading_term().unwrap();
            let (mg, cg) = g.leading_term().unwrap();
            let l = mf.lcm(mg);
            let s = &f.mul_monomial(&l.div(mf).unwrap()).scale(&(cg.clone()))
                - &g.mul_monomial(&l.div(mg).unwrap()).scale(&(cf.clone()));
            if !naive_reduce(s, basis).is_zero() {
                return false;
            }
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    /// Every S-pair of a computed basis reduces to zero, and the basis
    /// generates the input.
    #[test]
    fn bases_pass_s_pair_check(gens in arb_ideal()) {
        let gb = basis(Rationals, gens.clone());
        prop_assert!(gb.is_groebner());
        prop_assert!(naive_s_pairs_vanish(gb.polys()));
        prop_assert!(gb.is_reduced_shape());
        for g in &gens {
            prop_assert!(gb.normal_form(g).unwrap().is_zero());
        }
    }

    #[test]
    fn reduced_basis_ignores_generator_order(gens in arb_ideal()) {
        let mut rev = gens.clone();
        rev.reverse();
        let (a, b) = (basis(Rationals, gens), basis(Rationals, rev));
        prop_assert_eq!(a.polys(), b.polys());
    }

    #[test]
    fn prime_bases_pass_s_pair_check(gens in arb_ideal()) {
        let fp = PrimeField::new(DEFAULT_PRIME);
        let gens: Vec<_> = gens.iter().map(|g| g.reduce_mod(fp).unwrap()).collect();
        let gb = basis(fp, gens);
        prop_assert!(gb.is_groebner());
    }

    /// Ideal membership of products with generators.
    #[test]
    fn products_reduce_to_zero(gens in arb_ideal(), h in arb_poly()) {
        let gb = basis(Rationals, gens.clone());
        let p = &h * &gens[0];
        prop_assert!(gb.normal_form(&p).unwrap().is_zero());
    }
}

#[test]
fn quotient_dimension_examples() {
    let v = vars();
    let p = |s: &str| Poly::parse(&v, s).unwrap();
    let gb = basis(Rationals, vec![p("x^2 - 1"), p("y^3 - y"), p("z - x*y")]);
    assert_eq!(gb.quotient_dimension(), QuotientDim::Finite(6));
    let gb = basis(Rationals, vec![p("x*y"), p("x*z")]);
    assert_eq!(gb.quotient_dimension(), QuotientDim::Infinite);
    let gb = basis(Rationals, vec![p("x*y - 1"), p("x"), p("z")]);
    assert!(gb.is_unit());
}

/// Counting over Q and over a prime agree on the mother system.
#[test]
fn mother_critical_basis_checks() {
    let sys = build_system(&build_symbol(&mother(), Convention::Divergence).unwrap()).unwrap();
    let alpha = [4, 1, 8, 7, 5, 1, 3, 2, 6];
    let gens = sys.critical_ideal_generators(&alpha).unwrap();
    let fp = PrimeField::new(DEFAULT_PRIME);
    let reduced: Vec<_> = gens.iter().map(|g| g.reduce_mod(fp).unwrap()).collect();
    let ideal = Ideal::new(fp, gens[0].vars().clone(), reduced).unwrap();
    let gb = GroebnerBasis::compute(&ideal, GroebnerOptions::default()).unwrap();
    assert!(gb.is_groebner());
    assert_eq!(gb.quotient_dimension(), QuotientDim::Finite(32));
    let q = critical::count_critical_points(&sys, &alpha, FieldTag::Rational, GroebnerOptions::default())
        .unwrap()
        .unwrap();
    assert_eq!(q, QuotientDim::Finite(32));
}

//! Gröbner bases by Buchberger's algorithm under graded reverse
//! lexicographic order, with ideal-membership of one and quotient-space
//! dimension counting on top.
//!
//! Over the rationals the engine works fraction-free on primitive integer
//! polynomials; over prime fields it works with monic polynomials.

mod domain;
mod engine;

pub use domain::{FieldDomain, GroebnerField, IntegerDomain, ReductionDomain};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{Field, Monomial, Poly, PolyError, Vars};
use engine::{Engine, Outcome};

/// Default budget of S-pair reductions per basis computation.
pub const DEFAULT_PAIR_BUDGET: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroebnerError {
    #[error("pair-reduction budget exhausted after {pairs} pairs")]
    BudgetExceeded { pairs: usize },
    #[error("generators must be ordinary polynomials (negative exponent found)")]
    NegativeExponent,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroebnerOptions {
    pub max_pair_reductions: usize,
}

impl Default for GroebnerOptions {
    fn default() -> Self {
        GroebnerOptions {
            max_pair_reductions: DEFAULT_PAIR_BUDGET,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroebnerStats {
    pub pairs_reduced: usize,
    pub zero_reductions: usize,
    pub max_basis: usize,
    pub basis_size: usize,
}

/// Ideal given by generators in a common ring.
#[derive(Clone, Debug)]
pub struct Ideal<F: Field> {
    field: F,
    vars: Vars,
    generators: Vec<Poly<F>>,
}

impl<F: Field> Ideal<F> {
    /// Zero generators are dropped. All generators must share field and
    /// variables and have nonnegative exponents.
    pub fn new(field: F, vars: Vars, generators: Vec<Poly<F>>) -> Result<Self, GroebnerError> {
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if g.field() != &field || g.vars() != &vars {
                return Err(PolyError::VariableMismatch.into());
            }
            if !g.is_polynomial() {
                return Err(GroebnerError::NegativeExponent);
            }
            if !g.is_zero() {
                gens.push(g);
            }
        }
        Ok(Ideal {
            field,
            vars,
            generators: gens,
        })
    }

    /// Convenience constructor taking the ring from the first generator.
    pub fn from_generators(generators: Vec<Poly<F>>) -> Result<Self, GroebnerError> {
        let first = generators.first().ok_or(PolyError::ArityMismatch {
            expected: 1,
            got: 0,
        })?;
        let (field, vars) = (first.field().clone(), first.vars().clone());
        Self::new(field, vars, generators)
    }

    pub fn generators(&self) -> &[Poly<F>] {
        &self.generators
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn field(&self) -> &F {
        &self.field
    }
}

/// Reduced Gröbner basis: monic, leading terms pairwise non-divisible,
/// sorted by increasing leading monomial.
#[derive(Clone, Debug)]
pub struct GroebnerBasis<F: Field> {
    field: F,
    vars: Vars,
    basis: Vec<Poly<F>>,
    stats: GroebnerStats,
}

/// Dimension of the quotient ring as a vector space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuotientDim {
    Finite(u64),
    Infinite,
}

impl std::fmt::Display for QuotientDim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            QuotientDim::Finite(n) => write!(f, "{n}"),
            QuotientDim::Infinite => write!(f, "infinite"),
        }
    }
}

impl<F: GroebnerField> GroebnerBasis<F> {
    /// Reduced Gröbner basis of `ideal`.
    pub fn compute(ideal: &Ideal<F>, opts: GroebnerOptions) -> Result<Self, GroebnerError> {
        let (outcome, stats) = run(ideal, opts)?;
        let field = ideal.field.clone();
        let vars = ideal.vars.clone();
        let basis = match outcome {
            Outcome::Unit => vec![Poly::one(field.clone(), vars.clone())],
            Outcome::Basis(b) => b
                .into_iter()
                .map(|t| Poly::from_terms(field.clone(), vars.clone(), field.from_domain(t)))
                .collect(),
        };
        Ok(GroebnerBasis {
            field,
            vars,
            basis,
            stats,
        })
    }
}

impl<F: Field> GroebnerBasis<F> {
    pub fn polys(&self) -> &[Poly<F>] {
        &self.basis
    }

    pub fn stats(&self) -> GroebnerStats {
        self.stats
    }

    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.basis.iter().filter_map(|p| p.leading_term().map(|t| t.0)).collect()
    }

    /// Remainder of `p` on division by the basis (exact, in the basis field).
    pub fn normal_form(&self, p: &Poly<F>) -> Result<Poly<F>, GroebnerError> {
        if p.vars() != &self.vars {
            return Err(PolyError::VariableMismatch.into());
        }
        let dom = FieldDomain(self.field.clone());
        let terms = engine::reduce_with(&dom, p.terms().to_vec(), false, |m| {
            self.basis
                .iter()
                .find(|g| g.terms()[0].0.divides(m))
                .map(|g| g.terms())
        });
        Ok(Poly::from_terms(self.field.clone(), self.vars.clone(), terms))
    }

    /// Checks Buchberger's criterion: every S-polynomial of basis pairs
    /// reduces to zero.
    pub fn is_groebner(&self) -> bool {
        let terms: Vec<_> = self.basis.iter().map(|p| p.terms().to_vec()).collect();
        Engine::verify(FieldDomain(self.field.clone()), &terms)
    }

    /// Leading monomials pairwise non-divisible and leading coefficients one.
    pub fn is_reduced_shape(&self) -> bool {
        let lms = self.leading_monomials();
        let monic = self
            .basis
            .iter()
            .all(|p| self.field.is_one(&p.terms()[0].1));
        let antichain = lms.iter().enumerate().all(|(i, a)| {
            lms.iter()
                .enumerate()
                .all(|(j, b)| i == j || !a.divides(b))
        });
        monic && antichain
    }

    /// Number of standard monomials, or `Infinite` when some variable has no
    /// pure power among the leading monomials.
    pub fn quotient_dimension(&self) -> QuotientDim {
        let lms = self.leading_monomials();
        count_standard_monomials(&lms, self.vars.len())
    }

    /// Standard monomials in increasing order, when finitely many.
    pub fn standard_monomials(&self) -> Option<Vec<Monomial>> {
        let lms = self.leading_monomials();
        if count_standard_monomials(&lms, self.vars.len()) == QuotientDim::Infinite {
            return None;
        }
        let mut out = Vec::new();
        walk_standard(Monomial::one(), 0, self.vars.len(), &lms, &mut |m| out.push(m));
        out.sort();
        Some(out)
    }
}

fn run<F: GroebnerField>(
    ideal: &Ideal<F>,
    opts: GroebnerOptions,
) -> Result<(Outcome<<F::Domain as ReductionDomain>::E>, GroebnerStats), GroebnerError> {
    let gens: Vec<_> = ideal
        .generators
        .iter()
        .map(|g| ideal.field.to_domain(g))
        .collect();
    Engine::new(ideal.field.domain(), opts).run(gens)
}

/// Decides whether `1` lies in the ideal. Stops as soon as a unit appears.
pub fn contains_one<F: GroebnerField>(ideal: &Ideal<F>, opts: GroebnerOptions) -> Result<bool, GroebnerError> {
    let (outcome, _) = run(ideal, opts)?;
    Ok(matches!(outcome, Outcome::Unit))
}

/// Dimension of `R / I` over the field.
pub fn quotient_dimension<F: GroebnerField>(
    ideal: &Ideal<F>,
    opts: GroebnerOptions,
) -> Result<QuotientDim, GroebnerError> {
    Ok(GroebnerBasis::compute(ideal, opts)?.quotient_dimension())
}

/// Counts monomials in `nvars` variables divisible by none of `lms`.
pub fn count_standard_monomials(lms: &[Monomial], nvars: usize) -> QuotientDim {
    if lms.iter().any(|m| m.is_one()) {
        return QuotientDim::Finite(0);
    }
    for v in 0..nvars {
        let pure = lms
            .iter()
            .any(|m| m.exp(v) > 0 && (0..nvars).all(|w| w == v || m.exp(w) == 0));
        if !pure {
            return QuotientDim::Infinite;
        }
    }
    let mut count = 0u64;
    walk_standard(Monomial::one(), 0, nvars, lms, &mut |_| count += 1);
    QuotientDim::Finite(count)
}

/// Visits every monomial extending `prefix` in the variables from `var` on
/// that no element of `lms` divides. Requires a pure power of each variable.
fn walk_standard(prefix: Monomial, var: usize, nvars: usize, lms: &[Monomial], visit: &mut impl FnMut(Monomial)) {
    if var == nvars {
        if !lms.iter().any(|l| l.divides(&prefix)) {
            visit(prefix);
        }
        return;
    }
    let mut e = 0;
    loop {
        let m = prefix.with_exp(var, e);
        if lms.iter().any(|l| l.divides(&m)) {
            break;
        }
        walk_standard(m, var + 1, nvars, lms, visit);
        e += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{PrimeField, Rationals, DEFAULT_PRIME};

    fn ring(names: &[&str]) -> Vars {
        Vars::new(names).unwrap()
    }

    fn ideal(v: &Vars, gens: &[&str]) -> Ideal<Rationals> {
        let gens = gens.iter().map(|g| Poly::parse(v, g).unwrap()).collect();
        Ideal::new(Rationals, v.clone(), gens).unwrap()
    }

    fn basis(v: &Vars, gens: &[&str]) -> GroebnerBasis<Rationals> {
        GroebnerBasis::compute(&ideal(v, gens), GroebnerOptions::default()).unwrap()
    }

    #[test]
    fn already_a_basis() {
        let v = ring(&["x", "y"]);
        let g = basis(&v, &["x^2", "x*y"]);
        let expected: Vec<_> = ["x*y", "x^2"].iter().map(|s| Poly::parse(&v, s).unwrap()).collect();
        assert_eq!(g.polys(), expected.as_slice());
    }

    #[test]
    fn inconsistent_linear_system() {
        let v = ring(&["x"]);
        let g = basis(&v, &["x", "x - 1"]);
        assert!(g.is_unit());
        assert!(contains_one(&ideal(&v, &["x - 1", "x - 2"]), GroebnerOptions::default()).unwrap());
    }

    #[test]
    fn hand_run_example() {
        // y ordered before x so that y - x has leading term y.
        let v = ring(&["y", "x"]);
        let g = basis(&v, &["x^2 - 1", "y - x"]);
        let lms = g.leading_monomials();
        assert_eq!(lms, vec![Monomial::from_exps(&[1, 0]), Monomial::from_exps(&[0, 2])]);
        assert_eq!(g.polys()[0], Poly::parse(&v, "y - x").unwrap());
        assert_eq!(g.polys()[1], Poly::parse(&v, "x^2 - 1").unwrap());
    }

    #[test]
    fn proper_ideal_does_not_contain_one() {
        let v = ring(&["x", "y"]);
        assert!(!contains_one(&ideal(&v, &["x*y"]), GroebnerOptions::default()).unwrap());
    }

    #[test]
    fn quotient_dimension_examples() {
        let v1 = ring(&["x"]);
        let d = quotient_dimension(&ideal(&v1, &["x^2 - 1"]), GroebnerOptions::default()).unwrap();
        assert_eq!(d, QuotientDim::Finite(2));
        let v2 = ring(&["x", "y"]);
        let d = quotient_dimension(&ideal(&v2, &["x^2 - 1", "y^2 - 1"]), GroebnerOptions::default())
            .unwrap();
        assert_eq!(d, QuotientDim::Finite(4));
        let d = quotient_dimension(&ideal(&v1, &["x^2 - 2*x + 1"]), GroebnerOptions::default()).unwrap();
        assert_eq!(d, QuotientDim::Finite(2));
        let d = quotient_dimension(&ideal(&v2, &["x*y - 1"]), GroebnerOptions::default()).unwrap();
        assert_eq!(d, QuotientDim::Infinite);
        let d = quotient_dimension(&ideal(&v2, &["x", "x - 1"]), GroebnerOptions::default()).unwrap();
        assert_eq!(d, QuotientDim::Finite(0));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let v = ring(&["x", "y", "z"]);
        let id = ideal(&v, &["x^2 + y*z - 2", "y^2 + x*z - 3", "z^2 + x*y - 5"]);
        let err = GroebnerBasis::compute(&id, GroebnerOptions { max_pair_reductions: 1 }).unwrap_err();
        assert!(matches!(err, GroebnerError::BudgetExceeded { .. }));
    }

    #[test]
    fn negative_exponents_rejected() {
        let v = ring(&["x"]);
        let p = Poly::parse(&v, "x^-1").unwrap();
        assert_eq!(
            Ideal::new(Rationals, v, vec![p]).unwrap_err(),
            GroebnerError::NegativeExponent
        );
    }

    #[test]
    fn cyclic_three_over_q_and_fp() {
        let v = ring(&["x", "y", "z"]);
        let id = ideal(&v, &["x + y + z", "x*y + y*z + z*x", "x*y*z - 1"]);
        let gq = GroebnerBasis::compute(&id, GroebnerOptions::default()).unwrap();
        assert!(gq.is_groebner());
        assert!(gq.is_reduced_shape());
        for g in id.generators() {
            assert!(gq.normal_form(g).unwrap().is_zero());
        }
        // cyclic-3 has 6 solutions counted with multiplicity.
        assert_eq!(gq.quotient_dimension(), QuotientDim::Finite(6));

        let fp = PrimeField::new(DEFAULT_PRIME);
        let gens: Vec<_> = id.generators().iter().map(|g| g.reduce_mod(fp).unwrap()).collect();
        let idp = Ideal::new(fp, v.clone(), gens).unwrap();
        let gp = GroebnerBasis::compute(&idp, GroebnerOptions::default()).unwrap();
        assert!(gp.is_groebner());
        assert_eq!(gp.leading_monomials(), gq.leading_monomials());
        for (a, b) in gp.polys().iter().zip(gq.polys()) {
            assert_eq!(a, &b.reduce_mod(fp).unwrap());
        }
    }

    #[test]
    fn standard_monomial_count() {
        let lms = [Monomial::from_exps(&[2, 0]), Monomial::from_exps(&[1, 1]), Monomial::from_exps(&[0, 3])];
        // 1, y, y^2, x
        assert_eq!(count_standard_monomials(&lms, 2), QuotientDim::Finite(4));
        let v = ring(&["x", "y"]);
        let g = basis(&v, &["x^2", "x*y", "y^3"]);
        let std = g.standard_monomials().unwrap();
        let expected: Vec<Monomial> = [[0, 0], [0, 1], [1, 0], [0, 2]].iter().map(|e| Monomial::from_exps(e)).collect();
        assert_eq!(std, expected);
        assert_eq!(basis(&v, &["x*y"]).standard_monomials(), None);
    }
}

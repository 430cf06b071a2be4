use std::fmt::Debug;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::poly::{Field, Monomial, Poly, PrimeField, Rationals};

/// Coefficient arithmetic the reduction engine needs. Fields reduce by
/// division; the integers reduce fraction-free through cross multiplication.
pub trait ReductionDomain: Clone + Send + Sync {
    type E: Clone + Debug + PartialEq + Send + Sync;

    fn is_zero(&self, a: &Self::E) -> bool;
    fn is_one(&self, a: &Self::E) -> bool;
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    fn neg(&self, a: &Self::E) -> Self::E;

    /// Multipliers `(a, b)` with `a * x == b * y`, where `x` is the
    /// coefficient being eliminated and `y` the reducer's leading coefficient.
    fn cancel(&self, x: &Self::E, y: &Self::E) -> (Self::E, Self::E);

    /// Canonical scaling of a nonzero polynomial (monic, or primitive with
    /// positive leading coefficient).
    fn normalize(&self, terms: &mut [(Monomial, Self::E)]);

    /// Whether coefficient swell warrants normalizing during long reductions.
    fn normalize_during_reduction(&self) -> bool {
        false
    }
}

/// Any field acting as its own reduction domain.
#[derive(Clone, Debug)]
pub struct FieldDomain<F: Field>(pub F);

impl<F: Field> ReductionDomain for FieldDomain<F> {
    type E = F::Elem;

    #[inline]
    fn is_zero(&self, a: &F::Elem) -> bool {
        self.0.is_zero(a)
    }
    #[inline]
    fn is_one(&self, a: &F::Elem) -> bool {
        self.0.is_one(a)
    }
    #[inline]
    fn mul(&self, a: &F::Elem, b: &F::Elem) -> F::Elem {
        self.0.mul(a, b)
    }
    #[inline]
    fn sub(&self, a: &F::Elem, b: &F::Elem) -> F::Elem {
        self.0.sub(a, b)
    }
    #[inline]
    fn neg(&self, a: &F::Elem) -> F::Elem {
        self.0.neg(a)
    }
    fn cancel(&self, x: &F::Elem, y: &F::Elem) -> (F::Elem, F::Elem) {
        let b = if self.0.is_one(y) {
            x.clone()
        } else {
            self.0.mul(x, &self.0.inv(y).expect("nonzero leading coefficient"))
        };
        (self.0.one(), b)
    }
    fn normalize(&self, terms: &mut [(Monomial, F::Elem)]) {
        let Some((_, lc)) = terms.first() else { return };
        if self.0.is_one(lc) {
            return;
        }
        let inv = self.0.inv(lc).expect("nonzero leading coefficient");
        for (_, c) in terms.iter_mut() {
            *c = self.0.mul(c, &inv);
        }
    }
}

/// Fraction-free arithmetic over Z, used for Gröbner bases over Q.
#[derive(Clone, Copy, Debug, Default)]
pub struct IntegerDomain;

impl ReductionDomain for IntegerDomain {
    type E = BigInt;

    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn is_one(&self, a: &BigInt) -> bool {
        a.is_one()
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn cancel(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        let g = x.gcd(y);
        let (mut a, mut b) = (y / &g, x / &g);
        if a.sign() == Sign::Minus {
            a = -a;
            b = -b;
        }
        (a, b)
    }
    fn normalize(&self, terms: &mut [(Monomial, BigInt)]) {
        let Some((_, lc)) = terms.first() else { return };
        let negative = lc.is_negative();
        let mut g = BigInt::zero();
        for (_, c) in terms.iter() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        if negative {
            g = -g;
        }
        if !g.is_one() {
            for (_, c) in terms.iter_mut() {
                *c = &*c / &g;
            }
        }
    }
    fn normalize_during_reduction(&self) -> bool {
        true
    }
}

/// Fields for which Buchberger's algorithm is available, together with the
/// domain the engine actually computes in.
pub trait GroebnerField: Field {
    type Domain: ReductionDomain;

    fn domain(&self) -> Self::Domain;
    fn to_domain(&self, p: &Poly<Self>) -> Vec<(Monomial, <Self::Domain as ReductionDomain>::E)>;
    /// Converts back and scales to a monic polynomial.
    fn from_domain(
        &self,
        terms: Vec<(Monomial, <Self::Domain as ReductionDomain>::E)>,
    ) -> Vec<(Monomial, Self::Elem)>;
}

impl GroebnerField for PrimeField {
    type Domain = FieldDomain<PrimeField>;

    fn domain(&self) -> Self::Domain {
        FieldDomain(*self)
    }
    fn to_domain(&self, p: &Poly<Self>) -> Vec<(Monomial, u64)> {
        p.terms().to_vec()
    }
    fn from_domain(&self, mut terms: Vec<(Monomial, u64)>) -> Vec<(Monomial, u64)> {
        FieldDomain(*self).normalize(&mut terms);
        terms
    }
}

impl GroebnerField for Rationals {
    type Domain = IntegerDomain;

    fn domain(&self) -> IntegerDomain {
        IntegerDomain
    }
    fn to_domain(&self, p: &Poly<Self>) -> Vec<(Monomial, BigInt)> {
        let mut den = BigInt::one();
        for (_, c) in p.terms() {
            den = den.lcm(c.denom());
        }
        let mut terms: Vec<(Monomial, BigInt)> = p
            .terms()
            .iter()
            .map(|(m, c)| (*m, (c * BigRational::from_integer(den.clone())).to_integer()))
            .collect();
        IntegerDomain.normalize(&mut terms);
        terms
    }
    fn from_domain(&self, terms: Vec<(Monomial, BigInt)>) -> Vec<(Monomial, BigRational)> {
        let Some((_, lc)) = terms.first() else {
            return Vec::new();
        };
        let lc = lc.clone();
        terms
            .into_iter()
            .map(|(m, c)| (m, BigRational::new(c, lc.clone())))
            .collect()
    }
}

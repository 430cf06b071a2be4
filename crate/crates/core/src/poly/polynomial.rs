use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::field::{Field, PrimeField, Rationals};
use super::monomial::{Monomial, MAX_VARS};
use super::PolyError;

/// Ordered list of variable names shared between polynomials of one ring.
#[derive(Clone, Debug)]
pub struct Vars(Arc<Vec<String>>);

impl Vars {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, PolyError> {
        if names.len() > MAX_VARS {
            return Err(PolyError::TooManyVariables(names.len()));
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_owned()).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(PolyError::DuplicateVariable(n.clone()));
            }
        }
        Ok(Vars(Arc::new(names)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize, PolyError> {
        self.index(name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_owned()))
    }
}

impl PartialEq for Vars {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

/// Sparse multivariate (Laurent) polynomial over a field `F`.
///
/// Terms are kept sorted by decreasing grevlex order with no zero
/// coefficients, so the first term is the leading term. Negative exponents
/// are allowed; [`Poly::is_polynomial`] tells whether any occur.
#[derive(Clone, Debug)]
pub struct Poly<F: Field> {
    field: F,
    vars: Vars,
    terms: Vec<(Monomial, F::Elem)>,
}

impl<F: Field> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.vars == other.vars && self.terms == other.terms
    }
}

impl<F: Field> Poly<F> {
    pub fn zero(field: F, vars: Vars) -> Self {
        Poly {
            field,
            vars,
            terms: Vec::new(),
        }
    }

    pub fn constant(field: F, vars: Vars, c: F::Elem) -> Self {
        Self::from_terms(field, vars, vec![(Monomial::one(), c)])
    }

    pub fn one(field: F, vars: Vars) -> Self {
        let one = field.one();
        Self::constant(field, vars, one)
    }

    /// The variable `name` as a polynomial.
    pub fn var(field: F, vars: Vars, name: &str) -> Result<Self, PolyError> {
        let i = vars.require(name)?;
        let one = field.one();
        Ok(Self::from_terms(field, vars, vec![(Monomial::var(i, 1), one)]))
    }

    /// Builds a polynomial from arbitrary terms, combining duplicates and
    /// dropping zeros.
    pub fn from_terms(field: F, vars: Vars, terms: Vec<(Monomial, F::Elem)>) -> Self {
        let mut acc: HashMap<Monomial, F::Elem> = HashMap::with_capacity(terms.len());
        for (m, c) in terms {
            match acc.get_mut(&m) {
                Some(e) => *e = field.add(e, &c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Poly { field, vars, terms }
    }

    /// Trusts that `terms` are already sorted descending, distinct and nonzero.
    pub(crate) fn from_sorted_terms(field: F, vars: Vars, terms: Vec<(Monomial, F::Elem)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        Poly { field, vars, terms }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn terms(&self) -> &[(Monomial, F::Elem)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, F::Elem)> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_term(&self) -> Option<&(Monomial, F::Elem)> {
        self.terms.first()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    /// No negative exponents anywhere.
    pub fn is_polynomial(&self) -> bool {
        self.terms.iter().all(|(m, _)| !m.has_negative())
    }

    /// Total degree of the leading monomial under grevlex, i.e. the maximum
    /// total degree; `None` for zero.
    pub fn total_degree(&self) -> Option<i32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    /// Largest and smallest exponent of variable `var` over all terms.
    pub fn degree_range(&self, var: usize) -> Option<(i16, i16)> {
        let mut it = self.terms.iter().map(|(m, _)| m.exp(var));
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), e| (lo.min(e), hi.max(e))))
    }

    /// Sum of exponents over the given variable indices, maximized over terms.
    pub fn degree_in(&self, vars: &[usize]) -> Option<i32> {
        self.terms
            .iter()
            .map(|(m, _)| vars.iter().map(|&v| m.exp(v) as i32).sum())
            .max()
    }

    /// Minimum over terms of the summed exponents in `vars`.
    pub fn low_degree_in(&self, vars: &[usize]) -> Option<i32> {
        self.terms
            .iter()
            .map(|(m, _)| vars.iter().map(|&v| m.exp(v) as i32).sum())
            .min()
    }

    /// Coefficient of monomial `m` (zero if absent).
    pub fn coeff(&self, m: &Monomial) -> F::Elem {
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| self.field.zero())
    }

    fn check_compatible(&self, other: &Self) -> Result<(), PolyError> {
        if self.field != other.field {
            return Err(PolyError::FieldMismatch(self.field.tag(), other.field.tag()));
        }
        if self.vars != other.vars {
            return Err(PolyError::VariableMismatch);
        }
        Ok(())
    }

    fn with_terms(&self, terms: Vec<(Monomial, F::Elem)>) -> Self {
        Poly::from_terms(self.field.clone(), self.vars.clone(), terms)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compatible(other)?;
        Ok(self.merge(other, false))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compatible(other)?;
        Ok(self.merge(other, true))
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let f = &self.field;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => std::cmp::Ordering::Greater,
                _ => std::cmp::Ordering::Less,
            };
            match ord {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { f.neg(&b[j].1) } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate {
                        f.sub(&a[i].1, &b[j].1)
                    } else {
                        f.add(&a[i].1, &b[j].1)
                    };
                    if !f.is_zero(&c) {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Poly::from_sorted_terms(self.field.clone(), self.vars.clone(), out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_compatible(other)?;
        let f = &self.field;
        let mut acc: HashMap<Monomial, F::Elem> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = f.mul(ca, cb);
                match acc.get_mut(&m) {
                    Some(e) => *e = f.add(e, &c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Ok(self.with_terms(acc.into_iter().collect()))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Poly::one(self.field.clone(), self.vars.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        if self.field.is_zero(c) {
            return Poly::zero(self.field.clone(), self.vars.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (*m, self.field.mul(a, c)))
            .collect();
        Poly::from_sorted_terms(self.field.clone(), self.vars.clone(), terms)
    }

    /// Multiplication by a monomial preserves the term order.
    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        let terms = self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect();
        Poly::from_sorted_terms(self.field.clone(), self.vars.clone(), terms)
    }

    /// Leading coefficient made one; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.terms.first() {
            Some((_, lc)) => {
                let inv = self.field.inv(lc).expect("nonzero leading coefficient");
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Formal partial derivative with respect to the variable named `var`.
    pub fn partial(&self, var: &str) -> Result<Self, PolyError> {
        let v = self.vars.require(var)?;
        Ok(self.partial_index(v))
    }

    pub fn partial_index(&self, v: usize) -> Self {
        let f = &self.field;
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(v) != 0)
            .map(|(m, c)| {
                let e = m.exp(v);
                (m.with_exp(v, e - 1), f.mul(c, &f.from_i64(e as i64)))
            })
            .collect();
        self.with_terms(terms)
    }

    /// Multiplies by the smallest monomial that removes every negative
    /// exponent. Returns the polynomial numerator and that multiplier, so
    /// that `self == numerator / multiplier`.
    pub fn clear_denominators(&self) -> (Self, Monomial) {
        let mut shift = [0i16; MAX_VARS];
        for (m, _) in &self.terms {
            for (s, &e) in shift.iter_mut().zip(m.exps().iter()) {
                *s = (*s).max(-e);
            }
        }
        let mult = Monomial::from_exps(&shift);
        (self.mul_monomial(&mult), mult)
    }

    /// Substitutes values for the named variables and drops them from the
    /// variable list. Negative exponents on a bound variable require a
    /// nonzero value.
    pub fn specialize(&self, bindings: &[(&str, F::Elem)]) -> Result<Self, PolyError> {
        let f = &self.field;
        let mut bound: Vec<Option<F::Elem>> = vec![None; self.vars.len()];
        for (name, val) in bindings {
            let i = self.vars.require(name)?;
            bound[i] = Some(val.clone());
        }
        let keep: Vec<usize> = (0..self.vars.len()).filter(|&i| bound[i].is_none()).collect();
        let names: Vec<&str> = keep.iter().map(|&i| self.vars.names()[i].as_str()).collect();
        let vars = if keep.len() == self.vars.len() {
            self.vars.clone()
        } else {
            Vars::new(&names)?
        };
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            for (i, b) in bound.iter().enumerate() {
                let Some(val) = b else { continue };
                let e = m.exp(i);
                if e > 0 {
                    coef = f.mul(&coef, &f.pow(val, e as u64));
                } else if e < 0 {
                    let inv = f.inv(val).ok_or(PolyError::DivisionByZero)?;
                    coef = f.mul(&coef, &f.pow(&inv, (-e) as u64));
                }
            }
            terms.push((m.select(&keep), coef));
        }
        Ok(Poly::from_terms(self.field.clone(), vars, terms))
    }

    /// Re-embeds into a ring whose variable list contains all of ours.
    pub fn embed(&self, target: &Vars) -> Result<Self, PolyError> {
        let map: Vec<usize> = self
            .vars
            .names()
            .iter()
            .map(|n| target.require(n))
            .collect::<Result<_, _>>()?;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = [0i16; MAX_VARS];
                for (src, &dst) in map.iter().enumerate() {
                    e[dst] = m.exp(src);
                }
                (Monomial::from_exps(&e), c.clone())
            })
            .collect();
        Ok(Poly::from_terms(self.field.clone(), target.clone(), terms))
    }

    /// Exact evaluation at a full point; negative exponents need nonzero values.
    pub fn eval(&self, point: &[F::Elem]) -> Result<F::Elem, PolyError> {
        if point.len() != self.vars.len() {
            return Err(PolyError::ArityMismatch {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        let f = &self.field;
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, v) in point.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    t = f.mul(&t, &f.pow(v, e as u64));
                } else if e < 0 {
                    let inv = f.inv(v).ok_or(PolyError::DivisionByZero)?;
                    t = f.mul(&t, &f.pow(&inv, (-e) as u64));
                }
            }
            acc = f.add(&acc, &t);
        }
        Ok(acc)
    }

    /// Applies a coefficient map into another field.
    pub fn map_coeffs<G: Field>(
        &self,
        target: G,
        mut map: impl FnMut(&F::Elem) -> Option<G::Elem>,
    ) -> Result<Poly<G>, PolyError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let image = map(c).ok_or(PolyError::DivisionByZero)?;
            terms.push((*m, image));
        }
        Ok(Poly::from_terms(target, self.vars.clone(), terms))
    }

    /// Canonical text: terms in decreasing grevlex order, `coef*var^exp`
    /// factors, exponent 1 omitted.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl Poly<Rationals> {
    /// Parses the canonical text format, e.g. `"-3*z1^-1*z2 + 1/2*lambda^2 - 4"`.
    pub fn parse(vars: &Vars, text: &str) -> Result<Self, PolyError> {
        parse_rational(vars, text)
    }

    pub fn from_i64_terms(vars: &Vars, terms: &[(&[i16], i64)]) -> Self {
        let f = Rationals;
        let terms = terms
            .iter()
            .map(|(e, c)| (Monomial::from_exps(e), f.from_i64(*c)))
            .collect();
        Poly::from_terms(f, vars.clone(), terms)
    }

    /// Image modulo a prime; fails if a denominator vanishes mod p.
    pub fn reduce_mod(&self, fp: PrimeField) -> Result<Poly<PrimeField>, PolyError> {
        self.map_coeffs(fp, |q| fp.from_rational(q))
    }

    /// Floating-point evaluation at complex values of every variable.
    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.vars.len(), "arity mismatch");
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut t = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
                for (i, v) in point.iter().enumerate() {
                    let e = m.exp(i);
                    if e != 0 {
                        t *= v.powi(e as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Largest absolute coefficient as f64.
    pub fn coeff_norm(&self) -> f64 {
        self.terms
            .iter()
            .map(|(_, c)| c.to_f64().unwrap_or(f64::INFINITY).abs())
            .fold(0.0, f64::max)
    }

    /// Every coefficient an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_integer())
    }

    /// Integer content-free representative with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        use num_integer::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let mut den_lcm = BigInt::from(1);
        for (_, c) in &self.terms {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .terms
            .iter()
            .map(|(_, c)| (c * BigRational::from_integer(den_lcm.clone())).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for n in &ints {
            g = g.gcd(n);
        }
        if self.field.is_negative(&self.terms[0].1) {
            g = -g;
        }
        let terms = self
            .terms
            .iter()
            .zip(ints)
            .map(|((m, _), n)| (*m, BigRational::from_integer(n / &g)))
            .collect();
        Poly::from_sorted_terms(Rationals, self.vars.clone(), terms)
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let field = &self.field;
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = field.is_negative(c);
            let abs = if neg { field.neg(c) } else { c.clone() };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if !field.is_one(&abs) || m.is_one() {
                factors.push(ElemDisplay(field, &abs).to_string());
            }
            for (i, name) in self.vars.names().iter().enumerate() {
                match m.exp(i) {
                    0 => {}
                    1 => factors.push(name.clone()),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

struct ElemDisplay<'a, F: Field>(&'a F, &'a F::Elem);

impl<F: Field> fmt::Display for ElemDisplay<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt_elem(self.1, f)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<F: Field> $tr<&Poly<F>> for &Poly<F> {
            type Output = Poly<F>;
            /// Panics on field or variable-list mismatch; use the checked form to recover.
            fn $method(self, rhs: &Poly<F>) -> Poly<F> {
                self.$checked(rhs).expect("incompatible polynomial operands")
            }
        }
        impl<F: Field> $tr<Poly<F>> for Poly<F> {
            type Output = Poly<F>;
            fn $method(self, rhs: Poly<F>) -> Poly<F> {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl<F: Field> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, self.field.neg(c)))
            .collect();
        Poly::from_sorted_terms(self.field.clone(), self.vars.clone(), terms)
    }
}

impl<F: Field> Neg for Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        -&self
    }
}

fn parse_rational(vars: &Vars, text: &str) -> Result<Poly<Rationals>, PolyError> {
    let err = |msg: &str| PolyError::Parse(format!("{msg} in {text:?}"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err("empty input"));
    }
    // Split into signed terms; a '-' right after '^' belongs to an exponent.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut prev: Option<char> = None;
    for ch in s.chars() {
        if (ch == '+' || ch == '-') && prev != Some('^') {
            if !cur.is_empty() {
                terms.push((neg, std::mem::take(&mut cur)));
            } else if prev.is_some() && prev != Some('+') && prev != Some('-') {
                return Err(err("dangling sign"));
            }
            neg = ch == '-';
        } else {
            cur.push(ch);
        }
        prev = Some(ch);
    }
    if cur.is_empty() {
        return Err(err("trailing sign"));
    }
    terms.push((neg, cur));

    let mut out = Vec::with_capacity(terms.len());
    for (neg, body) in terms {
        let mut coef = BigRational::from_integer(1.into());
        let mut exps = [0i16; MAX_VARS];
        for factor in body.split('*') {
            if factor.is_empty() {
                return Err(err("empty factor"));
            }
            if factor.chars().next().is_some_and(|c| c.is_ascii_digit()) {
                let q = match factor.split_once('/') {
                    Some((n, d)) => {
                        let n: BigInt = n.parse().map_err(|_| err("bad numerator"))?;
                        let d: BigInt = d.parse().map_err(|_| err("bad denominator"))?;
                        if d.is_zero() {
                            return Err(err("zero denominator"));
                        }
                        BigRational::new(n, d)
                    }
                    None => BigRational::from_integer(
                        factor.parse::<BigInt>().map_err(|_| err("bad coefficient"))?,
                    ),
                };
                coef *= q;
            } else {
                let (name, e) = match factor.split_once('^') {
                    Some((n, e)) => (n, e.parse::<i16>().map_err(|_| err("bad exponent"))?),
                    None => (factor, 1),
                };
                let i = vars.require(name)?;
                exps[i] += e;
            }
        }
        if neg {
            coef = -coef;
        }
        out.push((Monomial::from_exps(&exps), coef));
    }
    Ok(Poly::from_terms(Rationals, vars.clone(), out))
}

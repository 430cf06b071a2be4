use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

/// Maximum number of variables a polynomial ring may carry.
pub const MAX_VARS: usize = 16;

/// A monomial as a fixed-width exponent vector. Exponents are signed so the
/// same type serves Laurent polynomials; Gröbner computations reject negative
/// entries up front.
///
/// Ordering is graded reverse lexicographic with variable 0 the largest.
#[derive(Clone, Copy, Debug)]
pub struct Monomial {
    exps: [i16; MAX_VARS],
    degree: i32,
    /// Bit i set iff exps[i] > 0; quick rejection for divisibility.
    mask: u16,
}

impl Monomial {
    pub const fn one() -> Self {
        Monomial {
            exps: [0; MAX_VARS],
            degree: 0,
            mask: 0,
        }
    }

    /// Panics if more than [`MAX_VARS`] exponents are supplied.
    pub fn from_exps(exps: &[i16]) -> Self {
        assert!(exps.len() <= MAX_VARS, "too many variables");
        let mut e = [0; MAX_VARS];
        e[..exps.len()].copy_from_slice(exps);
        Self::from_array(e)
    }

    fn from_array(exps: [i16; MAX_VARS]) -> Self {
        let mut degree = 0;
        let mut mask = 0;
        for (i, &e) in exps.iter().enumerate() {
            degree += e as i32;
            if e > 0 {
                mask |= 1 << i;
            }
        }
        Monomial { exps, degree, mask }
    }

    /// `x_var^exp`.
    pub fn var(var: usize, exp: i16) -> Self {
        let mut e = [0; MAX_VARS];
        e[var] = exp;
        Self::from_array(e)
    }

    #[inline]
    pub fn exp(&self, var: usize) -> i16 {
        self.exps[var]
    }

    pub fn exps(&self) -> &[i16; MAX_VARS] {
        &self.exps
    }

    /// Total degree (sum of exponents, possibly negative for Laurent monomials).
    #[inline]
    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn has_negative(&self) -> bool {
        self.exps.iter().any(|&e| e < 0)
    }

    pub fn with_exp(&self, var: usize, exp: i16) -> Self {
        let mut e = self.exps;
        e[var] = exp;
        Self::from_array(e)
    }

    #[inline]
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            e[i] = self.exps[i]
                .checked_add(other.exps[i])
                .expect("exponent overflow");
        }
        Monomial {
            exps: e,
            degree: self.degree + other.degree,
            mask: self.mask | other.mask,
        }
    }

    /// Exponent-wise difference, without a divisibility check.
    #[inline]
    pub fn div_unchecked(&self, other: &Monomial) -> Monomial {
        let mut e = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            e[i] = self.exps[i] - other.exps[i];
        }
        Self::from_array(e)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        other.divides(self).then(|| self.div_unchecked(other))
    }

    /// True iff `self` divides `other` (both assumed nonnegative).
    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        if self.mask & !other.mask != 0 || self.degree > other.degree {
            return false;
        }
        self.exps
            .iter()
            .zip(other.exps.iter())
            .all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let mut e = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            e[i] = self.exps[i].max(other.exps[i]);
        }
        Self::from_array(e)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut e = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            e[i] = self.exps[i].min(other.exps[i]);
        }
        Self::from_array(e)
    }

    /// No variable occurs in both.
    pub fn coprime(&self, other: &Monomial) -> bool {
        self.mask & other.mask == 0
    }

    /// Drops variable slots by keeping only `keep[i]`-indexed entries, in order.
    pub fn select(&self, keep: &[usize]) -> Monomial {
        let mut e = [0; MAX_VARS];
        for (slot, &i) in keep.iter().enumerate() {
            e[slot] = self.exps[i];
        }
        Self::from_array(e)
    }
}

impl Default for Monomial {
    fn default() -> Self {
        Self::one()
    }
}

impl PartialEq for Monomial {
    fn eq(&self, other: &Self) -> bool {
        self.exps == other.exps
    }
}

impl Eq for Monomial {}

impl Hash for Monomial {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.exps.hash(state);
    }
}

impl Ord for Monomial {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree.cmp(&other.degree) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for i in (0..MAX_VARS).rev() {
            let (a, b) = (self.exps[i], other.exps[i]);
            if a != b {
                return b.cmp(&a);
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grevlex_basics() {
        let x = Monomial::var(0, 1);
        let y = Monomial::var(1, 1);
        let z = Monomial::var(2, 1);
        assert!(x > y && y > z);
        // x*z^2 vs y^3 under grevlex: same degree, last variable decides.
        let xz2 = Monomial::from_exps(&[1, 0, 2]);
        let y3 = Monomial::from_exps(&[0, 3, 0]);
        assert!(y3 > xz2);
        let x2 = Monomial::from_exps(&[2]);
        assert!(x2 > x.mul(&y));
        assert!(x.mul(&y) > y.mul(&y));
    }

    #[test]
    fn divisibility() {
        let a = Monomial::from_exps(&[1, 2, 0]);
        let b = Monomial::from_exps(&[2, 2, 1]);
        assert!(a.divides(&b));
        assert!(!b.divides(&a));
        assert_eq!(b.div(&a), Some(Monomial::from_exps(&[1, 0, 1])));
        assert_eq!(a.lcm(&Monomial::from_exps(&[0, 3, 1])), Monomial::from_exps(&[1, 3, 1]));
        assert!(Monomial::var(0, 2).coprime(&Monomial::var(1, 1)));
    }
}

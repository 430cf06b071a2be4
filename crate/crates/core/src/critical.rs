//! Polynomial systems for critical points of the dispersion relation and
//! the randomized degeneracy test.
//!
//! With `T` and `D` the trace and determinant of a 2x2 symbol, the band
//! functions solve `g1 = lambda^2 - lambda*T + D = 0`. Critical points add
//! `g_{j+1} = lambda*dT/dz_j - dD/dz_j = 0`, and degenerate ones add the
//! determinant of the matrix `lambda*T_{ij} - D_{ij}` of second partials.
//! Each `f_i` is the numerator of `g_i`.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groebner::{GroebnerBasis, GroebnerError, GroebnerField, GroebnerOptions, Ideal, QuotientDim};
use crate::poly::{FieldTag, Monomial, Poly, PolyError, PolyMatrix, PrimeField, Rationals, Vars, DEFAULT_PRIME};
use crate::symbol::{z_name, SymbolError, SymbolMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriticalError {
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("expected {expected} parameter values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("sample needs at least one trial and a nonempty range")]
    EmptySample,
}

pub const LAMBDA: &str = "lambda";

pub fn u_name(j: usize) -> String {
    format!("u{j}")
}

/// `g_1..g_{n+2}` and their numerators `f_i = g_i * z^{m_i}` in the ring
/// `lambda, z1..zn, u1..un, params`.
#[derive(Clone, Debug)]
pub struct DispersionSystem {
    dimension: usize,
    params: Vec<String>,
    vars: Vars,
    trace: Poly<Rationals>,
    det: Poly<Rationals>,
    g: Vec<Poly<Rationals>>,
    f: Vec<Poly<Rationals>>,
    multipliers: Vec<Monomial>,
}

pub fn build_system(symbol: &SymbolMatrix) -> Result<DispersionSystem, CriticalError> {
    let (t, d) = symbol.trace_det()?;
    let n = symbol.dimension();
    let params = symbol.param_names().to_vec();
    let mut names = vec![LAMBDA.to_string()];
    names.extend((1..=n).map(z_name));
    names.extend((1..=n).map(u_name));
    names.extend(params.iter().cloned());
    let vars = Vars::new(&names)?;
    let t = t.embed(&vars)?;
    let d = d.embed(&vars)?;
    let lambda = Poly::var(Rationals, vars.clone(), LAMBDA)?;
    let z = |j: usize| 1 + j;

    let mut g = vec![&(&(&lambda * &lambda) - &(&lambda * &t)) + &d];
    for j in 0..n {
        g.push(&(&lambda * &t.partial_index(z(j))) - &d.partial_index(z(j)));
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let tij = t.partial_index(z(i)).partial_index(z(j));
            let dij = d.partial_index(z(i)).partial_index(z(j));
            row.push(&(&lambda * &tij) - &dij);
        }
        rows.push(row);
    }
    g.push(PolyMatrix::from_rows(Rationals, vars.clone(), rows)?.det());

    let (f, multipliers) = g.iter().map(Poly::clear_denominators).unzip();
    Ok(DispersionSystem {
        dimension: n,
        params,
        vars,
        trace: t,
        det: d,
        g,
        f,
        multipliers,
    })
}

impl DispersionSystem {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn param_names(&self) -> &[String] {
        &self.params
    }

    pub fn trace(&self) -> &Poly<Rationals> {
        &self.trace
    }

    pub fn det(&self) -> &Poly<Rationals> {
        &self.det
    }

    /// The Laurent expressions `g_1..g_{n+2}`.
    pub fn g(&self) -> &[Poly<Rationals>] {
        &self.g
    }

    /// The numerators `f_1..f_{n+2}`.
    pub fn f(&self) -> &[Poly<Rationals>] {
        &self.f
    }

    pub fn multipliers(&self) -> &[Monomial] {
        &self.multipliers
    }

    /// Indices of the parameter variables in [`Self::vars`].
    pub fn param_indices(&self) -> Vec<usize> {
        let start = 1 + 2 * self.dimension;
        (start..start + self.params.len()).collect()
    }

    /// Indices of `lambda` and the parameters.
    pub fn lambda_param_indices(&self) -> Vec<usize> {
        let mut v = vec![0];
        v.extend(self.param_indices());
        v
    }

    fn check_arity(&self, alpha: &[i64]) -> Result<(), CriticalError> {
        if alpha.len() != self.params.len() {
            return Err(CriticalError::Arity {
                expected: self.params.len(),
                got: alpha.len(),
            });
        }
        Ok(())
    }

    /// The numerators at `alpha`, in the ring `lambda, z1..zn, u1..un`.
    pub fn specialize(&self, alpha: &[i64]) -> Result<Vec<Poly<Rationals>>, CriticalError> {
        self.check_arity(alpha)?;
        let bindings: Vec<(&str, BigRational)> = self
            .params
            .iter()
            .map(String::as_str)
            .zip(alpha.iter().map(|&a| BigRational::from_integer(BigInt::from(a))))
            .collect();
        Ok(self
            .f
            .iter()
            .map(|p| p.specialize(&bindings))
            .collect::<Result<Vec<_>, _>>()?)
    }

    /// `z_j u_j - 1` for each multiplier variable, in the specialized ring.
    fn saturation(&self, vars: &Vars) -> Result<Vec<Poly<Rationals>>, CriticalError> {
        (1..=self.dimension)
            .map(|j| Ok(Poly::parse(vars, &format!("{}*{} - 1", z_name(j), u_name(j)))?))
            .collect()
    }

    /// Generators `f_1..f_{n+2}, z_j u_j - 1` of the degenerate-critical-point
    /// ideal at `alpha`.
    pub fn degenerate_ideal_generators(&self, alpha: &[i64]) -> Result<Vec<Poly<Rationals>>, CriticalError> {
        let mut gens = self.specialize(alpha)?;
        let sat = self.saturation(gens[0].vars())?;
        gens.extend(sat);
        Ok(gens)
    }

    /// Generators `f_1..f_{n+1}, z_j u_j - 1` of the critical-point ideal.
    pub fn critical_ideal_generators(&self, alpha: &[i64]) -> Result<Vec<Poly<Rationals>>, CriticalError> {
        let mut gens = self.specialize(alpha)?;
        gens.truncate(self.dimension + 1);
        let sat = self.saturation(gens[0].vars())?;
        gens.extend(sat);
        Ok(gens)
    }
}

/// Which coefficient field the Gröbner computations use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldChoice {
    /// Exact over Q.
    Rational,
    /// Over F_p only; answers carry a small chance of error.
    Prime(u64),
    /// Over F_p, rerunning over Q whenever F_p finds the ideal trivial.
    Screened(u64),
}

impl Default for FieldChoice {
    fn default() -> Self {
        FieldChoice::Screened(screening_prime())
    }
}

/// The screening prime, overridable through `BLOCH_PRIME`.
pub fn screening_prime() -> u64 {
    std::env::var("BLOCH_PRIME")
        .ok()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .filter(|&p| p < 1 << 32 && crate::poly::is_prime(p))
        .unwrap_or(DEFAULT_PRIME)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    NondegenerateCertified,
    DegenerateWitnessed,
    Inconclusive,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::NondegenerateCertified => "nondegenerate-certified",
            Status::DegenerateWitnessed => "degenerate-witnessed",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyVerdict {
    pub alpha: Vec<i64>,
    pub status: Status,
    pub field: FieldTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient_dim: Option<QuotientDim>,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

enum Membership {
    One,
    Proper(QuotientDim),
    Budget(usize),
}

fn membership<F: GroebnerField>(
    field: F,
    gens: &[Poly<Rationals>],
    convert: impl Fn(&Poly<Rationals>) -> Poly<F>,
    opts: GroebnerOptions,
) -> Result<Membership, CriticalError> {
    let vars = gens[0].vars().clone();
    let gens = gens.iter().map(convert).collect();
    let ideal = match Ideal::new(field, vars, gens) {
        Ok(i) => i,
        Err(GroebnerError::Poly(e)) => return Err(e.into()),
        Err(e) => unreachable!("generators are polynomials: {e}"),
    };
    match GroebnerBasis::compute(&ideal, opts) {
        Ok(b) if b.is_unit() => Ok(Membership::One),
        Ok(b) => Ok(Membership::Proper(b.quotient_dimension())),
        Err(GroebnerError::BudgetExceeded { pairs }) => Ok(Membership::Budget(pairs)),
        Err(GroebnerError::Poly(e)) => Err(e.into()),
        Err(GroebnerError::NegativeExponent) => unreachable!("numerators are polynomials"),
    }
}

fn membership_in(
    choice_field: FieldTag,
    gens: &[Poly<Rationals>],
    opts: GroebnerOptions,
) -> Result<Membership, CriticalError> {
    match choice_field {
        FieldTag::Rational => membership(Rationals, gens, Clone::clone, opts),
        FieldTag::Prime(p) => {
            let fp = PrimeField::new(p);
            membership(fp, gens, |g| g.reduce_mod(fp).expect("integral coefficients"), opts)
        }
    }
}

/// Membership of `1` in `<critical generators, extra>` over Q.
///
/// The critical ideal alone has a small basis, so it is computed first. When
/// its quotient is finite-dimensional, `extra` generates the unit ideal
/// exactly when multiplication by `extra` is invertible on that quotient, and
/// the quotient by the full ideal has dimension `d - rank`. Otherwise the full
/// ideal goes through Buchberger directly.
fn rational_membership(
    critical: &[Poly<Rationals>],
    extra: &Poly<Rationals>,
    opts: GroebnerOptions,
) -> Result<Membership, CriticalError> {
    let vars = critical[0].vars().clone();
    let ideal = Ideal::new(Rationals, vars, critical.to_vec()).map_err(|e| match e {
        GroebnerError::Poly(e) => CriticalError::Poly(e),
        e => unreachable!("generators are polynomials: {e}"),
    })?;
    let basis = match GroebnerBasis::compute(&ideal, opts) {
        Ok(b) => b,
        Err(GroebnerError::BudgetExceeded { pairs }) => return Ok(Membership::Budget(pairs)),
        Err(GroebnerError::Poly(e)) => return Err(e.into()),
        Err(GroebnerError::NegativeExponent) => unreachable!("numerators are polynomials"),
    };
    if basis.is_unit() {
        return Ok(Membership::One);
    }
    let Some(standard) = basis.standard_monomials() else {
        let mut all = critical.to_vec();
        all.push(extra.clone());
        return membership(Rationals, &all, Clone::clone, opts);
    };
    let d = standard.len();
    let rank = linalg::rank(&multiplication_matrix(&basis, extra, &standard)?);
    Ok(if rank == d {
        Membership::One
    } else {
        Membership::Proper(QuotientDim::Finite((d - rank) as u64))
    })
}

/// Integer matrix of multiplication by `p` on the quotient, one row per
/// standard monomial image (scaled to clear denominators).
fn multiplication_matrix(
    basis: &GroebnerBasis<Rationals>,
    p: &Poly<Rationals>,
    standard: &[Monomial],
) -> Result<Vec<Vec<BigInt>>, CriticalError> {
    let r = basis.normal_form(p).map_err(|e| match e {
        GroebnerError::Poly(e) => CriticalError::Poly(e),
        e => unreachable!("{e}"),
    })?;
    let mut rows = Vec::with_capacity(standard.len());
    for b in standard {
        let image = basis.normal_form(&r.mul_monomial(b)).expect("same ring");
        let mut den = BigInt::from(1);
        for (_, c) in image.terms() {
            den = num_integer::Integer::lcm(&den, c.denom());
        }
        let mut row = vec![BigInt::from(0); standard.len()];
        for (m, c) in image.terms() {
            let k = standard.binary_search(m).expect("normal forms are spanned by standard monomials");
            row[k] = (c * BigRational::from_integer(den.clone())).to_integer();
        }
        rows.push(row);
    }
    Ok(rows)
}

mod linalg {
    use num_bigint::BigInt;
    use num_traits::{One, Zero};

    use crate::poly::{PrimeField, DEFAULT_PRIME};

    fn rank_mod(rows: &[Vec<BigInt>], fp: PrimeField) -> usize {
        let p = fp.modulus();
        let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| fp.from_bigint(x)).collect()).collect();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
            m.swap(rank, piv);
            let inv = pow_mod(m[rank][c], p - 2, p);
            for r in rank + 1..m.len() {
                if m[r][c] != 0 {
                    let f = (m[r][c] as u128 * inv as u128 % p as u128) as u64;
                    for k in c..cols {
                        let sub = (f as u128 * m[rank][k] as u128 % p as u128) as u64;
                        m[r][k] = (m[r][k] + p - sub) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = (acc as u128 * b as u128 % p as u128) as u64;
            }
            b = (b as u128 * b as u128 % p as u128) as u64;
            e >>= 1;
        }
        acc
    }

    /// Exact rank by fraction-free (Bareiss) elimination.
    fn rank_exact(mut m: Vec<Vec<BigInt>>) -> usize {
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        let mut prev = BigInt::one();
        for c in 0..cols {
            let Some(piv) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
            m.swap(rank, piv);
            for r in rank + 1..m.len() {
                for k in c + 1..cols {
                    let v = &m[rank][c] * &m[r][k] - &m[r][c] * &m[rank][k];
                    m[r][k] = v / &prev;
                }
                m[r][c] = BigInt::zero();
            }
            prev = m[rank][c].clone();
            rank += 1;
        }
        rank
    }

    /// Rank of an integer matrix. Full rank modulo a prime already proves
    /// full rank; otherwise the exact rank is computed.
    pub(super) fn rank(m: &[Vec<BigInt>]) -> usize {
        let full = m.len().min(m.first().map_or(0, Vec::len));
        if rank_mod(m, PrimeField::new(DEFAULT_PRIME)) == full {
            return full;
        }
        rank_exact(m.to_vec())
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
        }

        #[test]
        fn ranks() {
            assert_eq!(rank(&mat(&[&[1, 2], &[3, 4]])), 2);
            assert_eq!(rank(&mat(&[&[1, 2], &[2, 4]])), 1);
            assert_eq!(rank(&mat(&[&[0, 0], &[0, 0]])), 0);
            let big = DEFAULT_PRIME as i64;
            // singular modulo the prime but not over Z
            assert_eq!(rank(&mat(&[&[big, 0], &[0, 1]])), 2);
            assert_eq!(rank_exact(mat(&[&[0, 1, 2], &[0, 2, 4], &[1, 0, 0]])), 2);
            assert_eq!(rank_exact(mat(&[&[2, 4, 1], &[1, 2, 3], &[3, 6, 4]])), 2);
        }
    }
}

/// Decides whether the band functions at `alpha` have degenerate critical
/// points, by testing whether `1` lies in the ideal generated by
/// `f_1..f_4, z_1 u_1 - 1, z_2 u_2 - 1`.
pub fn degeneracy_test(
    sys: &DispersionSystem,
    alpha: &[i64],
    field: FieldChoice,
    opts: GroebnerOptions,
) -> Result<DegeneracyVerdict, CriticalError> {
    let start = Instant::now();
    let gens = sys.degenerate_ideal_generators(alpha)?;
    let first = match field {
        FieldChoice::Rational => FieldTag::Rational,
        FieldChoice::Prime(p) | FieldChoice::Screened(p) => FieldTag::Prime(p),
    };
    let mut used = first;
    let exact = |gens: &[Poly<Rationals>]| {
        let mut critical = gens.to_vec();
        let extra = critical.remove(sys.dimension + 1);
        rational_membership(&critical, &extra, opts)
    };
    let mut result = match first {
        FieldTag::Rational => exact(&gens)?,
        FieldTag::Prime(_) => membership_in(first, &gens, opts)?,
    };
    if matches!(field, FieldChoice::Screened(_)) && matches!(result, Membership::One) {
        used = FieldTag::Rational;
        result = exact(&gens)?;
    }
    let (status, quotient_dim, note) = match result {
        Membership::One => (Status::NondegenerateCertified, Some(QuotientDim::Finite(0)), None),
        Membership::Proper(d) => (Status::DegenerateWitnessed, Some(d), None),
        Membership::Budget(pairs) => (
            Status::Inconclusive,
            None,
            Some(format!("pair budget exhausted after {pairs} reductions")),
        ),
    };
    if used == FieldTag::Rational && first != FieldTag::Rational && status == Status::DegenerateWitnessed {
        log::warn!("prime {first} reported a unit ideal not confirmed over Q at alpha {alpha:?}");
    }
    Ok(DegeneracyVerdict {
        alpha: alpha.to_vec(),
        status,
        field: used,
        quotient_dim,
        seconds: start.elapsed().as_secs_f64(),
        note,
    })
}

/// Draws parameter vectors with entries uniform in `lo..=hi`.
pub fn draw_alphas(count: usize, arity: usize, seed: u64, range: (i64, i64)) -> Vec<Vec<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..arity).map(|_| rng.random_range(range.0..=range.1)).collect())
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub trials: usize,
    pub nondegenerate_certified: usize,
    pub degenerate_witnessed: usize,
    pub inconclusive: usize,
}

impl SampleSummary {
    pub fn from_verdicts(verdicts: &[DegeneracyVerdict]) -> Self {
        let mut s = SampleSummary {
            trials: verdicts.len(),
            ..Default::default()
        };
        for v in verdicts {
            match v.status {
                Status::NondegenerateCertified => s.nondegenerate_certified += 1,
                Status::DegenerateWitnessed => s.degenerate_witnessed += 1,
                Status::Inconclusive => s.inconclusive += 1,
            }
        }
        s
    }

    /// The status shared by every trial, if any.
    pub fn unanimous(&self) -> Option<Status> {
        [
            (self.nondegenerate_certified, Status::NondegenerateCertified),
            (self.degenerate_witnessed, Status::DegenerateWitnessed),
            (self.inconclusive, Status::Inconclusive),
        ]
        .into_iter()
        .find(|&(c, _)| c == self.trials && c > 0)
        .map(|(_, s)| s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleReport {
    pub seed: u64,
    pub range: (i64, i64),
    pub verdicts: Vec<DegeneracyVerdict>,
    pub summary: SampleSummary,
}

/// Runs [`degeneracy_test`] on `trials` seeded random parameter draws.
pub fn sample_test(
    sys: &DispersionSystem,
    trials: usize,
    seed: u64,
    range: (i64, i64),
    field: FieldChoice,
    opts: GroebnerOptions,
) -> Result<SampleReport, CriticalError> {
    if trials == 0 || range.0 > range.1 {
        return Err(CriticalError::EmptySample);
    }
    let alphas = draw_alphas(trials, sys.param_names().len(), seed, range);
    let verdicts = alphas
        .par_iter()
        .map(|a| degeneracy_test(sys, a, field, opts))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = SampleSummary::from_verdicts(&verdicts);
    Ok(SampleReport {
        seed,
        range,
        verdicts,
        summary,
    })
}

/// Number of critical points in `(C\0)^n x C` counted with multiplicity:
/// the dimension of the quotient by `f_1..f_{n+1}, z_j u_j - 1`.
pub fn count_critical_points(
    sys: &DispersionSystem,
    alpha: &[i64],
    field: FieldTag,
    opts: GroebnerOptions,
) -> Result<Result<QuotientDim, GroebnerError>, CriticalError> {
    let gens = sys.critical_ideal_generators(alpha)?;
    Ok(match membership_in(field, &gens, opts)? {
        Membership::One => Ok(QuotientDim::Finite(0)),
        Membership::Proper(d) => Ok(d),
        Membership::Budget(pairs) => Err(GroebnerError::BudgetExceeded { pairs }),
    })
}

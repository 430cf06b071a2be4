//! Floquet symbol of the weighted graph Laplacian
//! `L f(u) = sum over edges (u,v) of alpha(e) (f(u) - f(v))`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::PeriodicGraph;
use crate::poly::{Field, Monomial, Poly, PolyError, PolyMatrix, Rationals, Vars};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error("expected a 2x2 symbol, got {0}x{0}")]
    NotTwoByTwo(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Sign convention for the symbol.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// The positive semidefinite divergence-form operator.
    #[default]
    Divergence,
    /// Its negative: neighbour sum minus degree.
    AdjacencyMinusDegree,
}

/// Name of the j-th Floquet multiplier (1-based).
pub fn z_name(j: usize) -> String {
    format!("z{j}")
}

/// Square matrix of Laurent polynomials in `z1..zn` whose coefficients are
/// linear forms in the weight symbols. The ring is `z1..zn` followed by the
/// parameters still symbolic.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolMatrix {
    dimension: usize,
    params: Vec<String>,
    matrix: PolyMatrix<Rationals>,
}

/// `z^m * A` with the smallest `m` making every entry a polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct ClearedSymbol {
    pub matrix: PolyMatrix<Rationals>,
    pub multiplier: Monomial,
}

pub fn build_symbol(g: &PeriodicGraph, convention: Convention) -> Result<SymbolMatrix, SymbolError> {
    let n = g.dimension();
    let params = g.parameter_names();
    let mut names: Vec<String> = (1..=n).map(z_name).collect();
    names.extend(params.iter().cloned());
    let vars = Vars::new(&names)?;
    let f = Rationals;
    let size = g.vertices().len();
    let mut m = PolyMatrix::zeros(f, vars.clone(), size);
    let sign = match convention {
        Convention::Divergence => 1,
        Convention::AdjacencyMinusDegree => -1,
    };
    for (j, (e, &(u, v))) in g.edges().iter().zip(g.edge_ends()).enumerate() {
        let a = Monomial::var(n + j, 1);
        let mut up = [0i16; crate::poly::MAX_VARS];
        let mut down = [0i16; crate::poly::MAX_VARS];
        for (i, &s) in e.shift.iter().enumerate() {
            up[i] = s as i16;
            down[i] = -s as i16;
        }
        up[n + j] = 1;
        down[n + j] = 1;
        let weight = Poly::from_terms(f, vars.clone(), vec![(a, f.from_i64(sign))]);
        // entry (u,v) carries z^{-shift}, entry (v,u) carries z^{shift}
        let to_v = Poly::from_terms(f, vars.clone(), vec![(Monomial::from_exps(&down), f.from_i64(-sign))]);
        let to_u = Poly::from_terms(f, vars.clone(), vec![(Monomial::from_exps(&up), f.from_i64(-sign))]);
        *m.get_mut(u, u) = m.get(u, u) + &weight;
        *m.get_mut(v, v) = m.get(v, v) + &weight;
        *m.get_mut(u, v) = m.get(u, v) + &to_v;
        *m.get_mut(v, u) = m.get(v, u) + &to_u;
    }
    Ok(SymbolMatrix {
        dimension: n,
        params,
        matrix: m,
    })
}

impl SymbolMatrix {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn size(&self) -> usize {
        self.matrix.size()
    }

    pub fn vars(&self) -> &Vars {
        self.matrix.vars()
    }

    pub fn matrix(&self) -> &PolyMatrix<Rationals> {
        &self.matrix
    }

    /// Parameters that remain symbolic.
    pub fn param_names(&self) -> &[String] {
        &self.params
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly<Rationals> {
        self.matrix.get(i, j)
    }

    /// Substitutes values for all parameters.
    pub fn specialize(&self, alpha: &[BigRational]) -> Result<SymbolMatrix, SymbolError> {
        if alpha.len() != self.params.len() {
            return Err(PolyError::ArityMismatch {
                expected: self.params.len(),
                got: alpha.len(),
            }
            .into());
        }
        let bindings: Vec<(&str, BigRational)> = self
            .params
            .iter()
            .map(String::as_str)
            .zip(alpha.iter().cloned())
            .collect();
        let size = self.size();
        let mut rows = Vec::with_capacity(size);
        for i in 0..size {
            let mut row = Vec::with_capacity(size);
            for j in 0..size {
                row.push(self.get(i, j).specialize(&bindings)?);
            }
            rows.push(row);
        }
        let vars = Vars::new(&(1..=self.dimension).map(z_name).collect::<Vec<_>>())?;
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|p| p.embed(&vars)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SymbolMatrix {
            dimension: self.dimension,
            params: Vec::new(),
            matrix: PolyMatrix::from_rows(Rationals, vars, rows)?,
        })
    }

    pub fn specialize_int(&self, alpha: &[i64]) -> Result<SymbolMatrix, SymbolError> {
        let q: Vec<BigRational> = alpha.iter().map(|&a| BigRational::from_integer(BigInt::from(a))).collect();
        self.specialize(&q)
    }

    pub fn clear(&self) -> ClearedSymbol {
        let n = self.dimension;
        let mut exps = vec![0i16; self.vars().len()];
        for p in self.matrix.entries() {
            for (v, e) in exps.iter_mut().enumerate().take(n) {
                if let Some((lo, _)) = p.degree_range(v) {
                    *e = (*e).max(-lo);
                }
            }
        }
        let multiplier = Monomial::from_exps(&exps);
        ClearedSymbol {
            matrix: self.matrix.map(|p| p.mul_monomial(&multiplier)),
            multiplier,
        }
    }

    /// Trace and determinant of a 2x2 symbol.
    pub fn trace_det(&self) -> Result<(Poly<Rationals>, Poly<Rationals>), SymbolError> {
        if self.size() != 2 {
            return Err(SymbolError::NotTwoByTwo(self.size()));
        }
        Ok((self.matrix.trace(), self.matrix.det()))
    }

    /// Complex matrix at `z = exp(i k)` for real parameter values, row-major.
    pub fn eval_at(&self, alpha: &[f64], k: &[f64]) -> Vec<Complex64> {
        let mut point: Vec<Complex64> = k.iter().map(|&x| Complex64::from_polar(1.0, x)).collect();
        point.extend(alpha.iter().map(|&a| Complex64::new(a, 0.0)));
        self.matrix.entries().map(|p| p.eval_complex(&point)).collect()
    }

    pub fn render(&self) -> String {
        self.matrix.render()
    }
}

impl ClearedSymbol {
    pub fn render(&self) -> String {
        self.matrix.render()
    }

    /// The multiplier as text, e.g. `z1*z2`.
    pub fn render_multiplier(&self) -> String {
        let vars = self.matrix.vars();
        Poly::from_terms(Rationals, vars.clone(), vec![(self.multiplier, Rationals.one())]).render()
    }
}

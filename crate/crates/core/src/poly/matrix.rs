use super::field::Field;
use super::polynomial::{Poly, Vars};
use super::PolyError;

/// Dense square matrix with polynomial entries, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix<F: Field> {
    field: F,
    vars: Vars,
    size: usize,
    entries: Vec<Poly<F>>,
}

impl<F: Field> PolyMatrix<F> {
    pub fn zeros(field: F, vars: Vars, size: usize) -> Self {
        let entries = vec![Poly::zero(field.clone(), vars.clone()); size * size];
        PolyMatrix {
            field,
            vars,
            size,
            entries,
        }
    }

    /// Rows must form a square matrix over a common ring.
    pub fn from_rows(field: F, vars: Vars, rows: Vec<Vec<Poly<F>>>) -> Result<Self, PolyError> {
        let size = rows.len();
        let mut entries = Vec::with_capacity(size * size);
        for row in rows {
            if row.len() != size {
                return Err(PolyError::NotSquare {
                    rows: size,
                    cols: row.len(),
                });
            }
            for p in row {
                if p.vars() != &vars || p.field() != &field {
                    return Err(PolyError::VariableMismatch);
                }
                entries.push(p);
            }
        }
        Ok(PolyMatrix {
            field,
            vars,
            size,
            entries,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly<F> {
        &self.entries[i * self.size + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Poly<F> {
        &mut self.entries[i * self.size + j]
    }

    pub fn entries(&self) -> impl Iterator<Item = &Poly<F>> {
        self.entries.iter()
    }

    pub fn map(&self, f: impl Fn(&Poly<F>) -> Poly<F>) -> Self {
        PolyMatrix {
            field: self.field.clone(),
            vars: self.vars.clone(),
            size: self.size,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn trace(&self) -> Poly<F> {
        (0..self.size).fold(Poly::zero(self.field.clone(), self.vars.clone()), |acc, i| {
            &acc + self.get(i, i)
        })
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> Poly<F> {
        let idx: Vec<usize> = (0..self.size).collect();
        self.minor_det(&idx, 0)
    }

    fn minor_det(&self, cols: &[usize], row: usize) -> Poly<F> {
        match cols.len() {
            0 => Poly::one(self.field.clone(), self.vars.clone()),
            1 => self.get(row, cols[0]).clone(),
            2 => {
                let a = self.get(row, cols[0]) * self.get(row + 1, cols[1]);
                let b = self.get(row, cols[1]) * self.get(row + 1, cols[0]);
                &a - &b
            }
            _ => {
                let mut acc = Poly::zero(self.field.clone(), self.vars.clone());
                for (k, &c) in cols.iter().enumerate() {
                    let entry = self.get(row, c);
                    if entry.is_zero() {
                        continue;
                    }
                    let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = entry * &self.minor_det(&rest, row + 1);
                    acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
                }
                acc
            }
        }
    }

    /// One line per row, entries separated by `" | "`.
    pub fn render(&self) -> String {
        (0..self.size)
            .map(|i| {
                (0..self.size)
                    .map(|j| self.get(i, j).render())
                    .collect::<Vec<_>>()
                    .join(" | ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

//! Buchberger's algorithm with the sugar selection strategy and the
//! Gebauer–Möller installation of both Buchberger criteria.

use std::cmp::Ordering;

use log::{debug, trace};

use super::domain::ReductionDomain;
use super::{GroebnerError, GroebnerOptions, GroebnerStats};
use crate::poly::Monomial;

pub(crate) type Terms<E> = Vec<(Monomial, E)>;

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: i32,
}

pub(crate) struct Engine<D: ReductionDomain> {
    dom: D,
    polys: Vec<Terms<D::E>>,
    sugar: Vec<i32>,
    active: Vec<usize>,
    pairs: Vec<Pair>,
    opts: GroebnerOptions,
    pub(crate) stats: GroebnerStats,
}

pub(crate) enum Outcome<E> {
    /// A nonzero constant was produced: the ideal is the whole ring.
    Unit,
    /// Reduced basis, leading terms sorted ascending.
    Basis(Vec<Terms<E>>),
}

impl<D: ReductionDomain> Engine<D> {
    pub(crate) fn new(dom: D, opts: GroebnerOptions) -> Self {
        Engine {
            dom,
            polys: Vec::new(),
            sugar: Vec::new(),
            active: Vec::new(),
            pairs: Vec::new(),
            opts,
            stats: GroebnerStats::default(),
        }
    }

    fn lm(&self, i: usize) -> &Monomial {
        &self.polys[i][0].0
    }

    pub(crate) fn run(mut self, gens: Vec<Terms<D::E>>) -> Result<(Outcome<D::E>, GroebnerStats), GroebnerError> {
        let mut gens: Vec<_> = gens.into_iter().filter(|g| !g.is_empty()).collect();
        gens.sort_by(|a, b| a[0].0.cmp(&b[0].0));
        for g in gens {
            let g = self.reduce(g, &self.active.clone());
            if g.is_empty() {
                continue;
            }
            if g[0].0.is_one() {
                return Ok((Outcome::Unit, self.stats));
            }
            let sugar = g.iter().map(|(m, _)| m.degree()).max().unwrap_or(0);
            self.insert(g, sugar);
        }

        while let Some(pair) = self.select() {
            if self.stats.pairs_reduced >= self.opts.max_pair_reductions {
                return Err(GroebnerError::BudgetExceeded {
                    pairs: self.stats.pairs_reduced,
                });
            }
            self.stats.pairs_reduced += 1;
            let s = self.spoly(&pair);
            let h = self.reduce(s, &self.active.clone());
            if h.is_empty() {
                self.stats.zero_reductions += 1;
                continue;
            }
            if h[0].0.is_one() {
                debug!(
                    "unit reached after {} pairs, basis size {}",
                    self.stats.pairs_reduced,
                    self.active.len()
                );
                return Ok((Outcome::Unit, self.stats));
            }
            trace!(
                "pair ({}, {}) sugar {} -> new element of degree {} with {} terms",
                pair.i,
                pair.j,
                pair.sugar,
                h[0].0.degree(),
                h.len()
            );
            self.insert(h, pair.sugar);
            if self.stats.pairs_reduced.is_multiple_of(500) {
                debug!(
                    "{} pairs processed, {} pending, basis size {}",
                    self.stats.pairs_reduced,
                    self.pairs.len(),
                    self.active.len()
                );
            }
        }

        let basis = self.interreduce();
        self.stats.basis_size = basis.len();
        Ok((Outcome::Basis(basis), self.stats))
    }

    fn insert(&mut self, mut h: Terms<D::E>, sugar: i32) {
        self.dom.normalize(&mut h);
        let idx = self.polys.len();
        self.polys.push(h);
        self.sugar.push(sugar);
        self.update(idx);
        self.stats.max_basis = self.stats.max_basis.max(self.active.len());
    }

    /// Gebauer–Möller update for a new element `h`.
    fn update(&mut self, h: usize) {
        let lm_h = *self.lm(h);
        let mut candidates: Vec<(usize, Monomial)> = self
            .active
            .iter()
            .map(|&g| (g, lm_h.lcm(self.lm(g))))
            .collect();
        let mut kept: Vec<(usize, Monomial)> = Vec::new();
        while let Some((g1, l1)) = candidates.pop() {
            let disjoint = lm_h.coprime(self.lm(g1));
            let dominated = candidates.iter().any(|(_, l2)| l2.divides(&l1))
                || kept.iter().any(|(_, l2)| l2.divides(&l1));
            if disjoint || !dominated {
                kept.push((g1, l1));
            }
        }
        // Product criterion.
        kept.retain(|(g, _)| !lm_h.coprime(self.lm(*g)));

        // Chain criterion on old pairs.
        let polys = &self.polys;
        self.pairs.retain(|p| {
            let li = polys[p.i][0].0;
            let lj = polys[p.j][0].0;
            !(lm_h.divides(&p.lcm) && lm_h.lcm(&li) != p.lcm && lm_h.lcm(&lj) != p.lcm)
        });

        for (g, lcm) in kept {
            let sugar = (self.sugar[h] + lcm.degree() - lm_h.degree())
                .max(self.sugar[g] + lcm.degree() - self.lm(g).degree());
            self.pairs.push(Pair {
                i: g,
                j: h,
                lcm,
                sugar,
            });
        }

        let polys = &self.polys;
        self.active.retain(|&g| !lm_h.divides(&polys[g][0].0));
        self.active.push(h);
    }

    /// Removes and returns the pair of smallest sugar, ties broken by the
    /// smaller lcm.
    fn select(&mut self) -> Option<Pair> {
        let best = self
            .pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| match a.sugar.cmp(&b.sugar) {
                Ordering::Equal => a.lcm.cmp(&b.lcm),
                ord => ord,
            })
            .map(|(k, _)| k)?;
        Some(self.pairs.swap_remove(best))
    }

    fn spoly(&self, p: &Pair) -> Terms<D::E> {
        let (fi, fj) = (&self.polys[p.i], &self.polys[p.j]);
        let ti = p.lcm.div_unchecked(&fi[0].0);
        let tj = p.lcm.div_unchecked(&fj[0].0);
        let (a, b) = self.dom.cancel(&fi[0].1, &fj[0].1);
        combine(&self.dom, &fi[1..], &a, &ti, &fj[1..], &b, &tj)
    }

    fn find_reducer(&self, m: &Monomial, among: &[usize]) -> Option<usize> {
        let mut best: Option<usize> = None;
        for &g in among {
            if self.lm(g).divides(m) {
                match best {
                    Some(b) if self.polys[b].len() <= self.polys[g].len() => {}
                    _ => best = Some(g),
                }
            }
        }
        best
    }

    /// Full reduction of `f` modulo the polynomials indexed by `among`.
    fn reduce(&self, f: Terms<D::E>, among: &[usize]) -> Terms<D::E> {
        reduce_with(&self.dom, f, true, |m| {
            self.find_reducer(m, among).map(|g| self.polys[g].as_slice())
        })
    }

    fn interreduce(&mut self) -> Vec<Terms<D::E>> {
        let mut order = self.active.clone();
        order.sort_by(|&a, &b| self.lm(a).cmp(self.lm(b)));
        let mut out = Vec::with_capacity(order.len());
        for (k, &g) in order.iter().enumerate() {
            let others: Vec<usize> = order
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &x)| x)
                .collect();
            let head = self.polys[g][0].clone();
            let tail = self.polys[g][1..].to_vec();
            let tail = self.reduce_tail(tail, &others, &head.1);
            let mut full = Vec::with_capacity(tail.1.len() + 1);
            full.push((head.0, tail.0));
            full.extend(tail.1);
            self.dom.normalize(&mut full);
            out.push(full);
        }
        out
    }

    /// Reduces a tail while tracking the scaling applied to the head
    /// coefficient (needed over the integers).
    fn reduce_tail(&self, tail: Terms<D::E>, among: &[usize], head: &D::E) -> (D::E, Terms<D::E>) {
        let mut head = head.clone();
        let mut done: Terms<D::E> = Vec::new();
        let mut cur = tail;
        while !cur.is_empty() {
            let (m, c) = (cur[0].0, cur[0].1.clone());
            match self.find_reducer(&m, among) {
                None => {
                    done.push(cur.remove(0));
                }
                Some(g) => {
                    let g = &self.polys[g];
                    let t = m.div_unchecked(&g[0].0);
                    let (a, b) = self.dom.cancel(&c, &g[0].1);
                    if !self.dom.is_one(&a) {
                        head = self.dom.mul(&head, &a);
                        for (_, x) in done.iter_mut() {
                            *x = self.dom.mul(x, &a);
                        }
                    }
                    cur = combine(&self.dom, &cur[1..], &a, &Monomial::one(), &g[1..], &b, &t);
                }
            }
        }
        (head, done)
    }

    /// True when every S-polynomial of `basis` reduces to zero.
    pub(crate) fn verify(dom: D, basis: &[Terms<D::E>]) -> bool {
        let eng = Engine {
            dom,
            polys: basis.to_vec(),
            sugar: vec![0; basis.len()],
            active: (0..basis.len()).collect(),
            pairs: Vec::new(),
            opts: GroebnerOptions::default(),
            stats: GroebnerStats::default(),
        };
        let all: Vec<usize> = (0..basis.len()).collect();
        for i in 0..basis.len() {
            for j in (i + 1)..basis.len() {
                let lcm = eng.lm(i).lcm(eng.lm(j));
                let s = eng.spoly(&Pair { i, j, lcm, sugar: 0 });
                if !eng.reduce(s, &all).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// `a * t1 * f - b * t2 * g`, both inputs sorted descending.
fn combine<D: ReductionDomain>(
    dom: &D,
    f: &[(Monomial, D::E)],
    a: &D::E,
    t1: &Monomial,
    g: &[(Monomial, D::E)],
    b: &D::E,
    t2: &Monomial,
) -> Terms<D::E> {
    let scale_f = !dom.is_one(a);
    let shift_f = !t1.is_one();
    let mut out = Vec::with_capacity(f.len() + g.len());
    let (mut i, mut j) = (0, 0);
    let fm = |k: usize| if shift_f { f[k].0.mul(t1) } else { f[k].0 };
    let fc = |k: usize| if scale_f { dom.mul(&f[k].1, a) } else { f[k].1.clone() };
    let mut next_f = (!f.is_empty()).then(|| fm(0));
    let mut next_g = (!g.is_empty()).then(|| g[0].0.mul(t2));
    loop {
        match (next_f, next_g) {
            (None, None) => break,
            (Some(mf), Some(mg)) if mf == mg => {
                let c = dom.sub(&fc(i), &dom.mul(&g[j].1, b));
                if !dom.is_zero(&c) {
                    out.push((mf, c));
                }
                i += 1;
                j += 1;
                next_f = (i < f.len()).then(|| fm(i));
                next_g = (j < g.len()).then(|| g[j].0.mul(t2));
            }
            (Some(mf), mg) if mg.is_none_or(|mg| mf > mg) => {
                out.push((mf, fc(i)));
                i += 1;
                next_f = (i < f.len()).then(|| fm(i));
            }
            (_, Some(mg)) => {
                out.push((mg, dom.neg(&dom.mul(&g[j].1, b))));
                j += 1;
                next_g = (j < g.len()).then(|| g[j].0.mul(t2));
            }
            (Some(_), None) => unreachable!(),
        }
    }
    out
}

/// Generic full reduction; `reducer(m)` returns a polynomial whose leading
/// monomial divides `m`, if any.
pub(crate) fn reduce_with<'a, D: ReductionDomain + 'a>(
    dom: &D,
    f: Terms<D::E>,
    normalize: bool,
    reducer: impl Fn(&Monomial) -> Option<&'a [(Monomial, D::E)]>,
) -> Terms<D::E> {
    let mut done: Terms<D::E> = Vec::new();
    let mut cur = f;
    let mut pos = 0;
    let mut steps = 0usize;
    while pos < cur.len() {
        let m = cur[pos].0;
        match reducer(&m) {
            None => {
                pos += 1;
            }
            Some(g) => {
                // Terms before `pos` are irreducible; move them out.
                if pos > 0 {
                    done.extend(cur.drain(..pos));
                    pos = 0;
                }
                let t = m.div_unchecked(&g[0].0);
                let (a, b) = dom.cancel(&cur[0].1, &g[0].1);
                if !dom.is_one(&a) {
                    for (_, x) in done.iter_mut() {
                        *x = dom.mul(x, &a);
                    }
                }
                cur = combine(dom, &cur[1..], &a, &Monomial::one(), &g[1..], &b, &t);
                steps += 1;
                if dom.normalize_during_reduction() && steps.is_multiple_of(16) {
                    let split = done.len();
                    done.append(&mut cur);
                    dom.normalize(&mut done);
                    cur = done.split_off(split);
                }
            }
        }
    }
    done.extend(cur);
    if normalize && !done.is_empty() {
        dom.normalize(&mut done);
    }
    done
}

//! Exhaustive degeneracy census over the edge subsets of a periodic graph.
//!
//! A subset `S` is encoded as a bitmask whose bit `j` selects edge class `j`.
//! Each subset is tested by specializing the full system with the weights
//! outside `S` set to zero.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::critical::{build_system, degeneracy_test, CriticalError, DispersionSystem, FieldChoice, Status};
use crate::graph::{PeriodicGraph, FIGURE_TO_CANONICAL};
use crate::groebner::GroebnerOptions;
use crate::poly::FieldTag;
use crate::symbol::{build_symbol, Convention, SymbolError};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("at least one trial per subset is required")]
    NoTrials,
    #[error("empty weight range {0}..={1}")]
    BadRange(i64, i64),
    #[error("graph has {0} edge classes; sweeps support at most 16")]
    TooManyEdges(usize),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Critical(#[from] CriticalError),
    #[error("degenerate family is not closed under subsets: {sub:#x} missing below {sup:#x}")]
    NotSimplicial { sub: u32, sup: u32 },
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub trials: usize,
    pub seed: u64,
    pub range: (i64, i64),
    /// Prime used for the per-trial screening.
    pub prime: u64,
    /// Re-test boundary subsets over Q.
    pub confirm: bool,
    pub groebner: GroebnerOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            trials: 10,
            seed: 1,
            range: (1, 50),
            prime: crate::critical::screening_prime(),
            confirm: true,
            groebner: GroebnerOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsetClass {
    Degenerate,
    Nondegenerate,
    /// Some trial was inconclusive.
    Unresolved,
    /// Trials disagreed; impossible in theory and reported as a failure.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalCheck {
    pub alpha: Vec<i64>,
    pub status: Status,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetRecord {
    pub mask: u32,
    /// One-based edge class indices.
    pub edges: Vec<usize>,
    pub verdicts: Vec<Status>,
    pub class: SubsetClass,
    pub degenerate: bool,
    pub connected: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rational: Option<RationalCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub edge_count: usize,
    pub trials: usize,
    pub seed: u64,
    pub range: (i64, i64),
    pub field: FieldTag,
    pub subsets: Vec<SubsetRecord>,
    pub dsg: Vec<u32>,
    pub maximal: Vec<u32>,
    pub unresolved: Vec<u32>,
    pub mixed: Vec<u32>,
    pub disconnected: Vec<u32>,
    /// Maximal disconnected subsets that test nondegenerate.
    pub disconnected_outside_dsg: Vec<u32>,
    pub rational_disagreements: Vec<u32>,
}

impl SweepResult {
    pub fn dsg_size(&self) -> usize {
        self.dsg.len()
    }

    pub fn record(&self, mask: u32) -> Option<&SubsetRecord> {
        self.subsets.get(mask as usize)
    }

    /// Every degenerate subset is disconnected.
    pub fn dsg_within_disconnected(&self) -> bool {
        self.dsg.iter().all(|&m| !self.subsets[m as usize].connected)
    }
}

/// Weights for one subset: independent stream per `(seed, mask)`.
pub fn subset_alphas(arity: usize, mask: u32, trials: usize, seed: u64, range: (i64, i64)) -> Vec<Vec<i64>> {
    let stream = seed ^ (mask as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    (0..trials)
        .map(|_| {
            (0..arity)
                .map(|j| {
                    let w = rng.random_range(range.0..=range.1);
                    if mask >> j & 1 == 1 {
                        w
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mask_edges(mask: u32) -> Vec<usize> {
    (0..32).filter(|j| mask >> j & 1 == 1).map(|j| j + 1).collect()
}

pub fn classify(verdicts: &[Status]) -> SubsetClass {
    let has = |s| verdicts.contains(&s);
    if has(Status::Inconclusive) {
        SubsetClass::Unresolved
    } else if has(Status::DegenerateWitnessed) && has(Status::NondegenerateCertified) {
        SubsetClass::Mixed
    } else if has(Status::DegenerateWitnessed) {
        SubsetClass::Degenerate
    } else {
        SubsetClass::Nondegenerate
    }
}

/// Subsets with no proper superset in `family`, by popcount then value.
pub fn maximal_elements(family: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = family
        .iter()
        .copied()
        .filter(|&s| !family.iter().any(|&t| t != s && t & s == s))
        .collect();
    out.sort_by_key(|&m| (m.count_ones(), m));
    out.dedup();
    out
}

/// Minimal elements, by popcount then value.
pub fn minimal_elements(family: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = family
        .iter()
        .copied()
        .filter(|&s| !family.iter().any(|&t| t != s && t & s == t))
        .collect();
    out.sort_by_key(|&m| (m.count_ones(), m));
    out.dedup();
    out
}

/// Downward closure check; on failure returns `(T, S)` with `T ⊂ S`,
/// `S` in the family and `T` not.
pub fn check_simplicial(family: &[u32]) -> Result<(), (u32, u32)> {
    let set: std::collections::HashSet<u32> = family.iter().copied().collect();
    let mut sorted: Vec<u32> = set.iter().copied().collect();
    sorted.sort_by_key(|&m| (m.count_ones(), m));
    for &s in &sorted {
        // Closure under removing single elements suffices by induction.
        for j in (0..32).rev().filter(|j| s >> j & 1 == 1) {
            let t = s & !(1 << j);
            if !set.contains(&t) {
                return Err((t, s));
            }
        }
    }
    Ok(())
}

/// Figure labels (one-based) of the edge classes in `mask`, sorted, for a
/// nine-class mother graph.
pub fn figure_labels(mask: u32) -> Vec<usize> {
    let mut out: Vec<usize> = FIGURE_TO_CANONICAL
        .iter()
        .enumerate()
        .filter(|&(_, &slot)| mask >> slot & 1 == 1)
        .map(|(label, _)| label + 1)
        .collect();
    out.sort_unstable();
    out
}

/// One line per edge class of the subgraph.
pub fn render_subgraph(g: &PeriodicGraph, mask: u32) -> String {
    let mut out = String::new();
    for (j, e) in g.edges().iter().enumerate() {
        if mask >> j & 1 == 1 {
            let shift: Vec<String> = e.shift.iter().map(|s| s.to_string()).collect();
            out.push_str(&format!("  {:<8} {}-{} ({})\n", e.param, e.from, e.to, shift.join(",")));
        }
    }
    out
}

fn test_subset(
    sys: &DispersionSystem,
    g: &PeriodicGraph,
    mask: u32,
    opts: &SweepOptions,
) -> Result<SubsetRecord, SweepError> {
    let arity = g.edges().len();
    let mut verdicts = Vec::with_capacity(opts.trials);
    for alpha in subset_alphas(arity, mask, opts.trials, opts.seed, opts.range) {
        let v = degeneracy_test(sys, &alpha, FieldChoice::Prime(opts.prime), opts.groebner)?;
        verdicts.push(v.status);
    }
    let class = classify(&verdicts);
    Ok(SubsetRecord {
        mask,
        edges: mask_edges(mask),
        verdicts,
        class,
        degenerate: class == SubsetClass::Degenerate,
        connected: g.subgraph_mask(mask as u64).expect("mask within range").is_connected(),
        rational: None,
    })
}

pub fn run_sweep(g: &PeriodicGraph, opts: &SweepOptions) -> Result<SweepResult, SweepError> {
    if opts.trials == 0 {
        return Err(SweepError::NoTrials);
    }
    if opts.range.0 > opts.range.1 {
        return Err(SweepError::BadRange(opts.range.0, opts.range.1));
    }
    let arity = g.edges().len();
    if arity > 16 {
        return Err(SweepError::TooManyEdges(arity));
    }
    let start = Instant::now();
    let sys = build_system(&build_symbol(g, Convention::default())?)?;
    let masks: Vec<u32> = (0..1u32 << arity).collect();
    let mut subsets = masks
        .par_iter()
        .map(|&m| test_subset(&sys, g, m, opts))
        .collect::<Result<Vec<_>, _>>()?;
    log::info!("screened {} subsets in {:.1?}", subsets.len(), start.elapsed());

    let select = |subsets: &[SubsetRecord], c: SubsetClass| -> Vec<u32> {
        subsets.iter().filter(|r| r.class == c).map(|r| r.mask).collect()
    };
    let mut rational_disagreements = Vec::new();
    if opts.confirm {
        let start = Instant::now();
        let dsg = select(&subsets, SubsetClass::Degenerate);
        let outside = select(&subsets, SubsetClass::Nondegenerate);
        let mut boundary = maximal_elements(&dsg);
        boundary.extend(minimal_elements(&outside));
        let checks = boundary
            .par_iter()
            .map(|&m| {
                let alpha = subset_alphas(arity, m, 1, opts.seed, opts.range).remove(0);
                let v = degeneracy_test(&sys, &alpha, FieldChoice::Rational, opts.groebner)?;
                let expected = subsets[m as usize].verdicts[0];
                Ok((
                    m,
                    RationalCheck {
                        alpha,
                        status: v.status,
                        agrees: v.status == expected,
                    },
                ))
            })
            .collect::<Result<Vec<_>, SweepError>>()?;
        for (m, check) in checks {
            if !check.agrees {
                log::warn!("subset {m:#x}: rational verdict {:?} disagrees with screening", check.status);
                rational_disagreements.push(m);
                let rec = &mut subsets[m as usize];
                rec.class = classify(&[check.status]);
                rec.degenerate = rec.class == SubsetClass::Degenerate;
            }
            subsets[m as usize].rational = Some(check);
        }
        log::info!("confirmed {} boundary subsets over Q in {:.1?}", boundary.len(), start.elapsed());
    }

    let dsg = select(&subsets, SubsetClass::Degenerate);
    if let Err((sub, sup)) = check_simplicial(&dsg) {
        return Err(SweepError::NotSimplicial { sub, sup });
    }
    let maximal = maximal_elements(&dsg);
    let disconnected: Vec<u32> = subsets.iter().filter(|r| !r.connected).map(|r| r.mask).collect();
    let disconnected_outside_dsg = maximal_elements(&disconnected)
        .into_iter()
        .filter(|&m| !subsets[m as usize].degenerate)
        .collect();
    Ok(SweepResult {
        edge_count: arity,
        trials: opts.trials,
        seed: opts.seed,
        range: opts.range,
        field: FieldTag::Prime(opts.prime),
        unresolved: select(&subsets, SubsetClass::Unresolved),
        mixed: select(&subsets, SubsetClass::Mixed),
        subsets,
        dsg,
        maximal,
        disconnected,
        disconnected_outside_dsg,
        rational_disagreements,
    })
}

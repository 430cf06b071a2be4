//! Band functions of a two-atomic Z^2-periodic operator on the Brillouin
//! torus: sampling, critical points, spectral bands and surface export.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::PeriodicGraph;
use crate::symbol::{build_symbol, Convention, SymbolError};

#[derive(Debug, Error)]
pub enum BandError {
    #[error("band analysis needs two vertex orbits, got {0}")]
    NotTwoAtomic(usize),
    #[error("band analysis needs a Z^2-periodic graph, got dimension {0}")]
    NotPlanar(usize),
    #[error("grid resolution must be at least 8, got {0}")]
    Resolution(usize),
    #[error("weight {0} is not a finite real number")]
    BadWeight(f64),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Numerical thresholds for band analysis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandOptions {
    /// Grid points per axis.
    pub n: usize,
    /// Lower corner of the sampled window in each coordinate.
    pub origin: f64,
    /// Bands closer than this (relative to `1 + |lambda|`) count as crossing.
    pub tol_crossing: f64,
    /// `|det H| <= tol_hessian * |H|^2` counts as degenerate.
    pub tol_hessian: f64,
    pub grad_tol: f64,
    pub max_newton: usize,
    pub dedup_radius: f64,
    pub isolation_radius: f64,
    /// Two extremal values closer than this (relative) are the same level.
    pub level_tol: f64,
    pub fd_step: f64,
}

impl Default for BandOptions {
    fn default() -> Self {
        Self {
            n: 128,
            origin: -PI,
            tol_crossing: 1e-8,
            tol_hessian: 1e-7,
            grad_tol: 1e-9,
            max_newton: 50,
            dedup_radius: 1e-6,
            isolation_radius: 1e-3,
            level_tol: 1e-8,
            fd_step: 2e-4,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Term {
    c: f64,
    m: [f64; 2],
}

/// Values and derivatives of a trigonometric polynomial at one point.
#[derive(Clone, Copy, Debug, Default)]
struct Jet {
    v: f64,
    g: [f64; 2],
    h: [[f64; 2]; 2],
}

fn jet(terms: &[Term], k: [f64; 2]) -> Jet {
    let mut j = Jet::default();
    for t in terms {
        let (s, c) = (t.m[0] * k[0] + t.m[1] * k[1]).sin_cos();
        j.v += t.c * c;
        for a in 0..2 {
            j.g[a] -= t.c * t.m[a] * s;
            for b in 0..2 {
                j.h[a][b] -= t.c * t.m[a] * t.m[b] * c;
            }
        }
    }
    j
}

/// Trace and determinant of the symbol as real trigonometric polynomials
/// in the quasimomentum `k`, with `z = exp(i k)`.
#[derive(Clone, Debug)]
pub struct BandModel {
    trace: Vec<Term>,
    det: Vec<Term>,
    weight_sum: f64,
}

fn terms_of(p: &crate::poly::Poly<crate::poly::Rationals>) -> Vec<Term> {
    p.terms()
        .iter()
        .map(|(m, c)| Term {
            c: c.to_f64().unwrap_or(f64::NAN),
            m: [f64::from(m.exp(0)), f64::from(m.exp(1))],
        })
        .collect()
}

impl BandModel {
    pub fn new(g: &PeriodicGraph, alpha: &[f64], convention: Convention) -> Result<Self, BandError> {
        if g.vertices().len() != 2 {
            return Err(BandError::NotTwoAtomic(g.vertices().len()));
        }
        if g.dimension() != 2 {
            return Err(BandError::NotPlanar(g.dimension()));
        }
        let exact = alpha
            .iter()
            .map(|&a| BigRational::from_float(a).ok_or(BandError::BadWeight(a)))
            .collect::<Result<Vec<_>, _>>()?;
        let symbol = build_symbol(g, convention)?.specialize(&exact)?;
        let (t, d) = symbol.trace_det()?;
        Ok(Self {
            trace: terms_of(&t),
            det: terms_of(&d),
            weight_sum: alpha.iter().map(|a| a.abs()).sum(),
        })
    }

    /// Sum of the absolute weights, which bounds `|lambda| / 2`.
    pub fn weight_sum(&self) -> f64 {
        self.weight_sum
    }

    /// Trace and determinant at `k`.
    pub fn trace_det(&self, k: [f64; 2]) -> (f64, f64) {
        (jet(&self.trace, k).v, jet(&self.det, k).v)
    }

    /// `T^2 - 4D`, clamped at zero.
    pub fn discriminant(&self, k: [f64; 2]) -> f64 {
        let (t, d) = self.trace_det(k);
        (t * t - 4.0 * d).max(0.0)
    }

    /// Both band values at `k`, increasing.
    pub fn eigenvalues(&self, k: [f64; 2]) -> [f64; 2] {
        let (t, d) = self.trace_det(k);
        let r = (t * t - 4.0 * d).max(0.0).sqrt();
        [(t - r) / 2.0, (t + r) / 2.0]
    }

    /// `lambda_band(k)` for `band` in `{1, 2}`.
    pub fn value(&self, k: [f64; 2], band: usize) -> f64 {
        self.eigenvalues(k)[band - 1]
    }

    /// Gradient of a band from implicit differentiation of
    /// `lambda^2 - lambda T + D = 0`.
    pub fn gradient(&self, k: [f64; 2], band: usize) -> [f64; 2] {
        self.band_jet(k, band).g
    }

    /// Analytic Hessian of a band, valid away from crossings.
    pub fn hessian(&self, k: [f64; 2], band: usize) -> [[f64; 2]; 2] {
        self.band_jet(k, band).h
    }

    fn band_jet(&self, k: [f64; 2], band: usize) -> Jet {
        let t = jet(&self.trace, k);
        let d = jet(&self.det, k);
        let lam = self.value(k, band);
        let den = 2.0 * lam - t.v;
        let mut out = Jet {
            v: lam,
            ..Jet::default()
        };
        for a in 0..2 {
            out.g[a] = (lam * t.g[a] - d.g[a]) / den;
        }
        for a in 0..2 {
            for b in 0..2 {
                out.h[a][b] = (out.g[b] * t.g[a] + lam * t.h[a][b] - d.h[a][b] - out.g[a] * (2.0 * out.g[b] - t.g[b])) / den;
            }
        }
        out
    }

    fn discriminant_jet(&self, k: [f64; 2]) -> Jet {
        let t = jet(&self.trace, k);
        let d = jet(&self.det, k);
        let mut out = Jet {
            v: t.v * t.v - 4.0 * d.v,
            ..Jet::default()
        };
        for a in 0..2 {
            out.g[a] = 2.0 * t.v * t.g[a] - 4.0 * d.g[a];
            for b in 0..2 {
                out.h[a][b] = 2.0 * t.g[a] * t.g[b] + 2.0 * t.v * t.h[a][b] - 4.0 * d.h[a][b];
            }
        }
        out
    }

    /// Central-difference Hessian of a band.
    pub fn fd_hessian(&self, k: [f64; 2], band: usize, h: f64) -> [[f64; 2]; 2] {
        let f = |dx: f64, dy: f64| self.value([k[0] + dx, k[1] + dy], band);
        let c = f(0.0, 0.0);
        let hxx = (f(h, 0.0) - 2.0 * c + f(-h, 0.0)) / (h * h);
        let hyy = (f(0.0, h) - 2.0 * c + f(0.0, -h)) / (h * h);
        let hxy = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        [[hxx, hxy], [hxy, hyy]]
    }
}

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI {
        -PI
    } else {
        y
    }
}

pub fn torus_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = wrap(a[0] - b[0]);
    let dy = wrap(a[1] - b[1]);
    dx.hypot(dy)
}

/// Sampled bands on an `n x n` grid, row-major with `k1` varying slowest.
#[derive(Clone, Debug)]
pub struct BandGrid {
    pub n: usize,
    pub origin: f64,
    pub lambda1: Vec<f64>,
    pub lambda2: Vec<f64>,
    /// Bands within the crossing tolerance at this grid point.
    pub touching: Vec<bool>,
}

impl BandGrid {
    pub fn step(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn k(&self, i: usize, j: usize) -> [f64; 2] {
        let h = self.step();
        [self.origin + i as f64 * h, self.origin + j as f64 * h]
    }

    pub fn band(&self, band: usize) -> &[f64] {
        if band == 1 {
            &self.lambda1
        } else {
            &self.lambda2
        }
    }

    fn at(&self, band: usize, i: isize, j: isize) -> f64 {
        let n = self.n as isize;
        self.band(band)[(i.rem_euclid(n) * n + j.rem_euclid(n)) as usize]
    }

    /// CSV with header `k1,k2,lambda1,lambda2`, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.n * self.n * 80);
        s.push_str("k1,k2,lambda1,lambda2\n");
        for i in 0..self.n {
            for j in 0..self.n {
                let k = self.k(i, j);
                let idx = i * self.n + j;
                writeln!(
                    s,
                    "{:.11e},{:.11e},{:.11e},{:.11e}",
                    k[0], k[1], self.lambda1[idx], self.lambda2[idx]
                )
                .unwrap();
            }
        }
        s
    }
}

pub fn eval_bands(model: &BandModel, opts: &BandOptions) -> Result<BandGrid, BandError> {
    if opts.n < 8 {
        return Err(BandError::Resolution(opts.n));
    }
    let n = opts.n;
    let h = 2.0 * PI / n as f64;
    let rows: Vec<Vec<([f64; 2], bool)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    let k = [opts.origin + i as f64 * h, opts.origin + j as f64 * h];
                    let l = model.eigenvalues(k);
                    (l, l[1] - l[0] <= opts.tol_crossing * (1.0 + l[1].abs()))
                })
                .collect()
        })
        .collect();
    let mut grid = BandGrid {
        n,
        origin: opts.origin,
        lambda1: Vec::with_capacity(n * n),
        lambda2: Vec::with_capacity(n * n),
        touching: Vec::with_capacity(n * n),
    };
    for (l, t) in rows.into_iter().flatten() {
        grid.lambda1.push(l[0]);
        grid.lambda2.push(l[1]);
        grid.touching.push(t);
    }
    Ok(grid)
}

pub fn export_surface(grid: &BandGrid, path: &Path) -> Result<(), BandError> {
    std::fs::write(path, grid.to_csv())?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointClass {
    Min,
    Max,
    Saddle,
    Degenerate,
    Crossing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub k: [f64; 2],
    pub band: usize,
    pub lambda: f64,
    pub class: PointClass,
    pub grad_norm: f64,
    pub hessian: [[f64; 2]; 2],
    pub hessian_det: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DroppedSeed {
    pub k: [f64; 2],
    pub band: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub points: Vec<CriticalPoint>,
    /// Bands constant over the torus; every point of these is critical.
    pub flat_bands: Vec<usize>,
    pub dropped: Vec<DroppedSeed>,
}

fn norm(g: [f64; 2]) -> f64 {
    g[0].hypot(g[1])
}

fn solve2(h: [[f64; 2]; 2], g: [f64; 2]) -> Option<[f64; 2]> {
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let scale = h.iter().flatten().map(|x| x * x).sum::<f64>();
    if det.abs() <= 1e-300 || det.abs() <= 1e-14 * scale {
        return None;
    }
    Some([
        (h[1][1] * g[0] - h[0][1] * g[1]) / det,
        (h[0][0] * g[1] - h[1][0] * g[0]) / det,
    ])
}

fn is_flat(values: &[f64]) -> bool {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi - lo <= 1e-10 * (1.0 + hi.abs().max(lo.abs()))
}

/// Grid points that are strict local extrema or saddles of a band over
/// their eight neighbours.
fn seeds(grid: &BandGrid, band: usize) -> Vec<(usize, usize)> {
    const RING: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1)];
    let mut out = Vec::new();
    for i in 0..grid.n {
        for j in 0..grid.n {
            let c = grid.at(band, i as isize, j as isize);
            let diffs: Vec<f64> = RING
                .iter()
                .map(|&(di, dj)| grid.at(band, i as isize + di, j as isize + dj) - c)
                .collect();
            if diffs.contains(&0.0) {
                continue;
            }
            let changes = (0..8).filter(|&r| (diffs[r] > 0.0) != (diffs[(r + 1) % 8] > 0.0)).count();
            let extremum = diffs.iter().all(|&d| d > 0.0) || diffs.iter().all(|&d| d < 0.0);
            if extremum || changes >= 4 {
                out.push((i, j));
            }
        }
    }
    out
}

enum Outcome {
    Point(CriticalPoint),
    Dropped(String),
}

fn near_crossing(model: &BandModel, k: [f64; 2]) -> bool {
    let (t, _) = model.trace_det(k);
    model.discriminant(k).sqrt() <= 1e-4 * (1.0 + t.abs())
}

/// Newton on the gradient of the discriminant, which vanishes to second
/// order where the bands cross.
fn locate_crossing(model: &BandModel, start: [f64; 2], band: usize, opts: &BandOptions) -> Option<CriticalPoint> {
    let mut k = start;
    for _ in 0..opts.max_newton {
        let j = model.discriminant_jet(k);
        let step = solve2(j.h, j.g)?;
        k = [k[0] - step[0], k[1] - step[1]];
        if norm(step) <= 1e-14 * (1.0 + norm(k)) {
            break;
        }
    }
    let k = [wrap(k[0]), wrap(k[1])];
    let (t, _) = model.trace_det(k);
    let gap = model.discriminant(k).sqrt();
    if gap > opts.tol_crossing * (1.0 + t.abs()) || torus_distance(k, start) > 0.5 {
        return None;
    }
    Some(CriticalPoint {
        k,
        band,
        lambda: t / 2.0,
        class: PointClass::Crossing,
        grad_norm: f64::NAN,
        hessian: [[f64::NAN; 2]; 2],
        hessian_det: f64::NAN,
    })
}

fn refine(model: &BandModel, start: [f64; 2], band: usize, step_cap: f64, opts: &BandOptions) -> Outcome {
    let mut k = start;
    for _ in 0..opts.max_newton {
        if near_crossing(model, k) {
            return match locate_crossing(model, k, band, opts) {
                Some(p) => Outcome::Point(p),
                None => Outcome::Dropped("approached a near-crossing that did not close".into()),
            };
        }
        let j = model.band_jet(k, band);
        if norm(j.g) <= opts.grad_tol {
            return Outcome::Point(classify(model, [wrap(k[0]), wrap(k[1])], band, norm(j.g), opts));
        }
        let Some(mut step) = solve2(j.h, j.g) else {
            return Outcome::Dropped("singular Hessian during Newton iteration".into());
        };
        let len = norm(step);
        if len > step_cap {
            step = [step[0] * step_cap / len, step[1] * step_cap / len];
        }
        k = [k[0] - step[0], k[1] - step[1]];
    }
    let g = norm(model.gradient(k, band));
    if g <= opts.grad_tol {
        return Outcome::Point(classify(model, [wrap(k[0]), wrap(k[1])], band, g, opts));
    }
    if let Some(p) = locate_crossing(model, start, band, opts) {
        return Outcome::Point(p);
    }
    Outcome::Dropped(format!("no convergence after {} Newton steps (|grad| = {g:.3e})", opts.max_newton))
}

fn classify(model: &BandModel, k: [f64; 2], band: usize, grad_norm: f64, opts: &BandOptions) -> CriticalPoint {
    let lambda = model.value(k, band);
    let (t, _) = model.trace_det(k);
    let gap = model.discriminant(k).sqrt();
    let hessian = model.fd_hessian(k, band, opts.fd_step);
    let det = hessian[0][0] * hessian[1][1] - hessian[0][1] * hessian[1][0];
    let size = hessian.iter().flatten().map(|x| x * x).sum::<f64>();
    let class = if gap <= opts.tol_crossing * (1.0 + t.abs()) {
        PointClass::Crossing
    } else if det.abs() <= opts.tol_hessian * size {
        PointClass::Degenerate
    } else if det < 0.0 {
        PointClass::Saddle
    } else if hessian[0][0] > 0.0 {
        PointClass::Min
    } else {
        PointClass::Max
    };
    CriticalPoint {
        k,
        band,
        lambda,
        class,
        grad_norm,
        hessian,
        hessian_det: det,
    }
}

pub fn find_critical_points(model: &BandModel, grid: &BandGrid, opts: &BandOptions) -> CriticalReport {
    let mut report = CriticalReport {
        points: Vec::new(),
        flat_bands: Vec::new(),
        dropped: Vec::new(),
    };
    for band in 1..=2 {
        if is_flat(grid.band(band)) {
            report.flat_bands.push(band);
            continue;
        }
        let found: Vec<((usize, usize), Outcome)> = seeds(grid, band)
            .into_par_iter()
            .map(|(i, j)| ((i, j), refine(model, grid.k(i, j), band, 2.0 * grid.step(), opts)))
            .collect();
        for ((i, j), outcome) in found {
            match outcome {
                Outcome::Point(p) => {
                    let dup = report
                        .points
                        .iter()
                        .any(|q| q.band == p.band && torus_distance(q.k, p.k) <= opts.dedup_radius);
                    if !dup {
                        report.points.push(p);
                    }
                }
                Outcome::Dropped(reason) => {
                    log::warn!("band {band}: seed at grid ({i}, {j}) dropped: {reason}");
                    report.dropped.push(DroppedSeed {
                        k: grid.k(i, j),
                        band,
                        reason,
                    });
                }
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeReport {
    pub value: f64,
    /// Bands with an extremum at this level.
    pub bands: Vec<usize>,
    /// Critical points of those bands at this level.
    pub locations: Vec<[f64; 2]>,
    /// Condition (1): a single band attains the value.
    pub single_band: bool,
    /// Condition (2): the extremal set is isolated points.
    pub isolated: bool,
    /// Condition (3): every extremum there has a nondegenerate Hessian.
    pub nondegenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub bands: [[f64; 2]; 2],
    pub gaps: Vec<[f64; 2]>,
    /// Endpoints of the connected components of the spectrum.
    pub edges: Vec<f64>,
    pub conjecture: Vec<EdgeReport>,
    pub flat_bands: Vec<usize>,
    /// All three conditions hold at every edge.
    pub conjecture_holds: bool,
}

pub fn spectral_summary(grid: &BandGrid, report: &CriticalReport, opts: &BandOptions) -> SpectralSummary {
    let mut bands = [[f64::INFINITY, f64::NEG_INFINITY]; 2];
    for (b, range) in bands.iter_mut().enumerate() {
        for &v in grid.band(b + 1) {
            range[0] = range[0].min(v);
            range[1] = range[1].max(v);
        }
        for p in report.points.iter().filter(|p| p.band == b + 1) {
            range[0] = range[0].min(p.lambda);
            range[1] = range[1].max(p.lambda);
        }
    }
    let same = |a: f64, b: f64| (a - b).abs() <= opts.level_tol * (1.0 + a.abs().max(b.abs()));
    let mut gaps = Vec::new();
    let mut edges = vec![bands[0][0]];
    if bands[0][1] < bands[1][0] && !same(bands[0][1], bands[1][0]) {
        gaps.push([bands[0][1], bands[1][0]]);
        edges.extend([bands[0][1], bands[1][0]]);
    }
    edges.push(bands[0][1].max(bands[1][1]));

    let conjecture: Vec<EdgeReport> = edges
        .iter()
        .map(|&e| {
            let attaining: Vec<usize> = (1..=2)
                .filter(|&b| same(bands[b - 1][0], e) || same(bands[b - 1][1], e))
                .collect();
            let at: Vec<&CriticalPoint> = report
                .points
                .iter()
                .filter(|p| attaining.contains(&p.band) && same(p.lambda, e))
                .collect();
            let flat = attaining.iter().any(|b| report.flat_bands.contains(b));
            let isolated = !flat
                && !at.is_empty()
                && at.iter().enumerate().all(|(i, p)| {
                    at[i + 1..]
                        .iter()
                        .all(|q| q.band != p.band || torus_distance(p.k, q.k) > opts.isolation_radius)
                });
            let nondegenerate = !flat
                && !at.is_empty()
                && at
                    .iter()
                    .all(|p| matches!(p.class, PointClass::Min | PointClass::Max));
            EdgeReport {
                value: e,
                single_band: attaining.len() == 1,
                bands: attaining,
                locations: at.iter().map(|p| p.k).collect(),
                isolated,
                nondegenerate,
            }
        })
        .collect();
    let conjecture_holds = conjecture.iter().all(|r| r.single_band && r.isolated && r.nondegenerate);
    SpectralSummary {
        bands,
        gaps,
        edges,
        conjecture,
        flat_bands: report.flat_bands.clone(),
        conjecture_holds,
    }
}

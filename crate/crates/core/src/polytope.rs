//! Lattice polytopes in Z^3: exact convex hulls, volumes, Minkowski sums and
//! mixed volumes, and the Bernstein bound for the critical-point system.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::critical::{CriticalError, DispersionSystem, LAMBDA};
use crate::poly::{Field, Poly};
use crate::symbol::z_name;

pub type Point = [i64; 3];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolytopeError {
    #[error("polytope needs at least one point")]
    Empty,
    #[error("the zero polynomial has no Newton polytope")]
    ZeroPolynomial,
    #[error("expected {expected} items, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error(transparent)]
    Critical(#[from] CriticalError),
}

/// A facet: `normal . x <= offset` on the polytope with equality on the
/// facet. Vertices are indices into [`LatticePolytope::vertices`], counter-
/// clockwise seen from outside.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub normal: Point,
    pub offset: i64,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct LatticePolytope {
    points: Vec<Point>,
    vertices: Vec<Point>,
    faces: Vec<Face>,
    dim: usize,
    six_volume: i128,
}

impl PartialEq for LatticePolytope {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for LatticePolytope {}

fn sub(a: Point, b: Point) -> [i128; 3] {
    [
        (a[0] - b[0]) as i128,
        (a[1] - b[1]) as i128,
        (a[2] - b[2]) as i128,
    ]
}

fn cross(a: [i128; 3], b: [i128; 3]) -> [i128; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [i128; 3], b: [i128; 3]) -> i128 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Sign of `p` relative to the plane through `a, b, c` oriented by
/// `(b - a) x (c - a)`.
fn side(a: Point, b: Point, c: Point, p: Point) -> i128 {
    dot(cross(sub(b, a), sub(c, a)), sub(p, a)).signum()
}

fn primitive(v: [i128; 3]) -> Point {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    let g = g.max(1);
    [(v[0] / g) as i64, (v[1] / g) as i64, (v[2] / g) as i64]
}

/// Strictly convex hull of coplanar points, counter-clockwise with respect to
/// `normal`.
fn polygon(points: &[Point], normal: [i128; 3]) -> Vec<Point> {
    // drop the coordinate where the normal is largest
    let k = (0..3).max_by_key(|&i| normal[i].abs()).unwrap();
    let (i, j) = match k {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by_key(|p| (p[i], p[j]));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let turn = |o: Point, a: Point, b: Point| {
        (a[i] - o[i]) as i128 * (b[j] - o[j]) as i128 - (a[j] - o[j]) as i128 * (b[i] - o[i]) as i128
    };
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    // (i, j, k) is a cyclic order, so counter-clockwise in (i, j) faces +e_k
    if normal[k] < 0 {
        hull.reverse();
    }
    hull
}

/// Triangles of the hull of `pts`, outward oriented. `pts` must not be
/// coplanar; `init` indexes four affinely independent points.
fn hull_triangles(pts: &[Point], init: [usize; 4]) -> Vec<[usize; 3]> {
    let [a, b, c, d] = init;
    let mut faces = Vec::new();
    for (mut f, opp) in [([a, b, c], d), ([a, b, d], c), ([a, c, d], b), ([b, c, d], a)] {
        if side(pts[f[0]], pts[f[1]], pts[f[2]], pts[opp]) > 0 {
            f.swap(1, 2);
        }
        faces.push(f);
    }
    for (i, &p) in pts.iter().enumerate() {
        if init.contains(&i) {
            continue;
        }
        let visible: Vec<bool> = faces
            .iter()
            .map(|f| side(pts[f[0]], pts[f[1]], pts[f[2]], p) > 0)
            .collect();
        if !visible.iter().any(|&v| v) {
            continue;
        }
        let mut edges = HashSet::new();
        for (f, _) in faces.iter().zip(&visible).filter(|(_, &v)| v) {
            edges.extend([(f[0], f[1]), (f[1], f[2]), (f[2], f[0])]);
        }
        let mut next: Vec<[usize; 3]> = faces
            .iter()
            .zip(&visible)
            .filter(|(_, &v)| !v)
            .map(|(f, _)| *f)
            .collect();
        for &(u, v) in &edges {
            if !edges.contains(&(v, u)) {
                next.push([u, v, i]);
            }
        }
        faces = next;
    }
    faces
}

impl LatticePolytope {
    /// Convex hull of `points`.
    pub fn new(points: impl IntoIterator<Item = Point>) -> Result<Self, PolytopeError> {
        let mut pts: Vec<Point> = points.into_iter().collect();
        pts.sort();
        pts.dedup();
        if pts.is_empty() {
            return Err(PolytopeError::Empty);
        }
        let p0 = pts[0];
        let Some(i1) = pts.iter().position(|&p| p != p0) else {
            return Ok(Self::flat(pts.clone(), pts, 0));
        };
        let dir = sub(pts[i1], p0);
        let Some(i2) = pts.iter().position(|&p| cross(dir, sub(p, p0)) != [0; 3]) else {
            // collinear and sorted, so the extremes are first and last
            let ends = vec![p0, *pts.last().unwrap()];
            return Ok(Self::flat(pts, ends, 1));
        };
        let normal = cross(dir, sub(pts[i2], p0));
        let Some(i3) = pts.iter().position(|&p| dot(normal, sub(p, p0)) != 0) else {
            let mut verts = polygon(&pts, normal);
            verts.sort();
            return Ok(Self::flat(pts, verts, 2));
        };

        let tris = hull_triangles(&pts, [0, i1, i2, i3]);
        let six_volume: i128 = tris
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| pts[i].map(i128::from));
                dot(a, cross(b, c))
            })
            .sum();

        let mut planes: BTreeMap<Point, BTreeSet<Point>> = BTreeMap::new();
        for t in &tris {
            let [a, b, c] = t.map(|i| pts[i]);
            let n = primitive(cross(sub(b, a), sub(c, a)));
            planes.entry(n).or_default().extend([a, b, c]);
        }
        // points lying on a facet but not at a triangle corner never matter
        // for the vertex set, which only needs each facet's extreme points
        let polys: Vec<(Point, Vec<Point>)> = planes
            .into_iter()
            .map(|(n, on)| {
                let on: Vec<Point> = on.into_iter().collect();
                (n, polygon(&on, n.map(i128::from)))
            })
            .collect();
        let mut vertices: Vec<Point> = polys.iter().flat_map(|(_, p)| p.iter().copied()).collect();
        vertices.sort();
        vertices.dedup();
        let faces = polys
            .into_iter()
            .map(|(normal, poly)| {
                let offset = dot(normal.map(i128::from), poly[0].map(i128::from)) as i64;
                let vertices = poly
                    .iter()
                    .map(|p| vertices.binary_search(p).expect("facet vertex is a vertex"))
                    .collect();
                Face { normal, offset, vertices }
            })
            .collect();
        Ok(Self {
            points: pts,
            vertices,
            faces,
            dim: 3,
            six_volume,
        })
    }

    fn flat(points: Vec<Point>, vertices: Vec<Point>, dim: usize) -> Self {
        Self {
            points,
            vertices,
            faces: Vec::new(),
            dim,
            six_volume: 0,
        }
    }

    /// The deduplicated generating points.
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Extreme points, sorted lexicographically.
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Facets with coplanar triangles merged. Empty unless full-dimensional.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Affine dimension of the hull.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn edge_count(&self) -> usize {
        match self.dim {
            0 => 0,
            1 => 1,
            2 => self.vertices.len(),
            _ => self.faces.iter().map(|f| f.vertices.len()).sum::<usize>() / 2,
        }
    }

    /// `V - E + F` of a full-dimensional polytope.
    pub fn euler_characteristic(&self) -> Option<i64> {
        (self.dim == 3).then(|| self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64)
    }

    /// Six times the volume, an integer for lattice polytopes.
    pub fn six_volume(&self) -> i128 {
        self.six_volume
    }

    pub fn volume(&self) -> BigRational {
        BigRational::new(BigInt::from(self.six_volume), BigInt::from(6))
    }

    pub fn contains(&self, p: Point) -> bool {
        if self.dim == 3 {
            return self
                .faces
                .iter()
                .all(|f| dot(f.normal.map(i128::from), p.map(i128::from)) <= f.offset as i128);
        }
        let extended = Self::new(self.vertices.iter().copied().chain([p])).expect("nonempty");
        extended.vertices == self.vertices
    }

    /// `self` contains `other`.
    pub fn contains_polytope(&self, other: &Self) -> bool {
        other.vertices.iter().all(|&p| self.contains(p))
    }

    pub fn translate(&self, by: Point) -> Self {
        self.map(|p| [p[0] + by[0], p[1] + by[1], p[2] + by[2]])
    }

    /// Image under a map of lattice points, for affine maps of Z^3.
    pub fn map(&self, f: impl Fn(Point) -> Point) -> Self {
        Self::new(self.vertices.iter().map(|&p| f(p))).expect("nonempty")
    }

    pub fn minkowski_sum(&self, other: &Self) -> Self {
        let sums = self
            .vertices
            .iter()
            .flat_map(|a| other.vertices.iter().map(move |b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]));
        Self::new(sums).expect("nonempty")
    }

    /// Vertex and facet lists in the OFF format.
    pub fn to_off(&self) -> String {
        let mut s = String::from("OFF\n");
        let edges = if self.dim == 3 { self.edge_count() } else { 0 };
        writeln!(s, "{} {} {}", self.vertices.len(), self.faces.len(), edges).unwrap();
        for v in &self.vertices {
            writeln!(s, "{} {} {}", v[0], v[1], v[2]).unwrap();
        }
        for f in &self.faces {
            write!(s, "{}", f.vertices.len()).unwrap();
            for i in &f.vertices {
                write!(s, " {i}").unwrap();
            }
            s.push('\n');
        }
        s
    }
}

/// Newton polytope of `p` in the coordinates named by `coords`.
pub fn newton_polytope<F: Field>(p: &Poly<F>, coords: &[&str]) -> Result<LatticePolytope, PolytopeError> {
    if coords.len() != 3 {
        return Err(PolytopeError::Arity {
            expected: 3,
            got: coords.len(),
        });
    }
    if p.is_zero() {
        return Err(PolytopeError::ZeroPolynomial);
    }
    let idx: Vec<usize> = coords
        .iter()
        .map(|c| p.vars().index(c).ok_or_else(|| PolytopeError::UnknownVariable(c.to_string())))
        .collect::<Result<_, _>>()?;
    LatticePolytope::new(
        p.terms()
            .iter()
            .map(|(m, _)| [idx[0], idx[1], idx[2]].map(|v| i64::from(m.exp(v)))),
    )
}

/// Mixed volume of three polytopes, normalized so that `MV(P, P, P) = 6 vol(P)`.
pub fn mixed_volume(polys: &[LatticePolytope]) -> Result<BigRational, PolytopeError> {
    if polys.len() != 3 {
        return Err(PolytopeError::Arity {
            expected: 3,
            got: polys.len(),
        });
    }
    let mut total = 0i128;
    for mask in 1u32..8 {
        let mut members = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| &polys[i]);
        let first = members.next().unwrap().clone();
        let sum = members.fold(first, |acc, p| acc.minkowski_sum(p));
        let sign = if (3 - mask.count_ones()) % 2 == 0 { 1 } else { -1 };
        total += sign * sum.six_volume();
    }
    Ok(BigRational::new(BigInt::from(total), BigInt::from(6)))
}

/// The coordinates `z1, z2, lambda` used for Newton polytopes.
pub fn bernstein_coords() -> [String; 3] {
    [z_name(1), z_name(2), LAMBDA.to_string()]
}

/// Newton polytopes of `f1, f2, f3` in `(z1, z2, lambda)`, either with the
/// weights symbolic (generic supports) or at `alpha`.
pub fn system_polytopes(sys: &DispersionSystem, alpha: Option<&[i64]>) -> Result<Vec<LatticePolytope>, PolytopeError> {
    if sys.dimension() != 2 {
        return Err(PolytopeError::Arity {
            expected: 2,
            got: sys.dimension(),
        });
    }
    let fs = match alpha {
        Some(a) => sys.specialize(a)?,
        None => sys.f().to_vec(),
    };
    let coords = bernstein_coords();
    let coords: Vec<&str> = coords.iter().map(String::as_str).collect();
    fs[..3].iter().map(|f| newton_polytope(f, &coords)).collect()
}

/// Mixed volume of the Newton polytopes of `f1, f2, f3`, which bounds the
/// number of isolated critical points in the torus.
pub fn bernstein_bound(sys: &DispersionSystem, alpha: Option<&[i64]>) -> Result<u64, PolytopeError> {
    let mv = mixed_volume(&system_polytopes(sys, alpha)?)?;
    let mv = mv.to_integer();
    Ok(u64::try_from(mv).expect("mixed volume of lattice polytopes is a nonnegative integer"))
}

/// Outcome of comparing the three Newton polytopes after moving the centre
/// of each base (its lowest facet in `lambda`) to the origin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RojasCheck {
    /// Base centres, as `[x, y, z, denominator]`.
    pub centers: Vec<[i64; 4]>,
    /// The translated second and third polytopes lie in the first.
    pub contained: bool,
    pub mixed_volume: String,
    pub six_volume_first: String,
    pub holds: bool,
}

fn base_center(p: &LatticePolytope) -> [i64; 4] {
    let low = p.vertices().iter().map(|v| v[2]).min().unwrap();
    let base: Vec<&Point> = p.vertices().iter().filter(|v| v[2] == low).collect();
    let n = base.len() as i64;
    let s = base.iter().fold([0i64; 3], |acc, v| [acc[0] + v[0], acc[1] + v[1], acc[2] + v[2]]);
    let g = s.iter().fold(n, |g, &x| g.gcd(&x));
    [s[0] / g, s[1] / g, s[2] / g, n / g]
}

pub fn rojas_check(polys: &[LatticePolytope]) -> Result<RojasCheck, PolytopeError> {
    if polys.len() != 3 {
        return Err(PolytopeError::Arity {
            expected: 3,
            got: polys.len(),
        });
    }
    let centers: Vec<[i64; 4]> = polys.iter().map(base_center).collect();
    let den = centers.iter().fold(1i64, |l, c| l.lcm(&c[3]));
    // scale everything by the common denominator so translations are integral
    let moved: Vec<LatticePolytope> = polys
        .iter()
        .zip(&centers)
        .map(|(p, c)| {
            let k = den / c[3];
            p.map(|v| [0, 1, 2].map(|i| den * v[i] - k * c[i]))
        })
        .collect();
    let contained = moved[0].contains_polytope(&moved[1]) && moved[0].contains_polytope(&moved[2]);
    let mv = mixed_volume(polys)?;
    let six = BigRational::from_integer(BigInt::from(polys[0].six_volume()));
    Ok(RojasCheck {
        centers,
        contained,
        holds: contained && mv == six,
        mixed_volume: mv.to_string(),
        six_volume_first: six.to_string(),
    })
}

/// A signed permutation of coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateMap {
    pub perm: [usize; 3],
    pub signs: [i64; 3],
}

impl CoordinateMap {
    pub fn apply(&self, p: Point) -> Point {
        [0, 1, 2].map(|i| self.signs[i] * p[self.perm[i]])
    }

    /// E.g. `(y, x, z)` for the swap of the first two coordinates.
    pub fn describe(&self, names: &[&str; 3]) -> String {
        let parts: Vec<String> = (0..3)
            .map(|i| format!("{}{}", if self.signs[i] < 0 { "-" } else { "" }, names[self.perm[i]]))
            .collect();
        format!("({})", parts.join(", "))
    }
}

/// Non-identity coordinate permutations, optionally with sign changes,
/// carrying `from` onto `to` up to a lattice translation.
pub fn find_reflections(from: &LatticePolytope, to: &LatticePolytope, with_signs: bool) -> Vec<CoordinateMap> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let sign_sets: Vec<[i64; 3]> = if with_signs {
        (0..8)
            .map(|m| [0, 1, 2].map(|i| if m >> i & 1 == 1 { -1 } else { 1 }))
            .collect()
    } else {
        vec![[1, 1, 1]]
    };
    let mut found = Vec::new();
    for perm in PERMS {
        for &signs in &sign_sets {
            let map = CoordinateMap { perm, signs };
            if perm == [0, 1, 2] && signs == [1, 1, 1] {
                continue;
            }
            let image = from.map(|p| map.apply(p));
            if image.vertices().len() != to.vertices().len() {
                continue;
            }
            let a = image.vertices()[0];
            let b = to.vertices()[0];
            let shifted = image.translate([b[0] - a[0], b[1] - a[1], b[2] - a[2]]);
            if shifted == *to {
                found.push(map);
            }
        }
    }
    found
}

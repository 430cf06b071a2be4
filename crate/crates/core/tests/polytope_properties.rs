use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use bloch_core::polytope::{mixed_volume, newton_polytope};
use bloch_core::poly::Monomial;
use bloch_core::*;

fn arb_points() -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(prop::array::uniform3(0i64..4), 4..9)
}

/// Full-dimensional random lattice polytope.
fn arb_polytope() -> impl Strategy<Value = LatticePolytope> {
    arb_points()
        .prop_filter_map("flat", |pts| LatticePolytope::new(pts).ok().filter(|p| p.dim() == 3))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn boxed(a: i64, b: i64, c: i64) -> LatticePolytope {
    let mut pts = Vec::new();
    for x in [0, a] {
        for y in [0, b] {
            for z in [0, c] {
                pts.push([x, y, z]);
            }
        }
    }
    LatticePolytope::new(pts).unwrap()
}

fn poly_with_support(vars: &Vars, pts: &[Point]) -> Poly<Rationals> {
    let terms = pts
        .iter()
        .enumerate()
        .map(|(i, p)| (Monomial::from_exps(&[p[0] as i16, p[1] as i16, p[2] as i16]), int(i as i64 + 1)))
        .collect();
    Poly::from_terms(Rationals, vars.clone(), terms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn mixed_volume_is_symmetric(p in arb_polytope(), q in arb_polytope(), r in arb_polytope()) {
        let base = mixed_volume(&[p.clone(), q.clone(), r.clone()]).unwrap();
        prop_assert_eq!(&base, &mixed_volume(&[q.clone(), p.clone(), r.clone()]).unwrap());
        prop_assert_eq!(&base, &mixed_volume(&[r, q, p]).unwrap());
        prop_assert!(base > int(0));
    }

    #[test]
    fn mixed_volume_diagonal(p in arb_polytope()) {
        let mv = mixed_volume(&[p.clone(), p.clone(), p.clone()]).unwrap();
        prop_assert_eq!(mv, int(p.six_volume() as i64));
    }

    #[test]
    fn mixed_volume_translation(p in arb_polytope(), q in arb_polytope(), r in arb_polytope(), t in prop::array::uniform3(-3i64..4)) {
        let base = mixed_volume(&[p.clone(), q.clone(), r.clone()]).unwrap();
        prop_assert_eq!(base, mixed_volume(&[p.translate(t), q, r]).unwrap());
    }

    #[test]
    fn mixed_volume_is_monotone(p in arb_polytope(), q in arb_polytope(), r in arb_polytope()) {
        let small = mixed_volume(&[p.clone(), q.clone(), r.clone()]).unwrap();
        let grown = mixed_volume(&[p.minkowski_sum(&q), q, r]).unwrap();
        prop_assert!(grown >= small);
    }

    #[test]
    fn volume_is_additive_under_scaling(p in arb_polytope(), k in 1i64..4) {
        let scaled = p.map(|v| v.map(|x| k * x));
        prop_assert_eq!(scaled.six_volume(), p.six_volume() * (k * k * k) as i128);
    }

    /// The Newton polytope of a product is the Minkowski sum.
    #[test]
    fn newton_of_product(a in arb_points(), b in arb_points()) {
        let vars = Vars::new(&["x", "y", "z"]).unwrap();
        let f = poly_with_support(&vars, &a);
        let g = poly_with_support(&vars, &b);
        let coords = ["x", "y", "z"];
        let lhs = newton_polytope(&(&f * &g), &coords).unwrap();
        let rhs = newton_polytope(&f, &coords).unwrap().minkowski_sum(&newton_polytope(&g, &coords).unwrap());
        prop_assert_eq!(lhs.vertices(), rhs.vertices());
    }

    #[test]
    fn hull_contains_its_points(pts in arb_points()) {
        if let Ok(p) = LatticePolytope::new(pts.clone()) {
            for q in &pts {
                prop_assert!(p.contains(*q));
            }
            for v in p.vertices() {
                prop_assert!(pts.contains(v));
            }
        }
    }
}

/// Boxes: MV is the permanent of the side-length matrix.
#[test]
fn boxes_oracle() {
    let sides = [[1, 2, 3], [2, 1, 1], [3, 1, 2]];
    let polys: Vec<_> = sides.iter().map(|s| boxed(s[0], s[1], s[2])).collect();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let permanent: i64 = perms
        .iter()
        .map(|p| (0..3).map(|i| sides[i][p[i]]).product::<i64>())
        .sum();
    assert_eq!(mixed_volume(&polys).unwrap(), int(permanent));
}

/// Standard simplices: MV of `a, b, c`-dilates is `abc`.
#[test]
fn simplex_oracle() {
    let simplex = |k: i64| LatticePolytope::new([[0, 0, 0], [k, 0, 0], [0, k, 0], [0, 0, k]]).unwrap();
    assert_eq!(mixed_volume(&[simplex(1), simplex(2), simplex(3)]).unwrap(), int(6));
    assert_eq!(simplex(2).volume(), BigRational::new(BigInt::from(8), BigInt::from(6)));
}

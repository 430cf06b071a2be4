use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

use bloch_core::critical::LAMBDA;
use bloch_core::*;

fn mother_system() -> DispersionSystem {
    build_system(&build_symbol(&mother(), Convention::Divergence).unwrap()).unwrap()
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn symbol_is_hermitian_and_kills_constants(
        alpha in prop::collection::vec(0.0f64..10.0, 9),
        k in prop::array::uniform2(-PI..PI),
    ) {
        let s = build_symbol(&mother(), Convention::Divergence).unwrap();
        let a = s.eval_at(&alpha, &k);
        let scale = 1.0 + alpha.iter().sum::<f64>();
        prop_assert!((a[1] - a[2].conj()).norm() <= 1e-12 * scale);
        prop_assert!(a[0].im.abs() <= 1e-12 * scale && a[3].im.abs() <= 1e-12 * scale);

        let a0 = s.eval_at(&alpha, &[0.0, 0.0]);
        prop_assert!((a0[0] + a0[1]).norm() <= 1e-12 * scale);
        prop_assert!((a0[2] + a0[3]).norm() <= 1e-12 * scale);
    }

    #[test]
    fn conventions_differ_by_sign(alpha in prop::collection::vec(0.0f64..10.0, 9), k in prop::array::uniform2(-PI..PI)) {
        let d = build_symbol(&mother(), Convention::Divergence).unwrap().eval_at(&alpha, &k);
        let m = build_symbol(&mother(), Convention::AdjacencyMinusDegree).unwrap().eval_at(&alpha, &k);
        for (x, y) in d.iter().zip(&m) {
            prop_assert!((x + y).norm() <= 1e-12);
        }
    }

    #[test]
    fn subgraph_symbols_match_zero_weights(mask in 0u64..512, alpha in prop::collection::vec(1i64..20, 9)) {
        let full = build_symbol(&mother(), Convention::Divergence).unwrap();
        let zeroed: Vec<i64> = alpha.iter().enumerate().map(|(j, &a)| if mask >> j & 1 == 1 { a } else { 0 }).collect();
        let sub_graph = mother().subgraph_mask(mask).unwrap();
        let sub = build_symbol(&sub_graph, Convention::Divergence).unwrap();
        let kept: Vec<i64> = (0..9).filter(|j| mask >> j & 1 == 1).map(|j| alpha[j]).collect();
        let lhs = full.specialize_int(&zeroed).unwrap();
        let rhs = sub.specialize_int(&kept).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let l = lhs.get(i, j).embed(rhs.vars()).unwrap();
                prop_assert_eq!(&l, rhs.get(i, j));
            }
        }
    }
}

/// Scaling weights and `lambda` by `t` scales `f_i` by `t^d` with
/// `d = 2, 2, 2, 4`.
#[test]
fn alpha_homogeneity() {
    let sys = mother_system();
    let degrees: [usize; 4] = [2, 2, 2, 4];
    let joint = sys.lambda_param_indices();
    for (f, &d) in sys.f().iter().zip(&degrees) {
        for (m, _) in f.terms() {
            let deg: i32 = joint.iter().map(|&v| m.exp(v) as i32).sum();
            assert_eq!(deg as usize, d, "term of {} outside degree {d}", f.render());
        }
    }

    // the same identity by evaluation at a rational point
    let vars = sys.vars().clone();
    let names = vars.names().to_vec();
    let lambda = vars.index(LAMBDA).unwrap();
    let base: Vec<BigRational> = (0..names.len()).map(|i| rat(i as i64 + 2)).collect();
    let t = rat(3);
    let mut scaled = base.clone();
    for &v in &joint {
        scaled[v] = &scaled[v] * &t;
    }
    assert!(joint.contains(&lambda));
    for (f, &d) in sys.f().iter().zip(&degrees) {
        let lhs = f.eval(&scaled).unwrap();
        let rhs = f.eval(&base).unwrap() * num_traits::pow(t.clone(), d);
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn system_polynomials_are_polynomial_and_saturated() {
    let sys = mother_system();
    for f in sys.f() {
        assert!(f.is_polynomial());
        let vars = f.vars();
        for j in 1..=2 {
            let z = vars.index(&symbol::z_name(j)).unwrap();
            // no spurious common factor of z_j
            assert!(f.terms().iter().any(|(m, _)| m.exp(z) == 0));
        }
    }
}

/// The characteristic polynomial vanishes at the eigenvalues of the
/// numerical symbol.
#[test]
fn first_equation_vanishes_on_spectrum() {
    let sys = mother_system();
    let alpha = [4, 1, 8, 7, 5, 1, 3, 2, 6];
    let f = sys.specialize(&alpha).unwrap();
    let model = BandModel::new(&mother(), &alpha.map(|a| a as f64), Convention::Divergence).unwrap();
    for &k in &[[0.3, -1.1], [2.0, 0.5], [-3.0, 3.0]] {
        for lam in model.eigenvalues(k) {
            let z: Vec<Complex64> = k.iter().map(|&x| Complex64::from_polar(1.0, x)).collect();
            let point = [Complex64::new(lam, 0.0), z[0], z[1], z[0].inv(), z[1].inv()];
            let v = f[0].eval_complex(&point);
            assert!(v.norm() <= 1e-9 * (1.0 + lam * lam), "f1 = {v} at k = {k:?}");
        }
    }
}

use std::collections::{HashSet, VecDeque};

use proptest::prelude::*;

use bloch_core::sweep::{check_simplicial, maximal_elements, run_sweep, SubsetClass, SweepOptions};
use bloch_core::*;

const R: i64 = 6;

/// Connectivity of the infinite graph judged on the finite window
/// `[-R, R]^2` of cells: the base copy of the first atom must reach every
/// atom of the base cell and the first atom of both neighbouring cells.
fn window_connected(g: &PeriodicGraph) -> bool {
    let atoms = g.vertices().len();
    let inside = |c: [i64; 2]| c[0].abs() <= R && c[1].abs() <= R;
    let start = ([0i64, 0], 0usize);
    let mut seen: HashSet<([i64; 2], usize)> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((cell, atom)) = queue.pop_front() {
        for (e, &(u, v)) in g.edges().iter().zip(g.edge_ends()) {
            let s = [e.shift[0] as i64, e.shift[1] as i64];
            let mut steps = Vec::new();
            if u == atom {
                steps.push(([cell[0] + s[0], cell[1] + s[1]], v));
            }
            if v == atom {
                steps.push(([cell[0] - s[0], cell[1] - s[1]], u));
            }
            for next in steps {
                if inside(next.0) && seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
    }
    (0..atoms).all(|a| seen.contains(&([0, 0], a))) && seen.contains(&([1, 0], 0)) && seen.contains(&([0, 1], 0))
}

#[test]
fn connectivity_agrees_with_window_search() {
    let g = mother();
    let mut disconnected = 0;
    for mask in 0..512u64 {
        let sub = g.subgraph_mask(mask).unwrap();
        let expected = window_connected(&sub);
        assert_eq!(sub.is_connected(), expected, "mask {mask:#x}");
        disconnected += usize::from(!expected);
    }
    assert_eq!(disconnected, 98);
}

#[test]
fn graph_json_round_trip() {
    for g in [mother(), graphene(), mother().subgraph_mask(0b1_0110_0101).unwrap()] {
        let back = PeriodicGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
    }
}

fn downward_closure(seeds: &[u32]) -> Vec<u32> {
    let mut out = HashSet::new();
    for &s in seeds {
        // enumerate all submasks of s
        let mut t = s;
        loop {
            out.insert(t);
            if t == 0 {
                break;
            }
            t = (t - 1) & s;
        }
    }
    out.into_iter().collect()
}

proptest! {
    #[test]
    fn closures_are_simplicial(seeds in prop::collection::vec(0u32..256, 0..6)) {
        let family = downward_closure(&seeds);
        prop_assert_eq!(check_simplicial(&family), Ok(()));
        let maximal = maximal_elements(&family);
        for &m in &maximal {
            prop_assert!(seeds.contains(&m));
        }
        let mut rebuilt = downward_closure(&maximal);
        let mut family = family;
        rebuilt.sort_unstable();
        family.sort_unstable();
        prop_assert_eq!(rebuilt, family);
    }

    #[test]
    fn removing_a_face_breaks_closure(seeds in prop::collection::vec(1u32..256, 1..6), pick in any::<prop::sample::Index>()) {
        let family = downward_closure(&seeds);
        let maximal = maximal_elements(&family);
        let inner: Vec<u32> = family.iter().copied().filter(|m| !maximal.contains(m)).collect();
        prop_assume!(!inner.is_empty());
        let gone = inner[pick.index(inner.len())];
        let broken: Vec<u32> = family.iter().copied().filter(|&m| m != gone).collect();
        let (t, s) = check_simplicial(&broken).unwrap_err();
        prop_assert!(t & s == t && t != s);
        prop_assert!(broken.contains(&s) && !broken.contains(&t));
    }
}

#[test]
fn maximal_elements_order() {
    assert_eq!(maximal_elements(&[0]), vec![0]);
    assert_eq!(maximal_elements(&[0, 1, 2, 3]), vec![3]);
    assert_eq!(maximal_elements(&[0, 1, 2, 4, 8, 6, 9]), vec![6, 9]);
}

/// The graphene sweep is small enough to run twice: the full graph is
/// generic, every proper subgraph is disconnected and degenerate.
#[test]
fn graphene_sweep_is_deterministic() {
    let opts = SweepOptions {
        trials: 3,
        seed: 9,
        ..SweepOptions::default()
    };
    let g = graphene();
    let a = run_sweep(&g, &opts).unwrap();
    let b = run_sweep(&g, &opts).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.subsets.len(), 8);
    assert_eq!(a.subsets[7].class, SubsetClass::Nondegenerate);
    assert_eq!(a.dsg, (0..7).collect::<Vec<u32>>());
    assert_eq!(a.maximal, vec![3, 5, 6]);
    assert!(a.dsg_within_disconnected());
    assert!(a.rational_disagreements.is_empty());
}

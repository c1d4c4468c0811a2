//! Property and exhaustive invariants that cut across modules: order axioms,
//! meet as the greatest lower bound, meet-closure of the admissible family,
//! restriction monotonicity, and the decomposition round trip, driven both by
//! exhaustive small-size loops and randomized inputs.

use proptest::prelude::*;

use ffb::{
    compose, decompose, enumerate_ibnc, enumerate_partitions, is_ibnc, lattice_for, ChiMap, Face,
    Partition,
};

fn face_of(byte: u8) -> Face {
    match byte % 3 {
        0 => Face::Left,
        1 => Face::Right,
        _ => Face::Central,
    }
}

#[test]
fn leq_is_a_partial_order_exhaustively() {
    for n in 1..=6usize {
        let all = enumerate_partitions(n).unwrap();
        for a in &all {
            assert!(a.leq(a).unwrap());
        }
        for a in &all {
            for b in &all {
                if a.leq(b).unwrap() && b.leq(a).unwrap() {
                    assert_eq!(a, b, "antisymmetry at n = {n}");
                }
            }
        }
        // Transitivity: walk only comparable pairs to keep the cube small.
        let below: Vec<Vec<usize>> = all
            .iter()
            .map(|a| {
                all.iter()
                    .enumerate()
                    .filter(|(_, b)| a.leq(b).unwrap())
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        for (i, ups) in below.iter().enumerate() {
            for &j in ups {
                for &k in &below[j] {
                    assert!(
                        below[i].contains(&k),
                        "transitivity at n = {n}: {} <= {} <= {}",
                        all[i],
                        all[j],
                        all[k]
                    );
                }
            }
        }
    }
}

#[test]
fn meet_is_the_greatest_lower_bound_exhaustively() {
    for n in 1..=6usize {
        let all = enumerate_partitions(n).unwrap();
        for a in &all {
            for b in &all {
                let m = a.meet(b).unwrap();
                assert!(m.leq(a).unwrap() && m.leq(b).unwrap());
                for c in &all {
                    if c.leq(a).unwrap() && c.leq(b).unwrap() {
                        assert!(c.leq(&m).unwrap(), "n = {n}: {c} under {a}, {b}, meet {m}");
                    }
                }
            }
        }
    }
}

#[test]
fn admissible_family_is_closed_under_meet() {
    // Exhaustive over all labelings through n = 5, sampled pairs at 6 and 7.
    for n in 1..=5usize {
        for code in 0..3usize.pow(n as u32) {
            let mut c = code;
            let labels: Vec<Face> = (0..n)
                .map(|_| {
                    let f = face_of((c % 3) as u8);
                    c /= 3;
                    f
                })
                .collect();
            let chi = ChiMap::new(labels).unwrap();
            let family = enumerate_ibnc(&chi).unwrap();
            for a in &family {
                for b in &family {
                    let m = a.meet(b).unwrap();
                    assert!(is_ibnc(&m, &chi).unwrap(), "{chi}: meet({a}, {b}) = {m}");
                }
            }
        }
    }
    for text in ["llrcrc", "lcrlcr", "rrlccrl", "lllrrrc"] {
        let chi: ChiMap = text.parse().unwrap();
        let family = enumerate_ibnc(&chi).unwrap();
        for (i, a) in family.iter().enumerate() {
            for b in family.iter().skip(i) {
                let m = a.meet(b).unwrap();
                assert!(is_ibnc(&m, &chi).unwrap(), "{chi}: meet({a}, {b}) = {m}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// Kernels of arbitrary label vectors are valid partitions and their
    /// textual form parses back to the same value.
    #[test]
    fn partition_text_roundtrip(labels in prop::collection::vec(0u8..6, 1..10)) {
        let pi = Partition::kernel(&labels).unwrap();
        let text = pi.to_string();
        let parsed: Partition = text.parse().unwrap();
        prop_assert_eq!(pi, parsed);
    }

    /// The sweep-based crossing test agrees with the literal quadruple
    /// condition under arbitrary total orders.
    #[test]
    fn noncrossing_sweep_matches_quadruples(
        labels in prop::collection::vec(0u8..4, 4..9),
        seed in any::<u64>(),
    ) {
        let n = labels.len();
        let pi = Partition::kernel(&labels).unwrap();
        // A deterministic pseudo-random permutation from the seed.
        let mut order: Vec<usize> = (1..=n).collect();
        let mut state = seed | 1;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (state >> 33) as usize % (i + 1));
        }
        let fast = pi.is_noncrossing_under(&order).unwrap();
        let ids = pi.block_ids();
        let mut naive = true;
        'outer: for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        let (s1, r1, s2, r2) = (order[a], order[b], order[c], order[d]);
                        if ids[s1 - 1] == ids[s2 - 1]
                            && ids[r1 - 1] == ids[r2 - 1]
                            && ids[s1 - 1] != ids[r1 - 1]
                        {
                            naive = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
        prop_assert_eq!(fast, naive);
    }

    /// Restriction preserves the refinement order.
    #[test]
    fn restriction_preserves_order(
        fine in prop::collection::vec(0u8..5, 3..9),
        mask in 1u32..,
    ) {
        let n = fine.len();
        let sigma = Partition::kernel(&fine).unwrap();
        // A coarsening of sigma: merge label classes.
        let coarse: Vec<u8> = fine.iter().map(|&v| v / 2).collect();
        let pi = Partition::kernel(&coarse).unwrap();
        prop_assume!(sigma.leq(&pi).unwrap());
        let ground: Vec<usize> = (1..=n).filter(|&k| mask >> (k - 1) & 1 == 1).collect();
        prop_assume!(!ground.is_empty());
        let rs = sigma.restrict(&ground).unwrap().relabel();
        let rp = pi.restrict(&ground).unwrap().relabel();
        prop_assert!(rs.leq(&rp).unwrap());
    }

    /// Decomposition followed by composition is the identity on the
    /// admissible family of a random labeling.
    #[test]
    fn decomposition_round_trip(
        faces in prop::collection::vec(0u8..3, 1..8),
        pick in any::<u64>(),
    ) {
        let chi = ChiMap::new(faces.iter().map(|&b| face_of(b)).collect()).unwrap();
        let lattice = lattice_for(&chi).unwrap();
        let pi = lattice.element((pick as usize) % lattice.len()).clone();
        let parts = decompose(&pi, &chi).unwrap();
        prop_assert_eq!(compose(&parts, &chi).unwrap(), pi);
    }

    /// The join is an upper bound, below every other upper bound.
    #[test]
    fn join_is_least_upper_bound(
        faces in prop::collection::vec(0u8..3, 1..7),
        a_pick in any::<u64>(),
        b_pick in any::<u64>(),
    ) {
        let chi = ChiMap::new(faces.iter().map(|&b| face_of(b)).collect()).unwrap();
        let lattice = lattice_for(&chi).unwrap();
        let a = lattice.element((a_pick as usize) % lattice.len()).clone();
        let b = lattice.element((b_pick as usize) % lattice.len()).clone();
        let join = lattice.join(&a, &b).unwrap();
        prop_assert!(a.leq(&join).unwrap());
        prop_assert!(b.leq(&join).unwrap());
        for c in lattice.elements() {
            if a.leq(c).unwrap() && b.leq(c).unwrap() {
                prop_assert!(join.leq(c).unwrap());
            }
        }
    }
}

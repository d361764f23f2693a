mod oracles;

use std::collections::BTreeSet;

use gdh::extremal::{chain_pattern, density_bound_sequence, extremal_number, langlois_construction, SearchConfig};
use gdh::graph::{contains, is_family_free, Family, Gdh, Theory};
use gdh::lattice::{min_container, project_family, TheoryPair};
use gdh::perm_group::{enumerate_subgroups, Permutation};
use proptest::prelude::*;

fn group_of(t: &Theory) -> Vec<oracles::Perm> {
    t.group().elements().iter().map(|p| p.images().to_vec()).collect()
}

fn r3_theories() -> Vec<Theory> {
    enumerate_subgroups(3)
        .unwrap()
        .into_iter()
        .map(|g| Theory::new(g).unwrap())
        .collect()
}

/// A theory index plus one or two members, each with 1..=3 edges on at most 4 vertices.
fn arb_case() -> impl Strategy<Value = (Theory, Family)> {
    let edge = proptest::sample::subsequence(vec![0usize, 1, 2, 3], 3).prop_shuffle();
    let member = proptest::collection::vec(edge, 1..=3);
    (0usize..6, proptest::collection::vec(member, 1..=2)).prop_map(|(ti, raw)| {
        let t = r3_theories().swap_remove(ti);
        let members = raw
            .into_iter()
            .map(|edges| Gdh::from_edges(&t, 4, edges).unwrap())
            .collect();
        (t.clone(), Family::new(&t, members).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn search_matches_oracle_and_witness_is_valid((t, fam) in arb_case(), n in 3usize..=5) {
        let res = extremal_number(&t, n, &fam, &SearchConfig::default()).unwrap();
        prop_assert!(res.exhaustive);
        prop_assert_eq!(res.witness.edge_count(), res.best_edge_count);
        prop_assert!(is_family_free(&res.witness, &fam).unwrap());
        let members: Vec<(usize, Vec<Vec<usize>>)> =
            fam.members().iter().map(|g| (g.vertex_count(), g.edges().collect())).collect();
        if let Some(naive) = oracles::extremal_number(3, n, &group_of(&t), &members) {
            prop_assert_eq!(res.best_edge_count, naive);
        }
    }

    #[test]
    fn exact_densities_do_not_increase((t, fam) in arb_case()) {
        let seq = density_bound_sequence(&t, &fam, 3..=5, &SearchConfig::default()).unwrap();
        for w in seq.windows(2) {
            prop_assert!(w[1].density_bound <= w[0].density_bound);
        }
    }

    #[test]
    fn symmetry_pruning_preserves_value((t, fam) in arb_case()) {
        let plain = SearchConfig { symmetry_depth: 0, ..Default::default() };
        let a = extremal_number(&t, 5, &fam, &SearchConfig::default()).unwrap();
        let b = extremal_number(&t, 5, &fam, &plain).unwrap();
        prop_assert_eq!(a.best_edge_count, b.best_edge_count);
    }
}

#[test]
fn construction_never_beats_the_search() {
    let t = Theory::two_to_one();
    let fam = Family::new(&t, vec![chain_pattern()]).unwrap();
    for n in 3..=6 {
        let res = extremal_number(&t, n, &fam, &SearchConfig::default()).unwrap();
        assert!(res.exhaustive);
        assert!(langlois_construction(n).unwrap().edge_count() <= res.best_edge_count);
    }
}

#[test]
fn chain_sequence_stays_above_limit() {
    let t = Theory::two_to_one();
    let fam = Family::new(&t, vec![chain_pattern()]).unwrap();
    let seq = density_bound_sequence(&t, &fam, [5, 6], &SearchConfig::default()).unwrap();
    assert!(seq[1].density_bound <= seq[0].density_bound);
    assert!(seq.iter().all(|p| p.density_bound >= 4.0 / 27.0));
}

#[test]
fn search_is_identical_across_pools() {
    let t = Theory::two_to_one();
    let fam = Family::new(&t, vec![chain_pattern()]).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| extremal_number(&t, 6, &fam, &SearchConfig::default()).unwrap())
    };
    let a = run(1);
    let b = run(3);
    assert_eq!(a, b);
    assert_eq!(a, run(1));
}

/// Every fine graph on 5 vertices whose container holds the coarse member
/// contains a projected member. Checking one fine edge per container suffices:
/// any fine graph with that container contains such a choice.
#[test]
fn freeness_transport_on_five_vertices() {
    let s3 = Theory::symmetric(3);
    let c3 = Theory::from_generators(3, &[Permutation::new(vec![1, 2, 0]).unwrap()]).unwrap();
    let pair = TheoryPair::new(&c3, &s3).unwrap();
    let members = [
        Gdh::from_edges(&s3, 3, [[0, 1, 2]]).unwrap(),
        Gdh::from_edges(&s3, 4, [[0, 1, 2], [0, 1, 3]]).unwrap(),
    ];
    let coarse_edges: Vec<Vec<usize>> = Gdh::complete(&s3, 5).unwrap().edges().collect();
    for f in members {
        let fam = Family::new(&s3, vec![f.clone()]).unwrap();
        let proj = project_family(&fam, &pair).unwrap();
        for mask in 0u32..1 << coarse_edges.len() {
            let chosen: Vec<&Vec<usize>> =
                (0..coarse_edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| &coarse_edges[i]).collect();
            let gc = Gdh::from_edges(&s3, 5, chosen.iter().copied()).unwrap();
            if !contains(&gc, &f).unwrap() {
                continue;
            }
            let splits: Vec<Vec<Vec<usize>>> = chosen.iter().map(|e| pair.split(e)).collect();
            for pick in 0u32..1 << splits.len() {
                let gf = Gdh::from_edges(
                    &c3,
                    5,
                    splits.iter().enumerate().map(|(i, s)| &s[(pick >> i & 1) as usize]),
                )
                .unwrap();
                assert_eq!(min_container(&gf, &pair).unwrap(), gc);
                assert!(!is_family_free(&gf, &proj).unwrap(), "transport fails for {gf:?}");
            }
        }
    }
}

#[test]
fn oracle_methods_agree() {
    // conflict-graph independent sets against plain enumeration on a
    // 16-candidate slice of the chain problem
    let t = Theory::two_to_one();
    let members = vec![(5, chain_pattern().edges().collect::<Vec<_>>())];
    let (_, copies) = oracles::copies(3, 5, &group_of(&t), &members);
    let small: Vec<BTreeSet<usize>> = copies.into_iter().filter(|c| c.iter().all(|&i| i < 16)).collect();
    assert!(!small.is_empty());
    let mut adj = vec![0u128; 16];
    for c in &small {
        let v: Vec<usize> = c.iter().copied().collect();
        adj[v[0]] |= 1 << v[1];
        adj[v[1]] |= 1 << v[0];
    }
    assert_eq!(oracles::max_free_subset_by_enumeration(16, &small), oracles::max_independent_set(&adj));
}

//! Moving GDHs between a finer theory `T'` and a coarser theory `T` whose
//! position groups satisfy `J_{T'} ⊆ J_T`.
//!
//! A coarse edge is a union of `ratio = m_T / m_{T'}` fine edges.

use std::collections::{BTreeSet, HashMap};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{GdhError, Result};
use crate::graph::{is_isomorphic, Family, Gdh, Theory};
use crate::perm_group::{canonical_unchecked, PermutationGroup};

/// Projection refuses to enumerate more one-edge-per-container choices than this.
pub const PROJECTION_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct TheoryPair {
    fine: Theory,
    coarse: Theory,
    ratio: usize,
}

fn describe(g: &PermutationGroup) -> String {
    let gens: Vec<String> = g.elements().iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", gens.join(", "))
}

impl TheoryPair {
    pub fn new(fine: &Theory, coarse: &Theory) -> Result<Self> {
        if fine.arity() != coarse.arity() {
            return Err(GdhError::ArityMismatch {
                expected: coarse.arity(),
                found: fine.arity(),
            });
        }
        if !fine.group().is_subgroup_of(coarse.group()) {
            return Err(GdhError::NotASubgroup {
                fine: describe(fine.group()),
                coarse: describe(coarse.group()),
            });
        }
        Ok(Self {
            fine: fine.clone(),
            coarse: coarse.clone(),
            ratio: coarse.order() / fine.order(),
        })
    }

    pub fn fine(&self) -> &Theory {
        &self.fine
    }

    pub fn coarse(&self) -> &Theory {
        &self.coarse
    }

    pub fn ratio(&self) -> usize {
        self.ratio
    }

    /// The `ratio` fine edges inside a coarse edge, in lexicographic order.
    pub fn split(&self, coarse_edge: &[usize]) -> Vec<Vec<usize>> {
        let fine: BTreeSet<Vec<usize>> = self
            .coarse
            .group()
            .elements()
            .iter()
            .map(|p| canonical_unchecked(&p.act_on(coarse_edge), self.fine.group()))
            .collect();
        debug_assert_eq!(fine.len(), self.ratio);
        fine.into_iter().collect()
    }
}

fn check_theory(g: &Gdh, t: &Theory) -> Result<()> {
    if g.theory() != t {
        return Err(GdhError::TheoryMismatch);
    }
    Ok(())
}

/// Every fine edge replaced by the coarse edge containing it.
pub fn min_container(fine: &Gdh, pair: &TheoryPair) -> Result<Gdh> {
    check_theory(fine, &pair.fine)?;
    let group = pair.coarse.group();
    Gdh::from_edges(
        &pair.coarse,
        fine.vertex_count(),
        fine.edges().map(|e| canonical_unchecked(&e, group)),
    )
}

/// Every coarse edge replaced by all `ratio` fine edges inside it.
pub fn expand_all(coarse: &Gdh, pair: &TheoryPair) -> Result<Gdh> {
    check_theory(coarse, &pair.coarse)?;
    Gdh::from_edges(
        &pair.fine,
        coarse.vertex_count(),
        coarse.edges().flat_map(|e| pair.split(&e)),
    )
}

/// Every coarse edge replaced by `k` of its fine edges, chosen by a generator
/// seeded with `seed` and visiting coarse edges in lexicographic order.
pub fn orient_k(coarse: &Gdh, pair: &TheoryPair, k: usize, seed: u64) -> Result<Gdh> {
    check_theory(coarse, &pair.coarse)?;
    if k == 0 || k > pair.ratio {
        return Err(GdhError::InvalidArgument(format!(
            "k = {k} outside 1..={}",
            pair.ratio
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Gdh::empty(&pair.fine, coarse.vertex_count())?;
    for e in coarse.edges() {
        let options = pair.split(&e);
        let mut picks = sample(&mut rng, options.len(), k).into_vec();
        picks.sort_unstable();
        for i in picks {
            out.insert_edge(&options[i])?;
        }
    }
    Ok(out)
}

/// All fine graphs with exactly one edge inside each edge of some member,
/// deduplicated up to isomorphism (first occurrence kept).
pub fn project_family(fam: &Family, pair: &TheoryPair) -> Result<Family> {
    if fam.theory() != &pair.coarse {
        return Err(GdhError::TheoryMismatch);
    }
    let mut kept: Vec<Gdh> = Vec::new();
    let mut buckets: HashMap<(usize, usize, Vec<usize>), Vec<usize>> = HashMap::new();
    for member in fam.members() {
        let e = member.edge_count() as u32;
        let count = (pair.ratio as u128)
            .checked_pow(e)
            .filter(|&c| c <= PROJECTION_LIMIT)
            .ok_or(GdhError::ExplosionGuard {
                count: (pair.ratio as u128).saturating_pow(e),
                limit: PROJECTION_LIMIT,
            })?;
        let options: Vec<Vec<Vec<usize>>> = member.edges().map(|c| pair.split(&c)).collect();
        let n = member.vertex_count();
        let graphs: Vec<Gdh> = (0..count as u64)
            .into_par_iter()
            .map(|mut code| {
                let mut g = Gdh::empty(&pair.fine, n)?;
                for opts in &options {
                    g.insert_edge(&opts[(code % pair.ratio as u64) as usize])?;
                    code /= pair.ratio as u64;
                }
                Ok(g)
            })
            .collect::<Result<_>>()?;
        for g in graphs {
            let mut degrees = g.degrees();
            degrees.sort_unstable();
            let bucket = buckets
                .entry((g.vertex_count(), g.edge_count(), degrees))
                .or_default();
            let mut seen = false;
            for &i in bucket.iter() {
                if is_isomorphic(&kept[i], &g)? {
                    seen = true;
                    break;
                }
            }
            if !seen {
                bucket.push(kept.len());
                kept.push(g);
            }
        }
    }
    Family::new(&pair.fine, kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{contains, is_family_free};
    use crate::lagrangian::{blowup_density, LagrangianConfig};
    use crate::perm_group::{enumerate_subgroups, Permutation};
    use proptest::prelude::*;

    fn pair_21_s3() -> TheoryPair {
        TheoryPair::new(&Theory::two_to_one(), &Theory::symmetric(3)).unwrap()
    }

    fn cyclic3() -> Theory {
        Theory::from_generators(3, &[Permutation::new(vec![1, 2, 0]).unwrap()]).unwrap()
    }

    fn arb_graph(theory: Theory, max_n: usize) -> impl Strategy<Value = Gdh> {
        (theory.arity()..=max_n).prop_flat_map(move |n| {
            let complete: Vec<Vec<usize>> = Gdh::complete(&theory, n).unwrap().edges().collect();
            let t = theory.clone();
            proptest::collection::vec(any::<bool>(), complete.len()).prop_map(move |keep| {
                Gdh::from_edges(
                    &t,
                    n,
                    complete.iter().zip(&keep).filter(|(_, &k)| k).map(|(e, _)| e),
                )
                .unwrap()
            })
        })
    }

    #[test]
    fn pair_validation() {
        assert_eq!(pair_21_s3().ratio(), 3);
        assert!(matches!(
            TheoryPair::new(&Theory::symmetric(3), &Theory::two_to_one()),
            Err(GdhError::NotASubgroup { .. })
        ));
        assert!(matches!(
            TheoryPair::new(&Theory::two_to_one(), &cyclic3()),
            Err(GdhError::NotASubgroup { .. })
        ));
        assert!(TheoryPair::new(&Theory::trivial(2), &Theory::symmetric(3)).is_err());
        for h in enumerate_subgroups(3).unwrap() {
            let t = Theory::new(h).unwrap();
            let p = TheoryPair::new(&Theory::trivial(3), &t).unwrap();
            assert_eq!(p.ratio(), t.order());
        }
    }

    #[test]
    fn container_examples() {
        let p = pair_21_s3();
        let t = Theory::two_to_one();
        let one = Gdh::from_edges(&t, 3, [[0, 1, 2]]).unwrap();
        assert_eq!(min_container(&one, &p).unwrap().edge_count(), 1);
        let all = Gdh::complete(&t, 3).unwrap();
        assert_eq!(all.edge_count(), 3);
        assert_eq!(min_container(&all, &p).unwrap().edge_count(), 1);
        let none = Gdh::empty(&t, 4).unwrap();
        assert!(min_container(&none, &p).unwrap().is_empty());
        let wrong = Gdh::empty(&Theory::symmetric(3), 3).unwrap();
        assert_eq!(min_container(&wrong, &p), Err(GdhError::TheoryMismatch));
    }

    #[test]
    fn expand_examples() {
        let s3 = Theory::symmetric(3);
        let edge = Gdh::from_edges(&s3, 3, [[0, 1, 2]]).unwrap();
        let fine = expand_all(&edge, &pair_21_s3()).unwrap();
        assert_eq!(fine.edge_count(), 3);
        let to_trivial = TheoryPair::new(&Theory::trivial(3), &s3).unwrap();
        assert_eq!(expand_all(&edge, &to_trivial).unwrap().edge_count(), 6);
        assert_eq!(min_container(&fine, &pair_21_s3()).unwrap(), edge);
    }

    #[test]
    fn orient_examples() {
        let p = pair_21_s3();
        let s3 = Theory::symmetric(3);
        let edge = Gdh::from_edges(&s3, 3, [[0, 1, 2]]).unwrap();
        assert_eq!(orient_k(&edge, &p, 3, 7).unwrap(), expand_all(&edge, &p).unwrap());
        assert!(orient_k(&edge, &p, 0, 7).is_err());
        assert!(orient_k(&edge, &p, 4, 7).is_err());
        let cfg = LagrangianConfig::default();
        let one = orient_k(&edge, &p, 1, 7).unwrap();
        assert_eq!(one.edge_count(), 1);
        assert!((blowup_density(&one, &cfg).unwrap().value - 2.0 / 27.0).abs() < 1e-6);
        let two = orient_k(&edge, &p, 2, 7).unwrap();
        assert!((blowup_density(&two, &cfg).unwrap().value - 4.0 / 27.0).abs() < 1e-6);
        assert_eq!(orient_k(&two, &p, 1, 7).err(), Some(GdhError::TheoryMismatch));
    }

    #[test]
    fn orient_is_seed_deterministic() {
        let p = pair_21_s3();
        let g = Gdh::complete(&Theory::symmetric(3), 5).unwrap();
        let a = orient_k(&g, &p, 1, 11).unwrap();
        assert_eq!(a, orient_k(&g, &p, 1, 11).unwrap());
        assert_eq!(min_container(&a, &p).unwrap(), g);
    }

    #[test]
    fn projection_examples() {
        let s3 = Theory::symmetric(3);
        let edge = Gdh::from_edges(&s3, 3, [[0, 1, 2]]).unwrap();
        let fam = Family::new(&s3, vec![edge]).unwrap();
        assert_eq!(project_family(&fam, &pair_21_s3()).unwrap().len(), 1);
        let to_trivial = TheoryPair::new(&Theory::trivial(3), &s3).unwrap();
        assert_eq!(project_family(&fam, &to_trivial).unwrap().len(), 1);

        let two = Gdh::from_edges(&s3, 4, [[0, 1, 2], [0, 1, 3]]).unwrap();
        let fam2 = Family::new(&s3, vec![two]).unwrap();
        let proj = project_family(&fam2, &pair_21_s3()).unwrap();
        assert!(proj.len() <= 9);
        for (i, a) in proj.members().iter().enumerate() {
            assert_eq!(a.edge_count(), 2);
            for b in &proj.members()[i + 1..] {
                assert!(!is_isomorphic(a, b).unwrap());
            }
        }
    }

    #[test]
    fn projection_guard() {
        let t = Theory::trivial(3);
        let s3 = Theory::symmetric(3);
        let big = Family::new(&s3, vec![Gdh::complete(&s3, 6).unwrap()]).unwrap();
        let p = TheoryPair::new(&t, &s3).unwrap();
        assert!(matches!(
            project_family(&big, &p),
            Err(GdhError::ExplosionGuard { .. })
        ));
    }

    /// Exhaustive over fine graphs on up to 4 vertices: a projected-family-free
    /// fine graph collapses to a family-free coarse graph.
    #[test]
    fn freeness_transports_to_containers() {
        let s3 = Theory::symmetric(3);
        let fams = [
            Gdh::from_edges(&s3, 3, [[0, 1, 2]]).unwrap(),
            Gdh::from_edges(&s3, 4, [[0, 1, 2], [0, 1, 3]]).unwrap(),
            Gdh::from_edges(&s3, 5, [[0, 1, 2], [2, 3, 4]]).unwrap(),
        ];
        for pair in [pair_21_s3(), TheoryPair::new(&cyclic3(), &s3).unwrap()] {
            for f in &fams {
                let fam = Family::new(&s3, vec![f.clone()]).unwrap();
                let proj = project_family(&fam, &pair).unwrap();
                for n in 3..=4 {
                    let all: Vec<Vec<usize>> =
                        Gdh::complete(pair.fine(), n).unwrap().edges().collect();
                    for mask in 0u32..1 << all.len() {
                        let gf = Gdh::from_edges(
                            pair.fine(),
                            n,
                            (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| &all[i]),
                        )
                        .unwrap();
                        if is_family_free(&gf, &proj).unwrap() {
                            let gc = min_container(&gf, &pair).unwrap();
                            assert!(is_family_free(&gc, &fam).unwrap());
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn expand_then_contain_is_identity(g in arb_graph(Theory::symmetric(3), 6)) {
            let p = pair_21_s3();
            let fine = expand_all(&g, &p).unwrap();
            prop_assert_eq!(fine.edge_count(), 3 * g.edge_count());
            prop_assert_eq!(min_container(&fine, &p).unwrap(), g);
        }

        #[test]
        fn contain_then_expand_dominates(g in arb_graph(Theory::two_to_one(), 6)) {
            let p = pair_21_s3();
            let c = min_container(&g, &p).unwrap();
            prop_assert!(c.edge_count() <= g.edge_count());
            prop_assert!(g.is_edge_subset_of(&expand_all(&c, &p).unwrap()));
        }

        #[test]
        fn orient_k_yields_k_per_container(g in arb_graph(Theory::symmetric(3), 5), k in 1usize..=3, seed in any::<u64>()) {
            let p = pair_21_s3();
            let o = orient_k(&g, &p, k, seed).unwrap();
            prop_assert_eq!(o.edge_count(), k * g.edge_count());
            prop_assert_eq!(min_container(&o, &p).unwrap(), g);
        }

        #[test]
        fn containment_transports(
            g in arb_graph(Theory::two_to_one(), 5),
            h in arb_graph(Theory::two_to_one(), 4),
        ) {
            let p = pair_21_s3();
            if contains(&g, &h).unwrap() {
                let gc = min_container(&g, &p).unwrap();
                let hc = min_container(&h, &p).unwrap();
                prop_assert!(contains(&gc, &hc).unwrap());
            }
        }
    }
}

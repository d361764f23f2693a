//! Exact extremal numbers `ex(n, F)` by branch and bound over orbit-edges.
//!
//! Candidates are the orbit-edges of the complete GDH on `n` vertices in
//! lexicographic order. Every copy of every forbidden member inside the
//! complete GDH is listed up front as a set of candidate indices, so the
//! freeness test for a newly included edge only looks at copies through it.
//!
//! Pruning:
//! - a candidate that would complete a copy is dropped from the open set;
//! - `included + open <= best`, and the same bound minus a greedy packing of
//!   copies that are disjoint on their missing edges;
//! - lex-leader symmetry breaking: while at most `symmetry_depth` edges are
//!   included, a node is cut if some vertex permutation provably maps every
//!   completion to a lexicographically larger characteristic vector.
//!
//! The tree is split at a fixed decision depth and the subtrees are searched
//! independently, each against the same starting incumbent, so results and
//! node counts do not depend on the number of worker threads.

use std::collections::{BTreeSet, HashMap};
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GdhError, Result};
use crate::graph::{for_each_embedding, Family, Gdh, Theory};
use crate::perm_group::{canonical_unchecked, next_permutation};

/// Bitset width: at most this many candidate edges.
pub const MAX_CANDIDATES: usize = 512;
const WORDS: usize = MAX_CANDIDATES / 64;
/// Vertex permutations are tabulated for symmetry breaking up to this `n`.
const MAX_SYMMETRY_VERTICES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Bits([u64; WORDS]);

impl Bits {
    const EMPTY: Bits = Bits([0; WORDS]);

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Lowest set index.
    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchConfig {
    /// Node budget; exceeding it makes the result a lower bound.
    pub budget: u64,
    /// Decision depth at which the tree is cut into independent subtrees.
    pub split_depth: usize,
    /// Lex-leader pruning applies while at most this many edges are included.
    pub symmetry_depth: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: 100_000_000,
            split_depth: 6,
            symmetry_depth: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub n: usize,
    /// `ex(n, F)` when `exhaustive`, a lower bound otherwise.
    pub best_edge_count: usize,
    pub witness: Gdh,
    pub exhaustive: bool,
    pub nodes_explored: u64,
    /// `best_edge_count / ((r!/m)·C(n, r))`; 1 when `n < r`.
    pub density_bound: f64,
}

/// Candidate edges, forbidden copies, and symmetry tables for one `(T, n, F)`.
struct Problem {
    size: usize,
    /// Copies as sorted candidate index lists (no copy contains another).
    copies: Vec<Vec<u16>>,
    copies_through: Vec<Vec<u32>>,
    /// For each non-identity vertex permutation σ, `j -> index of σ(c_j)`.
    symmetry: Vec<Vec<u16>>,
    symmetry_depth: usize,
}

struct Worker<'a> {
    p: &'a Problem,
    best: usize,
    witness: Option<Bits>,
    nodes: u64,
    cap: u64,
    aborted: bool,
    split_depth: Option<usize>,
    frontier: Vec<Node>,
}

#[derive(Clone, Copy)]
struct Node {
    included: Bits,
    count: usize,
    /// Undecided candidates that can still be added without completing a copy.
    open: Bits,
    next: usize,
    depth: usize,
}

impl Problem {
    fn build(theory: &Theory, n: usize, fam: &Family, symmetry_depth: usize) -> Result<(Self, Vec<Vec<usize>>)> {
        let complete = Gdh::complete(theory, n)?;
        let candidates: Vec<Vec<usize>> = complete.edges().collect();
        if candidates.len() > MAX_CANDIDATES {
            return Err(GdhError::InvalidArgument(format!(
                "{} candidate edges exceed the search limit of {MAX_CANDIDATES}",
                candidates.len()
            )));
        }
        let index: HashMap<Vec<usize>, u16> = candidates
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u16))
            .collect();
        let group = theory.group();
        let locate = |t: &[usize]| index[&canonical_unchecked(t, group)];

        let mut found: BTreeSet<Vec<u16>> = BTreeSet::new();
        for f in fam.members() {
            let edges: Vec<Vec<usize>> = f.edges().collect();
            let _ = for_each_embedding(f, &complete, |psi| {
                let mut copy: Vec<u16> = edges
                    .iter()
                    .map(|e| locate(&e.iter().map(|&v| psi[v]).collect::<Vec<_>>()))
                    .collect();
                copy.sort_unstable();
                found.insert(copy);
                ControlFlow::Continue(())
            })?;
        }
        // drop copies that contain a smaller copy
        let mut by_len: Vec<Vec<u16>> = found.into_iter().collect();
        by_len.sort_by_key(|c| c.len());
        let mut copies: Vec<Vec<u16>> = Vec::new();
        for c in by_len {
            let redundant = copies
                .iter()
                .any(|small| small.iter().all(|x| c.binary_search(x).is_ok()));
            if !redundant {
                copies.push(c);
            }
        }
        copies.sort();
        let mut copies_through = vec![Vec::new(); candidates.len()];
        for (ci, c) in copies.iter().enumerate() {
            for &e in c {
                copies_through[e as usize].push(ci as u32);
            }
        }

        let mut symmetry = Vec::new();
        if n <= MAX_SYMMETRY_VERTICES && symmetry_depth > 0 && !candidates.is_empty() {
            let mut sigma: Vec<usize> = (0..n).collect();
            while next_permutation(&mut sigma) {
                symmetry.push(
                    candidates
                        .iter()
                        .map(|c| locate(&c.iter().map(|&v| sigma[v]).collect::<Vec<_>>()))
                        .collect(),
                );
            }
        }
        Ok((
            Problem {
                size: candidates.len(),
                copies,
                copies_through,
                symmetry,
                symmetry_depth,
            },
            candidates,
        ))
    }

    fn root(&self) -> Node {
        let mut open = Bits::EMPTY;
        for i in 0..self.size {
            open.set(i);
        }
        for c in &self.copies {
            if c.len() == 1 {
                open.clear(c[0] as usize);
            }
        }
        Node {
            included: Bits::EMPTY,
            count: 0,
            open,
            next: 0,
            depth: 0,
        }
    }

    fn include(&self, node: &Node, j: usize) -> Node {
        let mut included = node.included;
        included.set(j);
        let mut open = node.open;
        open.clear(j);
        for &ci in &self.copies_through[j] {
            let mut missing = None;
            let mut missing_count = 0;
            for &e in &self.copies[ci as usize] {
                if !included.get(e as usize) {
                    missing_count += 1;
                    missing = Some(e as usize);
                }
            }
            if missing_count == 1 {
                open.clear(missing.expect("one missing edge"));
            }
        }
        Node {
            included,
            count: node.count + 1,
            open,
            next: j + 1,
            depth: node.depth + 1,
        }
    }

    fn exclude(&self, node: &Node, j: usize) -> Node {
        let mut open = node.open;
        open.clear(j);
        Node {
            open,
            next: j + 1,
            depth: node.depth + 1,
            ..*node
        }
    }

    /// Copies completable inside `included ∪ open` whose missing edges are
    /// pairwise disjoint; each forces one open edge out.
    fn packing(&self, node: &Node) -> usize {
        let mut used = Bits::EMPTY;
        let mut packs = 0;
        'copies: for c in &self.copies {
            let mut missing = 0;
            for &e in c {
                let e = e as usize;
                if node.included.get(e) {
                    continue;
                }
                if !node.open.get(e) || used.get(e) {
                    continue 'copies;
                }
                missing += 1;
            }
            if missing == 0 {
                continue;
            }
            for &e in c {
                if !node.included.get(e as usize) {
                    used.set(e as usize);
                }
            }
            packs += 1;
        }
        packs
    }

    /// False when some permutation certainly yields a larger characteristic
    /// vector than any completion of this prefix.
    fn is_leader_prefix(&self, included: &Bits, decided: usize) -> bool {
        for table in &self.symmetry {
            for j in 0..decided {
                let pre = table[j] as usize;
                if pre >= decided {
                    break;
                }
                let image = included.get(pre);
                let own = included.get(j);
                if image && !own {
                    return false;
                }
                if own && !image {
                    break;
                }
            }
        }
        true
    }
}

impl Worker<'_> {
    fn dfs(&mut self, node: Node) {
        if self.aborted {
            return;
        }
        if let Some(d) = self.split_depth {
            if node.depth == d {
                self.frontier.push(node);
                return;
            }
        }
        self.nodes += 1;
        if self.nodes > self.cap {
            self.aborted = true;
            return;
        }
        let Some(j) = node.open.first() else {
            if node.count > self.best {
                self.best = node.count;
                self.witness = Some(node.included);
            }
            return;
        };
        let open = node.open.count();
        if node.count + open <= self.best {
            return;
        }
        if node.count + open - self.p.packing(&node) <= self.best {
            return;
        }
        let with = self.p.include(&node, j);
        if with.count > self.p.symmetry_depth || self.p.is_leader_prefix(&with.included, with.next) {
            self.dfs(with);
        }
        self.dfs(self.p.exclude(&node, j));
    }
}

/// Greedy first-fit in candidate order; the leftmost leaf of the tree.
fn greedy(p: &Problem) -> Node {
    let mut node = p.root();
    while let Some(j) = node.open.first() {
        node = p.include(&node, j);
    }
    node
}

fn validate_family(theory: &Theory, fam: &Family) -> Result<()> {
    if fam.theory() != theory {
        return Err(GdhError::TheoryMismatch);
    }
    if let Some(i) = fam.members().iter().position(|m| m.is_empty()) {
        return Err(GdhError::EmptyMember(i));
    }
    Ok(())
}

/// `ex_T(n, F)`: most edges of an `F`-free GDH on `n` vertices.
pub fn extremal_number(theory: &Theory, n: usize, fam: &Family, config: &SearchConfig) -> Result<SearchResult> {
    validate_family(theory, fam)?;
    let (problem, candidates) = Problem::build(theory, n, fam, config.symmetry_depth)?;

    let start = greedy(&problem);
    let mut best = start.count;
    let mut witness = start.included;

    let mut splitter = Worker {
        p: &problem,
        best,
        witness: None,
        nodes: 0,
        cap: config.budget,
        aborted: false,
        split_depth: Some(config.split_depth),
        frontier: Vec::new(),
    };
    splitter.dfs(problem.root());
    if let Some(w) = splitter.witness {
        best = splitter.best;
        witness = w;
    }
    let mut nodes = splitter.nodes;
    let mut aborted = splitter.aborted;
    let frontier = std::mem::take(&mut splitter.frontier);

    let outcomes: Vec<(usize, Option<Bits>, u64, bool)> = frontier
        .into_par_iter()
        .map(|node| {
            let mut w = Worker {
                p: &problem,
                best,
                witness: None,
                nodes: 0,
                cap: config.budget,
                aborted: false,
                split_depth: None,
                frontier: Vec::new(),
            };
            w.dfs(node);
            (w.best, w.witness, w.nodes, w.aborted)
        })
        .collect();
    for (b, w, k, a) in outcomes {
        nodes += k;
        aborted |= a;
        if let Some(w) = w {
            if b > best {
                best = b;
                witness = w;
            }
        }
    }

    let witness_graph = Gdh::from_edges(theory, n, witness.iter().map(|i| &candidates[i]))?;
    debug_assert_eq!(witness_graph.edge_count(), best);
    let total = theory.complete_edge_count(n);
    Ok(SearchResult {
        n,
        best_edge_count: best,
        witness: witness_graph,
        exhaustive: !aborted && nodes <= config.budget,
        nodes_explored: nodes,
        density_bound: if total == 0 { 1.0 } else { best as f64 / total as f64 },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityPoint {
    pub n: usize,
    pub edges: usize,
    pub density_bound: f64,
}

/// Exact extremal densities for each `n`; errors if any search runs out of budget.
pub fn density_bound_sequence(
    theory: &Theory,
    fam: &Family,
    ns: impl IntoIterator<Item = usize>,
    config: &SearchConfig,
) -> Result<Vec<DensityPoint>> {
    ns.into_iter()
        .map(|n| {
            let res = extremal_number(theory, n, fam, config)?;
            if !res.exhaustive {
                return Err(GdhError::BudgetExhausted { n, nodes: res.nodes_explored });
            }
            Ok(DensityPoint {
                n,
                edges: res.best_edge_count,
                density_bound: res.density_bound,
            })
        })
        .collect()
}

/// `{ab→c, cd→e}` in the 2→1 theory: the head of one edge is a tail of the other.
pub fn chain_pattern() -> Gdh {
    Gdh::from_edges(&Theory::two_to_one(), 5, [[0, 1, 2], [2, 3, 4]]).expect("valid pattern")
}

/// Heads `0..⌊n/3⌋`, tails the rest; every pair of tails points at every head.
/// Has `⌊n/3⌋·C(⌈2n/3⌉, 2)` edges and contains no [`chain_pattern`].
pub fn langlois_construction(n: usize) -> Result<Gdh> {
    if n < 3 {
        return Err(GdhError::InvalidArgument(format!(
            "construction needs at least 3 vertices, got {n}"
        )));
    }
    let heads = n / 3;
    let mut g = Gdh::empty(&Theory::two_to_one(), n)?;
    for h in 0..heads {
        for a in heads..n {
            for b in a + 1..n {
                g.insert_edge(&[a, b, h])?;
            }
        }
    }
    Ok(g)
}

pub fn restrict_family(fam: &Family, k: usize) -> Family {
    fam.restrict(k)
}

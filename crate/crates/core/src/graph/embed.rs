//! Backtracking search for injective homomorphisms between GDHs.

use std::collections::HashSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::{encode_tuple, Gdh};
use crate::error::{GdhError, Result};

/// Dense bitmap below this many tuple codes, hash set above.
const DENSE_LIMIT: u64 = 1 << 22;

/// Membership test for every tuple of a relation (all orbit members).
enum RelationIndex {
    Dense(Vec<u64>),
    Sparse(HashSet<u64>),
}

impl RelationIndex {
    fn build(g: &Gdh) -> Self {
        let n = g.vertex_count() as u64;
        let space = n.checked_pow(g.arity() as u32).unwrap_or(u64::MAX);
        let perms = g.theory().group().elements();
        let codes = g.edges().flat_map(|e| {
            perms
                .iter()
                .map(move |p| encode_tuple(&p.act_on(&e), n as usize))
                .collect::<Vec<_>>()
        });
        if space <= DENSE_LIMIT {
            let mut bits = vec![0u64; (space as usize).div_ceil(64).max(1)];
            for c in codes {
                bits[(c / 64) as usize] |= 1 << (c % 64);
            }
            RelationIndex::Dense(bits)
        } else {
            RelationIndex::Sparse(codes.collect())
        }
    }

    #[inline]
    fn contains(&self, code: u64) -> bool {
        match self {
            RelationIndex::Dense(bits) => bits[(code / 64) as usize] >> (code % 64) & 1 == 1,
            RelationIndex::Sparse(set) => set.contains(&code),
        }
    }
}

struct Matcher<'a> {
    g_n: usize,
    order: Vec<usize>,
    /// H edges whose last vertex (in `order`) is placed at each step.
    checks: Vec<Vec<Vec<usize>>>,
    h_deg: Vec<usize>,
    g_deg: Vec<usize>,
    index: RelationIndex,
    image: Vec<usize>,
    _h: &'a Gdh,
}

impl Matcher<'_> {
    fn search<F>(&mut self, step: usize, map: &mut [usize], used: &mut [bool], f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if step == self.order.len() {
            return f(map);
        }
        let v = self.order[step];
        for w in 0..self.g_n {
            if used[w] || self.g_deg[w] < self.h_deg[v] {
                continue;
            }
            map[v] = w;
            if self.edges_hold(step, map) {
                used[w] = true;
                let flow = self.search(step + 1, map, used, f);
                used[w] = false;
                flow?;
            }
        }
        map[v] = usize::MAX;
        ControlFlow::Continue(())
    }

    fn edges_hold(&mut self, step: usize, map: &[usize]) -> bool {
        for e in &self.checks[step] {
            for (slot, &a) in self.image.iter_mut().zip(e) {
                *slot = map[a];
            }
            if !self.index.contains(encode_tuple(&self.image, self.g_n)) {
                return false;
            }
        }
        true
    }
}

/// H vertices ordered so each next vertex shares the most edges with those
/// already placed; ties go to higher degree, then smaller index.
fn placement_order(h: &Gdh) -> Vec<usize> {
    let n = h.vertex_count();
    let deg = h.degrees();
    let edges: Vec<Vec<usize>> = h.edges().collect();
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in (0..n).filter(|&v| !placed[v]) {
            let links = edges
                .iter()
                .filter(|e| e.contains(&v) && e.iter().any(|&u| placed[u]))
                .count();
            let key = (links, deg[v], usize::MAX - v);
            if best.is_none_or(|b| key > b) {
                best = Some(key);
            }
        }
        let v = usize::MAX - best.expect("unplaced vertex").2;
        placed[v] = true;
        order.push(v);
    }
    order
}

/// Calls `f(ψ)` for every injective homomorphism `ψ: V_H → V_G` (as `ψ[v]`)
/// until `f` breaks. Deterministic order.
pub fn for_each_embedding<F>(h: &Gdh, g: &Gdh, mut f: F) -> Result<ControlFlow<()>>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if h.theory() != g.theory() {
        return Err(GdhError::TheoryMismatch);
    }
    if h.vertex_count() > g.vertex_count() || h.edge_count() > g.edge_count() {
        return Ok(ControlFlow::Continue(()));
    }
    let order = placement_order(h);
    let mut pos = vec![0; h.vertex_count()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut checks = vec![Vec::new(); order.len()];
    for e in h.edges() {
        let last = e.iter().map(|&v| pos[v]).max().expect("nonempty edge");
        checks[last].push(e);
    }
    let mut m = Matcher {
        g_n: g.vertex_count(),
        order,
        checks,
        h_deg: h.degrees(),
        g_deg: g.degrees(),
        index: RelationIndex::build(g),
        image: vec![0; h.arity()],
        _h: h,
    };
    let mut map = vec![usize::MAX; h.vertex_count()];
    let mut used = vec![false; g.vertex_count()];
    Ok(m.search(0, &mut map, &mut used, &mut f))
}

pub fn count_injective_homs(h: &Gdh, g: &Gdh) -> Result<u128> {
    let mut count: u128 = 0;
    let _ = for_each_embedding(h, g, |_| {
        count += 1;
        ControlFlow::Continue(())
    })?;
    Ok(count)
}

/// Injective homomorphism count and its normalisation by `|Aut(H)|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyCount {
    pub injective_homs: u128,
    pub automorphisms: u128,
    pub copies: u128,
}

pub fn count_copies(h: &Gdh, g: &Gdh) -> Result<CopyCount> {
    let injective_homs = count_injective_homs(h, g)?;
    // an injective self-map sending edges into edges is a bijection on edges
    let automorphisms = count_injective_homs(h, h)?;
    Ok(CopyCount {
        injective_homs,
        automorphisms,
        copies: injective_homs / automorphisms,
    })
}

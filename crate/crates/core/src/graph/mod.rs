//! GDHs over a fixed theory: edges, density, induced substructures, and
//! containment.

mod embed;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{GdhError, Result};
use crate::perm_group::{canonical_unchecked, closure, Permutation, PermutationGroup};

pub use embed::{count_copies, count_injective_homs, for_each_embedding, CopyCount};

/// Arity `r` plus the position group `J` (of order `m`).
///
/// Cloning is cheap; equality compares the groups.
#[derive(Clone)]
pub struct Theory {
    inner: Arc<PermutationGroup>,
}

impl Theory {
    pub fn new(group: PermutationGroup) -> Result<Self> {
        if !group.is_closed() {
            return Err(GdhError::InvalidArgument(
                "permutation set is not a group".into(),
            ));
        }
        Ok(Self {
            inner: Arc::new(group),
        })
    }

    pub fn from_generators(r: usize, generators: &[Permutation]) -> Result<Self> {
        Ok(Self {
            inner: Arc::new(closure(r, generators)?),
        })
    }

    /// Totally directed r-edges.
    pub fn trivial(r: usize) -> Self {
        Self {
            inner: Arc::new(PermutationGroup::trivial(r)),
        }
    }

    /// Undirected r-uniform hypergraphs.
    pub fn symmetric(r: usize) -> Self {
        Self {
            inner: Arc::new(PermutationGroup::symmetric(r)),
        }
    }

    /// The 2→1 theory: positions 0 and 1 are interchangeable tails, 2 is the head.
    pub fn two_to_one() -> Self {
        Self::from_generators(3, &[Permutation::new(vec![1, 0, 2]).expect("valid")])
            .expect("valid")
    }

    pub fn arity(&self) -> usize {
        self.inner.arity()
    }

    /// `m = |J|`.
    pub fn order(&self) -> usize {
        self.inner.order()
    }

    pub fn group(&self) -> &PermutationGroup {
        &self.inner
    }

    /// `r!/m`, the number of distinct orbit-edges an r-set can hold.
    pub fn edges_per_set(&self) -> usize {
        let fact: usize = (1..=self.arity()).product();
        fact / self.order()
    }

    /// `(r!/m)·C(n, r)`.
    pub fn complete_edge_count(&self, n: usize) -> u128 {
        self.edges_per_set() as u128 * binomial(n as u64, self.arity() as u64)
    }

    /// Canonical representative of the orbit-edge containing `t`.
    pub fn canonical(&self, t: &[usize]) -> Result<Vec<usize>> {
        crate::perm_group::canonical_rep(t, &self.inner)
    }
}

impl PartialEq for Theory {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || *self.inner == *other.inner
    }
}

impl Eq for Theory {}

impl fmt::Debug for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Theory(r={}, m={})", self.arity(), self.order())
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// A finite model of a theory on vertices `0..n`.
///
/// Edges are stored as canonical tuples packed into integers, base `n`, most
/// significant position first, so the set order is the lexicographic order of
/// the tuples.
#[derive(Clone, PartialEq, Eq)]
pub struct Gdh {
    theory: Theory,
    n: usize,
    edges: BTreeSet<u64>,
}

impl Gdh {
    pub fn empty(theory: &Theory, n: usize) -> Result<Self> {
        let r = theory.arity() as u32;
        if n >= 2 && (n as u128).checked_pow(r).is_none_or(|v| v > u64::MAX as u128) {
            return Err(GdhError::InvalidArgument(format!(
                "{n} vertices is too many for arity {r}"
            )));
        }
        Ok(Self {
            theory: theory.clone(),
            n,
            edges: BTreeSet::new(),
        })
    }

    pub fn from_edges<I, T>(theory: &Theory, n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[usize]>,
    {
        let mut g = Self::empty(theory, n)?;
        for e in edges {
            g.insert_edge(e.as_ref())?;
        }
        Ok(g)
    }

    /// Every orbit-edge on `n` vertices.
    pub fn complete(theory: &Theory, n: usize) -> Result<Self> {
        let mut g = Self::empty(theory, n)?;
        let r = theory.arity();
        if n < r {
            return Ok(g);
        }
        for_each_injective_tuple(r, n, |t| {
            if canonical_unchecked(t, theory.group()) == t {
                g.edges.insert(g.encode(t));
            }
        });
        Ok(g)
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn arity(&self) -> usize {
        self.theory.arity()
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Canonical edge tuples in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.edges.iter().map(|&c| self.decode(c))
    }

    pub(crate) fn encode(&self, t: &[usize]) -> u64 {
        encode_tuple(t, self.n)
    }

    pub(crate) fn decode(&self, code: u64) -> Vec<usize> {
        decode_tuple(code, self.n, self.arity())
    }

    fn validate_tuple(&self, t: &[usize]) -> Result<()> {
        if t.len() != self.arity() {
            return Err(GdhError::ArityMismatch {
                expected: self.arity(),
                found: t.len(),
            });
        }
        if let Some(&v) = t.iter().find(|&&v| v >= self.n) {
            return Err(GdhError::VertexOutOfRange { vertex: v, n: self.n });
        }
        for i in 0..t.len() {
            if t[i + 1..].contains(&t[i]) {
                return Err(GdhError::RepeatedVertex(t.to_vec()));
            }
        }
        Ok(())
    }

    /// Adds the orbit-edge of `t`. Returns false if it was already present.
    pub fn insert_edge(&mut self, t: &[usize]) -> Result<bool> {
        self.validate_tuple(t)?;
        let c = canonical_unchecked(t, self.theory.group());
        let code = self.encode(&c);
        Ok(self.edges.insert(code))
    }

    pub fn remove_edge(&mut self, t: &[usize]) -> Result<bool> {
        self.validate_tuple(t)?;
        let c = canonical_unchecked(t, self.theory.group());
        let code = self.encode(&c);
        Ok(self.edges.remove(&code))
    }

    /// Copy of `self` with the orbit-edge of `t` added.
    pub fn add_edge(&self, t: &[usize]) -> Result<Self> {
        let mut g = self.clone();
        g.insert_edge(t)?;
        Ok(g)
    }

    /// Whether `t` (any member of an orbit) belongs to the relation.
    pub fn contains_tuple(&self, t: &[usize]) -> bool {
        if self.validate_tuple(t).is_err() {
            return false;
        }
        let c = canonical_unchecked(t, self.theory.group());
        self.edges.contains(&self.encode(&c))
    }

    pub fn density(&self) -> Result<f64> {
        let r = self.arity();
        if self.n < r {
            return Err(GdhError::InvalidArgument(format!(
                "density needs at least {r} vertices, graph has {}",
                self.n
            )));
        }
        Ok(self.edge_count() as f64 / self.theory.complete_edge_count(self.n) as f64)
    }

    /// Substructure on `subset`, relabelled `0..|subset|` in increasing order.
    pub fn induced(&self, subset: &[usize]) -> Result<Self> {
        let mut verts: Vec<usize> = subset.to_vec();
        verts.sort_unstable();
        verts.dedup();
        if let Some(&v) = verts.iter().find(|&&v| v >= self.n) {
            return Err(GdhError::VertexOutOfRange { vertex: v, n: self.n });
        }
        let mut relabel = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            relabel[v] = i;
        }
        let mut h = Self::empty(&self.theory, verts.len())?;
        for e in self.edges() {
            if e.iter().all(|&v| relabel[v] != usize::MAX) {
                let mapped: Vec<usize> = e.iter().map(|&v| relabel[v]).collect();
                h.insert_edge(&mapped)?;
            }
        }
        Ok(h)
    }

    /// Number of orbit-edges containing each vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in self.edges() {
            for v in e {
                deg[v] += 1;
            }
        }
        deg
    }

    /// Apply a vertex map `old -> map[old]` into a graph on `n` vertices.
    pub fn relabel(&self, map: &[usize], n: usize) -> Result<Self> {
        if map.len() != self.n {
            return Err(GdhError::InvalidArgument(format!(
                "vertex map has length {}, graph has {} vertices",
                map.len(),
                self.n
            )));
        }
        let mut h = Self::empty(&self.theory, n)?;
        for e in self.edges() {
            let mapped: Vec<usize> = e.iter().map(|&v| map[v]).collect();
            h.insert_edge(&mapped)?;
        }
        Ok(h)
    }

    /// Edge set of `self` is a subset of the edge set of `other` (same labels).
    pub fn is_edge_subset_of(&self, other: &Gdh) -> bool {
        self.theory == other.theory
            && self.n == other.n
            && self.edges.is_subset(&other.edges)
    }

    /// Injective homomorphism from `h` into `self`, if any.
    pub fn find_embedding_of(&self, h: &Gdh) -> Result<Option<Vec<usize>>> {
        find_embedding(h, self)
    }
}

/// `{"n": .., "edges": [[..], ..]}`; the theory is carried separately.
impl Serialize for Gdh {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Gdh", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("edges", &self.edges().collect::<Vec<_>>())?;
        st.end()
    }
}

impl fmt::Debug for Gdh {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gdh")
            .field("theory", &self.theory)
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

pub(crate) fn encode_tuple(t: &[usize], n: usize) -> u64 {
    t.iter().fold(0u64, |acc, &v| acc * n as u64 + v as u64)
}

pub(crate) fn decode_tuple(mut code: u64, n: usize, r: usize) -> Vec<usize> {
    let mut t = vec![0; r];
    for slot in t.iter_mut().rev() {
        *slot = (code % n as u64) as usize;
        code /= n as u64;
    }
    t
}

/// Calls `f` on every r-tuple of distinct entries from `0..n`, in lex order.
pub(crate) fn for_each_injective_tuple(r: usize, n: usize, mut f: impl FnMut(&[usize])) {
    fn rec(r: usize, n: usize, cur: &mut Vec<usize>, used: &mut [bool], f: &mut dyn FnMut(&[usize])) {
        if cur.len() == r {
            f(cur);
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(r, n, cur, used, f);
                cur.pop();
                used[v] = false;
            }
        }
    }
    if r > n {
        return;
    }
    let mut used = vec![false; n];
    rec(r, n, &mut Vec::with_capacity(r), &mut used, &mut f);
}

/// `{"arity": r, "order": m, "group": [[images], ..]}`.
impl Serialize for Theory {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Theory", 3)?;
        st.serialize_field("arity", &self.arity())?;
        st.serialize_field("order", &self.order())?;
        st.serialize_field("group", self.group().elements())?;
        st.end()
    }
}

/// A set of forbidden graphs over one theory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Family {
    theory: Theory,
    members: Vec<Gdh>,
}

impl Family {
    pub fn new(theory: &Theory, members: Vec<Gdh>) -> Result<Self> {
        if members.iter().any(|m| m.theory() != theory) {
            return Err(GdhError::TheoryMismatch);
        }
        Ok(Self {
            theory: theory.clone(),
            members,
        })
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn members(&self) -> &[Gdh] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members on at most `k` vertices.
    pub fn restrict(&self, k: usize) -> Family {
        Family {
            theory: self.theory.clone(),
            members: self
                .members
                .iter()
                .filter(|m| m.vertex_count() <= k)
                .cloned()
                .collect(),
        }
    }
}

/// Injective homomorphism `ψ: V_H → V_G` (as `ψ[v]`), smallest in search order.
pub fn find_embedding(h: &Gdh, g: &Gdh) -> Result<Option<Vec<usize>>> {
    let mut found = None;
    let _ = for_each_embedding(h, g, |psi| {
        found = Some(psi.to_vec());
        std::ops::ControlFlow::Break(())
    })?;
    Ok(found)
}

pub fn contains(g: &Gdh, h: &Gdh) -> Result<bool> {
    Ok(find_embedding(h, g)?.is_some())
}

pub fn is_family_free(g: &Gdh, fam: &Family) -> Result<bool> {
    if fam.theory() != g.theory() {
        return Err(GdhError::TheoryMismatch);
    }
    for f in fam.members() {
        if find_embedding(f, g)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Isomorphism by a one-way embedding between graphs of equal size.
pub fn is_isomorphic(a: &Gdh, b: &Gdh) -> Result<bool> {
    if a.theory() != b.theory() {
        return Err(GdhError::TheoryMismatch);
    }
    if a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    let mut da = a.degrees();
    let mut db = b.degrees();
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return Ok(false);
    }
    Ok(find_embedding(a, b)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Theory {
        Theory::two_to_one()
    }

    #[test]
    fn orbit_members_collapse_to_one_edge() {
        let g = Gdh::empty(&z2(), 3).unwrap();
        let g = g.add_edge(&[1, 0, 2]).unwrap().add_edge(&[0, 1, 2]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.edges().next().unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn add_edge_errors() {
        let g = Gdh::empty(&z2(), 3).unwrap();
        assert!(matches!(g.add_edge(&[0, 0, 1]), Err(GdhError::RepeatedVertex(_))));
        assert!(matches!(
            g.add_edge(&[0, 1, 3]),
            Err(GdhError::VertexOutOfRange { vertex: 3, n: 3 })
        ));
        assert!(matches!(g.add_edge(&[0, 1]), Err(GdhError::ArityMismatch { .. })));
    }

    #[test]
    fn distinct_orbits_under_trivial_group() {
        let g = Gdh::empty(&Theory::trivial(3), 3)
            .unwrap()
            .add_edge(&[0, 1, 2])
            .unwrap()
            .add_edge(&[0, 2, 1])
            .unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn complete_counts() {
        assert_eq!(Gdh::complete(&z2(), 3).unwrap().edge_count(), 3);
        assert_eq!(Gdh::complete(&Theory::symmetric(3), 4).unwrap().edge_count(), 4);
        assert_eq!(Gdh::complete(&Theory::trivial(3), 3).unwrap().edge_count(), 6);
        assert_eq!(Gdh::complete(&Theory::trivial(3), 2).unwrap().edge_count(), 0);
        for n in 3..7 {
            for t in [z2(), Theory::symmetric(3), Theory::trivial(3)] {
                let g = Gdh::complete(&t, n).unwrap();
                assert_eq!(g.edge_count() as u128, t.complete_edge_count(n));
                assert_eq!(g.density().unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn density_examples() {
        assert_eq!(Gdh::empty(&z2(), 4).unwrap().density().unwrap(), 0.0);
        let full = Gdh::complete(&z2(), 5).unwrap();
        let half = Gdh::from_edges(&z2(), 5, full.edges().take(15)).unwrap();
        assert_eq!(half.density().unwrap(), 0.5);
        assert!(Gdh::empty(&z2(), 2).unwrap().density().is_err());
    }

    #[test]
    fn induced_examples() {
        let t = z2();
        let k5 = Gdh::complete(&t, 5).unwrap();
        assert_eq!(k5.induced(&[0, 1, 2]).unwrap(), Gdh::complete(&t, 3).unwrap());
        assert_eq!(k5.induced(&[4, 2, 0]).unwrap(), Gdh::complete(&t, 3).unwrap());
        assert_eq!(k5.induced(&[0, 1, 2, 3, 4]).unwrap(), k5);
        assert!(k5.induced(&[0, 3]).unwrap().is_empty());
        assert!(k5.induced(&[0, 7]).is_err());
    }

    #[test]
    fn induced_relabels_in_order() {
        let g = Gdh::from_edges(&z2(), 5, [[3, 1, 4]]).unwrap();
        let h = g.induced(&[1, 3, 4]).unwrap();
        assert!(h.contains_tuple(&[1, 0, 2]));
        assert_eq!(h.edge_count(), 1);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 3), 10);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(60, 3), 34220);
    }

    #[test]
    fn restrict_family_by_size() {
        let t = z2();
        let f = Gdh::from_edges(&t, 5, [[0, 1, 2], [2, 3, 4]]).unwrap();
        let s = Gdh::from_edges(&t, 3, [[0, 1, 2]]).unwrap();
        let fam = Family::new(&t, vec![f, s.clone()]).unwrap();
        assert_eq!(fam.restrict(5), fam);
        assert!(fam.restrict(0).is_empty());
        assert_eq!(fam.restrict(4).members(), &[s]);
    }

    #[test]
    fn family_rejects_mixed_theories() {
        let a = Gdh::empty(&z2(), 3).unwrap();
        assert_eq!(
            Family::new(&Theory::symmetric(3), vec![a]),
            Err(GdhError::TheoryMismatch)
        );
    }
}

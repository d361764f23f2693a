//! Permutations of tuple positions and the finite groups they generate.
//!
//! A permutation `p` on `r` points is stored by its images, `p.images()[i] = p(i)`.
//! Groups act on r-tuples of vertices through positions: the image of the tuple
//! `t` under `p` is `(t[p(0)], ..., t[p(r-1)])`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GdhError, Result};

/// Largest arity for which [`enumerate_subgroups`] runs.
pub const MAX_SUBGROUP_ARITY: usize = 5;

/// A bijection on `{0, .., r-1}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let r = images.len();
        let mut seen = vec![false; r];
        for &x in &images {
            if x >= r || seen[x] {
                return Err(GdhError::NotBijective(images));
            }
            seen[x] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(r: usize) -> Self {
        Self {
            images: (0..r).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.arity() != other.arity() {
            return Err(GdhError::ArityMismatch {
                expected: self.arity(),
                found: other.arity(),
            });
        }
        Ok(Permutation {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.arity()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x] = i;
        }
        Permutation { images: inv }
    }

    /// Reads the positions of `tuple` through this permutation.
    pub fn act_on<T: Copy>(&self, tuple: &[T]) -> Vec<T> {
        self.images.iter().map(|&j| tuple[j]).collect()
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = GdhError;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::new(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// A subgroup of `S_r`, stored by full element enumeration (sorted).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PermutationGroup {
    r: usize,
    elements: Vec<Permutation>,
}

impl PermutationGroup {
    pub fn trivial(r: usize) -> Self {
        Self {
            r,
            elements: vec![Permutation::identity(r)],
        }
    }

    pub fn symmetric(r: usize) -> Self {
        let mut elements = Vec::new();
        let mut current: Vec<usize> = (0..r).collect();
        loop {
            elements.push(Permutation {
                images: current.clone(),
            });
            if !next_permutation(&mut current) {
                break;
            }
        }
        Self { r, elements }
    }

    pub fn arity(&self) -> usize {
        self.r
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &PermutationGroup) -> bool {
        self.r == other.r && self.elements.iter().all(|p| other.contains(p))
    }

    /// Exhaustive closure check under composition and inversion.
    pub fn is_closed(&self) -> bool {
        if !self.contains(&Permutation::identity(self.r)) {
            return false;
        }
        self.elements.iter().all(|p| {
            self.contains(&p.inverse())
                && self
                    .elements
                    .iter()
                    .all(|q| self.contains(&p.compose(q).expect("same arity")))
        })
    }
}

/// Smallest group containing `generators`.
pub fn closure(r: usize, generators: &[Permutation]) -> Result<PermutationGroup> {
    for g in generators {
        Permutation::new(g.images.clone())?;
        if g.arity() != r {
            return Err(GdhError::ArityMismatch {
                expected: r,
                found: g.arity(),
            });
        }
    }
    let mut elements: BTreeSet<Permutation> = BTreeSet::new();
    elements.insert(Permutation::identity(r));
    let mut frontier: Vec<Permutation> = vec![Permutation::identity(r)];
    // finite group: closure under right multiplication by generators suffices
    while let Some(p) = frontier.pop() {
        for g in generators {
            let q = p.compose(g)?;
            if elements.insert(q.clone()) {
                frontier.push(q);
            }
        }
    }
    Ok(PermutationGroup {
        r,
        elements: elements.into_iter().collect(),
    })
}

/// Every subgroup of `S_r`, sorted by order and then by element list.
pub fn enumerate_subgroups(r: usize) -> Result<Vec<PermutationGroup>> {
    if r > MAX_SUBGROUP_ARITY {
        return Err(GdhError::ArityTooLarge {
            arity: r,
            max: MAX_SUBGROUP_ARITY,
        });
    }
    // Start from the cyclic subgroups and join pairs until nothing new appears.
    // Each subgroup is kept with a short generating list so joins stay cheap.
    let sym = PermutationGroup::symmetric(r);
    let mut found: BTreeMap<Vec<Permutation>, Vec<Permutation>> = BTreeMap::new();
    for p in sym.elements() {
        let g = closure(r, std::slice::from_ref(p))?;
        found.entry(g.elements).or_insert_with(|| vec![p.clone()]);
    }
    let mut frontier: Vec<Vec<Permutation>> = found.values().cloned().collect();
    while !frontier.is_empty() {
        let known: Vec<Vec<Permutation>> = found.values().cloned().collect();
        let mut next = Vec::new();
        for a in &frontier {
            for b in &known {
                let mut gens = a.clone();
                gens.extend(b.iter().cloned());
                let g = closure(r, &gens)?;
                if !found.contains_key(&g.elements) {
                    found.insert(g.elements, gens.clone());
                    next.push(gens);
                }
            }
        }
        frontier = next;
    }
    let mut groups: Vec<PermutationGroup> = found
        .into_keys()
        .map(|elements| PermutationGroup { r, elements })
        .collect();
    groups.sort_by(|a, b| {
        a.order()
            .cmp(&b.order())
            .then_with(|| a.elements.cmp(&b.elements))
    });
    Ok(groups)
}

fn check_distinct(t: &[usize]) -> Result<()> {
    for i in 0..t.len() {
        if t[i + 1..].contains(&t[i]) {
            return Err(GdhError::RepeatedVertex(t.to_vec()));
        }
    }
    Ok(())
}

fn check_tuple_arity(t: &[usize], g: &PermutationGroup) -> Result<()> {
    if t.len() != g.arity() {
        return Err(GdhError::ArityMismatch {
            expected: g.arity(),
            found: t.len(),
        });
    }
    Ok(())
}

/// All images of `t` under the group, sorted. Has exactly `|g|` members.
pub fn tuple_orbit(t: &[usize], g: &PermutationGroup) -> Result<Vec<Vec<usize>>> {
    check_tuple_arity(t, g)?;
    check_distinct(t)?;
    let mut orbit: Vec<Vec<usize>> = g.elements().iter().map(|p| p.act_on(t)).collect();
    orbit.sort();
    orbit.dedup();
    Ok(orbit)
}

/// Lexicographically smallest member of the orbit of `t`.
pub fn canonical_rep(t: &[usize], g: &PermutationGroup) -> Result<Vec<usize>> {
    check_tuple_arity(t, g)?;
    check_distinct(t)?;
    Ok(canonical_unchecked(t, g))
}

pub(crate) fn canonical_unchecked(t: &[usize], g: &PermutationGroup) -> Vec<usize> {
    let mut best: Option<Vec<usize>> = None;
    for p in g.elements() {
        let img = p.act_on(t);
        if best.as_ref().is_none_or(|b| img < *b) {
            best = Some(img);
        }
    }
    best.expect("groups are nonempty")
}

/// Advances `v` to its next lexicographic permutation; false at the last one.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

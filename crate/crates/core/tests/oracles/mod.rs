//! Slow reference implementations that share no search code with the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;

pub type Perm = Vec<usize>;

/// `(p ∘ q)(i) = p[q[i]]`.
pub fn compose(p: &[usize], q: &[usize]) -> Perm {
    q.iter().map(|&i| p[i]).collect()
}

pub fn all_perms(r: usize) -> Vec<Perm> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Perm>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; r], &mut out);
    out
}

/// Orders of all subgroups of `S_r`, by testing every subset for closure.
pub fn subgroup_orders_by_subsets(r: usize) -> Vec<usize> {
    let perms = all_perms(r);
    let k = perms.len();
    assert!(k <= 24);
    let index: BTreeMap<Perm, usize> = perms.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let table: Vec<Vec<usize>> = perms
        .iter()
        .map(|p| perms.iter().map(|q| index[&compose(p, q)]).collect())
        .collect();
    let mut orders = Vec::new();
    for mask in 1u32..1 << k {
        let closed = (0..k)
            .filter(|&a| mask >> a & 1 == 1)
            .all(|a| (0..k).filter(|&b| mask >> b & 1 == 1).all(|b| mask >> table[a][b] & 1 == 1));
        if closed {
            orders.push(mask.count_ones() as usize);
        }
    }
    orders.sort_unstable();
    orders
}

/// Lex-least member of the orbit of `t` under positions permuted by `group`
/// (`(σ·t)_i = t_{σ(i)}`).
pub fn canonical(t: &[usize], group: &[Perm]) -> Vec<usize> {
    group
        .iter()
        .map(|s| s.iter().map(|&i| t[i]).collect::<Vec<_>>())
        .min()
        .expect("group contains the identity")
}

pub fn injective_tuples(r: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(r: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                rec(r, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(r, n, &mut Vec::new(), &mut out);
    out
}

/// Orbit-edges on `n` vertices, sorted.
pub fn candidates(r: usize, n: usize, group: &[Perm]) -> Vec<Vec<usize>> {
    let set: BTreeSet<Vec<usize>> = injective_tuples(r, n).iter().map(|t| canonical(t, group)).collect();
    set.into_iter().collect()
}

/// Every copy of every member in the complete graph on `n` vertices, as a set
/// of candidate indices. Members are `(vertex count, edges)`.
pub fn copies(
    r: usize,
    n: usize,
    group: &[Perm],
    members: &[(usize, Vec<Vec<usize>>)],
) -> (Vec<Vec<usize>>, Vec<BTreeSet<usize>>) {
    let cands = candidates(r, n, group);
    let index: BTreeMap<Vec<usize>, usize> = cands.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
    let mut out: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for (v, edges) in members {
        if *v > n {
            continue;
        }
        for map in injective_tuples(*v, n) {
            let copy: BTreeSet<usize> = edges
                .iter()
                .map(|e| index[&canonical(&e.iter().map(|&x| map[x]).collect::<Vec<_>>(), group)])
                .collect();
            out.insert(copy);
        }
    }
    (cands, out.into_iter().collect())
}

/// Largest independent set in a graph on at most 128 vertices, branching on
/// a highest-degree vertex and taking vertices of degree at most 1 outright.
pub fn max_independent_set(adj: &[u128]) -> usize {
    fn rec(adj: &[u128], open: u128, taken: usize, best: &mut usize) {
        if taken + open.count_ones() as usize <= *best {
            return;
        }
        if open == 0 {
            *best = taken;
            return;
        }
        let members = (0..adj.len()).filter(|&v| open >> v & 1 == 1);
        let degree = |v: usize| (adj[v] & open).count_ones();
        let low = members.clone().min_by_key(|&v| degree(v)).unwrap();
        if degree(low) <= 1 {
            rec(adj, open & !(1 << low) & !adj[low], taken + 1, best);
            return;
        }
        let high = members.max_by_key(|&v| degree(v)).unwrap();
        rec(adj, open & !(1 << high) & !adj[high], taken + 1, best);
        rec(adj, open & !(1 << high), taken, best);
    }
    assert!(adj.len() <= 128);
    let mut best = 0;
    rec(adj, if adj.len() == 128 { u128::MAX } else { (1u128 << adj.len()) - 1 }, 0, &mut best);
    best
}

/// Largest copy-free subset by trying every subset of the candidates.
pub fn max_free_subset_by_enumeration(size: usize, copies: &[BTreeSet<usize>]) -> usize {
    assert!(size <= 24);
    let masks: Vec<u32> = copies.iter().map(|c| c.iter().fold(0, |m, &i| m | 1 << i)).collect();
    (0u32..1 << size)
        .filter(|s| masks.iter().all(|&m| s & m != m))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// `ex(n, F)`: full subset enumeration when there are at most 20 candidates,
/// otherwise a maximum independent set in the conflict graph when every copy
/// is a pair of edges. `None` when neither applies.
pub fn extremal_number(r: usize, n: usize, group: &[Perm], members: &[(usize, Vec<Vec<usize>>)]) -> Option<usize> {
    let (cands, cps) = copies(r, n, group, members);
    if cands.len() <= 20 {
        return Some(max_free_subset_by_enumeration(cands.len(), &cps));
    }
    if cands.len() <= 128 && cps.iter().all(|c| c.len() == 2) {
        let mut adj = vec![0u128; cands.len()];
        for c in &cps {
            let v: Vec<usize> = c.iter().copied().collect();
            adj[v[0]] |= 1 << v[1];
            adj[v[1]] |= 1 << v[0];
        }
        return Some(max_independent_set(&adj));
    }
    None
}

/// Whether the edge set (canonical tuples) contains no copy of any member.
pub fn is_free(r: usize, n: usize, group: &[Perm], edges: &BTreeSet<Vec<usize>>, members: &[(usize, Vec<Vec<usize>>)]) -> bool {
    let (cands, cps) = copies(r, n, group, members);
    cps.iter().all(|c| !c.iter().all(|&i| edges.contains(&cands[i])))
}

fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::from(1), |acc, i| acc * BigInt::from(i))
}

/// `m · t^r · (tr − r)! / (tr)!`.
pub fn single_edge_blowup_density(m: u64, r: u64, t: u64) -> BigRational {
    let num = BigInt::from(m) * BigInt::from(t).pow(r as u32) * factorial(t * r - r);
    BigRational::new(num, factorial(t * r))
}

/// Maximum of `Σ_{i<j} x_i x_j` over the grid `x = c / res` with `c` a
/// composition of `res` into `k` nonnegative parts. The objective is symmetric,
/// so nonincreasing compositions suffice.
pub fn complete_graph_grid_max(k: usize, res: usize) -> f64 {
    fn rec(k: usize, left: usize, cap: usize, parts: &mut Vec<usize>, res: usize, best: &mut f64) {
        if parts.len() == k {
            if left == 0 {
                let x: Vec<f64> = parts.iter().map(|&c| c as f64 / res as f64).collect();
                let s: f64 = x.iter().sum();
                let sq: f64 = x.iter().map(|v| v * v).sum();
                *best = best.max((s * s - sq) / 2.0);
            }
            return;
        }
        let slots = k - parts.len();
        for c in (0..=cap.min(left)).rev() {
            if c * slots < left {
                break;
            }
            parts.push(c);
            rec(k, left - c, c, parts, res, best);
            parts.pop();
        }
    }
    let mut best = 0.0;
    rec(k, res, res, &mut Vec::new(), res, &mut best);
    best
}

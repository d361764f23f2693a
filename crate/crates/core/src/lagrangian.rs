//! Blowups, edge polynomials, and blowup density.
//!
//! The blowup density of `G` is `m · max p_G(x)` over the probability simplex,
//! where `p_G(x) = Σ_R e_R Π_{i∈R} x_i` sums over r-sets `R` and `e_R` counts
//! the orbit-edges of `G` inside `R`. The maximum is approximated from below by
//! multi-start projected gradient ascent.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GdhError, Result};
use crate::graph::{Gdh, Theory};

/// Weight vectors must sum to one within this tolerance.
pub const SIMPLEX_TOL: f64 = 1e-12;
/// Value agreement tolerance for the convergence flag.
pub const VALUE_TOL: f64 = 1e-9;
/// Supports up to this size are also scanned with uniform weights.
pub const SUPPORT_SCAN_LIMIT: usize = 12;

/// `t`-blowup: vertex `i` becomes `t[i]` clones, numbered consecutively.
pub fn blowup(g: &Gdh, sizes: &[usize]) -> Result<Gdh> {
    let n = g.vertex_count();
    if sizes.len() != n {
        return Err(GdhError::InvalidArgument(format!(
            "blowup vector has length {}, graph has {n} vertices",
            sizes.len()
        )));
    }
    if sizes.contains(&0) {
        return Err(GdhError::InvalidArgument(
            "blowup sizes must be positive".into(),
        ));
    }
    let mut offset = Vec::with_capacity(n);
    let mut total = 0;
    for &s in sizes {
        offset.push(total);
        total += s;
    }
    let mut out = Gdh::empty(g.theory(), total)?;
    let r = g.arity();
    for e in g.edges() {
        let mut pick = vec![0usize; r];
        loop {
            let t: Vec<usize> = e.iter().zip(&pick).map(|(&v, &j)| offset[v] + j).collect();
            out.insert_edge(&t)?;
            // odometer over the clone choices
            let mut k = 0;
            while k < r {
                pick[k] += 1;
                if pick[k] < sizes[e[k]] {
                    break;
                }
                pick[k] = 0;
                k += 1;
            }
            if k == r {
                break;
            }
        }
    }
    Ok(out)
}

/// Blowup of a single edge with `t` clones per position.
pub fn single_edge_blowup(theory: &Theory, t: usize) -> Result<Gdh> {
    let r = theory.arity();
    let edge = Gdh::from_edges(theory, r, [(0..r).collect::<Vec<_>>()])?;
    blowup(&edge, &vec![t; r])
}

/// `p_G`: sorted r-sets with their orbit-edge counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgePolynomial {
    n: usize,
    arity: usize,
    terms: Vec<(Vec<usize>, u32)>,
}

impl EdgePolynomial {
    pub fn of(g: &Gdh) -> Self {
        let mut counts: BTreeMap<Vec<usize>, u32> = BTreeMap::new();
        for mut e in g.edges() {
            e.sort_unstable();
            *counts.entry(e).or_default() += 1;
        }
        Self {
            n: g.vertex_count(),
            arity: g.arity(),
            terms: counts.into_iter().collect(),
        }
    }

    pub fn variable_count(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &[(Vec<usize>, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(GdhError::InvalidArgument(format!(
                "point has {len} coordinates, polynomial has {} variables",
                self.n
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x.len())?;
        Ok(self.eval_unchecked(x))
    }

    fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(set, c)| *c as f64 * set.iter().map(|&i| x[i]).product::<f64>())
            .sum()
    }

    /// Value at a nonnegative integer vector; equals the blowup edge count.
    pub fn eval_integer(&self, t: &[u64]) -> Result<u128> {
        self.check_len(t.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(set, c)| *c as u128 * set.iter().map(|&i| t[i] as u128).product::<u128>())
            .sum())
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        let mut g = vec![0.0; self.n];
        self.gradient_into(x, &mut g);
        Ok(g)
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (set, c) in &self.terms {
            for (k, &i) in set.iter().enumerate() {
                let others: f64 = set
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &v)| x[v])
                    .product();
                out[i] += *c as f64 * others;
            }
        }
    }
}

/// A point of the probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(GdhError::InvalidArgument(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if !weights.is_empty() && (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(GdhError::InvalidArgument(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        Ok(Self(weights))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = GdhError;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        WeightVector::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// Euclidean projection onto `{x ≥ 0, Σx = 1}` (sort-and-threshold).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumulative += ui;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    let mut x: Vec<f64> = v.iter().map(|&vi| (vi - theta).max(0.0)).collect();
    let sum: f64 = x.iter().sum();
    if sum > 0.0 {
        x.iter_mut().for_each(|xi| *xi /= sum);
    }
    x
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LagrangianConfig {
    /// Number of starting points: the barycentre plus Dirichlet(1) draws.
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Stop once an iterate moves less than this (max-norm).
    pub move_tolerance: f64,
    /// Weights below this are zeroed before the polishing pass.
    pub support_floor: f64,
}

impl Default for LagrangianConfig {
    fn default() -> Self {
        Self {
            starts: 100,
            seed: 0,
            max_iterations: 100_000,
            move_tolerance: 1e-12,
            support_floor: 1e-10,
        }
    }
}

/// Best value `m·p_G(x)` found and where. A lower bound on the blowup density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangianResult {
    pub value: f64,
    pub argmax: WeightVector,
    pub starts_used: usize,
    /// The ten best starts agree within [`VALUE_TOL`].
    pub converged: bool,
    /// Best uniform-on-support value over all supports (small graphs only).
    pub support_check: Option<f64>,
}

/// Outcome of one ascent run.
#[derive(Debug, Clone)]
pub struct Ascent {
    pub point: Vec<f64>,
    /// `p(point)` (not scaled by `m`).
    pub value: f64,
    pub iterations: usize,
}

/// Projected gradient ascent on the simplex from `start`, with Armijo
/// backtracking along the max-norm-normalised gradient. `observer` sees every
/// accepted iterate.
pub fn ascend(
    poly: &EdgePolynomial,
    start: &[f64],
    config: &LagrangianConfig,
    mut observer: Option<&mut dyn FnMut(&[f64])>,
) -> Result<Ascent> {
    poly.check_len(start.len())?;
    let n = start.len();
    let mut x = project_to_simplex(start);
    let mut fx = poly.eval_unchecked(&x);
    let mut grad = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut step = 1.0f64;
    let mut iterations = 0;
    let mut polished = false;
    if let Some(obs) = observer.as_mut() {
        obs(&x);
    }
    while iterations < config.max_iterations {
        iterations += 1;
        poly.gradient_into(&x, &mut grad);
        let scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        let mut moved = 0.0f64;
        if scale > 0.0 {
            loop {
                for i in 0..n {
                    trial[i] = x[i] + step * grad[i] / scale;
                }
                let y = project_to_simplex(&trial);
                let fy = poly.eval_unchecked(&y);
                let gain: f64 = grad.iter().zip(y.iter().zip(&x)).map(|(g, (a, b))| g * (a - b)).sum();
                if fy >= fx + 1e-4 * gain && fy >= fx {
                    moved = y.iter().zip(&x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                    x = y;
                    fx = fy;
                    step = (step * 2.0).min(1e6);
                    break;
                }
                step *= 0.5;
                if step < 1e-30 {
                    break;
                }
            }
        }
        if let Some(obs) = observer.as_mut() {
            obs(&x);
        }
        if moved < config.move_tolerance {
            if polished {
                break;
            }
            // drop negligible weights once and keep going from the smaller face
            polished = true;
            let mut dropped: Vec<f64> = x
                .iter()
                .map(|&w| if w < config.support_floor { 0.0 } else { w })
                .collect();
            let sum: f64 = dropped.iter().sum();
            dropped.iter_mut().for_each(|w| *w /= sum);
            let fd = poly.eval_unchecked(&dropped);
            if fd >= fx {
                x = dropped;
                fx = fd;
                if let Some(obs) = observer.as_mut() {
                    obs(&x);
                }
            } else {
                break;
            }
            step = 1.0;
        }
    }
    Ok(Ascent {
        point: x,
        value: fx,
        iterations,
    })
}

/// Barycentre followed by `count - 1` Dirichlet(1) points from `seed`.
pub fn starting_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if count == 0 || n == 0 {
        return out;
    }
    out.push(vec![1.0 / n as f64; n]);
    while out.len() < count {
        let draws: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect();
        let sum: f64 = draws.iter().sum();
        out.push(draws.into_iter().map(|d| d / sum).collect());
    }
    out
}

/// Multi-start lower bound on the blowup density `b(G) = m · max_simplex p_G`.
pub fn blowup_density(g: &Gdh, config: &LagrangianConfig) -> Result<LagrangianResult> {
    let n = g.vertex_count();
    let m = g.theory().order() as f64;
    let poly = EdgePolynomial::of(g);
    if poly.is_zero() {
        return Ok(LagrangianResult {
            value: 0.0,
            argmax: WeightVector::uniform(n),
            starts_used: 0,
            converged: true,
            support_check: (n <= SUPPORT_SCAN_LIMIT).then_some(0.0),
        });
    }
    let starts = starting_points(n, config.starts.max(1), config.seed);
    let runs: Vec<Ascent> = starts
        .par_iter()
        .map(|s| ascend(&poly, s, config, None))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.value > runs[best].value {
            best = i;
        }
    }
    let mut values: Vec<f64> = runs.iter().map(|a| a.value).collect();
    values.sort_unstable_by(|a, b| b.total_cmp(a));
    let top = values.len().min(10);
    let converged = m * (values[0] - values[top - 1]) <= VALUE_TOL;
    let argmax = runs[best].point.clone();
    Ok(LagrangianResult {
        value: m * poly.eval_unchecked(&argmax),
        argmax: WeightVector(argmax),
        starts_used: runs.len(),
        converged,
        support_check: (n <= SUPPORT_SCAN_LIMIT).then(|| m * support_scan(&poly).0),
    })
}

/// Best uniform-on-support value of `p` over supports of size at least `r`.
/// A heuristic cross-check, not a certificate.
pub fn support_scan(poly: &EdgePolynomial) -> (f64, Vec<usize>) {
    let n = poly.variable_count();
    let mut best = (0.0, Vec::new());
    if n > 20 {
        return best;
    }
    let mut x = vec![0.0; n];
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size < poly.arity() {
            continue;
        }
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = if mask >> i & 1 == 1 { 1.0 / size as f64 } else { 0.0 };
        }
        let v = poly.eval_unchecked(&x);
        if v > best.0 {
            best = (v, (0..n).filter(|&i| mask >> i & 1 == 1).collect());
        }
    }
    best
}

/// `m · p_G(1/n, ..., 1/n)`.
pub fn uniform_lower_bound(g: &Gdh) -> f64 {
    let n = g.vertex_count();
    if n == 0 {
        return 0.0;
    }
    let poly = EdgePolynomial::of(g);
    g.theory().order() as f64 * poly.eval_unchecked(&vec![1.0 / n as f64; n])
}

/// Exact density of the `(t, .., t)`-blowup of one edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceTerm {
    pub t: usize,
    /// Reduced fraction `p/q`.
    pub exact: String,
    pub value: f64,
    #[serde(skip)]
    pub ratio: Option<BigRational>,
}

/// `m · t^r · (tr - r)! / (tr)!` in exact arithmetic.
pub fn blowup_density_sequence(theory: &Theory, t: usize) -> Result<SequenceTerm> {
    if t == 0 {
        return Err(GdhError::InvalidArgument("t must be at least 1".into()));
    }
    let r = theory.arity();
    let total = BigInt::from(t) * BigInt::from(r);
    let numer = BigInt::from(theory.order()) * num_traits::pow(BigInt::from(t), r);
    let mut denom = BigInt::one();
    for i in 0..r {
        denom *= &total - BigInt::from(i);
    }
    let ratio = BigRational::new(numer, denom);
    let value = ratio
        .to_f64()
        .ok_or_else(|| GdhError::InvalidArgument("density not representable".into()))?;
    Ok(SequenceTerm {
        t,
        exact: format!("{}/{}", ratio.numer(), ratio.denom()),
        value,
        ratio: Some(ratio),
    })
}

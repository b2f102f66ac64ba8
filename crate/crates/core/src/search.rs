//! Exhaustive search for maximum slope sets under a diameter bound.
//!
//! Every slope set is carried by a marking change onto one containing `1/0`,
//! and translations fixing `1/0` put the least remaining element `p0/q0`
//! (in `(q, p)` order) at `0 <= p0 < q0`. With `1/0` in the set every other
//! element has `q <= D`, and its distance to `p0/q0` confines the numerator to
//! `[(p0 q - D)/q0, (p0 q + D)/q0]`. Each choice of `p0/q0` is a branch; inside
//! a branch the problem is a maximum clique in the graph of slopes at pairwise
//! distance `<= D`, solved by branch and bound with greedy coloring bounds.
//!
//! When a center constraint `k` is given, center candidates are finite within
//! a branch (distance `<= k` from both `1/0` and `p0/q0`) and are tracked as a
//! bitset that shrinks as slopes are added.
//!
//! [`Normalization::CenterAtMeridian`] is a second, independent route for the
//! constrained problem: the center is sent to `1/0` instead, so elements have
//! `q <= k` and the set may or may not contain `1/0`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_integer::Integer;
use rayon::prelude::*;

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::sets::SlopeSet;
use crate::slope::Slope;

/// Largest diameter bound searched without an explicit override.
pub const DIAMETER_GUARD: u64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `1/0` is an element; centers are tracked alongside.
    MeridianInSet,
    /// The center is `1/0`; it may or may not be an element.
    CenterAtMeridian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub diameter_bound: u64,
    pub center_k: Option<u64>,
    /// Fix `1/0` as an element. When false the center is fixed at `1/0`
    /// instead, which requires `center_k`.
    pub assume_meridian: bool,
    /// Permit `diameter_bound > DIAMETER_GUARD`.
    pub allow_large: bool,
    pub order: BranchOrder,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl SearchConfig {
    pub fn new(diameter_bound: u64, center_k: Option<u64>) -> Self {
        SearchConfig {
            diameter_bound,
            center_k,
            assume_meridian: true,
            allow_large: false,
            order: BranchOrder::Ascending,
            jobs: None,
        }
    }

    pub fn normalization(&self) -> Normalization {
        if self.assume_meridian {
            Normalization::MeridianInSet
        } else {
            Normalization::CenterAtMeridian
        }
    }

    fn validate(&self) -> Result<()> {
        if self.diameter_bound > DIAMETER_GUARD && !self.allow_large {
            return Err(Error::GuardExceeded { diameter: self.diameter_bound, guard: DIAMETER_GUARD });
        }
        if self.diameter_bound > i32::MAX as u64 || self.center_k.is_some_and(|k| k > i32::MAX as u64) {
            return Err(Error::Unsupported("bounds must fit in 32 bits".into()));
        }
        if !self.assume_meridian && self.center_k.is_none() {
            return Err(Error::Unsupported(
                "without 1/0 as an element the search window is only finite under a center constraint".into(),
            ));
        }
        Ok(())
    }
}

/// Numerator interval `lo..=hi` searched for denominator `q` in one branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumeratorRange {
    pub q: i64,
    pub lo: i64,
    pub hi: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchRecord {
    /// Least non-meridian element, numerator in `[0, q)`.
    pub least: Slope,
    pub ranges: Vec<NumeratorRange>,
    pub vertices: usize,
    pub center_candidates: usize,
    pub best: usize,
    pub nodes: u64,
}

/// Enough to re-audit completeness: the normalization and every branch's
/// search window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub diameter_bound: u64,
    pub center_k: Option<u64>,
    pub normalization: Normalization,
    pub branches: Vec<BranchRecord>,
    pub max_cardinality: usize,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub max_cardinality: usize,
    /// Canonical forms, deduplicated, sorted.
    pub witnesses: Vec<SlopeSet>,
    /// Varies with thread scheduling when more than one worker runs.
    pub nodes_explored: u64,
    pub certificate: Certificate,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub holds: bool,
    pub bound: usize,
    pub max_cardinality: usize,
    pub counterexample: Option<SlopeSet>,
    pub certificate: Certificate,
}

struct Branch {
    least: Slope,
    base: Vec<Slope>,
    vertices: Vec<Slope>,
    adj: Vec<Bits>,
    ranges: Vec<NumeratorRange>,
    centers: Vec<Slope>,
    /// Per vertex: center candidates within `k`. Empty when untracked.
    center_adj: Vec<Bits>,
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// Slopes `p/q` with `(q, p) > least`, `q <= q_max`, and
/// `|p q0 - p0 q| <= bound`.
fn window_after(least: Slope, q_max: i64, bound: i64) -> (Vec<Slope>, Vec<NumeratorRange>) {
    let (p0, q0) = (least.p(), least.q());
    let mut slopes = Vec::new();
    let mut ranges = Vec::new();
    for q in q0..=q_max {
        let lo = ceil_div(p0 * q - bound, q0);
        let hi = (p0 * q + bound).div_euclid(q0);
        let lo = if q == q0 { lo.max(p0 + 1) } else { lo };
        if lo > hi {
            continue;
        }
        ranges.push(NumeratorRange { q, lo, hi });
        slopes.extend((lo..=hi).filter(|p| p.gcd(&q) == 1).map(|p| Slope::new(p, q).unwrap()));
    }
    (slopes, ranges)
}

fn build_branch(cfg: &SearchConfig, least: Slope) -> Option<Branch> {
    let d = cfg.diameter_bound as i64;
    let (base, mut vertices, ranges, centers) = match cfg.normalization() {
        Normalization::MeridianInSet => {
            let (vertices, ranges) = window_after(least, d, d);
            let centers = match cfg.center_k {
                None => Vec::new(),
                Some(k) => {
                    let k = k as i64;
                    let mut c = Vec::new();
                    if least.q() <= k {
                        c.push(Slope::MERIDIAN);
                    }
                    for q in 1..=k {
                        let lo = ceil_div(least.p() * q - k, least.q());
                        let hi = (least.p() * q + k).div_euclid(least.q());
                        c.extend((lo..=hi).filter(|p| p.gcd(&q) == 1).map(|p| Slope::new(p, q).unwrap()));
                    }
                    if c.is_empty() {
                        return None;
                    }
                    c
                }
            };
            (vec![Slope::MERIDIAN, least], vertices, ranges, centers)
        }
        Normalization::CenterAtMeridian => {
            let k = cfg.center_k.expect("validated") as i64;
            let (mut vertices, ranges) = window_after(least, k, d);
            if least.q() <= d {
                vertices.insert(0, Slope::MERIDIAN);
            }
            (vec![least], vertices, ranges, Vec::new())
        }
    };
    let tracked = !centers.is_empty();
    let k = cfg.center_k.unwrap_or(0);
    if tracked {
        vertices.retain(|v| centers.iter().any(|c| c.distance(v) <= k));
    }
    if cfg.order == BranchOrder::Descending {
        vertices.reverse();
    }
    let n = vertices.len();
    let adj = vertices
        .iter()
        .map(|a| {
            let mut b = Bits::empty(n);
            for (j, v) in vertices.iter().enumerate() {
                if v != a && a.distance(v) <= cfg.diameter_bound {
                    b.insert(j);
                }
            }
            b
        })
        .collect();
    let center_adj = if tracked {
        vertices
            .iter()
            .map(|v| {
                let mut b = Bits::empty(centers.len());
                for (j, c) in centers.iter().enumerate() {
                    if c.distance(v) <= k {
                        b.insert(j);
                    }
                }
                b
            })
            .collect()
    } else {
        Vec::new()
    };
    Some(Branch { least, base, vertices, adj, ranges, centers, center_adj })
}

fn branch_roots(cfg: &SearchConfig) -> Vec<Slope> {
    let q_max = match cfg.normalization() {
        Normalization::MeridianInSet => cfg.diameter_bound,
        Normalization::CenterAtMeridian => cfg.center_k.expect("validated"),
    } as i64;
    let mut roots: Vec<Slope> = (1..=q_max)
        .flat_map(|q| (0..q).filter(move |p| p.gcd(&q) == 1).map(move |p| Slope::new(p, q).unwrap()))
        .collect();
    if cfg.order == BranchOrder::Descending {
        roots.reverse();
    }
    roots
}

struct Engine<'a> {
    branch: &'a Branch,
    best: &'a AtomicUsize,
    nodes: u64,
    local_best: usize,
    found: Vec<Vec<usize>>,
    stack: Vec<usize>,
}

impl Engine<'_> {
    fn record(&mut self) {
        let size = self.branch.base.len() + self.stack.len();
        self.best.fetch_max(size, Ordering::Relaxed);
        if size > self.local_best {
            self.local_best = size;
            self.found.clear();
        }
        if size == self.local_best && size >= self.best.load(Ordering::Relaxed) {
            self.found.push(self.stack.clone());
        }
    }

    /// Greedy sequential coloring; returns vertices in nondecreasing color
    /// order with their colors (1-based).
    fn color_sort(&self, cand: &Bits) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(cand.count());
        let mut colors = Vec::with_capacity(order.capacity());
        let mut uncolored = cand.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut avail = uncolored.clone();
            while let Some(v) = avail.first() {
                avail.remove(v);
                avail.and_not_assign(&self.branch.adj[v]);
                uncolored.remove(v);
                order.push(v);
                colors.push(color);
            }
        }
        (order, colors)
    }

    fn expand(&mut self, mut cand: Bits, centers: Option<Bits>) {
        self.nodes += 1;
        let (order, colors) = self.color_sort(&cand);
        for i in (0..order.len()).rev() {
            let size = self.branch.base.len() + self.stack.len();
            if size + colors[i] < self.best.load(Ordering::Relaxed) {
                return;
            }
            let v = order[i];
            let next_centers = centers.as_ref().map(|c| c.and(&self.branch.center_adj[v]));
            if next_centers.as_ref().is_some_and(Bits::is_empty) {
                cand.remove(v);
                continue;
            }
            self.stack.push(v);
            self.record();
            let mut next = cand.and(&self.branch.adj[v]);
            if let Some(nc) = &next_centers {
                for u in next.clone().ones() {
                    if !self.branch.center_adj[u].intersects(nc) {
                        next.remove(u);
                    }
                }
            }
            if !next.is_empty() {
                self.expand(next, next_centers);
            }
            self.stack.pop();
            cand.remove(v);
        }
    }
}

struct BranchOutcome {
    record: BranchRecord,
    best: usize,
    cliques: Vec<SlopeSet>,
}

fn run_branch(branch: &Branch, best: &AtomicUsize) -> BranchOutcome {
    let mut engine =
        Engine { branch, best, nodes: 0, local_best: 0, found: Vec::new(), stack: Vec::new() };
    engine.record();
    let centers = (!branch.centers.is_empty()).then(|| Bits::full(branch.centers.len()));
    engine.expand(Bits::full(branch.vertices.len()), centers);
    let cliques = engine
        .found
        .iter()
        .map(|stack| {
            branch.base.iter().copied().chain(stack.iter().map(|&i| branch.vertices[i])).collect()
        })
        .collect();
    BranchOutcome {
        record: BranchRecord {
            least: branch.least,
            ranges: branch.ranges.clone(),
            vertices: branch.vertices.len(),
            center_candidates: branch.centers.len(),
            best: engine.local_best,
            nodes: engine.nodes,
        },
        best: engine.local_best,
        cliques,
    }
}

/// Exact maximum cardinality of slope sets with diameter `<= D` (and a
/// center within `k` of every element, when `center_k` is set), with every
/// maximum set up to marking change.
pub fn search(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    match cfg.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
            .install(|| search_inner(cfg)),
        None => search_inner(cfg),
    }
}

fn search_inner(cfg: &SearchConfig) -> Result<SearchResult> {
    // {1/0} is admissible under every constraint
    let best = AtomicUsize::new(1);
    let branches: Vec<Branch> =
        branch_roots(cfg).into_iter().filter_map(|r| build_branch(cfg, r)).collect();
    let outcomes: Vec<BranchOutcome> = branches.par_iter().map(|b| run_branch(b, &best)).collect();

    let max_cardinality = outcomes.iter().map(|o| o.best).max().unwrap_or(0).max(1);
    let mut witnesses: BTreeSet<SlopeSet> = BTreeSet::new();
    if max_cardinality == 1 {
        witnesses.insert(SlopeSet::from_iter([Slope::MERIDIAN]));
    }
    for o in outcomes.iter().filter(|o| o.best == max_cardinality) {
        witnesses.extend(o.cliques.iter().map(SlopeSet::canonical_form));
    }
    let mut records: Vec<BranchRecord> = outcomes.into_iter().map(|o| o.record).collect();
    records.sort_by_key(|r| r.least);
    let nodes_explored = records.iter().map(|r| r.nodes).sum();
    Ok(SearchResult {
        max_cardinality,
        witnesses: witnesses.into_iter().collect(),
        nodes_explored,
        certificate: Certificate {
            diameter_bound: cfg.diameter_bound,
            center_k: cfg.center_k,
            normalization: cfg.normalization(),
            branches: records,
            max_cardinality,
        },
    })
}

/// Whether every admissible set has at most `bound` elements; otherwise a
/// maximum set is returned as counterexample.
pub fn verify_no_larger(cfg: &SearchConfig, bound: usize) -> Result<Verdict> {
    let result = search(cfg)?;
    let holds = result.max_cardinality <= bound;
    Ok(Verdict {
        holds,
        bound,
        max_cardinality: result.max_cardinality,
        counterexample: if holds { None } else { result.witnesses.first().cloned() },
        certificate: result.certificate,
    })
}

/// Independent re-check of a witness against the constraints, using only
/// the set analytics.
pub fn admissible(s: &SlopeSet, diameter_bound: u64, center_k: Option<u64>) -> bool {
    if s.diameter() > diameter_bound {
        return false;
    }
    match center_k {
        None => true,
        Some(k) => s.all_centers(k).is_none_or(|c| !c.is_empty()),
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# search certificate")?;
        writeln!(f, "diameter_bound {}", self.diameter_bound)?;
        match self.center_k {
            Some(k) => writeln!(f, "center_k {k}")?,
            None => writeln!(f, "center_k none")?,
        }
        match self.normalization {
            Normalization::MeridianInSet => {
                writeln!(f, "normalization 1/0 is an element (any set is carried there by a marking change)")?;
                writeln!(f, "window least non-meridian p0/q0 with 0 <= p0 < q0 <= D; others q0 <= q <= D")?;
            }
            Normalization::CenterAtMeridian => {
                writeln!(f, "normalization the center is 1/0 (any center is carried there by a marking change)")?;
                writeln!(f, "window least non-meridian p0/q0 with 0 <= p0 < q0 <= k; others q0 <= q <= k")?;
            }
        }
        writeln!(f, "constraint |p q0 - p0 q| <= D for every other element p/q")?;
        writeln!(f, "branches {}", self.branches.len())?;
        for b in &self.branches {
            write!(
                f,
                "branch {} vertices {} centers {} best {} ranges",
                b.least, b.vertices, b.center_candidates, b.best
            )?;
            for r in &b.ranges {
                write!(f, " q={}:[{},{}]", r.q, r.lo, r.hi)?;
            }
            writeln!(f)?;
        }
        writeln!(f, "max_cardinality {}", self.max_cardinality)
    }
}

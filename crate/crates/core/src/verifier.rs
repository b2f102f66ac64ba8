//! Replays the cardinality argument for slope sets whose elements all lie
//! within distance 2 of a center slope.
//!
//! With the center at `1/0`, every other element is an integer `N/1`
//! (distance 1) or a half-integer `M/2` with `M` odd (distance 2). After a
//! translation (and possibly a mirror) the integers span `{0, .., N_k}`. The
//! diameter bound `D` then pins every half-integer to
//! `[N_k - r/2, r/2]`, with `r` the largest odd number `<= D`, so there are at
//! most `r - N_k + 1` of them. For `D = 8` this gives
//! `(N_k + 1) + (8 - N_k) + 1 = 10`. Without integers, distinct half-integers
//! are at distance `>= 4`, which leaves room for `floor(D/4) + 1` of them.

use std::fmt;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::search::{search, SearchConfig};
use crate::sets::SlopeSet;
use crate::slope::{MarkingTransform, Slope};

/// Bookkeeping of a set classified around the center `1/0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofClassification {
    /// Always `1/0`; the classified set is expressed in a marking where the
    /// center is the meridian.
    pub gamma: Slope,
    pub gamma_in_set: bool,
    /// Sorted integers `N_1 < .. < N_k`, with `N_1 = 0` when nonempty.
    pub integrals: Vec<i64>,
    /// Sorted odd numerators `M_1 < .. < M_l` of the half-integral slopes.
    pub halves: Vec<i64>,
    /// Transform from the input marking to the classified one.
    pub transform: MarkingTransform,
}

impl ProofClassification {
    pub fn k(&self) -> usize {
        self.integrals.len()
    }

    pub fn l(&self) -> usize {
        self.halves.len()
    }

    /// Largest integral element `N_k`.
    pub fn n_k(&self) -> Option<i64> {
        self.integrals.last().copied()
    }

    pub fn cardinality(&self) -> usize {
        self.k() + self.l() + usize::from(self.gamma_in_set)
    }

    /// The classified set in normalized coordinates.
    pub fn slopes(&self) -> SlopeSet {
        let mut s: SlopeSet = self
            .integrals
            .iter()
            .map(|&n| Slope::integer(n))
            .chain(self.halves.iter().map(|&m| Slope::half(m)))
            .collect();
        if self.gamma_in_set {
            s.insert(Slope::MERIDIAN);
        }
        s
    }
}

impl fmt::Display for ProofClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gamma        {} ({})", self.gamma, if self.gamma_in_set { "element" } else { "not an element" })?;
        writeln!(f, "transform    {}", self.transform)?;
        let ints: Vec<String> = self.integrals.iter().map(|n| format!("{n}/1")).collect();
        let halves: Vec<String> = self.halves.iter().map(|m| format!("{m}/2")).collect();
        writeln!(f, "integrals    k = {}  [{}]", self.k(), ints.join(", "))?;
        match self.n_k() {
            Some(n) => writeln!(f, "N_k          {n}")?,
            None => writeln!(f, "N_k          -")?,
        }
        writeln!(f, "halves       l = {}  [{}]", self.l(), halves.join(", "))?;
        write!(f, "cardinality  {}", self.cardinality())
    }
}

fn normalize_integral(integrals: &[i64], halves: &[i64]) -> (Vec<i64>, Vec<i64>, MarkingTransform) {
    let lo = integrals[0];
    let hi = *integrals.last().unwrap();
    let plain = (
        integrals.iter().map(|n| n - lo).collect::<Vec<_>>(),
        halves.iter().map(|m| m - 2 * lo).collect::<Vec<_>>(),
        MarkingTransform::translation(-lo),
    );
    let mut mi: Vec<i64> = integrals.iter().map(|n| hi - n).collect();
    let mut mh: Vec<i64> = halves.iter().map(|m| 2 * hi - m).collect();
    mi.sort_unstable();
    mh.sort_unstable();
    let mirrored =
        (mi, mh, MarkingTransform::translation(hi).compose(&MarkingTransform::MIRROR).unwrap());
    if (&mirrored.0, &mirrored.1) > (&plain.0, &plain.1) {
        mirrored
    } else {
        plain
    }
}

fn normalize_halves(halves: &[i64]) -> (Vec<i64>, MarkingTransform) {
    // translate so the largest half is 1/2, with or without a mirror first
    let top = *halves.last().unwrap();
    let shift = (1 - top) / 2;
    let plain = (halves.iter().map(|m| m + 2 * shift).collect::<Vec<_>>(), MarkingTransform::translation(shift));
    let bottom = halves[0];
    let mshift = (1 + bottom) / 2;
    let mut mh: Vec<i64> = halves.iter().map(|m| -m + 2 * mshift).collect();
    mh.sort_unstable();
    let mirrored =
        (mh, MarkingTransform::translation(mshift).compose(&MarkingTransform::MIRROR).unwrap());
    if mirrored.0 > plain.0 {
        mirrored
    } else {
        plain
    }
}

/// Splits a set around the center `1/0` into integral and half-integral
/// elements and normalizes the marking.
pub fn classify(s: &SlopeSet) -> Result<ProofClassification> {
    let mut integrals = Vec::new();
    let mut halves = Vec::new();
    let mut gamma_in_set = false;
    for r in s.iter() {
        match r.q() {
            0 => gamma_in_set = true,
            1 => integrals.push(r.p()),
            2 => halves.push(r.p()),
            q => return Err(Error::FarFromMeridian { slope: *r, distance: q as u64 }),
        }
    }
    integrals.sort_unstable();
    halves.sort_unstable();
    let (integrals, halves, transform) = if !integrals.is_empty() {
        normalize_integral(&integrals, &halves)
    } else if !halves.is_empty() {
        let (h, t) = normalize_halves(&halves);
        (integrals, h, t)
    } else {
        (integrals, halves, MarkingTransform::IDENTITY)
    };
    Ok(ProofClassification { gamma: Slope::MERIDIAN, gamma_in_set, integrals, halves, transform })
}

/// Classifies after sending `center` to `1/0`.
pub fn classify_about(s: &SlopeSet, center: &Slope) -> Result<ProofClassification> {
    let to_m = MarkingTransform::to_meridian(center);
    let mut c = classify(&s.apply(&to_m)?)?;
    c.transform = c.transform.compose(&to_m)?;
    Ok(c)
}

/// Classifies around the least center within distance 2.
pub fn classify_any(s: &SlopeSet) -> Result<ProofClassification> {
    if s.iter().all(|r| r.q() <= 2) {
        return classify(s);
    }
    let center = match s.all_centers(2) {
        Some(c) => c.first().copied().ok_or(Error::NoCenter { k: 2 })?,
        // at most one element: any slope works, use the element itself
        None => s.first().unwrap_or(Slope::MERIDIAN),
    };
    classify_about(s, &center)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofCase {
    NoIntegral,
    Integral,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofBound {
    pub case: ProofCase,
    pub diameter_bound: u64,
    pub bound: usize,
    pub actual: usize,
    pub trace: Vec<String>,
}

/// An inequality used by the argument fails on the given classification.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{inequality}")]
pub struct ProofViolation {
    pub inequality: String,
    pub trace: Vec<String>,
}

fn half(m: i64) -> String {
    format!("{m}/2")
}

/// Replays the argument on `c`, instantiating each inequality it uses.
pub fn proof_bound(c: &ProofClassification, diameter_bound: u64) -> std::result::Result<ProofBound, ProofViolation> {
    let d = diameter_bound as i64;
    let mut trace = Vec::new();
    let fail = |inequality: String, mut trace: Vec<String>| {
        trace.push(format!("FAIL {inequality}"));
        Err(ProofViolation { inequality, trace })
    };
    trace.push(format!(
        "gamma = 1/0 ({}); k = {} integral, l = {} half-integral elements",
        if c.gamma_in_set { "in the set" } else { "not in the set" },
        c.k(),
        c.l()
    ));

    let Some(n_k) = c.n_k() else {
        trace.push("case: no integral elements".to_string());
        if let Some(&x) = c.halves.first() {
            let y = *c.halves.last().unwrap();
            let dist = Slope::half(x).distance(&Slope::half(y));
            if dist > diameter_bound {
                return fail(format!("Δ({}, {}) = {dist} <= {d}", half(x), half(y)), trace);
            }
            trace.push(format!("widest pair Δ({}, {}) = {dist} <= {d}", half(x), half(y)));
        }
        for w in c.halves.windows(2) {
            let dist = Slope::half(w[0]).distance(&Slope::half(w[1]));
            trace.push(format!("Δ({}, {}) = {dist} >= 4", half(w[0]), half(w[1])));
        }
        let half_cap = (d / 4 + 1) as usize;
        trace.push(format!(
            "consecutive halves differ by Δ >= 4 within a span of Δ <= {d}: l <= floor({d}/4) + 1 = {half_cap}"
        ));
        if c.l() > half_cap {
            return fail(format!("l = {} <= {half_cap}", c.l()), trace);
        }
        let bound = half_cap + 1;
        trace.push(format!("cardinality <= l + 1 <= {bound}; actual {}", c.cardinality()));
        return Ok(ProofBound {
            case: ProofCase::NoIntegral,
            diameter_bound,
            bound,
            actual: c.cardinality(),
            trace,
        });
    };

    trace.push(format!("case: integral elements in {{0, .., {n_k}}}"));
    trace.push(format!("k = {} <= N_k + 1 = {}", c.k(), n_k + 1));
    if n_k > d {
        return fail(format!("N_k = Δ(0/1, {n_k}/1) = {n_k} <= {d}"), trace);
    }
    trace.push(format!("N_k = Δ(0/1, {n_k}/1) = {n_k} <= {d}"));
    for &m in &c.halves {
        let to_top = (m - 2 * n_k).abs();
        if to_top > d {
            return fail(format!("Δ({}, {n_k}/1) = |{m} - 2*{n_k}| = {to_top} <= {d}", half(m)), trace);
        }
        if m.abs() > d {
            return fail(format!("Δ({}, 0/1) = |{m}| = {} <= {d}", half(m), m.abs()), trace);
        }
    }
    // odd numerators tighten |M - 2 N_k| <= D to <= r
    let r = if d % 2 == 0 { d - 1 } else { d };
    let half_cap = (r - n_k + 1).max(0);
    if let (Some(&m1), Some(&ml)) = (c.halves.first(), c.halves.last()) {
        trace.push(format!("M_1 odd: {n_k} - {r}/2 <= M_1/2 = {} <= {n_k} + {r}/2", half(m1)));
        trace.push(format!("M_l odd: -{r}/2 <= M_l/2 = {} <= {r}/2", half(ml)));
        if 2 * n_k - r > m1 || ml > r {
            return fail(format!("{} - {r} <= M_1 and M_l <= {r}", 2 * n_k), trace);
        }
        trace.push(format!(
            "M_l/2 - M_1/2 = {} <= {r}/2 - (-{r}/2 + {n_k}) = {}",
            (ml - m1) as f64 / 2.0,
            r - n_k
        ));
    }
    trace.push(format!("l <= {r} - N_k + 1 = {half_cap}"));
    if c.l() as i64 > half_cap {
        return fail(format!("l = {} <= {half_cap}", c.l()), trace);
    }
    let bound = (n_k + 1 + half_cap + 1) as usize;
    trace.push(format!(
        "cardinality <= (N_k + 1) + ({r} - N_k + 1) + 1 = ({}) + ({half_cap}) + 1 = {bound}; actual {}",
        n_k + 1,
        c.cardinality()
    ));
    Ok(ProofBound { case: ProofCase::Integral, diameter_bound, bound, actual: c.cardinality(), trace })
}

/// A witness on which the argument and the search disagree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cross-check failed on {witness}: {reason}")]
pub struct Discrepancy {
    pub witness: SlopeSet,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct CrossCheck {
    pub diameter_bound: u64,
    pub center_k: u64,
    pub max_cardinality: usize,
    /// Each witness with the bound replayed on it.
    pub checked: Vec<(SlopeSet, usize)>,
}

/// Runs the exhaustive search and replays the argument on every maximum
/// witness. For `(D, k) = (8, 2)` the maximum must also be exactly 10.
pub fn exhaustive_cross_check(cfg: &SearchConfig) -> Result<std::result::Result<CrossCheck, Discrepancy>> {
    let k = cfg
        .center_k
        .filter(|&k| k <= 2)
        .ok_or_else(|| Error::Unsupported("cross-check needs a center constraint k <= 2".into()))?;
    let result = search(cfg)?;
    let mut checked = Vec::new();
    for w in &result.witnesses {
        let disc = |reason: String| Discrepancy { witness: w.clone(), reason };
        let c = match classify_any(w) {
            Ok(c) => c,
            Err(e) => return Ok(Err(disc(e.to_string()))),
        };
        let b = match proof_bound(&c, cfg.diameter_bound) {
            Ok(b) => b,
            Err(v) => return Ok(Err(disc(v.to_string()))),
        };
        if b.bound < w.len() {
            return Ok(Err(disc(format!("bound {} below cardinality {}", b.bound, w.len()))));
        }
        checked.push((w.clone(), b.bound));
    }
    if (cfg.diameter_bound, k) == (8, 2) && result.max_cardinality != 10 {
        let w = result.witnesses.first().cloned().unwrap_or_default();
        return Ok(Err(Discrepancy {
            witness: w,
            reason: format!("maximum {} differs from 10", result.max_cardinality),
        }));
    }
    Ok(Ok(CrossCheck {
        diameter_bound: cfg.diameter_bound,
        center_k: k,
        max_cardinality: result.max_cardinality,
        checked,
    }))
}

//! Finite slope sets: diameter, centers, normalization and the `.slopes`
//! text format.

use std::collections::BTreeSet;
use std::collections::btree_map::{BTreeMap, Entry};
use std::fmt;

use crate::error::{Error, Result};
use crate::slope::{enumerate_slopes, MarkingTransform, Slope};

/// The twelve-slope set with diameter 8, as shipped in `fixtures/`.
pub const PAPER_EXAMPLE_TEXT: &str = include_str!("../fixtures/paper_example.slopes");

/// Finite enumeration window for center searches: `0 <= q <= q_max`,
/// `|p| <= p_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub q_max: u32,
    pub p_bound: u32,
}

/// A finite set of distinct canonical slopes, iterated in `(q, p)` order.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlopeSet {
    elements: BTreeSet<Slope>,
}

impl SlopeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a set, rejecting duplicates.
    pub fn try_from_slopes<I: IntoIterator<Item = Slope>>(slopes: I) -> Result<Self> {
        let mut out = SlopeSet::new();
        for (i, r) in slopes.into_iter().enumerate() {
            if !out.elements.insert(r) {
                return Err(Error::Duplicate { line: i + 1, first: 0, slope: r });
            }
        }
        Ok(out)
    }

    /// Parses a comma- or whitespace-separated list of slope literals.
    pub fn parse_list(s: &str) -> Result<Self> {
        s.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Slope>>>()
            .and_then(Self::try_from_slopes)
    }

    /// The displayed diameter-8 set of cardinality 12.
    pub fn paper_example() -> Self {
        load_set(PAPER_EXAMPLE_TEXT).expect("bundled fixture parses")
    }

    pub fn insert(&mut self, r: Slope) -> bool {
        self.elements.insert(r)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, r: &Slope) -> bool {
        self.elements.contains(r)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Slope> + '_ {
        self.elements.iter()
    }

    pub fn to_vec(&self) -> Vec<Slope> {
        self.elements.iter().copied().collect()
    }

    /// Least element in `(q, p)` order.
    pub fn first(&self) -> Option<Slope> {
        self.elements.first().copied()
    }

    /// Maximum pairwise distance; 0 for fewer than two elements.
    pub fn diameter(&self) -> u64 {
        self.diameter_pair().map_or(0, |(_, _, d)| d)
    }

    /// First pair (in iteration order) realizing the diameter.
    pub fn diameter_pair(&self) -> Option<(Slope, Slope, u64)> {
        let v = self.to_vec();
        let mut best: Option<(Slope, Slope, u64)> = None;
        for (i, a) in v.iter().enumerate() {
            for b in &v[i + 1..] {
                let d = a.distance(b);
                if best.is_none_or(|(_, _, m)| d > m) {
                    best = Some((*a, *b, d));
                }
            }
        }
        best
    }

    /// Row-major pairwise distances in iteration order.
    pub fn distance_matrix(&self) -> Vec<Vec<u64>> {
        let v = self.to_vec();
        v.iter().map(|a| v.iter().map(|b| a.distance(b)).collect()).collect()
    }

    /// Sorted multiset of pairwise distances over unordered pairs.
    pub fn distance_profile(&self) -> Vec<u64> {
        let v = self.to_vec();
        let mut out: Vec<u64> = v
            .iter()
            .enumerate()
            .flat_map(|(i, a)| v[i + 1..].iter().map(move |b| a.distance(b)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Largest distance from `r` to an element; 0 for the empty set.
    pub fn max_distance_from(&self, r: &Slope) -> u64 {
        self.iter().map(|x| x.distance(r)).max().unwrap_or(0)
    }

    pub fn apply(&self, t: &MarkingTransform) -> Result<SlopeSet> {
        let elements = self.iter().map(|r| t.apply(r)).collect::<Result<BTreeSet<_>>>()?;
        Ok(SlopeSet { elements })
    }

    /// `q_max = 2 diam`, `p_bound = 4 (diam + 1) q_max`.
    pub fn default_window(&self) -> Window {
        let d = u32::try_from(self.diameter()).expect("diameter fits in u32");
        let q_max = 2 * d;
        Window { q_max, p_bound: 4 * (d + 1) * q_max }
    }

    /// Every slope in `window` within distance `k` of all elements. The
    /// returned slopes may themselves be elements.
    pub fn centers(&self, k: u64, window: Window) -> Vec<Slope> {
        enumerate_slopes(window.q_max, window.p_bound)
            .into_iter()
            .filter(|c| self.max_distance_from(c) <= k)
            .collect()
    }

    /// A window guaranteed to contain every center at distance `<= k`, when
    /// `1/0` is an element and there is at least one other element.
    ///
    /// A center `p/q` has `q <= k` from `1/0`, and `|p e_q - e_p q| <= k`
    /// against any other element `e`, so `|p| <= k (1 + |e_p|)`.
    pub fn complete_center_window(&self, k: u64) -> Option<Window> {
        if !self.contains(&Slope::MERIDIAN) {
            return None;
        }
        let k = u32::try_from(k).ok()?;
        let e_p = self.iter().filter(|r| !r.is_meridian()).map(|r| r.p().unsigned_abs()).min()?;
        let e_p = u32::try_from(e_p).ok()?;
        Some(Window { q_max: k, p_bound: k.checked_mul(e_p.checked_add(1)?)? })
    }

    /// All centers at distance `<= k`, with no window restriction. `None`
    /// when the family is infinite (fewer than two elements and `k >= 1`).
    pub fn all_centers(&self, k: u64) -> Option<Vec<Slope>> {
        if self.is_empty() {
            return None;
        }
        if self.len() == 1 {
            return if k == 0 { Some(self.to_vec()) } else { None };
        }
        let (normal, t) = normalize_set(self).ok()?;
        let window = normal.complete_center_window(k)?;
        let back = t.inverse();
        let mut out: Vec<Slope> = normal
            .centers(k, window)
            .iter()
            .map(|c| back.apply(c))
            .collect::<Result<_>>()
            .ok()?;
        out.sort();
        Some(out)
    }

    /// Representative of the orbit under all marking changes, mirrors
    /// included: minimum over every element sent to `1/0` and both
    /// orientations, each followed by the translation that puts the least
    /// remaining numerator in `[0, q)`.
    pub fn canonical_form(&self) -> SlopeSet {
        let mut best: Option<Vec<Slope>> = None;
        for g in self.iter() {
            let to_m = MarkingTransform::to_meridian(g);
            for flip in [MarkingTransform::IDENTITY, MarkingTransform::MIRROR] {
                let t = flip.compose(&to_m).expect("small entries");
                let image = self.apply(&t).expect("canonical form overflow");
                let (image, _) = translate_least(&image).expect("canonical form overflow");
                let v = image.to_vec();
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
        }
        SlopeSet { elements: best.unwrap_or_default().into_iter().collect() }
    }
}

impl FromIterator<Slope> for SlopeSet {
    fn from_iter<I: IntoIterator<Item = Slope>>(iter: I) -> Self {
        SlopeSet { elements: iter.into_iter().collect() }
    }
}

impl fmt::Display for SlopeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, r) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for SlopeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Translation fixing `1/0` that moves the least non-meridian element's
/// numerator into `[0, q)`.
fn translate_least(s: &SlopeSet) -> Result<(SlopeSet, MarkingTransform)> {
    match s.iter().find(|r| !r.is_meridian()) {
        None => Ok((s.clone(), MarkingTransform::IDENTITY)),
        Some(e) => {
            let t = MarkingTransform::translation(-e.p().div_euclid(e.q()));
            Ok((s.apply(&t)?, t))
        }
    }
}

/// Normalizes with the least element (in `(q, p)` order) as the new meridian.
pub fn normalize_set(s: &SlopeSet) -> Result<(SlopeSet, MarkingTransform)> {
    let g = s.first().ok_or(Error::EmptySet)?;
    normalize_with(s, &g)
}

/// Sends `designated` to `1/0`, then translates so the least remaining
/// element has numerator in `[0, q)`. Returns the image and the transform.
pub fn normalize_with(s: &SlopeSet, designated: &Slope) -> Result<(SlopeSet, MarkingTransform)> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let to_m = MarkingTransform::to_meridian(designated);
    let (image, shift) = translate_least(&s.apply(&to_m)?)?;
    Ok((image, shift.compose(&to_m)?))
}

/// Parses the `.slopes` format: one literal per line, `#` starts a comment.
pub fn load_set(text: &str) -> Result<SlopeSet> {
    let mut seen: BTreeMap<Slope, usize> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let r: Slope = body
            .parse()
            .map_err(|e: Error| Error::Parse { line, message: e.to_string() })?;
        match seen.entry(r) {
            Entry::Occupied(o) => {
                return Err(Error::Duplicate { line, first: *o.get(), slope: r });
            }
            Entry::Vacant(v) => {
                v.insert(line);
            }
        }
    }
    Ok(seen.into_keys().collect())
}

/// Writes one canonical literal per line in `(q, p)` order.
pub fn save_set(s: &SlopeSet) -> String {
    s.iter().map(|r| format!("{r}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(s: &str) -> SlopeSet {
        SlopeSet::parse_list(s).unwrap()
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(SlopeSet::new().diameter(), 0);
        assert_eq!(set("1/0").diameter(), 0);
        let twelve = SlopeSet::paper_example();
        assert_eq!(twelve.len(), 12);
        assert_eq!(twelve.diameter(), 8);
        assert_eq!(
            twelve,
            set("1/0 0/1 1/1 2/1 3/1 3/2 4/3 5/3 5/4 7/4 7/5 8/5")
        );
        let ints: SlopeSet =
            std::iter::once(Slope::MERIDIAN).chain((0..=8).map(Slope::integer)).collect();
        assert_eq!(ints.diameter(), 8);
    }

    #[test]
    fn distance_matrix_is_symmetric_with_zero_diagonal() {
        let m = SlopeSet::paper_example().distance_matrix();
        for (i, row) in m.iter().enumerate() {
            assert_eq!(row[i], 0);
            for (j, &d) in row.iter().enumerate() {
                assert_eq!(d, m[j][i]);
            }
        }
    }

    #[test]
    fn center_examples() {
        let c = set("0/1 1/1 2/1").centers(2, Window { q_max: 4, p_bound: 8 });
        assert!(c.contains(&Slope::MERIDIAN));
        let twelve = SlopeSet::paper_example();
        assert!(twelve.centers(2, Window { q_max: 16, p_bound: 32 }).is_empty());
        assert!(twelve.centers(2, twelve.default_window()).is_empty());
        assert_eq!(twelve.all_centers(2), Some(vec![]));
        let single = set("1/0");
        assert_eq!(single.centers(0, single.default_window()), vec![Slope::MERIDIAN]);
        assert_eq!(single.all_centers(0), Some(vec![Slope::MERIDIAN]));
        assert_eq!(single.all_centers(1), None);
    }

    #[test]
    fn all_centers_agrees_with_a_large_window() {
        for text in ["0/1 1/1 2/1", "1/2 3/2", "1/0 0/1 4/1", "2/5 3/7", "1/3 1/2 2/3"] {
            let s = set(text);
            for k in 0..=3 {
                let exact = s.all_centers(k).unwrap();
                let scanned = s.centers(k, Window { q_max: 60, p_bound: 120 });
                assert_eq!(exact, scanned, "{text} k={k}");
            }
        }
    }

    #[test]
    fn normalize_examples() {
        let (n, _) = normalize_set(&set("1/0 5/1 6/1")).unwrap();
        assert_eq!(n, set("1/0 0/1 1/1"));

        // 0/1 becomes the meridian; 1/1 stays at distance 1 and is then
        // translated to numerator 0.
        let s = set("0/1 1/1");
        let (n, t) = normalize_with(&s, &Slope::LONGITUDE).unwrap();
        assert_eq!(n, set("1/0 0/1"));
        assert_eq!(t.apply(&Slope::LONGITUDE).unwrap(), Slope::MERIDIAN);
        assert_eq!(n.distance_profile(), vec![1]);

        assert_eq!(normalize_set(&set("7/3")).unwrap().0, set("1/0"));
        assert_eq!(normalize_set(&SlopeSet::new()), Err(Error::EmptySet));
    }

    #[test]
    fn text_format() {
        assert_eq!(load_set("1/0\n0/1").unwrap().len(), 2);
        assert_eq!(
            load_set("2/4\n1/2"),
            Err(Error::Duplicate { line: 2, first: 1, slope: Slope::half(1) })
        );
        assert!(matches!(load_set("1/0\n\nx/2"), Err(Error::Parse { line: 3, .. })));
        assert_eq!(load_set("# nothing\n  \n1/0 # meridian\n").unwrap(), set("1/0"));
        let twelve = SlopeSet::paper_example();
        assert_eq!(load_set(&save_set(&twelve)).unwrap(), twelve);
        let text = save_set(&twelve);
        assert_eq!(save_set(&load_set(&text).unwrap()), text);
    }

    #[test]
    fn canonical_form_identifies_orbits() {
        let ints: SlopeSet = std::iter::once(Slope::MERIDIAN).chain((0..=8).map(Slope::integer)).collect();
        let moved = ints.apply(&MarkingTransform::new(2, 3, 1, 2).unwrap()).unwrap();
        assert_eq!(moved.canonical_form(), ints.canonical_form());
        assert_eq!(ints.canonical_form(), ints);
        assert_ne!(SlopeSet::paper_example().canonical_form(), ints.canonical_form());
    }

    fn arb_set() -> impl Strategy<Value = SlopeSet> {
        proptest::collection::vec((-12i64..12, 0i64..8), 1..7).prop_filter_map("nonzero", |v| {
            let s: SlopeSet = v
                .into_iter()
                .filter(|&(p, q)| (p, q) != (0, 0))
                .map(|(p, q)| Slope::new(p, q).unwrap())
                .collect();
            (!s.is_empty()).then_some(s)
        })
    }

    use crate::slope::tests::arb_transform;

    proptest! {
        #[test]
        fn diameter_and_profile_invariant(s in arb_set(), t in arb_transform()) {
            let image = s.apply(&t).unwrap();
            prop_assert_eq!(image.diameter(), s.diameter());
            prop_assert_eq!(image.distance_profile(), s.distance_profile());
            prop_assert_eq!(image.canonical_form(), s.canonical_form());
        }

        #[test]
        fn normalization_sends_least_to_meridian(s in arb_set()) {
            let (n, t) = normalize_set(&s).unwrap();
            prop_assert!(n.contains(&Slope::MERIDIAN));
            prop_assert_eq!(t.apply(&s.first().unwrap()).unwrap(), Slope::MERIDIAN);
            prop_assert_eq!(n.distance_profile(), s.distance_profile());
            let least = n.iter().find(|r| !r.is_meridian()).copied();
            if let Some(e) = least {
                prop_assert!(0 <= e.p() && e.p() < e.q());
            }
        }

        #[test]
        fn centers_satisfy_definition(s in arb_set(), k in 0u64..4) {
            for c in s.centers(k, Window { q_max: 6, p_bound: 20 }) {
                prop_assert!(s.iter().all(|r| r.distance(&c) <= k));
            }
        }

        #[test]
        fn save_load_roundtrip(s in arb_set()) {
            prop_assert_eq!(load_set(&save_set(&s)).unwrap(), s);
        }
    }
}

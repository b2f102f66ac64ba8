//! Slopes on a torus and their exact arithmetic.
//!
//! A slope is stored as its canonical primitive representative `(p, q)` with
//! `q > 0`, or `(1, 0)` for the meridian. With a meridian–longitude marking
//! fixed, `(p, q)` is the fraction `p/q` and the meridian is `1/0`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Isotopy class of an essential unoriented simple closed curve on a torus.
///
/// Ordering is lexicographic on `(q, p)`, so the meridian sorts first and
/// slopes with the same denominator are ordered by numerator.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub const MERIDIAN: Slope = Slope { p: 1, q: 0 };
    pub const LONGITUDE: Slope = Slope { p: 0, q: 1 };

    /// Canonical slope through the integer vector `(p, q)`.
    pub fn new(p: i64, q: i64) -> Result<Slope> {
        if p == 0 && q == 0 {
            return Err(Error::ZeroVector);
        }
        // gcd of i64::MIN with 0 or itself does not fit in i64
        let g = i64::try_from(p.unsigned_abs().gcd(&q.unsigned_abs()))
            .map_err(|_| Error::Overflow("reducing a slope"))?;
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            p = p.checked_neg().ok_or(Error::Overflow("canonicalizing a slope"))?;
            q = q.checked_neg().ok_or(Error::Overflow("canonicalizing a slope"))?;
        }
        Ok(Slope { p, q })
    }

    /// Integer slope `n/1`.
    pub fn integer(n: i64) -> Slope {
        Slope { p: n, q: 1 }
    }

    /// Half-integral slope `m/2`; `m` must be odd.
    pub fn half(m: i64) -> Slope {
        assert!(m % 2 != 0, "half-integral slope needs an odd numerator, got {m}");
        Slope { p: m, q: 2 }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn is_meridian(&self) -> bool {
        self.q == 0
    }

    /// Minimal geometric intersection number `|p1 q2 - p2 q1|`.
    ///
    /// Panics if the result does not fit in a `u64`; see [`Slope::checked_distance`].
    pub fn distance(&self, other: &Slope) -> u64 {
        self.checked_distance(other)
            .unwrap_or_else(|e| panic!("distance({self}, {other}): {e}"))
    }

    pub fn checked_distance(&self, other: &Slope) -> Result<u64> {
        let det = (self.p as i128 * other.q as i128)
            .checked_sub(other.p as i128 * self.q as i128)
            .ok_or(Error::Overflow("computing a distance"))?;
        u64::try_from(det.unsigned_abs()).map_err(|_| Error::Overflow("computing a distance"))
    }
}

/// Shorthand for [`Slope::distance`].
pub fn distance(r1: &Slope, r2: &Slope) -> u64 {
    r1.distance(r2)
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.q, self.p).cmp(&(other.q, other.p))
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl fmt::Debug for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = Error;

    /// Parses `p/q`, canonicalizing non-reduced or sign-flipped input.
    fn from_str(s: &str) -> Result<Slope> {
        let bad = || Error::BadLiteral(s.to_string());
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        Slope::new(p, q).map_err(|e| match e {
            Error::ZeroVector => bad(),
            e => e,
        })
    }
}

/// All canonical slopes with `0 <= q <= q_max` and `|p| <= p_bound`, in
/// `(q, p)` order. Always contains `1/0`.
pub fn enumerate_slopes(q_max: u32, p_bound: u32) -> Vec<Slope> {
    let p_bound = i64::from(p_bound);
    let mut out = vec![Slope::MERIDIAN];
    for q in 1..=i64::from(q_max) {
        out.extend(
            (-p_bound..=p_bound)
                .filter(|p| p.gcd(&q) == 1)
                .map(|p| Slope { p, q }),
        );
    }
    out
}

/// Unimodular change of marking, acting on column vectors `(p, q)` by the
/// matrix `(a b; c d)`. Determinant `-1` is a mirror image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MarkingTransform {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl MarkingTransform {
    pub const IDENTITY: MarkingTransform = MarkingTransform { a: 1, b: 0, c: 0, d: 1 };
    /// `p/q -> -p/q`.
    pub const MIRROR: MarkingTransform = MarkingTransform { a: -1, b: 0, c: 0, d: 1 };
    /// Exchanges meridian and longitude.
    pub const SWAP: MarkingTransform = MarkingTransform { a: 0, b: 1, c: 1, d: 0 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det.abs() != 1 {
            return Err(Error::NotUnimodular { a, b, c, d, det });
        }
        Ok(MarkingTransform { a, b, c, d })
    }

    /// Longitude re-choice `p/q -> (p + n q)/q`; fixes `1/0`.
    pub fn translation(n: i64) -> Self {
        MarkingTransform { a: 1, b: n, c: 0, d: 1 }
    }

    /// A transform sending `r` to `1/0`.
    pub fn to_meridian(r: &Slope) -> Self {
        // p*s + q*t = 1, so (p -t; q s) has determinant 1 and sends (1,0) to (p,q)
        let egcd = r.p.extended_gcd(&r.q);
        debug_assert_eq!(egcd.gcd.abs(), 1);
        let (s, t) = if egcd.gcd < 0 { (-egcd.x, -egcd.y) } else { (egcd.x, egcd.y) };
        // inverse of (p -t; q s)
        MarkingTransform { a: s, b: t, c: -r.q, d: r.p }
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, r: &Slope) -> Result<Slope> {
        let ovf = || Error::Overflow("applying a marking transform");
        let p = self
            .a
            .checked_mul(r.p)
            .and_then(|x| self.b.checked_mul(r.q).and_then(|y| x.checked_add(y)))
            .ok_or_else(ovf)?;
        let q = self
            .c
            .checked_mul(r.p)
            .and_then(|x| self.d.checked_mul(r.q).and_then(|y| x.checked_add(y)))
            .ok_or_else(ovf)?;
        Slope::new(p, q)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &MarkingTransform) -> Result<Self> {
        let ovf = || Error::Overflow("composing marking transforms");
        let m = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            x.checked_mul(y)
                .and_then(|s| z.checked_mul(w).and_then(|t| s.checked_add(t)))
                .ok_or_else(ovf)
        };
        Ok(MarkingTransform {
            a: m(self.a, other.a, self.b, other.c)?,
            b: m(self.a, other.b, self.b, other.d)?,
            c: m(self.c, other.a, self.d, other.c)?,
            d: m(self.c, other.b, self.d, other.d)?,
        })
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        MarkingTransform { a: self.d * det, b: -self.b * det, c: -self.c * det, d: self.a * det }
    }
}

impl Default for MarkingTransform {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl fmt::Display for MarkingTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!((s(4, 6).p(), s(4, 6).q()), (2, 3));
        assert_eq!(s(-1, 0), Slope::MERIDIAN);
        assert_eq!((s(3, -2).p(), s(3, -2).q()), (-3, 2));
        assert_eq!(s(-5, 0), Slope::MERIDIAN);
        assert_eq!(Slope::new(0, 0), Err(Error::ZeroVector));
        assert_eq!(s(0, -7), Slope::LONGITUDE);
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(Slope::new(i64::MIN, 0), Err(Error::Overflow(_))));
        assert!(matches!(Slope::new(i64::MIN, -1), Err(Error::Overflow(_))));
        let big = s(i64::MAX, 1);
        assert!(MarkingTransform::translation(1).apply(&big).is_err());
        assert!(s(i64::MAX, 1).checked_distance(&s(i64::MIN + 1, 1)).is_ok());
        assert!(s(i64::MAX, 1).checked_distance(&s(-1, i64::MAX)).is_err());
    }

    #[test]
    fn distance_examples() {
        for r in enumerate_slopes(6, 10) {
            assert_eq!(Slope::MERIDIAN.distance(&r), r.q() as u64);
        }
        assert_eq!(s(7, 5).distance(&s(3, 1)), 8);
        assert_eq!(Slope::half(1).distance(&Slope::half(3)), 4);
        assert_eq!(Slope::half(-7).distance(&Slope::half(7)), 28);
    }

    #[test]
    fn literals() {
        assert_eq!("1/0".parse::<Slope>().unwrap(), Slope::MERIDIAN);
        assert_eq!("-1/0".parse::<Slope>().unwrap(), Slope::MERIDIAN);
        assert_eq!(" 2/4 ".parse::<Slope>().unwrap(), s(1, 2));
        assert_eq!("-3/2".parse::<Slope>().unwrap().to_string(), "-3/2");
        assert_eq!("3/-2".parse::<Slope>().unwrap().to_string(), "-3/2");
        for bad in ["", "3", "a/b", "0/0", "1/2/3", "1.5/2"] {
            assert!(matches!(bad.parse::<Slope>(), Err(Error::BadLiteral(_))), "{bad}");
        }
    }

    #[test]
    fn enumeration_windows() {
        assert_eq!(enumerate_slopes(0, 1), vec![Slope::MERIDIAN]);
        let got: Vec<String> = enumerate_slopes(1, 2).iter().map(|r| r.to_string()).collect();
        assert_eq!(got, ["1/0", "-2/1", "-1/1", "0/1", "1/1", "2/1"]);
        let w = enumerate_slopes(2, 3);
        for r in [s(1, 2), s(-1, 2), s(3, 2), s(-3, 2)] {
            assert!(w.contains(&r));
        }
        assert!(!w.iter().any(|r| r.q() == 2 && r.p() % 2 == 0));
        let mut sorted = w.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, w);
    }

    #[test]
    fn transform_examples() {
        assert!(matches!(MarkingTransform::new(2, 0, 0, 1), Err(Error::NotUnimodular { .. })));
        for r in enumerate_slopes(4, 5) {
            assert_eq!(MarkingTransform::IDENTITY.apply(&r).unwrap(), r);
            let t = MarkingTransform::translation(3).apply(&r).unwrap();
            assert_eq!((t.p(), t.q()), (r.p() + 3 * r.q(), r.q()));
            assert_eq!(MarkingTransform::MIRROR.apply(&r).unwrap(), s(-r.p(), r.q()));
            let m = MarkingTransform::to_meridian(&r);
            assert_eq!(m.apply(&r).unwrap(), Slope::MERIDIAN, "{r}");
            assert_eq!(m.det(), 1);
        }
    }

    /// Products of translations, the swap and the mirror.
    pub(crate) fn arb_transform() -> impl Strategy<Value = MarkingTransform> {
        proptest::collection::vec((-4i64..=4, 0u8..3), 0..6).prop_map(|steps| {
            steps.into_iter().fold(MarkingTransform::IDENTITY, |acc, (n, g)| {
                let step = match g {
                    0 => MarkingTransform::translation(n),
                    1 => MarkingTransform::SWAP,
                    _ => MarkingTransform::MIRROR,
                };
                step.compose(&acc).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn make_slope_idempotent(p in -1000i64..1000, q in -1000i64..1000) {
            prop_assume!(p != 0 || q != 0);
            let r = s(p, q);
            prop_assert_eq!(s(r.p(), r.q()), r);
            prop_assert_eq!(r.p().gcd(&r.q()), 1);
            prop_assert!(r.q() > 0 || (r.q() == 0 && r.p() == 1));
        }

        #[test]
        fn distance_symmetric_and_separating(a in -50i64..50, b in 0i64..50, c in -50i64..50, d in 0i64..50) {
            prop_assume!((a, b) != (0, 0) && (c, d) != (0, 0));
            let (r1, r2) = (s(a, b), s(c, d));
            prop_assert_eq!(r1.distance(&r2), r2.distance(&r1));
            prop_assert_eq!(r1.distance(&r2) == 0, r1 == r2);
        }

        #[test]
        fn compose_and_inverse(t in arb_transform(), p in -30i64..30, q in 0i64..30) {
            prop_assume!((p, q) != (0, 0));
            let r = s(p, q);
            prop_assert_eq!(t.inverse().apply(&t.apply(&r).unwrap()).unwrap(), r);
            let tt = t.compose(&MarkingTransform::MIRROR).unwrap();
            prop_assert_eq!(tt.apply(&r).unwrap(), t.apply(&MarkingTransform::MIRROR.apply(&r).unwrap()).unwrap());
        }
    }
}

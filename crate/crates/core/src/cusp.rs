//! Flat horotorus geometry.
//!
//! A cusp torus is the lattice spanned by the meridian and longitude
//! translations in the Euclidean plane. The slope `p/q` is realized by the
//! closed geodesic with translation vector `p * meridian + q * longitude`; on a
//! flat torus that geodesic is the shortest curve in its class, so its norm is
//! the slope length.
//!
//! `h` is the length of the shortest slope `γ` and `w = area / h` is the
//! distance between adjacent lifts of `γ`. Any slope `r` then has length at
//! least `w Δ(γ, r)`, and `w >= h √3 / 2` for every lattice. If the area
//! exceeds `8 / √3`, `w > 2`, so slopes at distance `>= 3` from `γ` are longer
//! than 6.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::slope::{MarkingTransform, Slope};

pub type Vec2 = [f64; 2];

/// Length threshold of the 6-theorem.
pub const SIX: f64 = 6.0;
/// Comparison slack for floating-point inequalities.
pub const SLACK: f64 = 1e-9;
/// Quantities this close to a threshold are reported as marginal.
pub const MARGINAL: f64 = 1e-6;

/// Area threshold `8 / √3`.
pub fn area_threshold() -> f64 {
    8.0 / 3f64.sqrt()
}

/// `4 / √3`, where the two cases of the width estimate meet.
pub fn h_threshold() -> f64 {
    4.0 / 3f64.sqrt()
}

fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

fn combo(x: i64, a: Vec2, y: i64, b: Vec2) -> Vec2 {
    let (x, y) = (x as f64, y as f64);
    [x * a[0] + y * b[0], x * a[1] + y * b[1]]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspTorus {
    meridian: Vec2,
    longitude: Vec2,
}

/// Lagrange-reduced basis with the integer coordinates of each vector in
/// the meridian–longitude marking.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedBasis {
    pub vectors: [Vec2; 2],
    pub coords: [(i64, i64); 2],
}

impl CuspTorus {
    pub fn new(meridian: Vec2, longitude: Vec2) -> Result<Self> {
        if !meridian.iter().chain(&longitude).all(|x| x.is_finite()) {
            return Err(Error::Parse { line: 0, message: "non-finite translation".into() });
        }
        let det = meridian[0] * longitude[1] - meridian[1] * longitude[0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Degenerate(det));
        }
        Ok(CuspTorus { meridian, longitude })
    }

    /// Meridian of length `meridian_length` along the x-axis and longitude
    /// `modulus * meridian`, reading the plane as the complex numbers.
    pub fn from_modulus(modulus: Vec2, meridian_length: f64) -> Result<Self> {
        Self::new([meridian_length, 0.0], [modulus[0] * meridian_length, modulus[1] * meridian_length])
    }

    /// Equilateral lattice with shortest translation `h`.
    pub fn hexagonal(h: f64) -> Self {
        Self::new([h, 0.0], [h / 2.0, h * 3f64.sqrt() / 2.0]).expect("h > 0")
    }

    pub fn meridian(&self) -> Vec2 {
        self.meridian
    }

    pub fn longitude(&self) -> Vec2 {
        self.longitude
    }

    pub fn area(&self) -> f64 {
        (self.meridian[0] * self.longitude[1] - self.meridian[1] * self.longitude[0]).abs()
    }

    pub fn translation(&self, r: &Slope) -> Vec2 {
        combo(r.p(), self.meridian, r.q(), self.longitude)
    }

    pub fn slope_length(&self, r: &Slope) -> f64 {
        norm(self.translation(r))
    }

    /// The same torus in the marking obtained by applying `t`: the image
    /// `t(r)` has the length `r` had before.
    pub fn remark(&self, t: &MarkingTransform) -> Result<Self> {
        let [a, b, c, d] = t.inverse().entries();
        Self::new(
            combo(a, self.meridian, c, self.longitude),
            combo(b, self.meridian, d, self.longitude),
        )
    }

    pub fn reduced_basis(&self) -> ReducedBasis {
        let (m, l) = (self.meridian, self.longitude);
        let vec_of = |(x, y): (i64, i64)| combo(x, m, y, l);
        let mut u = [(1i64, 0i64), (0, 1)];
        // each step strictly shortens the longer vector; the cap only guards
        // against roundoff cycling
        for _ in 0..10_000 {
            let (mut b1, mut b2) = (vec_of(u[0]), vec_of(u[1]));
            if dot(b2, b2) < dot(b1, b1) {
                u.swap(0, 1);
                std::mem::swap(&mut b1, &mut b2);
            }
            let ratio = dot(b1, b2) / dot(b1, b1);
            if ratio.abs() <= 0.5 {
                break;
            }
            let mu = ratio.round() as i64;
            u[1] = (u[1].0 - mu * u[0].0, u[1].1 - mu * u[0].1);
        }
        ReducedBasis { vectors: [vec_of(u[0]), vec_of(u[1])], coords: u }
    }

    /// Every slope of minimal length (within [`SLACK`]), in slope order.
    pub fn shortest_slopes(&self) -> (Vec<Slope>, f64) {
        let basis = self.reduced_basis();
        let mut found: Vec<(Slope, f64)> = Vec::new();
        for i in -2i64..=2 {
            for j in -2i64..=2 {
                if i.gcd(&j) != 1 {
                    continue;
                }
                let r = basis.slope_at(i, j);
                found.push((r, self.slope_length(&r)));
            }
        }
        let h = found.iter().map(|&(_, len)| len).fold(f64::INFINITY, f64::min);
        let mut ties: Vec<Slope> =
            found.into_iter().filter(|&(_, len)| len <= h + SLACK).map(|(r, _)| r).collect();
        ties.sort();
        ties.dedup();
        (ties, h)
    }

    /// `(γ, h)`: the shortest slope, ties broken by slope order.
    pub fn shortest_slope(&self) -> (Slope, f64) {
        let (ties, h) = self.shortest_slopes();
        (ties[0], h)
    }

    /// `w = area / h`.
    pub fn width(&self) -> f64 {
        self.area() / self.shortest_slope().1
    }

    /// Every slope of length at most `max_length`.
    pub fn slopes_up_to(&self, max_length: f64) -> Vec<(Slope, f64)> {
        let basis = self.reduced_basis();
        let area = self.area();
        let [b1, b2] = basis.vectors;
        // Cramer: the coordinate of v along b1 is det(v, b2) / det(b1, b2)
        let i_max = (max_length * norm(b2) / area).floor() as i64 + 1;
        let j_max = (max_length * norm(b1) / area).floor() as i64 + 1;
        let mut out = BTreeMap::new();
        for i in -i_max..=i_max {
            for j in 0..=j_max {
                if i.gcd(&j) != 1 {
                    continue;
                }
                let r = basis.slope_at(i, j);
                let len = self.slope_length(&r);
                if len <= max_length {
                    out.insert(r, len);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Slopes of length `<= 6`, the only possible exceptional slopes.
    pub fn six_candidates(&self) -> Vec<SlopeLengthReport> {
        let (gamma, _) = self.shortest_slope();
        self.slopes_up_to(SIX)
            .into_iter()
            .map(|(slope, length)| SlopeLengthReport {
                slope,
                length,
                distance_from_shortest: gamma.distance(&slope),
                is_six_candidate: length <= SIX,
                marginal: (length - SIX).abs() < MARGINAL,
            })
            .collect()
    }

    /// `length(r) - w Δ(γ, r)`, which is nonnegative up to [`SLACK`].
    pub fn length_lower_bound_check(&self, r: &Slope) -> LowerBoundCheck {
        let (gamma, _) = self.shortest_slope();
        let length = self.slope_length(r);
        let width = self.width();
        let distance = gamma.distance(r);
        let margin = length - width * distance as f64;
        LowerBoundCheck { slope: *r, length, width, distance, margin, holds: margin >= -SLACK }
    }

    pub fn proposition_check(&self) -> PropositionReport {
        let area = self.area();
        let threshold = area_threshold();
        let (ties, h) = self.shortest_slopes();
        let gamma = ties[0];
        let w = area / h;
        let hypothesis = area > threshold;
        let mut marginal = Vec::new();
        if (area - threshold).abs() < MARGINAL {
            marginal.push(format!("area {area} is within {MARGINAL} of 8/√3"));
        }
        if (h - h_threshold()).abs() < MARGINAL {
            marginal.push(format!("h {h} is within {MARGINAL} of 4/√3"));
        }
        if (w - 2.0).abs() < MARGINAL {
            marginal.push(format!("w {w} is within {MARGINAL} of 2"));
        }
        let candidates = self.six_candidates();
        for c in candidates.iter().filter(|c| c.marginal) {
            marginal.push(format!("length of {} is within {MARGINAL} of 6", c.slope));
        }
        if !hypothesis {
            return PropositionReport {
                area,
                hypothesis,
                gamma,
                ties,
                h,
                w,
                branch: None,
                width_exceeds_two: w > 2.0,
                candidates,
                violations: Vec::new(),
                marginal,
            };
        }
        let branch = if h <= h_threshold() {
            WidthBranch::ShortGamma { lower: threshold / h }
        } else {
            WidthBranch::LongGamma { lower: h * 3f64.sqrt() / 2.0 }
        };
        let width_exceeds_two = match branch {
            WidthBranch::ShortGamma { lower } => w > lower - SLACK && lower >= 2.0 - SLACK && w > 2.0,
            WidthBranch::LongGamma { lower } => w >= lower - SLACK && lower > 2.0 && w > 2.0,
        };
        let violations = ties
            .iter()
            .flat_map(|g| {
                candidates
                    .iter()
                    .filter(move |c| g.distance(&c.slope) > 2)
                    .map(move |c| (*g, c.slope, c.length))
            })
            .collect();
        PropositionReport {
            area,
            hypothesis,
            gamma,
            ties,
            h,
            w,
            branch: Some(branch),
            width_exceeds_two,
            candidates,
            violations,
            marginal,
        }
    }
}

impl ReducedBasis {
    /// Slope of `i * b1 + j * b2` in the original marking.
    pub fn slope_at(&self, i: i64, j: i64) -> Slope {
        let [(a, c), (b, d)] = self.coords;
        Slope::new(i * a + j * b, i * c + j * d).expect("primitive combination")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeLengthReport {
    pub slope: Slope,
    pub length: f64,
    pub distance_from_shortest: u64,
    pub is_six_candidate: bool,
    pub marginal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundCheck {
    pub slope: Slope,
    pub length: f64,
    pub width: f64,
    pub distance: u64,
    pub margin: f64,
    pub holds: bool,
}

/// Which case of the width estimate applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WidthBranch {
    /// `h <= 4/√3`: `w = area/h > (8/√3)/h >= 2`; `lower` is `(8/√3)/h`.
    ShortGamma { lower: f64 },
    /// `h > 4/√3`: `w >= h √3/2 > 2`; `lower` is `h √3/2`.
    LongGamma { lower: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropositionReport {
    pub area: f64,
    /// `area > 8/√3`.
    pub hypothesis: bool,
    pub gamma: Slope,
    /// All shortest slopes; `gamma` is the first.
    pub ties: Vec<Slope>,
    pub h: f64,
    pub w: f64,
    pub branch: Option<WidthBranch>,
    pub width_exceeds_two: bool,
    pub candidates: Vec<SlopeLengthReport>,
    /// `(γ, r, length)` with `Δ(γ, r) >= 3` and length `<= 6`, over every tied `γ`.
    pub violations: Vec<(Slope, Slope, f64)>,
    pub marginal: Vec<String>,
}

impl PropositionReport {
    /// `None` when the area hypothesis fails.
    pub fn holds(&self) -> Option<bool> {
        self.hypothesis.then_some(self.width_exceeds_two && self.violations.is_empty())
    }
}

impl fmt::Display for WidthBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WidthBranch::ShortGamma { lower } => {
                write!(f, "h <= 4/√3: w > (8/√3)/h = {lower:.6} >= 2")
            }
            WidthBranch::LongGamma { lower } => write!(f, "h > 4/√3: w >= h√3/2 = {lower:.6} > 2"),
        }
    }
}

/// Parses the `.cusp` format.
///
/// ```text
/// meridian <x> <y>
/// longitude <x> <y>
/// ```
///
/// or, with the longitude given as a multiple of the meridian in the
/// complex plane,
///
/// ```text
/// modulus <re> <im>
/// meridian_length <len>
/// ```
///
/// Blank lines and `#` comments are ignored.
pub fn load_cusp(text: &str) -> Result<CuspTorus> {
    let mut fields: BTreeMap<&str, (usize, Vec<f64>)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut words = body.split_whitespace();
        let key = words.next().unwrap();
        let arity = match key {
            "meridian" | "longitude" | "modulus" => 2,
            "meridian_length" => 1,
            _ => return Err(Error::Parse { line, message: format!("unknown key {key:?}") }),
        };
        let values = words
            .map(|w| {
                w.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Parse { line, message: format!("{w:?} is not a finite number") })
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != arity {
            return Err(Error::Parse { line, message: format!("{key} takes {arity} numbers, got {}", values.len()) });
        }
        if let Some((first, _)) = fields.insert(key, (line, values)) {
            return Err(Error::Parse { line, message: format!("{key} already given on line {first}") });
        }
    }
    let get = |k: &str| fields.get(k).map(|(_, v)| v.clone());
    let last_line = text.lines().count();
    match (get("meridian"), get("longitude"), get("modulus"), get("meridian_length")) {
        (Some(m), Some(l), None, None) => CuspTorus::new([m[0], m[1]], [l[0], l[1]]),
        (None, None, Some(z), Some(len)) => CuspTorus::from_modulus([z[0], z[1]], len[0]),
        _ => Err(Error::Parse {
            line: last_line,
            message: "expected `meridian` and `longitude`, or `modulus` and `meridian_length`".into(),
        }),
    }
}

pub fn save_cusp(t: &CuspTorus) -> String {
    format!(
        "meridian {} {}\nlongitude {} {}\n",
        t.meridian[0], t.meridian[1], t.longitude[0], t.longitude[1]
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn torus(m: Vec2, l: Vec2) -> CuspTorus {
        CuspTorus::new(m, l).unwrap()
    }

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q).unwrap()
    }

    #[test]
    fn lengths() {
        let t = torus([1.0, 0.0], [0.0, 7.0]);
        assert_eq!(t.slope_length(&Slope::MERIDIAN), 1.0);
        assert_eq!(t.slope_length(&Slope::LONGITUDE), 7.0);
        let hex = CuspTorus::hexagonal(1.0);
        assert!((hex.slope_length(&s(1, 1)) - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn shortest_and_width() {
        assert_eq!(torus([1.0, 0.0], [0.0, 7.0]).shortest_slope(), (Slope::MERIDIAN, 1.0));
        assert_eq!(torus([5.0, 0.0], [0.0, 2.0]).shortest_slope(), (Slope::LONGITUDE, 2.0));
        let t = torus([1.0, 0.0], [0.5, 0.9]);
        assert_eq!(t.shortest_slope(), (Slope::MERIDIAN, 1.0));
        // exhaustive check over a small box
        for p in -3i64..=3 {
            for q in 0i64..=3 {
                if p.gcd(&q) == 1 {
                    assert!(t.slope_length(&s(p, q)) >= 1.0 - SLACK);
                }
            }
        }
        let sq = torus([3.0, 0.0], [0.0, 3.0]);
        assert_eq!(sq.shortest_slopes().0, vec![Slope::MERIDIAN, Slope::LONGITUDE]);

        assert_eq!(torus([1.0, 0.0], [0.0, 7.0]).width(), 7.0);
        let hex = CuspTorus::hexagonal(1.0);
        assert!((hex.width() - 3f64.sqrt() / 2.0).abs() < 1e-12);
        let t = torus([2.0, 0.0], [0.0, 3.0]);
        assert_eq!((t.area(), t.shortest_slope().1, t.width()), (6.0, 2.0, 3.0));
    }

    #[test]
    fn six_candidate_examples() {
        let got: Vec<Slope> = torus([3.0, 0.0], [0.0, 3.0]).six_candidates().iter().map(|c| c.slope).collect();
        assert_eq!(got, vec![Slope::MERIDIAN, s(-1, 1), s(0, 1), s(1, 1)]);
        let got: Vec<Slope> = torus([1.0, 0.0], [0.0, 7.0]).six_candidates().iter().map(|c| c.slope).collect();
        assert_eq!(got, vec![Slope::MERIDIAN]);
        assert!(torus([7.0, 0.0], [0.0, 8.0]).six_candidates().is_empty());
    }

    #[test]
    fn proposition_examples() {
        let r = torus([3.0, 0.0], [0.0, 3.0]).proposition_check();
        assert!(r.hypothesis);
        assert_eq!((r.gamma, r.h, r.w), (Slope::MERIDIAN, 3.0, 3.0));
        assert!(matches!(r.branch, Some(WidthBranch::LongGamma { .. })));
        assert!(r.candidates.iter().all(|c| c.distance_from_shortest <= 1));
        assert_eq!(r.holds(), Some(true));

        let r = torus([1.0, 0.0], [0.0, 7.0]).proposition_check();
        assert!(matches!(r.branch, Some(WidthBranch::ShortGamma { .. })));
        assert_eq!(r.w, 7.0);
        assert_eq!(r.holds(), Some(true));

        let r = CuspTorus::hexagonal(1.0).proposition_check();
        assert!(!r.hypothesis);
        assert_eq!(r.holds(), None);
        assert!(r.branch.is_none());
    }

    #[test]
    fn lower_bound_examples() {
        let c = torus([3.0, 0.0], [0.0, 3.0]).length_lower_bound_check(&Slope::LONGITUDE);
        assert!(c.holds);
        assert!(c.margin.abs() < 1e-12);
        let c = torus([1.0, 0.0], [0.5, 0.9]).length_lower_bound_check(&s(1, 2));
        assert_eq!(c.distance, 2);
        assert!((c.length - (4.0f64 + 1.8 * 1.8).sqrt()).abs() < 1e-12);
        assert!((c.width - 0.9).abs() < 1e-12);
        assert!(c.holds);
    }

    #[test]
    fn parse_cusp() {
        assert_eq!(load_cusp("meridian 1 0\nlongitude 0 7").unwrap(), torus([1.0, 0.0], [0.0, 7.0]));
        assert_eq!(
            load_cusp("modulus 0.5 0.9\nmeridian_length 1").unwrap(),
            torus([1.0, 0.0], [0.5, 0.9])
        );
        assert!(matches!(load_cusp("meridian 1 0\nlongitude 2 0"), Err(Error::Degenerate(_))));
        assert!(matches!(load_cusp("meridian 1 x\nlongitude 0 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(load_cusp("meridian 1 0\n\nlongitude 0 inf"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(load_cusp("meridian 1 0"), Err(Error::Parse { .. })));
        assert!(matches!(load_cusp("meridian 1 0\nmeridian 1 0"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(load_cusp("color 1 0"), Err(Error::Parse { line: 1, .. })));
        let t = torus([0.1, 0.7], [-3.25, 1e-3]);
        assert_eq!(load_cusp(&save_cusp(&t)).unwrap(), t);
    }

    fn arb_torus() -> impl Strategy<Value = CuspTorus> {
        proptest::array::uniform4(-5.0f64..5.0).prop_filter_map("area", |e| {
            CuspTorus::new([e[0], e[1]], [e[2], e[3]]).ok().filter(|t| t.area() >= 0.01)
        })
    }

    proptest! {
        #[test]
        fn lengths_are_marking_independent(t in arb_torus(), e in proptest::array::uniform4(-4i64..4), p in -6i64..6, q in 0i64..6) {
            prop_assume!((p, q) != (0, 0));
            let Ok(m) = MarkingTransform::new(e[0], e[1], e[2], e[3]) else { return Ok(()) };
            let r = s(p, q);
            let moved = t.remark(&m).unwrap();
            let a = t.slope_length(&r);
            let b = moved.slope_length(&m.apply(&r).unwrap());
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0));
        }

        #[test]
        fn reduced_basis_is_reduced(t in arb_torus()) {
            let b = t.reduced_basis();
            let [b1, b2] = b.vectors;
            prop_assert!(dot(b1, b1) <= dot(b2, b2) * (1.0 + 1e-12));
            prop_assert!((dot(b1, b2) / dot(b1, b1)).abs() <= 0.5 + 1e-12);
            let [(a, c), (bb, d)] = b.coords;
            prop_assert_eq!((a * d - bb * c).abs(), 1);
        }
    }
}

//! One-dimensional measurable sets as canonical finite unions of intervals,
//! with Gaussian measure, barycenter, boundary extraction, and half-space
//! construction. Endpoints are `f64` with IEEE infinities, so rays and the
//! full line are ordinary values.

use alloc::borrow::ToOwned;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gauss::{gaussian_density, gaussian_moment, phi_inv};

/// Gaps smaller than this are measure-theoretically invisible to every
/// functional in the crate and would produce spurious boundary pairs, so
/// construction merges them.
pub const MERGE_GAP: f64 = 1e-12;

/// Component-count guard; the variational formulas are all O(boundary²) and
/// the tests never need more.
pub const MAX_COMPONENTS: usize = 64;

/// Exterior unit normal of a 1-D set at a boundary point: `Pos` (+1) at the
/// right endpoint of a component, `Neg` (-1) at a left endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normal {
    #[serde(rename = "+1")]
    Pos,
    #[serde(rename = "-1")]
    Neg,
}

impl Normal {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Normal::Pos => 1.0,
            Normal::Neg => -1.0,
        }
    }

    #[inline]
    pub fn flipped(self) -> Self {
        match self {
            Normal::Pos => Normal::Neg,
            Normal::Neg => Normal::Pos,
        }
    }
}

/// A finite boundary point with its exterior normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub location: f64,
    pub normal: Normal,
}

/// Which ray a half space occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RaySide {
    /// `[threshold, ∞)`: positive barycenter.
    RightRay,
    /// `(-∞, threshold]`: negative barycenter.
    LeftRay,
}

/// A 1-D half space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace1D {
    pub threshold: f64,
    pub side: RaySide,
}

impl HalfSpace1D {
    pub fn to_union(self) -> IntervalUnion {
        let pair = match self.side {
            RaySide::RightRay => (self.threshold, f64::INFINITY),
            RaySide::LeftRay => (f64::NEG_INFINITY, self.threshold),
        };
        IntervalUnion::new([pair]).expect("a ray is always a valid union")
    }

    pub fn measure(self) -> f64 {
        self.to_union().measure()
    }

    pub fn barycenter(self) -> f64 {
        match self.side {
            RaySide::RightRay => gaussian_density(self.threshold),
            RaySide::LeftRay => -gaussian_density(self.threshold),
        }
    }
}

/// The half space of Gaussian measure `a` whose barycenter sign matches
/// `aligned_positive`: `[-Φ⁻¹(a), ∞)` when positive, its mirror otherwise.
pub fn halfspace_with_measure(a: f64, aligned_positive: bool) -> Result<HalfSpace1D> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(alloc::format!(
            "half-space measure must lie in (0,1), got {a}"
        )));
    }
    let q = phi_inv(a)?;
    Ok(if aligned_positive {
        HalfSpace1D {
            threshold: -q,
            side: RaySide::RightRay,
        }
    } else {
        HalfSpace1D {
            threshold: q,
            side: RaySide::LeftRay,
        }
    })
}

/// Canonical disjoint union of intervals, sorted ascending with strictly
/// positive gaps between components.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion {
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    /// Builds a canonical union from arbitrary interval pairs. Overlapping
    /// or nearly touching (gap < `MERGE_GAP`) inputs are merged; degenerate
    /// pairs with `lo == hi` are dropped as measure zero.
    pub fn new<I: IntoIterator<Item = (f64, f64)>>(pairs: I) -> Result<Self> {
        let mut items: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in pairs {
            if lo.is_nan() || hi.is_nan() {
                return Err(Error::Domain("interval endpoint is NaN".to_owned()));
            }
            if lo > hi {
                return Err(Error::Domain(alloc::format!(
                    "interval endpoints out of order: ({lo}, {hi})"
                )));
            }
            if lo == hi {
                continue;
            }
            items.push((lo, hi));
        }
        items.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("NaN endpoints rejected above")
                .then(a.1.partial_cmp(&b.1).expect("NaN endpoints rejected above"))
        });
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(items.len());
        for (lo, hi) in items {
            match merged.last_mut() {
                Some(last) if lo <= last.1 + MERGE_GAP => {
                    if hi > last.1 {
                        last.1 = hi;
                    }
                }
                _ => merged.push((lo, hi)),
            }
        }
        if merged.len() > MAX_COMPONENTS {
            return Err(Error::Domain(alloc::format!(
                "more than {MAX_COMPONENTS} components after merging"
            )));
        }
        Ok(IntervalUnion { intervals: merged })
    }

    pub fn empty() -> Self {
        IntervalUnion {
            intervals: Vec::new(),
        }
    }

    pub fn full_line() -> Self {
        IntervalUnion {
            intervals: alloc::vec![(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn components(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Gaussian measure γ₁(s).
    pub fn measure(&self) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| {
                gaussian_moment(lo, hi)
                    .expect("canonical intervals are ordered")
                    .measure
            })
            .sum()
    }

    /// Gaussian barycenter ∫_s x γ₁(x) dx.
    pub fn barycenter(&self) -> f64 {
        self.intervals
            .iter()
            .map(|&(lo, hi)| {
                gaussian_moment(lo, hi)
                    .expect("canonical intervals are ordered")
                    .first_moment
            })
            .sum()
    }

    /// Finite component endpoints tagged with exterior normals, ascending.
    pub fn boundary(&self) -> Vec<BoundaryPoint> {
        let mut out = Vec::with_capacity(2 * self.intervals.len());
        for &(lo, hi) in &self.intervals {
            if lo.is_finite() {
                out.push(BoundaryPoint {
                    location: lo,
                    normal: Normal::Neg,
                });
            }
            if hi.is_finite() {
                out.push(BoundaryPoint {
                    location: hi,
                    normal: Normal::Pos,
                });
            }
        }
        out
    }

    /// Total Gaussian boundary weight Σ γ₁(σ) over finite boundary points
    /// (the 1-D Gaussian perimeter).
    pub fn gaussian_perimeter(&self) -> f64 {
        self.boundary()
            .iter()
            .map(|b| gaussian_density(b.location))
            .sum()
    }

    pub fn complement(&self) -> IntervalUnion {
        if self.intervals.is_empty() {
            return IntervalUnion::full_line();
        }
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(self.intervals.len() + 1);
        let first_lo = self.intervals[0].0;
        if first_lo > f64::NEG_INFINITY {
            out.push((f64::NEG_INFINITY, first_lo));
        }
        for w in self.intervals.windows(2) {
            out.push((w[0].1, w[1].0));
        }
        let last_hi = self.intervals[self.intervals.len() - 1].1;
        if last_hi < f64::INFINITY {
            out.push((last_hi, f64::INFINITY));
        }
        IntervalUnion { intervals: out }
    }

    pub fn intersection(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut out: Vec<(f64, f64)> = Vec::new();
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (alo, ahi) = self.intervals[i];
            let (blo, bhi) = other.intervals[j];
            let lo = alo.max(blo);
            let hi = ahi.min(bhi);
            if lo < hi {
                out.push((lo, hi));
            }
            if ahi <= bhi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalUnion { intervals: out }
    }

    /// Set difference `self \ other`.
    pub fn difference(&self, other: &IntervalUnion) -> IntervalUnion {
        self.intersection(&other.complement())
    }

    /// γ₁(self Δ other).
    pub fn symmetric_difference_measure(&self, other: &IntervalUnion) -> f64 {
        let inter = self.intersection(other).measure();
        (self.measure() + other.measure() - 2.0 * inter).max(0.0)
    }

    /// Whether `x` lies in the (closed) union.
    pub fn contains(&self, x: f64) -> bool {
        // Binary search over sorted disjoint components.
        let mut lo = 0usize;
        let mut hi = self.intervals.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            let (a, b) = self.intervals[mid];
            if x < a {
                hi = mid;
            } else if x > b {
                lo = mid + 1;
            } else {
                return true;
            }
        }
        false
    }

    /// The set translated by `dx`.
    pub fn translate(&self, dx: f64) -> IntervalUnion {
        IntervalUnion {
            intervals: self
                .intervals
                .iter()
                .map(|&(lo, hi)| (lo + dx, hi + dx))
                .collect(),
        }
    }

    /// Stable identity token over the canonical endpoint list (FNV-1a on
    /// the IEEE bit patterns).
    pub fn identity_hash(&self) -> u64 {
        let mut h = 0xcbf29ce484222325u64;
        let mut mix = |v: f64| {
            for byte in v.to_bits().to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        };
        for &(lo, hi) in &self.intervals {
            mix(lo);
            mix(hi);
        }
        h
    }
}

fn format_endpoint(f: &mut fmt::Formatter<'_>, v: f64, left: bool) -> fmt::Result {
    if left {
        if v == f64::NEG_INFINITY {
            write!(f, "(-inf")
        } else {
            write!(f, "[{v}")
        }
    } else if v == f64::INFINITY {
        write!(f, "inf)")
    } else {
        write!(f, "{v}]")
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return write!(f, "empty");
        }
        for (idx, &(lo, hi)) in self.intervals.iter().enumerate() {
            if idx > 0 {
                write!(f, ";")?;
            }
            format_endpoint(f, lo, true)?;
            write!(f, ",")?;
            format_endpoint(f, hi, false)?;
        }
        Ok(())
    }
}

fn parse_endpoint(token: &str) -> Result<f64> {
    let t = token.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("+inf") {
        return Ok(f64::INFINITY);
    }
    if t.eq_ignore_ascii_case("-inf") {
        return Ok(f64::NEG_INFINITY);
    }
    t.parse::<f64>()
        .map_err(|_| Error::Domain(alloc::format!("cannot parse endpoint '{t}'")))
}

impl FromStr for IntervalUnion {
    type Err = Error;

    /// Parses the semicolon-separated syntax, e.g. `"(-inf,0];[1.25,2.5]"`.
    /// Bracket style is ignored (sets are treated modulo measure zero);
    /// `"empty"` or an empty string denotes the empty set.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed.eq_ignore_ascii_case("empty") {
            return Ok(IntervalUnion::empty());
        }
        let mut pairs = Vec::new();
        for part in trimmed.split(';') {
            let p = part.trim();
            let inner = p
                .strip_prefix(['(', '['])
                .and_then(|rest| rest.strip_suffix([')', ']']))
                .ok_or_else(|| {
                    Error::Domain(alloc::format!("component '{p}' is not bracketed"))
                })?;
            let mut tokens = inner.split(',');
            let (lo, hi) = match (tokens.next(), tokens.next(), tokens.next()) {
                (Some(lo), Some(hi), None) => (parse_endpoint(lo)?, parse_endpoint(hi)?),
                _ => {
                    return Err(Error::Domain(alloc::format!(
                        "component '{p}' must contain exactly one comma"
                    )))
                }
            };
            pairs.push((lo, hi));
        }
        IntervalUnion::new(pairs)
    }
}

impl Serialize for IntervalUnion {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IntervalUnion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e: Error| D::Error::custom(alloc::format!("{e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_gaussian_over, QuadratureSpec, Scheme};

    fn set(s: &str) -> IntervalUnion {
        s.parse().unwrap()
    }

    fn quadrature_measure(s: &IntervalUnion) -> f64 {
        let spec = QuadratureSpec::new(Scheme::TanhSinh, 64, 1e-14, 0.0).unwrap();
        s.components()
            .iter()
            .map(|&(lo, hi)| integrate_gaussian_over(|_| 1.0, lo, hi, &spec).unwrap().value)
            .sum()
    }

    #[test]
    fn measure_of_reference_sets() {
        assert!((set("(-inf,0]").measure() - 0.5).abs() < 1e-15);
        assert_eq!(IntervalUnion::empty().measure(), 0.0);
        let s = set("(-inf,0];[1,2]");
        assert!((s.measure() - quadrature_measure(&s)).abs() < 1e-13);
        assert!((s.measure() - 0.6359051219835077).abs() < 1e-12);
    }

    #[test]
    fn barycenter_of_reference_sets() {
        let g0 = 0.3989422804014327;
        assert!((set("(-inf,0]").barycenter() + g0).abs() < 1e-15);
        assert!((set("[0,inf)").barycenter() - g0).abs() < 1e-15);
        assert!(set("[-1,1]").barycenter().abs() < 1e-16);
    }

    #[test]
    fn boundary_points_and_normals() {
        let b = set("(-inf,0]").boundary();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].location, 0.0);
        assert_eq!(b[0].normal, Normal::Pos);

        let b = set("[1,2]").boundary();
        assert_eq!(
            (b[0].location, b[0].normal, b[1].location, b[1].normal),
            (1.0, Normal::Neg, 2.0, Normal::Pos)
        );

        let b = set("(-inf,0];[3,inf)").boundary();
        assert_eq!(
            (b[0].location, b[0].normal, b[1].location, b[1].normal),
            (0.0, Normal::Pos, 3.0, Normal::Neg)
        );
    }

    #[test]
    fn complement_identities() {
        for s in ["(-inf,0]", "[1,2]", "(-inf,-1];[0.5,0.75];[2,inf)", "empty"] {
            let s = set(s);
            let c = s.complement();
            assert!((s.measure() + c.measure() - 1.0).abs() < 1e-13);
            assert!((s.barycenter() + c.barycenter()).abs() < 1e-13);
            let bs = s.boundary();
            let bc = c.boundary();
            assert_eq!(bs.len(), bc.len());
            for (x, y) in bs.iter().zip(bc.iter()) {
                assert_eq!(x.location, y.location);
                assert_eq!(x.normal, y.normal.flipped());
            }
            assert_eq!(c.complement(), s);
        }
    }

    #[test]
    fn construction_is_canonical() {
        // Out-of-order, overlapping, and nearly touching inputs collapse.
        let s = IntervalUnion::new([(1.0, 2.0), (-1.0, 0.5), (0.5 + 1e-13, 0.9)]).unwrap();
        assert_eq!(s.components(), &[(-1.0, 0.9), (1.0, 2.0)]);
        let again = IntervalUnion::new(s.components().to_vec()).unwrap();
        assert_eq!(again, s);

        assert!(IntervalUnion::new([(2.0, 1.0)]).is_err());
        assert!(IntervalUnion::new([(f64::NAN, 1.0)]).is_err());
        let degenerate = IntervalUnion::new([(1.0, 1.0)]).unwrap();
        assert!(degenerate.is_empty());
    }

    #[test]
    fn halfspace_construction_hits_measure() {
        assert_eq!(halfspace_with_measure(0.5, true).unwrap().threshold, 0.0);
        let h = halfspace_with_measure(0.8, true).unwrap();
        assert!((h.threshold + 0.8416212335729143).abs() < 1e-12);
        for k in 1..10 {
            let a = k as f64 / 10.0;
            for aligned in [true, false] {
                let h = halfspace_with_measure(a, aligned).unwrap();
                assert!((h.measure() - a).abs() < 1e-13);
                assert_eq!(h.barycenter() > 0.0, aligned);
            }
        }
        assert!(halfspace_with_measure(0.0, true).is_err());
        assert!(halfspace_with_measure(1.0, true).is_err());
    }

    #[test]
    fn symmetric_difference_reference_values() {
        let s = set("(-inf,0];[1,2]");
        assert_eq!(s.symmetric_difference_measure(&s), 0.0);
        let left = set("(-inf,0]");
        let right = set("[0,inf)");
        assert!((left.symmetric_difference_measure(&right) - 1.0).abs() < 1e-13);
        let wider = set("(-inf,1]");
        assert!(
            (left.symmetric_difference_measure(&wider) - 0.3413447460685429).abs() < 1e-12
        );
    }

    #[test]
    fn parse_display_round_trip() {
        for text in [
            "(-inf,0]",
            "[1.25,2.5]",
            "(-inf,-0.5];[0.125,3];[4,inf)",
            "(-inf,inf)",
            "empty",
        ] {
            let s = set(text);
            let shown = alloc::format!("{s}");
            let back: IntervalUnion = shown.parse().unwrap();
            assert!(back.symmetric_difference_measure(&s) < 1e-12);
        }
        assert!("garbage".parse::<IntervalUnion>().is_err());
        assert!("[1,2,3]".parse::<IntervalUnion>().is_err());
        assert!("[2,1]".parse::<IntervalUnion>().is_err());
    }

    #[test]
    fn serde_uses_interval_syntax() {
        let s = set("(-inf,0];[1,2]");
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "\"(-inf,0];[1,2]\"");
        let back: IntervalUnion = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn membership_queries() {
        let s = set("(-inf,0];[1,2]");
        assert!(s.contains(-5.0));
        assert!(s.contains(0.0));
        assert!(!s.contains(0.5));
        assert!(s.contains(1.5));
        assert!(!s.contains(2.5));
    }
}

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::geom::Region;
use crate::imgcore::Point;

/// Problem families, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Counting,
    Angle,
    Fraction,
    Function,
    Plane,
    Set,
    Solid,
}

impl Domain {
    pub const ALL: [Domain; 7] = [
        Domain::Counting,
        Domain::Angle,
        Domain::Fraction,
        Domain::Function,
        Domain::Plane,
        Domain::Set,
        Domain::Solid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Domain::Counting => "counting",
            Domain::Angle => "angle",
            Domain::Fraction => "fraction",
            Domain::Function => "function",
            Domain::Plane => "plane",
            Domain::Set => "set",
            Domain::Solid => "solid",
        }
    }

    pub fn parse(s: &str) -> Option<Domain> {
        Domain::ALL.into_iter().find(|d| d.name() == s)
    }

    /// Whether `kind` may appear in a spec of this domain.
    pub fn allows(self, kind: CriterionKind) -> bool {
        use CriterionKind as K;
        if kind == K::BackgroundWhite {
            return true;
        }
        match self {
            Domain::Counting => kind == K::CountExact,
            Domain::Angle => matches!(kind, K::SectorEquals | K::RayCount | K::OppositeRays),
            Domain::Fraction => matches!(kind, K::FractionShaded | K::AspectRatio | K::RadiusRatio),
            Domain::Function => matches!(kind, K::CurveMatches | K::AsymptoteAt),
            Domain::Plane => matches!(
                kind,
                K::DotsOnCircle | K::SegmentsIntersect | K::PolygonSides | K::ShapeIsCircle | K::ShapeIsRectangle
            ),
            Domain::Set => kind == K::VennRegions,
            Domain::Solid => matches!(kind, K::PolygonSides | K::SegmentsIntersect),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A rational target in (0, 1]. Deserializes from a number or an `"a/b"`
/// string; serializes as a number.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Ratio(pub f64);

impl Ratio {
    pub fn new(num: u32, den: u32) -> Ratio {
        Ratio(num as f64 / den as f64)
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        let v = match Raw::deserialize(d)? {
            Raw::Num(v) => v,
            Raw::Text(t) => parse_ratio(&t).ok_or_else(|| serde::de::Error::custom(format!("bad ratio {t:?}")))?,
        };
        Ok(Ratio(v))
    }
}

fn parse_ratio(t: &str) -> Option<f64> {
    match t.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            (b != 0.0).then(|| a / b)
        }
        None => t.trim().parse().ok(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorName {
    Red,
    Green,
    Blue,
}

impl ColorName {
    /// Center hue in degrees.
    pub fn hue(self) -> f64 {
        match self {
            ColorName::Red => 0.0,
            ColorName::Green => 120.0,
            ColorName::Blue => 240.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoteAxis {
    Vertical,
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriterionKind {
    CountExact,
    SectorEquals,
    RayCount,
    OppositeRays,
    FractionShaded,
    AspectRatio,
    RadiusRatio,
    VennRegions,
    CurveMatches,
    AsymptoteAt,
    SegmentsIntersect,
    PolygonSides,
    DotsOnCircle,
    ShapeIsCircle,
    ShapeIsRectangle,
    BackgroundWhite,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 16] = [
        CriterionKind::CountExact,
        CriterionKind::SectorEquals,
        CriterionKind::RayCount,
        CriterionKind::OppositeRays,
        CriterionKind::FractionShaded,
        CriterionKind::AspectRatio,
        CriterionKind::RadiusRatio,
        CriterionKind::VennRegions,
        CriterionKind::CurveMatches,
        CriterionKind::AsymptoteAt,
        CriterionKind::SegmentsIntersect,
        CriterionKind::PolygonSides,
        CriterionKind::DotsOnCircle,
        CriterionKind::ShapeIsCircle,
        CriterionKind::ShapeIsRectangle,
        CriterionKind::BackgroundWhite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::CountExact => "count_exact",
            CriterionKind::SectorEquals => "sector_equals",
            CriterionKind::RayCount => "ray_count",
            CriterionKind::OppositeRays => "opposite_rays",
            CriterionKind::FractionShaded => "fraction_shaded",
            CriterionKind::AspectRatio => "aspect_ratio",
            CriterionKind::RadiusRatio => "radius_ratio",
            CriterionKind::VennRegions => "venn_regions",
            CriterionKind::CurveMatches => "curve_matches",
            CriterionKind::AsymptoteAt => "asymptote_at",
            CriterionKind::SegmentsIntersect => "segments_intersect",
            CriterionKind::PolygonSides => "polygon_sides",
            CriterionKind::DotsOnCircle => "dots_on_circle",
            CriterionKind::ShapeIsCircle => "shape_is_circle",
            CriterionKind::ShapeIsRectangle => "shape_is_rectangle",
            CriterionKind::BackgroundWhite => "background_white",
        }
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One checkable condition. The JSON form is tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Criterion {
    CountExact {
        category: String,
        n: u32,
    },
    SectorEquals {
        target_deg: f64,
        #[serde(default)]
        relaxed: bool,
    },
    RayCount {
        n: u32,
    },
    OppositeRays,
    FractionShaded {
        target: Ratio,
        tol: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        color: Option<ColorName>,
    },
    AspectRatio {
        target: f64,
        tol: f64,
    },
    RadiusRatio {
        target: f64,
        tol: f64,
    },
    VennRegions {
        #[serde(default)]
        expect_on: Vec<Region>,
        #[serde(default)]
        expect_off: Vec<Region>,
        n_circles: u8,
    },
    CurveMatches {
        relation: String,
        domain: [f64; 2],
    },
    AsymptoteAt {
        axis: AsymptoteAxis,
        value: f64,
        tol: f64,
    },
    SegmentsIntersect {
        n_intersections: u32,
    },
    PolygonSides {
        n: u32,
    },
    DotsOnCircle {
        n: u32,
    },
    ShapeIsCircle,
    ShapeIsRectangle,
    BackgroundWhite,
}

impl Criterion {
    pub fn kind(&self) -> CriterionKind {
        match self {
            Criterion::CountExact { .. } => CriterionKind::CountExact,
            Criterion::SectorEquals { .. } => CriterionKind::SectorEquals,
            Criterion::RayCount { .. } => CriterionKind::RayCount,
            Criterion::OppositeRays => CriterionKind::OppositeRays,
            Criterion::FractionShaded { .. } => CriterionKind::FractionShaded,
            Criterion::AspectRatio { .. } => CriterionKind::AspectRatio,
            Criterion::RadiusRatio { .. } => CriterionKind::RadiusRatio,
            Criterion::VennRegions { .. } => CriterionKind::VennRegions,
            Criterion::CurveMatches { .. } => CriterionKind::CurveMatches,
            Criterion::AsymptoteAt { .. } => CriterionKind::AsymptoteAt,
            Criterion::SegmentsIntersect { .. } => CriterionKind::SegmentsIntersect,
            Criterion::PolygonSides { .. } => CriterionKind::PolygonSides,
            Criterion::DotsOnCircle { .. } => CriterionKind::DotsOnCircle,
            Criterion::ShapeIsCircle => CriterionKind::ShapeIsCircle,
            Criterion::ShapeIsRectangle => CriterionKind::ShapeIsRectangle,
            Criterion::BackgroundWhite => CriterionKind::BackgroundWhite,
        }
    }

    /// Parameter sanity independent of the image.
    pub fn validate(&self) -> Result<(), String> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(format!("{name} must be positive, got {v}"))
            }
        };
        match self {
            Criterion::SectorEquals { target_deg, .. } => {
                if *target_deg > 0.0 && *target_deg < 360.0 {
                    Ok(())
                } else {
                    Err(format!("target_deg {target_deg} outside (0, 360)"))
                }
            }
            Criterion::FractionShaded { target, tol, .. } => {
                if !(target.0 > 0.0 && target.0 <= 1.0) {
                    return Err(format!("target {} outside (0, 1]", target.0));
                }
                positive("tol", *tol)
            }
            Criterion::AspectRatio { target, tol } | Criterion::RadiusRatio { target, tol } => {
                positive("target", *target)?;
                positive("tol", *tol)
            }
            Criterion::AsymptoteAt { tol, value, .. } => {
                if !value.is_finite() {
                    return Err("asymptote value must be finite".into());
                }
                positive("tol", *tol)
            }
            Criterion::VennRegions { expect_on, expect_off, n_circles } => {
                if !(2..=3).contains(n_circles) {
                    return Err(format!("n_circles must be 2 or 3, got {n_circles}"));
                }
                for r in expect_on.iter().chain(expect_off) {
                    if r.circles_needed() > *n_circles as usize {
                        return Err(format!("region {r} needs more than {n_circles} circles"));
                    }
                }
                if let Some(r) = expect_on.iter().find(|r| expect_off.contains(r)) {
                    return Err(format!("region {r} is both on and off"));
                }
                Ok(())
            }
            Criterion::CurveMatches { domain, relation } => {
                if !(domain[0] < domain[1]) {
                    return Err("curve domain must satisfy lo < hi".into());
                }
                if relation.trim().is_empty() {
                    return Err("relation is empty".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Explicit pixel-to-math mapping for function plots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    /// Pixel position of the math origin.
    pub origin_px: Point,
    pub units_per_px_x: f64,
    pub units_per_px_y: f64,
}

/// The checkable contract for one problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub problem_id: String,
    pub domain: Domain,
    pub criteria: Vec<Criterion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Calibration>,
}

impl ConstraintSpec {
    pub fn new(problem_id: impl Into<String>, domain: Domain, criteria: Vec<Criterion>) -> Self {
        Self { problem_id: problem_id.into(), domain, criteria, calibration: None }
    }

    pub fn needs_detections(&self) -> bool {
        self.criteria.iter().any(|c| c.kind() == CriterionKind::CountExact)
    }

    /// Checks the domain/kind pairing and every criterion's parameters.
    pub fn validate(&self) -> Result<(), String> {
        for c in &self.criteria {
            if !self.domain.allows(c.kind()) {
                return Err(format!("{} is not a {} criterion", c.kind(), self.domain));
            }
            c.validate().map_err(|e| format!("{}: {e}", c.kind()))?;
        }
        if let Some(cal) = &self.calibration {
            if !(cal.units_per_px_x > 0.0 && cal.units_per_px_y > 0.0) {
                return Err("calibration scales must be positive".to_string());
            }
        }
        Ok(())
    }
}

/// One object reported by an external detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub category: String,
    pub confidence: f64,
    /// `[x, y, w, h]` in pixels.
    pub bbox: [f64; 4],
}

/// Detector output for one image.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectionSet {
    #[serde(default)]
    pub image: String,
    pub detections: Vec<Detection>,
}

impl DetectionSet {
    /// Confidences in [0, 1], non-negative box sizes, and boxes inside
    /// `width × height` when dimensions are given.
    pub fn validate(&self, dims: Option<(u32, u32)>) -> Result<(), String> {
        for (i, d) in self.detections.iter().enumerate() {
            if !(0.0..=1.0).contains(&d.confidence) {
                return Err(format!("detection {i}: confidence {} outside [0, 1]", d.confidence));
            }
            let [x, y, w, h] = d.bbox;
            if !(w >= 0.0 && h >= 0.0) {
                return Err(format!("detection {i}: negative box size"));
            }
            if let Some((iw, ih)) = dims {
                if x < 0.0 || y < 0.0 || x + w > iw as f64 || y + h > ih as f64 {
                    return Err(format!("detection {i}: box outside the {iw}x{ih} image"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn criterion_json_shape() {
        let c: Criterion = serde_json::from_str(r#"{"kind":"fraction_shaded","target":"5/8","tol":0.015}"#).unwrap();
        assert_eq!(c, Criterion::FractionShaded { target: Ratio(0.625), tol: 0.015, color: None });
        let v: Criterion = serde_json::from_str(
            r#"{"kind":"venn_regions","expect_on":["A∩B"],"expect_off":["A_only","B_only"],"n_circles":2}"#,
        )
        .unwrap();
        assert_eq!(v.kind(), CriterionKind::VennRegions);
        let s = serde_json::to_string(&Criterion::OppositeRays).unwrap();
        assert_eq!(s, r#"{"kind":"opposite_rays"}"#);
        for k in CriterionKind::ALL {
            assert!(Domain::ALL.iter().any(|d| d.allows(k)), "{k}");
        }
    }

    #[test]
    fn spec_validation() {
        let bad = ConstraintSpec::new("p", Domain::Angle, vec![Criterion::PolygonSides { n: 3 }]);
        assert!(bad.validate().is_err());
        let bad_ratio = ConstraintSpec::new(
            "p",
            Domain::Fraction,
            vec![Criterion::FractionShaded { target: Ratio(1.5), tol: 0.01, color: None }],
        );
        assert!(bad_ratio.validate().is_err());
        let venn = ConstraintSpec::new(
            "p",
            Domain::Set,
            vec![Criterion::VennRegions { expect_on: vec![Region::from_bits(4).unwrap()], expect_off: vec![], n_circles: 2 }],
        );
        assert!(venn.validate().is_err());
    }

    #[test]
    fn detection_set_format() {
        let d: DetectionSet = serde_json::from_str(
            r#"{"image":"a.png","detections":[{"category":"apple","confidence":0.9,"bbox":[1,2,30,40]}]}"#,
        )
        .unwrap();
        assert_eq!(d.detections[0].bbox, [1.0, 2.0, 30.0, 40.0]);
        assert!(d.validate(Some((100, 100))).is_ok());
        assert!(d.validate(Some((20, 20))).is_err());
    }
}

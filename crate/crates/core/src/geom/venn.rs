use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::GeomError;
use crate::imgcore::{BinaryMask, CircleShape, Point};

const NAMES: [char; 3] = ['A', 'B', 'C'];

/// Exclusive Venn region, encoded as a membership bitmask (bit 0 = A).
/// Code 0 is everything outside every circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Region(u8);

impl Region {
    pub const OUTSIDE: Region = Region(0);

    pub fn from_bits(bits: u8) -> Option<Region> {
        (bits < 8).then_some(Region(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    /// Highest circle index this region refers to, plus one.
    pub fn circles_needed(self) -> usize {
        8 - self.0.leading_zeros() as usize
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let members: Vec<char> = (0..3).filter(|i| self.0 & (1 << i) != 0).map(|i| NAMES[i]).collect();
        match members.len() {
            0 => f.write_str("outside"),
            1 => write!(f, "{}_only", members[0]),
            _ => {
                for (i, c) in members.iter().enumerate() {
                    if i > 0 {
                        f.write_str("∩")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Region {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("outside") {
            return Ok(Region::OUTSIDE);
        }
        let body = t.strip_suffix("_only").unwrap_or(t);
        let mut bits = 0u8;
        for ch in body.chars() {
            match ch {
                'A' | 'a' => bits |= 1,
                'B' | 'b' => bits |= 2,
                'C' | 'c' => bits |= 4,
                '∩' | '&' | ' ' => {}
                _ => return Err(format!("unknown region label {s:?}")),
            }
        }
        if bits == 0 {
            return Err(format!("unknown region label {s:?}"));
        }
        Ok(Region(bits))
    }
}

impl TryFrom<String> for Region {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Region> for String {
    fn from(r: Region) -> String {
        format!("{r}")
    }
}

/// Rasterized Venn diagram: each pixel carries the bitmask of circles whose
/// interior contains its center.
#[derive(Debug, Clone, PartialEq)]
pub struct VennLayout {
    /// Circles in label order (A, B, C) by center x, ties by y.
    pub circles: Vec<CircleShape>,
    width: u32,
    height: u32,
    codes: Vec<u8>,
}

impl VennLayout {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn regions(&self) -> Vec<Region> {
        (0..1u8 << self.circles.len()).map(Region).collect()
    }

    pub fn contains(&self, region: Region) -> bool {
        region.circles_needed() <= self.circles.len()
    }

    pub fn region_at(&self, x: u32, y: u32) -> Region {
        Region(self.codes[(y * self.width + x) as usize])
    }

    pub fn region_mask(&self, region: Region) -> BinaryMask {
        let bits = self.codes.iter().map(|&c| c == region.0).collect();
        BinaryMask::from_bits(self.width, self.height, bits).expect("codes match dimensions")
    }

    pub fn region_masks(&self) -> Vec<(Region, BinaryMask)> {
        self.regions().into_iter().map(|r| (r, self.region_mask(r))).collect()
    }

    pub fn pixel_count(&self, region: Region) -> usize {
        self.codes.iter().filter(|&&c| c == region.0).count()
    }
}

/// Builds the region map for two or three pairwise-overlapping circles.
/// Disjoint or nested pairs are not a Venn diagram.
pub fn venn_layout(circles: &[CircleShape], width: u32, height: u32) -> Result<VennLayout, GeomError> {
    if !(2..=3).contains(&circles.len()) {
        return Err(GeomError::BadTopology("need 2 or 3 circles"));
    }
    for (i, a) in circles.iter().enumerate() {
        if a.radius <= 0.0 {
            return Err(GeomError::BadTopology("non-positive radius"));
        }
        for b in &circles[i + 1..] {
            let d = a.center.distance(b.center);
            if d >= a.radius + b.radius {
                return Err(GeomError::BadTopology("circles are disjoint"));
            }
            if d <= libm::fabs(a.radius - b.radius) {
                return Err(GeomError::BadTopology("one circle contains another"));
            }
        }
    }
    let mut sorted = circles.to_vec();
    sorted.sort_by(|a, b| a.center.x.total_cmp(&b.center.x).then(a.center.y.total_cmp(&b.center.y)));
    let mut codes = vec![0u8; width as usize * height as usize];
    for y in 0..height {
        for x in 0..width {
            let p = Point::pixel_center(x, y);
            let mut code = 0u8;
            for (i, c) in sorted.iter().enumerate() {
                if c.contains(p) {
                    code |= 1 << i;
                }
            }
            codes[(y * width + x) as usize] = code;
        }
    }
    Ok(VennLayout { circles: sorted, width, height, codes })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OccupancyReading {
    pub region: Region,
    pub fraction: f64,
    /// Set when the region has no pixels; `fraction` is then 0.
    pub empty_region: bool,
}

/// Share of each region's pixels that are set in `color_mask`.
pub fn region_occupancy(layout: &VennLayout, color_mask: &BinaryMask) -> Result<Vec<OccupancyReading>, GeomError> {
    if color_mask.width() != layout.width || color_mask.height() != layout.height {
        return Err(GeomError::DimensionMismatch);
    }
    let n = 1usize << layout.circles.len();
    let mut total = vec![0usize; n];
    let mut hit = vec![0usize; n];
    for (code, &on) in layout.codes.iter().zip(color_mask.bits()) {
        total[*code as usize] += 1;
        if on {
            hit[*code as usize] += 1;
        }
    }
    Ok((0..n)
        .map(|i| OccupancyReading {
            region: Region(i as u8),
            fraction: if total[i] == 0 { 0.0 } else { hit[i] as f64 / total[i] as f64 },
            empty_region: total[i] == 0,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn circle(x: f64, y: f64, r: f64) -> CircleShape {
        CircleShape { center: Point::new(x, y), radius: r }
    }

    #[test]
    fn labels_round_trip() {
        for b in 0..8 {
            let r = Region(b);
            assert_eq!(r.to_string().parse::<Region>(), Ok(r));
        }
        assert_eq!("A∩B".parse::<Region>(), Ok(Region(3)));
        assert_eq!("A&C".parse::<Region>(), Ok(Region(5)));
        assert_eq!("ABC".parse::<Region>(), Ok(Region(7)));
        assert_eq!(Region(4).to_string(), "C_only");
        assert!("D_only".parse::<Region>().is_err());
        assert_eq!(serde_json::to_string(&Region(3)).unwrap(), "\"A∩B\"");
    }

    #[test]
    fn two_circle_layout_matches_brute_force() {
        let l = venn_layout(&[circle(602.0, 512.0, 150.0), circle(422.0, 512.0, 150.0)], 1024, 1024).unwrap();
        assert_eq!(l.regions().len(), 4);
        assert_eq!(l.circles[0].center.x, 422.0);
        let total: usize = l.regions().iter().map(|&r| l.pixel_count(r)).sum();
        assert_eq!(total, 1024 * 1024);
        assert!(l.pixel_count(Region(3)) > 0);
        let mut brute = 0;
        for y in 0..1024 {
            for x in 0..1024 {
                let p = Point::pixel_center(x, y);
                if p.distance(Point::new(422.0, 512.0)) < 150.0 && p.distance(Point::new(602.0, 512.0)) < 150.0 {
                    brute += 1;
                }
            }
        }
        assert_eq!(l.pixel_count(Region(3)), brute);
    }

    #[test]
    fn bad_topology() {
        assert!(matches!(
            venn_layout(&[circle(100.0, 100.0, 50.0), circle(400.0, 100.0, 50.0)], 512, 512),
            Err(GeomError::BadTopology(_))
        ));
        assert!(matches!(
            venn_layout(&[circle(200.0, 200.0, 150.0), circle(210.0, 200.0, 50.0)], 512, 512),
            Err(GeomError::BadTopology(_))
        ));
        assert!(venn_layout(&[circle(200.0, 200.0, 150.0)], 512, 512).is_err());
    }

    #[test]
    fn occupancy_identity() {
        let l = venn_layout(&[circle(150.0, 200.0, 100.0), circle(280.0, 200.0, 100.0)], 400, 400).unwrap();
        let r = region_occupancy(&l, &l.region_mask(Region(3))).unwrap();
        for reading in r {
            let want = if reading.region == Region(3) { 1.0 } else { 0.0 };
            assert_eq!(reading.fraction, want);
        }
    }

    #[test]
    fn off_canvas_region_is_flagged() {
        // A∩B lies entirely left of the canvas
        let l = venn_layout(&[circle(-100.0, 50.0, 60.0), circle(-20.0, 50.0, 60.0)], 100, 100).unwrap();
        let r = region_occupancy(&l, &BinaryMask::new(100, 100)).unwrap();
        assert!(r[3].empty_region);
        assert_eq!(r[3].fraction, 0.0);
    }

    fn three() -> impl Strategy<Value = Vec<CircleShape>> {
        (80.0..120.0f64, 80.0..120.0f64, 80.0..120.0f64, -20.0..20.0f64, -20.0..20.0f64).prop_map(
            |(r1, r2, r3, dx, dy)| {
                vec![
                    circle(130.0 + dx, 140.0, r1),
                    circle(230.0, 140.0 + dy, r2),
                    circle(180.0, 220.0, r3),
                ]
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn three_circles_tile_canvas(cs in three()) {
            let l = venn_layout(&cs, 360, 360).unwrap();
            prop_assert_eq!(l.regions().len(), 8);
            let masks = l.region_masks();
            let total: usize = masks.iter().map(|(_, m)| m.count()).sum();
            prop_assert_eq!(total, 360 * 360);
            for i in 0..masks.len() {
                for j in i + 1..masks.len() {
                    prop_assert!(masks[i].1.and(&masks[j].1).is_empty());
                }
            }
        }

        #[test]
        fn occupancy_bounded_and_monotone(cs in three(), seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let l = venn_layout(&cs, 360, 360).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let small = BinaryMask::from_fn(360, 360, |_, _| rng.random_bool(0.2));
            let extra = BinaryMask::from_fn(360, 360, |_, _| rng.random_bool(0.2));
            let big = small.or(&extra);
            let a = region_occupancy(&l, &small).unwrap();
            let b = region_occupancy(&l, &big).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((0.0..=1.0).contains(&x.fraction));
                prop_assert!(y.fraction >= x.fraction);
            }
        }
    }
}

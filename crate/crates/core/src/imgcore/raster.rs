use alloc::vec;
use alloc::vec::Vec;

use super::ImageError;

/// Pixel layout of a [`RasterImage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channels {
    Gray,
    Rgb,
}

impl Channels {
    pub fn count(self) -> usize {
        match self {
            Channels::Gray => 1,
            Channels::Rgb => 3,
        }
    }
}

/// An owned, row-major 8-bit image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RasterImage {
    width: u32,
    height: u32,
    channels: Channels,
    data: Vec<u8>,
}

impl RasterImage {
    pub fn new(
        width: u32,
        height: u32,
        channels: Channels,
        data: Vec<u8>,
    ) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::InvalidDimensions { width, height });
        }
        let expected = width as usize * height as usize * channels.count();
        if data.len() != expected {
            return Err(ImageError::BufferSize {
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// A single-channel image where every pixel has intensity `value`.
    pub fn filled_gray(width: u32, height: u32, value: u8) -> Result<Self, ImageError> {
        Self::new(
            width,
            height,
            Channels::Gray,
            vec![value; width as usize * height as usize],
        )
    }

    pub fn filled_rgb(width: u32, height: u32, rgb: [u8; 3]) -> Result<Self, ImageError> {
        let n = width as usize * height as usize;
        let mut data = Vec::with_capacity(n * 3);
        for _ in 0..n {
            data.extend_from_slice(&rgb);
        }
        Self::new(width, height, Channels::Rgb, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> Channels {
        self.channels
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    pub fn min_side(&self) -> u32 {
        self.width.min(self.height)
    }

    fn offset(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * self.channels.count()
    }

    /// RGB triple at `(x, y)`; gray pixels are replicated.
    pub fn rgb(&self, x: u32, y: u32) -> [u8; 3] {
        let o = self.offset(x, y);
        match self.channels {
            Channels::Gray => [self.data[o]; 3],
            Channels::Rgb => [self.data[o], self.data[o + 1], self.data[o + 2]],
        }
    }

    /// Luma at `(x, y)`, computed on the fly for RGB images.
    pub fn luma(&self, x: u32, y: u32) -> u8 {
        let o = self.offset(x, y);
        match self.channels {
            Channels::Gray => self.data[o],
            Channels::Rgb => luma(self.data[o], self.data[o + 1], self.data[o + 2]),
        }
    }

    pub fn set_rgb(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let o = self.offset(x, y);
        match self.channels {
            Channels::Gray => self.data[o] = luma(rgb[0], rgb[1], rgb[2]),
            Channels::Rgb => self.data[o..o + 3].copy_from_slice(&rgb),
        }
    }

    pub fn set_gray(&mut self, x: u32, y: u32, value: u8) {
        self.set_rgb(x, y, [value; 3]);
    }
}

/// `round(0.299 R + 0.587 G + 0.114 B)` in exact integer arithmetic.
fn luma(r: u8, g: u8, b: u8) -> u8 {
    let weighted = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((weighted + 500) / 1000) as u8
}

/// Converts to a single-channel luma image. Gray input is returned unchanged.
pub fn to_grayscale(img: &RasterImage) -> RasterImage {
    match img.channels {
        Channels::Gray => img.clone(),
        Channels::Rgb => {
            let data = img
                .data
                .chunks_exact(3)
                .map(|p| luma(p[0], p[1], p[2]))
                .collect();
            RasterImage {
                width: img.width,
                height: img.height,
                channels: Channels::Gray,
                data,
            }
        }
    }
}

/// Hexcone HSV value. Hue is in degrees `[0, 360)`; achromatic pixels get hue 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hsv {
    pub hue: f64,
    pub saturation: f64,
    pub value: f64,
}

impl Hsv {
    pub fn from_rgb([r, g, b]: [u8; 3]) -> Self {
        let (r, g, b) = (r as f64 / 255.0, g as f64 / 255.0, b as f64 / 255.0);
        let max = r.max(g).max(b);
        let min = r.min(g).min(b);
        let delta = max - min;
        let saturation = if max > 0.0 { delta / max } else { 0.0 };
        let hue = if delta == 0.0 {
            0.0
        } else if max == r {
            let h = 60.0 * ((g - b) / delta);
            if h < 0.0 {
                h + 360.0
            } else {
                h
            }
        } else if max == g {
            60.0 * ((b - r) / delta) + 120.0
        } else {
            60.0 * ((r - g) / delta) + 240.0
        };
        Hsv {
            hue: if hue >= 360.0 { hue - 360.0 } else { hue },
            saturation,
            value: max,
        }
    }
}

/// Per-pixel HSV in row-major order. Gray input is treated as achromatic RGB.
pub fn to_hsv(img: &RasterImage) -> Vec<Hsv> {
    let mut out = Vec::with_capacity(img.width as usize * img.height as usize);
    for y in 0..img.height {
        for x in 0..img.width {
            out.push(Hsv::from_rgb(img.rgb(x, y)));
        }
    }
    out
}

/// A foreground/background bitmap with the dimensions of its source image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            bits,
        }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Option<Self> {
        (bits.len() == width as usize * height as usize).then_some(Self {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    /// Like [`get`](Self::get) but `false` outside the mask.
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as u64) < self.width as u64
            && (y as u64) < self.height as u64
            && self.get(x as u32, y as u32)
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        self.bits[y as usize * self.width as usize + x as usize] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    pub fn same_dims(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Foreground pixel coordinates in row-major order.
    pub fn foreground(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width as usize;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(i, _)| ((i % w) as u32, (i / w) as u32))
    }

    pub fn and(&self, other: &BinaryMask) -> BinaryMask {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn or(&self, other: &BinaryMask) -> BinaryMask {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn and_not(&self, other: &BinaryMask) -> BinaryMask {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| !*a || *b)
    }

    fn zip_with(&self, other: &BinaryMask, f: impl Fn(bool, bool) -> bool) -> BinaryMask {
        assert!(self.same_dims(other), "mask dimensions differ");
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

/// Foreground iff `value < thresh` when `darker_is_fg`, else iff `value >= thresh`.
pub fn threshold_foreground(gray: &RasterImage, thresh: u8, darker_is_fg: bool) -> BinaryMask {
    BinaryMask::from_fn(gray.width, gray.height, |x, y| {
        let v = gray.luma(x, y);
        if darker_is_fg {
            v < thresh
        } else {
            v >= thresh
        }
    })
}

/// Width of the border band inspected by [`check_white_background`]:
/// `max(1, floor(frac · min(H, W)))`.
pub fn border_band_width(width: u32, height: u32, frac: f64) -> u32 {
    let w = libm::floor(frac * width.min(height) as f64);
    (w as u32).max(1)
}

/// True iff every pixel in the border band has intensity `>= thresh`.
pub fn check_white_background(gray: &RasterImage, thresh: u8, border_frac: f64) -> bool {
    let band = border_band_width(gray.width, gray.height, border_frac);
    for y in 0..gray.height {
        let row_in_band = y < band || y >= gray.height.saturating_sub(band);
        for x in 0..gray.width {
            let in_band = row_in_band || x < band || x >= gray.width.saturating_sub(band);
            if in_band && gray.luma(x, y) < thresh {
                return false;
            }
        }
    }
    true
}

use alloc::vec::Vec;
use core::cell::OnceCell;

use super::angle::AngleReading;
use super::fraction::ShapeReading;
use super::function::PlotReading;
use super::{Calibration, ColorName, ThresholdConfig};
use crate::imgcore::{
    check_white_background, hough_lines, threshold_foreground, to_grayscale, to_hsv, BinaryMask, Channels,
    HoughLineParams, Hsv, LineSegment, RasterImage,
};

/// Per-image state shared by the criteria of one spec. Every derived
/// quantity is computed at most once.
pub(crate) struct Context<'a> {
    pub img: &'a RasterImage,
    pub cfg: &'a ThresholdConfig,
    pub calibration: Option<Calibration>,
    gray: OnceCell<RasterImage>,
    hsv: OnceCell<Vec<Hsv>>,
    dark: OnceCell<BinaryMask>,
    ink: OnceCell<BinaryMask>,
    segments: OnceCell<Vec<LineSegment>>,
    pub(crate) angle: OnceCell<Result<AngleReading, &'static str>>,
    pub(crate) shape: OnceCell<Result<ShapeReading, &'static str>>,
    pub(crate) silhouette: OnceCell<Result<ShapeReading, &'static str>>,
    pub(crate) plot: OnceCell<Result<PlotReading, &'static str>>,
}

impl<'a> Context<'a> {
    pub fn new(img: &'a RasterImage, cfg: &'a ThresholdConfig, calibration: Option<Calibration>) -> Self {
        Self {
            img,
            cfg,
            calibration,
            gray: OnceCell::new(),
            hsv: OnceCell::new(),
            dark: OnceCell::new(),
            ink: OnceCell::new(),
            segments: OnceCell::new(),
            angle: OnceCell::new(),
            shape: OnceCell::new(),
            silhouette: OnceCell::new(),
            plot: OnceCell::new(),
        }
    }

    pub fn width(&self) -> u32 {
        self.img.width()
    }

    pub fn height(&self) -> u32 {
        self.img.height()
    }

    pub fn min_side(&self) -> u32 {
        self.img.min_side()
    }

    pub fn gray(&self) -> &RasterImage {
        self.gray.get_or_init(|| match self.img.channels() {
            Channels::Gray => self.img.clone(),
            Channels::Rgb => to_grayscale(self.img),
        })
    }

    pub fn hsv(&self) -> &[Hsv] {
        self.hsv.get_or_init(|| to_hsv(self.img))
    }

    /// Pixels darker than `fg_gray_thresh`.
    pub fn dark(&self) -> &BinaryMask {
        self.dark.get_or_init(|| threshold_foreground(self.gray(), self.cfg.fg_gray_thresh, true))
    }

    /// Dark, unsaturated pixels: outlines and grid lines rather than fills.
    pub fn ink(&self) -> &BinaryMask {
        self.ink.get_or_init(|| {
            let gray = self.gray();
            let hsv = self.hsv();
            let w = self.width();
            BinaryMask::from_fn(w, self.height(), |x, y| {
                gray.luma(x, y) <= self.cfg.ink_gray_max && hsv[(y * w + x) as usize].saturation <= self.cfg.ink_sat_max
            })
        })
    }

    /// Pixels whose hue falls within the configured band around `color`.
    pub fn color_mask(&self, color: ColorName) -> BinaryMask {
        let hsv = self.hsv();
        let w = self.width();
        let cfg = self.cfg;
        BinaryMask::from_fn(w, self.height(), |x, y| {
            let p = hsv[(y * w + x) as usize];
            let d = libm::fmod(libm::fabs(p.hue - color.hue()), 360.0);
            d.min(360.0 - d) <= cfg.color_hue_halfwidth_deg && p.saturation >= cfg.color_sat_min && p.value >= cfg.color_val_min
        })
    }

    /// Probabilistic Hough segments of the dark mask with the shared line
    /// thresholds.
    pub fn segments(&self) -> &[LineSegment] {
        self.segments.get_or_init(|| {
            let params = HoughLineParams {
                vote_threshold: self.cfg.line_vote_threshold,
                min_len: self.cfg.line_min_len(self.min_side()),
                max_gap: self.cfg.line_max_gap,
                seed: self.cfg.hough_seed,
            };
            hough_lines(self.dark(), &params)
        })
    }

    pub fn background_white(&self) -> bool {
        check_white_background(self.gray(), self.cfg.white_bg_thresh, self.cfg.bg_border_frac)
    }
}

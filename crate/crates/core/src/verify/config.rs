use alloc::format;
use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::imgcore::{DotParams, HoughCircleParams, PeakParams};

/// Every numeric threshold the evaluators consult. All fields are flat
/// scalars so the structure maps one-to-one onto a `key = value` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdConfig {
    /// Longer image side that pixel thresholds are tuned for; loaders rescale
    /// inputs to it. 0 disables rescaling.
    pub eval_resolution: u32,

    pub angle_tol_deg: f64,
    /// Added to `angle_tol_deg` for criteria marked `relaxed`.
    pub angle_relax_margin_deg: f64,
    pub opposite_tol_deg: f64,
    pub min_peak_len_ratio: f64,
    pub min_peak_sep_deg: f64,
    pub peak_floor: f64,
    pub peak_rel: f64,
    /// Radial probe length as a fraction of the shorter image side.
    pub probe_radius_frac: f64,
    /// Maximum distance from a Hough intersection to the nearest endpoint of
    /// each segment for it to count as an angle vertex.
    pub vertex_endpoint_px: f64,

    pub line_vote_threshold: u32,
    pub line_min_len_floor: f64,
    pub line_min_len_frac: f64,
    pub line_max_gap: u32,

    pub white_bg_thresh: u8,
    pub bg_border_frac: f64,
    pub fg_gray_thresh: u8,
    /// Lenient foreground cut used for line drawings with light strokes.
    pub fg_gray_thresh_alt: u8,
    /// Achromatic ink: gray at most this and saturation at most `ink_sat_max`.
    pub ink_gray_max: u8,
    pub ink_sat_max: f64,

    pub morph_kernel_small: u32,
    pub morph_kernel_medium: u32,
    pub morph_kernel_large: u32,
    pub min_contour_area: f64,
    pub min_contour_area_large: f64,

    pub venn_dp: f64,
    pub venn_min_dist: f64,
    pub venn_param1: f64,
    pub venn_param2: f64,
    pub venn_min_radius: f64,
    pub occupancy_on: f64,
    pub occupancy_off: f64,

    pub color_hue_halfwidth_deg: f64,
    pub color_sat_min: f64,
    pub color_val_min: f64,
    pub purity_check: bool,
    pub purity_max_sat_std: f64,

    pub dot_dp: f64,
    pub dot_param1: f64,
    pub dot_param2: f64,
    pub dot_radius_min_frac: f64,
    pub dot_radius_max_frac: f64,
    pub dot_spacing_frac: f64,
    pub dot_min_fill_ratio: f64,
    pub rim_tol_frac: f64,

    pub polygon_eps_frac: f64,
    pub circularity_min: f64,
    pub rectangularity_min: f64,
    pub intersection_merge_px: f64,
    pub junction_extend_px: f64,
    pub collinear_angle_tol_deg: f64,
    pub collinear_dist_px: f64,

    pub fn_edge_low: f64,
    pub fn_edge_high: f64,
    pub fn_line_vote: u32,
    pub fn_line_max_gap: u32,
    pub fn_axis_width_px: u32,
    pub fn_window_px: u32,
    pub fn_min_run_px: u32,
    pub fn_smooth_kernel: u32,
    /// Reserved for a tick-label reader; no reader ships with this crate.
    pub fn_ocr_min_conf: f64,
    pub fn_ransac_iters: u32,
    pub fn_inlier_tol_x: f64,
    pub fn_inlier_tol_y: f64,
    pub fn_final_tol: f64,
    pub fn_min_inlier_frac: f64,
    /// Math units spanned by an axis when no calibration is given.
    pub fn_axis_units: f64,
    /// Dark components up to this many pixels are treated as specks.
    pub fn_speck_max_px: u32,

    pub count_conf_thresh: f64,
    pub count_tolerance: u32,

    pub hough_seed: u64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            eval_resolution: 1024,
            angle_tol_deg: 12.0,
            angle_relax_margin_deg: 8.0,
            opposite_tol_deg: 10.0,
            min_peak_len_ratio: 0.10,
            min_peak_sep_deg: 10.0,
            peak_floor: 8.0,
            peak_rel: 0.10,
            probe_radius_frac: 0.35,
            vertex_endpoint_px: 15.0,
            line_vote_threshold: 60,
            line_min_len_floor: 80.0,
            line_min_len_frac: 0.12,
            line_max_gap: 10,
            white_bg_thresh: 240,
            bg_border_frac: 0.08,
            fg_gray_thresh: 200,
            fg_gray_thresh_alt: 240,
            ink_gray_max: 100,
            ink_sat_max: 0.25,
            morph_kernel_small: 3,
            morph_kernel_medium: 5,
            morph_kernel_large: 15,
            min_contour_area: 1000.0,
            min_contour_area_large: 10000.0,
            venn_dp: 1.2,
            venn_min_dist: 100.0,
            venn_param1: 50.0,
            venn_param2: 30.0,
            venn_min_radius: 80.0,
            occupancy_on: 0.20,
            occupancy_off: 0.05,
            color_hue_halfwidth_deg: 10.0,
            color_sat_min: 0.4,
            color_val_min: 0.3,
            purity_check: false,
            purity_max_sat_std: 0.15,
            dot_dp: 1.2,
            dot_param1: 100.0,
            dot_param2: 12.0,
            dot_radius_min_frac: 0.0025,
            dot_radius_max_frac: 0.014,
            dot_spacing_frac: 0.03,
            dot_min_fill_ratio: 0.68,
            rim_tol_frac: 0.02,
            polygon_eps_frac: 0.02,
            circularity_min: 0.85,
            rectangularity_min: 0.9,
            intersection_merge_px: 5.0,
            junction_extend_px: 10.0,
            collinear_angle_tol_deg: 3.0,
            collinear_dist_px: 6.0,
            fn_edge_low: 50.0,
            fn_edge_high: 150.0,
            fn_line_vote: 120,
            fn_line_max_gap: 25,
            fn_axis_width_px: 10,
            fn_window_px: 30,
            fn_min_run_px: 25,
            fn_smooth_kernel: 41,
            fn_ocr_min_conf: 12.0,
            fn_ransac_iters: 250,
            fn_inlier_tol_x: 0.35,
            fn_inlier_tol_y: 0.75,
            fn_final_tol: 0.6,
            fn_min_inlier_frac: 0.5,
            fn_axis_units: 20.0,
            fn_speck_max_px: 12,
            count_conf_thresh: 0.45,
            count_tolerance: 0,
            hough_seed: 42,
        }
    }
}

impl ThresholdConfig {
    pub fn angle_tol_relaxed_deg(&self) -> f64 {
        self.angle_tol_deg + self.angle_relax_margin_deg
    }

    /// `max(floor, frac · min_side)`.
    pub fn line_min_len(&self, min_side: u32) -> f64 {
        self.line_min_len_floor.max(self.line_min_len_frac * min_side as f64)
    }

    pub fn peak_params(&self) -> PeakParams {
        PeakParams {
            floor: self.peak_floor,
            relative: self.peak_rel,
            min_len_ratio: self.min_peak_len_ratio,
            min_sep_deg: self.min_peak_sep_deg,
        }
    }

    pub fn venn_circle(&self) -> HoughCircleParams {
        HoughCircleParams {
            dp: self.venn_dp,
            min_dist: self.venn_min_dist,
            param1: self.venn_param1,
            param2: self.venn_param2,
            min_radius: self.venn_min_radius,
            max_radius: 0.0,
        }
    }

    pub fn dot_params(&self) -> DotParams {
        DotParams {
            dp: self.dot_dp,
            param1: self.dot_param1,
            param2: self.dot_param2,
            radius_frac: (self.dot_radius_min_frac, self.dot_radius_max_frac),
            spacing_frac: self.dot_spacing_frac,
            min_fill_ratio: self.dot_min_fill_ratio,
            fg_thresh: self.fg_gray_thresh,
        }
    }

    /// Checks the relations between fields: positive tolerances, ordered
    /// threshold pairs and odd smoothing kernels.
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("angle_tol_deg", self.angle_tol_deg),
            ("opposite_tol_deg", self.opposite_tol_deg),
            ("min_peak_len_ratio", self.min_peak_len_ratio),
            ("min_peak_sep_deg", self.min_peak_sep_deg),
            ("probe_radius_frac", self.probe_radius_frac),
            ("bg_border_frac", self.bg_border_frac),
            ("occupancy_off", self.occupancy_off),
            ("rim_tol_frac", self.rim_tol_frac),
            ("polygon_eps_frac", self.polygon_eps_frac),
            ("intersection_merge_px", self.intersection_merge_px),
            ("fn_inlier_tol_x", self.fn_inlier_tol_x),
            ("fn_inlier_tol_y", self.fn_inlier_tol_y),
            ("fn_final_tol", self.fn_final_tol),
            ("fn_axis_units", self.fn_axis_units),
            ("venn_dp", self.venn_dp),
            ("dot_dp", self.dot_dp),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if self.angle_relax_margin_deg < 0.0 {
            return Err("angle_relax_margin_deg must not be negative".into());
        }
        if !(self.occupancy_off < self.occupancy_on && self.occupancy_on <= 1.0) {
            return Err("need occupancy_off < occupancy_on <= 1".into());
        }
        if !(0.0..=1.0).contains(&self.count_conf_thresh) {
            return Err("count_conf_thresh must lie in [0, 1]".into());
        }
        if !(self.fn_edge_low <= self.fn_edge_high) {
            return Err("fn_edge_low must not exceed fn_edge_high".into());
        }
        if !(self.dot_radius_min_frac < self.dot_radius_max_frac) {
            return Err("dot radius band is empty".into());
        }
        if self.fn_smooth_kernel % 2 == 0 {
            return Err("fn_smooth_kernel must be odd".into());
        }
        if !(0.0..=1.0).contains(&self.fn_min_inlier_frac) {
            return Err("fn_min_inlier_frac must lie in [0, 1]".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let c = ThresholdConfig::default();
        assert_eq!(c.validate(), Ok(()));
        assert_eq!(c.angle_tol_relaxed_deg(), 20.0);
        assert_eq!(c.line_min_len(1024), 122.88);
        assert_eq!(c.line_min_len(512), 80.0);
    }

    #[test]
    fn rejects_inverted_occupancy() {
        let c = ThresholdConfig { occupancy_off: 0.3, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn partial_json_takes_defaults() {
        let c: ThresholdConfig = serde_json::from_str(r#"{"angle_tol_deg": 15.0}"#).unwrap();
        assert_eq!(c.angle_tol_deg, 15.0);
        assert_eq!(c.hough_seed, 42);
        assert!(serde_json::from_str::<ThresholdConfig>(r#"{"nope": 1}"#).is_err());
    }
}

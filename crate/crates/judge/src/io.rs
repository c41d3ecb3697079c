use std::fs;
use std::path::Path;

use diagram_judge_core::verify::DetectionSet;
use diagram_judge_core::{Channels, ConstraintSpec, RasterImage};
use image::imageops::FilterType;
use serde::de::DeserializeOwned;

use crate::{JudgeError, Result};

/// Decodes a PNG or JPEG as RGB. Images whose longer side differs from
/// `eval_resolution` are rescaled (aspect kept) so pixel thresholds mean
/// the same thing for every input.
pub fn load_image(path: &Path, eval_resolution: u32) -> Result<RasterImage> {
    let bytes = fs::read(path).map_err(|source| JudgeError::Io { path: path.into(), source })?;
    let decoded = image::load_from_memory(&bytes)
        .map_err(|e| JudgeError::Decode { path: path.into(), msg: e.to_string() })?;
    let mut rgb = decoded.to_rgb8();
    let long = rgb.width().max(rgb.height());
    if eval_resolution > 0 && long != eval_resolution {
        let k = eval_resolution as f64 / long as f64;
        let w = ((rgb.width() as f64 * k).round() as u32).max(1);
        let h = ((rgb.height() as f64 * k).round() as u32).max(1);
        rgb = image::imageops::resize(&rgb, w, h, FilterType::Triangle);
    }
    let (w, h) = rgb.dimensions();
    RasterImage::new(w, h, Channels::Rgb, rgb.into_raw())
        .map_err(|e| JudgeError::Decode { path: path.into(), msg: e.to_string() })
}

pub fn save_png(path: &Path, img: &RasterImage) -> Result<()> {
    let buf = match img.channels() {
        Channels::Rgb => image::RgbImage::from_raw(img.width(), img.height(), img.data().to_vec())
            .map(image::DynamicImage::ImageRgb8),
        Channels::Gray => image::GrayImage::from_raw(img.width(), img.height(), img.data().to_vec())
            .map(image::DynamicImage::ImageLuma8),
    }
    .expect("buffer size checked by RasterImage");
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| JudgeError::Decode { path: path.into(), msg: e.to_string() })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| JudgeError::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|source| JudgeError::Json { path: path.into(), source })
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    fs::write(path, text + "\n").map_err(|source| JudgeError::Io { path: path.into(), source })
}

pub fn load_spec(path: &Path) -> Result<ConstraintSpec> {
    read_json(path)
}

pub fn load_detections(path: &Path) -> Result<DetectionSet> {
    read_json(path)
}

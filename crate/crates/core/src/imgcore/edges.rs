use alloc::vec;
use alloc::vec::Vec;

use super::{BinaryMask, RasterImage};

fn gaussian_kernel(sigma: f32) -> Vec<f32> {
    let half = libm::ceilf(3.0 * sigma).max(1.0) as usize;
    let mut k: Vec<f32> = (0..=2 * half)
        .map(|i| {
            let d = i as f32 - half as f32;
            libm::expf(-d * d / (2.0 * sigma * sigma))
        })
        .collect();
    let sum: f32 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= sum);
    k
}

/// Separable Gaussian blur with replicated borders.
pub fn gaussian_blur(values: &[f32], width: u32, height: u32, sigma: f32) -> Vec<f32> {
    let (w, h) = (width as usize, height as usize);
    let k = gaussian_kernel(sigma);
    let half = (k.len() / 2) as i64;
    let mut tmp = vec![0.0f32; w * h];
    for y in 0..h {
        let row = &values[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (i, kv) in k.iter().enumerate() {
                let sx = (x as i64 + i as i64 - half).clamp(0, w as i64 - 1) as usize;
                acc += kv * row[sx];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0f32; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, kv) in k.iter().enumerate() {
                let sy = (y as i64 + i as i64 - half).clamp(0, h as i64 - 1) as usize;
                acc += kv * tmp[sy * w + x];
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// 3×3 Sobel derivatives `(gx, gy)` with replicated borders.
pub fn sobel(values: &[f32], width: u32, height: u32) -> (Vec<f32>, Vec<f32>) {
    let (w, h) = (width as usize, height as usize);
    let at = |x: i64, y: i64| {
        let x = x.clamp(0, w as i64 - 1) as usize;
        let y = y.clamp(0, h as i64 - 1) as usize;
        values[y * w + x]
    };
    let mut gx = vec![0.0f32; w * h];
    let mut gy = vec![0.0f32; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w + x as usize;
            gx[i] = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            gy[i] = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
                - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
        }
    }
    (gx, gy)
}

pub(crate) fn luma_field(img: &RasterImage) -> Vec<f32> {
    let mut out = Vec::with_capacity(img.width() as usize * img.height() as usize);
    for y in 0..img.height() {
        for x in 0..img.width() {
            out.push(img.luma(x, y) as f32);
        }
    }
    out
}

/// Canny edge map: Gaussian smoothing (σ = 1.4), Sobel gradients with L1
/// magnitude, non-maximum suppression and hysteresis between `low` and `high`.
pub fn canny(gray: &RasterImage, low: f64, high: f64) -> BinaryMask {
    canny_field(&luma_field(gray), gray.width(), gray.height(), low as f32, high as f32)
}

pub(crate) fn canny_field(values: &[f32], width: u32, height: u32, low: f32, high: f32) -> BinaryMask {
    let (w, h) = (width as usize, height as usize);
    let smooth = gaussian_blur(values, width, height, 1.4);
    let (gx, gy) = sobel(&smooth, width, height);
    let mag: Vec<f32> = gx.iter().zip(&gy).map(|(a, b)| a.abs() + b.abs()).collect();

    // 0 = suppressed, 1 = weak, 2 = strong
    let mut class = vec![0u8; w * h];
    let tan22 = 0.414_213_56f32;
    for y in 1..h.saturating_sub(1) {
        for x in 1..w.saturating_sub(1) {
            let i = y * w + x;
            let m = mag[i];
            if m < low {
                continue;
            }
            let (ax, ay) = (gx[i].abs(), gy[i].abs());
            let (n1, n2) = if ay <= ax * tan22 {
                (mag[i - 1], mag[i + 1])
            } else if ax <= ay * tan22 {
                (mag[i - w], mag[i + w])
            } else if (gx[i] > 0.0) == (gy[i] > 0.0) {
                (mag[i - w - 1], mag[i + w + 1])
            } else {
                (mag[i - w + 1], mag[i + w - 1])
            };
            // strict on one side so plateaus keep a single-pixel ridge
            if m > n1 && m >= n2 {
                class[i] = if m >= high { 2 } else { 1 };
            }
        }
    }

    let mut edges = vec![false; w * h];
    let mut stack: Vec<usize> = class
        .iter()
        .enumerate()
        .filter(|(_, c)| **c == 2)
        .map(|(i, _)| i)
        .collect();
    for &i in &stack {
        edges[i] = true;
    }
    while let Some(i) = stack.pop() {
        let (x, y) = ((i % w) as i64, (i / w) as i64);
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let j = ny as usize * w + nx as usize;
                if class[j] == 1 && !edges[j] {
                    edges[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    BinaryMask::from_bits(width, height, edges).expect("dimensions preserved")
}

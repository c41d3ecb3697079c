use alloc::vec;
use alloc::vec::Vec;

use super::{BinaryMask, ImageError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphOp {
    /// Erosion then dilation; removes foreground specks.
    Open,
    /// Dilation then erosion; fills background specks.
    Close,
}

fn check_kernel(kx: u32, ky: u32) -> Result<(), ImageError> {
    if kx == 0 || ky == 0 || kx % 2 == 0 || ky % 2 == 0 {
        return Err(ImageError::InvalidKernel(kx, ky));
    }
    Ok(())
}

/// Opening or closing with a `kx × ky` rectangular structuring element.
pub fn morph(mask: &BinaryMask, op: MorphOp, (kx, ky): (u32, u32)) -> Result<BinaryMask, ImageError> {
    check_kernel(kx, ky)?;
    Ok(match op {
        MorphOp::Open => dilate_unchecked(&erode_unchecked(mask, kx, ky), kx, ky),
        MorphOp::Close => erode_unchecked(&dilate_unchecked(mask, kx, ky), kx, ky),
    })
}

/// Rectangular erosion. Pixels outside the image count as foreground, so the
/// image border does not eat into shapes touching it.
pub fn erode(mask: &BinaryMask, kx: u32, ky: u32) -> Result<BinaryMask, ImageError> {
    check_kernel(kx, ky)?;
    Ok(erode_unchecked(mask, kx, ky))
}

/// Rectangular dilation. Pixels outside the image count as background.
pub fn dilate(mask: &BinaryMask, kx: u32, ky: u32) -> Result<BinaryMask, ImageError> {
    check_kernel(kx, ky)?;
    Ok(dilate_unchecked(mask, kx, ky))
}

fn erode_unchecked(mask: &BinaryMask, kx: u32, ky: u32) -> BinaryMask {
    // erosion of a set is the complement of dilating its complement
    let inverted: Vec<bool> = mask.bits().iter().map(|b| !b).collect();
    let grown = separable_dilate(&inverted, mask.width(), mask.height(), kx, ky);
    BinaryMask::from_bits(mask.width(), mask.height(), grown.into_iter().map(|b| !b).collect())
        .expect("dimensions preserved")
}

fn dilate_unchecked(mask: &BinaryMask, kx: u32, ky: u32) -> BinaryMask {
    let grown = separable_dilate(mask.bits(), mask.width(), mask.height(), kx, ky);
    BinaryMask::from_bits(mask.width(), mask.height(), grown).expect("dimensions preserved")
}

fn separable_dilate(bits: &[bool], width: u32, height: u32, kx: u32, ky: u32) -> Vec<bool> {
    let (w, h) = (width as usize, height as usize);
    let mut rows = vec![false; bits.len()];
    for y in 0..h {
        dilate_line(&bits[y * w..(y + 1) * w], &mut rows[y * w..(y + 1) * w], kx as usize / 2);
    }
    let mut out = vec![false; bits.len()];
    let mut column = vec![false; h];
    let mut column_out = vec![false; h];
    for x in 0..w {
        for y in 0..h {
            column[y] = rows[y * w + x];
        }
        dilate_line(&column, &mut column_out, ky as usize / 2);
        for y in 0..h {
            out[y * w + x] = column_out[y];
        }
    }
    out
}

/// 1-D dilation with half-width `half` using a running count over the window.
fn dilate_line(src: &[bool], dst: &mut [bool], half: usize) {
    let n = src.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0usize);
    for &b in src {
        prefix.push(prefix.last().copied().unwrap_or(0) + b as usize);
    }
    for (i, d) in dst.iter_mut().enumerate() {
        let lo = i.saturating_sub(half);
        let hi = (i + half + 1).min(n);
        *d = prefix[hi] > prefix[lo];
    }
}

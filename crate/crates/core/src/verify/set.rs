use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use super::common::Context;
use super::{ColorName, Criterion, CriterionResult};
use crate::geom::{region_occupancy, venn_layout};
use crate::imgcore::hough_circles_gray;

pub(crate) fn judge(ctx: &Context, criterion: &Criterion) -> CriterionResult {
    let Criterion::VennRegions { expect_on, expect_off, n_circles } = criterion else {
        return CriterionResult::fail(criterion, "not a set criterion");
    };
    let cfg = ctx.cfg;
    let circles = hough_circles_gray(ctx.gray(), &cfg.venn_circle());
    if circles.len() != *n_circles as usize {
        return CriterionResult::fail(criterion, format!("circle count {} ≠ {n_circles}", circles.len()));
    }
    let layout = match venn_layout(&circles, ctx.width(), ctx.height()) {
        Ok(l) => l,
        Err(e) => return CriterionResult::fail(criterion, format!("{e}")),
    };
    let readings = match region_occupancy(&layout, &ctx.color_mask(ColorName::Red)) {
        Ok(r) => r,
        Err(e) => return CriterionResult::fail(criterion, format!("{e}")),
    };
    let mut passed = true;
    let mut diag = String::new();
    // the deciding value is the weakest margin over all gated regions
    let mut margin = f64::INFINITY;
    for r in &readings {
        let on = expect_on.contains(&r.region);
        let off = expect_off.contains(&r.region);
        if !(on || off) {
            continue;
        }
        let ok = if on { r.fraction > cfg.occupancy_on } else { r.fraction < cfg.occupancy_off };
        margin = margin.min(if on { r.fraction - cfg.occupancy_on } else { cfg.occupancy_off - r.fraction });
        passed &= ok;
        let _ = write!(
            diag,
            "{}{}={:.3}{}",
            if diag.is_empty() { "" } else { ", " },
            r.region,
            r.fraction,
            if r.empty_region { " (empty region)" } else if ok { "" } else { " ✗" }
        );
    }
    CriterionResult::new(criterion, passed, margin.is_finite().then_some(margin), diag)
}

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::lsq::solve_least_squares;
use super::relation::Family;

/// Samples per side when searching the horizontal tolerance window.
const WINDOW_STEPS: usize = 8;
/// Points beyond this count are thinned (deterministically) while scoring
/// hypotheses; the final refit uses every point.
const SCORING_POINTS: usize = 1500;
/// The refit trim never drops below `tol_y / TRIM_FLOOR_DIV`.
const TRIM_FLOOR_DIV: f64 = 8.0;

/// A fitted curve.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveModel {
    /// Coefficients in ascending powers.
    Polynomial(Vec<f64>),
    Abs { vertex: f64, coeffs: [f64; 3] },
    /// `(c·x + d) / (x − pole)`.
    Reciprocal { c: f64, d: f64, pole: f64 },
    /// `[intercept, slope]` per piece; pieces without data are NaN.
    Piecewise { breaks: Vec<f64>, lines: Vec<[f64; 2]> },
}

impl CurveModel {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            CurveModel::Polynomial(c) => c.iter().rev().fold(0.0, |acc, k| acc * x + k),
            CurveModel::Abs { vertex, coeffs } => coeffs[0] + coeffs[1] * x + coeffs[2] * libm::fabs(x - vertex),
            CurveModel::Reciprocal { c, d, pole } => (c * x + d) / (x - pole),
            CurveModel::Piecewise { breaks, lines } => {
                let i = breaks.iter().position(|b| x < *b).unwrap_or(breaks.len());
                lines[i][0] + lines[i][1] * x
            }
        }
    }

    pub fn pole(&self) -> Option<f64> {
        match self {
            CurveModel::Reciprocal { pole, .. } => Some(*pole),
            _ => None,
        }
    }

    /// Breakpoints where a piecewise model may jump.
    fn breaks(&self) -> &[f64] {
        match self {
            CurveModel::Piecewise { breaks, .. } => breaks,
            _ => &[],
        }
    }
}

/// Smallest vertical distance from `(x, y)` to `f` over the window
/// `[x − tol_x, x + tol_x]`; zero when the curve crosses the height `y`
/// inside the window. Sign changes across `jumps` are not crossings.
pub fn box_residual(f: &dyn Fn(f64) -> f64, jumps: &[f64], x: f64, y: f64, tol_x: f64) -> f64 {
    let mut best = f64::INFINITY;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=2 * WINDOW_STEPS {
        let xs = x - tol_x + tol_x * k as f64 / WINDOW_STEPS as f64;
        let d = f(xs) - y;
        if !d.is_finite() {
            prev = None;
            continue;
        }
        best = best.min(libm::fabs(d));
        if let Some((xp, dp)) = prev {
            if dp * d <= 0.0 && !jumps.iter().any(|j| *j >= xp && *j <= xs) {
                return 0.0;
            }
        }
        prev = Some((xs, d));
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveFit {
    pub model: CurveModel,
    /// Indices into the input points.
    pub inliers: Vec<usize>,
    pub inlier_fraction: f64,
}

/// Inlier bounds in math units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RansacParams {
    pub iterations: u32,
    pub tol_x: f64,
    pub tol_y: f64,
    pub seed: u64,
}

/// First-order distance from a point to the curve: vertical residual over
/// the local arc-length factor.
fn orthogonal_distance(m: &CurveModel, (x, y): (f64, f64)) -> f64 {
    const H: f64 = 1e-4;
    let slope = (m.eval(x + H) - m.eval(x - H)) / (2.0 * H);
    libm::fabs(m.eval(x) - y) / libm::sqrt(1.0 + slope * slope)
}

fn is_inlier(m: &CurveModel, jumps: &[f64], (x, y): (f64, f64), p: &RansacParams) -> bool {
    let v = m.eval(x);
    if v.is_finite() && libm::fabs(v - y) <= p.tol_y {
        return true;
    }
    box_residual(&|t| m.eval(t), jumps, x, y, p.tol_x) <= p.tol_y
}

/// Exact or least-squares fit of one non-piecewise family to `pts`.
fn fit(family: &Family, pts: &[(f64, f64)]) -> Option<CurveModel> {
    let model = match family {
        Family::Polynomial { degree } => {
            let rows: Vec<Vec<f64>> = pts
                .iter()
                .map(|(x, _)| (0..=*degree).scan(1.0, |acc, _| {
                    let v = *acc;
                    *acc *= x;
                    Some(v)
                }).collect())
                .collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
            CurveModel::Polynomial(solve_least_squares(&rows, &ys)?)
        }
        Family::Abs { vertex } => {
            let rows: Vec<Vec<f64>> = pts.iter().map(|(x, _)| vec![1.0, *x, libm::fabs(x - vertex)]).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let c = solve_least_squares(&rows, &ys)?;
            CurveModel::Abs { vertex: *vertex, coeffs: [c[0], c[1], c[2]] }
        }
        Family::Reciprocal { .. } => {
            // x·y = c·x + d + h·y is linear in (c, d, h)
            let rows: Vec<Vec<f64>> = pts.iter().map(|(x, y)| vec![*x, 1.0, *y]).collect();
            let ys: Vec<f64> = pts.iter().map(|(x, y)| x * y).collect();
            let c = solve_least_squares(&rows, &ys)?;
            CurveModel::Reciprocal { c: c[0], d: c[1], pole: c[2] }
        }
        Family::Piecewise { .. } => return None,
    };
    Some(model)
}

fn sample_size(family: &Family) -> usize {
    match family {
        Family::Polynomial { degree } => degree + 1,
        Family::Abs { .. } | Family::Reciprocal { .. } => 3,
        Family::Piecewise { .. } => 2,
    }
}

fn inliers_of(m: &CurveModel, pts: &[(f64, f64)], p: &RansacParams) -> Vec<usize> {
    let jumps: Vec<f64> = m.pole().into_iter().chain(m.breaks().iter().copied()).collect();
    (0..pts.len()).filter(|&i| is_inlier(m, &jumps, pts[i], p)).collect()
}

fn ransac_single(family: &Family, pts: &[(f64, f64)], p: &RansacParams, rng: &mut ChaCha8Rng) -> Option<CurveFit> {
    let k = sample_size(family);
    if pts.len() < k {
        return None;
    }
    let stride = pts.len().div_ceil(SCORING_POINTS);
    let scoring: Vec<(f64, f64)> = pts.iter().step_by(stride).copied().collect();
    let mut best: Option<(usize, CurveModel)> = None;
    for _ in 0..p.iterations {
        let idx = rand::seq::index::sample(rng, pts.len(), k);
        let sample: Vec<(f64, f64)> = idx.iter().map(|i| pts[i]).collect();
        let Some(m) = fit(family, &sample) else { continue };
        let score = inliers_of(&m, &scoring, p).len();
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, m));
        }
    }
    let (_, mut model) = best?;
    let mut inliers = inliers_of(&model, pts, p);
    // Refit on the consensus set, trimmed to points close to the curve in the
    // orthogonal sense: the box test is wide on steep curves and would let
    // clutter steer the least-squares fit.
    for _ in 0..3 {
        let mut dist: Vec<(usize, f64)> = inliers.iter().map(|&i| (i, orthogonal_distance(&model, pts[i]))).collect();
        let mut sorted: Vec<f64> = dist.iter().map(|d| d.1).filter(|d| d.is_finite()).collect();
        if sorted.len() < k {
            break;
        }
        sorted.sort_by(f64::total_cmp);
        let trim = (3.0 * sorted[sorted.len() / 2]).max(p.tol_y / TRIM_FLOOR_DIV);
        dist.retain(|d| d.1 <= trim);
        let chosen: Vec<(f64, f64)> = dist.iter().map(|d| pts[d.0]).collect();
        let Some(refit) = fit(family, &chosen) else { break };
        let grown = inliers_of(&refit, pts, p);
        if grown.len() * 2 < inliers.len() {
            break;
        }
        let done = refit == model;
        model = refit;
        inliers = grown;
        if done {
            break;
        }
    }
    let inlier_fraction = inliers.len() as f64 / pts.len() as f64;
    Some(CurveFit { model, inliers, inlier_fraction })
}

/// Seeded RANSAC over `points` for the given family, followed by a
/// least-squares refit on the consensus set. Piecewise families are fitted
/// one line per interval.
pub fn ransac_fit(points: &[(f64, f64)], family: &Family, params: &RansacParams) -> Option<CurveFit> {
    if points.is_empty() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let Family::Piecewise { breaks } = family else {
        return ransac_single(family, points, params, &mut rng);
    };
    let line = Family::Polynomial { degree: 1 };
    let mut lines = Vec::with_capacity(breaks.len() + 1);
    let mut inliers = Vec::new();
    for piece in 0..=breaks.len() {
        let lo = if piece == 0 { f64::NEG_INFINITY } else { breaks[piece - 1] };
        let hi = breaks.get(piece).copied().unwrap_or(f64::INFINITY);
        let idx: Vec<usize> = (0..points.len()).filter(|&i| points[i].0 >= lo && points[i].0 < hi).collect();
        let sub: Vec<(f64, f64)> = idx.iter().map(|&i| points[i]).collect();
        match ransac_single(&line, &sub, params, &mut rng) {
            Some(CurveFit { model: CurveModel::Polynomial(c), inliers: local, .. }) => {
                lines.push([c[0], c[1]]);
                inliers.extend(local.into_iter().map(|j| idx[j]));
            }
            _ => lines.push([f64::NAN, f64::NAN]),
        }
    }
    inliers.sort_unstable();
    let inlier_fraction = inliers.len() as f64 / points.len() as f64;
    Some(CurveFit { model: CurveModel::Piecewise { breaks: breaks.clone(), lines }, inliers, inlier_fraction })
}

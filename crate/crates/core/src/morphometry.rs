//! Shape descriptors of an isolated cell mask.
//!
//! All distances are Euclidean, in pixels, measured between pixel centres.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::segmentation::{label_components, BinaryMask, Connectivity};

/// Angular step of the chord sweep, degrees.
pub const CHORD_ANGLE_STEP_DEG: usize = 1;
/// Radial sampling step along each chord, pixels.
pub const CHORD_SAMPLE_STEP: f64 = 0.5;
/// Hull deficiency above which a mask is reported non-convex.
pub const CONVEXITY_TOLERANCE: f64 = 0.08;
/// Complement regions smaller than this are boundary staircase slivers, not concavities.
pub const MIN_CONCAVITY_COMPONENT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorphometryError {
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("perimeter is zero")]
    ZeroPerimeter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorphometricFeatures {
    pub area: usize,
    pub perimeter: usize,
    pub compactness: f64,
    pub major_axis: f64,
    pub minor_axis: f64,
    pub axis_spacing: f64,
    /// 1 when the mask is non-convex, else 0.
    pub varconvex: u8,
    /// Concavity component count; only meaningful for non-convex cells.
    pub ncc: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Barycenter {
    pub cx: f64,
    pub cy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axes {
    pub major_axis: f64,
    pub minor_axis: f64,
    pub axis_spacing: f64,
}

/// Every descriptor for one cell.
pub fn compute_morphometry(cell: &BinaryMask) -> Result<MorphometricFeatures, MorphometryError> {
    let area = compute_area(cell);
    let perimeter = compute_perimeter(cell)?;
    let compactness = compute_compactness(area, perimeter)?;
    let bc = compute_barycenter(cell)?;
    let axes = compute_axes(cell, bc)?;
    let varconvex = compute_convexity(cell)?;
    let ncc = concavity_components(cell, bc)?;
    Ok(MorphometricFeatures {
        area,
        perimeter,
        compactness,
        major_axis: axes.major_axis,
        minor_axis: axes.minor_axis,
        axis_spacing: axes.axis_spacing,
        varconvex: u8::from(varconvex),
        ncc,
    })
}

pub fn compute_area(cell: &BinaryMask) -> usize {
    cell.count()
}

/// Foreground pixels with at least one 4-neighbour that is background or off-grid.
pub fn compute_perimeter(cell: &BinaryMask) -> Result<usize, MorphometryError> {
    if cell.is_empty() {
        return Err(MorphometryError::EmptyMask);
    }
    Ok(boundary_pixels(cell).count())
}

pub(crate) fn boundary_pixels(cell: &BinaryMask) -> impl Iterator<Item = (usize, usize)> + '_ {
    cell.foreground().filter(|&(x, y)| {
        let (x, y) = (x as i64, y as i64);
        [(0, -1), (-1, 0), (1, 0), (0, 1)]
            .iter()
            .any(|&(dx, dy)| !cell.get_signed(x + dx, y + dy))
    })
}

/// `4π·area / perimeter²`.
pub fn compute_compactness(area: usize, perimeter: usize) -> Result<f64, MorphometryError> {
    if perimeter == 0 {
        return Err(MorphometryError::ZeroPerimeter);
    }
    let p = perimeter as f64;
    Ok(4.0 * std::f64::consts::PI * area as f64 / (p * p))
}

pub fn compute_barycenter(cell: &BinaryMask) -> Result<Barycenter, MorphometryError> {
    let (mut sx, mut sy, mut n) = (0u64, 0u64, 0u64);
    for (x, y) in cell.foreground() {
        sx += x as u64;
        sy += y as u64;
        n += 1;
    }
    if n == 0 {
        return Err(MorphometryError::EmptyMask);
    }
    Ok(Barycenter { cx: sx as f64 / n as f64, cy: sy as f64 / n as f64 })
}

/// Major and minor semi-axes from chords through the barycentre.
///
/// For each direction in `[0°, 180°)` at 1° steps, the line through `bc` is
/// sampled every half pixel and the samples landing on foreground pixels are
/// counted, giving the chord length. Each axis is half a chord: the largest
/// chord gives the major axis and the smallest the minor one.
pub fn compute_axes(cell: &BinaryMask, bc: Barycenter) -> Result<Axes, MorphometryError> {
    if cell.is_empty() {
        return Err(MorphometryError::EmptyMask);
    }
    let reach = ((cell.width() as f64).hypot(cell.height() as f64) / CHORD_SAMPLE_STEP).ceil() as i64 + 2;
    let mut longest = f64::MIN;
    let mut shortest = f64::MAX;
    for deg in (0..180).step_by(CHORD_ANGLE_STEP_DEG) {
        let (sin, cos) = (deg as f64).to_radians().sin_cos();
        let hits = (-reach..=reach)
            .filter(|&k| {
                let t = k as f64 * CHORD_SAMPLE_STEP;
                let x = (bc.cx + t * cos).round() as i64;
                let y = (bc.cy + t * sin).round() as i64;
                cell.get_signed(x, y)
            })
            .count();
        let chord = hits as f64 * CHORD_SAMPLE_STEP;
        longest = longest.max(chord);
        shortest = shortest.min(chord);
    }
    let (major_axis, minor_axis) = (longest / 2.0, shortest / 2.0);
    Ok(Axes { major_axis, minor_axis, axis_spacing: major_axis - minor_axis })
}

/// Convex hull of the foreground pixel centres, counter-clockwise, no collinear points.
pub fn convex_hull(cell: &BinaryMask) -> Vec<(i64, i64)> {
    // only the extreme pixels of each row can be hull vertices
    let mut points = Vec::new();
    for y in 0..cell.height() {
        let row = (0..cell.width()).filter(|&x| cell.get(x, y));
        let (mut first, mut last) = (None, None);
        for x in row {
            first.get_or_insert(x);
            last = Some(x);
        }
        if let (Some(a), Some(b)) = (first, last) {
            points.push((a as i64, y as i64));
            if b != a {
                points.push((b as i64, y as i64));
            }
        }
    }
    points.sort_unstable();
    points.dedup();
    if points.len() < 3 {
        return points;
    }
    let cross = |o: (i64, i64), a: (i64, i64), b: (i64, i64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(i64, i64)> = Vec::with_capacity(points.len() * 2);
    for pass in [points.clone(), points.iter().rev().copied().collect()] {
        let base = hull.len();
        for p in pass {
            while hull.len() >= base + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Lattice points inside or on the convex hull of the foreground.
pub fn filled_hull_area(cell: &BinaryMask) -> usize {
    let hull = convex_hull(cell);
    match hull.len() {
        0 => 0,
        1 => 1,
        2 => {
            let (dx, dy) = (hull[1].0 - hull[0].0, hull[1].1 - hull[0].1);
            gcd(dx.unsigned_abs(), dy.unsigned_abs()) as usize + 1
        }
        _ => {
            let (min_x, max_x) = min_max(hull.iter().map(|p| p.0));
            let (min_y, max_y) = min_max(hull.iter().map(|p| p.1));
            let edges: Vec<_> = hull.iter().zip(hull.iter().cycle().skip(1)).collect();
            let mut count = 0;
            for y in min_y..=max_y {
                for x in min_x..=max_x {
                    let inside = edges.iter().all(|(a, b)| {
                        (b.0 - a.0) * (y - a.1) - (b.1 - a.1) * (x - a.0) >= 0
                    });
                    count += usize::from(inside);
                }
            }
            count
        }
    }
}

fn min_max(values: impl Iterator<Item = i64>) -> (i64, i64) {
    values.fold((i64::MAX, i64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// `(hull_area - area) / hull_area`.
pub fn hull_deficiency(cell: &BinaryMask) -> Result<f64, MorphometryError> {
    let area = cell.count();
    if area == 0 {
        return Err(MorphometryError::EmptyMask);
    }
    let hull = filled_hull_area(cell).max(area);
    Ok((hull - area) as f64 / hull as f64)
}

/// True when the mask is non-convex at [`CONVEXITY_TOLERANCE`].
pub fn compute_convexity(cell: &BinaryMask) -> Result<bool, MorphometryError> {
    Ok(hull_deficiency(cell)? > CONVEXITY_TOLERANCE)
}

/// Square window centred on the barycentre whose corners lie at the distance
/// of the farthest foreground pixel. Returns `(x0, y0, x1, y1)`, inclusive,
/// possibly extending past the grid.
pub fn concavity_window(cell: &BinaryMask, bc: Barycenter) -> Result<(i64, i64, i64, i64), MorphometryError> {
    let farthest = cell
        .foreground()
        .map(|(x, y)| (x as f64 - bc.cx).hypot(y as f64 - bc.cy))
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.max(d))))
        .ok_or(MorphometryError::EmptyMask)?;
    let half = farthest / std::f64::consts::SQRT_2;
    Ok((
        (bc.cx - half).ceil() as i64,
        (bc.cy - half).ceil() as i64,
        (bc.cx + half).floor() as i64,
        (bc.cy + half).floor() as i64,
    ))
}

/// Counts the 8-connected regions of the window minus the cell that reach
/// [`MIN_CONCAVITY_COMPONENT`] pixels.
///
/// The cell's protrusions reach past the window edge and cut the complement
/// apart: a crescent leaves its hollow and its back as two regions, a spiked
/// cell leaves one region per gap between spikes.
pub fn concavity_components(cell: &BinaryMask, bc: Barycenter) -> Result<u32, MorphometryError> {
    let complement = window_complement(cell, bc)?;
    let labels = label_components(&complement, Connectivity::Eight);
    Ok(labels.component_sizes()[1..]
        .iter()
        .filter(|&&s| s >= MIN_CONCAVITY_COMPONENT)
        .count() as u32)
}

/// The window minus the cell, in window-local coordinates.
pub fn window_complement(cell: &BinaryMask, bc: Barycenter) -> Result<BinaryMask, MorphometryError> {
    let (x0, y0, x1, y1) = concavity_window(cell, bc)?;
    let (w, h) = ((x1 - x0 + 1).max(0) as usize, (y1 - y0 + 1).max(0) as usize);
    Ok(BinaryMask::from_fn(w, h, |x, y| !cell.get_signed(x0 + x as i64, y0 + y as i64)))
}

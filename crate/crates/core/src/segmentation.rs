//! Otsu thresholding, connected-component labeling and target-cell isolation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::GrayImage;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SegmentationError {
    #[error("image has no pixels")]
    EmptyImage,
    #[error("all pixels share one gray level; no threshold separates them")]
    NoSeparation,
    #[error("no connected component of at least {min_area} pixels found")]
    NoCellFound { min_area: usize },
    #[error("mask has no foreground pixels")]
    EmptyMask,
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
}

/// 256-bin gray-level histogram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayHistogram {
    counts: [u64; 256],
    total: u64,
}

impl GrayHistogram {
    pub fn from_values(values: impl IntoIterator<Item = u8>) -> Result<Self, SegmentationError> {
        let mut counts = [0u64; 256];
        let mut total = 0u64;
        for v in values {
            counts[v as usize] += 1;
            total += 1;
        }
        if total == 0 {
            return Err(SegmentationError::EmptyImage);
        }
        Ok(GrayHistogram { counts, total })
    }

    pub fn from_counts(counts: [u64; 256]) -> Result<Self, SegmentationError> {
        let total = counts.iter().sum();
        if total == 0 {
            return Err(SegmentationError::EmptyImage);
        }
        Ok(GrayHistogram { counts, total })
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn occupied_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

pub fn gray_histogram(img: &GrayImage) -> Result<GrayHistogram, SegmentationError> {
    GrayHistogram::from_values(img.values().iter().copied())
}

/// Class statistics at the selected Otsu threshold. Class 1 holds gray levels `<= threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OtsuStats {
    pub threshold: u8,
    pub p1: f64,
    pub p2: f64,
    pub mu1: f64,
    pub mu2: f64,
    /// Probability-weighted sum of the two class variances.
    pub var_within: f64,
    pub var_between: f64,
}

/// Threshold maximizing the between-class variance `p1*p2*(mu1-mu2)^2`.
///
/// Candidates are `0..=254`; equal maxima resolve to the smallest threshold.
pub fn otsu_threshold(hist: &GrayHistogram) -> Result<OtsuStats, SegmentationError> {
    if hist.occupied_bins() < 2 {
        return Err(SegmentationError::NoSeparation);
    }
    let total = hist.total;
    let weighted_total: u64 = hist.counts.iter().enumerate().map(|(v, &c)| v as u64 * c).sum();

    let mut best: Option<(u8, f64)> = None;
    let mut n1 = 0u64;
    let mut s1 = 0u64;
    for t in 0..255usize {
        n1 += hist.counts[t];
        s1 += t as u64 * hist.counts[t];
        let n2 = total - n1;
        if n1 == 0 || n2 == 0 {
            continue;
        }
        let between = between_class_variance(n1, s1, n2, weighted_total - s1, total);
        if best.is_none_or(|(_, b)| between > b) {
            best = Some((t as u8, between));
        }
    }
    // two occupied bins guarantee at least one split with both classes nonempty
    let (threshold, _) = best.expect("histogram with two occupied bins has a split");
    Ok(stats_at(hist, threshold))
}

fn between_class_variance(n1: u64, s1: u64, n2: u64, s2: u64, total: u64) -> f64 {
    let p1 = n1 as f64 / total as f64;
    let p2 = n2 as f64 / total as f64;
    let mu1 = s1 as f64 / n1 as f64;
    let mu2 = s2 as f64 / n2 as f64;
    p1 * p2 * (mu1 - mu2) * (mu1 - mu2)
}

fn stats_at(hist: &GrayHistogram, threshold: u8) -> OtsuStats {
    let t = threshold as usize;
    let moments = |range: std::ops::Range<usize>| {
        let (mut n, mut s, mut s2) = (0f64, 0f64, 0f64);
        for v in range {
            let c = hist.counts[v] as f64;
            n += c;
            s += v as f64 * c;
            s2 += (v * v) as f64 * c;
        }
        let mean = s / n;
        (n, mean, s2 / n - mean * mean)
    };
    let (n1, mu1, var1) = moments(0..t + 1);
    let (n2, mu2, var2) = moments(t + 1..256);
    let total = hist.total as f64;
    let (p1, p2) = (n1 / total, n2 / total);
    OtsuStats {
        threshold,
        p1,
        p2,
        mu1,
        mu2,
        var_within: p1 * var1 + p2 * var2,
        var_between: p1 * p2 * (mu1 - mu2) * (mu1 - mu2),
    }
}

/// Which side of the threshold becomes foreground.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    /// Values `<= t` are foreground. Stained cells are darker than the smear background.
    DarkIsForeground,
    LightIsForeground,
}

/// Row-major boolean grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        BinaryMask { width, height, bits: vec![false; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        BinaryMask { width, height, bits }
    }

    /// Builds a mask from rows of `#` (foreground) and `.` (background).
    pub fn from_ascii(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        BinaryMask::from_fn(width, height, |x, y| rows[y].as_bytes()[x] == b'#')
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Out-of-bounds coordinates read as background.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && (x as usize) < self.width
            && (y as usize) < self.height
            && self.bits[y as usize * self.width + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// Foreground coordinates in raster order.
    pub fn foreground(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i % w, i / w))
    }

    pub fn same_shape(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    fn zip_with(&self, other: &BinaryMask, f: impl Fn(bool, bool) -> bool) -> BinaryMask {
        assert!(self.same_shape(other), "mask dimensions differ");
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn union(&self, other: &BinaryMask) -> BinaryMask {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &BinaryMask) -> BinaryMask {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn invert(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|&b| !b).collect(),
        }
    }
}

pub fn binarize(img: &GrayImage, threshold: u8, polarity: Polarity) -> BinaryMask {
    let bits = img
        .values()
        .iter()
        .map(|&v| match polarity {
            Polarity::DarkIsForeground => v <= threshold,
            Polarity::LightIsForeground => v > threshold,
        })
        .collect();
    BinaryMask { width: img.width(), height: img.height(), bits }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(i64, i64)] {
        const FOUR: [(i64, i64); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
        const EIGHT: [(i64, i64); 8] =
            [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

/// Component labels; 0 is background, components are numbered `1..=n` in
/// order of their first pixel in raster order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    /// `component_sizes[k]` is the pixel count of label `k` (index 0 counts background).
    component_sizes: Vec<usize>,
}

impl LabelMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn component_count(&self) -> usize {
        self.component_sizes.len() - 1
    }

    pub fn component_sizes(&self) -> &[usize] {
        &self.component_sizes
    }

    pub fn size_of(&self, label: u32) -> usize {
        self.component_sizes[label as usize]
    }

    pub fn mask_of(&self, label: u32) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.labels.iter().map(|&l| l == label).collect(),
        }
    }

    /// Per-label flag: does the component have a pixel on the grid border.
    pub fn touches_border(&self) -> Vec<bool> {
        let mut flags = vec![false; self.component_sizes.len()];
        let (w, h) = (self.width, self.height);
        let mut mark = |x: usize, y: usize| flags[self.labels[y * w + x] as usize] = true;
        for x in 0..w {
            mark(x, 0);
            mark(x, h - 1);
        }
        for y in 0..h {
            mark(0, y);
            mark(w - 1, y);
        }
        flags[0] = false;
        flags
    }
}

pub fn label_components(mask: &BinaryMask, connectivity: Connectivity) -> LabelMap {
    let (w, h) = (mask.width, mask.height);
    let mut labels = vec![0u32; w * h];
    let mut sizes = vec![mask.bits.len() - mask.count()];
    let mut stack = Vec::new();
    for start in 0..w * h {
        if !mask.bits[start] || labels[start] != 0 {
            continue;
        }
        let label = sizes.len() as u32;
        let mut size = 0usize;
        labels[start] = label;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            size += 1;
            let (x, y) = ((idx % w) as i64, (idx / w) as i64);
            for &(dx, dy) in connectivity.offsets() {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let n = ny as usize * w + nx as usize;
                if mask.bits[n] && labels[n] == 0 {
                    labels[n] = label;
                    stack.push(n);
                }
            }
        }
        sizes.push(size);
    }
    LabelMap { width: w, height: h, labels, component_sizes: sizes }
}

/// Labels maximal 8-connected foreground regions.
pub fn label_components_8(mask: &BinaryMask) -> LabelMap {
    label_components(mask, Connectivity::Eight)
}

/// Picks the target cell among labeled components.
///
/// Only components of at least `min_area` pixels qualify. Components touching
/// the grid border are dropped when an interior candidate exists. Among the
/// remaining candidates the one containing `center` wins, otherwise the
/// largest (lowest label on ties).
pub fn isolate_target_cell(
    labels: &LabelMap,
    center: (usize, usize),
    min_area: usize,
) -> Result<BinaryMask, SegmentationError> {
    let on_border = labels.touches_border();
    let candidates: Vec<u32> = (1..=labels.component_count() as u32)
        .filter(|&l| labels.size_of(l) >= min_area)
        .collect();
    if candidates.is_empty() {
        return Err(SegmentationError::NoCellFound { min_area });
    }
    let interior: Vec<u32> =
        candidates.iter().copied().filter(|&l| !on_border[l as usize]).collect();
    let pool = if interior.is_empty() { candidates } else { interior };

    let (cx, cy) = center;
    let at_center = (cx < labels.width && cy < labels.height).then(|| labels.get(cx, cy));
    let chosen = match at_center {
        Some(l) if pool.contains(&l) => l,
        _ => *pool
            .iter()
            .max_by(|&&a, &&b| labels.size_of(a).cmp(&labels.size_of(b)).then(b.cmp(&a)))
            .expect("pool is nonempty"),
    };
    Ok(labels.mask_of(chosen))
}

/// Fills background regions not 4-connected to the grid border.
///
/// Background uses 4-connectivity as the dual of 8-connected foreground, so a
/// closed 8-connected ring encloses its interior.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    let background = label_components(&mask.invert(), Connectivity::Four);
    let open = background.touches_border();
    BinaryMask {
        width: mask.width,
        height: mask.height,
        bits: mask
            .bits
            .iter()
            .zip(&background.labels)
            .map(|(&fg, &l)| fg || !open[l as usize])
            .collect(),
    }
}

/// Two-class split of an isolated cell into haemoglobin (red) and central pallor (white).
#[derive(Debug, Clone, PartialEq)]
pub struct CellPartition {
    pub cell_mask: BinaryMask,
    /// Darker class.
    pub red_mask: BinaryMask,
    /// Lighter class.
    pub white_mask: BinaryMask,
    /// Otsu threshold over the cell's own pixels; `None` for a uniform cell.
    pub threshold: Option<u8>,
    /// Set when every cell pixel shares one gray level; the whole cell is then red.
    pub uniform: bool,
}

impl CellPartition {
    pub fn red_count(&self) -> usize {
        self.red_mask.count()
    }

    pub fn white_count(&self) -> usize {
        self.white_mask.count()
    }
}

/// Runs Otsu over the cell's pixel population only and splits it in two.
pub fn partition_cell_colors(
    gray: &GrayImage,
    cell: &BinaryMask,
) -> Result<CellPartition, SegmentationError> {
    if gray.width() != cell.width || gray.height() != cell.height {
        return Err(SegmentationError::DimensionMismatch(
            gray.width(),
            gray.height(),
            cell.width,
            cell.height,
        ));
    }
    let hist = GrayHistogram::from_values(cell.foreground().map(|(x, y)| gray.get(x, y)))
        .map_err(|_| SegmentationError::EmptyMask)?;
    match otsu_threshold(&hist) {
        Ok(stats) => {
            let dark = binarize(gray, stats.threshold, Polarity::DarkIsForeground);
            let red_mask = cell.intersection(&dark);
            let white_mask = cell.intersection(&dark.invert());
            Ok(CellPartition {
                cell_mask: cell.clone(),
                red_mask,
                white_mask,
                threshold: Some(stats.threshold),
                uniform: false,
            })
        }
        Err(SegmentationError::NoSeparation) => Ok(CellPartition {
            cell_mask: cell.clone(),
            red_mask: cell.clone(),
            white_mask: BinaryMask::new(cell.width, cell.height),
            threshold: None,
            uniform: true,
        }),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hist_with(pairs: &[(usize, u64)]) -> GrayHistogram {
        let mut counts = [0u64; 256];
        for &(v, c) in pairs {
            counts[v] = c;
        }
        GrayHistogram::from_counts(counts).unwrap()
    }

    #[test]
    fn histogram_examples() {
        let img = GrayImage::new(2, 2, vec![7; 4]).unwrap();
        let h = gray_histogram(&img).unwrap();
        assert_eq!((h.counts()[7], h.total()), (4, 4));

        let img = GrayImage::new(2, 1, vec![0, 255]).unwrap();
        let h = gray_histogram(&img).unwrap();
        assert_eq!((h.counts()[0], h.counts()[255]), (1, 1));

        assert_eq!(GrayHistogram::from_values([]), Err(SegmentationError::EmptyImage));
    }

    #[test]
    fn two_delta_peaks_pick_the_lower_tie() {
        let stats = otsu_threshold(&hist_with(&[(50, 100), (200, 100)])).unwrap();
        assert_eq!(stats.threshold, 50);
        assert!((stats.p1 - 0.5).abs() < 1e-12);
        assert!((stats.mu1 - 50.0).abs() < 1e-12 && (stats.mu2 - 200.0).abs() < 1e-12);
        assert!(stats.var_within.abs() < 1e-9);
    }

    #[test]
    fn single_bin_has_no_separation() {
        assert_eq!(
            otsu_threshold(&hist_with(&[(90, 12)])),
            Err(SegmentationError::NoSeparation)
        );
    }

    #[test]
    fn binarize_examples() {
        let zeros = GrayImage::new(3, 3, vec![0; 9]).unwrap();
        assert_eq!(binarize(&zeros, 100, Polarity::DarkIsForeground).count(), 9);
        let white = GrayImage::new(3, 3, vec![255; 9]).unwrap();
        assert_eq!(binarize(&white, 100, Polarity::DarkIsForeground).count(), 0);
        assert_eq!(binarize(&white, 100, Polarity::LightIsForeground).count(), 9);

        let checker: Vec<u8> = (0..16).map(|i| if (i % 4 + i / 4) % 2 == 0 { 0 } else { 255 }).collect();
        let img = GrayImage::new(4, 4, checker.clone()).unwrap();
        let mask = binarize(&img, 100, Polarity::DarkIsForeground);
        for (i, &v) in checker.iter().enumerate() {
            assert_eq!(mask.bits()[i], v == 0);
        }
    }

    #[test]
    fn labeling_small_cases() {
        let empty = BinaryMask::new(5, 5);
        assert_eq!(label_components_8(&empty).component_count(), 0);

        let diag = BinaryMask::from_ascii(&["#.", ".#"]);
        assert_eq!(label_components_8(&diag).component_count(), 1);
        assert_eq!(label_components(&diag, Connectivity::Four).component_count(), 2);

        let m = BinaryMask::from_ascii(&["..#", "#..", "#.#"]);
        let lm = label_components_8(&m);
        assert_eq!(lm.component_count(), 3);
        // raster first-encounter order
        assert_eq!(lm.get(2, 0), 1);
        assert_eq!(lm.get(0, 1), 2);
        assert_eq!(lm.get(2, 2), 3);
        assert_eq!(lm.component_sizes(), &[5, 1, 2, 1]);
    }

    fn disk(w: usize, h: usize, cx: f64, cy: f64, r: f64) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            let (dx, dy) = (x as f64 - cx, y as f64 - cy);
            dx * dx + dy * dy <= r * r
        })
    }

    #[test]
    fn isolation_prefers_big_blob_over_speckle() {
        let blob = disk(100, 100, 50.0, 50.0, 35.7);
        assert!((3950..=4050).contains(&blob.count()));
        let lm = label_components_8(&blob);
        assert_eq!(isolate_target_cell(&lm, (50, 50), 500).unwrap(), blob);

        let mut with_speck = blob.clone();
        for y in 2..4 {
            for x in 2..7 {
                with_speck.set(x, y, true);
            }
        }
        let lm = label_components_8(&with_speck);
        assert_eq!(lm.component_count(), 2);
        assert_eq!(isolate_target_cell(&lm, (50, 50), 500).unwrap(), blob);
    }

    #[test]
    fn isolation_fails_when_nothing_is_big_enough() {
        let small = disk(40, 40, 20.0, 20.0, 5.5);
        assert!(small.count() < 500);
        let lm = label_components_8(&small);
        assert_eq!(
            isolate_target_cell(&lm, (20, 20), 500),
            Err(SegmentationError::NoCellFound { min_area: 500 })
        );
    }

    #[test]
    fn isolation_deprioritizes_border_components() {
        // large blob clipped by the left edge, smaller interior blob off-centre
        let a = disk(100, 60, 5.0, 30.0, 25.0);
        let b = disk(100, 60, 70.0, 30.0, 15.0);
        let lm = label_components_8(&a.union(&b));
        assert_eq!(isolate_target_cell(&lm, (5, 30), 100).unwrap(), b);
        // with no interior candidate the border blob is still returned
        let lm = label_components_8(&a);
        assert_eq!(isolate_target_cell(&lm, (50, 30), 100).unwrap(), a);
    }

    #[test]
    fn isolation_prefers_centre_component() {
        let a = disk(120, 60, 30.0, 30.0, 20.0);
        let b = disk(120, 60, 90.0, 30.0, 25.0);
        let lm = label_components_8(&a.union(&b));
        assert_eq!(isolate_target_cell(&lm, (30, 30), 100).unwrap(), a);
        assert_eq!(isolate_target_cell(&lm, (60, 30), 100).unwrap(), b);
    }

    #[test]
    fn fill_holes_closes_rings() {
        let ring = disk(40, 40, 20.0, 20.0, 15.0).intersection(&disk(40, 40, 20.0, 20.0, 8.0).invert());
        let filled = fill_holes(&ring);
        assert_eq!(filled, disk(40, 40, 20.0, 20.0, 15.0));
        // a C-shape open to the border stays open
        let c = BinaryMask::from_ascii(&["#####", "#....", "#####"]);
        assert_eq!(fill_holes(&c), c);
    }

    #[test]
    fn partition_of_annulus_recovers_pallor_disk() {
        let (w, h) = (60, 60);
        let outer = disk(w, h, 30.0, 30.0, 22.0);
        let inner = disk(w, h, 30.0, 30.0, 11.0);
        let values = (0..w * h)
            .map(|i| {
                let (x, y) = (i % w, i / w);
                if inner.get(x, y) { 240 } else if outer.get(x, y) { 150 } else { 250 }
            })
            .collect();
        let gray = GrayImage::new(w, h, values).unwrap();
        let part = partition_cell_colors(&gray, &outer).unwrap();
        assert_eq!(part.white_mask, inner);
        assert_eq!(part.red_count() + part.white_count(), outer.count());
        assert!(!part.uniform);
    }

    #[test]
    fn uniform_cell_is_all_red() {
        let cell = disk(30, 30, 15.0, 15.0, 10.0);
        let gray = GrayImage::new(30, 30, vec![120; 900]).unwrap();
        let part = partition_cell_colors(&gray, &cell).unwrap();
        assert!(part.uniform);
        assert_eq!(part.red_mask, cell);
        assert_eq!(part.white_count(), 0);
    }

    #[test]
    fn partition_split_counts_match_construction() {
        // 3889 dark + 583 light pixels, two well separated gray modes
        let (w, h) = (80, 80);
        let mut values = vec![255u8; w * h];
        let cell = BinaryMask::from_fn(w, h, |x, y| y * w + x < 3889 + 583);
        for (i, v) in values.iter_mut().enumerate().take(3889 + 583) {
            *v = if i < 3889 { 180 } else { 245 };
        }
        let gray = GrayImage::new(w, h, values).unwrap();
        let part = partition_cell_colors(&gray, &cell).unwrap();
        assert_eq!((part.red_count(), part.white_count()), (3889, 583));
    }

    #[test]
    fn partition_rejects_mismatched_mask() {
        let gray = GrayImage::new(4, 4, vec![0; 16]).unwrap();
        assert!(matches!(
            partition_cell_colors(&gray, &BinaryMask::new(3, 4)),
            Err(SegmentationError::DimensionMismatch(..))
        ));
        assert_eq!(
            partition_cell_colors(&gray, &BinaryMask::new(4, 4)),
            Err(SegmentationError::EmptyMask)
        );
    }

    fn arb_histogram() -> impl Strategy<Value = [u64; 256]> {
        prop::collection::vec(0u64..50, 256)
            .prop_filter("needs two occupied bins", |v| v.iter().filter(|&&c| c > 0).count() >= 2)
            .prop_map(|v| v.try_into().unwrap())
    }

    proptest! {
        #[test]
        fn otsu_is_scale_invariant(counts in arb_histogram(), k in 2u64..9) {
            let a = otsu_threshold(&GrayHistogram::from_counts(counts).unwrap()).unwrap();
            let scaled = counts.map(|c| c * k);
            let b = otsu_threshold(&GrayHistogram::from_counts(scaled).unwrap()).unwrap();
            prop_assert_eq!(a.threshold, b.threshold);
        }

        #[test]
        fn otsu_stats_are_consistent(counts in arb_histogram()) {
            let hist = GrayHistogram::from_counts(counts).unwrap();
            let s = otsu_threshold(&hist).unwrap();
            prop_assert!((s.p1 + s.p2 - 1.0).abs() < 1e-9);
            prop_assert!(s.p1 > 0.0 && s.p2 > 0.0);
            let eq2 = s.p1 * s.p2 * (s.mu1 - s.mu2).powi(2);
            prop_assert!((s.var_between - eq2).abs() < 1e-6);

            let n = hist.total() as f64;
            let mean: f64 = counts.iter().enumerate().map(|(v, &c)| v as f64 * c as f64).sum::<f64>() / n;
            let global: f64 = counts.iter().enumerate()
                .map(|(v, &c)| c as f64 * (v as f64 - mean).powi(2)).sum::<f64>() / n;
            prop_assert!((s.var_between + s.var_within - global).abs() < 1e-6);
        }

        #[test]
        fn labeling_partitions_the_grid(bits in prop::collection::vec(any::<bool>(), 12 * 9)) {
            let mask = BinaryMask::from_fn(12, 9, |x, y| bits[y * 12 + x]);
            let lm = label_components_8(&mask);
            prop_assert_eq!(lm.component_sizes().iter().sum::<usize>(), 12 * 9);
            for k in 0..=lm.component_count() {
                let n = lm.labels().iter().filter(|&&l| l as usize == k).count();
                prop_assert_eq!(n, lm.component_sizes()[k]);
            }
            for (i, &b) in mask.bits().iter().enumerate() {
                prop_assert_eq!(b, lm.labels()[i] != 0);
            }
            // 8-adjacent foreground pixels share a label
            for y in 0..9i64 {
                for x in 0..12i64 {
                    if !mask.get_signed(x, y) { continue; }
                    for (dx, dy) in [(1, 0), (0, 1), (1, 1), (-1, 1)] {
                        if mask.get_signed(x + dx, y + dy) {
                            prop_assert_eq!(lm.get(x as usize, y as usize),
                                            lm.get((x + dx) as usize, (y + dy) as usize));
                        }
                    }
                }
            }
            prop_assert_eq!(label_components_8(&mask), lm);
        }
    }
}

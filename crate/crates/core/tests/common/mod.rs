//! Independent reference implementations and shared fixtures.
#![allow(dead_code)]

use erythro::classifier::ErythrocyteClass;
use erythro::segmentation::BinaryMask;
use erythro::ShapeSpec;
use rand::Rng;

/// Exhaustive Otsu search in exact integer arithmetic.
///
/// For a split with class counts `n1, n2` and level sums `s1, s2` over `n`
/// pixels, `p1*p2*(mu1-mu2)^2 = (n2*s1 - n1*s2)^2 / (n1*n2*n^2)`. The common
/// `n^2` is dropped and candidates are compared by cross-multiplying, so
/// there is no rounding anywhere. Smallest threshold wins ties.
///
/// Totals must stay below ~2.5e5 pixels for the products to fit in `u128`.
pub fn exact_otsu(counts: &[u64; 256]) -> Option<u8> {
    let mut best: Option<(u8, u128, u128)> = None;
    for t in 0..255usize {
        let (mut n1, mut s1, mut n2, mut s2) = (0u128, 0u128, 0u128, 0u128);
        for (v, &c) in counts.iter().enumerate() {
            let (n, s) = if v <= t { (&mut n1, &mut s1) } else { (&mut n2, &mut s2) };
            *n += c as u128;
            *s += v as u128 * c as u128;
        }
        if n1 == 0 || n2 == 0 {
            continue;
        }
        let d = (n2 * s1).abs_diff(n1 * s2);
        let (num, den) = (d * d, n1 * n2);
        match best {
            Some((_, bn, bd)) if num * bd <= bn * den => {}
            _ => best = Some((t as u8, num, den)),
        }
    }
    best.map(|(t, _, _)| t)
}

/// Random histogram with 2..=256 occupied bins and at most 900 per bin.
pub fn random_histogram(rng: &mut impl Rng) -> [u64; 256] {
    let mut counts = [0u64; 256];
    match rng.gen_range(0..4) {
        // dense noise
        0 => counts.iter_mut().for_each(|c| *c = rng.gen_range(0..900)),
        // a handful of isolated spikes
        1 => {
            for _ in 0..rng.gen_range(2..8) {
                counts[rng.gen_range(0..256)] += rng.gen_range(1..900);
            }
        }
        // two bumps, the usual smear shape
        2 => {
            let (a, b) = (rng.gen_range(20..120usize), rng.gen_range(140..240usize));
            for (v, c) in counts.iter_mut().enumerate() {
                let bump = |m: usize, w: f64| (-((v as f64 - m as f64) / w).powi(2)).exp();
                *c = (600.0 * bump(a, 12.0) + 400.0 * bump(b, 20.0)) as u64 + rng.gen_range(0..3);
            }
        }
        // sparse random support
        _ => {
            for c in counts.iter_mut() {
                if rng.gen_bool(0.1) {
                    *c = rng.gen_range(1..900);
                }
            }
        }
    }
    if counts.iter().filter(|&&c| c > 0).count() < 2 {
        counts[0] += 1;
        counts[255] += 1;
    }
    counts
}

/// Recursive 8-connected flood fill, labels in raster order of first pixel.
pub fn flood_fill_labels(mask: &BinaryMask) -> Vec<u32> {
    fn fill(mask: &BinaryMask, labels: &mut [u32], x: i64, y: i64, label: u32) {
        let (w, h) = (mask.width() as i64, mask.height() as i64);
        if x < 0 || y < 0 || x >= w || y >= h {
            return;
        }
        let idx = (y * w + x) as usize;
        if !mask.get(x as usize, y as usize) || labels[idx] != 0 {
            return;
        }
        labels[idx] = label;
        for dy in -1..=1 {
            for dx in -1..=1 {
                if dx != 0 || dy != 0 {
                    fill(mask, labels, x + dx, y + dy, label);
                }
            }
        }
    }
    let mut labels = vec![0u32; mask.width() * mask.height()];
    let mut next = 0;
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) && labels[y * mask.width() + x] == 0 {
                next += 1;
                fill(mask, &mut labels, x as i64, y as i64, next);
            }
        }
    }
    labels
}

pub fn random_mask(rng: &mut impl Rng, w: usize, h: usize) -> BinaryMask {
    let density = rng.gen_range(0.1..0.7);
    BinaryMask::from_fn(w, h, |_, _| rng.gen_bool(density))
}

/// True when two label images induce the same partition of the grid.
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    use std::collections::HashMap;
    if a.len() != b.len() {
        return false;
    }
    let (mut ab, mut ba) = (HashMap::new(), HashMap::new());
    a.iter().zip(b).all(|(&x, &y)| *ab.entry(x).or_insert(y) == y && *ba.entry(y).or_insert(x) == x)
}

pub struct Fixture {
    pub name: &'static str,
    pub spec: ShapeSpec,
    pub width: usize,
    pub height: usize,
    pub expected: ErythrocyteClass,
}

/// One rendered cell per class.
pub fn fixtures() -> Vec<Fixture> {
    use ErythrocyteClass::*;
    let f = |name, spec, width, height, expected| Fixture { name, spec, width, height, expected };
    vec![
        f("disk r38 pallor r13", ShapeSpec::disk(38.0, Some(13.0)), 120, 120, Healthy),
        f("annulus 34/20", ShapeSpec::annulus(34.0, 20.0), 100, 100, Annulocyte),
        f("ellipse 52/26", ShapeSpec::ellipse(52.0, 26.0), 130, 80, Elliptocyte),
        f("crescent 30/26/12", ShapeSpec::crescent(30.0, 26.0, 12.0), 90, 90, Sickle),
        f("5-spike star", ShapeSpec::star(32.0, 5, 22.0, 9.0), 140, 140, Acanthocyte),
    ]
}

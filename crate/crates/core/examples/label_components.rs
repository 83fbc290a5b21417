//! 8-connected labeling and target-cell isolation.
//!
//! Two touching-at-a-corner blobs are one component under 8-connectivity but
//! two under 4-connectivity. The border-touching blob is skipped when the cell
//! is isolated.

use erythro::segmentation::{fill_holes, isolate_target_cell, label_components, Connectivity};
use erythro::BinaryMask;

fn show(labels: &erythro::segmentation::LabelMap) {
    for y in 0..labels.height() {
        let row: String = (0..labels.width())
            .map(|x| match labels.get(x, y) {
                0 => '.',
                l => char::from_digit(l % 36, 36).unwrap(),
            })
            .collect();
        println!("  {row}");
    }
}

fn main() {
    let mask = BinaryMask::from_ascii(&[
        "##..........",
        "##..........",
        "....####....",
        "...#....#...",
        "...#....#...",
        "....####....",
        "........#...",
        ".........##.",
    ]);
    for connectivity in [Connectivity::Eight, Connectivity::Four] {
        let labels = label_components(&mask, connectivity);
        println!("{connectivity:?}: {} components, sizes {:?}", labels.component_count(), labels.component_sizes());
        show(&labels);
    }

    let labels = label_components(&mask, Connectivity::Eight);
    let cell = isolate_target_cell(&labels, (6, 4), 10).expect("ring qualifies");
    let filled = fill_holes(&cell);
    println!("isolated ring: {} px, with holes filled: {} px", cell.count(), filled.count());
}

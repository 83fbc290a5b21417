//! Grayscale conversion, histogram and Otsu threshold on a rendered cell.
//!
//!     cargo run --example otsu_threshold

use erythro::segmentation::{binarize, gray_histogram, otsu_threshold, Polarity};
use erythro::{render_shape, to_grayscale, ShapeSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let img = render_shape(&ShapeSpec::disk(14.0, Some(5.0)), 40, 40)?;
    let gray = to_grayscale(&img);
    let hist = gray_histogram(&gray)?;

    for (level, &count) in hist.counts().iter().enumerate().filter(|(_, &c)| c > 0) {
        println!("gray {level:>3}: {count:>5} px");
    }

    let stats = otsu_threshold(&hist)?;
    println!(
        "threshold {} | p1 {:.3} mu1 {:.1} | p2 {:.3} mu2 {:.1} | within {:.2} between {:.2}",
        stats.threshold, stats.p1, stats.mu1, stats.p2, stats.mu2, stats.var_within, stats.var_between
    );

    let mask = binarize(&gray, stats.threshold, Polarity::DarkIsForeground);
    for y in (0..mask.height()).step_by(2) {
        let row: String = (0..mask.width()).map(|x| if mask.get(x, y) { '#' } else { '.' }).collect();
        println!("{row}");
    }
    Ok(())
}

//! Renders one synthetic cell of each form and prints its measured features
//! and class.
//!
//!     cargo run --example shape_gallery

use erythro::{analyze_roi, render_shape, AnalysisConfig, ShapeSpec};

fn main() {
    let gallery = [
        ("healthy disk", ShapeSpec::disk(38.0, Some(13.0)), 120, 120),
        ("annulus", ShapeSpec::annulus(34.0, 20.0), 100, 100),
        ("ellipse", ShapeSpec::ellipse(52.0, 26.0), 130, 80),
        ("crescent", ShapeSpec::crescent(30.0, 26.0, 12.0), 90, 90),
        ("5-spike star", ShapeSpec::star(32.0, 5, 22.0, 9.0), 140, 140),
    ];
    let config = AnalysisConfig::default();
    println!(
        "{:<14} {:>5} {:>5} {:>6} {:>6} {:>6} {:>6} {:>3} {:>3} {:>7}  label",
        "shape", "area", "peri", "comp", "major", "minor", "space", "vc", "ncc", "white%"
    );
    for (name, spec, w, h) in gallery {
        let img = render_shape(&spec, w, h).expect("fixture fits its canvas");
        match analyze_roi(&img, &img.full_roi(), &config) {
            Ok(r) => {
                let m = &r.morpho;
                println!(
                    "{:<14} {:>5} {:>5} {:>6.3} {:>6.2} {:>6.2} {:>6.2} {:>3} {:>3} {:>7.2}  {}",
                    name, m.area, m.perimeter, m.compactness, m.major_axis, m.minor_axis,
                    m.axis_spacing, m.varconvex, m.ncc, r.color.pct_white, r.label
                );
            }
            Err(e) => println!("{name:<14} error: {e}"),
        }
    }
}

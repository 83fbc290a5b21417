//! Morphometry of a crescent: axes, hull deficiency and the concavity window.

use erythro::morphometry::{
    compute_axes, compute_barycenter, concavity_window, hull_deficiency, window_complement,
};
use erythro::segmentation::label_components_8;
use erythro::{compute_morphometry, render_shape, to_grayscale, BinaryMask, ShapeSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let img = render_shape(&ShapeSpec::crescent(30.0, 26.0, 12.0), 90, 90)?;
    let gray = to_grayscale(&img);
    let cell = BinaryMask::from_fn(90, 90, |x, y| gray.get(x, y) < 245);

    let m = compute_morphometry(&cell)?;
    println!("{m:#?}");

    let bc = compute_barycenter(&cell)?;
    let axes = compute_axes(&cell, bc)?;
    println!("barycenter ({:.2}, {:.2}), semi-axes {:.2} / {:.2}", bc.cx, bc.cy, axes.major_axis, axes.minor_axis);
    println!("hull deficiency {:.3}", hull_deficiency(&cell)?);

    // The square window around the barycenter, minus the cell, splits into
    // one piece per concavity.
    let (x0, y0, x1, y1) = concavity_window(&cell, bc)?;
    let complement = window_complement(&cell, bc)?;
    let pieces = label_components_8(&complement);
    println!("window x {x0}..={x1}, y {y0}..={y1}; complement pieces {:?}", &pieces.component_sizes()[1..]);
    for wy in (0..complement.height()).step_by(2) {
        let row: String = (0..complement.width())
            .map(|wx| match pieces.get(wx, wy) {
                0 => '#',
                l => char::from_digit(l % 10, 10).unwrap(),
            })
            .collect();
        println!("  {row}");
    }
    Ok(())
}

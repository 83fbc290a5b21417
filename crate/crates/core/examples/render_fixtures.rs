//! Writes one synthetic fixture per cell class, plus the `key = value` spec
//! that reproduces it through `erythro synth`.
//!
//!     cargo run --example render_fixtures -- target/fixtures

use std::path::PathBuf;

use erythro::synth::SynthJob;
use erythro::save_image;

const SPECS: &[(&str, &str)] = &[
    ("healthy", "kind = disk\nwidth = 120\nheight = 120\nradius = 38\npallor_radius = 13\n"),
    ("annulocyte", "kind = annulus\nwidth = 100\nheight = 100\nouter_radius = 34\npallor_radius = 20\n"),
    ("elliptocyte", "kind = ellipse\nwidth = 130\nheight = 130\nsemi_major = 52\nsemi_minor = 26\nangle = 30\n"),
    ("sickle", "kind = crescent\nwidth = 90\nheight = 90\nradius = 30\nbite_radius = 26\noffset = 12\n"),
    (
        "acanthocyte",
        "kind = star\nwidth = 140\nheight = 140\nradius = 32\nspikes = 5\nspike_length = 22\nspike_half_width = 9\n",
    ),
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args_os().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("erythro-fixtures"));
    std::fs::create_dir_all(&dir)?;
    for (name, spec) in SPECS {
        let job = SynthJob::parse(spec)?;
        let img = job.render()?;
        let png = dir.join(format!("{name}.png"));
        save_image(&img, &png)?;
        std::fs::write(dir.join(format!("{name}.spec")), spec)?;
        println!("{} ({}x{})", png.display(), img.width(), img.height());
    }
    Ok(())
}

//! A small synthetic smear with five cells, analyzed ROI by ROI in parallel.
//! Prints the text report for each and the JSON for the first.

use erythro::synth::render_scene;
use erythro::{analyze_rois, AnalysisConfig, Roi, ShapeSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cells = [
        ShapeSpec::disk(38.0, Some(13.0)).at(60.0, 60.0),
        ShapeSpec::annulus(34.0, 20.0).at(180.0, 60.0),
        ShapeSpec::ellipse(52.0, 26.0).at(320.0, 60.0),
        ShapeSpec::crescent(30.0, 26.0, 12.0).at(60.0, 190.0),
        ShapeSpec::star(32.0, 5, 22.0, 9.0).at(190.0, 190.0),
    ];
    let smear = render_scene(&cells, 400, 260, erythro::synth::DEFAULT_BACKGROUND)?;
    let rois = [
        Roi::new(10, 10, 100, 100)?,
        Roi::new(135, 15, 90, 90)?,
        Roi::new(262, 25, 116, 70)?,
        Roi::new(20, 150, 80, 80)?,
        Roi::new(125, 125, 130, 130)?,
        // empty background
        Roi::new(290, 150, 100, 100)?,
    ];

    let results = analyze_rois(&smear, &rois, &AnalysisConfig::default());
    for (roi, result) in rois.iter().zip(&results) {
        match result {
            Ok(report) => println!("{}", report.to_text()),
            Err(e) => println!("roi={roi} {}: {e}", e.kind()),
        }
    }
    if let Some(Ok(first)) = results.first() {
        println!("\n{}", first.to_json());
    }
    Ok(())
}

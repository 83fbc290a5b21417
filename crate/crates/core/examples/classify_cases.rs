//! Runs the rule-based classifier over the reference case book and prints
//! each decision with the rules that fired.

use erythro::casebook::all_cases;
use erythro::{classify, ClassificationThresholds};

fn main() {
    let th = ClassificationThresholds::default();
    let mut agree = 0;
    for case in all_cases() {
        let (label, trace) = classify(&case.morpho(), &case.color(), &th);
        agree += usize::from(label == case.expected);
        println!(
            "{:<14} comp {:.2} spacing {:>5.2} white {:>5.2}% ncc {:<4} -> {:<12} [{}]",
            case.name,
            case.compactness,
            case.axis_spacing,
            case.pct_white,
            case.ncc.map_or("-".into(), |n| n.to_string()),
            label.to_string(),
            trace.join("; ")
        );
    }
    println!("{agree}/{} match the reference class", all_cases().count());

    // A stricter spacing gate turns the least elongated elliptocyte round.
    let strict = ClassificationThresholds { spacing_gate: 25.5, ..th };
    for case in all_cases().filter(|c| c.name.starts_with("elliptocyte")) {
        let (label, _) = classify(&case.morpho(), &case.color(), &strict);
        println!("spacing_gate 25.5: {} -> {label}", case.name);
    }
}

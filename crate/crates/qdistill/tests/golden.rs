//! Golden-file regressions for the standard-form listings and the rate-1/3
//! elimination trace.

use qdistill::block::StabilizerCode;
use qdistill::check::standard_form;
use qdistill::conv::{conv_standard_form, ConvCode};

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).expect("golden file present")
}

#[test]
fn five_one_three_standard_form_listing() {
    let code = StabilizerCode::five_one_three();
    let std = standard_form(code.generators()).unwrap();
    assert_eq!(std.to_text(), golden("five_one_three_std.txt"));
}

#[test]
fn five_one_three_logical_listing() {
    let code = StabilizerCode::five_one_three();
    let ops = code.logical_operators();
    let mut text = String::new();
    for lx in &ops.lx {
        text.push_str(&format!("LX {lx}\n"));
    }
    for lz in &ops.lz {
        text.push_str(&format!("LZ {lz}\n"));
    }
    assert_eq!(text, golden("five_one_three_logicals.txt"));
}

#[test]
fn rate_third_standard_form_matrix() {
    let std = conv_standard_form(&ConvCode::rate_third()).unwrap();
    assert_eq!(std.code.to_text(), golden("rate_third_std.txt"));
    // and the same matrix parses back bit-exactly
    let parsed = ConvCode::parse(&golden("rate_third_std.txt")).unwrap();
    assert_eq!(parsed, std.code);
}

#[test]
fn rate_third_elimination_trace() {
    let std = conv_standard_form(&ConvCode::rate_third_original()).unwrap();
    let mut text = String::new();
    for (i, step) in std.trace.iter().enumerate() {
        text.push_str(&format!("step {}: {}\n", i + 1, step.description));
        text.push_str(&step.matrix);
    }
    assert_eq!(text, golden("rate_third_elimination_trace.txt"));
    assert_eq!(std.trace.len(), 5);
    // the permuted-order matrix equals the published standard form
    assert_eq!(std.code.to_text(), golden("rate_third_std.txt"));
}

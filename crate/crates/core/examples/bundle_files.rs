//! The JSON file formats: bundle presentations and cochains.
//!
//! Writes a bundle description to disk, reads it back, validates it, and
//! serializes the computed invariant cochain. The same files drive the
//! `tcech` binary (`tcech check`, `tcech invariant`, ...).
//!
//! Run with: `cargo run --example bundle_files`

use std::path::PathBuf;

use tcech::cech::{CechCochain, CochainFile};
use tcech::eval;
use tcech::field::FieldId;
use tcech::geometry::{self, BundleFile};
use tcech::invariants;

fn main() -> Result<(), tcech::Error> {
    let dir = std::env::temp_dir();
    let bundle_path: PathBuf = dir.join("o1_cp2.bundle.json");
    let cochain_path: PathBuf = dir.join("o1_cp2.f1.json");

    // Write O(1) on the projective plane as a bundle file.
    let bundle = eval::o_d_cpn(2, 1, FieldId::Rational)?;
    geometry::save_bundle(&bundle_path, &bundle, None)?;
    println!("wrote {}", bundle_path.display());
    let text = std::fs::read_to_string(&bundle_path)?;
    let first_lines: Vec<&str> = text.lines().take(14).collect();
    println!("{}\n  ...", first_lines.join("\n"));

    // Read it back and validate.
    let (reloaded, gauge) = geometry::load_bundle(&bundle_path)?;
    assert!(gauge.is_none());
    assert_eq!(reloaded.rank(), bundle.rank());
    let report = reloaded.validate_cocycle()?;
    println!("\nreloaded bundle: {report}");

    // A hand-written bundle file parses too; expressions use the grammar
    // `+ - * / ^` with integer literals and declared variables.
    let handwritten = r#"{
        "field": "Q",
        "rank": 1,
        "charts": [
            {"index": 0, "vars": ["z"]},
            {"index": 1, "vars": ["w"]}
        ],
        "changes": [
            {"from": 0, "to": 1, "map": {"w": "1/z"}},
            {"from": 1, "to": 0, "map": {"z": "1/w"}}
        ],
        "transitions": [
            {"pair": [0, 1], "matrix": [["z^4"]]}
        ],
        "flag": true
    }"#;
    let file: BundleFile = serde_json::from_str(handwritten).expect("valid JSON");
    let (hand, _) = file.parse()?;
    let inv = invariants::t_invariant(&hand, 1)?;
    println!("hand-written O(4): degree = {}", eval::cp1_degree(&inv)?);

    // Serialize the invariant cochain; the file embeds the cover so it can
    // be reloaded standalone (for example by `tcech cup`).
    let f1 = invariants::t_invariant(&reloaded, 1)?;
    std::fs::write(
        &cochain_path,
        serde_json::to_string_pretty(&f1.cochain.to_file()).expect("serializes"),
    )?;
    println!("\nwrote {}", cochain_path.display());
    let parsed: CochainFile =
        serde_json::from_str(&std::fs::read_to_string(&cochain_path)?).expect("valid JSON");
    let cover = geometry::cover_from_file(parsed.cover.as_ref().expect("embedded cover"))?;
    let back = CechCochain::from_file(&parsed, cover)?;
    assert_eq!(back, f1.cochain);
    println!("cochain round trip exact: true");
    Ok(())
}

//! Degrees of line bundles on the projective line.
//!
//! Builds `O(d)` on the canonical two-chart cover (`w = 1/z`, transition
//! `g_01 = z^d`), computes the degree-1 invariant cochain, and reads the
//! degree back off as the residue of its single component at the origin.
//!
//! Run with: `cargo run --example line_bundle_degrees`

use tcech::eval;
use tcech::field::FieldId;
use tcech::invariants;

fn main() -> Result<(), tcech::Error> {
    let field = FieldId::Rational;

    println!("O(d) on the projective line, d = -5 .. 5:");
    for d in -5..=5i64 {
        let bundle = eval::o_d_cp1(d, field)?;
        let inv = invariants::t_invariant(&bundle, 1)?;
        let component = inv.cochain.component(&[0, 1])?;
        let degree = eval::cp1_degree(&inv)?;
        println!("  d = {d:>2}:  t_01 = {component}   degree = {degree}");
    }

    // The pairing is additive across direct sums (the trace splits).
    let sum = eval::direct_sum(&[eval::o_d_cp1(2, field)?, eval::o_d_cp1(3, field)?])?;
    let inv = invariants::t_invariant(&sum, 1)?;
    println!(
        "\nO(2) + O(3): rank {}, degree = {}",
        sum.rank(),
        eval::cp1_degree(&inv)?
    );

    // A non-split extension presented by an upper-triangular transition has
    // the same degree as its diagonal.
    let ext = eval::triangular_extension(&[1, 4], &["z^2 + 1".to_string()], field)?;
    let inv = invariants::t_invariant(&ext, 1)?;
    println!(
        "triangular extension of O(1) by O(4): degree = {}",
        eval::cp1_degree(&inv)?
    );

    // The normalization tag carried alongside the cochain.
    println!("\nnormalization marker at k = 1: {}", inv.normalization_tag);
    Ok(())
}

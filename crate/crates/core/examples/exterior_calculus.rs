//! A tour of the exact kernel: rational functions, differential forms, and
//! matrices over them.
//!
//! Run with: `cargo run --example exterior_calculus`

use std::collections::BTreeMap;

use tcech::field::FieldId;
use tcech::forms::DifferentialForm;
use tcech::matrix::FuncMatrix;
use tcech::parse::parse_expression;
use tcech::poly::VarSet;

fn main() -> Result<(), tcech::Error> {
    let field = FieldId::Rational;
    let xy = VarSet::new(vec!["x", "y"])?;
    let rf = |s: &str| parse_expression(s, &xy, field);

    // Rational functions stay in canonical reduced form.
    let f = rf("1/(x - 1)")?.add(&rf("1/(x + 1)")?);
    println!("1/(x-1) + 1/(x+1) = {f}");
    let g = rf("(x^2 - y^2)/(x - y)")?;
    println!("(x^2 - y^2)/(x - y) = {g}");

    // Partial derivatives use the quotient rule exactly.
    let q = rf("x*y/(x + y)")?;
    println!("d/dx [xy/(x+y)] = {}", q.partial_derivative("x")?);

    // Forms: wedge antisymmetry and the exterior derivative.
    let dx = DifferentialForm::d_var(0, xy.clone(), field);
    let dy = DifferentialForm::d_var(1, xy.clone(), field);
    let alpha = dx.scale(&rf("y")?).add(&dy.scale(&rf("x^2")?));
    println!("\nalpha = {alpha}");
    println!("d(alpha) = {}", alpha.exterior_derivative());
    println!("alpha ^ alpha = {}", alpha.wedge(&alpha)?);
    println!(
        "d(d(alpha)) = {}",
        alpha.exterior_derivative().exterior_derivative()
    );

    // Pullback along w = 1/z: dlog is equivariant up to sign.
    let zv = VarSet::new(vec!["z"])?;
    let wv = VarSet::new(vec!["w"])?;
    let dlog_w =
        DifferentialForm::d_var(0, wv.clone(), field).scale(&parse_expression("1/w", &wv, field)?);
    let mut map = BTreeMap::new();
    map.insert("w".to_string(), parse_expression("1/z", &zv, field)?);
    println!(
        "\npullback of dw/w along w = 1/z: {}",
        dlog_w.pullback(&map, &zv, field)?
    );

    // Matrices: exact adjugate inverse and the derivative identity.
    let m = FuncMatrix::from_rows(vec![vec![rf("x")?, rf("1")?], vec![rf("1")?, rf("x")?]])?;
    let minv = m.inverse()?;
    println!("\nM = [[x, 1], [1, x]],  M^-1 =\n{minv}");
    println!("M * M^-1 = I: {}", m.mul(&minv)?.is_identity());
    let lhs = minv.d();
    let rhs = minv.as_forms().mul(&m.d())?.mul(&minv.as_forms())?.neg();
    println!("d(M^-1) = -M^-1 dM M^-1: {}", lhs == rhs);
    Ok(())
}

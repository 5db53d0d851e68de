//! The same identities over a prime field.
//!
//! Every construction is exact field algebra, so it runs verbatim over
//! `F_p` as long as the characteristic does not divide `(k+2)!`. Below that
//! bound the engine refuses rather than emitting an unreliable value.
//!
//! Run with: `cargo run --example finite_fields`

use tcech::error::Error;
use tcech::eval;
use tcech::field::{FieldId, Scalar};
use tcech::invariants;
use tcech::synth::{self, Rng};

fn main() -> Result<(), tcech::Error> {
    let f101 = FieldId::prime(101)?;

    // Inverse factorials in the field.
    for n in [2u64, 3, 4] {
        println!(
            "1/{n}! over F_101 = {}",
            Scalar::factorial_inverse(n, f101)?
        );
    }

    // O(d) over F_101: the degree comes out as d mod 101.
    for d in [1i64, 5, -3] {
        let bundle = eval::o_d_cp1(d, f101)?;
        let inv = invariants::t_invariant(&bundle, 1)?;
        println!("degree of O({d}) over F_101 = {}", eval::cp1_degree(&inv)?);
    }

    // Random cocycles close over F_101 exactly as over the rationals.
    let mut rng = Rng::new(41);
    let cover = synth::synthetic_cover(5, &["x", "y", "u"], f101);
    for k in 1..=3usize {
        let bundle = synth::random_cocycle_bundle(&mut rng, &cover, 3, false);
        let inv = invariants::t_invariant(&bundle, k)?;
        let (closed, _) = inv.cochain.is_cocycle()?;
        println!("random rank-3 bundle, k = {k}: cocycle = {closed}");
    }

    // Over F_2 the degree-1 construction needs 1/3! and is refused.
    let f2 = FieldId::prime(2)?;
    let bundle = eval::o_d_cp1(1, f2)?;
    match invariants::t_invariant(&bundle, 1) {
        Err(Error::CharDividesFactorial { n, p }) => {
            println!("over F_{p} at k = 1: refused, {p} divides {n}!");
        }
        other => panic!("expected a characteristic error, got {other:?}"),
    }

    // Primality of the modulus is checked up front.
    match FieldId::prime(91) {
        Err(Error::NotPrime { p }) => println!("F_{p} rejected: 91 = 7 * 13"),
        other => panic!("expected NotPrime, got {other:?}"),
    }
    Ok(())
}

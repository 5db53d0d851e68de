//! Seeded generation of synthetic covers, transition cocycles, gauges, and
//! random algebra values, shared by the randomized verification suite and
//! the test batteries.
//!
//! Randomness comes from a self-contained SplitMix64 stream so that a run is
//! byte-identical for a given seed across platforms and dependency versions.
//!
//! Transition cocycles are built from per-chart frames `F_i` as
//! `g_ij = F_i^{-1} F_j`, which satisfies the cocycle condition by
//! construction. Frames are products of unipotent matrices with small
//! polynomial entries and (for rank 1 and diagonal spice) nonzero monomials,
//! so every inverse is exact.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cech::CechCochain;
use crate::field::{FieldId, Scalar};
use crate::forms::DifferentialForm;
use crate::geometry::{BundlePresentation, Cover, GaugeTransformation};
use crate::matrix::FuncMatrix;
use crate::poly::{Polynomial, VarSet};
use crate::ratfunc::RationalFunction;

/// SplitMix64 stream.
#[derive(Debug, Clone)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        self.next_u64() % n
    }

    /// Uniform in `[lo, hi]`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// Nonzero scalar with small magnitude.
pub fn random_nonzero_scalar(rng: &mut Rng, field: FieldId) -> Scalar {
    loop {
        let c = Scalar::from_i64(rng.range_i64(-3, 3), field);
        if !c.is_zero() {
            return c;
        }
    }
}

/// Random polynomial with bounded degree and term count (possibly zero).
pub fn random_polynomial(
    rng: &mut Rng,
    vars: &VarSet,
    field: FieldId,
    max_degree: u32,
    max_terms: usize,
) -> Polynomial {
    let mut acc = Polynomial::zero(vars.clone(), field);
    let terms = rng.below(max_terms as u64 + 1);
    for _ in 0..terms {
        let mut expo = vec![0u32; vars.len()];
        let mut budget = max_degree;
        for e in expo.iter_mut() {
            let d = rng.below(budget as u64 + 1) as u32;
            *e = d;
            budget -= d;
        }
        let c = Scalar::from_i64(rng.range_i64(-3, 3), field);
        acc = acc.add(&Polynomial::monomial(expo, c, vars.clone()));
    }
    acc
}

/// Random rational function with a monomial-or-small denominator.
pub fn random_rational(rng: &mut Rng, vars: &VarSet, field: FieldId) -> RationalFunction {
    let num = random_polynomial(rng, vars, field, 2, 3);
    let num = RationalFunction::from_polynomial(num);
    if rng.chance(1, 3) {
        let m = random_monomial(rng, vars, field, 2);
        num.checked_div(&m).expect("monomial is nonzero")
    } else {
        num
    }
}

/// Nonzero monomial with small exponents spread over up to two variables,
/// so its dlog has independent directions generically.
pub fn random_monomial(
    rng: &mut Rng,
    vars: &VarSet,
    field: FieldId,
    max_degree: u32,
) -> RationalFunction {
    let c = random_nonzero_scalar(rng, field);
    let mut expo = vec![0u32; vars.len()];
    for _ in 0..2 {
        let slot = rng.below(vars.len() as u64) as usize;
        expo[slot] += rng.below(max_degree as u64 + 1) as u32;
    }
    RationalFunction::from_polynomial(Polynomial::monomial(expo, c, vars.clone()))
}

/// Random homogeneous form of the given degree with polynomial coefficients.
pub fn random_form(
    rng: &mut Rng,
    vars: &VarSet,
    field: FieldId,
    degree: usize,
) -> DifferentialForm {
    let n = vars.len();
    let mut acc = DifferentialForm::zero(vars.clone(), field);
    if degree > n {
        return acc;
    }
    for _ in 0..2 {
        // Random strictly increasing index set of the requested size.
        let mut picks: Vec<usize> = (0..n).collect();
        for i in (1..picks.len()).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            picks.swap(i, j);
        }
        let mut indices: Vec<usize> = picks[..degree].to_vec();
        indices.sort_unstable();
        let coeff = RationalFunction::from_polynomial(random_polynomial(rng, vars, field, 2, 2));
        if coeff.is_zero() {
            continue;
        }
        acc = acc.add(&DifferentialForm::term(indices, coeff).expect("increasing indices"));
    }
    acc
}

/// Random cochain on a cover whose charts share coordinates.
pub fn random_cochain(
    rng: &mut Rng,
    cover: &Arc<Cover>,
    degree: usize,
    grade: usize,
    fill: usize,
) -> CechCochain {
    let tuples = cover.tuples_of_len(degree + 1);
    let mut components = BTreeMap::new();
    for t in tuples {
        if components.len() >= fill {
            break;
        }
        if rng.chance(2, 3) {
            let vars = cover.chart(t[0]).expect("chart").vars.clone();
            let form = random_form(rng, &vars, cover.field(), grade);
            if !form.is_zero() {
                components.insert(t, form);
            }
        }
    }
    CechCochain::from_components(cover.clone(), degree, grade, components)
        .expect("generated components are well-formed")
}

/// Unipotent upper- or lower-triangular matrix with polynomial entries.
fn random_unipotent(
    rng: &mut Rng,
    rank: usize,
    vars: &VarSet,
    field: FieldId,
    upper: bool,
) -> FuncMatrix {
    let mut rows = Vec::with_capacity(rank);
    for i in 0..rank {
        let mut row = Vec::with_capacity(rank);
        for j in 0..rank {
            let entry = if i == j {
                RationalFunction::one(vars.clone(), field)
            } else if (upper && i < j) || (!upper && i > j) {
                RationalFunction::from_polynomial(random_polynomial(rng, vars, field, 1, 2))
            } else {
                RationalFunction::zero(vars.clone(), field)
            };
            row.push(entry);
        }
        rows.push(row);
    }
    FuncMatrix::from_rows(rows).expect("well-formed rows")
}

fn diagonal(entries: Vec<RationalFunction>) -> FuncMatrix {
    let n = entries.len();
    let vars = entries[0].vars().clone();
    let field = entries[0].field();
    let mut rows = vec![vec![RationalFunction::zero(vars.clone(), field); n]; n];
    for (i, e) in entries.into_iter().enumerate() {
        rows[i][i] = e;
    }
    FuncMatrix::from_rows(rows).expect("well-formed rows")
}

/// Per-chart frame; `flag` keeps it upper triangular.
fn random_frame(
    rng: &mut Rng,
    rank: usize,
    vars: &VarSet,
    field: FieldId,
    flag: bool,
) -> FuncMatrix {
    if rank == 1 {
        return diagonal(vec![random_monomial(rng, vars, field, 1)]);
    }
    let diag = diagonal(
        (0..rank)
            .map(|_| random_monomial(rng, vars, field, 1))
            .collect(),
    );
    let up = random_unipotent(rng, rank, vars, field, true);
    let mut frame = up.mul(&diag).expect("dims match");
    if !flag && rng.chance(1, 2) {
        let low = random_unipotent(rng, rank, vars, field, false);
        frame = frame.mul(&low).expect("dims match");
    }
    frame
}

/// Synthetic cover of `n` charts sharing `vars`, with identity changes.
pub fn synthetic_cover(n: usize, var_names: &[&str], field: FieldId) -> Arc<Cover> {
    let vars = VarSet::new(var_names.to_vec()).expect("distinct names");
    Cover::trivial(n, vars, field)
}

/// Random transition cocycle on `cover` built from frames, so the cocycle
/// condition holds exactly by construction.
pub fn random_cocycle_bundle(
    rng: &mut Rng,
    cover: &Arc<Cover>,
    rank: usize,
    flag: bool,
) -> BundlePresentation {
    let field = cover.field();
    let indices = cover.chart_indices();
    let vars = cover.chart(indices[0]).expect("chart").vars.clone();
    let frames: BTreeMap<usize, FuncMatrix> = indices
        .iter()
        .map(|&i| (i, random_frame(rng, rank, &vars, field, flag)))
        .collect();
    let mut transitions = BTreeMap::new();
    for (a, &i) in indices.iter().enumerate() {
        for &j in &indices[a + 1..] {
            let g = frames[&i]
                .inverse()
                .expect("frames are invertible")
                .mul(&frames[&j])
                .expect("dims match");
            transitions.insert((i, j), g);
        }
    }
    BundlePresentation::new(cover.clone(), rank, transitions, flag)
        .expect("frame cocycle is a valid presentation")
}

/// Random invertible gauge: unipotent times monomial diagonal per chart.
pub fn random_gauge(
    rng: &mut Rng,
    bundle: &BundlePresentation,
    flag_compatible: bool,
) -> GaugeTransformation {
    let field = bundle.field();
    let rank = bundle.rank();
    let mut components = BTreeMap::new();
    for i in bundle.cover().chart_indices() {
        let vars = bundle.cover().chart(i).expect("chart").vars.clone();
        let diag = diagonal(
            (0..rank)
                .map(|_| random_monomial(rng, &vars, field, 1))
                .collect(),
        );
        let h = if rank == 1 {
            diag
        } else {
            let up = random_unipotent(rng, rank, &vars, field, true);
            let mut h = up.mul(&diag).expect("dims match");
            if !flag_compatible && rng.chance(1, 2) {
                h = h
                    .mul(&random_unipotent(rng, rank, &vars, field, false))
                    .expect("dims match");
            }
            h
        };
        components.insert(i, h);
    }
    GaugeTransformation::new(components)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_stream() {
        let mut a = Rng::new(42);
        let mut b = Rng::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn cocycle_bundles_validate() {
        let mut rng = Rng::new(3);
        let cover = synthetic_cover(4, &["x", "y"], FieldId::Rational);
        for rank in 1..=3 {
            for flag in [false, true] {
                let b = random_cocycle_bundle(&mut rng, &cover, rank, flag);
                assert!(b.validate_cocycle().unwrap().is_valid());
            }
        }
    }

    #[test]
    fn gauges_are_invertible() {
        let mut rng = Rng::new(5);
        let cover = synthetic_cover(3, &["x", "y"], FieldId::Rational);
        let b = random_cocycle_bundle(&mut rng, &cover, 2, false);
        for _ in 0..5 {
            let h = random_gauge(&mut rng, &b, false);
            let gauged = b.apply_gauge(&h).unwrap();
            assert!(gauged.validate_cocycle().unwrap().is_valid());
        }
    }
}

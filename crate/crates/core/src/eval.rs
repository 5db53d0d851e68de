//! Built-in example presentations and the projective-line residue pairing
//! that turns the degree-1 invariant into an integer.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{FieldId, Scalar};
use crate::geometry::{BundlePresentation, Chart, CoordinateChange, Cover};
use crate::invariants::TInvariantResult;
use crate::matrix::FuncMatrix;
use crate::parse::parse_expression;
use crate::poly::VarSet;
use crate::ratfunc::RationalFunction;

/// The canonical two-chart cover of the projective line: chart 0 with
/// coordinate `z`, chart 1 with coordinate `w`, glued by `w = 1/z`.
pub fn cp1_cover(field: FieldId) -> Result<Arc<Cover>> {
    let zv = VarSet::new(vec!["z"])?;
    let wv = VarSet::new(vec!["w"])?;
    let mut fwd = BTreeMap::new();
    fwd.insert("w".to_string(), parse_expression("1/z", &zv, field)?);
    let mut bwd = BTreeMap::new();
    bwd.insert("z".to_string(), parse_expression("1/w", &wv, field)?);
    Cover::new(
        vec![Chart { index: 0, vars: zv }, Chart { index: 1, vars: wv }],
        vec![
            CoordinateChange {
                from: 0,
                to: 1,
                assignment: fwd,
            },
            CoordinateChange {
                from: 1,
                to: 0,
                assignment: bwd,
            },
        ],
        field,
        None,
    )
}

/// `O(d)` on the projective line: `g_01 = z^d`.
pub fn o_d_cp1(d: i64, field: FieldId) -> Result<BundlePresentation> {
    let cover = cp1_cover(field)?;
    let zv = cover.chart(0)?.vars.clone();
    let z = RationalFunction::variable(0, zv, field);
    let g = z.powi(d)?;
    let mut transitions = BTreeMap::new();
    transitions.insert((0, 1), FuncMatrix::from_rows(vec![vec![g]])?);
    BundlePresentation::new(cover, 1, transitions, true)
}

/// The `n+1`-chart cover of projective `n`-space in homogeneous-ratio
/// coordinates: chart `i` has variables `x_m` (`m != i`) standing for
/// `X_m / X_i`.
pub fn cpn_cover(n: usize, field: FieldId) -> Result<Arc<Cover>> {
    if n < 1 {
        return Err(Error::InvalidParameters(
            "projective space needs n >= 1".into(),
        ));
    }
    let var_names = |i: usize| -> Vec<String> {
        (0..=n)
            .filter(|&m| m != i)
            .map(|m| format!("x{m}"))
            .collect()
    };
    let charts: Vec<Chart> = (0..=n)
        .map(|i| {
            Ok(Chart {
                index: i,
                vars: VarSet::new(var_names(i))?,
            })
        })
        .collect::<Result<_>>()?;
    let mut changes = Vec::new();
    for i in 0..=n {
        let from_vars = charts[i].vars.clone();
        for j in 0..=n {
            if i == j {
                continue;
            }
            // x_m^{(j)} = X_m/X_j = x_m^{(i)} / x_j^{(i)}, with x_i^{(i)} = 1.
            let xj = format!("x{j}");
            let mut assignment = BTreeMap::new();
            for m in 0..=n {
                if m == j {
                    continue;
                }
                let expr = if m == i {
                    format!("1/{xj}")
                } else {
                    format!("x{m}/{xj}")
                };
                assignment.insert(format!("x{m}"), parse_expression(&expr, &from_vars, field)?);
            }
            changes.push(CoordinateChange {
                from: i,
                to: j,
                assignment,
            });
        }
    }
    Cover::new(charts, changes, field, None)
}

/// `O(d)` on projective `n`-space: `g_ij = (X_j / X_i)^d = (x_j)^d` in
/// chart-`i` coordinates.
pub fn o_d_cpn(n: usize, d: i64, field: FieldId) -> Result<BundlePresentation> {
    let cover = cpn_cover(n, field)?;
    let mut transitions = BTreeMap::new();
    for i in 0..=n {
        let vars = cover.chart(i)?.vars.clone();
        for j in i + 1..=n {
            let idx = vars
                .index_of(&format!("x{j}"))
                .expect("chart i carries x_j for j != i");
            let ratio = RationalFunction::variable(idx, vars.clone(), field);
            let g = ratio.powi(d)?;
            transitions.insert((i, j), FuncMatrix::from_rows(vec![vec![g]])?);
        }
    }
    BundlePresentation::new(cover, 1, transitions, true)
}

/// Block-diagonal direct sum of presentations over one shared cover.
pub fn direct_sum(summands: &[BundlePresentation]) -> Result<BundlePresentation> {
    let first = summands
        .first()
        .ok_or_else(|| Error::InvalidParameters("direct sum of nothing".into()))?;
    let cover = first.cover().clone();
    let field = cover.field();
    let total_rank: usize = summands.iter().map(BundlePresentation::rank).sum();
    for s in summands {
        if !crate::cech::covers_match(s.cover(), &cover) {
            return Err(Error::WrongCover(
                "direct summands live on different covers".into(),
            ));
        }
    }
    let mut transitions: BTreeMap<(usize, usize), FuncMatrix> = BTreeMap::new();
    for pair in first.stored_transitions().keys() {
        let vars = cover.chart(pair.0)?.vars.clone();
        let zero = RationalFunction::zero(vars.clone(), field);
        let mut rows = vec![vec![zero; total_rank]; total_rank];
        let mut offset = 0;
        for s in summands {
            let block = s
                .stored_transitions()
                .get(pair)
                .ok_or(Error::PairNotInNerve(pair.0, pair.1))?;
            for r in 0..s.rank() {
                for c in 0..s.rank() {
                    rows[offset + r][offset + c] = block.get(r, c).clone();
                }
            }
            offset += s.rank();
        }
        transitions.insert(*pair, FuncMatrix::from_rows(rows)?);
    }
    let flag = summands.iter().all(BundlePresentation::flag);
    BundlePresentation::new(cover, total_rank, transitions, flag)
}

/// Upper-triangular extension on the projective line: diagonal `z^{d_i}`,
/// strict upper entries given as expressions in `z` (row-major).
pub fn triangular_extension(
    diag: &[i64],
    offdiag: &[String],
    field: FieldId,
) -> Result<BundlePresentation> {
    let rank = diag.len();
    if rank == 0 {
        return Err(Error::InvalidParameters("empty diagonal".into()));
    }
    let expected = rank * (rank - 1) / 2;
    if offdiag.len() != expected {
        return Err(Error::InvalidParameters(format!(
            "need {expected} strict upper entries for rank {rank}, got {}",
            offdiag.len()
        )));
    }
    let cover = cp1_cover(field)?;
    let zv = cover.chart(0)?.vars.clone();
    let z = RationalFunction::variable(0, zv.clone(), field);
    let mut rows = vec![vec![RationalFunction::zero(zv.clone(), field); rank]; rank];
    let mut off = offdiag.iter();
    for i in 0..rank {
        rows[i][i] = z.powi(diag[i])?;
        for j in i + 1..rank {
            rows[i][j] = parse_expression(off.next().expect("counted"), &zv, field)?;
        }
    }
    let mut transitions = BTreeMap::new();
    transitions.insert((0, 1), FuncMatrix::from_rows(rows)?);
    BundlePresentation::new(cover, rank, transitions, true)
}

/// True when the cover is the canonical projective-line cover built by
/// [`cp1_cover`].
pub fn is_cp1_cover(cover: &Cover) -> bool {
    let canonical = match cp1_cover(cover.field()) {
        Ok(c) => c,
        Err(_) => return false,
    };
    cover == canonical.as_ref()
}

/// The coefficient of `z^{-1}` in the `dz` part of the single `(0,1)`
/// component: the degree pairing on the projective line, with the formal
/// `2 pi sqrt(-1)` factor stripped by the normalization tag.
pub fn cp1_degree(result: &TInvariantResult) -> Result<Scalar> {
    let cover = result.cochain.cover();
    if !is_cp1_cover(cover) {
        return Err(Error::WrongCover(
            "degree pairing is defined on the canonical two-chart projective line".into(),
        ));
    }
    if result.k != 1 {
        return Err(Error::InvalidParameters(format!(
            "degree pairing needs the degree-1 invariant, got k = {}",
            result.k
        )));
    }
    let component = result.cochain.component(&[0, 1])?;
    let coeff = component.coefficient(&[0]);
    coeff.laurent_coefficient("z", -1)
}

/// Parses catalog references like `o_d_cp1(3)`, `o_d_cpn(2,1)`,
/// `direct_sum(2,3)`, or `triangular_extension(1,2;x)` (diagonal exponents,
/// then `;`, then upper entries).
pub fn example_by_name(spec: &str, field: FieldId) -> Result<BundlePresentation> {
    let spec = spec.trim();
    let open = spec
        .find('(')
        .ok_or_else(|| Error::InvalidParameters(format!("expected `name(args)`, got `{spec}`")))?;
    if !spec.ends_with(')') {
        return Err(Error::InvalidParameters(format!(
            "expected `name(args)`, got `{spec}`"
        )));
    }
    let name = &spec[..open];
    let args = &spec[open + 1..spec.len() - 1];
    let ints = |s: &str| -> Result<Vec<i64>> {
        if s.trim().is_empty() {
            return Ok(Vec::new());
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::InvalidParameters(format!("expected integer, got `{t}`")))
            })
            .collect()
    };
    match name {
        "o_d_cp1" => {
            let v = ints(args)?;
            if v.len() != 1 {
                return Err(Error::InvalidParameters("o_d_cp1 takes one integer".into()));
            }
            o_d_cp1(v[0], field)
        }
        "o_d_cpn" => {
            let v = ints(args)?;
            if v.len() != 2 || v[0] < 1 {
                return Err(Error::InvalidParameters("o_d_cpn takes (n >= 1, d)".into()));
            }
            o_d_cpn(v[0] as usize, v[1], field)
        }
        "direct_sum" => {
            let v = ints(args)?;
            if v.is_empty() {
                return Err(Error::InvalidParameters(
                    "direct_sum takes line degrees".into(),
                ));
            }
            let summands: Result<Vec<BundlePresentation>> =
                v.iter().map(|&d| o_d_cp1(d, field)).collect();
            direct_sum(&summands?)
        }
        "triangular_extension" => {
            let (diag_part, off_part) = match args.split_once(';') {
                Some((a, b)) => (a, b),
                None => (args, ""),
            };
            let diag = ints(diag_part)?;
            let offdiag: Vec<String> = if off_part.trim().is_empty() {
                Vec::new()
            } else {
                off_part.split(',').map(|s| s.trim().to_string()).collect()
            };
            triangular_extension(&diag, &offdiag, field)
        }
        other => Err(Error::InvalidParameters(format!(
            "unknown example `{other}`"
        ))),
    }
}

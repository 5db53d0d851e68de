//! The invariant cocycles of a transition presentation.
//!
//! For a degree `k` and a strictly increasing tuple `(i_1, ..., i_{k+1})`,
//! the component is the signed permutation sum
//!
//! ```text
//! t = sum over sigma in S_{k+1} of sgn(sigma)/(k+1)! *
//!     tr( prod_{l=1..k} g^{-1}_{i_sigma(l) i_sigma(k+1)} dg_{i_sigma(l) i_sigma(k+1)} )
//! ```
//!
//! with matrix entries multiplied by wedge products and everything pulled to
//! the tuple's anchor chart. The assembled cochain is a cocycle, its class
//! is independent of the chosen trivialization, and the change under a gauge
//! `h` is the coboundary of an explicitly constructed witness cochain built
//! from the same permutation sum bucketed by where permutations send the
//! distinguished slots.
//!
//! Fast paths (the rank-one `dlog` chain and the flag diagonal split) are
//! cross-checked against the generic sum in the test batteries rather than
//! replacing it.

use std::collections::BTreeMap;
use std::fmt;

use crate::cech::CechCochain;
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::forms::DifferentialForm;
use crate::geometry::{BundlePresentation, GaugeTransformation};
use crate::matrix::{FormMatrix, FuncMatrix};

/// Formal marker `1/(k! (2 pi sqrt(-1))^k)`; the transcendental factor is
/// never evaluated, only carried as a tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizationTag {
    pub degree: usize,
}

impl fmt::Display for NormalizationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/({}!*(2*pi*sqrt(-1))^{})", self.degree, self.degree)
    }
}

#[derive(Debug, Clone)]
pub struct TInvariantResult {
    pub cochain: CechCochain,
    pub k: usize,
    pub refined: bool,
    /// Per-component record of whether the exterior derivative vanishes.
    /// Diagnostic for the generic invariant; mandatory-true for refined ones.
    pub dclosed_report: BTreeMap<Vec<usize>, bool>,
    pub normalization_tag: NormalizationTag,
}

#[derive(Debug, Clone)]
pub struct WitnessResult {
    /// Degree `k-1` cochain of `k`-forms.
    pub witness: CechCochain,
    pub verified: bool,
}

/// All permutations of `0..n` with their parity (`true` = odd).
pub fn permutations_with_sign(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn rec(items: &mut Vec<usize>, k: usize, parity: bool, out: &mut Vec<(Vec<usize>, bool)>) {
        if k == items.len() {
            out.push((items.clone(), parity));
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            let flip = i != k;
            rec(items, k + 1, parity ^ flip, out);
            items.swap(k, i);
        }
    }
    rec(&mut items, 0, false, &mut out);
    out
}

/// The `g_ab^{-1} dg_ab` one-forms of a tuple, pulled into its anchor chart
/// and cached per ordered pair.
struct TupleContext {
    a: BTreeMap<(usize, usize), FormMatrix>,
}

impl TupleContext {
    fn build(bundle: &BundlePresentation, tuple: &[usize]) -> Result<TupleContext> {
        let anchor = tuple[0];
        let mut g = BTreeMap::new();
        let mut a = BTreeMap::new();
        for (p, &x) in tuple.iter().enumerate() {
            for &y in &tuple[p + 1..] {
                let fwd = bundle.transition_in(x, y, anchor)?;
                let bwd = fwd.inverse()?;
                g.insert((x, y), fwd);
                g.insert((y, x), bwd);
            }
        }
        for (&(x, y), m) in &g {
            let one_form = g[&(y, x)].as_forms().mul(&m.d())?;
            a.insert((x, y), one_form);
        }
        Ok(TupleContext { a })
    }
}

fn check_increasing_nerve(bundle: &BundlePresentation, tuple: &[usize]) -> Result<()> {
    if tuple.is_empty() || tuple.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameters(format!(
            "tuple must be strictly increasing and nonempty, got {tuple:?}"
        )));
    }
    if !bundle.cover().tuple_in_nerve(tuple) {
        return Err(Error::TupleNotInNerve(tuple.to_vec()));
    }
    Ok(())
}

/// The degree-`k` component on one strictly increasing `(k+1)`-tuple,
/// evaluated by the full permutation sum in anchor coordinates.
pub fn t_component(bundle: &BundlePresentation, tuple: &[usize]) -> Result<DifferentialForm> {
    check_increasing_nerve(bundle, tuple)?;
    let k = tuple.len() - 1;
    let field = bundle.field();
    let weight = Scalar::factorial_inverse(k as u64 + 1, field)?;
    let anchor_vars = bundle.cover().chart(tuple[0])?.vars.clone();
    if k == 0 {
        // Empty product: the trace of the identity.
        let rank = Scalar::from_i64(bundle.rank() as i64, field);
        let c = crate::ratfunc::RationalFunction::constant(rank, anchor_vars);
        return Ok(DifferentialForm::from_function(c));
    }
    let ctx = TupleContext::build(bundle, tuple)?;
    let mut acc = DifferentialForm::zero(anchor_vars, field);
    for (perm, odd) in permutations_with_sign(k + 1) {
        let last = tuple[perm[k]];
        let mut product: Option<FormMatrix> = None;
        for &slot in &perm[..k] {
            let factor = &ctx.a[&(tuple[slot], last)];
            product = Some(match product {
                None => factor.clone(),
                Some(p) => p.mul(factor)?,
            });
        }
        let term = product.expect("k >= 1").trace()?;
        acc = if odd { acc.sub(&term) } else { acc.add(&term) };
    }
    Ok(scale_form(&acc, &weight))
}

fn scale_form(form: &DifferentialForm, c: &Scalar) -> DifferentialForm {
    let f = crate::ratfunc::RationalFunction::constant(c.clone(), form.vars().clone());
    form.scale(&f)
}

fn ensure_valid_cocycle(bundle: &BundlePresentation) -> Result<()> {
    let report = bundle.validate_cocycle()?;
    if report.is_valid() {
        Ok(())
    } else {
        Err(Error::CocycleCheckFailed(report.failing_triples()))
    }
}

/// Checks the characteristic constraint for degree `k`: the closedness and
/// gauge-independence arguments divide by everything up to `(k+2)!`.
fn ensure_characteristic(bundle: &BundlePresentation, k: usize) -> Result<()> {
    Scalar::factorial_inverse(k as u64 + 2, bundle.field()).map(|_| ())
}

/// Assembles the degree-`k` invariant cochain over every nerve tuple and
/// certifies it is a cocycle.
pub fn t_invariant(bundle: &BundlePresentation, k: usize) -> Result<TInvariantResult> {
    let tuples = bundle.cover().tuples_of_len(k + 1);
    if tuples.is_empty() {
        let cochain = CechCochain::zero(bundle.cover().clone(), k, k);
        return Ok(TInvariantResult {
            cochain,
            k,
            refined: false,
            dclosed_report: BTreeMap::new(),
            normalization_tag: NormalizationTag { degree: k },
        });
    }
    ensure_characteristic(bundle, k)?;
    ensure_valid_cocycle(bundle)?;
    let mut components = BTreeMap::new();
    for t in tuples {
        let form = t_component(bundle, &t)?;
        if !form.is_zero() {
            components.insert(t, form);
        }
    }
    let cochain = CechCochain::from_components(bundle.cover().clone(), k, k, components)?;
    let (closed, residuals) = cochain.is_cocycle()?;
    if !closed {
        return Err(Error::CocycleCheckFailed(residuals));
    }
    let dclosed_report = cochain.d_componentwise();
    Ok(TInvariantResult {
        cochain,
        k,
        refined: false,
        dclosed_report,
        normalization_tag: NormalizationTag { degree: k },
    })
}

/// The refined first invariant: components `tr(g^{-1} dg)`, certified
/// d-closed (so they lie in the sheaf of exact one-forms).
pub fn refined_first(bundle: &BundlePresentation) -> Result<TInvariantResult> {
    Scalar::factorial_inverse(2, bundle.field())?;
    let mut result = t_invariant(bundle, 1)?;
    for (tuple, ok) in &result.dclosed_report {
        if !ok {
            // tr(A ^ A) = 0 makes this unconditional; a failure is a bug.
            return Err(Error::DClosedCheckFailed(tuple.clone()));
        }
    }
    result.refined = true;
    Ok(result)
}

/// The refined higher invariant for a flag presentation: the same cochain
/// with a per-component d-closedness certificate that must pass.
pub fn flag_refined(bundle: &BundlePresentation, k: usize) -> Result<TInvariantResult> {
    if !bundle.flag() {
        return Err(Error::NotFlagPresented);
    }
    let mut result = t_invariant(bundle, k)?;
    for (tuple, ok) in &result.dclosed_report {
        if !ok {
            return Err(Error::DClosedCheckFailed(tuple.clone()));
        }
    }
    result.refined = true;
    Ok(result)
}

/// Rank-one collapse: the component is the chain
/// `dlog g_{i_1 i_2} ^ dlog g_{i_2 i_3} ^ ... ^ dlog g_{i_k i_{k+1}}`,
/// computed without the permutation sum. Must agree with [`t_component`].
pub fn line_fast_component(
    bundle: &BundlePresentation,
    tuple: &[usize],
) -> Result<DifferentialForm> {
    if bundle.rank() != 1 {
        return Err(Error::NotRankOne(bundle.rank()));
    }
    check_increasing_nerve(bundle, tuple)?;
    if tuple.len() < 2 {
        return Err(Error::InvalidParameters(
            "rank-one fast path needs a tuple of length at least 2".into(),
        ));
    }
    let anchor = tuple[0];
    let field = bundle.field();
    let anchor_vars = bundle.cover().chart(anchor)?.vars.clone();
    let mut acc: Option<DifferentialForm> = None;
    for pair in tuple.windows(2) {
        let g = bundle.transition_in(pair[0], pair[1], anchor)?;
        let entry = g.get(0, 0);
        let dlog = DifferentialForm::from_function(entry.inv()?)
            .wedge(&DifferentialForm::from_function(entry.clone()).exterior_derivative())?;
        acc = Some(match acc {
            None => dlog,
            Some(a) => a.wedge(&dlog)?,
        });
    }
    Ok(acc.unwrap_or_else(|| DifferentialForm::zero(anchor_vars, field)))
}

/// Splits a flag presentation into its rank-one diagonal quotients.
pub fn flag_decompose(bundle: &BundlePresentation) -> Result<Vec<BundlePresentation>> {
    if !bundle.flag() {
        return Err(Error::NotFlagPresented);
    }
    let mut out = Vec::with_capacity(bundle.rank());
    for j in 0..bundle.rank() {
        let mut transitions = BTreeMap::new();
        for ((a, b), m) in bundle.stored_transitions() {
            let entry = m.get(j, j).clone();
            transitions.insert((*a, *b), FuncMatrix::from_rows(vec![vec![entry]])?);
        }
        out.push(BundlePresentation::new(
            bundle.cover().clone(),
            1,
            transitions,
            true,
        )?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Gauge coboundary witness.

/// Everything needed to evaluate the witness sum on one tuple, pulled into
/// the tuple's anchor coordinates and fully precomputed: the per-term loops
/// only multiply cached matrices.
struct WitnessContext {
    /// `g_ab^{-1} dg_ab`.
    a: BTreeMap<(usize, usize), FormMatrix>,
    /// `-h_a dh_a^{-1}`.
    neg_hdh: BTreeMap<usize, FormMatrix>,
    /// `g_ab^{-1} (h_a dh_a^{-1}) g_ab` for ordered pairs (equal to `hdh`
    /// on the diagonal).
    conj: BTreeMap<(usize, usize), FormMatrix>,
    /// `-(g_ab) d(g_ab^{-1})` for ordered pairs.
    x: BTreeMap<(usize, usize), FormMatrix>,
}

impl WitnessContext {
    fn build(
        bundle: &BundlePresentation,
        h: &GaugeTransformation,
        tuple: &[usize],
    ) -> Result<WitnessContext> {
        let anchor = tuple[0];
        let field = bundle.field();
        let anchor_vars = bundle.cover().chart(anchor)?.vars.clone();
        let mut g = BTreeMap::new();
        for (p, &x) in tuple.iter().enumerate() {
            g.insert(
                (x, x),
                FuncMatrix::identity(bundle.rank(), anchor_vars.clone(), field),
            );
            for &y in &tuple[p + 1..] {
                let fwd = bundle.transition_in(x, y, anchor)?;
                let bwd = fwd.inverse()?;
                g.insert((x, y), fwd);
                g.insert((y, x), bwd);
            }
        }
        let mut a = BTreeMap::new();
        let mut x_factors = BTreeMap::new();
        for (&(x, y), m) in &g {
            if x != y {
                a.insert((x, y), g[&(y, x)].as_forms().mul(&m.d())?);
                x_factors.insert((x, y), m.as_forms().mul(&g[&(y, x)].d())?.neg());
            }
        }
        let mut hdh = BTreeMap::new();
        let mut neg_hdh = BTreeMap::new();
        for &x in tuple {
            let chart_vars = bundle.cover().chart(x)?.vars.clone();
            let hx = h.component(x, bundle.rank(), &chart_vars, field);
            let hx = bundle.cover().pull_matrix(&hx, x, anchor)?;
            let hx_inv = hx.inverse()?;
            let m = hx.as_forms().mul(&hx_inv.d())?;
            neg_hdh.insert(x, m.neg());
            hdh.insert(x, m);
        }
        let mut conj = BTreeMap::new();
        for &x in tuple {
            for &y in tuple {
                let value = if x == y {
                    hdh[&x].clone()
                } else {
                    hdh[&x].lmul_func(&g[&(y, x)])?.rmul_func(&g[&(x, y)])?
                };
                conj.insert((x, y), value);
            }
        }
        Ok(WitnessContext {
            a,
            neg_hdh,
            conj,
            x: x_factors,
        })
    }
}

/// Enumerates the subsets of `slots` as sorted vectors (including the empty
/// set).
fn subsets(slots: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(1 << slots.len());
    for mask in 0u32..(1 << slots.len()) {
        let mut s = Vec::new();
        for (i, &v) in slots.iter().enumerate() {
            if mask >> i & 1 == 1 {
                s.push(v);
            }
        }
        out.push(s);
    }
    out
}

/// The witness component on one strictly increasing `k`-tuple, in anchor
/// coordinates.
///
/// The tuple is embedded as positions `2..k+2` of an ambient `(k+1)`-tuple
/// whose first position is omitted; the omitted index never occurs in any
/// factor, so the sum depends only on the tuple itself. Permutations are
/// enumerated once and bucketed by which slot they send to the omitted
/// position.
fn witness_component(
    bundle: &BundlePresentation,
    h: &GaugeTransformation,
    tuple: &[usize],
) -> Result<DifferentialForm> {
    let k = tuple.len();
    let field = bundle.field();
    let anchor_vars = bundle.cover().chart(tuple[0])?.vars.clone();
    let ctx = WitnessContext::build(bundle, h, tuple)?;
    let weight = Scalar::factorial_inverse(k as u64 + 1, field)?;
    // Permutations act on ambient positions 0..k (position 0 is the omitted
    // one; position p >= 1 holds tuple[p-1]). Product slots are 0..k-1 and
    // the base slot is k.
    let perms = permutations_with_sign(k + 1);
    let slot_list: Vec<usize> = (0..k).collect();
    let mut acc = DifferentialForm::zero(anchor_vars.clone(), field);
    let idx = |position: usize| -> usize { tuple[position - 1] };

    for (perm, odd) in &perms {
        let sign = *odd;
        // Family 1: a distinguished slot v carries -h_base dh_base^{-1} and
        // must be sent to the omitted position; any disjoint slot subset u
        // carries conjugated h-factors. Base point: sigma(k).
        for v in 0..k {
            if perm[v] != 0 {
                continue;
            }
            let base = idx(perm[k]);
            let free: Vec<usize> = (0..k).filter(|&l| l != v).collect();
            for u in subsets(&free) {
                let mut factors: Vec<&FormMatrix> = Vec::with_capacity(k);
                for l in 0..k {
                    let f = if l == v {
                        &ctx.neg_hdh[&base]
                    } else if u.contains(&l) {
                        &ctx.conj[&(idx(perm[l]), base)]
                    } else {
                        &ctx.a[&(idx(perm[l]), base)]
                    };
                    factors.push(f);
                }
                accumulate(&mut acc, &factors, sign)?;
            }
        }
        // Families 2 and 3: the base is rebased to sigma(u_1) for a nonempty
        // slot subset u (u_1 its minimum). Either sigma(k) is omitted (no
        // marked slot), or a marked slot x outside u is omitted and carries
        // -g_{u_1, sigma(k)} d(g^{-1}).
        for u in subsets(&slot_list) {
            if u.is_empty() {
                continue;
            }
            let u1 = u[0];
            if perm[k] == 0 {
                let base2 = idx(perm[u1]);
                let mut factors: Vec<&FormMatrix> = Vec::with_capacity(k);
                for l in 0..k {
                    let f = if u.contains(&l) {
                        &ctx.conj[&(idx(perm[l]), base2)]
                    } else {
                        &ctx.a[&(idx(perm[l]), base2)]
                    };
                    factors.push(f);
                }
                accumulate(&mut acc, &factors, sign)?;
            } else {
                for x in 0..k {
                    if u.contains(&x) || perm[x] != 0 {
                        continue;
                    }
                    let base2 = idx(perm[u1]);
                    let tail = idx(perm[k]);
                    let mut factors: Vec<&FormMatrix> = Vec::with_capacity(k);
                    for l in 0..k {
                        let f = if u.contains(&l) {
                            &ctx.conj[&(idx(perm[l]), base2)]
                        } else if l == x {
                            &ctx.x[&(base2, tail)]
                        } else {
                            &ctx.a[&(idx(perm[l]), base2)]
                        };
                        factors.push(f);
                    }
                    accumulate(&mut acc, &factors, sign)?;
                }
            }
        }
    }
    Ok(scale_form(&acc, &weight))
}

fn accumulate(acc: &mut DifferentialForm, factors: &[&FormMatrix], odd: bool) -> Result<()> {
    if factors.iter().any(|f| f.is_zero()) {
        return Ok(());
    }
    let mut product = factors[0].clone();
    for f in &factors[1..] {
        product = product.mul(f)?;
        if product.is_zero() {
            return Ok(());
        }
    }
    let term = product.trace()?;
    *acc = if odd { acc.sub(&term) } else { acc.add(&term) };
    Ok(())
}

/// Builds the gauge witness `s` with `delta s = f_k(h^{-1} g h) - f_k(g)`,
/// verifying the identity exactly before returning.
pub fn gauge_witness(
    bundle: &BundlePresentation,
    h: &GaugeTransformation,
    k: usize,
) -> Result<WitnessResult> {
    if k == 0 {
        return Err(Error::InvalidParameters(
            "witness degree k must be >= 1".into(),
        ));
    }
    ensure_characteristic(bundle, k)?;
    let before = t_invariant(bundle, k)?;
    let gauged = bundle.apply_gauge(h)?;
    let after = t_invariant(&gauged, k)?;
    let difference = after.cochain.sub(&before.cochain)?;

    let mut components = BTreeMap::new();
    for tuple in bundle.cover().tuples_of_len(k) {
        let form = witness_component(bundle, h, &tuple)?;
        if !form.is_zero() {
            components.insert(tuple, form);
        }
    }
    let witness = CechCochain::from_components(bundle.cover().clone(), k - 1, k, components)?;
    let delta = witness.coboundary()?;
    if delta != difference {
        return Err(Error::WitnessVerificationFailed);
    }
    Ok(WitnessResult {
        witness,
        verified: true,
    })
}

// ---------------------------------------------------------------------------
// Formal Chern character assembly.

#[derive(Debug, Clone)]
pub enum ChernDegree {
    /// The degree-0 convention: the constant 1 (or the rank on request).
    Constant(Scalar),
    /// A degree whose component cochain vanishes; emitted as zero even when
    /// the characteristic divides `k!`.
    Zero,
    /// A nonzero degree: `scale = 1/k!` in the field, times the invariant.
    Cochain {
        scale: Scalar,
        result: TInvariantResult,
    },
}

#[derive(Debug, Clone)]
pub struct ChernEntry {
    pub k: usize,
    pub tag: NormalizationTag,
    pub value: ChernDegree,
}

/// The formal graded list `sum_k 1/(k! (2 pi sqrt(-1))^k) f_k`, degree 0
/// being the constant 1 by convention (`rank_degree_zero` substitutes the
/// rank instead).
pub fn chern_character_formal(
    bundle: &BundlePresentation,
    k_max: usize,
    rank_degree_zero: bool,
) -> Result<Vec<ChernEntry>> {
    let field = bundle.field();
    let mut out = Vec::with_capacity(k_max + 1);
    let degree_zero = if rank_degree_zero {
        Scalar::from_i64(bundle.rank() as i64, field)
    } else {
        Scalar::one(field)
    };
    out.push(ChernEntry {
        k: 0,
        tag: NormalizationTag { degree: 0 },
        value: ChernDegree::Constant(degree_zero),
    });
    for k in 1..=k_max {
        let tag = NormalizationTag { degree: k };
        if bundle.cover().tuples_of_len(k + 1).is_empty() {
            out.push(ChernEntry {
                k,
                tag,
                value: ChernDegree::Zero,
            });
            continue;
        }
        let result = t_invariant(bundle, k)?;
        if result.cochain.is_zero() {
            out.push(ChernEntry {
                k,
                tag,
                value: ChernDegree::Zero,
            });
            continue;
        }
        let scale = Scalar::factorial_inverse(k as u64, field)?;
        out.push(ChernEntry {
            k,
            tag,
            value: ChernDegree::Cochain { scale, result },
        });
    }
    Ok(out)
}

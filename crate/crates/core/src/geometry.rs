//! Covers, charts, coordinate changes, and bundle presentations.
//!
//! A cover is the finite combinatorial shadow of a space: an ordered set of
//! charts, each with its own coordinates, rational coordinate changes
//! between them, and a declared nerve listing which index tuples have
//! nonempty intersection (all of them by default). Every unordered tuple is
//! anchored at its minimal chart: forms and matrices on the overlap
//! `U_{i_1 < ... < i_p}` are always expressed in chart `i_1` coordinates.
//!
//! A bundle presentation adds a rank, a transition matrix `g_ij` for each
//! pair `i < j` (stored in chart-`i` coordinates; the reverse direction is
//! the exact inverse), and an optional flag marker asserting the transitions
//! are upper triangular.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldId;
use crate::forms::DifferentialForm;
use crate::matrix::FuncMatrix;
use crate::parse::parse_expression;
use crate::poly::VarSet;
use crate::ratfunc::RationalFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub index: usize,
    pub vars: VarSet,
}

/// Rational map expressing the `to` chart's coordinates in terms of the
/// `from` chart's coordinates. Pulling a form "to `from`" substitutes these
/// expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateChange {
    pub from: usize,
    pub to: usize,
    pub assignment: BTreeMap<String, RationalFunction>,
}

#[derive(Debug, Clone)]
pub struct Cover {
    charts: BTreeMap<usize, Chart>,
    changes: BTreeMap<(usize, usize), CoordinateChange>,
    field: FieldId,
    /// Downward-closed set of declared tuples; `None` means every tuple.
    nerve: Option<BTreeSet<Vec<usize>>>,
    /// Pairs whose change is the identity on a shared coordinate system;
    /// pullbacks along them are skipped.
    identity_changes: BTreeSet<(usize, usize)>,
}

impl PartialEq for Cover {
    fn eq(&self, other: &Self) -> bool {
        self.charts == other.charts
            && self.changes == other.changes
            && self.field == other.field
            && self.nerve == other.nerve
    }
}

impl Cover {
    pub fn new(
        charts: Vec<Chart>,
        changes: Vec<CoordinateChange>,
        field: FieldId,
        nerve: Option<Vec<Vec<usize>>>,
    ) -> Result<Arc<Cover>> {
        let mut chart_map = BTreeMap::new();
        for ch in charts {
            if ch.vars.is_empty() {
                return Err(Error::InvalidParameters(format!(
                    "chart {} has no coordinates",
                    ch.index
                )));
            }
            if chart_map.insert(ch.index, ch).is_some() {
                return Err(Error::InvalidParameters("duplicate chart index".into()));
            }
        }
        let mut change_map = BTreeMap::new();
        for c in changes {
            if !chart_map.contains_key(&c.from) {
                return Err(Error::UnknownChart(c.from));
            }
            if !chart_map.contains_key(&c.to) {
                return Err(Error::UnknownChart(c.to));
            }
            let to_vars = &chart_map[&c.to].vars;
            let from_vars = &chart_map[&c.from].vars;
            for name in to_vars.names() {
                let rf = c
                    .assignment
                    .get(name)
                    .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                if rf.vars() != from_vars || rf.field() != field {
                    return Err(Error::ChartMismatch);
                }
            }
            if change_map.insert((c.from, c.to), c).is_some() {
                return Err(Error::InvalidParameters(
                    "duplicate coordinate change".into(),
                ));
            }
        }
        let nerve = match nerve {
            None => None,
            Some(tuples) => {
                let mut closed = BTreeSet::new();
                for t in tuples {
                    let mut t = t;
                    t.sort_unstable();
                    t.dedup();
                    for idx in &t {
                        if !chart_map.contains_key(idx) {
                            return Err(Error::UnknownChart(*idx));
                        }
                    }
                    // Downward closure: a nonempty intersection makes every
                    // sub-intersection nonempty.
                    for mask in 1u32..(1 << t.len()) {
                        let sub: Vec<usize> = t
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| mask >> i & 1 == 1)
                            .map(|(_, &v)| v)
                            .collect();
                        closed.insert(sub);
                    }
                }
                Some(closed)
            }
        };
        let mut identity_changes = BTreeSet::new();
        for ((i, j), c) in &change_map {
            let from_vars = &chart_map[i].vars;
            let to_vars = &chart_map[j].vars;
            if from_vars != to_vars {
                continue;
            }
            let identical = to_vars.names().iter().enumerate().all(|(idx, name)| {
                c.assignment
                    .get(name)
                    .map(|rf| rf == &RationalFunction::variable(idx, from_vars.clone(), field))
                    .unwrap_or(false)
            });
            if identical {
                identity_changes.insert((*i, *j));
            }
        }
        let cover = Cover {
            charts: chart_map,
            changes: change_map,
            field,
            nerve,
            identity_changes,
        };
        cover.validate_inverse_pairs()?;
        Ok(Arc::new(cover))
    }

    /// A cover of `n` charts sharing one coordinate system, with identity
    /// changes in both directions for every pair.
    pub fn trivial(n: usize, vars: VarSet, field: FieldId) -> Arc<Cover> {
        let charts: Vec<Chart> = (0..n)
            .map(|i| Chart {
                index: i,
                vars: vars.clone(),
            })
            .collect();
        let identity: BTreeMap<String, RationalFunction> = vars
            .names()
            .iter()
            .enumerate()
            .map(|(i, n)| {
                (
                    n.clone(),
                    RationalFunction::variable(i, vars.clone(), field),
                )
            })
            .collect();
        let mut changes = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    changes.push(CoordinateChange {
                        from: i,
                        to: j,
                        assignment: identity.clone(),
                    });
                }
            }
        }
        Cover::new(charts, changes, field, None).expect("trivial cover is well-formed")
    }

    fn validate_inverse_pairs(&self) -> Result<()> {
        for ((i, j), fwd) in &self.changes {
            if let Some(bwd) = self.changes.get(&(*j, *i)) {
                // Composing j->i after i->j must give back the identity on
                // chart j's coordinates.
                let jvars = &self.charts[j].vars;
                for (name, expr) in &fwd.assignment {
                    let composed = expr.substitute(&bwd.assignment)?;
                    let idx = jvars
                        .index_of(name)
                        .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                    let var = RationalFunction::variable(idx, jvars.clone(), self.field);
                    if composed != var {
                        return Err(Error::InvalidParameters(format!(
                            "coordinate changes {i}->{j}->{i} do not compose to the identity on `{name}`"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn chart(&self, index: usize) -> Result<&Chart> {
        self.charts.get(&index).ok_or(Error::UnknownChart(index))
    }

    pub fn chart_indices(&self) -> Vec<usize> {
        self.charts.keys().copied().collect()
    }

    pub fn num_charts(&self) -> usize {
        self.charts.len()
    }

    pub fn change(&self, from: usize, to: usize) -> Result<&CoordinateChange> {
        self.changes
            .get(&(from, to))
            .ok_or(Error::MissingCoordinateChange { from, to })
    }

    pub fn changes(&self) -> impl Iterator<Item = &CoordinateChange> {
        self.changes.values()
    }

    /// Expresses a form given in chart-`source` coordinates in chart-`target`
    /// coordinates.
    pub fn pull_form(
        &self,
        form: &DifferentialForm,
        source: usize,
        target: usize,
    ) -> Result<DifferentialForm> {
        if source == target {
            return Ok(form.clone());
        }
        let change = self.change(target, source)?;
        if self.identity_changes.contains(&(target, source)) {
            return Ok(form.clone());
        }
        let tvars = self.chart(target)?.vars.clone();
        form.pullback(&change.assignment, &tvars, self.field)
    }

    /// Entrywise version of [`Cover::pull_form`] for function matrices.
    pub fn pull_matrix(&self, m: &FuncMatrix, source: usize, target: usize) -> Result<FuncMatrix> {
        if source == target {
            return Ok(m.clone());
        }
        let change = self.change(target, source)?;
        if self.identity_changes.contains(&(target, source)) {
            return Ok(m.clone());
        }
        m.substitute(&change.assignment)
    }

    pub fn tuple_in_nerve(&self, tuple: &[usize]) -> bool {
        if tuple.iter().any(|i| !self.charts.contains_key(i)) {
            return false;
        }
        match &self.nerve {
            None => true,
            Some(set) => {
                let mut t = tuple.to_vec();
                t.sort_unstable();
                t.dedup();
                t.len() <= 1 || set.contains(&t)
            }
        }
    }

    /// All strictly increasing nerve tuples of the given length.
    pub fn tuples_of_len(&self, len: usize) -> Vec<Vec<usize>> {
        match &self.nerve {
            Some(set) => set.iter().filter(|t| t.len() == len).cloned().collect(),
            None => {
                let idx = self.chart_indices();
                let mut out = Vec::new();
                let mut current = Vec::with_capacity(len);
                fn rec(
                    idx: &[usize],
                    len: usize,
                    start: usize,
                    current: &mut Vec<usize>,
                    out: &mut Vec<Vec<usize>>,
                ) {
                    if current.len() == len {
                        out.push(current.clone());
                        return;
                    }
                    for p in start..idx.len() {
                        current.push(idx[p]);
                        rec(idx, len, p + 1, current, out);
                        current.pop();
                    }
                }
                rec(&idx, len, 0, &mut current, &mut out);
                out
            }
        }
    }

    pub fn declared_nerve(&self) -> Option<Vec<Vec<usize>>> {
        self.nerve.as_ref().map(|s| s.iter().cloned().collect())
    }
}

/// Per-chart change of trivialization `h_i`; charts without an entry use the
/// identity.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransformation {
    components: BTreeMap<usize, FuncMatrix>,
}

impl GaugeTransformation {
    pub fn new(components: BTreeMap<usize, FuncMatrix>) -> GaugeTransformation {
        GaugeTransformation { components }
    }

    pub fn identity() -> GaugeTransformation {
        GaugeTransformation {
            components: BTreeMap::new(),
        }
    }

    pub fn components(&self) -> &BTreeMap<usize, FuncMatrix> {
        &self.components
    }

    /// `h_i` in chart-`i` coordinates, or the identity when undeclared.
    pub fn component(
        &self,
        index: usize,
        rank: usize,
        vars: &VarSet,
        field: FieldId,
    ) -> FuncMatrix {
        self.components
            .get(&index)
            .cloned()
            .unwrap_or_else(|| FuncMatrix::identity(rank, vars.clone(), field))
    }

    /// The inverse gauge `{h_i^{-1}}`.
    pub fn inverse(&self) -> Result<GaugeTransformation> {
        let mut out = BTreeMap::new();
        for (i, h) in &self.components {
            out.insert(*i, h.inverse()?);
        }
        Ok(GaugeTransformation { components: out })
    }

    pub fn is_flag_compatible(&self) -> bool {
        self.components
            .values()
            .all(FuncMatrix::is_upper_triangular)
    }
}

/// One failing triple of the cocycle condition, with the residual matrix
/// `g_ij g_jk - g_ik` in anchor coordinates.
#[derive(Debug, Clone)]
pub struct CocycleFailure {
    pub triple: Vec<usize>,
    pub residual: FuncMatrix,
}

#[derive(Debug, Clone, Default)]
pub struct CocycleReport {
    pub failures: Vec<CocycleFailure>,
}

impl CocycleReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failing_triples(&self) -> Vec<Vec<usize>> {
        self.failures.iter().map(|f| f.triple.clone()).collect()
    }
}

#[derive(Debug, Clone)]
pub struct BundlePresentation {
    cover: Arc<Cover>,
    rank: usize,
    /// `g_ij` for `i < j`, in chart-`i` coordinates.
    transitions: BTreeMap<(usize, usize), FuncMatrix>,
    flag: bool,
}

impl BundlePresentation {
    pub fn new(
        cover: Arc<Cover>,
        rank: usize,
        transitions: BTreeMap<(usize, usize), FuncMatrix>,
        flag: bool,
    ) -> Result<BundlePresentation> {
        if rank == 0 {
            return Err(Error::InvalidParameters("rank must be positive".into()));
        }
        for ((i, j), m) in &transitions {
            if i >= j {
                return Err(Error::InvalidParameters(format!(
                    "transition pairs must satisfy i < j, got ({i},{j})"
                )));
            }
            if !cover.tuple_in_nerve(&[*i, *j]) {
                return Err(Error::PairNotInNerve(*i, *j));
            }
            if m.rows() != rank || m.cols() != rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    got: m.rows(),
                });
            }
            let anchor_vars = &cover.chart(*i)?.vars;
            if m.vars() != anchor_vars || m.field() != cover.field() {
                return Err(Error::ChartMismatch);
            }
            if m.det()?.is_zero() {
                return Err(Error::SingularMatrix);
            }
            if flag {
                if !m.is_upper_triangular() {
                    return Err(Error::NotFlagPresented);
                }
                for d in 0..rank {
                    if m.get(d, d).is_zero() {
                        return Err(Error::NotFlagPresented);
                    }
                }
            }
        }
        Ok(BundlePresentation {
            cover,
            rank,
            transitions,
            flag,
        })
    }

    pub fn cover(&self) -> &Arc<Cover> {
        &self.cover
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn flag(&self) -> bool {
        self.flag
    }

    pub fn field(&self) -> FieldId {
        self.cover.field()
    }

    pub fn stored_transitions(&self) -> &BTreeMap<(usize, usize), FuncMatrix> {
        &self.transitions
    }

    fn stored(&self, i: usize, j: usize) -> Result<&FuncMatrix> {
        self.transitions
            .get(&(i, j))
            .ok_or(Error::PairNotInNerve(i, j))
    }

    /// `g_ij` in the anchor (minimal-index) chart's coordinates. `g_ii` is
    /// the identity and `g_ji = g_ij^{-1}`.
    pub fn transition(&self, i: usize, j: usize) -> Result<FuncMatrix> {
        if i == j {
            let vars = self.cover.chart(i)?.vars.clone();
            return Ok(FuncMatrix::identity(self.rank, vars, self.cover.field()));
        }
        if !self.cover.tuple_in_nerve(&[i.min(j), i.max(j)]) {
            return Err(Error::PairNotInNerve(i.min(j), i.max(j)));
        }
        if i < j {
            self.stored(i, j).cloned()
        } else {
            self.stored(j, i)?.inverse()
        }
    }

    /// `g_ij` expressed in the coordinates of `chart`, which must be
    /// connected to the anchor by a declared change.
    pub fn transition_in(&self, i: usize, j: usize, chart: usize) -> Result<FuncMatrix> {
        let g = self.transition(i, j)?;
        self.cover.pull_matrix(&g, i.min(j), chart)
    }

    /// Checks `g_ij g_jk = g_ik` on every declared triple, in the triple's
    /// anchor coordinates. Failures are report entries, not errors.
    pub fn validate_cocycle(&self) -> Result<CocycleReport> {
        let mut report = CocycleReport::default();
        for t in self.cover.tuples_of_len(3) {
            let (i, j, k) = (t[0], t[1], t[2]);
            if !self.transitions.contains_key(&(i, j))
                || !self.transitions.contains_key(&(j, k))
                || !self.transitions.contains_key(&(i, k))
            {
                continue;
            }
            let g_ij = self.transition(i, j)?;
            let g_jk = self.transition_in(j, k, i)?;
            let g_ik = self.transition(i, k)?;
            let residual = g_ij.mul(&g_jk)?.sub(&g_ik)?;
            if !residual.is_zero() {
                report.failures.push(CocycleFailure {
                    triple: t,
                    residual,
                });
            }
        }
        Ok(report)
    }

    /// New presentation with `g~_ij = h_i^{-1} g_ij h_j`, all expressed in
    /// the pair's anchor coordinates.
    pub fn apply_gauge(&self, h: &GaugeTransformation) -> Result<BundlePresentation> {
        for (i, m) in h.components() {
            if m.rows() != self.rank || m.cols() != self.rank {
                return Err(Error::RankMismatch {
                    expected: self.rank,
                    got: m.rows(),
                });
            }
            let vars = &self.cover.chart(*i)?.vars;
            if m.vars() != vars || m.field() != self.cover.field() {
                return Err(Error::ChartMismatch);
            }
            if m.det()?.is_zero() {
                return Err(Error::SingularMatrix);
            }
        }
        let field = self.cover.field();
        let mut transitions = BTreeMap::new();
        for ((i, j), g) in &self.transitions {
            let vars_i = self.cover.chart(*i)?.vars.clone();
            let h_i = h.component(*i, self.rank, &vars_i, field);
            let vars_j = self.cover.chart(*j)?.vars.clone();
            let h_j = h.component(*j, self.rank, &vars_j, field);
            let h_j_anchored = self.cover.pull_matrix(&h_j, *j, *i)?;
            let new_g = h_i.inverse()?.mul(g)?.mul(&h_j_anchored)?;
            transitions.insert((*i, *j), new_g);
        }
        let flag = self.flag && h.is_flag_compatible();
        let out = BundlePresentation::new(self.cover.clone(), self.rank, transitions, flag)?;
        let report = out.validate_cocycle()?;
        if !report.is_valid() {
            return Err(Error::CocycleCheckFailed(report.failing_triples()));
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Bundle description files (JSON).

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Named(String),
    Prime { prime: u64 },
}

impl FieldSpec {
    pub fn to_field(&self) -> Result<FieldId> {
        match self {
            FieldSpec::Named(s) if s == "Q" => Ok(FieldId::Rational),
            FieldSpec::Named(s) => Err(Error::InvalidParameters(format!(
                "unknown field `{s}`; expected \"Q\" or {{\"prime\": p}}"
            ))),
            FieldSpec::Prime { prime } => FieldId::prime(*prime),
        }
    }

    pub fn from_field(field: FieldId) -> FieldSpec {
        match field {
            FieldId::Rational => FieldSpec::Named("Q".into()),
            FieldId::Prime(p) => FieldSpec::Prime { prime: p },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartFile {
    pub index: usize,
    pub vars: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChangeFile {
    pub from: usize,
    pub to: usize,
    pub map: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionFile {
    pub pair: (usize, usize),
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaugeEntryFile {
    pub index: usize,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleFile {
    pub field: FieldSpec,
    pub rank: usize,
    pub charts: Vec<ChartFile>,
    #[serde(default)]
    pub changes: Vec<ChangeFile>,
    pub transitions: Vec<TransitionFile>,
    #[serde(default)]
    pub flag: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nerve: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<Vec<GaugeEntryFile>>,
}

impl BundleFile {
    pub fn parse(&self) -> Result<(BundlePresentation, Option<GaugeTransformation>)> {
        let field = self.field.to_field()?;
        let mut charts = Vec::new();
        let mut vars_by_index: BTreeMap<usize, VarSet> = BTreeMap::new();
        for c in &self.charts {
            let vars = VarSet::new(c.vars.clone())?;
            vars_by_index.insert(c.index, vars.clone());
            charts.push(Chart {
                index: c.index,
                vars,
            });
        }
        let mut changes = Vec::new();
        for ch in &self.changes {
            let from_vars = vars_by_index
                .get(&ch.from)
                .ok_or(Error::UnknownChart(ch.from))?;
            let mut assignment = BTreeMap::new();
            for (name, expr) in &ch.map {
                assignment.insert(name.clone(), parse_expression(expr, from_vars, field)?);
            }
            changes.push(CoordinateChange {
                from: ch.from,
                to: ch.to,
                assignment,
            });
        }
        let cover = Cover::new(charts, changes, field, self.nerve.clone())?;
        let mut transitions = BTreeMap::new();
        for t in &self.transitions {
            let (i, j) = t.pair;
            let anchor_vars = &cover.chart(i.min(j))?.vars;
            let rows: Result<Vec<Vec<RationalFunction>>> = t
                .matrix
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|e| parse_expression(e, anchor_vars, field))
                        .collect()
                })
                .collect();
            transitions.insert((i, j), FuncMatrix::from_rows(rows?)?);
        }
        let bundle = BundlePresentation::new(cover.clone(), self.rank, transitions, self.flag)?;
        let gauge = match &self.gauge {
            None => None,
            Some(entries) => {
                let mut components = BTreeMap::new();
                for e in entries {
                    let vars = &cover.chart(e.index)?.vars;
                    let rows: Result<Vec<Vec<RationalFunction>>> = e
                        .matrix
                        .iter()
                        .map(|row| {
                            row.iter()
                                .map(|x| parse_expression(x, vars, field))
                                .collect()
                        })
                        .collect();
                    components.insert(e.index, FuncMatrix::from_rows(rows?)?);
                }
                Some(GaugeTransformation::new(components))
            }
        };
        Ok((bundle, gauge))
    }

    pub fn render(bundle: &BundlePresentation, gauge: Option<&GaugeTransformation>) -> BundleFile {
        let cover = bundle.cover();
        let charts = cover
            .chart_indices()
            .into_iter()
            .map(|i| {
                let ch = cover.chart(i).expect("listed index");
                ChartFile {
                    index: i,
                    vars: ch.vars.names().to_vec(),
                }
            })
            .collect();
        let changes = cover
            .changes()
            .map(|c| ChangeFile {
                from: c.from,
                to: c.to,
                map: c
                    .assignment
                    .iter()
                    .map(|(k, v)| (k.clone(), v.to_string()))
                    .collect(),
            })
            .collect();
        let transitions = bundle
            .stored_transitions()
            .iter()
            .map(|((i, j), m)| TransitionFile {
                pair: (*i, *j),
                matrix: (0..m.rows())
                    .map(|r| (0..m.cols()).map(|c| m.get(r, c).to_string()).collect())
                    .collect(),
            })
            .collect();
        let gauge = gauge.map(|g| {
            g.components()
                .iter()
                .map(|(i, m)| GaugeEntryFile {
                    index: *i,
                    matrix: (0..m.rows())
                        .map(|r| (0..m.cols()).map(|c| m.get(r, c).to_string()).collect())
                        .collect(),
                })
                .collect()
        });
        BundleFile {
            field: FieldSpec::from_field(cover.field()),
            rank: bundle.rank(),
            charts,
            changes,
            transitions,
            flag: bundle.flag(),
            nerve: cover.declared_nerve(),
            gauge,
        }
    }
}

/// Standalone cover block used inside cochain files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BundleCoverFile {
    pub field: FieldSpec,
    pub charts: Vec<ChartFile>,
    #[serde(default)]
    pub changes: Vec<ChangeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nerve: Option<Vec<Vec<usize>>>,
}

pub fn cover_to_file(cover: &Cover) -> BundleCoverFile {
    BundleCoverFile {
        field: FieldSpec::from_field(cover.field()),
        charts: cover
            .chart_indices()
            .into_iter()
            .map(|i| ChartFile {
                index: i,
                vars: cover.chart(i).expect("listed index").vars.names().to_vec(),
            })
            .collect(),
        changes: cover
            .changes()
            .map(|c| ChangeFile {
                from: c.from,
                to: c.to,
                map: c
                    .assignment
                    .iter()
                    .map(|(k, v)| (k.clone(), v.to_string()))
                    .collect(),
            })
            .collect(),
        nerve: cover.declared_nerve(),
    }
}

pub fn cover_from_file(file: &BundleCoverFile) -> Result<Arc<Cover>> {
    let field = file.field.to_field()?;
    let mut charts = Vec::new();
    let mut vars_by_index: BTreeMap<usize, VarSet> = BTreeMap::new();
    for c in &file.charts {
        let vars = VarSet::new(c.vars.clone())?;
        vars_by_index.insert(c.index, vars.clone());
        charts.push(Chart {
            index: c.index,
            vars,
        });
    }
    let mut changes = Vec::new();
    for ch in &file.changes {
        let from_vars = vars_by_index
            .get(&ch.from)
            .ok_or(Error::UnknownChart(ch.from))?;
        let mut assignment = BTreeMap::new();
        for (name, expr) in &ch.map {
            assignment.insert(name.clone(), parse_expression(expr, from_vars, field)?);
        }
        changes.push(CoordinateChange {
            from: ch.from,
            to: ch.to,
            assignment,
        });
    }
    Cover::new(charts, changes, field, file.nerve.clone())
}

pub fn load_bundle(path: &Path) -> Result<(BundlePresentation, Option<GaugeTransformation>)> {
    let text = std::fs::read_to_string(path)?;
    let file: BundleFile = serde_json::from_str(&text)?;
    file.parse()
}

pub fn save_bundle(
    path: &Path,
    bundle: &BundlePresentation,
    gauge: Option<&GaugeTransformation>,
) -> Result<()> {
    let file = BundleFile::render(bundle, gauge);
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

/// Loads a gauge from a standalone file `{"gauge":[{"index":i,"matrix":[[..]]}]}`
/// interpreted over the charts of `bundle`.
pub fn load_gauge(path: &Path, bundle: &BundlePresentation) -> Result<GaugeTransformation> {
    #[derive(Deserialize)]
    struct GaugeFile {
        gauge: Vec<GaugeEntryFile>,
    }
    let text = std::fs::read_to_string(path)?;
    let file: GaugeFile = serde_json::from_str(&text)?;
    let field = bundle.field();
    let mut components = BTreeMap::new();
    for e in &file.gauge {
        let vars = &bundle.cover().chart(e.index)?.vars;
        let rows: Result<Vec<Vec<RationalFunction>>> = e
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| parse_expression(x, vars, field))
                    .collect()
            })
            .collect();
        components.insert(e.index, FuncMatrix::from_rows(rows?)?);
    }
    Ok(GaugeTransformation::new(components))
}

impl fmt::Display for CocycleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            write!(f, "cocycle condition holds on every declared triple")
        } else {
            writeln!(
                f,
                "cocycle condition fails on {} triple(s):",
                self.failures.len()
            )?;
            for fail in &self.failures {
                writeln!(f, "  {:?}: residual =", fail.triple)?;
                write!(f, "{}", fail.residual)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(s: &str, vars: &VarSet) -> RationalFunction {
        parse_expression(s, vars, FieldId::Rational).unwrap()
    }

    fn cp1_cover() -> Arc<Cover> {
        crate::eval::cp1_cover(FieldId::Rational).unwrap()
    }

    fn line_bundle(d: i64) -> BundlePresentation {
        crate::eval::o_d_cp1(d, FieldId::Rational).unwrap()
    }

    #[test]
    fn inverse_pair_validation() {
        // w = z^2 composed with z = 1/w is not an inverse pair.
        let zv = VarSet::new(vec!["z"]).unwrap();
        let wv = VarSet::new(vec!["w"]).unwrap();
        let mut fwd = BTreeMap::new();
        fwd.insert("w".to_string(), rf("z^2", &zv));
        let mut bwd = BTreeMap::new();
        bwd.insert(
            "z".to_string(),
            parse_expression("1/w", &wv, FieldId::Rational).unwrap(),
        );
        let result = Cover::new(
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
            FieldId::Rational,
            None,
        );
        assert!(result.is_err());
    }

    #[test]
    fn transition_scalar_inverse() {
        let b = line_bundle(3);
        let zv = b.cover().chart(0).unwrap().vars.clone();
        let g10 = b.transition(1, 0).unwrap();
        assert_eq!(g10.get(0, 0), &rf("1/z^3", &zv));
        assert!(b.transition(0, 0).unwrap().is_identity());
    }

    #[test]
    fn transition_matrix_inverse() {
        let cover = cp1_cover();
        let zv = cover.chart(0).unwrap().vars.clone();
        let g = FuncMatrix::from_rows(vec![
            vec![rf("z", &zv), rf("1", &zv)],
            vec![rf("0", &zv), rf("1", &zv)],
        ])
        .unwrap();
        let mut transitions = BTreeMap::new();
        transitions.insert((0, 1), g);
        let b = BundlePresentation::new(cover, 2, transitions, true).unwrap();
        let g10 = b.transition(1, 0).unwrap();
        let want = FuncMatrix::from_rows(vec![
            vec![rf("1/z", &zv), rf("-1/z", &zv)],
            vec![rf("0", &zv), rf("1", &zv)],
        ])
        .unwrap();
        assert_eq!(g10, want);
        assert!(b.transition(0, 1).unwrap().mul(&g10).unwrap().is_identity());
    }

    #[test]
    fn cp1_cocycle_vacuous() {
        let b = line_bundle(5);
        assert!(b.validate_cocycle().unwrap().is_valid());
    }

    #[test]
    fn gauge_identity_roundtrip() {
        let b = line_bundle(4);
        let gauged = b.apply_gauge(&GaugeTransformation::identity()).unwrap();
        assert_eq!(b.stored_transitions(), gauged.stored_transitions());
    }

    #[test]
    fn gauge_rescale_on_cp1() {
        // h_0 = z, a meromorphic rescale: g~_01 = z^{d-1}.
        let b = line_bundle(4);
        let zv = b.cover().chart(0).unwrap().vars.clone();
        let mut comps = BTreeMap::new();
        comps.insert(0, FuncMatrix::from_rows(vec![vec![rf("z", &zv)]]).unwrap());
        let gauged = b.apply_gauge(&GaugeTransformation::new(comps)).unwrap();
        assert_eq!(gauged.transition(0, 1).unwrap().get(0, 0), &rf("z^3", &zv));
    }

    #[test]
    fn gauge_inverse_restores() {
        let b = line_bundle(2);
        let zv = b.cover().chart(0).unwrap().vars.clone();
        let wv = b.cover().chart(1).unwrap().vars.clone();
        let mut comps = BTreeMap::new();
        comps.insert(
            0,
            FuncMatrix::from_rows(vec![vec![rf("z^2 + 1", &zv)]]).unwrap(),
        );
        comps.insert(
            1,
            FuncMatrix::from_rows(vec![vec![parse_expression(
                "w - 3",
                &wv,
                FieldId::Rational,
            )
            .unwrap()]])
            .unwrap(),
        );
        let h = GaugeTransformation::new(comps);
        let gauged = b.apply_gauge(&h).unwrap();
        let restored = gauged.apply_gauge(&h.inverse().unwrap()).unwrap();
        assert_eq!(b.stored_transitions(), restored.stored_transitions());
    }

    #[test]
    fn gauge_preserves_triangularity() {
        let cover = cp1_cover();
        let zv = cover.chart(0).unwrap().vars.clone();
        let wv = cover.chart(1).unwrap().vars.clone();
        let g = FuncMatrix::from_rows(vec![
            vec![rf("z^2", &zv), rf("z", &zv)],
            vec![rf("0", &zv), rf("z^3", &zv)],
        ])
        .unwrap();
        let mut transitions = BTreeMap::new();
        transitions.insert((0, 1), g);
        let b = BundlePresentation::new(cover, 2, transitions, true).unwrap();
        let wrf = |s: &str| parse_expression(s, &wv, FieldId::Rational).unwrap();
        let mut comps = BTreeMap::new();
        comps.insert(
            0,
            FuncMatrix::from_rows(vec![
                vec![rf("1", &zv), rf("z", &zv)],
                vec![rf("0", &zv), rf("2", &zv)],
            ])
            .unwrap(),
        );
        comps.insert(
            1,
            FuncMatrix::from_rows(vec![vec![wrf("1"), wrf("w")], vec![wrf("0"), wrf("1")]])
                .unwrap(),
        );
        let h = GaugeTransformation::new(comps);
        assert!(h.is_flag_compatible());
        let gauged = b.apply_gauge(&h).unwrap();
        assert!(gauged.flag());
        assert!(gauged.transition(0, 1).unwrap().is_upper_triangular());
    }

    #[test]
    fn transition_pairs_invert_exactly() {
        let mut rng = crate::synth::Rng::new(61);
        let cover = crate::synth::synthetic_cover(4, &["x", "y"], FieldId::Rational);
        for rank in 1..=3 {
            let b = crate::synth::random_cocycle_bundle(&mut rng, &cover, rank, false);
            for i in 0..4 {
                for j in 0..4 {
                    let fwd = b.transition(i, j).unwrap();
                    let bwd = b.transition(j, i).unwrap();
                    assert!(
                        fwd.mul(&bwd).unwrap().is_identity(),
                        "pair ({i},{j}) rank {rank}"
                    );
                }
            }
        }
    }

    #[test]
    fn bundle_file_roundtrip() {
        let b = line_bundle(3);
        let file = BundleFile::render(&b, None);
        let text = serde_json::to_string(&file).unwrap();
        let parsed: BundleFile = serde_json::from_str(&text).unwrap();
        let (b2, gauge) = parsed.parse().unwrap();
        assert!(gauge.is_none());
        assert_eq!(b.stored_transitions(), b2.stored_transitions());
        assert_eq!(b.rank(), b2.rank());
    }
}

//! Cech cochains valued in differential forms: signed component access,
//! restriction to deeper intersections, the coboundary operator, and the
//! cup product.
//!
//! A degree-`k` cochain assigns to each strictly increasing `(k+1)`-tuple of
//! cover indices a differential form in the tuple's anchor-chart
//! coordinates. Components on arbitrary tuples are defined by total
//! antisymmetry: zero on repeated indices, otherwise the sorted component
//! times the sign of the sorting permutation.
//!
//! The coboundary follows the alternating sum with signs `(-1)^(j+1)` for
//! the omitted position `j = 1, ..., k+2`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::DifferentialForm;
use crate::geometry::Cover;
use crate::parse::parse_expression;
use crate::ratfunc::RationalFunction;

#[derive(Debug, Clone)]
pub struct CechCochain {
    cover: Arc<Cover>,
    degree: usize,
    grade: usize,
    components: BTreeMap<Vec<usize>, DifferentialForm>,
}

impl PartialEq for CechCochain {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree
            && self.grade == other.grade
            && self.components == other.components
    }
}

impl CechCochain {
    pub fn zero(cover: Arc<Cover>, degree: usize, grade: usize) -> CechCochain {
        CechCochain {
            cover,
            degree,
            grade,
            components: BTreeMap::new(),
        }
    }

    /// Builds a cochain from explicit components, validating tuple shape,
    /// anchor coordinates, and homogeneity; zero forms are dropped.
    pub fn from_components(
        cover: Arc<Cover>,
        degree: usize,
        grade: usize,
        components: BTreeMap<Vec<usize>, DifferentialForm>,
    ) -> Result<CechCochain> {
        let mut clean = BTreeMap::new();
        for (tuple, form) in components {
            if tuple.len() != degree + 1 || tuple.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidParameters(format!(
                    "component tuple {tuple:?} is not a strictly increasing {}-tuple",
                    degree + 1
                )));
            }
            if !cover.tuple_in_nerve(&tuple) {
                return Err(Error::TupleNotInNerve(tuple));
            }
            let anchor_vars = &cover.chart(tuple[0])?.vars;
            if form.vars() != anchor_vars || form.field() != cover.field() {
                return Err(Error::ChartMismatch);
            }
            if !form.is_homogeneous(grade) {
                return Err(Error::InvalidParameters(format!(
                    "component on {tuple:?} is not homogeneous of degree {grade}"
                )));
            }
            if !form.is_zero() {
                clean.insert(tuple, form);
            }
        }
        Ok(CechCochain {
            cover,
            degree,
            grade,
            components: clean,
        })
    }

    pub fn cover(&self) -> &Arc<Cover> {
        &self.cover
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn components(&self) -> &BTreeMap<Vec<usize>, DifferentialForm> {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Stored component on a strictly increasing tuple (zero when absent),
    /// in the tuple's anchor coordinates.
    pub fn component(&self, tuple: &[usize]) -> Result<DifferentialForm> {
        if tuple.len() != self.degree + 1 {
            return Err(Error::InvalidParameters(format!(
                "expected a {}-tuple, got {tuple:?}",
                self.degree + 1
            )));
        }
        if let Some(form) = self.components.get(tuple) {
            return Ok(form.clone());
        }
        let anchor_vars = self.cover.chart(tuple[0])?.vars.clone();
        Ok(DifferentialForm::zero(anchor_vars, self.cover.field()))
    }

    /// Component on an arbitrary tuple via the antisymmetric extension:
    /// zero for repeated indices, otherwise `sign(sort) * stored`.
    pub fn component_signed(&self, tuple: &[usize]) -> Result<DifferentialForm> {
        for &i in tuple {
            self.cover.chart(i).map_err(|_| Error::IndexOutOfRange(i))?;
        }
        if tuple.len() != self.degree + 1 {
            return Err(Error::InvalidParameters(format!(
                "expected a {}-tuple, got {tuple:?}",
                self.degree + 1
            )));
        }
        let mut sorted = tuple.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            let anchor_vars = self.cover.chart(sorted[0])?.vars.clone();
            return Ok(DifferentialForm::zero(anchor_vars, self.cover.field()));
        }
        let sign = permutation_parity(tuple);
        let form = self.component(&sorted)?;
        Ok(if sign { form.neg() } else { form })
    }

    /// Restricts a component form living on `anchor(sub)` into the
    /// coordinates of `anchor(tuple)`; identity when the anchors coincide.
    pub fn restrict(
        &self,
        form: &DifferentialForm,
        source_anchor: usize,
        target_anchor: usize,
    ) -> Result<DifferentialForm> {
        self.cover.pull_form(form, source_anchor, target_anchor)
    }

    /// `(delta c)_{i_1..i_{k+2}} = sum_j (-1)^(j+1) c_{..omit j..}` with every
    /// term restricted to the long tuple's anchor.
    pub fn coboundary(&self) -> Result<CechCochain> {
        let k = self.degree;
        let mut components = BTreeMap::new();
        for tuple in self.cover.tuples_of_len(k + 2) {
            let anchor = tuple[0];
            let anchor_vars = self.cover.chart(anchor)?.vars.clone();
            let mut acc = DifferentialForm::zero(anchor_vars, self.cover.field());
            for j in 0..tuple.len() {
                let mut sub = tuple.clone();
                sub.remove(j);
                let raw = self.component(&sub)?;
                if raw.is_zero() {
                    continue;
                }
                let restricted = self.restrict(&raw, sub[0], anchor)?;
                // j is zero-based here; the alternating sign starts at +1.
                acc = if j % 2 == 0 {
                    acc.add(&restricted)
                } else {
                    acc.sub(&restricted)
                };
            }
            if !acc.is_zero() {
                components.insert(tuple, acc);
            }
        }
        Ok(CechCochain {
            cover: self.cover.clone(),
            degree: k + 1,
            grade: self.grade,
            components,
        })
    }

    /// True iff the coboundary vanishes; the report lists the nonzero
    /// residual tuples.
    pub fn is_cocycle(&self) -> Result<(bool, Vec<Vec<usize>>)> {
        let delta = self.coboundary()?;
        let residuals: Vec<Vec<usize>> = delta.components.keys().cloned().collect();
        Ok((residuals.is_empty(), residuals))
    }

    /// Front-face wedge back-face cup product:
    /// `w_{i_1..i_{r+s+1}} = u_{i_1..i_{r+1}} ^ v_{i_{r+1}..i_{r+s+1}}`.
    pub fn cup(&self, other: &CechCochain) -> Result<CechCochain> {
        if !covers_match(&self.cover, &other.cover) {
            return Err(Error::WrongCover(
                "cup operands live on different covers".into(),
            ));
        }
        let r = self.degree;
        let s = other.degree;
        let mut components = BTreeMap::new();
        for tuple in self.cover.tuples_of_len(r + s + 1) {
            let front = &tuple[..=r];
            let back = &tuple[r..];
            let u = self.component(front)?;
            if u.is_zero() {
                continue;
            }
            let v = other.component(back)?;
            if v.is_zero() {
                continue;
            }
            let anchor = tuple[0];
            let u = self.restrict(&u, front[0], anchor)?;
            let v = self.restrict(&v, back[0], anchor)?;
            let w = u.wedge(&v)?;
            if !w.is_zero() {
                components.insert(tuple.clone(), w);
            }
        }
        Ok(CechCochain {
            cover: self.cover.clone(),
            degree: r + s,
            grade: self.grade + other.grade,
            components,
        })
    }

    pub fn add(&self, other: &CechCochain) -> Result<CechCochain> {
        if self.degree != other.degree || self.grade != other.grade {
            return Err(Error::InvalidParameters(
                "cochain sum requires matching degree and grade".into(),
            ));
        }
        let mut components = self.components.clone();
        for (t, f) in &other.components {
            match components.entry(t.clone()) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(f.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let s = e.get().add(f);
                    if s.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = s;
                    }
                }
            }
        }
        Ok(CechCochain {
            cover: self.cover.clone(),
            degree: self.degree,
            grade: self.grade,
            components,
        })
    }

    pub fn neg(&self) -> CechCochain {
        CechCochain {
            cover: self.cover.clone(),
            degree: self.degree,
            grade: self.grade,
            components: self
                .components
                .iter()
                .map(|(t, f)| (t.clone(), f.neg()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &CechCochain) -> Result<CechCochain> {
        self.add(&other.neg())
    }

    /// Exterior derivative applied componentwise; used for d-closedness
    /// certificates.
    pub fn d_componentwise(&self) -> BTreeMap<Vec<usize>, bool> {
        self.components
            .iter()
            .map(|(t, f)| (t.clone(), f.exterior_derivative().is_zero()))
            .collect()
    }
}

/// Parity of the permutation sorting `tuple`; true for odd.
pub fn permutation_parity(tuple: &[usize]) -> bool {
    let mut inversions = 0usize;
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            if tuple[i] > tuple[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

pub fn covers_match(a: &Arc<Cover>, b: &Arc<Cover>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

// ---------------------------------------------------------------------------
// Serialization.

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormTermFile {
    pub indices: Vec<String>,
    pub coeff: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentFile {
    pub tuple: Vec<usize>,
    pub form: Vec<FormTermFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CochainFile {
    pub degree: usize,
    pub grade: usize,
    pub components: Vec<ComponentFile>,
    /// Cover context so the file stands alone; optional on input when the
    /// caller supplies a cover.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<crate::geometry::BundleCoverFile>,
}

pub fn form_to_file(form: &DifferentialForm) -> Vec<FormTermFile> {
    form.terms()
        .map(|(k, c)| FormTermFile {
            indices: k.iter().map(|&i| form.vars().name(i).to_string()).collect(),
            coeff: c.to_string(),
        })
        .collect()
}

pub fn form_from_file(
    terms: &[FormTermFile],
    vars: &crate::poly::VarSet,
    field: crate::field::FieldId,
) -> Result<DifferentialForm> {
    let mut acc = DifferentialForm::zero(vars.clone(), field);
    for t in terms {
        let coeff: RationalFunction = parse_expression(&t.coeff, vars, field)?;
        let mut indices = Vec::with_capacity(t.indices.len());
        for name in &t.indices {
            let idx = vars
                .index_of(name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
            indices.push(idx);
        }
        acc = acc.add(&DifferentialForm::term(indices, coeff)?);
    }
    Ok(acc)
}

impl CechCochain {
    pub fn to_file(&self) -> CochainFile {
        CochainFile {
            degree: self.degree,
            grade: self.grade,
            components: self
                .components
                .iter()
                .map(|(t, f)| ComponentFile {
                    tuple: t.clone(),
                    form: form_to_file(f),
                })
                .collect(),
            cover: Some(crate::geometry::cover_to_file(&self.cover)),
        }
    }

    pub fn from_file(file: &CochainFile, cover: Arc<Cover>) -> Result<CechCochain> {
        let mut components = BTreeMap::new();
        for c in &file.components {
            if c.tuple.is_empty() {
                return Err(Error::InvalidParameters("empty component tuple".into()));
            }
            let vars = cover.chart(c.tuple[0])?.vars.clone();
            let form = form_from_file(&c.form, &vars, cover.field())?;
            components.insert(c.tuple.clone(), form);
        }
        CechCochain::from_components(cover, file.degree, file.grade, components)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldId;
    use crate::poly::VarSet;
    use crate::synth;

    fn trivial_cover(n: usize) -> Arc<Cover> {
        let vars = VarSet::new(vec!["x", "y", "u"]).unwrap();
        Cover::trivial(n, vars, FieldId::Rational)
    }

    fn one_form(cover: &Arc<Cover>, expr: &str, var: usize) -> DifferentialForm {
        let vars = cover.chart(0).unwrap().vars.clone();
        let c = parse_expression(expr, &vars, FieldId::Rational).unwrap();
        DifferentialForm::d_var(var, vars, FieldId::Rational).scale(&c)
    }

    #[test]
    fn signed_access() {
        let cover = trivial_cover(3);
        let f = one_form(&cover, "x", 0);
        let mut comps = BTreeMap::new();
        comps.insert(vec![0, 1], f.clone());
        let c = CechCochain::from_components(cover, 1, 1, comps).unwrap();
        assert_eq!(c.component_signed(&[0, 1]).unwrap(), f);
        assert_eq!(c.component_signed(&[1, 0]).unwrap(), f.neg());
        assert!(c.component_signed(&[0, 0]).unwrap().is_zero());
        assert!(matches!(
            c.component_signed(&[0, 9]),
            Err(Error::IndexOutOfRange(9))
        ));
    }

    #[test]
    fn total_antisymmetry() {
        let cover = trivial_cover(4);
        let f = one_form(&cover, "x*y + 1", 1);
        let mut comps = BTreeMap::new();
        comps.insert(vec![0, 1, 2], f);
        let c = CechCochain::from_components(cover, 2, 1, comps).unwrap();
        // Swapping any two entries negates, across all 3! orderings.
        let base = c.component_signed(&[0, 1, 2]).unwrap();
        for (perm, odd) in [
            (vec![0, 1, 2], false),
            (vec![1, 0, 2], true),
            (vec![0, 2, 1], true),
            (vec![2, 1, 0], true),
            (vec![1, 2, 0], false),
            (vec![2, 0, 1], false),
        ] {
            let got = c.component_signed(&perm).unwrap();
            let want = if odd { base.neg() } else { base.clone() };
            assert_eq!(got, want, "tuple {perm:?}");
        }
    }

    #[test]
    fn coboundary_of_zero_cochain() {
        let cover = trivial_cover(4);
        let z = CechCochain::zero(cover, 1, 1);
        let d = z.coboundary().unwrap();
        assert!(d.is_zero());
        assert_eq!(d.degree(), 2);
    }

    #[test]
    fn coboundary_of_constants() {
        // For a 0-cochain {s_i}: (delta s)_{ij} = s_j - s_i with the
        // (-1)^(j+1) convention.
        let cover = trivial_cover(2);
        let s0 = one_form(&cover, "x", 0);
        let s1 = one_form(&cover, "y", 0);
        let mut comps = BTreeMap::new();
        comps.insert(vec![0], s0.clone());
        comps.insert(vec![1], s1.clone());
        let c = CechCochain::from_components(cover, 0, 1, comps).unwrap();
        let d = c.coboundary().unwrap();
        assert_eq!(d.component(&[0, 1]).unwrap(), s1.sub(&s0));
    }

    #[test]
    fn delta_squared_vanishes_randomized() {
        let mut rng = synth::Rng::new(7);
        let vars = VarSet::new(vec!["x", "y", "u"]).unwrap();
        let cover = Cover::trivial(4, vars, FieldId::Rational);
        for _ in 0..10 {
            let c = synth::random_cochain(&mut rng, &cover, 1, 1, 2);
            let dd = c.coboundary().unwrap().coboundary().unwrap();
            assert!(dd.is_zero());
        }
    }

    #[test]
    fn single_component_usually_not_cocycle() {
        let cover = trivial_cover(3);
        let f = one_form(&cover, "x", 0);
        let mut comps = BTreeMap::new();
        comps.insert(vec![0, 1], f);
        let c = CechCochain::from_components(cover, 1, 1, comps).unwrap();
        let (ok, residuals) = c.is_cocycle().unwrap();
        assert!(!ok);
        assert_eq!(residuals, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn cup_with_constant_one() {
        let cover = trivial_cover(3);
        let vars = cover.chart(0).unwrap().vars.clone();
        let one =
            DifferentialForm::from_function(RationalFunction::one(vars.clone(), FieldId::Rational));
        let mut unit_comps = BTreeMap::new();
        for i in 0..3 {
            unit_comps.insert(vec![i], one.clone());
        }
        let unit = CechCochain::from_components(cover.clone(), 0, 0, unit_comps).unwrap();

        let f = one_form(&cover, "x^2", 0);
        let mut comps = BTreeMap::new();
        comps.insert(vec![0, 1], f.clone());
        comps.insert(vec![1, 2], f.clone());
        let c = CechCochain::from_components(cover, 1, 1, comps).unwrap();
        assert_eq!(unit.cup(&c).unwrap(), c);
        assert_eq!(c.cup(&unit).unwrap(), c);
    }

    #[test]
    fn cup_degenerate_on_two_charts() {
        // No strictly increasing 3-tuples exist on a 2-chart cover.
        let cover = trivial_cover(2);
        let f = one_form(&cover, "x", 0);
        let mut comps = BTreeMap::new();
        comps.insert(vec![0, 1], f);
        let c = CechCochain::from_components(cover, 1, 1, comps).unwrap();
        let w = c.cup(&c).unwrap();
        assert!(w.is_zero());
        assert_eq!(w.degree(), 2);
        assert_eq!(w.grade(), 2);
    }

    #[test]
    fn cup_bilinear_and_associative() {
        let mut rng = synth::Rng::new(11);
        let vars = VarSet::new(vec!["x", "y", "u"]).unwrap();
        let cover = Cover::trivial(5, vars, FieldId::Rational);
        for _ in 0..5 {
            let a = synth::random_cochain(&mut rng, &cover, 1, 1, 2);
            let b = synth::random_cochain(&mut rng, &cover, 1, 1, 2);
            let c = synth::random_cochain(&mut rng, &cover, 0, 1, 2);
            // Associativity.
            let lhs = a.cup(&b).unwrap().cup(&c).unwrap();
            let rhs = a.cup(&b.cup(&c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            // Bilinearity in the first slot.
            let sum = a.add(&b).unwrap();
            let lhs = sum.cup(&c).unwrap();
            let rhs = a.cup(&c).unwrap().add(&b.cup(&c).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn restriction_missing_change_reported() {
        let zv = VarSet::new(vec!["z"]).unwrap();
        let wv = VarSet::new(vec!["w"]).unwrap();
        // Two charts, no changes declared.
        let cover = Cover::new(
            vec![
                crate::geometry::Chart { index: 0, vars: zv },
                crate::geometry::Chart {
                    index: 1,
                    vars: wv.clone(),
                },
            ],
            vec![],
            FieldId::Rational,
            None,
        )
        .unwrap();
        let form = DifferentialForm::d_var(0, wv, FieldId::Rational);
        let mut comps = BTreeMap::new();
        comps.insert(vec![1], form);
        let c = CechCochain::from_components(cover, 0, 1, comps).unwrap();
        assert!(matches!(
            c.coboundary(),
            Err(Error::MissingCoordinateChange { from: 0, to: 1 })
        ));
    }

    #[test]
    fn restriction_across_projective_charts() {
        // dlog of chart-1's ratio variable, restricted from the (1,2)
        // overlap into chart-0 coordinates on the triple overlap:
        // dlog(x2/x1) = dx2/x2 - dx1/x1.
        let cover = crate::eval::cpn_cover(2, FieldId::Rational).unwrap();
        let v1 = cover.chart(1).unwrap().vars.clone();
        let idx = v1.index_of("x2").unwrap();
        let x2 = RationalFunction::variable(idx, v1.clone(), FieldId::Rational);
        let dlog = DifferentialForm::d_var(idx, v1, FieldId::Rational).scale(&x2.inv().unwrap());
        let got = cover.pull_form(&dlog, 1, 0).unwrap();
        let v0 = cover.chart(0).unwrap().vars.clone();
        let want = DifferentialForm::d_var(1, v0.clone(), FieldId::Rational)
            .scale(&parse_expression("1/x2", &v0, FieldId::Rational).unwrap())
            .sub(
                &DifferentialForm::d_var(0, v0.clone(), FieldId::Rational)
                    .scale(&parse_expression("1/x1", &v0, FieldId::Rational).unwrap()),
            );
        assert_eq!(got, want);
    }

    #[test]
    fn serialization_roundtrip() {
        let cover = trivial_cover(3);
        let f = one_form(&cover, "(x + y)/(x - y)", 0);
        let mut comps = BTreeMap::new();
        comps.insert(vec![0, 2], f);
        let c = CechCochain::from_components(cover.clone(), 1, 1, comps).unwrap();
        let file = c.to_file();
        let text = serde_json::to_string(&file).unwrap();
        let parsed: CochainFile = serde_json::from_str(&text).unwrap();
        let c2 = CechCochain::from_file(&parsed, cover).unwrap();
        assert_eq!(c, c2);
    }
}

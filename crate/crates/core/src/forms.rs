//! Exterior algebra of differential forms with rational-function
//! coefficients over one chart's coordinates.
//!
//! A form is a map from strictly increasing subsets of the chart variables
//! (the wedge basis `dx_{i_1} ^ ... ^ dx_{i_q}`) to coefficients. Mixed
//! degrees are representable but every formula in this crate produces
//! homogeneous forms.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::FieldId;
use crate::poly::VarSet;
use crate::ratfunc::RationalFunction;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferentialForm {
    vars: VarSet,
    field: FieldId,
    /// Keys are strictly increasing variable indices; no zero coefficients.
    terms: BTreeMap<Vec<usize>, RationalFunction>,
}

impl DifferentialForm {
    pub fn zero(vars: VarSet, field: FieldId) -> DifferentialForm {
        DifferentialForm {
            vars,
            field,
            terms: BTreeMap::new(),
        }
    }

    /// Degree-0 form from a function.
    pub fn from_function(f: RationalFunction) -> DifferentialForm {
        let vars = f.vars().clone();
        let field = f.field();
        let mut form = DifferentialForm::zero(vars, field);
        if !f.is_zero() {
            form.terms.insert(Vec::new(), f);
        }
        form
    }

    /// The basis 1-form `d(vars[idx])`.
    pub fn d_var(idx: usize, vars: VarSet, field: FieldId) -> DifferentialForm {
        assert!(idx < vars.len());
        let one = RationalFunction::one(vars.clone(), field);
        let mut form = DifferentialForm::zero(vars, field);
        form.terms.insert(vec![idx], one);
        form
    }

    /// Single term `coeff * dx_{indices}`; indices must be strictly
    /// increasing.
    pub fn term(indices: Vec<usize>, coeff: RationalFunction) -> Result<DifferentialForm> {
        let vars = coeff.vars().clone();
        let field = coeff.field();
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices.iter().any(|&i| i >= vars.len()) {
            return Err(Error::InvalidParameters(format!(
                "wedge indices must be strictly increasing chart indices, got {indices:?}"
            )));
        }
        let mut form = DifferentialForm::zero(vars, field);
        if !coeff.is_zero() {
            form.terms.insert(indices, coeff);
        }
        Ok(form)
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &RationalFunction)> {
        self.terms.iter()
    }

    /// Coefficient of the given strictly increasing index set.
    pub fn coefficient(&self, indices: &[usize]) -> RationalFunction {
        self.terms
            .get(indices)
            .cloned()
            .unwrap_or_else(|| RationalFunction::zero(self.vars.clone(), self.field))
    }

    /// True when every stored term has the given degree (vacuously true for
    /// the zero form).
    pub fn is_homogeneous(&self, degree: usize) -> bool {
        self.terms.keys().all(|k| k.len() == degree)
    }

    /// The common degree of a homogeneous nonzero form.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys();
        let first = it.next()?.len();
        if it.all(|k| k.len() == first) {
            Some(first)
        } else {
            None
        }
    }

    fn check_compatible(&self, other: &DifferentialForm) -> Result<()> {
        if self.vars == other.vars && self.field == other.field {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    fn insert(&mut self, key: Vec<usize>, coeff: RationalFunction) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&coeff);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &DifferentialForm) -> DifferentialForm {
        self.check_compatible(other).expect("chart mismatch");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.insert(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> DifferentialForm {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &DifferentialForm) -> DifferentialForm {
        self.add(&other.neg())
    }

    pub fn scale(&self, f: &RationalFunction) -> DifferentialForm {
        let mut out = DifferentialForm::zero(self.vars.clone(), self.field);
        for (k, c) in &self.terms {
            out.insert(k.clone(), c.mul(f));
        }
        out
    }

    /// Graded product with the Koszul sign.
    pub fn wedge(&self, other: &DifferentialForm) -> Result<DifferentialForm> {
        self.check_compatible(other)?;
        let mut out = DifferentialForm::zero(self.vars.clone(), self.field);
        for (ka, ca) in &self.terms {
            'next: for (kb, cb) in &other.terms {
                // Repeated index kills the term; otherwise count inversions
                // of the merge to get the sign.
                let mut inversions = 0usize;
                for &a in ka {
                    for &b in kb {
                        if a == b {
                            continue 'next;
                        }
                        if b < a {
                            inversions += 1;
                        }
                    }
                }
                let mut key: Vec<usize> = ka.iter().chain(kb.iter()).copied().collect();
                key.sort_unstable();
                let mut coeff = ca.mul(cb);
                if inversions % 2 == 1 {
                    coeff = coeff.neg();
                }
                out.insert(key, coeff);
            }
        }
        Ok(out)
    }

    /// Exterior derivative; raises degree by one and satisfies `d(d(a)) = 0`.
    pub fn exterior_derivative(&self) -> DifferentialForm {
        let mut out = DifferentialForm::zero(self.vars.clone(), self.field);
        for (k, c) in &self.terms {
            for v in 0..self.vars.len() {
                if k.contains(&v) {
                    continue;
                }
                let dc = c
                    .partial_derivative(self.vars.name(v))
                    .expect("chart variable");
                if dc.is_zero() {
                    continue;
                }
                // dv ^ dx_k: the sign moves dv past the smaller indices of k.
                let before = k.iter().filter(|&&u| u < v).count();
                let mut key = k.clone();
                key.push(v);
                key.sort_unstable();
                let coeff = if before % 2 == 1 { dc.neg() } else { dc };
                out.insert(key, coeff);
            }
        }
        out
    }

    /// Pulls the form back along a rational coordinate change. `assignment`
    /// maps each of this form's variables to a rational function over the
    /// target ring; coefficients are substituted and each `d(var)` expands by
    /// the chain rule.
    pub fn pullback(
        &self,
        assignment: &BTreeMap<String, RationalFunction>,
        target_vars: &VarSet,
        target_field: FieldId,
    ) -> Result<DifferentialForm> {
        // Differentials of the assigned expressions, one per source variable.
        let mut dexpr: Vec<Option<DifferentialForm>> = vec![None; self.vars.len()];
        let mut exprs: BTreeMap<String, RationalFunction> = BTreeMap::new();
        for (idx, name) in self.vars.names().iter().enumerate() {
            let rf = assignment
                .get(name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
            if rf.vars() != target_vars || rf.field() != target_field {
                return Err(Error::ChartMismatch);
            }
            exprs.insert(name.clone(), rf.clone());
            let mut one_form = DifferentialForm::zero(target_vars.clone(), target_field);
            for (u, uname) in target_vars.names().iter().enumerate() {
                let du = rf.partial_derivative(uname)?;
                if !du.is_zero() {
                    one_form.insert(vec![u], du);
                }
            }
            dexpr[idx] = Some(one_form);
        }
        let mut out = DifferentialForm::zero(target_vars.clone(), target_field);
        for (k, c) in &self.terms {
            let coeff = c.substitute(&exprs)?;
            let mut acc = DifferentialForm::from_function(coeff);
            for &v in k {
                acc = acc.wedge(dexpr[v].as_ref().expect("assigned above"))?;
            }
            out = out.add(&acc);
        }
        Ok(out)
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k.is_empty() {
                write!(f, "{c}")?;
            } else {
                let basis: Vec<String> = k
                    .iter()
                    .map(|&i| format!("d{}", self.vars.name(i)))
                    .collect();
                write!(f, "({c}) {}", basis.join("^"))?;
            }
        }
        Ok(())
    }
}

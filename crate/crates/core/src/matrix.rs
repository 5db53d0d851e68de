//! Matrices over rational functions and over differential forms.
//!
//! Function-valued matrices support an exact adjugate inverse; form-valued
//! matrices multiply with entrywise wedge products. Inverses of form-valued
//! matrices are never needed and not provided.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldId, Scalar};
use crate::forms::DifferentialForm;
use crate::poly::VarSet;
use crate::ratfunc::RationalFunction;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuncMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<RationalFunction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<DifferentialForm>,
}

impl FuncMatrix {
    pub fn from_rows(rows: Vec<Vec<RationalFunction>>) -> Result<FuncMatrix> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidParameters(
                "matrix must be rectangular and nonempty".into(),
            ));
        }
        let entries: Vec<RationalFunction> = rows.into_iter().flatten().collect();
        let vars = entries[0].vars().clone();
        let field = entries[0].field();
        if entries
            .iter()
            .any(|e| e.vars() != &vars || e.field() != field)
        {
            return Err(Error::ChartMismatch);
        }
        Ok(FuncMatrix {
            rows: r,
            cols: c,
            entries,
        })
    }

    pub fn identity(n: usize, vars: VarSet, field: FieldId) -> FuncMatrix {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(if i == j {
                    RationalFunction::one(vars.clone(), field)
                } else {
                    RationalFunction::zero(vars.clone(), field)
                });
            }
        }
        FuncMatrix {
            rows: n,
            cols: n,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RationalFunction {
        &self.entries[i * self.cols + j]
    }

    pub fn vars(&self) -> &VarSet {
        self.entries[0].vars()
    }

    pub fn field(&self) -> FieldId {
        self.entries[0].field()
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RationalFunction::is_zero)
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self.get(i, j).is_zero()))
    }

    fn check_chart(&self, other: &FuncMatrix) -> Result<()> {
        if self.vars() == other.vars() && self.field() == other.field() {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    pub fn mul(&self, other: &FuncMatrix) -> Result<FuncMatrix> {
        self.check_chart(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = RationalFunction::zero(self.vars().clone(), self.field());
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                entries.push(acc);
            }
        }
        Ok(FuncMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    pub fn add(&self, other: &FuncMatrix) -> Result<FuncMatrix> {
        self.check_chart(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(FuncMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn sub(&self, other: &FuncMatrix) -> Result<FuncMatrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FuncMatrix {
        FuncMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(RationalFunction::neg).collect(),
        }
    }

    pub fn trace(&self) -> Result<RationalFunction> {
        if self.rows != self.cols {
            return Err(Error::NotSquare);
        }
        let mut acc = RationalFunction::zero(self.vars().clone(), self.field());
        for i in 0..self.rows {
            acc = acc.add(self.get(i, i));
        }
        Ok(acc)
    }

    pub fn det(&self) -> Result<RationalFunction> {
        if self.rows != self.cols {
            return Err(Error::NotSquare);
        }
        Ok(det_rec(self))
    }

    /// Exact inverse via the adjugate over the fraction field.
    pub fn inverse(&self) -> Result<FuncMatrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare);
        }
        let n = self.rows;
        let det = det_rec(self);
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        let det_inv = det.inv().expect("nonzero determinant");
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // adj(A)_{ij} = (-1)^{i+j} det(minor_{ji})
                let minor = self.minor(j, i);
                let mut c = det_rec(&minor);
                if (i + j) % 2 == 1 {
                    c = c.neg();
                }
                entries.push(c.mul(&det_inv));
            }
        }
        Ok(FuncMatrix {
            rows: n,
            cols: n,
            entries,
        })
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> FuncMatrix {
        let n = self.rows;
        if n == 1 {
            // 0x0 minor: determinant 1 by convention, encoded as [1].
            return FuncMatrix {
                rows: 1,
                cols: 1,
                entries: vec![RationalFunction::one(self.vars().clone(), self.field())],
            };
        }
        let mut entries = Vec::with_capacity((n - 1) * (n - 1));
        for i in 0..n {
            if i == skip_row {
                continue;
            }
            for j in 0..n {
                if j == skip_col {
                    continue;
                }
                entries.push(self.get(i, j).clone());
            }
        }
        FuncMatrix {
            rows: n - 1,
            cols: n - 1,
            entries,
        }
    }

    /// Entrywise exterior derivative, a degree-1 form matrix.
    pub fn d(&self) -> FormMatrix {
        let entries = self
            .entries
            .iter()
            .map(|f| DifferentialForm::from_function(f.clone()).exterior_derivative())
            .collect();
        FormMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Embeds as a matrix of degree-0 forms.
    pub fn as_forms(&self) -> FormMatrix {
        let entries = self
            .entries
            .iter()
            .map(|f| DifferentialForm::from_function(f.clone()))
            .collect();
        FormMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Entrywise substitution along a coordinate assignment.
    pub fn substitute(
        &self,
        assignment: &std::collections::BTreeMap<String, RationalFunction>,
    ) -> Result<FuncMatrix> {
        let entries: Result<Vec<RationalFunction>> = self
            .entries
            .iter()
            .map(|e| e.substitute(assignment))
            .collect();
        let entries = entries?;
        Ok(FuncMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn map_entries<F: FnMut(&RationalFunction) -> RationalFunction>(
        &self,
        mut f: F,
    ) -> FuncMatrix {
        FuncMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(&mut f).collect(),
        }
    }
}

fn det_rec(m: &FuncMatrix) -> RationalFunction {
    let n = m.rows;
    if n == 1 {
        return m.entries[0].clone();
    }
    let mut acc = RationalFunction::zero(m.vars().clone(), m.field());
    for i in 0..n {
        if m.get(i, 0).is_zero() {
            continue;
        }
        let sub = m.minor(i, 0);
        let mut term = m.get(i, 0).mul(&det_rec(&sub));
        if i % 2 == 1 {
            term = term.neg();
        }
        acc = acc.add(&term);
    }
    acc
}

impl FormMatrix {
    pub fn from_rows(rows: Vec<Vec<DifferentialForm>>) -> Result<FormMatrix> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidParameters(
                "matrix must be rectangular and nonempty".into(),
            ));
        }
        let entries: Vec<DifferentialForm> = rows.into_iter().flatten().collect();
        let vars = entries[0].vars().clone();
        let field = entries[0].field();
        if entries
            .iter()
            .any(|e| e.vars() != &vars || e.field() != field)
        {
            return Err(Error::ChartMismatch);
        }
        Ok(FormMatrix {
            rows: r,
            cols: c,
            entries,
        })
    }

    pub fn zero(rows: usize, cols: usize, vars: VarSet, field: FieldId) -> FormMatrix {
        let entries = (0..rows * cols)
            .map(|_| DifferentialForm::zero(vars.clone(), field))
            .collect();
        FormMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &DifferentialForm {
        &self.entries[i * self.cols + j]
    }

    pub fn vars(&self) -> &VarSet {
        self.entries[0].vars()
    }

    pub fn field(&self) -> FieldId {
        self.entries[0].field()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(DifferentialForm::is_zero)
    }

    /// True when every entry is homogeneous of the given degree.
    pub fn is_homogeneous(&self, degree: usize) -> bool {
        self.entries.iter().all(|e| e.is_homogeneous(degree))
    }

    fn check_chart(&self, other: &FormMatrix) -> Result<()> {
        if self.vars() == other.vars() && self.field() == other.field() {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    /// Matrix product with entry products taken as wedge products.
    pub fn mul(&self, other: &FormMatrix) -> Result<FormMatrix> {
        self.check_chart(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = DifferentialForm::zero(self.vars().clone(), self.field());
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).wedge(other.get(k, j))?);
                }
                entries.push(acc);
            }
        }
        Ok(FormMatrix {
            rows: self.rows,
            cols: other.cols,
            entries,
        })
    }

    /// Left multiplication by a function-valued matrix.
    pub fn lmul_func(&self, func: &FuncMatrix) -> Result<FormMatrix> {
        func.as_forms().mul(self)
    }

    /// Right multiplication by a function-valued matrix.
    pub fn rmul_func(&self, func: &FuncMatrix) -> Result<FormMatrix> {
        self.mul(&func.as_forms())
    }

    pub fn add(&self, other: &FormMatrix) -> Result<FormMatrix> {
        self.check_chart(other)?;
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(
                self.rows, self.cols, other.rows, other.cols,
            ));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(FormMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn sub(&self, other: &FormMatrix) -> Result<FormMatrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FormMatrix {
        FormMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(DifferentialForm::neg).collect(),
        }
    }

    pub fn scale_scalar(&self, c: &Scalar) -> FormMatrix {
        let f = RationalFunction::constant(c.clone(), self.vars().clone());
        FormMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.scale(&f)).collect(),
        }
    }

    pub fn trace(&self) -> Result<DifferentialForm> {
        if self.rows != self.cols {
            return Err(Error::NotSquare);
        }
        let mut acc = DifferentialForm::zero(self.vars().clone(), self.field());
        for i in 0..self.rows {
            acc = acc.add(self.get(i, i));
        }
        Ok(acc)
    }

    /// Entrywise exterior derivative.
    pub fn d(&self) -> FormMatrix {
        FormMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(DifferentialForm::exterior_derivative)
                .collect(),
        }
    }
}

impl fmt::Display for FuncMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expression;

    fn v(names: &[&str]) -> VarSet {
        VarSet::new(names.to_vec()).unwrap()
    }

    fn m(rows: &[&[&str]], vars: &VarSet) -> FuncMatrix {
        FuncMatrix::from_rows(
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|s| parse_expression(s, vars, FieldId::Rational).unwrap())
                        .collect()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_multiplication() {
        let vars = v(&["z"]);
        let a = m(&[&["z", "1"], &["0", "1/z"]], &vars);
        let id = FuncMatrix::identity(2, vars.clone(), FieldId::Rational);
        assert_eq!(id.mul(&a).unwrap(), a);
        assert_eq!(a.mul(&id).unwrap(), a);
    }

    #[test]
    fn form_product_convention() {
        // For 2x2 matrices of generic entries, (dg dh)_{11} = dg11^dh11 + dg12^dh21.
        let vars = v(&["a", "b", "c", "d", "p", "q", "r", "s"]);
        let g = m(&[&["a", "b"], &["c", "d"]], &vars);
        let h = m(&[&["p", "q"], &["r", "s"]], &vars);
        let prod = g.d().mul(&h.d()).unwrap();
        let da = g.d().get(0, 0).clone();
        let db = g.d().get(0, 1).clone();
        let dp = h.d().get(0, 0).clone();
        let dr = h.d().get(1, 0).clone();
        let want = da.wedge(&dp).unwrap().add(&db.wedge(&dr).unwrap());
        assert_eq!(prod.get(0, 0), &want);
    }

    #[test]
    fn self_product_antisymmetry() {
        // A form matrix whose every entry is the same 1-form squares to zero
        // on the diagonal entries' leading wedges.
        let vars = v(&["x", "y"]);
        let dx = DifferentialForm::d_var(0, vars.clone(), FieldId::Rational);
        let a = FormMatrix::from_rows(vec![
            vec![dx.clone(), dx.clone()],
            vec![dx.clone(), dx.clone()],
        ])
        .unwrap();
        assert!(a.mul(&a).unwrap().is_zero());
    }

    #[test]
    fn traces() {
        let vars = v(&["z"]);
        let id = FuncMatrix::identity(3, vars.clone(), FieldId::Rational);
        assert_eq!(
            id.trace().unwrap(),
            parse_expression("3", &vars, FieldId::Rational).unwrap()
        );
        let upper = m(&[&["0", "z"], &["0", "0"]], &vars);
        assert!(upper.trace().unwrap().is_zero());
    }

    #[test]
    fn trace_cyclic() {
        let vars = v(&["z"]);
        let a = m(&[&["z", "1"], &["2", "z^2"]], &vars);
        let b = m(&[&["1/z", "0"], &["z", "3"]], &vars);
        let c = m(&[&["z+1", "z"], &["1", "0"]], &vars);
        let abc = a.mul(&b).unwrap().mul(&c).unwrap();
        let bca = b.mul(&c).unwrap().mul(&a).unwrap();
        assert_eq!(abc.trace().unwrap(), bca.trace().unwrap());
    }

    #[test]
    fn inverses() {
        let vars = v(&["z", "x"]);
        let a = m(&[&["z", "0"], &["0", "1/z"]], &vars);
        let want = m(&[&["1/z", "0"], &["0", "z"]], &vars);
        assert_eq!(a.inverse().unwrap(), want);

        let u = m(&[&["1", "x"], &["0", "1"]], &vars);
        let want = m(&[&["1", "-x"], &["0", "1"]], &vars);
        assert_eq!(u.inverse().unwrap(), want);

        let s = m(&[&["z", "1"], &["1", "z"]], &vars);
        let want = m(
            &[&["z/(z^2-1)", "-1/(z^2-1)"], &["-1/(z^2-1)", "z/(z^2-1)"]],
            &vars,
        );
        assert_eq!(s.inverse().unwrap(), want);
        assert!(s.mul(&s.inverse().unwrap()).unwrap().is_identity());
    }

    #[test]
    fn singular_rejected() {
        let vars = v(&["z"]);
        let s = m(&[&["z", "z"], &["1", "1"]], &vars);
        assert!(matches!(s.inverse(), Err(Error::SingularMatrix)));
    }

    #[test]
    fn entrywise_derivative() {
        let vars = v(&["z", "x", "y"]);
        let a = m(&[&["z^3", "0"], &["0", "z^5"]], &vars);
        let d = a.d();
        assert_eq!(
            d.get(0, 0).coefficient(&[0]),
            parse_expression("3*z^2", &vars, FieldId::Rational).unwrap()
        );
        assert_eq!(
            d.get(1, 1).coefficient(&[0]),
            parse_expression("5*z^4", &vars, FieldId::Rational).unwrap()
        );
        assert!(d.get(0, 1).is_zero());

        let c = m(&[&["2", "3"], &["5", "7"]], &vars);
        assert!(c.d().is_zero());

        let u = m(&[&["1", "x*y"], &["0", "1"]], &vars);
        let d = u.d();
        assert_eq!(
            d.get(0, 1).coefficient(&[1]),
            parse_expression("y", &vars, FieldId::Rational).unwrap()
        );
        assert_eq!(
            d.get(0, 1).coefficient(&[2]),
            parse_expression("x", &vars, FieldId::Rational).unwrap()
        );
    }

    #[test]
    fn inverse_derivative_identity() {
        // d(A^-1) = -A^-1 dA A^-1.
        let vars = v(&["z", "x"]);
        let a = m(&[&["z", "x"], &["1", "z*x+1"]], &vars);
        let ainv = a.inverse().unwrap();
        let lhs = ainv.d();
        let rhs = ainv
            .as_forms()
            .mul(&a.d())
            .unwrap()
            .mul(&ainv.as_forms())
            .unwrap()
            .neg();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_rule_for_matrices() {
        let vars = v(&["z", "x"]);
        let a = m(&[&["z", "x"], &["0", "1"]], &vars);
        let b = m(&[&["1", "z^2"], &["x", "z"]], &vars);
        let lhs = a.mul(&b).unwrap().d();
        let rhs = a
            .d()
            .rmul_func(&b)
            .unwrap()
            .add(&b.d().lmul_func(&a).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }
}

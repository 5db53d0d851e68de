//! Rational functions in canonical form: reduced numerator/denominator with
//! a monic denominator under the graded-lex order.
//!
//! All identities in this crate are fraction-field identities: a denominator
//! is "nonzero" when it is nonzero as a polynomial, and equality is
//! structural equality of canonical forms.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldId, Scalar};
use crate::poly::{gcd, Polynomial, VarSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

/// Operation selector for [`RationalFunction::rf_arith`].
pub use crate::field::ArithOp;

impl RationalFunction {
    /// Canonicalizing constructor: reduces by the gcd and normalizes the
    /// denominator to be monic.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<RationalFunction> {
        if den.is_zero() {
            return Err(Error::DivisionByZeroFunction);
        }
        if num.is_zero() {
            let vars = num.vars().clone();
            let field = num.field();
            return Ok(RationalFunction {
                num,
                den: Polynomial::one(vars, field),
            });
        }
        if den.is_one() {
            return Ok(RationalFunction { num, den });
        }
        let g = gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let lead = den.leading().expect("nonzero denominator").1.clone();
        if !lead.is_one() {
            let inv = lead.inv().expect("leading coefficient is a unit");
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_polynomial(p: Polynomial) -> RationalFunction {
        let one = Polynomial::one(p.vars().clone(), p.field());
        RationalFunction { num: p, den: one }
    }

    pub fn zero(vars: VarSet, field: FieldId) -> RationalFunction {
        RationalFunction::from_polynomial(Polynomial::zero(vars, field))
    }

    pub fn one(vars: VarSet, field: FieldId) -> RationalFunction {
        RationalFunction::from_polynomial(Polynomial::one(vars, field))
    }

    pub fn constant(c: Scalar, vars: VarSet) -> RationalFunction {
        RationalFunction::from_polynomial(Polynomial::constant(c, vars))
    }

    pub fn variable(idx: usize, vars: VarSet, field: FieldId) -> RationalFunction {
        RationalFunction::from_polynomial(Polynomial::variable(idx, vars, field))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn vars(&self) -> &VarSet {
        self.num.vars()
    }

    pub fn field(&self) -> FieldId {
        self.num.field()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The underlying polynomial when the canonical denominator is 1.
    pub fn into_polynomial(self) -> Option<Polynomial> {
        if self.den.is_one() {
            Some(self.num)
        } else {
            None
        }
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    fn check_compatible(&self, other: &RationalFunction) -> Result<()> {
        if self.vars() == other.vars() && self.field() == other.field() {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        if self.den.is_one() && other.den.is_one() {
            return RationalFunction::from_polynomial(self.num.add(&other.num));
        }
        if self.den == other.den {
            return RationalFunction::new(self.num.add(&other.num), self.den.clone())
                .expect("denominator unchanged");
        }
        // a/b + c/d = (ad + cb) / bd
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RationalFunction::new(num, den).expect("denominator product is nonzero")
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &RationalFunction) -> RationalFunction {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        if self.den.is_one() && other.den.is_one() {
            return RationalFunction::from_polynomial(self.num.mul(&other.num));
        }
        // Cross-cancel before multiplying to keep intermediates small.
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let a = self.num.exact_div(&g1).expect("gcd divides");
        let d = other.den.exact_div(&g1).expect("gcd divides");
        let c = other.num.exact_div(&g2).expect("gcd divides");
        let b = self.den.exact_div(&g2).expect("gcd divides");
        RationalFunction::new(a.mul(&c), b.mul(&d)).expect("denominator is nonzero")
    }

    pub fn inv(&self) -> Result<RationalFunction> {
        if self.is_zero() {
            return Err(Error::DivisionByZeroFunction);
        }
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &RationalFunction) -> Result<RationalFunction> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn scale(&self, c: &Scalar) -> RationalFunction {
        RationalFunction::new(self.num.scale(c), self.den.clone()).expect("denominator unchanged")
    }

    /// Integer power by repeated squaring; negative exponents invert.
    pub fn powi(&self, e: i64) -> Result<RationalFunction> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = RationalFunction::one(self.vars().clone(), self.field());
        let mut e = e.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Validated arithmetic entry point mirroring the scalar one.
    pub fn rf_arith(
        a: &RationalFunction,
        b: &RationalFunction,
        op: ArithOp,
    ) -> Result<RationalFunction> {
        a.check_compatible(b)?;
        Ok(match op {
            ArithOp::Add => a.add(b),
            ArithOp::Sub => a.sub(b),
            ArithOp::Mul => a.mul(b),
            ArithOp::Div => a.checked_div(b)?,
        })
    }

    /// Composes with the assignment, which must cover every variable of the
    /// ambient ring. All assigned values share one target ring.
    pub fn substitute(
        &self,
        assignment: &BTreeMap<String, RationalFunction>,
    ) -> Result<RationalFunction> {
        let mut target: Option<(VarSet, FieldId)> = None;
        for name in self.vars().names() {
            let rf = assignment
                .get(name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
            match &target {
                None => target = Some((rf.vars().clone(), rf.field())),
                Some((v, f)) => {
                    if v != rf.vars() || *f != rf.field() {
                        return Err(Error::ChartMismatch);
                    }
                }
            }
        }
        let (tvars, tfield) = target.expect("nonempty variable list");
        let values: Vec<&RationalFunction> =
            self.vars().names().iter().map(|n| &assignment[n]).collect();
        let num = substitute_polynomial(&self.num, &values, &tvars, tfield)?;
        let den = substitute_polynomial(&self.den, &values, &tvars, tfield)?;
        if den.is_zero() {
            return Err(Error::SubstitutedDenominatorZero);
        }
        num.checked_div(&den)
    }

    /// Quotient-rule partial derivative with respect to the named variable.
    pub fn partial_derivative(&self, var: &str) -> Result<RationalFunction> {
        let idx = self
            .vars()
            .index_of(var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        let num = self
            .num
            .derivative(idx)
            .mul(&self.den)
            .sub(&self.num.mul(&self.den.derivative(idx)));
        let den = self.den.mul(&self.den);
        RationalFunction::new(num, den)
    }

    /// Coefficient of `var^exponent` in the finite Laurent expansion at the
    /// origin. Requires the canonical denominator to be a monomial in `var`.
    pub fn laurent_coefficient(&self, var: &str, exponent: i64) -> Result<Scalar> {
        let idx = self
            .vars()
            .index_of(var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        if self.is_zero() {
            return Ok(Scalar::zero(self.field()));
        }
        if self.den.num_terms() != 1 {
            return Err(Error::NotLaurent);
        }
        let (dm, dc) = self.den.leading().expect("single term");
        if dm.0.iter().enumerate().any(|(i, &e)| i != idx && e > 0) {
            return Err(Error::NotLaurent);
        }
        let pole = dm.0[idx] as i64;
        let dc_inv = dc.inv().expect("nonzero term");
        let want = exponent + pole;
        if want < 0 {
            return Ok(Scalar::zero(self.field()));
        }
        // Every other variable must be absent from the matching terms; the
        // pairing is only defined for univariate data.
        let mut acc = Scalar::zero(self.field());
        for (m, c) in self.num.terms() {
            if m.0[idx] as i64 == want && m.0.iter().enumerate().all(|(i, &e)| i == idx || e == 0) {
                acc = acc.add(c);
            } else if m.0[idx] as i64 == want {
                return Err(Error::NotLaurent);
            }
        }
        Ok(acc.mul(&dc_inv))
    }
}

fn substitute_polynomial(
    p: &Polynomial,
    values: &[&RationalFunction],
    tvars: &VarSet,
    tfield: FieldId,
) -> Result<RationalFunction> {
    // Precompute value powers up to the largest exponent used per variable.
    let n = values.len();
    let mut max_exp = vec![0u32; n];
    for (m, _) in p.terms() {
        for (i, &e) in m.0.iter().enumerate() {
            max_exp[i] = max_exp[i].max(e);
        }
    }
    let mut powers: Vec<Vec<RationalFunction>> = Vec::with_capacity(n);
    for (i, v) in values.iter().enumerate() {
        let mut row = vec![RationalFunction::one(tvars.clone(), tfield)];
        for e in 1..=max_exp[i] {
            let prev = row[(e - 1) as usize].clone();
            row.push(prev.mul(v));
        }
        powers.push(row);
    }
    let mut acc = RationalFunction::zero(tvars.clone(), tfield);
    for (m, c) in p.terms() {
        let mut term = RationalFunction::constant(c.clone(), tvars.clone());
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                term = term.mul(&powers[i][e as usize]);
            }
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_expression;

    fn v(names: &[&str]) -> VarSet {
        VarSet::new(names.to_vec()).unwrap()
    }

    fn rf(s: &str, names: &[&str]) -> RationalFunction {
        parse_expression(s, &v(names), FieldId::Rational).unwrap()
    }

    #[test]
    fn canonical_reduction() {
        // (x^2-1)/(x-1) reduces to x+1.
        let num = rf("x^2 - 1", &["x"]);
        let den = rf("x - 1", &["x"]);
        assert_eq!(num.checked_div(&den).unwrap(), rf("x + 1", &["x"]));
    }

    #[test]
    fn mul_inverse_cancels() {
        let z = rf("z", &["z"]);
        let inv = rf("1/z", &["z"]);
        assert!(z.mul(&inv).is_one());
    }

    #[test]
    fn partial_fraction_sum() {
        let a = rf("1/(x - 1)", &["x"]);
        let b = rf("1/(x + 1)", &["x"]);
        assert_eq!(a.add(&b), rf("2*x/(x^2 - 1)", &["x"]));
    }

    #[test]
    fn substitute_inversion() {
        let f = rf("z^2", &["z"]);
        let mut map = BTreeMap::new();
        map.insert("z".to_string(), rf("1/w", &["w"]));
        assert_eq!(f.substitute(&map).unwrap(), rf("1/w^2", &["w"]));
    }

    #[test]
    fn substitute_merge() {
        let f = rf("x + y", &["x", "y"]);
        let mut map = BTreeMap::new();
        map.insert("x".to_string(), rf("u", &["u"]));
        map.insert("y".to_string(), rf("u", &["u"]));
        assert_eq!(f.substitute(&map).unwrap(), rf("2*u", &["u"]));
    }

    #[test]
    fn substitute_moebius() {
        let f = rf("1/(1 - z)", &["z"]);
        let mut map = BTreeMap::new();
        map.insert("z".to_string(), rf("1/w", &["w"]));
        assert_eq!(f.substitute(&map).unwrap(), rf("w/(w - 1)", &["w"]));
    }

    #[test]
    fn substituted_denominator_zero() {
        let f = rf("1/(1 - z)", &["z"]);
        let mut map = BTreeMap::new();
        map.insert("z".to_string(), rf("1", &["w"]));
        assert!(matches!(
            f.substitute(&map),
            Err(Error::SubstitutedDenominatorZero)
        ));
    }

    #[test]
    fn derivative_powers() {
        for d in 1..6u32 {
            let f = rf(&format!("z^{d}"), &["z"]);
            let want = rf(&format!("{}*z^{}", d, d - 1), &["z"]);
            assert_eq!(f.partial_derivative("z").unwrap(), want);
        }
        let f = rf("1/z", &["z"]);
        assert_eq!(f.partial_derivative("z").unwrap(), rf("-1/z^2", &["z"]));
    }

    #[test]
    fn derivative_quotient_rule() {
        let f = rf("x*y/(x + y)", &["x", "y"]);
        assert_eq!(
            f.partial_derivative("x").unwrap(),
            rf("y^2/(x^2 + 2*x*y + y^2)", &["x", "y"])
        );
    }

    #[test]
    fn laurent_readoff() {
        for d in -4i64..5 {
            let f = rf(&format!("{d}/z"), &["z"]);
            assert_eq!(
                f.laurent_coefficient("z", -1).unwrap(),
                Scalar::from_i64(d, FieldId::Rational)
            );
        }
        let f = rf("z^3", &["z"]);
        assert!(f.laurent_coefficient("z", -1).unwrap().is_zero());
        let f = rf("1/(z - 1)", &["z"]);
        assert!(matches!(
            f.laurent_coefficient("z", -1),
            Err(Error::NotLaurent)
        ));
    }

    #[test]
    fn display_roundtrip() {
        for s in ["(x + y)/(x - y)", "1/x", "x^2 - 1/2", "0", "-x*y"] {
            let f = rf(s, &["x", "y"]);
            let again = rf(&f.to_string(), &["x", "y"]);
            assert_eq!(f, again);
        }
    }
}

//! Sparse multivariate polynomials over an exact field, with a fixed
//! graded-lexicographic monomial order and a subresultant-PRS gcd.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], so iteration order,
//! leading terms, and equality are all canonical. No zero coefficient is
//! ever stored.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{scalar_is_negative, FieldId, Scalar};

/// Ordered list of variable names shared by all values over one chart.
#[derive(Debug, Clone, Eq)]
pub struct VarSet(Arc<Vec<String>>);

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl VarSet {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<VarSet> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || names[..i].contains(n) {
                return Err(Error::InvalidParameters(format!(
                    "variable list must be nonempty distinct identifiers, got {names:?}"
                )));
            }
        }
        Ok(VarSet(Arc::new(names)))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.0[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

/// Exponent vector; ordered by total degree, ties broken lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn unit(nvars: usize) -> Monomial {
        Monomial(vec![0; nvars])
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise difference; `None` if any exponent would go negative.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A sparse polynomial over `field` in the variables of `vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    vars: VarSet,
    field: FieldId,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero(vars: VarSet, field: FieldId) -> Polynomial {
        Polynomial {
            vars,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Scalar, vars: VarSet) -> Polynomial {
        let field = c.field_id();
        let mut p = Polynomial::zero(vars, field);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(p.vars.len()), c);
        }
        p
    }

    pub fn one(vars: VarSet, field: FieldId) -> Polynomial {
        Polynomial::constant(Scalar::one(field), vars)
    }

    pub fn variable(idx: usize, vars: VarSet, field: FieldId) -> Polynomial {
        assert!(idx < vars.len());
        let mut expo = vec![0u32; vars.len()];
        expo[idx] = 1;
        let mut p = Polynomial::zero(vars, field);
        p.terms.insert(Monomial(expo), Scalar::one(field));
        p
    }

    pub fn monomial(expo: Vec<u32>, coeff: Scalar, vars: VarSet) -> Polynomial {
        assert_eq!(expo.len(), vars.len());
        let field = coeff.field_id();
        let mut p = Polynomial::zero(vars, field);
        if !coeff.is_zero() {
            p.terms.insert(Monomial(expo), coeff);
        }
        p
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .map(|(m, c)| m.is_unit() && c.is_one())
                .unwrap_or(false)
    }

    /// `Some(c)` when the polynomial is a constant (including zero).
    pub fn as_constant(&self) -> Option<Scalar> {
        if self.terms.is_empty() {
            return Some(Scalar::zero(self.field));
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_unit() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Leading term under the graded-lex order.
    pub fn leading(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    fn assert_compatible(&self, other: &Polynomial) {
        assert!(
            self.vars == other.vars && self.field == other.field,
            "polynomial ring mismatch"
        );
    }

    fn insert_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.assert_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.assert_compatible(other);
        let mut out = Polynomial::zero(self.vars.clone(), self.field);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.vars.clone(), self.field);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.mul(c);
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        let mut out = Polynomial::zero(self.vars.clone(), self.field);
        for (ma, ca) in &self.terms {
            out.terms.insert(ma.mul(m), ca.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.vars.clone(), self.field);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.vars.clone(), self.field);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut expo = m.0.clone();
            expo[var] = e - 1;
            let coeff = c.mul(&Scalar::from_i64(e as i64, self.field));
            out.insert_term(Monomial(expo), coeff);
        }
        out
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Polynomial) -> Option<Polynomial> {
        self.assert_compatible(divisor);
        if divisor.is_zero() {
            return None;
        }
        if divisor.is_one() {
            return Some(self.clone());
        }
        // Single-term divisors (the common case: monomial denominators)
        // divide termwise.
        if divisor.terms.len() == 1 {
            let (dm, dc) = divisor.leading().unwrap();
            let dc_inv = dc.inv().ok()?;
            let mut out = Polynomial::zero(self.vars.clone(), self.field);
            for (m, c) in &self.terms {
                let q = m.checked_div(dm)?;
                out.terms.insert(q, c.mul(&dc_inv));
            }
            return Some(out);
        }
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.vars.clone(), self.field);
        let (dm, dc) = {
            let (m, c) = divisor.leading().unwrap();
            (m.clone(), c.clone())
        };
        let dc_inv = dc.inv().ok()?;
        while !rem.is_zero() {
            let (rm, rc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            let qm = rm.checked_div(&dm)?;
            let qc = rc.mul(&dc_inv);
            let t = Polynomial::monomial(qm.0.clone(), qc, self.vars.clone());
            rem = rem.sub(&t.mul(divisor));
            quot = quot.add(&t);
        }
        Some(quot)
    }

    /// Componentwise minimum exponent over all terms (the monomial content).
    pub fn monomial_content(&self) -> Monomial {
        let n = self.vars.len();
        let mut min = vec![u32::MAX; n];
        for m in self.terms.keys() {
            for (lo, e) in min.iter_mut().zip(&m.0) {
                *lo = (*lo).min(*e);
            }
        }
        if self.terms.is_empty() {
            return Monomial::unit(n);
        }
        Monomial(min)
    }

    pub fn div_monomial(&self, m: &Monomial) -> Polynomial {
        let mut out = Polynomial::zero(self.vars.clone(), self.field);
        for (ma, ca) in &self.terms {
            let q = ma.checked_div(m).expect("monomial does not divide term");
            out.terms.insert(q, ca.clone());
        }
        out
    }

    /// Rescales so the grlex-leading coefficient is 1.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.inv().expect("nonzero leading coefficient");
                self.scale(&inv)
            }
        }
    }

    /// View as a univariate polynomial in `var`; coefficients have exponent
    /// zero in `var`.
    fn as_univariate(&self, var: usize) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut expo = m.0.clone();
            expo[var] = 0;
            out.entry(e)
                .or_insert_with(|| Polynomial::zero(self.vars.clone(), self.field))
                .insert_term(Monomial(expo), c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    fn leading_coeff_in(&self, var: usize) -> Polynomial {
        let d = self.degree_in(var);
        let mut out = Polynomial::zero(self.vars.clone(), self.field);
        for (m, c) in &self.terms {
            if m.0[var] == d {
                let mut expo = m.0.clone();
                expo[var] = 0;
                out.insert_term(Monomial(expo), c.clone());
            }
        }
        out
    }

    /// Content with respect to `var`: gcd of the univariate coefficients.
    fn content_in(&self, var: usize) -> Polynomial {
        let coeffs = self.as_univariate(var);
        let mut acc: Option<Polynomial> = None;
        for p in coeffs.values() {
            acc = Some(match acc {
                None => p.clone(),
                Some(g) => gcd(&g, p),
            });
            if let Some(g) = &acc {
                if g.as_constant().is_some() {
                    break;
                }
            }
        }
        acc.unwrap_or_else(|| Polynomial::zero(self.vars.clone(), self.field))
    }
}

/// Pseudo-remainder of `a` by `b` viewed in `var` (Knuth's prem).
fn pseudo_rem(a: &Polynomial, b: &Polynomial, var: usize) -> Polynomial {
    let db = b.degree_in(var);
    let lc_b = b.leading_coeff_in(var);
    let mut r = a.clone();
    let mut e = a.degree_in(var) as i64 - db as i64 + 1;
    while !r.is_zero() && r.degree_in(var) >= db {
        let dr = r.degree_in(var);
        let lc_r = r.leading_coeff_in(var);
        // r := lc_b * r - lc_r * x^(dr-db) * b
        let mut shift = vec![0u32; a.vars.len()];
        shift[var] = dr - db;
        let t = lc_r.mul_monomial(&Monomial(shift));
        r = r.mul(&lc_b).sub(&t.mul(b));
        e -= 1;
    }
    // Normalize the premultiplication count.
    let mut out = r;
    for _ in 0..e.max(0) {
        out = out.mul(&lc_b);
    }
    out
}

/// Subresultant polynomial remainder sequence on primitive inputs.
fn prs_gcd(mut a: Polynomial, mut b: Polynomial, var: usize) -> Polynomial {
    if a.degree_in(var) < b.degree_in(var) {
        std::mem::swap(&mut a, &mut b);
    }
    let vars = a.vars.clone();
    let field = a.field;
    let mut g = Polynomial::one(vars.clone(), field);
    let mut h = Polynomial::one(vars.clone(), field);
    loop {
        let delta = a.degree_in(var) - b.degree_in(var);
        let r = pseudo_rem(&a, &b, var);
        if r.is_zero() {
            return b;
        }
        if r.degree_in(var) == 0 {
            return Polynomial::one(vars, field);
        }
        a = b;
        let divisor = g.mul(&h.pow(delta));
        b = r
            .exact_div(&divisor)
            .expect("subresultant division is exact");
        g = a.leading_coeff_in(var);
        h = if delta == 0 {
            h
        } else {
            g.pow(delta)
                .exact_div(&h.pow(delta - 1))
                .expect("subresultant h-update is exact")
        };
    }
}

/// Monic gcd of two polynomials over the same field.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    a.assert_compatible(b);
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    // Split off the common monomial factor first; it handles the ubiquitous
    // monomial denominators outright.
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let common = Monomial(ma.0.iter().zip(&mb.0).map(|(x, y)| *x.min(y)).collect());
    let ap = a.div_monomial(&ma);
    let bp = b.div_monomial(&mb);
    let mut base = Polynomial::monomial(common.0.clone(), Scalar::one(a.field), a.vars.clone());
    if ap.as_constant().is_some() || bp.as_constant().is_some() {
        return base.monic();
    }
    // Main variable: lowest index occurring in either reduced operand.
    let var = (0..a.vars.len())
        .find(|&v| ap.degree_in(v) > 0 || bp.degree_in(v) > 0)
        .expect("nonconstant polynomial has a variable");
    if ap.degree_in(var) == 0 {
        let g = gcd(&ap, &bp.content_in(var));
        return base.mul(&g).monic();
    }
    if bp.degree_in(var) == 0 {
        let g = gcd(&bp, &ap.content_in(var));
        return base.mul(&g).monic();
    }
    let cont_a = ap.content_in(var);
    let cont_b = bp.content_in(var);
    let cont = gcd(&cont_a, &cont_b);
    let prim_a = ap.exact_div(&cont_a).expect("content divides");
    let prim_b = bp.exact_div(&cont_b).expect("content divides");
    let raw = prs_gcd(prim_a, prim_b, var);
    let prim = raw
        .exact_div(&raw.content_in(var))
        .expect("content divides");
    base = base.mul(&cont).mul(&prim);
    base.monic()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Leading term first; coefficients rendered so the parser reads the
        // string back.
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = scalar_is_negative(c);
            let mag = if neg { c.neg() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || m.is_unit() {
                factors.push(mag.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars.name(i).to_string()),
                    _ => factors.push(format!("{}^{}", self.vars.name(i), e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qvars() -> VarSet {
        VarSet::new(vec!["x", "y"]).unwrap()
    }

    fn qpoly(s: &str) -> Polynomial {
        crate::parse::parse_expression(s, &qvars(), FieldId::Rational)
            .unwrap()
            .into_polynomial()
            .unwrap()
    }

    #[test]
    fn grlex_order() {
        // x^2 > x*y > y^2 > x > y > 1 with x before y.
        let x2 = Monomial(vec![2, 0]);
        let xy = Monomial(vec![1, 1]);
        let y2 = Monomial(vec![0, 2]);
        let x = Monomial(vec![1, 0]);
        assert!(x2 > xy && xy > y2 && y2 > x);
    }

    #[test]
    fn mul_and_leading() {
        let p = qpoly("x + y").mul(&qpoly("x - y"));
        assert_eq!(p, qpoly("x^2 - y^2"));
        let (m, c) = p.leading().unwrap();
        assert_eq!(m, &Monomial(vec![2, 0]));
        assert!(c.is_one());
    }

    #[test]
    fn exact_division() {
        let p = qpoly("x^2 - y^2");
        let q = qpoly("x - y");
        assert_eq!(p.exact_div(&q).unwrap(), qpoly("x + y"));
        assert!(qpoly("x^2 + 1").exact_div(&q).is_none());
    }

    #[test]
    fn derivative_respects_product() {
        let p = qpoly("x^2*y + 3*x");
        let q = qpoly("y^2 - x");
        let lhs = p.mul(&q).derivative(0);
        let rhs = p.derivative(0).mul(&q).add(&p.mul(&q.derivative(0)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn gcd_univariate() {
        let g = gcd(&qpoly("x^2 - 1"), &qpoly("x^2 - 2*x + 1"));
        assert_eq!(g, qpoly("x - 1"));
    }

    #[test]
    fn gcd_multivariate() {
        let common = qpoly("x + y");
        let a = common.mul(&qpoly("x^2 + y"));
        let b = common.mul(&qpoly("x - y^2"));
        assert_eq!(gcd(&a, &b), common);
    }

    #[test]
    fn gcd_monomials() {
        let a = qpoly("x^3*y");
        let b = qpoly("x*y^2");
        assert_eq!(gcd(&a, &b), qpoly("x*y"));
    }

    #[test]
    fn gcd_coprime() {
        let g = gcd(&qpoly("x + 1"), &qpoly("y + 1"));
        assert!(g.is_one());
    }

    #[test]
    fn gcd_over_prime_field() {
        let vars = VarSet::new(vec!["x"]).unwrap();
        let f = FieldId::prime(101).unwrap();
        let p = |s: &str| {
            crate::parse::parse_expression(s, &vars, f)
                .unwrap()
                .into_polynomial()
                .unwrap()
        };
        let g = gcd(&p("x^2 - 1"), &p("x^2 + 2*x + 1"));
        assert_eq!(g, p("x + 1"));
    }

    #[test]
    fn display_roundtrip() {
        let p = qpoly("x^2 - 1/2*x*y + 3");
        let back = qpoly(&p.to_string());
        assert_eq!(p, back);
    }
}

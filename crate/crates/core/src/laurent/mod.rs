//! Sparse multivariate Laurent polynomials over the integers.
//!
//! Every cluster variable, exchange binomial and matrix minor in this crate is
//! a [`LaurentPoly`]: a finite sum of integer multiples of Laurent monomials
//! in the variables of a shared [`VarSet`]. Terms are kept sorted in
//! descending graded-lex order with no zero coefficients, so structural
//! equality is mathematical equality.

mod monomial;
mod packed;
mod parse;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use monomial::Monomial;
pub use parse::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("polynomials live in different variable sets")]
    VarSetMismatch,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("not divisible in the Laurent polynomial ring")]
    NotDivisible,
    #[error("variable `{0}` is evaluated at zero but occurs with a negative exponent")]
    ZeroDenominator(String),
    #[error("denominator vector of the zero polynomial is undefined")]
    ZeroHasNoDenominator,
    #[error("invalid variable set: {0}")]
    InvalidVarSet(String),
    #[error("variable index {0} out of range")]
    BadVariable(usize),
    #[error("point has {got} coordinates, expected {expected}")]
    PointLength { expected: usize, got: usize },
    #[error("malformed polynomial JSON: {0}")]
    Json(String),
}

/// The ordered list of variable names that exponent vectors index into.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarSet {
    names: Vec<String>,
}

impl VarSet {
    pub fn new<I, S>(names: I) -> Result<Arc<VarSet>, LaurentError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if !parse::is_identifier(name) {
                return Err(LaurentError::InvalidVarSet(format!(
                    "`{name}` is not an identifier"
                )));
            }
            if !seen.insert(name.as_str()) {
                return Err(LaurentError::InvalidVarSet(format!("duplicate name `{name}`")));
            }
        }
        Ok(Arc::new(VarSet { names }))
    }

    /// `x1, …, xm`.
    pub fn numbered(prefix: &str, m: usize) -> Arc<VarSet> {
        VarSet::new((1..=m).map(|i| format!("{prefix}{i}"))).expect("generated names are valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

fn same_vars(a: &Arc<VarSet>, b: &Arc<VarSet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// `-min exponent` per chosen cluster variable; see [`LaurentPoly::denominator_vector`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DenominatorVector(pub Vec<i64>);

impl DenominatorVector {
    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn add(&self, other: &DenominatorVector) -> DenominatorVector {
        DenominatorVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Result of dividing `p` by `q`: `p = q * quotient + remainder`.
#[derive(Debug, Clone)]
pub struct Division {
    pub quotient: LaurentPoly,
    pub remainder: LaurentPoly,
}

#[derive(Clone)]
pub struct LaurentPoly {
    vars: Arc<VarSet>,
    // descending term order, nonzero coefficients, distinct monomials
    terms: Vec<(Monomial, BigInt)>,
}

impl LaurentPoly {
    pub fn zero(vars: &Arc<VarSet>) -> Self {
        LaurentPoly {
            vars: vars.clone(),
            terms: Vec::new(),
        }
    }

    pub fn one(vars: &Arc<VarSet>) -> Self {
        Self::constant(vars, BigInt::one())
    }

    pub fn constant(vars: &Arc<VarSet>, c: impl Into<BigInt>) -> Self {
        Self::monomial(vars, Monomial::one(vars.len()), c)
    }

    pub fn var(vars: &Arc<VarSet>, i: usize) -> Self {
        assert!(i < vars.len(), "variable index {i} out of range");
        Self::monomial(vars, Monomial::unit(vars.len(), i, 1), 1)
    }

    pub fn monomial(vars: &Arc<VarSet>, m: Monomial, c: impl Into<BigInt>) -> Self {
        assert_eq!(m.len(), vars.len(), "exponent vector length");
        let c = c.into();
        let terms = if c.is_zero() { Vec::new() } else { vec![(m, c)] };
        LaurentPoly {
            vars: vars.clone(),
            terms,
        }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates and
    /// dropping zeros.
    pub fn from_terms<I>(vars: &Arc<VarSet>, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, BigInt)>,
    {
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in terms {
            assert_eq!(m.len(), vars.len(), "exponent vector length");
            *acc.entry(m).or_default() += c;
        }
        Self::from_map(vars, acc)
    }

    fn from_map(vars: &Arc<VarSet>, acc: HashMap<Monomial, BigInt>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        LaurentPoly {
            vars: vars.clone(),
            terms,
        }
    }

    fn from_sorted(vars: &Arc<VarSet>, terms: Vec<(Monomial, BigInt)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        LaurentPoly {
            vars: vars.clone(),
            terms,
        }
    }

    pub fn vars(&self) -> &Arc<VarSet> {
        &self.vars
    }

    /// Terms in descending term order.
    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().map(|(m, c)| (m, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.first().map(|(m, c)| (m, c))
    }

    /// Componentwise minimum exponent over all terms. `None` for zero.
    pub fn min_exponents(&self) -> Option<Monomial> {
        let mut it = self.terms.iter();
        let first = it.next()?.0.clone();
        Some(it.fold(first, |acc, (m, _)| acc.gcd(m)))
    }

    pub fn total_degree_range(&self) -> Option<(i64, i64)> {
        // descending graded order: first term has the largest degree
        let hi = self.terms.first()?.0.degree();
        let lo = self.terms.last()?.0.degree();
        Some((lo, hi))
    }

    /// Total degree when every term has the same degree.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        match self.total_degree_range()? {
            (lo, hi) if lo == hi => Some(lo),
            _ => None,
        }
    }

    fn check(&self, other: &LaurentPoly) -> Result<(), LaurentError> {
        if same_vars(&self.vars, &other.vars) {
            Ok(())
        } else {
            Err(LaurentError::VarSetMismatch)
        }
    }

    pub fn try_add(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check(other)?;
        Ok(self.merge(other, true))
    }

    fn merge(&self, other: &LaurentPoly, negate: bool) -> LaurentPoly {
        use std::cmp::Ordering::*;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let rhs = |c: &BigInt| if negate { -c } else { c.clone() };
        while i < self.terms.len() && j < other.terms.len() {
            let (a, b) = (&self.terms[i], &other.terms[j]);
            match a.0.cmp(&b.0) {
                Greater => {
                    out.push(a.clone());
                    i += 1;
                }
                Less => {
                    out.push((b.0.clone(), rhs(&b.1)));
                    j += 1;
                }
                Equal => {
                    let c = if negate { &a.1 - &b.1 } else { &a.1 + &b.1 };
                    if !c.is_zero() {
                        out.push((a.0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(other.terms[j..].iter().map(|(m, c)| (m.clone(), rhs(c))));
        LaurentPoly::from_sorted(&self.vars, out)
    }

    pub fn try_mul(&self, other: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(LaurentPoly::zero(&self.vars));
        }
        if other.is_monomial() {
            let (m, c) = &other.terms[0];
            return Ok(self.mul_term(m, c));
        }
        if self.is_monomial() {
            let (m, c) = &self.terms[0];
            return Ok(other.mul_term(m, c));
        }
        if let Some(terms) = packed::mul(&self.terms, &other.terms) {
            return Ok(LaurentPoly::from_sorted(&self.vars, terms));
        }
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity((self.terms.len() + other.terms.len()) * 4);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                match acc.entry(ma.mul(mb)) {
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += c,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                }
            }
        }
        Ok(LaurentPoly::from_map(&self.vars, acc))
    }

    /// Multiplication by `c * m`; order preserving since the term order is
    /// compatible with multiplication.
    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero(&self.vars);
        }
        let terms = self
            .terms
            .iter()
            .map(|(tm, tc)| (tm.mul(m), tc * c))
            .collect();
        LaurentPoly::from_sorted(&self.vars, terms)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> LaurentPoly {
        self.mul_term(m, &BigInt::one())
    }

    pub fn scale(&self, c: &BigInt) -> LaurentPoly {
        self.mul_term(&Monomial::one(self.vars.len()), c)
    }

    pub fn pow(&self, mut n: u32) -> LaurentPoly {
        if self.is_monomial() {
            let (m, c) = &self.terms[0];
            return LaurentPoly::monomial(&self.vars, m.pow(n as i32), num_traits::pow(c.clone(), n as usize));
        }
        let mut base = self.clone();
        let mut acc = LaurentPoly::one(&self.vars);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact division in the Laurent polynomial ring.
    ///
    /// Both operands are shifted by monomials into ordinary polynomials not
    /// divisible by any variable; the shifted dividend is then reduced by
    /// the shifted divisor with leading-term elimination in graded-lex order.
    pub fn try_exact_div(&self, q: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        self.check(q)?;
        match self.divide(q, true)? {
            Some(d) => Ok(d.quotient),
            None => Err(LaurentError::NotDivisible),
        }
    }

    /// Division with remainder under the same shift-and-reduce scheme as
    /// [`try_exact_div`](Self::try_exact_div). The remainder is zero exactly
    /// when `q` divides `self`.
    pub fn div_rem(&self, q: &LaurentPoly) -> Result<Division, LaurentError> {
        self.check(q)?;
        Ok(self.divide(q, false)?.expect("non-exact division always completes"))
    }

    fn divide(&self, q: &LaurentPoly, exact: bool) -> Result<Option<Division>, LaurentError> {
        if q.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        let vars = &self.vars;
        let Some(shift_p) = self.min_exponents() else {
            return Ok(Some(Division {
                quotient: LaurentPoly::zero(vars),
                remainder: LaurentPoly::zero(vars),
            }));
        };
        let shift_q = q.min_exponents().expect("nonzero");
        if q.is_monomial() {
            let (m, c) = &q.terms[0];
            let (q_terms, r_terms): (Vec<_>, Vec<_>) = self
                .terms
                .iter()
                .map(|(tm, tc)| {
                    let (quo, rem) = tc.div_rem(c);
                    ((tm.div(m), quo), (tm.clone(), rem))
                })
                .unzip();
            let remainder =
                LaurentPoly::from_sorted(vars, r_terms.into_iter().filter(|t| !t.1.is_zero()).collect());
            if exact && !remainder.is_zero() {
                return Ok(None);
            }
            let quotient =
                LaurentPoly::from_sorted(vars, q_terms.into_iter().filter(|t| !t.1.is_zero()).collect());
            return Ok(Some(Division { quotient, remainder }));
        }

        let divisor: Vec<(Monomial, BigInt)> = q
            .terms
            .iter()
            .map(|(m, c)| (m.div(&shift_q), c.clone()))
            .collect();
        let dividend: Vec<(Monomial, BigInt)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.div(&shift_p), c.clone()))
            .collect();
        let shift = shift_p.div(&shift_q);
        match packed::reduce(&dividend, &divisor, exact) {
            Some(packed::Reduced::NotExact) => return Ok(None),
            Some(packed::Reduced::Done(quotient, remainder)) => {
                let quotient = LaurentPoly::from_sorted(vars, quotient).mul_monomial(&shift);
                let remainder = LaurentPoly::from_sorted(vars, remainder).mul_monomial(&shift_p);
                return Ok(Some(Division { quotient, remainder }));
            }
            None => {}
        }
        let (lead_m, lead_c) = divisor[0].clone();
        let mut work: BTreeMap<Monomial, BigInt> = dividend.into_iter().collect();
        let mut quotient = Vec::new();
        let mut remainder = Vec::new();
        while let Some((m, c)) = work.pop_last() {
            let (t, rem) = if m.is_divisible_by(&lead_m) {
                c.div_rem(&lead_c)
            } else {
                (BigInt::zero(), c.clone())
            };
            if !rem.is_zero() || t.is_zero() {
                if exact {
                    return Ok(None);
                }
                remainder.push((m, c));
                continue;
            }
            let tm = m.div(&lead_m);
            for (dm, dc) in &divisor[1..] {
                let key = dm.mul(&tm);
                let delta = dc * &t;
                match work.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= delta;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-delta);
                    }
                }
            }
            quotient.push((tm, t));
        }
        // p = x^a P, q = x^b Q, P = Q S + R  =>  p = q x^(a-b) S + x^a R
        let quotient = LaurentPoly::from_sorted(vars, quotient).mul_monomial(&shift);
        let remainder = LaurentPoly::from_sorted(vars, remainder).mul_monomial(&shift_p);
        Ok(Some(Division { quotient, remainder }))
    }

    /// Replaces variable `var` by `num / den` and returns `(N, D)` with
    /// `N / D` equal to the substituted value. `D = num^L * den^H` where `H`
    /// (resp. `L`) is the largest positive (resp. negative) exponent of
    /// `var`. No cancellation is attempted.
    pub fn substitute_fraction(
        &self,
        var: usize,
        num: &LaurentPoly,
        den: &LaurentPoly,
    ) -> Result<(LaurentPoly, LaurentPoly), LaurentError> {
        self.check(num)?;
        self.check(den)?;
        if var >= self.vars.len() {
            return Err(LaurentError::BadVariable(var));
        }
        if den.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        let vars = &self.vars;
        // group terms by the exponent of `var`
        let mut by_exp: BTreeMap<i32, Vec<(Monomial, BigInt)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponents()[var];
            let mut rest = m.exponents().to_vec();
            rest[var] = 0;
            by_exp.entry(e).or_default().push((Monomial::new(rest), c.clone()));
        }
        let hi = by_exp.keys().next_back().map_or(0, |&e| e.max(0)) as u32;
        let lo = by_exp.keys().next().map_or(0, |&e| (-e).max(0)) as u32;
        if lo > 0 && num.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        let span = (hi + lo) as usize;
        let powers = |base: &LaurentPoly| {
            let mut v = vec![LaurentPoly::one(vars)];
            for i in 0..span {
                let next = &v[i] * base;
                v.push(next);
            }
            v
        };
        let num_pows = powers(num);
        let den_pows = powers(den);
        let mut numerator = LaurentPoly::zero(vars);
        for (e, terms) in by_exp {
            let rest = LaurentPoly::from_terms(vars, terms);
            let a = (e + lo as i32) as usize;
            let b = (hi as i32 - e) as usize;
            let term = &(&rest * &num_pows[a]) * &den_pows[b];
            numerator = &numerator + &term;
        }
        let denominator = &num_pows[lo as usize] * &den_pows[hi as usize];
        Ok((numerator, denominator))
    }

    /// `d_i = -min exponent of the i-th chosen variable over all terms`.
    pub fn denominator_vector(&self, cluster_vars: &[usize]) -> Result<DenominatorVector, LaurentError> {
        let mins = self.min_exponents().ok_or(LaurentError::ZeroHasNoDenominator)?;
        cluster_vars
            .iter()
            .map(|&i| {
                mins.exponents()
                    .get(i)
                    .map(|&e| -(e as i64))
                    .ok_or(LaurentError::BadVariable(i))
            })
            .collect::<Result<_, _>>()
            .map(DenominatorVector)
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_positive())
    }

    /// Exact evaluation at a rational point (one coordinate per variable).
    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational, LaurentError> {
        if point.len() != self.vars.len() {
            return Err(LaurentError::PointLength {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut value = BigRational::from_integer(c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if e < 0 && point[i].is_zero() {
                    return Err(LaurentError::ZeroDenominator(self.vars.name(i).to_string()));
                }
                value *= num_traits::Pow::pow(&point[i], e);
            }
            total += value;
        }
        Ok(total)
    }

    /// Re-labels the polynomial into another variable set of the same size.
    pub fn with_vars(&self, vars: &Arc<VarSet>) -> LaurentPoly {
        assert_eq!(vars.len(), self.vars.len());
        LaurentPoly {
            vars: vars.clone(),
            terms: self.terms.clone(),
        }
    }

    pub fn parse(text: &str, vars: &Arc<VarSet>) -> Result<LaurentPoly, ParseError> {
        parse::parse(text, vars)
    }

    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson {
                    e: m.exponents().to_vec(),
                    c: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &PolyJson, vars: &Arc<VarSet>) -> Result<LaurentPoly, LaurentError> {
        let mut terms = Vec::with_capacity(doc.terms.len());
        for t in &doc.terms {
            if t.e.len() != vars.len() {
                return Err(LaurentError::Json(format!(
                    "exponent vector of length {} for {} variables",
                    t.e.len(),
                    vars.len()
                )));
            }
            let c: BigInt = t
                .c
                .parse()
                .map_err(|_| LaurentError::Json(format!("bad coefficient `{}`", t.c)))?;
            terms.push((Monomial::new(t.e.clone()), c));
        }
        Ok(LaurentPoly::from_terms(vars, terms))
    }
}

/// `{"terms":[{"e":[...],"c":"<decimal>"}]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub e: Vec<i32>,
    pub c: String,
}

impl PartialEq for LaurentPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && same_vars(&self.vars, &other.vars)
    }
}

impl Eq for LaurentPoly {}

impl std::hash::Hash for LaurentPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

/// Term-order comparison, leading terms first. Only meaningful within one
/// variable set.
impl Ord for LaurentPoly {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1));
            if ord.is_ne() {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for LaurentPoly {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            match (idx, c.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let abs = c.abs();
            let factors: Vec<String> = m
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| match e {
                    1 => self.vars.name(i).to_string(),
                    _ => format!("{}^{}", self.vars.name(i), e),
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                f.write_str(&factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl LaurentPoly {
    /// `(N)/x^d` with `N` a polynomial not divisible by the denominator's
    /// variables; plain form when nothing sits in a denominator. Parses back.
    pub fn to_fraction_string(&self) -> String {
        let Some(mins) = self.min_exponents() else {
            return "0".into();
        };
        let den: Vec<i32> = mins.exponents().iter().map(|&e| (-e).max(0)).collect();
        if self.terms.len() == 1 || den.iter().all(|&d| d == 0) {
            return self.to_string();
        }
        let numerator = self.mul_monomial(&Monomial::new(den.clone()));
        let factors: Vec<String> = den
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .map(|(i, &d)| match d {
                1 => self.vars.name(i).to_string(),
                _ => format!("{}^{d}", self.vars.name(i)),
            })
            .collect();
        let den = if factors.len() == 1 {
            factors[0].clone()
        } else {
            format!("({})", factors.join("*"))
        };
        format!("({numerator})/{den}")
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;

    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_add(rhs).expect("variable set mismatch")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;

    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_sub(rhs).expect("variable set mismatch")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;

    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.try_mul(rhs).expect("variable set mismatch")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        LaurentPoly::from_sorted(
            &self.vars,
            self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        )
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;

    fn neg(self) -> LaurentPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fraction_strings_round_trip() {
        let v = VarSet::numbered("x", 3);
        for text in ["x2*x1^-1 + x1^-1", "x1 + x2", "x1^-2*x2^-1*x3 + 3*x1^-1 - 2", "x1^-1", "0", "5"] {
            let p = LaurentPoly::parse(text, &v).unwrap();
            let f = p.to_fraction_string();
            assert_eq!(LaurentPoly::parse(&f, &v).unwrap(), p, "{f}");
        }
        let p = LaurentPoly::parse("x2*x1^-1 + x1^-1", &v).unwrap();
        assert_eq!(p.to_fraction_string(), "(x2 + 1)/x1");
        let q = LaurentPoly::parse("x1^-2*x2^-1*x3 + x1^-1", &v).unwrap();
        assert_eq!(q.to_fraction_string(), "(x1*x2 + x3)/(x1^2*x2)");
    }

    fn vars2() -> Arc<VarSet> {
        VarSet::new(["x", "y"]).unwrap()
    }

    fn p(s: &str, v: &Arc<VarSet>) -> LaurentPoly {
        LaurentPoly::parse(s, v).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn add_examples() {
        let v = VarSet::numbered("x", 2);
        let x1 = LaurentPoly::var(&v, 0);
        assert!((&x1 + &(-&x1)).is_zero());
        assert_eq!(&p("x1^2", &v) + &p("x1^2", &v), p("2*x1^2", &v));
        let sum = &p("x1*x2^-1", &v) + &p("x2", &v);
        assert_eq!(sum.len(), 2);
        assert_eq!(sum.to_string(), "x2 + x1*x2^-1");
    }

    #[test]
    fn mul_examples() {
        let v = vars2();
        let a = p("x^2 - 3*x*y + y^-1", &v);
        assert_eq!(&LaurentPoly::one(&v) * &a, a);
        assert!((&p("x^-1", &v) * &p("x", &v)).is_one());
        assert_eq!(&p("x - y", &v) * &p("x + y", &v), p("x^2 - y^2", &v));
    }

    #[test]
    fn exact_division_examples() {
        let v = vars2();
        assert_eq!(
            p("x^2 - y^2", &v).try_exact_div(&p("x - y", &v)).unwrap(),
            p("x + y", &v)
        );
        assert_eq!(
            p("x + 1", &v).try_exact_div(&p("x", &v)).unwrap(),
            p("1 + x^-1", &v)
        );
        assert_eq!(
            p("x + 1", &v).try_exact_div(&p("x - 1", &v)),
            Err(LaurentError::NotDivisible)
        );
        assert_eq!(
            p("x", &v).try_exact_div(&LaurentPoly::zero(&v)),
            Err(LaurentError::DivisionByZero)
        );
        // integer coefficients only
        assert_eq!(
            p("x + 1", &v).try_exact_div(&p("2*x + 2", &v)),
            Err(LaurentError::NotDivisible)
        );
        assert_eq!(
            p("2*x + 2", &v).try_exact_div(&p("x + 1", &v)).unwrap(),
            p("2", &v)
        );
    }

    #[test]
    fn division_with_monomial_shifts() {
        let v = vars2();
        // (x^-1 y + x^-2)(y^-3 + x) = x^-1 y^-2 + y + x^-2 y^-3 + x^-1
        let a = p("x^-1*y + x^-2", &v);
        let b = p("y^-3 + x", &v);
        let prod = &a * &b;
        assert_eq!(prod.try_exact_div(&b).unwrap(), a);
        assert_eq!(prod.try_exact_div(&a).unwrap(), b);
    }

    #[test]
    fn sl3_minor_quotient() {
        let v = VarSet::new(["x11", "x12", "x21", "x22"]).unwrap();
        let num = p("x11*x22 - x12*x21 + x12*x21", &v);
        assert_eq!(num.try_exact_div(&p("x11", &v)).unwrap(), p("x22", &v));
    }

    #[test]
    fn div_rem_reconstructs() {
        let v = vars2();
        let a = p("x^3 + 2*x*y - y^-1 + 5", &v);
        let b = p("x*y - 1", &v);
        let d = a.div_rem(&b).unwrap();
        assert!(!d.remainder.is_zero());
        assert_eq!(&(&b * &d.quotient) + &d.remainder, a);
    }

    #[test]
    fn substitute_fraction_examples() {
        let v = VarSet::new(["x", "a", "b", "c"]).unwrap();
        let num = p("a + b", &v);
        let den = p("c", &v);
        let (n, d) = p("x", &v).substitute_fraction(0, &num, &den).unwrap();
        assert_eq!((n, d), (num.clone(), den.clone()));
        let (n, d) = p("x^-1", &v).substitute_fraction(0, &num, &den).unwrap();
        assert_eq!((n, d), (den.clone(), num.clone()));
        let (n, d) = p("x + x^-1", &v).substitute_fraction(0, &num, &den).unwrap();
        assert_eq!(n, &num.pow(2) + &den.pow(2));
        assert_eq!(d, &den * &num);
        assert_eq!(
            p("x", &v).substitute_fraction(0, &num, &LaurentPoly::zero(&v)),
            Err(LaurentError::DivisionByZero)
        );
    }

    #[test]
    fn denominator_vector_examples() {
        let v = VarSet::numbered("x", 2);
        assert_eq!(
            p("x2", &v).denominator_vector(&[0, 1]).unwrap(),
            DenominatorVector(vec![0, -1])
        );
        assert_eq!(
            p("x2*x1^-1 + x1^-1", &v).denominator_vector(&[0, 1]).unwrap(),
            DenominatorVector(vec![1, 0])
        );
        assert_eq!(
            LaurentPoly::zero(&v).denominator_vector(&[0]),
            Err(LaurentError::ZeroHasNoDenominator)
        );
    }

    #[test]
    fn nonnegativity() {
        let v = vars2();
        assert!(p("x + 1", &v).has_nonnegative_coeffs());
        assert!(!p("x - 1", &v).has_nonnegative_coeffs());
        assert!(LaurentPoly::zero(&v).has_nonnegative_coeffs());
    }

    #[test]
    fn evaluate_examples() {
        let v = VarSet::numbered("x", 2);
        assert_eq!(
            p("x1*x2^-1", &v).evaluate(&[q(2, 1), q(4, 1)]).unwrap(),
            q(1, 2)
        );
        assert_eq!(p("7", &v).evaluate(&[q(0, 1), q(0, 1)]).unwrap(), q(7, 1));
        let w = vars2();
        assert_eq!(
            (&p("x - y", &w) * &p("x + y", &w)).evaluate(&[q(3, 1), q(1, 1)]).unwrap(),
            q(8, 1)
        );
        assert!(matches!(
            p("x^-1", &w).evaluate(&[q(0, 1), q(1, 1)]),
            Err(LaurentError::ZeroDenominator(_))
        ));
    }

    #[test]
    fn varset_mismatch_is_an_error() {
        let a = LaurentPoly::var(&vars2(), 0);
        let b = LaurentPoly::var(&VarSet::new(["u", "w"]).unwrap(), 0);
        assert_eq!(a.try_add(&b), Err(LaurentError::VarSetMismatch));
        assert_eq!(a.try_mul(&b), Err(LaurentError::VarSetMismatch));
        assert_eq!(a.try_exact_div(&b), Err(LaurentError::VarSetMismatch));
    }

    #[test]
    fn printer_is_sorted_and_signed() {
        let v = vars2();
        let a = p("1 - y + 3*x^2*y^-1 - x", &v);
        assert_eq!(a.to_string(), "3*x^2*y^-1 - x - y + 1");
        assert_eq!(p("-1", &v).to_string(), "-1");
        assert_eq!(LaurentPoly::zero(&v).to_string(), "0");
    }

    #[test]
    fn json_round_trip() {
        let v = vars2();
        let a = p("-12345678901234567890123*x*y^-2 + 4", &v);
        let text = serde_json::to_string(&a.to_json()).unwrap();
        assert!(text.contains("\"c\":\"-12345678901234567890123\""));
        let back: PolyJson = serde_json::from_str(&text).unwrap();
        assert_eq!(LaurentPoly::from_json(&back, &v).unwrap(), a);
    }
}

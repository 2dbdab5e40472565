//! Sparse multivariate Laurent polynomials with exact BigInt coefficients.
//!
//! Monomials are ordered graded-lexicographically over the total order on
//! [`VarId`]; canonical text form lists terms in descending monomial order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LaurentError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("no exact Laurent quotient")]
    NotDivisible,
    #[error("negative power of a non-unit")]
    NotAUnit,
    #[error("no value assigned to variable {0}")]
    MissingVariable(String),
    #[error("zero assigned to variable {0} occurring with negative exponent")]
    ZeroAssignment(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// Variable identifier. `Atom` is a boundary initial-data symbol a[alpha,j];
/// `Named` covers everything else (fixture symbols like R[1,2], series
/// variables like t).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarId {
    Atom { alpha: i32, j: i64 },
    Named { name: String, indices: Option<(i64, i64)> },
}

impl VarId {
    pub fn atom(alpha: i32, j: i64) -> Self {
        VarId::Atom { alpha, j }
    }
    pub fn named(name: &str) -> Self {
        VarId::Named { name: name.to_string(), indices: None }
    }
    pub fn indexed(name: &str, i: i64, k: i64) -> Self {
        VarId::Named { name: name.to_string(), indices: Some((i, k)) }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::Atom { alpha, j } => write!(f, "a[{},{}]", alpha, j),
            VarId::Named { name, indices: None } => write!(f, "{}", name),
            VarId::Named { name, indices: Some((i, k)) } => write!(f, "{}[{},{}]", name, i, k),
        }
    }
}

/// Product of variables with nonzero integer exponents; empty = 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<(VarId, i64)>, // sorted by VarId, exponents nonzero
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial { exps: Vec::new() }
    }

    pub fn var(v: VarId, e: i64) -> Self {
        if e == 0 {
            Monomial::unit()
        } else {
            Monomial { exps: vec![(v, e)] }
        }
    }

    /// Builds from arbitrary pairs: sorts, merges, drops zeros.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, i64)>) -> Self {
        let mut v: Vec<(VarId, i64)> = pairs.into_iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(VarId, i64)> = Vec::with_capacity(v.len());
        for (var, e) in v {
            match out.last_mut() {
                Some((last, le)) if *last == var => *le += e,
                _ => out.push((var, e)),
            }
        }
        out.retain(|(_, e)| *e != 0);
        Monomial { exps: out }
    }

    pub fn is_unit(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exps(&self) -> &[(VarId, i64)] {
        &self.exps
    }

    pub fn exp_of(&self, v: &VarId) -> i64 {
        self.exps
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.exps[i].1)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> i64 {
        self.exps.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.exps.len() + other.exps.len());
        let (mut i, mut k) = (0, 0);
        while i < self.exps.len() && k < other.exps.len() {
            match self.exps[i].0.cmp(&other.exps[k].0) {
                Ordering::Less => {
                    out.push(self.exps[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.exps[k].clone());
                    k += 1;
                }
                Ordering::Equal => {
                    let e = self.exps[i].1 + other.exps[k].1;
                    if e != 0 {
                        out.push((self.exps[i].0.clone(), e));
                    }
                    i += 1;
                    k += 1;
                }
            }
        }
        out.extend_from_slice(&self.exps[i..]);
        out.extend_from_slice(&other.exps[k..]);
        Monomial { exps: out }
    }

    pub fn inv(&self) -> Monomial {
        Monomial { exps: self.exps.iter().map(|(v, e)| (v.clone(), -e)).collect() }
    }

    pub fn pow(&self, n: i64) -> Monomial {
        if n == 0 {
            return Monomial::unit();
        }
        Monomial { exps: self.exps.iter().map(|(v, e)| (v.clone(), e * n)).collect() }
    }

    /// True iff other/self has no negative exponent.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().all(|(v, e)| other.exp_of(v) >= *e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| {
                // Lexicographic tie-break: walk variables in increasing order,
                // missing exponent counts as 0; stored exponents are nonzero,
                // so the first mismatch decides.
                let (mut i, mut k) = (0, 0);
                loop {
                    match (self.exps.get(i), other.exps.get(k)) {
                        (None, None) => return Ordering::Equal,
                        (Some((_, e)), None) => return e.cmp(&0),
                        (None, Some((_, e))) => return 0.cmp(e),
                        (Some((v, e)), Some((w, g))) => match v.cmp(w) {
                            Ordering::Less => return e.cmp(&0),
                            Ordering::Greater => return 0.cmp(g),
                            Ordering::Equal => {
                                if e != g {
                                    return e.cmp(g);
                                }
                                i += 1;
                                k += 1;
                            }
                        },
                    }
                }
            })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse Laurent polynomial: map monomial -> nonzero BigInt coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        LaurentPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(), c);
        }
        LaurentPoly { terms }
    }

    pub fn int(n: i64) -> Self {
        LaurentPoly::constant(BigInt::from(n))
    }

    pub fn var(v: VarId) -> Self {
        LaurentPoly::term(Monomial::var(v, 1), BigInt::one())
    }

    pub fn atom(alpha: i32, j: i64) -> Self {
        LaurentPoly::var(VarId::atom(alpha, j))
    }

    pub fn term(m: Monomial, c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        LaurentPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::unit())
                .map_or(false, |c| c.is_one())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn uses_var(&self, v: &VarId) -> bool {
        self.terms.keys().any(|m| m.exp_of(v) != 0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// Some((m, c)) iff the polynomial has exactly one term.
    pub fn as_single_term(&self) -> Option<(&Monomial, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// True iff p != 0 and every coefficient is > 0.
    pub fn is_positive(&self) -> bool {
        !self.terms.is_empty() && self.terms.values().all(|c| c.is_positive())
    }

    /// Coefficient of v^n, as a polynomial with v removed.
    pub fn coefficient_of(&self, v: &VarId, n: i64) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (m, c) in &self.terms {
            if m.exp_of(v) == n {
                out.add_term(m.mul(&Monomial::var(v.clone(), -n)), c.clone());
            }
        }
        out
    }

    /// Drops every term whose exponent of v exceeds n.
    pub fn drop_above_degree(&self, v: &VarId, n: i64) -> LaurentPoly {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.exp_of(v) <= n)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn vars(&self) -> Vec<VarId> {
        let mut out: Vec<VarId> = Vec::new();
        for m in self.terms.keys() {
            for (v, _) in m.exps() {
                out.push(v.clone());
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { terms: self.terms.iter().map(|(m1, c1)| (m1.mul(m), c1 * c)).collect() }
    }

    /// p^n. Negative n requires a monomial unit (single term, coefficient ±1).
    pub fn pow(&self, n: i64) -> Result<LaurentPoly, LaurentError> {
        if n == 0 {
            return Ok(LaurentPoly::one());
        }
        if n < 0 {
            let (m, c) = self.as_single_term().ok_or(LaurentError::NotAUnit)?;
            if !(c.is_one() || (-c).is_one()) {
                return Err(LaurentError::NotAUnit);
            }
            let coeff = if c.is_one() || n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            return Ok(LaurentPoly::term(m.pow(n), coeff));
        }
        // Square-and-multiply.
        let mut base = self.clone();
        let mut acc = LaurentPoly::one();
        let mut e = n as u64;
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

    fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Exact Laurent quotient self/q; errors if no exact quotient exists.
    pub fn exact_div(&self, q: &LaurentPoly) -> Result<LaurentPoly, LaurentError> {
        if q.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(LaurentPoly::zero());
        }
        // Pull off q's monomial content u so qhat is a genuine polynomial with
        // zero valuation in every variable, positive leading coefficient.
        let u = monomial_content(q);
        let u_inv = u.inv();
        let mut qhat = q.mul_term(&u_inv, &BigInt::one());
        let negate = qhat.leading().map_or(false, |(_, c)| c.is_negative());
        if negate {
            qhat = qhat.neg();
        }
        let mut p = self.mul_term(&u_inv, &BigInt::one());
        if negate {
            p = p.neg();
        }
        // Shift p to nonnegative exponents; the quotient carries the shift back.
        let shift = monomial_content(&p);
        let p2 = p.mul_term(&shift.inv(), &BigInt::one());
        // Single-divisor multivariate division; exactness requires remainder 0.
        let mut rem = p2;
        let mut quo = LaurentPoly::zero();
        let (qm, qc) = {
            let (m, c) = qhat.leading().expect("nonzero divisor");
            (m.clone(), c.clone())
        };
        while let Some((rm, rc)) = rem.leading() {
            if !qm.divides(rm) {
                return Err(LaurentError::NotDivisible);
            }
            let (tc, tr) = num_integer::Integer::div_rem(rc, &qc);
            if !tr.is_zero() {
                return Err(LaurentError::NotDivisible);
            }
            let tm = rm.mul(&qm.inv());
            quo.add_term(tm.clone(), tc.clone());
            for (m1, c1) in &qhat.terms {
                rem.add_term(m1.mul(&tm), -(c1 * &tc));
            }
        }
        Ok(quo.mul_term(&shift, &BigInt::one()))
    }

    /// Exact rational value; assignment must cover every variable, nonzero.
    pub fn eval(
        &self,
        assignment: &BTreeMap<VarId, BigRational>,
    ) -> Result<BigRational, LaurentError> {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut val = BigRational::from(c.clone());
            for (v, e) in m.exps() {
                let x = assignment
                    .get(v)
                    .ok_or_else(|| LaurentError::MissingVariable(v.to_string()))?;
                if x.is_zero() {
                    return Err(LaurentError::ZeroAssignment(v.to_string()));
                }
                val *= rat_pow(x, *e);
            }
            total += val;
        }
        Ok(total)
    }

    /// Replaces variables by polynomials; unmapped variables stay themselves.
    /// Negative exponents of mapped variables are cleared through a single
    /// exact division, so the substitution must itself be exact (it is for
    /// label substitution, by the Laurent property).
    pub fn substitute(
        &self,
        map: &BTreeMap<VarId, LaurentPoly>,
    ) -> Result<LaurentPoly, LaurentError> {
        // Per mapped variable with a negative exponent anywhere: denominator
        // power needed to make all its occurrences nonnegative.
        let mut need: BTreeMap<&VarId, i64> = BTreeMap::new();
        for m in self.terms.keys() {
            for (v, e) in m.exps() {
                if *e < 0 && map.contains_key(v) {
                    let d = need.entry(v).or_insert(0);
                    *d = (*d).max(-e);
                }
            }
        }
        let mut denom = LaurentPoly::one();
        for (v, d) in &need {
            denom = denom.mul(&map[v].pow(*d)?);
        }
        // The image powers repeat across terms; cache them.
        let mut powers: BTreeMap<(VarId, i64), LaurentPoly> = BTreeMap::new();
        let mut cached = |v: &VarId, e: i64| -> Result<LaurentPoly, LaurentError> {
            use std::collections::btree_map::Entry;
            Ok(match powers.entry((v.clone(), e)) {
                Entry::Occupied(o) => o.get().clone(),
                Entry::Vacant(slot) => slot.insert(map[v].pow(e)?).clone(),
            })
        };
        let mut numer = LaurentPoly::zero();
        for (m, c) in &self.terms {
            let mut t = LaurentPoly::one();
            let mut residual = Monomial::unit();
            for (v, e) in m.exps() {
                let d = need.get(v).copied().unwrap_or(0);
                match map.get(v) {
                    Some(_) => t = t.mul(&cached(v, e + d)?),
                    None => residual = residual.mul(&Monomial::var(v.clone(), *e)),
                }
            }
            // Mapped vars absent from this term still owe their shift power.
            for (v, d) in &need {
                if m.exp_of(v) == 0 {
                    t = t.mul(&cached(v, *d)?);
                }
            }
            for (m1, c1) in &t.terms {
                numer.add_term(m1.mul(&residual), c1 * c);
            }
        }
        if denom.is_one() {
            Ok(numer)
        } else {
            numer.exact_div(&denom)
        }
    }

    pub fn parse(text: &str) -> Result<LaurentPoly, LaurentError> {
        Parser { bytes: text.as_bytes(), pos: 0 }.parse_all()
    }
}

/// Componentwise minimum exponent over all terms (absent variable = 0);
/// dividing by it makes every variable's valuation exactly zero.
fn monomial_content(p: &LaurentPoly) -> Monomial {
    let mut min: BTreeMap<VarId, i64> = BTreeMap::new();
    for m in p.terms.keys() {
        for (v, _) in m.exps() {
            min.entry(v.clone()).or_insert(i64::MAX);
        }
    }
    for m in p.terms.keys() {
        for (v, x) in min.iter_mut() {
            *x = (*x).min(m.exp_of(v));
        }
    }
    Monomial::from_pairs(min)
}

fn rat_pow(x: &BigRational, e: i64) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    let mut base = if e < 0 { x.recip() } else { x.clone() };
    let mut acc = BigRational::one();
    let mut n = e.unsigned_abs();
    while n > 0 {
        if n & 1 == 1 {
            acc *= &base;
        }
        n >>= 1;
        if n > 0 {
            base = base.clone() * &base;
        }
    }
    acc
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_unit() {
                write!(f, "{}", abs)?;
            } else {
                let mut lead = false;
                if !abs.is_one() {
                    write!(f, "{}", abs)?;
                    lead = true;
                }
                for (v, e) in m.exps() {
                    if lead {
                        write!(f, "*")?;
                    }
                    lead = true;
                    if *e == 1 {
                        write!(f, "{}", v)?;
                    } else {
                        write!(f, "{}^{}", v, e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FromStr for LaurentPoly {
    type Err = LaurentError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        LaurentPoly::parse(s)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl std::ops::$trait for &LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: &LaurentPoly) -> LaurentPoly {
                self.$imp(rhs)
            }
        }
        impl std::ops::$trait for LaurentPoly {
            type Output = LaurentPoly;
            fn $method(self, rhs: LaurentPoly) -> LaurentPoly {
                LaurentPoly::$imp(&self, &rhs)
            }
        }
    };
}
binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl std::ops::Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly::neg(self)
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, LaurentError> {
        Err(LaurentError::Syntax { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn parse_all(mut self) -> Result<LaurentPoly, LaurentError> {
        let p = self.parse_expr()?;
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return self.err("unexpected trailing input");
        }
        Ok(p)
    }

    fn parse_expr(&mut self) -> Result<LaurentPoly, LaurentError> {
        let mut neg = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            neg = true;
        } else if self.peek() == Some(b'+') {
            self.pos += 1;
        }
        let mut acc = self.parse_term()?;
        if neg {
            acc = acc.neg();
        }
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = acc.add(&self.parse_term()?);
                }
                b'-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.parse_term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<LaurentPoly, LaurentError> {
        let mut acc = self.parse_factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.parse_factor()?);
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<LaurentPoly, LaurentError> {
        let base = self.parse_atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.parse_signed_int()?;
            return base.pow(e).map_err(|_| LaurentError::Syntax {
                pos: self.pos,
                msg: "negative power of a non-unit".to_string(),
            });
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<LaurentPoly, LaurentError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let p = self.parse_expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(p)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.parse_uint()?;
                Ok(LaurentPoly::constant(n))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self
                    .bytes
                    .get(self.pos)
                    .map_or(false, |b| b.is_ascii_alphanumeric() || *b == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap().to_string();
                if self.peek() == Some(b'[') {
                    self.pos += 1;
                    let i = self.parse_signed_int()?;
                    if self.peek() != Some(b',') {
                        return self.err("expected ',' in variable index");
                    }
                    self.pos += 1;
                    let k = self.parse_signed_int()?;
                    if self.peek() != Some(b']') {
                        return self.err("expected ']'");
                    }
                    self.pos += 1;
                    if name == "a" {
                        let alpha = i32::try_from(i)
                            .map_err(|_| LaurentError::Syntax {
                                pos: self.pos,
                                msg: "layer index out of range".to_string(),
                            })?;
                        Ok(LaurentPoly::var(VarId::atom(alpha, k)))
                    } else {
                        Ok(LaurentPoly::var(VarId::indexed(&name, i, k)))
                    }
                } else {
                    Ok(LaurentPoly::var(VarId::named(&name)))
                }
            }
            _ => self.err("expected integer, variable, or '('"),
        }
    }

    fn parse_uint(&mut self) -> Result<BigInt, LaurentError> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).map_or(false, |b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .unwrap())
    }

    fn parse_signed_int(&mut self) -> Result<i64, LaurentError> {
        let mut neg = false;
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                neg = true;
            }
            Some(b'+') => {
                self.pos += 1;
            }
            _ => {}
        }
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).map_or(false, |b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let n: i64 = std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| LaurentError::Syntax {
                pos: self.pos,
                msg: "integer out of range".to_string(),
            })?;
        Ok(if neg { -n } else { n })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> LaurentPoly {
        LaurentPoly::var(VarId::named(name))
    }

    #[test]
    fn ring_basics() {
        let a = v("a");
        let b = v("b");
        let lhs = (&a + &b) * (&a - &b);
        let rhs = &(&a * &a) - &(&b * &b);
        assert_eq!(lhs, rhs.clone());
        assert_eq!(a.add(&a.neg()), LaurentPoly::zero());
    }

    #[test]
    fn pow_unit_inversion() {
        let m = v("a").mul(&v("b").pow(-1).unwrap());
        let p = m.pow(-2).unwrap();
        assert_eq!(p.to_string(), "a^-2*b^2");
        assert_eq!(v("a").add(&v("a")).pow(-1), Err(LaurentError::NotAUnit));
    }

    #[test]
    fn exact_div_cases() {
        let (x, y, z) = (v("x"), v("y"), v("z"));
        let p = x.mul(&z).add(&LaurentPoly::one());
        let q = p.exact_div(&y).unwrap();
        assert_eq!(q.to_string(), "x*y^-1*z + y^-1");
        let (a, b) = (v("a"), v("b"));
        let diff = a.mul(&a).sub(&b.mul(&b));
        assert_eq!(diff.exact_div(&a.add(&b)).unwrap(), a.sub(&b));
        assert_eq!(a.add(&b).exact_div(&a.add(&LaurentPoly::one())), Err(LaurentError::NotDivisible));
        assert_eq!(a.exact_div(&LaurentPoly::zero()), Err(LaurentError::DivisionByZero));
        // Quotient needing a variable absent from the divisor's support.
        assert_eq!(v("y").exact_div(&v("x")).unwrap().to_string(), "x^-1*y");
    }

    #[test]
    fn eval_cases() {
        let mut env = BTreeMap::new();
        env.insert(VarId::named("a"), BigRational::from(BigInt::from(2)));
        env.insert(VarId::named("b"), BigRational::from(BigInt::from(3)));
        let p = v("a").add(&v("b").pow(-1).unwrap());
        assert_eq!(
            p.eval(&env).unwrap(),
            BigRational::new(BigInt::from(7), BigInt::from(3))
        );
        assert_eq!(LaurentPoly::zero().eval(&BTreeMap::new()).unwrap(), BigRational::zero());
        let q = v("a").mul(&v("a")).sub(&v("b").mul(&v("b")));
        let mut env2 = BTreeMap::new();
        env2.insert(VarId::named("a"), BigRational::from(BigInt::from(3)));
        env2.insert(VarId::named("b"), BigRational::from(BigInt::from(2)));
        assert_eq!(q.eval(&env2).unwrap(), BigRational::from(BigInt::from(5)));
        assert!(matches!(v("c").eval(&env), Err(LaurentError::MissingVariable(_))));
    }

    #[test]
    fn positivity() {
        assert!(v("a").mul(&v("b").pow(-1).unwrap()).add(&LaurentPoly::int(2)).is_positive());
        assert!(!v("a").sub(&v("b")).is_positive());
        assert!(!LaurentPoly::zero().is_positive());
    }

    #[test]
    fn parse_roundtrip() {
        let p = LaurentPoly::parse("a[1,0]^-1 * b + 3").unwrap();
        let s = p.to_string();
        assert_eq!(LaurentPoly::parse(&s).unwrap(), p);
        let q = LaurentPoly::parse("(x + y)^3 - 2*R[1,2]^-2").unwrap();
        assert_eq!(LaurentPoly::parse(&q.to_string()).unwrap(), q);
        assert_eq!(LaurentPoly::parse("0").unwrap(), LaurentPoly::zero());
        assert_eq!(LaurentPoly::parse("-x + x").unwrap(), LaurentPoly::zero());
        assert!(matches!(
            LaurentPoly::parse("x + * y"),
            Err(LaurentError::Syntax { .. })
        ));
    }

    #[test]
    fn substitution_with_negative_exponents() {
        // (xz + bu)/y with y mapped to a two-term polynomial that divides out.
        let (x, y, z) = (v("x"), v("y"), v("z"));
        let p = x.mul(&z).add(&LaurentPoly::one()).exact_div(&y).unwrap();
        let mut map = BTreeMap::new();
        map.insert(
            VarId::named("x"),
            v("z").pow(-1).unwrap().mul(&v("w").add(&LaurentPoly::one())),
        );
        // p = (xz+1)/y -> ((w+1)+1)/y = (w+2)/y, exact since y stays atomic.
        let got = p.substitute(&map).unwrap();
        let want = v("w").add(&LaurentPoly::int(2)).mul(&v("y").pow(-1).unwrap());
        assert_eq!(got, want);
    }

    #[test]
    fn graded_lex_order() {
        let a = Monomial::var(VarId::named("a"), 1);
        let b = Monomial::var(VarId::named("b"), 1);
        let ab = a.mul(&b);
        assert!(ab > a); // higher total degree
        assert!(a > b); // same degree, a has positive exponent on earlier var
        let binv = Monomial::var(VarId::named("b"), -1);
        assert!(Monomial::unit() > binv);
    }
}

//! Exact coefficients: sparse multivariate polynomials over the rationals,
//! and fractions of those for the few places where division is unavoidable.
//!
//! One variable space serves every layer: named formal parameters, the
//! integration variables attached to colored indices, marked points, and
//! auxiliary points. Equality of fractions is decided by cross-multiplication,
//! so no polynomial gcd is ever required.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::seq::Idx;

pub type Rat = num_rational::BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

/// A variable. The derived order (parameters, then t's, then marked points,
/// then auxiliary points) is the fixed total order used for canonical forms.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Var {
    /// Named formal parameter.
    Param(u32),
    /// Integration variable attached to a colored index.
    T(Idx),
    /// Marked point.
    Z(u16),
    /// Auxiliary marked point.
    Aux(u16),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Param(k) => write!(f, "p{k}"),
            Var::T(i) => write!(f, "t{i}"),
            Var::Z(n) => write!(f, "z{n}"),
            Var::Aux(k) => write!(f, "w{k}"),
        }
    }
}

/// A monomial: sorted variable/exponent pairs, exponents >= 1.
#[derive(Clone, PartialEq, Eq, Debug, Hash, Default)]
pub struct Mono(pub Vec<(Var, u32)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Mono(alloc::vec![(v, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn deg_in(&self, v: Var) -> u32 {
        self.0
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut out: Vec<(Var, u32)> = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(&&x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(&&y)) => {
                    out.push(y);
                    b.next();
                }
                (Some(&&(vx, ex)), Some(&&(vy, ey))) => match vx.cmp(&vy) {
                    Ordering::Less => {
                        out.push((vx, ex));
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push((vy, ey));
                        b.next();
                    }
                    Ordering::Equal => {
                        out.push((vx, ex + ey));
                        a.next();
                        b.next();
                    }
                },
            }
        }
        Mono(out)
    }

    /// Split off the power of `v`: returns (exponent, monomial without v).
    pub fn split_var(&self, v: Var) -> (u32, Mono) {
        let mut rest = Vec::with_capacity(self.0.len());
        let mut e = 0;
        for &(w, k) in &self.0 {
            if w == v {
                e = k;
            } else {
                rest.push((w, k));
            }
        }
        (e, Mono(rest))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded order: total degree first, then lexicographic on the exponent list.
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse multivariate polynomial over the rationals. No zero coefficients
/// are stored; the zero polynomial has an empty term map.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Poly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::one(), c);
        }
        Poly { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(rat_int(n))
    }

    pub fn var(v: Var) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Mono::var(v), Rat::one());
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Some(c) when the polynomial is the constant c (including zero).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                if m.0.is_empty() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    pub fn deg_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.deg_in(v)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(v, _)| v))
            .collect()
    }

    /// Leading coefficient in the graded monomial order.
    pub fn leading_coeff(&self) -> Option<Rat> {
        self.terms.iter().next_back().map(|(_, c)| c.clone())
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// View as a univariate polynomial in `v` with Poly coefficients.
    pub fn univariate_in(&self, v: Var) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_var(v);
            out.entry(e).or_default().add_term(rest, c.clone());
        }
        out.retain(|_, p| !p.is_zero());
        out
    }

    /// Substitute `v := p`.
    pub fn subst_var(&self, v: Var, p: &Poly) -> Poly {
        let by_deg = self.univariate_in(v);
        let max = by_deg.keys().max().copied().unwrap_or(0);
        let mut powers: Vec<Poly> = Vec::with_capacity(max as usize + 1);
        powers.push(Poly::one());
        for k in 1..=max {
            let prev = powers[(k - 1) as usize].clone();
            powers.push(prev.mul(p));
        }
        let mut out = Poly::zero();
        for (e, coeff) in by_deg {
            out = out.add(&coeff.mul(&powers[e as usize]));
        }
        out
    }

    /// Evaluate at a full assignment. None when a variable is missing.
    pub fn eval(&self, assign: &BTreeMap<Var, Rat>) -> Option<Rat> {
        let mut acc = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                let x = assign.get(&v)?;
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        Some(acc)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.0.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Exact division of `p` by the linear polynomial `a*v + rest` where `rest`
/// does not involve `v`. Returns None when the division leaves a remainder.
pub fn div_exact_linear(p: &Poly, v: Var, a: &Rat, rest: &Poly) -> Option<Poly> {
    assert!(!a.is_zero());
    debug_assert_eq!(rest.deg_in(v), 0);
    let mut by_deg = p.univariate_in(v);
    let max = match by_deg.keys().max() {
        Some(&m) if m >= 1 => m,
        _ => return if p.is_zero() { Some(Poly::zero()) } else { None },
    };
    let inv_a = Rat::one() / a;
    let mut quot = Poly::zero();
    for k in (1..=max).rev() {
        let ck = match by_deg.remove(&k) {
            Some(c) => c,
            None => continue,
        };
        let qk = ck.scale(&inv_a);
        // quotient term qk * v^(k-1)
        for (m, c) in &qk.terms {
            let mono = if k == 1 {
                m.clone()
            } else {
                m.mul(&Mono(alloc::vec![(v, k - 1)]))
            };
            quot.add_term(mono, c.clone());
        }
        // subtract qk * rest from the next lower coefficient
        let low = by_deg.entry(k - 1).or_default();
        *low = low.sub(&qk.mul(rest));
    }
    let rem = by_deg.remove(&0).unwrap_or_default();
    by_deg.retain(|_, c| !c.is_zero());
    if rem.is_zero() && by_deg.is_empty() {
        Some(quot)
    } else {
        None
    }
}

/// A coefficient: a fraction of polynomials. The denominator is 1 whenever it
/// is constant, and has leading coefficient 1 otherwise.
#[derive(Clone, Debug)]
pub struct Scalar {
    num: Poly,
    den: Poly,
}

impl Scalar {
    fn normalized(mut num: Poly, mut den: Poly) -> Scalar {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Scalar {
                num,
                den: Poly::one(),
            };
        }
        if let Some(c) = den.as_constant() {
            num = num.scale(&(Rat::one() / c));
            den = Poly::one();
        } else {
            let lead = den.leading_coeff().unwrap();
            if !lead.is_one() {
                let inv = Rat::one() / lead;
                num = num.scale(&inv);
                den = den.scale(&inv);
            }
        }
        Scalar { num, den }
    }

    pub fn zero() -> Self {
        Scalar {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Scalar {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar {
            num: Poly::from_int(n),
            den: Poly::one(),
        }
    }

    pub fn from_rat(c: Rat) -> Self {
        Scalar {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Scalar {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn var(v: Var) -> Self {
        Scalar::from_poly(Poly::var(v))
    }

    pub fn fraction(num: Poly, den: Poly) -> Self {
        Scalar::normalized(num, den)
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.as_constant().is_some()
    }

    /// Some(c) when the value is the rational constant c.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.den.as_constant().map(|c| c.is_one()) == Some(true) {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        if self.den == other.den {
            return Scalar::normalized(self.num.add(&other.num), self.den.clone());
        }
        Scalar::normalized(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        Scalar::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        assert!(!other.is_zero(), "division by zero");
        Scalar::normalized(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn inv(&self) -> Scalar {
        assert!(!self.is_zero(), "inverse of zero");
        Scalar::normalized(self.den.clone(), self.num.clone())
    }

    pub fn scale_rat(&self, c: &Rat) -> Scalar {
        Scalar::normalized(self.num.scale(c), self.den.clone())
    }

    pub fn eval(&self, assign: &BTreeMap<Var, Rat>) -> Option<Rat> {
        let d = self.den.eval(assign)?;
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(assign)? / d)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for Scalar {}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.as_rat() {
            return write!(f, "{c}");
        }
        if self.den.as_constant().map(|c| c.is_one()) == Some(true) {
            if self.num.term_count() > 1 {
                write!(f, "({})", self.num)
            } else {
                write!(f, "{}", self.num)
            }
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Canonical "p/q" rendering of an exact rational.
pub fn rat_string(c: &Rat) -> String {
    use alloc::format;
    if c.denom().is_one() {
        format!("{}", c.numer())
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: Var = Var::Param(0);
    const B: Var = Var::Param(1);

    #[test]
    fn poly_ring_basics() {
        let a = Poly::var(A);
        let b = Poly::var(B);
        let s = a.add(&b);
        let sq = s.mul(&s);
        // (a+b)^2 = a^2 + 2ab + b^2
        let expect = a
            .mul(&a)
            .add(&a.mul(&b).scale(&rat_int(2)))
            .add(&b.mul(&b));
        assert_eq!(sq, expect);
        assert_eq!(sq.degree(), 2);
        assert_eq!(sq.term_count(), 3);
    }

    #[test]
    fn subst_and_eval_agree() {
        let a = Poly::var(A);
        let b = Poly::var(B);
        let p = a.mul(&a).add(&b.scale(&rat_int(3)));
        // a := b + 1, then b := 2  gives (2+1)^2 + 3*2 = 15
        let q = p.subst_var(A, &b.add(&Poly::one()));
        let mut assign = BTreeMap::new();
        assign.insert(B, rat_int(2));
        assert_eq!(q.eval(&assign), Some(rat_int(15)));
    }

    #[test]
    fn linear_division_exact_and_inexact() {
        let a = Poly::var(A);
        let b = Poly::var(B);
        // (a - b)(a + 2b) divided by (a - b)
        let p = a.sub(&b).mul(&a.add(&b.scale(&rat_int(2))));
        let q = div_exact_linear(&p, A, &rat_int(1), &b.neg()).expect("divides");
        assert_eq!(q, a.add(&b.scale(&rat_int(2))));
        assert!(div_exact_linear(&p.add(&Poly::one()), A, &rat_int(1), &b.neg()).is_none());
    }

    #[test]
    fn scalar_fraction_equality_by_cross_multiplication() {
        let a = Poly::var(A);
        let b = Poly::var(B);
        // a/b == (a*a)/(a*b)
        let x = Scalar::fraction(a.clone(), b.clone());
        let y = Scalar::fraction(a.mul(&a), a.mul(&b));
        assert_eq!(x, y);
        let z = x.mul(&Scalar::fraction(b.clone(), a.clone()));
        assert_eq!(z, Scalar::one());
    }

    #[test]
    fn rat_strings_are_reduced() {
        assert_eq!(rat_string(&rat(4, 6)), "2/3");
        assert_eq!(rat_string(&rat_int(-7)), "-7");
    }
}

//! Rational functions with factored denominators.
//!
//! Numerators are sparse polynomials; denominators are multisets of affine
//! linear forms and are never expanded except transiently for equality or
//! addition. Residues at simple poles and at infinity are exact; poles of
//! order two or more are reported as errors after cancellation is attempted.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{div_exact_linear, Mono, Poly, Rat, Scalar, Var};

/// A normalized affine linear form: coefficients sorted by variable, the
/// coefficient of the smallest variable equal to 1, not identically constant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct LinForm {
    terms: Vec<(Var, Rat)>,
    constant: Rat,
}

/// A linear expression classified after normalization: identically zero, a
/// nonzero constant, or `scale * form` with `form` normalized.
#[derive(Clone, Debug)]
pub enum LinVal {
    Zero,
    Const(Rat),
    Form(LinForm, Rat),
}

/// Classify `sum(terms) + constant`, merging duplicates and dropping zeros.
pub fn classify_linear(terms: &[(Var, Rat)], constant: &Rat) -> LinVal {
    let mut map: BTreeMap<Var, Rat> = BTreeMap::new();
    for (v, c) in terms {
        let e = map.entry(*v).or_insert_with(Rat::zero);
        *e += c;
    }
    map.retain(|_, c| !c.is_zero());
    if map.is_empty() {
        return if constant.is_zero() {
            LinVal::Zero
        } else {
            LinVal::Const(constant.clone())
        };
    }
    let scale = map.iter().next().unwrap().1.clone();
    let inv = Rat::one() / &scale;
    let terms: Vec<(Var, Rat)> = map.into_iter().map(|(v, c)| (v, c * &inv)).collect();
    LinVal::Form(
        LinForm {
            terms,
            constant: constant * &inv,
        },
        scale,
    )
}

impl LinForm {
    /// The normalized form of `a - b`, with its scale: `scale * form = a - b`.
    pub fn diff(a: Var, b: Var) -> (LinForm, Rat) {
        match classify_linear(
            &[(a, Rat::one()), (b, -Rat::one())],
            &Rat::zero(),
        ) {
            LinVal::Form(f, s) => (f, s),
            _ => panic!("degenerate difference"),
        }
    }

    /// The normalized form of `v - c`.
    pub fn var_minus_rat(v: Var, c: &Rat) -> LinForm {
        LinForm {
            terms: alloc::vec![(v, Rat::one())],
            constant: -c.clone(),
        }
    }

    pub fn terms(&self) -> &[(Var, Rat)] {
        &self.terms
    }

    pub fn constant(&self) -> &Rat {
        &self.constant
    }

    pub fn coeff_of(&self, v: Var) -> Rat {
        self.terms
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero)
    }

    pub fn involves(&self, v: Var) -> bool {
        self.terms.iter().any(|&(w, _)| w == v)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.terms.iter().map(|&(v, _)| v)
    }

    pub fn to_poly(&self) -> Poly {
        let mut p = Poly::constant(self.constant.clone());
        for (v, c) in &self.terms {
            p.add_term(Mono::var(*v), c.clone());
        }
        p
    }

    /// The linear part without `v`, negated and divided by v's coefficient:
    /// the root of the form seen as linear in `v`.
    pub fn root_in(&self, v: Var) -> Poly {
        let a = self.coeff_of(v);
        assert!(!a.is_zero());
        let inv = -Rat::one() / a;
        let mut p = Poly::constant(&self.constant * &inv);
        for (w, c) in &self.terms {
            if *w != v {
                p.add_term(Mono::var(*w), c * &inv);
            }
        }
        p
    }

    pub fn eval(&self, assign: &BTreeMap<Var, Rat>) -> Option<Rat> {
        let mut acc = self.constant.clone();
        for (v, c) in &self.terms {
            acc += c * assign.get(v)?;
        }
        Some(acc)
    }

    /// Substitute `x := sum(pt_terms) + pt_const` and reclassify.
    pub fn subst_linear(&self, x: Var, pt_terms: &[(Var, Rat)], pt_const: &Rat) -> LinVal {
        let mut terms: Vec<(Var, Rat)> = Vec::new();
        let mut constant = self.constant.clone();
        let mut coeff_x = Rat::zero();
        for (v, c) in &self.terms {
            if *v == x {
                coeff_x = c.clone();
            } else {
                terms.push((*v, c.clone()));
            }
        }
        if !coeff_x.is_zero() {
            for (v, c) in pt_terms {
                terms.push((*v, c * &coeff_x));
            }
            constant += pt_const * &coeff_x;
        }
        classify_linear(&terms, &constant)
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

/// Point at which a residue is taken.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RPoint {
    V(Var),
    C(Rat),
}

impl RPoint {
    fn as_linear(&self) -> (Vec<(Var, Rat)>, Rat) {
        match self {
            RPoint::V(v) => (alloc::vec![(*v, Rat::one())], Rat::zero()),
            RPoint::C(c) => (Vec::new(), c.clone()),
        }
    }

    pub fn to_poly(&self) -> Poly {
        match self {
            RPoint::V(v) => Poly::var(*v),
            RPoint::C(c) => Poly::constant(c.clone()),
        }
    }
}

impl fmt::Display for RPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RPoint::V(v) => write!(f, "{v}"),
            RPoint::C(c) => write!(f, "{c}"),
        }
    }
}

/// num / product of linear forms. The zero function is num = 0 with an empty
/// denominator.
#[derive(Clone, Debug)]
pub struct RatFunc {
    pub num: Poly,
    pub den: BTreeMap<LinForm, u32>,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        RatFunc::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: BTreeMap::new(),
        }
    }

    pub fn from_rat(c: Rat) -> Self {
        RatFunc::from_poly(Poly::constant(c))
    }

    /// Exactly zero as a function (denominators never vanish identically).
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn clear_if_zero(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
        }
    }

    pub fn add_den_factor(&mut self, f: LinForm, mult: u32) {
        if mult == 0 || self.num.is_zero() {
            return;
        }
        *self.den.entry(f).or_insert(0) += mult;
    }

    /// Multiply by 1 / (sum(terms) + constant).
    pub fn div_linear(&mut self, terms: &[(Var, Rat)], constant: &Rat) -> Result<()> {
        match classify_linear(terms, constant) {
            LinVal::Zero => Err(Error::Unsupported(format!(
                "division by an identically zero linear form"
            ))),
            LinVal::Const(c) => {
                self.num = self.num.scale(&(Rat::one() / c));
                Ok(())
            }
            LinVal::Form(f, s) => {
                self.num = self.num.scale(&(Rat::one() / s));
                self.add_den_factor(f, 1);
                Ok(())
            }
        }
    }

    pub fn mul_poly(&mut self, p: &Poly) {
        self.num = self.num.mul(p);
        self.clear_if_zero();
    }

    pub fn scale_rat(&mut self, c: &Rat) {
        self.num = self.num.scale(c);
        self.clear_if_zero();
    }

    /// Multiply by a polynomial scalar (constant denominator required).
    pub fn mul_scalar(&mut self, s: &Scalar) {
        let d = s
            .den()
            .as_constant()
            .expect("rational-model coefficients must be polynomial");
        self.num = self.num.mul(s.num()).scale(&(Rat::one() / d));
        self.clear_if_zero();
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return RatFunc::zero();
        }
        let mut out = RatFunc {
            num: self.num.mul(&other.num),
            den: self.den.clone(),
        };
        for (f, m) in &other.den {
            out.add_den_factor(f.clone(), *m);
        }
        out
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn expand_den(&self) -> Poly {
        let mut p = Poly::one();
        for (f, m) in &self.den {
            let fp = f.to_poly();
            for _ in 0..*m {
                p = p.mul(&fp);
            }
        }
        p
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // common denominator: max multiplicity per factor
        let mut den: BTreeMap<LinForm, u32> = self.den.clone();
        for (f, m) in &other.den {
            let e = den.entry(f.clone()).or_insert(0);
            *e = (*e).max(*m);
        }
        let scale_up = |num: &Poly, own: &BTreeMap<LinForm, u32>| -> Poly {
            let mut p = num.clone();
            for (f, m) in &den {
                let have = own.get(f).copied().unwrap_or(0);
                let fp = f.to_poly();
                for _ in have..*m {
                    p = p.mul(&fp);
                }
            }
            p
        };
        let num = scale_up(&self.num, &self.den).add(&scale_up(&other.num, &other.den));
        let mut out = RatFunc { num, den };
        out.clear_if_zero();
        out.reduce();
        out
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    /// Cancel denominator factors that divide the numerator exactly.
    pub fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        let factors: Vec<LinForm> = self.den.keys().cloned().collect();
        for f in factors {
            let v = match f.vars().next() {
                Some(v) => v,
                None => continue,
            };
            let a = f.coeff_of(v);
            let mut rest = f.to_poly();
            rest.add_term(Mono::var(v), -a.clone());
            while self.den.get(&f).copied().unwrap_or(0) > 0 {
                match div_exact_linear(&self.num, v, &a, &rest) {
                    Some(q) => {
                        self.num = q;
                        let m = self.den.get_mut(&f).unwrap();
                        *m -= 1;
                        if *m == 0 {
                            self.den.remove(&f);
                        }
                    }
                    None => break,
                }
            }
        }
    }

    /// Exact equality as rational functions, by cross-multiplication.
    pub fn eq(&self, other: &RatFunc) -> bool {
        self.sub(other).is_zero()
    }

    pub fn eval(&self, assign: &BTreeMap<Var, Rat>) -> Option<Rat> {
        let mut d = Rat::one();
        for (f, m) in &self.den {
            let x = f.eval(assign)?;
            if x.is_zero() {
                return None;
            }
            for _ in 0..*m {
                d *= &x;
            }
        }
        Some(self.num.eval(assign)? / d)
    }

    pub fn den_ok_at(&self, assign: &BTreeMap<Var, Rat>) -> bool {
        self.den
            .keys()
            .all(|f| f.eval(assign).map(|x| !x.is_zero()) == Some(true))
    }

    pub fn vars(&self) -> alloc::collections::BTreeSet<Var> {
        let mut s = self.num.vars();
        for f in self.den.keys() {
            s.extend(f.vars());
        }
        s
    }

    /// Degree data of `x` after cancellation: (numerator degree, total
    /// multiplicity of denominator factors involving x).
    pub fn degrees_in(&self, x: Var) -> (u32, u32) {
        let mut r = self.clone();
        r.reduce();
        let nd = r.num.deg_in(x);
        let dd = r
            .den
            .iter()
            .filter(|(f, _)| f.involves(x))
            .map(|(_, m)| *m)
            .sum();
        (nd, dd)
    }

    /// Residue at `x = p` for a finite point. Exact; errors on a pole of
    /// order two or more (after cancellation).
    pub fn residue(&self, x: Var, p: &RPoint) -> Result<RatFunc> {
        let mut f = self.clone();
        f.reduce();
        let (pt_terms, pt_const) = p.as_linear();
        let target = match classify_linear(
            &{
                let mut t = alloc::vec![(x, Rat::one())];
                for (v, c) in &pt_terms {
                    t.push((*v, -c.clone()));
                }
                t
            },
            &-pt_const.clone(),
        ) {
            LinVal::Form(t, s) => (t, s),
            _ => return Err(Error::Unsupported(format!("degenerate residue point {p}"))),
        };
        let mult = f.den.get(&target.0).copied().unwrap_or(0);
        if mult == 0 {
            return Ok(RatFunc::zero());
        }
        if mult > 1 {
            return Err(Error::HigherOrderPole(format!(
                "order {mult} pole of {x} at {p}"
            )));
        }
        // residue = num / (coeff of x in the stored pole factor) / other
        // factors, all evaluated at x := p
        let coeff_x = target.0.coeff_of(x);
        let point_poly = p.to_poly();
        let mut out = RatFunc::from_poly(f.num.subst_var(x, &point_poly));
        out.scale_rat(&(Rat::one() / coeff_x));
        for (g, m) in &f.den {
            if g == &target.0 {
                continue;
            }
            if !g.involves(x) {
                out.add_den_factor(g.clone(), *m);
                continue;
            }
            match g.subst_linear(x, &pt_terms, &pt_const) {
                LinVal::Zero => {
                    return Err(Error::HigherOrderPole(format!(
                        "factor {g} vanishes identically at {x} = {p}"
                    )))
                }
                LinVal::Const(c) => {
                    let mut inv = Rat::one();
                    for _ in 0..*m {
                        inv /= &c;
                    }
                    out.scale_rat(&inv);
                }
                LinVal::Form(h, s) => {
                    let mut inv = Rat::one();
                    for _ in 0..*m {
                        inv /= &s;
                    }
                    out.scale_rat(&inv);
                    out.add_den_factor(h, *m);
                }
            }
        }
        out.reduce();
        Ok(out)
    }

    /// Residue of `self dx` at x = infinity, exact. Errors when the pole at
    /// infinity has order two or more.
    pub fn residue_at_inf(&self, x: Var) -> Result<RatFunc> {
        let mut f = self.clone();
        f.reduce();
        let mut e: u32 = 0;
        let mut lead_scale = Rat::one();
        for (g, m) in &f.den {
            let a = g.coeff_of(x);
            if !a.is_zero() {
                e += m;
                for _ in 0..*m {
                    lead_scale *= &a;
                }
            }
        }
        let by_deg = f.num.univariate_in(x);
        let d = by_deg.keys().max().copied().unwrap_or(0);
        if f.num.is_zero() || d + 2 <= e {
            return Ok(RatFunc::zero());
        }
        if d >= e {
            return Err(Error::HigherOrderPole(format!(
                "pole of order {} of {x} at infinity",
                d - e + 2
            )));
        }
        // d = e - 1: residue is -lead / product of leading x-coefficients,
        // with the x-free factors carried along
        let lead = by_deg.get(&d).cloned().unwrap_or_default();
        let mut out = RatFunc::from_poly(lead.neg());
        out.scale_rat(&(Rat::one() / lead_scale));
        for (g, m) in &f.den {
            if g.coeff_of(x).is_zero() {
                out.add_den_factor(g.clone(), *m);
            }
        }
        out.reduce();
        Ok(out)
    }

    /// Substitute `x := sum(pt_terms) + pt_const`. Denominator factors that
    /// vanish identically under the substitution are cancelled against the
    /// numerator when possible; otherwise the substitution hits a pole.
    pub fn subst_linear(
        &self,
        x: Var,
        pt_terms: &[(Var, Rat)],
        pt_const: &Rat,
    ) -> Result<RatFunc> {
        let mut f = self.clone();
        f.reduce();
        let mut pt_poly = Poly::constant(pt_const.clone());
        for (v, c) in pt_terms {
            pt_poly.add_term(Mono::var(*v), c.clone());
        }
        let mut out = RatFunc::from_poly(Poly::zero());
        // first pass: check vanishing factors are cancellable
        for (g, m) in f.den.clone() {
            if let LinVal::Zero = g.subst_linear(x, pt_terms, pt_const) {
                let v = g.vars().next().unwrap();
                let a = g.coeff_of(v);
                let mut rest = g.to_poly();
                rest.add_term(Mono::var(v), -a.clone());
                for _ in 0..m {
                    match div_exact_linear(&f.num, v, &a, &rest) {
                        Some(q) => {
                            f.num = q;
                            let e = f.den.get_mut(&g).unwrap();
                            *e -= 1;
                            if *e == 0 {
                                f.den.remove(&g);
                            }
                        }
                        None => {
                            return Err(Error::PoleObstruction(format!(
                                "substituting {x} hits the zero of {g}"
                            )))
                        }
                    }
                }
            }
        }
        out.num = f.num.subst_var(x, &pt_poly);
        for (g, m) in &f.den {
            match g.subst_linear(x, pt_terms, pt_const) {
                LinVal::Zero => unreachable!("cancelled above"),
                LinVal::Const(c) => {
                    let mut inv = Rat::one();
                    for _ in 0..*m {
                        inv /= &c;
                    }
                    out.scale_rat(&inv);
                }
                LinVal::Form(h, s) => {
                    let mut inv = Rat::one();
                    for _ in 0..*m {
                        inv /= &s;
                    }
                    out.scale_rat(&inv);
                    out.add_den_factor(h, *m);
                }
            }
        }
        out.clear_if_zero();
        out.reduce();
        Ok(out)
    }

    /// Pull back along the projective substitution v -> (a v + b)/(c v + d)
    /// applied to every non-parameter variable. Jacobian factors for the
    /// differentials are the caller's business.
    pub fn moebius(&self, a: &Rat, b: &Rat, c: &Rat, d: &Rat) -> Result<RatFunc> {
        let det = a * d - b * c;
        if det.is_zero() {
            return Err(Error::InvalidConfig("singular projective map".into()));
        }
        let mut f = self.clone();
        f.reduce();
        if f.is_zero() {
            return Ok(RatFunc::zero());
        }
        let geom: alloc::collections::BTreeSet<Var> = f
            .vars()
            .into_iter()
            .filter(|v| !matches!(v, Var::Param(_)))
            .collect();
        let mut out = RatFunc::from_poly(Poly::one());

        // numerator: clear per-variable denominators up to the max degree
        let mut num_t = Poly::zero();
        let degs: BTreeMap<Var, u32> = geom.iter().map(|&v| (v, f.num.deg_in(v))).collect();
        let mut av_b: BTreeMap<Var, Vec<Poly>> = BTreeMap::new();
        let mut cv_d: BTreeMap<Var, Vec<Poly>> = BTreeMap::new();
        for &v in &geom {
            let dmax = degs[&v];
            let p1 = {
                let mut p = Poly::constant(b.clone());
                p.add_term(Mono::var(v), a.clone());
                p
            };
            let p2 = {
                let mut p = Poly::constant(d.clone());
                p.add_term(Mono::var(v), c.clone());
                p
            };
            let mut pw1 = alloc::vec![Poly::one()];
            let mut pw2 = alloc::vec![Poly::one()];
            for k in 1..=dmax {
                pw1.push(pw1[(k - 1) as usize].mul(&p1));
                pw2.push(pw2[(k - 1) as usize].mul(&p2));
            }
            av_b.insert(v, pw1);
            cv_d.insert(v, pw2);
        }
        for (m, coeff) in &f.num.terms {
            let mut t = Poly::constant(coeff.clone());
            for &v in &geom {
                let e = m.deg_in(v);
                t = t.mul(&av_b[&v][e as usize]);
                t = t.mul(&cv_d[&v][(degs[&v] - e) as usize]);
            }
            // parameter variables pass through untouched
            let param_part: Vec<(Var, u32)> = m
                .0
                .iter()
                .filter(|(v, _)| matches!(v, Var::Param(_)))
                .cloned()
                .collect();
            t = t.mul(&Poly {
                terms: {
                    let mut tm = BTreeMap::new();
                    tm.insert(Mono(param_part), Rat::one());
                    tm
                },
            });
            num_t = num_t.add(&t);
        }
        out.num = num_t;
        for &v in &geom {
            for _ in 0..degs[&v] {
                out.div_linear(&[(v, c.clone())], d)?;
            }
        }

        // denominator factors transform individually
        for (g, m) in &f.den {
            let vars: Vec<Var> = g.vars().collect();
            if vars.iter().any(|v| matches!(v, Var::Param(_))) {
                return Err(Error::Unsupported(
                    "projective pullback of a parameter-bearing form".into(),
                ));
            }
            match vars.len() {
                1 => {
                    let v = vars[0];
                    let alpha = g.coeff_of(v);
                    let gamma = g.constant().clone();
                    // (alpha v + gamma) -> ((alpha a + gamma c) v + (alpha b + gamma d)) / (c v + d)
                    let new_lead = &alpha * a + &gamma * c;
                    let new_const = &alpha * b + &gamma * d;
                    for _ in 0..*m {
                        out.div_linear(&[(v, new_lead.clone())], &new_const)?;
                        out.mul_linear(&[(v, c.clone())], d);
                    }
                }
                2 => {
                    let (v1, v2) = (vars[0], vars[1]);
                    let (a1, a2) = (g.coeff_of(v1), g.coeff_of(v2));
                    if !g.constant().is_zero() || !(&a1 + &a2).is_zero() {
                        return Err(Error::Unsupported(format!(
                            "projective pullback of non-difference form {g}"
                        )));
                    }
                    // alpha (v1 - v2) -> alpha det (v1 - v2) / ((c v1 + d)(c v2 + d))
                    for _ in 0..*m {
                        out.div_linear(
                            &[(v1, a1.clone()), (v2, a2.clone())],
                            &Rat::zero(),
                        )?;
                        out.scale_rat(&(Rat::one() / &det));
                        out.mul_linear(&[(v1, c.clone())], d);
                        out.mul_linear(&[(v2, c.clone())], d);
                    }
                }
                _ => {
                    return Err(Error::Unsupported(format!(
                        "projective pullback of {g}: more than two variables"
                    )))
                }
            }
        }
        out.reduce();
        Ok(out)
    }

    /// Multiply the numerator by a linear expression.
    pub fn mul_linear(&mut self, terms: &[(Var, Rat)], constant: &Rat) {
        let mut p = Poly::constant(constant.clone());
        for (v, c) in terms {
            p.add_term(Mono::var(*v), c.clone());
        }
        self.num = self.num.mul(&p);
        self.clear_if_zero();
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})/[", self.num)?;
        for (k, (g, m)) in self.den.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            if *m == 1 {
                write!(f, "({g})")?;
            } else {
                write!(f, "({g})^{m}")?;
            }
        }
        write!(f, "]")
    }
}

/// Bring a family over one common factored denominator; returns the shared
/// denominator and the adjusted numerators, in order.
pub fn common_numerators(fs: &[RatFunc]) -> (BTreeMap<LinForm, u32>, Vec<Poly>) {
    let mut den: BTreeMap<LinForm, u32> = BTreeMap::new();
    for f in fs {
        for (g, m) in &f.den {
            let e = den.entry(g.clone()).or_insert(0);
            *e = (*e).max(*m);
        }
    }
    let nums = fs
        .iter()
        .map(|f| {
            let mut p = f.num.clone();
            for (g, m) in &den {
                let have = f.den.get(g).copied().unwrap_or(0);
                let gp = g.to_poly();
                for _ in have..*m {
                    p = p.mul(&gp);
                }
            }
            p
        })
        .collect();
    (den, nums)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};
    use crate::seq::Idx;

    fn t(o: u16) -> Var {
        Var::T(Idx::new(1, o))
    }

    fn z(n: u16) -> Var {
        Var::Z(n)
    }

    /// 1/((t0 - t1)(t1 - z0))
    fn chain2() -> RatFunc {
        let mut f = RatFunc::one();
        f.div_linear(&[(t(0), rat_int(1)), (t(1), rat_int(-1))], &rat_int(0))
            .unwrap();
        f.div_linear(&[(t(1), rat_int(1)), (z(0), rat_int(-1))], &rat_int(0))
            .unwrap();
        f
    }

    #[test]
    fn normalization_orients_differences() {
        let (f1, s1) = LinForm::diff(t(0), t(1));
        let (f2, s2) = LinForm::diff(t(1), t(0));
        assert_eq!(f1, f2);
        assert_eq!(s1, -s2);
    }

    #[test]
    fn add_and_reduce_cancel() {
        // 1/(t0-t1) - 1/(t0-t1) = 0
        let mut f = RatFunc::one();
        f.div_linear(&[(t(0), rat_int(1)), (t(1), rat_int(-1))], &rat_int(0))
            .unwrap();
        assert!(f.sub(&f).is_zero());

        // (t0 - t1)/(t0 - t1) reduces to 1
        let mut g = f.clone();
        g.mul_linear(&[(t(0), rat_int(1)), (t(1), rat_int(-1))], &rat_int(0));
        g.reduce();
        assert!(g.den.is_empty());
        assert!(g.eq(&RatFunc::one()));
    }

    #[test]
    fn residue_at_variable_point() {
        // res_{t0 = t1} 1/((t0-t1)(t1-z0)) = 1/(t1-z0)
        let f = chain2();
        let r = f.residue(t(0), &RPoint::V(t(1))).unwrap();
        let mut expect = RatFunc::one();
        expect
            .div_linear(&[(t(1), rat_int(1)), (z(0), rat_int(-1))], &rat_int(0))
            .unwrap();
        assert!(r.eq(&expect));
        // no pole of t1 at t0 after the chain orientation: res is the
        // negative of the above by antisymmetry
        let r2 = f.residue(t(1), &RPoint::V(t(0))).unwrap();
        let mut expect2 = RatFunc::one();
        expect2
            .div_linear(&[(t(0), rat_int(1)), (z(0), rat_int(-1))], &rat_int(0))
            .unwrap();
        assert!(r2.eq(&expect2.neg()));
    }

    #[test]
    fn residue_at_infinity_of_simple_pole() {
        // res_inf dt/(t - z) = -1, so -res_inf = 1
        let mut f = RatFunc::one();
        f.div_linear(&[(t(0), rat_int(1)), (z(0), rat_int(-1))], &rat_int(0))
            .unwrap();
        let r = f.residue_at_inf(t(0)).unwrap();
        assert!(r.eq(&RatFunc::from_rat(rat_int(-1))));
        // t dt/(t - z): second-order pole at infinity
        let mut g = f.clone();
        g.mul_linear(&[(t(0), rat_int(1))], &rat_int(0));
        assert!(matches!(
            g.residue_at_inf(t(0)),
            Err(Error::HigherOrderPole(_))
        ));
        // 1/((t-z)(t-w)) regular at infinity in t
        let mut h = f.clone();
        h.div_linear(&[(t(0), rat_int(1)), (z(1), rat_int(-1))], &rat_int(0))
            .unwrap();
        assert!(h.residue_at_inf(t(0)).unwrap().is_zero());
        // t/((t-z)(t-w)): residue -1 at infinity
        let mut k = h.clone();
        k.mul_linear(&[(t(0), rat_int(1))], &rat_int(0));
        assert!(k.residue_at_inf(t(0)).unwrap().eq(&RatFunc::from_rat(rat_int(-1))));
    }

    #[test]
    fn higher_order_pole_detected_and_cancellation_tried() {
        let mut f = RatFunc::one();
        for _ in 0..2 {
            f.div_linear(&[(t(0), rat_int(1)), (t(1), rat_int(-1))], &rat_int(0))
                .unwrap();
        }
        assert!(matches!(
            f.residue(t(0), &RPoint::V(t(1))),
            Err(Error::HigherOrderPole(_))
        ));
        // but (t0 - t1) * f has a simple pole again
        let mut g = f.clone();
        g.mul_linear(&[(t(0), rat_int(1)), (t(1), rat_int(-1))], &rat_int(0));
        let r = g.residue(t(0), &RPoint::V(t(1))).unwrap();
        assert!(r.eq(&RatFunc::one()));
    }

    #[test]
    fn sum_of_all_residues_vanishes() {
        // f = 1/((t - z0)(t - z1)): residues at z0, z1, infinity sum to 0
        let mut f = RatFunc::one();
        f.div_linear(&[(t(0), rat_int(1)), (z(0), rat_int(-1))], &rat_int(0))
            .unwrap();
        f.div_linear(&[(t(0), rat_int(1)), (z(1), rat_int(-1))], &rat_int(0))
            .unwrap();
        let r0 = f.residue(t(0), &RPoint::V(z(0))).unwrap();
        let r1 = f.residue(t(0), &RPoint::V(z(1))).unwrap();
        let ri = f.residue_at_inf(t(0)).unwrap();
        assert!(r0.add(&r1).add(&ri).is_zero());
    }

    #[test]
    fn substitution_cancels_before_deciding_pole() {
        // (t0 - t1)/(t0 - t1) substitutes cleanly at t0 := t1
        let mut f = RatFunc::one();
        f.div_linear(&[(t(0), rat_int(1)), (t(1), rat_int(-1))], &rat_int(0))
            .unwrap();
        let mut g = f.clone();
        g.mul_linear(&[(t(0), rat_int(1)), (t(1), rat_int(-1))], &rat_int(0));
        let s = g
            .subst_linear(t(0), &[(t(1), rat_int(1))], &rat_int(0))
            .unwrap();
        assert!(s.eq(&RatFunc::one()));
        assert!(matches!(
            f.subst_linear(t(0), &[(t(1), rat_int(1))], &rat_int(0)),
            Err(Error::PoleObstruction(_))
        ));
    }

    #[test]
    fn moebius_preserves_difference_loci() {
        // 1/(t0 - t1) pulls back to (ct0+d)(ct1+d)/(det (t0-t1))
        let mut f = RatFunc::one();
        f.div_linear(&[(t(0), rat_int(1)), (t(1), rat_int(-1))], &rat_int(0))
            .unwrap();
        let g = f
            .moebius(&rat_int(2), &rat_int(1), &rat_int(1), &rat_int(3))
            .unwrap();
        // check numerically at t0 = 5, t1 = 7: g(5,7) = f((2*5+1)/(5+3), (2*7+1)/(7+3))
        let mut assign = BTreeMap::new();
        assign.insert(t(0), rat_int(5));
        assign.insert(t(1), rat_int(7));
        let lhs = g.eval(&assign).unwrap();
        let tv = |x: i64| rat(2 * x + 1, x + 3);
        let rhs = Rat::one() / (tv(5) - tv(7));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn common_numerators_share_denominator() {
        let f = chain2();
        let mut g = RatFunc::one();
        g.div_linear(&[(t(1), rat_int(1)), (z(0), rat_int(-1))], &rat_int(0))
            .unwrap();
        let (den, nums) = common_numerators(&[f.clone(), g.clone()]);
        assert_eq!(den.len(), 2);
        // rebuilding each function from its numerator over the shared
        // denominator must give back the original
        for (orig, num) in [(f, nums[0].clone()), (g, nums[1].clone())] {
            let rebuilt = RatFunc {
                num,
                den: den.clone(),
            };
            assert!(rebuilt.eq(&orig));
        }
    }
}

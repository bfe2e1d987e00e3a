//! Formal polydifferentials and their operations: shuffle product,
//! deconcatenation coproduct, omega multiplication, and the three residue
//! operators (at infinity, at a marked point, along a diagonal).
//!
//! A term's key is an n-tuple of sequences; keys whose concatenation repeats
//! an index are zero and are dropped at insertion, as are zero coefficients.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seq::{shuffles, Idx, Key, Seq};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyDiff {
    n: usize,
    terms: BTreeMap<Key, Scalar>,
}

impl PolyDiff {
    pub fn zero(n: usize) -> Self {
        PolyDiff {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// The unit: coefficient 1 on the empty key.
    pub fn unit(n: usize) -> Self {
        let mut d = PolyDiff::zero(n);
        d.add_term(Key::unit(n), Scalar::one());
        d
    }

    /// Basis element for `key`; zero when the key repeats an index.
    pub fn zeta(key: Key) -> Self {
        let n = key.slots();
        let mut d = PolyDiff::zero(n);
        d.add_term(key, Scalar::one());
        d
    }

    /// Single-slot basis element.
    pub fn zeta1(seq: Seq) -> Self {
        PolyDiff::zeta(Key(alloc::vec![seq]))
    }

    pub fn slots(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Scalar)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &Key> {
        self.terms.keys()
    }

    pub fn coeff(&self, key: &Key) -> Scalar {
        self.terms.get(key).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Coefficient of the empty key: the counit.
    pub fn counit(&self) -> Scalar {
        self.coeff(&Key::unit(self.n))
    }

    pub fn add_term(&mut self, key: Key, c: Scalar) {
        assert_eq!(key.slots(), self.n, "slot count mismatch");
        if c.is_zero() || !key.is_repetition_free() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &PolyDiff) -> PolyDiff {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyDiff) -> PolyDiff {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyDiff {
        PolyDiff {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> PolyDiff {
        if c.is_zero() {
            return PolyDiff::zero(self.n);
        }
        PolyDiff {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, x)| (k.clone(), x.mul(c)))
                .collect(),
        }
    }

    /// Largest total key degree present.
    pub fn max_degree(&self) -> usize {
        self.keys().map(Key::total_len).max().unwrap_or(0)
    }

    /// Terms whose index support equals `x` exactly.
    pub fn component(&self, x: &BTreeSet<Idx>) -> PolyDiff {
        PolyDiff {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| &k.support() == x)
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms whose index support is contained in `y`.
    pub fn component_within(&self, y: &BTreeSet<Idx>) -> PolyDiff {
        PolyDiff {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.support().is_subset(y))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Shuffle product: slot-wise interleavings, zero on repeated indices.
    pub fn product(&self, other: &PolyDiff) -> PolyDiff {
        assert_eq!(self.n, other.n, "slot count mismatch");
        let mut out = PolyDiff::zero(self.n);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let c = c1.mul(c2);
                let per_slot: Vec<Vec<Seq>> = (0..self.n)
                    .map(|nu| shuffles(&k1.0[nu], &k2.0[nu]))
                    .collect();
                let mut stack: Vec<Vec<Seq>> = alloc::vec![Vec::new()];
                for options in &per_slot {
                    let mut next = Vec::with_capacity(stack.len() * options.len());
                    for partial in &stack {
                        for opt in options {
                            let mut p = partial.clone();
                            p.push(opt.clone());
                            next.push(p);
                        }
                    }
                    stack = next;
                }
                for slots in stack {
                    out.add_term(Key(slots), c.clone());
                }
            }
        }
        out
    }

    /// Deconcatenation coproduct, split slot by slot: head parts to the left
    /// tensor leg, tail parts (adjacent to the marked points) to the right.
    pub fn coproduct(&self) -> PolyDiffTensor {
        let mut out = PolyDiffTensor::zero(self.n);
        for (k, c) in &self.terms {
            let per_slot: Vec<Vec<(Seq, Seq)>> = k.0.iter().map(Seq::splits).collect();
            let mut stack: Vec<(Vec<Seq>, Vec<Seq>)> = alloc::vec![(Vec::new(), Vec::new())];
            for options in &per_slot {
                let mut next = Vec::with_capacity(stack.len() * options.len());
                for (hs, ts) in &stack {
                    for (h, t) in options {
                        let mut hh = hs.clone();
                        let mut tt = ts.clone();
                        hh.push(h.clone());
                        tt.push(t.clone());
                        next.push((hh, tt));
                    }
                }
                stack = next;
            }
            for (hs, ts) in stack {
                out.add_term(Key(hs), Key(ts), c.clone());
            }
        }
        out
    }

    /// Multiplication by an omega word. The word's last entry `k` anchors the
    /// rule: a term contributes only when it contains `k`, the rest of the
    /// word shuffles into the part of that slot before `k`. Empty words are
    /// rejected; terms whose insertion would repeat an index vanish.
    pub fn omega_times(&self, word: &Seq) -> Result<PolyDiff> {
        let anchor = word.tail().ok_or(Error::EmptyOmegaWord)?;
        let body = Seq(word.0[..word.len() - 1].to_vec());
        let mut out = PolyDiff::zero(self.n);
        for (key, c) in &self.terms {
            let Some(slot) = key.slot_of(anchor) else {
                continue;
            };
            let s = &key.0[slot];
            let pos = s.0.iter().position(|&i| i == anchor).unwrap();
            let before = Seq(s.0[..pos].to_vec());
            let after = Seq(s.0[pos..].to_vec());
            for sh in shuffles(&body, &before) {
                out.add_term(key.with_slot(slot, sh.concat(&after)), c.clone());
            }
        }
        Ok(out)
    }

    /// Strip `x` from the head of whichever slot it leads; the residue taken
    /// at infinity, summed across slots.
    pub fn residue_at_infinity(&self, x: Idx) -> PolyDiff {
        let mut out = PolyDiff::zero(self.n);
        for (key, c) in &self.terms {
            for (nu, s) in key.0.iter().enumerate() {
                if s.head() == Some(x) {
                    out.add_term(key.with_slot(nu, Seq(s.0[1..].to_vec())), c.clone());
                }
            }
        }
        out
    }

    /// Strip `x` from the tail of slot `slot`: the residue at that slot's
    /// marked point.
    pub fn residue_at_marked(&self, x: Idx, slot: usize) -> PolyDiff {
        assert!(slot < self.n);
        let mut out = PolyDiff::zero(self.n);
        for (key, c) in &self.terms {
            let s = &key.0[slot];
            if s.tail() == Some(x) {
                out.add_term(
                    key.with_slot(slot, Seq(s.0[..s.len() - 1].to_vec())),
                    c.clone(),
                );
            }
        }
        out
    }

    /// Residue along the diagonal sending `x` to `y`: a term survives only
    /// when `x` and `y` are adjacent in one slot, with sign +1 for order
    /// (...,x,y,...) and -1 for (...,y,x,...); `x` is removed.
    pub fn residue_diag(&self, x: Idx, y: Idx) -> PolyDiff {
        assert_ne!(x, y);
        let mut out = PolyDiff::zero(self.n);
        for (key, c) in &self.terms {
            for (nu, s) in key.0.iter().enumerate() {
                for w in 0..s.len().saturating_sub(1) {
                    let (a, b) = (s.0[w], s.0[w + 1]);
                    let sign = if (a, b) == (x, y) {
                        Scalar::one()
                    } else if (a, b) == (y, x) {
                        Scalar::from_int(-1)
                    } else {
                        continue;
                    };
                    let mut v = s.0.clone();
                    v.remove(if (a, b) == (x, y) { w } else { w + 1 });
                    out.add_term(key.with_slot(nu, Seq(v)), c.mul(&sign));
                }
            }
        }
        out
    }

    /// Iterated diagonal residue along `i`: successively contracts the head
    /// of `i` onto its successor, leaving the tail coordinate alive. Length
    /// zero or one acts as the identity.
    pub fn iterated_residue(&self, i: &Seq) -> PolyDiff {
        let mut a = self.clone();
        for k in 0..i.len().saturating_sub(1) {
            a = a.residue_diag(i.0[k], i.0[k + 1]);
        }
        a
    }
}

impl fmt::Display for PolyDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (key, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*z{key}")?;
        }
        Ok(())
    }
}

/// A sum of two-leg tensors. Each leg normalizes independently; indices may
/// repeat across legs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyDiffTensor {
    n: usize,
    terms: BTreeMap<(Key, Key), Scalar>,
}

impl PolyDiffTensor {
    pub fn zero(n: usize) -> Self {
        PolyDiffTensor {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn slots(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Key, Key), &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, left: Key, right: Key, c: Scalar) {
        assert_eq!(left.slots(), self.n);
        assert_eq!(right.slots(), self.n);
        if c.is_zero() || !left.is_repetition_free() || !right.is_repetition_free() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry((left, right)) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &PolyDiffTensor) -> PolyDiffTensor {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for ((l, r), c) in &other.terms {
            out.add_term(l.clone(), r.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyDiffTensor) -> PolyDiffTensor {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyDiffTensor {
        PolyDiffTensor {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> PolyDiffTensor {
        if c.is_zero() {
            return PolyDiffTensor::zero(self.n);
        }
        PolyDiffTensor {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, x)| (k.clone(), x.mul(c)))
                .collect(),
        }
    }

    /// Tensor of two elements.
    pub fn of(left: &PolyDiff, right: &PolyDiff) -> PolyDiffTensor {
        assert_eq!(left.slots(), right.slots());
        let mut out = PolyDiffTensor::zero(left.slots());
        for (kl, cl) in left.terms() {
            for (kr, cr) in right.terms() {
                out.add_term(kl.clone(), kr.clone(), cl.mul(cr));
            }
        }
        out
    }

    /// Componentwise product: (a (x) b)(c (x) d) = ac (x) bd.
    pub fn product(&self, other: &PolyDiffTensor) -> PolyDiffTensor {
        assert_eq!(self.n, other.n);
        let mut out = PolyDiffTensor::zero(self.n);
        for ((l1, r1), c1) in &self.terms {
            for ((l2, r2), c2) in &other.terms {
                let lp = PolyDiff::zeta(l1.clone()).product(&PolyDiff::zeta(l2.clone()));
                let rp = PolyDiff::zeta(r1.clone()).product(&PolyDiff::zeta(r2.clone()));
                let c = c1.mul(c2);
                for (lk, lc) in lp.terms() {
                    for (rk, rc) in rp.terms() {
                        out.add_term(lk.clone(), rk.clone(), c.mul(lc).mul(rc));
                    }
                }
            }
        }
        out
    }

    /// Apply a linear map to the left leg.
    pub fn map_left(&self, f: &dyn Fn(&PolyDiff) -> PolyDiff) -> PolyDiffTensor {
        let mut out = PolyDiffTensor::zero(self.n);
        for ((l, r), c) in &self.terms {
            let fl = f(&PolyDiff::zeta(l.clone()));
            for (k, x) in fl.terms() {
                out.add_term(k.clone(), r.clone(), c.mul(x));
            }
        }
        out
    }

    /// Apply a linear map to the right leg.
    pub fn map_right(&self, f: &dyn Fn(&PolyDiff) -> PolyDiff) -> PolyDiffTensor {
        let mut out = PolyDiffTensor::zero(self.n);
        for ((l, r), c) in &self.terms {
            let fr = f(&PolyDiff::zeta(r.clone()));
            for (k, x) in fr.terms() {
                out.add_term(l.clone(), k.clone(), c.mul(x));
            }
        }
        out
    }
}

impl fmt::Display for PolyDiffTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, ((l, r), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}*z{l}(x)z{r}")?;
        }
        Ok(())
    }
}

/// Apply the nested commutator [ops[0], [ops[1], [..., ops[last]]]] to `v`.
pub fn nested_bracket(ops: &[&dyn Fn(&PolyDiff) -> PolyDiff], v: &PolyDiff) -> PolyDiff {
    assert!(!ops.is_empty());
    if ops.len() == 1 {
        return ops[0](v);
    }
    let rest = &ops[1..];
    let h_rv = ops[0](&nested_bracket(rest, v));
    let r_hv = nested_bracket(rest, &ops[0](v));
    h_rv.sub(&r_hv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn i(c: u16, o: u16) -> Idx {
        Idx::new(c, o)
    }

    fn z(ids: &[Idx]) -> PolyDiff {
        PolyDiff::zeta1(Seq(ids.to_vec()))
    }

    #[test]
    fn product_of_singletons_is_two_orders() {
        let a = i(1, 0);
        let b = i(2, 0);
        let p = z(&[a]).product(&z(&[b]));
        assert_eq!(p.term_count(), 2);
        assert_eq!(p.coeff(&Key(vec![Seq(vec![a, b])])), Scalar::one());
        assert_eq!(p.coeff(&Key(vec![Seq(vec![b, a])])), Scalar::one());
    }

    #[test]
    fn repeated_index_kills_product() {
        let a = i(1, 0);
        assert!(z(&[a]).product(&z(&[a])).is_zero());
    }

    #[test]
    fn coproduct_deconcatenates() {
        let a = i(1, 0);
        let b = i(2, 0);
        let d = z(&[a, b]).coproduct();
        let e = Key(vec![Seq::empty()]);
        let ka = Key(vec![Seq(vec![a])]);
        let kb = Key(vec![Seq(vec![b])]);
        let kab = Key(vec![Seq(vec![a, b])]);
        let mut expect = PolyDiffTensor::zero(1);
        expect.add_term(e.clone(), kab.clone(), Scalar::one());
        expect.add_term(ka, kb, Scalar::one());
        expect.add_term(kab, e, Scalar::one());
        assert_eq!(d, expect);
    }

    #[test]
    fn omega_rule_matches_examples() {
        let a = i(1, 0);
        let b = i(2, 0);
        // word (a,b) times zeta(b) = zeta(a,b)
        let r = z(&[b]).omega_times(&Seq(vec![a, b])).unwrap();
        assert_eq!(r, z(&[a, b]));
        // singleton word acts as identity on matching terms
        let r2 = z(&[b, a]).omega_times(&Seq(vec![b])).unwrap();
        assert_eq!(r2, z(&[b, a]));
        // anchor missing: zero
        let r3 = z(&[a]).omega_times(&Seq(vec![a, b])).unwrap();
        assert!(r3.is_zero());
        // empty word: error
        assert!(z(&[a]).omega_times(&Seq::empty()).is_err());
    }

    #[test]
    fn omega_product_rule_general_case() {
        // word (x,k) times zeta(j,k,l): shuffle (x) into (j), keep (k,l).
        let x = i(1, 0);
        let j = i(1, 1);
        let k = i(1, 2);
        let l = i(1, 3);
        let r = z(&[j, k, l]).omega_times(&Seq(vec![x, k])).unwrap();
        assert_eq!(r, z(&[x, j, k, l]).add(&z(&[j, x, k, l])));
    }

    #[test]
    fn residue_operators_match_examples() {
        let a = i(1, 0);
        let b = i(2, 0);
        assert_eq!(z(&[a, b]).residue_at_infinity(a), z(&[b]));
        assert!(z(&[a, b]).residue_at_infinity(b).is_zero());
        assert_eq!(z(&[b, a]).residue_at_marked(a, 0), z(&[b]));
        assert!(z(&[b, a]).residue_at_marked(b, 0).is_zero());
        assert_eq!(z(&[a, b]).residue_diag(a, b), z(&[b]));
        assert_eq!(z(&[b, a]).residue_diag(a, b), z(&[b]).neg());
        assert!(z(&[a]).residue_diag(a, b).is_zero());
    }

    #[test]
    fn iterated_residue_contracts_toward_tail() {
        let a = i(1, 0);
        let b = i(1, 1);
        let c = i(1, 2);
        // res along (a,b,c) of zeta(a,b,c) keeps the tail coordinate c
        let r = z(&[a, b, c]).iterated_residue(&Seq(vec![a, b, c]));
        assert_eq!(r, z(&[c]));
    }

    #[test]
    fn unit_is_neutral_for_product() {
        let a = i(1, 0);
        let b = i(1, 1);
        let v = z(&[a, b]);
        assert_eq!(PolyDiff::unit(1).product(&v), v);
    }
}

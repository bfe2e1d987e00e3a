//! Creation operators: for each index x a first-order operator that inserts
//! x into every slot position of a term, weighted by a marked-point parameter
//! minus the pair couplings to the entries behind the insertion point.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::scalar::Scalar;
use crate::seq::{Idx, Seq};
use crate::shuffle::PolyDiff;

/// Parameters for the creation operators: `p` is the slot-dependent
/// marked-point weight, `c` the pair coupling.
pub trait PhiWeights {
    fn p(&self, slot: usize, x: Idx) -> Scalar;
    fn c(&self, x: Idx, y: Idx) -> Scalar;
}

/// Explicit tables, for tests and symbolic checks.
#[derive(Clone, Debug, Default)]
pub struct TableWeights {
    pub p: BTreeMap<(usize, Idx), Scalar>,
    pub c: BTreeMap<(Idx, Idx), Scalar>,
}

impl TableWeights {
    pub fn new() -> Self {
        TableWeights::default()
    }

    pub fn set_p(&mut self, slot: usize, x: Idx, v: Scalar) -> &mut Self {
        self.p.insert((slot, x), v);
        self
    }

    pub fn set_c(&mut self, x: Idx, y: Idx, v: Scalar) -> &mut Self {
        self.c.insert((x, y), v);
        self
    }

    pub fn set_c_symmetric(&mut self, x: Idx, y: Idx, v: Scalar) -> &mut Self {
        self.c.insert((x, y), v.clone());
        self.c.insert((y, x), v);
        self
    }
}

impl PhiWeights for TableWeights {
    fn p(&self, slot: usize, x: Idx) -> Scalar {
        self.p
            .get(&(slot, x))
            .cloned()
            .unwrap_or_else(|| panic!("missing p({slot}, {x})"))
    }

    fn c(&self, x: Idx, y: Idx) -> Scalar {
        self.c
            .get(&(x, y))
            .cloned()
            .unwrap_or_else(|| panic!("missing c({x}, {y})"))
    }
}

/// Sum of the couplings of `x` against every entry of `s`.
pub fn c_sum(w: &dyn PhiWeights, x: Idx, s: &[Idx]) -> Scalar {
    let mut acc = Scalar::zero();
    for &j in s {
        acc = acc.add(&w.c(x, j));
    }
    acc
}

/// The creation operator for `x`: inserts `x` at every position of every
/// slot, with coefficient p(slot, x) minus the couplings of x to the entries
/// between the insertion point and the marked point. Terms already containing
/// `x` vanish.
pub fn phi(x: Idx, w: &dyn PhiWeights, a: &PolyDiff) -> PolyDiff {
    let mut out = PolyDiff::zero(a.slots());
    for (key, coeff) in a.terms() {
        if key.contains(x) {
            continue;
        }
        for (nu, s) in key.0.iter().enumerate() {
            for cut in 0..=s.len() {
                let mut v = s.0.clone();
                v.insert(cut, x);
                let weight = w.p(nu, x).sub(&c_sum(w, x, &s.0[cut..]));
                out.add_term(key.with_slot(nu, Seq(v)), coeff.mul(&weight));
            }
        }
    }
    out
}

/// Slot-restricted creation operator: inserts `x` at every position of the
/// chosen slot only, with the same coefficient rule as `phi`.
pub fn phi_slot(x: Idx, slot: usize, w: &dyn PhiWeights, a: &PolyDiff) -> PolyDiff {
    let mut out = PolyDiff::zero(a.slots());
    for (key, coeff) in a.terms() {
        if key.contains(x) {
            continue;
        }
        let s = &key.0[slot];
        for cut in 0..=s.len() {
            let mut v = s.0.clone();
            v.insert(cut, x);
            let weight = w.p(slot, x).sub(&c_sum(w, x, &s.0[cut..]));
            out.add_term(key.with_slot(slot, Seq(v)), coeff.mul(&weight));
        }
    }
    out
}

/// Composite of creation operators along a word, rightmost entry first.
pub fn phi_word(word: &Seq, w: &dyn PhiWeights, a: &PolyDiff) -> PolyDiff {
    let mut v = a.clone();
    for &x in word.0.iter().rev() {
        v = phi(x, w, &v);
    }
    v
}

/// Commutator [phi_x, phi_y] applied to `a`, by direct composition.
pub fn phi_commutator(x: Idx, y: Idx, w: &dyn PhiWeights, a: &PolyDiff) -> PolyDiff {
    phi(x, w, &phi(y, w, a)).sub(&phi(y, w, &phi(x, w, a)))
}

/// Closed form of the same commutator:
/// -c(x,y) omega_(x,y) phi_y + c(y,x) omega_(y,x) phi_x.
pub fn phi_commutator_closed(x: Idx, y: Idx, w: &dyn PhiWeights, a: &PolyDiff) -> PolyDiff {
    let left = phi(y, w, a)
        .omega_times(&Seq(alloc::vec![x, y]))
        .expect("nonempty word")
        .scale(&w.c(x, y).neg());
    let right = phi(x, w, a)
        .omega_times(&Seq(alloc::vec![y, x]))
        .expect("nonempty word")
        .scale(&w.c(y, x));
    left.add(&right)
}

/// Nested commutator [phi_{i_N}, [ ... [phi_{i_1}, phi_o] ... ]] applied to
/// `a`, where `word` lists (i_N, ..., i_1) head-first and `o` is innermost.
pub fn phi_nested_bracket(word: &Seq, o: Idx, w: &dyn PhiWeights, a: &PolyDiff) -> PolyDiff {
    let mut ops: Vec<Idx> = word.0.clone();
    ops.push(o);
    fn go(ops: &[Idx], w: &dyn PhiWeights, v: &PolyDiff) -> PolyDiff {
        if ops.len() == 1 {
            return phi(ops[0], w, v);
        }
        let rest = &ops[1..];
        let h_rv = phi(ops[0], w, &go(rest, w, v));
        let r_hv = go(rest, w, &phi(ops[0], w, v));
        h_rv.sub(&r_hv)
    }
    go(&ops, w, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Var;
    use crate::seq::Key;
    use alloc::vec;

    fn i(c: u16, o: u16) -> Idx {
        Idx::new(c, o)
    }

    fn z(ids: &[Idx]) -> PolyDiff {
        PolyDiff::zeta1(Seq(ids.to_vec()))
    }

    /// Symbolic weights: p_x and c_{x,y} are distinct formal parameters.
    fn symbolic(ids: &[Idx]) -> TableWeights {
        let mut w = TableWeights::new();
        let mut next = 0u32;
        for &x in ids {
            w.set_p(0, x, Scalar::var(Var::Param(next)));
            next += 1;
        }
        for &x in ids {
            for &y in ids {
                if x != y {
                    w.set_c(x, y, Scalar::var(Var::Param(next)));
                    next += 1;
                }
            }
        }
        w
    }

    #[test]
    fn phi_on_unit_and_singleton() {
        let x = i(1, 0);
        let y = i(1, 1);
        let w = symbolic(&[x, y]);
        let px = w.p(0, x);
        let cxy = w.c(x, y);

        assert_eq!(phi(x, &w, &PolyDiff::unit(1)), z(&[x]).scale(&px));

        let got = phi(x, &w, &z(&[y]));
        let mut expect = PolyDiff::zero(1);
        expect.add_term(Key(vec![Seq(vec![x, y])]), px.sub(&cxy));
        expect.add_term(Key(vec![Seq(vec![y, x])]), px.clone());
        assert_eq!(got, expect);
    }

    #[test]
    fn phi_vanishes_on_repeats() {
        let x = i(1, 0);
        let w = symbolic(&[x]);
        assert!(phi(x, &w, &z(&[x])).is_zero());
    }

    #[test]
    fn commutator_matches_closed_form_on_small_elements() {
        let x = i(1, 0);
        let y = i(1, 1);
        let u = i(1, 2);
        let w = symbolic(&[x, y, u]);
        for probe in [PolyDiff::unit(1), z(&[u]), z(&[u, y]).add(&z(&[y, u]))] {
            assert_eq!(
                phi_commutator(x, y, &w, &probe),
                phi_commutator_closed(x, y, &w, &probe),
            );
        }
    }

    #[test]
    fn phi_is_a_derivation_for_the_product_up_to_insertion() {
        // phi is not a derivation; this just pins the word-composition order:
        // phi_word on (x,y) must equal phi_x after phi_y.
        let x = i(1, 0);
        let y = i(1, 1);
        let w = symbolic(&[x, y]);
        let via_word = phi_word(&Seq(vec![x, y]), &w, &PolyDiff::unit(1));
        let direct = phi(x, &w, &phi(y, &w, &PolyDiff::unit(1)));
        assert_eq!(via_word, direct);
    }
}

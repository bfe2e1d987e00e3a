//! The splitting operator on basis elements: each element decomposes into a
//! left factor tensored with an omega-dressed insertion operator. The
//! operator satisfies a twisted derivation identity against insertions and,
//! iterated from the vacuum, produces the same subsequence expansion that
//! drives the pair actions on tensor slots.

use alloc::vec;
use alloc::vec::Vec;

use crate::cartan::{Casimir, HattedWeights};
use crate::error::Result;
use crate::phi::{c_sum, phi, phi_slot, PhiWeights};
use crate::scalar::Scalar;
use crate::seq::{Idx, Seq};
use crate::shuffle::{PolyDiff, PolyDiffTensor};

/// "Multiply by the listed omega words, then apply the insertion of `phi`."
/// Words are listed as written, leftmost outermost; evaluation applies the
/// insertion first and the words right to left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorExpr {
    pub words: Vec<Seq>,
    pub phi: Idx,
}

impl OperatorExpr {
    pub fn apply(&self, w: &dyn PhiWeights, u: &PolyDiff) -> Result<PolyDiff> {
        let mut a = phi(self.phi, w, u);
        for word in self.words.iter().rev() {
            a = a.omega_times(word)?;
        }
        Ok(a)
    }
}

/// One term of the splitting: coefficient, left factor, operator part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaTerm {
    pub coeff: Scalar,
    pub left: Seq,
    pub op: OperatorExpr,
}

/// The splitting of one basis element: for every way of writing the word as
/// L i K J, the part J splits off as the left factor while i returns as an
/// insertion dressed by the omega words of L and the reversed K.
pub fn gamma_map(i: &Seq) -> Vec<GammaTerm> {
    let v = &i.0;
    let mut out = Vec::new();
    for p in 0..v.len() {
        let mut li = v[..p].to_vec();
        li.push(v[p]);
        let li = Seq(li);
        for cut in p + 1..=v.len() {
            let k = &v[p + 1..cut];
            let j = &v[cut..];
            let mut kw: Vec<Idx> = k.iter().rev().copied().collect();
            kw.push(v[p]);
            let coeff = if k.len() % 2 == 0 {
                Scalar::one()
            } else {
                Scalar::from_int(-1)
            };
            out.push(GammaTerm {
                coeff,
                left: Seq(j.to_vec()),
                op: OperatorExpr {
                    words: vec![li.clone(), Seq(kw)],
                    phi: v[p],
                },
            });
        }
    }
    out
}

/// Applies the splitting of a single-slot element linearly: both tensor legs
/// evaluated, the right leg on `u`.
pub fn gamma_apply(a: &PolyDiff, w: &dyn PhiWeights, u: &PolyDiff) -> Result<PolyDiffTensor> {
    let mut out = PolyDiffTensor::zero(1);
    for (key, c) in a.terms() {
        for t in gamma_map(&key.0[0]) {
            let left = PolyDiff::zeta1(t.left.clone());
            let right = t.op.apply(w, u)?;
            out = out.add(&PolyDiffTensor::of(&left, &right).scale(&c.mul(&t.coeff)));
        }
    }
    Ok(out)
}

/// Twisted derivation identity for the splitting against one insertion:
/// splitting the inserted element equals inserting on the left leg, plus the
/// adjoint insertion on the operator leg, plus a boundary term returning the
/// original element tensored with the insertion itself. Checked exactly on
/// the given right-leg test elements.
pub fn funny_identity_holds(
    w: &dyn PhiWeights,
    i: &Seq,
    x: Idx,
    tests: &[PolyDiff],
) -> Result<bool> {
    let zi = PolyDiff::zeta1(i.clone());
    let phix_zi = phi(x, w, &zi);
    let boundary = w.p(0, x).sub(&c_sum(w, x, &i.0));
    for u in tests {
        let lhs = gamma_apply(&phix_zi, w, u)?;
        let phix_u = phi(x, w, u);
        let mut rhs = PolyDiffTensor::zero(1);
        for t in gamma_map(i) {
            let left = PolyDiff::zeta1(t.left.clone());
            let right_u = t.op.apply(w, u)?;
            // left-leg insertion
            rhs = rhs.add(&PolyDiffTensor::of(&phi(x, w, &left), &right_u).scale(&t.coeff));
            // adjoint on the operator leg
            let ad = phi(x, w, &right_u).sub(&t.op.apply(w, &phix_u)?);
            rhs = rhs.add(&PolyDiffTensor::of(&left, &ad).scale(&t.coeff));
        }
        rhs = rhs.add(&PolyDiffTensor::of(&zi, &phix_u).scale(&boundary));
        if !lhs.sub(&rhs).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Iterated splitting of a vacuum insertion word: nonempty subsequences K
/// carry the insertion coefficient of their last letter against the common
/// tail, with the bracketed insertions of K acting on the right leg.
pub fn corollary_funny_holds(w: &dyn PhiWeights, i: &Seq, tests: &[PolyDiff]) -> Result<bool> {
    let v = &i.0;
    let n = v.len();
    let unit = PolyDiff::unit(1);
    let lhs_elem = crate::phi::phi_word(i, w, &unit);
    for u in tests {
        let lhs = gamma_apply(&lhs_elem, w, u)?;
        let mut rhs = PolyDiffTensor::zero(1);
        for mask in 1u32..(1u32 << n) {
            let chosen: Vec<usize> = (0..n).filter(|p| mask >> p & 1 == 1).collect();
            let last = *chosen.last().unwrap();
            let ell = v[last];
            let coeff = w.p(0, ell).sub(&c_sum(w, ell, &v[last + 1..]));
            let rest: Vec<Idx> = (0..n)
                .filter(|p| mask >> p & 1 == 0)
                .map(|p| v[p])
                .collect();
            let left = crate::phi::phi_word(&Seq(rest), w, &unit);
            let k_word: Vec<Idx> = chosen.iter().map(|&p| v[p]).collect();
            let right = if k_word.len() == 1 {
                phi(k_word[0], w, u)
            } else {
                crate::phi::phi_nested_bracket(
                    &Seq(k_word[..k_word.len() - 1].to_vec()),
                    k_word[k_word.len() - 1],
                    w,
                    u,
                )
            };
            rhs = rhs.add(&PolyDiffTensor::of(&left, &right).scale(&coeff));
        }
        if !lhs.sub(&rhs).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Slot-resolved upper splitting on a multi-slot element: the slot-nu word
/// splits as L i K J, J stays in slot nu, and the dressed pairing-weighted
/// insertion of i lands in slot mu. This is the residue-side form of the
/// subsequence move of the pair action.
pub fn gamma_plus_apply(
    cas: &Casimir,
    a: &PolyDiff,
    nu: usize,
    mu: usize,
) -> Result<PolyDiff> {
    let hw = HattedWeights { cas: cas.clone() };
    let mut out = PolyDiff::zero(a.slots());
    for (key, c) in a.terms() {
        let word = key.0[nu].0.clone();
        let stripped = PolyDiff::zeta(key.with_slot(nu, Seq::empty()));
        for p in 0..word.len() {
            let mut li = word[..p].to_vec();
            li.push(word[p]);
            let li = Seq(li);
            for cut in p + 1..=word.len() {
                let k = &word[p + 1..cut];
                let j = &word[cut..];
                let mut kw: Vec<Idx> = k.iter().rev().copied().collect();
                kw.push(word[p]);
                let term = phi_slot(word[p], mu, &hw, &stripped)
                    .omega_times(&Seq(kw))?
                    .omega_times(&li)?
                    .product(&PolyDiff::zeta(
                        crate::seq::Key::unit(a.slots()).with_slot(nu, Seq(j.to_vec())),
                    ));
                let sign = if k.len() % 2 == 0 {
                    Scalar::one()
                } else {
                    Scalar::from_int(-1)
                };
                out = out.add(&term.scale(&c.mul(&sign)));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::sl2_context;
    use crate::connection::KzContext;
    use crate::phi::TableWeights;
    use crate::rep::expand;
    use crate::scalar::{rat, Var};

    fn letters() -> Vec<Idx> {
        (0..6).map(|k| Idx::new(1, k)).collect()
    }

    /// Fully symbolic weights: independent parameters for every insertion
    /// coefficient and every symmetric coupling.
    fn symbolic_weights() -> TableWeights {
        let ls = letters();
        let mut w = TableWeights::new();
        for (a, &x) in ls.iter().enumerate() {
            w.set_p(0, x, Scalar::var(Var::Param(a as u32)));
            for (b, &y) in ls.iter().enumerate() {
                if a <= b {
                    w.set_c_symmetric(x, y, Scalar::var(Var::Param(100 + (a * 10 + b) as u32)));
                }
            }
        }
        w
    }

    #[test]
    fn splitting_of_short_words() {
        assert!(gamma_map(&Seq::empty()).is_empty());

        let ls = letters();
        let (i, j) = (ls[0], ls[1]);
        let single = gamma_map(&Seq(vec![i]));
        assert_eq!(single.len(), 1);
        assert!(single[0].left.is_empty());
        assert_eq!(single[0].op.phi, i);
        assert_eq!(single[0].op.words, vec![Seq(vec![i]), Seq(vec![i])]);
        assert!(single[0].coeff.sub(&Scalar::one()).is_zero());

        // head j, tail i: three splittings
        let double = gamma_map(&Seq(vec![j, i]));
        assert_eq!(double.len(), 3);
        let lefts: Vec<&Seq> = double.iter().map(|t| &t.left).collect();
        assert!(lefts.contains(&&Seq(vec![i])));
        assert!(lefts.contains(&&Seq::empty()));
        let phis: Vec<Idx> = double.iter().map(|t| t.op.phi).collect();
        assert_eq!(phis.iter().filter(|&&x| x == j).count(), 2);
        assert_eq!(phis.iter().filter(|&&x| x == i).count(), 1);
    }

    #[test]
    fn splitting_of_single_letter_is_plain_insertion() {
        let ls = letters();
        let w = symbolic_weights();
        let u = PolyDiff::zeta1(Seq(vec![ls[4]]));
        let a = PolyDiff::zeta1(Seq(vec![ls[0]]));
        let got = gamma_apply(&a, &w, &u).unwrap();
        let expected = PolyDiffTensor::of(&PolyDiff::unit(1), &phi(ls[0], &w, &u));
        assert!(got.sub(&expected).is_zero());
    }

    #[test]
    fn twisted_derivation_identity_on_symbolic_weights() {
        let ls = letters();
        let w = symbolic_weights();
        let tests = vec![
            PolyDiff::unit(1),
            PolyDiff::zeta1(Seq(vec![ls[4]])),
            PolyDiff::zeta1(Seq(vec![ls[4], ls[5]])),
        ];
        // couplings are only defined for distinct letters, so the inserted
        // letter must not occur in the word (inserting a repeated letter
        // kills the element anyway)
        let x = ls[3];
        for i_word in [
            Seq::empty(),
            Seq(vec![ls[0]]),
            Seq(vec![ls[0], ls[1]]),
            Seq(vec![ls[0], ls[1], ls[2]]),
        ] {
            assert!(
                funny_identity_holds(&w, &i_word, x, &tests).unwrap(),
                "|I| = {}",
                i_word.len()
            );
        }
    }

    #[test]
    fn twisted_derivation_identity_detects_wrong_boundary() {
        let ls = letters();
        let w = symbolic_weights();
        let i_word = Seq(vec![ls[0]]);
        let x = ls[3];
        let u = PolyDiff::zeta1(Seq(vec![ls[4]]));
        // rebuild the check with the boundary coefficient negated
        let zi = PolyDiff::zeta1(i_word.clone());
        let phix_zi = phi(x, &w, &zi);
        let lhs = gamma_apply(&phix_zi, &w, &u).unwrap();
        let phix_u = phi(x, &w, &u);
        let mut rhs = PolyDiffTensor::zero(1);
        for t in gamma_map(&i_word) {
            let left = PolyDiff::zeta1(t.left.clone());
            let right_u = t.op.apply(&w, &u).unwrap();
            rhs = rhs.add(&PolyDiffTensor::of(&phi(x, &w, &left), &right_u).scale(&t.coeff));
            let ad = phi(x, &w, &right_u).sub(&t.op.apply(&w, &phix_u).unwrap());
            rhs = rhs.add(&PolyDiffTensor::of(&left, &ad).scale(&t.coeff));
        }
        let wrong = c_sum(&w, x, &i_word.0).sub(&w.p(0, x));
        rhs = rhs.add(&PolyDiffTensor::of(&zi, &phix_u).scale(&wrong));
        assert!(!lhs.sub(&rhs).is_zero());
    }

    #[test]
    fn vacuum_word_splitting_matches_subsequence_expansion() {
        let ls = letters();
        let w = symbolic_weights();
        let tests = vec![PolyDiff::unit(1), PolyDiff::zeta1(Seq(vec![ls[4]]))];
        for i_word in [
            Seq(vec![ls[0]]),
            Seq(vec![ls[0], ls[1]]),
            Seq(vec![ls[0], ls[1], ls[2]]),
        ] {
            assert!(
                corollary_funny_holds(&w, &i_word, &tests).unwrap(),
                "|I| = {}",
                i_word.len()
            );
        }
    }

    #[test]
    fn slot_splitting_matches_subsequence_move_after_expansion() {
        // the residue-side splitting of an expanded lowering monomial equals
        // the expanded subsequence move of the pair action
        let kz = KzContext::new(sl2_context(&[2, 3], rat(5, 2)).unwrap());
        let pool: Vec<Idx> = (0..3).map(|k| Idx::new(1, k)).collect();
        for tuple in [
            vec![vec![1u16], Vec::new()],
            vec![vec![1u16], vec![1u16]],
            vec![vec![1u16, 1u16], vec![1u16]],
            vec![vec![1u16, 1u16], Vec::new()],
        ] {
            let v = kz.tuple_vector(&tuple);
            let expanded = expand(&v, &pool).unwrap();
            let gamma_route = gamma_plus_apply(&kz.cas, &expanded, 0, 1).unwrap();
            let sv_route = expand(&kz.cplus_on_tuple(0, 1, &tuple), &pool).unwrap();
            assert!(
                gamma_route.sub(&sv_route).is_zero(),
                "tuple {tuple:?}"
            );
        }
    }
}

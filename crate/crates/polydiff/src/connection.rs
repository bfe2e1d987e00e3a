//! Casimir pair actions on tensor slots and the two connections they induce:
//! the KZ matrices on invariants and the parameter-derivative (Gauss-Manin)
//! matrices computed on the shuffle side.
//!
//! The pair action C_[nu,mu] = C0 + C+ + C- is evaluated on vectors written
//! in lowering-word coordinates; C+ follows the Shapovalov-style expansion
//! over subsequences of the slot-nu word, with iterated brackets acting on
//! slot mu. The parameter derivative is assembled per pole: multiplying a
//! basis element by (z_nu - z_mu)/(t_i - z_mu) or (z_nu - z_mu)/(t_i - t_x)
//! re-expands in the basis, and collecting the residues of the derivative
//! along d(z_nu - z_mu)/(z_nu - z_mu) yields exact matrices comparable with
//! the KZ side.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use num_traits::Zero;

use crate::cartan::{Casimir, HattedWeights};
use crate::error::{Error, Result};
use crate::linalg::{coords_in_span, Mat};
use crate::phi::phi;
use crate::rep::{coords, expand, seqs_with_content, CKey, CVec, RepCtx};
use crate::scalar::{Rat, Scalar};
use crate::seq::{Idx, Key, Seq};
use crate::shuffle::PolyDiff;

/// Square matrices indexed by unordered slot pairs (nu < mu).
pub type ConnectionSet = BTreeMap<(usize, usize), Mat>;

/// Shared state for the pair actions: the lowering/raising module structure
/// together with the pairing data that scales it.
#[derive(Clone, Debug)]
pub struct KzContext {
    pub ctx: RepCtx,
    pub cas: Casimir,
}

/// One lowering word per slot, each applied tail-first to the vacuum.
pub type WordTuple = Vec<Vec<u16>>;

impl KzContext {
    pub fn new(cas: Casimir) -> Self {
        let ctx = RepCtx::new(cas.cartan.clone(), cas.weights.clone());
        KzContext { ctx, cas }
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    /// Slot-local lowering rescaled by the pairing of its simple root.
    fn hatted_slot_f(&self, nu: usize, k: u16, v: &CVec) -> CVec {
        let q = Scalar::from_rat(self.cas.q_alpha((k - 1) as usize));
        self.ctx.slot_f_action(nu, k, v).scale(&q)
    }

    fn apply_hatted_word(&self, nu: usize, word: &[u16], v: &CVec) -> CVec {
        let mut out = v.clone();
        for &k in word.iter().rev() {
            out = self.hatted_slot_f(nu, k, &out);
        }
        out
    }

    /// Iterated bracket of hatted slot lowerings, first letter outermost.
    fn bracket_apply(&self, nu: usize, word: &[u16], v: &CVec) -> CVec {
        match word.len() {
            0 => v.clone(),
            1 => self.hatted_slot_f(nu, word[0], v),
            _ => {
                let inner = self.bracket_apply(nu, &word[1..], v);
                let a = self.hatted_slot_f(nu, word[0], &inner);
                let b = self.bracket_apply(nu, &word[1..], &self.hatted_slot_f(nu, word[0], v));
                a.sub(&b)
            }
        }
    }

    /// The vector a word tuple produces from the vacuum.
    pub fn tuple_vector(&self, words: &WordTuple) -> CVec {
        let mut v = CVec::unit(self.n());
        for (nu, w) in words.iter().enumerate() {
            v = self.apply_hatted_word(nu, w, &v);
        }
        v
    }

    /// All word tuples whose per-slot color contents match `shape`.
    pub fn tuples_for_shape(&self, shape: &[Vec<i64>]) -> Vec<WordTuple> {
        let mut out: Vec<WordTuple> = vec![Vec::new()];
        for content in shape {
            let slot_words = seqs_with_content(content);
            let mut next = Vec::new();
            for t in &out {
                for w in &slot_words {
                    let mut t2 = t.clone();
                    t2.push(w.clone());
                    next.push(t2);
                }
            }
            out = next;
        }
        out
    }

    /// Scalar by which the weight-diagonal part of the Casimir acts on a
    /// vector whose slots nu and mu have the given color contents.
    pub fn c0_scalar(&self, d_nu: &[i64], d_mu: &[i64], nu: usize, mu: usize) -> Rat {
        let cas = &self.cas;
        cas.c_ll(nu, mu) - cas.c_deg_lambda(d_mu, nu) - cas.c_deg_lambda(d_nu, mu)
            + cas.c_deg_deg(d_nu, d_mu)
    }

    /// Raising-through-lowering part of the pair action on one word tuple:
    /// nonempty subsequences T of the slot-nu word move to slot mu as an
    /// iterated bracket, weighted by the pairing of T's last letter with the
    /// slot-nu weight shifted by the letters below it.
    pub fn cplus_on_tuple(&self, nu: usize, mu: usize, words: &WordTuple) -> CVec {
        let n = self.n();
        let s = &words[nu];
        let len = s.len();
        let mut out = CVec::zero(n);
        for mask in 1u32..(1u32 << len) {
            let chosen: Vec<usize> = (0..len).filter(|p| mask >> p & 1 == 1).collect();
            let last = *chosen.last().unwrap();
            let ell = s[last];
            let k0 = (ell - 1) as usize;
            let mut coeff = self.cas.c_al(k0, nu);
            for &c in &s[last + 1..] {
                coeff -= self.cas.c_aa(k0, (c - 1) as usize);
            }
            if coeff.is_zero() {
                continue;
            }
            let t_word: Vec<u16> = chosen.iter().map(|&p| s[p]).collect();
            let remainder: Vec<u16> = (0..len)
                .filter(|p| mask >> p & 1 == 0)
                .map(|p| s[p])
                .collect();

            let mut v = CVec::unit(n);
            for sig in 0..n {
                if sig != nu && sig != mu {
                    v = self.apply_hatted_word(sig, &words[sig], &v);
                }
            }
            v = self.apply_hatted_word(mu, &words[mu], &v);
            v = self.bracket_apply(mu, &t_word, &v);
            v = self.apply_hatted_word(nu, &remainder, &v);
            out = out.add(&v.scale(&Scalar::from_rat(coeff)));
        }
        out
    }

    /// Full pair action C0 + C+ + C- through slots nu and mu on an arbitrary
    /// vector. The vector is re-expressed in word-tuple coordinates shape by
    /// shape; failure to do so means it lies outside the module the words
    /// generate.
    pub fn casimir_pair_action(&self, nu: usize, mu: usize, v: &CVec) -> Result<CVec> {
        let n = self.n();
        let rank = self.ctx.rank();
        if nu == mu || nu >= n || mu >= n {
            return Err(Error::InvalidConfig(format!(
                "slot pair ({nu},{mu}) out of range for {n} slots"
            )));
        }
        let mut groups: BTreeMap<Vec<Vec<i64>>, CVec> = BTreeMap::new();
        for (key, c) in v.terms() {
            let shape: Vec<Vec<i64>> = (0..n)
                .map(|s| {
                    let mut d = vec![0i64; rank];
                    for &col in &key.0[s] {
                        d[(col - 1) as usize] += 1;
                    }
                    d
                })
                .collect();
            groups
                .entry(shape)
                .or_insert_with(|| CVec::zero(n))
                .add_term(key.clone(), c.clone());
        }
        let mut out = CVec::zero(n);
        for (shape, part) in groups {
            let c0 = self.c0_scalar(&shape[nu], &shape[mu], nu, mu);
            out = out.add(&part.scale(&Scalar::from_rat(c0)));

            let shape_keys = keys_for_shape(&shape);
            let tuples = self.tuples_for_shape(&shape);
            let rows: Vec<Vec<Scalar>> = tuples
                .iter()
                .map(|t| coords(&self.tuple_vector(t), &shape_keys))
                .collect();
            let target = coords(&part, &shape_keys);
            let a = coords_in_span(&rows, &target).ok_or_else(|| {
                Error::NotInSpan("vector is not generated by lowering words".into())
            })?;
            for (b, t) in tuples.iter().enumerate() {
                if a[b].is_zero() {
                    continue;
                }
                let moved = self
                    .cplus_on_tuple(nu, mu, t)
                    .add(&self.cplus_on_tuple(mu, nu, t));
                out = out.add(&moved.scale(&a[b]));
            }
        }
        Ok(out)
    }
}

/// All keys whose per-slot contents equal `shape`.
fn keys_for_shape(shape: &[Vec<i64>]) -> Vec<CKey> {
    let mut out: Vec<Vec<Vec<u16>>> = vec![Vec::new()];
    for content in shape {
        let slot_seqs = seqs_with_content(content);
        let mut next = Vec::new();
        for k in &out {
            for s in &slot_seqs {
                let mut k2 = k.clone();
                k2.push(s.clone());
                next.push(k2);
            }
        }
        out = next;
    }
    let mut keys: Vec<CKey> = out.into_iter().map(CKey).collect();
    keys.sort();
    keys
}

/// Matrices of the pair actions on the span of `basis`, one square matrix
/// per slot pair nu < mu. Errors if the action leaves the span.
pub fn kz_matrices(kz: &KzContext, basis: &[CVec]) -> Result<ConnectionSet> {
    let n = kz.n();
    let mut out = ConnectionSet::new();
    if basis.is_empty() {
        for nu in 0..n {
            for mu in nu + 1..n {
                out.insert((nu, mu), Mat::zeros(0, 0));
            }
        }
        return Ok(out);
    }
    let keys = ckey_union(basis);
    let rows: Vec<Vec<Scalar>> = basis.iter().map(|b| coords(b, &keys)).collect();
    for nu in 0..n {
        for mu in nu + 1..n {
            let mut cols = Vec::with_capacity(basis.len());
            for b in basis {
                let w = kz.casimir_pair_action(nu, mu, b)?;
                let wc = cvec_coords_checked(&w, &keys)?;
                let col = coords_in_span(&rows, &wc).ok_or_else(|| {
                    Error::NotInSpan("pair action leaves the basis span".into())
                })?;
                cols.push(col);
            }
            out.insert((nu, mu), Mat::from_cols(&cols));
        }
    }
    Ok(out)
}

fn ckey_union(vs: &[CVec]) -> Vec<CKey> {
    let mut set: alloc::collections::BTreeSet<CKey> = alloc::collections::BTreeSet::new();
    for v in vs {
        for (k, _) in v.terms() {
            set.insert(k.clone());
        }
    }
    set.into_iter().collect()
}

fn cvec_coords_checked(v: &CVec, keys: &[CKey]) -> Result<Vec<Scalar>> {
    for (k, _) in v.terms() {
        if !keys.contains(k) {
            return Err(Error::NotInSpan(format!(
                "image contains a key outside the basis support: {k}"
            )));
        }
    }
    Ok(coords(v, keys))
}

/// Infinitesimal pure-braid relations for a family of residue matrices:
/// [O_(nu,mu), O_(nu,kappa) + O_(mu,kappa)] = 0 for distinct slots and
/// [O_(nu,mu), O_(kappa,sigma)] = 0 for disjoint pairs.
pub fn flatness_check(n: usize, mats: &ConnectionSet) -> bool {
    let get = |a: usize, b: usize| -> &Mat {
        let key = if a < b { (a, b) } else { (b, a) };
        &mats[&key]
    };
    for a in 0..n {
        for b in a + 1..n {
            for c in 0..n {
                if c == a || c == b {
                    continue;
                }
                let sum = get(a, c).add(get(b, c));
                if !get(a, b).commutator(&sum).is_zero() {
                    return false;
                }
            }
            for c in 0..n {
                for d in c + 1..n {
                    if c == a || c == b || d == a || d == b {
                        continue;
                    }
                    if !get(a, b).commutator(get(c, d)).is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Pointwise check that a pair action commutes with the diagonal operators
/// (lowering, raising, and the Cartan grading) on the given test vectors.
pub fn diagonal_commutes(kz: &KzContext, nu: usize, mu: usize, tests: &[CVec]) -> Result<bool> {
    let rank = kz.ctx.rank();
    for v in tests {
        for k in 1..=rank as u16 {
            let cf = kz.casimir_pair_action(nu, mu, &kz.ctx.f_action(k, v))?;
            let fc = kz.ctx.f_action(k, &kz.casimir_pair_action(nu, mu, v)?);
            if !cf.sub(&fc).is_zero() {
                return Ok(false);
            }
            let ce = kz.casimir_pair_action(nu, mu, &kz.ctx.e_action(k, v))?;
            let ec = kz.ctx.e_action(k, &kz.casimir_pair_action(nu, mu, v)?);
            if !ce.sub(&ec).is_zero() {
                return Ok(false);
            }
            let ch = kz.casimir_pair_action(nu, mu, &kz.ctx.cartan_action(k, v))?;
            let hc = kz.ctx.cartan_action(k, &kz.casimir_pair_action(nu, mu, v)?);
            if !ch.sub(&hc).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Expansion of (z_s - z_w)/(t_i - z_w) times a basis element, where `i`
/// sits in slot `s` of the key. Splitting the part of the word below `i`
/// transfers a reversed prefix to slot `w`, with the part above `i`
/// following as an omega word.
pub fn marked_factor_expansion(key: &Key, s: usize, i: Idx, w: usize) -> Result<PolyDiff> {
    let n = key.slots();
    if s == w || s >= n || w >= n {
        return Err(Error::InvalidConfig(format!(
            "slot pair ({s},{w}) out of range for {n} slots"
        )));
    }
    let word = &key.0[s];
    let pos = word
        .0
        .iter()
        .position(|&x| x == i)
        .ok_or_else(|| Error::InvalidConfig(format!("index {i} not in slot {s}")))?;
    let head: Vec<Idx> = word.0[..pos].to_vec();
    let tail: Vec<Idx> = word.0[pos + 1..].to_vec();

    let mut out = PolyDiff::zeta(key.clone());
    let mut omega = head.clone();
    omega.push(i);
    let omega = Seq(omega);
    for cut in 0..=tail.len() {
        let i2 = &tail[..cut];
        let i1 = &tail[cut..];
        let base = key.with_slot(s, Seq(i1.to_vec()));
        let mut moved: Vec<Idx> = i2.iter().rev().copied().collect();
        moved.push(i);
        let factor_key = Key::unit(n).with_slot(w, Seq(moved));
        let term = PolyDiff::zeta(base)
            .product(&PolyDiff::zeta(factor_key))
            .omega_times(&omega)?;
        let sign = if cut % 2 == 0 {
            Scalar::from_int(-1)
        } else {
            Scalar::one()
        };
        out = out.add(&term.scale(&sign));
    }
    Ok(out)
}

/// Expansion of (z_s - z_w)/(t_i - t_x) times a basis element, with `i` in
/// slot `s` and `x` in slot `w`. Both sides contribute: prefixes below `i`
/// migrate over `x` into slot `w` and symmetrically for `x` toward slot `s`.
pub fn diagonal_factor_expansion(key: &Key, s: usize, i: Idx, w: usize, x: Idx) -> Result<PolyDiff> {
    let n = key.slots();
    if s == w || s >= n || w >= n {
        return Err(Error::InvalidConfig(format!(
            "slot pair ({s},{w}) out of range for {n} slots"
        )));
    }
    let mut out = PolyDiff::zeta(key.clone());
    out = out.add(&one_sided_diagonal(key, s, i, x)?);
    out = out.add(&one_sided_diagonal(key, w, x, i)?);
    Ok(out)
}

/// The one-sided splitting sum of the diagonal-factor expansion: the part of
/// slot `s` below `i` splits, the reversed inner piece following `i` over to
/// wherever `other` sits.
fn one_sided_diagonal(key: &Key, s: usize, i: Idx, other: Idx) -> Result<PolyDiff> {
    let word = &key.0[s];
    let pos = word
        .0
        .iter()
        .position(|&x| x == i)
        .ok_or_else(|| Error::InvalidConfig(format!("index {i} not in slot {s}")))?;
    let head: Vec<Idx> = word.0[..pos].to_vec();
    let tail: Vec<Idx> = word.0[pos + 1..].to_vec();

    let mut first_word = head.clone();
    first_word.push(i);
    first_word.push(other);
    let first = Seq(first_word);

    let mut out = PolyDiff::zero(key.slots());
    for cut in 0..=tail.len() {
        let i2 = &tail[..cut];
        let i1 = &tail[cut..];
        let base = key.with_slot(s, Seq(i1.to_vec()));
        let mut second_word: Vec<Idx> = i2.iter().rev().copied().collect();
        second_word.push(i);
        let second = Seq(second_word);
        let term = PolyDiff::zeta(base)
            .omega_times(&first)?
            .omega_times(&second)?;
        let sign = if cut % 2 == 0 {
            Scalar::from_int(-1)
        } else {
            Scalar::one()
        };
        out = out.add(&term.scale(&sign));
    }
    Ok(out)
}

/// Residue of the parameter derivative along z_nu at the pole z_nu = z_mu,
/// applied to one basis element. The pole sums range over the letters the
/// key actually carries.
pub fn gm_pair(cas: &Casimir, key: &Key, nu: usize, mu: usize) -> Result<PolyDiff> {
    let n = key.slots();
    if nu == mu || nu >= n || mu >= n {
        return Err(Error::InvalidConfig(format!(
            "slot pair ({nu},{mu}) out of range for {n} slots"
        )));
    }
    let mut g = PolyDiff::zero(n);
    for &i in key.0[nu].iter() {
        let c = Scalar::from_rat(-cas.c_idx_lambda(i, mu));
        if !c.is_zero() {
            g = g.add(&marked_factor_expansion(key, nu, i, mu)?.scale(&c));
        }
    }
    for &x in key.0[mu].iter() {
        let c = Scalar::from_rat(-cas.c_idx_lambda(x, nu));
        if !c.is_zero() {
            g = g.add(&marked_factor_expansion(key, mu, x, nu)?.scale(&c));
        }
    }
    for &i in key.0[nu].iter() {
        for &x in key.0[mu].iter() {
            let c = Scalar::from_rat(cas.c_idx_idx(i, x));
            if !c.is_zero() {
                g = g.add(&diagonal_factor_expansion(key, nu, i, mu, x)?.scale(&c));
            }
        }
    }
    g = g.add(&PolyDiff::zeta(key.clone()).scale(&Scalar::from_rat(cas.c_ll(nu, mu))));
    Ok(g)
}

/// All residues of the parameter derivative along z_nu: one element per
/// other slot mu, so that the derivative is the sum over mu of the returned
/// elements divided by z_nu - z_mu.
pub fn gm_derivative(cas: &Casimir, key: &Key, nu: usize) -> Result<BTreeMap<usize, PolyDiff>> {
    let n = key.slots();
    let mut out = BTreeMap::new();
    for mu in 0..n {
        if mu != nu {
            out.insert(mu, gm_pair(cas, key, nu, mu)?);
        }
    }
    Ok(out)
}

fn gm_pair_linear(cas: &Casimir, a: &PolyDiff, nu: usize, mu: usize) -> Result<PolyDiff> {
    let mut out = PolyDiff::zero(a.slots());
    for (key, c) in a.terms() {
        out = out.add(&gm_pair(cas, key, nu, mu)?.scale(c));
    }
    Ok(out)
}

/// Matrices of the parameter-derivative residues on a family of module
/// vectors expanded over the pool. Errors if a residue leaves the span of
/// the expanded family.
pub fn gm_matrices(
    cas: &Casimir,
    pool: &[Idx],
    basis: &[CVec],
) -> Result<ConnectionSet> {
    let n = cas.n_points();
    let mut out = ConnectionSet::new();
    if basis.is_empty() {
        for nu in 0..n {
            for mu in nu + 1..n {
                out.insert((nu, mu), Mat::zeros(0, 0));
            }
        }
        return Ok(out);
    }
    let expanded: Vec<PolyDiff> = basis
        .iter()
        .map(|v| expand(v, pool))
        .collect::<Result<_>>()?;
    let keys = key_union(&expanded);
    let rows: Vec<Vec<Scalar>> = expanded
        .iter()
        .map(|a| polydiff_coords(a, &keys).unwrap())
        .collect();
    for nu in 0..n {
        for mu in nu + 1..n {
            let mut cols = Vec::with_capacity(expanded.len());
            for a in &expanded {
                let g = gm_pair_linear(cas, a, nu, mu)?;
                let gc = polydiff_coords(&g, &keys).ok_or_else(|| {
                    Error::NotInSpan(
                        "parameter derivative leaves the expanded key support".into(),
                    )
                })?;
                let col = coords_in_span(&rows, &gc).ok_or_else(|| {
                    Error::NotInSpan(
                        "parameter derivative leaves the embedded invariant span".into(),
                    )
                })?;
                cols.push(col);
            }
            out.insert((nu, mu), Mat::from_cols(&cols));
        }
    }
    Ok(out)
}

fn key_union(elems: &[PolyDiff]) -> Vec<Key> {
    let mut set: alloc::collections::BTreeSet<Key> = alloc::collections::BTreeSet::new();
    for a in elems {
        for k in a.keys() {
            set.insert(k.clone());
        }
    }
    set.into_iter().collect()
}

fn polydiff_coords(a: &PolyDiff, keys: &[Key]) -> Option<Vec<Scalar>> {
    let mut out = vec![Scalar::zero(); keys.len()];
    for (k, c) in a.terms() {
        let pos = keys.iter().position(|x| x == k)?;
        out[pos] = c.clone();
    }
    Some(out)
}

/// The relative differential of the finite-pool complex: minus the sum of
/// all pairing-weighted insertions of pool letters.
pub fn aomoto_differential(cas: &Casimir, pool: &[Idx], a: &PolyDiff) -> PolyDiff {
    let hw = HattedWeights { cas: cas.clone() };
    let mut out = PolyDiff::zero(a.slots());
    for &x in pool {
        out = out.sub(&phi(x, &hw, a));
    }
    out
}

/// All keys distributing the letters of `support` over `n` slots in every
/// order.
pub fn keys_on_support(n: usize, support: &[Idx]) -> Vec<Key> {
    let mut out = vec![Key::unit(n)];
    for &x in support {
        let mut next = Vec::new();
        for k in &out {
            for slot in 0..n {
                for pos in 0..=k.0[slot].len() {
                    let mut w = k.0[slot].0.clone();
                    w.insert(pos, x);
                    next.push(k.with_slot(slot, Seq(w)));
                }
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// Rank data for the top step of the finite-pool complex: the differential
/// from elements one letter short of the pool into the full-support level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AomotoReport {
    pub domain: usize,
    pub target: usize,
    pub rank: usize,
    pub cokernel: usize,
}

impl core::fmt::Display for AomotoReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "domain {} -> target {}: rank {}, cokernel {}",
            self.domain, self.target, self.rank, self.cokernel
        )
    }
}

/// Exact rank of the top differential over the pool.
pub fn aomoto_top_rank(cas: &Casimir, pool: &[Idx]) -> AomotoReport {
    let n = cas.n_points();
    let target = keys_on_support(n, pool);
    let mut cols: Vec<Vec<Scalar>> = Vec::new();
    for skip in 0..pool.len() {
        let reduced: Vec<Idx> = pool
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != skip)
            .map(|(_, &x)| x)
            .collect();
        for key in keys_on_support(n, &reduced) {
            let image = aomoto_differential(cas, pool, &PolyDiff::zeta(key));
            cols.push(polydiff_coords(&image, &target).unwrap());
        }
    }
    let domain = cols.len();
    let rank = Mat::from_cols(&cols).rank();
    AomotoReport {
        domain,
        target: target.len(),
        rank,
        cokernel: target.len() - rank,
    }
}

/// Checks that the expanded module vectors stay independent modulo the image
/// of the top differential: their classes inject into its cokernel.
pub fn invariants_inject_into_cokernel(
    cas: &Casimir,
    pool: &[Idx],
    inv: &[CVec],
) -> Result<bool> {
    let n = cas.n_points();
    let target = keys_on_support(n, pool);
    let mut cols: Vec<Vec<Scalar>> = Vec::new();
    for skip in 0..pool.len() {
        let reduced: Vec<Idx> = pool
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != skip)
            .map(|(_, &x)| x)
            .collect();
        for key in keys_on_support(n, &reduced) {
            let image = aomoto_differential(cas, pool, &PolyDiff::zeta(key));
            cols.push(polydiff_coords(&image, &target).unwrap());
        }
    }
    let base_rank = Mat::from_cols(&cols).rank();
    for v in inv {
        let a = expand(v, pool)?;
        cols.push(polydiff_coords(&a, &target).ok_or_else(|| {
            Error::NotInSpan("expanded vector misses the full-support level".into())
        })?);
    }
    let full_rank = Mat::from_cols(&cols).rank();
    Ok(full_rank == base_rank + inv.len())
}

/// Serializable description of one matrix family, used by reports.
pub fn describe_pairs(mats: &ConnectionSet) -> Vec<(String, usize)> {
    mats.iter()
        .map(|((nu, mu), m)| (format!("({},{})", nu + 1, mu + 1), m.rows))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{sl2_context, sl3_context};
    use crate::model::{realize, symbolic_points};
    use crate::ratfunc::{LinForm, RatFunc};
    use crate::rep::invariants;
    use crate::scalar::{rat, rat_int, Poly, Var};

    fn kz_sl2(lams: &[i64], q: Rat) -> KzContext {
        KzContext::new(sl2_context(lams, q).unwrap())
    }

    fn inv_diff(a: Var, b: Var) -> RatFunc {
        let (lf, sc) = LinForm::diff(a, b);
        let mut f = RatFunc::from_rat(sc.recip());
        f.add_den_factor(lf, 1);
        f
    }

    fn ratio_diff(num: (Var, Var), den: (Var, Var)) -> RatFunc {
        let mut f = inv_diff(den.0, den.1);
        f.mul_poly(&Poly::var(num.0).sub(&Poly::var(num.1)));
        f
    }

    #[test]
    fn weight_diagonal_scalar_examples() {
        let kz = kz_sl2(&[3, 4], rat(7, 3));
        let zero = vec![0i64];
        let one = vec![1i64];
        // at the highest weights the scalar is the stored pairing
        assert_eq!(kz.c0_scalar(&zero, &zero, 0, 1), kz.cas.c_ll(0, 1));
        // shifting one side subtracts the root pairing with the other weight
        let shifted = kz.c0_scalar(&one, &zero, 0, 1);
        assert_eq!(shifted, kz.cas.c_ll(0, 1) - rat(7, 3) * rat_int(4));
        // symmetry in the two slots
        assert_eq!(
            kz.c0_scalar(&one, &zero, 0, 1),
            kz.c0_scalar(&zero, &one, 1, 0)
        );
    }

    #[test]
    fn pair_action_base_cases() {
        let kz = kz_sl2(&[3, 4], rat(1, 1));
        // vacuum: no word to move
        let empty: WordTuple = vec![Vec::new(), Vec::new()];
        assert!(kz.cplus_on_tuple(0, 1, &empty).is_zero());
        // single lowering on slot 0 moves with coefficient C(alpha, lambda_0)
        let t = vec![vec![1u16], vec![]];
        let moved = kz.cplus_on_tuple(0, 1, &t);
        let expected = kz
            .tuple_vector(&vec![vec![], vec![1u16]])
            .scale(&Scalar::from_rat(kz.cas.c_al(0, 0)));
        assert!(moved.sub(&expected).is_zero());
    }

    #[test]
    fn pair_action_degree_two_word() {
        // two hatted lowerings on the left slot, lambda = (2, 3):
        // moving one letter right gives (C(a,l) + C(a,l-a)) f 1 (x) f v
        let q = rat(5, 2);
        let kz = kz_sl2(&[2, 3], q.clone());
        let t = vec![vec![1u16, 1u16], vec![1u16]];
        let moved = kz.cplus_on_tuple(0, 1, &t);
        let c_al = kz.cas.c_al(0, 0);
        let c_aa = kz.cas.c_aa(0, 0);
        let coeff = c_al.clone() + (c_al - c_aa);
        let single = kz
            .tuple_vector(&vec![vec![1u16], vec![1u16, 1u16]])
            .scale(&Scalar::from_rat(coeff));
        // the double-letter subsequence contributes through the bracket,
        // which for equal colors collapses to commuting operators: zero
        assert!(moved.sub(&single).is_zero());
    }

    #[test]
    fn transpose_consistency_under_slot_swap() {
        // the mu-to-nu move for weights (l1,l2) equals the nu-to-mu move for
        // weights (l2,l1) after mirroring slots, on all words of degree <= 2
        let q = rat(3, 1);
        let kz_a = kz_sl2(&[2, 3], q.clone());
        let kz_b = kz_sl2(&[3, 2], q);
        for shape in [
            vec![vec![1i64], vec![0i64]],
            vec![vec![0i64], vec![1i64]],
            vec![vec![1i64], vec![1i64]],
            vec![vec![2i64], vec![0i64]],
        ] {
            for t in kz_a.tuples_for_shape(&shape) {
                let cm = kz_a.cplus_on_tuple(1, 0, &t);
                let mirrored: WordTuple = t.iter().rev().cloned().collect();
                let cp = kz_b.cplus_on_tuple(0, 1, &mirrored);
                assert!(mirror_cvec(&cm).sub(&cp).is_zero());
            }
        }
    }

    fn mirror_cvec(v: &CVec) -> CVec {
        let mut out = CVec::zero(v.slots());
        for (k, c) in v.terms() {
            let mirrored: Vec<Vec<u16>> = k.0.iter().rev().cloned().collect();
            out.add_term(CKey(mirrored), c.clone());
        }
        out
    }

    #[test]
    fn kz_matrix_matches_brute_force_tensor_oracle() {
        // V(1) (x) V(1) with explicit 4x4 operators: C = c(e(x)f + f(x)e
        // + h(x)h/2) has eigenvalue -3c/2 on the singlet and c/2 on the
        // weight-zero line of the triplet.
        for c in [rat(1, 1), rat(7, 3)] {
            let kz = kz_sl2(&[1, 1], c.clone());
            let (_deg, inv) = invariants(&kz.ctx).unwrap();
            assert_eq!(inv.len(), 1);
            let mats = kz_matrices(&kz, &inv).unwrap();
            let m = &mats[&(0, 1)];
            assert_eq!(m.rows, 1);
            let expected = Scalar::from_rat(rat(-3, 2) * c.clone());
            assert!(m.a[0][0].sub(&expected).is_zero());

            // weight-zero vector of the triplet: the image of the vacuum
            let w0 = kz.ctx.f_action(1, &CVec::unit(2));
            let mats2 = kz_matrices(&kz, &[w0]).unwrap();
            let expected2 = Scalar::from_rat(rat(1, 2) * c.clone());
            assert!(mats2[&(0, 1)].a[0][0].sub(&expected2).is_zero());
        }
    }

    #[test]
    fn pair_action_commutes_with_diagonal_operators() {
        let kz = kz_sl2(&[1, 1], rat(2, 1));
        let mut tests = Vec::new();
        for shape in [
            vec![vec![0i64], vec![0i64]],
            vec![vec![1i64], vec![0i64]],
            vec![vec![1i64], vec![1i64]],
        ] {
            for t in kz.tuples_for_shape(&shape) {
                let v = kz.tuple_vector(&t);
                if !v.is_zero() {
                    tests.push(v);
                }
            }
        }
        assert!(diagonal_commutes(&kz, 0, 1, &tests).unwrap());

        let kz3 = KzContext::new(sl3_context(&[(1, 0), (0, 1)], rat(1, 1)).unwrap());
        let mut tests3 = Vec::new();
        for shape in [
            vec![vec![1i64, 0], vec![0i64, 0]],
            vec![vec![1i64, 0], vec![0i64, 1]],
        ] {
            for t in kz3.tuples_for_shape(&shape) {
                let v = kz3.tuple_vector(&t);
                if !v.is_zero() {
                    tests3.push(v);
                }
            }
        }
        assert!(diagonal_commutes(&kz3, 0, 1, &tests3).unwrap());
    }

    #[test]
    fn empty_basis_gives_empty_matrices() {
        // odd total weight: no zero-weight degree, so no invariants
        let kz = kz_sl2(&[1, 2], rat(1, 1));
        let (_d, inv) = invariants(&kz.ctx).unwrap();
        assert!(inv.is_empty());
        let mats = kz_matrices(&kz, &inv).unwrap();
        assert_eq!(mats[&(0, 1)].rows, 0);
    }

    #[test]
    fn flatness_on_three_points_and_negative_control() {
        // V(1) (x) V(1) (x) V(2): weight-zero slice of the generated module
        let kz = kz_sl2(&[1, 1, 2], rat(1, 1));
        let slices = crate::rep::submodule_v(&kz.ctx, &[2]);
        let slice = slices
            .iter()
            .find(|s| s.degree == vec![2])
            .expect("weight-zero slice");
        assert_eq!(slice.basis.len(), 4);
        let mats = kz_matrices(&kz, &slice.basis).unwrap();
        assert!(flatness_check(3, &mats));

        let mut bad = mats.clone();
        let m = bad.get_mut(&(0, 1)).unwrap();
        m.a[0][0] = m.a[0][0].add(&Scalar::one());
        assert!(!flatness_check(3, &bad));
    }

    #[test]
    fn marked_factor_expansion_matches_rational_model() {
        // keys with nontrivial parts above and below the chosen letter
        let a = Idx::new(1, 0);
        let b = Idx::new(1, 1);
        let u = Idx::new(1, 2);
        let key = Key(vec![Seq(vec![a, b]), Seq(vec![u])]);
        let pts = symbolic_points(2);
        for (s, i, w) in [(0usize, a, 1usize), (0, b, 1), (1, u, 0)] {
            let lhs = realize(&marked_factor_expansion(&key, s, i, w).unwrap(), &pts).unwrap();
            let factor = ratio_diff(
                (Var::Z(s as u16), Var::Z(w as u16)),
                (Var::T(i), Var::Z(w as u16)),
            );
            let rhs = realize(&PolyDiff::zeta(key.clone()), &pts)
                .unwrap()
                .mul_func(&factor);
            assert!(lhs.eq_exact(&rhs), "factor transfer ({s},{i},{w})");
        }
    }

    #[test]
    fn diagonal_factor_expansion_matches_rational_model() {
        let a = Idx::new(1, 0);
        let b = Idx::new(1, 1);
        let u = Idx::new(1, 2);
        let v = Idx::new(1, 3);
        let key = Key(vec![Seq(vec![a, b]), Seq(vec![u, v])]);
        let pts = symbolic_points(2);
        for (i, x) in [(a, u), (b, v), (a, v), (b, u)] {
            let lhs =
                realize(&diagonal_factor_expansion(&key, 0, i, 1, x).unwrap(), &pts).unwrap();
            let factor = ratio_diff((Var::Z(0), Var::Z(1)), (Var::T(i), Var::T(x)));
            let rhs = realize(&PolyDiff::zeta(key.clone()), &pts)
                .unwrap()
                .mul_func(&factor);
            assert!(lhs.eq_exact(&rhs), "diagonal transfer ({i},{x})");
        }
    }

    #[test]
    fn empty_key_derivative_keeps_only_weight_pairings() {
        let kz = kz_sl2(&[2, 3, 1], rat(4, 7));
        let key = Key::unit(3);
        let ds = gm_derivative(&kz.cas, &key, 0).unwrap();
        for (mu, g) in &ds {
            let expected =
                PolyDiff::zeta(key.clone()).scale(&Scalar::from_rat(kz.cas.c_ll(0, *mu)));
            assert!(g.sub(&expected).is_zero());
        }
    }

    #[test]
    fn single_letter_derivative_values() {
        // one letter in slot 0: the residue toward slot 1 splits into the
        // stay term weighted by C(lambda_0 - alpha, lambda_1) and the
        // transfer term weighted by C(alpha, lambda_1)
        let q = rat(7, 3);
        let kz = kz_sl2(&[1, 1], q.clone());
        let a = Idx::new(1, 0);
        let key = Key(vec![Seq(vec![a]), Seq::empty()]);
        let g = gm_pair(&kz.cas, &key, 0, 1).unwrap();
        let stay = kz.cas.c_ll(0, 1) - kz.cas.c_idx_lambda(a, 1);
        let transfer = kz.cas.c_idx_lambda(a, 1);
        let moved = Key(vec![Seq::empty(), Seq(vec![a])]);
        assert_eq!(g.coeff(&key).as_rat().unwrap(), stay);
        assert_eq!(g.coeff(&moved).as_rat().unwrap(), transfer);
        assert_eq!(g.term_count(), 2);
    }

    #[test]
    fn derivative_residues_sum_to_the_logarithmic_coefficient() {
        // Summing the per-pole residues against 1/(z_nu - z_mu) rebuilds
        // the contraction of the connection form against the lifted vector
        // field, with pole sums over the key's own letters.
        let q = rat(5, 2);
        let kz = kz_sl2(&[2, 3], q.clone());
        let cas = &kz.cas;
        let a = Idx::new(1, 0);
        let b = Idx::new(1, 1);
        let u = Idx::new(1, 2);
        let pts = symbolic_points(2);
        for key in [
            Key(vec![Seq(vec![a, b]), Seq(vec![u])]),
            Key(vec![Seq(vec![a]), Seq(vec![b, u])]),
            Key(vec![Seq(vec![b, a, u]), Seq::empty()]),
        ] {
            let zeta = realize(&PolyDiff::zeta(key.clone()), &pts).unwrap();
            for nu in 0..2usize {
                let mut lhs = crate::model::ConcretePolyDiff::zero();
                for (mu, g) in gm_derivative(cas, &key, nu).unwrap() {
                    let gr = realize(&g, &pts).unwrap();
                    lhs = lhs.add(&gr.mul_func(&inv_diff(
                        Var::Z(nu as u16),
                        Var::Z(mu as u16),
                    )));
                }
                // minus the contraction of the form against the lift
                let mut eta = RatFunc::zero();
                let support = key.support();
                let own: Vec<Idx> = key.0[nu].0.clone();
                for &x in support.iter() {
                    if own.contains(&x) {
                        continue;
                    }
                    let mut f = inv_diff(Var::T(x), Var::Z(nu as u16));
                    f.scale_rat(&cas.c_idx_lambda(x, nu));
                    eta = eta.add(&f);
                }
                for &i in &own {
                    for mu in 0..2usize {
                        if mu == nu {
                            continue;
                        }
                        let mut f = inv_diff(Var::T(i), Var::Z(mu as u16));
                        f.scale_rat(&-cas.c_idx_lambda(i, mu));
                        eta = eta.add(&f);
                        for &x in key.0[mu].0.iter() {
                            let mut f = inv_diff(Var::T(i), Var::T(x));
                            f.scale_rat(&cas.c_idx_idx(i, x));
                            eta = eta.add(&f);
                        }
                    }
                }
                for mu in 0..2usize {
                    if mu == nu {
                        continue;
                    }
                    let mut f = inv_diff(Var::Z(nu as u16), Var::Z(mu as u16));
                    f.scale_rat(&cas.c_ll(nu, mu));
                    eta = eta.add(&f);
                }
                let rhs = zeta.mul_func(&eta);
                assert!(lhs.eq_exact(&rhs), "slot {nu} of {key}");
            }
        }
    }

    #[test]
    fn derivative_matrices_match_pair_action_matrices() {
        // two marked points, both weights fundamental: the 1-dim invariant
        // line gives matching scalars through both pipelines
        for c in [rat(1, 1), rat(7, 3)] {
            let kz = kz_sl2(&[1, 1], c.clone());
            let (_d, inv) = invariants(&kz.ctx).unwrap();
            let pool = [Idx::new(1, 0)];
            let gm = gm_matrices(&kz.cas, &pool, &inv).unwrap();
            let kzm = kz_matrices(&kz, &inv).unwrap();
            assert_eq!(gm[&(0, 1)].a[0][0], kzm[&(0, 1)].a[0][0]);
            let expected = Scalar::from_rat(rat(-3, 2) * c);
            assert!(gm[&(0, 1)].a[0][0].sub(&expected).is_zero());
        }

        // anti-fundamental pair for the rank-two case
        let kz3 = KzContext::new(sl3_context(&[(1, 0), (0, 1)], rat(1, 1)).unwrap());
        let (_d, inv3) = invariants(&kz3.ctx).unwrap();
        assert_eq!(inv3.len(), 1);
        let pool3 = [Idx::new(1, 0), Idx::new(2, 0)];
        let gm3 = gm_matrices(&kz3.cas, &pool3, &inv3).unwrap();
        let kzm3 = kz_matrices(&kz3, &inv3).unwrap();
        assert_eq!(gm3[&(0, 1)].a[0][0], kzm3[&(0, 1)].a[0][0]);
    }

    #[test]
    fn differential_of_unit_is_minus_the_insertion_form() {
        let kz = kz_sl2(&[2, 3], rat(1, 2));
        let pool = [Idx::new(1, 0), Idx::new(1, 1)];
        let d1 = aomoto_differential(&kz.cas, &pool, &PolyDiff::unit(2));
        for &x in &pool {
            for nu in 0..2usize {
                let key = Key::unit(2).with_slot(nu, Seq(vec![x]));
                let expected = -kz.cas.c_idx_lambda(x, nu);
                assert_eq!(d1.coeff(&key).as_rat().unwrap(), expected);
            }
        }
        assert_eq!(d1.term_count(), 4);
    }

    #[test]
    fn top_rank_and_invariant_injection() {
        // four fundamental sl(2) points: two-dimensional invariant space
        // injects into the cokernel of the top differential
        let kz = kz_sl2(&[1, 1, 1, 1], rat(1, 1));
        let pool = [Idx::new(1, 0), Idx::new(1, 1)];
        let report = aomoto_top_rank(&kz.cas, &pool);
        assert_eq!(report.domain, 8);
        assert_eq!(report.target, 20);
        assert_eq!(report.rank, 8);
        assert_eq!(report.cokernel, 12);
        let (_d, inv) = invariants(&kz.ctx).unwrap();
        assert_eq!(inv.len(), 2);
        assert!(invariants_inject_into_cokernel(&kz.cas, &pool, &inv).unwrap());
    }

    #[test]
    fn support_key_enumeration_counts() {
        let a = Idx::new(1, 0);
        let b = Idx::new(1, 1);
        assert_eq!(keys_on_support(2, &[a]).len(), 2);
        assert_eq!(keys_on_support(2, &[a, b]).len(), 6);
        assert_eq!(keys_on_support(4, &[a, b]).len(), 20);
        // all keys distinct
        let keys = keys_on_support(3, &[a, b]);
        let set: alloc::collections::BTreeSet<_> = keys.iter().cloned().collect();
        assert_eq!(set.len(), keys.len());
    }
}

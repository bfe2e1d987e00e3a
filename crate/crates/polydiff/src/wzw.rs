//! Level-bounded subspaces of invariants.
//!
//! The raising operator weighted by the marked points acts on a form by
//! contracting, for every letter set realizing the color word of the longest
//! positive root, the set onto its final coordinate through iterated diagonal
//! residues, and then taking residues at the marked points with the point
//! values as weights.  Applying the operator `level + 1` times cuts out a
//! subspace of the invariants, computed here by exact linear algebra.
//!
//! The same subspace has a dual description through restriction: a realized
//! invariant lies in it exactly when, after contracting `level + 1` disjoint
//! root sequences, the result vanishes on the locus where the surviving
//! coordinates collide.  Both descriptions are implemented and can be
//! compared span against span.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::cartan::Casimir;
use crate::connection::{kz_matrices, KzContext};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::model::{realize, ConcretePolyDiff};
use crate::ratfunc::{common_numerators, RPoint, RatFunc};
use crate::rep::{expand, invariants, CVec, RepCtx};
use crate::scalar::{rat, rat_int, Mono, Poly, Rat, Scalar, Var};
use crate::seq::{Idx, Key, Seq};
use crate::shuffle::PolyDiff;

/// Configuration of the level-bounded subspace for one group type and one
/// tuple of marked points.
#[derive(Clone, Debug)]
pub struct LevelConfig {
    /// Level bound; the weighted raising operator is applied `level + 1`
    /// times.
    pub level: u32,
    /// Color word of the longest positive root, head first.  Raising
    /// sequences realize exactly this word; its length is one less than the
    /// Coxeter number.
    pub root_colors: Vec<u16>,
    /// Dual Coxeter number of the type, entering the matching Casimir scale.
    pub dual_coxeter: i64,
    /// Marked points, one per slot.
    pub points: Vec<RPoint>,
}

impl LevelConfig {
    pub fn new(
        level: u32,
        root_colors: Vec<u16>,
        dual_coxeter: i64,
        points: Vec<RPoint>,
    ) -> Result<Self> {
        if root_colors.is_empty() {
            return Err(Error::InvalidConfig("empty root color word".into()));
        }
        if dual_coxeter < 1 {
            return Err(Error::InvalidConfig(
                "dual Coxeter number must be positive".into(),
            ));
        }
        if points.is_empty() {
            return Err(Error::InvalidConfig("no marked points".into()));
        }
        Ok(LevelConfig {
            level,
            root_colors,
            dual_coxeter,
            points,
        })
    }

    /// Rank-one type: the longest root is the single simple root.
    pub fn type_a1(level: u32, points: Vec<RPoint>) -> Result<Self> {
        Self::new(level, vec![1], 2, points)
    }

    /// Rank-two type A: the longest root is the sum of the two simple roots.
    pub fn type_a2(level: u32, points: Vec<RPoint>) -> Result<Self> {
        Self::new(level, vec![1, 2], 3, points)
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Length of a raising sequence plus one.
    pub fn coxeter(&self) -> usize {
        self.root_colors.len() + 1
    }

    /// Casimir scaling matched to the level: `1 / (dual Coxeter + level)`.
    pub fn casimir_scale(&self) -> Rat {
        rat_int(1) / rat_int(self.dual_coxeter + i64::from(self.level))
    }
}

/// Distinct nonzero rational marked points summing to zero: `1, .., n - 1`
/// and `-n(n-1)/2`.  A single slot gets the only balanced choice, `0`.
pub fn standard_fiber(n: usize) -> Vec<RPoint> {
    if n <= 1 {
        return vec![RPoint::C(Rat::zero())];
    }
    let mut pts: Vec<RPoint> = (1..n as i64).map(|k| RPoint::C(rat_int(k))).collect();
    let total: i64 = (1..n as i64).sum();
    pts.push(RPoint::C(rat_int(-total)));
    pts
}

/// A pool with `content[k]` letters of color `k + 1`.
pub fn standard_pool(content: &[i64]) -> Vec<Idx> {
    let mut pool = Vec::new();
    for (k, &m) in content.iter().enumerate() {
        for a in 0..m {
            pool.push(Idx::new(k as u16 + 1, a as u16));
        }
    }
    pool
}

fn point_scalar(p: &RPoint) -> Scalar {
    match p {
        RPoint::V(v) => Scalar::var(*v),
        RPoint::C(c) => Scalar::from_rat(c.clone()),
    }
}

fn support_of(a: &PolyDiff) -> BTreeSet<Idx> {
    let mut s = BTreeSet::new();
    for key in a.keys() {
        s.extend(key.support());
    }
    s
}

/// The contracted form must keep no diagonal pole in its surviving
/// coordinate; otherwise the residues at the marked points do not account
/// for the full residue content and the raising operator is not defined on
/// the input.
fn diagonal_pole_scan(w: &PolyDiff, x: Idx) -> Result<()> {
    let mut others = support_of(w);
    others.remove(&x);
    for j in others {
        if !w.residue_diag(x, j).is_zero() {
            return Err(Error::PoleObstruction(format!(
                "contracted form keeps a diagonal pole of {x} against {j}"
            )));
        }
    }
    Ok(())
}

/// One component of the longest-root raising operator: contract `word` onto
/// its tail coordinate by iterated diagonal residues, check that no diagonal
/// pole survives there, and take the residue at the marked point of slot
/// `nu`.
pub fn highest_root_action(nu: usize, zeta: &PolyDiff, word: &Seq) -> Result<PolyDiff> {
    if word.is_empty() {
        return Err(Error::InvalidConfig("empty raising sequence".into()));
    }
    if !word.is_repetition_free() {
        return Err(Error::RepeatedIndex(format!("raising sequence {word}")));
    }
    if nu >= zeta.slots() {
        return Err(Error::InvalidConfig(format!(
            "slot {nu} out of range for {} slots",
            zeta.slots()
        )));
    }
    let contracted = zeta.iterated_residue(word);
    let x = word.tail().expect("nonempty word");
    diagonal_pole_scan(&contracted, x)?;
    Ok(contracted.residue_at_marked(x, nu))
}

/// The same component through the rational model: realize, take the chain of
/// diagonal residues, then the residue at the marked point of slot `nu`.
pub fn highest_root_rational(
    nu: usize,
    zeta: &PolyDiff,
    word: &Seq,
    points: &[RPoint],
) -> Result<ConcretePolyDiff> {
    if word.is_empty() {
        return Err(Error::InvalidConfig("empty raising sequence".into()));
    }
    let mut cur = realize(zeta, points)?;
    let v = &word.0;
    for k in 0..v.len() - 1 {
        cur = cur.residue(v[k], &RPoint::V(Var::T(v[k + 1])))?;
    }
    cur.residue(v[v.len() - 1], &points[nu])
}

/// All repetition-free sequences over `letters` whose color word equals
/// `colors`, grouped by underlying letter set.
fn color_word_sequences(
    letters: &BTreeSet<Idx>,
    colors: &[u16],
) -> BTreeMap<BTreeSet<Idx>, Vec<Seq>> {
    let mut out: BTreeMap<BTreeSet<Idx>, Vec<Seq>> = BTreeMap::new();
    let mut cur: Vec<Idx> = Vec::new();
    collect_sequences(letters, colors, 0, &mut cur, &mut out);
    out
}

fn collect_sequences(
    letters: &BTreeSet<Idx>,
    colors: &[u16],
    pos: usize,
    cur: &mut Vec<Idx>,
    out: &mut BTreeMap<BTreeSet<Idx>, Vec<Seq>>,
) {
    if pos == colors.len() {
        let set: BTreeSet<Idx> = cur.iter().copied().collect();
        out.entry(set).or_default().push(Seq(cur.clone()));
        return;
    }
    for &l in letters {
        if l.color == colors[pos] && !cur.contains(&l) {
            cur.push(l);
            collect_sequences(letters, colors, pos + 1, cur, out);
            cur.pop();
        }
    }
}

/// Apply the weighted raising operator once.  `weights[nu]` multiplies the
/// residue at the marked point of slot `nu`.  Distinct orderings of one
/// letter set must contract to the same weighted sum; a mismatch means the
/// color word does not determine the operator on this input.
fn weighted_raising(zeta: &PolyDiff, colors: &[u16], weights: &[Scalar]) -> Result<PolyDiff> {
    let n = zeta.slots();
    if weights.len() != n {
        return Err(Error::InvalidConfig(format!(
            "{} weights for {n} slots",
            weights.len()
        )));
    }
    let support = support_of(zeta);
    let mut out = PolyDiff::zero(n);
    for (_, seqs) in color_word_sequences(&support, colors) {
        let mut piece: Option<PolyDiff> = None;
        for word in &seqs {
            let contracted = zeta.iterated_residue(word);
            let x = word.tail().expect("nonempty word");
            diagonal_pole_scan(&contracted, x)?;
            let mut p = PolyDiff::zero(n);
            for (nu, w) in weights.iter().enumerate() {
                p = p.add(&contracted.residue_at_marked(x, nu).scale(w));
            }
            match &piece {
                None => piece = Some(p),
                Some(q) => {
                    if !q.sub(&p).is_zero() {
                        return Err(Error::Unsupported(format!(
                            "orderings of the raising set of {word} disagree"
                        )));
                    }
                }
            }
        }
        if let Some(p) = piece {
            out = out.add(&p);
        }
    }
    Ok(out)
}

fn plain_add(map: &mut BTreeMap<(Key, Idx), Scalar>, k: (Key, Idx), c: &Scalar) {
    let cur = map.remove(&k).unwrap_or_else(Scalar::zero);
    let s = cur.add(c);
    if !s.is_zero() {
        map.insert(k, s);
    }
}

fn remove_letter(key: &Key, slot: usize, pos: usize) -> Key {
    let mut w = key.0[slot].0.clone();
    w.remove(pos);
    key.with_slot(slot, Seq(w))
}

/// Minus the residue at infinity of `t_x * omega` in the coordinate of the
/// letter `x`, term by term.  Terms that lose a pole factor keep a bare
/// differential instead; those remainders are tracked per key and letter and
/// have to cancel in total, since a leftover would mean `omega` kept a
/// diagonal pole in `x`.  Terms whose key does not contain `x` carry no
/// differential in that coordinate and contribute nothing.
fn weighted_infinity_residue(
    omega: &PolyDiff,
    x: Idx,
    weights: &[Scalar],
) -> Result<PolyDiff> {
    let n = omega.slots();
    let mut clean = PolyDiff::zero(n);
    let mut plain: BTreeMap<(Key, Idx), Scalar> = BTreeMap::new();
    for (key, c) in omega.terms() {
        let Some(nu) = key.slot_of(x) else {
            continue;
        };
        let word: Vec<Idx> = key.0[nu].0.clone();
        let j = word.iter().position(|&l| l == x).expect("slot contains x");
        let m = word.len();
        if m == 1 {
            // t/(t - z) leaves z after the sign of the residue at infinity
            clean.add_term(remove_letter(key, nu, 0), c.mul(&weights[nu]));
            continue;
        }
        if j > 0 {
            // an interior or tail letter sits between two pole factors; the
            // residue frees its predecessor from the shared pole
            let removed = remove_letter(key, nu, j);
            plain_add(&mut plain, (removed, word[j - 1]), &c.neg());
            continue;
        }
        // head letter: the residue leaves the following coordinate as a
        // factor, which telescopes down the slot to the marked point
        let removed = remove_letter(key, nu, 0);
        clean.add_term(removed.clone(), c.mul(&weights[nu]));
        for &l in &removed.0[nu].0 {
            plain_add(&mut plain, (removed.clone(), l), c);
        }
    }
    if let Some(((key, l), _)) = plain.iter().next() {
        return Err(Error::PoleObstruction(format!(
            "weighting by {x} leaves a bare differential of {l} on {key}"
        )));
    }
    Ok(clean)
}

/// One application of the weighted raising operator, computed two ways.
#[derive(Clone, Debug)]
pub struct RaisingImage {
    /// Sum of marked-point residues, weighted by the point values.
    pub value: PolyDiff,
    /// Weighted residue at infinity of each contracted letter set.
    pub infinity_route: PolyDiff,
}

impl RaisingImage {
    pub fn routes_agree(&self) -> bool {
        self.value.sub(&self.infinity_route).is_zero()
    }
}

/// The raising operator weighted by the marked points, on one form.
pub fn e_operator(cfg: &LevelConfig, zeta: &PolyDiff) -> Result<RaisingImage> {
    if zeta.slots() != cfg.n() {
        return Err(Error::InvalidConfig(format!(
            "form has {} slots, configuration has {}",
            zeta.slots(),
            cfg.n()
        )));
    }
    let weights: Vec<Scalar> = cfg.points.iter().map(point_scalar).collect();
    let value = weighted_raising(zeta, &cfg.root_colors, &weights)?;
    let mut infinity_route = PolyDiff::zero(cfg.n());
    for (_, seqs) in color_word_sequences(&support_of(zeta), &cfg.root_colors) {
        let word = &seqs[0];
        let contracted = zeta.iterated_residue(word);
        let x = word.tail().expect("nonempty word");
        infinity_route =
            infinity_route.add(&weighted_infinity_residue(&contracted, x, &weights)?);
    }
    Ok(RaisingImage {
        value,
        infinity_route,
    })
}

/// Exact fiber data of the level-bounded subspace inside the invariants.
#[derive(Clone, Debug)]
pub struct LevelFiber {
    /// Zero-weight content per color, as determined by the weights.
    pub content: Vec<i64>,
    /// Basis of the invariants.
    pub invariant_basis: Vec<CVec>,
    /// Basis of the kernel of the iterated raising operator, in coordinates
    /// relative to `invariant_basis`.
    pub kernel_coords: Vec<Vec<Scalar>>,
}

impl LevelFiber {
    pub fn invariant_dim(&self) -> usize {
        self.invariant_basis.len()
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel_coords.len()
    }
}

fn key_union(images: &[PolyDiff]) -> Vec<Key> {
    let mut set: BTreeSet<Key> = BTreeSet::new();
    for im in images {
        for key in im.keys() {
            set.insert(key.clone());
        }
    }
    set.into_iter().collect()
}

fn kernel_of_images(images: &[PolyDiff], dim: usize) -> Vec<Vec<Scalar>> {
    let keys = key_union(images);
    if keys.is_empty() {
        return Mat::zeros(1, dim).kernel();
    }
    let rows: Vec<Vec<Scalar>> = keys
        .iter()
        .map(|key| images.iter().map(|im| im.coeff(key)).collect())
        .collect();
    Mat::from_rows(rows).kernel()
}

/// Kernel of `level + 1` applications of the weighted raising operator on
/// the invariants of the module attached to `ctx`, over the marked points of
/// `cfg`.  Symbolic points are supported; the cost of exact elimination then
/// grows quickly with the number of slots.
pub fn wzw_fiber(ctx: &RepCtx, cfg: &LevelConfig) -> Result<LevelFiber> {
    let (content, basis) = invariants(ctx)?;
    let pool = standard_pool(&content);
    if basis.is_empty() {
        return Ok(LevelFiber {
            content,
            invariant_basis: basis,
            kernel_coords: Vec::new(),
        });
    }
    let weights: Vec<Scalar> = cfg.points.iter().map(point_scalar).collect();
    let mut images = Vec::with_capacity(basis.len());
    for v in &basis {
        let mut w = expand(v, &pool)?;
        for _ in 0..=cfg.level {
            w = weighted_raising(&w, &cfg.root_colors, &weights)?;
        }
        images.push(w);
    }
    let kernel_coords = kernel_of_images(&images, basis.len());
    Ok(LevelFiber {
        content,
        invariant_basis: basis,
        kernel_coords,
    })
}

/// One diagonal-restriction test: a family of pairwise disjoint raising
/// sequences and whether the restricted realization vanished.
#[derive(Clone, Debug)]
pub struct CriterionRow {
    pub family: Vec<Seq>,
    pub vanishes: bool,
}

/// All families of `count` pairwise disjoint sequences from `pool` realizing
/// the root color word.  Families are unordered; every ordering of each
/// member sequence appears as its own family member choice.
fn disjoint_families(pool: &[Idx], colors: &[u16], count: usize) -> Vec<Vec<Seq>> {
    let letters: BTreeSet<Idx> = pool.iter().copied().collect();
    let seqs: Vec<Seq> = color_word_sequences(&letters, colors)
        .into_values()
        .flatten()
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    pick_disjoint(&seqs, count, 0, &mut chosen, &mut out);
    out
}

fn pick_disjoint(
    seqs: &[Seq],
    count: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<Seq>>,
) {
    if chosen.len() == count {
        out.push(chosen.iter().map(|&i| seqs[i].clone()).collect());
        return;
    }
    for i in start..seqs.len() {
        let disjoint = chosen
            .iter()
            .all(|&j| seqs[j].iter().all(|l| !seqs[i].contains(*l)));
        if disjoint {
            chosen.push(i);
            pick_disjoint(seqs, count, i + 1, chosen, out);
            chosen.pop();
        }
    }
}

fn contract_family(
    base: &ConcretePolyDiff,
    family: &[Seq],
) -> Result<ConcretePolyDiff> {
    let mut cur = base.clone();
    for word in family {
        let v = &word.0;
        for k in 0..v.len() - 1 {
            cur = cur.residue(v[k], &RPoint::V(Var::T(v[k + 1])))?;
        }
    }
    let anchor = family[0].tail().expect("nonempty word");
    for word in &family[1..] {
        let x = word.tail().expect("nonempty word");
        cur = cur.subst_coeffs(x, &RPoint::V(Var::T(anchor)))?;
    }
    Ok(cur)
}

/// Restrict the realized form to the collision locus of every family of
/// `level + 1` disjoint raising sequences.  The form lies in the
/// level-bounded subspace exactly when every row vanishes.
pub fn criterion_table(
    pool: &[Idx],
    cfg: &LevelConfig,
    zeta: &PolyDiff,
) -> Result<Vec<CriterionRow>> {
    let families = disjoint_families(pool, &cfg.root_colors, cfg.level as usize + 1);
    let base = realize(zeta, &cfg.points)?;
    let mut rows = Vec::with_capacity(families.len());
    for family in families {
        let cur = contract_family(&base, &family)?;
        rows.push(CriterionRow {
            vanishes: cur.is_zero(),
            family,
        });
    }
    Ok(rows)
}

/// Diagonal vanishing test for membership in the level-bounded subspace.
pub fn ramadas_criterion(pool: &[Idx], cfg: &LevelConfig, zeta: &PolyDiff) -> Result<bool> {
    Ok(criterion_table(pool, cfg, zeta)?
        .iter()
        .all(|r| r.vanishes))
}

/// Basis, in invariant coordinates, of the subspace cut out by all diagonal
/// vanishing conditions.  Returns the invariant basis together with the
/// solution space of the exact linear system collecting every monomial
/// coefficient of every restricted component.
pub fn ramadas_locus(ctx: &RepCtx, cfg: &LevelConfig) -> Result<(Vec<CVec>, Vec<Vec<Scalar>>)> {
    let (content, basis) = invariants(ctx)?;
    let pool = standard_pool(&content);
    let d = basis.len();
    if d == 0 {
        return Ok((basis, Vec::new()));
    }
    let mut realized = Vec::with_capacity(d);
    for v in &basis {
        realized.push(realize(&expand(v, &pool)?, &cfg.points)?);
    }
    let families = disjoint_families(&pool, &cfg.root_colors, cfg.level as usize + 1);
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for family in &families {
        let restricted: Vec<ConcretePolyDiff> = realized
            .iter()
            .map(|r| contract_family(r, family))
            .collect::<Result<_>>()?;
        let mut supports: BTreeSet<BTreeSet<Idx>> = BTreeSet::new();
        for r in &restricted {
            supports.extend(r.terms.keys().cloned());
        }
        for s in supports {
            let fs: Vec<RatFunc> = restricted.iter().map(|r| r.coeff(&s)).collect();
            let (_, nums) = common_numerators(&fs);
            let mut monos: BTreeSet<Mono> = BTreeSet::new();
            for p in &nums {
                monos.extend(p.terms.keys().cloned());
            }
            for m in monos {
                rows.push(
                    nums.iter()
                        .map(|p| {
                            Scalar::from_rat(
                                p.terms.get(&m).cloned().unwrap_or_else(Rat::zero),
                            )
                        })
                        .collect(),
                );
            }
        }
    }
    let mat = if rows.is_empty() {
        Mat::zeros(1, d)
    } else {
        Mat::from_rows(rows)
    };
    Ok((basis, mat.kernel()))
}

/// Do two coordinate families span the same subspace.
pub fn same_span(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> bool {
    fn rank_of(rows: &[Vec<Scalar>]) -> usize {
        if rows.is_empty() {
            0
        } else {
            Mat::from_rows(rows.to_vec()).rank()
        }
    }
    let ra = rank_of(a);
    if ra != rank_of(b) {
        return false;
    }
    let mut all: Vec<Vec<Scalar>> = a.to_vec();
    all.extend_from_slice(b);
    rank_of(&all) == ra
}

fn jet01(c: &Scalar, v: Var) -> Result<(Scalar, Scalar)> {
    if c.den().deg_in(v) != 0 {
        return Err(Error::Unsupported(
            "jet parameter appears in a denominator".into(),
        ));
    }
    let parts = c.num().univariate_in(v);
    let a0 = parts.get(&0).cloned().unwrap_or_else(Poly::zero);
    let a1 = parts.get(&1).cloned().unwrap_or_else(Poly::zero);
    Ok((
        Scalar::fraction(a0, c.den().clone()),
        Scalar::fraction(a1, c.den().clone()),
    ))
}

fn jet_matrices(images: &[PolyDiff], dim: usize, svar: Var) -> Result<(Mat, Mat)> {
    let keys = key_union(images);
    if keys.is_empty() {
        return Ok((Mat::zeros(1, dim), Mat::zeros(1, dim)));
    }
    let mut rows0 = Vec::with_capacity(keys.len());
    let mut rows1 = Vec::with_capacity(keys.len());
    for key in &keys {
        let mut r0 = Vec::with_capacity(dim);
        let mut r1 = Vec::with_capacity(dim);
        for im in images {
            let (a0, a1) = jet01(&im.coeff(key), svar)?;
            r0.push(a0);
            r1.push(a1);
        }
        rows0.push(r0);
        rows1.push(r1);
    }
    Ok((Mat::from_rows(rows0), Mat::from_rows(rows1)))
}

fn raise_iterated(
    w: &PolyDiff,
    colors: &[u16],
    weights: &[Scalar],
    times: u32,
) -> Result<PolyDiff> {
    let mut cur = w.clone();
    for _ in 0..times {
        cur = weighted_raising(&cur, colors, weights)?;
    }
    Ok(cur)
}

/// First-order flatness of the level-bounded subbundle along every marked
/// point direction at the configuration's base point: transporting a kernel
/// vector with the Casimir connection keeps it in the kernel to first order,
/// and the kernel dimension is stable under a small rational shift of each
/// point.  `cas` fixes the connection; the scaling that matches the level is
/// `cfg.casimir_scale()`.
pub fn level_flatness_first_order(
    ctx: &RepCtx,
    cas: &Casimir,
    cfg: &LevelConfig,
) -> Result<bool> {
    let (content, basis) = invariants(ctx)?;
    let pool = standard_pool(&content);
    let d = basis.len();
    if d == 0 {
        return Ok(true);
    }
    let n = cfg.n();
    let base: Vec<Rat> = cfg
        .points
        .iter()
        .map(|p| match p {
            RPoint::C(c) => Ok(c.clone()),
            RPoint::V(_) => Err(Error::InvalidConfig(
                "flatness check needs rational marked points".into(),
            )),
        })
        .collect::<Result<_>>()?;
    let expanded: Vec<PolyDiff> = basis
        .iter()
        .map(|v| expand(v, &pool))
        .collect::<Result<_>>()?;
    let kz = KzContext::new(cas.clone());
    let mats = kz_matrices(&kz, &basis)?;
    let svar = Var::Aux(40_000);
    let times = cfg.level + 1;
    for nu in 0..n {
        let mut weights: Vec<Scalar> = base
            .iter()
            .map(|c| Scalar::from_rat(c.clone()))
            .collect();
        weights[nu] = weights[nu].add(&Scalar::var(svar));
        let images: Vec<PolyDiff> = expanded
            .iter()
            .map(|w| raise_iterated(w, &cfg.root_colors, &weights, times))
            .collect::<Result<_>>()?;
        let (p0, p1) = jet_matrices(&images, d, svar)?;
        let kernel = p0.kernel();
        let mut a_mat = Mat::zeros(d, d);
        for mu in 0..n {
            if mu == nu {
                continue;
            }
            let dz = &base[nu] - &base[mu];
            if dz.is_zero() {
                return Err(Error::InvalidConfig("marked points collide".into()));
            }
            let pair = mats[&(nu.min(mu), nu.max(mu))].clone();
            a_mat = a_mat.add(&pair.scale(&Scalar::from_rat(dz.recip())));
        }
        for c in &kernel {
            let t1 = p1.mul_vec(c);
            let t0 = p0.mul_vec(&a_mat.mul_vec(c));
            if !t1.iter().zip(&t0).all(|(u, v)| u.add(v).is_zero()) {
                return Ok(false);
            }
        }
        // dimension stability at a nearby shifted configuration
        let mut shifted: Vec<Scalar> = base
            .iter()
            .map(|c| Scalar::from_rat(c.clone()))
            .collect();
        shifted[nu] = shifted[nu].add(&Scalar::from_rat(rat(1, 7)));
        let moved: Vec<PolyDiff> = expanded
            .iter()
            .map(|w| raise_iterated(w, &cfg.root_colors, &shifted, times))
            .collect::<Result<_>>()?;
        if d - kernel_of_images(&moved, d).len() != p0.rank() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{sl2_context, sl3_context};
    use crate::model::symbolic_points;
    use crate::rep::pool_e;
    use crate::shuffle::nested_bracket;

    fn ctx_of(cas: &Casimir) -> RepCtx {
        RepCtx::new(cas.cartan.clone(), cas.weights.clone())
    }

    fn sl2_ctx(lams: &[i64]) -> RepCtx {
        ctx_of(&sl2_context(lams, rat_int(1)).unwrap())
    }

    #[test]
    fn standard_fiber_is_balanced() {
        for n in 2..=5 {
            let pts = standard_fiber(n);
            assert_eq!(pts.len(), n);
            let vals: Vec<Rat> = pts
                .iter()
                .map(|p| match p {
                    RPoint::C(c) => c.clone(),
                    _ => unreachable!(),
                })
                .collect();
            let sum: Rat = vals.iter().fold(Rat::zero(), |a, b| a + b);
            assert!(sum.is_zero());
            for (i, v) in vals.iter().enumerate() {
                assert!(!v.is_zero());
                for w in &vals[i + 1..] {
                    assert_ne!(v, w);
                }
            }
        }
    }

    #[test]
    fn constants_are_killed() {
        let cfg = LevelConfig::type_a1(1, standard_fiber(2)).unwrap();
        let one = PolyDiff::unit(2);
        let image = e_operator(&cfg, &one).unwrap();
        assert!(image.value.is_zero());
        assert!(image.infinity_route.is_zero());
        let word = Seq::single(Idx::new(1, 0));
        assert!(highest_root_action(0, &one, &word).unwrap().is_zero());
    }

    #[test]
    fn single_color_components_assemble_the_raising_action() {
        let ctx = sl2_ctx(&[1, 2]);
        for word in [&[1u16][..], &[1, 1], &[1, 1, 1]] {
            // the pool must match the content exactly, otherwise expanding
            // the shorter image counts surplus liftings
            let pool = standard_pool(&[word.len() as i64]);
            let v = ctx.apply_f_word(word, &CVec::unit(2));
            if v.is_zero() {
                continue;
            }
            let w = expand(&v, &pool).unwrap();
            let lhs = expand(&ctx.e_action(1, &v), &pool).unwrap();
            let mut marked = PolyDiff::zero(2);
            let mut at_infinity = PolyDiff::zero(2);
            for &i in &pool {
                let seq = Seq::single(i);
                for nu in 0..2 {
                    marked = marked.add(&highest_root_action(nu, &w, &seq).unwrap());
                }
                at_infinity = at_infinity.add(&w.residue_at_infinity(i));
            }
            assert!(lhs.sub(&marked).is_zero());
            assert!(lhs.sub(&at_infinity).is_zero());
            assert!(lhs.sub(&pool_e(&pool, 1, &w)).is_zero());
        }
    }

    #[test]
    fn two_color_contraction_matches_the_bracket() {
        let cas = sl3_context(&[(1, 0), (0, 1)], rat_int(1)).unwrap();
        let ctx = ctx_of(&cas);
        let pool = [Idx::new(1, 0), Idx::new(2, 0)];
        let word = Seq(vec![pool[0], pool[1]]);
        let e1 = |a: &PolyDiff| pool_e(&pool, 1, a);
        let e2 = |a: &PolyDiff| pool_e(&pool, 2, a);
        for fw in [&[][..], &[1], &[2], &[1, 2], &[2, 1]] {
            let v = ctx.apply_f_word(fw, &CVec::unit(2));
            if v.is_zero() {
                continue;
            }
            let w = expand(&v, &pool).unwrap();
            let mut marked = PolyDiff::zero(2);
            for nu in 0..2 {
                marked = marked.add(&highest_root_action(nu, &w, &word).unwrap());
            }
            let contracted = w.iterated_residue(&word);
            let at_infinity = contracted.residue_at_infinity(pool[1]);
            let bracket = nested_bracket(&[&e1, &e2], &w);
            assert!(marked.sub(&at_infinity).is_zero());
            // a nested commutator of length N reproduces the residue route
            // up to the sign (-1)^(N-1); for N = 2 it is the negative
            assert!(marked.add(&bracket).is_zero());
        }
    }

    #[test]
    fn image_of_the_two_point_singlet_is_point_linear() {
        let ctx = sl2_ctx(&[1, 1]);
        let (content, basis) = invariants(&ctx).unwrap();
        assert_eq!(content, vec![1]);
        assert_eq!(basis.len(), 1);
        let pool = standard_pool(&content);
        let i = pool[0];
        let w = expand(&basis[0], &pool).unwrap();
        let c0 = w.coeff(&Key(vec![Seq::single(i), Seq::empty()]));
        let c1 = w.coeff(&Key(vec![Seq::empty(), Seq::single(i)]));
        assert!(!c0.is_zero());
        assert!(c0.add(&c1).is_zero());
        let cfg = LevelConfig::type_a1(1, symbolic_points(2)).unwrap();
        let image = e_operator(&cfg, &w).unwrap();
        assert!(image.routes_agree());
        let z0 = Scalar::var(Var::Z(0));
        let z1 = Scalar::var(Var::Z(1));
        let expected =
            PolyDiff::unit(2).scale(&c0.mul(&z0).add(&c1.mul(&z1)));
        assert!(image.value.sub(&expected).is_zero());
    }

    #[test]
    fn rational_model_confirms_the_contraction() {
        let cas = sl3_context(&[(1, 0), (0, 1)], rat_int(1)).unwrap();
        let ctx = ctx_of(&cas);
        let pool = [Idx::new(1, 0), Idx::new(2, 0)];
        let word = Seq(vec![pool[0], pool[1]]);
        let pts = symbolic_points(2);
        let v = ctx.apply_f_word(&[1, 2], &CVec::unit(2));
        let w = expand(&v, &pool).unwrap();
        for nu in 0..2 {
            let formal = highest_root_action(nu, &w, &word).unwrap();
            let lhs = realize(&formal, &pts).unwrap();
            let rhs = highest_root_rational(nu, &w, &word, &pts).unwrap();
            assert!(lhs.eq_exact(&rhs));
        }
    }

    #[test]
    fn kernel_dimensions_follow_the_fusion_rules() {
        let cases: [(&[i64], u32, usize, usize); 5] = [
            (&[1, 1], 1, 1, 1),
            (&[2, 2], 1, 1, 0),
            (&[2, 2], 2, 1, 1),
            (&[1, 1, 2], 1, 1, 0),
            (&[1, 1, 1, 1], 1, 2, 1),
        ];
        for (lams, level, inv_dim, ker_dim) in cases {
            let ctx = sl2_ctx(lams);
            let cfg = LevelConfig::type_a1(level, standard_fiber(lams.len())).unwrap();
            let fiber = wzw_fiber(&ctx, &cfg).unwrap();
            assert_eq!(fiber.invariant_dim(), inv_dim, "invariants for {lams:?}");
            assert_eq!(
                fiber.kernel_dim(),
                ker_dim,
                "kernel for {lams:?} at level {level}"
            );
        }
    }

    #[test]
    fn criterion_cuts_out_the_kernel() {
        let cases: [(&[i64], u32); 4] =
            [(&[1, 1], 1), (&[2, 2], 1), (&[1, 1, 2], 1), (&[1, 1, 1, 1], 1)];
        for (lams, level) in cases {
            let ctx = sl2_ctx(lams);
            let cfg = LevelConfig::type_a1(level, standard_fiber(lams.len())).unwrap();
            let fiber = wzw_fiber(&ctx, &cfg).unwrap();
            let (basis, locus) = ramadas_locus(&ctx, &cfg).unwrap();
            assert_eq!(basis.len(), fiber.invariant_dim());
            assert!(
                same_span(&fiber.kernel_coords, &locus),
                "kernel and restriction locus differ for {lams:?}"
            );
            let pool = standard_pool(&fiber.content);
            for coords in &fiber.kernel_coords {
                let mut w = PolyDiff::zero(lams.len());
                for (v, c) in fiber.invariant_basis.iter().zip(coords) {
                    w = w.add(&expand(v, &pool).unwrap().scale(c));
                }
                assert!(ramadas_criterion(&pool, &cfg, &w).unwrap());
            }
            if fiber.kernel_dim() < fiber.invariant_dim() {
                let outside: Vec<PolyDiff> = fiber
                    .invariant_basis
                    .iter()
                    .map(|v| expand(v, &pool).unwrap())
                    .collect();
                let failing = outside.iter().any(|w| {
                    !ramadas_criterion(&pool, &cfg, w).unwrap()
                });
                assert!(failing, "some invariant must violate the criterion");
            }
        }
    }

    #[test]
    fn unsymmetrized_input_is_rejected() {
        let a = Idx::new(1, 0);
        let b = Idx::new(1, 1);
        let cfg = LevelConfig::type_a1(0, standard_fiber(1)).unwrap();
        let zeta = PolyDiff::zeta1(Seq(vec![a, b]));
        assert!(matches!(
            e_operator(&cfg, &zeta),
            Err(Error::PoleObstruction(_))
        ));
    }

    #[test]
    fn saturated_level_keeps_every_invariant() {
        // once the level reaches the largest coordinate of the weights, the
        // iterated raising operator vanishes on all invariants
        let ctx = sl2_ctx(&[1, 1, 1, 1]);
        let cfg = LevelConfig::type_a1(2, standard_fiber(4)).unwrap();
        let fiber = wzw_fiber(&ctx, &cfg).unwrap();
        assert_eq!(fiber.invariant_dim(), 2);
        assert_eq!(fiber.kernel_dim(), 2);
    }

    #[test]
    fn flatness_holds_at_the_matching_scale() {
        let lams = [1i64, 1, 1, 1];
        let cfg = LevelConfig::type_a1(1, standard_fiber(4)).unwrap();
        let cas = sl2_context(&lams, cfg.casimir_scale()).unwrap();
        let ctx = ctx_of(&cas);
        assert!(level_flatness_first_order(&ctx, &cas, &cfg).unwrap());
        let wrong = sl2_context(&lams, rat_int(1)).unwrap();
        assert!(!level_flatness_first_order(&ctx, &wrong, &cfg).unwrap());
    }
}

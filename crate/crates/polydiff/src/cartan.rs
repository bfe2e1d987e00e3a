//! Cartan matrices, dominant weights, and invariant-pairing data.
//!
//! A pairing is determined by one number per color, `q[k]`, subject to the
//! compatibility `q[k] a[k][l] = q[l] a[l][k]`, together with weight-weight
//! values that are either supplied or derived by expressing each weight in
//! the root basis.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{rat_int, Rat, Scalar};
use crate::seq::Idx;

/// A generalized Cartan matrix with integer entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanData {
    a: Vec<Vec<i64>>,
}

impl CartanData {
    pub fn new(a: Vec<Vec<i64>>) -> Result<Self> {
        let r = a.len();
        if r == 0 {
            return Err(Error::InvalidConfig("empty Cartan matrix".into()));
        }
        for row in &a {
            if row.len() != r {
                return Err(Error::InvalidConfig("Cartan matrix is not square".into()));
            }
        }
        for k in 0..r {
            if a[k][k] != 2 {
                return Err(Error::InvalidConfig(format!(
                    "diagonal entry a[{k}][{k}] = {} != 2",
                    a[k][k]
                )));
            }
            for l in 0..r {
                if k != l {
                    if a[k][l] > 0 {
                        return Err(Error::InvalidConfig(format!(
                            "positive off-diagonal entry a[{k}][{l}]"
                        )));
                    }
                    if (a[k][l] == 0) != (a[l][k] == 0) {
                        return Err(Error::InvalidConfig(format!(
                            "zero pattern of a[{k}][{l}] is not symmetric"
                        )));
                    }
                }
            }
        }
        Ok(CartanData { a })
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    /// Entry by 0-based row/column.
    pub fn entry(&self, k: usize, l: usize) -> i64 {
        self.a[k][l]
    }

    /// Entry by 1-based colors.
    pub fn by_color(&self, k: u16, l: u16) -> i64 {
        self.a[(k - 1) as usize][(l - 1) as usize]
    }

    pub fn type_a1() -> Self {
        CartanData::new(alloc::vec![alloc::vec![2]]).unwrap()
    }

    pub fn type_a2() -> Self {
        CartanData::new(alloc::vec![alloc::vec![2, -1], alloc::vec![-1, 2]]).unwrap()
    }
}

/// Dominant integral weights attached to the marked points: `lambda[nu][k]`
/// is the value of the nu-th weight on the k-th coroot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weights {
    lambda: Vec<Vec<i64>>,
}

impl Weights {
    pub fn new(lambda: Vec<Vec<i64>>, rank: usize) -> Result<Self> {
        for (nu, row) in lambda.iter().enumerate() {
            if row.len() != rank {
                return Err(Error::InvalidConfig(format!(
                    "weight {nu} has {} entries, expected {rank}",
                    row.len()
                )));
            }
            if row.iter().any(|&v| v < 0) {
                return Err(Error::InvalidConfig(format!(
                    "weight {nu} is not dominant"
                )));
            }
        }
        Ok(Weights { lambda })
    }

    pub fn n_points(&self) -> usize {
        self.lambda.len()
    }

    /// lambda_nu on the k-th coroot (0-based k).
    pub fn value(&self, nu: usize, k: usize) -> i64 {
        self.lambda[nu][k]
    }

    pub fn row(&self, nu: usize) -> &[i64] {
        &self.lambda[nu]
    }

    /// Total value of all weights on the k-th coroot.
    pub fn total(&self, k: usize) -> i64 {
        self.lambda.iter().map(|row| row[k]).sum()
    }
}

/// An invariant pairing: `q[k]` scales the k-th root direction and `p` holds
/// the weight-weight values (derived when not supplied).
#[derive(Clone, Debug)]
pub struct Casimir {
    pub cartan: CartanData,
    pub weights: Weights,
    q: Vec<Rat>,
    p: Vec<Vec<Rat>>,
}

impl Casimir {
    pub fn new(
        cartan: CartanData,
        weights: Weights,
        q: Vec<Rat>,
        p: Option<Vec<Vec<Rat>>>,
    ) -> Result<Self> {
        let r = cartan.rank();
        if q.len() != r {
            return Err(Error::InvalidConfig(format!(
                "{} scaling entries for rank {r}",
                q.len()
            )));
        }
        if q.iter().any(|x| x.is_zero()) {
            return Err(Error::InvalidConfig("zero scaling entry".into()));
        }
        for k in 0..r {
            for l in 0..r {
                if &q[k] * rat_int(cartan.entry(k, l)) != &q[l] * rat_int(cartan.entry(l, k)) {
                    return Err(Error::InvalidConfig(format!(
                        "scaling does not symmetrize the Cartan matrix at ({k},{l})"
                    )));
                }
            }
        }
        let n = weights.n_points();
        let p = match p {
            Some(p) => {
                if p.len() != n || p.iter().any(|row| row.len() != n) {
                    return Err(Error::InvalidConfig(
                        "weight-pairing table has wrong shape".into(),
                    ));
                }
                for nu in 0..n {
                    for mu in 0..n {
                        if p[nu][mu] != p[mu][nu] {
                            return Err(Error::InvalidConfig(
                                "weight-pairing table is not symmetric".into(),
                            ));
                        }
                    }
                }
                p
            }
            None => derive_weight_pairings(&cartan, &weights, &q)?,
        };
        Ok(Casimir {
            cartan,
            weights,
            q,
            p,
        })
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    pub fn n_points(&self) -> usize {
        self.weights.n_points()
    }

    /// C(alpha_k, alpha_l), 0-based.
    pub fn c_aa(&self, k: usize, l: usize) -> Rat {
        &self.q[k] * rat_int(self.cartan.entry(k, l))
    }

    /// C(alpha_k, lambda_nu).
    pub fn c_al(&self, k: usize, nu: usize) -> Rat {
        &self.q[k] * rat_int(self.weights.value(nu, k))
    }

    /// C(lambda_nu, lambda_mu).
    pub fn c_ll(&self, nu: usize, mu: usize) -> Rat {
        self.p[nu][mu].clone()
    }

    /// q^C(alpha_k) = half of C(alpha_k, alpha_k).
    pub fn q_alpha(&self, k: usize) -> Rat {
        self.q[k].clone()
    }

    /// Pair table entries by 1-based colors of pool indices.
    pub fn c_idx_idx(&self, x: Idx, y: Idx) -> Rat {
        self.c_aa((x.color - 1) as usize, (y.color - 1) as usize)
    }

    pub fn c_idx_lambda(&self, x: Idx, nu: usize) -> Rat {
        self.c_al((x.color - 1) as usize, nu)
    }

    /// C(alpha_d, alpha_e) for multidegrees in the root basis.
    pub fn c_deg_deg(&self, d: &[i64], e: &[i64]) -> Rat {
        let r = self.rank();
        let mut acc = Rat::zero();
        for k in 0..r {
            for l in 0..r {
                acc += self.c_aa(k, l) * rat_int(d[k]) * rat_int(e[l]);
            }
        }
        acc
    }

    pub fn c_deg_lambda(&self, d: &[i64], nu: usize) -> Rat {
        (0..self.rank())
            .map(|k| self.c_al(k, nu) * rat_int(d[k]))
            .sum()
    }

    /// q^C(alpha_d) = half of C(alpha_d, alpha_d).
    pub fn q_deg(&self, d: &[i64]) -> Rat {
        self.c_deg_deg(d, d) / rat_int(2)
    }

    /// Color content of a list of pool indices, as a multidegree.
    pub fn content(&self, xs: impl IntoIterator<Item = Idx>) -> Vec<i64> {
        let mut d = alloc::vec![0i64; self.rank()];
        for x in xs {
            d[(x.color - 1) as usize] += 1;
        }
        d
    }
}

fn derive_weight_pairings(
    cartan: &CartanData,
    weights: &Weights,
    q: &[Rat],
) -> Result<Vec<Vec<Rat>>> {
    let r = cartan.rank();
    let n = weights.n_points();
    // express each weight in the root basis: B x = (C(alpha_k, lambda_nu))_k
    // with B[k][l] = C(alpha_k, alpha_l)
    let b = Mat::from_rows(
        (0..r)
            .map(|k| {
                (0..r)
                    .map(|l| Scalar::from_rat(&q[k] * rat_int(cartan.entry(k, l))))
                    .collect()
            })
            .collect(),
    );
    let rhs_cols: Vec<Vec<Scalar>> = (0..n)
        .map(|nu| {
            (0..r)
                .map(|k| Scalar::from_rat(&q[k] * rat_int(weights.value(nu, k))))
                .collect()
        })
        .collect();
    let rhs = Mat::from_cols(&rhs_cols);
    let x = b.solve(&rhs).ok_or_else(|| {
        Error::SingularSystem(
            "root pairing matrix is singular; supply the weight pairings explicitly".into(),
        )
    })?;
    let mut p = alloc::vec![alloc::vec![Rat::zero(); n]; n];
    for nu in 0..n {
        for mu in 0..n {
            // C(lambda_nu, lambda_mu) = sum_k x[k][nu] C(alpha_k, lambda_mu)
            let mut acc = Rat::zero();
            for k in 0..r {
                let coef = x.a[k][nu]
                    .as_rat()
                    .ok_or_else(|| Error::SingularSystem("non-constant solution".into()))?;
                acc += coef * &q[k] * rat_int(weights.value(mu, k));
            }
            p[nu][mu] = acc;
        }
    }
    for nu in 0..n {
        for mu in 0..n {
            if p[nu][mu] != p[mu][nu] {
                return Err(Error::SingularSystem(
                    "derived weight pairings are not symmetric".into(),
                ));
            }
        }
    }
    Ok(p)
}

/// Action weights read off a Cartan matrix and marked-point weights: the
/// insertion coefficient at slot nu uses lambda_nu on the coroot of the
/// inserted color, and the interaction term is the Cartan pairing of colors.
#[derive(Clone, Debug)]
pub struct ColorWeights {
    pub cartan: CartanData,
    pub weights: Weights,
}

impl crate::phi::PhiWeights for ColorWeights {
    fn p(&self, slot: usize, x: Idx) -> Scalar {
        Scalar::from_int(self.weights.value(slot, (x.color - 1) as usize))
    }

    fn c(&self, x: Idx, y: Idx) -> Scalar {
        Scalar::from_int(self.cartan.by_color(x.color, y.color))
    }
}

/// The same weights rescaled by an invariant pairing: insertion coefficients
/// become pairing values, so the generators carry their scaling with them.
#[derive(Clone, Debug)]
pub struct HattedWeights {
    pub cas: Casimir,
}

impl crate::phi::PhiWeights for HattedWeights {
    fn p(&self, slot: usize, x: Idx) -> Scalar {
        Scalar::from_rat(self.cas.c_idx_lambda(x, slot))
    }

    fn c(&self, x: Idx, y: Idx) -> Scalar {
        Scalar::from_rat(self.cas.c_idx_idx(x, y))
    }
}

/// Standard contexts used across the test suites.
pub fn sl2_context(lambdas: &[i64], q: Rat) -> Result<Casimir> {
    let cartan = CartanData::type_a1();
    let weights = Weights::new(lambdas.iter().map(|&l| alloc::vec![l]).collect(), 1)?;
    Casimir::new(cartan, weights, alloc::vec![q], None)
}

pub fn sl3_context(lambdas: &[(i64, i64)], q: Rat) -> Result<Casimir> {
    let cartan = CartanData::type_a2();
    let weights = Weights::new(
        lambdas.iter().map(|&(a, b)| alloc::vec![a, b]).collect(),
        2,
    )?;
    Casimir::new(cartan, weights, alloc::vec![q.clone(), q], None)
}

pub fn describe_weight(row: &[i64]) -> String {
    let parts: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
    format!("({})", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn rejects_bad_matrices() {
        assert!(CartanData::new(alloc::vec![alloc::vec![1]]).is_err());
        assert!(CartanData::new(alloc::vec![
            alloc::vec![2, 1],
            alloc::vec![1, 2]
        ])
        .is_err());
        assert!(CartanData::new(alloc::vec![
            alloc::vec![2, -1],
            alloc::vec![0, 2]
        ])
        .is_err());
    }

    #[test]
    fn sl2_pairings() {
        // q = c/2 convention: C(alpha, alpha) = 2q, C(alpha, lambda) = q lambda,
        // C(lambda, mu) = q lambda mu / 2
        let cas = sl2_context(&[3, 2], rat(1, 2)).unwrap();
        assert_eq!(cas.c_aa(0, 0), rat_int(1));
        assert_eq!(cas.c_al(0, 0), rat(3, 2));
        assert_eq!(cas.c_ll(0, 1), rat(3, 2));
        assert_eq!(cas.c_ll(0, 0), rat(9, 4));
        assert_eq!(cas.q_alpha(0), rat(1, 2));
    }

    #[test]
    fn sl3_fundamental_weight_pairings() {
        // with q = 1: C = the symmetric form with alpha^2 = 2; the
        // fundamental weights then pair by the inverse Cartan matrix:
        // (w1,w1) = 2/3, (w1,w2) = 1/3, (w2,w2) = 2/3
        let cas = sl3_context(&[(1, 0), (0, 1)], rat_int(1)).unwrap();
        assert_eq!(cas.c_ll(0, 0), rat(2, 3));
        assert_eq!(cas.c_ll(0, 1), rat(1, 3));
        assert_eq!(cas.c_ll(1, 1), rat(2, 3));
    }

    #[test]
    fn content_and_degree_pairings() {
        let cas = sl3_context(&[(1, 1)], rat_int(1)).unwrap();
        let d = alloc::vec![1, 1];
        // C(alpha_1 + alpha_2, alpha_1 + alpha_2) = 2 - 1 - 1 + 2 = 2
        assert_eq!(cas.c_deg_deg(&d, &d), rat_int(2));
        assert_eq!(cas.q_deg(&d), rat_int(1));
        assert_eq!(cas.c_deg_lambda(&d, 0), rat_int(2));
    }

    #[test]
    fn asymmetric_scaling_rejected() {
        let cartan = CartanData::type_a2();
        let weights = Weights::new(alloc::vec![alloc::vec![1, 0]], 2).unwrap();
        assert!(Casimir::new(
            cartan,
            weights,
            alloc::vec![rat_int(1), rat_int(2)],
            None
        )
        .is_err());
    }
}

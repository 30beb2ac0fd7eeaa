//! Intersection numbers of divisor classes on an `n`-fold.
//!
//! The top intersection form is a symmetric `n`-linear form on the divisor
//! lattice, stored sparsely over sorted multi-indices. Curve classes are
//! paired with divisors through an explicit pairing matrix.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{bilinear, Matrix};
use crate::rational::{fmt_rational, int, parse_rational, QVector, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionTensor {
    dim: usize,
    rank: usize,
    entries: BTreeMap<Vec<usize>, Rational>,
}

impl IntersectionTensor {
    /// Builds a tensor from `(multi-index, value)` pairs. Indices are sorted
    /// before storage; zero values are dropped.
    pub fn new(
        dim: usize,
        rank: usize,
        entries: impl IntoIterator<Item = (Vec<usize>, Rational)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (mut idx, val) in entries {
            if idx.len() != dim {
                return Err(Error::ArityMismatch { expected: dim, found: idx.len() });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= rank) {
                return Err(Error::RankMismatch { expected: rank, found: bad + 1 });
            }
            idx.sort_unstable();
            if map.contains_key(&idx) {
                return Err(Error::Inconsistent(format!("duplicate tensor entry {idx:?}")));
            }
            if !val.is_zero() {
                map.insert(idx, val);
            }
        }
        Ok(IntersectionTensor { dim, rank, entries: map })
    }

    /// Rank-two threefold tensor from the four numbers `L1^3, L1^2 L2, L1 L2^2, L2^3`.
    pub fn rank_two_threefold(l111: i64, l112: i64, l122: i64, l222: i64) -> Self {
        Self::new(
            3,
            2,
            [
                (vec![0, 0, 0], int(l111)),
                (vec![0, 0, 1], int(l112)),
                (vec![0, 1, 1], int(l122)),
                (vec![1, 1, 1], int(l222)),
            ],
        )
        .expect("valid rank-two indices")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Value on a multi-index in any order; unlisted entries are zero.
    pub fn entry(&self, idx: &[usize]) -> Rational {
        let mut key = idx.to_vec();
        key.sort_unstable();
        self.entries.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Rational)> {
        self.entries.iter()
    }

    /// Replaces one entry; used to build perturbed copies.
    pub fn set_entry(&mut self, idx: &[usize], value: Rational) {
        let mut key = idx.to_vec();
        key.sort_unstable();
        if value.is_zero() {
            self.entries.remove(&key);
        } else {
            self.entries.insert(key, value);
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorJson {
    dim: usize,
    rank: usize,
    entries: BTreeMap<String, String>,
}

impl Serialize for IntersectionTensor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = self
            .entries
            .iter()
            .map(|(k, v)| {
                let key = k.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
                (key, fmt_rational(v))
            })
            .collect();
        TensorJson { dim: self.dim, rank: self.rank, entries }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntersectionTensor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = TensorJson::deserialize(d)?;
        let mut entries = Vec::with_capacity(raw.entries.len());
        for (k, v) in &raw.entries {
            let idx = k
                .split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| D::Error::custom(format!("tensor key {k:?}: {e}")))?;
            let val = parse_rational(v).map_err(D::Error::custom)?;
            entries.push((idx, val));
        }
        IntersectionTensor::new(raw.dim, raw.rank, entries).map_err(D::Error::custom)
    }
}

/// A divisor class in the basis `L_1, ..., L_rho`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivisorClass(pub QVector);

impl DivisorClass {
    pub fn from_ints(xs: &[i64]) -> Self {
        DivisorClass(QVector::from_ints(xs))
    }

    /// The basis divisor `L_{i+1}`.
    pub fn basis(rank: usize, i: usize) -> Self {
        DivisorClass(QVector::unit(rank, i))
    }

    pub fn zero(rank: usize) -> Self {
        DivisorClass(QVector::zeros(rank))
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &QVector {
        &self.0
    }

    pub fn scale(&self, c: &Rational) -> Self {
        DivisorClass(self.0.scale(c))
    }

    pub fn neg(&self) -> Self {
        DivisorClass(-&self.0)
    }

    /// `self + c * other`
    pub fn add_scaled(&self, c: &Rational, other: &DivisorClass) -> Self {
        DivisorClass(self.0.add_scaled(c, &other.0))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl std::fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A curve class together with the matrix `P[i][j] = L_i . l_j` that pairs
/// it against divisors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveClass {
    coords: QVector,
    pairing: Matrix,
}

impl CurveClass {
    pub fn new(coords: QVector, pairing: Matrix) -> Result<Self> {
        let rho = pairing.len();
        coords.check_len(rho)?;
        crate::linalg::matches_shape(&pairing, rho, rho)?;
        Ok(CurveClass { coords, pairing })
    }

    pub fn coords(&self) -> &QVector {
        &self.coords
    }

    pub fn pairing(&self) -> &Matrix {
        &self.pairing
    }
}

/// The pairing `[[0,1],[1,0]]` of a rank-two Fano threefold, where
/// `{l_2, l_1}` is dual to `{L_1, L_2}`.
pub fn swap_pairing() -> Matrix {
    vec![QVector::from_ints(&[0, 1]), QVector::from_ints(&[1, 0])]
}

pub fn identity_pairing(rank: usize) -> Matrix {
    (0..rank).map(|i| QVector::unit(rank, i)).collect()
}

/// Multilinear evaluation of the top intersection form.
pub fn eval_product(tensor: &IntersectionTensor, classes: &[&DivisorClass]) -> Result<Rational> {
    if classes.len() != tensor.dim {
        return Err(Error::ArityMismatch { expected: tensor.dim, found: classes.len() });
    }
    for c in classes {
        if c.rank() != tensor.rank {
            return Err(Error::RankMismatch { expected: tensor.rank, found: c.rank() });
        }
    }
    let mut total = Rational::zero();
    let mut idx = vec![0usize; tensor.dim];
    expand(tensor, classes, &mut idx, 0, Rational::from_integer(1.into()), &mut total);
    Ok(total)
}

fn expand(
    tensor: &IntersectionTensor,
    classes: &[&DivisorClass],
    idx: &mut Vec<usize>,
    depth: usize,
    coeff: Rational,
    total: &mut Rational,
) {
    if depth == classes.len() {
        let e = tensor.entry(idx);
        if !e.is_zero() {
            *total += coeff * e;
        }
        return;
    }
    for i in 0..tensor.rank {
        let c = &classes[depth].0[i];
        if c.is_zero() {
            continue;
        }
        idx[depth] = i;
        expand(tensor, classes, idx, depth + 1, &coeff * c, total);
    }
}

/// `D^n` for an `n`-fold.
pub fn self_intersection(tensor: &IntersectionTensor, d: &DivisorClass) -> Result<Rational> {
    let classes = vec![d; tensor.dim];
    eval_product(tensor, &classes)
}

/// Coefficients `c_i = L^2 . L_i` so that `L^2 . S = sum c_i s_i` for `S = sum s_i L_i`.
pub fn restriction_form(tensor: &IntersectionTensor, l: &DivisorClass) -> Result<Vec<Rational>> {
    if tensor.dim != 3 {
        return Err(Error::InvalidDimension(format!(
            "restriction forms need a threefold, got dimension {}",
            tensor.dim
        )));
    }
    (0..tensor.rank)
        .map(|i| eval_product(tensor, &[l, l, &DivisorClass::basis(tensor.rank, i)]))
        .collect()
}

/// `(alpha, beta)` with `L^2 . (n L_1 + m L_2) = alpha n + beta m`.
pub fn surface_restriction_form(
    tensor: &IntersectionTensor,
    l: &DivisorClass,
) -> Result<(Rational, Rational)> {
    if tensor.rank != 2 {
        return Err(Error::RankMismatch { expected: 2, found: tensor.rank });
    }
    let mut form = restriction_form(tensor, l)?.into_iter();
    let alpha = form.next().expect("rank two");
    let beta = form.next().expect("rank two");
    Ok((alpha, beta))
}

/// `D^T P C`
pub fn pair(d: &DivisorClass, c: &CurveClass) -> Result<Rational> {
    let rho = c.pairing.len();
    if d.rank() != rho {
        return Err(Error::RankMismatch { expected: rho, found: d.rank() });
    }
    Ok(bilinear(&c.pairing, &d.0, &c.coords))
}

/// Coefficients `D . l_j` of the linear form `C -> D . C` in the curve basis.
pub fn curve_form(d: &DivisorClass, pairing: &Matrix) -> Result<Vec<Rational>> {
    let rho = pairing.len();
    (0..rho)
        .map(|j| pair(d, &CurveClass::new(QVector::unit(rho, j), pairing.clone())?))
        .collect()
}

/// `-K_X = mu_2 L_1 + mu_1 L_2` from the lengths of the two extremal rays.
pub fn anticanonical_from_rays(mu1: i64, mu2: i64) -> Result<DivisorClass> {
    for mu in [mu1, mu2] {
        if !(1..=3).contains(&mu) {
            return Err(Error::InvalidLength(mu));
        }
    }
    Ok(DivisorClass::from_ints(&[mu2, mu1]))
}

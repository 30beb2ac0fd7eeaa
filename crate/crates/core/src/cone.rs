//! Rational polyhedral cones held in double description.
//!
//! A [`Cone`] always carries both its generators and its facet normals. The
//! conversion between the two runs the double description method
//! (incremental insertion of halfspaces) on exact rationals.

use serde::{Deserialize, Serialize};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{nullspace, reduce_mod, rref, span_rank};
use crate::rational::{QVector, Rational};

#[derive(Clone, PartialEq, Eq)]
pub struct Cone {
    ambient_rank: usize,
    generators: Vec<QVector>,
    facets: Vec<QVector>,
    lineality_rank: usize,
    /// Basis of the orthogonal complement of the linear span.
    equations: Vec<QVector>,
}

/// Result of [`minimal_supported_face`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportedFace {
    pub face: Cone,
    pub codim: usize,
    /// Indices into the parent cone's facet list of the normals vanishing on the vector.
    pub tight_facets: Vec<usize>,
}

impl Cone {
    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn generators(&self) -> &[QVector] {
        &self.generators
    }

    pub fn facets(&self) -> &[QVector] {
        &self.facets
    }

    pub fn lineality_rank(&self) -> usize {
        self.lineality_rank
    }

    /// Dimension of the linear span.
    pub fn dim(&self) -> usize {
        self.ambient_rank - self.equations.len()
    }

    pub fn is_pointed(&self) -> bool {
        self.lineality_rank == 0
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    /// Interior of a full-dimensional cone: every facet normal is strictly positive.
    pub fn contains_in_interior(&self, v: &QVector) -> Result<bool> {
        v.check_len(self.ambient_rank)?;
        Ok(self.is_full_dimensional() && self.facets.iter().all(|f| f.dot(v).is_positive()))
    }

    pub fn to_json(&self) -> ConeJson {
        ConeJson {
            ambient_rank: self.ambient_rank,
            generators: Some(self.generators.clone()),
            facets: Some(self.facets.clone()),
        }
    }
}

impl std::fmt::Debug for Cone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Cone")
            .field("ambient_rank", &self.ambient_rank)
            .field("generators", &self.generators)
            .field("facets", &self.facets)
            .field("lineality_rank", &self.lineality_rank)
            .finish()
    }
}

/// Wire form of a cone. Either description may be omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeJson {
    pub ambient_rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<QVector>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facets: Option<Vec<QVector>>,
}

impl ConeJson {
    /// Rebuilds the cone. When both descriptions are present they must agree.
    pub fn into_cone(self) -> Result<Cone> {
        match (self.generators, self.facets) {
            (Some(g), f) => {
                let cone = cone_from_generators(&g, self.ambient_rank)?;
                if let Some(f) = f {
                    let other = cone_from_facets(&f, self.ambient_rank)?;
                    if other.facets != cone.facets || other.equations != cone.equations {
                        return Err(Error::Inconsistent(
                            "generators and facets describe different cones".into(),
                        ));
                    }
                }
                Ok(cone)
            }
            (None, Some(f)) => cone_from_facets(&f, self.ambient_rank),
            (None, None) => cone_from_generators(&[], self.ambient_rank),
        }
    }
}

/// V-representation of `{y : c . y >= 0 for every constraint c}`: a basis of
/// the lineality space and the extreme rays modulo it.
fn dual_description(constraints: &[QVector], n: usize) -> (Vec<QVector>, Vec<QVector>) {
    let mut lineality: Vec<QVector> = (0..n).map(|i| QVector::unit(n, i)).collect();
    let mut rays: Vec<QVector> = Vec::new();
    let mut processed: Vec<QVector> = Vec::new();

    for a in constraints.iter().filter(|a| !a.is_zero()) {
        if let Some(k) = lineality.iter().position(|b| !a.dot(b).is_zero()) {
            let mut pivot = lineality.remove(k);
            if a.dot(&pivot).is_negative() {
                pivot = -&pivot;
            }
            let ap = a.dot(&pivot);
            for v in lineality.iter_mut().chain(rays.iter_mut()) {
                let c = a.dot(v) / &ap;
                if !c.is_zero() {
                    *v = v.add_scaled(&-c, &pivot).primitive();
                }
            }
            rays.push(pivot.primitive());
            processed.push(a.clone());
            continue;
        }

        let values: Vec<Rational> = rays.iter().map(|r| a.dot(r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        if neg.is_empty() {
            processed.push(a.clone());
            continue;
        }

        let full_rank = n - lineality.len();
        let zero_sets: Vec<Vec<usize>> = rays
            .iter()
            .map(|r| (0..processed.len()).filter(|&j| processed[j].dot(r).is_zero()).collect())
            .collect();

        let mut next: Vec<QVector> = (0..rays.len())
            .filter(|&i| !values[i].is_negative())
            .map(|i| rays[i].clone())
            .collect();
        for &p in &pos {
            for &q in &neg {
                let common: Vec<QVector> = zero_sets[p]
                    .iter()
                    .filter(|j| zero_sets[q].contains(j))
                    .map(|&j| processed[j].clone())
                    .collect();
                if common.len() + 2 < full_rank {
                    continue;
                }
                if rref(&common).1.len() + 2 != full_rank {
                    continue;
                }
                // (a.p) q - (a.q) p lies on the new hyperplane
                let combo = rays[q]
                    .scale(&values[p])
                    .add_scaled(&-values[q].clone(), &rays[p]);
                next.push(combo.primitive());
            }
        }
        next.sort();
        next.dedup();
        rays = next;
        processed.push(a.clone());
    }
    rays.sort();
    rays.dedup();
    (lineality, rays)
}

fn normalized_rays(rays: &[QVector]) -> Vec<QVector> {
    let mut out: Vec<QVector> = rays.iter().filter(|r| !r.is_zero()).map(QVector::primitive).collect();
    out.sort();
    out.dedup();
    out
}

/// Cone spanned by nonnegative combinations of `rays`.
pub fn cone_from_generators(rays: &[QVector], ambient_rank: usize) -> Result<Cone> {
    for r in rays {
        r.check_len(ambient_rank)?;
    }
    let gens = normalized_rays(rays);
    let (dual_lineality, dual_rays) = dual_description(&gens, ambient_rank);
    let (lin_basis, lin_pivots) = rref(&dual_lineality);

    let mut facets: Vec<QVector> = dual_rays
        .iter()
        .map(|y| reduce_mod(y, &lin_basis, &lin_pivots).primitive())
        .collect();
    facets.sort();
    facets.dedup();

    let equations = nullspace(&gens, ambient_rank);
    let span_dim = ambient_rank - equations.len();
    let facet_rank = rref(&facets).1.len();
    let lineality_rank = span_dim - facet_rank;

    let generators = if lineality_rank == 0 {
        // keep extreme rays only
        gens.into_iter()
            .filter(|g| {
                let tight: Vec<QVector> =
                    facets.iter().filter(|f| f.dot(g).is_zero()).cloned().collect();
                span_dim == 0 || rref(&tight).1.len() + 1 == span_dim
            })
            .collect()
    } else {
        gens
    };

    Ok(Cone { ambient_rank, generators, facets, lineality_rank, equations })
}

/// Cone `{x : n . x >= 0 for every normal n}`.
pub fn cone_from_facets(normals: &[QVector], ambient_rank: usize) -> Result<Cone> {
    for n in normals {
        n.check_len(ambient_rank)?;
    }
    let (lineality, rays) = dual_description(normals, ambient_rank);
    let mut gens = rays;
    for l in &lineality {
        gens.push(l.clone());
        gens.push(-l);
    }
    cone_from_generators(&gens, ambient_rank)
}

/// Facet test plus span membership.
pub fn contains(cone: &Cone, v: &QVector) -> Result<bool> {
    v.check_len(cone.ambient_rank)?;
    Ok(cone.equations.iter().all(|e| e.dot(v).is_zero())
        && cone.facets.iter().all(|f| !f.dot(v).is_negative()))
}

/// Smallest face of `cone` containing `v`, cut out by the facet normals that
/// vanish on `v`.
pub fn minimal_supported_face(cone: &Cone, v: &QVector) -> Result<SupportedFace> {
    if !contains(cone, v)? {
        return Err(Error::NotMember);
    }
    let tight_facets: Vec<usize> =
        (0..cone.facets.len()).filter(|&i| cone.facets[i].dot(v).is_zero()).collect();
    let face_gens: Vec<QVector> = cone
        .generators
        .iter()
        .filter(|g| tight_facets.iter().all(|&i| cone.facets[i].dot(g).is_zero()))
        .cloned()
        .collect();
    let dim = span_rank(&face_gens)?;
    let face = cone_from_generators(&face_gens, cone.ambient_rank)?;
    Ok(SupportedFace { face, codim: cone.ambient_rank - dim, tight_facets })
}

/// Nonnegative coefficients `x` with `sum x_j rays_j = target`, found by an
/// exact phase-one simplex with Bland's rule. `None` when no such
/// combination exists.
pub fn nonneg_combination(target: &QVector, rays: &[QVector]) -> Result<Option<Vec<Rational>>> {
    let m = target.len();
    for r in rays {
        r.check_len(m)?;
    }
    let k = rays.len();
    let width = k + m + 1;
    let rhs = width - 1;

    // rows 0..m: constraints, row m: phase-one reduced costs
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m + 1);
    for i in 0..m {
        let flip = target[i].is_negative();
        let mut row = vec![Rational::zero(); width];
        for (j, r) in rays.iter().enumerate() {
            row[j] = if flip { -r[i].clone() } else { r[i].clone() };
        }
        row[k + i] = Rational::from_integer(1.into());
        row[rhs] = target[i].abs();
        t.push(row);
    }
    let mut cost = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..k {
            cost[j] -= &row[j];
        }
        cost[rhs] -= &row[rhs];
    }
    t.push(cost);
    let mut basis: Vec<usize> = (k..k + m).collect();

    loop {
        let Some(enter) = (0..k + m).find(|&j| t[m][j].is_negative()) else {
            break;
        };
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][rhs] / &t[i][enter];
            leave = match leave {
                None => Some(i),
                Some(l) => {
                    let best = &t[l][rhs] / &t[l][enter];
                    if ratio < best || (ratio == best && basis[i] < basis[l]) {
                        Some(i)
                    } else {
                        Some(l)
                    }
                }
            };
        }
        // phase one is bounded below by zero
        let leave = leave.expect("phase-one simplex cannot be unbounded");
        let inv = t[leave][enter].recip();
        for x in t[leave].iter_mut() {
            *x *= &inv;
        }
        for i in 0..=m {
            if i != leave && !t[i][enter].is_zero() {
                let f = t[i][enter].clone();
                for j in 0..width {
                    let d = &f * &t[leave][j];
                    t[i][j] -= d;
                }
            }
        }
        basis[leave] = enter;
    }

    if !t[m][rhs].is_zero() {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); k];
    for (i, &b) in basis.iter().enumerate() {
        if b < k {
            x[b] = t[i][rhs].clone();
        }
    }
    Ok(Some(x))
}

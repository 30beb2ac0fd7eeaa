//! The invariants `a(X, L)` and `b(X, L)` on a polyhedral Neron-Severi model,
//! their curve and surface specializations, and Zariski decomposition on
//! surfaces.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::cone::{contains, minimal_supported_face, Cone};
use crate::error::{Error, Result};
use crate::fano_db::GeometricFact;
use crate::intersection::{eval_product, DivisorClass, IntersectionTensor};
use crate::linalg::{is_negative_definite, solve, span_rank, Matrix};
use crate::rational::{fmt_rational, int, serde_rational, QVector, Rational};

/// A Neron-Severi lattice with its intersection form and cone data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarietyModel {
    pub name: String,
    pub dim: usize,
    pub rank: usize,
    /// `K_X`
    pub canonical: DivisorClass,
    pub eff_cone: Cone,
    pub nef_cone: Option<Cone>,
    pub tensor: IntersectionTensor,
    pub curve_pairing: Matrix,
    pub annotations: Vec<GeometricFact>,
    /// The stored effective cone may be strictly smaller than the true one.
    pub larger_cone_possible: bool,
}

impl VarietyModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        canonical: DivisorClass,
        eff_cone: Cone,
        nef_cone: Option<Cone>,
        tensor: IntersectionTensor,
        curve_pairing: Matrix,
    ) -> Result<Self> {
        let rank = canonical.rank();
        let name = name.into();
        if tensor.dim() != dim {
            return Err(Error::InvalidDimension(format!(
                "{name}: tensor has dimension {}, model has {dim}",
                tensor.dim()
            )));
        }
        for r in [tensor.rank(), eff_cone.ambient_rank(), curve_pairing.len()] {
            if r != rank {
                return Err(Error::RankMismatch { expected: rank, found: r });
            }
        }
        if let Some(nef) = &nef_cone {
            if nef.ambient_rank() != rank {
                return Err(Error::RankMismatch { expected: rank, found: nef.ambient_rank() });
            }
        }
        if !eff_cone.is_pointed() || !eff_cone.is_full_dimensional() {
            return Err(Error::Inconsistent(format!(
                "{name}: effective cone must be pointed and full-dimensional"
            )));
        }
        Ok(VarietyModel {
            name,
            dim,
            rank,
            canonical,
            eff_cone,
            nef_cone,
            tensor,
            curve_pairing,
            annotations: Vec::new(),
            larger_cone_possible: false,
        })
    }

    pub fn anticanonical(&self) -> DivisorClass {
        self.canonical.neg()
    }

    /// Intersection of two divisors on a surface.
    pub fn dot(&self, a: &DivisorClass, b: &DivisorClass) -> Result<Rational> {
        if self.dim != 2 {
            return Err(Error::InvalidDimension(format!(
                "pairwise intersection needs a surface, {} has dimension {}",
                self.name, self.dim
            )));
        }
        eval_product(&self.tensor, &[a, b])
    }

    /// Warning text when `l` is evaluated against a possibly too small
    /// effective cone. Positive multiples of `-K_X` are exempt.
    pub fn low_confidence(&self, l: &DivisorClass) -> Option<String> {
        if !self.larger_cone_possible || l.rank() != self.rank {
            return None;
        }
        let k = self.anticanonical();
        let proportional = (0..self.rank).all(|i| {
            (0..self.rank).all(|j| l.0[i].clone() * &k.0[j] == l.0[j].clone() * &k.0[i])
        }) && l.0.dot(&k.0).is_positive();
        if proportional {
            None
        } else {
            Some(format!(
                "LowConfidence: the stored effective cone of {} may be smaller than the true one; \
                 a and b for {l} are relative to the stored cone",
                self.name
            ))
        }
    }
}

/// The pair `(a, b)` with its certificate trail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    #[serde(with = "serde_rational")]
    pub a: Rational,
    pub b: u32,
    /// `a L + K_X`
    pub adjoint: QVector,
    /// Facet normals of the effective cone vanishing on the adjoint class.
    pub witness_facets: Vec<usize>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

fn check_rank(model: &VarietyModel, d: &DivisorClass) -> Result<()> {
    if d.rank() != model.rank {
        return Err(Error::RankMismatch { expected: model.rank, found: d.rank() });
    }
    Ok(())
}

/// `a(X, L) = min { t : t L + K_X effective }`, computed as the largest ratio
/// `-lambda(K) / lambda(L)` over the facet normals of the effective cone.
pub fn a_invariant(model: &VarietyModel, l: &DivisorClass) -> Result<Rational> {
    check_rank(model, l)?;
    let facets = model.eff_cone.facets();
    if facets.is_empty() {
        return Err(Error::EmptyCone);
    }
    let mut best: Option<Rational> = None;
    for (i, f) in facets.iter().enumerate() {
        let on_l = f.dot(&l.0);
        if !on_l.is_positive() {
            return Err(Error::NotBig { facet: i, value: fmt_rational(&on_l) });
        }
        let ratio = -f.dot(&model.canonical.0) / on_l;
        if best.as_ref().map_or(true, |b| ratio > *b) {
            best = Some(ratio);
        }
    }
    Ok(best.expect("at least one facet"))
}

/// `a L + K_X`
pub fn adjoint_class(model: &VarietyModel, l: &DivisorClass, a: &Rational) -> DivisorClass {
    model.canonical.add_scaled(a, l)
}

/// Codimension of the minimal supported face of the effective cone containing
/// the adjoint class.
pub fn b_invariant(model: &VarietyModel, l: &DivisorClass) -> Result<u32> {
    Ok(invariant_report(model, l)?.b)
}

/// Computes `a`, `b` and the certificate trail in one pass.
pub fn invariant_report(model: &VarietyModel, l: &DivisorClass) -> Result<InvariantReport> {
    let a = a_invariant(model, l)?;
    if !a.is_positive() {
        return Err(Error::NotUniruled(fmt_rational(&a)));
    }
    let adjoint = adjoint_class(model, l, &a);
    let face = minimal_supported_face(&model.eff_cone, &adjoint.0)?;
    Ok(InvariantReport {
        a,
        b: face.codim as u32,
        adjoint: adjoint.0,
        witness_facets: face.tight_facets,
        warnings: model.low_confidence(l).into_iter().collect(),
    })
}

/// `a(C, L) = 2 / (L . C)` on a rational curve.
pub fn curve_a(l_deg: &Rational) -> Result<Rational> {
    if !l_deg.is_positive() {
        return Err(Error::NonpositiveDegree(fmt_rational(l_deg)));
    }
    Ok(int(2) / l_deg)
}

/// Surface with `kappa(K + aL) = 1`: `(2 / L.F, 1)` for a general fiber `F`
/// of the Iitaka fibration.
pub fn surface_invariants_kappa1(lf: &Rational) -> Result<(Rational, u32)> {
    if !lf.is_positive() {
        return Err(Error::NonpositiveDegree(fmt_rational(lf)));
    }
    Ok((int(2) / lf, 1))
}

/// Surface with `kappa(K + aL) = 0`: `(-K_{S'}.C / L.C, rho(S'))` on the
/// minimal model `S'` and a nef curve `C` there.
pub fn surface_invariants_kappa0(
    kc: &Rational,
    lc: &Rational,
    rho_min: u32,
) -> Result<(Rational, u32)> {
    if !lc.is_positive() {
        return Err(Error::NonpositiveDegree(fmt_rational(lc)));
    }
    Ok((kc / lc, rho_min))
}

/// `rho - rank <vertical divisors, contracted divisors>`.
pub fn b_via_vertical_divisors(
    model: &VarietyModel,
    vertical: &[DivisorClass],
    contracted: &[DivisorClass],
) -> Result<u32> {
    let mut all: Vec<QVector> = Vec::with_capacity(vertical.len() + contracted.len());
    for d in vertical.iter().chain(contracted) {
        check_rank(model, d)?;
        all.push(d.0.clone());
    }
    Ok((model.rank - span_rank(&all)?) as u32)
}

/// A curve supplied to the Zariski routines together with its self-intersection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceCurve {
    pub class: DivisorClass,
    pub self_intersection: Rational,
}

impl SurfaceCurve {
    pub fn new(class: DivisorClass, self_intersection: Rational) -> Self {
        SurfaceCurve { class, self_intersection }
    }
}

/// `D = P + N` with `N = sum coeff_i C_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZariskiDecomposition {
    pub positive: DivisorClass,
    pub negative: DivisorClass,
    /// `(index into the supplied curve list, coefficient)`, sorted by index.
    pub support: Vec<(usize, Rational)>,
}

fn ensure_surface(model: &VarietyModel) -> Result<()> {
    if model.dim != 2 {
        return Err(Error::InvalidDimension(format!(
            "{} has dimension {}, expected a surface",
            model.name, model.dim
        )));
    }
    Ok(())
}

/// Gram matrix of the given curves.
pub fn gram_matrix(
    model: &VarietyModel,
    curves: &[SurfaceCurve],
    idx: &[usize],
) -> Result<Vec<QVector>> {
    idx.iter()
        .map(|&i| {
            idx.iter()
                .map(|&j| model.dot(&curves[i].class, &curves[j].class))
                .collect::<Result<Vec<_>>>()
                .map(QVector::new)
        })
        .collect()
}

/// Solves `N . C_i = D . C_i` over the support and returns the coefficients.
pub fn solve_negative_part(
    model: &VarietyModel,
    d: &DivisorClass,
    curves: &[SurfaceCurve],
    support: &[usize],
) -> Result<Option<Vec<Rational>>> {
    let gram = gram_matrix(model, curves, support)?;
    let rhs = support
        .iter()
        .map(|&i| model.dot(d, &curves[i].class))
        .collect::<Result<Vec<_>>>()?;
    Ok(solve(&gram, &rhs))
}

/// Zariski decomposition by the iterative support-growing scheme: add every
/// curve meeting the current positive part negatively, re-solve, repeat.
///
/// Positive parts are checked for nefness against the supplied curves only,
/// so the list must contain every curve that can be negative on `D`.
pub fn zariski_decompose(
    model: &VarietyModel,
    d: &DivisorClass,
    curves: &[SurfaceCurve],
) -> Result<ZariskiDecomposition> {
    ensure_surface(model)?;
    check_rank(model, d)?;
    for c in curves {
        check_rank(model, &c.class)?;
        let sq = model.dot(&c.class, &c.class)?;
        if sq != c.self_intersection {
            return Err(Error::Inconsistent(format!(
                "curve {} has self-intersection {} in the tensor, {} supplied",
                c.class, sq, c.self_intersection
            )));
        }
    }
    if !contains(&model.eff_cone, &d.0)? {
        return Err(Error::NotPseudoEffective);
    }

    let mut support: Vec<usize> = Vec::new();
    let mut coeffs: Vec<Rational> = Vec::new();
    let mut positive = d.clone();
    loop {
        let mut grew = false;
        for (i, c) in curves.iter().enumerate() {
            if support.contains(&i) || !model.dot(&positive, &c.class)?.is_negative() {
                continue;
            }
            if !c.self_intersection.is_negative() {
                // a curve with C^2 >= 0 is nef
                return Err(Error::NotPseudoEffective);
            }
            support.push(i);
            grew = true;
        }
        if !grew {
            break;
        }
        support.sort_unstable();
        let gram = gram_matrix(model, curves, &support)?;
        if !is_negative_definite(&gram) {
            return Err(Error::NonNegativeDefinite);
        }
        coeffs = solve_negative_part(model, d, curves, &support)?
            .ok_or(Error::NonNegativeDefinite)?;
        positive = d.clone();
        for (&i, x) in support.iter().zip(&coeffs) {
            positive = positive.add_scaled(&-x.clone(), &curves[i].class);
        }
    }
    if coeffs.iter().any(|x| !x.is_positive()) {
        return Err(Error::NotPseudoEffective);
    }
    let negative = DivisorClass(&d.0 - &positive.0);
    Ok(ZariskiDecomposition { positive, negative, support: support.into_iter().zip(coeffs).collect() })
}

/// On a rational surface: the adjoint class `a L + K` is rigid iff its
/// Zariski positive part vanishes.
pub fn is_rigid_adjoint(
    model: &VarietyModel,
    l: &DivisorClass,
    curves: &[SurfaceCurve],
) -> Result<bool> {
    ensure_surface(model)?;
    let a = a_invariant(model, l)?;
    let adjoint = adjoint_class(model, l, &a);
    Ok(zariski_decompose(model, &adjoint, curves)?.positive.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::surfaces;

    fn d(xs: &[i64]) -> DivisorClass {
        DivisorClass::from_ints(xs)
    }

    #[test]
    fn projective_plane() {
        let s = surfaces::projective_plane();
        assert_eq!(a_invariant(&s.model, &d(&[1])).unwrap(), int(3));
        assert_eq!(b_invariant(&s.model, &d(&[1])).unwrap(), 1);
        assert!(is_rigid_adjoint(&s.model, &d(&[1]), &s.curves).unwrap());
    }

    #[test]
    fn blowup_of_plane_at_a_point() {
        let s = surfaces::blown_up_plane(1);
        let h = d(&[1, 0]);
        assert_eq!(a_invariant(&s.model, &h).unwrap(), int(3));
        let report = invariant_report(&s.model, &h).unwrap();
        assert_eq!(report.adjoint, QVector::from_ints(&[0, 1]));
        assert_eq!(report.b, 1);
        assert!(is_rigid_adjoint(&s.model, &h, &s.curves).unwrap());
    }

    #[test]
    fn ruled_adjoint_is_not_rigid() {
        let s = surfaces::hirzebruch(0);
        // L = S + 2F on P1 x P1: adjoint 2F is a multiple of a fiber
        let l = d(&[1, 2]);
        assert_eq!(a_invariant(&s.model, &l).unwrap(), int(2));
        let z = zariski_decompose(&s.model, &adjoint_class(&s.model, &l, &int(2)), &s.curves).unwrap();
        assert_eq!(z.positive, d(&[0, 2]));
        assert!(!is_rigid_adjoint(&s.model, &l, &s.curves).unwrap());
    }

    #[test]
    fn homogeneity() {
        let s = surfaces::blown_up_plane(2);
        let l = d(&[3, -1, -1]);
        let a = a_invariant(&s.model, &l).unwrap();
        let c = rat(7, 3);
        assert_eq!(a_invariant(&s.model, &l.scale(&c)).unwrap() * &c, a);
    }

    #[test]
    fn not_big_is_rejected() {
        let s = surfaces::blown_up_plane(1);
        assert!(matches!(a_invariant(&s.model, &d(&[0, 1])), Err(Error::NotBig { .. })));
        assert!(matches!(a_invariant(&s.model, &d(&[1])), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn curve_and_surface_constants() {
        assert_eq!(curve_a(&int(1)).unwrap(), int(2));
        assert_eq!(curve_a(&int(2)).unwrap(), int(1));
        assert_eq!(curve_a(&int(4)).unwrap(), rat(1, 2));
        assert!(matches!(curve_a(&int(0)), Err(Error::NonpositiveDegree(_))));

        assert_eq!(surface_invariants_kappa1(&int(2)).unwrap(), (int(1), 1));
        assert_eq!(surface_invariants_kappa1(&int(1)).unwrap(), (int(2), 1));
        assert_eq!(surface_invariants_kappa1(&int(4)).unwrap(), (rat(1, 2), 1));
        assert!(surface_invariants_kappa1(&int(-1)).is_err());

        assert_eq!(surface_invariants_kappa0(&int(1), &int(1), 8).unwrap(), (int(1), 8));
        assert_eq!(surface_invariants_kappa0(&int(2), &int(2), 2).unwrap(), (int(1), 2));
        assert_eq!(surface_invariants_kappa0(&int(3), &int(3), 1).unwrap(), (int(1), 1));
        assert!(surface_invariants_kappa0(&int(3), &int(0), 1).is_err());
    }

    #[test]
    fn vertical_divisor_rank() {
        let s2 = surfaces::hirzebruch(0);
        assert_eq!(b_via_vertical_divisors(&s2.model, &[d(&[1, 0])], &[]).unwrap(), 1);
        assert_eq!(b_via_vertical_divisors(&s2.model, &[], &[]).unwrap(), 2);

        let s3 = surfaces::blown_up_plane(2);
        let b = b_via_vertical_divisors(&s3.model, &[d(&[1, 0, 0]), d(&[2, 0, 0])], &[d(&[0, 1, 0])]);
        assert_eq!(b.unwrap(), 1);
        assert!(matches!(
            b_via_vertical_divisors(&s3.model, &[d(&[1, 0])], &[]),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn zariski_examples() {
        let s = surfaces::blown_up_plane(1);
        let e = zariski_decompose(&s.model, &d(&[0, 1]), &s.curves).unwrap();
        assert!(e.positive.is_zero());
        assert_eq!(e.negative, d(&[0, 1]));

        let h = zariski_decompose(&s.model, &d(&[1, 0]), &s.curves).unwrap();
        assert_eq!(h.positive, d(&[1, 0]));
        assert!(h.support.is_empty());

        // H + 2E: E.(H+2E) = -2 < 0, so N = 2E
        let m = zariski_decompose(&s.model, &d(&[1, 2]), &s.curves).unwrap();
        assert_eq!(m.positive, d(&[1, 0]));
        assert_eq!(m.support, vec![(0, int(2))]);
    }

    #[test]
    fn zariski_errors() {
        let s = surfaces::blown_up_plane(1);
        assert_eq!(
            zariski_decompose(&s.model, &d(&[-1, 0]), &s.curves),
            Err(Error::NotPseudoEffective)
        );
        let bad = vec![SurfaceCurve::new(d(&[0, 1]), int(-2))];
        assert!(matches!(
            zariski_decompose(&s.model, &d(&[0, 1]), &bad),
            Err(Error::Inconsistent(_))
        ));
        let p3 = crate::fano_db::load_builtin().unwrap();
        let x = p3[0].model().unwrap();
        assert!(matches!(
            is_rigid_adjoint(&x, &x.anticanonical(), &[]),
            Err(Error::InvalidDimension(_))
        ));
    }
}

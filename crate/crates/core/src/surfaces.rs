//! Small rational surfaces with explicit Neron-Severi data, used as fixtures
//! for the surface routines.

use crate::cone::cone_from_generators;
use crate::intersection::{identity_pairing, DivisorClass, IntersectionTensor};
use crate::invariants::{SurfaceCurve, VarietyModel};
use crate::rational::{int, QVector};

/// A surface model together with every curve that can be negative on an
/// effective class.
#[derive(Debug, Clone)]
pub struct SurfaceFixture {
    pub model: VarietyModel,
    pub curves: Vec<SurfaceCurve>,
}

fn fixture(
    name: String,
    canonical: &[i64],
    entries: Vec<(Vec<usize>, i64)>,
    curve_classes: Vec<Vec<i64>>,
) -> SurfaceFixture {
    let rank = canonical.len();
    let tensor = IntersectionTensor::new(2, rank, entries.into_iter().map(|(k, v)| (k, int(v))))
        .expect("fixture tensor");
    let gens: Vec<QVector> = curve_classes.iter().map(|c| QVector::from_ints(c)).collect();
    let eff = cone_from_generators(&gens, rank).expect("fixture cone");
    let model = VarietyModel::new(
        name,
        2,
        DivisorClass::from_ints(canonical),
        eff,
        None,
        tensor,
        identity_pairing(rank),
    )
    .expect("fixture model");
    let curves = curve_classes
        .iter()
        .map(|c| {
            let class = DivisorClass::from_ints(c);
            let sq = model.dot(&class, &class).expect("surface");
            SurfaceCurve::new(class, sq)
        })
        .collect();
    SurfaceFixture { model, curves }
}

pub fn projective_plane() -> SurfaceFixture {
    fixture("P2".into(), &[-3], vec![(vec![0, 0], 1)], vec![vec![1]])
}

/// Hirzebruch surface `F_n` in the basis `(S, F)` with `S^2 = -n`.
pub fn hirzebruch(n: i64) -> SurfaceFixture {
    fixture(
        format!("F{n}"),
        &[-2, -(n + 2)],
        vec![(vec![0, 0], -n), (vec![0, 1], 1)],
        vec![vec![1, 0], vec![0, 1]],
    )
}

/// Blow-up of the plane in `k <= 5` general points, basis `(H, E_1, ..., E_k)`.
/// The curve list holds the (-1)-curves, plus the ruling `H - E_1` when `k = 1`.
pub fn blown_up_plane(k: usize) -> SurfaceFixture {
    assert!((1..=5).contains(&k), "general blow-ups supported for 1..=5 points");
    let rank = k + 1;
    let mut canonical = vec![1; rank];
    canonical[0] = -3;
    let mut entries = vec![(vec![0, 0], 1)];
    entries.extend((1..rank).map(|i| (vec![i, i], -1)));

    let mut curves = Vec::new();
    for i in 1..rank {
        let mut e = vec![0; rank];
        e[i] = 1;
        curves.push(e);
    }
    if k == 1 {
        curves.push(vec![1, -1]);
    }
    for i in 1..rank {
        for j in i + 1..rank {
            let mut l = vec![0; rank];
            l[0] = 1;
            l[i] = -1;
            l[j] = -1;
            curves.push(l);
        }
    }
    if k == 5 {
        curves.push(vec![2, -1, -1, -1, -1, -1]);
    }
    fixture(format!("Bl{k}P2"), &canonical, entries, curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersection::eval_product;

    #[test]
    fn canonical_degrees() {
        assert_eq!(eval_product(&projective_plane().model.tensor, &[&DivisorClass::from_ints(&[-3]); 2]).unwrap(), int(9));
        for n in 0..4 {
            let s = hirzebruch(n);
            let k = &s.model.canonical;
            assert_eq!(s.model.dot(k, k).unwrap(), int(8));
        }
        for k in 1..=5 {
            let s = blown_up_plane(k);
            let c = &s.model.canonical;
            assert_eq!(s.model.dot(c, c).unwrap(), int(9 - k as i64));
            for curve in &s.curves {
                // adjunction: K.C + C^2 = -2 on smooth rational curves
                assert_eq!(s.model.dot(c, &curve.class).unwrap() + &curve.self_intersection, int(-2));
            }
        }
    }
}

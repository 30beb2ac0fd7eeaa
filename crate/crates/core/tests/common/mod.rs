//! Oracles shared by the integration tests. None of them goes through the
//! double description code: facets come from subset enumeration and
//! membership from the simplex.
#![allow(dead_code)]

use balanced::cone::nonneg_combination;
use balanced::intersection::{identity_pairing, DivisorClass, IntersectionTensor};
use balanced::invariants::{SurfaceCurve, VarietyModel, ZariskiDecomposition};
use balanced::linalg::{is_negative_definite, nullspace, solve, span_rank};
use balanced::rational::{int, QVector, Rational};
use balanced::surfaces::{self, SurfaceFixture};
use num_traits::{Signed, Zero};
use rand::Rng;

/// All `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Facets of a full-dimensional cone by brute force: every hyperplane
/// spanned by `n - 1` generators that has all generators on one side.
pub fn enumerated_facets(gens: &[QVector], n: usize) -> Vec<QVector> {
    if n == 1 {
        let pos = gens.iter().any(|g| g[0].is_positive());
        let neg = gens.iter().any(|g| g[0].is_negative());
        return match (pos, neg) {
            (true, false) => vec![QVector::from_ints(&[1])],
            (false, true) => vec![QVector::from_ints(&[-1])],
            _ => vec![],
        };
    }
    let mut out = Vec::new();
    for s in subsets(gens.len(), n - 1) {
        let rows: Vec<QVector> = s.iter().map(|&i| gens[i].clone()).collect();
        let ns = nullspace(&rows, n);
        if ns.len() != 1 {
            continue;
        }
        let mut normal = ns[0].clone();
        let pos = gens.iter().any(|g| normal.dot(g).is_positive());
        let neg = gens.iter().any(|g| normal.dot(g).is_negative());
        if pos && neg {
            continue;
        }
        if neg {
            normal = -&normal;
        }
        out.push(normal.primitive());
    }
    out.sort();
    out.dedup();
    out
}

pub fn member_by_simplex(v: &QVector, gens: &[QVector]) -> bool {
    nonneg_combination(v, gens).unwrap().is_some()
}

/// `a` as the smallest candidate breakpoint `t` for which `t L + K` is a
/// nonnegative combination of the generators.
pub fn breakpoint_a(gens: &[QVector], k: &QVector, l: &QVector) -> Rational {
    let n = k.len();
    let mut candidates: Vec<Rational> = enumerated_facets(gens, n)
        .iter()
        .map(|f| -f.dot(k) / f.dot(l))
        .collect();
    candidates.sort();
    candidates.dedup();
    candidates
        .into_iter()
        .find(|t| member_by_simplex(&k.add_scaled(t, l), gens))
        .expect("some breakpoint is effective")
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize, lo: i64, hi: i64) -> QVector {
    QVector::from_ints(&(0..n).map(|_| rng.gen_range(lo..=hi)).collect::<Vec<_>>())
}

/// Random pointed full-dimensional cone: generators with positive first
/// coordinate, at least `n` of them, resampled until they span.
pub fn random_pointed_cone<R: Rng>(rng: &mut R, n: usize) -> Vec<QVector> {
    loop {
        let k = rng.gen_range(n..=n + 3);
        let gens: Vec<QVector> = (0..k)
            .map(|_| {
                let mut v: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
                v[0] = rng.gen_range(1..=4);
                QVector::from_ints(&v)
            })
            .collect();
        if span_rank(&gens).unwrap() == n {
            return gens;
        }
    }
}

/// Positive combination of all generators: an interior point.
pub fn random_interior<R: Rng>(rng: &mut R, gens: &[QVector]) -> QVector {
    let n = gens[0].len();
    gens.iter()
        .fold(QVector::zeros(n), |acc, g| acc.add_scaled(&int(rng.gen_range(1..=5)), g))
}

/// A bare model carrying only cone data, for `a`/`b` computations.
pub fn cone_model(gens: &[QVector], k: &QVector) -> VarietyModel {
    let n = k.len();
    let eff = balanced::cone::cone_from_generators(gens, n).unwrap();
    let tensor = IntersectionTensor::new(2, n, Vec::new()).unwrap();
    VarietyModel::new("random", 2, DivisorClass(k.clone()), eff, None, tensor, identity_pairing(n)).unwrap()
}

pub fn random_surface<R: Rng>(rng: &mut R) -> SurfaceFixture {
    if rng.gen_bool(0.5) {
        surfaces::blown_up_plane(rng.gen_range(1..=4))
    } else {
        surfaces::hirzebruch(rng.gen_range(0..=3))
    }
}

/// Random effective class: nonnegative combination of the curves, nonzero.
pub fn random_effective<R: Rng>(rng: &mut R, s: &SurfaceFixture) -> DivisorClass {
    loop {
        let d = s.curves.iter().fold(DivisorClass::zero(s.model.rank), |acc, c| {
            acc.add_scaled(&int(rng.gen_range(0..=3)), &c.class)
        });
        if !d.is_zero() {
            return d;
        }
    }
}

/// Zariski decomposition by trying every support set of negative curves.
/// The decomposition is unique, so exactly one candidate survives.
pub fn brute_force_zariski(s: &SurfaceFixture, d: &DivisorClass) -> Option<ZariskiDecomposition> {
    let m = &s.model;
    let curves = &s.curves;
    let table: Vec<Vec<Rational>> = curves
        .iter()
        .map(|a| curves.iter().map(|b| m.dot(&a.class, &b.class).unwrap()).collect())
        .collect();
    let d_dot: Vec<Rational> = curves.iter().map(|c| m.dot(d, &c.class).unwrap()).collect();
    let negative: Vec<usize> = (0..curves.len())
        .filter(|&i| curves[i].self_intersection.is_negative())
        .collect();
    let mut found = None;
    for k in 0..=negative.len() {
        for sub in subsets(negative.len(), k) {
            let idx: Vec<usize> = sub.iter().map(|&i| negative[i]).collect();
            let gram: Vec<QVector> = idx
                .iter()
                .map(|&i| QVector::new(idx.iter().map(|&j| table[i][j].clone()).collect()))
                .collect();
            if !idx.is_empty() && !is_negative_definite(&gram) {
                continue;
            }
            let rhs: Vec<Rational> = idx.iter().map(|&i| d_dot[i].clone()).collect();
            let coeffs = if idx.is_empty() { vec![] } else { solve(&gram, &rhs)? };
            if coeffs.iter().any(|x| !x.is_positive()) {
                continue;
            }
            // P . C = D . C - sum x_i C_i . C
            let nef = (0..curves.len()).all(|c| {
                let pc = idx
                    .iter()
                    .zip(&coeffs)
                    .fold(d_dot[c].clone(), |acc, (&i, x)| acc - x * &table[i][c]);
                !pc.is_negative()
            });
            if nef {
                let mut p = d.clone();
                for (&i, x) in idx.iter().zip(&coeffs) {
                    p = p.add_scaled(&-x.clone(), &curves[i].class);
                }
                let negative_part = DivisorClass(&d.0 - &p.0);
                let support = idx.into_iter().zip(coeffs).collect();
                let z = ZariskiDecomposition { positive: p, negative: negative_part, support };
                assert!(found.is_none() || found.as_ref() == Some(&z), "two decompositions");
                found = Some(z);
            }
        }
    }
    found
}

/// Checks the defining properties of a decomposition of `d`.
pub fn zariski_axioms(s: &SurfaceFixture, d: &DivisorClass, z: &ZariskiDecomposition) -> Result<(), String> {
    let m = &s.model;
    if &z.positive.0 + &z.negative.0 != d.0 {
        return Err("D != P + N".into());
    }
    let mut n = DivisorClass::zero(m.rank);
    for (i, x) in &z.support {
        if !x.is_positive() {
            return Err(format!("nonpositive coefficient {x}"));
        }
        n = n.add_scaled(x, &s.curves[*i].class);
        if !m.dot(&z.positive, &s.curves[*i].class).unwrap().is_zero() {
            return Err(format!("P . C_{i} != 0"));
        }
    }
    if n != z.negative {
        return Err("N does not match its support".into());
    }
    let idx: Vec<usize> = z.support.iter().map(|(i, _)| *i).collect();
    let gram: Vec<QVector> = idx
        .iter()
        .map(|&i| QVector::new(idx.iter().map(|&j| m.dot(&s.curves[i].class, &s.curves[j].class).unwrap()).collect()))
        .collect();
    if !idx.is_empty() && !is_negative_definite(&gram) {
        return Err("support Gram matrix is not negative definite".into());
    }
    if s.curves.iter().any(|c| m.dot(&z.positive, &c.class).unwrap().is_negative()) {
        return Err("P is not nef".into());
    }
    Ok(())
}

pub fn curves_of(s: &SurfaceFixture) -> &[SurfaceCurve] {
    &s.curves
}

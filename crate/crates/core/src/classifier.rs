//! Balancedness of `-K_X` for database records.
//!
//! The numeric skeleton is mechanical: curve degrees from the pairing,
//! `L^2 . S` from the restriction form, Reider thresholds on top. Everything
//! the numbers cannot decide comes from the record's annotations, and a class
//! that neither covers is reported as [`Error::InsufficientAnnotations`].

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{curve_degree_bound, reider_effective, reider_separates};
use crate::error::{Error, Result};
use crate::fano_db::{FactKind, FanoRecord, GeometricFact, VerdictLevel};
use crate::intersection::{pair, restriction_form, CurveClass, DivisorClass};
use crate::invariants::{curve_a, invariant_report};
use crate::rational::{int, rat, serde_opt_rational, QVector, Rational};

pub const DEFAULT_SCAN_BOUND: u32 = 20;
pub const MIN_SCAN_BOUND: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cmp {
    LT,
    EQ,
    GT,
    NA,
}

impl From<Ordering> for Cmp {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Cmp::LT,
            Ordering::Equal => Cmp::EQ,
            Ordering::Greater => Cmp::GT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComparisonOutcome {
    pub a_cmp: Cmp,
    pub b_cmp: Cmp,
}

impl ComparisonOutcome {
    /// Lexicographic comparison of `(a, b)` against `(a_x, b_x)`. An unknown
    /// `b` is taken to be larger than `b_x`.
    pub fn compare(a: &Rational, b: Option<u32>, a_x: &Rational, b_x: u32) -> Self {
        match a.cmp(a_x) {
            Ordering::Less => ComparisonOutcome { a_cmp: Cmp::LT, b_cmp: Cmp::NA },
            o => ComparisonOutcome {
                a_cmp: o.into(),
                b_cmp: b.map_or(Cmp::GT, |b| b.cmp(&b_x).into()),
            },
        }
    }

    pub fn is_strictly_less(&self) -> bool {
        self.a_cmp == Cmp::LT || (self.a_cmp == Cmp::EQ && self.b_cmp == Cmp::LT)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub object: String,
    /// `a` of the test object, or an upper bound for it when `a_is_bound`.
    #[serde(with = "serde_opt_rational")]
    pub a: Option<Rational>,
    pub a_is_bound: bool,
    pub b: Option<u32>,
    pub outcome: ComparisonOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancedVerdict {
    pub level: VerdictLevel,
    pub witnesses: Vec<Witness>,
    pub exceptional_set: String,
}

/// Level implied by a witness set.
pub fn aggregate(witnesses: &[Witness]) -> VerdictLevel {
    let has = |p: &dyn Fn(&ComparisonOutcome) -> bool| witnesses.iter().any(|w| p(&w.outcome));
    if has(&|o| o.a_cmp == Cmp::GT) {
        VerdictLevel::None
    } else if has(&|o| o.a_cmp == Cmp::EQ && o.b_cmp == Cmp::GT) {
        VerdictLevel::WeaklyABalanced
    } else if has(&|o| o.a_cmp == Cmp::EQ && o.b_cmp == Cmp::EQ) {
        VerdictLevel::WeaklyBalanced
    } else {
        VerdictLevel::Balanced
    }
}

/// All nonzero vectors with entries in `0..=bound`, in lexicographic order.
fn lattice_points(rank: usize, bound: u32) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=bound as i64).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out.retain(|p| p.iter().any(|&x| x != 0));
    out
}

struct Scan<'a> {
    rec: &'a FanoRecord,
    a_x: Rational,
    b_x: u32,
    witnesses: Vec<Witness>,
    triggered: BTreeSet<usize>,
}

impl<'a> Scan<'a> {
    fn push(&mut self, object: String, a: Rational, a_is_bound: bool, b: Option<u32>) {
        if self.witnesses.iter().any(|w| w.object == object) {
            return;
        }
        let outcome = ComparisonOutcome::compare(&a, b, &self.a_x, self.b_x);
        self.witnesses.push(Witness { object, a: Some(a), a_is_bound, b, outcome });
    }

    /// Keeps the larger `a` for an aggregated witness.
    fn push_max(&mut self, object: &str, a: Rational, b: Option<u32>) {
        if let Some(i) = self.witnesses.iter().position(|w| w.object == object) {
            if self.witnesses[i].a.as_ref().map_or(true, |old| a > *old) {
                self.witnesses.remove(i);
            } else {
                return;
            }
        }
        self.push(object.to_string(), a, false, b);
    }

    fn annotations_for(&self, kinds: &[FactKind], class: &QVector) -> Vec<(usize, &'a GeometricFact)> {
        self.rec
            .annotations
            .iter()
            .enumerate()
            .filter(|(_, f)| kinds.contains(&f.kind) && f.payload.class.as_ref() == Some(class))
            .collect()
    }

    fn insufficient(&self, class: String) -> Error {
        Error::InsufficientAnnotations { name: self.rec.name.clone(), class }
    }

    fn curves(&mut self, bound: u32) -> Result<()> {
        let minus_k = self.rec.anticanonical();
        let line_bound = curve_degree_bound(&self.a_x)?;
        for p in lattice_points(self.rec.rank, bound) {
            let coords = QVector::from_ints(&p);
            let deg = pair(&minus_k, &CurveClass::new(coords.clone(), self.rec.curve_pairing.clone())?)?;
            if !deg.is_positive() {
                return Err(Error::Inconsistent(format!("curve class {coords} has degree {deg}")));
            }
            if deg < line_bound {
                let lines = self.annotations_for(&[FactKind::DominatingLineLocus], &coords);
                if lines.is_empty() {
                    return Err(self.insufficient(format!("curves {coords}")));
                }
                self.triggered.extend(lines.iter().map(|(i, _)| *i));
                continue;
            }
            let a = curve_a(&deg)?;
            if a < self.a_x {
                self.push_max("rational curves with a(C,L) < a(X,L)", a, Some(1));
                continue;
            }
            let outcome = ComparisonOutcome::compare(&a, Some(1), &self.a_x, self.b_x);
            if !outcome.is_strictly_less() {
                let conics = self.annotations_for(&[FactKind::DominatingConicClass], &coords);
                if conics.is_empty() {
                    return Err(self.insufficient(format!("curves {coords}")));
                }
                self.triggered.extend(conics.iter().map(|(i, _)| *i));
            }
            self.push(format!("rational curves of class {coords}"), a, false, Some(1));
        }
        Ok(())
    }

    /// Multiples `m L_i`, `m >= 2`, of a fiber class of a contraction onto a
    /// curve have only reducible members.
    fn reducible(&self, p: &[i64]) -> bool {
        let support: Vec<usize> = (0..p.len()).filter(|&i| p[i] != 0).collect();
        match support.as_slice() {
            [i] => p[*i] >= 2 && self.rec.rays.get(*i).is_some_and(|r| r.ray_type.target_dim() == 1),
            _ => false,
        }
    }

    fn surfaces(&mut self, bound: u32) -> Result<()> {
        let minus_k = self.rec.anticanonical();
        let form = QVector::new(restriction_form(&self.rec.tensor, &minus_k)?);
        for p in lattice_points(self.rec.rank, bound) {
            if self.reducible(&p) {
                continue;
            }
            let coords = QVector::from_ints(&p);
            let l2s = form.dot(&coords);
            let facts = self.annotations_for(
                &[FactKind::FiberSurfaceProfile, FactKind::ConicBundleLine, FactKind::NonRationalFiber],
                &coords,
            );
            if !facts.is_empty() {
                for (i, fact) in facts {
                    self.triggered.insert(i);
                    let (a, b) = match fact.kind {
                        // fibers over a line are conics of degree 2
                        FactKind::ConicBundleLine => (int(1), Some(1)),
                        _ => (fact.payload.a.clone().expect("validated"), fact.payload.b),
                    };
                    let object = format!("surfaces of class {coords} ({:?})", fact.kind);
                    self.push(object, a, false, b);
                }
                continue;
            }
            if let Some(r) = self.rec.index.filter(|&r| r >= 2) {
                // Reider for ((r-1)/r) L bounds a(S, L) by (r-1)/r
                let shrink = rat(r - 1, r);
                if reider_effective(&(&l2s * &shrink * &shrink)).holds {
                    self.push("surfaces with ((r-1)H)^2.S >= 5".into(), shrink, true, None);
                    continue;
                }
            }
            if reider_separates(&l2s).holds {
                self.push("surfaces with L^2.S >= 10".into(), int(1), true, Some(1));
            } else if reider_effective(&l2s).holds {
                self.push("surfaces with 5 <= L^2.S < 10, b unknown".into(), int(1), true, None);
            } else {
                return Err(self.insufficient(format!("surfaces {coords}")));
            }
        }
        Ok(())
    }

    fn exceptional_divisors(&mut self) {
        for (i, f) in self.rec.annotations.iter().enumerate() {
            if f.kind == FactKind::ExceptionalDivisor {
                self.triggered.insert(i);
            }
        }
    }

    fn exceptional_set(&self) -> String {
        let mut loci: Vec<&str> = Vec::new();
        for &i in &self.triggered {
            if let Some(l) = self.rec.annotations[i].payload.locus.as_deref() {
                if !loci.contains(&l) {
                    loci.push(l);
                }
            }
        }
        loci.join(" ∪ ")
    }
}

/// Runs the curve and surface scans over classes with coefficients up to
/// `scan_bound` and aggregates the witnesses.
pub fn classify(rec: &FanoRecord, scan_bound: u32) -> Result<BalancedVerdict> {
    if scan_bound < MIN_SCAN_BOUND {
        return Err(Error::InvalidScanBound(scan_bound));
    }
    let model = rec.model()?;
    let report = invariant_report(&model, &model.anticanonical())?;
    let mut scan = Scan { rec, a_x: report.a, b_x: report.b, witnesses: Vec::new(), triggered: BTreeSet::new() };
    scan.curves(scan_bound)?;
    scan.surfaces(scan_bound)?;
    scan.exceptional_divisors();
    Ok(BalancedVerdict {
        level: aggregate(&scan.witnesses),
        exceptional_set: scan.exceptional_set(),
        witnesses: scan.witnesses,
    })
}

/// Curve classes of `-K`-degree below `2 / a(X, -K)`: the only candidates
/// for `a(C, L) > a(X, L)`.
pub fn curve_violation_scan(rec: &FanoRecord, scan_bound: u32) -> Result<Vec<QVector>> {
    let model = rec.model()?;
    let minus_k = model.anticanonical();
    let a = invariant_report(&model, &minus_k)?.a;
    curve_violation_scan_with(rec, &a, scan_bound)
}

/// As [`curve_violation_scan`] with a given `a(X, L)`.
pub fn curve_violation_scan_with(rec: &FanoRecord, a_x: &Rational, scan_bound: u32) -> Result<Vec<QVector>> {
    let bound = curve_degree_bound(a_x)?;
    let minus_k: DivisorClass = rec.anticanonical();
    let mut out = Vec::new();
    for p in lattice_points(rec.rank, scan_bound) {
        let coords = QVector::from_ints(&p);
        if pair(&minus_k, &CurveClass::new(coords.clone(), rec.curve_pairing.clone())?)? < bound {
            out.push(coords);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordResult {
    pub name: String,
    pub computed: String,
    pub expected: String,
    #[serde(rename = "match")]
    pub matched: bool,
    pub witnesses: Vec<Witness>,
    #[serde(skip)]
    pub computed_exceptional_set: String,
    #[serde(skip)]
    pub expected_exceptional_set: String,
    #[serde(skip)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub unclassified: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub results: Vec<RecordResult>,
    pub summary: Summary,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }
}

fn check_record(rec: &FanoRecord, scan_bound: u32) -> RecordResult {
    let expected = rec.expected.verdict;
    let (computed, witnesses, set, error) = match classify(rec, scan_bound) {
        Ok(v) => (v.level.as_str().to_string(), v.witnesses, v.exceptional_set, None),
        Err(e @ Error::InsufficientAnnotations { .. }) => {
            (VerdictLevel::Unclassified.as_str().to_string(), Vec::new(), String::new(), Some(e.to_string()))
        }
        Err(e) => (format!("error: {e}"), Vec::new(), String::new(), Some(e.to_string())),
    };
    let matched = computed == expected.as_str() && set == rec.expected.exceptional_set;
    RecordResult {
        name: rec.name.clone(),
        computed,
        expected: expected.as_str().to_string(),
        matched,
        witnesses,
        computed_exceptional_set: set,
        expected_exceptional_set: rec.expected.exceptional_set.clone(),
        error,
    }
}

/// Classifies every record in parallel and compares with the stored
/// verdicts. Records expected to be unclassified never count as failures.
pub fn verify_all(records: &[FanoRecord], scan_bound: u32) -> Report {
    let mut results: Vec<RecordResult> = records.par_iter().map(|r| check_record(r, scan_bound)).collect();
    results.sort_by(|a, b| a.name.cmp(&b.name));
    let mut summary = Summary::default();
    for r in &results {
        if r.expected == VerdictLevel::Unclassified.as_str() {
            summary.unclassified += 1;
        } else if r.matched {
            summary.pass += 1;
        } else {
            summary.fail += 1;
        }
    }
    let mut warnings = Vec::new();
    if records.is_empty() {
        warnings.push("no records to verify".to_string());
    }
    Report { results, summary, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fano_db::{find, load_builtin};

    fn verdict(name: &str) -> BalancedVerdict {
        let recs = load_builtin().unwrap();
        classify(find(&recs, name).unwrap(), DEFAULT_SCAN_BOUND).unwrap()
    }

    #[test]
    fn rank_two_examples() {
        let v = verdict("rank2-d62");
        assert_eq!(v.level, VerdictLevel::Balanced);
        assert_eq!(v.exceptional_set, "D");

        let v = verdict("rank2-d24");
        assert_eq!(v.level, VerdictLevel::WeaklyBalanced);
        assert!(v.witnesses.iter().any(|w| w.a == Some(int(1))
            && w.b == Some(2)
            && w.outcome == ComparisonOutcome { a_cmp: Cmp::EQ, b_cmp: Cmp::EQ }));

        let v = verdict("rank2-d6");
        assert_eq!(v.level, VerdictLevel::WeaklyABalanced);
        assert!(v.witnesses.iter().any(|w| w.b == Some(8) && w.outcome.b_cmp == Cmp::GT));
    }

    #[test]
    fn index_two() {
        let v = verdict("rank1-r2-d40");
        assert_eq!(v.level, VerdictLevel::WeaklyBalanced);
        assert_eq!(v.exceptional_set, "");
    }

    #[test]
    fn degree_two_is_unclassified() {
        let recs = load_builtin().unwrap();
        let r = find(&recs, "rank1-r1-d2").unwrap();
        assert!(matches!(classify(r, 20), Err(Error::InsufficientAnnotations { .. })));
    }

    #[test]
    fn small_scan_bound_rejected() {
        let recs = load_builtin().unwrap();
        assert_eq!(classify(&recs[0], 4), Err(Error::InvalidScanBound(4)));
    }

    #[test]
    fn line_candidates() {
        let recs = load_builtin().unwrap();
        let d62 = find(&recs, "rank2-d62").unwrap();
        assert_eq!(curve_violation_scan(d62, 20).unwrap(), vec![QVector::from_ints(&[0, 1])]);
        let d30 = find(&recs, "rank2-d30").unwrap();
        assert_eq!(curve_violation_scan(d30, 20).unwrap(), vec![QVector::from_ints(&[1, 0])]);
        assert!(curve_violation_scan_with(d30, &int(2), 20).unwrap().is_empty());
    }

    #[test]
    fn lexicographic_outcomes() {
        let c = ComparisonOutcome::compare(&rat(1, 2), Some(5), &int(1), 2);
        assert_eq!(c, ComparisonOutcome { a_cmp: Cmp::LT, b_cmp: Cmp::NA });
        let c = ComparisonOutcome::compare(&int(1), None, &int(1), 2);
        assert_eq!(c.b_cmp, Cmp::GT);
        assert!(ComparisonOutcome::compare(&int(1), Some(1), &int(1), 2).is_strictly_less());
    }

    #[test]
    fn verify_builtin() {
        let report = verify_all(&load_builtin().unwrap(), DEFAULT_SCAN_BOUND);
        for r in &report.results {
            assert!(
                r.matched || r.expected == "unclassified",
                "{}: computed {} [{}], expected {} [{}] {:?}",
                r.name,
                r.computed,
                r.computed_exceptional_set,
                r.expected,
                r.expected_exceptional_set,
                r.error
            );
        }
        assert_eq!(report.summary, Summary { pass: 25, fail: 0, unclassified: 1 });
        assert!(verify_all(&[], 20).warnings.len() == 1);
    }
}

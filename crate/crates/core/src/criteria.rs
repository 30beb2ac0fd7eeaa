//! Numeric certificates for adjoint positivity and curve degree bounds.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{Pow, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, serde_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    ReiderEffective,
    ReiderSeparates,
    SiuBound,
    AngehrnSiu,
    BendAndBreak,
    DeformationFloor,
    CurveDegreeBound,
    WBABBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub holds: bool,
    #[serde(with = "serde_rational")]
    pub threshold: Rational,
    #[serde(with = "serde_rational")]
    pub attained: Rational,
    pub caveats: String,
}

const REIDER_EFFECTIVE_CAVEAT: &str = "unless some effective D has L.D = 0, D^2 = -1 \
or L.D = 1, D^2 = 0";
const REIDER_SEPARATES_CAVEAT: &str = "unless some effective D has L.D = 0, D^2 in {-1,-2} \
or L.D = 1, D^2 in {0,-1} or L.D = 2, D^2 = 0 (or L = 3D with D^2 = 1)";

fn at_least(kind: CertificateKind, attained: &Rational, threshold: i64, caveats: &str) -> Certificate {
    Certificate {
        kind,
        holds: *attained >= int(threshold),
        threshold: int(threshold),
        attained: attained.clone(),
        caveats: caveats.to_string(),
    }
}

/// `|K + L|` is base point free when `L^2 >= 5`, outside the caveat configurations.
pub fn reider_effective(l2: &Rational) -> Certificate {
    at_least(CertificateKind::ReiderEffective, l2, 5, REIDER_EFFECTIVE_CAVEAT)
}

/// `|K + L|` separates points when `L^2 >= 10`, outside the caveat configurations.
pub fn reider_separates(l2: &Rational) -> Certificate {
    at_least(CertificateKind::ReiderSeparates, l2, 10, REIDER_SEPARATES_CAVEAT)
}

fn positive_dim(n: i64) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidDimension(format!("dimension {n} must be positive")));
    }
    Ok(())
}

/// Upper bound `n + 1` for `a(Y, L)` with `L` big and nef.
pub fn siu_bound(n: i64) -> Result<Rational> {
    positive_dim(n)?;
    Ok(int(n + 1))
}

/// `C(n+1, 2)^dimZ`, or `n^dimZ` when `conjectural` is set.
pub fn angehrn_siu_threshold(n: i64, dim_z: i64, conjectural: bool) -> Result<Rational> {
    positive_dim(n)?;
    if dim_z < 1 || dim_z > n {
        return Err(Error::InvalidDimension(format!("dim Z = {dim_z} outside 1..={n}")));
    }
    let base = if conjectural { BigInt::from(n) } else { binomial(BigInt::from(n + 1), BigInt::from(2)) };
    Ok(Rational::from_integer(Pow::pow(base, dim_z as u32)))
}

pub fn bend_and_break_bound(n: i64) -> Result<Rational> {
    positive_dim(n)?;
    Ok(int(n + 1))
}

/// Least anticanonical degree of a dominating family of rational curves.
pub fn deformation_floor() -> Rational {
    int(2)
}

fn positive_a(a: &Rational) -> Result<()> {
    if !a.is_positive() {
        return Err(Error::NonpositiveA(fmt_rational(a)));
    }
    Ok(())
}

/// `2 / a`: curves with `a(C, L) > a` have `L`-degree strictly below this.
pub fn curve_degree_bound(a: &Rational) -> Result<Rational> {
    positive_a(a)?;
    Ok(int(2) / a)
}

/// `delta / a^n`, with `delta` supplied by the caller.
pub fn wbab_degree_bound(n: i64, a: &Rational, delta: &Rational) -> Result<Rational> {
    positive_dim(n)?;
    positive_a(a)?;
    if !delta.is_positive() {
        return Err(Error::NonpositiveA(fmt_rational(delta)));
    }
    Ok(delta / Pow::pow(a.clone(), n as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn reider_thresholds() {
        assert!(reider_effective(&int(12)).holds);
        assert!(reider_effective(&int(5)).holds);
        assert!(!reider_effective(&int(4)).holds);
        assert!(reider_separates(&int(12)).holds);
        assert!(reider_separates(&int(10)).holds);
        assert!(!reider_separates(&int(8)).holds);
        assert!(!reider_effective(&int(4)).caveats.is_empty());
        let c = reider_separates(&rat(19, 2));
        assert_eq!((c.threshold, c.attained), (int(10), rat(19, 2)));
    }

    #[test]
    fn dimension_bounds() {
        assert_eq!(siu_bound(3).unwrap(), int(4));
        assert_eq!(siu_bound(1).unwrap(), int(2));
        assert_eq!(siu_bound(2).unwrap(), int(3));
        assert!(siu_bound(0).is_err());
        assert_eq!(bend_and_break_bound(3).unwrap(), int(4));
        assert_eq!(bend_and_break_bound(2).unwrap(), int(3));
        assert_eq!(bend_and_break_bound(1).unwrap(), int(2));
        assert_eq!(deformation_floor(), int(2));
    }

    #[test]
    fn angehrn_siu() {
        assert_eq!(angehrn_siu_threshold(3, 1, false).unwrap(), int(6));
        assert_eq!(angehrn_siu_threshold(3, 3, false).unwrap(), int(216));
        assert_eq!(angehrn_siu_threshold(2, 1, false).unwrap(), int(3));
        assert_eq!(angehrn_siu_threshold(3, 2, true).unwrap(), int(9));
        assert!(matches!(angehrn_siu_threshold(3, 4, false), Err(Error::InvalidDimension(_))));
        assert!(angehrn_siu_threshold(3, 0, false).is_err());
    }

    #[test]
    fn degree_bounds() {
        assert_eq!(curve_degree_bound(&int(1)).unwrap(), int(2));
        assert_eq!(curve_degree_bound(&int(2)).unwrap(), int(1));
        assert_eq!(curve_degree_bound(&rat(1, 2)).unwrap(), int(4));
        assert!(matches!(curve_degree_bound(&int(0)), Err(Error::NonpositiveA(_))));
        assert_eq!(wbab_degree_bound(3, &int(1), &int(64)).unwrap(), int(64));
        assert_eq!(wbab_degree_bound(2, &int(2), &int(9)).unwrap(), rat(9, 4));
        assert_eq!(wbab_degree_bound(5, &int(1), &rat(7, 3)).unwrap(), rat(7, 3));
        assert!(wbab_degree_bound(2, &int(-1), &int(9)).is_err());
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(reider_effective(&int(12))).unwrap();
        assert_eq!(v["kind"], "ReiderEffective");
        assert_eq!(v["threshold"], "5");
        assert_eq!(v["attained"], "12");
    }
}

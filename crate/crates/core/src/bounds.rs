//! Lower bounds on `C1` and `C2` and closed-form cost predictions.

use serde::Serialize;

use crate::dft::DftParams;
use crate::error::{Error, Result};
use crate::gf::PrimeField;
use crate::linalg::MatrixFq;
use crate::netsim::SystemConfig;
use crate::universal::ps_params;
use crate::vandermonde::vdm_params;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Universal,
    Dft,
    Vandermonde,
    Lagrange,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Universal,
        Algorithm::Dft,
        Algorithm::Vandermonde,
        Algorithm::Lagrange,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Universal => "universal",
            Algorithm::Dft => "dft",
            Algorithm::Vandermonde => "vandermonde",
            Algorithm::Lagrange => "lagrange",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::BadConfig(format!("unknown algorithm {s:?}")))
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Smallest `T` with `(p+1)^T >= K`.
pub fn c1_lower_universal(k: usize, p: usize) -> usize {
    let base = (p + 1) as u128;
    let (mut t, mut acc) = (0usize, 1u128);
    while acc < k as u128 {
        acc *= base;
        t += 1;
    }
    t
}

/// Positive root of `p^2 T^2 - p(p-2) T + 2(1-K) = 0` and its exact ceiling.
///
/// Returns `(0.0, 0)` for `K <= 1`.
pub fn c2_lower_universal(k: usize, p: usize) -> (f64, usize) {
    if k <= 1 {
        return (0.0, 0);
    }
    let (pf, kf) = (p as f64, k as f64);
    let real = (pf - 2.0) / (2.0 * pf) + ((pf - 2.0).powi(2) + 8.0 * (kf - 1.0)).sqrt() / (2.0 * pf);
    let (pi, ki) = (p as i128, k as i128);
    let holds = |t: i128| pi * pi * t * t - pi * (pi - 2) * t + 2 * (1 - ki) >= 0;
    // start just below the float estimate and walk to the exact answer
    let mut t = (real.floor() as i128 - 1).max(0);
    while t > 0 && holds(t - 1) {
        t -= 1;
    }
    while !holds(t) {
        t += 1;
    }
    (real, t as usize)
}

/// Closed-form `(C1, C2)` for an algorithm. `field` is needed for the
/// field-specific protocols.
pub fn predict_costs(
    k: usize,
    p: usize,
    algorithm: Algorithm,
    field: Option<&PrimeField>,
) -> Result<(usize, usize)> {
    let need_field = || {
        field.ok_or_else(|| Error::BadConfig(format!("{algorithm} predictions need a field")))
    };
    match algorithm {
        Algorithm::Universal => {
            if k <= 1 {
                return Ok((0, 0));
            }
            let pr = ps_params(k, p)?;
            Ok((pr.rounds(), pr.predicted_c2()))
        }
        Algorithm::Dft => {
            let f = need_field()?;
            let pr = DftParams::new(f, k, p)?;
            Ok((pr.h, pr.h))
        }
        Algorithm::Vandermonde | Algorithm::Lagrange => {
            let config = SystemConfig::new(k, p, need_field()?)?;
            let pr = vdm_params(&config, None)?;
            let one = (pr.predicted_c1(), pr.predicted_c2());
            Ok(if algorithm == Algorithm::Lagrange {
                (2 * one.0, 2 * one.1)
            } else {
                one
            })
        }
    }
}

/// `ceil(log_{p+1} K)` when some row of `a` has no zero entry, else 0.
pub fn specific_c1_lower(a: &MatrixFq, p: usize) -> usize {
    let full_row = (0..a.rows()).any(|i| a.row(i).iter().all(|v| !v.is_zero()));
    if full_row {
        c1_lower_universal(a.rows(), p)
    } else {
        0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub algo: Algorithm,
    pub c1: Option<usize>,
    pub c2: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub k: usize,
    pub p: usize,
    pub q: Option<u32>,
    pub c1_lower: usize,
    pub c2_lower_real: f64,
    pub c2_lower: usize,
    pub predictions: Vec<Prediction>,
}

/// Bounds plus a prediction (or the reason there is none) per algorithm.
pub fn bound_report(k: usize, p: usize, field: Option<&PrimeField>) -> BoundReport {
    let (c2_lower_real, c2_lower) = c2_lower_universal(k, p);
    let predictions = Algorithm::ALL
        .into_iter()
        .map(|algo| match predict_costs(k, p, algo, field) {
            Ok((c1, c2)) => Prediction {
                algo,
                c1: Some(c1),
                c2: Some(c2),
                skipped: None,
            },
            Err(e) => Prediction {
                algo,
                c1: None,
                c2: None,
                skipped: Some(e.to_string()),
            },
        })
        .collect();
    BoundReport {
        k,
        p,
        q: field.map(|f| f.modulus()),
        c1_lower: c1_lower_universal(k, p),
        c2_lower_real,
        c2_lower,
        predictions,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dft_matrix;
    use proptest::prelude::*;

    #[test]
    fn c1_examples() {
        assert_eq!(c1_lower_universal(9, 2), 2);
        assert_eq!(c1_lower_universal(1, 1), 0);
        assert_eq!(c1_lower_universal(1, 5), 0);
        assert_eq!(c1_lower_universal(5, 1), 3);
        assert_eq!(c1_lower_universal(1024, 1), 10);
        assert_eq!(c1_lower_universal(1025, 1), 11);
    }

    #[test]
    fn c2_examples() {
        let (r, c) = c2_lower_universal(4, 1);
        assert!((r - 2.0).abs() < 1e-12 && c == 2);
        let (r, c) = c2_lower_universal(9, 2);
        assert!((r - 2.0).abs() < 1e-12 && c == 2);
        let (r, c) = c2_lower_universal(1024, 1);
        assert!((r - 44.736).abs() < 1e-3 && c == 45);
        assert_eq!(c2_lower_universal(1, 3), (0.0, 0));
    }

    #[test]
    fn root_satisfies_the_quadratic() {
        for p in 1..6usize {
            for k in 2..500usize {
                let (r, _) = c2_lower_universal(k, p);
                let (pf, kf) = (p as f64, k as f64);
                let v = pf * pf * r * r - pf * (pf - 2.0) * r + 2.0 * (1.0 - kf);
                assert!(v.abs() < 1e-6, "K={k} p={p}");
            }
        }
    }

    #[test]
    fn prediction_examples() {
        assert_eq!(predict_costs(9, 2, Algorithm::Universal, None), Ok((2, 2)));
        assert_eq!(predict_costs(5, 1, Algorithm::Universal, None), Ok((3, 4)));
        let f17 = PrimeField::new(17).unwrap();
        assert_eq!(predict_costs(16, 3, Algorithm::Dft, Some(&f17)), Ok((2, 2)));
        let f13 = PrimeField::new(13).unwrap();
        assert_eq!(predict_costs(6, 1, Algorithm::Vandermonde, Some(&f13)), Ok((3, 3)));
        assert_eq!(predict_costs(6, 1, Algorithm::Lagrange, Some(&f13)), Ok((6, 6)));
        assert_eq!(
            predict_costs(6, 1, Algorithm::Dft, Some(&f13)),
            Err(Error::NotAPower { k: 6, base: 2 })
        );
        assert!(matches!(predict_costs(16, 3, Algorithm::Dft, None), Err(Error::BadConfig(_))));
    }

    #[test]
    fn sqrt2_competitive_at_1024() {
        let (c1, c2) = predict_costs(1024, 1, Algorithm::Universal, None).unwrap();
        assert_eq!((c1, c2), (10, 62));
        let (real, _) = c2_lower_universal(1024, 1);
        assert!(c2 as f64 / real <= 2f64.sqrt());
    }

    #[test]
    fn specific_examples() {
        let f = PrimeField::new(17).unwrap();
        let ones = MatrixFq::from_fn(&f, 9, 9, |_, _| f.one());
        assert_eq!(specific_c1_lower(&ones, 2), 2);
        assert_eq!(specific_c1_lower(&MatrixFq::identity(&f, 9), 2), 0);
        assert_eq!(specific_c1_lower(&dft_matrix(&f, 16).unwrap(), 3), 2);
    }

    #[test]
    fn report_marks_unavailable_algorithms() {
        let r = bound_report(4, 1, None);
        assert_eq!((r.c1_lower, r.c2_lower), (2, 2));
        assert!(r.predictions[0].skipped.is_none());
        assert!(r.predictions[1].skipped.is_some());
        let r = bound_report(1, 1, None);
        assert_eq!(r.c1_lower, 0);
    }

    proptest! {
        #[test]
        fn integer_c1_matches_float_log(k in 1usize..100_000, p in 1usize..8) {
            let f = ((k as f64).ln() / ((p + 1) as f64).ln()).ceil() as usize;
            // float log may land a hair above an exact power
            let exact = c1_lower_universal(k, p);
            prop_assert!(exact == f || (exact + 1 == f && (p + 1).pow(exact as u32) == k));
        }

        #[test]
        fn c2_ceiling_is_the_float_ceiling(k in 2usize..1_000_000, p in 1usize..8) {
            let (r, c) = c2_lower_universal(k, p);
            prop_assert!((c as f64 - r.ceil()).abs() <= 1.0);
            prop_assert!(c as f64 >= r - 1e-9 && (c as f64) < r + 1.0);
        }

        #[test]
        fn universal_prediction_respects_bounds(k in 2usize..5000, p in 1usize..6) {
            let (c1, c2) = predict_costs(k, p, Algorithm::Universal, None).unwrap();
            prop_assert_eq!(c1, c1_lower_universal(k, p));
            prop_assert!(c2 >= c2_lower_universal(k, p).1);
            prop_assert!(c2 >= c1);
        }
    }
}

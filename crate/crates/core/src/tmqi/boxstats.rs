//! Five-number summaries for boxplots.
//!
//! Quartiles are medians of the lower and upper halves of the sorted data,
//! with the overall median excluded from both halves when the count is odd.
//! Whiskers reach the most extreme data within 1.5 IQR of the quartiles;
//! everything beyond is an outlier.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_lo: f64,
    pub whisker_hi: f64,
    pub outliers: Vec<f64>,
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

pub fn boxstats(values: &[f64]) -> Result<BoxStats> {
    if values.is_empty() {
        return Err(Error::Param("boxstats of an empty list".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Param("boxstats requires finite values".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let median = median_sorted(&v);
    let (q1, q3) = if n == 1 {
        (v[0], v[0])
    } else {
        (
            median_sorted(&v[..n / 2]),
            median_sorted(&v[n.div_ceil(2)..]),
        )
    };
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let mut inside = v
        .iter()
        .copied()
        .filter(|&x| x >= lo_fence && x <= hi_fence);
    let whisker_lo = inside.clone().next().unwrap_or(q1).min(q1);
    let whisker_hi = inside.next_back().unwrap_or(q3).max(q3);
    let outliers = v
        .iter()
        .copied()
        .filter(|&x| x < lo_fence || x > hi_fence)
        .collect();
    Ok(BoxStats {
        q1,
        median,
        q3,
        whisker_lo,
        whisker_hi,
        outliers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_to_five() {
        let b = boxstats(&[3.0, 1.0, 5.0, 2.0, 4.0]).unwrap();
        assert_eq!((b.q1, b.median, b.q3), (1.5, 3.0, 4.5));
        assert_eq!((b.whisker_lo, b.whisker_hi), (1.0, 5.0));
        assert!(b.outliers.is_empty());
    }

    #[test]
    fn constant_and_single() {
        for v in [vec![2.5; 7], vec![2.5]] {
            let b = boxstats(&v).unwrap();
            assert!([b.q1, b.median, b.q3, b.whisker_lo, b.whisker_hi]
                .iter()
                .all(|&x| x == 2.5));
            assert!(b.outliers.is_empty());
        }
    }

    #[test]
    fn even_count_and_outlier() {
        let b = boxstats(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 100.0]).unwrap();
        assert_eq!((b.q1, b.median, b.q3), (2.5, 4.5, 6.5));
        assert_eq!(b.whisker_hi, 7.0);
        assert_eq!(b.outliers, vec![100.0]);
    }

    #[test]
    fn rejects_empty_and_nan() {
        assert!(boxstats(&[]).is_err());
        assert!(boxstats(&[1.0, f64::NAN]).is_err());
    }

    proptest! {
        #[test]
        fn ordering_holds(v in prop::collection::vec(-1e6f64..1e6, 1..60)) {
            let b = boxstats(&v).unwrap();
            prop_assert!(b.whisker_lo <= b.q1 && b.q1 <= b.median);
            prop_assert!(b.median <= b.q3 && b.q3 <= b.whisker_hi);
            for o in &b.outliers {
                prop_assert!(*o < b.whisker_lo || *o > b.whisker_hi);
            }
        }
    }
}

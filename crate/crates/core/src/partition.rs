//! Quantile partitions of a numeric predictor's sample range into
//! half-open intervals `(z_{k-1}, z_k]`.

use crate::error::{Error, Result};

/// Breakpoints `z_0 < z_1 < ... < z_K` and the observations in each interval.
///
/// Interval `k` (1-based in the math, index `k - 1` here) holds every
/// observation with `z_{k-1} < x <= z_k`. Members are listed in increasing
/// order of their value, with row index only separating exact ties.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantilePartition {
    breakpoints: Vec<f64>,
    members: Vec<Vec<usize>>,
}

/// Offset below the smallest observation used for `z_0`.
pub fn lower_offset(min_value: f64) -> f64 {
    f64::max(1e-9, 1e-9 * min_value.abs())
}

/// Nearest-rank quantile partition with `K` requested intervals.
///
/// `z_k` is the order statistic of rank `ceil(k n / K)`. Equal consecutive
/// breakpoints are merged, so the returned partition may have fewer than `K`
/// intervals but never an empty one.
pub fn build_partition(values: &[f64], k: usize) -> Result<QuantilePartition> {
    let n = values.len();
    if k < 1 {
        return Err(Error::InvalidArgument("K must be at least 1".into()));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "K = {k} exceeds the number of observations ({n})"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite value in column".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let min = values[order[0]];
    let max = values[order[n - 1]];
    if min == max {
        return Err(Error::DegenerateColumn);
    }

    let mut breakpoints = Vec::with_capacity(k + 1);
    breakpoints.push(min - lower_offset(min));
    for q in 1..=k {
        let rank = (q * n).div_ceil(k);
        let z = values[order[rank - 1]];
        if z > *breakpoints.last().unwrap() {
            breakpoints.push(z);
        }
    }
    debug_assert_eq!(*breakpoints.last().unwrap(), max);

    let mut members = vec![Vec::new(); breakpoints.len() - 1];
    let mut interval = 0;
    for &i in &order {
        while values[i] > breakpoints[interval + 1] {
            interval += 1;
        }
        members[interval].push(i);
    }
    Ok(QuantilePartition {
        breakpoints,
        members,
    })
}

impl QuantilePartition {
    /// Number of intervals `K`.
    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Observation indices in interval `k` (0-based).
    pub fn members(&self, k: usize) -> &[usize] {
        &self.members[k]
    }

    pub fn counts(&self) -> Vec<usize> {
        self.members.iter().map(Vec::len).collect()
    }

    pub fn n(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }

    /// 1-based index `k` with `x` in `(z_{k-1}, z_k]`.
    pub fn interval_index(&self, x: f64) -> Result<usize> {
        let z = &self.breakpoints;
        if !(x > z[0] && x <= z[z.len() - 1]) {
            return Err(Error::OutOfRange(x));
        }
        // first breakpoint >= x
        Ok(z.partition_point(|&b| b < x))
    }

    /// Like [`interval_index`](Self::interval_index) but clamps values outside
    /// the range to the first or last interval.
    pub fn interval_index_clamped(&self, x: f64) -> usize {
        let z = &self.breakpoints;
        z.partition_point(|&b| b < x).clamp(1, self.k())
    }
}

/// Free-function form of [`QuantilePartition::interval_index`].
pub fn interval_index(p: &QuantilePartition, x: f64) -> Result<usize> {
    p.interval_index(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn even_split_of_four_values() {
        let p = build_partition(&[1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(p.k(), 2);
        assert!(p.breakpoints()[0] < 1.0);
        assert_eq!(&p.breakpoints()[1..], &[2.0, 4.0]);
        assert_eq!(p.counts(), vec![2, 2]);
    }

    #[test]
    fn thirty_distinct_values_five_intervals() {
        let values: Vec<f64> = (0..30).map(|i| ((i * 17) % 30) as f64 / 7.0).collect();
        let p = build_partition(&values, 5).unwrap();
        assert_eq!(p.counts(), vec![6; 5]);
    }

    #[test]
    fn ties_merge_breakpoints() {
        let p = build_partition(&[1.0, 1.0, 1.0, 2.0], 4).unwrap();
        assert_eq!(p.k(), 2);
        assert_eq!(&p.breakpoints()[1..], &[1.0, 2.0]);
        assert_eq!(p.counts(), vec![3, 1]);
    }

    #[test]
    fn lower_breakpoint_offset() {
        let p = build_partition(&[1e12, 2e12], 1).unwrap();
        assert_eq!(p.breakpoints()[0], 1e12 - 1e3);
        let p = build_partition(&[0.0, 1.0], 1).unwrap();
        assert_eq!(p.breakpoints()[0], -1e-9);
    }

    #[test]
    fn degenerate_and_bad_k() {
        assert!(matches!(
            build_partition(&[3.0, 3.0, 3.0], 2),
            Err(Error::DegenerateColumn)
        ));
        assert!(matches!(
            build_partition(&[1.0, 2.0], 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            build_partition(&[1.0, 2.0], 3),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn interval_lookup() {
        let p = QuantilePartition {
            breakpoints: vec![0.0, 1.0, 2.0],
            members: vec![vec![], vec![]],
        };
        assert_eq!(p.interval_index(1.0).unwrap(), 1);
        assert_eq!(p.interval_index(1.5).unwrap(), 2);
        assert_eq!(p.interval_index(2.0).unwrap(), 2);
        assert!(matches!(p.interval_index(0.0), Err(Error::OutOfRange(_))));
        assert!(p.interval_index(2.5).is_err());
        assert_eq!(p.interval_index_clamped(-4.0), 1);
        assert_eq!(p.interval_index_clamped(9.0), 2);
    }

    proptest! {
        #[test]
        fn partition_covers_data(values in prop::collection::vec(-50i32..50, 2..80), k in 1usize..12) {
            let values: Vec<f64> = values.into_iter().map(|v| v as f64 / 4.0).collect();
            prop_assume!(values.iter().any(|&v| v != values[0]));
            let k = k.min(values.len());
            let p = build_partition(&values, k).unwrap();
            let z = p.breakpoints();
            prop_assert!(z.windows(2).all(|w| w[0] < w[1]));
            prop_assert_eq!(p.n(), values.len());
            let mut seen = vec![0u8; values.len()];
            for kk in 0..p.k() {
                prop_assert!(!p.members(kk).is_empty());
                for &i in p.members(kk) {
                    seen[i] += 1;
                    prop_assert!(values[i] > z[kk] && values[i] <= z[kk + 1]);
                    prop_assert_eq!(p.interval_index(values[i]).unwrap(), kk + 1);
                }
            }
            prop_assert!(seen.iter().all(|&s| s == 1));
        }

        #[test]
        fn partition_ignores_row_order(values in prop::collection::vec(-1000i32..1000, 2..60), k in 1usize..10, seed in any::<u64>()) {
            let values: Vec<f64> = values.into_iter().map(f64::from).collect();
            prop_assume!(values.iter().any(|&v| v != values[0]));
            let k = k.min(values.len());
            let mut shuffled = values.clone();
            let len = shuffled.len();
            let mut s = seed;
            for i in (1..len).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            let a = build_partition(&values, k).unwrap();
            let b = build_partition(&shuffled, k).unwrap();
            prop_assert_eq!(a.breakpoints(), b.breakpoints());
            prop_assert_eq!(a.counts(), b.counts());
        }
    }
}

//! Dynamic time warping over feature matrices and the nearest-template
//! classifier built on it.

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

fn frame_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Path-length-normalized DTW distance with the symmetric step set
/// {(1,0), (0,1), (1,1)} and Euclidean local cost.
pub fn dtw_distance(a: &FeatureMatrix, b: &FeatureMatrix) -> Result<f64> {
    if a.dims != b.dims {
        return Err(Error::DimensionMismatch(format!(
            "dtw inputs have {} vs {} dims",
            a.dims, b.dims
        )));
    }
    if a.frames == 0 || b.frames == 0 {
        return Err(Error::EmptyInput("dtw needs non-empty sequences"));
    }

    let (n, m) = (a.frames, b.frames);
    let mut cost = vec![f64::INFINITY; n * m];
    // parent move that produced each cell: 0 start, 1 diag, 2 up, 3 left
    let mut parent = vec![0u8; n * m];
    let idx = |i: usize, j: usize| i * m + j;

    for i in 0..n {
        for j in 0..m {
            let local = frame_distance(a.row(i), b.row(j));
            if i == 0 && j == 0 {
                cost[idx(0, 0)] = local;
                continue;
            }
            let mut best = f64::INFINITY;
            let mut mv = 0u8;
            if i > 0 && j > 0 && cost[idx(i - 1, j - 1)] < best {
                best = cost[idx(i - 1, j - 1)];
                mv = 1;
            }
            if i > 0 && cost[idx(i - 1, j)] < best {
                best = cost[idx(i - 1, j)];
                mv = 2;
            }
            if j > 0 && cost[idx(i, j - 1)] < best {
                best = cost[idx(i, j - 1)];
                mv = 3;
            }
            cost[idx(i, j)] = best + local;
            parent[idx(i, j)] = mv;
        }
    }

    // walk the optimal path back to count its cells
    let mut path_len = 1usize;
    let (mut i, mut j) = (n - 1, m - 1);
    while (i, j) != (0, 0) {
        match parent[idx(i, j)] {
            1 => {
                i -= 1;
                j -= 1;
            }
            2 => i -= 1,
            3 => j -= 1,
            _ => break,
        }
        path_len += 1;
    }

    Ok(cost[idx(n - 1, m - 1)] / path_len as f64)
}

/// Label of the template with minimum DTW distance to the query. Ties break
/// toward the earliest template, so classification is deterministic.
pub fn dtw_classify<'a>(
    query: &FeatureMatrix,
    templates: &'a [(String, FeatureMatrix)],
) -> Result<&'a str> {
    if templates.is_empty() {
        return Err(Error::EmptyInput("classifier needs at least one template"));
    }
    let mut best: Option<(&str, f64)> = None;
    for (label, template) in templates {
        let d = dtw_distance(query, template)?;
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((label, d));
        }
    }
    Ok(best.expect("templates non-empty").0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feat(rows: &[&[f64]]) -> FeatureMatrix {
        let dims = rows[0].len();
        let mut m = FeatureMatrix::zeros(rows.len(), dims, Vec::new());
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[test]
    fn identical_sequences_have_zero_distance() {
        let a = feat(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]);
        assert_eq!(dtw_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn frame_duplication_costs_nothing() {
        let a = feat(&[&[1.0], &[2.0], &[3.0]]);
        let b = feat(&[&[1.0], &[1.0], &[2.0], &[2.0], &[3.0], &[3.0]]);
        assert_eq!(dtw_distance(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn distance_is_symmetric() {
        let a = feat(&[&[0.0], &[1.0], &[4.0], &[2.0]]);
        let b = feat(&[&[1.0], &[1.5], &[3.0]]);
        let ab = dtw_distance(&a, &b).unwrap();
        let ba = dtw_distance(&b, &a).unwrap();
        assert!((ab - ba).abs() < 1e-12);
        assert!(ab > 0.0);
    }

    #[test]
    fn differing_values_give_positive_distance() {
        let a = feat(&[&[0.0], &[0.0]]);
        let b = feat(&[&[0.0], &[0.1]]);
        assert!(dtw_distance(&a, &b).unwrap() > 0.0);
    }

    #[test]
    fn dim_mismatch_is_rejected() {
        let a = feat(&[&[0.0, 1.0]]);
        let b = feat(&[&[0.0]]);
        assert!(dtw_distance(&a, &b).is_err());
    }

    #[test]
    fn exact_template_wins() {
        let t0 = feat(&[&[0.0], &[1.0]]);
        let t1 = feat(&[&[5.0], &[6.0]]);
        let templates = vec![("a".to_string(), t0.clone()), ("b".to_string(), t1)];
        assert_eq!(dtw_classify(&t0, &templates).unwrap(), "a");
    }

    #[test]
    fn warped_copy_still_classified() {
        let t0 = feat(&[&[0.0], &[1.0], &[2.0]]);
        let t1 = feat(&[&[9.0], &[8.0], &[7.0]]);
        let warped = feat(&[&[0.0], &[0.0], &[1.0], &[1.0], &[2.0], &[2.0]]);
        let templates = vec![("a".to_string(), t0), ("b".to_string(), t1)];
        assert_eq!(dtw_classify(&warped, &templates).unwrap(), "a");
    }
}

//! Reporting metrics: relative improvement and Cohen's d effect size.

use crate::error::{Error, Result};

/// (r_p - r_t) / r_t * 100, the relative improvement of a proposed rate
/// over a target rate.
pub fn relative_improvement(r_proposed: f64, r_target: f64) -> Result<f64> {
    if !(r_target > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "relative improvement needs a positive target rate, got {r_target}"
        )));
    }
    Ok((r_proposed - r_target) / r_target * 100.0)
}

/// Cohen's d with pooled standard deviation:
/// (mean_a - mean_b) / sqrt(((n_a-1)s_a^2 + (n_b-1)s_b^2) / (n_a+n_b-2)).
/// A zero pooled deviation yields 0 for equal means and +-inf otherwise.
pub fn cohens_d(sample_a: &[f64], sample_b: &[f64]) -> Result<f64> {
    let (na, nb) = (sample_a.len(), sample_b.len());
    if na < 2 || nb < 2 {
        return Err(Error::InvalidArgument(format!(
            "cohens_d needs >= 2 points per sample, got {na} and {nb}"
        )));
    }
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let (ma, mb) = (mean(sample_a), mean(sample_b));
    let ssq = |s: &[f64], m: f64| s.iter().map(|v| (v - m) * (v - m)).sum::<f64>();
    let pooled_var = (ssq(sample_a, ma) + ssq(sample_b, mb)) / (na + nb - 2) as f64;
    let pooled_sd = pooled_var.sqrt();

    if pooled_sd == 0.0 {
        return Ok(if ma == mb {
            0.0
        } else if ma > mb {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        });
    }
    Ok((ma - mb) / pooled_sd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_published_average_pairs() {
        // Avg 0-20 accuracy pairs and their published relative improvements.
        let cases = [
            (85.28, 71.29, 19.62),
            (85.28, 77.34, 10.27),
            (85.28, 73.97, 15.29),
            (85.28, 77.78, 9.64),
        ];
        for (rp, rt, want) in cases {
            let got = relative_improvement(rp, rt).unwrap();
            assert!((got - want).abs() < 0.05, "({rp},{rt}): {got} vs {want}");
        }
    }

    #[test]
    fn equal_rates_give_zero() {
        assert_eq!(relative_improvement(55.5, 55.5).unwrap(), 0.0);
    }

    #[test]
    fn nonpositive_target_is_rejected() {
        assert!(relative_improvement(10.0, 0.0).is_err());
        assert!(relative_improvement(10.0, -5.0).is_err());
    }

    #[test]
    fn unit_pooled_sd_case() {
        // means 3 and 2, both variances 1 -> pooled sd exactly 1
        let d = cohens_d(&[2.0, 3.0, 4.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_samples_give_zero() {
        let s = [4.0, 5.0, 6.0];
        assert_eq!(cohens_d(&s, &s).unwrap(), 0.0);
    }

    #[test]
    fn swapping_arguments_negates_d() {
        let a = [1.0, 4.0, 5.0, 9.0];
        let b = [2.0, 2.5, 3.0];
        let ab = cohens_d(&a, &b).unwrap();
        let ba = cohens_d(&b, &a).unwrap();
        assert!((ab + ba).abs() < 1e-12);
    }

    #[test]
    fn degenerate_spread_signals_infinite_effect() {
        assert_eq!(
            cohens_d(&[2.0, 2.0], &[1.0, 1.0]).unwrap(),
            f64::INFINITY
        );
        assert_eq!(
            cohens_d(&[1.0, 1.0], &[2.0, 2.0]).unwrap(),
            f64::NEG_INFINITY
        );
        assert_eq!(cohens_d(&[1.0, 1.0], &[1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn small_samples_are_rejected() {
        assert!(cohens_d(&[1.0], &[1.0, 2.0]).is_err());
    }
}

//! Convergence-rate fitting on aggregate traces.

use crate::error::{Error, Result};

/// Least-squares diagnostics of a gap sequence: the slope of
/// `log(gap)` against `log(k)` (sublinear rate shape) and the `R^2` of
/// `log(gap)` against `k` (linear rate shape).
#[derive(Clone, Copy, Debug)]
pub struct RateFit {
    pub loglog_slope: f64,
    pub linear_r2: f64,
}

/// Fits both diagnostics over the given window. `ks` are (full) iteration
/// counts, `gaps` the positive objective gaps `F(x^k) - F*`.
pub fn fit_rate(ks: &[f64], gaps: &[f64]) -> Result<RateFit> {
    if ks.len() != gaps.len() {
        return Err(Error::DimensionMismatch {
            what: "rate fit window",
            expected: ks.len(),
            got: gaps.len(),
        });
    }
    if ks.len() < 2 {
        return Err(Error::InvalidProblem(
            "rate fit needs at least two rows".into(),
        ));
    }
    for (i, (&k, &g)) in ks.iter().zip(gaps).enumerate() {
        if k.is_nan() || k <= 0.0 {
            return Err(Error::InvalidProblem(format!(
                "iteration count {k} at row {i} must be positive"
            )));
        }
        if g.is_nan() || g <= 0.0 {
            return Err(Error::NonPositiveGap { index: i });
        }
    }
    let log_g: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let log_k: Vec<f64> = ks.iter().map(|k| k.ln()).collect();
    let loglog_slope = least_squares_slope(&log_k, &log_g);
    let linear_r2 = r_squared(ks, &log_g);
    Ok(RateFit {
        loglog_slope,
        linear_r2,
    })
}

/// Index range of the final decade of iteration counts
/// (`k >= k_max / 10`).
pub fn final_decade(ks: &[f64]) -> std::ops::Range<usize> {
    let k_max = ks.iter().fold(0.0_f64, |a, &b| a.max(b));
    let start = ks.iter().position(|&k| k >= k_max / 10.0).unwrap_or(0);
    start..ks.len()
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        cov += (xi - mx) * (yi - my);
        var += (xi - mx) * (xi - mx);
    }
    if var == 0.0 {
        0.0
    } else {
        cov / var
    }
}

fn r_squared(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        cov += (xi - mx) * (yi - my);
        var_x += (xi - mx) * (xi - mx);
        var_y += (yi - my) * (yi - my);
    }
    if var_y == 0.0 {
        // Constant sequence: perfectly affine.
        return 1.0;
    }
    if var_x == 0.0 {
        return 0.0;
    }
    (cov * cov) / (var_x * var_y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_has_slope_minus_one() {
        let ks: Vec<f64> = (1..=100).map(|k| k as f64).collect();
        let gaps: Vec<f64> = ks.iter().map(|k| 100.0 / k).collect();
        let fit = fit_rate(&ks, &gaps).unwrap();
        assert!((fit.loglog_slope + 1.0).abs() < 1e-6, "{}", fit.loglog_slope);
    }

    #[test]
    fn exact_geometric_has_unit_r2() {
        let ks: Vec<f64> = (1..=80).map(|k| k as f64).collect();
        let gaps: Vec<f64> = ks.iter().map(|k| 0.9_f64.powf(*k)).collect();
        let fit = fit_rate(&ks, &gaps).unwrap();
        assert!((fit.linear_r2 - 1.0).abs() < 1e-9, "{}", fit.linear_r2);
    }

    #[test]
    fn nonpositive_gap_is_an_error() {
        let err = fit_rate(&[1.0, 2.0], &[0.5, 0.0]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveGap { index: 1 }));
    }

    #[test]
    fn final_decade_selects_the_tail() {
        let ks: Vec<f64> = (1..=1000).map(|k| k as f64).collect();
        let range = final_decade(&ks);
        assert_eq!(range.start, 99); // first k >= 100
        assert_eq!(range.end, 1000);
    }
}

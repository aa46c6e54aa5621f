use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{check_finite, ConfidenceInterval, StatReport, StatsError};

const Z_975: f64 = 1.959963984540054;

/// Pearson's r with a two-sided t-test (n - 2 df) and a 95% Fisher-z
/// interval. The interval needs n >= 4.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<StatReport, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::TooFew { needed: 3, got: n });
    }
    check_finite(x)?;
    check_finite(y)?;
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = n - 2;
    let p = if r.abs() == 1.0 {
        0.0
    } else {
        let t = r * (df as f64 / (1.0 - r * r)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1");
        2.0 * dist.sf(t.abs())
    };
    let mut report = StatReport::new("pearson", r, p, n);
    report.df = Some(df as u32);
    if n >= 4 {
        let (low, high) = if r.abs() == 1.0 {
            (r, r)
        } else {
            let z = r.atanh();
            let half = Z_975 / ((n - 3) as f64).sqrt();
            ((z - half).tanh(), (z + half).tanh())
        };
        report.ci = Some(ConfidenceInterval { low, high, level: 0.95 });
    }
    Ok(report)
}

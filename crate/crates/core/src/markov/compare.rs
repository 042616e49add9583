//! Distribution comparison metrics over final-location histograms.

use crate::error::MarkovError;
use crate::lattice::FinalHistogram;
use crate::num;

/// Correlation coefficient and root-mean-squared error between two
/// histograms, over the flattened 81-cell grids.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Comparison {
    /// `cov(A,B) / (sigma_A sigma_B)`; `None` when either input has zero
    /// variance (undefined).
    pub corrcoef: Option<f64>,
    pub rmse: f64,
}

/// Compare two histograms cell by cell.
pub fn compare(a: &FinalHistogram, b: &FinalHistogram) -> Result<Comparison, MarkovError> {
    if a.total() == 0 || b.total() == 0 {
        return Err(MarkovError::EmptyHistogram);
    }
    let xs = a.flattened();
    let ys = b.flattened();
    let n = xs.len() as f64;

    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    let (mx, my) = (mean(&xs), mean(&ys));
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    let mut sq_err = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        cov += (x - mx) * (y - my);
        var_x += (x - mx) * (x - mx);
        var_y += (y - my) * (y - my);
        sq_err += (x - y) * (x - y);
    }
    let corrcoef = if var_x == 0.0 || var_y == 0.0 {
        None
    } else {
        Some(cov / num::sqrt(var_x * var_y))
    };
    Ok(Comparison {
        corrcoef,
        rmse: num::sqrt(sq_err / n),
    })
}

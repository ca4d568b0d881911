//! Linear least squares with coefficient standard errors.

/// Result of fitting `y ≈ Σ_k β_k φ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub coeffs: Vec<f64>,
    pub stderr: Vec<f64>,
    pub residuals: Vec<f64>,
    pub r_squared: f64,
}

/// Weighted least squares on the design matrix `rows` (one row per sample).
///
/// Returns `None` if the normal equations are singular or there are fewer
/// samples than unknowns.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64], w: Option<&[f64]>) -> Option<LinearFit> {
    let m = rows.len();
    let k = rows.first()?.len();
    if m < k || y.len() != m {
        return None;
    }
    let weight = |i: usize| w.map_or(1.0, |w| w[i]);
    let mut ata = vec![vec![0.0; k]; k];
    let mut aty = vec![0.0; k];
    for (i, row) in rows.iter().enumerate() {
        let wi = weight(i);
        for a in 0..k {
            aty[a] += wi * row[a] * y[i];
            for b in 0..k {
                ata[a][b] += wi * row[a] * row[b];
            }
        }
    }
    let inv = invert(&ata)?;
    let coeffs: Vec<f64> = (0..k)
        .map(|a| (0..k).map(|b| inv[a][b] * aty[b]).sum())
        .collect();
    let residuals: Vec<f64> = rows
        .iter()
        .zip(y)
        .map(|(row, yi)| yi - row.iter().zip(&coeffs).map(|(r, c)| r * c).sum::<f64>())
        .collect();
    let wsum: f64 = (0..m).map(weight).sum();
    let ybar: f64 = (0..m).map(|i| weight(i) * y[i]).sum::<f64>() / wsum;
    let ss_res: f64 = (0..m).map(|i| weight(i) * residuals[i].powi(2)).sum();
    let ss_tot: f64 = (0..m).map(|i| weight(i) * (y[i] - ybar).powi(2)).sum();
    let dof = m.saturating_sub(k);
    let sigma2 = if dof > 0 { ss_res / dof as f64 } else { 0.0 };
    let stderr = (0..k)
        .map(|a| (sigma2 * inv[a][a]).max(0.0).sqrt())
        .collect();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    Some(LinearFit {
        coeffs,
        stderr,
        residuals,
        r_squared,
    })
}

/// Fits `y ≈ slope·x + intercept`; returns the fit with coefficients `[slope, intercept]`.
pub fn line(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let rows: Vec<Vec<f64>> = x.iter().map(|&xi| vec![xi, 1.0]).collect();
    least_squares(&rows, y, None)
}

fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        let scale = m.iter().map(|r| r[col].abs()).fold(0.0, f64::max);
        if m[piv][col].abs() <= 1e-300 || m[piv][col].abs() <= 1e-14 * scale * 1e-6 {
            return None;
        }
        m.swap(col, piv);
        let d = m[col][col];
        for v in m[col].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != col {
                let factor = m[r][col];
                if factor != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= factor * m[col][c];
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub exponent: f64,
    /// Standard error of the slope from the weighted residuals.
    pub exponent_err: f64,
    pub amplitude: f64,
    pub window_lo: f64,
    pub window_hi: f64,
    pub points: usize,
    /// Weighted mean squared residual of `log y`.
    pub goodness: f64,
    pub p_c: Option<f64>,
}

/// Points of `(t, y)` inside `[lo, hi]` mapped to `(ln t, ln y, 1/t)`.
/// Weighting by `1/t` gives each e-fold of time equal weight.
fn log_points(
    t: &[f64],
    y: &[f64],
    lo: f64,
    hi: f64,
    needed: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    if t.len() != y.len() {
        return Err(Error::WidthMismatch {
            left: t.len(),
            right: y.len(),
        });
    }
    let mut pts = Vec::new();
    for (&ti, &yi) in t.iter().zip(y) {
        if ti < lo || ti > hi {
            continue;
        }
        if !(ti > 0.0) || !(yi > 0.0) {
            return Err(Error::NonPositive { t: ti, value: yi });
        }
        pts.push((ti.ln(), yi.ln(), 1.0 / ti));
    }
    if pts.len() < needed {
        return Err(Error::WindowTooSmall {
            lo,
            hi,
            points: pts.len(),
            needed,
        });
    }
    Ok(pts)
}

/// Least-squares line through `(ln t, ln y)` on `t ∈ [lo, hi]`.
pub fn fit_power_law(t: &[f64], y: &[f64], lo: f64, hi: f64) -> Result<FitResult> {
    let pts = log_points(t, y, lo, hi, 2)?;
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mu = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let mv = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let suu: f64 = pts.iter().map(|p| p.2 * (p.0 - mu).powi(2)).sum();
    let suv: f64 = pts.iter().map(|p| p.2 * (p.0 - mu) * (p.1 - mv)).sum();
    if suu <= 0.0 {
        return Err(Error::WindowTooSmall {
            lo,
            hi,
            points: 1,
            needed: 2,
        });
    }
    let slope = suv / suu;
    let intercept = mv - slope * mu;
    let rss: f64 = pts
        .iter()
        .map(|p| p.2 * (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let dof = pts.len().saturating_sub(2).max(1) as f64;
    let exponent_err = (rss / dof / suu).sqrt();
    Ok(FitResult {
        exponent: slope,
        exponent_err,
        amplitude: intercept.exp(),
        window_lo: lo,
        window_hi: hi,
        points: pts.len(),
        goodness: rss / sw,
        p_c: None,
    })
}

/// Coefficients `(c0, c1, c2)` of `ln y ≈ c0 + c1 u + c2 u²`, `u = ln t`.
pub fn fit_quadratic(t: &[f64], y: &[f64], lo: f64, hi: f64) -> Result<[f64; 3]> {
    let pts = log_points(t, y, lo, hi, 3)?;
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mu = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    // centered normal equations
    let mut a = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for &(u, v, w) in &pts {
        let x = u - mu;
        let basis = [1.0, x, x * x];
        for i in 0..3 {
            b[i] += w * basis[i] * v;
            for j in 0..3 {
                a[i][j] += w * basis[i] * basis[j];
            }
        }
    }
    let c = solve3(a, b).ok_or(Error::WindowTooSmall {
        lo,
        hi,
        points: pts.len(),
        needed: 3,
    })?;
    // undo the centering
    Ok([
        c[0] - c[1] * mu + c[2] * mu * mu,
        c[1] - 2.0 * c[2] * mu,
        c[2],
    ])
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PcMethod {
    /// Linear interpolation between the two grid points around a single sign change.
    Bracket,
    /// Root of a straight line through all curvatures (noisy grids).
    Regression,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PcEstimate {
    pub p_c: f64,
    pub method: PcMethod,
    pub window_lo: f64,
    pub window_hi: f64,
    /// `(p, curvature, slope)` per grid point.
    pub grid: Vec<(f64, f64, f64)>,
    /// Log-log slope interpolated to `p_c`.
    pub exponent_at_pc: f64,
    /// Power-law fit of every grid point, in grid order.
    pub fits: Vec<FitResult>,
}

impl PcEstimate {
    /// The power-law fit interpolated to `p_c` (amplitude in log space).
    pub fn fit_result(&self) -> FitResult {
        let at = |f: &dyn Fn(&FitResult) -> f64| {
            let g: Vec<(f64, f64, f64)> = self
                .grid
                .iter()
                .zip(&self.fits)
                .map(|(g, r)| (g.0, 0.0, f(r)))
                .collect();
            interpolate(&g, self.p_c)
        };
        FitResult {
            exponent: self.exponent_at_pc,
            exponent_err: at(&|r| r.exponent_err),
            amplitude: at(&|r| r.amplitude.ln()).exp(),
            window_lo: self.window_lo,
            window_hi: self.window_hi,
            points: self.fits.iter().map(|r| r.points).min().unwrap_or(0),
            goodness: at(&|r| r.goodness),
            p_c: Some(self.p_c),
        }
    }
}

fn interpolate(grid: &[(f64, f64, f64)], p: f64) -> f64 {
    let i = grid.partition_point(|g| g.0 < p).clamp(1, grid.len() - 1);
    let (a, b) = (grid[i - 1], grid[i]);
    a.2 + (b.2 - a.2) * (p - a.0) / (b.0 - a.0)
}

/// Critical point from a family of curves `(p, t, y)`: the swap rate at
/// which the curvature of `ln y` against `ln t` over `[lo, hi]` vanishes.
pub fn estimate_pc(family: &[(f64, Vec<f64>, Vec<f64>)], lo: f64, hi: f64) -> Result<PcEstimate> {
    if family.len() < 3 {
        return Err(Error::Invalid(format!(
            "need at least 3 swap rates, got {}",
            family.len()
        )));
    }
    let mut points = Vec::with_capacity(family.len());
    for (p, t, y) in family {
        let c = fit_quadratic(t, y, lo, hi)?;
        let fit = fit_power_law(t, y, lo, hi)?;
        points.push(((*p, c[2], fit.exponent), fit));
    }
    points.sort_by(|a, b| a.0 .0.total_cmp(&b.0 .0));
    let (grid, fits): (Vec<_>, Vec<_>) = points.into_iter().unzip();
    let changes: Vec<usize> = (1..grid.len())
        .filter(|&i| (grid[i - 1].1 > 0.0) != (grid[i].1 > 0.0))
        .collect();
    let (p_c, method) = match changes.as_slice() {
        [] => return Err(Error::NoCurvatureSignChange),
        [i] => {
            let (a, b) = (grid[i - 1], grid[*i]);
            (a.0 - a.1 * (b.0 - a.0) / (b.1 - a.1), PcMethod::Bracket)
        }
        _ => {
            let n = grid.len() as f64;
            let mp = grid.iter().map(|g| g.0).sum::<f64>() / n;
            let mc = grid.iter().map(|g| g.1).sum::<f64>() / n;
            let spp: f64 = grid.iter().map(|g| (g.0 - mp).powi(2)).sum();
            let spc: f64 = grid.iter().map(|g| (g.0 - mp) * (g.1 - mc)).sum();
            let slope = spc / spp;
            let root = mp - mc / slope;
            if !(slope != 0.0 && root >= grid[0].0 && root <= grid[grid.len() - 1].0) {
                return Err(Error::NoCurvatureSignChange);
            }
            (root, PcMethod::Regression)
        }
    };
    Ok(PcEstimate {
        p_c,
        method,
        window_lo: lo,
        window_hi: hi,
        exponent_at_pc: interpolate(&grid, p_c),
        grid,
        fits,
    })
}

use super::fit::{fit_power_law, FitResult};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VelocityFit {
    pub v_b: f64,
    pub v_b_err: f64,
    pub intercept: f64,
    /// Exponent of the front width, `std(front) ~ t^w`.
    pub width_exponent: f64,
    pub window_lo: f64,
    pub window_hi: f64,
}

/// Light-cone velocity from the mean front position and its spread across
/// trajectories, using times in `[lo, hi]`.
pub fn measure_velocity(
    t: &[f64],
    front: &[f64],
    front_std: &[f64],
    lo: f64,
    hi: f64,
) -> Result<VelocityFit> {
    if t.len() != front.len() || t.len() != front_std.len() {
        return Err(Error::WidthMismatch {
            left: t.len(),
            right: front.len().min(front_std.len()),
        });
    }
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(front)
        .filter(|(t, _)| **t >= lo && **t <= hi)
        .map(|(t, f)| (*t, *f))
        .collect();
    if pts.iter().any(|(_, f)| !f.is_finite()) {
        return Err(Error::NoSurvivors);
    }
    if pts.len() < 3 {
        return Err(Error::WindowTooSmall {
            lo,
            hi,
            points: pts.len(),
            needed: 3,
        });
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mf = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let stf: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - mf)).sum();
    let v = stf / stt;
    let intercept = mf - v * mt;
    let rss: f64 = pts
        .iter()
        .map(|p| (p.1 - intercept - v * p.0).powi(2))
        .sum();
    let width = fit_power_law(t, front_std, lo, hi)?;
    Ok(VelocityFit {
        v_b: v,
        v_b_err: (rss / (n - 2.0) / stt).sqrt(),
        intercept,
        width_exponent: width.exponent,
        window_lo: lo,
        window_hi: hi,
    })
}

/// Fits `v_B ~ (p_c − p)^a` over swap rates below `p_c`.
pub fn fit_velocity_exponent(ps: &[f64], v_b: &[f64], p_c: f64) -> Result<FitResult> {
    let d: Vec<f64> = ps.iter().map(|p| p_c - p).collect();
    let lo = d.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo > 0.0) {
        return Err(Error::Invalid(format!(
            "swap rates must lie below p_c = {p_c}"
        )));
    }
    // fit_power_law weights points by 1/x; undo that for an even fit over the grid
    let mut pairs: Vec<(f64, f64)> = d.iter().copied().zip(v_b.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let mut f = fit_power_law(&x, &y, lo, hi)?;
    f.p_c = Some(p_c);
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ballistic_diffusive_front() {
        let t: Vec<f64> = (0..=200).map(f64::from).collect();
        let front: Vec<f64> = t.iter().map(|t| 0.6 * t + 2.0).collect();
        let std: Vec<f64> = t.iter().map(|t| 0.8 * t.sqrt()).collect();
        let v = measure_velocity(&t, &front, &std, 20.0, 200.0).unwrap();
        assert!((v.v_b - 0.6).abs() < 1e-12);
        assert!((v.intercept - 2.0).abs() < 1e-10);
        assert!((v.width_exponent - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dead_ensembles_are_rejected() {
        let t = [1.0, 2.0, 3.0, 4.0];
        let f = [1.0, f64::NAN, 1.0, 1.0];
        assert_eq!(
            measure_velocity(&t, &f, &f, 1.0, 4.0),
            Err(Error::NoSurvivors)
        );
    }

    #[test]
    fn velocity_exponent_from_synthetic_data() {
        let ps = [0.12, 0.13, 0.14, 0.15, 0.16, 0.17, 0.18, 0.19];
        let v: Vec<f64> = ps
            .iter()
            .map(|p| 1.3 * (0.206 - p as &f64).powf(0.637))
            .collect();
        let f = fit_velocity_exponent(&ps, &v, 0.206).unwrap();
        assert!((f.exponent - 0.637).abs() < 1e-10);
        assert!(fit_velocity_exponent(&ps, &v, 0.15).is_err());
    }
}

use super::ExponentTable;
use crate::observables::OtocSlice;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observable {
    Density,
    Survival,
    Spreading,
}

impl Observable {
    pub const ALL: [Observable; 3] = [
        Observable::Density,
        Observable::Survival,
        Observable::Spreading,
    ];

    /// Critical growth exponent `y` in `O(t) ~ t^y`.
    pub fn exponent(self, e: &ExponentTable) -> f64 {
        match self {
            Observable::Density => e.theta,
            Observable::Survival => -e.delta,
            Observable::Spreading => e.spreading_exponent(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Observable::Density => "rho",
            Observable::Survival => "P",
            Observable::Spreading => "R2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Below,
    Above,
}

/// One curve in scaling coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct CollapseCurve {
    pub label: f64,
    pub branch: Branch,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Rescales curves `(p, t, y)` to `(t |p − p_c|^{ν∥}, y |p − p_c|^{y ν∥})`.
/// Points with nonpositive `t` or `y` are dropped.
pub fn rescale_collapse(
    curves: &[(f64, Vec<f64>, Vec<f64>)],
    p_c: f64,
    observable: Observable,
    e: &ExponentTable,
) -> Result<Vec<CollapseCurve>> {
    let yexp = observable.exponent(e);
    curves
        .iter()
        .map(|(p, t, y)| {
            let d = (p - p_c).abs();
            if d == 0.0 {
                return Err(Error::Invalid(format!(
                    "swap rate {p} sits on the critical point"
                )));
            }
            let (sx, sy) = (d.powf(e.nu_par), d.powf(yexp * e.nu_par));
            let (x, y) = positive(t, y).map(|(t, y)| (t * sx, y * sy)).unzip();
            Ok(CollapseCurve {
                label: *p,
                branch: if *p < p_c {
                    Branch::Below
                } else {
                    Branch::Above
                },
                x,
                y,
            })
        })
        .collect()
}

/// The same curves without any rescaling, branch assigned by `p_c`.
pub fn raw_curves(curves: &[(f64, Vec<f64>, Vec<f64>)], p_c: f64) -> Vec<CollapseCurve> {
    curves
        .iter()
        .map(|(p, t, y)| {
            let (x, y) = positive(t, y).unzip();
            CollapseCurve {
                label: *p,
                branch: if *p < p_c {
                    Branch::Below
                } else {
                    Branch::Above
                },
                x,
                y,
            }
        })
        .collect()
}

fn positive<'a>(t: &'a [f64], y: &'a [f64]) -> impl Iterator<Item = (f64, f64)> + 'a {
    t.iter()
        .zip(y)
        .filter(|(t, y)| **t > 0.0 && **y > 0.0)
        .map(|(t, y)| (*t, *y))
}

/// OTOC profiles at criticality in coordinates `(x t^{-1/z}, C t^{2δ})`,
/// one curve per time slice. Zero entries are dropped.
pub fn otoc_collapse(slices: &[OtocSlice], e: &ExponentTable) -> Vec<CollapseCurve> {
    let yexp = e.collapse_exponent_otoc();
    slices
        .iter()
        .filter(|s| s.t > 0)
        .map(|s| {
            let t = s.t as f64;
            let (sx, sy) = (t.powf(-1.0 / e.z), t.powf(yexp));
            let (x, y) =
                s.x.iter()
                    .zip(&s.c_mean)
                    .filter(|(_, c)| **c > 0.0)
                    .map(|(x, c)| (*x as f64 * sx, c * sy))
                    .unzip();
            CollapseCurve {
                label: t,
                branch: Branch::Below,
                x,
                y,
            }
        })
        .collect()
}

/// Mean squared spread of `log10 y` between curves, evaluated at the
/// centres of a grid of bins.
///
/// Bins are `bin_width` wide in `log10 x` when `log_x`, in `x` otherwise.
/// Each curve is linearly interpolated (in `log10 y`) at every centre inside
/// its own range; centres reached by fewer than two curves are skipped.
pub fn collapse_metric(curves: &[CollapseCurve], log_x: bool, bin_width: f64) -> Result<f64> {
    let prepared: Vec<Vec<(f64, f64)>> = curves
        .iter()
        .map(|c| {
            let mut pts: Vec<(f64, f64)> =
                c.x.iter()
                    .zip(&c.y)
                    .filter(|(x, y)| **y > 0.0 && x.is_finite() && (!log_x || **x > 0.0))
                    .map(|(x, y)| (if log_x { x.log10() } else { *x }, y.log10()))
                    .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            pts
        })
        .filter(|p| p.len() >= 2)
        .collect();
    let lo = prepared
        .iter()
        .map(|p| p[0].0)
        .fold(f64::INFINITY, f64::min);
    let hi = prepared
        .iter()
        .map(|p| p[p.len() - 1].0)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    let mut used = 0usize;
    if lo.is_finite() && hi.is_finite() {
        let first = (lo / bin_width).floor() as i64;
        let last = (hi / bin_width).ceil() as i64;
        for b in first..=last {
            let centre = (b as f64 + 0.5) * bin_width;
            let vals: Vec<f64> = prepared
                .iter()
                .filter_map(|p| interpolate(p, centre))
                .collect();
            if vals.len() < 2 {
                continue;
            }
            let m = vals.iter().sum::<f64>() / vals.len() as f64;
            total += vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / vals.len() as f64;
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::Invalid("no bin is shared by two curves".into()));
    }
    Ok(total / used as f64)
}

/// [`collapse_metric`] of each branch separately, `(below, above)`.
pub fn branch_metrics(curves: &[CollapseCurve], log_x: bool, bin_width: f64) -> Result<(f64, f64)> {
    let of = |b: Branch| {
        let group: Vec<CollapseCurve> = curves.iter().filter(|c| c.branch == b).cloned().collect();
        collapse_metric(&group, log_x, bin_width)
    };
    Ok((of(Branch::Below)?, of(Branch::Above)?))
}

fn interpolate(pts: &[(f64, f64)], x: f64) -> Option<f64> {
    if x < pts[0].0 || x > pts[pts.len() - 1].0 {
        return None;
    }
    let i = pts.partition_point(|p| p.0 < x);
    if i == 0 {
        return Some(pts[0].1);
    }
    let (a, b) = (pts[i - 1], pts[i]);
    if b.0 == a.0 {
        return Some(0.5 * (a.1 + b.1));
    }
    Some(a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0))
}

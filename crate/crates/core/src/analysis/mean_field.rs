use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanFieldResult {
    pub q: f64,
    pub p: f64,
    pub rho_e: f64,
    pub rho_v: f64,
    pub p_r: f64,
    pub p_l: f64,
    pub p_d: f64,
    pub v_b: f64,
    pub p_c_mf: f64,
}

/// Uncorrelated steady-state densities and the rightmost-particle random
/// walk for local dimension `q` and swap rate `p`.
pub fn mean_field(q: f64, p: f64) -> Result<MeanFieldResult> {
    if !(q >= 2.0) {
        return Err(Error::Invalid(format!(
            "local dimension must be at least 2, got {q}"
        )));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidRate(p));
    }
    // written in u = q^-2 so that q = inf is the bond limit u = 0
    let u = if q.is_infinite() { 0.0 } else { 1.0 / (q * q) };
    let p_c_mf = 0.5 * (1.0 - u);
    let rho_e = (1.0 - u - 2.0 * p) / (1.0 - p);
    let rho_v = (1.0 + u) * (1.0 - u - 2.0 * p) / ((1.0 - p) * (1.0 - p));
    if rho_v <= 0.0 {
        return Err(Error::PastMeanFieldThreshold { p, p_c: p_c_mf });
    }
    let p_r = (1.0 - p) / (1.0 + u);
    let p_l = (1.0 - p) * u / (1.0 + u) + p * (1.0 - p) * (1.0 - u) / (1.0 + u);
    let p_d = p * p * (1.0 - u) / (1.0 + u) + 2.0 * p * u / (1.0 + u);
    Ok(MeanFieldResult {
        q,
        p,
        rho_e,
        rho_v,
        p_r,
        p_l,
        p_d,
        v_b: p_r - p_l - 2.0 / rho_v * p_d,
        p_c_mf,
    })
}

/// The light-cone velocity written as a single rational function.
pub fn v_b_rational(q: f64, p: f64) -> f64 {
    let (q2, q4, q6) = (q * q, q.powi(4), q.powi(6));
    let num = (1.0 - p).powi(2)
        * ((2.0 * p * (p + 1.0) - 1.0) * q6
            + (1.0 - 2.0 * (p - 2.0) * p) * q4
            + (1.0 - 2.0 * p) * q2
            - 1.0);
    let den = (q2 + 1.0).powi(2) * ((2.0 * p - 1.0) * q2 + 1.0);
    num / den
}

/// First-order expansion of the light-cone velocity in `p`.
pub fn v_b_small_p(q: f64, p: f64) -> f64 {
    let q2 = q * q;
    (q2 - 1.0) / (q2 + 1.0)
        - 2.0 * p * (q.powi(6) + q.powi(4) - q2 + 1.0) / ((q2 - 1.0) * (q2 + 1.0).powi(2))
}

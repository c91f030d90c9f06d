//! Critical points, exponents, scaling collapses and the mean-field
//! light-cone estimates.

mod collapse;
mod fit;
mod mean_field;
mod velocity;

pub use collapse::{
    branch_metrics, collapse_metric, otoc_collapse, raw_curves, rescale_collapse, Branch,
    CollapseCurve, Observable,
};
pub use fit::{estimate_pc, fit_power_law, fit_quadratic, FitResult, PcEstimate, PcMethod};
pub use mean_field::{mean_field, v_b_rational, v_b_small_p, MeanFieldResult};
pub use velocity::{fit_velocity_exponent, measure_velocity, VelocityFit};

/// Reference exponents of (1+1)-dimensional directed percolation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentTable {
    pub theta: f64,
    pub delta: f64,
    pub z: f64,
    pub nu_par: f64,
    pub nu_perp: f64,
}

impl ExponentTable {
    pub const DP: ExponentTable = ExponentTable {
        theta: 0.3136,
        delta: 0.1595,
        z: 1.581,
        nu_par: 1.734,
        nu_perp: 1.097,
    };

    /// Vertical exponent `(β + β')/ν∥` of the OTOC collapse, equal to `2δ`
    /// under rapidity reversal (`β = β'`).
    pub fn collapse_exponent_otoc(&self) -> f64 {
        2.0 * self.delta
    }

    /// Exponent of `R²(t) ~ t^{Θ + 2/z}` at criticality.
    pub fn spreading_exponent(&self) -> f64 {
        self.theta + 2.0 / self.z
    }

    /// Exponent `ν⊥(z − 1)` with which the light-cone velocity vanishes.
    pub fn velocity_exponent(&self) -> f64 {
        self.nu_perp * (self.z - 1.0)
    }

    /// `|Θ − (1/z − 2δ)|`, zero when hyperscaling holds in one dimension.
    pub fn hyperscaling_defect(&self) -> f64 {
        (self.theta - (1.0 / self.z - 2.0 * self.delta)).abs()
    }
}

impl Default for ExponentTable {
    fn default() -> Self {
        Self::DP
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dp_table_is_hyperscaling_consistent() {
        let e = ExponentTable::DP;
        assert!(e.hyperscaling_defect() < 0.002);
        assert!((e.collapse_exponent_otoc() - 0.319).abs() < 1e-12);
        assert!((e.velocity_exponent() - 0.637).abs() < 1e-3);
        assert!((e.nu_par / e.nu_perp - e.z).abs() < 0.01);
    }
}

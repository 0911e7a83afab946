//! The theoretical swap-size constants, evaluated in log space.
//!
//! The guarantee-grade swap sizes are astronomically large, so they are
//! never materialized; callers get `log10(rho)` for reporting and bound
//! checks.

use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "kebab-case")]
pub enum RhoVariant {
    /// `32 (2d)^(8d) eps^(-36 d / eps)` for d-dimensional Euclidean inputs.
    Euclidean,
    /// `32 d^(16d) eps^(-256 d / eps)` for doubling dimension d.
    Doubling,
    /// `d^O(d) (2^q / eps)^(O(2^q d / eps))`; only the shape is known, so
    /// the result is flagged as an order-of-magnitude form with the
    /// suppressed constants taken as 1.
    Lq { q: f64 },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TheoryRho {
    pub log10_rho: f64,
    /// True when the source constant is only known up to O(.) factors.
    pub o_form: bool,
}

/// `log10` of the swap-size constant for the given regime.
pub fn theory_rho(epsilon: f64, d: usize, variant: RhoVariant) -> Result<TheoryRho> {
    if !(epsilon > 0.0 && epsilon <= 1.0) || !epsilon.is_finite() {
        return Err(Error::invariant(format!(
            "epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    if d < 1 {
        return Err(Error::invariant("dimension must be at least 1"));
    }
    let df = d as f64;
    let inv_eps_log = (1.0 / epsilon).log10();
    let value = match variant {
        RhoVariant::Euclidean => TheoryRho {
            log10_rho: 32f64.log10() + 8.0 * df * (2.0 * df).log10() + (36.0 * df / epsilon) * inv_eps_log,
            o_form: false,
        },
        RhoVariant::Doubling => TheoryRho {
            log10_rho: 32f64.log10() + 16.0 * df * df.log10() + (256.0 * df / epsilon) * inv_eps_log,
            o_form: false,
        },
        RhoVariant::Lq { q } => {
            if q < 1.0 || !q.is_finite() {
                return Err(Error::invariant(format!("q must be >= 1, got {q}")));
            }
            let base = 2f64.powf(q) / epsilon;
            TheoryRho {
                log10_rho: df * df.log10() + (df * 2f64.powf(q) / epsilon) * base.log10(),
                o_form: true,
            }
        }
    };
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_limit_value_is_8192() {
        // d = 1, eps -> 1: 32 * 2^8 = 8192
        let r = theory_rho(1.0, 1, RhoVariant::Euclidean).unwrap();
        assert!((r.log10_rho - 8192f64.log10()).abs() < 1e-9);
        assert!((r.log10_rho - 3.9133).abs() < 1e-3);
        assert!(!r.o_form);
    }

    #[test]
    fn euclidean_d2_eps_point1() {
        // log10(32) + 16 log10(4) + 720
        let r = theory_rho(0.1, 2, RhoVariant::Euclidean).unwrap();
        assert!((r.log10_rho - 731.138).abs() < 1e-3);
    }

    #[test]
    fn doubling_dominates_euclidean() {
        for &eps in &[0.05, 0.1, 0.3, 0.9] {
            for d in 1..=4 {
                let e = theory_rho(eps, d, RhoVariant::Euclidean).unwrap().log10_rho;
                let t = theory_rho(eps, d, RhoVariant::Doubling).unwrap().log10_rho;
                assert!(t >= e, "doubling {t} < euclidean {e} at eps={eps}, d={d}");
            }
        }
    }

    #[test]
    fn lq_variant_is_flagged_as_o_form() {
        let r = theory_rho(0.2, 2, RhoVariant::Lq { q: 3.0 }).unwrap();
        assert!(r.o_form);
        assert!(r.log10_rho > 0.0);
        assert!(theory_rho(0.2, 2, RhoVariant::Lq { q: 0.5 }).is_err());
    }

    #[test]
    fn domain_is_validated() {
        assert!(theory_rho(0.0, 1, RhoVariant::Euclidean).is_err());
        assert!(theory_rho(1.5, 1, RhoVariant::Euclidean).is_err());
        assert!(theory_rho(0.5, 0, RhoVariant::Euclidean).is_err());
    }
}

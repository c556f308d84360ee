//! Closed-form exponent and approximation-factor calculators.
//!
//! These are pure formula evaluations; no measured runtime feeds into them.
//! The hard-regime bound uses the natural logarithm — the asymptotic
//! statement is base-agnostic, so a convention must be fixed and this is it.

use crate::error::Error;

fn check_gamma(gamma: f64) -> Result<(), Error> {
    if gamma.is_nan() || gamma <= 1.0 {
        return Err(Error::Validation(format!(
            "approximation factor must satisfy gamma > 1, got {gamma}"
        )));
    }
    Ok(())
}

fn check_p(p: u32) -> Result<(), Error> {
    if p != 1 && p != 2 {
        return Err(Error::Validation(format!(
            "closed-form exponents cover p in {{1, 2}}, got {p}"
        )));
    }
    Ok(())
}

/// Query-time exponent of the (r, gamma r) near-neighbor scheme:
/// 1/(2 gamma^2 - 1) for l2, 1/(2 gamma - 1) for l1.
pub fn ar15_rho(gamma: f64, p: u32) -> Result<f64, Error> {
    check_gamma(gamma)?;
    check_p(p)?;
    Ok(match p {
        2 => 1.0 / (2.0 * gamma * gamma - 1.0),
        _ => 1.0 / (2.0 * gamma - 1.0),
    })
}

/// Classical meet-in-the-middle exponent at the balanced split:
/// 1/2 + 1/(4 gamma^2 - 2) for l2, 1/2 + 1/(4 gamma - 2) for l1.
pub fn classical_exponent(gamma: f64, p: u32) -> Result<f64, Error> {
    check_gamma(gamma)?;
    check_p(p)?;
    Ok(match p {
        2 => 0.5 + 1.0 / (4.0 * gamma * gamma - 2.0),
        _ => 0.5 + 1.0 / (4.0 * gamma - 2.0),
    })
}

/// Quantum (Grover-accelerated) exponent, l2 only: 1/3 + 2/(6 gamma^2 - 3).
pub fn quantum_exponent(gamma: f64) -> Result<f64, Error> {
    check_gamma(gamma)?;
    Ok(1.0 / 3.0 + 2.0 / (6.0 * gamma * gamma - 3.0))
}

/// Upper bound (sqrt(ln n))^(1/p) on the approximation factor reachable in
/// the hard parameter regime. Natural-log convention.
pub fn hard_regime_gamma_bound(n: u64, p: f64) -> Result<f64, Error> {
    if n < 2 {
        return Err(Error::Validation(format!("need n >= 2, got {n}")));
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::Validation(format!("need p >= 1, got {p}")));
    }
    Ok((n as f64).ln().sqrt().powf(1.0 / p))
}

/// Largest admissible exponent a with epsilon = log^(-a) n: 1/(2(1 - c)).
pub fn max_eps_exponent(c: f64) -> Result<f64, Error> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Validation(format!(
            "need 0 < c < 1 (c = 1 leaves the exponent unbounded), got {c}"
        )));
    }
    Ok(1.0 / (2.0 * (1.0 - c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn rho_examples() {
        close(ar15_rho(2.0, 2).unwrap(), 1.0 / 7.0);
        close(ar15_rho(2.0, 1).unwrap(), 1.0 / 3.0);
        assert!(ar15_rho(1e9, 2).unwrap() < 1e-17);
        assert!(ar15_rho(1.0, 2).is_err());
        assert!(ar15_rho(2.0, 3).is_err());
    }

    #[test]
    fn classical_examples() {
        close(classical_exponent(2.0, 2).unwrap(), 4.0 / 7.0);
        close(classical_exponent(2.0, 1).unwrap(), 2.0 / 3.0);
        close(classical_exponent(1e9, 2).unwrap(), 0.5);
    }

    #[test]
    fn quantum_examples() {
        close(quantum_exponent(2.0).unwrap(), 3.0 / 7.0);
        close(quantum_exponent(1e9).unwrap(), 1.0 / 3.0);
        assert!(quantum_exponent(0.9).is_err());
    }

    #[test]
    fn hard_regime_examples() {
        // ln(e^4) = 4, bound = 4^(1/2 * 1/2) = sqrt(2) at n = e^4
        let n = std::f64::consts::E.powi(4).round() as u64; // 55
        let got = hard_regime_gamma_bound(n, 2.0).unwrap();
        assert!((got - (n as f64).ln().sqrt().sqrt()).abs() < 1e-12);
        assert!(hard_regime_gamma_bound(1, 2.0).is_err());
        close(max_eps_exponent(0.5).unwrap(), 1.0);
        assert!(max_eps_exponent(1.0).is_err());
        // p -> infinity sends the bound to 1
        assert!((hard_regime_gamma_bound(1 << 20, 1e12).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn classical_is_half_plus_half_rho() {
        for i in 1..50 {
            let gamma = 1.0 + i as f64 * 0.25;
            let lhs = classical_exponent(gamma, 2).unwrap();
            let rhs = 0.5 + ar15_rho(gamma, 2).unwrap() / 2.0;
            close(lhs, rhs);
        }
    }

    #[test]
    fn monotone_and_ordered() {
        let mut prev: Option<(f64, f64, f64)> = None;
        for i in 1..100 {
            let g = 1.0 + i as f64 * 0.1;
            let c = classical_exponent(g, 2).unwrap();
            let q = quantum_exponent(g).unwrap();
            let r = ar15_rho(g, 2).unwrap();
            assert!(q < c);
            if let Some((pc, pq, pr)) = prev {
                assert!(c < pc && q < pq && r < pr);
            }
            prev = Some((c, q, r));
        }
    }
}

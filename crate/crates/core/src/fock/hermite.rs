use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 10_000;
pub const MAX_ABS_X: f64 = 50.0;

/// π^{-1/4}, the order-0 orthonormal Hermite polynomial.
pub fn p0() -> f64 {
    std::f64::consts::PI.powf(-0.25)
}

fn check_args(n: usize, x: f64) -> Result<()> {
    if n > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Hermite order {n} exceeds {MAX_ORDER}"
        )));
    }
    if x.is_nan() || x.abs() > MAX_ABS_X {
        return Err(Error::InvalidArgument(format!(
            "Hermite argument {x} outside [-50, 50]"
        )));
    }
    Ok(())
}

/// Values `p_0(x), …, p_n(x)` of the Hermite polynomials orthonormal under
/// the weight `e^{-x²}`, from the three-term recurrence
/// `p_{k+1} = sqrt(2/(k+1)) x p_k - sqrt(k/(k+1)) p_{k-1}`.
pub fn hermite_table(n: usize, x: f64) -> Result<Vec<f64>> {
    check_args(n, x)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(p0());
    if n == 0 {
        return Ok(out);
    }
    out.push(std::f64::consts::SQRT_2 * x * p0());
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        if !next.is_finite() {
            return Err(Error::HermiteOverflow { order: k + 1, x });
        }
        out.push(next);
    }
    Ok(out)
}

/// `p_n(x)`; see [`hermite_table`].
pub fn hermite_value(n: usize, x: f64) -> Result<f64> {
    Ok(hermite_table(n, x)?[n])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_orders() {
        assert!((hermite_value(0, 0.3).unwrap() - 0.751_125_544_464_942_5).abs() < 1e-15);
        assert_eq!(hermite_value(1, 0.0).unwrap(), 0.0);
        // p_2(x) = (2x² - 1) / sqrt(2) · π^{-1/4}
        let x = 0.7;
        let expected = (2.0 * x * x - 1.0) / 2f64.sqrt() * p0();
        assert!((hermite_value(2, x).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn parity() {
        for n in 0..30 {
            let a = hermite_value(n, 1.3).unwrap();
            let b = hermite_value(n, -1.3).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - sign * b).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn recurrence_residual_is_zero() {
        let x = -2.25;
        let t = hermite_table(40, x).unwrap();
        for k in 1..40 {
            let kf = k as f64;
            let r = t[k + 1]
                - ((2.0 / (kf + 1.0)).sqrt() * x * t[k] - (kf / (kf + 1.0)).sqrt() * t[k - 1]);
            assert_eq!(r, 0.0);
        }
    }

    #[test]
    fn argument_checks_and_overflow() {
        assert!(hermite_value(MAX_ORDER + 1, 0.0).is_err());
        assert!(hermite_value(3, 51.0).is_err());
        assert!(hermite_value(3, f64::NAN).is_err());
        match hermite_value(MAX_ORDER, 50.0) {
            Err(Error::HermiteOverflow { order, .. }) => assert!(order > 1 && order <= MAX_ORDER),
            other => panic!("expected overflow, got {other:?}"),
        }
    }
}

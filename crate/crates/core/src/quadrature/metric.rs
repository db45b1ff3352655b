use super::QuadratureError;

/// Aggregate error `Σ (Q_n - I_n)^2 / Σ Q_n^2` over all abscissae.
pub fn quad_error_err(approx: &[f64], exact: &[f64]) -> Result<f64, QuadratureError> {
    if approx.len() != exact.len() {
        return Err(QuadratureError::LengthMismatch(approx.len(), exact.len()));
    }
    let num: f64 = approx.iter().zip(exact).map(|(q, i)| (q - i) * (q - i)).sum();
    let den: f64 = approx.iter().map(|q| q * q).sum();
    if den == 0.0 {
        return Err(QuadratureError::UndefinedMetric);
    }
    Ok(num / den)
}

/// Relative ℓ² error, the square root of [`quad_error_err`].
pub fn quad_error_rel(approx: &[f64], exact: &[f64]) -> Result<f64, QuadratureError> {
    quad_error_err(approx, exact).map(f64::sqrt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_values_give_zero() {
        assert_eq!(quad_error_err(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn squared_ratio() {
        let e = quad_error_err(&[1.0, 1.0], &[1.1, 0.9]).unwrap();
        assert!((e - 0.01).abs() < 1e-15);
        assert!((quad_error_rel(&[1.0, 1.0], &[1.1, 0.9]).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(quad_error_err(&[0.0], &[1.0]), Err(QuadratureError::UndefinedMetric));
        assert!(matches!(quad_error_err(&[0.0], &[]), Err(QuadratureError::LengthMismatch(1, 0))));
    }
}

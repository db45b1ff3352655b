use super::QuadratureError;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let r = 0.5 * (hi - lo);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let x = r * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * r, ((k - g) * r).abs())
}

/// Adaptive Gauss–Kronrod (7/15) integration of `f` over `[a, b]`.
///
/// Intervals are bisected until the summed error estimate drops below
/// `max(abs_tol, rel_tol * |I|)`. Endpoints are never evaluated, so
/// integrable endpoint singularities are allowed.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<f64, QuadratureError> {
    if a == b {
        return Ok(0.0);
    }
    const MAX_INTERVALS: usize = 20_000;
    let (v, e) = kronrod(&mut f, a, b);
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(QuadratureError::NotConverged { a, b, estimate: err });
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(QuadratureError::NotConverged { a, b, estimate: err });
        }
        let (idx, _) = parts.iter().enumerate().max_by(|x, y| x.1 .3.total_cmp(&y.1 .3)).unwrap();
        let (lo, hi, _, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval exhausted at machine resolution
            let total: f64 = parts.iter().map(|p| p.2).sum::<f64>() + kronrod(&mut f, lo, hi).0;
            return Ok(total);
        }
        let (v1, e1) = kronrod(&mut f, lo, mid);
        let (v2, e2) = kronrod(&mut f, mid, hi);
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// `∫_a^b g(t) ln|t - s| dt` for smooth `g`, with the singularity subtracted
/// analytically: `∫ ln|t-s| (g(t) - g(s)) dt + g(s) ∫ ln|t-s| dt`.
pub fn integrate_log_singular<F: FnMut(f64) -> f64>(
    mut g: F,
    a: f64,
    b: f64,
    s: f64,
    tol: f64,
) -> Result<f64, QuadratureError> {
    let gs = if s >= a && s <= b { g(s) } else { 0.0 };
    let mut smooth = |t: f64| {
        let d = (t - s).abs();
        if d == 0.0 {
            0.0
        } else {
            d.ln() * (g(t) - gs)
        }
    };
    let mut total = 0.0;
    if s > a && s < b {
        total += integrate_adaptive(&mut smooth, a, s, tol, tol)?;
        total += integrate_adaptive(&mut smooth, s, b, tol, tol)?;
    } else {
        total += integrate_adaptive(&mut smooth, a, b, tol, tol)?;
    }
    Ok(total + gs * log_integral(a, b, s))
}

/// `∫_a^b ln|t - s| dt` in closed form.
pub fn log_integral(a: f64, b: f64, s: f64) -> f64 {
    let xlx = |x: f64| if x == 0.0 { 0.0 } else { x * x.abs().ln() };
    xlx(b - s) - xlx(a - s) - (b - a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kronrod_exact_for_polynomials() {
        for p in 0..=22 {
            let (v, _) = kronrod(&mut |x: f64| x.powi(p), 0.0, 1.0);
            assert_relative_eq!(v, 1.0 / (p as f64 + 1.0), max_relative = 1e-14);
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let v = integrate_adaptive(|x: f64| x.ln(), 0.0, 1.0, 1e-13, 1e-13).unwrap();
        assert_relative_eq!(v, -1.0, max_relative = 1e-11);
        let v = integrate_adaptive(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn log_singular_split() {
        let v = integrate_log_singular(|_| 1.0, 0.0, 1.0, 3.0, 1e-14).unwrap();
        let want = 3.0 * 3f64.ln() - 2.0 * 2f64.ln() - 1.0;
        assert_relative_eq!(v, want, max_relative = 1e-13);
        // ∫_{-1}^{1} t^2 ln|t| dt = -2/9
        let v = integrate_log_singular(|t| t * t, -1.0, 1.0, 0.0, 1e-14).unwrap();
        assert_relative_eq!(v, -2.0 / 9.0, max_relative = 1e-12);
    }
}

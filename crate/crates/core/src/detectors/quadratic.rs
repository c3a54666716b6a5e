use super::FailureReason;

/// How far outside `[0, 1]` a root may fall and still count as a rate
/// estimate. Clean covers routinely solve to small negative rates.
pub(crate) const RATE_SLACK: f64 = 0.1;

/// Real roots of `a·x² + b·x + c = 0`, ascending. Degenerates to the linear
/// case when `a` vanishes relative to the other coefficients.
pub(crate) fn real_roots(a: f64, b: f64, c: f64) -> Result<Vec<f64>, FailureReason> {
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(FailureReason::NumericalInstability);
    }
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Err(FailureReason::DegenerateInput);
    }
    if a.abs() <= 1e-12 * scale {
        if b.abs() <= 1e-12 * scale {
            return Err(FailureReason::NumericalInstability);
        }
        return Ok(vec![-c / b]);
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(FailureReason::NumericalInstability);
    }
    // Cancellation-free form.
    let sign = if b >= 0.0 { 1.0 } else { -1.0 };
    let q = -0.5 * (b + sign * disc.sqrt());
    let mut roots = if q == 0.0 { vec![0.0, 0.0] } else { vec![q / a, c / q] };
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Picks an embedding-rate estimate among candidate roots: the smallest one
/// inside `[-RATE_SLACK, 1 + RATE_SLACK]`, otherwise the one nearest that
/// band. The result is clamped to `[0, 1]`.
pub(crate) fn select_rate(candidates: &[f64]) -> Result<f64, FailureReason> {
    let finite: Vec<f64> = candidates.iter().copied().filter(|r| r.is_finite()).collect();
    if finite.is_empty() {
        return Err(FailureReason::NumericalInstability);
    }
    let in_band = finite
        .iter()
        .copied()
        .filter(|&r| (-RATE_SLACK..=1.0 + RATE_SLACK).contains(&r))
        .min_by(f64::total_cmp);
    let chosen = in_band.unwrap_or_else(|| {
        let distance = |r: f64| if r < 0.0 { -r } else { r - 1.0 };
        finite
            .iter()
            .copied()
            .min_by(|a, b| distance(*a).total_cmp(&distance(*b)))
            .expect("non-empty")
    });
    Ok(chosen.clamp(0.0, 1.0))
}

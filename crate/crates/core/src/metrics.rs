/// F-beta from precision and recall; zero when both are zero.
pub fn f_beta(precision: f64, recall: f64, beta: f64) -> f64 {
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    if denom == 0.0 {
        0.0
    } else {
        (1.0 + b2) * precision * recall / denom
    }
}

pub fn f05(precision: f64, recall: f64) -> f64 {
    f_beta(precision, recall, 0.5)
}

/// `num / den`, or zero with `degenerate` set when `den` is zero.
pub(crate) fn ratio(num: u64, den: u64, degenerate: &mut bool) -> f64 {
    if den == 0 {
        *degenerate = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_half_arithmetic() {
        assert!((f05(1.0, 0.5) - 0.8333333333333334).abs() < 1e-12);
        for p in [0.0, 0.3, 1.0] {
            assert!((f05(p, p) - p).abs() < 1e-12);
        }
        assert_eq!(f05(0.0, 0.0), 0.0);
        assert_eq!(f_beta(1.0, 1.0, 2.0), 1.0);
    }
}

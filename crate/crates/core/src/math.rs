//! Float helpers for `no_std`.

/// Floor that absorbs representation error just below an integer, so that
/// e.g. 2846.0 computed as 2845.9999999999995 still floors to 2846.
pub(crate) fn floor_tol(x: f64) -> i64 {
    libm::floor(x + 1e-9) as i64
}

pub(crate) fn powi(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    let mut base = x;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_tol_snaps_near_integers() {
        assert_eq!(floor_tol(2845.9999999999995), 2846);
        assert_eq!(floor_tol(296.2), 296);
        assert_eq!(floor_tol(-0.5), -1);
    }

    #[test]
    fn powi_matches_repeated_product() {
        assert_eq!(powi(0.9, 0), 1.0);
        assert!((powi(0.9, 5) - 0.59049).abs() < 1e-15);
        assert!((powi(2.0, 10) - 1024.0).abs() < 1e-12);
    }
}

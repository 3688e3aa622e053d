//! Angles measured in turns (`θ = 2π q`).
//!
//! Symmetry axes of real-coefficient models sit at `q = 0` and `q = 1/2`,
//! both exactly representable. Maxima of functions like `exp(e^{z²})` are so
//! sharp that the radian value `π` (which is off by `1.2e-16`) already loses
//! around `10⁹` nats of log-modulus at `|z| = 3π`; working in turns avoids
//! that loss entirely.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Reduces `q` into `[0, 1)`.
pub fn reduce(q: f64) -> f64 {
    let r = q - q.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// `(sin 2πq, cos 2πq)` with quarter-turn reduction, accurate to a few ulps
/// relative near every zero.
pub fn sin_cos_turns(q: f64) -> (f64, f64) {
    let q = q - q.round();
    let k = (4.0 * q).round();
    let f = q - k / 4.0;
    let (s, c) = (2.0 * PI * f).sin_cos();
    match (k as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

pub fn sin_turns(q: f64) -> f64 {
    sin_cos_turns(q).0
}

pub fn cos_turns(q: f64) -> f64 {
    sin_cos_turns(q).1
}

/// `r e^{2πiq}`.
pub fn polar_turns(r: f64, q: f64) -> Complex64 {
    let (s, c) = sin_cos_turns(q);
    Complex64::new(r * c, r * s)
}

pub fn turns_to_radians(q: f64) -> f64 {
    2.0 * PI * reduce(q)
}

pub fn radians_to_turns(theta: f64) -> f64 {
    reduce(theta / (2.0 * PI))
}

/// Signed shortest difference `a - b` on the circle, in turns, in `[-1/2, 1/2)`.
pub fn turn_diff(a: f64, b: f64) -> f64 {
    let d = reduce(a - b);
    if d >= 0.5 {
        d - 1.0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_at_axes() {
        assert_eq!(sin_cos_turns(0.0), (0.0, 1.0));
        assert_eq!(sin_cos_turns(0.5), (0.0, -1.0));
        assert_eq!(sin_cos_turns(0.25), (1.0, 0.0));
        assert_eq!(sin_cos_turns(0.75), (-1.0, 0.0));
        let z = polar_turns(3.0, 0.5);
        assert_eq!(z, Complex64::new(-3.0, 0.0));
    }

    #[test]
    fn relative_accuracy_near_half_turn() {
        let d = 1e-12;
        let s = sin_turns(0.5 + d);
        let expect = -(2.0 * PI * d);
        assert!(((s - expect) / expect).abs() < 1e-3);
    }

    #[test]
    fn agrees_with_radians() {
        for i in 0..100 {
            let q = i as f64 / 97.0 - 0.3;
            let (s, c) = sin_cos_turns(q);
            let (s2, c2) = (2.0 * PI * q).sin_cos();
            assert!((s - s2).abs() < 1e-14 && (c - c2).abs() < 1e-14);
        }
    }

    #[test]
    fn turn_diff_wraps() {
        assert!((turn_diff(0.95, 0.05) + 0.1).abs() < 1e-15);
        assert!((turn_diff(0.05, 0.95) - 0.1).abs() < 1e-15);
    }
}

//! Float helpers routed through `libm` so the crate stays `no_std`.

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// Reduces an angle to `[0, pi)`; lines have no direction.
pub fn normalize_line_angle(theta: f64) -> f64 {
    let pi = core::f64::consts::PI;
    let mut t = libm::fmod(theta, pi);
    if t < 0.0 {
        t += pi;
    }
    if t >= pi {
        t -= pi;
    }
    t
}

/// Smallest difference between two line orientations, in `[0, pi/2]`.
pub fn line_angle_diff(a: f64, b: f64) -> f64 {
    let pi = core::f64::consts::PI;
    let d = normalize_line_angle(a - b);
    if d > pi / 2.0 {
        pi - d
    } else {
        d
    }
}

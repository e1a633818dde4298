//! Thin wrappers around `libm` so the rest of the crate stays `no_std`.

pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}

pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

pub fn log10(x: f64) -> f64 {
    libm::log10(x)
}

pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

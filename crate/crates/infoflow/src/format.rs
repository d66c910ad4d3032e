//! Text forms of reals shared by every CSV writer.

/// Seventeen significant digits, enough to read back the exact same `f64`.
pub fn real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn opt_real(v: Option<f64>) -> String {
    v.map(real).unwrap_or_default()
}

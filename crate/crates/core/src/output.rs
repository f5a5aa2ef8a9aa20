//! Number formatting shared by every CSV writer.

/// Formats with 17 significant digits so every `f64` round-trips exactly.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

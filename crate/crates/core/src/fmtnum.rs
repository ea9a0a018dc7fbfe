//! Locale-independent numeric formatting for every text artefact.

/// Twelve significant digits in scientific notation with a `.` separator.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.11e}")
    }
}

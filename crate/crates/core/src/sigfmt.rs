//! Deterministic number formatting for CSV output.

/// Format `x` with `digits` significant digits, trailing zeros trimmed.
///
/// Plain decimal notation throughout; output parses back with `f64::from_str`.
pub fn sig(x: f64, digits: u32) -> String {
    assert!(digits >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    trim_trailing_zeros(s)
}

/// Format a percentage with six decimal places, per the output contract.
pub fn pct(x: f64) -> String {
    format!("{x:.6}")
}

fn trim_trailing_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed == "-0" {
        "0".to_string()
    } else {
        trimmed.to_string()
    }
}

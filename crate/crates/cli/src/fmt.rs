//! Deterministic number and table formatting.

use reclab_core::bounds::BoundValue;

/// Formats with 9 significant digits: plain decimal in a comfortable range,
/// scientific notation outside it.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs();
    if (1e-3..1e9).contains(&magnitude) {
        let decimals = 8 - magnitude.log10().floor() as i64;
        format!("{x:.prec$}", prec = decimals.max(0) as usize)
    } else {
        format!("{x:.8e}")
    }
}

/// Cell for an optional time or value.
pub fn opt_sig9(x: Option<f64>) -> String {
    x.map(sig9).unwrap_or_else(|| "absent".to_string())
}

/// Cell for a log-space bound: the value when representable, log₁₀ otherwise.
pub fn bound_cell(b: Option<BoundValue>) -> String {
    match b {
        None => "absent".to_string(),
        Some(b) => match b.value {
            Some(v) => sig9(v),
            None => format!("10^{:.3}", b.log10),
        },
    }
}

/// Two-column table with aligned names.
pub fn render_table(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(name, _)| name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (name, value) in rows {
        out.push_str(&format!("{name:<width$}  {value}\n"));
    }
    out
}

//! Output rendering: aligned tables with 7 significant digits, CSV rows and
//! full-precision JSON.

use serde_json::Value;

/// Formats a float with 7 significant digits for table output.
pub fn sig7(x: f64) -> String {
    if x == 0.0 {
        return "0.000000".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-4..7).contains(&magnitude) {
        return format!("{x:.6e}");
    }
    let decimals = (6 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// One row per outcome tuple: slot_1..slot_n, probability, amplitude.
pub struct SequenceRows {
    pub n_slots: usize,
    /// (outcome tuple, probability, amplitude re, amplitude im)
    pub rows: Vec<(Vec<usize>, f64, f64, f64)>,
}

impl SequenceRows {
    pub fn csv(&self) -> String {
        let mut out = String::new();
        for i in 1..=self.n_slots {
            out.push_str(&format!("slot_{i},"));
        }
        out.push_str("probability,amplitude_re,amplitude_im\n");
        for (alpha, p, re, im) in &self.rows {
            for a in alpha {
                out.push_str(&format!("{a},"));
            }
            out.push_str(&format!("{p},{re},{im}\n"));
        }
        out
    }

    pub fn table(&self) -> String {
        let mut out = String::from("sequence        probability    amplitude\n");
        for (alpha, p, re, im) in &self.rows {
            let seq = format!(
                "({})",
                alpha
                    .iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            let sign = if *im < 0.0 { "-" } else { "+" };
            out.push_str(&format!(
                "{seq:<15} {:<14} {} {} {}i\n",
                sig7(*p),
                sig7(*re),
                sign,
                sig7(im.abs())
            ));
        }
        out
    }

    pub fn json_rows(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|(alpha, p, re, im)| {
                serde_json::json!({
                    "sequence": alpha,
                    "probability": p,
                    "amplitude": [re, im],
                })
            })
            .collect()
    }
}

/// Key/value report rendering for non-tabular commands.
pub fn kv_table(pairs: &[(&str, String)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    pairs
        .iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

pub fn kv_csv(pairs: &[(&str, String)]) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in pairs {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

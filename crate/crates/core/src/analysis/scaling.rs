//! Scaling rules c_n applied to graph distances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    None,
    InvLog,
    InvSqrt,
    InvN,
    Custom(f64),
}

impl Scaling {
    /// c_n for size parameter n.
    pub fn factor(&self, n: usize) -> f64 {
        let x = n as f64;
        match *self {
            Scaling::None => 1.0,
            Scaling::InvLog => 1.0 / x.ln(),
            Scaling::InvSqrt => 1.0 / x.sqrt(),
            Scaling::InvN => 1.0 / x,
            Scaling::Custom(c) => c,
        }
    }

    /// Accepts `none`, `1/log`, `1/sqrt`, `1/n` or a positive number.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(match text.trim() {
            "none" | "1" => Scaling::None,
            "1/log" | "1/log n" | "inv_log" => Scaling::InvLog,
            "1/sqrt" | "1/sqrt n" | "inv_sqrt" => Scaling::InvSqrt,
            "1/n" | "inv_n" => Scaling::InvN,
            other => match other.parse::<f64>() {
                Ok(c) if c > 0.0 && c.is_finite() => Scaling::Custom(c),
                _ => return Err(Error::Parse(format!("unknown scaling {other:?}"))),
            },
        })
    }
}

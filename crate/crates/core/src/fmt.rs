//! Fixed-precision number formatting shared by the CSV and JSON writers.

use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Formats `x` with 17 significant digits, which round-trips every `f64`.
///
/// Values of moderate magnitude are printed positionally; very small or very
/// large ones use scientific notation. Non-finite values print as `NaN`,
/// `inf` or `-inf`.
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let ax = x.abs();
    if !(1e-4..1e16).contains(&ax) {
        return format!("{x:.16e}");
    }
    let exp10 = ax.log10().floor() as i32;
    let decimals = (16 - exp10).max(1) as usize;
    format!("{x:.decimals$}")
}

/// Serializes an `f64` as a JSON number with 17 significant digits
/// (`null` when not finite).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(sig17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

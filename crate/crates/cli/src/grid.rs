//! Parameter grids: `start:stop:step`, comma lists, or a single value.

use anyhow::{bail, Context, Result};

fn number(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().with_context(|| format!("invalid number `{s}`"))?;
    if !v.is_finite() {
        bail!("non-finite value `{s}`");
    }
    Ok(v)
}

/// Parses a grid. Ranges include `stop` when it lies within half a step of
/// the last point.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        bail!("empty grid");
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            bail!("range must be `start:stop:step`, got `{text}`");
        };
        let (start, stop, step) = (number(start)?, number(stop)?, number(step)?);
        if step <= 0.0 {
            bail!("range step must be positive, got {step}");
        }
        if stop < start {
            bail!("range stop {stop} is below start {start}");
        }
        let count = ((stop - start) / step + 0.5).floor() as usize + 1;
        return Ok((0..count).map(|i| start + i as f64 * step).collect());
    }
    text.split(',').map(number).collect()
}

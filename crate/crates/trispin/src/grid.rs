use crate::error::{Error, Result};
use crate::numfmt::round12;

const MAX_POINTS: usize = 100_000;

/// Parses `start:stop:step` (inclusive of `stop`), a comma-separated list, or a single value.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let err = |reason: &str| Error::Grid {
        spec: spec.into(),
        reason: reason.into(),
    };
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| err(&format!("`{}` is not a number", s.trim())))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err("values must be finite"))
        }
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let values = match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 {
                return Err(err("step must be positive"));
            }
            if stop < start {
                return Err(err("stop lies below start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() + 1.0;
            if count > MAX_POINTS as f64 {
                return Err(err("too many grid points"));
            }
            (0..count as usize).map(|i| round12(start + i as f64 * step)).collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>>>()?,
        _ => return Err(err("expected start:stop:step or a comma-separated list")),
    };
    if values.is_empty() {
        return Err(err("grid is empty"));
    }
    Ok(values)
}

/// Integer grid with the same syntax; every value must be a non-negative integer.
pub fn parse_usize_grid(spec: &str) -> Result<Vec<usize>> {
    parse_grid(spec)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::Grid {
                    spec: spec.into(),
                    reason: format!("{v} is not a non-negative integer"),
                })
            }
        })
        .collect()
}

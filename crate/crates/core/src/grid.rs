//! Sample grids.

use crate::error::{Error, Result};

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            (0..count)
                .map(|i| if i == count - 1 { stop } else { start + step * i as f64 })
                .collect()
        }
    }
}

/// `count` logarithmically spaced points from `start` to `stop` inclusive;
/// both ends must be positive.
pub fn logspace(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "log grid ends must be positive, got {start} and {stop}"
        )));
    }
    Ok(linspace(start.ln(), stop.ln(), count)
        .into_iter()
        .enumerate()
        .map(|(i, x)| {
            if i == 0 {
                start
            } else if i + 1 == count {
                stop
            } else {
                x.exp()
            }
        })
        .collect())
}

/// The nine log-spaced damping rates in `[1e-4, 1e-2]` used for slope and
/// series fits.
pub fn small_gamma_window() -> Vec<f64> {
    logspace(1e-4, 1e-2, 9).expect("positive ends")
}

/// Checks that a grid is non-empty, finite, strictly increasing and inside `[lo, hi]`.
pub fn validate_increasing(grid: &[f64], lo: f64, hi: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    if let Some(x) = grid.iter().find(|x| !(lo..=hi).contains(*x)) {
        return Err(Error::InvalidGrid(format!("value {x} outside [{lo}, {hi}]")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid("grid is not strictly increasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_are_exact() {
        let g = linspace(0.0, 1.0, 101);
        assert_eq!(g.len(), 101);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[100], 1.0);
        assert!((g[10] - 0.1).abs() < 1e-15);
        let l = small_gamma_window();
        assert_eq!((l[0], l[8]), (1e-4, 1e-2));
        assert!((l[4] - 1e-3).abs() < 1e-17);
    }

    #[test]
    fn validation() {
        assert!(validate_increasing(&[0.1, 0.2], 0.0, 1.0).is_ok());
        assert!(validate_increasing(&[0.2, 0.1], 0.0, 1.0).is_err());
        assert!(validate_increasing(&[0.2, 1.1], 0.0, 1.0).is_err());
        assert!(validate_increasing(&[], 0.0, 1.0).is_err());
        assert!(logspace(0.0, 1.0, 3).is_err());
    }
}

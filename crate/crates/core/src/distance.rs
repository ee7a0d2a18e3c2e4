//! Secure distance: the largest fiber length with a strictly positive key rate.

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Coarse scan step (km).
pub const COARSE_STEP_KM: f64 = 1.0;

/// Default bisection tolerance (km).
pub const TOLERANCE_KM: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecureDistance {
    pub km: f64,
    /// Sign changes of the rate seen on the coarse scan. More than one means
    /// the rate is not single-crossing and `km` is the outermost root.
    pub crossings: usize,
    /// The rate was still positive at the end of the search range.
    pub censored: bool,
}

impl SecureDistance {
    pub fn multiple_roots(&self) -> bool {
        self.crossings > 1
    }
}

/// Scan `[z_min, z_max]` in `coarse_step` increments, then bisect the last
/// positive→zero transition down to `tolerance_km`.
pub fn secure_distance<F>(
    mut rate: F,
    z_min: f64,
    z_max: f64,
    coarse_step: f64,
    tolerance_km: f64,
) -> Result<SecureDistance>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut grid = Vec::new();
    let mut i = 0u32;
    loop {
        let z = z_min + f64::from(i) * coarse_step;
        if z >= z_max {
            grid.push(z_max);
            break;
        }
        grid.push(z);
        i += 1;
    }

    let mut positive = Vec::with_capacity(grid.len());
    for &z in &grid {
        positive.push(rate(z)? > 0.0);
    }
    let crossings = positive.windows(2).filter(|w| w[0] != w[1]).count();

    let Some(last) = positive.iter().rposition(|&p| p) else {
        return Ok(SecureDistance {
            km: z_min,
            crossings,
            censored: false,
        });
    };
    if last + 1 == grid.len() {
        return Ok(SecureDistance {
            km: z_max,
            crossings,
            censored: true,
        });
    }

    let (mut lo, mut hi) = (grid[last], grid[last + 1]);
    while hi - lo > tolerance_km {
        let mid = 0.5 * (lo + hi);
        if rate(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SecureDistance {
        km: 0.5 * (lo + hi),
        crossings,
        censored: false,
    })
}

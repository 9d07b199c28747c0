use serde::{Deserialize, Serialize};

use crate::error::{GridError, Result};
use crate::graph::GridGraph;

/// Closed voltage bands, in kV, used for the share rows.
pub const SUB_TRANSMISSION_BAND: (f64, f64) = (110.0, 150.0);
pub const MID_TRANSMISSION_BAND: (f64, f64) = (220.0, 275.0);
pub const EXTRA_HIGH_BAND: (f64, f64) = (330.0, 400.0);

/// Fraction of circuits per voltage band; `other` holds everything outside
/// the three bands, so the four values sum to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoltageShares {
    pub kv_110_150: f64,
    pub kv_220_275: f64,
    pub kv_330_400: f64,
    pub other: f64,
}

pub fn voltage_shares(g: &GridGraph) -> Result<VoltageShares> {
    let m = g.edge_count();
    if m == 0 {
        return Err(GridError::undefined("voltage shares", "graph has no edges"));
    }
    let in_band = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
    let mut counts = [0usize; 4];
    for e in g.edges() {
        let slot = if in_band(e.voltage_kv, SUB_TRANSMISSION_BAND) {
            0
        } else if in_band(e.voltage_kv, MID_TRANSMISSION_BAND) {
            1
        } else if in_band(e.voltage_kv, EXTRA_HIGH_BAND) {
            2
        } else {
            3
        };
        counts[slot] += 1;
    }
    let share = |c: usize| c as f64 / m as f64;
    Ok(VoltageShares {
        kv_110_150: share(counts[0]),
        kv_220_275: share(counts[1]),
        kv_330_400: share(counts[2]),
        other: share(counts[3]),
    })
}

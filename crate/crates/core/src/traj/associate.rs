//! Timestamp association between two trajectories.

use crate::error::{Error, Result};
use crate::traj::Trajectory;

/// Greedy one-to-one matching of estimate poses to reference poses by
/// smallest time difference, capped at `max_dt`. Returns `(est, ref)`
/// index pairs sorted by estimate index.
///
/// Candidate pairs are ranked by `(|dt|, est index, ref index)`, so the
/// result is deterministic and equals the exhaustive greedy matching.
pub fn associate_timestamps(
    est: &Trajectory,
    reference: &Trajectory,
    max_dt: f64,
) -> Result<Vec<(usize, usize)>> {
    if est.is_empty() || reference.is_empty() {
        return Err(Error::EmptyInput("trajectory association".into()));
    }
    if max_dt < 0.0 {
        return Err(Error::InvalidArgument("max_dt must be nonnegative".into()));
    }

    let ref_stamps: Vec<f64> = reference.stamps().collect();
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, t) in est.stamps().enumerate() {
        // Stamps are sorted: scan outward from the insertion point.
        let at = ref_stamps.partition_point(|&r| r < t);
        let mut j = at;
        while j < ref_stamps.len() && ref_stamps[j] - t <= max_dt {
            candidates.push(((ref_stamps[j] - t).abs(), i, j));
            j += 1;
        }
        let mut j = at;
        while j > 0 && t - ref_stamps[j - 1] <= max_dt {
            candidates.push(((t - ref_stamps[j - 1]).abs(), i, j - 1));
            j -= 1;
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut est_used = vec![false; est.len()];
    let mut ref_used = vec![false; reference.len()];
    let mut pairs = Vec::new();
    for (_, i, j) in candidates {
        if !est_used[i] && !ref_used[j] {
            est_used[i] = true;
            ref_used[j] = true;
            pairs.push((i, j));
        }
    }
    if pairs.is_empty() {
        return Err(Error::NoAssociation);
    }
    pairs.sort_unstable();
    Ok(pairs)
}

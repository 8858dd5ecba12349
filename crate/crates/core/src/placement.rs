//! Enumeration of admissible break placements and the deterministic choice
//! among their scores.

use crate::timeseries::Year;

/// RMS values closer than this are treated as ties.
pub const RMS_TIE_TOLERANCE: f64 = 1e-12;

/// Every sorted `k`-subset of `allowed` that splits `[first, last]` into
/// pieces `[first, b1)`, `[b1, b2)`, …, `[bk, last]` of at least `min_len`
/// years each.
pub(crate) fn placements(allowed: &[Year], k: usize, first: Year, last: Year, min_len: i32) -> Vec<Vec<Year>> {
    let mut allowed: Vec<Year> = allowed
        .iter()
        .copied()
        .filter(|&b| b - first >= min_len && last - b + 1 >= min_len)
        .collect();
    allowed.sort_unstable();
    allowed.dedup();

    let mut out = Vec::new();
    if last - first + 1 < min_len {
        return out;
    }
    let mut current = Vec::with_capacity(k);
    extend(&allowed, 0, k, first, last, min_len, &mut current, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn extend(
    allowed: &[Year],
    from: usize,
    k: usize,
    prev: Year,
    last: Year,
    min_len: i32,
    current: &mut Vec<Year>,
    out: &mut Vec<Vec<Year>>,
) {
    if current.len() == k {
        out.push(current.clone());
        return;
    }
    let remaining = (k - current.len()) as i32;
    for i in from..allowed.len() {
        let b = allowed[i];
        if b - prev < min_len {
            continue;
        }
        // the remaining breaks and the final piece still have to fit
        if last + 1 - b < remaining * min_len {
            break;
        }
        current.push(b);
        extend(allowed, i + 1, k, b, last, min_len, current, out);
        current.pop();
    }
}

/// Lowest RMS wins; among placements within [`RMS_TIE_TOLERANCE`] of the
/// minimum, the lexicographically smallest break set wins. The result does
/// not depend on the order of `scored`.
pub(crate) fn pick_best(scored: &[(Vec<Year>, f64)]) -> Option<(Vec<Year>, f64)> {
    let min = scored
        .iter()
        .map(|(_, r)| *r)
        .filter(|r| r.is_finite())
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return None;
    }
    scored
        .iter()
        .filter(|(_, r)| r.is_finite() && *r <= min + RMS_TIE_TOLERANCE)
        .min_by(|a, b| a.0.cmp(&b.0))
        .cloned()
}

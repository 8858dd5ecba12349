use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::Panel;
use super::{AnchorMode, FitReport};
use crate::error::{Error, Result};
use crate::placement::{pick_best, placements};
use crate::timeseries::{AnnualSeries, GrowthSeries, Year};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    pub min_segment: usize,
    /// Half-width of the window searched around each candidate year.
    pub search_radius: i32,
    pub anchor_mode: AnchorMode,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            min_segment: 5,
            search_radius: 3,
            anchor_mode: AnchorMode::Measured,
        }
    }
}

/// Sum of squared residuals of every admissible segment `[s, e]` under
/// measured anchors, where segments are independent of each other.
struct SegmentTable {
    n: usize,
    sse: Vec<f64>,
}

impl SegmentTable {
    fn new(panel: &Panel, min_len: usize) -> Self {
        let n = panel.len();
        let mut sse = vec![f64::INFINITY; n * n];
        sse.par_chunks_mut(n).enumerate().for_each(|(s, row)| {
            for e in (s + min_len.max(2) - 1)..n {
                if let Ok(f) = panel.fit_segment(s, e, panel.u[s]) {
                    row[e] = f.sse;
                }
            }
        });
        SegmentTable { n, sse }
    }

    fn total(&self, first: Year, breaks: &[Year]) -> f64 {
        let mut s = 0usize;
        let mut total = 0.0;
        for &b in breaks {
            let next = (b - first) as usize;
            total += self.sse[s * self.n + next - 1];
            s = next;
        }
        total + self.sse[s * self.n + self.n - 1]
    }
}

/// Chooses `n_breaks` break years minimizing the whole-span residual RMS and
/// returns the corresponding fit. With no candidates every interior year is
/// eligible; otherwise only years within `search_radius` of a candidate.
/// Placements whose segments cannot be fitted are skipped.
pub fn search_breaks(
    u: &AnnualSeries,
    growth: &GrowthSeries,
    n_breaks: usize,
    candidates: &[Year],
    opts: &SearchOptions,
) -> Result<FitReport> {
    if opts.search_radius < 0 {
        return Err(Error::Constraint(format!("search_radius must be non-negative, got {}", opts.search_radius)));
    }
    let panel = Panel::new(u, growth)?;
    let (first, last) = (panel.first, panel.last());
    let min_len = opts.min_segment.max(2);

    let allowed: Vec<Year> = if candidates.is_empty() {
        (first + 1..=last).collect()
    } else {
        candidates
            .iter()
            .flat_map(|&c| c - opts.search_radius..=c + opts.search_radius)
            .collect()
    };
    let options = placements(&allowed, n_breaks, first, last, min_len as i32);
    if options.is_empty() {
        return Err(Error::Constraint(format!(
            "no placement of {n_breaks} breaks in {first}-{last} respects min_segment {}",
            opts.min_segment
        )));
    }

    let n = panel.len() as f64;
    let scored: Vec<(Vec<Year>, f64)> = match opts.anchor_mode {
        AnchorMode::Measured => {
            let table = SegmentTable::new(&panel, min_len);
            options
                .into_par_iter()
                .map(|p| {
                    let rms = (table.total(first, &p) / n).sqrt();
                    (p, rms)
                })
                .collect()
        }
        AnchorMode::Chained => options
            .into_par_iter()
            .map(|p| {
                let rms = panel.fit(&p, AnchorMode::Chained).map_or(f64::INFINITY, |(_, sse)| (sse / n).sqrt());
                (p, rms)
            })
            .collect(),
    };
    let (breaks, _) = pick_best(&scored).ok_or_else(|| {
        Error::Constraint(format!(
            "every placement of {n_breaks} breaks in {first}-{last} gives a singular segment fit"
        ))
    })?;
    let (model, _) = panel.fit(&breaks, opts.anchor_mode)?;
    FitReport::build(u, growth, model, opts.anchor_mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::okun::tests::growth;
    use crate::okun::{fit_report, predict_values, Anchor, FitOptions, PiecewiseOkun, SegmentSpec};
    use crate::timeseries::{Unit, VariableKind};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn derived(points: Vec<(Year, f64)>) -> AnnualSeries {
        AnnualSeries::new("T", VariableKind::Derived, Unit::Dimensionless, points).unwrap()
    }

    fn wiggly(n: Year) -> GrowthSeries {
        growth((1..n).map(|y| (y, 1.8 + 2.5 * (((y * 7919 + 13) % 101) as f64 / 101.0 - 0.5) * 2.0)))
    }

    fn three_segment_truth() -> PiecewiseOkun {
        PiecewiseOkun::new(
            vec![
                SegmentSpec { start_year: 0, end_year: 19, a: 1.122, b: -0.406 },
                SegmentSpec { start_year: 20, end_year: 39, a: 0.899, b: -0.465 },
                SegmentSpec { start_year: 40, end_year: 59, a: -0.250, b: -0.260 },
            ],
            vec![Anchor { year: 0, u: 5.0 }, Anchor { year: 20, u: 7.0 }, Anchor { year: 40, u: 6.0 }],
        )
        .unwrap()
    }

    #[test]
    fn zero_breaks_equals_plain_fit() {
        let g = wiggly(40);
        let u = derived((0..40).map(|y| (y, 5.0 + ((y * 31) % 9) as f64 * 0.3)).collect());
        let s = search_breaks(&u, &g, 0, &[], &SearchOptions::default()).unwrap();
        let f = fit_report(&u, &g, &[], &FitOptions::default()).unwrap();
        assert_eq!(s, f);
    }

    #[test]
    fn exact_breaks_recovered_without_noise() {
        let m = three_segment_truth();
        let g = wiggly(60);
        let u = derived(predict_values(&m, &g).unwrap());
        let r = search_breaks(&u, &g, 2, &[], &SearchOptions::default()).unwrap();
        assert_eq!(r.breaks, vec![20, 40]);

        // oracle: exhaustive loop over every admissible pair, fitted one by one
        let mut best = (vec![], f64::INFINITY);
        for b1 in 5..=55 {
            for b2 in b1 + 5..=55 {
                let Ok(rep) = fit_report(&u, &g, &[b1, b2], &FitOptions::default()) else { continue };
                if rep.statistics.residual_rms < best.1 - 1e-12 {
                    best = (vec![b1, b2], rep.statistics.residual_rms);
                }
            }
        }
        assert_eq!(best.0, r.breaks);
        for (f, t) in r.model.segments().iter().zip(m.segments()) {
            assert_relative_eq!(f.a, t.a, epsilon = 1e-8);
            assert_relative_eq!(f.b, t.b, epsilon = 1e-8);
        }
    }

    #[test]
    fn candidate_windows_restrict_the_search() {
        let m = three_segment_truth();
        let g = wiggly(60);
        let u = derived(predict_values(&m, &g).unwrap());
        let r = search_breaks(&u, &g, 2, &[22, 38], &SearchOptions::default()).unwrap();
        assert_eq!(r.breaks, vec![20, 40]);
        let narrow = SearchOptions { search_radius: 1, ..SearchOptions::default() };
        let r = search_breaks(&u, &g, 2, &[25, 38], &narrow).unwrap();
        assert!((24..=26).contains(&r.breaks[0]) && (37..=39).contains(&r.breaks[1]), "{:?}", r.breaks);
        let reordered = search_breaks(&u, &g, 2, &[38, 25], &narrow).unwrap();
        assert_eq!(r, reordered);
    }

    #[test]
    fn infeasible_requests() {
        let g = wiggly(20);
        let u = derived((0..20).map(|y| (y, 5.0 + (y % 3) as f64)).collect());
        assert!(matches!(search_breaks(&u, &g, 4, &[], &SearchOptions::default()), Err(Error::Constraint(_))));
        assert!(matches!(search_breaks(&u, &g, 1, &[1], &SearchOptions { search_radius: 0, ..SearchOptions::default() }), Err(Error::Constraint(_))));
        let flat = growth((1..20).map(|y| (y, 2.0)));
        assert!(matches!(search_breaks(&u, &flat, 1, &[], &SearchOptions::default()), Err(Error::Constraint(_))));
    }

    #[test]
    fn chained_search_runs_and_is_deterministic() {
        let m = three_segment_truth();
        let g = wiggly(60);
        let u = derived(predict_values(&m, &g).unwrap());
        let opts = SearchOptions { anchor_mode: AnchorMode::Chained, ..SearchOptions::default() };
        let a = search_breaks(&u, &g, 2, &[20, 40], &opts).unwrap();
        let b = search_breaks(&u, &g, 2, &[40, 20], &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.anchor_mode, AnchorMode::Chained);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn more_breaks_never_raise_rms(
            gvals in prop::collection::vec(-3.0f64..6.0, 35),
            uvals in prop::collection::vec(2.0f64..12.0, 36),
        ) {
            let g = growth((1..36).map(|y| (y, gvals[(y - 1) as usize])));
            let u = derived((0..36).map(|y| (y, uvals[y as usize])).collect());
            let mut prev = f64::INFINITY;
            for k in 0..=3 {
                match search_breaks(&u, &g, k, &[], &SearchOptions::default()) {
                    Ok(r) => {
                        prop_assert!(r.statistics.residual_rms <= prev + 1e-12);
                        prev = r.statistics.residual_rms;
                    }
                    Err(Error::Constraint(_)) => {}
                    Err(e) => prop_assert!(false, "{e}"),
                }
            }
        }
    }
}

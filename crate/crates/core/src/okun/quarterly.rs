use super::PiecewiseOkun;
use crate::error::{Error, Result};
use crate::timeseries::QuarterlySeries;

/// Steps the last segment's dynamics through quarterly growth:
/// `u(q) = u(q−1) + b·g(q) + a/4`, starting from `u_start` in the quarter
/// before the first growth value. Growth values are used as given, in the
/// same percent units the annual model was fitted on.
pub fn predict_quarterly(model: &PiecewiseOkun, quarterly_growth: &QuarterlySeries, u_start: f64) -> Result<QuarterlySeries> {
    if !u_start.is_finite() {
        return Err(Error::Constraint(format!("starting rate {u_start} is not finite")));
    }
    let seg = model.last_segment();
    let pts = quarterly_growth.points();
    let mut u = u_start;
    let mut out = Vec::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        if i > 0 && p.quarter != pts[i - 1].quarter.next() {
            return Err(Error::Gap {
                series: quarterly_growth.label().to_string(),
                missing: pts[i - 1].quarter.next().to_string(),
            });
        }
        u += seg.b * p.value + seg.a / 4.0;
        out.push((p.quarter, u));
    }
    QuarterlySeries::new(format!("{} predicted", quarterly_growth.label()), out)
}

/// The quarterly growth that moves unemployment from `u_prev` to `u_next`
/// under the last segment's dynamics.
pub fn implied_growth(model: &PiecewiseOkun, u_prev: f64, u_next: f64) -> Result<f64> {
    let seg = model.last_segment();
    if seg.b == 0.0 {
        return Err(Error::DegenerateRegression("last segment has b = 0; growth is not identified".into()));
    }
    Ok((u_next - u_prev - seg.a / 4.0) / seg.b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::okun::{Anchor, SegmentSpec};
    use crate::timeseries::Quarter;
    use approx::assert_relative_eq;

    fn last_us(a: f64, b: f64) -> PiecewiseOkun {
        PiecewiseOkun::new(
            vec![SegmentSpec { start_year: 2010, end_year: 2019, a, b }],
            vec![Anchor { year: 2010, u: 9.63 }],
        )
        .unwrap()
    }

    fn q(s: &str) -> Quarter {
        s.parse().unwrap()
    }

    #[test]
    fn zero_growth_zero_drift_is_flat() {
        let g = QuarterlySeries::new("g", [(q("2020Q1"), 0.0), (q("2020Q2"), 0.0), (q("2020Q3"), 0.0)]).unwrap();
        let p = predict_quarterly(&last_us(0.0, -0.26), &g, 3.6).unwrap();
        assert!(p.points().iter().all(|x| x.value == 3.6));
    }

    #[test]
    fn recursion_and_back_solve_agree() {
        let m = last_us(-0.25, -0.26);
        let g = QuarterlySeries::new("g", [(q("2020Q1"), -5.4), (q("2020Q2"), -31.8), (q("2020Q3"), 33.0)]).unwrap();
        let p = predict_quarterly(&m, &g, 3.6).unwrap();
        let mut u = 3.6;
        for (pt, gv) in p.points().iter().zip([-5.4, -31.8, 33.0]) {
            u = u - 0.26 * gv - 0.0625;
            assert_relative_eq!(pt.value, u, epsilon = 1e-12);
        }
        let prev = p.points()[1].value;
        let next = p.points()[2].value;
        assert_relative_eq!(implied_growth(&m, prev, next).unwrap(), 33.0, epsilon = 1e-10);
        assert!(implied_growth(&last_us(-0.25, 0.0), 1.0, 2.0).is_err());
    }

    #[test]
    fn missing_quarter_is_a_gap() {
        let g = QuarterlySeries::new("g", [(q("2020Q1"), 1.0), (q("2020Q3"), 1.0)]).unwrap();
        let err = predict_quarterly(&last_us(-0.25, -0.26), &g, 3.6).unwrap_err();
        assert!(matches!(err, Error::Gap { ref missing, .. } if missing == "2020Q2"));
    }
}

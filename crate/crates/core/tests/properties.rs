mod common;

use common::{check_invariants, check_monotone, check_oracle, frame_strategy};
use flipaudit::fairness::statistical_parity_difference;
use flipaudit::{
    build_report, parse_structured, render_chart, render_structured, sp_equalizing_debiaser, Metric, Threshold,
    ThresholdConfig,
};
use proptest::prelude::*;

fn metric_strategy() -> impl Strategy<Value = Metric> {
    prop::sample::select(Metric::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn library_matches_oracle(frame in frame_strategy(200)) {
        check_oracle(&frame).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn invariants_hold(frame in frame_strategy(200)) {
        check_invariants(&frame).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn bands_are_monotone(
        metric in metric_strategy(),
        ideal in -2.0f64..2.0,
        acceptable in 0.01f64..1.0,
        extra in 0.01f64..1.0,
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
    ) {
        let t = Threshold::new(ideal, acceptable, acceptable + extra);
        check_monotone(metric, t, a, b).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn structured_report_round_trips(frame in frame_strategy(60)) {
        let r = build_report(&frame, &ThresholdConfig::default(), None).unwrap();
        prop_assert_eq!(parse_structured(&render_structured(&r)).unwrap(), r);
    }

    #[test]
    fn chart_is_deterministic_with_three_panels(frame in frame_strategy(60)) {
        let r = build_report(&frame, &ThresholdConfig::default(), None).unwrap();
        let svg = render_chart(&r);
        prop_assert_eq!(&svg, &render_chart(&r));
        prop_assert_eq!(svg.matches(r#"<g class="panel""#).count(), 3);
    }

    #[test]
    fn debiaser_reaches_epsilon(frame in frame_strategy(120), eps in 0.01f64..0.5, seed in any::<u64>()) {
        let out = sp_equalizing_debiaser(&frame, eps, seed).unwrap();
        let sp = statistical_parity_difference(&out, frame.group()).unwrap();
        prop_assert!(sp.abs() <= eps, "sp {} eps {}", sp, eps);
    }
}

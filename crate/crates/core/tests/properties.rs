mod common;

use std::collections::BTreeSet;

use chrono::{Duration, NaiveDate};
use common::{close, corpus, duplicated};
use proptest::prelude::*;
use skillscope_core::corpus::{build_index, normalize_skill, skill_key, JobAd, SkillVocabulary};
use skillscope_core::indicators::{posting_growth, ShortageIndicators};
use skillscope_core::occupations::{compute_intensity, TargetSkills};
use skillscope_core::similarity::compute_theta;
use skillscope_core::skillmetrics::{compute_effective_use, compute_rca};
use skillscope_core::timeseries::{aggregate_daily, smape, DateSpan, GroupSelector};

proptest! {
    #[test]
    fn normalization_idempotent(raw in "[ \\ta-zA-Z/+#.]{0,24}") {
        let once = normalize_skill(&raw);
        prop_assert_eq!(normalize_skill(&once), once.clone());
        prop_assert_eq!(skill_key(&skill_key(&raw)), skill_key(&raw));
    }

    #[test]
    fn marginals_sum_to_grand_total(ads in corpus()) {
        let vocab = SkillVocabulary::from_ads(&ads);
        let idx = build_index(&ads, &vocab).unwrap();
        idx.check_invariants().unwrap();
        let slots: u64 = ads.iter().map(|a| a.skills.len() as u64).sum();
        prop_assert_eq!(idx.grand_total(), slots);
    }

    #[test]
    fn duplication_doubles_marginals_and_keeps_ratios(ads in corpus()) {
        let vocab = SkillVocabulary::from_ads(&ads);
        let doubled = duplicated(&ads);
        let idx1 = build_index(&ads, &vocab).unwrap();
        let idx2 = build_index(&doubled, &vocab).unwrap();
        prop_assert_eq!(idx2.grand_total(), 2 * idx1.grand_total());
        for s in 0..vocab.len() {
            prop_assert_eq!(idx2.skill_total(s), 2 * idx1.skill_total(s));
        }

        let rca1 = compute_rca(&idx1).unwrap();
        let rca2 = compute_rca(&idx2).unwrap();
        for j in 0..ads.len() {
            for s in 0..vocab.len() {
                let a = rca1.get(j, s).unwrap_or(0.0);
                prop_assert!(close(a, rca2.get(j, s).unwrap_or(0.0), 1e-12));
                prop_assert!(close(a, rca2.get(j + ads.len(), s).unwrap_or(0.0), 1e-12));
            }
        }

        let t1 = compute_theta(&compute_effective_use(&rca1));
        let t2 = compute_theta(&compute_effective_use(&rca2));
        for a in 0..vocab.len() {
            for b in 0..vocab.len() {
                if a != b {
                    prop_assert!(close(t1.get(a, b), t2.get(a, b), 1e-12));
                }
            }
        }

        let target = TargetSkills::new(["s0", "s1", "s2"]);
        let e1 = compute_intensity(&ads, &target).unwrap();
        let e2 = compute_intensity(&doubled, &target).unwrap();
        for (p, q) in e1.iter().zip(&e2) {
            prop_assert_eq!(&p.occupation, &q.occupation);
            prop_assert!(close(p.eta, q.eta, 1e-12));
            prop_assert_eq!(2 * p.ads, q.ads);
        }
    }

    #[test]
    fn theta_symmetric_and_bounded(ads in corpus()) {
        let vocab = SkillVocabulary::from_ads(&ads);
        let rca = compute_rca(&build_index(&ads, &vocab).unwrap()).unwrap();
        let theta = compute_theta(&compute_effective_use(&rca));
        for a in 0..vocab.len() {
            for b in 0..vocab.len() {
                if a == b {
                    continue;
                }
                let t = theta.get(a, b);
                prop_assert_eq!(t, theta.get(b, a));
                prop_assert!((0.0..=1.0).contains(&t));
            }
        }
    }

    #[test]
    fn eta_grows_with_target(ads in corpus(), mask in 1u32..512, extra in 0usize..10) {
        let small: BTreeSet<String> = (0..10)
            .filter(|s| mask & (1 << s) != 0)
            .map(|s| format!("s{s}"))
            .collect();
        let mut large = small.clone();
        large.insert(format!("s{extra}"));
        let p1 = compute_intensity(&ads, &TargetSkills::new(small)).unwrap();
        let p2 = compute_intensity(&ads, &TargetSkills::new(large)).unwrap();
        for p in &p1 {
            let q = p2.iter().find(|q| q.occupation == p.occupation).unwrap();
            prop_assert!(q.eta >= p.eta);
            prop_assert!((0.0..=1.0).contains(&p.eta));
        }
    }

    #[test]
    fn smape_properties(
        pairs in prop::collection::vec((0.0f64..1e4, 0.0f64..1e4), 1..50),
        k in 0.001f64..1000.0,
    ) {
        let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let f: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let s = smape(&a, &f).unwrap();
        prop_assert!((0.0..=200.0).contains(&s));
        prop_assert_eq!(s, smape(&f, &a).unwrap());
        let ka: Vec<f64> = a.iter().map(|v| v * k).collect();
        let kf: Vec<f64> = f.iter().map(|v| v * k).collect();
        prop_assert!((smape(&ka, &kf).unwrap() - s).abs() < 1e-9);
        prop_assert_eq!(smape(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn daily_sum_equals_matching_ads(days in prop::collection::vec((0i64..40, 0usize..3), 0..60)) {
        let start = NaiveDate::from_ymd_opt(2017, 3, 1).unwrap();
        let ads: Vec<JobAd> = days
            .iter()
            .enumerate()
            .map(|(i, &(d, occ))| JobAd {
                posted_date: start + Duration::days(d),
                ..common::ad(i, &format!("occ{occ}"), &[0])
            })
            .collect();
        let span = DateSpan::new(start + Duration::days(5), start + Duration::days(30)).unwrap();
        let group = GroupSelector::occupation("occ1");
        let s = aggregate_daily(&ads, &group, "occ1", &span);
        let expected = ads
            .iter()
            .filter(|a| a.occupation == "occ1" && span.contains(a.posted_date))
            .count();
        prop_assert_eq!(s.len(), span.days());
        prop_assert_eq!(s.total() as usize, expected);
    }

    #[test]
    fn indicators_permutation_invariant(
        rows in prop::collection::vec((0i64..1200, 30_000.0f64..150_000.0, 10.0f64..20.0, 0.0f64..10.0), 1..80),
        rotate in 0usize..80,
    ) {
        let start = NaiveDate::from_ymd_opt(2014, 1, 1).unwrap();
        let ads: Vec<JobAd> = rows
            .iter()
            .enumerate()
            .map(|(i, &(d, sal, edu, exp))| JobAd {
                posted_date: start + Duration::days(d),
                salary_min: Some(sal),
                salary_max: Some(sal + 10_000.0),
                education_years: Some(edu),
                experience_years: Some(exp),
                ..common::ad(i, "o", &[0])
            })
            .collect();
        let mut shuffled = ads.clone();
        shuffled.rotate_left(rotate % ads.len());
        shuffled.reverse();
        let span = DateSpan::new(start, start + Duration::days(1199)).unwrap();
        let a = ShortageIndicators::compute("o", &ads, &span);
        let b = ShortageIndicators::compute("o", &shuffled, &span);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn growth_matches_spreadsheet(counts in prop::collection::vec(0u64..1000, 2..8)) {
        let rows: Vec<(i32, u64)> = counts.iter().enumerate().map(|(i, &c)| (2010 + i as i32, c)).collect();
        let g = posting_growth(&rows).unwrap();
        let mut defined = Vec::new();
        for i in 1..counts.len() {
            let expected = (counts[i - 1] > 0)
                .then(|| (counts[i] as f64 / counts[i - 1] as f64 - 1.0) * 100.0);
            prop_assert_eq!(g.years[i].growth.is_some(), expected.is_some());
            if let (Some(x), Some(y)) = (g.years[i].growth, expected) {
                prop_assert!((x - y).abs() < 1e-9);
                defined.push(y);
            }
        }
        match g.mean {
            None => prop_assert!(defined.is_empty()),
            Some(m) => prop_assert!((m - defined.iter().sum::<f64>() / defined.len() as f64).abs() < 1e-9),
        }
    }
}

proptest! {
    #[test]
    fn backtest_report_json_round_trip_is_exact(scores in prop::collection::vec(0.0f64..200.0, 1..40)) {
        use skillscope_core::timeseries::{BacktestReport, Quantiles};
        let report = BacktestReport {
            label: "g".into(),
            train_days: 10,
            test_days: 5,
            iterations: scores.len(),
            summary: Quantiles::of(&scores).unwrap(),
            scores,
        };
        let back: BacktestReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
        prop_assert_eq!(back, report);
    }
}

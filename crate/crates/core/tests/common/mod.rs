#![allow(dead_code)]

use chrono::NaiveDate;
use proptest::prelude::*;
use skillscope_core::corpus::JobAd;

pub fn ad(id: usize, occupation: &str, skills: &[usize]) -> JobAd {
    let mut skills: Vec<String> = skills.iter().map(|s| format!("s{s}")).collect();
    skills.sort();
    skills.dedup();
    JobAd {
        id: format!("J{id}"),
        posted_date: NaiveDate::from_ymd_opt(2016, 1, 1).unwrap(),
        occupation: occupation.to_string(),
        skills,
        salary_min: None,
        salary_max: None,
        education_years: None,
        experience_years: None,
    }
}

/// Up to 20 ads over up to 10 skills and 4 occupations; every ad non-empty.
pub fn corpus() -> impl Strategy<Value = Vec<JobAd>> {
    (1usize..=10).prop_flat_map(|n_skills| {
        prop::collection::vec((1u32..(1 << n_skills), 0usize..4), 1..=20).prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(j, (mask, occ))| {
                    let skills: Vec<usize> = (0..10).filter(|s| mask & (1 << s) != 0).collect();
                    ad(j, &format!("occ{occ}"), &skills)
                })
                .collect()
        })
    })
}

/// Every ad twice; the copies get fresh ids.
pub fn duplicated(ads: &[JobAd]) -> Vec<JobAd> {
    let mut out = ads.to_vec();
    out.extend(ads.iter().map(|a| JobAd {
        id: format!("{}-dup", a.id),
        ..a.clone()
    }));
    out
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs())
}

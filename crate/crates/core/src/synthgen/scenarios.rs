//! Ready-made configurations used by the tests and the demo.

use chrono::NaiveDate;

use super::{
    AttributeSpec, BackgroundSkill, ClusterSpec, ClusterUse, GrowthChange, OccupationSpec,
    SynthConfig,
};

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).expect("valid date")
}

fn uses(cluster: &str, probability: f64) -> Vec<ClusterUse> {
    vec![ClusterUse {
        cluster: cluster.into(),
        probability,
    }]
}

fn attr(level: f64, trend_per_year: f64, noise_sd: f64, coverage: f64) -> Option<AttributeSpec> {
    Some(AttributeSpec {
        level,
        trend_per_year,
        noise_sd,
        coverage,
    })
}

/// Names of the skills in [`cluster_recovery`]'s planted cluster.
pub fn recovery_cluster_skills() -> Vec<String> {
    (1..=8).map(|i| format!("cluster skill {i}")).collect()
}

/// One 8-skill cluster with cohesion 0.9 used by a single occupation, and
/// 50 independent background skills with ubiquity between 0.02 and 0.18.
pub fn cluster_recovery(seed: u64) -> SynthConfig {
    SynthConfig {
        seed,
        start_date: date(2016, 1, 1),
        n_days: 60,
        exact_counts: false,
        noise: 0.0,
        weekly_amplitude: 0.0,
        yearly_amplitude: 0.0,
        clusters: vec![ClusterSpec {
            name: "planted".into(),
            skills: recovery_cluster_skills(),
            cohesion: 0.9,
        }],
        background_skills: (0..50)
            .map(|i| BackgroundSkill {
                name: format!("background {i:02}"),
                ubiquity: 0.02 + 0.16 * i as f64 / 49.0,
            })
            .collect(),
        occupations: vec![
            OccupationSpec {
                clusters: uses("planted", 1.0),
                ..OccupationSpec::new("analyst", 20.0)
            },
            OccupationSpec {
                own_skills: vec!["filing".into(), "typing".into(), "phones".into()],
                ..OccupationSpec::new("clerk", 40.0)
            },
        ],
    }
}

/// Occupation `planted` with designed η = 0.50 in cluster `target`, and four
/// background occupations at designed η ≈ 0.048.
pub fn occupation_selection(seed: u64) -> SynthConfig {
    let own = |prefix: &str| (0..12).map(|i| format!("{prefix} task {i}")).collect();
    let mut occupations = vec![OccupationSpec {
        clusters: uses("target", 1.0),
        own_skills: own("planted"),
        ..OccupationSpec::new("planted", 20.0)
    }];
    for k in 0..4 {
        let name = format!("background occupation {k}");
        occupations.push(OccupationSpec {
            clusters: uses("target", 0.05),
            own_skills: own(&name),
            ..OccupationSpec::new(name, 20.0)
        });
    }
    SynthConfig {
        seed,
        start_date: date(2016, 1, 1),
        n_days: 60,
        exact_counts: false,
        noise: 0.0,
        weekly_amplitude: 0.0,
        yearly_amplitude: 0.0,
        clusters: vec![ClusterSpec {
            name: "target".into(),
            skills: (1..=8).map(|i| format!("target skill {i}")).collect(),
            cohesion: 0.75,
        }],
        background_skills: Vec::new(),
        occupations,
    }
}

/// Skill cluster shared by the data occupations in [`shortage_scenario`].
pub fn dsa_cluster_skills() -> Vec<String> {
    [
        "Machine Learning",
        "Data Science",
        "Big Data",
        "Data Mining",
        "Artificial Intelligence",
        "Apache Hadoop",
        "R",
        "Python",
        "SQL",
        "Tableau",
    ]
    .map(String::from)
    .to_vec()
}

/// Seeds for expanding the data-skill cluster.
pub fn dsa_seeds() -> Vec<String> {
    vec!["Machine Learning".into(), "Data Science".into()]
}

/// Label of the occupation planted as shortage-consistent on all five
/// indicators in [`shortage_scenario`].
pub const SHORTAGE_OCCUPATION: &str = "Data Scientist";

/// Four data occupations and three high-volume unrelated occupations,
/// starting 2014-01-01. `Data Scientist` has fast, changing growth, high and
/// rising salary, high education and low, falling experience. The other
/// data occupations each sit on the shortage side of at most one
/// attribute indicator.
pub fn shortage_scenario(seed: u64, n_days: usize) -> SynthConfig {
    let own = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let data_occ = |name: &str, category: &str, rate: f64, cluster_p: f64| OccupationSpec {
        category: Some(category.into()),
        clusters: uses("dsa", cluster_p),
        ..OccupationSpec::new(name, rate)
    };
    let occupations = vec![
        OccupationSpec {
            annual_growth: 0.45,
            growth_changes: vec![
                GrowthChange {
                    day: 800,
                    annual_growth: 0.15,
                },
                GrowthChange {
                    day: 1300,
                    annual_growth: 0.7,
                },
            ],
            own_skills: own(&["Statistics", "Deep Learning", "TensorFlow", "Research", "Experimentation", "Spark"]),
            salary: attr(120_000.0, 4_000.0, 8_000.0, 0.6),
            education: attr(18.0, 0.0, 1.0, 0.8),
            experience: attr(3.0, -0.15, 1.0, 0.7),
            ..data_occ(SHORTAGE_OCCUPATION, "Data Scientists and Advanced Analysts", 8.0, 0.9)
        },
        OccupationSpec {
            own_skills: own(&["Excel", "Reporting", "Data Quality", "Dashboards", "Stakeholder Management", "Power BI"]),
            salary: attr(85_000.0, 0.0, 8_000.0, 0.6),
            education: attr(13.8, 0.0, 1.0, 0.8),
            experience: attr(5.0, 0.0, 1.0, 0.7),
            ..data_occ("Data / Data Mining Analyst", "Data Analyst", 10.0, 0.6)
        },
        OccupationSpec {
            annual_growth: -0.02,
            own_skills: own(&["Oracle", "Backup Administration", "Performance Tuning", "Linux", "PL/SQL", "Replication"]),
            salary: attr(95_000.0, 0.0, 8_000.0, 0.6),
            education: attr(13.5, 0.0, 1.0, 0.8),
            experience: attr(6.0, 0.0, 1.0, 0.7),
            ..data_occ("Database Administrator", "Data Systems Developers", 6.0, 0.6)
        },
        OccupationSpec {
            annual_growth: -0.01,
            own_skills: own(&["Test Planning", "Quality Assurance", "Defect Tracking", "Calibration", "Test Scripts", "Documentation"]),
            salary: attr(62_000.0, 0.0, 6_000.0, 0.6),
            education: attr(15.5, 0.0, 1.0, 0.8),
            experience: attr(5.5, 0.0, 1.0, 0.7),
            ..data_occ("Test Technician", "Functional Analysts", 4.0, 0.6)
        },
        OccupationSpec {
            annual_growth: 0.06,
            clusters: uses("dsa", 0.02),
            own_skills: own(&["Accounting", "Auditing", "Taxation", "Reconciliation", "Payroll", "Budgeting"]),
            salary: attr(75_000.0, 1_000.0, 8_000.0, 0.6),
            education: attr(16.0, 0.0, 1.0, 0.8),
            experience: attr(5.0, 0.0, 1.0, 0.7),
            ..OccupationSpec::new("Accountant", 40.0)
        },
        OccupationSpec {
            annual_growth: 0.06,
            own_skills: own(&["Patient Care", "Medication Administration", "Triage", "Wound Care", "Aged Care", "Infection Control"]),
            salary: attr(70_000.0, 1_000.0, 6_000.0, 0.6),
            education: attr(16.0, 0.0, 1.0, 0.8),
            experience: attr(4.5, 0.0, 1.0, 0.7),
            ..OccupationSpec::new("Registered Nurse", 50.0)
        },
        OccupationSpec {
            annual_growth: 0.05,
            own_skills: own(&["Customer Service", "Retail Sales", "Cash Handling", "Merchandising", "Stock Control", "Point of Sale"]),
            salary: attr(50_000.0, 500.0, 5_000.0, 0.6),
            education: attr(12.0, 0.0, 1.0, 0.8),
            experience: attr(3.5, 0.0, 1.0, 0.7),
            ..OccupationSpec::new("Sales Assistant", 60.0)
        },
    ];
    SynthConfig {
        seed,
        start_date: date(2014, 1, 1),
        n_days,
        exact_counts: false,
        noise: 0.0,
        weekly_amplitude: 0.3,
        yearly_amplitude: 0.1,
        clusters: vec![ClusterSpec {
            name: "dsa".into(),
            skills: dsa_cluster_skills(),
            cohesion: 0.8,
        }],
        background_skills: vec![
            BackgroundSkill {
                name: "Communication Skills".into(),
                ubiquity: 0.4,
            },
            BackgroundSkill {
                name: "Teamwork / Collaboration".into(),
                ubiquity: 0.3,
            },
            BackgroundSkill {
                name: "Microsoft Office".into(),
                ubiquity: 0.2,
            },
        ],
        occupations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        cluster_recovery(1).validate().unwrap();
        occupation_selection(1).validate().unwrap();
        shortage_scenario(1, 1461).validate().unwrap();
    }

    #[test]
    fn designed_eta_of_selection_preset() {
        let cfg = occupation_selection(0);
        let eta = cfg.designed_eta(&cfg.occupations[0])["target"];
        assert!((eta - 0.5).abs() < 1e-12);
        for occ in &cfg.occupations[1..] {
            assert!(cfg.designed_eta(occ)["target"] <= 0.05);
        }
    }
}

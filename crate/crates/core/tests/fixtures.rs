use std::collections::{BTreeMap, BTreeSet};

use skillscope_core::occupations::{select_occupations, CategoryMap, OccupationProfile, SelectionParams};
use skillscope_core::similarity::SkillSetResult;

const SKILLS: &str = include_str!("fixtures/dsa_skills_top150.csv");
const OCCUPATION_ADS: &str = include_str!("fixtures/dsa_occupation_ads.csv");

#[test]
fn skill_table_round_trips_byte_for_byte() {
    let set = SkillSetResult::read_csv(SKILLS.as_bytes()).unwrap();
    assert_eq!(set.len(), 150);
    set.check_invariants().unwrap();
    assert!(set.skills.iter().enumerate().all(|(i, s)| s.rank == i + 1));
    let mut out = Vec::new();
    set.write_csv(&mut out).unwrap();
    assert_eq!(String::from_utf8(out).unwrap(), SKILLS);
}

#[test]
fn skill_table_keys_are_distinct() {
    let set = SkillSetResult::read_csv(SKILLS.as_bytes()).unwrap();
    let keys: BTreeSet<&str> = set.keys().collect();
    assert_eq!(keys.len(), 150);
    assert!(keys.contains("machine learning"));
}

fn occupation_rows() -> Vec<(String, String, usize)> {
    let mut rdr = csv::Reader::from_reader(OCCUPATION_ADS.as_bytes());
    rdr.records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].to_string(), r[1].to_string(), r[2].parse().unwrap())
        })
        .collect()
}

#[test]
fn default_categories_match_occupation_table() {
    let map = CategoryMap::dsa_default();
    let rows = occupation_rows();
    assert_eq!(rows.len(), 23);
    assert_eq!(map.len(), 23);
    for (category, occupation, _) in &rows {
        assert_eq!(map.get(occupation), Some(category.as_str()), "{occupation}");
    }
    assert_eq!(map.categories().len(), 4);
}

#[test]
fn selection_table_layout() {
    let rows = occupation_rows();
    let profiles: Vec<OccupationProfile> = rows
        .iter()
        .map(|(_, occupation, ads)| OccupationProfile {
            occupation: occupation.clone(),
            ads: *ads,
            total_slots: 10,
            target_slots: 5,
            eta: 0.5,
            category: None,
            low_support: false,
        })
        .collect();
    let selection =
        select_occupations(&profiles, &SelectionParams::default(), Some(&CategoryMap::dsa_default())).unwrap();
    let mut buf = Vec::new();
    selection.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "category,occupation,ads,eta");
    assert_eq!(lines.len(), 1 + 23 + 1);

    // rows grouped by category, occupations sorted within each
    let mut by_cat: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for line in &lines[1..24] {
        let mut f = line.splitn(4, ',');
        by_cat.entry(f.next().unwrap()).or_default().push(f.next().unwrap());
    }
    assert_eq!(by_cat.len(), 4);
    for occs in by_cat.values() {
        assert!(occs.windows(2).all(|w| w[0] < w[1]));
    }
    let total: usize = rows.iter().map(|r| r.2).sum();
    assert_eq!(lines[24], format!("TOTALS,23 occupations,{total},"));
}

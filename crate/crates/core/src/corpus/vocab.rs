use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{normalize_skill, skill_key, JobAd};

/// Ordered set of distinct skills with a dense index.
///
/// Indices are contiguous from 0 in first-seen order. Each skill keeps the
/// display casing of its first occurrence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SkillVocabulary {
    keys: Vec<String>,
    display: Vec<String>,
    #[serde(skip)]
    lookup: HashMap<String, usize>,
}

impl SkillVocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vocabulary from already-normalized ads, using keys as display names.
    pub fn from_ads(ads: &[JobAd]) -> Self {
        let mut vocab = Self::new();
        for ad in ads {
            for skill in &ad.skills {
                vocab.insert(skill);
            }
        }
        vocab
    }

    /// Inserts a raw skill name, returning its index. Existing entries keep
    /// their original display casing.
    pub fn insert(&mut self, raw: &str) -> usize {
        let key = skill_key(raw);
        if let Some(&i) = self.lookup.get(&key) {
            return i;
        }
        let i = self.keys.len();
        self.lookup.insert(key.clone(), i);
        self.keys.push(key);
        self.display.push(normalize_skill(raw));
        i
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Index of an already-normalized key.
    pub fn index_of(&self, key: &str) -> Option<usize> {
        self.lookup.get(key).copied()
    }

    /// Index of a raw (unnormalized) skill name.
    pub fn lookup(&self, raw: &str) -> Option<usize> {
        self.index_of(&skill_key(raw))
    }

    pub fn key(&self, index: usize) -> &str {
        &self.keys[index]
    }

    pub fn display(&self, index: usize) -> &str {
        &self.display[index]
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    /// Rebuilds the lookup table after deserialization.
    pub fn reindex(&mut self) {
        self.lookup = self
            .keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
    }
}

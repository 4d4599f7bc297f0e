//! Label similarity and treatment-name synonym handling.

use std::collections::HashMap;

/// Character-level Levenshtein distance, classic DP with a rolling row.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (prev[j + 1] + 1).min(cur[j] + 1).min(prev[j] + cost);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Normalized edit similarity in [0, 1]: 1 − distance / max(len). Two empty
/// strings are identical (1.0).
pub fn similarity(a: &str, b: &str) -> f64 {
    let max_len = a.chars().count().max(b.chars().count());
    if max_len == 0 {
        return 1.0;
    }
    1.0 - levenshtein(a, b) as f64 / max_len as f64
}

/// Equivalence classes of treatment-variable spellings.
///
/// Ships with the common ADaM actual/planned treatment aliases and can be
/// extended from a YAML document (a list of string lists, each list one
/// class). Lookups are case-insensitive.
#[derive(Debug, Clone)]
pub struct SynonymTable {
    class_of: HashMap<String, usize>,
    next_class: usize,
}

impl Default for SynonymTable {
    fn default() -> Self {
        let mut table = SynonymTable {
            class_of: HashMap::new(),
            next_class: 0,
        };
        table.add_class(["TRT01A", "TRTA", "TRTP", "TRT01P"]);
        table
    }
}

impl SynonymTable {
    pub fn empty() -> Self {
        SynonymTable {
            class_of: HashMap::new(),
            next_class: 0,
        }
    }

    pub fn add_class<I, S>(&mut self, members: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let class = self.next_class;
        self.next_class += 1;
        for member in members {
            self.class_of
                .insert(member.as_ref().trim().to_lowercase(), class);
        }
    }

    /// Extend from YAML: `[[TRT01A, TRTA], [Placebo, PBO]]`.
    pub fn extend_from_yaml(&mut self, doc: &str) -> Result<(), serde_yaml::Error> {
        let classes: Vec<Vec<String>> = serde_yaml::from_str(doc)?;
        for class in classes {
            self.add_class(class);
        }
        Ok(())
    }

    pub fn from_yaml(doc: &str) -> Result<Self, serde_yaml::Error> {
        let mut table = SynonymTable::default();
        table.extend_from_yaml(doc)?;
        Ok(table)
    }

    fn class(&self, text: &str) -> Option<usize> {
        self.class_of.get(&text.trim().to_lowercase()).copied()
    }

    /// True when the two texts are distinct spellings of one synonym class.
    pub fn equivalent(&self, a: &str, b: &str) -> bool {
        match (self.class(a), self.class(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    /// Canonical key for comparison: the class id when known, otherwise the
    /// lower-cased text itself.
    pub fn canon(&self, text: &str) -> String {
        match self.class(text) {
            Some(class) => format!("\u{1}syn{class}"),
            None => text.to_lowercase(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_basics() {
        assert_eq!(levenshtein("", ""), 0);
        assert_eq!(levenshtein("abc", ""), 3);
        assert_eq!(levenshtein("kitten", "sitting"), 3);
        assert_eq!(levenshtein("diarrhoea", "diarrhea"), 1);
    }

    #[test]
    fn uk_us_spelling_sits_above_threshold() {
        // hand check: 1 deletion over 9 chars → 1 - 1/9 = 0.888…
        let sim = similarity("diarrhoea", "diarrhea");
        assert!((sim - (1.0 - 1.0 / 9.0)).abs() < 1e-12);
        assert!(sim >= 0.8);
    }

    #[test]
    fn empty_strings_are_identical() {
        assert_eq!(similarity("", ""), 1.0);
        assert_eq!(similarity("a", ""), 0.0);
    }

    #[test]
    fn builtin_treatment_synonyms() {
        let table = SynonymTable::default();
        assert!(table.equivalent("TRT01A", "TRTA"));
        assert!(table.equivalent("trta", "TRTP"));
        assert!(!table.equivalent("TRT01A", "Placebo"));
        assert!(!table.equivalent("foo", "foo")); // unknown words are not a class
    }

    #[test]
    fn yaml_extension() {
        let table =
            SynonymTable::from_yaml("- [Placebo, PBO]\n- [\"Total\", \"Overall\"]").unwrap();
        assert!(table.equivalent("placebo", "PBO"));
        assert!(table.equivalent("Total", "overall"));
        assert!(table.equivalent("TRT01A", "TRTA"));
    }
}

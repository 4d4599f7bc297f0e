//! Component taxonomy classification and complexity metrics.

use super::graph::CallGraph;
use super::headers::MacroDef;
use super::lex::blank_strings;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// The six functional component types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Category {
    DataPrep,
    StatCompute,
    Formatting,
    Rendering,
    Utility,
    Orchestration,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::DataPrep => "DATA_PREP",
            Category::StatCompute => "STAT_COMPUTE",
            Category::Formatting => "FORMATTING",
            Category::Rendering => "RENDERING",
            Category::Utility => "UTILITY",
            Category::Orchestration => "ORCHESTRATION",
        }
    }

    /// Tie-break priority: analytical content outranks presentation, which
    /// outranks plumbing.
    const PRIORITY: [Category; 6] = [
        Category::StatCompute,
        Category::Rendering,
        Category::Formatting,
        Category::DataPrep,
        Category::Orchestration,
        Category::Utility,
    ];
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Keyword rule table: category → lower-case substrings.
#[derive(Debug, Clone)]
pub struct TaxonomyRules {
    rules: BTreeMap<Category, Vec<String>>,
}

const DEFAULT_RULES: &str = include_str!("../../assets/taxonomy_rules.yaml");

impl Default for TaxonomyRules {
    fn default() -> Self {
        TaxonomyRules::from_yaml(DEFAULT_RULES).expect("bundled rule table parses")
    }
}

impl TaxonomyRules {
    pub fn from_yaml(doc: &str) -> Result<Self, serde_yaml::Error> {
        let rules: BTreeMap<Category, Vec<String>> = serde_yaml::from_str(doc)?;
        Ok(TaxonomyRules {
            rules: rules
                .into_iter()
                .map(|(c, words)| (c, words.into_iter().map(|w| w.to_lowercase()).collect()))
                .collect(),
        })
    }

    /// Keyword hit count per category over a lower-cased body.
    pub fn hits(&self, body_lower: &str) -> BTreeMap<Category, usize> {
        let mut out = BTreeMap::new();
        for (category, words) in &self.rules {
            let count: usize = words
                .iter()
                .map(|w| body_lower.matches(w.as_str()).count())
                .sum();
            if count > 0 {
                out.insert(*category, count);
            }
        }
        out
    }
}

/// Minimum distinct callees for the orchestration fan-out bonus.
const ORCHESTRATION_FANOUT: usize = 4;

/// Rule-based classification: keyword hit counts, plus a fan-out bonus for
/// orchestrators; ties break by fixed priority; no hits at all falls back to
/// UTILITY.
pub fn classify_component(
    def: &MacroDef,
    body: &str,
    graph: &CallGraph,
    rules: &TaxonomyRules,
) -> Category {
    // string literals stay in: rendering macros write their control words
    // inside quoted strings
    let body_lower = body.to_lowercase();
    let mut scores = rules.hits(&body_lower);
    let fan_out = graph.callees_of(&def.name).len();
    if fan_out >= ORCHESTRATION_FANOUT {
        *scores.entry(Category::Orchestration).or_insert(0) += fan_out;
    }
    let best = scores.values().copied().max().unwrap_or(0);
    if best == 0 {
        return Category::Utility;
    }
    for candidate in Category::PRIORITY {
        if scores.get(&candidate) == Some(&best) {
            return candidate;
        }
    }
    Category::Utility
}

/// Qualitative cohesion scale, derived here from the keyword taxonomy: one
/// category of hits reads as a single concern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Cohesion {
    High,
    Medium,
    Low,
}

/// Complexity metrics for one macro.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityRecord {
    /// Non-blank, non-comment lines in the macro's span.
    pub loc: usize,
    pub parameter_count: usize,
    /// Maximum simultaneous open %do / do / select blocks.
    pub nesting_depth: usize,
    /// Distinct non-dynamic callees.
    pub efferent_coupling: usize,
    pub cohesion: Cohesion,
}

/// Parameter counts above this are flagged in report annotations.
pub const PARAMETER_COUNT_FLAG: usize = 20;

impl ComplexityRecord {
    pub fn annotations(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.parameter_count > PARAMETER_COUNT_FLAG {
            notes.push(format!(
                "parameter count {} above {}",
                self.parameter_count, PARAMETER_COUNT_FLAG
            ));
        }
        if self.loc > 500 {
            notes.push(format!("loc {} above 500", self.loc));
        }
        if self.nesting_depth > 4 {
            notes.push(format!("nesting depth {} beyond 4", self.nesting_depth));
        }
        notes
    }
}

pub fn compute_metrics(
    def: &MacroDef,
    body: &str,
    graph: &CallGraph,
    rules: &TaxonomyRules,
) -> ComplexityRecord {
    let loc = body.lines().filter(|l| !l.trim().is_empty()).count();
    // block keywords in string literals must not count toward nesting
    let nesting_depth = max_block_depth(&blank_strings(body).to_lowercase());
    let efferent_coupling = graph.callees_of(&def.name).len();
    let categories = rules.hits(&body.to_lowercase()).len();
    let cohesion = match categories {
        0 | 1 => Cohesion::High,
        2 => Cohesion::Medium,
        _ => Cohesion::Low,
    };
    ComplexityRecord {
        loc,
        parameter_count: def.parameters.len(),
        nesting_depth,
        efferent_coupling,
        cohesion,
    }
}

/// Count maximum open-block depth over %do/%end and do/select/end words.
fn max_block_depth(body_lower: &str) -> usize {
    let chars: Vec<char> = body_lower.chars().collect();
    let mut depth = 0i64;
    let mut max_depth = 0i64;
    let mut i = 0usize;
    let ident = |c: char| c.is_ascii_alphanumeric() || c == '_';
    while i < chars.len() {
        let c = chars[i];
        let macro_word = c == '%';
        let start = if macro_word { i + 1 } else { i };
        if (macro_word
            && chars
                .get(start)
                .map(|c| c.is_ascii_alphabetic())
                .unwrap_or(false))
            || (c.is_ascii_alphabetic() && (i == 0 || !ident(chars[i - 1])))
        {
            let mut j = start;
            while j < chars.len() && ident(chars[j]) {
                j += 1;
            }
            let word: String = chars[start..j].iter().collect();
            match word.as_str() {
                "do" | "select" => {
                    depth += 1;
                    max_depth = max_depth.max(depth);
                }
                "end" => depth = (depth - 1).max(0),
                _ => {}
            }
            i = j;
            continue;
        }
        i += 1;
    }
    max_depth as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    fn def(name: &str, params: usize) -> MacroDef {
        MacroDef {
            name: name.into(),
            parameters: (0..params).map(|i| (format!("p{i}"), None)).collect(),
            source_path: PathBuf::from("x.sas"),
            body_span: (1, 1),
        }
    }

    #[test]
    fn loc_ignores_blank_lines() {
        // comment stripping happens upstream; stripped comments leave blanks
        let body = "line one\n\n   \nline two\nline three";
        let rec = compute_metrics(
            &def("m", 0),
            body,
            &CallGraph::default(),
            &TaxonomyRules::default(),
        );
        assert_eq!(rec.loc, 3);
    }

    #[test]
    fn nesting_depth_counts_open_blocks() {
        let body = "%do i=1 %to 3; %do j=1 %to 2; %end; %end;";
        let rec = compute_metrics(
            &def("m", 0),
            body,
            &CallGraph::default(),
            &TaxonomyRules::default(),
        );
        assert_eq!(rec.nesting_depth, 2);

        let mixed = "%do i=1 %to 2;\n data a; do k=1 to 4; end; run;\n%end;";
        let rec = compute_metrics(
            &def("m", 0),
            mixed,
            &CallGraph::default(),
            &TaxonomyRules::default(),
        );
        assert_eq!(rec.nesting_depth, 2);
    }

    #[test]
    fn high_parameter_count_flagged() {
        let rec = compute_metrics(
            &def("m", 21),
            "x",
            &CallGraph::default(),
            &TaxonomyRules::default(),
        );
        assert!(rec.annotations().iter().any(|n| n.contains("above 20")));
        let rec = compute_metrics(
            &def("m", 20),
            "x",
            &CallGraph::default(),
            &TaxonomyRules::default(),
        );
        assert!(rec.annotations().is_empty());
    }

    #[test]
    fn classification_by_dominant_keywords() {
        let rules = TaxonomyRules::default();
        let graph = CallGraph::default();
        assert_eq!(
            classify_component(
                &def("f", 0),
                "proc freq data=a; tables trt; run;",
                &graph,
                &rules
            ),
            Category::StatCompute
        );
        assert_eq!(
            classify_component(&def("r", 0), "put '\\trowd'; put '\\cell';", &graph, &rules),
            Category::Rendering
        );
        assert_eq!(
            classify_component(&def("u", 0), "nothing recognizable here", &graph, &rules),
            Category::Utility
        );
    }

    #[test]
    fn string_literals_count_for_classification_not_nesting() {
        let rules = TaxonomyRules::default();
        let graph = CallGraph::default();
        // control words written as strings are the whole point of a renderer
        let body = "put '\\trowd'; put '\\cell';";
        assert_eq!(
            classify_component(&def("m", 0), body, &graph, &rules),
            Category::Rendering
        );
        // block keywords inside strings must not affect depth
        let rec = compute_metrics(
            &def("m", 0),
            "x = 'do do do'; %do i=1 %to 2; %end;",
            &graph,
            &rules,
        );
        assert_eq!(rec.nesting_depth, 1);
    }

    #[test]
    fn cohesion_scale() {
        let rules = TaxonomyRules::default();
        let graph = CallGraph::default();
        let single = compute_metrics(&def("m", 0), "proc freq data=a;", &graph, &rules);
        assert_eq!(single.cohesion, Cohesion::High);
        let two = compute_metrics(
            &def("m", 0),
            "proc freq data=a; ods rtf file=x;",
            &graph,
            &rules,
        );
        assert_eq!(two.cohesion, Cohesion::Medium);
        let three = compute_metrics(
            &def("m", 0),
            "proc freq data=a; ods rtf file=x; proc sort data=b; merge c d;",
            &graph,
            &rules,
        );
        assert_eq!(three.cohesion, Cohesion::Low);
    }
}

//! Coverage assessment: which macros serve which report types, where the
//! overlaps and gaps are, and how redundant the library is.

use super::classify::Category;
use super::InventoryRecord;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapGroup {
    pub report_type: String,
    pub category: Category,
    pub macros: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageMatrix {
    /// macro → report types it serves.
    pub by_macro: BTreeMap<String, Vec<String>>,
    /// ≥2 macros of the same category on the same report type.
    pub overlaps: Vec<OverlapGroup>,
    /// Report types with no macro at all.
    pub gaps: Vec<String>,
    /// Macros with no report-type annotation (listed, not fatal).
    pub unannotated: Vec<String>,
    /// Distinct (category, report type) pairs over total macros; low values
    /// mean heavy redundancy.
    pub redundancy_ratio: f64,
}

pub fn coverage_matrix(inventory: &[InventoryRecord], report_types: &[String]) -> CoverageMatrix {
    let mut by_macro: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut unannotated = Vec::new();
    let mut groups: BTreeMap<(String, Category), Vec<String>> = BTreeMap::new();
    let mut functions: BTreeSet<(Category, String)> = BTreeSet::new();
    let mut covered: BTreeSet<&str> = BTreeSet::new();

    for record in inventory {
        let name = record.macro_def.name.clone();
        if record.report_types.is_empty() {
            unannotated.push(name.clone());
        }
        by_macro.insert(name.clone(), record.report_types.clone());
        for rt in &record.report_types {
            covered.insert(rt.as_str());
            functions.insert((record.category, rt.clone()));
            groups
                .entry((rt.clone(), record.category))
                .or_default()
                .push(name.clone());
        }
    }

    let overlaps: Vec<OverlapGroup> = groups
        .into_iter()
        .filter(|(_, macros)| macros.len() >= 2)
        .map(|((report_type, category), mut macros)| {
            macros.sort();
            OverlapGroup {
                report_type,
                category,
                macros,
            }
        })
        .collect();

    let gaps: Vec<String> = report_types
        .iter()
        .filter(|rt| !covered.contains(rt.as_str()))
        .cloned()
        .collect();

    let redundancy_ratio = if inventory.is_empty() {
        0.0
    } else {
        functions.len() as f64 / inventory.len() as f64
    };

    CoverageMatrix {
        by_macro,
        overlaps,
        gaps,
        unannotated,
        redundancy_ratio,
    }
}

//! Seeded fixture generation: paired legacy RTF / native IR reports with
//! internally consistent counts and percentages, plus targeted divergence
//! injection for exercising the comparison taxonomy.
//!
//! Fixtures exercise structure, not statistics: values come from seeded
//! generators and claim no clinical meaning. The one exception is the public
//! benchmark echo: when a spec uses the published pilot arm sizes (86/84/84),
//! the generator pins the handful of published anchor values (age mean,
//! female counts, erythema percentages) so golden tests can assert them.

mod inject;

pub use inject::{inject_divergence, CompareHints, InjectError, InjectedPair};

/// (formatted text, cell type, raw value) for one generated data cell.
type CellValue = (String, CellType, Option<f64>);

use crate::ir::{Alignment, Cell, CellGrid, CellType, Dimension, ElementType, StructureEntry};
use crate::render::{to_rtf, RenderConfig};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReportKind {
    Demographics,
    AeSummary,
    AeSocPt,
    Listing,
    KmTte,
}

impl ReportKind {
    pub fn slug(self) -> &'static str {
        match self {
            ReportKind::Demographics => "demographics",
            ReportKind::AeSummary => "ae_summary",
            ReportKind::AeSocPt => "ae_soc_pt",
            ReportKind::Listing => "listing",
            ReportKind::KmTte => "km_tte",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arm {
    pub label: String,
    pub n: u32,
}

impl Arm {
    pub fn new(label: impl Into<String>, n: u32) -> Self {
        Arm {
            label: label.into(),
            n,
        }
    }
}

/// Deterministic recipe for one fixture pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub report_kind: ReportKind,
    pub arms: Vec<Arm>,
    /// Total grid rows including the header row.
    pub rows: u32,
    pub seed: u64,
}

impl FixtureSpec {
    pub fn report_id(&self) -> String {
        format!("{}_s{}", self.report_kind.slug(), self.seed)
    }

    pub fn execution_id(&self) -> String {
        format!("synth-{:016x}", self.seed)
    }
}

/// The generated pair: rendered legacy bytes and the native grid.
#[derive(Debug, Clone)]
pub struct FixturePair {
    pub rtf: Vec<u8>,
    pub grid: CellGrid,
}

/// The published pilot arm sizes that switch on anchor values.
const PILOT_NS: [u32; 3] = [86, 84, 84];

fn is_pilot_echo(arms: &[Arm]) -> bool {
    arms.len() == 3 && arms.iter().map(|a| a.n).eq(PILOT_NS)
}

/// One row being assembled: label, indent, element type, and data cells for
/// every non-label column.
struct RowSpec {
    label: String,
    indent: u32,
    element: ElementType,
    cells: Vec<CellValue>,
}

fn paired(count: u32, denom: u32) -> CellValue {
    let pct = if denom == 0 {
        0.0
    } else {
        100.0 * count as f64 / denom as f64
    };
    (
        format!("{count} ({pct:.1}%)"),
        CellType::Integer,
        Some(count as f64),
    )
}

fn decimal(value: f64, places: usize) -> CellValue {
    let text = format!("{value:.places$}");
    let rounded: f64 = text.parse().unwrap_or(value);
    (text, CellType::Decimal, Some(rounded))
}

fn integer(value: u32) -> CellValue {
    (value.to_string(), CellType::Integer, Some(value as f64))
}

fn pvalue(rng: &mut ChaCha8Rng) -> CellValue {
    let v: f64 = rng.gen_range(0.001..0.999);
    let text = format!("{v:.3}");
    let rounded: f64 = text.parse().unwrap_or(v);
    (text, CellType::Pvalue, Some(rounded))
}

fn empty() -> CellValue {
    (String::new(), CellType::Empty, None)
}

fn text(t: impl Into<String>) -> CellValue {
    (t.into(), CellType::Text, None)
}

fn footnote(t: impl Into<String>) -> CellValue {
    (t.into(), CellType::Footnote, None)
}

struct GridAssembler {
    report_id: String,
    execution_id: String,
    // (label, element type) per non-label column
    col_headers: Vec<(String, ElementType)>,
    rows: Vec<RowSpec>,
}

impl GridAssembler {
    fn new(spec: &FixtureSpec, col_headers: Vec<(String, ElementType)>) -> Self {
        GridAssembler {
            report_id: spec.report_id(),
            execution_id: spec.execution_id(),
            col_headers,
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: RowSpec) {
        self.rows.push(row);
    }

    fn build(self) -> CellGrid {
        let ncols = self.col_headers.len() + 1;
        let mut structure = Vec::new();
        let mut cells = Vec::new();
        let rid = &self.report_id;
        let eid = &self.execution_id;

        structure.push(
            StructureEntry::new(
                rid,
                eid,
                Dimension::Col,
                1,
                "",
                0,
                0,
                Alignment::Left,
                1,
                ElementType::RowHeader,
            )
            .expect("label column"),
        );
        for (i, (label, element)) in self.col_headers.iter().enumerate() {
            structure.push(
                StructureEntry::new(
                    rid,
                    eid,
                    Dimension::Col,
                    (i + 2) as u32,
                    label.clone(),
                    (i + 1) as u32,
                    0,
                    Alignment::Center,
                    1,
                    *element,
                )
                .expect("data column"),
            );
        }

        // row 1: the column header row
        structure.push(
            StructureEntry::new(
                rid,
                eid,
                Dimension::Row,
                1,
                "",
                0,
                0,
                Alignment::Left,
                1,
                ElementType::ColumnHeader,
            )
            .expect("header row"),
        );
        cells.push(Cell::new(rid, eid, 1, 1, None, "", CellType::Header, 0).expect("corner cell"));
        for (i, (label, _)) in self.col_headers.iter().enumerate() {
            cells.push(
                Cell::new(
                    rid,
                    eid,
                    1,
                    (i + 2) as u32,
                    None,
                    label.clone(),
                    CellType::Header,
                    0,
                )
                .expect("header cell"),
            );
        }

        for (r, row) in self.rows.iter().enumerate() {
            let row_id = (r + 2) as u32;
            structure.push(
                StructureEntry::new(
                    rid,
                    eid,
                    Dimension::Row,
                    row_id,
                    row.label.clone(),
                    (r + 1) as u32,
                    row.indent,
                    Alignment::Left,
                    1,
                    row.element,
                )
                .expect("data row"),
            );
            cells.push(
                Cell::new(
                    rid,
                    eid,
                    row_id,
                    1,
                    None,
                    row.label.clone(),
                    CellType::Label,
                    0,
                )
                .expect("label cell"),
            );
            assert_eq!(
                row.cells.len(),
                ncols - 1,
                "row {:?} must fill every data column",
                row.label
            );
            for (c, (formatted, cell_type, value)) in row.cells.iter().enumerate() {
                cells.push(
                    Cell::new(
                        rid,
                        eid,
                        row_id,
                        (c + 2) as u32,
                        *value,
                        formatted.clone(),
                        *cell_type,
                        0,
                    )
                    .expect("data cell"),
                );
            }
        }
        cells.sort_by_key(|c| (c.row_id, c.col_id));
        for (i, cell) in cells.iter_mut().enumerate() {
            cell.sort_order = i as u32;
        }
        CellGrid::new(cells, structure)
    }
}

fn arm_header(arm: &Arm) -> String {
    format!("{} (N={})", arm.label, arm.n)
}

fn demographics(spec: &FixtureSpec, rng: &mut ChaCha8Rng) -> CellGrid {
    let arms = &spec.arms;
    let total_n: u32 = arms.iter().map(|a| a.n).sum();
    let anchored = is_pilot_echo(arms);
    let k = arms.len();
    // columns: arms, Total, p-value, Missing
    let mut headers: Vec<(String, ElementType)> = arms
        .iter()
        .map(|a| (arm_header(a), ElementType::ColumnHeader))
        .collect();
    headers.push((format!("Total (N={total_n})"), ElementType::ColumnHeader));
    headers.push(("p-value".into(), ElementType::ColumnHeader));
    headers.push(("Missing".into(), ElementType::ColumnHeader));
    let mut grid = GridAssembler::new(spec, headers);

    let content = (spec.rows.max(2) - 1) as usize;
    let mut rows: Vec<RowSpec> = Vec::new();

    let group = |label: &str| RowSpec {
        label: label.into(),
        indent: 0,
        element: ElementType::RowHeader,
        cells: vec![empty(); k + 3],
    };
    let stat_row = |label: &str, values: Vec<CellValue>, p: Option<CellValue>, missing: u32| {
        let mut cells = values;
        cells.push(p.unwrap_or_else(empty));
        cells.push(integer(missing));
        RowSpec {
            label: label.into(),
            indent: 1,
            element: ElementType::DataRow,
            cells,
        }
    };

    // age block
    let age_means: Vec<f64> = arms
        .iter()
        .enumerate()
        .map(|(i, _)| {
            if anchored && i == 0 {
                75.2
            } else {
                rng.gen_range(70.0..80.0)
            }
        })
        .collect();
    rows.push(group("Age (years)"));
    let mut mean_cells: Vec<_> = age_means.iter().map(|m| decimal(*m, 1)).collect();
    mean_cells.push(decimal(age_means.iter().sum::<f64>() / k as f64, 1));
    rows.push(stat_row("Mean", mean_cells, Some(pvalue(rng)), 0));
    let mut sd_cells: Vec<_> = (0..k)
        .map(|_| decimal(rng.gen_range(6.0..10.0), 2))
        .collect();
    sd_cells.push(decimal(rng.gen_range(6.0..10.0), 2));
    rows.push(stat_row("SD", sd_cells, None, 0));
    let mut med_cells: Vec<_> = age_means.iter().map(|m| decimal(m.round(), 1)).collect();
    med_cells.push(decimal(77.0, 1));
    rows.push(stat_row("Median", med_cells, None, 0));
    let mut range_cells: Vec<_> = (0..k)
        .map(|_| {
            text(format!(
                "{}, {}",
                rng.gen_range(50..66),
                rng.gen_range(80..90)
            ))
        })
        .collect();
    range_cells.push(text("51, 89"));
    rows.push(stat_row("Min, Max", range_cells, None, 0));

    // sex block
    let females: Vec<u32> = arms
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if anchored {
                [53u32, 50, 40][i]
            } else {
                rng.gen_range(a.n / 3..a.n.max(2) - 1)
            }
        })
        .collect();
    rows.push(group("Sex, n (%)"));
    let mut female_cells: Vec<_> = arms
        .iter()
        .zip(&females)
        .map(|(a, f)| paired(*f, a.n))
        .collect();
    female_cells.push(paired(females.iter().sum(), total_n));
    rows.push(stat_row("Female", female_cells, Some(pvalue(rng)), 0));
    let mut male_cells: Vec<_> = arms
        .iter()
        .zip(&females)
        .map(|(a, f)| paired(a.n - f, a.n))
        .collect();
    male_cells.push(paired(total_n - females.iter().sum::<u32>(), total_n));
    rows.push(stat_row("Male", male_cells, None, 0));

    // age group block carries the >=65 label
    rows.push(group("Age group, n (%)"));
    let older: Vec<u32> = arms.iter().map(|a| rng.gen_range(a.n / 2..a.n)).collect();
    let mut young_cells: Vec<_> = arms
        .iter()
        .zip(&older)
        .map(|(a, o)| paired(a.n - o, a.n))
        .collect();
    young_cells.push(paired(total_n - older.iter().sum::<u32>(), total_n));
    rows.push(stat_row("<65", young_cells, Some(pvalue(rng)), 0));
    let mut old_cells: Vec<_> = arms
        .iter()
        .zip(&older)
        .map(|(a, o)| paired(*o, a.n))
        .collect();
    old_cells.push(paired(older.iter().sum(), total_n));
    rows.push(stat_row("\u{2265}65", old_cells, None, 0));

    // race block
    rows.push(group("Race, n (%)"));
    for race in ["White", "Black or African American", "Asian"] {
        let counts: Vec<u32> = arms.iter().map(|a| rng.gen_range(0..a.n / 2)).collect();
        let mut cells: Vec<_> = arms
            .iter()
            .zip(&counts)
            .map(|(a, c)| paired(*c, a.n))
            .collect();
        cells.push(paired(counts.iter().sum(), total_n));
        rows.push(stat_row(race, cells, None, rng.gen_range(0..2)));
    }

    // generic vitals blocks and single-row fillers to reach the row budget,
    // ending with one footnote row
    let vitals = ["Weight (kg)", "Height (cm)", "BMI (kg/m2)", "Pulse (bpm)"];
    let mut vital_idx = 0usize;
    let mut filler_idx = 0usize;
    while rows.len() + 1 < content {
        let remaining = content - 1 - rows.len();
        if remaining >= 5 && vital_idx < vitals.len() {
            let name = vitals[vital_idx];
            vital_idx += 1;
            rows.push(group(name));
            for stat in ["Mean", "SD", "Median", "Min, Max"] {
                let mut cells: Vec<_> = (0..k)
                    .map(|_| decimal(rng.gen_range(20.0..120.0), 1))
                    .collect();
                cells.push(decimal(rng.gen_range(20.0..120.0), 1));
                rows.push(stat_row(stat, cells, None, 0));
                if rows.len() + 1 >= content {
                    break;
                }
            }
        } else {
            filler_idx += 1;
            let mut cells: Vec<_> = (0..k)
                .map(|_| decimal(rng.gen_range(0.5..9.5), 2))
                .collect();
            cells.push(decimal(rng.gen_range(0.5..9.5), 2));
            rows.push(stat_row(
                &format!("Baseline biomarker {filler_idx}, mean"),
                cells,
                None,
                0,
            ));
        }
    }
    // footnote row: blank label, note in the first data column
    let mut fn_cells = vec![footnote(
        "Note: completers defined as exposure \u{2265} 80%.",
    )];
    fn_cells.extend(std::iter::repeat_with(empty).take(k + 2));
    rows.truncate(content - 1);
    rows.push(RowSpec {
        label: String::new(),
        indent: 0,
        element: ElementType::DataRow,
        cells: fn_cells,
    });

    for row in rows {
        grid.push(row);
    }
    grid.build()
}

fn ae_summary(spec: &FixtureSpec, rng: &mut ChaCha8Rng) -> CellGrid {
    let arms = &spec.arms;
    let headers: Vec<(String, ElementType)> = arms
        .iter()
        .map(|a| (arm_header(a), ElementType::ColumnHeader))
        .collect();
    let mut grid = GridAssembler::new(spec, headers);
    let content = (spec.rows.max(2) - 1) as usize;

    let mut categories: Vec<(String, bool)> = vec![
        ("Subjects with \u{2265}1 TEAE".into(), false),
        ("Serious TEAEs".into(), false),
        ("TEAEs leading to discontinuation".into(), false),
        ("TEAEs leading to death".into(), true), // the zero row
        ("Severe TEAEs".into(), false),
        ("Drug-related TEAEs".into(), false),
        ("TEAEs of special interest".into(), false),
    ];
    let mut i = 0usize;
    while categories.len() + 1 < content {
        i += 1;
        categories.push((format!("TEAE category {i}"), false));
    }
    categories.truncate(content - 1);

    for (label, zero) in categories {
        let cells: Vec<_> = arms
            .iter()
            .map(|a| {
                let count = if zero {
                    0
                } else {
                    rng.gen_range(0..=a.n * 3 / 4)
                };
                paired(count, a.n)
            })
            .collect();
        grid.push(RowSpec {
            label,
            indent: 0,
            element: ElementType::DataRow,
            cells,
        });
    }
    let mut fn_cells = vec![footnote(
        "Note: events coded with dictionary version \u{2265} 20.0.",
    )];
    fn_cells.extend(std::iter::repeat_with(empty).take(arms.len() - 1));
    grid.push(RowSpec {
        label: String::new(),
        indent: 0,
        element: ElementType::DataRow,
        cells: fn_cells,
    });
    grid.build()
}

const SOC_NAMES: [&str; 8] = [
    "Skin and subcutaneous tissue disorders",
    "Gastrointestinal disorders",
    "Nervous system disorders",
    "Cardiac disorders",
    "Psychiatric disorders",
    "Infections and infestations",
    "General disorders",
    "Musculoskeletal disorders",
];

const PT_NAMES: [&str; 10] = [
    "Application site erythema",
    "Application site pruritus",
    "Application site bruising",
    "Diarrhoea",
    "Nausea",
    "Dizziness",
    "Headache",
    "Fatigue",
    "Insomnia",
    "Arthralgia",
];

fn ae_soc_pt(spec: &FixtureSpec, rng: &mut ChaCha8Rng) -> CellGrid {
    let arms = &spec.arms;
    let total_n: u32 = arms.iter().map(|a| a.n).sum();
    let anchored = is_pilot_echo(arms);
    let mut headers: Vec<(String, ElementType)> = arms
        .iter()
        .map(|a| (arm_header(a), ElementType::ColumnHeader))
        .collect();
    headers.push((format!("Total (N={total_n})"), ElementType::ColumnHeader));
    let mut grid = GridAssembler::new(spec, headers);
    let content = (spec.rows.max(2) - 1) as usize;

    let row_of =
        |label: String, indent: u32, element: ElementType, counts: &[u32], arms: &[Arm]| {
            let mut cells: Vec<_> = arms
                .iter()
                .zip(counts.iter())
                .map(|(a, c)| paired(*c, a.n))
                .collect();
            cells.push(paired(counts.iter().sum(), total_n));
            RowSpec {
                label,
                indent,
                element,
                cells,
            }
        };

    let mut rows: Vec<RowSpec> = Vec::new();
    let any: Vec<u32> = arms
        .iter()
        .map(|a| rng.gen_range(a.n * 3 / 5..=a.n))
        .collect();
    rows.push(row_of(
        "Subjects with \u{2265}1 AE".into(),
        0,
        ElementType::TotalRow,
        &any,
        arms,
    ));

    let mut soc_idx = 0usize;
    let mut pt_serial = 0usize;
    // reserve one slot for the trailing footnote row
    while rows.len() + 1 < content {
        let remaining = content - 1 - rows.len();
        if remaining == 1 {
            // lone SOC row fills the last slot
            let counts: Vec<u32> = arms.iter().map(|a| rng.gen_range(0..=a.n / 2)).collect();
            rows.push(row_of(
                format!(
                    "{} {}",
                    SOC_NAMES[soc_idx % SOC_NAMES.len()],
                    soc_idx / SOC_NAMES.len() + 1
                ),
                0,
                ElementType::DataRow,
                &counts,
                arms,
            ));
            break;
        }
        let pt_count = rng.gen_range(3..=9).min(remaining - 1);
        let soc_name = if soc_idx < SOC_NAMES.len() {
            SOC_NAMES[soc_idx].to_string()
        } else {
            format!(
                "{} {}",
                SOC_NAMES[soc_idx % SOC_NAMES.len()],
                soc_idx / SOC_NAMES.len() + 1
            )
        };
        let first_soc = soc_idx == 0;
        soc_idx += 1;

        // generate the PT rows first so SOC counts can dominate them
        let mut pt_rows: Vec<(String, Vec<u32>)> = Vec::new();
        for p in 0..pt_count {
            pt_serial += 1;
            let name = if first_soc && p < 3 {
                // the anchor SOC keeps its published terms, including one
                // all-zero row for sparse-fill exercises
                PT_NAMES[p].to_string()
            } else if pt_serial <= PT_NAMES.len() {
                PT_NAMES[pt_serial - 1].to_string()
            } else {
                format!(
                    "{} type {}",
                    PT_NAMES[pt_serial % PT_NAMES.len()],
                    pt_serial / PT_NAMES.len()
                )
            };
            let counts: Vec<u32> = if first_soc && p == 0 && anchored {
                vec![7, 35, 52]
            } else if first_soc && p == 2 {
                vec![0; arms.len()]
            } else {
                arms.iter().map(|a| rng.gen_range(0..=a.n / 3)).collect()
            };
            pt_rows.push((name, counts));
        }
        let soc_counts: Vec<u32> = arms
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let max_pt = pt_rows.iter().map(|(_, c)| c[i]).max().unwrap_or(0);
                (max_pt + rng.gen_range(0..=3)).min(a.n)
            })
            .collect();
        rows.push(row_of(soc_name, 0, ElementType::DataRow, &soc_counts, arms));
        for (name, counts) in pt_rows {
            rows.push(row_of(name, 1, ElementType::DataRow, &counts, arms));
        }
    }
    let mut fn_cells = vec![footnote(
        "Note: subjects counted once per system organ class; severity \u{2265} grade 1.",
    )];
    fn_cells.extend(std::iter::repeat_with(empty).take(arms.len()));
    rows.truncate(content - 1);
    rows.push(RowSpec {
        label: String::new(),
        indent: 0,
        element: ElementType::DataRow,
        cells: fn_cells,
    });

    for row in rows {
        grid.push(row);
    }
    grid.build()
}

fn listing(spec: &FixtureSpec, rng: &mut ChaCha8Rng) -> CellGrid {
    let arms = &spec.arms;
    let headers: Vec<(String, ElementType)> = arms
        .iter()
        .map(|a| (arm_header(a), ElementType::ColumnHeader))
        .collect();
    let mut grid = GridAssembler::new(spec, headers);
    let content = (spec.rows.max(2) - 1) as usize;

    let named = [
        "LS Mean Change from Baseline",
        "Standard Error",
        "p-value vs Placebo",
        "95% CI Lower",
        "95% CI Upper",
    ];
    for r in 0..content {
        let label: String = named
            .get(r)
            .map(|s| s.to_string())
            .unwrap_or_else(|| format!("Visit {}", r - named.len() + 2));
        let cells: Vec<_> = (0..arms.len())
            .map(|i| {
                if label.starts_with("p-value") {
                    if i == 0 {
                        text("\u{2014}")
                    } else {
                        pvalue(rng)
                    }
                } else {
                    decimal(rng.gen_range(-8.0..2.0), 2)
                }
            })
            .collect();
        grid.push(RowSpec {
            label,
            indent: 0,
            element: ElementType::DataRow,
            cells,
        });
    }
    grid.build()
}

fn km_tte(spec: &FixtureSpec, rng: &mut ChaCha8Rng) -> CellGrid {
    let arms = &spec.arms;
    let mut headers: Vec<(String, ElementType)> = arms
        .iter()
        .map(|a| (arm_header(a), ElementType::ColumnHeader))
        .collect();
    headers.push(("Log-rank p".into(), ElementType::ColumnHeader));
    let mut grid = GridAssembler::new(spec, headers);
    let content = (spec.rows.max(2) - 1) as usize;
    let k = arms.len();

    let events: Vec<u32> = arms.iter().map(|a| rng.gen_range(a.n / 3..a.n)).collect();
    let mut rows: Vec<RowSpec> = Vec::new();

    let mut event_cells: Vec<_> = arms
        .iter()
        .zip(&events)
        .map(|(a, e)| paired(*e, a.n))
        .collect();
    event_cells.push(pvalue(rng));
    rows.push(RowSpec {
        label: "Subjects with event, n (%)".into(),
        indent: 0,
        element: ElementType::DataRow,
        cells: event_cells,
    });
    let mut censored_cells: Vec<_> = arms
        .iter()
        .zip(&events)
        .map(|(a, e)| paired(a.n - e, a.n))
        .collect();
    censored_cells.push(empty());
    rows.push(RowSpec {
        label: "Censored, n (%)".into(),
        indent: 0,
        element: ElementType::DataRow,
        cells: censored_cells,
    });
    let mut median_cells: Vec<_> = (0..k)
        .map(|_| {
            let med = rng.gen_range(10.0..20.0);
            text(format!(
                "{med:.1} ({:.1}, \u{2265}24.0)",
                med - rng.gen_range(1.0..3.0)
            ))
        })
        .collect();
    median_cells.push(empty());
    rows.push(RowSpec {
        label: "Median months (95% CI)".into(),
        indent: 0,
        element: ElementType::DataRow,
        cells: median_cells,
    });
    let mut late_cells: Vec<_> = arms
        .iter()
        .map(|a| paired(rng.gen_range(0..a.n / 2), a.n))
        .collect();
    late_cells.push(empty());
    rows.push(RowSpec {
        label: "Event-free \u{2265} 24 months, n (%)".into(),
        indent: 0,
        element: ElementType::DataRow,
        cells: late_cells,
    });

    // timepoint triplets until the budget (minus the footnote) is filled
    let mut at_risk: Vec<u32> = arms.iter().map(|a| a.n).collect();
    let mut cum_events = vec![0u32; k];
    let mut month = 0u32;
    while rows.len() + 1 < content {
        month += 3;
        for i in 0..k {
            let drop = rng.gen_range(0..=at_risk[i].min(6));
            let new_events = rng.gen_range(0..=drop);
            at_risk[i] -= drop;
            cum_events[i] += new_events;
        }
        let triplet: [(&str, Vec<CellValue>); 3] = [
            (
                "Number at risk",
                (0..k).map(|i| integer(at_risk[i])).collect(),
            ),
            (
                "Cumulative events",
                (0..k).map(|i| integer(cum_events[i])).collect(),
            ),
            (
                "Survival probability",
                (0..k)
                    .map(|i| {
                        let n = arms[i].n.max(1);
                        decimal(1.0 - cum_events[i] as f64 / n as f64, 3)
                    })
                    .collect(),
            ),
        ];
        for (name, mut cells) in triplet {
            if rows.len() + 1 >= content {
                break;
            }
            cells.push(empty());
            rows.push(RowSpec {
                label: format!("Month {month} \u{2014} {name}"),
                indent: 1,
                element: ElementType::DataRow,
                cells,
            });
        }
    }
    let mut fn_cells = vec![footnote(
        "Note: censoring applied at first interruption \u{2265} 7 days.",
    )];
    fn_cells.extend(std::iter::repeat_with(empty).take(k));
    rows.truncate(content - 1);
    rows.push(RowSpec {
        label: String::new(),
        indent: 0,
        element: ElementType::DataRow,
        cells: fn_cells,
    });

    for row in rows {
        grid.push(row);
    }
    grid.build()
}

/// Generate the fixture pair for a recipe. Pure in its inputs: the same
/// seed yields byte-identical output.
pub fn generate_pair(spec: &FixtureSpec) -> FixturePair {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let grid = match spec.report_kind {
        ReportKind::Demographics => demographics(spec, &mut rng),
        ReportKind::AeSummary => ae_summary(spec, &mut rng),
        ReportKind::AeSocPt => ae_soc_pt(spec, &mut rng),
        ReportKind::Listing => listing(spec, &mut rng),
        ReportKind::KmTte => km_tte(spec, &mut rng),
    };
    let rtf = to_rtf(&grid, &RenderConfig::default()).expect("generated grid renders");
    FixturePair { rtf, grid }
}

/// The five public-benchmark echo fixtures, sized to the published cell
/// counts (182, 81, 2070, 16, 2415 — 4764 in total).
pub fn cdisc_pilot_presets() -> Vec<FixtureSpec> {
    let pilot_arms = || {
        vec![
            Arm::new("Placebo", 86),
            Arm::new("Xanomeline Low Dose", 84),
            Arm::new("Xanomeline High Dose", 84),
        ]
    };
    vec![
        FixtureSpec {
            report_kind: ReportKind::Demographics,
            arms: pilot_arms(),
            rows: 26, // 26 x 7 = 182 cells
            seed: 1001,
        },
        FixtureSpec {
            report_kind: ReportKind::AeSummary,
            arms: vec![
                Arm::new("Xanomeline Low Dose", 84),
                Arm::new("Xanomeline High Dose", 84),
            ],
            rows: 27, // 27 x 3 = 81 cells
            seed: 1002,
        },
        FixtureSpec {
            report_kind: ReportKind::AeSocPt,
            arms: pilot_arms(),
            rows: 414, // 414 x 5 = 2070 cells
            seed: 1003,
        },
        FixtureSpec {
            report_kind: ReportKind::Listing,
            arms: pilot_arms(),
            rows: 4, // 4 x 4 = 16 cells
            seed: 1004,
        },
        FixtureSpec {
            report_kind: ReportKind::KmTte,
            arms: pilot_arms(),
            rows: 483, // 483 x 5 = 2415 cells
            seed: 1005,
        },
    ]
}

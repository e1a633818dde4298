//! Report tables: per-factor rankings, threshold membership, country
//! profiles against the world row, and variance-table comparison between
//! two subject schemes.

use crate::model::{specialization_index, CountryProfile, ProfileMatrix, Specialization};
use crate::pca::{FactorModel, VarianceRow};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Flag a cell with an up arrow when the country share is at least this
/// multiple of the world share, and a down arrow at the reciprocal bound.
const FLAG_HIGH: f64 = 1.5;
const FLAG_LOW: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub enum ReportError {
    FactorOutOfRange { f: usize, k: usize },
    UnknownMember { id: String },
    LoadingOutOfRange { label: String, value: f64 },
    CommunalityTooLarge { label: String, value: f64 },
    RaggedRows,
    NotEnoughComponents { have: usize, need: usize },
}

impl fmt::Display for ReportError {
    fn fmt(&self, f_: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReportError::FactorOutOfRange { f, k } => {
                write!(f_, "factor index {f} out of range for k={k}")
            }
            ReportError::UnknownMember { id } => write!(f_, "member {id:?} not in the matrix"),
            ReportError::LoadingOutOfRange { label, value } => {
                write!(f_, "loading {value} for {label:?} outside [-1, 1]")
            }
            ReportError::CommunalityTooLarge { label, value } => {
                write!(f_, "squared loadings for {label:?} sum to {value} > 1")
            }
            ReportError::RaggedRows => write!(f_, "loading rows have differing lengths"),
            ReportError::NotEnoughComponents { have, need } => {
                write!(f_, "comparison needs {need} components, models have {have}")
            }
        }
    }
}

impl core::error::Error for ReportError {}

/// Labelled per-item factor loadings (items are countries here).
///
/// Loadings must lie in `[-1, 1]` and each row's squared loadings must not
/// exceed 1 (within float slack), as for any correlation-based model.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingTable {
    labels: Vec<String>,
    loadings: Vec<Vec<f64>>,
    k: usize,
}

impl LoadingTable {
    pub fn new(labels: Vec<String>, loadings: Vec<Vec<f64>>) -> Result<Self, ReportError> {
        let k = loadings.first().map_or(0, Vec::len);
        for (label, row) in labels.iter().zip(&loadings) {
            if row.len() != k {
                return Err(ReportError::RaggedRows);
            }
            let mut sum_sq = 0.0;
            for &v in row {
                if !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&v) {
                    return Err(ReportError::LoadingOutOfRange {
                        label: label.clone(),
                        value: v,
                    });
                }
                sum_sq += v * v;
            }
            if sum_sq > 1.0 + 1e-6 {
                return Err(ReportError::CommunalityTooLarge {
                    label: label.clone(),
                    value: sum_sq,
                });
            }
        }
        Ok(LoadingTable {
            labels,
            loadings,
            k,
        })
    }

    pub fn from_model(model: &FactorModel) -> Result<Self, ReportError> {
        LoadingTable::new(model.labels.clone(), model.loadings.clone())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn loadings(&self) -> &[Vec<f64>] {
        &self.loadings
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Countries ordered by loading on factor `f` (0-based), descending;
/// ties break by label ascending.
pub fn rank_by_factor(table: &LoadingTable, f: usize) -> Result<Vec<(String, f64)>, ReportError> {
    if f >= table.k {
        return Err(ReportError::FactorOutOfRange { f, k: table.k });
    }
    let mut out: Vec<(String, f64)> = table
        .labels
        .iter()
        .cloned()
        .zip(table.loadings.iter().map(|row| row[f]))
        .collect();
    out.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("finite loadings")
            .then_with(|| a.0.cmp(&b.0))
    });
    Ok(out)
}

/// Countries whose loading on factor `f` is greater than or equal to
/// `theta`, in ranking order.
pub fn membership(
    table: &LoadingTable,
    f: usize,
    theta: f64,
) -> Result<Vec<(String, f64)>, ReportError> {
    Ok(rank_by_factor(table, f)?
        .into_iter()
        .filter(|(_, l)| *l >= theta)
        .collect())
}

/// Generic rectangular table with deterministic cell formatting.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub title: String,
    pub columns: Vec<String>,
    pub row_labels: Vec<String>,
    pub cells: Vec<Vec<String>>,
    pub footnotes: Vec<String>,
}

impl ReportTable {
    pub fn new(
        title: &str,
        columns: Vec<String>,
        row_labels: Vec<String>,
        cells: Vec<Vec<String>>,
    ) -> Self {
        debug_assert_eq!(row_labels.len(), cells.len());
        debug_assert!(cells.iter().all(|r| r.len() == columns.len()));
        ReportTable {
            title: title.to_string(),
            columns,
            row_labels,
            cells,
            footnotes: Vec::new(),
        }
    }

    pub fn with_footnote(mut self, note: &str) -> Self {
        self.footnotes.push(note.to_string());
        self
    }

    /// Tab-separated form: `# title`, header, rows, `# footnote` trailers.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        if !self.title.is_empty() {
            out.push_str(&format!("# {}\n", self.title));
        }
        out.push('\t');
        out.push_str(&self.columns.join("\t"));
        out.push('\n');
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            out.push_str(label);
            for cell in row {
                out.push('\t');
                out.push_str(cell);
            }
            out.push('\n');
        }
        for note in &self.footnotes {
            out.push_str(&format!("# {note}\n"));
        }
        out
    }

    /// Space-aligned plain text.
    pub fn to_text(&self) -> String {
        let label_w = self
            .row_labels
            .iter()
            .map(|l| l.chars().count())
            .max()
            .unwrap_or(0);
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for row in &self.cells {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        if !self.title.is_empty() {
            out.push_str(&self.title);
            out.push('\n');
        }
        let pad = |s: &str, w: usize| {
            let mut t = String::from(s);
            while t.chars().count() < w {
                t.push(' ');
            }
            t
        };
        out.push_str(&pad("", label_w));
        for (c, w) in self.columns.iter().zip(&widths) {
            out.push_str("  ");
            out.push_str(&pad(c, *w));
        }
        out.push('\n');
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            out.push_str(&pad(label, label_w));
            for (cell, w) in row.iter().zip(&widths) {
                out.push_str("  ");
                out.push_str(&pad(cell, *w));
            }
            out.push('\n');
        }
        for note in &self.footnotes {
            out.push_str(note);
            out.push('\n');
        }
        out
    }
}

/// Country-profile table: member rows in the given order, world row last.
/// Cells are one-decimal percentages; an arrow marks areas where the country
/// share is at least 1.5x (up) or at most 0.5x (down) the world share.
pub fn profile_table(
    matrix: &ProfileMatrix,
    members: &[String],
    world: &CountryProfile,
    title: &str,
) -> Result<ReportTable, ReportError> {
    let mut row_labels = Vec::new();
    let mut cells = Vec::new();
    let mut suspects = Vec::new();
    for id in members {
        let row = matrix
            .find(id)
            .ok_or_else(|| ReportError::UnknownMember { id: id.clone() })?;
        let ratios = specialization_index(row, world).map_err(|_| ReportError::RaggedRows)?;
        row_labels.push(row.name.clone());
        if row.suspect {
            suspects.push(row.name.clone());
        }
        cells.push(
            row.shares
                .iter()
                .zip(&ratios)
                .map(|(&share, s)| {
                    let mut cell = format!("{share:.1}%");
                    if let Specialization::Ratio(r) = s {
                        if *r >= FLAG_HIGH {
                            cell.push_str(" \u{2191}");
                        } else if *r <= FLAG_LOW {
                            cell.push_str(" \u{2193}");
                        }
                    }
                    cell
                })
                .collect(),
        );
    }
    row_labels.push(world.name.clone());
    cells.push(world.shares.iter().map(|s| format!("{s:.1}%")).collect());

    let mut table = ReportTable::new(
        title,
        matrix.scheme.short_labels().to_vec(),
        row_labels,
        cells,
    );
    for name in suspects {
        table = table.with_footnote(&format!(
            "{name}: row flagged suspect (column-shifted in the source); values as printed"
        ));
    }
    Ok(table)
}

/// Side-by-side variance rows for two factor models plus a final
/// difference row over the last compared component.
pub fn compare_schemes(
    a: &FactorModel,
    b: &FactorModel,
    top: usize,
) -> Result<ReportTable, ReportError> {
    compare_variance_rows(&a.variance_rows(top), &b.variance_rows(top), top, "A", "B")
}

pub fn compare_variance_rows(
    a: &[VarianceRow],
    b: &[VarianceRow],
    top: usize,
    label_a: &str,
    label_b: &str,
) -> Result<ReportTable, ReportError> {
    if a.len() < top || b.len() < top {
        return Err(ReportError::NotEnoughComponents {
            have: a.len().min(b.len()),
            need: top,
        });
    }
    let columns = alloc::vec![
        format!("% var ({label_a})"),
        format!("cum. % ({label_a})"),
        format!("% var ({label_b})"),
        format!("cum. % ({label_b})"),
    ];
    let mut row_labels: Vec<String> = (1..=top).map(|i| i.to_string()).collect();
    let mut cells: Vec<Vec<String>> = (0..top)
        .map(|i| {
            alloc::vec![
                format!("{:.5}", a[i].pct),
                format!("{:.5}", a[i].cum),
                format!("{:.5}", b[i].pct),
                format!("{:.5}", b[i].cum),
            ]
        })
        .collect();
    let last = top - 1;
    row_labels.push("difference".to_string());
    cells.push(alloc::vec![
        format!("{:.5}", a[last].pct - b[last].pct),
        format!("{:.5}", a[last].cum - b[last].cum),
        String::new(),
        String::new(),
    ]);
    Ok(ReportTable::new(
        &format!("Explained variance: {label_a} vs {label_b}"),
        columns,
        row_labels,
        cells,
    ))
}

//! CSV parsing and serialization for profile matrices, plus the bundled
//! source-table fixtures.
//!
//! Matrix files are UTF-8 CSV with RFC 4180 quoting and the header
//! `iso2,name,region,<area 1>,...,<area n>[,unclassified]`. The scheme is
//! detected from the canonicalized header area set (27 Scopus areas, 22 ESI
//! fields, anything else becomes a custom scheme). Serialization is
//! canonical: fixed column order, shares printed with one decimal whenever
//! that round-trips the value exactly, shortest round-trip decimal
//! otherwise, so `parse(write(m)) == m` and re-serializing parsed canonical
//! text is byte-stable.

use sciprofile_core::model::{
    CountryProfile, MatrixKind, ModelError, ProfileMatrix, SubjectScheme,
};
use sciprofile_core::pca::VarianceRow;
use sciprofile_core::report::LoadingTable;
use std::collections::BTreeMap;
use std::fmt;

/// Names accepted by [`load_fixture`]; part of the CLI contract.
pub const FIXTURE_NAMES: [&str; 7] = [
    "table1_world",
    "table2_sjr_variance",
    "table3_esi_variance",
    "annexA_loadings",
    "annexB_f1",
    "annexB_f2",
    "annexB_f3",
];

const TABLE1_WORLD: &str = include_str!("../fixtures/table1_world.csv");
const TABLE2_SJR: &str = include_str!("../fixtures/table2_sjr_variance.tsv");
const TABLE3_ESI: &str = include_str!("../fixtures/table3_esi_variance.tsv");
const ANNEX_A: &str = include_str!("../fixtures/annexA_loadings.tsv");
const ANNEX_B_F1: &str = include_str!("../fixtures/annexB_f1.csv");
const ANNEX_B_F2: &str = include_str!("../fixtures/annexB_f2.csv");
const ANNEX_B_F3: &str = include_str!("../fixtures/annexB_f3.csv");

/// Rows that are visibly column-shifted in the printed source tables; their
/// transcriptions keep the printed value order (tail-padded) and carry the
/// suspect flag so validation warns instead of anyone guessing corrections.
const SUSPECT_F2: [&str; 3] = ["RU", "KR", "PL"];
const SUSPECT_F3: [&str; 1] = ["ID"];

#[derive(Debug)]
pub enum IngestError {
    Header(String),
    UnknownArea(ModelError),
    DuplicateIso2 { code: String },
    NonNumericCell { line: usize, value: String },
    Csv(csv::Error),
    UnknownFixture { name: String },
    BadFixture { name: String, reason: String },
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestError::Header(msg) => write!(f, "bad header: {msg}"),
            IngestError::UnknownArea(e) => write!(f, "{e}"),
            IngestError::DuplicateIso2 { code } => {
                write!(f, "duplicate iso2 code {code:?}")
            }
            IngestError::NonNumericCell { line, value } => {
                write!(f, "non-numeric cell {value:?} on line {line}")
            }
            IngestError::Csv(e) => write!(f, "csv: {e}"),
            IngestError::UnknownFixture { name } => write!(
                f,
                "unknown fixture {name:?}; expected one of {}",
                FIXTURE_NAMES.join(", ")
            ),
            IngestError::BadFixture { name, reason } => {
                write!(f, "fixture {name:?} failed to load: {reason}")
            }
        }
    }
}

impl std::error::Error for IngestError {}

impl From<csv::Error> for IngestError {
    fn from(e: csv::Error) -> Self {
        IngestError::Csv(e)
    }
}

/// Case-insensitive, whitespace-normalized canonicalization of a subject
/// name through the scheme's alias map.
pub fn canonicalize_subject(raw: &str, scheme: &SubjectScheme) -> Result<String, ModelError> {
    scheme.canonicalize(raw)
}

fn header_is(h: &str, want: &str) -> bool {
    h.trim().eq_ignore_ascii_case(want)
}

/// Tries to interpret `raw_areas` as `scheme`; on success returns, for each
/// header position, the area's index in the scheme.
fn match_scheme(raw_areas: &[String], scheme: &SubjectScheme) -> Option<Vec<usize>> {
    if raw_areas.len() != scheme.len() {
        return None;
    }
    let mut perm = Vec::with_capacity(raw_areas.len());
    let mut seen = vec![false; scheme.len()];
    for raw in raw_areas {
        let canonical = scheme.canonicalize(raw).ok()?;
        let idx = scheme.area_index(&canonical)?;
        if seen[idx] {
            return None;
        }
        seen[idx] = true;
        perm.push(idx);
    }
    Some(perm)
}

/// Parses a profile matrix from CSV text.
pub fn parse_matrix(text: &str, kind: MatrixKind) -> Result<ProfileMatrix, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::Headers)
        .from_reader(text.as_bytes());

    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();
    if headers.len() < 4 {
        return Err(IngestError::Header(format!(
            "need iso2,name,region plus at least one area; got {} columns",
            headers.len()
        )));
    }
    for (i, want) in ["iso2", "name", "region"].iter().enumerate() {
        if !header_is(&headers[i], want) {
            return Err(IngestError::Header(format!(
                "column {} must be {want:?}, found {:?}",
                i + 1,
                headers[i]
            )));
        }
    }

    let mut raw_areas: Vec<String> = headers[3..].to_vec();
    let has_unclassified = raw_areas
        .last()
        .is_some_and(|h| header_is(h, "unclassified"));
    if has_unclassified {
        raw_areas.pop();
    }
    if raw_areas.is_empty() {
        return Err(IngestError::Header("no subject-area columns".to_string()));
    }

    let (scheme, perm) = if let Some(p) = match_scheme(&raw_areas, &SubjectScheme::scopus27()) {
        (SubjectScheme::scopus27(), p)
    } else if let Some(p) = match_scheme(&raw_areas, &SubjectScheme::esi22()) {
        (SubjectScheme::esi22(), p)
    } else {
        let trimmed: Vec<String> = raw_areas.iter().map(|a| a.trim().to_string()).collect();
        let scheme = SubjectScheme::custom("custom", &trimmed)
            .map_err(|e| IngestError::Header(e.to_string()))?;
        (scheme, (0..trimmed.len()).collect())
    };

    let n_areas = raw_areas.len();
    let mut rows = Vec::new();
    let mut seen = BTreeMap::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?; // ragged rows error here (the reader is strict)
        let line = idx + 2;
        let iso2 = record.get(0).unwrap_or("").to_string();
        let name = record.get(1).unwrap_or("").to_string();
        let region = record.get(2).unwrap_or("").to_string();
        if seen.insert(iso2.clone(), line).is_some() {
            return Err(IngestError::DuplicateIso2 { code: iso2 });
        }
        let mut shares = vec![0.0; n_areas];
        for (col, &target) in perm.iter().enumerate() {
            let cell = record.get(3 + col).unwrap_or("");
            let value: f64 = cell
                .trim()
                .parse()
                .map_err(|_| IngestError::NonNumericCell {
                    line,
                    value: cell.to_string(),
                })?;
            shares[target] = value;
        }
        let mut profile = CountryProfile::new(&iso2, &name, &region, shares);
        if has_unclassified {
            let cell = record.get(3 + n_areas).unwrap_or("").trim();
            if !cell.is_empty() {
                profile.unclassified =
                    Some(cell.parse().map_err(|_| IngestError::NonNumericCell {
                        line,
                        value: cell.to_string(),
                    })?);
            }
        }
        rows.push(profile);
    }

    Ok(ProfileMatrix::new(scheme, rows, kind))
}

/// One decimal when that reproduces the value exactly (the precision of the
/// bundled tables), shortest round-trip decimal otherwise.
fn format_share(v: f64) -> String {
    let one = format!("{v:.1}");
    if one.parse::<f64>() == Ok(v) {
        one
    } else {
        format!("{v}")
    }
}

/// Canonical CSV serialization; the inverse of [`parse_matrix`].
pub fn write_matrix(matrix: &ProfileMatrix) -> String {
    let any_unclassified = matrix.rows.iter().any(|r| r.unclassified.is_some());
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header: Vec<String> = vec!["iso2".into(), "name".into(), "region".into()];
    header.extend(matrix.scheme.areas().iter().cloned());
    if any_unclassified {
        header.push("unclassified".into());
    }
    writer.write_record(&header).expect("in-memory write");
    for row in &matrix.rows {
        let mut record: Vec<String> = vec![row.iso2.clone(), row.name.clone(), row.region.clone()];
        record.extend(row.shares.iter().map(|&s| format_share(s)));
        if any_unclassified {
            record.push(row.unclassified.map(format_share).unwrap_or_default());
        }
        writer.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf8")
}

/// A bundled source table.
#[derive(Debug, Clone)]
pub enum Fixture {
    Matrix(ProfileMatrix),
    Loadings(LoadingTable),
    Variance(Vec<VarianceRow>),
}

impl Fixture {
    pub fn into_matrix(self) -> Option<ProfileMatrix> {
        match self {
            Fixture::Matrix(m) => Some(m),
            _ => None,
        }
    }

    pub fn into_loadings(self) -> Option<LoadingTable> {
        match self {
            Fixture::Loadings(t) => Some(t),
            _ => None,
        }
    }

    pub fn into_variance(self) -> Option<Vec<VarianceRow>> {
        match self {
            Fixture::Variance(v) => Some(v),
            _ => None,
        }
    }
}

fn fixture_matrix(name: &str, text: &str, suspects: &[&str]) -> Result<ProfileMatrix, IngestError> {
    let mut m = parse_matrix(text, MatrixKind::Shares).map_err(|e| IngestError::BadFixture {
        name: name.to_string(),
        reason: e.to_string(),
    })?;
    for row in &mut m.rows {
        if suspects.contains(&row.iso2.as_str()) {
            row.suspect = true;
        }
    }
    Ok(m)
}

fn parse_loadings(name: &str, text: &str) -> Result<LoadingTable, IngestError> {
    let bad = |reason: String| IngestError::BadFixture {
        name: name.to_string(),
        reason,
    };
    let mut labels = Vec::new();
    let mut loadings = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(bad(format!("line {} has {} fields", i + 1, fields.len())));
        }
        labels.push(fields[0].to_string());
        let row: Result<Vec<f64>, _> = fields[1..].iter().map(|v| v.parse()).collect();
        loadings.push(row.map_err(|_| bad(format!("non-numeric loading on line {}", i + 1)))?);
    }
    LoadingTable::new(labels, loadings).map_err(|e| bad(e.to_string()))
}

fn parse_variance(name: &str, text: &str) -> Result<Vec<VarianceRow>, IngestError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let parse = |v: &str| -> Result<f64, IngestError> {
            v.parse().map_err(|_| IngestError::BadFixture {
                name: name.to_string(),
                reason: format!("non-numeric value {v:?}"),
            })
        };
        if fields.len() != 2 {
            return Err(IngestError::BadFixture {
                name: name.to_string(),
                reason: format!("line {} has {} fields", i + 1, fields.len()),
            });
        }
        out.push(VarianceRow {
            pct: parse(fields[0])?,
            cum: parse(fields[1])?,
        });
    }
    Ok(out)
}

/// Loads one of the bundled source tables by name.
pub fn load_fixture(name: &str) -> Result<Fixture, IngestError> {
    match name {
        "table1_world" => Ok(Fixture::Matrix(fixture_matrix(name, TABLE1_WORLD, &[])?)),
        "table2_sjr_variance" => Ok(Fixture::Variance(parse_variance(name, TABLE2_SJR)?)),
        "table3_esi_variance" => Ok(Fixture::Variance(parse_variance(name, TABLE3_ESI)?)),
        "annexA_loadings" => Ok(Fixture::Loadings(parse_loadings(name, ANNEX_A)?)),
        "annexB_f1" => Ok(Fixture::Matrix(fixture_matrix(name, ANNEX_B_F1, &[])?)),
        "annexB_f2" => Ok(Fixture::Matrix(fixture_matrix(
            name,
            ANNEX_B_F2,
            &SUSPECT_F2,
        )?)),
        "annexB_f3" => Ok(Fixture::Matrix(fixture_matrix(
            name,
            ANNEX_B_F3,
            &SUSPECT_F3,
        )?)),
        _ => Err(IngestError::UnknownFixture {
            name: name.to_string(),
        }),
    }
}

/// The three subject-area tables bundled from the source annex, in factor
/// order (biomedicine, basic science & engineering, agriculture).
pub fn annexb_tables() -> [ProfileMatrix; 3] {
    let get = |name: &str| {
        load_fixture(name)
            .map(|f| f.into_matrix().expect("matrix fixture"))
            .expect("bundled fixture")
    };
    [get("annexB_f1"), get("annexB_f2"), get("annexB_f3")]
}

/// All 35 exemplar countries from the three annex tables (world rows
/// excluded), concatenated into one scopus27 matrix.
pub fn annexb_combined() -> ProfileMatrix {
    let [f1, f2, f3] = annexb_tables();
    let scheme = f1.scheme.clone();
    let mut rows = Vec::new();
    for table in [f1, f2, f3] {
        rows.extend(table.country_rows().cloned());
    }
    ProfileMatrix::new(scheme, rows, MatrixKind::Shares)
}

/// Which annex table (0, 1, 2) each combined-matrix country came from.
pub fn annexb_origins() -> Vec<(String, usize)> {
    let mut out = Vec::new();
    for (t, table) in annexb_tables().iter().enumerate() {
        for row in table.country_rows() {
            out.push((row.iso2.clone(), t));
        }
    }
    out
}

/// iso2 -> region for every annex country.
pub fn annexb_regions() -> BTreeMap<String, String> {
    annexb_tables()
        .iter()
        .flat_map(|t| {
            t.country_rows()
                .map(|r| (r.iso2.clone(), r.region.clone()))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// iso2 -> display name for every annex country.
pub fn annexb_names() -> BTreeMap<String, String> {
    annexb_tables()
        .iter()
        .flat_map(|t| {
            t.country_rows()
                .map(|r| (r.iso2.clone(), r.name.clone()))
                .collect::<Vec<_>>()
        })
        .collect()
}

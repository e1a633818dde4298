//! Domain types for country subject profiles: subject-area schemes,
//! country share vectors, profile matrices and their validation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Pseudo ISO code used for the world aggregate row. ISO 3166 leaves it
/// unassigned.
pub const WORLD_CODE: &str = "WD";

const SCOPUS27: [(&str, &str); 27] = [
    ("Agricultural and Biological Sciences", "agri"),
    ("Arts and Humanities", "arts"),
    ("Biochemistry, Genetics and Molecular Biology", "biochem"),
    ("Business, Management and Accounting", "business"),
    ("Chemical Engineering", "chem-eng"),
    ("Chemistry", "chemistry"),
    ("Computer Science", "computer"),
    ("Decision Sciences", "decision"),
    ("Dentistry", "dentistry"),
    ("Earth and Planetary Sciences", "earth"),
    ("Economics, Econometrics and Finance", "economics"),
    ("Energy", "energy"),
    ("Engineering", "engineering"),
    ("Environmental Science", "environmental"),
    ("Health Professions", "health"),
    ("Immunology and Microbiology", "immunology"),
    ("Materials Science", "materials"),
    ("Mathematics", "mathematics"),
    ("Medicine", "medicine"),
    ("Multidisciplinary", "multidisciplinary"),
    ("Neuroscience", "neuroscience"),
    ("Nursing", "nursing"),
    ("Pharmacology, Toxicology and Pharmaceutics", "pharma"),
    ("Physics and Astronomy", "physics"),
    ("Psychology", "psychology"),
    ("Social Sciences", "social"),
    ("Veterinary", "veterinary"),
];

/// Variant spellings seen in source tables, mapped to canonical names.
const SCOPUS27_ALIASES: [(&str, &str); 8] = [
    // "Herat" is a recurring typo for "Earth" in SJR-derived tables.
    (
        "Herat and Planetary Sciences",
        "Earth and Planetary Sciences",
    ),
    ("arte", "Arts and Humanities"),
    ("material", "Materials Science"),
    ("arts", "Arts and Humanities"),
    ("agriculture", "Agricultural and Biological Sciences"),
    ("environment", "Environmental Science"),
    ("Materials", "Materials Science"),
    ("Pharmacology", "Pharmacology, Toxicology and Pharmaceutics"),
];

const ESI22: [&str; 22] = [
    "Agricultural Sciences",
    "Biology & Biochemistry",
    "Chemistry",
    "Clinical Medicine",
    "Computer Science",
    "Economics & Business",
    "Engineering",
    "Environment/Ecology",
    "Geosciences",
    "Immunology",
    "Materials Science",
    "Mathematics",
    "Microbiology",
    "Molecular Biology & Genetics",
    "Multidisciplinary",
    "Neuroscience & Behavior",
    "Pharmacology & Toxicology",
    "Physics",
    "Plant & Animal Science",
    "Psychiatry/Psychology",
    "Social Sciences, general",
    "Space Science",
];

/// Errors raised by profile-model operations.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    EmptyMatrix,
    WeightLengthMismatch { expected: usize, got: usize },
    NegativeWeight { index: usize },
    AllZeroWeights,
    SchemeMismatch { left: usize, right: usize },
    DuplicateArea { name: String },
    UnknownArea { raw: String, nearest: String },
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::EmptyMatrix => write!(f, "profile matrix has no rows"),
            ModelError::WeightLengthMismatch { expected, got } => {
                write!(f, "expected {expected} weights, got {got}")
            }
            ModelError::NegativeWeight { index } => {
                write!(f, "weight at index {index} is negative")
            }
            ModelError::AllZeroWeights => write!(f, "weights must not all be zero"),
            ModelError::SchemeMismatch { left, right } => {
                write!(f, "scheme mismatch: {left} vs {right} areas")
            }
            ModelError::DuplicateArea { name } => {
                write!(f, "duplicate area name after canonicalization: {name:?}")
            }
            ModelError::UnknownArea { raw, nearest } => {
                write!(
                    f,
                    "unknown subject area {raw:?} (nearest known: {nearest:?})"
                )
            }
        }
    }
}

impl core::error::Error for ModelError {}

/// An ordered list of canonical subject-area names with an alias map for
/// variant spellings.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectScheme {
    name: String,
    areas: Vec<String>,
    short: Vec<String>,
    /// normalized variant -> canonical name
    aliases: BTreeMap<String, String>,
}

fn normalize(s: &str) -> String {
    let mut out = String::new();
    let mut pending_space = false;
    for c in s.trim().chars() {
        if c.is_whitespace() {
            pending_space = true;
        } else {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            for lc in c.to_lowercase() {
                out.push(lc);
            }
        }
    }
    out
}

fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = alloc::vec![0usize; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let cost = usize::from(ca != cb);
            cur[j + 1] = (prev[j + 1] + 1).min(cur[j] + 1).min(prev[j] + cost);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

impl SubjectScheme {
    /// The 27 Scopus major subject areas (SJR portal), with the variant
    /// spellings used by the bundled source tables as aliases.
    pub fn scopus27() -> Self {
        let areas: Vec<String> = SCOPUS27.iter().map(|(a, _)| (*a).to_string()).collect();
        let short: Vec<String> = SCOPUS27.iter().map(|(_, s)| (*s).to_string()).collect();
        let mut aliases = BTreeMap::new();
        for (i, (canonical, short_name)) in SCOPUS27.iter().enumerate() {
            aliases.insert(normalize(short_name), areas[i].clone());
            let _ = canonical;
        }
        for (variant, canonical) in SCOPUS27_ALIASES {
            aliases.insert(normalize(variant), canonical.to_string());
        }
        SubjectScheme {
            name: "scopus27".to_string(),
            areas,
            short,
            aliases,
        }
    }

    /// The 22 Essential Science Indicators research fields.
    pub fn esi22() -> Self {
        let areas: Vec<String> = ESI22.iter().map(|a| (*a).to_string()).collect();
        SubjectScheme {
            name: "esi22".to_string(),
            short: areas.clone(),
            areas,
            aliases: BTreeMap::new(),
        }
    }

    /// A user-defined scheme. Area names must be unique after
    /// canonicalization (case/whitespace folding).
    pub fn custom(name: &str, areas: &[String]) -> Result<Self, ModelError> {
        let mut seen = BTreeMap::new();
        for a in areas {
            let key = normalize(a);
            if seen.insert(key, a.clone()).is_some() {
                return Err(ModelError::DuplicateArea { name: a.clone() });
            }
        }
        Ok(SubjectScheme {
            name: name.to_string(),
            areas: areas.to_vec(),
            short: areas.to_vec(),
            aliases: BTreeMap::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn areas(&self) -> &[String] {
        &self.areas
    }

    pub fn len(&self) -> usize {
        self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.areas.is_empty()
    }

    /// Short column labels in scheme order (the abbreviated headers used by
    /// the source tables for scopus27; full names otherwise).
    pub fn short_labels(&self) -> &[String] {
        &self.short
    }

    pub fn area_index(&self, canonical: &str) -> Option<usize> {
        self.areas.iter().position(|a| a == canonical)
    }

    /// Case-insensitive, whitespace-normalized lookup through the alias map.
    /// Exact canonical names pass through unchanged; unknown names are
    /// rejected naming the nearest known spelling.
    pub fn canonicalize(&self, raw: &str) -> Result<String, ModelError> {
        let key = normalize(raw);
        for a in &self.areas {
            if normalize(a) == key {
                return Ok(a.clone());
            }
        }
        if let Some(c) = self.aliases.get(&key) {
            return Ok(c.clone());
        }
        let mut best = (usize::MAX, String::new());
        for cand in self
            .areas
            .iter()
            .map(String::as_str)
            .chain(self.aliases.keys().map(String::as_str))
        {
            let d = levenshtein(&key, &normalize(cand));
            if d < best.0 {
                best = (d, cand.to_string());
            }
        }
        Err(ModelError::UnknownArea {
            raw: raw.to_string(),
            nearest: best.1,
        })
    }
}

/// One country row: ISO-2 code, display name, SJR-style region label and the
/// share vector (percent of the country's output per scheme area).
#[derive(Debug, Clone, PartialEq)]
pub struct CountryProfile {
    pub iso2: String,
    pub name: String,
    pub region: String,
    pub shares: Vec<f64>,
    /// Percentage of output lacking thematic ascription, when the source
    /// reports it. Not part of the share vector.
    pub unclassified: Option<f64>,
    /// Set on bundled rows that are visibly column-shifted in the source;
    /// validation warns instead of guessing corrected values.
    pub suspect: bool,
}

impl CountryProfile {
    pub fn new(iso2: &str, name: &str, region: &str, shares: Vec<f64>) -> Self {
        CountryProfile {
            iso2: iso2.to_string(),
            name: name.to_string(),
            region: region.to_string(),
            shares,
            unclassified: None,
            suspect: false,
        }
    }

    pub fn share(&self, scheme: &SubjectScheme, area: &str) -> Option<f64> {
        scheme
            .area_index(area)
            .and_then(|i| self.shares.get(i))
            .copied()
    }
}

/// Whether cell values are percentages of country output or raw counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Shares,
    Counts,
}

/// Countries x subject-areas matrix. Raw values are stored as provided and
/// never renormalized: Scopus multi-assigns journals to areas, so share rows
/// legitimately sum past 100%.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileMatrix {
    pub scheme: SubjectScheme,
    pub rows: Vec<CountryProfile>,
    pub kind: MatrixKind,
}

impl ProfileMatrix {
    pub fn new(scheme: SubjectScheme, rows: Vec<CountryProfile>, kind: MatrixKind) -> Self {
        ProfileMatrix { scheme, rows, kind }
    }

    pub fn find(&self, iso2: &str) -> Option<&CountryProfile> {
        self.rows.iter().find(|r| r.iso2 == iso2)
    }

    /// Rows excluding the world aggregate, if present.
    pub fn country_rows(&self) -> impl Iterator<Item = &CountryProfile> {
        self.rows.iter().filter(|r| r.iso2 != WORLD_CODE)
    }
}

/// Validation outcome: the matrix is accepted iff `errors` is empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub errors: Vec<(String, String)>,
    pub warnings: Vec<(String, String)>,
}

impl ValidationReport {
    pub fn is_accepted(&self) -> bool {
        self.errors.is_empty()
    }
}

fn iso2_well_formed(code: &str) -> bool {
    code.len() == 2 && code.chars().all(|c| c.is_ascii_uppercase())
}

/// Checks every row of the matrix and reports all problems; never aborts.
///
/// Errors: negative shares, shares above 100, wrong vector length, duplicate
/// or malformed ISO codes. Warnings: share-row sums outside [95, 160],
/// unclassified fraction above 50%, and rows carrying the suspect flag.
pub fn validate_profile(matrix: &ProfileMatrix) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let width = matrix.scheme.len();

    for row in &matrix.rows {
        let id = row.iso2.clone();
        if !iso2_well_formed(&row.iso2) {
            report
                .errors
                .push((id.clone(), format!("malformed iso2 code {:?}", row.iso2)));
        }
        *seen.entry(row.iso2.as_str()).or_insert(0) += 1;
        if row.shares.len() != width {
            report.errors.push((
                id.clone(),
                format!("expected {} shares, found {}", width, row.shares.len()),
            ));
        }
        for (i, &s) in row.shares.iter().enumerate() {
            if s < 0.0 {
                report
                    .errors
                    .push((id.clone(), format!("negative share {s} in area {i}")));
            } else if s > 100.0 {
                report
                    .errors
                    .push((id.clone(), format!("share {s} in area {i} exceeds 100")));
            }
        }
        if matrix.kind == MatrixKind::Shares && row.shares.len() == width {
            let sum: f64 = row.shares.iter().sum();
            if !(95.0..=160.0).contains(&sum) {
                report.warnings.push((
                    id.clone(),
                    format!("share row sums to {sum:.1}, outside the expected [95, 160]"),
                ));
            }
        }
        if let Some(u) = row.unclassified {
            if u > 50.0 {
                report.warnings.push((
                    id.clone(),
                    format!("{u:.1}% of output lacks thematic ascription"),
                ));
            }
        }
        if row.suspect {
            report.warnings.push((
                id.clone(),
                "row flagged suspect: column-shifted in the source table".to_string(),
            ));
        }
    }

    for (code, count) in seen {
        if count > 1 {
            report
                .errors
                .push((code.to_string(), format!("iso2 code appears {count} times")));
        }
    }
    report
}

/// Weighted arithmetic mean of all rows, returned as the `WD` world profile.
/// Uniform weights when `weights` is `None`.
pub fn world_profile(
    matrix: &ProfileMatrix,
    weights: Option<&[f64]>,
) -> Result<CountryProfile, ModelError> {
    if matrix.rows.is_empty() {
        return Err(ModelError::EmptyMatrix);
    }
    let n = matrix.rows.len();
    let uniform = alloc::vec![1.0; n];
    let w = match weights {
        Some(w) => {
            if w.len() != n {
                return Err(ModelError::WeightLengthMismatch {
                    expected: n,
                    got: w.len(),
                });
            }
            if let Some(i) = w.iter().position(|&x| x < 0.0) {
                return Err(ModelError::NegativeWeight { index: i });
            }
            w
        }
        None => &uniform,
    };
    let total: f64 = w.iter().sum();
    if total == 0.0 {
        return Err(ModelError::AllZeroWeights);
    }
    let width = matrix.scheme.len();
    let mut shares = alloc::vec![0.0; width];
    for (row, &wi) in matrix.rows.iter().zip(w) {
        for (acc, &s) in shares.iter_mut().zip(&row.shares) {
            *acc += wi * s;
        }
    }
    for s in &mut shares {
        *s /= total;
    }
    Ok(CountryProfile::new(WORLD_CODE, "World", "World", shares))
}

/// Element-wise ratio of a country share to the world share for that area.
/// Areas where the world share is zero are flagged undefined rather than
/// produced as a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Specialization {
    Ratio(f64),
    Undefined,
}

impl Specialization {
    pub fn ratio(self) -> Option<f64> {
        match self {
            Specialization::Ratio(r) => Some(r),
            Specialization::Undefined => None,
        }
    }
}

pub fn specialization_index(
    country: &CountryProfile,
    world: &CountryProfile,
) -> Result<Vec<Specialization>, ModelError> {
    if country.shares.len() != world.shares.len() {
        return Err(ModelError::SchemeMismatch {
            left: country.shares.len(),
            right: world.shares.len(),
        });
    }
    Ok(country
        .shares
        .iter()
        .zip(&world.shares)
        .map(|(&c, &w)| {
            if w > 0.0 {
                Specialization::Ratio(c / w)
            } else {
                Specialization::Undefined
            }
        })
        .collect())
}

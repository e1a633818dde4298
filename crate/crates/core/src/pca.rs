//! Q-mode principal component / factor analysis.
//!
//! In Q-mode the countries act as the variables, observed across subject
//! areas; the factor loadings are then per-country correlations with the
//! extracted components. R-mode (areas as variables) is kept as an option.
//! Explained-variance figures always come from the unrotated eigenvalues of
//! the correlation matrix; varimax only redistributes the retained loading
//! mass without changing communalities.

use crate::eigen::{jacobi_eigh, EigenError};
use crate::math;
use crate::model::ProfileMatrix;
use crate::report::ReportTable;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Convergence threshold on the varimax criterion gain between sweeps.
const VARIMAX_TOL: f64 = 1e-10;
const VARIMAX_MAX_SWEEPS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorMode {
    /// Countries are the variables, subject areas the observations.
    QMode,
    /// Subject areas are the variables, countries the observations.
    RMode,
}

impl FactorMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FactorMode::QMode => "q_mode",
            FactorMode::RMode => "r_mode",
        }
    }
}

/// How many factors to retain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FactorCount {
    Fixed(usize),
    /// Components with eigenvalue above the mean eigenvalue.
    Kaiser,
    /// Smallest k whose cumulative explained variance reaches this percent.
    Cumulative(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum PcaError {
    TooFewAreas { got: usize, need: usize },
    TooFewVariables { got: usize, need: usize },
    ZeroVariance { label: String },
    KOutOfRange { k: usize, max: usize },
    RotationNeedsTwoFactors,
    Eigen(EigenError),
}

impl fmt::Display for PcaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PcaError::TooFewAreas { got, need } => {
                write!(
                    f,
                    "correlation needs at least {need} subject areas, got {got}"
                )
            }
            PcaError::TooFewVariables { got, need } => {
                write!(f, "correlation needs at least {need} variables, got {got}")
            }
            PcaError::ZeroVariance { label } => {
                write!(
                    f,
                    "variable {label:?} has zero variance across observations"
                )
            }
            PcaError::KOutOfRange { k, max } => {
                write!(f, "factor count {k} out of range (1..={max})")
            }
            PcaError::RotationNeedsTwoFactors => write!(f, "varimax needs at least 2 factors"),
            PcaError::Eigen(e) => write!(f, "eigendecomposition failed: {e}"),
        }
    }
}

impl core::error::Error for PcaError {}

impl From<EigenError> for PcaError {
    fn from(e: EigenError) -> Self {
        PcaError::Eigen(e)
    }
}

/// A retained-factor model over a profile matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    pub mode: FactorMode,
    pub k: usize,
    /// Variable labels in input order (iso2 codes in Q-mode, areas in R-mode).
    pub labels: Vec<String>,
    /// All eigenvalues of the correlation matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Percent of total variance per component (unrotated), same order.
    pub explained: Vec<f64>,
    /// variable x k loading matrix.
    pub loadings: Vec<Vec<f64>>,
    pub rotated: bool,
    /// Sum of squared retained loadings per variable.
    pub communalities: Vec<f64>,
}

impl FactorModel {
    /// Cumulative explained variance (percent) of the leading `top`
    /// unrotated components.
    pub fn cumulative_explained(&self, top: usize) -> f64 {
        self.explained.iter().take(top).sum()
    }

    /// Variance-table rows `(percent, cumulative percent)` for the leading
    /// unrotated components.
    pub fn variance_rows(&self, top: usize) -> Vec<VarianceRow> {
        let mut cum = 0.0;
        self.explained
            .iter()
            .take(top)
            .map(|&p| {
                cum += p;
                VarianceRow { pct: p, cum }
            })
            .collect()
    }

    /// Fixed-field-order JSON form: mode, k, eigenvalues, explained,
    /// loadings (row-major, variable order preserved), rotated, labels.
    pub fn to_json(&self) -> String {
        let nums = |v: &[f64]| -> String {
            let items: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
            format!("[{}]", items.join(","))
        };
        let rows: Vec<String> = self.loadings.iter().map(|r| nums(r)).collect();
        let labels: Vec<String> = self.labels.iter().map(|l| json_string(l)).collect();
        format!(
            "{{\"mode\":{},\"k\":{},\"eigenvalues\":{},\"explained\":{},\"loadings\":[{}],\"rotated\":{},\"labels\":[{}]}}",
            json_string(self.mode.as_str()),
            self.k,
            nums(&self.eigenvalues),
            nums(&self.explained),
            rows.join(","),
            self.rotated,
            labels.join(",")
        )
    }
}

fn json_string(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// One row of a variance table: percent of total variance and the running
/// cumulative percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceRow {
    pub pct: f64,
    pub cum: f64,
}

/// Pearson correlation matrix between the mode's variables.
/// Returns the variable labels plus the symmetric matrix with unit diagonal.
pub fn correlation_matrix(
    matrix: &ProfileMatrix,
    mode: FactorMode,
) -> Result<(Vec<String>, Vec<Vec<f64>>), PcaError> {
    let (labels, observations): (Vec<String>, Vec<Vec<f64>>) = match mode {
        FactorMode::QMode => {
            if matrix.scheme.len() < 3 {
                return Err(PcaError::TooFewAreas {
                    got: matrix.scheme.len(),
                    need: 3,
                });
            }
            if matrix.rows.len() < 2 {
                return Err(PcaError::TooFewVariables {
                    got: matrix.rows.len(),
                    need: 2,
                });
            }
            (
                matrix.rows.iter().map(|r| r.iso2.clone()).collect(),
                matrix.rows.iter().map(|r| r.shares.clone()).collect(),
            )
        }
        FactorMode::RMode => {
            if matrix.rows.len() < 3 {
                return Err(PcaError::TooFewAreas {
                    got: matrix.rows.len(),
                    need: 3,
                });
            }
            if matrix.scheme.len() < 2 {
                return Err(PcaError::TooFewVariables {
                    got: matrix.scheme.len(),
                    need: 2,
                });
            }
            let labels: Vec<String> = matrix.scheme.areas().to_vec();
            let cols = (0..matrix.scheme.len())
                .map(|a| matrix.rows.iter().map(|r| r.shares[a]).collect())
                .collect();
            (labels, cols)
        }
    };

    let n = observations.len();
    let mut centered: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut norms: Vec<f64> = Vec::with_capacity(n);
    for (label, obs) in labels.iter().zip(&observations) {
        let mean: f64 = obs.iter().sum::<f64>() / obs.len() as f64;
        let c: Vec<f64> = obs.iter().map(|x| x - mean).collect();
        let norm = math::sqrt(c.iter().map(|x| x * x).sum());
        if norm == 0.0 {
            return Err(PcaError::ZeroVariance {
                label: label.clone(),
            });
        }
        centered.push(c);
        norms.push(norm);
    }

    let mut corr = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        corr[i][i] = 1.0;
        for j in (i + 1)..n {
            let dot: f64 = centered[i]
                .iter()
                .zip(&centered[j])
                .map(|(x, y)| x * y)
                .sum();
            let r = dot / (norms[i] * norms[j]);
            corr[i][j] = r;
            corr[j][i] = r;
        }
    }
    Ok((labels, corr))
}

fn resolve_k(count: FactorCount, explained: &[f64]) -> Result<usize, PcaError> {
    let max = explained.len();
    match count {
        FactorCount::Fixed(k) => {
            if k == 0 || k > max {
                Err(PcaError::KOutOfRange { k, max })
            } else {
                Ok(k)
            }
        }
        FactorCount::Kaiser => {
            // Eigenvalue above the mean eigenvalue; explained shares are
            // proportional, so compare against 100/n.
            let mean = 100.0 / max as f64;
            Ok(explained.iter().filter(|&&p| p > mean).count().max(1))
        }
        FactorCount::Cumulative(target) => {
            let mut cum = 0.0;
            for (i, p) in explained.iter().enumerate() {
                cum += p;
                if cum >= target {
                    return Ok(i + 1);
                }
            }
            Ok(max)
        }
    }
}

/// Extracts a factor model: eigendecomposition of the mode's correlation
/// matrix, loadings `v * sqrt(lambda)` for the retained components, optional
/// varimax rotation, column sign fix (positive column sums) and reordering
/// by descending explained variance.
pub fn extract_factors(
    matrix: &ProfileMatrix,
    count: FactorCount,
    mode: FactorMode,
    rotate: bool,
) -> Result<FactorModel, PcaError> {
    let (labels, corr) = correlation_matrix(matrix, mode)?;
    let eig = jacobi_eigh(&corr)?;
    let total: f64 = eig.values.iter().sum();
    let explained: Vec<f64> = eig.values.iter().map(|l| 100.0 * l / total).collect();
    let k = resolve_k(count, &explained)?;

    let n = labels.len();
    let mut loadings = alloc::vec![alloc::vec![0.0; k]; n];
    for f in 0..k {
        let scale = math::sqrt(eig.values[f].max(0.0));
        for (c, row) in loadings.iter_mut().enumerate() {
            row[f] = eig.vectors[f][c] * scale;
        }
    }

    let rotated = rotate && k >= 2;
    if rotated {
        loadings = varimax(&loadings)?;
    }
    fix_column_signs(&mut loadings);
    order_by_column_variance(&mut loadings);

    let communalities = communalities(&loadings);
    Ok(FactorModel {
        mode,
        k,
        labels,
        eigenvalues: eig.values,
        explained,
        loadings,
        rotated,
        communalities,
    })
}

/// Sum of squared retained loadings per variable.
pub fn communalities(loadings: &[Vec<f64>]) -> Vec<f64> {
    loadings
        .iter()
        .map(|row| row.iter().map(|x| x * x).sum())
        .collect()
}

fn fix_column_signs(loadings: &mut [Vec<f64>]) {
    if loadings.is_empty() {
        return;
    }
    let k = loadings[0].len();
    for f in 0..k {
        let sum: f64 = loadings.iter().map(|row| row[f]).sum();
        if sum < 0.0 {
            for row in loadings.iter_mut() {
                row[f] = -row[f];
            }
        }
    }
}

fn order_by_column_variance(loadings: &mut [Vec<f64>]) {
    if loadings.is_empty() {
        return;
    }
    let k = loadings[0].len();
    let ss: Vec<f64> = (0..k)
        .map(|f| loadings.iter().map(|row| row[f] * row[f]).sum())
        .collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| ss[b].partial_cmp(&ss[a]).expect("finite loadings"));
    for row in loadings.iter_mut() {
        let old = row.clone();
        for (dst, &src) in order.iter().enumerate() {
            row[dst] = old[src];
        }
    }
}

/// Kaiser-normalized varimax rotation by pairwise planar rotations.
///
/// Rows are scaled to unit communality, column pairs are rotated by the
/// criterion-maximizing angle until the criterion gain falls below `1e-10`
/// or 1000 sweeps, then rows are scaled back and columns sign-fixed.
pub fn varimax(loadings: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, PcaError> {
    let n = loadings.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let k = loadings[0].len();
    if k < 2 {
        return Err(PcaError::RotationNeedsTwoFactors);
    }

    let scales: Vec<f64> = loadings
        .iter()
        .map(|row| {
            let h = math::sqrt(row.iter().map(|x| x * x).sum());
            if h == 0.0 {
                1.0
            } else {
                h
            }
        })
        .collect();
    let mut a: Vec<Vec<f64>> = loadings
        .iter()
        .zip(&scales)
        .map(|(row, h)| row.iter().map(|x| x / h).collect())
        .collect();

    let mut prev = varimax_criterion(&a);
    for _sweep in 0..VARIMAX_MAX_SWEEPS {
        for p in 0..k - 1 {
            for q in (p + 1)..k {
                let mut su = 0.0;
                let mut sv = 0.0;
                let mut suu_vv = 0.0;
                let mut suv2 = 0.0;
                for row in &a {
                    let (x, y) = (row[p], row[q]);
                    let u = x * x - y * y;
                    let v = 2.0 * x * y;
                    su += u;
                    sv += v;
                    suu_vv += u * u - v * v;
                    suv2 += 2.0 * u * v;
                }
                let nf = n as f64;
                let num = suv2 - 2.0 * su * sv / nf;
                let den = suu_vv - (su * su - sv * sv) / nf;
                let angle = 0.25 * math::atan2(num, den);
                if angle.abs() < 1e-15 {
                    continue;
                }
                let (c, s) = (math::cos(angle), math::sin(angle));
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x + s * y;
                    row[q] = -s * x + c * y;
                }
            }
        }
        let cur = varimax_criterion(&a);
        if cur - prev < VARIMAX_TOL {
            break;
        }
        prev = cur;
    }

    let mut out: Vec<Vec<f64>> = a
        .iter()
        .zip(&scales)
        .map(|(row, h)| row.iter().map(|x| x * h).collect())
        .collect();
    fix_column_signs(&mut out);
    Ok(out)
}

/// Raw varimax criterion: per-factor variance of the squared loadings.
pub fn varimax_criterion(a: &[Vec<f64>]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let n = a.len() as f64;
    let k = a[0].len();
    let mut total = 0.0;
    for f in 0..k {
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for row in a {
            let c = row[f] * row[f];
            s1 += c * c;
            s2 += c;
        }
        total += s1 - s2 * s2 / n;
    }
    total
}

/// Variance table for the leading unrotated components, percentages printed
/// to five decimals.
pub fn variance_table(model: &FactorModel, top: usize) -> ReportTable {
    rows_to_variance_table(&model.variance_rows(top), "PCA explained variance")
}

/// A variance table straight from `(percent, cumulative)` rows, as used for
/// transcribed source tables.
pub fn rows_to_variance_table(rows: &[VarianceRow], title: &str) -> ReportTable {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| alloc::vec![format!("{:.5}", r.pct), format!("{:.5}", r.cum)])
        .collect();
    let row_labels: Vec<String> = (1..=rows.len()).map(|i| i.to_string()).collect();
    ReportTable::new(
        title,
        alloc::vec!["% total variance".to_string(), "cum. %".to_string()],
        row_labels,
        cells,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CountryProfile, MatrixKind, SubjectScheme};
    use crate::oracle::{power_iteration_eigs, varimax_grid_2d};

    fn matrix_from(rows: &[(&str, Vec<f64>)]) -> ProfileMatrix {
        let width = rows[0].1.len();
        let areas: Vec<String> = (0..width).map(|i| alloc::format!("area{i}")).collect();
        let scheme = SubjectScheme::custom("test", &areas).unwrap();
        let rows = rows
            .iter()
            .map(|(iso, shares)| CountryProfile::new(iso, iso, "R", shares.clone()))
            .collect();
        ProfileMatrix::new(scheme, rows, MatrixKind::Shares)
    }

    #[test]
    fn identical_profiles_correlate_to_one() {
        let m = matrix_from(&[
            ("AA", alloc::vec![1.0, 2.0, 3.0]),
            ("BB", alloc::vec![1.0, 2.0, 3.0]),
        ]);
        let (_, c) = correlation_matrix(&m, FactorMode::QMode).unwrap();
        assert!((c[0][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_profiles_anticorrelate() {
        let m = matrix_from(&[
            ("AA", alloc::vec![1.0, 2.0, 3.0]),
            ("BB", alloc::vec![3.0, 2.0, 1.0]),
        ]);
        let (_, c) = correlation_matrix(&m, FactorMode::QMode).unwrap();
        assert!((c[0][1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_names_the_variable() {
        let m = matrix_from(&[
            ("AA", alloc::vec![5.0, 5.0, 5.0]),
            ("BB", alloc::vec![1.0, 2.0, 3.0]),
        ]);
        match correlation_matrix(&m, FactorMode::QMode) {
            Err(PcaError::ZeroVariance { label }) => assert_eq!(label, "AA"),
            other => panic!("expected zero-variance error, got {other:?}"),
        }
    }

    #[test]
    fn q_mode_preconditions() {
        let m = matrix_from(&[("AA", alloc::vec![1.0, 2.0])]);
        assert!(matches!(
            correlation_matrix(&m, FactorMode::QMode),
            Err(PcaError::TooFewAreas { .. })
        ));
        let m = matrix_from(&[("AA", alloc::vec![1.0, 2.0, 3.0])]);
        assert!(matches!(
            correlation_matrix(&m, FactorMode::QMode),
            Err(PcaError::TooFewVariables { .. })
        ));
    }

    /// Four mutually uncorrelated countries: rows of a Hadamard design are
    /// centered and orthogonal, so the q-mode correlation is the identity.
    fn hadamard_matrix() -> ProfileMatrix {
        let pats: [[f64; 8]; 4] = [
            [1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0],
            [1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0],
            [1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0],
            [1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0],
        ];
        let rows: Vec<(&str, Vec<f64>)> = ["AA", "BB", "CC", "DD"]
            .iter()
            .zip(pats.iter())
            .map(|(iso, p)| (*iso, p.iter().map(|x| 50.0 + 10.0 * x).collect()))
            .collect();
        matrix_from(&rows)
    }

    #[test]
    fn uncorrelated_variables_split_variance_evenly() {
        let model = extract_factors(
            &hadamard_matrix(),
            FactorCount::Fixed(2),
            FactorMode::QMode,
            false,
        )
        .unwrap();
        for p in &model.explained {
            assert!((p - 25.0).abs() < 1e-9, "{p}");
        }
        let total: f64 = model.explained.iter().sum();
        assert!((total - 100.0).abs() < 1e-6);
    }

    #[test]
    fn rank_one_matrix_explains_everything_in_one_component() {
        let base = alloc::vec![1.0, 4.0, 2.0, 7.0];
        let rows: Vec<(&str, Vec<f64>)> = [("AA", 1.0), ("BB", 2.5), ("CC", 0.5)]
            .iter()
            .map(|(iso, c)| (*iso, base.iter().map(|x| x * c).collect()))
            .collect();
        let model = extract_factors(
            &matrix_from(&rows),
            FactorCount::Fixed(1),
            FactorMode::QMode,
            false,
        )
        .unwrap();
        assert!((model.explained[0] - 100.0).abs() < 1e-8);
        assert!(model.communalities.iter().all(|&h| (h - 1.0).abs() < 1e-8));
    }

    #[test]
    fn variance_table_formatting() {
        let model = extract_factors(
            &hadamard_matrix(),
            FactorCount::Fixed(2),
            FactorMode::QMode,
            false,
        )
        .unwrap();
        let t = variance_table(&model, 2);
        assert_eq!(t.cells[0], alloc::vec!["25.00000", "25.00000"]);
        assert_eq!(t.cells[1], alloc::vec!["25.00000", "50.00000"]);
    }

    #[test]
    fn rank_one_variance_table_row() {
        let base = alloc::vec![1.0, 4.0, 2.0, 7.0];
        let rows: Vec<(&str, Vec<f64>)> = [("AA", 1.0), ("BB", 2.5), ("CC", 0.5)]
            .iter()
            .map(|(iso, c)| (*iso, base.iter().map(|x| x * c).collect()))
            .collect();
        let model = extract_factors(
            &matrix_from(&rows),
            FactorCount::Fixed(1),
            FactorMode::QMode,
            false,
        )
        .unwrap();
        let t = variance_table(&model, 1);
        assert_eq!(t.cells[0], alloc::vec!["100.00000", "100.00000"]);
    }

    #[test]
    fn communality_edge_values() {
        let h = communalities(&[alloc::vec![1.0, 0.0, 0.0], alloc::vec![0.0, 0.0, 0.0]]);
        assert_eq!(h, alloc::vec![1.0, 0.0]);
    }

    #[test]
    fn k_out_of_range() {
        assert!(matches!(
            extract_factors(
                &hadamard_matrix(),
                FactorCount::Fixed(9),
                FactorMode::QMode,
                false
            ),
            Err(PcaError::KOutOfRange { .. })
        ));
    }

    #[test]
    fn kaiser_picks_dominant_components() {
        let base = alloc::vec![1.0, 4.0, 2.0, 7.0];
        let rows: Vec<(&str, Vec<f64>)> = [("AA", 1.0), ("BB", 2.5), ("CC", 0.5)]
            .iter()
            .map(|(iso, c)| (*iso, base.iter().map(|x| x * c).collect()))
            .collect();
        let model = extract_factors(
            &matrix_from(&rows),
            FactorCount::Kaiser,
            FactorMode::QMode,
            false,
        )
        .unwrap();
        assert_eq!(model.k, 1);
    }

    #[test]
    fn varimax_block_diagonal_is_fixed_point() {
        let l = alloc::vec![
            alloc::vec![0.9, 0.0],
            alloc::vec![0.8, 0.0],
            alloc::vec![0.0, 0.7],
            alloc::vec![0.0, 0.6],
        ];
        let r = varimax(&l).unwrap();
        for (a, b) in l.iter().flatten().zip(r.iter().flatten()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn varimax_preserves_row_sums_of_squares() {
        let l = alloc::vec![
            alloc::vec![0.5, 0.3],
            alloc::vec![0.2, -0.7],
            alloc::vec![0.9, 0.1],
            alloc::vec![0.4, 0.4],
        ];
        let r = varimax(&l).unwrap();
        for (lr, rr) in l.iter().zip(&r) {
            let a: f64 = lr.iter().map(|x| x * x).sum();
            let b: f64 = rr.iter().map(|x| x * x).sum();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn varimax_rejects_single_factor() {
        let l = alloc::vec![alloc::vec![1.0], alloc::vec![0.5]];
        assert!(matches!(
            varimax(&l),
            Err(PcaError::RotationNeedsTwoFactors)
        ));
    }

    #[test]
    fn varimax_matches_angle_grid_oracle() {
        let l = alloc::vec![
            alloc::vec![0.8, 0.35],
            alloc::vec![0.75, 0.28],
            alloc::vec![0.2, 0.9],
            alloc::vec![0.3, 0.85],
        ];
        let ours = varimax(&l).unwrap();
        let grid = varimax_grid_2d(&l, 1e-4);
        let gap = crate::oracle::loading_gap_up_to_permutation(&ours, &grid);
        assert!(gap <= 1e-4, "gap {gap}");
    }

    #[test]
    fn loadings_match_power_iteration_oracle() {
        let m = matrix_from(&[
            ("AA", alloc::vec![9.0, 1.0, 2.0, 1.5, 0.5]),
            ("BB", alloc::vec![8.0, 1.5, 2.5, 1.0, 0.8]),
            ("CC", alloc::vec![1.0, 7.0, 6.5, 0.5, 0.2]),
            ("DD", alloc::vec![0.5, 8.0, 6.0, 1.0, 0.4]),
            ("EE", alloc::vec![2.0, 2.0, 1.0, 8.0, 7.0]),
        ]);
        let (_, corr) = correlation_matrix(&m, FactorMode::QMode).unwrap();
        let model = extract_factors(&m, FactorCount::Fixed(2), FactorMode::QMode, false).unwrap();
        let oracle = power_iteration_eigs(&corr, 2);
        for (f, (lam, vec)) in oracle.iter().enumerate() {
            assert!((model.eigenvalues[f] - lam).abs() < 1e-7);
            let scale = lam.max(0.0).sqrt();
            // sign-insensitive column comparison
            let mut dot = 0.0;
            let mut ours_norm = 0.0;
            let mut want_norm = 0.0;
            for (c, v) in vec.iter().enumerate() {
                let want = v * scale;
                let got = model.loadings[c][f];
                dot += want * got;
                ours_norm += got * got;
                want_norm += want * want;
            }
            let cosine = dot.abs() / (ours_norm.sqrt() * want_norm.sqrt());
            assert!(cosine > 1.0 - 1e-7, "factor {f}: cosine {cosine}");
        }
    }

    #[test]
    fn unrotated_loading_gram_is_eigenvalue_diagonal() {
        let m = matrix_from(&[
            ("AA", alloc::vec![9.0, 1.0, 2.0, 1.5]),
            ("BB", alloc::vec![8.0, 1.5, 2.5, 1.0]),
            ("CC", alloc::vec![1.0, 7.0, 6.5, 0.5]),
            ("DD", alloc::vec![0.5, 8.0, 6.0, 1.0]),
        ]);
        let model = extract_factors(&m, FactorCount::Fixed(2), FactorMode::QMode, false).unwrap();
        for p in 0..2 {
            for q in 0..2 {
                let dot: f64 = model.loadings.iter().map(|row| row[p] * row[q]).sum();
                let want = if p == q { model.eigenvalues[p] } else { 0.0 };
                assert!((dot - want).abs() < 1e-8, "L^T L [{p}][{q}]");
            }
        }
    }

    #[test]
    fn json_field_order_is_fixed() {
        let model = extract_factors(
            &hadamard_matrix(),
            FactorCount::Fixed(2),
            FactorMode::QMode,
            true,
        )
        .unwrap();
        let j = model.to_json();
        let order = [
            "\"mode\"",
            "\"k\"",
            "\"eigenvalues\"",
            "\"explained\"",
            "\"loadings\"",
            "\"rotated\"",
            "\"labels\"",
        ];
        let mut last = 0;
        for key in order {
            let pos = j
                .find(key)
                .unwrap_or_else(|| panic!("{key} missing in {j}"));
            assert!(pos >= last);
            last = pos;
        }
    }
}

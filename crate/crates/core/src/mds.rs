//! 2D projection of countries and factor poles.
//!
//! Classical (Torgerson) scaling provides a deterministic initial layout:
//! double-center the squared dissimilarities, take the top eigenpairs and
//! scale the eigenvectors by the square roots of the eigenvalues. SMACOF then
//! refines the layout by stress majorization: every Guttman transform is
//! guaranteed not to increase the raw stress, so the iteration is monotone
//! and needs no step-size control.

use crate::eigen::jacobi_eigh;
use crate::math;
use crate::pca::FactorModel;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub const DEFAULT_MAX_ITER: usize = 500;
pub const DEFAULT_TOL: f64 = 1e-9;

/// `sqrt(dx^2 + dy^2)`: unlike `hypot`, every step is correctly rounded, so
/// distances computed this way are bit-identical across implementations.
fn planar_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    math::sqrt(dx * dx + dy * dy)
}

#[derive(Debug, Clone, PartialEq)]
pub enum MdsError {
    NeedThreeFactors { got: usize },
    TooFewItems { got: usize, need: usize },
    NotSymmetric { row: usize, col: usize },
    NonZeroDiagonal { index: usize },
    NegativeDistance { row: usize, col: usize },
    NonFinite { row: usize, col: usize },
    ZeroNormRow { label: String },
    LabelMismatch,
    ZeroDissimilarity,
    DegenerateConfiguration,
}

impl fmt::Display for MdsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MdsError::NeedThreeFactors { got } => {
                write!(f, "factor poles require a 3-factor model, got k={got}")
            }
            MdsError::TooFewItems { got, need } => {
                write!(f, "need at least {need} items, got {got}")
            }
            MdsError::NotSymmetric { row, col } => {
                write!(f, "dissimilarity not symmetric at [{row}][{col}]")
            }
            MdsError::NonZeroDiagonal { index } => {
                write!(f, "dissimilarity diagonal not zero at [{index}]")
            }
            MdsError::NegativeDistance { row, col } => {
                write!(f, "negative dissimilarity at [{row}][{col}]")
            }
            MdsError::NonFinite { row, col } => {
                write!(f, "non-finite dissimilarity at [{row}][{col}]")
            }
            MdsError::ZeroNormRow { label } => {
                write!(f, "cosine distance undefined for zero-norm row {label:?}")
            }
            MdsError::LabelMismatch => write!(f, "embeddings have different labels"),
            MdsError::ZeroDissimilarity => {
                write!(f, "all dissimilarities are zero; stress is undefined")
            }
            MdsError::DegenerateConfiguration => {
                write!(f, "configuration has zero spread; alignment undefined")
            }
        }
    }
}

impl core::error::Error for MdsError {}

/// Notes attached to an embedding by the solver.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    /// Torgerson eigenvalues below zero were clamped. Large magnitudes mean
    /// the dissimilarities are far from Euclidean.
    NegativeEigenvaluesClamped { count: usize, most_negative: f64 },
    /// Every dissimilarity was zero; the initial configuration was returned
    /// unchanged since any layout has zero stress.
    DegenerateDissimilarity,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NegativeEigenvaluesClamped {
                count,
                most_negative,
            } => write!(
                f,
                "{count} negative Torgerson eigenvalue(s) clamped (most negative {most_negative:e})"
            ),
            Diagnostic::DegenerateDissimilarity => {
                write!(
                    f,
                    "all-zero dissimilarity; returned the initial configuration"
                )
            }
        }
    }
}

/// Symmetric non-negative dissimilarities with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Dissimilarity {
    pub labels: Vec<String>,
    pub d: Vec<Vec<f64>>,
}

impl Dissimilarity {
    pub fn new(labels: Vec<String>, d: Vec<Vec<f64>>) -> Result<Self, MdsError> {
        let n = labels.len();
        if d.len() != n || d.iter().any(|r| r.len() != n) {
            return Err(MdsError::TooFewItems {
                got: d.len(),
                need: n,
            });
        }
        for i in 0..n {
            if d[i][i] != 0.0 {
                return Err(MdsError::NonZeroDiagonal { index: i });
            }
            for j in 0..n {
                if !d[i][j].is_finite() {
                    return Err(MdsError::NonFinite { row: i, col: j });
                }
                if d[i][j] < 0.0 {
                    return Err(MdsError::NegativeDistance { row: i, col: j });
                }
                if d[i][j] != d[j][i] {
                    return Err(MdsError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Dissimilarity { labels, d })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn sum_squares(&self) -> f64 {
        let n = self.len();
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += self.d[i][j] * self.d[i][j];
            }
        }
        s
    }
}

/// A 2D layout with Kruskal stress-1 and solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub labels: Vec<String>,
    pub coords: Vec<[f64; 2]>,
    pub stress1: f64,
    pub iterations: usize,
    pub diagnostics: Vec<Diagnostic>,
}

impl Embedding {
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        planar_distance(self.coords[i], self.coords[j])
    }
}

/// Distance metric over row vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    /// `1 - cosine similarity`; errors on zero-norm rows.
    Cosine,
}

/// Appends one synthetic row per factor: the unit basis vectors, labelled
/// `F1..F3`. Each pole is the point of full affinity with one factor.
pub fn add_factor_poles(model: &FactorModel) -> Result<(Vec<String>, Vec<Vec<f64>>), MdsError> {
    if model.k != 3 {
        return Err(MdsError::NeedThreeFactors { got: model.k });
    }
    let mut labels = model.labels.clone();
    let mut rows = model.loadings.clone();
    for f in 0..3 {
        labels.push(alloc::format!("F{}", f + 1));
        let mut pole = alloc::vec![0.0; 3];
        pole[f] = 1.0;
        rows.push(pole);
    }
    Ok((labels, rows))
}

/// Pairwise distances between row vectors.
pub fn distance_matrix(
    labels: &[String],
    rows: &[Vec<f64>],
    metric: Metric,
) -> Result<Dissimilarity, MdsError> {
    let n = rows.len();
    if n < 2 {
        return Err(MdsError::TooFewItems { got: n, need: 2 });
    }
    let norms: Vec<f64> = rows
        .iter()
        .map(|r| math::sqrt(r.iter().map(|x| x * x).sum()))
        .collect();
    if metric == Metric::Cosine {
        if let Some(i) = norms.iter().position(|&x| x == 0.0) {
            return Err(MdsError::ZeroNormRow {
                label: labels.get(i).cloned().unwrap_or_default(),
            });
        }
    }
    let mut d = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = match metric {
                Metric::Euclidean => math::sqrt(
                    rows[i]
                        .iter()
                        .zip(&rows[j])
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum(),
                ),
                Metric::Cosine => {
                    let dot: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
                    1.0 - dot / (norms[i] * norms[j])
                }
            };
            // clamp the tiny negatives cosine can produce
            let dist = dist.max(0.0);
            d[i][j] = dist;
            d[j][i] = dist;
        }
    }
    Dissimilarity::new(labels.to_vec(), d)
}

/// Classical (Torgerson) scaling to 2D.
///
/// `B = -1/2 * J * D^(2) * J` with `J` the centering matrix; coordinates are
/// the top-2 eigenvectors of `B` scaled by the square roots of the
/// eigenvalues. Negative eigenvalues are clamped to zero and flagged in a
/// diagnostic.
pub fn classical_mds(d: &Dissimilarity) -> Result<Embedding, MdsError> {
    let n = d.len();
    if n < 3 {
        return Err(MdsError::TooFewItems { got: n, need: 3 });
    }
    let mut sq = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            sq[i][j] = d.d[i][j] * d.d[i][j];
        }
    }
    let nf = n as f64;
    let row_mean: Vec<f64> = sq.iter().map(|r| r.iter().sum::<f64>() / nf).collect();
    let grand: f64 = row_mean.iter().sum::<f64>() / nf;
    let mut b = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            // column means equal row means: D^(2) is symmetric
            b[i][j] = -0.5 * (sq[i][j] - row_mean[i] - row_mean[j] + grand);
        }
    }
    // B is symmetric by construction; the only conceivable failure is
    // overflow while squaring extreme dissimilarities.
    let eig = jacobi_eigh(&b).map_err(|_| MdsError::NonFinite { row: 0, col: 0 })?;

    let mut diagnostics = Vec::new();
    let clamp_tol = 1e-12 * (1.0 + eig.values[0].abs());
    let negatives: Vec<f64> = eig
        .values
        .iter()
        .copied()
        .filter(|&l| l < -clamp_tol)
        .collect();
    if !negatives.is_empty() {
        let most_negative = negatives.iter().fold(0.0f64, |a, &b| a.min(b));
        diagnostics.push(Diagnostic::NegativeEigenvaluesClamped {
            count: negatives.len(),
            most_negative,
        });
    }

    let coords: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let mut p = [0.0; 2];
            for (axis, slot) in p.iter_mut().enumerate() {
                let lam = eig.values[axis].max(0.0);
                *slot = eig.vectors[axis][i] * math::sqrt(lam);
            }
            p
        })
        .collect();

    let mut e = Embedding {
        labels: d.labels.clone(),
        coords,
        stress1: 0.0,
        iterations: 0,
        diagnostics,
    };
    e.stress1 = stress1(&e, d).unwrap_or(0.0);
    Ok(e)
}

/// Initial configuration for SMACOF.
#[derive(Debug, Clone)]
pub enum SmacofInit<'a> {
    /// Deterministic classical-MDS start (the default).
    Classical,
    /// Continue from an existing layout.
    From(&'a Embedding),
    /// Seeded random start, for robustness studies only.
    Seeded(u64),
}

fn seeded_coords(n: usize, seed: u64) -> Vec<[f64; 2]> {
    // splitmix64; deterministic and dependency-free
    let mut state = seed;
    let mut next = move || {
        state = state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    (0..n).map(|_| [next(), next()]).collect()
}

fn raw_stress(coords: &[[f64; 2]], d: &Dissimilarity) -> f64 {
    let n = coords.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let rho = planar_distance(coords[i], coords[j]);
            let diff = d.d[i][j] - rho;
            s += diff * diff;
        }
    }
    s
}

/// SMACOF stress majorization with uniform weights.
///
/// Iterates the Guttman transform until the relative raw-stress improvement
/// drops below `tol` or `max_iter` is reached. Raw stress never increases
/// between iterations; `smacof_history` exposes the per-iteration sequence.
pub fn smacof(
    d: &Dissimilarity,
    init: SmacofInit<'_>,
    max_iter: usize,
    tol: f64,
) -> Result<Embedding, MdsError> {
    smacof_history(d, init, max_iter, tol).map(|(e, _)| e)
}

/// Like [`smacof`], additionally returning the raw-stress value before each
/// accepted configuration (index 0 is the initial stress).
pub fn smacof_history(
    d: &Dissimilarity,
    init: SmacofInit<'_>,
    max_iter: usize,
    tol: f64,
) -> Result<(Embedding, Vec<f64>), MdsError> {
    let n = d.len();
    let mut diagnostics = Vec::new();
    let mut coords = match init {
        SmacofInit::Classical => {
            let e = classical_mds(d)?;
            diagnostics = e.diagnostics.clone();
            e.coords
        }
        SmacofInit::From(e) => {
            if e.labels != d.labels {
                return Err(MdsError::LabelMismatch);
            }
            e.coords.clone()
        }
        SmacofInit::Seeded(seed) => seeded_coords(n, seed),
    };
    if coords.len() != n {
        return Err(MdsError::TooFewItems {
            got: coords.len(),
            need: n,
        });
    }

    if d.sum_squares() == 0.0 {
        diagnostics.push(Diagnostic::DegenerateDissimilarity);
        return Ok((
            Embedding {
                labels: d.labels.clone(),
                coords,
                stress1: 0.0,
                iterations: 0,
                diagnostics,
            },
            alloc::vec![0.0],
        ));
    }

    let nf = n as f64;
    let mut prev = raw_stress(&coords, d);
    let mut history = alloc::vec![prev];
    let mut iterations = 0;

    for it in 1..=max_iter {
        // Guttman transform: X' = (1/n) B(X) X with uniform weights.
        let mut bx = alloc::vec![[0.0f64; 2]; n];
        let mut bdiag = alloc::vec![0.0f64; n];
        let mut boff = alloc::vec![alloc::vec![0.0f64; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let rho = planar_distance(coords[i], coords[j]);
                let b = if rho > 0.0 { -d.d[i][j] / rho } else { 0.0 };
                boff[i][j] = b;
                bdiag[i] -= b;
            }
        }
        for i in 0..n {
            let mut acc = [bdiag[i] * coords[i][0], bdiag[i] * coords[i][1]];
            for j in 0..n {
                if i != j {
                    acc[0] += boff[i][j] * coords[j][0];
                    acc[1] += boff[i][j] * coords[j][1];
                }
            }
            bx[i] = [acc[0] / nf, acc[1] / nf];
        }
        let cur = raw_stress(&bx, d);
        iterations = it;
        if cur > prev {
            // Majorization cannot increase raw stress in exact arithmetic;
            // seeing an increase means the iteration hit the floating-point
            // noise floor. Keep the previous configuration and stop.
            break;
        }
        coords = bx;
        history.push(cur);
        if prev == 0.0 || (prev - cur) / prev < tol {
            break;
        }
        prev = cur;
    }

    let mut e = Embedding {
        labels: d.labels.clone(),
        coords,
        stress1: 0.0,
        iterations,
        diagnostics,
    };
    e.stress1 = stress1(&e, d)?;
    Ok((e, history))
}

/// Kruskal stress-1: normalized residual between dissimilarities and
/// embedded distances.
pub fn stress1(e: &Embedding, d: &Dissimilarity) -> Result<f64, MdsError> {
    if e.labels != d.labels {
        return Err(MdsError::LabelMismatch);
    }
    let den = d.sum_squares();
    if den == 0.0 {
        return Err(MdsError::ZeroDissimilarity);
    }
    let n = e.coords.len();
    let mut num = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let diff = d.d[i][j] - e.distance(i, j);
            num += diff * diff;
        }
    }
    Ok(math::sqrt(num / den))
}

/// Similarity alignment of `y` onto `x`: the translation, rotation,
/// reflection and uniform scale minimizing the summed squared residual.
/// Returns the transformed copy of `y` and the root-mean-square error.
pub fn procrustes(x: &Embedding, y: &Embedding) -> Result<(Embedding, f64), MdsError> {
    if x.labels != y.labels {
        return Err(MdsError::LabelMismatch);
    }
    let n = x.coords.len();
    if n == 0 {
        return Err(MdsError::TooFewItems { got: 0, need: 1 });
    }
    let nf = n as f64;
    let centroid = |c: &[[f64; 2]]| -> [f64; 2] {
        let mut m = [0.0; 2];
        for p in c {
            m[0] += p[0];
            m[1] += p[1];
        }
        [m[0] / nf, m[1] / nf]
    };
    let cx = centroid(&x.coords);
    let cy = centroid(&y.coords);
    let xs: Vec<[f64; 2]> = x
        .coords
        .iter()
        .map(|p| [p[0] - cx[0], p[1] - cx[1]])
        .collect();
    let ys: Vec<[f64; 2]> = y
        .coords
        .iter()
        .map(|p| [p[0] - cy[0], p[1] - cy[1]])
        .collect();

    let ynorm2: f64 = ys.iter().map(|p| p[0] * p[0] + p[1] * p[1]).sum();
    if ynorm2 == 0.0 {
        return Err(MdsError::DegenerateConfiguration);
    }

    // Best rotation angle for y (and for its mirror image); take whichever
    // residual is smaller. a = sum(x.y), b = sum(cross(y, x)).
    let fit = |ys: &[[f64; 2]]| -> (f64, f64, f64) {
        let mut a = 0.0;
        let mut b = 0.0;
        for (p, q) in xs.iter().zip(ys) {
            a += p[0] * q[0] + p[1] * q[1];
            b += q[0] * p[1] - q[1] * p[0];
        }
        let r = math::sqrt(a * a + b * b);
        if r == 0.0 {
            return (0.0, 0.0, f64::INFINITY);
        }
        let angle = math::atan2(b, a);
        let scale = r / ynorm2;
        // residual = |x|^2 - r^2 / |y|^2
        let xnorm2: f64 = xs.iter().map(|p| p[0] * p[0] + p[1] * p[1]).sum();
        let resid = xnorm2 - r * r / ynorm2;
        (angle, scale, resid)
    };

    let mirrored: Vec<[f64; 2]> = ys.iter().map(|p| [p[0], -p[1]]).collect();
    let (angle_a, scale_a, resid_a) = fit(&ys);
    let (angle_b, scale_b, resid_b) = fit(&mirrored);
    let (angle, scale, reflect) = if resid_b < resid_a {
        (angle_b, scale_b, true)
    } else {
        (angle_a, scale_a, false)
    };

    let (c, s) = (math::cos(angle), math::sin(angle));
    let aligned: Vec<[f64; 2]> = ys
        .iter()
        .map(|p| {
            let q = if reflect { [p[0], -p[1]] } else { *p };
            [
                scale * (c * q[0] - s * q[1]) + cx[0],
                scale * (s * q[0] + c * q[1]) + cx[1],
            ]
        })
        .collect();

    let mut sq = 0.0;
    for (p, q) in x.coords.iter().zip(&aligned) {
        let dx = p[0] - q[0];
        let dy = p[1] - q[1];
        sq += dx * dx + dy * dy;
    }
    let rmse = math::sqrt(sq / nf);
    let out = Embedding {
        labels: y.labels.clone(),
        coords: aligned,
        stress1: y.stress1,
        iterations: y.iterations,
        diagnostics: y.diagnostics.clone(),
    };
    Ok((out, rmse))
}

/// CSV form `label,x,y` with nine significant digits.
pub fn embedding_to_csv(e: &Embedding) -> String {
    let mut out = String::from("label,x,y\n");
    for (label, p) in e.labels.iter().zip(&e.coords) {
        out.push_str(label);
        out.push(',');
        out.push_str(&format_sig9(p[0]));
        out.push(',');
        out.push_str(&format_sig9(p[1]));
        out.push('\n');
    }
    out
}

fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let exp = math::floor(math::log10(v.abs())) as i32;
    let decimals = (8 - exp).max(0) as usize;
    alloc::format!("{v:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pca::{FactorMode, FactorModel};

    fn labels(n: usize) -> Vec<String> {
        (0..n).map(|i| alloc::format!("P{i}")).collect()
    }

    fn diss_from_points(points: &[[f64; 2]]) -> Dissimilarity {
        let n = points.len();
        let mut d = alloc::vec![alloc::vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                d[i][j] = planar_distance(points[i], points[j]);
            }
        }
        Dissimilarity::new(labels(n), d).unwrap()
    }

    fn synthetic_model(n: usize) -> FactorModel {
        let labels: Vec<String> = (0..n).map(|i| alloc::format!("C{i:02}")).collect();
        let loadings: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let a = (i % 3) as f64;
                alloc::vec![0.5 + 0.1 * a, 0.3, 0.2 + 0.05 * a]
            })
            .collect();
        FactorModel {
            mode: FactorMode::QMode,
            k: 3,
            labels,
            eigenvalues: alloc::vec![2.0, 1.0, 0.5],
            explained: alloc::vec![50.0, 30.0, 20.0],
            loadings,
            rotated: true,
            communalities: alloc::vec![1.0; n],
        }
    }

    #[test]
    fn poles_are_unit_basis_rows() {
        let model = synthetic_model(80);
        let (labels, rows) = add_factor_poles(&model).unwrap();
        assert_eq!(rows.len(), 83);
        assert_eq!(labels[80], "F1");
        assert_eq!(rows[80], alloc::vec![1.0, 0.0, 0.0]);
        let d: f64 = rows[80]
            .iter()
            .zip(&rows[81])
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        assert!((math::sqrt(d) - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn poles_require_three_factors() {
        let mut model = synthetic_model(5);
        model.k = 2;
        assert!(matches!(
            add_factor_poles(&model),
            Err(MdsError::NeedThreeFactors { got: 2 })
        ));
    }

    #[test]
    fn distance_metrics() {
        let rows = alloc::vec![
            alloc::vec![1.0, 0.0, 0.0],
            alloc::vec![0.0, 1.0, 0.0],
            alloc::vec![1.0, 0.0, 0.0],
        ];
        let d = distance_matrix(&labels(3), &rows, Metric::Euclidean).unwrap();
        assert!((d.d[0][1] - 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(d.d[0][2], 0.0);
        let c = distance_matrix(&labels(3), &rows, Metric::Cosine).unwrap();
        assert!((c.d[0][1] - 1.0).abs() < 1e-15);
        assert_eq!(c.d[0][2], 0.0);

        let zero = alloc::vec![alloc::vec![0.0, 0.0], alloc::vec![1.0, 0.0]];
        assert!(matches!(
            distance_matrix(&labels(2), &zero, Metric::Cosine),
            Err(MdsError::ZeroNormRow { .. })
        ));
    }

    #[test]
    fn classical_recovers_line_geometry() {
        let d = Dissimilarity::new(
            labels(3),
            alloc::vec![
                alloc::vec![0.0, 1.0, 2.0],
                alloc::vec![1.0, 0.0, 1.0],
                alloc::vec![2.0, 1.0, 0.0],
            ],
        )
        .unwrap();
        let e = classical_mds(&d).unwrap();
        assert!((e.distance(0, 1) - 1.0).abs() < 1e-9);
        assert!((e.distance(1, 2) - 1.0).abs() < 1e-9);
        assert!((e.distance(0, 2) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn classical_recovers_equilateral() {
        let d = Dissimilarity::new(
            labels(3),
            alloc::vec![
                alloc::vec![0.0, 1.0, 1.0],
                alloc::vec![1.0, 0.0, 1.0],
                alloc::vec![1.0, 1.0, 0.0],
            ],
        )
        .unwrap();
        let e = classical_mds(&d).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert!((e.distance(i, j) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn classical_output_is_centered() {
        let pts = [[3.0, 1.0], [5.0, 2.0], [4.5, -1.0], [7.0, 0.5]];
        let e = classical_mds(&diss_from_points(&pts)).unwrap();
        let mx: f64 = e.coords.iter().map(|p| p[0]).sum::<f64>() / 4.0;
        let my: f64 = e.coords.iter().map(|p| p[1]).sum::<f64>() / 4.0;
        assert!(mx.abs() < 1e-10 && my.abs() < 1e-10);
    }

    #[test]
    fn classical_needs_three_items() {
        let d = Dissimilarity::new(
            labels(2),
            alloc::vec![alloc::vec![0.0, 1.0], alloc::vec![1.0, 0.0]],
        )
        .unwrap();
        assert!(matches!(
            classical_mds(&d),
            Err(MdsError::TooFewItems { .. })
        ));
    }

    #[test]
    fn smacof_exact_init_is_fixed_point() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.3, 0.8], [0.9, 1.2]];
        let d = diss_from_points(&pts);
        let init = Embedding {
            labels: d.labels.clone(),
            coords: pts.to_vec(),
            stress1: 0.0,
            iterations: 0,
            diagnostics: alloc::vec![],
        };
        let e = smacof(&d, SmacofInit::From(&init), DEFAULT_MAX_ITER, DEFAULT_TOL).unwrap();
        assert_eq!(e.stress1, 0.0);
        assert_eq!(e.iterations, 1);
    }

    #[test]
    fn smacof_degenerate_returns_init_with_diagnostic() {
        let d = Dissimilarity::new(labels(3), alloc::vec![alloc::vec![0.0; 3]; 3]).unwrap();
        let init = Embedding {
            labels: d.labels.clone(),
            coords: alloc::vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            stress1: 0.0,
            iterations: 0,
            diagnostics: alloc::vec![],
        };
        let e = smacof(&d, SmacofInit::From(&init), 10, 1e-9).unwrap();
        assert_eq!(e.coords, init.coords);
        assert!(e.diagnostics.contains(&Diagnostic::DegenerateDissimilarity));
    }

    #[test]
    fn smacof_monotone_raw_stress_from_random_init() {
        let pts = [[0.0, 0.0], [2.0, 0.1], [1.0, 1.5], [0.2, 2.0], [3.0, 2.5]];
        let d = diss_from_points(&pts);
        for seed in 0..20u64 {
            let (_, hist) = smacof_history(&d, SmacofInit::Seeded(seed), 200, 1e-12).unwrap();
            for w in hist.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-300, "{w:?}");
            }
        }
    }

    #[test]
    fn embedding_distances_follow_label_permutation() {
        let pts = [[0.0, 0.0], [2.0, 0.5], [1.0, 1.5], [0.2, 2.0], [3.0, 2.5]];
        let d = diss_from_points(&pts);
        let e = classical_mds(&d).unwrap();
        // permute items and embed again; pairwise distances must follow
        let order = [3usize, 0, 4, 1, 2];
        let labels: Vec<String> = order.iter().map(|&i| d.labels[i].clone()).collect();
        let n = order.len();
        let mut pd = alloc::vec![alloc::vec![0.0; n]; n];
        for a in 0..n {
            for b in 0..n {
                pd[a][b] = d.d[order[a]][order[b]];
            }
        }
        let permuted = Dissimilarity::new(labels, pd).unwrap();
        let ep = classical_mds(&permuted).unwrap();
        for a in 0..n {
            for b in 0..n {
                assert!((ep.distance(a, b) - e.distance(order[a], order[b])).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn stress1_basics() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let d = diss_from_points(&pts);
        let e = Embedding {
            labels: d.labels.clone(),
            coords: pts.to_vec(),
            stress1: 0.0,
            iterations: 0,
            diagnostics: alloc::vec![],
        };
        assert_eq!(stress1(&e, &d).unwrap(), 0.0);
        let doubled = Embedding {
            coords: pts.iter().map(|p| [2.0 * p[0], 2.0 * p[1]]).collect(),
            ..e.clone()
        };
        assert!(stress1(&doubled, &d).unwrap() > 0.0);

        let two = Dissimilarity::new(
            labels(2),
            alloc::vec![alloc::vec![0.0, 1.0], alloc::vec![1.0, 0.0]],
        )
        .unwrap();
        let e2 = Embedding {
            labels: two.labels.clone(),
            coords: alloc::vec![[0.0, 0.0], [1.0, 0.0]],
            stress1: 0.0,
            iterations: 0,
            diagnostics: alloc::vec![],
        };
        assert_eq!(stress1(&e2, &two).unwrap(), 0.0);
    }

    #[test]
    fn procrustes_alignment() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.3, 0.8], [0.9, 1.2]];
        let x = Embedding {
            labels: labels(4),
            coords: pts.to_vec(),
            stress1: 0.0,
            iterations: 0,
            diagnostics: alloc::vec![],
        };
        // rotate 90 degrees and translate
        let rotated = Embedding {
            coords: pts.iter().map(|p| [-p[1] + 3.0, p[0] - 2.0]).collect(),
            ..x.clone()
        };
        let (_, rmse) = procrustes(&x, &rotated).unwrap();
        assert!(rmse <= 1e-12, "{rmse}");
        // mirror image
        let mirrored = Embedding {
            coords: pts.iter().map(|p| [-p[0], p[1]]).collect(),
            ..x.clone()
        };
        let (_, rmse) = procrustes(&x, &mirrored).unwrap();
        assert!(rmse <= 1e-12, "{rmse}");
        // single perturbed point: rmse bounded by the perturbation
        let delta = 0.05;
        let mut bent = pts.to_vec();
        bent[2][0] += delta;
        let y = Embedding {
            coords: bent,
            ..x.clone()
        };
        let (_, rmse) = procrustes(&x, &y).unwrap();
        assert!(rmse <= delta, "{rmse}");
    }

    #[test]
    fn procrustes_label_mismatch() {
        let x = Embedding {
            labels: labels(2),
            coords: alloc::vec![[0.0, 0.0], [1.0, 0.0]],
            stress1: 0.0,
            iterations: 0,
            diagnostics: alloc::vec![],
        };
        let mut y = x.clone();
        y.labels[1] = "other".to_string();
        assert!(matches!(procrustes(&x, &y), Err(MdsError::LabelMismatch)));
    }

    #[test]
    fn csv_has_nine_significant_digits() {
        let e = Embedding {
            labels: alloc::vec!["AB".to_string(), "CD".to_string()],
            coords: alloc::vec![[0.123456789123, 12.3456789123], [0.0, -1.0]],
            stress1: 0.0,
            iterations: 0,
            diagnostics: alloc::vec![],
        };
        let csv = embedding_to_csv(&e);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "label,x,y");
        assert_eq!(lines[1], "AB,0.123456789,12.3456789");
        assert_eq!(lines[2], "CD,0,-1.00000000");
    }
}

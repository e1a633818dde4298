//! Command-line orchestration of the analysis pipeline.
//!
//! Exit codes: 0 on success, 1 on validation/analysis errors, 2 on usage
//! errors. All numeric output is deterministic, and no subcommand writes
//! outside the configured output directory (`--out`, falling back to the
//! `SCIPROFILE_OUT` environment variable, then the current directory).

use crate::ingest::{
    annexb_combined, annexb_names, annexb_origins, annexb_regions, annexb_tables, load_fixture,
    parse_matrix, Fixture, FIXTURE_NAMES,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use sciprofile_core::mds::{self, SmacofInit};
use sciprofile_core::model::{MatrixKind, ProfileMatrix, WORLD_CODE};
use sciprofile_core::pca::{
    extract_factors, rows_to_variance_table, variance_table, FactorCount, FactorMode, FactorModel,
    VarianceRow,
};
use sciprofile_core::render::{render_ascii, render_svg, MapStyle};
use sciprofile_core::report::{
    compare_variance_rows, membership, profile_table, rank_by_factor, LoadingTable,
};
use sciprofile_core::{validate_profile, world_profile, CountryProfile};
use std::collections::BTreeMap;
use std::error::Error;
use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

const ENV_OUT: &str = "SCIPROFILE_OUT";
const TABLE_TAGS: [&str; 3] = [
    "factor 1 \u{2013} biomedicine",
    "factor 2 \u{2013} basic science & engineering",
    "factor 3 \u{2013} agriculture",
];

#[derive(Parser)]
#[command(
    name = "sciprofile",
    version,
    about = "Country scientific subject-profile analysis: factor models, specialization tables and MDS maps"
)]
struct App {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a profile matrix and report all errors and warnings
    Validate {
        #[command(flatten)]
        input: InputOpt,
    },
    /// Extract a factor model and its variance table
    Pca {
        #[command(flatten)]
        input: InputOpt,
        #[command(flatten)]
        pca: PcaOpt,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Factor rankings, threshold membership and profile-vs-world tables
    Report {
        #[command(flatten)]
        input: InputOpt,
        #[command(flatten)]
        pca: PcaOpt,
        /// Membership threshold on the factor loading
        #[arg(long, default_value_t = 0.8, value_parser = theta_in_range)]
        theta: f64,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Project countries (plus factor poles for 3-factor models) to 2D
    Mds {
        #[command(flatten)]
        input: InputOpt,
        #[command(flatten)]
        pca: PcaOpt,
        #[command(flatten)]
        emb: EmbedOpt,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Render the 2D map as SVG and ASCII
    Map {
        #[command(flatten)]
        input: InputOpt,
        #[command(flatten)]
        pca: PcaOpt,
        #[command(flatten)]
        emb: EmbedOpt,
        /// SVG canvas width in pixels
        #[arg(long, default_value_t = 900)]
        width: u32,
        /// SVG canvas height in pixels
        #[arg(long, default_value_t = 600)]
        height: u32,
        /// ASCII grid columns
        #[arg(long, default_value_t = 100)]
        cols: usize,
        /// ASCII grid rows
        #[arg(long, default_value_t = 40)]
        rows: usize,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Side-by-side explained-variance comparison of two sources
    Compare {
        /// First source: fixture name or CSV path
        #[arg(long, default_value = "table2_sjr_variance")]
        a: String,
        /// Second source: fixture name or CSV path
        #[arg(long, default_value = "table3_esi_variance")]
        b: String,
        /// Components to compare
        #[arg(long, default_value_t = 3)]
        top: usize,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Run the full bundled-fixture pipeline and write every table and figure
    Reproduce {
        #[command(flatten)]
        out: OutOpt,
    },
    /// List bundled fixture names
    Fixtures,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputOpt {
    /// Profile-matrix CSV (header: iso2,name,region,<areas...>[,unclassified])
    #[arg(long, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Bundled fixture name (see `sciprofile fixtures`)
    #[arg(long, value_name = "NAME")]
    fixture: Option<String>,
}

#[derive(Args)]
struct PcaOpt {
    /// Analysis mode: countries as variables (q) or areas as variables (r)
    #[arg(long, value_enum, default_value_t = ModeArg::Q)]
    mode: ModeArg,
    /// Factors to retain: a number, "kaiser", or "cum:<percent>"
    #[arg(long, default_value = "3", value_parser = parse_factor_count)]
    k: FactorCountArg,
    /// Skip the varimax rotation
    #[arg(long)]
    no_rotate: bool,
    /// Values are raw counts rather than percentage shares
    #[arg(long)]
    counts: bool,
}

#[derive(Args)]
struct EmbedOpt {
    /// Distance between loading vectors
    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    metric: MetricArg,
    /// Stop after classical MDS instead of refining with SMACOF
    #[arg(long)]
    classical_only: bool,
    /// Random-start seed for SMACOF (default: deterministic classical start)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct OutOpt {
    /// Output directory (falls back to $SCIPROFILE_OUT, then ".")
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Q,
    R,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Euclidean,
    Cosine,
}

#[derive(Clone, Copy, Debug)]
enum FactorCountArg {
    Fixed(usize),
    Kaiser,
    Cumulative(f64),
}

impl From<FactorCountArg> for FactorCount {
    fn from(a: FactorCountArg) -> Self {
        match a {
            FactorCountArg::Fixed(k) => FactorCount::Fixed(k),
            FactorCountArg::Kaiser => FactorCount::Kaiser,
            FactorCountArg::Cumulative(c) => FactorCount::Cumulative(c),
        }
    }
}

fn parse_factor_count(s: &str) -> Result<FactorCountArg, String> {
    if s.eq_ignore_ascii_case("kaiser") {
        return Ok(FactorCountArg::Kaiser);
    }
    if let Some(rest) = s.strip_prefix("cum:") {
        let pct: f64 = rest
            .parse()
            .map_err(|_| format!("bad cumulative threshold {rest:?}"))?;
        if !(0.0..=100.0).contains(&pct) {
            return Err("cumulative threshold must be in [0, 100]".to_string());
        }
        return Ok(FactorCountArg::Cumulative(pct));
    }
    let k: usize = s
        .parse()
        .map_err(|_| format!("expected a count, \"kaiser\" or \"cum:<pct>\", got {s:?}"))?;
    if k == 0 {
        return Err("factor count must be at least 1".to_string());
    }
    Ok(FactorCountArg::Fixed(k))
}

fn theta_in_range(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("bad threshold {s:?}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err("threshold must be in [0, 1]".to_string())
    }
}

/// Parses `argv` and runs the selected subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let app = match App::try_parse_from(argv) {
        Ok(app) => app,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    2
                }
            };
        }
    };
    match exec(app.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

type AnyError = Box<dyn Error>;

struct OutDir {
    path: PathBuf,
}

impl OutDir {
    fn resolve(opt: OutOpt) -> Result<OutDir, AnyError> {
        let path = opt
            .out
            .or_else(|| std::env::var_os(ENV_OUT).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&path)?;
        Ok(OutDir { path })
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), AnyError> {
        let target = self.path.join(name);
        fs::write(&target, contents)?;
        println!("wrote {}", target.display());
        Ok(())
    }
}

fn resolve_matrix(input: InputOpt, counts: bool) -> Result<ProfileMatrix, AnyError> {
    let kind = if counts {
        MatrixKind::Counts
    } else {
        MatrixKind::Shares
    };
    if let Some(path) = input.input {
        let text = fs::read_to_string(&path)?;
        return Ok(parse_matrix(&text, kind)?);
    }
    let name = input.fixture.expect("clap group guarantees one source");
    match load_fixture(&name)? {
        Fixture::Matrix(m) => Ok(m),
        _ => Err(format!("fixture {name:?} is not a profile matrix").into()),
    }
}

/// Country rows only; the WD aggregate never enters the factor analysis.
fn analysis_rows(matrix: &ProfileMatrix) -> ProfileMatrix {
    ProfileMatrix::new(
        matrix.scheme.clone(),
        matrix.country_rows().cloned().collect(),
        matrix.kind,
    )
}

fn run_pca(matrix: &ProfileMatrix, opt: &PcaOpt) -> Result<FactorModel, AnyError> {
    let mode = match opt.mode {
        ModeArg::Q => FactorMode::QMode,
        ModeArg::R => FactorMode::RMode,
    };
    let model = extract_factors(&analysis_rows(matrix), opt.k.into(), mode, !opt.no_rotate)?;
    Ok(model)
}

fn world_row(matrix: &ProfileMatrix) -> Result<CountryProfile, AnyError> {
    if let Some(w) = matrix.find(WORLD_CODE) {
        return Ok(w.clone());
    }
    Ok(world_profile(&analysis_rows(matrix), None)?)
}

fn exec(cmd: Command) -> Result<i32, AnyError> {
    match cmd {
        Command::Fixtures => {
            for name in FIXTURE_NAMES {
                println!("{name}");
            }
            Ok(0)
        }
        Command::Validate { input } => {
            let matrix = resolve_matrix(input, false)?;
            let report = validate_profile(&matrix);
            for (id, msg) in &report.errors {
                println!("error [{id}]: {msg}");
            }
            for (id, msg) in &report.warnings {
                println!("warning [{id}]: {msg}");
            }
            println!(
                "{} rows, scheme {}, {} errors, {} warnings",
                matrix.rows.len(),
                matrix.scheme.name(),
                report.errors.len(),
                report.warnings.len()
            );
            Ok(if report.is_accepted() { 0 } else { 1 })
        }
        Command::Pca { input, pca, out } => {
            let matrix = resolve_matrix(input, pca.counts)?;
            let model = run_pca(&matrix, &pca)?;
            let out = OutDir::resolve(out)?;
            out.write("pca_model.json", &model.to_json())?;
            let table = variance_table(&model, model.k);
            out.write("pca_variance.tsv", &table.to_tsv())?;
            out.write("pca_variance.txt", &table.to_text())?;
            println!(
                "k={} ({}), top-{} cumulative explained variance {:.5}%",
                model.k,
                if model.rotated {
                    "varimax"
                } else {
                    "unrotated"
                },
                model.k,
                model.cumulative_explained(model.k)
            );
            Ok(0)
        }
        Command::Report {
            input,
            pca,
            theta,
            out,
        } => {
            let matrix = resolve_matrix(input, pca.counts)?;
            let model = run_pca(&matrix, &pca)?;
            let table = LoadingTable::from_model(&model)?;
            let out = OutDir::resolve(out)?;
            out.write("rankings.tsv", &rankings_tsv(&table)?)?;
            out.write("membership.tsv", &membership_tsv(&table, theta)?)?;
            let world = world_row(&matrix)?;
            for f in 0..table.k() {
                let members: Vec<String> = membership(&table, f, theta)?
                    .into_iter()
                    .map(|(iso, _)| iso)
                    .collect();
                let title = format!("Factor {} profile (theta={theta})", f + 1);
                let t = profile_table(&matrix, &members, &world, &title)?;
                out.write(&format!("profile_f{}.tsv", f + 1), &t.to_tsv())?;
                out.write(&format!("profile_f{}.txt", f + 1), &t.to_text())?;
            }
            Ok(0)
        }
        Command::Mds {
            input,
            pca,
            emb,
            out,
        } => {
            let matrix = resolve_matrix(input, pca.counts)?;
            let model = run_pca(&matrix, &pca)?;
            let embedding = embed(&model, &emb)?;
            let out = OutDir::resolve(out)?;
            out.write("embedding.csv", &mds::embedding_to_csv(&embedding))?;
            println!(
                "{} items, stress1 {:.6}, {} iterations",
                embedding.labels.len(),
                embedding.stress1,
                embedding.iterations
            );
            for d in &embedding.diagnostics {
                eprintln!("note: {d}");
            }
            Ok(0)
        }
        Command::Map {
            input,
            pca,
            emb,
            width,
            height,
            cols,
            rows,
            out,
        } => {
            let matrix = resolve_matrix(input, pca.counts)?;
            let model = run_pca(&matrix, &pca)?;
            let embedding = embed(&model, &emb)?;
            let regions: BTreeMap<String, String> = matrix
                .country_rows()
                .map(|r| (r.iso2.clone(), r.region.clone()))
                .collect();
            let names: BTreeMap<String, String> = matrix
                .country_rows()
                .map(|r| (r.iso2.clone(), r.name.clone()))
                .collect();
            let style = MapStyle {
                width,
                height,
                ..MapStyle::default()
            };
            let map = render_svg(&embedding, &regions, &names, &style)?;
            for w in &map.warnings {
                eprintln!("warning: {w}");
            }
            let out = OutDir::resolve(out)?;
            out.write("map.svg", &map.svg)?;
            out.write("map.txt", &render_ascii(&embedding, cols, rows)?)?;
            out.write("embedding.csv", &mds::embedding_to_csv(&embedding))?;
            Ok(0)
        }
        Command::Compare { a, b, top, out } => {
            let (label_a, rows_a) = variance_source(&a, top)?;
            let (label_b, rows_b) = variance_source(&b, top)?;
            let table = compare_variance_rows(&rows_a, &rows_b, top, &label_a, &label_b)?;
            let out = OutDir::resolve(out)?;
            out.write("comparison.tsv", &table.to_tsv())?;
            out.write("comparison.txt", &table.to_text())?;
            Ok(0)
        }
        Command::Reproduce { out } => reproduce(OutDir::resolve(out)?),
    }
}

fn embed(model: &FactorModel, opt: &EmbedOpt) -> Result<sciprofile_core::mds::Embedding, AnyError> {
    let metric = match opt.metric {
        MetricArg::Euclidean => mds::Metric::Euclidean,
        MetricArg::Cosine => mds::Metric::Cosine,
    };
    let (labels, rows) = if model.k == 3 {
        mds::add_factor_poles(model)?
    } else {
        eprintln!(
            "note: k={} model; factor poles need k=3 and are omitted",
            model.k
        );
        (model.labels.clone(), model.loadings.clone())
    };
    let d = mds::distance_matrix(&labels, &rows, metric)?;
    if opt.classical_only {
        return Ok(mds::classical_mds(&d)?);
    }
    let init = match opt.seed {
        Some(seed) => SmacofInit::Seeded(seed),
        None => SmacofInit::Classical,
    };
    Ok(mds::smacof(
        &d,
        init,
        mds::DEFAULT_MAX_ITER,
        mds::DEFAULT_TOL,
    )?)
}

fn rankings_tsv(table: &LoadingTable) -> Result<String, AnyError> {
    let mut out = String::from("factor\trank\tcountry\tloading\n");
    for f in 0..table.k() {
        for (rank, (label, loading)) in rank_by_factor(table, f)?.into_iter().enumerate() {
            out.push_str(&format!("{}\t{}\t{label}\t{loading:.5}\n", f + 1, rank + 1));
        }
    }
    Ok(out)
}

fn membership_tsv(table: &LoadingTable, theta: f64) -> Result<String, AnyError> {
    let mut out = String::from("factor\trank\tcountry\tloading\n");
    for f in 0..table.k() {
        for (rank, (label, loading)) in membership(table, f, theta)?.into_iter().enumerate() {
            out.push_str(&format!("{}\t{}\t{label}\t{loading:.5}\n", f + 1, rank + 1));
        }
    }
    Ok(out)
}

fn variance_source(source: &str, top: usize) -> Result<(String, Vec<VarianceRow>), AnyError> {
    if FIXTURE_NAMES.contains(&source) {
        match load_fixture(source)? {
            Fixture::Variance(rows) => return Ok((source.to_string(), rows)),
            Fixture::Matrix(m) => {
                let model = extract_factors(
                    &analysis_rows(&m),
                    FactorCount::Fixed(top),
                    FactorMode::QMode,
                    true,
                )?;
                return Ok((source.to_string(), model.variance_rows(top)));
            }
            Fixture::Loadings(_) => {
                return Err(format!("fixture {source:?} has no variance table").into());
            }
        }
    }
    let path = PathBuf::from(source);
    let text = fs::read_to_string(&path)?;
    let matrix = parse_matrix(&text, MatrixKind::Shares)?;
    let model = extract_factors(
        &analysis_rows(&matrix),
        FactorCount::Fixed(top),
        FactorMode::QMode,
        true,
    )?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| source.to_string());
    Ok((label, model.variance_rows(top)))
}

/// Map the model's factor columns onto the annex tables by maximizing
/// argmax-partition agreement over all column permutations.
fn align_factors_to_tables(model: &FactorModel, origins: &[(String, usize)]) -> [usize; 3] {
    let argmax: BTreeMap<&str, usize> = model
        .labels
        .iter()
        .zip(&model.loadings)
        .map(|(label, row)| {
            let mut best = 0;
            for f in 1..row.len() {
                if row[f] > row[best] {
                    best = f;
                }
            }
            (label.as_str(), best)
        })
        .collect();
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut best = perms[0];
    let mut best_score = usize::MIN;
    for perm in perms {
        let score = origins
            .iter()
            .filter(|(iso, table)| argmax.get(iso.as_str()).map(|f| perm[*f]) == Some(*table))
            .count();
        if score > best_score {
            best_score = score;
            best = perm;
        }
    }
    best
}

fn reproduce(out: OutDir) -> Result<i32, AnyError> {
    // transcribed loading table: rankings and threshold membership
    let loadings = load_fixture("annexA_loadings")?
        .into_loadings()
        .expect("loading fixture");
    out.write("annexA_rankings.tsv", &rankings_tsv(&loadings)?)?;
    out.write("annexA_membership.tsv", &membership_tsv(&loadings, 0.8)?)?;

    // per-factor profile tables against each table's own world row
    let tables = annexb_tables();
    for (i, table) in tables.iter().enumerate() {
        let members: Vec<String> = table.country_rows().map(|r| r.iso2.clone()).collect();
        let world = table
            .find(WORLD_CODE)
            .ok_or("annex table lacks a world row")?;
        let t = profile_table(table, &members, world, TABLE_TAGS[i])?;
        out.write(&format!("annexB_f{}_profile.tsv", i + 1), &t.to_tsv())?;
        out.write(&format!("annexB_f{}_profile.txt", i + 1), &t.to_text())?;
    }

    // transcribed variance tables and the scheme comparison
    let sjr = load_fixture("table2_sjr_variance")?
        .into_variance()
        .expect("variance fixture");
    let esi = load_fixture("table3_esi_variance")?
        .into_variance()
        .expect("variance fixture");
    out.write(
        "variance_sjr.tsv",
        &rows_to_variance_table(&sjr, "Explained variance (SJR)").to_tsv(),
    )?;
    out.write(
        "variance_esi.tsv",
        &rows_to_variance_table(&esi, "Explained variance (ESI)").to_tsv(),
    )?;
    let cmp = compare_variance_rows(&sjr, &esi, 3, "SJR", "ESI")?;
    out.write("scheme_comparison.tsv", &cmp.to_tsv())?;
    out.write("scheme_comparison.txt", &cmp.to_text())?;

    // factor model over the 35 exemplar countries
    let combined = annexb_combined();
    let model = extract_factors(&combined, FactorCount::Fixed(3), FactorMode::QMode, true)?;
    out.write("pca_model.json", &model.to_json())?;
    out.write("pca_variance.tsv", &variance_table(&model, 3).to_tsv())?;

    // map: countries plus factor poles, classical init refined by SMACOF
    let (labels, rows) = mds::add_factor_poles(&model)?;
    let d = mds::distance_matrix(&labels, &rows, mds::Metric::Euclidean)?;
    let embedding = mds::smacof(
        &d,
        SmacofInit::Classical,
        mds::DEFAULT_MAX_ITER,
        mds::DEFAULT_TOL,
    )?;
    out.write("embedding.csv", &mds::embedding_to_csv(&embedding))?;

    let perm = align_factors_to_tables(&model, &annexb_origins());
    let style = MapStyle {
        pole_tags: (0..3)
            .map(|f| (format!("F{}", f + 1), TABLE_TAGS[perm[f]].to_string()))
            .collect(),
        ..MapStyle::default()
    };
    let map = render_svg(&embedding, &annexb_regions(), &annexb_names(), &style)?;
    for w in &map.warnings {
        eprintln!("warning: {w}");
    }
    out.write("map.svg", &map.svg)?;
    out.write("map.txt", &render_ascii(&embedding, 100, 40)?)?;

    println!(
        "reproduced all bundled tables and figures (top-3 cumulative {:.3}%)",
        model.cumulative_explained(3)
    );
    Ok(0)
}

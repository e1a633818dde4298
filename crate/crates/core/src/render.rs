//! SVG and ASCII rendering of country-map embeddings.
//!
//! Output is byte-deterministic for identical inputs: items are drawn in
//! embedding order, coordinates are formatted with fixed precision and the
//! color table is ordered.

use crate::math;
use crate::mds::Embedding;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Fill used for countries whose region is unknown.
const FALLBACK_COLOR: &str = "#808080";
/// Fraction of the canvas kept free on each side.
const MARGIN: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub enum RenderError {
    EmptyEmbedding,
    ZeroCanvas,
    InvalidColor { region: String, color: String },
    GridTooSmall { cols: usize, rows: usize },
}

impl fmt::Display for RenderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RenderError::EmptyEmbedding => write!(f, "embedding has no items"),
            RenderError::ZeroCanvas => write!(f, "canvas width and height must be positive"),
            RenderError::InvalidColor { region, color } => {
                write!(
                    f,
                    "region {region:?} has invalid color {color:?} (want #rrggbb)"
                )
            }
            RenderError::GridTooSmall { cols, rows } => {
                write!(f, "ascii grid {cols}x{rows} too small; need at least 10x10")
            }
        }
    }
}

impl core::error::Error for RenderError {}

/// Canvas geometry, region palette and pole styling for the SVG map.
#[derive(Debug, Clone, PartialEq)]
pub struct MapStyle {
    pub width: u32,
    pub height: u32,
    /// region label -> 6-digit hex color
    pub region_colors: BTreeMap<String, String>,
    pub label_font_size: u32,
    pub marker_radius: f64,
    pub pole_radius: f64,
    pub pole_color: String,
    /// pole label -> descriptive tag drawn next to the vertex
    pub pole_tags: BTreeMap<String, String>,
}

impl Default for MapStyle {
    fn default() -> Self {
        // Okabe-Ito colorblind-safe palette over the SJR portal regions.
        let region_colors = [
            ("Africa", "#E69F00"),
            ("Asiatic Region", "#D55E00"),
            ("Eastern Europe", "#CC79A7"),
            ("Latin America", "#009E73"),
            ("Middle East", "#F0E442"),
            ("Northern America", "#56B4E9"),
            ("Pacific Region", "#999999"),
            ("Western Europe", "#0072B2"),
        ]
        .into_iter()
        .map(|(r, c)| (r.to_string(), c.to_string()))
        .collect();
        let pole_tags = [
            ("F1", "factor 1 \u{2013} biomedicine"),
            ("F2", "factor 2 \u{2013} basic science & engineering"),
            ("F3", "factor 3 \u{2013} agriculture"),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
        MapStyle {
            width: 900,
            height: 600,
            region_colors,
            label_font_size: 11,
            marker_radius: 3.0,
            pole_radius: 5.0,
            pole_color: "#000000".to_string(),
            pole_tags,
        }
    }
}

fn hex_color_ok(c: &str) -> bool {
    c.len() == 7 && c.starts_with('#') && c.chars().skip(1).all(|ch| ch.is_ascii_hexdigit())
}

impl MapStyle {
    pub fn validate(&self) -> Result<(), RenderError> {
        if self.width == 0 || self.height == 0 {
            return Err(RenderError::ZeroCanvas);
        }
        for (region, color) in &self.region_colors {
            if !hex_color_ok(color) {
                return Err(RenderError::InvalidColor {
                    region: region.clone(),
                    color: color.clone(),
                });
            }
        }
        if !hex_color_ok(&self.pole_color) {
            return Err(RenderError::InvalidColor {
                region: "poles".to_string(),
                color: self.pole_color.clone(),
            });
        }
        Ok(())
    }

    fn is_pole(&self, label: &str) -> bool {
        self.pole_tags.contains_key(label)
    }
}

/// Rendered SVG text plus warnings for items lacking region entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SvgMap {
    pub svg: String,
    pub warnings: Vec<String>,
}

struct Scaler {
    scale: f64,
    ox: f64,
    oy: f64,
    min_x: f64,
    min_y: f64,
    height: f64,
}

impl Scaler {
    /// Uniform scale into the margin-inset canvas, slack centered, so pixel
    /// distance ratios match embedding distance ratios.
    fn fit(coords: &[[f64; 2]], width: f64, height: f64) -> Scaler {
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for p in coords {
            min_x = min_x.min(p[0]);
            max_x = max_x.max(p[0]);
            min_y = min_y.min(p[1]);
            max_y = max_y.max(p[1]);
        }
        let span_x = max_x - min_x;
        let span_y = max_y - min_y;
        let avail_x = width * (1.0 - 2.0 * MARGIN);
        let avail_y = height * (1.0 - 2.0 * MARGIN);
        let scale = if span_x == 0.0 && span_y == 0.0 {
            1.0
        } else {
            let sx = if span_x > 0.0 {
                avail_x / span_x
            } else {
                f64::INFINITY
            };
            let sy = if span_y > 0.0 {
                avail_y / span_y
            } else {
                f64::INFINITY
            };
            sx.min(sy)
        };
        let ox = width * MARGIN + (avail_x - scale * span_x) / 2.0;
        let oy = height * MARGIN + (avail_y - scale * span_y) / 2.0;
        Scaler {
            scale,
            ox,
            oy,
            min_x,
            min_y,
            height,
        }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let x = self.ox + (p[0] - self.min_x) * self.scale;
        // flip y: SVG grows downward
        let y = self.height - (self.oy + (p[1] - self.min_y) * self.scale);
        (x, y)
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            c => out.push(c),
        }
    }
    out
}

/// Renders the embedding to SVG 1.1: one circle marker and one text label
/// per item, poles drawn as larger labelled vertices. Countries missing a
/// region entry fall back to gray and produce a warning.
pub fn render_svg(
    embedding: &Embedding,
    regions: &BTreeMap<String, String>,
    names: &BTreeMap<String, String>,
    style: &MapStyle,
) -> Result<SvgMap, RenderError> {
    if embedding.labels.is_empty() {
        return Err(RenderError::EmptyEmbedding);
    }
    style.validate()?;

    let w = f64::from(style.width);
    let h = f64::from(style.height);
    let scaler = Scaler::fit(&embedding.coords, w, h);
    let mut warnings = Vec::new();

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" width=\"{}\" height=\"{}\">\n",
        style.width, style.height, style.width, style.height
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>\n",
        style.width, style.height
    ));

    for (label, p) in embedding.labels.iter().zip(&embedding.coords) {
        let (x, y) = scaler.map(*p);
        let is_pole = style.is_pole(label);
        let color = if is_pole {
            style.pole_color.clone()
        } else {
            match regions.get(label) {
                Some(region) => style.region_colors.get(region).cloned().unwrap_or_else(|| {
                    warnings.push(format!("region {region:?} has no palette entry"));
                    FALLBACK_COLOR.to_string()
                }),
                None => {
                    warnings.push(format!("no region for {label:?}; using gray"));
                    FALLBACK_COLOR.to_string()
                }
            }
        };
        let r = if is_pole {
            style.pole_radius
        } else {
            style.marker_radius
        };
        let title = names.get(label).cloned().unwrap_or_else(|| label.clone());
        svg.push_str(&format!(
            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"{r}\" fill=\"{color}\"><title>{}</title></circle>\n",
            xml_escape(&title)
        ));
        let text = if is_pole {
            style
                .pole_tags
                .get(label)
                .cloned()
                .unwrap_or_else(|| label.clone())
        } else {
            label.clone()
        };
        let weight = if is_pole { " font-weight=\"bold\"" } else { "" };
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"{}\"{}>{}</text>\n",
            x + r + 2.0,
            y - 2.0,
            style.label_font_size,
            weight,
            xml_escape(&text)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(SvgMap { svg, warnings })
}

/// Character-grid preview: every item lands in its binned cell and prints
/// its label; items sharing a cell collapse to the lexicographically
/// smallest label plus `+n`.
pub fn render_ascii(
    embedding: &Embedding,
    cols: usize,
    rows: usize,
) -> Result<String, RenderError> {
    if embedding.labels.is_empty() {
        return Err(RenderError::EmptyEmbedding);
    }
    if cols < 10 || rows < 10 {
        return Err(RenderError::GridTooSmall { cols, rows });
    }

    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for p in &embedding.coords {
        min_x = min_x.min(p[0]);
        max_x = max_x.max(p[0]);
        min_y = min_y.min(p[1]);
        max_y = max_y.max(p[1]);
    }
    let bin = |v: f64, lo: f64, hi: f64, cells: usize| -> usize {
        if hi <= lo {
            return cells / 2;
        }
        let t = (v - lo) / (hi - lo);
        let idx = math::floor(t * (cells - 1) as f64 + 0.5) as isize;
        idx.clamp(0, cells as isize - 1) as usize
    };

    let mut by_cell: BTreeMap<(usize, usize), Vec<&str>> = BTreeMap::new();
    for (label, p) in embedding.labels.iter().zip(&embedding.coords) {
        let c = bin(p[0], min_x, max_x, cols);
        // row 0 is the top of the map
        let r = rows - 1 - bin(p[1], min_y, max_y, rows);
        by_cell.entry((r, c)).or_default().push(label);
    }

    let mut grid = alloc::vec![alloc::vec![' '; cols]; rows];
    for ((r, c), mut items) in by_cell {
        items.sort_unstable();
        let mut text = items[0].to_string();
        if items.len() > 1 {
            text.push_str(&format!("+{}", items.len() - 1));
        }
        let len = text.chars().count();
        // shift left rather than clip when the label would cross the edge
        let start = if c + len > cols {
            cols.saturating_sub(len)
        } else {
            c
        };
        for (i, ch) in text.chars().enumerate() {
            if start + i < cols {
                grid[r][start + i] = ch;
            }
        }
    }

    let mut out = String::new();
    for row in grid {
        let line: String = row.into_iter().collect();
        out.push_str(line.trim_end());
        out.push('\n');
    }
    Ok(out)
}

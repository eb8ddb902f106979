//! Standalone SVG scatter plots of 2-D embeddings.
//!
//! Plain text emission, no drawing dependencies: one `<circle>` per point
//! inside a frame that spans the data bounding box, with a 5% canvas
//! margin on every side. Labels, when given, pick fill colors from a fixed
//! 10-color categorical palette, cycling for label values beyond ten.

use dtsne::{Error, Matrix, Result};
use std::fmt::Write as _;

/// Categorical palette, cycled by label value.
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Rendering parameters for [`render_svg`].
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub width_px: u32,
    pub height_px: u32,
    pub point_radius_px: f64,
    pub opacity: f64,
}

impl Default for PlotSpec {
    fn default() -> Self {
        PlotSpec {
            width_px: 800,
            height_px: 800,
            point_radius_px: 3.0,
            opacity: 0.5,
        }
    }
}

impl PlotSpec {
    fn validate(&self) -> Result<()> {
        if self.width_px < 100 || self.height_px < 100 {
            return Err(Error::InvalidConfig(format!(
                "plot dimensions must be at least 100 px, got {}x{}",
                self.width_px, self.height_px
            )));
        }
        if !self.point_radius_px.is_finite() || self.point_radius_px <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "point radius must be positive, got {}",
                self.point_radius_px
            )));
        }
        if !self.opacity.is_finite() || !(self.opacity > 0.0 && self.opacity <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "opacity must lie in (0, 1], got {}",
                self.opacity
            )));
        }
        Ok(())
    }
}

fn color_for(label: i64) -> &'static str {
    PALETTE[label.rem_euclid(PALETTE.len() as i64) as usize]
}

/// Renders a 2-column coordinate matrix as an SVG document string.
///
/// `labels`, when present, must have one entry per point; points are
/// colored by label, otherwise they all take the first palette color.
pub fn render_svg(coords: &Matrix, labels: Option<&[i64]>, spec: &PlotSpec) -> Result<String> {
    spec.validate()?;
    if coords.cols() != 2 {
        return Err(Error::InvalidConfig(format!(
            "plotting needs a 2-D embedding, got {} columns",
            coords.cols()
        )));
    }
    if let Some((row, col)) = coords.find_non_finite() {
        return Err(Error::NonFinite { row, col });
    }
    if let Some(labels) = labels {
        if labels.len() != coords.rows() {
            return Err(Error::LabelLengthMismatch {
                labels: labels.len(),
                points: coords.rows(),
            });
        }
    }

    let n = coords.rows();
    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for row in coords.iter_rows() {
        min_x = min_x.min(row[0]);
        max_x = max_x.max(row[0]);
        min_y = min_y.min(row[1]);
        max_y = max_y.max(row[1]);
    }
    if n == 0 {
        (min_x, max_x, min_y, max_y) = (0.0, 1.0, 0.0, 1.0);
    }
    // Degenerate ranges still deserve a visible frame.
    let range_x = if max_x > min_x { max_x - min_x } else { 1.0 };
    let range_y = if max_y > min_y { max_y - min_y } else { 1.0 };

    let w = spec.width_px as f64;
    let h = spec.height_px as f64;
    let pad_x = 0.05 * w;
    let pad_y = 0.05 * h;
    let scale_x = (w - 2.0 * pad_x) / range_x;
    let scale_y = (h - 2.0 * pad_y) / range_y;
    // SVG y grows downward; flip so larger data y plots higher.
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            pad_x + (x - min_x) * scale_x,
            h - pad_y - (y - min_y) * scale_y,
        )
    };

    let mut svg = String::new();
    writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = spec.width_px,
        h = spec.height_px
    )
    .unwrap();
    writeln!(
        svg,
        r#"  <rect width="{w}" height="{h}" fill="white"/>"#,
        w = spec.width_px,
        h = spec.height_px
    )
    .unwrap();
    writeln!(
        svg,
        r##"  <rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444444" stroke-width="1"/>"##,
        pad_x,
        pad_y,
        w - 2.0 * pad_x,
        h - 2.0 * pad_y
    )
    .unwrap();
    for i in 0..n {
        let (cx, cy) = to_px(coords.get(i, 0), coords.get(i, 1));
        let color = match labels {
            Some(l) => color_for(l[i]),
            None => PALETTE[0],
        };
        writeln!(
            svg,
            r#"  <circle cx="{cx:.2}" cy="{cy:.2}" r="{r}" fill="{color}" fill-opacity="{op}"/>"#,
            r = spec.point_radius_px,
            op = spec.opacity
        )
        .unwrap();
    }
    writeln!(svg, "</svg>").unwrap();
    Ok(svg)
}

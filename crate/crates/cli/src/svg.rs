//! Minimal native SVG plotting: polyline curves over a framed panel with
//! ticks, an optional dashed horizontal reference line, and a wrapping
//! legend. Output depends only on the input data, so plots are
//! byte-reproducible.

use std::fmt::Write;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Panel {
    pub title: String,
    pub series: Vec<Series>,
    /// Dashed horizontal line `(y, label)`, e.g. an asymptote.
    pub reference: Option<(f64, String)>,
}

const PANEL_WIDTH: f64 = 390.0;
const PANEL_HEIGHT: f64 = 300.0;
const PANEL_GAP: f64 = 90.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_TOP: f64 = 46.0;
const LEGEND_COLUMN: f64 = 86.0;
const LEGEND_ROW: f64 = 18.0;

/// Distinct deterministic colors via golden-angle hue stepping.
fn color(i: usize) -> String {
    format!("hsl({}, 62%, 42%)", (i * 137) % 360)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Bounds {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Bounds {
    fn of(panel: &Panel) -> Bounds {
        let mut b = Bounds {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for s in &panel.series {
            for &(x, y) in &s.points {
                b.x_min = b.x_min.min(x);
                b.x_max = b.x_max.max(x);
                b.y_min = b.y_min.min(y);
                b.y_max = b.y_max.max(y);
            }
        }
        if let Some((y, _)) = panel.reference {
            b.y_min = b.y_min.min(y);
            b.y_max = b.y_max.max(y);
        }
        // Degenerate and empty ranges expand to something drawable.
        if !b.x_min.is_finite() {
            (b.x_min, b.x_max) = (0.0, 1.0);
        }
        if !b.y_min.is_finite() {
            (b.y_min, b.y_max) = (0.0, 1.0);
        }
        if b.x_max - b.x_min < 1e-12 {
            b.x_min -= 0.5;
            b.x_max += 0.5;
        }
        let pad = 0.05 * (b.y_max - b.y_min).max(1e-12);
        b.y_min -= pad;
        b.y_max += pad;
        b
    }

    fn map(&self, origin_x: f64, x: f64, y: f64) -> (f64, f64) {
        let px = origin_x + (x - self.x_min) / (self.x_max - self.x_min) * PANEL_WIDTH;
        let py = MARGIN_TOP + (self.y_max - y) / (self.y_max - self.y_min) * PANEL_HEIGHT;
        (px, py)
    }
}

fn render_panel(out: &mut String, panel: &Panel, index: usize) {
    let origin_x = MARGIN_LEFT + index as f64 * (PANEL_WIDTH + PANEL_GAP);
    let b = Bounds::of(panel);

    writeln!(
        out,
        r#"<rect x="{origin_x:.2}" y="{MARGIN_TOP:.2}" width="{PANEL_WIDTH:.2}" height="{PANEL_HEIGHT:.2}" fill="none" stroke="rgb(68,68,68)" stroke-width="1"/>"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="15" font-family="sans-serif">{}</text>"#,
        origin_x + PANEL_WIDTH / 2.0,
        MARGIN_TOP - 14.0,
        escape(&panel.title)
    )
    .unwrap();

    // Ticks: 5 per axis, labels in data units.
    for k in 0..=4 {
        let fx = k as f64 / 4.0;
        let x = b.x_min + fx * (b.x_max - b.x_min);
        let (px, _) = b.map(origin_x, x, b.y_min);
        let bottom = MARGIN_TOP + PANEL_HEIGHT;
        writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="rgb(68,68,68)" stroke-width="1"/>"#,
            bottom + 5.0
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle" font-size="11" font-family="sans-serif">{x:.3}</text>"#,
            bottom + 18.0
        )
        .unwrap();

        let y = b.y_min + fx * (b.y_max - b.y_min);
        let (_, py) = b.map(origin_x, b.x_min, y);
        writeln!(
            out,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{origin_x:.2}" y2="{py:.2}" stroke="rgb(68,68,68)" stroke-width="1"/>"#,
            origin_x - 5.0
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11" font-family="sans-serif">{y:.3}</text>"#,
            origin_x - 8.0,
            py + 4.0
        )
        .unwrap();
    }

    if let Some((y, label)) = &panel.reference {
        let (x1, py) = b.map(origin_x, b.x_min, *y);
        let (x2, _) = b.map(origin_x, b.x_max, *y);
        writeln!(
            out,
            r#"<line x1="{x1:.2}" y1="{py:.2}" x2="{x2:.2}" y2="{py:.2}" stroke="rgb(102,102,102)" stroke-width="1.2" stroke-dasharray="6 4"/>"#
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11" font-family="sans-serif" fill="rgb(102,102,102)">{}</text>"#,
            x2 - 4.0,
            py - 5.0,
            escape(label)
        )
        .unwrap();
    }

    for (i, s) in panel.series.iter().enumerate() {
        let mut pts = String::new();
        for &(x, y) in &s.points {
            let (px, py) = b.map(origin_x, x, y);
            write!(pts, "{px:.2},{py:.2} ").unwrap();
        }
        writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.3"/>"#,
            pts.trim_end(),
            color(i)
        )
        .unwrap();
    }

    // Legend: wrapping swatch grid under the panel.
    let per_row = (PANEL_WIDTH / LEGEND_COLUMN) as usize;
    for (i, s) in panel.series.iter().enumerate() {
        let lx = origin_x + (i % per_row) as f64 * LEGEND_COLUMN;
        let ly = MARGIN_TOP + PANEL_HEIGHT + 36.0 + (i / per_row) as f64 * LEGEND_ROW;
        writeln!(
            out,
            r#"<rect x="{lx:.2}" y="{:.2}" width="10" height="10" fill="{}"/>"#,
            ly - 9.0,
            color(i)
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{ly:.2}" font-size="11" font-family="sans-serif">{}</text>"#,
            lx + 14.0,
            escape(&s.label)
        )
        .unwrap();
    }
}

/// Renders side-by-side panels into a standalone SVG document.
pub fn render(panels: &[Panel]) -> String {
    let per_row = (PANEL_WIDTH / LEGEND_COLUMN) as usize;
    let legend_rows = panels
        .iter()
        .map(|p| p.series.len().div_ceil(per_row))
        .max()
        .unwrap_or(0);
    let width = MARGIN_LEFT + panels.len() as f64 * (PANEL_WIDTH + PANEL_GAP);
    let height = MARGIN_TOP + PANEL_HEIGHT + 46.0 + legend_rows as f64 * LEGEND_ROW;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut out, panel, i);
    }
    out.push_str("</svg>\n");
    out
}

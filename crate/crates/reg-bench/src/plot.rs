//! Static SVG rendering of trajectory CSVs: objective and gradient
//! row-norm-sum curves, optionally on a log scale.

use std::fs;
use std::path::Path;

use reg_opt::error::{Error, Result};

use crate::runner::write_atomic;

const WIDTH: f64 = 900.0;
const PANEL_HEIGHT: f64 = 320.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 45.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

struct Curve {
    label: String,
    f: Vec<f64>,
    g: Vec<f64>,
}

fn parse_csv(path: &Path) -> Result<Curve> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::ConfigInvalid(format!("{}: empty CSV", path.display())))?;
    if header != "iter,f,grad_fro,g_k,h_k,update_rms,lr" {
        return Err(Error::ConfigInvalid(format!(
            "{}: unexpected CSV header '{header}'",
            path.display()
        )));
    }
    let mut f = Vec::new();
    let mut g = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::ConfigInvalid(format!(
                "{}: malformed row '{line}'",
                path.display()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::ConfigInvalid(format!("{}: bad number '{s}'", path.display())))
        };
        f.push(parse(fields[1])?);
        g.push(parse(fields[3])?);
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok(Curve { label, f, g })
}

/// Render the named CSV trajectories into one SVG with a loss panel and a
/// `g_k` panel.
pub fn plot_csvs(paths: &[impl AsRef<Path>], out: &Path, log_y: bool) -> Result<()> {
    if paths.is_empty() {
        return Err(Error::ConfigInvalid("plot needs at least one CSV".into()));
    }
    let curves: Vec<Curve> = paths
        .iter()
        .map(|p| parse_csv(p.as_ref()))
        .collect::<Result<_>>()?;

    let height = 2.0 * PANEL_HEIGHT + 40.0;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" \
         viewBox=\"0 0 {WIDTH} {height}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    render_panel(
        &mut svg,
        &curves,
        |c| &c.f,
        "objective f",
        0.0,
        log_y,
        true,
    );
    render_panel(
        &mut svg,
        &curves,
        |c| &c.g,
        "gradient row-norm sum g_k",
        PANEL_HEIGHT + 20.0,
        log_y,
        false,
    );
    svg.push_str("</svg>\n");
    write_atomic(out, &svg)
}

fn render_panel(
    svg: &mut String,
    curves: &[Curve],
    series: impl Fn(&Curve) -> &Vec<f64>,
    title: &str,
    y_offset: f64,
    log_y: bool,
    legend: bool,
) {
    let left = MARGIN_LEFT;
    let right = WIDTH - MARGIN_RIGHT;
    let top = y_offset + MARGIN_TOP;
    let bottom = y_offset + PANEL_HEIGHT - MARGIN_BOTTOM;

    let transform = |v: f64| -> Option<f64> {
        if log_y {
            (v > 0.0).then(|| v.log10())
        } else {
            v.is_finite().then_some(v)
        }
    };

    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    let mut x_max = 1.0_f64;
    for curve in curves {
        let ys = series(curve);
        x_max = x_max.max(ys.len().saturating_sub(1) as f64);
        for &v in ys {
            if let Some(t) = transform(v) {
                y_min = y_min.min(t);
                y_max = y_max.max(t);
            }
        }
    }
    if !y_min.is_finite() {
        y_min = 0.0;
        y_max = 1.0;
    }
    if (y_max - y_min).abs() < 1e-300 {
        y_max = y_min + 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    let (y_lo, y_hi) = (y_min - pad, y_max + pad);

    let x_px = |x: f64| left + (x / x_max.max(1.0)) * (right - left);
    let y_px = |t: f64| bottom - (t - y_lo) / (y_hi - y_lo) * (bottom - top);

    svg.push_str(&format!(
        "<text x=\"{left}\" y=\"{}\" font-size=\"14\" font-weight=\"bold\">{title}{}</text>\n",
        top - 14.0,
        if log_y { " (log scale)" } else { "" }
    ));
    // Frame and ticks.
    svg.push_str(&format!(
        "<rect x=\"{left}\" y=\"{top}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
        right - left,
        bottom - top
    ));
    for i in 0..=4 {
        let t = y_lo + (y_hi - y_lo) * i as f64 / 4.0;
        let y = y_px(t);
        let label_val = if log_y { 10f64.powf(t) } else { t };
        svg.push_str(&format!(
            "<line x1=\"{left}\" y1=\"{y:.1}\" x2=\"{right}\" y2=\"{y:.1}\" stroke=\"#ddd\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            left - 6.0,
            y + 4.0,
            format_tick(label_val)
        ));
        let x_val = x_max * i as f64 / 4.0;
        let x = x_px(x_val);
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{:.0}</text>\n",
            bottom + 16.0,
            x_val
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">iteration</text>\n",
        (left + right) / 2.0,
        bottom + 34.0
    ));

    for (idx, curve) in curves.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let points: Vec<String> = series(curve)
            .iter()
            .enumerate()
            .filter_map(|(k, &v)| transform(v).map(|t| format!("{:.1},{:.1}", x_px(k as f64), y_px(t))))
            .collect();
        if points.is_empty() {
            continue;
        }
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        if legend {
            let ly = top + 16.0 + 16.0 * idx as f64;
            svg.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
                right - 150.0,
                right - 120.0
            ));
            svg.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>\n",
                right - 114.0,
                ly + 4.0,
                xml_escape(&curve.label)
            ));
        }
    }
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e-3 && v.abs() < 1e4 {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

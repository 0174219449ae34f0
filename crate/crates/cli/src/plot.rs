use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::table::Table;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 48.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];
const TICKS: usize = 5;

struct Figure<'a> {
    file: &'a str,
    title: &'a str,
    y_label: &'a str,
    series: &'a [&'a str],
}

const FIGURES: [Figure<'static>; 3] = [
    Figure {
        file: "displacements.svg",
        title: "Critical displacements",
        y_label: "u",
        series: &["u1", "u2", "u3"],
    },
    Figure {
        file: "dual_fields.svg",
        title: "Dual fields",
        y_label: "zeta",
        series: &["zeta1", "zeta2", "zeta3"],
    },
    Figure {
        file: "stress.svg",
        title: "Radial stress",
        y_label: "F",
        series: &["F"],
    },
];

/// Every column the plots read.
pub fn required_columns() -> Vec<&'static str> {
    let mut names = vec!["r"];
    for figure in &FIGURES {
        names.extend(figure.series.iter().copied());
    }
    names
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if hi - lo <= f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
        let pad = 0.5 * lo.abs().max(1.0);
        (lo - pad, hi + pad)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn render(figure: &Figure, r: &[f64], series: &[&[f64]]) -> String {
    let (x0, x1) = bounds(r.iter().copied());
    let (y0, y1) = bounds(series.iter().flat_map(|s| s.iter().copied()));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        figure.title
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..TICKS {
        let t = i as f64 / (TICKS - 1) as f64;
        let (x, y) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let _ = writeln!(
            svg,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="black"/><text x="{0:.2}" y="{3:.2}" text-anchor="middle">{4:.3}</text>"#,
            px(x),
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 18.0,
            x
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{0:.2}" y1="{1:.2}" x2="{2:.2}" y2="{1:.2}" stroke="black"/><text x="{3:.2}" y="{4:.2}" text-anchor="end">{5:.3e}</text>"#,
            LEFT - 5.0,
            py(y),
            LEFT,
            LEFT - 8.0,
            py(y) + 4.0,
            y
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">r</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{0:.1}" text-anchor="middle" transform="rotate(-90 14 {0:.1})">{1}</text>"#,
        TOP + plot_h / 2.0,
        figure.y_label
    );
    for (k, (name, values)) in figure.series.iter().zip(series).enumerate() {
        let mut points = String::new();
        for (x, y) in r.iter().zip(values.iter()) {
            let _ = write!(points, "{:.2},{:.2} ", px(*x), py(*y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            COLORS[k % COLORS.len()],
            points.trim_end()
        );
        let ly = TOP + 16.0 + 20.0 * k as f64;
        let lx = WIDTH - RIGHT + 16.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{name}</text>"#,
            lx + 24.0,
            COLORS[k % COLORS.len()],
            lx + 30.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes displacements.svg, dual_fields.svg and stress.svg into `dir`.
pub fn write_plots(table: &Table, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    table.require(&required_columns())?;
    if let Some((column, row)) = table.first_non_finite() {
        return Err(CliError::Numerical(format!("non-finite {column} in data row {row}")));
    }
    let r = table.column("r").expect("checked");
    fs::create_dir_all(dir).map_err(|e| CliError::io(&dir.display().to_string(), e))?;
    let mut written = Vec::new();
    for figure in &FIGURES {
        let series: Vec<&[f64]> = figure
            .series
            .iter()
            .map(|name| table.column(name).expect("checked"))
            .collect();
        let path = dir.join(figure.file);
        fs::write(&path, render(figure, r, &series)).map_err(|e| CliError::io(&path.display().to_string(), e))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::default();
        let r: Vec<f64> = (0..11).map(|i| 1.0 + 0.1 * i as f64).collect();
        for name in required_columns() {
            t.push(name, r.iter().map(|x| x * x).collect());
        }
        t.columns[0] = r;
        t
    }

    #[test]
    fn three_deterministic_files() {
        let dir = tempfile::tempdir().unwrap();
        let first = write_plots(&table(), dir.path()).unwrap();
        assert_eq!(first.len(), 3);
        let bytes: Vec<Vec<u8>> = first.iter().map(|p| fs::read(p).unwrap()).collect();
        write_plots(&table(), dir.path()).unwrap();
        for (p, b) in first.iter().zip(bytes) {
            assert_eq!(fs::read(p).unwrap(), b);
            assert!(String::from_utf8(b).unwrap().starts_with("<svg"));
        }
    }

    #[test]
    fn constant_series_still_render() {
        let mut t = table();
        let len = t.rows();
        t.columns[t.headers.iter().position(|h| h == "F").unwrap()] = vec![0.0; len];
        let dir = tempfile::tempdir().unwrap();
        let paths = write_plots(&t, dir.path()).unwrap();
        assert!(!fs::read_to_string(&paths[2]).unwrap().contains("NaN"));
    }

    #[test]
    fn missing_columns_are_listed() {
        let mut t = table();
        t.headers[1] = "v1".into();
        let err = write_plots(&t, Path::new("unused")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("u1"));
    }
}

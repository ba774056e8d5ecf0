//! SVG plots derived from an order report.

use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::report::OrderRow;

pub const BOUNDS_FILE: &str = "orders_bounds.svg";
pub const RATIOS_FILE: &str = "orders_ratios.svg";
/// Display range of the ratio plot.
pub const RATIO_CLAMP: (f64, f64) = (1e-4, 1e4);

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error("report has no rows")]
    Empty,
    #[error("cannot create {path}: {source}")]
    Dir { path: PathBuf, source: std::io::Error },
    #[error("drawing {path}: {msg}")]
    Draw { path: PathBuf, msg: String },
}

fn draw_err(path: &Path) -> impl Fn(String) -> PlotError + '_ {
    move |msg| PlotError::Draw { path: path.to_owned(), msg }
}

fn log_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| *v > 0.0 && v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (1e-16, 1.0);
    }
    let hi = if hi > lo { hi } else { lo * 10.0 };
    (lo / 2.0, hi * 2.0)
}

fn clamp_range((lo, hi): (f64, f64), (min, max): (f64, f64)) -> (f64, f64) {
    let lo = lo.clamp(min, max);
    let hi = hi.clamp(min, max);
    if hi > lo {
        (lo, hi)
    } else if lo * 10.0 <= max {
        (lo, lo * 10.0)
    } else {
        (max / 10.0, max)
    }
}

fn series(rows: &[OrderRow], m_even: bool, value: impl Fn(&OrderRow) -> f64) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| (r.m == 2 * r.n) == m_even)
        .map(|r| (r.n as f64, value(r)))
        .filter(|(_, v)| *v > 0.0 && v.is_finite())
        .collect()
}

type Series<'a> = (&'a str, RGBColor, Vec<(f64, f64)>);

fn log_plot(path: &Path, title: &str, y_range: (f64, f64), x_range: (f64, f64), data: Vec<Series<'_>>) -> Result<(), PlotError> {
    let err = draw_err(path);
    let root = SVGBackend::new(path, (800, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| err(e.to_string()))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 22))
        .margin(16)
        .x_label_area_size(40)
        .y_label_area_size(80)
        .build_cartesian_2d(x_range.0..x_range.1, (y_range.0..y_range.1).log_scale())
        .map_err(|e| err(e.to_string()))?;
    chart.configure_mesh().x_desc("n").y_label_formatter(&|v| format!("{v:.0e}")).draw().map_err(|e| err(e.to_string()))?;
    for (label, color, points) in data {
        let clamped: Vec<(f64, f64)> = points.into_iter().map(|(x, y)| (x, y.clamp(y_range.0, y_range.1))).collect();
        chart
            .draw_series(LineSeries::new(clamped.iter().copied(), color.stroke_width(2)))
            .map_err(|e| err(e.to_string()))?
            .label(label)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
        chart
            .draw_series(clamped.iter().map(|&p| Circle::new(p, 3, color.filled())))
            .map_err(|e| err(e.to_string()))?;
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| err(e.to_string()))?;
    root.present().map_err(|e| err(e.to_string()))?;
    Ok(())
}

/// Writes the bound plot (`e_m` bounds, `E_n` and `ψ(n)` against `n`) and the
/// ratio plot into `dir`; returns the paths written.
pub fn emit_plots(rows: &[OrderRow], dir: &Path) -> Result<Vec<PathBuf>, PlotError> {
    if rows.is_empty() {
        return Err(PlotError::Empty);
    }
    std::fs::create_dir_all(dir).map_err(|source| PlotError::Dir { path: dir.to_owned(), source })?;
    let n_lo = rows.iter().map(|r| r.n).min().unwrap_or(1) as f64;
    let n_hi = rows.iter().map(|r| r.n).max().unwrap_or(1) as f64;
    let x_range = if n_hi > n_lo { (n_lo, n_hi) } else { (n_lo - 0.5, n_hi + 0.5) };

    let bounds = dir.join(BOUNDS_FILE);
    let y = log_range(rows.iter().flat_map(|r| [r.psi_n_value, r.e_m_upper, r.e_m_certificate, r.e_orth_upper, r.e_n_value]));
    log_plot(
        &bounds,
        "best 2n-term bounds against psi(n)",
        y,
        x_range,
        vec![
            ("psi(n)", BLACK, series(rows, true, |r| r.psi_n_value)),
            ("e_2n upper", BLUE, series(rows, true, |r| r.e_m_upper)),
            ("e_2n certificate", CYAN, series(rows, true, |r| r.e_m_certificate)),
            ("e_2n-1 upper", GREEN, series(rows, false, |r| r.e_m_upper)),
            ("orthogonal e_2n upper", MAGENTA, series(rows, true, |r| r.e_orth_upper)),
            ("E_n", RED, series(rows, true, |r| r.e_n_value)),
        ],
    )?;

    let ratios = dir.join(RATIOS_FILE);
    let y = clamp_range(log_range(rows.iter().flat_map(|r| [r.ratio_upper, r.ratio_cert])), RATIO_CLAMP);
    log_plot(
        &ratios,
        "ratios to psi(n)",
        y,
        x_range,
        vec![
            ("e_2n upper / psi(n)", BLUE, series(rows, true, |r| r.ratio_upper)),
            ("e_2n certificate / psi(n)", CYAN, series(rows, true, |r| r.ratio_cert)),
            ("e_2n-1 upper / psi(n)", GREEN, series(rows, false, |r| r.ratio_upper)),
        ],
    )?;
    Ok(vec![bounds, ratios])
}

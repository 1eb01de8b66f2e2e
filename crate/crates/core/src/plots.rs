//! Static SVG plots of ensemble and refinement results.

use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::ensemble::{EnsembleRun, MassStudy};
use crate::error::{Error, Result};

fn plot_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1e-12) };
    (lo - pad, hi + pad)
}

/// Energy and entropy against time for every path, plus a stopping-time
/// histogram when some path stopped. An empty run writes nothing.
pub fn emit_plots(run: &EnsembleRun, dir: &Path) -> Result<Vec<PathBuf>> {
    if run.records.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let path = dir.join("energy_entropy.svg");
    {
        let root = SVGBackend::new(&path, (900, 900)).into_drawing_area();
        root.fill(&WHITE).map_err(|e| plot_err(&path, e))?;
        let panels = root.split_evenly((2, 1));
        let t_end = run
            .records
            .iter()
            .filter_map(|r| r.samples.last().map(|s| s.time))
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE);
        type Pick = fn(&crate::diagnostics::DiagnosticsRecord) -> f64;
        let series: [(&str, Pick); 2] = [("energy", |d| d.energy), ("entropy", |d| d.entropy)];
        for (panel, (label, pick)) in panels.iter().zip(series) {
            let (lo, hi) = range(
                run.records
                    .iter()
                    .flat_map(|r| r.samples.iter().map(|s| pick(&s.diagnostics))),
            );
            let mut chart = ChartBuilder::on(panel)
                .caption(format!("{label} vs time"), ("sans-serif", 20))
                .margin(10)
                .x_label_area_size(35)
                .y_label_area_size(70)
                .build_cartesian_2d(0.0..t_end, lo..hi)
                .map_err(|e| plot_err(&path, e))?;
            chart
                .configure_mesh()
                .x_desc("t")
                .y_desc(label)
                .draw()
                .map_err(|e| plot_err(&path, e))?;
            for (i, rec) in run.records.iter().enumerate() {
                let color = Palette99::pick(i).to_rgba();
                chart
                    .draw_series(LineSeries::new(
                        rec.samples
                            .iter()
                            .map(|s| (s.time, pick(&s.diagnostics)))
                            .filter(|(_, v)| v.is_finite()),
                        color,
                    ))
                    .map_err(|e| plot_err(&path, e))?;
            }
        }
        root.present().map_err(|e| plot_err(&path, e))?;
    }
    written.push(path);

    let times = &run.report.stopping.times;
    if !times.is_empty() {
        let path = dir.join("stopping_times.svg");
        {
            let bins = 20usize;
            let t_max = times.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            let width = t_max / bins as f64;
            let mut counts = vec![0u32; bins];
            for &t in times {
                counts[((t / width) as usize).min(bins - 1)] += 1;
            }
            let top = counts.iter().copied().max().unwrap_or(1);
            let root = SVGBackend::new(&path, (800, 500)).into_drawing_area();
            root.fill(&WHITE).map_err(|e| plot_err(&path, e))?;
            let mut chart = ChartBuilder::on(&root)
                .caption("stopping times", ("sans-serif", 20))
                .margin(10)
                .x_label_area_size(35)
                .y_label_area_size(50)
                .build_cartesian_2d(0.0..t_max, 0u32..top + 1)
                .map_err(|e| plot_err(&path, e))?;
            chart
                .configure_mesh()
                .x_desc("t")
                .y_desc("paths")
                .draw()
                .map_err(|e| plot_err(&path, e))?;
            chart
                .draw_series(counts.iter().enumerate().map(|(b, &c)| {
                    let x0 = b as f64 * width;
                    Rectangle::new([(x0, 0), (x0 + width, c)], BLUE.mix(0.6).filled())
                }))
                .map_err(|e| plot_err(&path, e))?;
            root.present().map_err(|e| plot_err(&path, e))?;
        }
        written.push(path);
    }
    Ok(written)
}

/// Log–log plot of the expected sup mass drift against `h`, with the
/// fitted slope in the caption.
pub fn emit_mass_plot(study: &MassStudy, dir: &Path) -> Result<Vec<PathBuf>> {
    let pts: Vec<(f64, f64)> = study
        .levels
        .iter()
        .filter(|l| l.drift > 0.0)
        .map(|l| (l.h, l.drift))
        .collect();
    if pts.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("mass_drift.svg");
    {
        let (hlo, hhi) = pts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p.0), b.max(p.0)));
        let (dlo, dhi) = pts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p.1), b.max(p.1)));
        let root = SVGBackend::new(&path, (800, 600)).into_drawing_area();
        root.fill(&WHITE).map_err(|e| plot_err(&path, e))?;
        let mut chart = ChartBuilder::on(&root)
            .caption(format!("mass drift, fitted slope {:.3}", study.slope), ("sans-serif", 20))
            .margin(10)
            .x_label_area_size(35)
            .y_label_area_size(70)
            .build_cartesian_2d((hlo / 1.5..hhi * 1.5).log_scale(), (dlo / 2.0..dhi * 2.0).log_scale())
            .map_err(|e| plot_err(&path, e))?;
        chart
            .configure_mesh()
            .x_desc("h")
            .y_desc("E sup |mean drift|")
            .draw()
            .map_err(|e| plot_err(&path, e))?;
        chart
            .draw_series(LineSeries::new(pts.iter().copied(), &BLUE))
            .map_err(|e| plot_err(&path, e))?;
        chart
            .draw_series(pts.iter().map(|&p| Circle::new(p, 4, BLUE.filled())))
            .map_err(|e| plot_err(&path, e))?;
        root.present().map_err(|e| plot_err(&path, e))?;
    }
    Ok(vec![path])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::MassLevel;

    #[test]
    fn mass_plot_is_written() {
        let study = MassStudy {
            schema: 1,
            levels: [0.25, 0.125, 0.0625]
                .iter()
                .map(|&h| MassLevel {
                    h,
                    nodes: (1.0 / h) as usize,
                    drift: h * h,
                    stderr: 0.0,
                    fraction_stopped: 0.0,
                    excluded: 0,
                })
                .collect(),
            slope: 2.0,
        };
        let dir = tempfile::tempdir().unwrap();
        let files = emit_mass_plot(&study, dir.path()).unwrap();
        assert_eq!(files.len(), 1);
        let svg = std::fs::read_to_string(&files[0]).unwrap();
        assert!(svg.contains("slope 2.000"));
    }
}

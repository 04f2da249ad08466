use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use super::{Axis, SweepRow};
use crate::bianchi::OracleRow;
use crate::num::Real;

pub const CSV_HEADER: &str = "staNumber, PDR, PLR, aggThroughput, averageDelay";
pub const ORACLE_HEADER: &str = "n, tau, p, S_basic, S_rts";
/// Plot file names, in metric order.
pub const PLOT_FILES: [&str; 4] = ["pdr.dat", "plr.dat", "throughput.dat", "delay.dat"];

/// Comma-space separated rows. The axis column comes last when present;
/// `per_flow` appends the per-flow-sum readings.
pub fn write_csv<W: Write, T: Real>(
    mut w: W,
    rows: &[SweepRow<T>],
    axis: Option<Axis>,
    per_flow: bool,
) -> io::Result<()> {
    write!(w, "{CSV_HEADER}")?;
    if per_flow {
        write!(w, ", sumPDR, sumPLR, sumDelay")?;
    }
    if let Some(a) = axis {
        write!(w, ", {}", a.column())?;
    }
    writeln!(w)?;
    for r in rows {
        let m = &r.metrics;
        write!(
            w,
            "{}, {}, {}, {}, {}",
            r.stations, m.pdr, m.plr, m.agg_throughput_mbps, m.avg_delay_s
        )?;
        if per_flow {
            let p = &r.per_flow;
            write!(w, ", {}, {}, {}", p.pdr_sum, p.plr_sum, p.delay_sum_s)?;
        }
        if let (Some(_), Some(v)) = (axis, r.axis_value) {
            write!(w, ", {v}")?;
        }
        writeln!(w)?;
    }
    w.flush()
}

/// One whitespace-delimited file per metric in `dir`: station count in the
/// first column, then one column per axis value in sweep order.
pub fn write_plot_data<T: Real>(
    dir: &Path,
    rows: &[SweepRow<T>],
    axis: Option<Axis>,
) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut values: Vec<Option<u32>> = Vec::new();
    let mut stations: Vec<u32> = Vec::new();
    for r in rows {
        if !values.contains(&r.axis_value) {
            values.push(r.axis_value);
        }
        if !stations.contains(&r.stations) {
            stations.push(r.stations);
        }
    }
    let header = values
        .iter()
        .map(|v| match (axis, v) {
            (Some(a), Some(v)) => format!("{}={v}", a.column()),
            _ => "value".to_string(),
        })
        .collect::<Vec<_>>()
        .join(" ");
    let mut paths = Vec::new();
    for (k, name) in PLOT_FILES.iter().enumerate() {
        let path = dir.join(name);
        let mut out = io::BufWriter::new(fs::File::create(&path)?);
        writeln!(out, "# staNumber {header}")?;
        for &n in &stations {
            write!(out, "{n}")?;
            for v in &values {
                let cell = rows
                    .iter()
                    .find(|r| r.stations == n && r.axis_value == *v)
                    .map(|r| r.metrics.as_array()[k].to_string())
                    .unwrap_or_else(|| "NaN".into());
                write!(out, " {cell}")?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn write_oracle_csv<W: Write, T: Real>(mut w: W, rows: &[OracleRow<T>]) -> io::Result<()> {
    writeln!(w, "{ORACLE_HEADER}")?;
    for r in rows {
        writeln!(w, "{}, {}, {}, {}, {}", r.n, r.tau, r.p, r.s_basic, r.s_rts)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{MetricsReport, PerFlowReading};

    fn row(n: u32, v: Option<u32>, pdr: f64) -> SweepRow<f64> {
        SweepRow {
            stations: n,
            axis_value: v,
            metrics: MetricsReport {
                pdr,
                plr: 1.0 - pdr,
                agg_throughput_mbps: 2.5,
                avg_delay_s: 0.001,
            },
            per_flow: PerFlowReading::default(),
            collision_probability: 0.0,
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[row(1, None, 1.0)], None, false).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(
            s,
            "staNumber, PDR, PLR, aggThroughput, averageDelay\n1, 1, 0, 2.5, 0.001\n"
        );

        let mut buf = Vec::new();
        write_csv(&mut buf, &[row(2, Some(7), 0.5)], Some(Axis::CwMin), false).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("staNumber, PDR, PLR, aggThroughput, averageDelay, cwMin\n"));
        assert!(s.ends_with("2, 0.5, 0.5, 2.5, 0.001, 7\n"));
    }

    #[test]
    fn plot_files_have_one_column_per_axis_value() {
        let dir = tempfile::tempdir().unwrap();
        let rows: Vec<_> = [3, 7, 15, 31]
            .iter()
            .flat_map(|&v| [1, 2, 4].map(|n| row(n, Some(v), f64::from(v) / 100.0)))
            .collect();
        let paths = write_plot_data(dir.path(), &rows, Some(Axis::CwMin)).unwrap();
        assert_eq!(paths.len(), 4);
        let pdr = fs::read_to_string(&paths[0]).unwrap();
        let lines: Vec<&str> = pdr.lines().collect();
        assert_eq!(lines[0], "# staNumber cwMin=3 cwMin=7 cwMin=15 cwMin=31");
        assert_eq!(lines.len(), 1 + 3);
        assert_eq!(lines[1], "1 0.03 0.07 0.15 0.31");
    }

    #[test]
    fn oracle_csv_header() {
        let mut buf = Vec::new();
        let r = OracleRow {
            n: 1,
            tau: 0.5,
            p: 0.0,
            s_basic: 7.0,
            s_rts: 6.0,
        };
        write_oracle_csv(&mut buf, &[r]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n, tau, p, S_basic, S_rts\n1, 0.5, 0, 7, 6\n"
        );
    }
}

//! CSV files. Floats use Rust's shortest round-trip formatting, so a file
//! parses back to exactly the values that were written.

use std::path::Path;
use std::str::FromStr;

use super::SummaryStats;
use crate::error::{Error, Result};
use crate::optimizer::TracePoint;
use crate::solar::{CurvePoint, PowerCurve};

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub(crate) fn write_rows<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let found = r.headers().map_err(csv_err(path))?;
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header `{}`", header.join(",")),
        });
    }
    r.records()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err(path))
}

fn field<T: FromStr>(path: &Path, rec: &csv::StringRecord, i: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let line = rec.position().map_or(0, |p| p.line() as usize);
    let raw = rec.get(i).ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("missing column {}", i + 1),
    })?;
    raw.parse().map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("`{raw}`: {e}"),
    })
}

const CONVERGENCE_HEADER: [&str; 3] = ["iteration", "evaluations", "best_fitness"];
const SUMMARY_HEADER: [&str; 5] = ["function", "dim", "best", "mean", "std"];
const CURVE_HEADER: [&str; 4] = ["remaining_rows", "V_a_volts", "I_amperes", "P_watts"];

pub fn write_convergence_csv(trace: &[TracePoint], path: &Path) -> Result<()> {
    write_rows(
        path,
        &CONVERGENCE_HEADER,
        trace.iter().map(|t| {
            vec![
                t.iteration.to_string(),
                t.evaluations.to_string(),
                t.best_fitness.to_string(),
            ]
        }),
    )
}

pub fn read_convergence_csv(path: &Path) -> Result<Vec<TracePoint>> {
    read_rows(path, &CONVERGENCE_HEADER)?
        .iter()
        .map(|r| {
            Ok(TracePoint {
                iteration: field(path, r, 0)?,
                evaluations: field(path, r, 1)?,
                best_fitness: field(path, r, 2)?,
            })
        })
        .collect()
}

pub fn write_summary_csv(stats: &[SummaryStats], path: &Path) -> Result<()> {
    write_rows(
        path,
        &SUMMARY_HEADER,
        stats.iter().map(|s| {
            vec![
                s.function.clone(),
                s.dim.to_string(),
                s.best.to_string(),
                s.mean.to_string(),
                s.std.to_string(),
            ]
        }),
    )
}

pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryStats>> {
    read_rows(path, &SUMMARY_HEADER)?
        .iter()
        .map(|r| {
            Ok(SummaryStats {
                function: field(path, r, 0)?,
                dim: field(path, r, 1)?,
                best: field(path, r, 2)?,
                mean: field(path, r, 3)?,
                std: field(path, r, 4)?,
            })
        })
        .collect()
}

pub fn write_power_curve_csv(curve: &PowerCurve, path: &Path) -> Result<()> {
    write_rows(
        path,
        &CURVE_HEADER,
        curve.points.iter().map(|p| {
            vec![
                p.remaining_rows.to_string(),
                p.voltage.to_string(),
                p.current.to_string(),
                p.power.to_string(),
            ]
        }),
    )
}

pub fn read_power_curve_csv(path: &Path) -> Result<PowerCurve> {
    let points = read_rows(path, &CURVE_HEADER)?
        .iter()
        .map(|r| {
            Ok(CurvePoint {
                remaining_rows: field(path, r, 0)?,
                voltage: field(path, r, 1)?,
                current: field(path, r, 2)?,
                power: field(path, r, 3)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PowerCurve { points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solar::{baseline_tct, IrradianceMatrix, PvParams};

    #[test]
    fn empty_trace_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        write_convergence_csv(&[], &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "iteration,evaluations,best_fitness\n"
        );
        assert!(read_convergence_csv(&path).unwrap().is_empty());
    }

    #[test]
    fn round_trips_are_exact() {
        let dir = tempfile::tempdir().unwrap();
        let trace = vec![
            TracePoint {
                iteration: 0,
                evaluations: 40,
                best_fitness: -449.99999999999994,
            },
            TracePoint {
                iteration: 1,
                evaluations: 2040,
                best_fitness: 1.0 / 3.0,
            },
        ];
        let p = dir.path().join("c.csv");
        write_convergence_csv(&trace, &p).unwrap();
        assert_eq!(read_convergence_csv(&p).unwrap(), trace);

        let stats = vec![SummaryStats {
            function: "F9".into(),
            dim: 2,
            best: 0.0,
            mean: 0.1 + 0.2,
            std: std::f64::consts::PI * 1e-17,
        }];
        let p = dir.path().join("s.csv");
        write_summary_csv(&stats, &p).unwrap();
        assert_eq!(read_summary_csv(&p).unwrap(), stats);

        let (_, curve) = baseline_tct(&IrradianceMatrix::short_wide_shadow(), &PvParams::default());
        let p = dir.path().join("p.csv");
        write_power_curve_csv(&curve, &p).unwrap();
        let back = read_power_curve_csv(&p).unwrap();
        assert_eq!(back, curve);
        assert_eq!(back.points.len(), 9);
    }

    #[test]
    fn errors_carry_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope").join("c.csv");
        let err = write_convergence_csv(&[], &missing)
            .unwrap_err()
            .to_string();
        assert!(err.contains("nope"), "{err}");
        let wrong = dir.path().join("w.csv");
        std::fs::write(&wrong, "a,b\n1,2\n").unwrap();
        assert!(read_summary_csv(&wrong).is_err());
    }
}

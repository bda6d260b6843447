//! CSV interchange for field snapshots.
//!
//! Layout: one `#` comment line with grid metadata, a header row
//! `x,t=<t0>,t=<t1>,...`, then one row per space node. Numbers are written
//! with 17 significant digits.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::pde::grid::Field;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes every `stride`-th time level (the last level is always written).
pub fn write_field_csv<W: Write>(
    field: &Field,
    name: &str,
    stride: usize,
    mut out: W,
) -> Result<()> {
    let g = &field.grid;
    let stride = stride.max(1);
    let mut levels: Vec<usize> = (0..=g.nt).step_by(stride).collect();
    if *levels.last().expect("nt >= 1") != g.nt {
        levels.push(g.nt);
    }
    writeln!(
        out,
        "# field={name} nx={} nt={} dx={} dt={} ell={} horizon={} saved_levels={}",
        g.nx,
        g.nt,
        fmt_f64(g.dx),
        fmt_f64(g.dt),
        fmt_f64(g.ell),
        fmt_f64(g.horizon),
        levels.len()
    )?;
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = vec!["x".to_string()];
    header.extend(levels.iter().map(|&n| format!("t={}", fmt_f64(g.t(n)))));
    wtr.write_record(&header)?;
    for i in 0..g.nx {
        let mut row = vec![fmt_f64(g.x(i))];
        row.extend(levels.iter().map(|&n| fmt_f64(field.at(i, n))));
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn save_field_csv(field: &Field, name: &str, stride: usize, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_field_csv(field, name, stride, std::io::BufWriter::new(file))
}

/// A field snapshot read back from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    /// `values[i][k]`: node `i`, saved level `k`.
    pub values: Vec<Vec<f64>>,
}

pub fn read_field_csv<R: Read>(input: R) -> Result<Snapshot> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    let header = rdr.headers()?.clone();
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::InvalidParams(format!("bad number {s:?}: {e}")))
    };
    let ts = header
        .iter()
        .skip(1)
        .map(|h| {
            h.strip_prefix("t=")
                .ok_or_else(|| Error::InvalidParams(format!("bad column header {h:?}")))
                .and_then(parse)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let mut it = rec.iter();
        xs.push(parse(it.next().unwrap_or(""))?);
        values.push(it.map(parse).collect::<Result<Vec<_>>>()?);
    }
    Ok(Snapshot { xs, ts, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pde::grid::Grid;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn csv_round_trip_is_exact(seed in 0u64..1000, stride in 1usize..4) {
            let g = Grid::new(2.0, 1.0, 5, 6).unwrap();
            let f = Field::from_fn(g, |x, t| ((seed as f64 + 1.0) * x * t).sin() / 3.0 + 1e-300 * x);
            let mut buf = Vec::new();
            write_field_csv(&f, "probe", stride, &mut buf).unwrap();
            let snap = read_field_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(snap.xs.len(), 5);
            prop_assert_eq!(*snap.ts.last().unwrap(), 1.0);
            for (i, row) in snap.values.iter().enumerate() {
                for (k, v) in row.iter().enumerate() {
                    let n = (k * stride).min(6);
                    prop_assert_eq!(*v, f.at(i, n));
                }
            }
        }
    }

    #[test]
    fn header_carries_metadata() {
        let g = Grid::new(1.0, 1.0, 3, 2).unwrap();
        let mut buf = Vec::new();
        write_field_csv(&Field::zeros(g), "d", 1, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first = text.lines().next().unwrap();
        assert!(first.starts_with("# field=d nx=3 nt=2"));
        assert!(text
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("x,t=0.0000000000000000e0"));
    }
}

//! CSV/JSON serialization. Floats are written with 17 significant digits so they
//! re-parse to the identical `f64`; files are written atomically.

use crate::error::{Error, Result};
use crate::geometry::{ParticleConfig, PiecewiseDensity};
use crate::model::Interval;
use crate::stepper::Trajectory;
use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::Path;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let name = path.file_name().ok_or_else(|| Error::InvalidParameter(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    atomic_write(path, s.as_bytes())
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::InvalidParameter(format!("not a number: `{s}`")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::InvalidParameter(format!("not an index: `{s}`")))
}

fn read_records(path: &Path, expected: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::InvalidParameter(format!(
            "{}: expected columns {:?}, found {:?}",
            path.display(),
            expected,
            header.iter().collect::<Vec<_>>()
        )));
    }
    r.records().map(|rec| rec.map_err(Error::from)).collect()
}

pub const DENSITY_COLUMNS: [&str; 3] = ["x_left", "x_right", "u"];
pub const PARTICLE_COLUMNS: [&str; 2] = ["k", "x_k"];
pub const TRAJECTORY_COLUMNS: [&str; 5] = ["n", "t", "k", "x_k", "u_k"];
pub const ENERGY_COLUMNS: [&str; 6] = ["n", "t", "internal", "potential", "total", "W2_increment"];
pub const ERROR_COLUMNS: [&str; 2] = ["param", "error_L1"];

pub fn density_csv(d: &PiecewiseDensity) -> Result<Vec<u8>> {
    csv_bytes(
        &DENSITY_COLUMNS,
        d.breakpoints
            .windows(2)
            .zip(&d.values)
            .map(|(w, u)| vec![fmt_f64(w[0]), fmt_f64(w[1]), fmt_f64(*u)]),
    )
}

pub fn write_density_csv(path: &Path, d: &PiecewiseDensity) -> Result<()> {
    atomic_write(path, &density_csv(d)?)
}

pub fn read_density_csv(path: &Path) -> Result<PiecewiseDensity> {
    let recs = read_records(path, &DENSITY_COLUMNS)?;
    let mut breakpoints = Vec::with_capacity(recs.len() + 1);
    let mut values = Vec::with_capacity(recs.len());
    for (i, r) in recs.iter().enumerate() {
        let (l, rr, u) = (parse_f64(&r[0])?, parse_f64(&r[1])?, parse_f64(&r[2])?);
        if i == 0 {
            breakpoints.push(l);
        } else if breakpoints[i] != l {
            return Err(Error::InvalidParameter(format!("{}: cells are not contiguous at row {}", path.display(), i + 1)));
        }
        breakpoints.push(rr);
        values.push(u);
    }
    PiecewiseDensity::new(breakpoints, values)
}

/// Interior particles `k = 1..K−1`.
pub fn particles_csv(p: &ParticleConfig) -> Result<Vec<u8>> {
    csv_bytes(&PARTICLE_COLUMNS, p.interior().iter().enumerate().map(|(i, x)| vec![(i + 1).to_string(), fmt_f64(*x)]))
}

pub fn write_particles_csv(path: &Path, p: &ParticleConfig) -> Result<()> {
    atomic_write(path, &particles_csv(p)?)
}

/// Interior positions in file order; attach them to a grid with [`ParticleConfig::with_interior`].
pub fn read_particles_csv(path: &Path) -> Result<Vec<f64>> {
    let recs = read_records(path, &PARTICLE_COLUMNS)?;
    recs.iter()
        .enumerate()
        .map(|(i, r)| {
            if parse_usize(&r[0])? != i + 1 {
                return Err(Error::InvalidParameter(format!("{}: particle index out of order at row {}", path.display(), i + 1)));
            }
            parse_f64(&r[1])
        })
        .collect()
}

/// One row per frame and cell `k = 1..K`: the right cell boundary `x_k` and the
/// cell density `u_k` (`x₀ = a` is implicit).
pub fn trajectory_csv(traj: &Trajectory) -> Result<Vec<u8>> {
    let mut rows = Vec::with_capacity(traj.configs.len() * traj.grid.cells());
    for (n, x) in traj.configs.iter().enumerate() {
        let t = fmt_f64(traj.time(n));
        let d = x.density();
        for k in 1..=x.cells() {
            rows.push(vec![n.to_string(), t.clone(), k.to_string(), fmt_f64(x.node(k)), fmt_f64(d.values[k - 1])]);
        }
    }
    csv_bytes(&TRAJECTORY_COLUMNS, rows)
}

pub fn energy_csv(traj: &Trajectory) -> Result<Vec<u8>> {
    csv_bytes(
        &ENERGY_COLUMNS,
        traj.energies.iter().enumerate().map(|(n, e)| {
            let w2 = if n == 0 { 0.0 } else { traj.per_step[n - 1].wasserstein_increment };
            vec![
                n.to_string(),
                fmt_f64(traj.time(n)),
                fmt_f64(e.internal),
                fmt_f64(e.potential),
                fmt_f64(e.total),
                fmt_f64(w2),
            ]
        }),
    )
}

/// A frame read back from a trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredFrame {
    pub n: usize,
    pub t: f64,
    pub density: PiecewiseDensity,
}

/// Reads a trajectory CSV written by [`trajectory_csv`]; the domain supplies `x₀`.
pub fn read_trajectory_csv(path: &Path, domain: Interval) -> Result<Vec<StoredFrame>> {
    let recs = read_records(path, &TRAJECTORY_COLUMNS)?;
    let mut frames: Vec<StoredFrame> = Vec::new();
    let mut cur: Option<(usize, f64, Vec<f64>, Vec<f64>)> = None;
    let flush = |c: Option<(usize, f64, Vec<f64>, Vec<f64>)>, frames: &mut Vec<StoredFrame>| -> Result<()> {
        if let Some((n, t, b, v)) = c {
            frames.push(StoredFrame { n, t, density: PiecewiseDensity::new(b, v)? });
        }
        Ok(())
    };
    for r in &recs {
        let (n, t, x, u) = (parse_usize(&r[0])?, parse_f64(&r[1])?, parse_f64(&r[3])?, parse_f64(&r[4])?);
        if cur.as_ref().map(|c| c.0) != Some(n) {
            flush(cur.take(), &mut frames)?;
            cur = Some((n, t, vec![domain.a], Vec::new()));
        }
        let c = cur.as_mut().expect("frame initialised above");
        c.2.push(x);
        c.3.push(u);
    }
    flush(cur, &mut frames)?;
    if frames.is_empty() {
        return Err(Error::MissingReference(format!("{} contains no frames", path.display())));
    }
    Ok(frames)
}

pub fn errors_csv(rows: &[(f64, f64)]) -> Result<Vec<u8>> {
    csv_bytes(&ERROR_COLUMNS, rows.iter().map(|(p, e)| vec![fmt_f64(*p), fmt_f64(*e)]))
}

pub fn read_errors_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    read_records(path, &ERROR_COLUMNS)?
        .iter()
        .map(|r| Ok((parse_f64(&r[0])?, parse_f64(&r[1])?)))
        .collect()
}

/// Generic CSV with the given header and float rows.
pub fn table_csv(header: &[&str], rows: &[Vec<f64>]) -> Result<Vec<u8>> {
    csv_bytes(header, rows.iter().map(|r| r.iter().map(|v| fmt_f64(*v)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn density_round_trip() {
        let dir = tempdir();
        let d = PiecewiseDensity::new(vec![-1.0, -0.3, 1.0 / 7.0, 1.0], vec![0.1, 2.0 / 3.0, 0.9]).unwrap();
        let path = dir.join("d.csv");
        write_density_csv(&path, &d).unwrap();
        assert_eq!(read_density_csv(&path).unwrap(), d);
        let e = vec![(25.0, 0.013), (50.0, 1.0 / 3.0)];
        atomic_write(&dir.join("e.csv"), &errors_csv(&e).unwrap()).unwrap();
        assert_eq!(read_errors_csv(&dir.join("e.csv")).unwrap(), e);
        assert!(read_particles_csv(&path).is_err());
        fs::remove_dir_all(dir).unwrap();
    }

    fn tempdir() -> std::path::PathBuf {
        let d = std::env::temp_dir().join(format!("wgflow-io-{}-{:?}", std::process::id(), std::thread::current().id()));
        fs::create_dir_all(&d).unwrap();
        d
    }
}

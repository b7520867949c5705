//! CSV artifacts. Every file starts with a block of `#` comment lines
//! holding the tool version and the job parameters, followed by a header row
//! whose column names carry their units. Floats are written in shortest
//! round-trip form, so reading a file back reproduces the stored values
//! exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::io::config::RunConfig;
use crate::pulseshape::{SpectralPulse, TemporalPulse};
use crate::sweep::OccupationMap;

pub const MAP_COLUMNS: [&str; 4] = ["theta_rad", "<axis>", "emitter_index", "occupation"];
pub const SPECTRUM_COLUMNS: [&str; 3] = ["energy_meV", "re_amplitude_rad", "im_amplitude_rad"];
pub const ENVELOPE_COLUMNS: [&str; 3] = ["time_ps", "re_omega_rad_per_ps", "im_omega_rad_per_ps"];
pub const TRAJECTORY_COLUMNS: [&str; 4] = ["time_ps", "rho11", "re_rho01", "im_rho01"];

/// One row of an occupation-map file. `emitter` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapRow {
    pub theta: f64,
    pub value: f64,
    pub emitter: usize,
    pub occupation: f64,
}

/// A parsed CSV file: comment block (without the `# ` prefix), header and
/// numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub metadata: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn map_metadata(map: &OccupationMap) -> Vec<String> {
    let mut lines = vec![
        format!("multinarp {}", map.version),
        "occupation map; job parameters follow in config-file form".to_string(),
    ];
    let cfg = RunConfig::from_spec(map.spec.clone());
    lines.extend(cfg.to_config_string().lines().map(str::to_string));
    lines
}

/// Writes every cell of `map`, ordered by area, then axis value, then
/// emitter.
pub fn write_map_csv(map: &OccupationMap, path: &Path) -> Result<()> {
    let emitters: Vec<usize> = (0..map.n_emitters()).collect();
    write_map_rows(map, &emitters, path)
}

/// Writes the cells of a single (0-based) emitter.
pub fn write_emitter_csv(map: &OccupationMap, emitter: usize, path: &Path) -> Result<()> {
    if emitter >= map.n_emitters() {
        return Err(Error::param("emitter", "index out of range"));
    }
    write_map_rows(map, &[emitter], path)
}

fn write_map_rows(map: &OccupationMap, emitters: &[usize], path: &Path) -> Result<()> {
    let header = [
        MAP_COLUMNS[0],
        map.spec.axis.label(),
        MAP_COLUMNS[2],
        MAP_COLUMNS[3],
    ];
    let mut rows = Vec::with_capacity(map.values.len());
    for (a, &theta) in map.areas().iter().enumerate() {
        for (v, &value) in map.axis_values().iter().enumerate() {
            for &e in emitters {
                rows.push([
                    fmt_f64(theta),
                    fmt_f64(value),
                    (e + 1).to_string(),
                    fmt_f64(map.get(a, v, e)),
                ]);
            }
        }
    }
    write_table(path, &map_metadata(map), &header, rows)
}

/// Reads a full map written by [`write_map_csv`], including its job
/// parameters.
pub fn read_map_csv(path: &Path) -> Result<OccupationMap> {
    let table = read_table(path)?;
    let version = table
        .metadata
        .first()
        .and_then(|l| l.strip_prefix("multinarp "))
        .ok_or_else(|| Error::config("<metadata>", "missing version line"))?
        .to_string();
    let config_text: String = table
        .metadata
        .iter()
        .skip(2)
        .map(|l| format!("{l}\n"))
        .collect();
    let spec = RunConfig::parse(&config_text)?.spec;
    let rows = map_rows(&table)?;

    let (n_a, n_v, n_e) = (spec.areas.len(), spec.axis.values().len(), spec.n_emitters);
    if rows.len() != n_a * n_v * n_e {
        return Err(Error::config(
            "<rows>",
            format!("expected {} rows, found {}", n_a * n_v * n_e, rows.len()),
        ));
    }
    let mut values = vec![f64::NAN; rows.len()];
    for (i, row) in rows.iter().enumerate() {
        let (a, v, e) = (i / (n_v * n_e), (i / n_e) % n_v, i % n_e);
        if row.theta != spec.areas[a] || row.value != spec.axis.values()[v] || row.emitter != e + 1 {
            return Err(Error::config(
                "<rows>",
                format!("row {} does not match the grid in the metadata", i + 1),
            ));
        }
        values[i] = row.occupation;
    }
    Ok(OccupationMap {
        spec,
        values,
        version,
    })
}

/// Rows of any map file (full or single-emitter).
pub fn map_rows(table: &Table) -> Result<Vec<MapRow>> {
    if table.header.len() != 4 || table.header[0] != MAP_COLUMNS[0] || table.header[2] != MAP_COLUMNS[2] || table.header[3] != MAP_COLUMNS[3] {
        return Err(Error::config("<header>", format!("not a map file: {:?}", table.header)));
    }
    table
        .rows
        .iter()
        .map(|r| {
            let e = r[2];
            if !(e >= 1.0 && e.fract() == 0.0) {
                return Err(Error::config("<rows>", format!("bad emitter index {e}")));
            }
            Ok(MapRow {
                theta: r[0],
                value: r[1],
                emitter: e as usize,
                occupation: r[3],
            })
        })
        .collect()
}

pub fn write_spectrum_csv(pulse: &SpectralPulse, metadata: &[String], path: &Path) -> Result<()> {
    let rows = pulse
        .grid()
        .energies()
        .zip(pulse.amplitude())
        .map(|(e, s)| [fmt_f64(e), fmt_f64(s.re), fmt_f64(s.im)]);
    write_table(path, metadata, &SPECTRUM_COLUMNS, rows)
}

pub fn write_envelope_csv(pulse: &TemporalPulse, metadata: &[String], path: &Path) -> Result<()> {
    let rows = pulse
        .times()
        .zip(pulse.envelope())
        .map(|(t, z)| [fmt_f64(t), fmt_f64(z.re), fmt_f64(z.im)]);
    write_table(path, metadata, &ENVELOPE_COLUMNS, rows)
}

pub fn write_trajectory_csv(traj: &Trajectory, metadata: &[String], path: &Path) -> Result<()> {
    let rows = traj.times.iter().zip(&traj.states).map(|(t, s)| {
        [
            fmt_f64(*t),
            fmt_f64(s.occupation),
            fmt_f64(s.coherence.re),
            fmt_f64(s.coherence.im),
        ]
    });
    write_table(path, metadata, &TRAJECTORY_COLUMNS, rows)
}

/// Reads an envelope file back into samples.
pub fn read_envelope(table: &Table) -> Option<(Vec<f64>, Vec<Complex64>)> {
    let t = table.column(ENVELOPE_COLUMNS[0])?;
    let re = table.column(ENVELOPE_COLUMNS[1])?;
    let im = table.column(ENVELOPE_COLUMNS[2])?;
    Some((t, re.into_iter().zip(im).map(|(a, b)| Complex64::new(a, b)).collect()))
}

fn fmt_f64(x: f64) -> String {
    // `{:?}` is the shortest representation that parses back exactly.
    format!("{x:?}")
}

fn write_table<const N: usize>(
    path: &Path,
    metadata: &[String],
    header: &[&str; N],
    rows: impl IntoIterator<Item = [String; N]>,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for line in metadata {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table(path: &Path) -> Result<Table> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut metadata = Vec::new();
    let mut line = String::new();
    let mut body = String::new();
    loop {
        line.clear();
        if reader.read_line(&mut line)? == 0 {
            break;
        }
        match line.strip_prefix('#') {
            Some(rest) => {
                let rest = rest.strip_prefix(' ').unwrap_or(rest);
                metadata.push(rest.trim_end_matches(['\n', '\r']).to_string());
            }
            None => {
                body.push_str(&line);
                break;
            }
        }
    }
    std::io::Read::read_to_string(&mut reader, &mut body)?;

    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    Error::config(format!("<row {}>", i + 1), format!("not a number: {f:?}"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(Table {
        metadata,
        header,
        rows,
    })
}

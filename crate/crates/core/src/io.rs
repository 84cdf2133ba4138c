//! File formats: point-cloud and distance-matrix CSV, persistence-diagram
//! CSV/JSON, and PDB ingestion for protein point clouds.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metric::{DistanceMatrix, PointCloud};
use crate::persistence::{Bar, PersistenceDiagram};

/// Reads a point cloud: one point per row, comma-separated coordinates.
/// Lines starting with '#' are comments.
pub fn parse_points_csv(text: &str) -> Result<PointCloud> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("invalid coordinate {tok:?}"),
                })
            })
            .collect::<Result<_>>()?;
        points.push(coords);
    }
    PointCloud::new(points)
}

pub fn write_points_csv(cloud: &PointCloud) -> String {
    let mut out = String::new();
    for p in cloud.points() {
        let row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Reads an n x n distance matrix: n rows of n comma-separated values.
pub fn parse_distance_csv(text: &str) -> Result<DistanceMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    msg: format!("invalid distance {tok:?}"),
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let n = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::input(format!(
                "distance matrix row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
    }
    DistanceMatrix::from_entries(n, rows.into_iter().flatten().collect())
}

/// Diagram CSV: header `dim,birth,death`, one bar per row, infinite deaths
/// written as `inf`.
pub fn write_diagram_csv(dgm: &PersistenceDiagram) -> String {
    let mut out = String::from("dim,birth,death\n");
    for b in &dgm.bars {
        let death = if b.death.is_finite() {
            b.death.to_string()
        } else {
            "inf".to_string()
        };
        out.push_str(&format!("{},{},{}\n", b.dim, b.birth, death));
    }
    out
}

pub fn parse_diagram_csv(text: &str) -> Result<PersistenceDiagram> {
    let mut bars = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "dim,birth,death" {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: format!("expected dim,birth,death, got {line:?}"),
            });
        }
        let dim: usize = parts[0].parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: format!("invalid dimension {:?}", parts[0]),
        })?;
        let birth: f64 = parts[1].parse().map_err(|_| Error::Parse {
            line: lineno + 1,
            msg: format!("invalid birth {:?}", parts[1]),
        })?;
        let death: f64 = if parts[2] == "inf" {
            f64::INFINITY
        } else {
            parts[2].parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                msg: format!("invalid death {:?}", parts[2]),
            })?
        };
        bars.push(Bar::new(dim, birth, death));
    }
    Ok(PersistenceDiagram::new(bars))
}

/// One parsed heavy-atom record.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomRecord {
    pub serial: usize,
    pub element: String,
    pub chain: char,
    pub residue: String,
    pub coords: [f64; 3],
}

/// Extracts the heavy atoms of one chain from PDB fixed-column text.
///
/// Keeps `ATOM` records of the requested chain whose element is not hydrogen
/// or deuterium; all `HETATM` records (waters, ligands) are dropped. The
/// element comes from columns 77-78, falling back to the first alphabetic
/// character of the atom name (columns 13-16) when blank. Coordinates are
/// read from columns 31-54 and returned in file order.
pub fn parse_pdb_heavy_atoms(text: &str, chain: char) -> Result<Vec<AtomRecord>> {
    let mut atoms = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if !line.starts_with("ATOM") {
            continue;
        }
        let atom = parse_atom_line(line).map_err(|msg| Error::Parse {
            line: lineno + 1,
            msg,
        })?;
        if atom.chain != chain {
            continue;
        }
        if matches!(atom.element.as_str(), "H" | "D") {
            continue;
        }
        atoms.push(atom);
    }
    if atoms.is_empty() {
        return Err(Error::input(format!(
            "no heavy atoms found for chain {chain:?}"
        )));
    }
    Ok(atoms)
}

/// The heavy-atom point cloud of one chain, coordinates in Angstroms.
pub fn pdb_point_cloud(text: &str, chain: char) -> Result<PointCloud> {
    let atoms = parse_pdb_heavy_atoms(text, chain)?;
    PointCloud::new(atoms.iter().map(|a| a.coords.to_vec()).collect())
}

fn field(line: &str, start: usize, end: usize) -> &str {
    // one-based inclusive column range per the PDB format description
    let bytes = line.as_bytes();
    let lo = (start - 1).min(bytes.len());
    let hi = end.min(bytes.len());
    std::str::from_utf8(&bytes[lo..hi]).unwrap_or("").trim()
}

fn parse_atom_line(line: &str) -> std::result::Result<AtomRecord, String> {
    if line.len() < 54 {
        return Err(format!(
            "ATOM record too short ({} columns; coordinates need 54)",
            line.len()
        ));
    }
    let serial: usize = field(line, 7, 11)
        .parse()
        .map_err(|_| format!("invalid atom serial {:?}", field(line, 7, 11)))?;
    let coords = [
        parse_coord(line, 31, 38, "x")?,
        parse_coord(line, 39, 46, "y")?,
        parse_coord(line, 47, 54, "z")?,
    ];
    let chain = line.as_bytes().get(21).copied().unwrap_or(b' ') as char;
    let residue = field(line, 18, 20).to_string();

    let mut element = field(line, 77, 78).to_uppercase();
    if element.is_empty() {
        // atom-name fallback: first alphabetic character of columns 13-16
        element = field(line, 13, 16)
            .chars()
            .find(|c| c.is_ascii_alphabetic())
            .map(|c| c.to_ascii_uppercase().to_string())
            .unwrap_or_default();
    }
    if element.is_empty() {
        return Err("cannot determine element".to_string());
    }

    Ok(AtomRecord {
        serial,
        element,
        chain,
        residue,
        coords,
    })
}

fn parse_coord(
    line: &str,
    start: usize,
    end: usize,
    name: &str,
) -> std::result::Result<f64, String> {
    let tok = field(line, start, end);
    let v: f64 = tok
        .parse()
        .map_err(|_| format!("invalid {name} coordinate {tok:?}"))?;
    if !v.is_finite() {
        return Err(format!("non-finite {name} coordinate {tok:?}"));
    }
    Ok(v)
}

/// Environment variable overriding the PDB archive base URL.
pub const PDB_BASE_URL_ENV: &str = "TRIMPH_PDB_BASE_URL";
const PDB_BASE_URL_DEFAULT: &str = "https://files.rcsb.org/download";

/// Downloads a PDB-format structure file to `destination`.
///
/// The id must be a 4-character alphanumeric code (validated before any
/// network traffic). The payload must contain at least one ATOM record; the
/// file is written atomically, so a failed download leaves nothing behind.
pub fn fetch_structure(id: &str, destination: &Path) -> Result<()> {
    if id.len() != 4 || !id.chars().all(|c| c.is_ascii_alphanumeric()) {
        return Err(Error::input(format!(
            "malformed structure id {id:?}: expected 4 alphanumeric characters"
        )));
    }
    let base =
        std::env::var(PDB_BASE_URL_ENV).unwrap_or_else(|_| PDB_BASE_URL_DEFAULT.to_string());
    let url = format!("{}/{}.pdb", base.trim_end_matches('/'), id.to_uppercase());

    let body = ureq::get(&url)
        .call()
        .map_err(|e| Error::network(format!("GET {url} failed: {e}")))?
        .into_string()
        .map_err(|e| Error::network(format!("reading {url} failed: {e}")))?;

    if body.is_empty() || !body.lines().any(|l| l.starts_with("ATOM")) {
        return Err(Error::input(format!(
            "payload from {url} contains no ATOM records"
        )));
    }

    let dir = destination.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = tempfile_in(dir.unwrap_or(Path::new(".")))?;
    tmp.1.write_all(body.as_bytes())?;
    tmp.1.flush()?;
    drop(tmp.1);
    fs::rename(&tmp.0, destination)?;
    Ok(())
}

fn tempfile_in(dir: &Path) -> Result<(std::path::PathBuf, fs::File)> {
    let pid = std::process::id();
    for k in 0..1000 {
        let path = dir.join(format!(".trimph-download-{pid}-{k}.tmp"));
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(f) => return Ok((path, f)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(Error::input("could not create temporary download file"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_csv_round_trip() {
        let text = "# comment header\n0.5,1.25\n-3,4e-2\n";
        let cloud = parse_points_csv(text).unwrap();
        assert_eq!(cloud.len(), 2);
        assert_eq!(cloud.point(1), &[-3.0, 0.04]);
        let back = parse_points_csv(&write_points_csv(&cloud)).unwrap();
        assert_eq!(back, cloud);
    }

    #[test]
    fn points_csv_errors_carry_line_numbers() {
        let err = parse_points_csv("1,2\nx,3\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn distance_csv_parses_and_validates() {
        let d = parse_distance_csv("0,1\n1,0\n").unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.get(0, 1), 1.0);
        assert!(parse_distance_csv("0,1\n2,0\n").is_err());
        assert!(parse_distance_csv("0,1,2\n1,0,1\n").is_err());
    }

    #[test]
    fn diagram_csv_round_trip_with_inf() {
        let dgm = PersistenceDiagram::new(vec![
            Bar::new(0, 0.0, f64::INFINITY),
            Bar::new(1, 1.0, 2f64.sqrt()),
            Bar::new(0, 0.0, 1.0),
        ]);
        let csv = write_diagram_csv(&dgm);
        assert!(csv.starts_with("dim,birth,death\n"));
        assert!(csv.contains("0,0,inf\n"));
        let back = parse_diagram_csv(&csv).unwrap();
        assert_eq!(back, dgm);
    }

    const ATOM_N: &str =
        "ATOM      1  N   MET A   1      27.340  24.430   2.614  1.00  9.67           N  ";
    const ATOM_CA: &str =
        "ATOM      2  CA  MET A   1      26.266  25.413   2.842  1.00 10.38           C  ";
    const ATOM_C: &str =
        "ATOM      3  C   MET A   1      26.913  26.639   3.531  1.00  9.62           C  ";

    #[test]
    fn pdb_three_atom_backbone() {
        let text = format!("{ATOM_N}\n{ATOM_CA}\n{ATOM_C}\n");
        let atoms = parse_pdb_heavy_atoms(&text, 'A').unwrap();
        assert_eq!(atoms.len(), 3);
        assert_eq!(atoms[0].coords, [27.340, 24.430, 2.614]);
        assert_eq!(atoms[1].element, "C");
        assert_eq!(atoms[2].coords, [26.913, 26.639, 3.531]);
        assert_eq!(atoms[0].residue, "MET");
    }

    #[test]
    fn pdb_filters_hydrogens_hetatms_and_chains() {
        let h =
            "ATOM      4  H   MET A   1      27.000  24.000   2.000  1.00  9.67           H  ";
        let water =
            "HETATM  90  O   HOH A 201      30.000  30.000  30.000  1.00 20.00           O  ";
        let chain_b =
            "ATOM      5  CA  GLY B   2      20.000  20.000  20.000  1.00 10.00           C  ";
        let text = format!("{ATOM_N}\n{h}\n{water}\n{chain_b}\n");
        let atoms = parse_pdb_heavy_atoms(&text, 'A').unwrap();
        assert_eq!(atoms.len(), 1);
        assert_eq!(atoms[0].element, "N");
    }

    #[test]
    fn pdb_hetatm_only_is_empty_selection() {
        let water =
            "HETATM  90  O   HOH A 201      30.000  30.000  30.000  1.00 20.00           O  ";
        let err = parse_pdb_heavy_atoms(&format!("{water}\n"), 'A').unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn pdb_altloc_and_occupancy_do_not_shift_columns() {
        // altLoc 'B' in column 17 and occupancy 0.50; coordinates unaffected
        let alt =
            "ATOM     10  CA BSER A   5      11.111  22.222  33.333  0.50 11.00           C  ";
        let atoms = parse_pdb_heavy_atoms(&format!("{alt}\n"), 'A').unwrap();
        assert_eq!(atoms[0].coords, [11.111, 22.222, 33.333]);
    }

    #[test]
    fn pdb_element_falls_back_to_atom_name() {
        // element columns blank: derive from the atom-name field
        let no_element = "ATOM     11  CA  SER A   6      1.000   2.000   3.000  1.00 11.00";
        let atoms = parse_pdb_heavy_atoms(&format!("{no_element}\n"), 'A').unwrap();
        assert_eq!(atoms[0].element, "C");

        let hydrogen_by_name = "ATOM     12 1HB  SER A   6      1.000   2.000   3.000  1.00 11.00";
        let err = parse_pdb_heavy_atoms(&format!("{hydrogen_by_name}\n"), 'A');
        assert!(err.is_err(), "hydrogen-by-name should leave no atoms");
    }

    #[test]
    fn pdb_malformed_line_reports_line_number() {
        let short = "ATOM      1  N   MET A   1      27.340";
        let err = parse_pdb_heavy_atoms(&format!("{ATOM_N}\n{short}\n"), 'A').unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn fetch_rejects_malformed_id_before_network() {
        let err = fetch_structure("XY", Path::new("/tmp/never-written.pdb")).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
        let err = fetch_structure("7EK!", Path::new("/tmp/never-written.pdb")).unwrap_err();
        assert!(matches!(err, Error::Input(_)));
    }

    #[test]
    fn fetch_unreachable_host_leaves_no_file() {
        let dir = std::env::temp_dir().join(format!("trimph-fetch-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let dest = dir.join("out.pdb");
        std::env::set_var(PDB_BASE_URL_ENV, "https://nonexistent.invalid");
        let err = fetch_structure("1ABC", &dest).unwrap_err();
        std::env::remove_var(PDB_BASE_URL_ENV);
        assert!(matches!(err, Error::Network(_)));
        assert!(!dest.exists());
        let leftovers: Vec<_> = fs::read_dir(&dir).unwrap().collect();
        assert!(leftovers.is_empty(), "partial files left behind");
        fs::remove_dir_all(&dir).unwrap();
    }
}

//! Parsing of inline coefficient lists and CSV input files.

use std::fs;
use std::path::Path;

use kg_galerkin::spectral::grid_xi;
use kg_galerkin::GridFunction;

/// Malformed user input; maps to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct InputError(pub String);

pub type Result<T> = std::result::Result<T, InputError>;

fn bad(msg: impl Into<String>) -> InputError {
    InputError(msg.into())
}

/// Coefficient lists from `A=...` / `V=...` specs, each possibly `;`-joined.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Coefficients {
    pub positions: Option<Vec<f64>>,
    pub velocities: Option<Vec<f64>>,
}

fn parse_list(key: &str, body: &str) -> Result<Vec<f64>> {
    let values = body
        .split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad(format!("{key}: '{t}' is not a finite number")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(bad(format!("{key}: empty coefficient list")));
    }
    Ok(values)
}

pub fn parse_coefficients<S: AsRef<str>>(specs: &[S]) -> Result<Coefficients> {
    let mut c = Coefficients::default();
    for part in specs.iter().flat_map(|s| s.as_ref().split(';')) {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, body) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("expected 'A=...' or 'V=...', got '{part}'")))?;
        let slot = match key.trim() {
            "A" | "a" => &mut c.positions,
            "V" | "v" => &mut c.velocities,
            other => {
                return Err(bad(format!(
                    "unknown coefficient key '{other}', use A or V"
                )))
            }
        };
        if slot.is_some() {
            return Err(bad(format!("{} given twice", key.trim())));
        }
        *slot = Some(parse_list(key.trim(), body)?);
    }
    Ok(c)
}

/// Zero-pad `v` to `n` entries; longer inputs are an error.
pub fn pad(what: &str, mut v: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    if v.len() > n {
        return Err(bad(format!(
            "{what} has {} entries but only {n} modes are kept",
            v.len()
        )));
    }
    v.resize(n, 0.0);
    Ok(v)
}

/// Numeric rows of a CSV file. Lines starting with `#` and non-numeric rows
/// (a header) are skipped.
fn numeric_rows(path: &Path) -> Result<(Vec<Vec<f64>>, String)> {
    let text = fs::read_to_string(path)
        .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(format!("{}: {e}", path.display())))?;
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(r) if r.iter().all(|x| x.is_finite()) => rows.push(r),
            Ok(_) => {
                return Err(bad(format!(
                    "{}: non-finite value on row {}",
                    path.display(),
                    i + 1
                )))
            }
            Err(_) if rows.is_empty() => continue,
            Err(_) => {
                return Err(bad(format!(
                    "{}: non-numeric value on row {}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok((rows, text))
}

/// Two-column `(xi, value)` samples on the uniform grid `xi_j = j pi / G`.
pub fn read_field(path: &Path) -> Result<GridFunction> {
    let (rows, _) = numeric_rows(path)?;
    if rows.len() < 2 {
        return Err(bad(format!("{}: need at least 2 samples", path.display())));
    }
    let g = rows.len() - 1;
    let mut values = Vec::with_capacity(rows.len());
    for (j, r) in rows.iter().enumerate() {
        if r.len() != 2 {
            return Err(bad(format!(
                "{}: row {} needs 2 columns",
                path.display(),
                j + 1
            )));
        }
        let expected: f64 = grid_xi(j, g);
        if (r[0] - expected).abs() > 1e-9 {
            return Err(bad(format!(
                "{}: xi = {} on row {} but a uniform grid over [0, pi] needs {expected}",
                path.display(),
                r[0],
                j + 1
            )));
        }
        values.push(r[1]);
    }
    GridFunction::new(values).map_err(|e| bad(e.to_string()))
}

/// Coefficient state stored as rows `n, A[, V]` with `n = 1..N` in order,
/// plus an optional `# tau = ...` comment.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFile {
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
    pub tau: f64,
}

pub fn read_state(path: &Path) -> Result<StateFile> {
    let (rows, text) = numeric_rows(path)?;
    if rows.is_empty() {
        return Err(bad(format!("{}: no coefficient rows", path.display())));
    }
    let mut positions = Vec::new();
    let mut velocities = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if !(2..=3).contains(&r.len()) || r[0] != (i + 1) as f64 {
            return Err(bad(format!(
                "{}: row {} must be 'n, A[, V]' with n = {}",
                path.display(),
                i + 1,
                i + 1
            )));
        }
        positions.push(r[1]);
        velocities.push(r.get(2).copied().unwrap_or(0.0));
    }
    let tau = text
        .lines()
        .filter_map(|l| l.strip_prefix('#'))
        .filter_map(|l| l.split_once('='))
        .find(|(k, _)| k.trim() == "tau")
        .map(|(_, v)| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("{}: bad tau '{}'", path.display(), v.trim())))
        })
        .transpose()?
        .unwrap_or(0.0);
    Ok(StateFile {
        positions,
        velocities,
        tau,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn coefficient_specs() {
        let c = parse_coefficients(&["A=1,1,-1,1"]).unwrap();
        assert_eq!(c.positions, Some(vec![1.0, 1.0, -1.0, 1.0]));
        assert_eq!(c.velocities, None);
        let c = parse_coefficients(&["A=1; V=0, 2.5"]).unwrap();
        assert_eq!(c.velocities, Some(vec![0.0, 2.5]));
        let c = parse_coefficients(&["A=1", "V=3"]).unwrap();
        assert_eq!(c.velocities, Some(vec![3.0]));
    }

    #[test]
    fn malformed_specs() {
        for s in ["A=", "A=1,x", "B=1", "1,2", "A=1;A=2", "A=nan", "A=inf"] {
            assert!(parse_coefficients(&[s]).is_err(), "{s}");
        }
    }

    #[test]
    fn padding() {
        assert_eq!(pad("A", vec![1.0], 3).unwrap(), vec![1.0, 0.0, 0.0]);
        assert!(pad("A", vec![1.0; 4], 3).is_err());
    }

    #[test]
    fn field_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# sampled\nxi,value").unwrap();
        let g = 8;
        for j in 0..=g {
            let xi: f64 = grid_xi(j, g);
            writeln!(f, "{xi:.17e},{}", xi.sin()).unwrap();
        }
        let field = read_field(f.path()).unwrap();
        assert_eq!(field.points(), 9);
        assert!((field.values()[4] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn field_file_off_grid() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "0,0\n1,1\n3.14159,0").unwrap();
        assert!(read_field(f.path()).is_err());
    }

    #[test]
    fn state_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# tau = 1.5\nn,A,V\n1,0.5,0.1\n2,-0.25,0").unwrap();
        let s = read_state(f.path()).unwrap();
        assert_eq!(s.positions, vec![0.5, -0.25]);
        assert_eq!(s.velocities, vec![0.1, 0.0]);
        assert_eq!(s.tau, 1.5);

        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "1,0.5\n3,0.1").unwrap();
        assert!(read_state(f.path()).is_err());
    }
}

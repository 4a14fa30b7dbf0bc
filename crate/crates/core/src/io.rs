//! JSON state files and CSV tables.
//!
//! State file layout:
//!
//! ```json
//! {"kind": "pure",    "data": [[re, im], [re, im], [re, im], [re, im]]}
//! {"kind": "density", "data": [[re, im], ... 16 entries, row-major ...]}
//! ```
//!
//! Amplitudes follow the basis order `|00⟩, |01⟩, |10⟩, |11⟩` with qubit `a`
//! first. CSV tables carry a header row, use `,` and `\n`, and print every
//! number with six significant digits.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{CMatrix4, CVector4, LinalgError, C64};
use crate::states::{DensityMatrix, PureState, StateError};

#[derive(Debug, Error)]
pub enum StateFileError {
    #[error("cannot read state file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed state file: {0}")]
    Malformed(String),
    #[error("{kind} state needs {expected} complex entries, found {found}")]
    WrongLength {
        kind: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid state ({name}): {0}", name = .0.invariant())]
    Invalid(#[from] StateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Density,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFileRepr {
    kind: StateKind,
    data: Vec<[f64; 2]>,
}

/// A state as read from disk; pure files keep their state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoadedState {
    Pure(PureState),
    Density(DensityMatrix),
}

impl LoadedState {
    pub fn density(&self) -> DensityMatrix {
        match self {
            LoadedState::Pure(p) => p.to_density(),
            LoadedState::Density(rho) => *rho,
        }
    }

    pub fn kind(&self) -> StateKind {
        match self {
            LoadedState::Pure(_) => StateKind::Pure,
            LoadedState::Density(_) => StateKind::Density,
        }
    }
}

pub fn parse_state_json(text: &str) -> Result<LoadedState, StateFileError> {
    let repr: StateFileRepr =
        serde_json::from_str(text).map_err(|e| StateFileError::Malformed(e.to_string()))?;
    let entries: Vec<C64> = repr
        .data
        .iter()
        .map(|[re, im]| C64::new(*re, *im))
        .collect();
    match repr.kind {
        StateKind::Pure => {
            let v = CVector4::from_slice(&entries).map_err(|_| StateFileError::WrongLength {
                kind: "pure",
                expected: 4,
                found: entries.len(),
            })?;
            Ok(LoadedState::Pure(PureState::new(v)?))
        }
        StateKind::Density => {
            let m = CMatrix4::from_row_major(&entries).map_err(|e| match e {
                LinalgError::DimensionMismatch { found, .. } => StateFileError::WrongLength {
                    kind: "density",
                    expected: 16,
                    found,
                },
                _ => StateFileError::Invalid(StateError::NonFinite),
            })?;
            Ok(LoadedState::Density(DensityMatrix::new(m)?))
        }
    }
}

pub fn read_state_file(path: &Path) -> Result<LoadedState, StateFileError> {
    let mut text = String::new();
    fs::File::open(path)?.read_to_string(&mut text)?;
    parse_state_json(&text)
}

pub fn state_to_json(state: &LoadedState) -> String {
    let pairs = |zs: Vec<C64>| zs.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
    let repr = match state {
        LoadedState::Pure(p) => StateFileRepr {
            kind: StateKind::Pure,
            data: pairs(p.amplitudes().0.to_vec()),
        },
        LoadedState::Density(rho) => StateFileRepr {
            kind: StateKind::Density,
            data: pairs(rho.matrix().row_major()),
        },
    };
    serde_json::to_string(&repr).expect("plain numeric data serializes")
}

/// Six significant digits, `%g`-style switch to exponent form outside
/// `[1e-5, 1e6)`, trailing zeros kept so columns stay aligned.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..6).contains(&exp) {
        format!("{mantissa}e{exp}")
    } else {
        format!("{:.*}", (5 - exp) as usize, x)
    }
}

/// A cell of a CSV table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_sig6(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn parse(field: &str) -> Self {
        if field.is_empty() {
            Cell::Empty
        } else if let Ok(n) = field.parse::<i64>() {
            Cell::Int(n)
        } else if let Ok(x) = field.parse::<f64>() {
            Cell::Num(x)
        } else {
            Cell::Text(field.to_string())
        }
    }
}

/// Header plus rows, written and read as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    pub fn read_csv<R: Read>(input: R) -> csv::Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(input);
        let header = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in r.records() {
            rows.push(record?.iter().map(Cell::parse).collect());
        }
        Ok(Self { header, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::random_density;

    #[test]
    fn sig6_examples() {
        assert_eq!(format_sig6(2.0 * std::f64::consts::SQRT_2), "2.82843");
        assert_eq!(format_sig6(std::f64::consts::SQRT_2), "1.41421");
        assert_eq!(format_sig6(8.0 / 9.0), "0.888889");
        assert_eq!(format_sig6(0.0), "0.00000");
        assert_eq!(format_sig6(-0.0), "0.00000");
        assert_eq!(format_sig6(2.0), "2.00000");
        assert_eq!(format_sig6(9.999996), "10.0000");
        assert_eq!(format_sig6(3e-17), "3.00000e-17");
        assert_eq!(format_sig6(1234567.0), "1.23457e6");
        assert_eq!(format_sig6(-0.25), "-0.250000");
    }

    #[test]
    fn pure_file_round_trip() {
        let text = r#"{"kind": "pure", "data": [[0, 0], [0.6, 0], [0, 0.8], [0, 0]]}"#;
        let state = parse_state_json(text).unwrap();
        assert_eq!(state.kind(), StateKind::Pure);
        assert_eq!(parse_state_json(&state_to_json(&state)).unwrap(), state);
    }

    #[test]
    fn density_file_round_trip() {
        let state = LoadedState::Density(random_density(3));
        assert_eq!(parse_state_json(&state_to_json(&state)).unwrap(), state);
    }

    #[test]
    fn errors_name_the_failure() {
        let err = parse_state_json("{not json").unwrap_err();
        assert!(matches!(err, StateFileError::Malformed(_)));

        let err = parse_state_json(r#"{"kind": "pure", "data": [[1, 0]]}"#).unwrap_err();
        assert!(matches!(
            err,
            StateFileError::WrongLength {
                expected: 4,
                found: 1,
                ..
            }
        ));

        let err = parse_state_json(r#"{"kind": "pure", "data": [[1, 0], [1, 0], [0, 0], [0, 0]]}"#)
            .unwrap_err();
        assert!(err.to_string().contains("normalization"), "{err}");

        let mut data = vec!["[0, 0]"; 16];
        data[0] = "[2, 0]";
        let text = format!(r#"{{"kind": "density", "data": [{}]}}"#, data.join(","));
        let err = parse_state_json(&text).unwrap_err();
        assert!(err.to_string().contains("unit-trace"), "{err}");

        let err = parse_state_json(r#"{"kind": "mixed", "data": []}"#).unwrap_err();
        assert!(matches!(err, StateFileError::Malformed(_)));
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["lambda", "bound", "note"]);
        t.push(vec![
            Cell::Num(0.5),
            Cell::Num(std::f64::consts::SQRT_2),
            Cell::Empty,
        ]);
        t.push(vec![Cell::Num(1.0), Cell::Int(64), Cell::Text("x".into())]);
        assert_eq!(
            t.to_csv_string(),
            "lambda,bound,note\n0.500000,1.41421,\n1.00000,64,x\n"
        );
        let back = Table::read_csv(t.to_csv_string().as_bytes()).unwrap();
        assert_eq!(back.to_csv_string(), t.to_csv_string());
    }
}

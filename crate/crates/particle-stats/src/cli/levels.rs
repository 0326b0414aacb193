//! Level-file parsing. One level per line: the energy, then optional charge
//! columns; `#` starts a comment; blank lines are skipped. Errors carry the
//! 1-based line number.

use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LevelFile {
    pub energies: Vec<f64>,
    pub charges: Option<Vec<Vec<f64>>>,
}

pub(crate) fn parse_levels(text: &str) -> Result<LevelFile> {
    let mut energies = Vec::new();
    let mut charges: Vec<Vec<f64>> = Vec::new();
    let mut charge_dim: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let data = raw.split('#').next().unwrap_or("");
        let mut values = Vec::new();
        for token in data.split_whitespace() {
            let x: f64 = token.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("invalid number {token:?}"),
            })?;
            if !x.is_finite() {
                return Err(Error::Parse { line, msg: format!("non-finite value {token:?}") });
            }
            values.push(x);
        }
        if values.is_empty() {
            continue;
        }
        let dim = values.len() - 1;
        match charge_dim {
            None => charge_dim = Some(dim),
            Some(d) if d != dim => {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {d} charge column(s) after the energy, found {dim}"),
                })
            }
            _ => {}
        }
        energies.push(values[0]);
        charges.push(values[1..].to_vec());
    }
    if energies.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no levels found".into() });
    }
    let charges = if charge_dim == Some(0) { None } else { Some(charges) };
    Ok(LevelFile { energies, charges })
}

pub(crate) fn load_levels(path: &Path) -> Result<LevelFile> {
    let text = std::fs::read_to_string(path)?;
    parse_levels(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_energies() {
        let f = parse_levels("# a comment\n\n0.5\n 1.25 # trailing note\n2e0\n").unwrap();
        assert_eq!(f.energies, vec![0.5, 1.25, 2.0]);
        assert!(f.charges.is_none());
    }

    #[test]
    fn charge_columns() {
        let f = parse_levels("1.0  1 0\n2.0 -1 1\n").unwrap();
        assert_eq!(f.energies, vec![1.0, 2.0]);
        assert_eq!(f.charges, Some(vec![vec![1.0, 0.0], vec![-1.0, 1.0]]));
    }

    #[test]
    fn error_points_at_the_line() {
        let err = parse_levels("0.5\n1.0\nnope\n").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("nope"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn ragged_charges_rejected() {
        let err = parse_levels("1.0 1\n2.0\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_rejected() {
        assert!(parse_levels("# only comments\n").is_err());
    }

    #[test]
    fn non_finite_rejected() {
        assert!(matches!(parse_levels("inf\n"), Err(Error::Parse { line: 1, .. })));
    }
}

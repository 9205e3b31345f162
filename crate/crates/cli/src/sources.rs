//! Matrix and input vector sources given on the command line.

use std::path::Path;

use a2a_core::gf::{Fe, PrimeField};
use a2a_core::linalg::{dft_matrix, random_matrix, random_vector, vandermonde, vector_from_text};
use a2a_core::MatrixFq;

use crate::Failure;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn same_field(found: &PrimeField, field: &PrimeField, what: &str) -> Result<(), Failure> {
    if found != field {
        return Err(Failure::Usage(format!(
            "{what} is over F_{} but --q is {}",
            found.modulus(),
            field.modulus()
        )));
    }
    Ok(())
}

/// `random`, `identity`, `ones`, `dft`, `vandermonde`, or a matrix file
/// (optionally prefixed with `file:`).
pub fn matrix(
    spec: &str,
    field: &PrimeField,
    rows: usize,
    cols: usize,
    seed: u64,
) -> Result<MatrixFq, Failure> {
    let square = |name: &str| {
        if rows == cols {
            Ok(())
        } else {
            Err(Failure::Usage(format!("--matrix {name} needs a square matrix")))
        }
    };
    let m = match spec {
        "random" => random_matrix(field, rows, cols, seed),
        "identity" => MatrixFq::from_fn(field, rows, cols, |i, j| {
            if j % rows == i {
                field.one()
            } else {
                field.zero()
            }
        }),
        "ones" => MatrixFq::from_fn(field, rows, cols, |_, _| field.one()),
        "dft" => {
            square("dft")?;
            dft_matrix(field, rows).map_err(Failure::core)?
        }
        "vandermonde" => {
            square("vandermonde")?;
            let points: Vec<Fe> = (1..=rows as u64).map(|v| field.elem(v)).collect();
            vandermonde(field, &points).map_err(Failure::core)?
        }
        other => {
            let path = Path::new(other.strip_prefix("file:").unwrap_or(other));
            let m = MatrixFq::from_text(&read(path)?).map_err(Failure::core)?;
            same_field(m.field(), field, "matrix file")?;
            m
        }
    };
    if (m.rows(), m.cols()) != (rows, cols) {
        return Err(Failure::Usage(format!(
            "matrix is {}x{}, expected {rows}x{cols}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m)
}

/// `random`, a comma-separated list of residues, or a vector file.
pub fn input(spec: &str, field: &PrimeField, len: usize, seed: u64) -> Result<Vec<Fe>, Failure> {
    let x = if spec == "random" {
        random_vector(field, len, seed)
    } else if spec.split(',').all(|t| t.trim().parse::<u64>().is_ok()) {
        spec.split(',')
            .map(|t| {
                let v: u64 = t.trim().parse().expect("checked above");
                if v >= field.modulus() as u64 {
                    Err(Failure::Usage(format!("input value {v} is not a residue mod {}", field.modulus())))
                } else {
                    Ok(field.elem(v))
                }
            })
            .collect::<Result<Vec<_>, _>>()?
    } else {
        let path = Path::new(spec.strip_prefix("file:").unwrap_or(spec));
        let x = vector_from_text(&read(path)?).map_err(Failure::core)?;
        if let Some(first) = x.first() {
            if first.modulus() != field.modulus() {
                return Err(Failure::Usage(format!(
                    "input file is over F_{} but --q is {}",
                    first.modulus(),
                    field.modulus()
                )));
            }
        }
        x
    };
    if x.len() != len {
        return Err(Failure::Usage(format!("input has {} entries, expected {len}", x.len())));
    }
    Ok(x)
}

/// Seeds for the matrix and the input: the first `--seed` drives the
/// matrix, the second the input; a single value drives both.
pub fn seeds(given: &[u64]) -> Result<(u64, u64), Failure> {
    match given {
        [] => Ok((0, 0)),
        [s] => Ok((*s, *s)),
        [a, b] => Ok((*a, *b)),
        _ => Err(Failure::Usage("--seed may be given at most twice".into())),
    }
}

//! JSON wire format for channels.
//!
//! ```json
//! {
//!   "dims_in": [2, 2],
//!   "dims_out": [2, 2],
//!   "repr": "kraus" | "choi" | "transfer",
//!   "data": ...            // matrices as nested arrays of [re, im] pairs
//! }
//! ```
//!
//! `data` holds a list of matrices for `kraus` and a single matrix for
//! `choi`/`transfer`. Transfer matrices are interpreted in the product
//! Gell-Mann basis fixed by the factor lists.

use serde::{Deserialize, Serialize};

use super::{Channel, Dims, Repr};
use crate::error::{EaError, Result};
use crate::tensor_linalg::{Complex64, ComplexMatrix};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dims_in: Vec<usize>,
    pub dims_out: Vec<usize>,
    pub repr: String,
    pub data: serde_json::Value,
}

fn matrix_from_value(value: &serde_json::Value, field: &str) -> Result<ComplexMatrix> {
    let rows = value.as_array().ok_or_else(|| EaError::InvalidChannel {
        field: field.into(),
        reason: "expected an array of rows".into(),
    })?;
    if rows.is_empty() {
        return Err(EaError::InvalidChannel {
            field: field.into(),
            reason: "matrix has no rows".into(),
        });
    }
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let cells = row.as_array().ok_or_else(|| EaError::InvalidChannel {
            field: format!("{field}[{r}]"),
            reason: "expected an array of [re, im] pairs".into(),
        })?;
        let mut parsed = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let pair = cell.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                EaError::InvalidChannel {
                    field: format!("{field}[{r}][{c}]"),
                    reason: "expected [re, im]".into(),
                }
            })?;
            let re = pair[0].as_f64().ok_or_else(|| EaError::InvalidChannel {
                field: format!("{field}[{r}][{c}][0]"),
                reason: "not a number".into(),
            })?;
            let im = pair[1].as_f64().ok_or_else(|| EaError::InvalidChannel {
                field: format!("{field}[{r}][{c}][1]"),
                reason: "not a number".into(),
            })?;
            parsed.push(Complex64::new(re, im));
        }
        if parsed.len() != out.first().map_or(parsed.len(), Vec::len) {
            return Err(EaError::InvalidChannel {
                field: format!("{field}[{r}]"),
                reason: "ragged rows".into(),
            });
        }
        out.push(parsed);
    }
    Ok(ComplexMatrix::from_rows(&out))
}

fn matrix_to_value(m: &ComplexMatrix) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = (0..m.rows())
        .map(|r| {
            let cells: Vec<serde_json::Value> = (0..m.cols())
                .map(|c| serde_json::json!([m[(r, c)].re, m[(r, c)].im]))
                .collect();
            serde_json::Value::Array(cells)
        })
        .collect();
    serde_json::Value::Array(rows)
}

/// Parse and validate a channel from its JSON representation.
pub fn channel_from_json(text: &str) -> Result<Channel> {
    let raw: ChannelJson = serde_json::from_str(text).map_err(|e| EaError::InvalidChannel {
        field: "<document>".into(),
        reason: e.to_string(),
    })?;
    let dims_in = Dims::from_factors(&raw.dims_in).map_err(|e| EaError::InvalidChannel {
        field: "dims_in".into(),
        reason: e.to_string(),
    })?;
    let dims_out = Dims::from_factors(&raw.dims_out).map_err(|e| EaError::InvalidChannel {
        field: "dims_out".into(),
        reason: e.to_string(),
    })?;

    match raw.repr.as_str() {
        "kraus" => {
            let list = raw.data.as_array().ok_or_else(|| EaError::InvalidChannel {
                field: "data".into(),
                reason: "kraus repr expects a list of matrices".into(),
            })?;
            if list.is_empty() {
                return Err(EaError::InvalidChannel {
                    field: "data".into(),
                    reason: "kraus repr expects at least one matrix".into(),
                });
            }
            let mut kraus = Vec::with_capacity(list.len());
            for (i, item) in list.iter().enumerate() {
                kraus.push(matrix_from_value(item, &format!("data[{i}]"))?);
            }
            Channel::from_kraus(dims_in, dims_out, kraus)
        }
        "choi" => {
            let m = matrix_from_value(&raw.data, "data")?;
            let expect = dims_out.total() * dims_in.total();
            if !m.is_square() || m.rows() != expect {
                return Err(EaError::InvalidChannel {
                    field: "data".into(),
                    reason: format!(
                        "choi matrix is {}x{}, expected {expect}x{expect}",
                        m.rows(),
                        m.cols()
                    ),
                });
            }
            if m.hermiticity_deviation() > 1e-10 * m.max_abs().max(1.0) {
                return Err(EaError::InvalidChannel {
                    field: "data".into(),
                    reason: format!(
                        "choi matrix is not Hermitian (deviation {:.3e})",
                        m.hermiticity_deviation()
                    ),
                });
            }
            Channel::from_choi(dims_in, dims_out, m)
        }
        "transfer" => {
            let m = matrix_from_value(&raw.data, "data")?;
            Channel::from_transfer(dims_in, dims_out, m)
        }
        other => Err(EaError::InvalidChannel {
            field: "repr".into(),
            reason: format!("unknown representation `{other}`"),
        }),
    }
}

/// Serialize a channel through its primary representation.
pub fn channel_to_json(ch: &Channel) -> serde_json::Value {
    let (repr, data) = match ch.primary_repr() {
        Repr::Kraus(ks) => (
            "kraus",
            serde_json::Value::Array(ks.iter().map(matrix_to_value).collect()),
        ),
        Repr::Choi(c) => ("choi", matrix_to_value(c)),
        Repr::Transfer(_) | Repr::TransferDiag(_) => ("transfer", matrix_to_value(ch.transfer())),
    };
    serde_json::json!({
        "dims_in": ch.dims_in().factors(),
        "dims_out": ch.dims_out().factors(),
        "repr": repr,
        "data": data,
    })
}

//! Model files.
//!
//! JSON: `{"format": "dlglab-model", "version": 1, "hyperparams": {...},
//! "conv": [{"theta0": {"shape": [r, c], "data": [[re, im], ...]}, "theta1": ...}],
//! "linear": [{"weight": {"shape": [r, c], "data": [...]}, "bias": [...]}]}`,
//! row-major data.
//!
//! Binary: `b"DLGM"`, u32 LE version, u32 LE header length, the hyperparams
//! as JSON, then every parameter in [`DlgModel::to_flat`] order as f64 LE.

use std::path::Path;

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ConvLayer, DlgModel, Hyperparams, LinearLayer};

const FORMAT: &str = "dlglab-model";
const VERSION: u32 = 1;
const MAGIC: &[u8; 4] = b"DLGM";

#[derive(Debug, Error)]
pub enum ModelFormatError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad model file: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
struct ComplexTensor {
    shape: [usize; 2],
    data: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct RealTensor {
    shape: [usize; 2],
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ConvRecord {
    theta0: ComplexTensor,
    theta1: ComplexTensor,
}

#[derive(Serialize, Deserialize)]
struct LinearRecord {
    weight: RealTensor,
    bias: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    hyperparams: Hyperparams,
    conv: Vec<ConvRecord>,
    linear: Vec<LinearRecord>,
}

fn complex_tensor(m: &Array2<Complex64>) -> ComplexTensor {
    ComplexTensor { shape: [m.nrows(), m.ncols()], data: m.iter().map(|z| [z.re, z.im]).collect() }
}

fn complex_array(t: ComplexTensor, expected: (usize, usize)) -> Result<Array2<Complex64>, ModelFormatError> {
    let shape = (t.shape[0], t.shape[1]);
    if shape != expected {
        return Err(ModelFormatError::Invalid(format!("tensor shape {shape:?}, expected {expected:?}")));
    }
    let data = t.data.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
    Array2::from_shape_vec(shape, data).map_err(|e| ModelFormatError::Invalid(e.to_string()))
}

impl DlgModel {
    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format: FORMAT.into(),
            version: VERSION,
            hyperparams: self.hp.clone(),
            conv: self
                .conv
                .iter()
                .map(|l| ConvRecord { theta0: complex_tensor(&l.theta0), theta1: complex_tensor(&l.theta1) })
                .collect(),
            linear: self
                .linear
                .iter()
                .map(|l| LinearRecord {
                    weight: RealTensor {
                        shape: [l.weight.nrows(), l.weight.ncols()],
                        data: l.weight.iter().copied().collect(),
                    },
                    bias: l.bias.to_vec(),
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelFormatError> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.format != FORMAT || file.version != VERSION {
            return Err(ModelFormatError::Invalid(format!("unsupported format {} v{}", file.format, file.version)));
        }
        let template =
            DlgModel::zeros(file.hyperparams.clone()).map_err(|e| ModelFormatError::Invalid(e.to_string()))?;
        if file.conv.len() != template.conv.len() || file.linear.len() != template.linear.len() {
            return Err(ModelFormatError::Invalid("layer count does not match hyperparams".into()));
        }
        let conv = file
            .conv
            .into_iter()
            .zip(&template.conv)
            .map(|(rec, t)| {
                Ok(ConvLayer {
                    theta0: complex_array(rec.theta0, t.theta0.dim())?,
                    theta1: complex_array(rec.theta1, t.theta1.dim())?,
                })
            })
            .collect::<Result<_, ModelFormatError>>()?;
        let linear = file
            .linear
            .into_iter()
            .zip(&template.linear)
            .map(|(rec, t)| {
                let shape = (rec.weight.shape[0], rec.weight.shape[1]);
                if shape != t.weight.dim() || rec.bias.len() != t.bias.len() {
                    return Err(ModelFormatError::Invalid("linear layer shape mismatch".into()));
                }
                Ok(LinearLayer {
                    weight: Array2::from_shape_vec(shape, rec.weight.data)
                        .map_err(|e| ModelFormatError::Invalid(e.to_string()))?,
                    bias: Array1::from(rec.bias),
                })
            })
            .collect::<Result<_, ModelFormatError>>()?;
        Ok(DlgModel { hp: file.hyperparams, conv, linear })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = serde_json::to_vec(&self.hp).expect("hyperparams serialize");
        let flat = self.to_flat();
        let mut out = Vec::with_capacity(12 + header.len() + 8 * flat.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(&header);
        for x in flat {
            out.extend_from_slice(&x.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelFormatError> {
        let invalid = |msg: &str| ModelFormatError::Invalid(msg.to_string());
        if bytes.len() < 12 || &bytes[..4] != MAGIC {
            return Err(invalid("missing magic"));
        }
        let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap());
        if word(4) != VERSION {
            return Err(invalid("unsupported version"));
        }
        let header_len = word(8) as usize;
        let body = bytes.get(12..12 + header_len).ok_or_else(|| invalid("truncated header"))?;
        let hp: Hyperparams = serde_json::from_slice(body)?;
        let mut model = DlgModel::zeros(hp).map_err(|e| ModelFormatError::Invalid(e.to_string()))?;
        let rest = &bytes[12 + header_len..];
        if rest.len() != 8 * model.param_count() {
            return Err(invalid("parameter block has the wrong length"));
        }
        let flat: Vec<f64> = rest.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        model.set_flat(&flat);
        Ok(model)
    }

    /// Writes JSON when the path ends in `.json`, binary otherwise.
    pub fn save(&self, path: &Path) -> Result<(), ModelFormatError> {
        if path.extension().is_some_and(|e| e == "json") {
            std::fs::write(path, self.to_json())?;
        } else {
            std::fs::write(path, self.to_bytes())?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ModelFormatError> {
        let bytes = std::fs::read(path)?;
        if bytes.starts_with(MAGIC) {
            Self::from_bytes(&bytes)
        } else {
            Self::from_json(std::str::from_utf8(&bytes).map_err(|e| ModelFormatError::Invalid(e.to_string()))?)
        }
    }
}

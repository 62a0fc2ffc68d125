//! Versioned JSON instance files and seeded instance generation.
//!
//! ```json
//! {
//!   "version": "1",
//!   "cone": { "type": "wedge", "phi": 0.39269908169872414 },
//!   "norm": { "type": "l2" },
//!   "subspace": { "form": "span", "matrix": [[0.0], [1.0]] }
//! }
//! ```
//!
//! `span` matrices are `n × k` with `L` the column span; `kernel` matrices
//! are `m × n` with `L` the null space. Floats are written in the shortest
//! form that parses back to the same double, so emitting a parsed file
//! reproduces it byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cones::{Cone, ConeError};
use crate::linalg::{complement_basis, dot, norm2, orthonormalize, Matrix};
use crate::measures::{Form, MeasureError, ProblemInstance};
use crate::norms::{Lp, NormError, NormSpec};
use crate::renegar::{DataMap, RenegarError};
use crate::subspace::Subspace;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported instance version {0:?}")]
    UnsupportedVersion(String),
    #[error("unknown cone type {0:?}")]
    UnknownConeType(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid field `{field}`: {message}")]
    Invalid {
        field: &'static str,
        message: String,
    },
    #[error("cannot generate: {0}")]
    Unsatisfiable(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Renegar(#[from] RenegarError),
}

impl From<serde_json::Error> for InstanceError {
    fn from(e: serde_json::Error) -> Self {
        InstanceError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ConeFile {
    Orthant {
        dim: usize,
    },
    Wedge {
        phi: f64,
    },
    Soc {
        dim: usize,
    },
    /// `dim` is the matrix order.
    Psd {
        dim: usize,
    },
}

const CONE_TYPES: [&str; 4] = ["orthant", "wedge", "soc", "psd"];

impl ConeFile {
    pub fn to_cone(&self) -> Result<Cone, InstanceError> {
        let cone = match *self {
            ConeFile::Orthant { dim } => Cone::Orthant(dim),
            ConeFile::Wedge { phi } => Cone::Wedge(phi),
            ConeFile::Soc { dim } => Cone::SecondOrder(dim),
            ConeFile::Psd { dim } => Cone::Psd(dim),
        };
        cone.validate()?;
        Ok(cone)
    }

    pub fn from_cone(cone: &Cone) -> ConeFile {
        match *cone {
            Cone::Orthant(dim) => ConeFile::Orthant { dim },
            Cone::Wedge(phi) => ConeFile::Wedge { phi },
            Cone::SecondOrder(dim) => ConeFile::Soc { dim },
            Cone::Psd(dim) => ConeFile::Psd { dim },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerNorm {
    L1,
    L2,
    Linf,
}

impl From<InnerNorm> for Lp {
    fn from(p: InnerNorm) -> Lp {
        match p {
            InnerNorm::L1 => Lp::L1,
            InnerNorm::L2 => Lp::L2,
            InnerNorm::Linf => Lp::Linf,
        }
    }
}

/// `image` and `kernel` norms are accepted only as `second_norm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum NormFile {
    L1,
    L2,
    Linf,
    /// `‖·‖ₑ`; `e` defaults to the cone's canonical interior point.
    Induced {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        e: Option<Vec<f64>>,
    },
    /// `min{|w| : Aw = x}` on `Image(A)`.
    Image {
        matrix: Vec<Vec<f64>>,
        inner: InnerNorm,
    },
    /// `|Ax|` on `ker(A)⊥`.
    Kernel {
        matrix: Vec<Vec<f64>>,
        inner: InnerNorm,
    },
}

impl NormFile {
    pub fn to_norm(&self, cone: &Cone, field: &'static str) -> Result<NormSpec, InstanceError> {
        Ok(match self {
            NormFile::L1 => NormSpec::L1,
            NormFile::L2 => NormSpec::L2,
            NormFile::Linf => NormSpec::Linf,
            NormFile::Induced { e: None } => NormSpec::induced_canonical(*cone)?,
            NormFile::Induced { e: Some(e) } => NormSpec::induced(*cone, e.clone())?,
            NormFile::Image { matrix, inner } => {
                NormSpec::image(to_matrix(matrix, field)?, (*inner).into())?
            }
            NormFile::Kernel { matrix, inner } => {
                NormSpec::kernel(to_matrix(matrix, field)?, (*inner).into())?
            }
        })
    }

    fn is_restricted(&self) -> bool {
        matches!(self, NormFile::Image { .. } | NormFile::Kernel { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspaceForm {
    Span,
    Kernel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceFile {
    pub form: SubspaceForm,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataForm {
    Image,
    Kernel,
}

impl From<DataForm> for Form {
    fn from(f: DataForm) -> Form {
        match f {
            DataForm::Image => Form::Image,
            DataForm::Kernel => Form::Kernel,
        }
    }
}

/// Data map `A` for the distance computations. `norm` is `|·|` on `F`,
/// ℓ2 when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataFile {
    pub form: DataForm,
    pub matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub version: String,
    pub cone: ConeFile,
    pub norm: NormFile,
    pub subspace: SubspaceFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data_matrix: Option<DataFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub second_norm: Option<NormFile>,
}

fn to_matrix(rows: &[Vec<f64>], field: &'static str) -> Result<Matrix, InstanceError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(InstanceError::Invalid {
            field,
            message: "rows of different lengths".into(),
        });
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(InstanceError::Invalid {
            field,
            message: "non-finite entry".into(),
        });
    }
    Ok(Matrix::from_vec(rows.len(), cols, rows.concat()).expect("rectangular"))
}

impl InstanceFile {
    /// Parses and validates the text of an instance file.
    pub fn parse(text: &str) -> Result<InstanceFile, InstanceError> {
        // syntax and the discriminating fields first, for targeted errors
        let raw: serde_json::Value = serde_json::from_str(text)?;
        match raw.get("version") {
            Some(serde_json::Value::String(v)) if v == FORMAT_VERSION => {}
            Some(serde_json::Value::String(v)) => {
                return Err(InstanceError::UnsupportedVersion(v.clone()))
            }
            Some(v) => return Err(InstanceError::UnsupportedVersion(v.to_string())),
            None => {
                return Err(InstanceError::Invalid {
                    field: "version",
                    message: "missing".into(),
                })
            }
        }
        if let Some(t) = raw
            .get("cone")
            .and_then(|c| c.get("type"))
            .and_then(|t| t.as_str())
        {
            if !CONE_TYPES.contains(&t) {
                return Err(InstanceError::UnknownConeType(t.into()));
            }
        }
        let file: InstanceFile = serde_json::from_str(text)?;
        file.to_instance()?;
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<InstanceFile, InstanceError> {
        let text = fs::read_to_string(path).map_err(|source| InstanceError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        InstanceFile::parse(&text)
    }

    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance files serialize");
        s.push('\n');
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), InstanceError> {
        fs::write(path, self.emit()).map_err(|source| InstanceError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn to_instance(&self) -> Result<ProblemInstance, InstanceError> {
        let cone = self.cone.to_cone()?;
        let n = cone.ambient_dim();
        if self.norm.is_restricted() {
            return Err(InstanceError::Invalid {
                field: "norm",
                message: "image and kernel norms are only allowed as second_norm".into(),
            });
        }
        let norm = self.norm.to_norm(&cone, "norm")?;
        let m = to_matrix(&self.subspace.matrix, "subspace.matrix")?;
        let subspace = match self.subspace.form {
            SubspaceForm::Span if m.rows() == n => Subspace::from_span(&m),
            SubspaceForm::Kernel if m.cols() == n || (m.rows() == 0 && n > 0) => {
                if m.rows() == 0 {
                    Subspace::whole(n)
                } else {
                    Subspace::from_kernel(&m)
                }
            }
            _ => {
                return Err(InstanceError::DimensionMismatch(format!(
                    "{}×{} {} matrix for a cone in dimension {n}",
                    m.rows(),
                    m.cols(),
                    match self.subspace.form {
                        SubspaceForm::Span => "span",
                        SubspaceForm::Kernel => "kernel",
                    }
                )))
            }
        };
        let mut inst = ProblemInstance::new(cone, norm, subspace).map_err(dimension_error)?;
        if let Some(d) = &self.data_matrix {
            let a = to_matrix(&d.matrix, "data_matrix.matrix")?;
            inst = inst.with_data(a, d.form.into()).map_err(dimension_error)?;
        }
        if let Some(s) = &self.second_norm {
            inst = inst
                .with_second_norm(s.to_norm(&cone, "second_norm")?)
                .map_err(dimension_error)?;
        }
        Ok(inst)
    }

    /// The data map of the requested form: the explicit `data_matrix` if it
    /// has that form, otherwise the subspace matrix when its form matches.
    pub fn data_map(&self, form: Form) -> Result<DataMap, InstanceError> {
        let inst = self.to_instance()?;
        let (rows, f_norm) = match &self.data_matrix {
            Some(d) if Form::from(d.form) == form => (&d.matrix, d.norm.clone()),
            _ => match (self.subspace.form, form) {
                (SubspaceForm::Span, Form::Image) | (SubspaceForm::Kernel, Form::Kernel) => {
                    (&self.subspace.matrix, None)
                }
                _ => {
                    return Err(InstanceError::Invalid {
                        field: "data_matrix",
                        message: "no data matrix of the requested form".into(),
                    })
                }
            },
        };
        let a = to_matrix(rows, "data_matrix.matrix")?;
        let f_dim = match form {
            Form::Image => a.cols(),
            Form::Kernel => a.rows(),
        };
        let f_norm = match f_norm {
            None => NormSpec::L2,
            Some(NormFile::Induced { .. }) => {
                return Err(InstanceError::Invalid {
                    field: "data_matrix.norm",
                    message: "the norm on F must be l1, l2 or linf".into(),
                })
            }
            Some(nf) => nf.to_norm(&Cone::Orthant(f_dim.max(1)), "data_matrix.norm")?,
        };
        Ok(DataMap::new(a, f_norm, inst.norm.clone(), form)?)
    }
}

fn dimension_error(e: MeasureError) -> InstanceError {
    match e {
        MeasureError::DimensionMismatch(m) => InstanceError::DimensionMismatch(m),
        other => InstanceError::Measure(other),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeKind {
    Orthant,
    Wedge,
    Soc,
    Psd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Require {
    /// `L` meets the interior of `K`.
    Feasible,
    /// `L ∩ K = {0}`.
    Infeasible,
    Either,
}

/// Parameters for [`generate`].
#[derive(Debug, Clone, PartialEq)]
pub struct GenRequest {
    pub seed: u64,
    pub cone: ConeKind,
    /// Matrix order for the PSD cone; the wedge is always planar.
    pub dim: usize,
    pub subspace_dim: usize,
    pub require: Require,
    pub norm: NormFile,
    pub form: SubspaceForm,
}

impl GenRequest {
    pub fn new(
        seed: u64,
        cone: ConeKind,
        dim: usize,
        subspace_dim: usize,
        require: Require,
    ) -> GenRequest {
        GenRequest {
            seed,
            cone,
            dim,
            subspace_dim,
            require,
            norm: NormFile::L2,
            form: SubspaceForm::Span,
        }
    }

    pub fn norm(mut self, norm: NormFile) -> GenRequest {
        self.norm = norm;
        self
    }

    pub fn form(mut self, form: SubspaceForm) -> GenRequest {
        self.form = form;
        self
    }
}

/// Random instance with a `subspace_dim`-dimensional `L`.
///
/// A feasible `L` contains a random interior ray of `K`. An infeasible one
/// lies in `u⊥` for a random interior `u` of `K*`, so every nonzero
/// `x ∈ K` has `⟨u, x⟩ > 0` and misses `L`. In the kernel form the rows are
/// a random invertible mix of an orthonormal basis of `L⊥`, hence
/// surjective.
pub fn generate(req: &GenRequest) -> Result<InstanceFile, InstanceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);
    let (dim, k) = (req.dim, req.subspace_dim);
    let cone = match req.cone {
        ConeKind::Orthant => Cone::Orthant(dim),
        ConeKind::Soc => Cone::SecondOrder(dim),
        ConeKind::Psd => Cone::Psd(dim),
        ConeKind::Wedge => {
            if dim != 2 {
                return Err(InstanceError::Unsatisfiable(format!(
                    "wedges live in dimension 2, not {dim}"
                )));
            }
            Cone::Wedge(rng.gen_range(0.05..0.95) * std::f64::consts::FRAC_PI_2)
        }
    };
    cone.validate()?;
    let n = cone.ambient_dim();
    if k > n {
        return Err(InstanceError::Unsatisfiable(format!(
            "subspace dimension {k} exceeds {n}"
        )));
    }
    match req.require {
        Require::Feasible if k == 0 => {
            return Err(InstanceError::Unsatisfiable(
                "the zero subspace is never feasible".into(),
            ))
        }
        Require::Infeasible if k == n => {
            return Err(InstanceError::Unsatisfiable(
                "the whole space is always feasible".into(),
            ))
        }
        _ => {}
    }
    let mut cols: Vec<Vec<f64>> = (0..k).map(|_| gaussian(&mut rng, n)).collect();
    match req.require {
        Require::Feasible => cols[0] = interior_sample(&cone, &mut rng),
        Require::Infeasible => {
            let u = interior_sample(&cone.dual(), &mut rng);
            let uu = dot(&u, &u);
            for c in cols.iter_mut() {
                let t = dot(c, &u) / uu;
                c.iter_mut().zip(&u).for_each(|(x, ui)| *x -= t * ui);
            }
        }
        Require::Either => {}
    }
    let span = Matrix::from_cols(n, &cols);
    let matrix = match req.form {
        SubspaceForm::Span => span.to_rows(),
        SubspaceForm::Kernel => {
            let perp = complement_basis(&orthonormalize(&span));
            let m = perp.cols();
            let mix = Matrix::from_vec(m, m, gaussian(&mut rng, m * m)).expect("square");
            mix.matmul(&perp.transpose()).to_rows()
        }
    };
    let file = InstanceFile {
        version: FORMAT_VERSION.into(),
        cone: ConeFile::from_cone(&cone),
        norm: req.norm.clone(),
        subspace: SubspaceFile {
            form: req.form,
            matrix,
        },
        data_matrix: None,
        second_norm: None,
    };
    file.to_instance()?;
    Ok(file)
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// A cone sample pushed into the interior along the canonical point.
fn interior_sample(cone: &Cone, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let x = cone.sample(rng);
    let e = cone.canonical_e();
    let t = 0.1 * norm2(&x).max(1e-3) / norm2(&e);
    x.iter().zip(&e).map(|(a, b)| a + t * b).collect()
}

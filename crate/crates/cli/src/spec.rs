//! JSON model specification files.

use std::f64::consts::PI;
use std::path::Path;

use enttime::{
    build_bose_hubbard_boundary, build_jcm, AtomState, BoseHubbardBoundarySpec, ComplexMatrix, FieldState, JcmSpec,
    ProductHamiltonian, ProductState, C64,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Top-level document, tagged by `"model"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelSpecFile {
    Jcm(JcmFile),
    BoseHubbard(BoseHubbardFile),
    Custom(CustomFile),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JcmFile {
    /// Coupling as an angular rate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Coupling in Hz, multiplied by 2 pi.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_hz: Option<f64>,
    #[serde(default)]
    pub omega: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    pub atom: AtomSpec,
    pub field: FieldSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoseHubbardFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_hz: Option<f64>,
    #[serde(default)]
    pub u: f64,
    #[serde(default = "default_bh_cutoff")]
    pub n_max: usize,
    #[serde(default = "default_bh_initial")]
    pub initial: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomFile {
    pub dim_a: usize,
    pub dim_b: usize,
    pub terms: Vec<TermSpec>,
    pub psi_a: VectorSpec,
    pub psi_b: VectorSpec,
    /// Rate used for natural units. Defaults to 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
}

fn default_bh_cutoff() -> usize {
    2
}

fn default_bh_initial() -> [usize; 2] {
    [1, 1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum AtomSpec {
    Excited,
    Ground,
    Amplitudes { c_g: [f64; 2], c_e: [f64; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Fock(usize),
    /// `[re, im]` of the coherent amplitude.
    Coherent([f64; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub a: MatrixSpec,
    pub b: MatrixSpec,
}

/// Row-major real and imaginary parts. A missing `im` means zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorSpec {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<f64>>,
}

/// A spec ready to run, with every default filled in.
pub struct ResolvedModel {
    pub echo: ModelSpecFile,
    pub hamiltonian: ProductHamiltonian,
    pub state: ProductState,
    /// `lambda`, `J` or the custom rate.
    pub rate: f64,
}

pub fn load(path: &Path) -> Result<ModelSpecFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

/// Reads the `"model"` tag first so that schema errors inside the body keep
/// their field path.
pub fn parse(text: &str) -> Result<ModelSpecFile, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
    let serde_json::Value::Object(mut body) = value else {
        return Err(CliError::Schema("spec must be a JSON object".into()));
    };
    let model = match body.remove("model") {
        Some(serde_json::Value::String(m)) => m,
        Some(_) => return Err(CliError::Schema("at `model`: expected a string".into())),
        None => return Err(CliError::Schema("missing field `model`".into())),
    };
    let body = serde_json::Value::Object(body);
    match model.as_str() {
        "jcm" => body_as(body).map(ModelSpecFile::Jcm),
        "bose_hubbard" => body_as(body).map(ModelSpecFile::BoseHubbard),
        "custom" => body_as(body).map(ModelSpecFile::Custom),
        other => Err(CliError::Schema(format!(
            "at `model`: unknown model {other:?}, expected \"jcm\", \"bose_hubbard\" or \"custom\""
        ))),
    }
}

fn body_as<T: serde::de::DeserializeOwned>(body: serde_json::Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(body).map_err(|e| {
        let path = e.path().to_string();
        if path == "." || path == "?" {
            CliError::Schema(e.inner().to_string())
        } else {
            CliError::Schema(format!("at `{path}`: {}", e.inner()))
        }
    })
}

fn pick_rate(name: &str, angular: Option<f64>, hz: Option<f64>) -> Result<f64, CliError> {
    let rate = match (angular, hz) {
        (Some(x), None) => x,
        (None, Some(f)) => 2.0 * PI * f,
        (Some(_), Some(_)) => return Err(CliError::Schema(format!("give only one of `{name}` and `{name}_hz`"))),
        (None, None) => return Err(CliError::Schema(format!("missing `{name}` or `{name}_hz`"))),
    };
    if !rate.is_finite() {
        return Err(CliError::Schema(format!("`{name}` must be finite")));
    }
    Ok(rate)
}

fn pair(z: [f64; 2]) -> C64 {
    C64::new(z[0], z[1])
}

fn matrix(field: &str, m: &MatrixSpec, dim: usize) -> Result<ComplexMatrix, CliError> {
    let bad = |what: &str| CliError::Schema(format!("`{field}`: {what}"));
    if m.re.len() != dim || m.re.iter().any(|r| r.len() != dim) {
        return Err(bad(&format!("`re` must be {dim}x{dim}")));
    }
    if let Some(im) = &m.im {
        if im.len() != dim || im.iter().any(|r| r.len() != dim) {
            return Err(bad(&format!("`im` must be {dim}x{dim}")));
        }
    }
    let entry = |i: usize, j: usize| C64::new(m.re[i][j], m.im.as_ref().map_or(0.0, |im| im[i][j]));
    Ok(ComplexMatrix::from_fn(dim, dim, entry)?)
}

fn vector(field: &str, v: &VectorSpec, dim: usize) -> Result<Vec<C64>, CliError> {
    if v.re.len() != dim || v.im.as_ref().is_some_and(|im| im.len() != dim) {
        return Err(CliError::Schema(format!("`{field}` must have length {dim}")));
    }
    Ok((0..dim).map(|i| C64::new(v.re[i], v.im.as_ref().map_or(0.0, |im| im[i]))).collect())
}

impl ModelSpecFile {
    /// Builds the Hamiltonian and initial state. The echo carries angular rates
    /// and resolved cutoffs.
    pub fn resolve(&self) -> Result<ResolvedModel, CliError> {
        match self {
            Self::Jcm(JcmFile { lambda, lambda_hz, omega, n_max, atom, field }) => {
                let lambda = pick_rate("lambda", *lambda, *lambda_hz)?;
                let atom_state = match atom {
                    AtomSpec::Excited => AtomState::excited(),
                    AtomSpec::Ground => AtomState::ground(),
                    AtomSpec::Amplitudes { c_g, c_e } => AtomState::new(pair(*c_g), pair(*c_e))?,
                };
                let field_state = match field {
                    FieldSpec::Fock(n) => FieldState::Fock(*n),
                    FieldSpec::Coherent(nu) => FieldState::Coherent(pair(*nu)),
                };
                let mut spec = JcmSpec::new(lambda, atom_state, field_state).with_omega(*omega);
                if let Some(n) = n_max {
                    spec = spec.with_n_max(*n);
                }
                let (hamiltonian, state) = build_jcm(&spec)?;
                let echo = Self::Jcm(JcmFile {
                    lambda: Some(lambda),
                    lambda_hz: None,
                    omega: *omega,
                    n_max: Some(spec.resolved_n_max()),
                    atom: atom.clone(),
                    field: field.clone(),
                });
                Ok(ResolvedModel { echo, hamiltonian, state, rate: lambda })
            }
            Self::BoseHubbard(BoseHubbardFile { j, j_hz, u, n_max, initial }) => {
                let j = pick_rate("j", *j, *j_hz)?;
                let mut spec = BoseHubbardBoundarySpec::new(j).with_u(*u).with_cutoff(*n_max);
                spec.initial = (initial[0], initial[1]);
                let (hamiltonian, state) = build_bose_hubbard_boundary(&spec)?;
                let echo = Self::BoseHubbard(BoseHubbardFile {
                    j: Some(j),
                    j_hz: None,
                    u: *u,
                    n_max: *n_max,
                    initial: *initial,
                });
                Ok(ResolvedModel { echo, hamiltonian, state, rate: j })
            }
            Self::Custom(CustomFile { dim_a, dim_b, terms, psi_a, psi_b, rate }) => {
                if *dim_a == 0 || *dim_b == 0 {
                    return Err(CliError::Schema("`dim_a` and `dim_b` must be positive".into()));
                }
                let built = terms
                    .iter()
                    .enumerate()
                    .map(|(n, t)| {
                        Ok((
                            matrix(&format!("terms[{n}].a"), &t.a, *dim_a)?,
                            matrix(&format!("terms[{n}].b"), &t.b, *dim_b)?,
                        ))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                let hamiltonian = ProductHamiltonian::new(built)?;
                let state = ProductState::new(vector("psi_a", psi_a, *dim_a)?, vector("psi_b", psi_b, *dim_b)?)?;
                let rate = rate.unwrap_or(1.0);
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(CliError::Schema("`rate` must be positive".into()));
                }
                Ok(ResolvedModel { echo: self.clone(), hamiltonian, state, rate })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_jcm() {
        let s = parse(r#"{"model": "jcm", "lambda": 1.0, "atom": "excited", "field": {"fock": 3}}"#).unwrap();
        let r = s.resolve().unwrap();
        assert_eq!(r.rate, 1.0);
        assert_eq!(r.hamiltonian.dim_a(), 2);
        assert!(matches!(r.echo, ModelSpecFile::Jcm(JcmFile { n_max: Some(5), .. })));
    }

    #[test]
    fn hz_fields_scale_by_two_pi() {
        let s = parse(r#"{"model": "bose_hubbard", "j_hz": 66}"#).unwrap();
        let r = s.resolve().unwrap();
        assert!((r.rate - 2.0 * PI * 66.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_fields_are_rejected_with_a_path() {
        let err =
            parse(r#"{"model": "jcm", "lambda": 1, "atom": "excited", "field": {"fock": 3}, "extra": 1}"#).unwrap_err();
        assert!(matches!(err, CliError::Schema(_)));
        let err = parse(r#"{"model": "custom", "dim_a": 1, "dim_b": 1, "terms": [{"a": {"re": [[1]], "bogus": 0}, "b": {"re": [[1]]}}], "psi_a": {"re": [1]}, "psi_b": {"re": [1]}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("terms[0].a"), "{err}");
    }

    #[test]
    fn rate_ambiguity_is_a_schema_error() {
        let s = parse(r#"{"model": "bose_hubbard", "j": 1, "j_hz": 1}"#).unwrap();
        assert!(matches!(s.resolve(), Err(CliError::Schema(_))));
        let s = parse(r#"{"model": "bose_hubbard"}"#).unwrap();
        assert!(matches!(s.resolve(), Err(CliError::Schema(_))));
    }

    #[test]
    fn custom_model_checks_shapes_and_hermiticity() {
        let ok = r#"{"model": "custom", "dim_a": 2, "dim_b": 2,
            "terms": [{"a": {"re": [[0, 1], [1, 0]]}, "b": {"re": [[0, 1], [1, 0]]}}],
            "psi_a": {"re": [1, 0]}, "psi_b": {"re": [1, 0]}}"#;
        parse(ok).unwrap().resolve().unwrap();
        let bad_shape = ok.replace("[[0, 1], [1, 0]]}, \"b\"", "[[0, 1]]}, \"b\"");
        assert!(matches!(parse(&bad_shape).unwrap().resolve(), Err(CliError::Schema(_))));
        let not_herm = ok.replace("\"re\": [[0, 1], [1, 0]]}, \"b\"", "\"re\": [[0, 1], [0, 0]]}, \"b\"");
        assert!(matches!(parse(&not_herm).unwrap().resolve(), Err(CliError::Model(_))));
    }

    #[test]
    fn echo_round_trips() {
        let s = parse(r#"{"model": "jcm", "lambda_hz": 0.1, "atom": {"amplitudes": {"c_g": [0.6, 0], "c_e": [0, 0.8]}}, "field": {"coherent": [1.5, -0.25]}}"#).unwrap();
        let echo = s.resolve().unwrap().echo;
        let text = serde_json::to_string(&echo).unwrap();
        assert_eq!(parse(&text).unwrap(), echo);
    }
}

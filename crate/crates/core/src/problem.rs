//! JSON problem files.
//!
//! ```json
//! {
//!   "n": 2, "m": 1,
//!   "coefficients": [
//!     [[[-1, 0], [0, 0]], [[0, 0], [-2, 0]]],
//!     [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
//!   ],
//!   "weights": [1, 1],
//!   "mu": [1.2, 0],
//!   "gamma": { "gamma_max": 10, "grid": 200, "gamma_tol": 1e-10, "coalescence_tol": 1e-6 },
//!   "mode": "auto",
//!   "verify_tol": 1e-8
//! }
//! ```
//!
//! Complex entries are `[re, im]` pairs. Each coefficient is either a list
//! of `n` rows or a flat row-major list of `n²` entries; coefficients are
//! ordered `A_0, …, A_m`. Everything after `coefficients` is optional.
//! `reference_coefficients` (same layout) names the unperturbed polynomial
//! when the file is used for verification.

use num_complex::Complex64;
use serde_json::Value;

use crate::analysis::Mode;
use crate::error::{Error, Result};
use crate::matpoly::{MatrixPolynomial, WeightSet};
use crate::pencil::GammaOptions;
use crate::perturbation::VERIFY_TOL;
use crate::CMat;

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub polynomial: MatrixPolynomial,
    pub weights: WeightSet,
    pub mu: Option<Complex64>,
    pub gamma: GammaOptions,
    pub mode: Mode,
    pub verify_tol: f64,
    pub reference: Option<MatrixPolynomial>,
}

impl ProblemSpec {
    pub fn require_mu(&self) -> Result<Complex64> {
        self.mu
            .ok_or_else(|| Error::input("mu", "missing field `mu`"))
    }
}

fn number(v: &Value, field: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::input(field, format!("expected a number, found {v}")))
}

fn usize_field(v: &Value, field: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::input(field, format!("expected a nonnegative integer, found {v}")))
}

pub fn parse_complex(v: &Value, field: &str) -> Result<Complex64> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(Complex64::new(number(re, field)?, number(im, field)?)),
        _ => Err(Error::input(
            field,
            format!("expected a [re, im] pair, found {v}"),
        )),
    }
}

/// `"re,im"` or a bare real number.
pub fn parse_complex_str(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse = |x: &str| {
        x.parse::<f64>()
            .map_err(|e| Error::input("mu", format!("cannot parse `{s}`: {e}")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse(re)?, parse(im)?)),
        _ => Err(Error::input("mu", format!("expected `re,im`, found `{s}`"))),
    }
}

fn parse_matrix(v: &Value, n: usize, field: &str) -> Result<CMat> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::input(field, "expected a list of rows or a flat list of entries"))?;
    let flat = items
        .first()
        .and_then(|x| x.as_array())
        .and_then(|x| x.first())
        .is_some_and(Value::is_number);
    let mut m = CMat::zeros(n, n);
    if flat {
        if items.len() != n * n {
            return Err(Error::input(
                field,
                format!("expected {} entries, found {}", n * n, items.len()),
            ));
        }
        for (k, z) in items.iter().enumerate() {
            m[(k / n, k % n)] = parse_complex(z, &format!("{field}[{k}]"))?;
        }
    } else {
        if items.len() != n {
            return Err(Error::input(
                field,
                format!("expected {n} rows, found {}", items.len()),
            ));
        }
        for (i, row) in items.iter().enumerate() {
            let rf = format!("{field}[{i}]");
            let row = row
                .as_array()
                .ok_or_else(|| Error::input(&rf, "expected a row"))?;
            if row.len() != n {
                return Err(Error::input(
                    &rf,
                    format!("expected {n} entries, found {}", row.len()),
                ));
            }
            for (j, z) in row.iter().enumerate() {
                m[(i, j)] = parse_complex(z, &format!("{rf}[{j}]"))?;
            }
        }
    }
    Ok(m)
}

fn parse_coefficients(v: &Value, n: usize, m: usize, field: &str) -> Result<MatrixPolynomial> {
    let list = v
        .as_array()
        .ok_or_else(|| Error::input(field, "expected a list of coefficients"))?;
    if list.len() != m + 1 {
        return Err(Error::input(
            field,
            format!(
                "expected m + 1 = {} coefficients, found {}",
                m + 1,
                list.len()
            ),
        ));
    }
    let coeffs = list
        .iter()
        .enumerate()
        .map(|(j, a)| parse_matrix(a, n, &format!("{field}[{j}]")))
        .collect::<Result<Vec<_>>>()?;
    MatrixPolynomial::new(coeffs).map_err(|e| match e {
        Error::Input { .. } => e,
        other => Error::input(field, other.to_string()),
    })
}

fn parse_gamma(v: &Value) -> Result<GammaOptions> {
    let mut opts = GammaOptions::default();
    let obj = v
        .as_object()
        .ok_or_else(|| Error::input("gamma", "expected an object"))?;
    for (key, val) in obj {
        let field = format!("gamma.{key}");
        match key.as_str() {
            "gamma_max" => opts.gamma_max = number(val, &field)?,
            "grid" => opts.grid = usize_field(val, &field)?,
            "gamma_tol" => opts.gamma_tol = number(val, &field)?,
            "coalescence_tol" => opts.coalescence_tol = number(val, &field)?,
            _ => return Err(Error::input(field, "unknown option")),
        }
    }
    if !(opts.gamma_max > 0.0) {
        return Err(Error::input("gamma.gamma_max", "must be positive"));
    }
    if opts.grid < 2 {
        return Err(Error::input("gamma.grid", "must be at least 2"));
    }
    if !(opts.gamma_tol > 0.0) {
        return Err(Error::input("gamma.gamma_tol", "must be positive"));
    }
    if !(opts.coalescence_tol > 0.0) {
        return Err(Error::input("gamma.coalescence_tol", "must be positive"));
    }
    Ok(opts)
}

pub fn parse_problem_value(root: &Value) -> Result<ProblemSpec> {
    let obj = root
        .as_object()
        .ok_or_else(|| Error::input("<root>", "expected a JSON object"))?;
    let field = |k: &str| {
        obj.get(k)
            .ok_or_else(|| Error::input(k, format!("missing field `{k}`")))
    };

    let n = usize_field(field("n")?, "n")?;
    if n == 0 {
        return Err(Error::input("n", "must be positive"));
    }
    let m = usize_field(field("m")?, "m")?;
    if m == 0 {
        return Err(Error::input("m", "must be positive"));
    }
    let polynomial = parse_coefficients(field("coefficients")?, n, m, "coefficients")?;

    let weights = match obj.get("weights") {
        None | Some(Value::Null) => WeightSet::uniform(m),
        Some(v) => {
            let list = v
                .as_array()
                .ok_or_else(|| Error::input("weights", "expected a list"))?;
            let ws = list
                .iter()
                .enumerate()
                .map(|(j, x)| number(x, &format!("weights[{j}]")))
                .collect::<Result<Vec<_>>>()?;
            let w = WeightSet::new(ws).map_err(|e| Error::input("weights", e.to_string()))?;
            w.check_compatible(&polynomial)
                .map_err(|e| Error::input("weights", e.to_string()))?;
            w
        }
    };

    let mu = match obj.get("mu") {
        None | Some(Value::Null) => None,
        Some(v) => Some(parse_complex(v, "mu")?),
    };
    let gamma = match obj.get("gamma") {
        None | Some(Value::Null) => GammaOptions::default(),
        Some(v) => parse_gamma(v)?,
    };
    let mode = match obj.get("mode") {
        None | Some(Value::Null) => Mode::Auto,
        Some(v) => {
            let s = v
                .as_str()
                .ok_or_else(|| Error::input("mode", "expected a string"))?;
            s.parse().map_err(|e: String| Error::input("mode", e))?
        }
    };
    let verify_tol = match obj.get("verify_tol") {
        None | Some(Value::Null) => VERIFY_TOL,
        Some(v) => {
            let t = number(v, "verify_tol")?;
            if !(t > 0.0) {
                return Err(Error::input("verify_tol", "must be positive"));
            }
            t
        }
    };
    let reference = match obj.get("reference_coefficients") {
        None | Some(Value::Null) => None,
        Some(v) => Some(parse_coefficients(v, n, m, "reference_coefficients")?),
    };

    Ok(ProblemSpec {
        polynomial,
        weights,
        mu,
        gamma,
        mode,
        verify_tol,
        reference,
    })
}

pub fn parse_problem(text: &str) -> Result<ProblemSpec> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| Error::input("<root>", format!("invalid JSON: {e}")))?;
    parse_problem_value(&root)
}

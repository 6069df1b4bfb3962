//! Curve specifications: a JSON file or --a/--b coefficient lists.

use std::path::Path;

use primel_core::elliptic::EllipticCurve;
use serde::{Deserialize, Serialize};

use crate::config::{parse_coeffs, CurveArgs};
use crate::error::{CliError, CliResult};

/// `y² = x³ + A(t)x + B(t)` over `F_q`, coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub q: u32,
    #[serde(rename = "A")]
    pub a: Vec<i64>,
    #[serde(rename = "B")]
    pub b: Vec<i64>,
}

impl CurveSpec {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("curve file {}: {e}", path.display())))
    }

    pub fn build(&self) -> CliResult<EllipticCurve> {
        Ok(EllipticCurve::from_coeffs(self.q, &self.a, &self.b)?)
    }

    /// From the command line; `q` is the global --q, which must agree with
    /// the file when both are given.
    pub fn from_args(args: &CurveArgs, q: Option<u32>) -> CliResult<Self> {
        match (&args.curve, &args.a, &args.b) {
            (Some(path), None, None) => {
                let spec = Self::load(path)?;
                if let Some(q) = q.filter(|&q| q != spec.q) {
                    return Err(CliError::Config(format!(
                        "--q {q} disagrees with q = {} in {}",
                        spec.q,
                        path.display()
                    )));
                }
                Ok(spec)
            }
            (None, Some(a), Some(b)) => Ok(Self {
                name: None,
                q: q.ok_or_else(|| CliError::Config("--q is required with --a/--b".into()))?,
                a: parse_coeffs(a)?,
                b: parse_coeffs(b)?,
            }),
            _ => Err(CliError::Config(
                "give either --curve FILE or both --a and --b".into(),
            )),
        }
    }
}

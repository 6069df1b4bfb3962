//! JSON-lines cache of L-polynomials.
//!
//! The first line is a header carrying the schema version, the record kind,
//! the character orientation, the record count and the SHA-256 of every byte
//! after the header line. Each further line is one conductor. Files are
//! rewritten whole through a temporary file and a rename, so a reader never
//! sees a half-written cache.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use primel_core::dirichlet::LPolynomial;
use primel_core::elliptic::{EllipticCurve, TwistRecord};
use primel_core::quad::QuadTriple;
use primel_core::{FieldSpec, Orientation, Poly, PrimePoly, QuadValue};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const SCHEMA: &str = "primel-cache";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub schema: String,
    pub v: u32,
    pub kind: String,
    pub orientation: Orientation,
    pub records: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletLine {
    pub v: u32,
    pub q: u32,
    #[serde(rename = "P")]
    pub p: Vec<u32>,
    pub g: usize,
    pub c: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistLine {
    pub v: u32,
    pub q: u32,
    #[serde(rename = "A")]
    pub a: Vec<u32>,
    #[serde(rename = "B")]
    pub b: Vec<u32>,
    #[serde(rename = "P")]
    pub p: Vec<u32>,
    pub eps: i8,
    pub rank: usize,
    /// Normalised coefficients `b_n` as `(a, b, e)` triples.
    #[serde(rename = "L")]
    pub l: Vec<QuadTriple>,
    /// Whether the direct sums fixed the sign.
    pub window: bool,
    /// Highest degree summed directly.
    pub h: usize,
    /// Functional-equation pairs checked on direct sums.
    pub pairs: usize,
}

fn checksum(body: &[u8]) -> String {
    hex::encode(Sha256::digest(body))
}

/// Reads a cache file. `Ok(None)` when the file does not exist.
pub fn read<T: DeserializeOwned + Send>(
    path: &Path,
    kind: &str,
    orientation: Orientation,
) -> CliResult<Option<Vec<T>>> {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(CliError::io(path, e)),
    };
    let split = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| CliError::cache(path, "missing header line"))?;
    let (head, body) = (&bytes[..split], &bytes[split + 1..]);
    let header: Header = serde_json::from_slice(head)
        .map_err(|e| CliError::cache(path, format!("unreadable header: {e}")))?;
    if header.schema != SCHEMA {
        return Err(CliError::cache(
            path,
            format!("unknown schema '{}'", header.schema),
        ));
    }
    if header.v != SCHEMA_VERSION {
        return Err(CliError::cache(
            path,
            format!(
                "schema version {} is not supported (this build reads version {SCHEMA_VERSION}); \
                 delete the file or rerun with --no-cache to rebuild it",
                header.v
            ),
        ));
    }
    if header.kind != kind {
        return Err(CliError::cache(
            path,
            format!("holds '{}' records, expected '{kind}'", header.kind),
        ));
    }
    if header.orientation != orientation {
        return Err(CliError::cache(
            path,
            format!(
                "written with the {} orientation, requested {orientation}",
                header.orientation
            ),
        ));
    }
    if checksum(body) != header.sha256 {
        return Err(CliError::cache(
            path,
            "checksum mismatch; the file is corrupted",
        ));
    }
    let text = std::str::from_utf8(body).map_err(|_| CliError::cache(path, "not utf-8"))?;
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() != header.records {
        return Err(CliError::cache(
            path,
            format!(
                "header announces {} records, found {}",
                header.records,
                lines.len()
            ),
        ));
    }
    let records = lines
        .par_iter()
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| CliError::cache(path, format!("record {}: {e}", i + 1)))
        })
        .collect::<CliResult<Vec<T>>>()?;
    Ok(Some(records))
}

/// Writes a cache file atomically.
pub fn write<T: Serialize>(
    path: &Path,
    kind: &str,
    orientation: Orientation,
    records: &[T],
) -> CliResult<()> {
    let mut body = String::new();
    for r in records {
        let line = serde_json::to_string(r)
            .map_err(|e| CliError::cache(path, format!("serializing a record: {e}")))?;
        body.push_str(&line);
        body.push('\n');
    }
    let header = Header {
        schema: SCHEMA.into(),
        v: SCHEMA_VERSION,
        kind: kind.into(),
        orientation,
        records: records.len(),
        sha256: checksum(body.as_bytes()),
    };
    let mut text = serde_json::to_string(&header).expect("header serializes");
    text.push('\n');
    text.push_str(&body);
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let tmp = path.with_extension("jsonl.tmp");
    std::fs::write(&tmp, text).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn dirichlet_path(dir: &Path, q: u32, g: usize, orientation: Orientation) -> PathBuf {
    dir.join(format!("dirichlet-q{q}-g{g}-{orientation}.jsonl"))
}

pub fn twist_path(
    dir: &Path,
    curve: &EllipticCurve,
    d: usize,
    orientation: Orientation,
) -> PathBuf {
    let join = |p: &Poly| {
        p.coeffs()
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join("_")
    };
    dir.join(format!(
        "twist-q{}-A{}-B{}-d{d}-{orientation}.jsonl",
        curve.field().q(),
        join(curve.a()),
        join(curve.b())
    ))
}

/// A polynomial from a stored coefficient list, which must be canonical.
pub fn stored_poly(field: FieldSpec, c: &[u32]) -> Result<Poly, String> {
    let p = Poly::from_residues(field, c.to_vec());
    if p.coeffs() != c {
        return Err(format!(
            "coefficients {c:?} are not reduced modulo {}",
            field.q()
        ));
    }
    Ok(p)
}

impl DirichletLine {
    pub fn from_poly(l: &LPolynomial) -> Self {
        Self {
            v: SCHEMA_VERSION,
            q: l.q(),
            p: l.conductor().coeffs().to_vec(),
            g: l.genus(),
            c: l.coeffs().to_vec(),
        }
    }

    /// Rebuilds the L-polynomial, checking that it belongs to the requested
    /// sweep and that its functional equation holds.
    pub fn into_poly(
        self,
        q: u32,
        g: usize,
        orientation: Orientation,
    ) -> Result<LPolynomial, String> {
        if self.v != SCHEMA_VERSION || self.q != q || self.g != g {
            return Err(format!(
                "record (v = {}, q = {}, g = {}) does not belong to q = {q}, g = {g}",
                self.v, self.q, self.g
            ));
        }
        let field = FieldSpec::new(q).map_err(|e| e.to_string())?;
        let p = stored_poly(field, &self.p)?;
        if !p.is_monic() || p.deg() != Some(2 * g + 1) {
            return Err(format!(
                "conductor {p} is not monic of degree {}",
                2 * g + 1
            ));
        }
        let l = LPolynomial::from_parts(p, g, self.c, orientation).map_err(|e| e.to_string())?;
        if !l.verify_functional_equation() {
            return Err(format!(
                "conductor {} fails the functional equation",
                l.conductor()
            ));
        }
        Ok(l)
    }
}

impl TwistLine {
    pub fn from_record(curve: &EllipticCurve, r: &TwistRecord) -> Self {
        Self {
            v: SCHEMA_VERSION,
            q: curve.field().q(),
            a: curve.a().coeffs().to_vec(),
            b: curve.b().coeffs().to_vec(),
            p: r.p.coeffs().to_vec(),
            eps: r.eps,
            rank: r.rank,
            l: r.normalized().iter().map(QuadTriple::from_value).collect(),
            window: r.sign_from_window,
            h: r.horizon,
            pairs: r.verified_pairs,
        }
    }

    /// The stored twist with `χ_P(M)` and `ε_d` still to be recomputed by
    /// the twist context.
    pub fn into_record(self, curve: &EllipticCurve) -> Result<TwistRecord, String> {
        let field = curve.field();
        let q = field.q();
        if self.v != SCHEMA_VERSION
            || self.q != q
            || self.a != curve.a().coeffs()
            || self.b != curve.b().coeffs()
        {
            return Err("record belongs to a different curve or schema".into());
        }
        let p = stored_poly(field, &self.p)?;
        PrimePoly::new(p.clone()).map_err(|_| format!("{p} is not a monic irreducible"))?;
        let coeffs = self
            .l
            .into_iter()
            .enumerate()
            .map(|(n, t)| {
                let b = t.into_value(q).map_err(|e| e.to_string())?;
                let scaled = &b * &QuadValue::sqrt_q_pow(q, n as i64);
                let r = scaled
                    .to_rational()
                    .filter(|r| r.is_integer())
                    .ok_or_else(|| {
                        format!("coefficient {n} of the twist by {p} is not an integer")
                    })?;
                let int: BigInt = r.to_integer();
                i128::try_from(&int).map_err(|_| format!("coefficient {n} overflows"))
            })
            .collect::<Result<Vec<i128>, String>>()?;
        if coeffs.is_empty() {
            return Err(format!("twist by {p} has no coefficients"));
        }
        Ok(TwistRecord {
            m: coeffs.len() - 1,
            p,
            coeffs,
            eps: self.eps,
            eps_deg: 0,
            chi_m: 0,
            rank: self.rank,
            horizon: self.h,
            verified_pairs: self.pairs,
            sign_from_window: self.window,
        })
    }
}

/// Loads the Dirichlet cache for one sweep, keyed by conductor.
pub fn load_dirichlet(
    path: &Path,
    q: u32,
    g: usize,
    orientation: Orientation,
) -> CliResult<HashMap<Poly, LPolynomial>> {
    let Some(lines) = read::<DirichletLine>(path, "dirichlet", orientation)? else {
        return Ok(HashMap::new());
    };
    lines
        .into_par_iter()
        .map(|l| {
            l.into_poly(q, g, orientation)
                .map(|l| (l.conductor().clone(), l))
                .map_err(|m| CliError::cache(path, m))
        })
        .collect()
}

pub fn save_dirichlet(
    path: &Path,
    orientation: Orientation,
    polys: &[&LPolynomial],
) -> CliResult<()> {
    let lines: Vec<DirichletLine> = polys.iter().map(|l| DirichletLine::from_poly(l)).collect();
    write(path, "dirichlet", orientation, &lines)
}

/// Loads the twist cache of one curve and degree, keyed by twisting prime.
pub fn load_twists(
    path: &Path,
    curve: &EllipticCurve,
    orientation: Orientation,
) -> CliResult<HashMap<Poly, TwistRecord>> {
    let Some(lines) = read::<TwistLine>(path, "twist", orientation)? else {
        return Ok(HashMap::new());
    };
    lines
        .into_par_iter()
        .map(|l| {
            l.into_record(curve)
                .map(|r| (r.p.clone(), r))
                .map_err(|m| CliError::cache(path, m))
        })
        .collect()
}

pub fn save_twists(
    path: &Path,
    curve: &EllipticCurve,
    orientation: Orientation,
    records: &[TwistRecord],
) -> CliResult<()> {
    let lines: Vec<TwistLine> = records
        .iter()
        .map(|r| TwistLine::from_record(curve, r))
        .collect();
    write(path, "twist", orientation, &lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use primel_core::dirichlet::DirichletContext;

    fn sweep(q: u32, g: usize) -> Vec<LPolynomial> {
        let ctx =
            DirichletContext::new(FieldSpec::new(q).unwrap(), g, Orientation::Standard).unwrap();
        ctx.map_conductors(|p| ctx.l_poly(p)).unwrap()
    }

    #[test]
    fn dirichlet_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dirichlet_path(dir.path(), 3, 1, Orientation::Standard);
        let polys = sweep(3, 1);
        let refs: Vec<&LPolynomial> = polys.iter().collect();
        save_dirichlet(&path, Orientation::Standard, &refs).unwrap();
        let loaded = load_dirichlet(&path, 3, 1, Orientation::Standard).unwrap();
        assert_eq!(loaded.len(), polys.len());
        for l in &polys {
            assert_eq!(&loaded[l.conductor()], l);
        }
        let again: Vec<&LPolynomial> = polys.iter().map(|l| &loaded[l.conductor()]).collect();
        let second = dir.path().join("second.jsonl");
        save_dirichlet(&second, Orientation::Standard, &again).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&second).unwrap()
        );
    }

    #[test]
    fn corruption_and_version_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dirichlet_path(dir.path(), 3, 1, Orientation::Standard);
        let polys = sweep(3, 1);
        let refs: Vec<&LPolynomial> = polys.iter().collect();
        save_dirichlet(&path, Orientation::Standard, &refs).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();

        let corrupted = text.replacen("\"c\":[1,", "\"c\":[2,", 1);
        assert_ne!(corrupted, text);
        std::fs::write(&path, &corrupted).unwrap();
        let err = load_dirichlet(&path, 3, 1, Orientation::Standard).unwrap_err();
        assert!(err.to_string().contains("checksum"), "{err}");
        assert_eq!(err.exit_code(), 5);

        let bumped = text.replacen("\"v\":1", "\"v\":2", 1);
        std::fs::write(&path, bumped).unwrap();
        let err = load_dirichlet(&path, 3, 1, Orientation::Standard).unwrap_err();
        assert!(err.to_string().contains("schema version 2"), "{err}");

        std::fs::write(&path, &text).unwrap();
        assert!(load_dirichlet(&path, 3, 1, Orientation::Literal).is_err());
        assert!(load_dirichlet(&path, 3, 2, Orientation::Standard).is_err());
    }

    #[test]
    fn bad_functional_equation_behind_a_valid_checksum() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("forged.jsonl");
        let mut lines: Vec<DirichletLine> =
            sweep(3, 1).iter().map(DirichletLine::from_poly).collect();
        lines[0].c[2] += 1;
        write(&path, "dirichlet", Orientation::Standard, &lines).unwrap();
        let err = load_dirichlet(&path, 3, 1, Orientation::Standard).unwrap_err();
        assert!(err.to_string().contains("functional equation"), "{err}");
    }

    #[test]
    fn twist_line_round_trip() {
        use primel_core::elliptic::TwistContext;
        let e = EllipticCurve::from_coeffs(5, &[1], &[1, 1]).unwrap();
        let ctx = TwistContext::with_defaults(e).unwrap();
        let sweep = ctx.sweep(1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = twist_path(dir.path(), ctx.curve(), 1, Orientation::Literal);
        save_twists(&path, ctx.curve(), Orientation::Literal, &sweep.records).unwrap();
        let loaded = load_twists(&path, ctx.curve(), Orientation::Literal).unwrap();
        for r in &sweep.records {
            let back = ctx.revalidate(loaded[&r.p].clone()).unwrap();
            assert_eq!(&back, r);
        }
    }
}

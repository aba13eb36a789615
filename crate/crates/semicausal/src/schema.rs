//! JSON interchange format for maps, factors and reports.
//!
//! A channel file carries one map. Complex entries are `[re, im]` pairs,
//! matrices are nested row-major arrays, and a Kraus representation is a
//! list of such matrices. Bipartite maps declare `{"dA": .., "dB": ..}`;
//! standalone factors declare `{"din": .., "dout": ..}` instead. Writers
//! normalize `-0.0` to `0.0` and end the file with a newline, so equal maps
//! produce byte-identical files.
//!
//! Parsing is strict: unknown fields, shape mismatches, non-positive or
//! non-subunital data are all rejected. The optional `picture` metadata is
//! informational; the operator content of a Kraus set is the same in either
//! picture, and the Choi matrix is stored in the fixed convention used
//! throughout the crate.

use serde::{Deserialize, Serialize};

use crate::causality::BipartiteMap;
use crate::error::{Error, Result};
use crate::mat::CMatrix;
use crate::qmap::{BipartiteDims, CpMap};
use crate::DEFAULT_TOL;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Repr {
    Kraus,
    Choi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    Heisenberg,
    Schrodinger,
}

/// Either `{dA, dB}` for a bipartite map or `{din, dout}` for a standalone
/// factor. Exactly one style must be present.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileDims {
    #[serde(rename = "dA", skip_serializing_if = "Option::is_none")]
    pub d_a: Option<usize>,
    #[serde(rename = "dB", skip_serializing_if = "Option::is_none")]
    pub d_b: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub din: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dout: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub picture: Option<Picture>,
}

/// Matrix payload: four levels deep for a Kraus list, three for a Choi
/// matrix. The `repr` tag must agree with the nesting.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapData {
    Kraus(Vec<Vec<Vec<[f64; 2]>>>),
    Choi(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub format_version: u32,
    pub dims: FileDims,
    pub repr: Repr,
    pub data: MapData,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

/// The map a channel file contains, after validation.
#[derive(Debug, Clone)]
pub enum ParsedMap {
    Bipartite(BipartiteMap),
    Single(CpMap),
}

impl ParsedMap {
    pub fn cp_map(&self) -> &CpMap {
        match self {
            ParsedMap::Bipartite(m) => m.map(),
            ParsedMap::Single(e) => e,
        }
    }
}

impl ChannelFile {
    /// Informational picture tag, defaulting to Heisenberg.
    pub fn picture(&self) -> Picture {
        self.metadata
            .as_ref()
            .and_then(|m| m.picture)
            .unwrap_or(Picture::Heisenberg)
    }

    pub fn name(&self) -> Option<&str> {
        self.metadata.as_ref().and_then(|m| m.name.as_deref())
    }
}

fn scrub(x: f64) -> f64 {
    // Folds -0.0 into 0.0 so renders are canonical; leaves everything
    // else alone.
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn matrix_to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [scrub(m[(r, c)].re), scrub(m[(r, c)].im)]).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<[f64; 2]>], nrows: usize, ncols: usize, what: &str) -> Result<CMatrix> {
    if rows.len() != nrows {
        return Err(Error::Schema(format!(
            "{what}: expected {nrows} rows, found {}",
            rows.len()
        )));
    }
    let mut m = crate::mat::zeros(nrows, ncols);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::Schema(format!(
                "{what}: row {r} has {} entries, expected {ncols}",
                row.len()
            )));
        }
        for (c, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Schema(format!("{what}: non-finite entry at ({r}, {c})")));
            }
            m[(r, c)] = crate::mat::C64::new(re, im);
        }
    }
    Ok(m)
}

/// Dimension pair extracted from a file: `(din, dout, bipartite_dims)`.
fn resolve_dims(dims: &FileDims) -> Result<(usize, usize, Option<BipartiteDims>)> {
    match (dims.d_a, dims.d_b, dims.din, dims.dout) {
        (Some(da), Some(db), None, None) => {
            if da == 0 || db == 0 {
                return Err(Error::Schema("dims must be positive".into()));
            }
            let d = da * db;
            Ok((d, d, Some(BipartiteDims::new(da, db))))
        }
        (None, None, Some(din), Some(dout)) => {
            if din == 0 || dout == 0 {
                return Err(Error::Schema("dims must be positive".into()));
            }
            Ok((din, dout, None))
        }
        _ => Err(Error::Schema(
            "dims must be either {dA, dB} or {din, dout}, not a mixture".into(),
        )),
    }
}

/// Validates a parsed file and builds the map it describes. Kraus data is
/// checked for shape and subunitality; Choi data additionally for
/// Hermiticity, positivity and subunitality.
pub fn realize(file: &ChannelFile) -> Result<ParsedMap> {
    if file.format_version != FORMAT_VERSION {
        return Err(Error::Schema(format!(
            "unsupported format_version {} (this build reads {FORMAT_VERSION})",
            file.format_version
        )));
    }
    let (din, dout, bipartite) = resolve_dims(&file.dims)?;
    let e = match (&file.repr, &file.data) {
        (Repr::Kraus, MapData::Kraus(ops_data)) => {
            if ops_data.is_empty() {
                return Err(Error::EmptyKrausSet);
            }
            let ops = ops_data
                .iter()
                .enumerate()
                .map(|(i, rows)| rows_to_matrix(rows, dout, din, &format!("kraus operator {i}")))
                .collect::<Result<Vec<_>>>()?;
            CpMap::from_kraus_ops(ops, DEFAULT_TOL)?
        }
        (Repr::Choi, MapData::Choi(rows)) => {
            let d = din * dout;
            let choi = rows_to_matrix(rows, d, d, "choi matrix")?;
            let e = CpMap::new(din, dout, choi)?;
            if !e.is_cp(DEFAULT_TOL) {
                return Err(Error::Schema(
                    "choi matrix is not positive semidefinite".into(),
                ));
            }
            if !e.is_subunital(DEFAULT_TOL) {
                return Err(Error::Schema("map exceeds the identity on E(1)".into()));
            }
            e
        }
        _ => {
            return Err(Error::Schema(
                "repr tag does not match the nesting depth of data".into(),
            ));
        }
    };
    match bipartite {
        Some(dims) => Ok(ParsedMap::Bipartite(BipartiteMap::new(dims, e)?)),
        None => Ok(ParsedMap::Single(e)),
    }
}

/// Parses and validates a channel file from JSON text.
pub fn parse_channel(text: &str) -> Result<(ChannelFile, ParsedMap)> {
    let file: ChannelFile = serde_json::from_str(text)?;
    let map = realize(&file)?;
    Ok((file, map))
}

/// Renders a channel file as pretty JSON with a trailing newline.
pub fn render_channel(file: &ChannelFile) -> String {
    let mut text = serde_json::to_string_pretty(file).expect("channel files serialize");
    text.push('\n');
    text
}

pub fn bipartite_kraus_file(
    dims: BipartiteDims,
    ops: &[CMatrix],
    metadata: Option<Metadata>,
) -> ChannelFile {
    ChannelFile {
        format_version: FORMAT_VERSION,
        dims: FileDims { d_a: Some(dims.da), d_b: Some(dims.db), ..FileDims::default() },
        repr: Repr::Kraus,
        data: MapData::Kraus(ops.iter().map(matrix_to_rows).collect()),
        metadata,
    }
}

pub fn bipartite_choi_file(m: &BipartiteMap, metadata: Option<Metadata>) -> ChannelFile {
    ChannelFile {
        format_version: FORMAT_VERSION,
        dims: FileDims {
            d_a: Some(m.dims().da),
            d_b: Some(m.dims().db),
            ..FileDims::default()
        },
        repr: Repr::Choi,
        data: MapData::Choi(matrix_to_rows(m.map().choi())),
        metadata,
    }
}

pub fn single_kraus_file(
    din: usize,
    dout: usize,
    ops: &[CMatrix],
    metadata: Option<Metadata>,
) -> ChannelFile {
    ChannelFile {
        format_version: FORMAT_VERSION,
        dims: FileDims { din: Some(din), dout: Some(dout), ..FileDims::default() },
        repr: Repr::Kraus,
        data: MapData::Kraus(ops.iter().map(matrix_to_rows).collect()),
        metadata,
    }
}

pub fn single_choi_file(e: &CpMap, metadata: Option<Metadata>) -> ChannelFile {
    ChannelFile {
        format_version: FORMAT_VERSION,
        dims: FileDims { din: Some(e.din()), dout: Some(e.dout()), ..FileDims::default() },
        repr: Repr::Choi,
        data: MapData::Choi(matrix_to_rows(e.choi())),
        metadata,
    }
}

/// Reads and validates a channel file from disk.
pub fn load_channel(path: &std::path::Path) -> Result<(ChannelFile, ParsedMap)> {
    parse_channel(&std::fs::read_to_string(path)?)
}

/// Writes a channel file to disk in canonical form.
pub fn save_channel(path: &std::path::Path, file: &ChannelFile) -> Result<()> {
    std::fs::write(path, render_channel(file))?;
    Ok(())
}

// ---- Reports ---------------------------------------------------------------

/// Classification result in serializable form.
#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub semicausal_b_to_a_blocked: bool,
    pub semicausal_a_to_b_blocked: bool,
    pub causal: bool,
    pub product_localizable: bool,
    pub residual_b_to_a: f64,
    pub residual_a_to_b: f64,
}

impl From<&crate::causality::CausalityVerdict> for VerdictReport {
    fn from(v: &crate::causality::CausalityVerdict) -> Self {
        Self {
            semicausal_b_to_a_blocked: v.semicausal_b_to_a_blocked,
            semicausal_a_to_b_blocked: v.semicausal_a_to_b_blocked,
            causal: v.causal,
            product_localizable: v.product_localizable,
            residual_b_to_a: v.residual_b_to_a,
            residual_a_to_b: v.residual_a_to_b,
        }
    }
}

/// Summary of a successful factorization.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub d_c: usize,
    pub d_d: usize,
    pub reconstruction_residual: f64,
    pub f_unitality: f64,
}

impl From<&crate::factorize::Decomposition> for DecompositionReport {
    fn from(d: &crate::factorize::Decomposition) -> Self {
        Self {
            d_c: d.d_c,
            d_d: d.d_d,
            reconstruction_residual: d.reconstruction_residual,
            f_unitality: d.f_unitality,
        }
    }
}

/// Outcome of re-checking shipped factors against the original map.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub d_c: usize,
    pub choi_distance: f64,
    pub f_unitality_defect: f64,
    pub pass: bool,
}

impl From<&crate::factorize::VerificationReport> for VerifyReport {
    fn from(r: &crate::factorize::VerificationReport) -> Self {
        Self {
            d_c: r.d_c,
            choi_distance: r.choi_distance,
            f_unitality_defect: r.f_unitality_defect,
            pass: r.pass,
        }
    }
}

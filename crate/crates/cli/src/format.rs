//! JSON file formats. Complex numbers are `[re, im]` pairs and matrices are
//! nested row arrays of them.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use locc_core::linalg::Matrix;
use locc_core::protocol::{InstrumentElement, Protocol, Tail};
use locc_core::scalar::C;
use locc_core::states::BipartiteState;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const PROTOCOL_VERSION: &str = "locc-protocol/1";

/// Norm deviation above which loading a state prints a warning.
pub const NORM_WARNING: f64 = 1e-6;

pub type Pair = [f64; 2];
pub type MatrixJson = Vec<Vec<Pair>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: [usize; 2],
    /// Row-major `|i⟩⊗|j⟩` amplitudes.
    pub amplitudes: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementJson {
    pub m: MatrixJson,
    pub u: MatrixJson,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailJson {
    pub n: MatrixJson,
    pub v: MatrixJson,
    pub p: f64,
    pub n_fail: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolFile {
    pub version: String,
    /// SHA-256 of the normalized source state, see [`state_digest`].
    pub source_digest: String,
    pub target_digest: String,
    pub declared_probability: f64,
    pub stage1: Vec<ElementJson>,
    pub m0: MatrixJson,
    pub stage2: Option<TailJson>,
    pub intermediate: StateFile,
}

/// Alice's contraction and Bob's unitary from a Lo-Popescu reduction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoPopescuFile {
    pub n: MatrixJson,
    pub u: MatrixJson,
}

pub fn matrix_to_json(m: &Matrix<f64>) -> MatrixJson {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> anyhow::Result<Matrix<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        bail!("matrix must have at least one row and one column");
    }
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        bail!("row {i} has {} entries, expected {cols}", rows[i].len());
    }
    let data = rows
        .iter()
        .flatten()
        .map(|&[re, im]| C::new(re, im))
        .collect();
    Ok(Matrix::from_vec(rows.len(), cols, data)?)
}

impl StateFile {
    pub fn from_state(s: &BipartiteState<f64>) -> Self {
        Self {
            dims: [s.dim_a(), s.dim_b()],
            amplitudes: s.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    /// Normalized state and the norm of the stored amplitudes.
    pub fn to_state(&self) -> anyhow::Result<(BipartiteState<f64>, f64)> {
        let [n, m] = self.dims;
        if n == 0 || m == 0 {
            bail!("dims must be positive, got {n}x{m}");
        }
        let amps: Vec<C<f64>> = self
            .amplitudes
            .iter()
            .map(|&[re, im]| C::new(re, im))
            .collect();
        Ok(BipartiteState::from_amplitudes(&amps, n, m)?)
    }
}

/// Hex SHA-256 over the dimensions and amplitudes as little-endian bytes.
pub fn state_digest(s: &BipartiteState<f64>) -> String {
    let mut h = Sha256::new();
    h.update((s.dim_a() as u64).to_le_bytes());
    h.update((s.dim_b() as u64).to_le_bytes());
    for z in s.amplitudes() {
        h.update(z.re.to_le_bytes());
        h.update(z.im.to_le_bytes());
    }
    hex::encode(h.finalize())
}

impl ProtocolFile {
    pub fn from_protocol(
        p: &Protocol<f64>,
        source: &BipartiteState<f64>,
        target: &BipartiteState<f64>,
    ) -> Self {
        Self {
            version: PROTOCOL_VERSION.to_string(),
            source_digest: state_digest(source),
            target_digest: state_digest(target),
            declared_probability: p.declared_probability,
            stage1: p
                .stage1
                .iter()
                .map(|e| ElementJson {
                    m: matrix_to_json(&e.m),
                    u: matrix_to_json(&e.u),
                    q: e.q,
                })
                .collect(),
            m0: matrix_to_json(&p.m0),
            stage2: p.stage2.as_ref().map(|t| TailJson {
                n: matrix_to_json(&t.n),
                v: matrix_to_json(&t.v),
                p: t.p,
                n_fail: matrix_to_json(&t.n_fail),
            }),
            intermediate: StateFile::from_state(&p.intermediate),
        }
    }

    pub fn to_protocol(&self) -> anyhow::Result<Protocol<f64>> {
        if self.version != PROTOCOL_VERSION {
            bail!("unsupported protocol version {:?}", self.version);
        }
        if self.stage1.is_empty() {
            bail!("protocol has no stage-one elements");
        }
        let stage1 = self
            .stage1
            .iter()
            .enumerate()
            .map(|(k, e)| {
                Ok(InstrumentElement {
                    m: matrix_from_json(&e.m).with_context(|| format!("stage1[{k}].m"))?,
                    u: matrix_from_json(&e.u).with_context(|| format!("stage1[{k}].u"))?,
                    q: e.q,
                })
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        let stage2 = match &self.stage2 {
            None => None,
            Some(t) => Some(Tail {
                n: matrix_from_json(&t.n).context("stage2.n")?,
                v: matrix_from_json(&t.v).context("stage2.v")?,
                p: t.p,
                n_fail: matrix_from_json(&t.n_fail).context("stage2.n_fail")?,
            }),
        };
        // stored already normalized; a tampered intermediate is caught by verification
        let (intermediate, _) = self.intermediate.to_state().context("intermediate")?;
        Ok(Protocol {
            stage1,
            m0: matrix_from_json(&self.m0).context("m0")?,
            stage2,
            intermediate,
            declared_probability: self.declared_probability,
        })
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

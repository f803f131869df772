//! JSON exchange format for matrices, subspaces, product families and
//! witnesses.
//!
//! ```json
//! {"kind": "subspace", "dims": {"m": 2, "n": 3},
//!  "data": [[0.0, 0.0], [0.7071, 0.0], ...], "metadata": {}}
//! ```
//!
//! `data` holds complex entries as `[re, im]` pairs in row-major order. Rows
//! are `mn` wide for every kind except `product_family`, whose rows are
//! `e ‖ f` (`m + n` entries). Documents may declare `m > n`; conversion to
//! library objects then reorders the factors so that `m ≤ n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::families::{FamilySample, ProductFamily};
use crate::subspace::{orthonormalize, Subspace};
use crate::tensor::{swap_operator, swap_vector, BipartiteDims, CMat, CVec, ProductVector};
use crate::witness::Witness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocumentKind {
    Matrix,
    Subspace,
    ProductFamily,
    Witness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocDims {
    pub m: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDocument {
    pub kind: DocumentKind,
    pub dims: DocDims,
    pub data: Vec<[f64; 2]>,
    #[serde(default)]
    pub metadata: Map<String, Value>,
}

fn encode(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn decode(p: &[f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl MatrixDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| Error::Precondition(format!("malformed document: {e}")))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("documents always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    /// Entries per row.
    pub fn row_width(&self) -> usize {
        match self.kind {
            DocumentKind::ProductFamily => self.dims.m + self.dims.n,
            _ => self.dims.m * self.dims.n,
        }
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.row_width().max(1)
    }

    /// Dims, data length and finiteness checks.
    pub fn validate(&self) -> Result<()> {
        BipartiteDims::new(self.dims.m, self.dims.n)?;
        let width = self.row_width();
        if self.data.len() % width != 0 {
            return Err(Error::DimensionMismatch { expected: width * (self.data.len() / width + 1), actual: self.data.len() });
        }
        if matches!(self.kind, DocumentKind::Matrix | DocumentKind::Witness) && self.data.len() != width * width {
            return Err(Error::DimensionMismatch { expected: width * width, actual: self.data.len() });
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Precondition("non-finite entry".into()));
        }
        Ok(())
    }

    fn bipartite(&self) -> Result<BipartiteDims> {
        BipartiteDims::new(self.dims.m, self.dims.n)
    }

    fn row(&self, r: usize) -> CVec {
        let w = self.row_width();
        CVec::from_iterator(w, self.data[r * w..(r + 1) * w].iter().map(decode))
    }

    /// Square operator in canonical (`m ≤ n`) layout.
    pub fn to_matrix(&self) -> Result<(CMat, BipartiteDims)> {
        self.validate()?;
        if !matches!(self.kind, DocumentKind::Matrix | DocumentKind::Witness) {
            return Err(Error::Precondition(format!("expected a matrix or witness document, got {:?}", self.kind)));
        }
        let dims = self.bipartite()?;
        let d = dims.total();
        let x = CMat::from_fn(d, d, |r, c| decode(&self.data[r * d + c]));
        let x = if dims.swapped() { swap_operator(&x, self.dims.m, self.dims.n) } else { x };
        Ok((x, dims.canonical()))
    }

    pub fn to_witness(&self) -> Result<Witness> {
        let (x, dims) = self.to_matrix()?;
        Witness::new(x, dims)
    }

    /// Orthonormalized row span in canonical layout.
    pub fn to_subspace(&self) -> Result<Subspace> {
        self.validate()?;
        if self.kind != DocumentKind::Subspace {
            return Err(Error::Precondition(format!("expected a subspace document, got {:?}", self.kind)));
        }
        let dims = self.bipartite()?;
        let raw: Vec<CVec> = (0..self.rows())
            .map(|r| {
                let v = self.row(r);
                if dims.swapped() { swap_vector(&v, self.dims.m, self.dims.n) } else { v }
            })
            .collect();
        if raw.is_empty() {
            return Err(Error::Precondition("subspace document has no rows".into()));
        }
        orthonormalize(&raw, dims.canonical())
    }

    pub fn to_family(&self) -> Result<ProductFamily> {
        self.validate()?;
        if self.kind != DocumentKind::ProductFamily {
            return Err(Error::Precondition(format!("expected a product_family document, got {:?}", self.kind)));
        }
        let dims = self.bipartite()?;
        let (m, n) = (self.dims.m, self.dims.n);
        let samples = (0..self.rows())
            .map(|r| {
                let row = self.row(r);
                let (a, b) = (row.rows(0, m).into_owned(), row.rows(m, n).into_owned());
                let pv = if dims.swapped() { ProductVector::new(b, a) } else { ProductVector::new(a, b) };
                FamilySample { params: Vec::new(), chart: pv.chart(), pv }
            })
            .collect();
        Ok(ProductFamily { dims: dims.canonical(), samples, certified: false })
    }

    pub fn from_matrix(kind: DocumentKind, x: &CMat, dims: &BipartiteDims) -> Self {
        let data = x.transpose().iter().map(|&z| encode(z)).collect();
        Self { kind, dims: DocDims { m: dims.m(), n: dims.n() }, data, metadata: Map::new() }
    }

    pub fn from_subspace(v: &Subspace) -> Self {
        let dims = v.dims();
        let data = v.basis().iter().flat_map(|b| b.iter().map(|&z| encode(z))).collect();
        Self { kind: DocumentKind::Subspace, dims: DocDims { m: dims.m(), n: dims.n() }, data, metadata: Map::new() }
    }

    pub fn from_family(fam: &ProductFamily) -> Self {
        let data = fam
            .samples
            .iter()
            .flat_map(|s| s.pv.e.iter().chain(s.pv.f.iter()).map(|&z| encode(z)).collect::<Vec<_>>())
            .collect();
        let mut metadata = Map::new();
        let params: Vec<Value> = fam
            .samples
            .iter()
            .map(|s| Value::from(s.params.iter().map(|&z| Value::from(encode(z).to_vec())).collect::<Vec<_>>()))
            .collect();
        metadata.insert("params".into(), Value::from(params));
        metadata.insert("charts".into(), Value::from(fam.samples.iter().map(|s| s.chart).collect::<Vec<_>>()));
        metadata.insert("certified".into(), Value::from(fam.certified));
        Self {
            kind: DocumentKind::ProductFamily,
            dims: DocDims { m: fam.dims.m(), n: fam.dims.n() },
            data,
            metadata,
        }
    }

    pub fn with_metadata(mut self, key: &str, value: Value) -> Self {
        self.metadata.insert(key.to_string(), value);
        self
    }
}

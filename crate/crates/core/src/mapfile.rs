//! JSON map files. Complex numbers are `[re, im]` pairs; floats are written
//! in shortest round-trip form, so serialize-then-parse is bit-exact.
//!
//! ```json
//! {"n": 2,
//!  "h": {"kind": "poly", "terms": [{"alpha": [1, 0], "coeff": [[1, 0], [0, 0]]}]},
//!  "g": {"kind": "mobius", "a": [[[1, 0], [0, 0], [0, 0]], ...]}}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holomap::{HoloMap, MobiusMap, PolyMap};
use crate::lincomplex::{CMatrix, CVector, C64};
use crate::plurimap::PluriMap;

pub type Pair = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub n: usize,
    pub h: PartFile,
    pub g: PartFile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PartFile {
    Poly { terms: Vec<TermFile> },
    Mobius { a: Vec<Vec<Pair>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub alpha: Vec<u32>,
    pub coeff: Vec<Pair>,
}

pub fn pair(z: C64) -> Pair {
    [z.re, z.im]
}

pub fn from_pair(p: &Pair) -> C64 {
    C64::new(p[0], p[1])
}

fn check_finite(p: &Pair, at: &str) -> Result<C64> {
    if p.iter().all(|x| x.is_finite()) {
        Ok(from_pair(p))
    } else {
        Err(Error::InvalidMap(format!("{at}: non-finite coefficient")))
    }
}

impl PartFile {
    fn from_holo(f: &HoloMap, which: &str) -> Result<Self> {
        match f {
            HoloMap::Poly(p) => Ok(PartFile::Poly {
                terms: p
                    .terms()
                    .map(|(a, c)| TermFile {
                        alpha: a.clone(),
                        coeff: c.iter().map(|&z| pair(z)).collect(),
                    })
                    .collect(),
            }),
            HoloMap::Mobius(m) => Ok(PartFile::Mobius {
                a: m
                    .coefficients()
                    .rows()
                    .map(|r| r.iter().map(|&z| pair(z)).collect())
                    .collect(),
            }),
            _ => Err(Error::InvalidMap(format!(
                "{which}: only polynomial and Moebius parts can be written to a map file"
            ))),
        }
    }

    fn to_holo(&self, n: usize, which: &str) -> Result<HoloMap> {
        match self {
            PartFile::Poly { terms } => {
                let mut parsed = Vec::with_capacity(terms.len());
                for (idx, t) in terms.iter().enumerate() {
                    let at = format!("{which}.terms[{idx}]");
                    if t.alpha.len() != n {
                        return Err(Error::InvalidMap(format!(
                            "{at}.alpha: length {} but n = {n}",
                            t.alpha.len()
                        )));
                    }
                    if t.coeff.len() != n {
                        return Err(Error::InvalidMap(format!(
                            "{at}.coeff: length {} but n = {n}",
                            t.coeff.len()
                        )));
                    }
                    let coeff = t
                        .coeff
                        .iter()
                        .map(|p| check_finite(p, &at))
                        .collect::<Result<Vec<_>>>()?;
                    parsed.push((t.alpha.clone(), CVector::new(coeff)?));
                }
                Ok(HoloMap::Poly(PolyMap::new(n, parsed)?))
            }
            PartFile::Mobius { a } => {
                if a.len() != n + 1 || a.iter().any(|r| r.len() != n + 1) {
                    return Err(Error::InvalidMap(format!(
                        "{which}.a: expected a {0}x{0} matrix",
                        n + 1
                    )));
                }
                let rows = a
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        r.iter()
                            .map(|p| check_finite(p, &format!("{which}.a[{i}]")))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let m = MobiusMap::new(CMatrix::from_rows(rows)?)
                    .map_err(|e| Error::InvalidMap(format!("{which}: {e}")))?;
                Ok(HoloMap::Mobius(m))
            }
        }
    }
}

impl MapFile {
    pub fn from_map(map: &PluriMap) -> Result<Self> {
        Ok(Self {
            n: map.dim(),
            h: PartFile::from_holo(map.h(), "h")?,
            g: PartFile::from_holo(map.g(), "g")?,
        })
    }

    pub fn to_map(&self) -> Result<PluriMap> {
        if self.n == 0 {
            return Err(Error::EmptyDimension);
        }
        PluriMap::new(self.h.to_holo(self.n, "h")?, self.g.to_holo(self.n, "g")?)
    }
}

pub fn to_json(map: &PluriMap) -> Result<String> {
    let file = MapFile::from_map(map)?;
    Ok(serde_json::to_string_pretty(&file).expect("map files always serialize"))
}

pub fn from_json(text: &str) -> Result<PluriMap> {
    let file: MapFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidMap(format!("map file: {e}")))?;
    file.to_map()
}

//! JSON measure files:
//! `{schema_version, dim, N, constructor, seed, atoms: [[index…, weight]…]}`.

use std::fs;
use std::path::Path;

use serde::de::Error as _;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Constructor, DiscreteMeasure, FlatnessCertificate, Metadata};
use crate::config::SCHEMA_VERSION;
use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Clone, Debug, PartialEq)]
pub struct AtomRecord {
    pub index: Vec<usize>,
    pub weight: f64,
}

impl Serialize for AtomRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.index.len() + 1))?;
        for i in &self.index {
            seq.serialize_element(i)?;
        }
        seq.serialize_element(&self.weight)?;
        seq.end()
    }
}

impl<'de> Deserialize<'de> for AtomRecord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<serde_json::Value> = Vec::deserialize(d)?;
        let (weight, index) = raw
            .split_last()
            .ok_or_else(|| D::Error::custom("empty atom record"))?;
        let weight = weight
            .as_f64()
            .ok_or_else(|| D::Error::custom("atom weight must be a number"))?;
        let index = index
            .iter()
            .map(|v| {
                v.as_u64()
                    .map(|x| x as usize)
                    .ok_or_else(|| D::Error::custom("atom index must be a nonnegative integer"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(AtomRecord { index, weight })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub schema_version: u32,
    pub dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub constructor: Constructor,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity_dimension: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flatness: Option<FlatnessCertificate>,
    pub atoms: Vec<AtomRecord>,
}

impl MeasureFile {
    pub fn from_measure(mu: &DiscreteMeasure, config_hash: Option<String>) -> MeasureFile {
        let g = mu.grid();
        MeasureFile {
            schema_version: SCHEMA_VERSION,
            dim: g.dim,
            n: g.n,
            constructor: mu.meta().constructor.clone(),
            seed: mu.meta().seed,
            config_hash,
            similarity_dimension: mu.meta().similarity_dimension,
            flatness: mu.meta().flatness.clone(),
            atoms: mu
                .atoms()
                .iter()
                .map(|&(i, w)| AtomRecord {
                    index: g.index_vec(i),
                    weight: w,
                })
                .collect(),
        }
    }

    pub fn into_measure(self) -> Result<DiscreteMeasure> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported schema_version {}",
                self.schema_version
            )));
        }
        let g = Grid::new(self.dim, self.n)?;
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok((g.linear(&a.index)?, a.weight)))
            .collect::<Result<Vec<_>>>()?;
        let meta = Metadata {
            constructor: self.constructor,
            seed: self.seed,
            similarity_dimension: self.similarity_dimension,
            flatness: self.flatness,
        };
        DiscreteMeasure::new(g, atoms, meta)
    }
}

impl DiscreteMeasure {
    pub fn to_json(&self, config_hash: Option<String>) -> Result<String> {
        Ok(serde_json::to_string_pretty(&MeasureFile::from_measure(self, config_hash))?)
    }

    pub fn from_json(s: &str) -> Result<DiscreteMeasure> {
        serde_json::from_str::<MeasureFile>(s)?.into_measure()
    }

    pub fn load(path: &Path) -> Result<DiscreteMeasure> {
        let s = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        DiscreteMeasure::from_json(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{cantor, circle, random_flat, RandomFlatParams};

    #[test]
    fn round_trip_is_bit_exact() {
        let measures = vec![
            cantor(4, &[0, 3], 5).unwrap(),
            circle(128, 0.3).unwrap(),
            random_flat(&RandomFlatParams {
                n: 1024,
                m: 90,
                seed: 5,
                c: 4.0,
                max_retries: 50,
            })
            .unwrap(),
        ];
        for m in measures {
            let s = m.to_json(Some("abc".into())).unwrap();
            let back = DiscreteMeasure::from_json(&s).unwrap();
            assert_eq!(back.grid(), m.grid());
            assert_eq!(back.meta(), m.meta());
            for (a, b) in back.atoms().iter().zip(m.atoms()) {
                assert_eq!(a.0, b.0);
                assert_eq!(a.1.to_bits(), b.1.to_bits());
            }
        }
    }

    #[test]
    fn file_layout() {
        let m = cantor(4, &[0, 3], 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&m.to_json(None).unwrap()).unwrap();
        assert_eq!(v["N"], 4);
        assert_eq!(v["dim"], 1);
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["constructor"]["kind"], "cantor");
        assert_eq!(v["atoms"][1], serde_json::json!([3, 0.5]));
    }

    #[test]
    fn rejects_invalid_files() {
        let bad = r#"{"schema_version":1,"dim":1,"N":8,"constructor":{"kind":"uniform"},"seed":null,"atoms":[[9,1.0]]}"#;
        assert!(DiscreteMeasure::from_json(bad).is_err());
        let bad = r#"{"schema_version":1,"dim":1,"N":8,"constructor":{"kind":"uniform"},"seed":null,"atoms":[[1,0.7]]}"#;
        assert!(DiscreteMeasure::from_json(bad).is_err());
    }
}

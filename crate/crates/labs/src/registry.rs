//! Best-known energy registry.
//!
//! Maps instance sizes to the best-known (or optimal) energy, the canonic
//! solution count, whether the value was found under skew symmetry, and —
//! for the record sizes — the published merit factor and the run-length
//! encoded canonic solution. Ships seeded with the tabulated values for
//! odd L up to 61 and the sixteen record solutions.
//!
//! The file form is UTF-8 TSV, `#` comments, columns
//! `L  E_best  C_L  skew  F  RLE` with `-` marking absent values.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use crate::seq::{energy, expand_skew, RleSolution};

const BUILTIN_TSV: &str = include_str!("../data/registry.tsv");

#[derive(Error, Debug)]
pub enum RegistryError {
    #[error("registry I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("registry line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("L={len}: offered energy {offered} does not beat stored {stored}")]
    NotImproving { len: u32, stored: i64, offered: i64 },
    #[error("L={len}: solution decodes to energy {decoded}, not the claimed {claimed}")]
    SolutionMismatch { len: u32, decoded: i64, claimed: i64 },
    #[error("L={len}: solution expands to length {got}")]
    WrongLength { len: u32, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegistryEntry {
    pub energy: i64,
    /// Cardinality of the canonic solution set, when known.
    pub canonic_count: Option<u32>,
    /// True when the energy was achieved under skew symmetry.
    pub skew: bool,
    /// Published merit factor, stored for record rows.
    pub merit: Option<f64>,
    /// Run-length encoded canonic half-coordinate, when published.
    pub rle: Option<RleSolution>,
}

#[derive(Debug, Clone, Default)]
pub struct BestKnownRegistry {
    entries: BTreeMap<u32, RegistryEntry>,
}

impl BestKnownRegistry {
    /// The registry this crate ships with.
    pub fn builtin() -> Self {
        Self::from_tsv(BUILTIN_TSV).expect("embedded registry parses")
    }

    pub fn from_path(path: &Path) -> Result<Self, RegistryError> {
        Self::from_tsv(&std::fs::read_to_string(path)?)
    }

    pub fn from_tsv(text: &str) -> Result<Self, RegistryError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let row = raw.trim();
            if row.is_empty() || row.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = row.split('\t').map(str::trim).collect();
            if fields.len() != 6 {
                return Err(RegistryError::Parse {
                    line,
                    msg: format!("expected 6 tab-separated columns, got {}", fields.len()),
                });
            }
            let parse_err = |msg: String| RegistryError::Parse { line, msg };
            let len: u32 = fields[0]
                .parse()
                .map_err(|e| parse_err(format!("bad L: {e}")))?;
            let energy: i64 = fields[1]
                .parse()
                .map_err(|e| parse_err(format!("bad E_best: {e}")))?;
            let canonic_count = match fields[2] {
                "-" => None,
                s => Some(s.parse().map_err(|e| parse_err(format!("bad C_L: {e}")))?),
            };
            let skew = match fields[3] {
                "0" => false,
                "1" => true,
                other => return Err(parse_err(format!("bad skew flag {other:?}"))),
            };
            let merit = match fields[4] {
                "-" => None,
                s => Some(s.parse().map_err(|e| parse_err(format!("bad F: {e}")))?),
            };
            let rle = match fields[5] {
                "-" => None,
                s => Some(
                    s.parse::<RleSolution>()
                        .map_err(|e| parse_err(format!("bad RLE: {e}")))?,
                ),
            };
            entries.insert(
                len,
                RegistryEntry {
                    energy,
                    canonic_count,
                    skew,
                    merit,
                    rle,
                },
            );
        }
        Ok(Self { entries })
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# columns: L\tE_best\tC_L\tskew\tF\tRLE\n");
        for (len, e) in &self.entries {
            let cl = e
                .canonic_count
                .map_or_else(|| "-".to_string(), |c| c.to_string());
            let f = e.merit.map_or_else(|| "-".to_string(), |f| format!("{f}"));
            let rle = e
                .rle
                .as_ref()
                .map_or_else(|| "-".to_string(), |r| r.to_string());
            out.push_str(&format!(
                "{len}\t{}\t{cl}\t{}\t{f}\t{rle}\n",
                e.energy,
                u8::from(e.skew)
            ));
        }
        out
    }

    pub fn get(&self, len: u32) -> Option<&RegistryEntry> {
        self.entries.get(&len)
    }

    /// Target energy for a solver run at this size.
    pub fn target_for(&self, len: u32) -> Option<i64> {
        self.entries.get(&len).map(|e| e.energy)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u32, &RegistryEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Accepts a new best value only after verifying it: the offered energy
    /// must beat the stored one, and a solution, when attached, must expand
    /// to exactly the offered energy at the right length.
    pub fn record_improvement(
        &mut self,
        len: u32,
        offered: i64,
        rle: Option<RleSolution>,
    ) -> Result<(), RegistryError> {
        if let Some(existing) = self.entries.get(&len) {
            if offered >= existing.energy {
                return Err(RegistryError::NotImproving {
                    len,
                    stored: existing.energy,
                    offered,
                });
            }
        }
        if let Some(rle) = &rle {
            let half = rle.decode().map_err(|e| RegistryError::Parse {
                line: 0,
                msg: e.to_string(),
            })?;
            let full = expand_skew(&half);
            if full.len() != len as usize {
                return Err(RegistryError::WrongLength {
                    len,
                    got: full.len(),
                });
            }
            let decoded = energy(&full);
            if decoded != offered {
                return Err(RegistryError::SolutionMismatch {
                    len,
                    decoded,
                    claimed: offered,
                });
            }
        }
        self.entries.insert(
            len,
            RegistryEntry {
                energy: offered,
                canonic_count: None,
                skew: true,
                merit: None,
                rle,
            },
        );
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_registry_has_the_seeded_rows() {
        let reg = BestKnownRegistry::builtin();
        assert_eq!(reg.target_for(21), Some(26));
        assert_eq!(reg.target_for(13), Some(6));
        assert_eq!(reg.target_for(61), Some(230));
        let rec = reg.get(241).unwrap();
        assert_eq!(rec.energy, 3600);
        assert_eq!(rec.canonic_count, Some(1));
        assert!(rec.rle.is_some());
        assert!((rec.merit.unwrap() - 8.0668).abs() < 1e-9);
        // 29 tabulated odd sizes plus 16 record rows
        assert_eq!(reg.len(), 45);
    }

    #[test]
    fn tsv_round_trip() {
        let reg = BestKnownRegistry::builtin();
        let text = reg.to_tsv();
        let back = BestKnownRegistry::from_tsv(&text).unwrap();
        assert_eq!(back.len(), reg.len());
        for (len, entry) in reg.iter() {
            assert_eq!(back.get(*len).unwrap(), entry);
        }
    }

    #[test]
    fn malformed_rows_are_rejected() {
        assert!(BestKnownRegistry::from_tsv("5\t2\t1\t1\t-").is_err());
        assert!(BestKnownRegistry::from_tsv("5\t2\t1\t2\t-\t-").is_err());
        assert!(BestKnownRegistry::from_tsv("x\t2\t1\t1\t-\t-").is_err());
    }

    #[test]
    fn improvements_are_guarded() {
        let mut reg = BestKnownRegistry::builtin();
        // worse or equal energies are rejected
        assert!(matches!(
            reg.record_improvement(21, 26, None),
            Err(RegistryError::NotImproving { .. })
        ));
        // a claimed solution must decode to the claimed energy
        let bogus: RleSolution = "2,1,1,2,1,2,2".parse().unwrap();
        assert!(matches!(
            reg.record_improvement(25, 20, Some(bogus)),
            Err(RegistryError::WrongLength { .. }) | Err(RegistryError::SolutionMismatch { .. })
        ));
        // a genuine improvement for an unseen size is accepted
        reg.record_improvement(63, 12345, None).unwrap();
        assert_eq!(reg.target_for(63), Some(12345));
    }
}

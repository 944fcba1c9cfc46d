use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::category::FreeObject;
use crate::error::{Error, Result};
use crate::term::Term;
use crate::variety::{NormalForm, Variety};

/// Finite piece of one member `s_A: A → target` of a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BijectionTable {
    pub target: u32,
    pub map: BTreeMap<NormalForm, NormalForm>,
}

impl BijectionTable {
    pub fn new(target: u32, map: BTreeMap<NormalForm, NormalForm>) -> Result<BijectionTable> {
        let mut seen = BTreeMap::new();
        for (a, b) in &map {
            if let Some(prev) = seen.insert(b, a) {
                return Err(Error::Invalid(format!(
                    "table is not injective: {prev} and {a} both go to {b}"
                )));
            }
        }
        Ok(BijectionTable { target, map })
    }

    pub fn inverse(&self, source: u32) -> BijectionTable {
        BijectionTable {
            target: source,
            map: self
                .map
                .iter()
                .map(|(a, b)| (b.clone(), a.clone()))
                .collect(),
        }
    }
}

/// A family of carrier bijections indexed by free objects. Used both for
/// the `s_A` extracted from an automorphism and for central functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BijectionFamily {
    Identity,
    /// The anti-automorphism fixing every generator.
    Reversal,
    /// `a ↦ a⁻¹`; inverse semigroups only.
    Inversion,
    /// A unary term operation together with a term for its inverse.
    Term {
        forward: Term,
        backward: Term,
    },
    /// On objects of rank `len`, the automorphism with `x_i ↦ x_{p[i-1]}`;
    /// identity on every other object.
    Permutation(Vec<u32>),
    /// Partial tables keyed by the rank of the source object.
    Tables(BTreeMap<u32, BijectionTable>),
    /// `outer ∘ inner`.
    Composite(Box<BijectionFamily>, Box<BijectionFamily>),
}

pub type CentralFamily = BijectionFamily;

impl BijectionFamily {
    pub fn then(self, outer: BijectionFamily) -> BijectionFamily {
        BijectionFamily::Composite(Box::new(outer), Box::new(self))
    }

    /// Object that `A` is carried to.
    pub fn target(&self, obj: FreeObject) -> Result<FreeObject> {
        match self {
            BijectionFamily::Tables(t) => match t.get(&obj.rank) {
                Some(tab) => Ok(FreeObject {
                    variety: obj.variety,
                    rank: tab.target,
                }),
                None => Err(Error::CoverageGap(format!("no table for {obj}"))),
            },
            BijectionFamily::Composite(outer, inner) => outer.target(inner.target(obj)?),
            _ => Ok(obj),
        }
    }

    pub fn apply(&self, obj: FreeObject, a: &NormalForm) -> Result<NormalForm> {
        let v = obj.variety;
        match self {
            BijectionFamily::Identity => Ok(a.clone()),
            BijectionFamily::Reversal => Ok(a.reverse()),
            BijectionFamily::Inversion => v.inv(a),
            BijectionFamily::Term { forward, .. } => v.evaluate(forward, std::slice::from_ref(a)),
            BijectionFamily::Permutation(p) if p.len() == obj.rank as usize => {
                let env: Vec<NormalForm> = p.iter().map(|i| v.generator(*i)).collect();
                v.evaluate(&a.to_term(), &env)
            }
            BijectionFamily::Permutation(_) => Ok(a.clone()),
            BijectionFamily::Tables(t) => t
                .get(&obj.rank)
                .and_then(|tab| tab.map.get(a))
                .cloned()
                .ok_or_else(|| Error::CoverageGap(format!("s on {obj} undefined at {a}"))),
            BijectionFamily::Composite(outer, inner) => {
                let mid = inner.apply(obj, a)?;
                outer.apply(inner.target(obj)?, &mid)
            }
        }
    }

    /// The family of inverse maps.
    pub fn inverse(&self) -> BijectionFamily {
        match self {
            BijectionFamily::Term { forward, backward } => BijectionFamily::Term {
                forward: backward.clone(),
                backward: forward.clone(),
            },
            BijectionFamily::Permutation(p) => {
                let mut inv = vec![0; p.len()];
                for (i, j) in p.iter().enumerate() {
                    inv[*j as usize - 1] = i as u32 + 1;
                }
                BijectionFamily::Permutation(inv)
            }
            BijectionFamily::Tables(t) => BijectionFamily::Tables(
                t.iter()
                    .map(|(src, tab)| (tab.target, tab.inverse(*src)))
                    .collect(),
            ),
            BijectionFamily::Composite(outer, inner) => {
                BijectionFamily::Composite(Box::new(inner.inverse()), Box::new(outer.inverse()))
            }
            rule => rule.clone(),
        }
    }

    pub fn load(v: Variety, path: &Path) -> Result<BijectionFamily> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        BijectionFamily::from_json(v, &text)
    }

    pub fn from_json(v: Variety, text: &str) -> Result<BijectionFamily> {
        let raw: FamilyJson =
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("family JSON: {e}")))?;
        raw.build(v)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FamilyJson::from(self)).expect("family serializes")
    }
}

impl fmt::Display for BijectionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BijectionFamily::Identity => write!(f, "identity"),
            BijectionFamily::Reversal => write!(f, "reversal"),
            BijectionFamily::Inversion => write!(f, "inversion"),
            BijectionFamily::Term { forward, .. } => write!(f, "a ↦ {forward}[x1:=a]"),
            BijectionFamily::Permutation(p) => write!(f, "generator permutation {p:?}"),
            BijectionFamily::Tables(t) => {
                let n: usize = t.values().map(|tab| tab.map.len()).sum();
                write!(f, "tables ({} object(s), {n} entries)", t.len())
            }
            BijectionFamily::Composite(outer, inner) => write!(f, "({outer}) ∘ ({inner})"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
enum FamilyJson {
    Identity,
    Reversal,
    Inversion,
    Term {
        forward: String,
        backward: String,
    },
    Permutation {
        images: Vec<u32>,
    },
    Tables {
        tables: Vec<TableJson>,
    },
    Composite {
        outer: Box<FamilyJson>,
        inner: Box<FamilyJson>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableJson {
    source: u32,
    target: u32,
    entries: Vec<(String, String)>,
}

impl FamilyJson {
    fn build(self, v: Variety) -> Result<BijectionFamily> {
        Ok(match self {
            FamilyJson::Identity => BijectionFamily::Identity,
            FamilyJson::Reversal => BijectionFamily::Reversal,
            FamilyJson::Inversion => {
                if v != Variety::InverseSemigroup {
                    return Err(Error::Invalid(format!("inversion family over {v}")));
                }
                BijectionFamily::Inversion
            }
            FamilyJson::Term { forward, backward } => {
                let forward = v.parse_term(&forward)?;
                let backward = v.parse_term(&backward)?;
                if forward.max_var() > 1 || backward.max_var() > 1 {
                    return Err(Error::Invalid("family terms must be unary".into()));
                }
                BijectionFamily::Term { forward, backward }
            }
            FamilyJson::Permutation { images } => {
                let mut sorted = images.clone();
                sorted.sort_unstable();
                if !sorted.iter().copied().eq(1..=images.len() as u32) {
                    return Err(Error::Invalid(format!("{images:?} is not a permutation")));
                }
                BijectionFamily::Permutation(images)
            }
            FamilyJson::Tables { tables } => {
                let mut out = BTreeMap::new();
                for t in tables {
                    let map = t
                        .entries
                        .iter()
                        .map(|(a, b)| Ok((NormalForm::parse(v, a)?, NormalForm::parse(v, b)?)))
                        .collect::<Result<BTreeMap<_, _>>>()?;
                    if out
                        .insert(t.source, BijectionTable::new(t.target, map)?)
                        .is_some()
                    {
                        return Err(Error::Invalid(format!("two tables for rank {}", t.source)));
                    }
                }
                BijectionFamily::Tables(out)
            }
            FamilyJson::Composite { outer, inner } => {
                BijectionFamily::Composite(Box::new(outer.build(v)?), Box::new(inner.build(v)?))
            }
        })
    }
}

impl From<&BijectionFamily> for FamilyJson {
    fn from(f: &BijectionFamily) -> FamilyJson {
        match f {
            BijectionFamily::Identity => FamilyJson::Identity,
            BijectionFamily::Reversal => FamilyJson::Reversal,
            BijectionFamily::Inversion => FamilyJson::Inversion,
            BijectionFamily::Term { forward, backward } => FamilyJson::Term {
                forward: forward.to_string(),
                backward: backward.to_string(),
            },
            BijectionFamily::Permutation(p) => FamilyJson::Permutation { images: p.clone() },
            BijectionFamily::Tables(t) => FamilyJson::Tables {
                tables: t
                    .iter()
                    .map(|(src, tab)| TableJson {
                        source: *src,
                        target: tab.target,
                        entries: tab
                            .map
                            .iter()
                            .map(|(a, b)| (a.serialize(), b.serialize()))
                            .collect(),
                    })
                    .collect(),
            },
            BijectionFamily::Composite(outer, inner) => FamilyJson::Composite {
                outer: Box::new(FamilyJson::from(outer.as_ref())),
                inner: Box::new(FamilyJson::from(inner.as_ref())),
            },
        }
    }
}

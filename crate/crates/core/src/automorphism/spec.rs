use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::category::{hom_set, FreeObject, Morphism, MorphismJson};
use crate::error::{Error, Result};
use crate::variety::Variety;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecKind {
    Identity,
    /// Every generator image replaced by its reverse.
    Mirror,
    Table,
}

/// A candidate automorphism of the category of free algebras of one
/// variety. Objects are named by rank; ranks missing from `object_action`
/// are fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismSpec {
    variety: Variety,
    kind: SpecKind,
    object_action: BTreeMap<u32, u32>,
    table: BTreeMap<Morphism, Morphism>,
}

impl AutomorphismSpec {
    pub fn identity(variety: Variety) -> AutomorphismSpec {
        AutomorphismSpec {
            variety,
            kind: SpecKind::Identity,
            object_action: BTreeMap::new(),
            table: BTreeMap::new(),
        }
    }

    pub fn mirror(variety: Variety) -> AutomorphismSpec {
        AutomorphismSpec {
            kind: SpecKind::Mirror,
            ..AutomorphismSpec::identity(variety)
        }
    }

    pub fn from_table(
        variety: Variety,
        object_action: BTreeMap<u32, u32>,
        table: BTreeMap<Morphism, Morphism>,
    ) -> Result<AutomorphismSpec> {
        let sources: BTreeSet<u32> = object_action.keys().copied().collect();
        let targets: BTreeSet<u32> = object_action.values().copied().collect();
        if sources != targets || targets.len() != object_action.len() {
            return Err(Error::Invalid(
                "object action is not a bijection on its declared ranks".into(),
            ));
        }
        if sources.contains(&0) {
            return Err(Error::Invalid("rank 0 in object action".into()));
        }
        let spec = AutomorphismSpec {
            variety,
            kind: SpecKind::Table,
            object_action,
            table,
        };
        for (from, to) in &spec.table {
            for m in [from, to] {
                if m.domain().variety != variety {
                    return Err(Error::Mismatch(format!("{m} in a {variety} spec")));
                }
            }
            if spec.object(from.domain()) != to.domain()
                || spec.object(from.codomain()) != to.codomain()
            {
                return Err(Error::Mismatch(format!(
                    "table sends {from} to {to}, against the object action"
                )));
            }
        }
        Ok(spec)
    }

    /// A table spec listing the values of `self` on `over`.
    pub fn tabulate(&self, over: &[Morphism]) -> Result<AutomorphismSpec> {
        let table = over
            .iter()
            .map(|m| Ok((m.clone(), self.apply(m)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        AutomorphismSpec::from_table(self.variety, self.full_object_action(over), table)
    }

    fn full_object_action(&self, over: &[Morphism]) -> BTreeMap<u32, u32> {
        let mut action = self.object_action.clone();
        for m in over {
            for o in [m.domain(), m.codomain()] {
                action.entry(o.rank).or_insert(o.rank);
            }
        }
        action
    }

    pub fn variety(&self) -> Variety {
        self.variety
    }

    pub fn kind(&self) -> SpecKind {
        self.kind
    }

    pub fn object_action(&self) -> &BTreeMap<u32, u32> {
        &self.object_action
    }

    pub fn table(&self) -> &BTreeMap<Morphism, Morphism> {
        &self.table
    }

    pub fn object(&self, obj: FreeObject) -> FreeObject {
        FreeObject {
            variety: obj.variety,
            rank: *self.object_action.get(&obj.rank).unwrap_or(&obj.rank),
        }
    }

    pub fn fixes_objects(&self) -> bool {
        self.object_action.iter().all(|(a, b)| a == b)
    }

    /// `Φ(ν)`; a table spec reports a coverage gap outside its table.
    pub fn apply(&self, m: &Morphism) -> Result<Morphism> {
        if m.domain().variety != self.variety {
            return Err(Error::Mismatch(format!(
                "{m} given to a {} spec",
                self.variety
            )));
        }
        match self.kind {
            SpecKind::Identity => Ok(m.clone()),
            SpecKind::Mirror => Morphism::from_normal_forms(
                m.domain(),
                m.codomain(),
                m.images().iter().map(|a| a.reverse()).collect(),
            ),
            SpecKind::Table => self
                .table
                .get(m)
                .cloned()
                .ok_or_else(|| Error::CoverageGap(format!("spec table has no entry for {m}"))),
        }
    }

    /// `Φ⁻¹`. The mirror is an involution; tables are flipped.
    pub fn inverse(&self) -> Result<AutomorphismSpec> {
        match self.kind {
            SpecKind::Identity | SpecKind::Mirror => Ok(self.clone()),
            SpecKind::Table => {
                let mut table = BTreeMap::new();
                for (from, to) in &self.table {
                    if let Some(prev) = table.insert(to.clone(), from.clone()) {
                        return Err(Error::Invalid(format!(
                            "table is not injective: {prev} and {from} both go to {to}"
                        )));
                    }
                }
                let action = self.object_action.iter().map(|(a, b)| (*b, *a)).collect();
                AutomorphismSpec::from_table(self.variety, action, table)
            }
        }
    }

    pub fn load(path: &Path) -> Result<AutomorphismSpec> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        AutomorphismSpec::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<AutomorphismSpec> {
        let raw: SpecJson =
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("spec JSON: {e}")))?;
        let v = raw.variety;
        match raw.kind {
            SpecKind::Identity | SpecKind::Mirror => {
                if !raw.table.is_empty() {
                    return Err(Error::Invalid(format!(
                        "a {:?} spec takes no table",
                        raw.kind
                    )));
                }
                if raw.object_action.iter().any(|(a, b)| a != b) {
                    return Err(Error::Invalid("rule specs fix every object".into()));
                }
                Ok(AutomorphismSpec {
                    variety: v,
                    kind: raw.kind,
                    object_action: BTreeMap::new(),
                    table: BTreeMap::new(),
                })
            }
            SpecKind::Table => {
                let table = raw
                    .table
                    .iter()
                    .map(|e| {
                        Ok((
                            Morphism::from_json(v, &e.from)?,
                            Morphism::from_json(v, &e.to)?,
                        ))
                    })
                    .collect::<Result<BTreeMap<_, _>>>()?;
                AutomorphismSpec::from_table(v, raw.object_action, table)
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = SpecJson {
            variety: self.variety,
            kind: self.kind,
            object_action: self.object_action.clone(),
            table: self
                .table
                .iter()
                .map(|(from, to)| TableEntry {
                    from: from.to_json(),
                    to: to.to_json(),
                })
                .collect(),
        };
        serde_json::to_value(raw).expect("spec serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecJson {
    variety: Variety,
    kind: SpecKind,
    #[serde(default)]
    object_action: BTreeMap<u32, u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    table: Vec<TableEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntry {
    from: MorphismJson,
    to: MorphismJson,
}

/// `Ψ ∘ Φ` tabulated on `over`.
pub fn compose_specs(
    psi: &AutomorphismSpec,
    phi: &AutomorphismSpec,
    over: &[Morphism],
) -> Result<AutomorphismSpec> {
    if psi.variety != phi.variety {
        return Err(Error::Mismatch("specs over different varieties".into()));
    }
    let table = over
        .iter()
        .map(|m| Ok((m.clone(), psi.apply(&phi.apply(m)?)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let mut action = BTreeMap::new();
    for m in over {
        for o in [m.domain(), m.codomain()] {
            action.insert(o.rank, psi.object(phi.object(o)).rank);
        }
    }
    AutomorphismSpec::from_table(phi.variety, action, table)
}

/// Every morphism between objects of the given ranks with images of size
/// at most `max_size`.
pub fn bounded_morphisms(
    v: Variety,
    ranks: &[u32],
    max_size: usize,
    cap: u128,
) -> Result<Vec<Morphism>> {
    let mut out = Vec::new();
    for a in ranks {
        for b in ranks {
            let homs = hom_set(
                FreeObject::new(v, *a)?,
                FreeObject::new(v, *b)?,
                max_size,
                cap,
            )?;
            if (out.len() + homs.len()) as u128 > cap {
                return Err(Error::CapExceeded {
                    what: format!("bounded morphisms over ranks {ranks:?}"),
                    count: (out.len() + homs.len()) as u128,
                    cap,
                });
            }
            out.extend(homs);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::alpha;
    use crate::variety::NormalForm;

    fn sg(r: u32) -> FreeObject {
        FreeObject::new(Variety::Semigroup, r).unwrap()
    }

    #[test]
    fn mirror_reverses_images() {
        let phi = AutomorphismSpec::mirror(Variety::Semigroup);
        let nu = alpha(&NormalForm::Semigroup(vec![1, 2]), sg(2)).unwrap();
        let out = phi.apply(&nu).unwrap();
        assert_eq!(out.images(), &[NormalForm::Semigroup(vec![2, 1])]);
    }

    #[test]
    fn table_round_trips_through_json() {
        let v = Variety::Semigroup;
        let over = bounded_morphisms(v, &[1, 2], 2, 10_000).unwrap();
        let t = AutomorphismSpec::mirror(v).tabulate(&over).unwrap();
        assert_eq!(t.table().len(), over.len());
        let text = t.to_json().to_string();
        assert_eq!(AutomorphismSpec::from_json(&text).unwrap(), t);
        let inv = t.inverse().unwrap();
        for m in &over {
            assert_eq!(&inv.apply(&t.apply(m).unwrap()).unwrap(), m);
        }
    }

    #[test]
    fn table_rejects_inconsistent_entries() {
        let v = Variety::Semigroup;
        let a = alpha(&NormalForm::Semigroup(vec![1]), sg(2)).unwrap();
        let mut table = BTreeMap::new();
        table.insert(a.clone(), a.clone());
        let action = BTreeMap::from([(2, 3), (3, 2)]);
        assert!(AutomorphismSpec::from_table(v, action, table.clone()).is_err());
        let action = BTreeMap::from([(2, 3)]);
        assert!(AutomorphismSpec::from_table(v, action, table).is_err());
    }

    #[test]
    fn uncovered_morphism_is_a_gap() {
        let v = Variety::Semigroup;
        let t = AutomorphismSpec::from_table(v, BTreeMap::new(), BTreeMap::new()).unwrap();
        let m = Morphism::identity(sg(1));
        assert!(matches!(t.apply(&m), Err(Error::CoverageGap(_))));
    }

    #[test]
    fn mirror_twice_is_identity() {
        let v = Variety::InverseSemigroup;
        let over = bounded_morphisms(v, &[1, 2], 1, 10_000).unwrap();
        let m = AutomorphismSpec::mirror(v);
        let both = compose_specs(&m, &m, &over).unwrap();
        for nu in &over {
            assert_eq!(&both.apply(nu).unwrap(), nu);
        }
    }
}
